#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(grid) = ksreg::cli::parse_bench_grid(s) {
            assert!(!grid.is_empty());
            assert!(grid.iter().all(|&l| l > 0.0 && l <= 1.0));
        }
    }
});
