#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = ksreg::cli::parse_generator_json(s) {
            let text = serde_json::to_string(&g).unwrap();
            assert_eq!(ksreg::cli::parse_generator_json(&text).unwrap(), g);
            let _ = ksreg::orbit_space::relation_residuals(&g);
        }
    }
});
