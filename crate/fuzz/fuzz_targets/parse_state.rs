#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(z) = ksreg::cli::parse_state(s) {
            assert!(z.is_finite());
        }
        let _ = ksreg::cli::preset_state(s);
    }
});
