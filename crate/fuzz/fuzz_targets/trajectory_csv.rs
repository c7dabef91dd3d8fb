#![no_main]

use ksreg::trajectory::{KeplerTrajectory, OscillatorTrajectory};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(tr) = KeplerTrajectory::read_csv(data, 1e-9) {
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        assert_eq!(KeplerTrajectory::read_csv(buf.as_slice(), 1e-9).unwrap(), tr);
    }
    let _ = OscillatorTrajectory::read_csv(data);
});
