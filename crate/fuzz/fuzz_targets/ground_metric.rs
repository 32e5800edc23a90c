#![no_main]

use dimlab::transport::GroundMetric;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = s.parse::<GroundMetric>() {
        assert_eq!(g.name().parse::<GroundMetric>().expect("canonical name"), g);
    }
});
