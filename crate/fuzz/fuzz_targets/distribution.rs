#![no_main]

use dimlab::geometry::Distribution;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(dist) = s.parse::<Distribution>() {
        if let Distribution::Beta { a, b } = dist {
            assert!(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite());
        }
        // Display output parses back to the same value
        let again: Distribution = dist.to_string().parse().expect("round trip");
        assert_eq!(again, dist);
    }
});
