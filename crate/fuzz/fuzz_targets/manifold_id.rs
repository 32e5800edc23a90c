#![no_main]

use dimlab::geometry::lookup;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = lookup(s) {
        spec.validate().expect("catalog entries are valid");
        assert!(spec.ambient_p >= spec.native_dim());
    }
});
