#![no_main]

use dimlab::Method;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(m) = s.parse::<Method>() {
        assert_eq!(m.name().parse::<Method>().expect("canonical name"), m);
    }
});
