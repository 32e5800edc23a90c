#![no_main]

use dimlab::bench::{preset, Preset};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = preset(s) {
        match p {
            Preset::Sweep(plan) => plan.validate().expect("preset plans validate"),
            Preset::Suite(plan) => assert!(!plan.sweeps().expect("suite expands").is_empty()),
        }
    }
});
