#![no_main]

use dimlab::dataset::{parse_csv, CsvOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // first byte picks the dialect, the rest is the file
    let Some((&flags, body)) = data.split_first() else { return };
    let opts = CsvOptions {
        delimiter: [b',', b'\t', b' ', b';'][(flags & 3) as usize],
        has_header: flags & 4 != 0,
    };
    if let Ok(cloud) = parse_csv(body, &opts) {
        assert!(cloud.n() >= 2);
        assert_eq!(cloud.data().len(), cloud.n() * cloud.p());
        assert!(cloud.data().iter().all(|x| x.is_finite()));
    }
});
