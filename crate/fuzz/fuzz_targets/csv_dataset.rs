#![no_main]

use l1pc::cli::io::parse_csv_dataset;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((x, y)) = parse_csv_dataset(text) {
        // one label per row, every entry finite
        assert_eq!(x.nrows(), y.len());
        assert!(y.iter().all(|v| v.is_finite()));
    }
});
