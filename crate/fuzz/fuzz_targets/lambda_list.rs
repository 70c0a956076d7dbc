#![no_main]

use l1pc::cli::io::{parse_lambda_list, parse_level_list, parse_positive_list};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_lambda_list(text);
    let _ = parse_level_list(text);
    if let Ok(values) = parse_positive_list(text) {
        assert!(values.iter().all(|v| v.is_finite() && *v > 0.0));
    }
});
