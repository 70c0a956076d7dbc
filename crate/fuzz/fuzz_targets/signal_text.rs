#![no_main]

use l1pc::cli::io::parse_signal;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(signal) = parse_signal(text) {
        assert!(!signal.is_empty());
        assert!(signal.iter().all(|v| v.is_finite()));
    }
});
