#![no_main]

use krein_string::csv::parse_response_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((dt, values)) = parse_response_csv(text) {
        assert!(dt > 0.0 && dt.is_finite());
        assert!(values.len() >= 2);
        assert!(values.iter().all(|v| v.is_finite()));
    }
});
