#![no_main]

use krein_string::StringSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = StringSpec::parse(text) {
        // anything accepted must survive a print/parse cycle unchanged
        let again = StringSpec::parse(&spec.to_text()).expect("printed spec must parse");
        assert_eq!(again, spec);
        assert_eq!(spec.n_segments(), spec.n_masses() + 1);
    }
});
