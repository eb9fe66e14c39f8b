#![no_main]

use krein_string::uniform::TestFunction;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(xi) = text.parse::<TestFunction>() {
        let again: TestFunction = xi.descriptor().parse().expect("descriptor must parse");
        assert_eq!(again, xi);
        let _ = (xi.eval(0.0), xi.derivative(0.5), xi.tail_sup(1.0));
    }
});
