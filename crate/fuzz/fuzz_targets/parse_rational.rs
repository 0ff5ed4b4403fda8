#![no_main]

use ibnls_core::rational::{fmt_q, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(x) = parse_rational(text) {
        // Accepted values print back to an equal value.
        assert_eq!(parse_rational(&fmt_q(&x)).unwrap(), x);
    }
});
