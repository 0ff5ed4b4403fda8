#![no_main]

use ibnls_core::spectral::{decode_field, encode_field};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(field) = decode_field(data) {
        // A decoded field re-encodes to the same bytes.
        assert_eq!(encode_field(&field), data);
    }
});
