#![no_main]

use ibnls_core::pairs::parse_pairs_file;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(pairs) = parse_pairs_file(text) {
        assert!(!pairs.is_empty());
        for p in &pairs {
            let _ = p.conjugates();
        }
    }
});
