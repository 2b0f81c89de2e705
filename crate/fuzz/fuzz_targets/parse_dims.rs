#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(d) = renyi_core::io::parse_dims(text) {
            assert!(!d.is_empty());
        }
    }
});
