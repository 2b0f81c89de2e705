#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(op) = renyi_core::io::parse_operator(text) {
            assert!(op.layout().total_dim() <= renyi_core::layout::MAX_TOTAL_DIM);
        }
    }
});
