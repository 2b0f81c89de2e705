#![no_main]

use libfuzzer_sys::fuzz_target;
use renyi_core::io::{parse_real_list, MAX_LIST_LEN};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(v) = parse_real_list(text) {
            assert!(!v.is_empty() && v.len() <= MAX_LIST_LEN);
            assert!(v.iter().all(|x| !x.is_nan()));
        }
    }
});
