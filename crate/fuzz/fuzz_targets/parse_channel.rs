#![no_main]

use libfuzzer_sys::fuzz_target;
use renyi_core::io::{channel_to_json, parse_channel};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ch) = parse_channel(text) {
        let back = parse_channel(&channel_to_json(&ch)).expect("serialized channel parses");
        assert_eq!(back.kraus(), ch.kraus());
        assert_eq!(back.tags(), ch.tags());
    }
});
