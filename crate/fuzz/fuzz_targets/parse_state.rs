#![no_main]

use libfuzzer_sys::fuzz_target;
use renyi_core::io::{parse_state, state_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rho) = parse_state(text) {
        let back = parse_state(&state_to_json(&rho)).expect("serialized state parses");
        assert_eq!(back.matrix(), rho.matrix());
        assert_eq!(back.layout(), rho.layout());
    }
});
