#![no_main]

use libfuzzer_sys::fuzz_target;
use renyi_leakage::{curve_csv, parse_curve_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_curve_csv(text) {
        let again = parse_curve_csv(&curve_csv(&rows)).expect("written curve parses");
        assert_eq!(again.len(), rows.len());
        for (a, b) in again.iter().zip(&rows) {
            assert!(a.delta.total_cmp(&b.delta).is_eq() && a.bound.total_cmp(&b.bound).is_eq());
        }
    }
});
