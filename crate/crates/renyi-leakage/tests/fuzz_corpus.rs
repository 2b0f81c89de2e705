//! Replays the checked-in fuzz corpus, plus truncations and byte flips of each
//! seed, through the same invariants the fuzz targets assert.

use std::fs;
use std::path::PathBuf;

use renyi_core::io::{
    channel_to_json, parse_channel, parse_dims, parse_grid, parse_operator, parse_real_list, parse_state, state_to_json,
    MAX_LIST_LEN,
};
use renyi_core::layout::MAX_TOTAL_DIM;
use renyi_leakage::{curve_csv, parse_curve_csv};

fn same(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

fn check(target: &str, text: &str) -> bool {
    match target {
        "parse_state" => parse_state(text).map(|rho| {
            let back = parse_state(&state_to_json(&rho)).expect("serialized state parses");
            assert_eq!(back.matrix(), rho.matrix());
            assert_eq!(back.layout(), rho.layout());
        }),
        "parse_operator" => parse_operator(text).map(|op| assert!(op.layout().total_dim() <= MAX_TOTAL_DIM)),
        "parse_channel" => parse_channel(text).map(|ch| {
            let back = parse_channel(&channel_to_json(&ch)).expect("serialized channel parses");
            assert_eq!(back.kraus(), ch.kraus());
            assert_eq!(back.tags(), ch.tags());
        }),
        "parse_real_list" | "parse_grid" => {
            let r = if target == "parse_grid" {
                parse_grid(text)
            } else {
                parse_real_list(text)
            };
            r.map(|v| {
                assert!(!v.is_empty() && v.len() <= MAX_LIST_LEN);
                assert!(v.iter().all(|x| !x.is_nan()));
            })
        }
        "parse_dims" => parse_dims(text).map(|d| assert!(!d.is_empty())),
        "parse_curve_csv" => {
            return parse_curve_csv(text)
                .map(|rows| {
                    let again = parse_curve_csv(&curve_csv(&rows)).expect("written curve parses");
                    assert_eq!(again.len(), rows.len());
                    for (a, b) in again.iter().zip(&rows) {
                        assert!(
                            same(a.delta, b.delta)
                                && same(a.alpha, b.alpha)
                                && same(a.bound, b.bound)
                                && same(a.vn_limit, b.vn_limit)
                        );
                    }
                })
                .is_ok()
        }
        other => panic!("no fuzz target named {other}"),
    }
    .is_ok()
}

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus")
}

#[test]
fn corpus_seeds_and_mutations_uphold_the_invariants() {
    let mut targets = 0;
    for dir in fs::read_dir(corpus()).unwrap() {
        let dir = dir.unwrap().path();
        let target = dir.file_name().unwrap().to_str().unwrap().to_string();
        let mut accepted = 0;
        let mut rejected = 0;
        for file in fs::read_dir(&dir).unwrap() {
            let bytes = fs::read(file.unwrap().path()).unwrap();
            let text = String::from_utf8(bytes.clone()).unwrap();
            if check(&target, &text) {
                accepted += 1;
            } else {
                rejected += 1;
            }
            for cut in 0..bytes.len() {
                if let Ok(t) = std::str::from_utf8(&bytes[..cut]) {
                    check(&target, t);
                }
            }
            for i in 0..bytes.len() {
                for flip in [b'0', b'-', b',', b'x', b'e', b'9', b'}', b'"'] {
                    let mut m = bytes.clone();
                    m[i] = flip;
                    if let Ok(t) = std::str::from_utf8(&m) {
                        check(&target, t);
                    }
                }
            }
        }
        assert!(accepted > 0 && rejected > 0, "{target}: seeds should cover both outcomes");
        targets += 1;
    }
    assert_eq!(targets, 7);
}
