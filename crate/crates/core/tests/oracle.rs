mod common;

#[test]
fn forbidden_periods_match_brute_force() {
    let mut bad = Vec::new();
    for seed in 0..60 {
        bad.extend(common::oracle_mismatches(seed).1);
    }
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}
