#![no_main]

use libfuzzer_sys::fuzz_target;
use ratio_ci::analyze::{read_paired_csv, Denominator, ThresholdRule};

fuzz_target!(|data: &[u8]| {
    let column = Denominator::Column("y".into());
    if let Ok(s) = read_paired_csv(data, "x", &column) {
        assert_eq!(s.xs().len(), s.ys().len());
    }
    let rule = Denominator::Rule(ThresholdRule {
        column: "y".into(),
        op: ratio_ci::analyze::Comparison::Ge,
        threshold: 0.5,
    });
    if let Ok(s) = read_paired_csv(data, "x", &rule) {
        assert!(s.ys().iter().all(|&v| v == 0.0 || v == 1.0));
    }
});
