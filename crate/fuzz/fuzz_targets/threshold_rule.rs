#![no_main]

use libfuzzer_sys::fuzz_target;
use ratio_ci::analyze::{Denominator, ThresholdRule};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(rule) = s.parse::<ThresholdRule>() {
        assert!(rule.threshold.is_finite());
        assert!(!rule.column.is_empty());
        let again: ThresholdRule = rule.to_string().parse().expect("display round-trips");
        assert_eq!(again.op, rule.op);
        assert_eq!(again.threshold, rule.threshold);
    }
    let _ = s.parse::<Denominator>();
});
