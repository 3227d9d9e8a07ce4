#![no_main]

use libfuzzer_sys::fuzz_target;
use ratio_ci::{classify_regime, Exponent, RegimeInput};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(e) = s.parse::<Exponent>() {
        assert!(e.value().is_finite() && e.value() >= 0.0);
    }
    let parts: Vec<&str> = s.split(',').collect();
    if let [a, ap, b, bp] = parts[..] {
        if let Ok(input) = RegimeInput::parse(a, ap, b, bp) {
            let v = classify_regime(&input);
            assert!(v.renorm_exponent.is_finite());
        }
    }
});
