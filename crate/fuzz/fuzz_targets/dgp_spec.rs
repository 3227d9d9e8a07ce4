#![no_main]

use libfuzzer_sys::fuzz_target;
use ratio_ci::dgp::{draw_sample, true_ratio_with, DgpSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = serde_json::from_str::<DgpSpec>(text) else { return };
    if spec.validate().is_err() {
        return;
    }
    for n in [1, 2, 7] {
        let _ = true_ratio_with(&spec, n, 16);
        let _ = spec.moment_bounds(n);
        let _ = spec.support_bounds(n);
        if let Ok(s) = draw_sample(&spec, n, 0) {
            assert_eq!(s.n(), n);
        }
    }
});
