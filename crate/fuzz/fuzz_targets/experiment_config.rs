#![no_main]

use libfuzzer_sys::fuzz_target;
use ratio_ci::experiment::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(cfg) = ExperimentConfig::from_json(&text) {
        for &n in cfg.n_grid.iter().take(4) {
            for d in &cfg.dgp {
                for m in &cfg.methods {
                    let _ = m.resolve(d, n);
                }
            }
        }
        for &a in cfg.alpha.iter().take(4) {
            let _ = cfg.reference_n_bar(a);
        }
    }
});
