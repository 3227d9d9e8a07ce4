use ratio_ci::experiment::ExperimentConfig;
use std::path::Path;

#[test]
fn bundled_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let cfg = ExperimentConfig::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let stem = path.file_stem().unwrap().to_str().unwrap();
        assert_eq!(cfg.experiment_id, stem);
        let csv = cfg.outputs.csv_path.as_ref().unwrap();
        assert_eq!(csv, &Path::new("out").join(format!("{stem}.csv")));
        seen += 1;
    }
    assert!(seen >= 10);
}

#[test]
fn chebyshev_reference_marks_n_bar() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let cfg = ExperimentConfig::from_path(&dir.join("delta_vs_chebyshev.json")).unwrap();
    let nb = cfg.reference_n_bar(0.1).unwrap().unwrap();
    assert!((nb / 4000.0 - 1.0).abs() < 1e-12);
    let cfg = ExperimentConfig::from_path(&dir.join("delta_level_sweep.json")).unwrap();
    let ab = cfg.reference_alpha_bar(1000).unwrap().unwrap();
    assert!((ab / 0.032 - 1.0).abs() < 1e-12);
}
