use treeprod::pipeline::{run, verify, write_artifacts, CoveringSource, PipelineConfig, SpaceSource, Suite};
use treeprod::report::Status;
use treeprod::Error;

#[test]
fn grid_preset_passes() {
    let out = run(&PipelineConfig::preset("grid").unwrap()).unwrap();
    assert!(out.report.passed, "{}", out.report.to_json().unwrap());
    let config = out.report.config.as_ref().unwrap();
    assert!(config.validated_preset);
    assert_eq!(config.kappa, 15 * config.colors + 1);
}

#[test]
fn exported_space_and_covering_reload() {
    let first = run(&PipelineConfig::preset("circle").unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_artifacts(dir.path(), &first).unwrap();
    for name in ["report.json", "graph.edges", "space.csv", "pairs.csv", "embedding.json", "covering.json"] {
        assert!(dir.path().join(name).is_file(), "missing {name}");
    }
    assert!(dir.path().join("trees/color0.txt").is_file());

    let mut config = PipelineConfig::preset("circle").unwrap();
    config.preset = None;
    config.space = SpaceSource::File(dir.path().join("space.csv"));
    config.covering = CoveringSource::File(dir.path().join("covering.json"));
    let second = run(&config).unwrap();
    assert!(second.report.passed);
    assert_eq!(second.artifacts.graph_edges, first.artifacts.graph_edges);
    assert_eq!(second.artifacts.pairs_csv, first.artifacts.pairs_csv);
    let json = |r: &treeprod::pipeline::PipelineReport| serde_json::to_string(&r.qi).unwrap();
    assert_eq!(json(&second.report), json(&first.report));
}

#[test]
fn small_kappa_needs_research_flag() {
    let mut config = PipelineConfig::preset("cantor").unwrap();
    config.kappa = Some(3);
    assert!(matches!(run(&config).map(|_| ()).unwrap_err().root(), Error::Config(_)));
    config.research_kappa = true;
    let out = run(&config).unwrap();
    let control = out.report.check("labelling.exodus_control").unwrap();
    assert_eq!(control.status, Status::ExpectedFail);
}

#[test]
fn verify_restricts_to_one_suite() {
    let config = PipelineConfig::preset("cantor").unwrap();
    let report = verify(&config, Suite::Approx).unwrap();
    assert!(report.passed);
    assert!(report.suites.iter().all(|s| s.suite == "approx"));
    let report = verify(&config, Suite::Stage1).unwrap();
    assert_eq!(report.suites.len(), 1);
    assert!(report.check("stage1.lipschitz").is_some());
}
