//! Acceptance criteria 1-10: one pass/fail line each, then a nonzero exit if
//! any criterion failed. Time limits are pinned below.

use std::time::{Duration, Instant};

use rayon::ThreadPoolBuilder;
use treeprod::diary::{encode, parse_sentence, reconstruct};
use treeprod::labelling::min_kappa;
use treeprod::morse_thue::{exodus_diaries, is_cube_free, mt_prefix};
use treeprod::pipeline::{run, PipelineConfig, PipelineReport};
use treeprod::metric_space::SpaceKind;
use treeprod::report::Status;
use treeprod::suites::{diary_suite, Universe};

const CODEC_LIMIT: Duration = Duration::from_secs(60);
const CUBE_LIMIT: Duration = Duration::from_secs(10);
const APPROX_LIMIT: Duration = Duration::from_secs(60);
const STAGE1_LIMIT: Duration = Duration::from_secs(120);
const STAGE2_LIMIT: Duration = Duration::from_secs(300);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

/// Fails the named checks of `report` unless each has zero violations and at
/// least one checked instance.
fn checks_pass(report: &PipelineReport, ids: &[&str]) -> Result<u64, String> {
    let mut checked = 0;
    for id in ids {
        let c = report.check(id).ok_or_else(|| format!("{id} missing"))?;
        if c.status != Status::Pass || c.checked == 0 {
            return Err(format!("{id}: {:?}, {} violations, e.g. {:?}", c.status, c.violations, c.examples.first()));
        }
        checked += c.checked;
    }
    Ok(checked)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn within(outcome: Outcome, elapsed: Duration, limit: Duration) -> Outcome {
    Outcome {
        ok: outcome.ok && elapsed <= limit,
        detail: format!("{} ({elapsed:.1?}, limit {limit:?})", outcome.detail),
    }
}

fn codec() -> Outcome {
    let (suite, elapsed) = timed(|| diary_suite(&Universe::ACCEPTANCE, &[1, 2, 3], 1));
    let mut bad: Vec<String> = Vec::new();
    for id in ["diary.slot_reconstruction", "diary.rest_identity"] {
        match suite.get(id) {
            Some(c) if c.status == Status::Pass && c.checked > 0 => {}
            Some(c) => bad.push(format!("{id}: {} violations {:?}", c.violations, c.examples.first())),
            None => bad.push(format!("{id} missing")),
        }
    }
    let checked = suite.get("diary.slot_reconstruction").map_or(0, |c| c.checked);
    let o = outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} sentences per kappa, {checked} membership and fill checks", Universe::ACCEPTANCE.len())
        } else {
            bad.join("; ")
        },
    );
    within(o, elapsed, CODEC_LIMIT)
}

fn worked_example() -> Outcome {
    let alpha = parse_sentence("a a b c s a s b c b s c s b s").unwrap();
    let diary = encode(&alpha, 3).unwrap();
    let hat = reconstruct(&diary).unwrap();
    let ok = diary.compact() == "(cba)(asa)(bcb)(css)(bs⋆)"
        && hat.is_honest()
        && hat.fill_slots(&[]).map(|s| s == alpha).unwrap_or(false);
    outcome(ok, format!("diary {}, reconstruction {}", diary.compact(), hat.to_text()))
}

fn naive_cube_free(b: &[u8]) -> bool {
    let n = b.len();
    for p in 1..=n / 3 {
        for i in 0..=n - 3 * p {
            if b[i..i + p] == b[i + p..i + 2 * p] && b[i + p..i + 2 * p] == b[i + 2 * p..i + 3 * p] {
                return false;
            }
        }
    }
    true
}

fn morse_thue() -> Outcome {
    let prefix: String = mt_prefix(8).iter().map(|b| char::from(b'0' + b)).collect();
    let bits = mt_prefix(2048);
    let ((fast, naive), elapsed) = timed(|| (is_cube_free(&bits), naive_cube_free(&bits)));
    let o = outcome(
        prefix == "01101001" && fast && naive,
        format!("prefix(8) = {prefix}, cube-free(2048) = {fast}, brute force = {naive}"),
    );
    within(o, elapsed, CUBE_LIMIT)
}

fn exodus() -> Outcome {
    match exodus_diaries(30, 2, 3) {
        Ok((plain, decorated)) => outcome(
            plain && !decorated,
            format!("undecorated equal = {plain}, decorated equal = {decorated}"),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

struct Runs {
    cantor: PipelineReport,
    circle: PipelineReport,
    elapsed: Duration,
}

fn preset_runs() -> Result<Runs, String> {
    let (out, elapsed) = timed(|| {
        let cantor = run(&PipelineConfig::preset("cantor").unwrap()).map_err(|e| e.to_string())?;
        let circle = run(&PipelineConfig::preset("circle").unwrap()).map_err(|e| e.to_string())?;
        Ok::<_, String>((cantor.report, circle.report))
    });
    let (cantor, circle) = out?;
    Ok(Runs { cantor, circle, elapsed })
}

fn both(runs: &Runs, ids: &[&str], limit: Duration) -> Outcome {
    let result = checks_pass(&runs.cantor, ids).and_then(|a| checks_pass(&runs.circle, ids).map(|b| (a, b)));
    let o = match result {
        Ok((a, b)) => outcome(true, format!("cantor {a} checks, circle {b} checks")),
        Err(e) => outcome(false, e),
    };
    within(o, runs.elapsed, limit)
}

fn approx(runs: &Runs) -> Outcome {
    let sizes = [&runs.cantor, &runs.circle].map(|r| r.graph.as_ref().map_or(0, |g| g.vertex_count));
    let ids = ["approx.balls_intersect", "approx.central_ancestor", "approx.connected", "approx.geodesic_shape"];
    let mut o = both(runs, &ids, APPROX_LIMIT);
    o.detail = format!("{} ({} and {} vertices)", o.detail, sizes[0], sizes[1]);
    o
}

fn coverings(runs: &Runs) -> Outcome {
    let presets_ok = runs.cantor.suites.iter().chain(&runs.circle.suites).any(|s| s.suite == "covering")
        && [&runs.cantor, &runs.circle]
            .iter()
            .all(|r| r.suites.iter().filter(|s| s.suite == "covering").all(|s| s.passed()));
    let single = run(&PipelineConfig::generated(SpaceKind::Circle { n: 81 }, Some(1)));
    let single_fails = match &single {
        Ok(out) => out.report.suites.iter().any(|s| s.suite == "covering" && !s.passed()),
        Err(_) => true,
    };
    outcome(
        presets_ok && single_fails,
        format!("presets validate = {presets_ok}, one-color circle rejected = {single_fails}"),
    )
}

fn stage1(runs: &Runs) -> Outcome {
    both(
        runs,
        &["stage1.lipschitz", "stage1.close_bound", "stage1.distinct_bound", "stage1.global_bound"],
        STAGE1_LIMIT,
    )
}

fn stage2(runs: &Runs) -> Outcome {
    let kappas: Vec<usize> = [&runs.cantor, &runs.circle]
        .iter()
        .map(|r| r.config.as_ref().map_or(0, |c| c.kappa))
        .collect();
    let exact = kappas == [min_kappa(1), min_kappa(2)] && kappas == [16, 31];
    let mut o = both(runs, &["labelling.qi_upper", "labelling.qi_lower", "labelling.critical_letters"], STAGE2_LIMIT);
    o.ok &= exact;
    o.detail = format!("{}, kappa {kappas:?}", o.detail);
    o
}

fn binary(runs: &Runs) -> Outcome {
    let mut o = both(runs, &["labelling.binary_words", "labelling.binary_sandwich"], STAGE2_LIMIT);
    let lambdas: Vec<usize> = [&runs.cantor, &runs.circle]
        .iter()
        .map(|r| r.binary.as_ref().map_or(0, |b| b.lambda))
        .collect();
    o.detail = format!("{}, lambda {lambdas:?}", o.detail);
    o
}

fn determinism() -> Outcome {
    let report = |threads: usize| {
        let pool = ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run(&PipelineConfig::preset("circle").unwrap()).and_then(|o| o.report.to_json()))
    };
    match (report(1), report(4)) {
        (Ok(a), Ok(b)) => outcome(a == b, format!("{} bytes, 1 vs 4 workers", a.len())),
        (a, b) => outcome(false, format!("run failed: {:?} {:?}", a.err(), b.err())),
    }
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "diary codec oracle equivalence", codec()),
        (2, "worked example fidelity", worked_example()),
        (3, "Morse-Thue prefix and cube-freeness", morse_thue()),
        (4, "Exodus control", exodus()),
    ];
    match preset_runs() {
        Ok(runs) => {
            results.push((5, "approximation graph invariants", approx(&runs)));
            results.push((6, "covering validator", coverings(&runs)));
            results.push((7, "stage-one bounds", stage1(&runs)));
            results.push((8, "stage-two quasi-isometry", stage2(&runs)));
            results.push((9, "binary stage sandwich", binary(&runs)));
        }
        Err(e) => {
            for (i, name) in [
                (5, "approximation graph invariants"),
                (6, "covering validator"),
                (7, "stage-one bounds"),
                (8, "stage-two quasi-isometry"),
                (9, "binary stage sandwich"),
            ] {
                results.push((i, name, outcome(false, format!("preset run failed: {e}"))));
            }
        }
    }
    results.push((10, "determinism", determinism()));

    let mut failed = 0;
    for (i, name, o) in &results {
        let status = if o.ok { "PASS" } else { "FAIL" };
        println!("acceptance {i:>2} {status} {name}: {}", o.detail);
        failed += usize::from(!o.ok);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
