//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use dynrmat::cli::scenario::{run_scenario, RunOptions, Scenario, VerificationReport};
use dynrmat::matfun::ScalarFun;
use dynrmat::verify::{ResidualReport, TOL_ALGEBRAIC, TOL_ANALYTIC, TOL_DILATION, TOL_FD};
use dynrmat::C64;

const PROFILE_TOL: f64 = 1e-12;

struct Run {
    report: VerificationReport,
    elapsed: Duration,
}

impl Run {
    fn check(&self, name: &str) -> Vec<&ResidualReport> {
        self.report.check(name)
    }

    fn failing_samples(&self) -> usize {
        self.report.summary.samples - self.report.summary.samples_passed
    }
}

fn run(name: &str) -> Run {
    let scenario = Scenario::builtin(name).expect("builtin scenario");
    let start = Instant::now();
    let report =
        run_scenario(&scenario, &RunOptions::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
    Run {
        report,
        elapsed: start.elapsed(),
    }
}

fn max_rel(rs: &[&ResidualReport]) -> f64 {
    rs.iter().map(|r| r.residual_rel).fold(0.0, f64::max)
}

fn max_abs(rs: &[&ResidualReport]) -> f64 {
    rs.iter().map(|r| r.residual_abs).fold(0.0, f64::max)
}

/// `count` reports, all with relative residual below `tol`.
fn all_below(rs: &[&ResidualReport], count: usize, tol: f64) -> bool {
    rs.len() == count && rs.iter().all(|r| r.residual_rel < tol)
}

fn profile_grid() -> Vec<C64> {
    let mut out = Vec::new();
    for i in -6..=6 {
        for j in -6..=6 {
            let s = C64::new(0.35 * i as f64, 0.3 * j as f64);
            if s.norm() > 0.0 {
                out.push(s);
            }
        }
    }
    out.push(C64::new(4e-4, 1e-4));
    out
}

fn main() {
    let mut runs = BTreeMap::new();
    for name in [
        "structural",
        "cartan-sl2",
        "cartan-sl3",
        "cartan-sl2+sl2",
        "fm-sl2",
        "fm-sl2x2-swap",
        "levi-sl3-gl2",
        "reduction-sl3-gl2",
        "perturbed-levi",
        "wrong-epsilon",
        "flipped-zl",
    ] {
        runs.insert(name, run(name));
    }
    let r = |name: &str| &runs[name];
    let mut results: Vec<(usize, bool, String)> = Vec::new();

    // 1
    let s = r("structural");
    let reports: Vec<_> = s.report.reports.iter().collect();
    let ok = !reports.is_empty()
        && reports
            .iter()
            .all(|x| x.passed() && x.tolerance <= TOL_ALGEBRAIC)
        && s.elapsed < Duration::from_secs(5);
    results.push((
        1,
        ok,
        format!(
            "structural suite on sl2, sl3, sl2+sl2, gl2 in sl3: {} checks, max {:.2e} <= {TOL_ALGEBRAIC:e}, {:.2}s < 5s",
            reports.len(),
            max_abs(&reports),
            s.elapsed.as_secs_f64()
        ),
    ));

    // 2
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut time = Duration::ZERO;
    for name in ["cartan-sl2", "cartan-sl3"] {
        let x = r(name);
        let rs = x.check("cdybe_abelian");
        ok &= all_below(&rs, 80, TOL_ANALYTIC)
            && rs.iter().all(|q| q.metadata["derivative"] == "analytic");
        for k in 0..4 {
            ok &= rs
                .iter()
                .filter(|q| q.metadata["epsilon_index"] == k)
                .count()
                == 20;
        }
        worst = worst.max(max_rel(&rs));
        time += x.elapsed;
    }
    ok &= time < Duration::from_secs(30);
    results.push((
        2,
        ok,
        format!(
            "abelian equation for the Cartan r-matrix, eps in {{0.5, 1, 2, 1+0.3i}} x 20 on sl2, sl3: max rel {worst:.2e} < {TOL_ANALYTIC:e}, {:.2}s < 30s",
            time.as_secs_f64()
        ),
    ));

    // 3
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut time = Duration::ZERO;
    for name in ["fm-sl2", "fm-sl2x2-swap"] {
        let rs = r(name).check("cdybe_reduced");
        ok &= all_below(&rs, 40, TOL_FD);
        worst = worst.max(max_rel(&rs));
        time += r(name).elapsed;
    }
    ok &= time < Duration::from_secs(120);
    results.push((
        3,
        ok,
        format!(
            "reduced equation for r' on (sl2, id) and (sl2+sl2, swap), eps in {{0.5, 2}} x 20: max rel {worst:.2e} < {TOL_FD:e}, {:.2}s < 120s",
            time.as_secs_f64()
        ),
    ));

    // 4
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for name in ["levi-sl3-gl2", "fm-sl2"] {
        let rs = r(name).check("cdybe_pl");
        ok &= all_below(&rs, 40, TOL_FD);
        worst = worst.max(max_rel(&rs));
    }
    results.push((
        4,
        ok,
        format!("full equation for the Levi r-matrix on sl3 and the graded r on sl2, 20 per eps: max rel {worst:.2e} < {TOL_FD:e}"),
    ));

    // 5
    let mut ok = true;
    for name in ["levi-sl3-gl2", "fm-sl2"] {
        let rs = r(name).check("proposition_equivalence");
        ok &= rs.len() == 40 && rs.iter().all(|q| q.passed());
    }
    let p = r("perturbed-levi");
    let joint = p
        .check("cdybe_pl")
        .iter()
        .zip(p.check("cdybe_reduced"))
        .filter(|(a, b)| !a.passed() && !b.passed())
        .count();
    ok &= joint == 20
        && p.check("proposition_equivalence")
            .iter()
            .all(|q| q.passed());
    results.push((
        5,
        ok,
        format!("full and reduced verdicts agree on 40/40 samples per scenario; perturbed control fails jointly on {joint}/20"),
    ));

    // 6
    let red = r("reduction-sl3-gl2");
    let restr = red.check("restriction_identity");
    let lift = red.check("cdybe_abelian_lift");
    let ok = restr.len() == 40
        && lift.len() == 40
        && max_abs(&restr) < TOL_ANALYTIC
        && max_rel(&lift) < TOL_ANALYTIC;
    results.push((
        6,
        ok,
        format!(
            "restriction identity entrywise max {:.2e} < {TOL_ANALYTIC:e}; lifted r satisfies the abelian equation, max rel {:.2e} < {TOL_ANALYTIC:e}",
            max_abs(&restr),
            max_rel(&lift)
        ),
    ));

    // 7
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut gap_ratio: f64 = 0.0;
    for name in ["fm-sl2", "fm-sl2x2-swap", "levi-sl3-gl2"] {
        let x = r(name);
        let qi = x.check("quasi_invariance");
        let inv = x.check("invariance");
        let pair = x.check("equivariance_agreement");
        ok &= all_below(&qi, 40, TOL_FD) && all_below(&inv, 40, TOL_FD);
        ok &= pair.len() == 40 && pair.iter().all(|q| q.residual_abs < q.tolerance);
        worst = worst.max(max_rel(&qi)).max(max_rel(&inv));
        for q in pair {
            gap_ratio = gap_ratio.max(q.residual_abs / q.tolerance);
        }
    }
    results.push((
        7,
        ok,
        format!(
            "quasi-invariance of r and invariance of r': max rel {worst:.2e} < {TOL_FD:e}; difference / FD error estimate at most {gap_ratio:.2e} < 1"
        ),
    ));

    // 8
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for name in ["cartan-sl2", "cartan-sl3", "cartan-sl2+sl2"] {
        let rs = r(name).check("dilation");
        ok &= rs.len() == 80 && max_abs(&rs) < TOL_DILATION;
        worst = worst.max(max_abs(&rs));
    }
    results.push((
        8,
        ok,
        format!("dilation covariance on every Cartan scenario: max {worst:.2e} < {TOL_DILATION:e}"),
    ));

    // 9
    let mut ok = true;
    let mut chart: f64 = 0.0;
    for name in ["fm-sl2", "fm-sl2x2-swap", "levi-sl3-gl2"] {
        let rs = r(name).check("chart_identities");
        ok &= rs.len() == 40 && max_abs(&rs) < TOL_ALGEBRAIC;
        chart = chart.max(max_abs(&rs));
    }
    let trig = ScalarFun::trig_f0(C64::new(1.0, 0.0));
    let shifted = ScalarFun::shifted_coth(C64::new(1.0, 0.0), 1, 2);
    let mut profile: f64 = 0.0;
    for s in profile_grid() {
        profile = profile.max(trig.eval(s).expect("entire at eps = 1").norm());
        if let Ok(v) = shifted.eval(s) {
            profile = profile.max((v + 0.5 * (s / 2.0).tanh()).norm());
        }
    }
    ok &= profile < PROFILE_TOL;
    results.push((
        9,
        ok,
        format!(
            "left/right chart identities at every sample: max {chart:.2e} < {TOL_ALGEBRAIC:e}; trig f0 at eps = 1 and shifted coth (n = 2, j = 1) vs -tanh(s/2)/2: max {profile:.2e} < {PROFILE_TOL:e}"
        ),
    ));

    // 10
    let counts: Vec<(&str, usize, usize)> = ["perturbed-levi", "wrong-epsilon", "flipped-zl"]
        .iter()
        .map(|n| (*n, r(n).failing_samples(), r(n).report.summary.samples))
        .collect();
    let ok = counts.iter().all(|&(_, f, n)| n == 20 && f >= 19);
    let detail = counts
        .iter()
        .map(|(n, f, t)| format!("{n} {f}/{t}"))
        .collect::<Vec<_>>()
        .join(", ");
    results.push((
        10,
        ok,
        format!("negative controls fail on at least 19/20 samples: {detail}"),
    ));

    let mut failed = 0;
    for (n, ok, detail) in &results {
        println!(
            "criterion {n:>2}: {}  {detail}",
            if *ok { "PASS" } else { "FAIL" }
        );
        failed += usize::from(!ok);
    }
    println!(
        "acceptance: {}/{} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
