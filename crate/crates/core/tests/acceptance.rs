//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints its `PASS`/`FAIL` line; exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use chernlab::catalog::{get_metric, CatalogMetric, METRIC_NAMES};
use chernlab::classify::{classify_points, default_tolerance, einstein_fit, SampleDefects};
use chernlab::curvature::{ric1_potential_residual, PointGeometry};
use chernlab::dsl::{parse_map, parse_metric};
use chernlab::linalg::{c64, max_abs, CMat};
use chernlab::metric::{metric_matrix, SampleRegion};
use chernlab::point::ChartPoint;
use chernlab::sampling::{sample_region, SampleSpec};
use chernlab::schwarz::{fixture_cases, run_fixture, SchwarzIdentity};
use chernlab::spectra::{hbc_at, hsc_at, operator_spectrum, spectral_bound_check_at, CurvatureOperator};
use chernlab::wirtinger::DiffEngineConfig;
use chernlab::GeomError;
use num_complex::Complex64;

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

impl Check {
    fn new(name: &'static str, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            pass,
            detail: detail.into(),
        }
    }
}

/// Runs one criterion and prints its verdict line. A panic counts as FAIL.
fn criterion(id: u32, title: &str, budget_secs: f64, body: impl FnOnce() -> Vec<Check>) -> bool {
    let start = Instant::now();
    let checks = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(body)) {
        Ok(checks) => checks,
        Err(_) => vec![Check::new("completed", false, "panicked")],
    };
    let elapsed = start.elapsed();
    let in_budget = elapsed <= Duration::from_secs_f64(budget_secs);
    let pass = in_budget && checks.iter().all(|c| c.pass);
    let mut lines = String::new();
    for c in &checks {
        lines.push_str(&format!("    [{}] {}: {}\n", if c.pass { "ok" } else { "FAIL" }, c.name, c.detail));
    }
    println!(
        "{} criterion {id:>2} {title} ({:.2} s of {budget_secs} s)\n{lines}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn jets() -> DiffEngineConfig {
    DiffEngineConfig::jets()
}

fn metric(spec: &str) -> CatalogMetric {
    get_metric(spec).unwrap()
}

fn samples(m: &CatalogMetric, count: usize, seed: u64) -> Vec<ChartPoint> {
    SampleSpec::new(count, seed, m.region()).points(m.metric.as_ref())
}

fn geometry(m: &CatalogMetric, p: &ChartPoint) -> PointGeometry {
    PointGeometry::compute(m.metric.as_ref(), p.coords(), &jets()).unwrap()
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn c01_flatness() -> bool {
    criterion(1, "flat metric has vanishing curvature", 1.0, || {
        let m = metric("flat");
        let pts = samples(&m, 200, 1);
        let geos: Vec<PointGeometry> = pts.iter().map(|p| geometry(&m, p)).collect();
        let r = worst(geos.iter().map(|g| g.curvature.max_norm()));
        let ric = worst(geos.iter().map(|g| g.ricci.max_norm()));
        vec![
            Check::new("max |R| over 200 points", pts.len() == 200 && r <= 1e-8, format!("{r:.3e} <= 1e-8")),
            Check::new("max |Ric(1..4)|", ric <= 1e-8, format!("{ric:.3e} <= 1e-8")),
        ]
    })
}

fn c02_conjugate_symmetry() -> bool {
    criterion(2, "curvature conjugate symmetry", 5.0, || {
        METRIC_NAMES
            .iter()
            .map(|name| {
                let m = metric(name);
                let res = worst(samples(&m, 50, 2).iter().map(|p| geometry(&m, p).curvature.conjugate_symmetry_residual()));
                Check::new(name, res <= 1e-6, format!("{res:.3e} <= 1e-6 over 50 points"))
            })
            .collect()
    })
}

/// `λ` for `g = e^u δ` from `Ric⁽²⁾ = −(Σ_i ∂_i∂_ī u) δ`, with `u = −log|z|²`
/// and the Laplacian taken by central differences in real coordinates.
fn conformal_oracle_lambda(z: &[Complex64]) -> f64 {
    let u = |w: &[Complex64]| -w.iter().map(|c| c.norm_sqr()).sum::<f64>().ln();
    let h = 1e-4;
    let mut lap = 0.0;
    for i in 0..z.len() {
        for dir in [c64(h, 0.0), c64(0.0, h)] {
            let mut plus = z.to_vec();
            let mut minus = z.to_vec();
            plus[i] += dir;
            minus[i] -= dir;
            lap += (u(&plus) - 2.0 * u(z) + u(&minus)) / (h * h);
        }
    }
    // ∂_i∂_ī = ¼ (∂²_x + ∂²_y)
    -0.25 * lap * (-u(z)).exp()
}

fn c03_hopf_einstein() -> bool {
    criterion(3, "Hopf metric is second Chern Einstein", 5.0, || {
        let m = metric("hopf:n=2");
        let pts = sample_region(2, &SampleRegion::shell(0.5, 2.0), 50, 3);
        let fit = einstein_fit(m.metric.as_ref(), &pts, &jets()).unwrap();
        let oracle = worst(pts.iter().map(|p| (conformal_oracle_lambda(p.coords()) - fit.lambda).abs()));
        vec![
            Check::new("lambda", (fit.lambda - 1.0).abs() <= 1e-6, format!("{:.12} in 1 +- 1e-6", fit.lambda)),
            Check::new("fit residual", fit.residual <= 1e-6, format!("{:.3e} <= 1e-6", fit.residual)),
            Check::new("lambda > 0", fit.lambda > 0.0, format!("{:.6}", fit.lambda)),
            Check::new("conformal oracle", oracle <= 1e-6, format!("max |oracle - lambda| {oracle:.3e} <= 1e-6")),
        ]
    })
}

fn c04_fubini_study_fixtures() -> bool {
    criterion(4, "Fubini-Study values at the origin", 2.0, || {
        let mut checks = Vec::new();
        for n in [2usize, 3] {
            let m = metric(&format!("fubini_study:n={n}"));
            let geo = geometry(&m, &ChartPoint::new(vec![c64(0.0, 0.0); n]).unwrap());
            // g = δ − (δ_ij|z|² + z̄_i z_j) + O(|z|⁴) and Γ(0) = 0, so R = −∂∂̄g = δ_ij δ_kl + δ_il δ_kj.
            let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            let mut r_err = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let want = d(i, j) * d(k, l) + d(i, l) * d(k, j);
                            r_err = r_err.max((geo.curvature.r(i, j, k, l) - c64(want, 0.0)).norm());
                        }
                    }
                }
            }
            let ric_err = max_abs(&(&geo.ricci.ric2 - CMat::identity(n, n) * c64((n + 1) as f64, 0.0)));
            let e = |k: usize| (0..n).map(|i| c64(d(i, k), 0.0)).collect::<Vec<_>>();
            let hsc = hsc_at(&geo, &e(0)).unwrap();
            let hbc = hbc_at(&geo, &e(0), &e(1)).unwrap();
            checks.push(Check::new(if n == 2 { "R, n=2" } else { "R, n=3" }, r_err <= 1e-6, format!("{r_err:.3e}")));
            checks.push(Check::new(if n == 2 { "Ric2 = 3I" } else { "Ric2 = 4I" }, ric_err <= 1e-6, format!("{ric_err:.3e}")));
            checks.push(Check::new(if n == 2 { "HSC(e1), n=2" } else { "HSC(e1), n=3" }, (hsc - 2.0).abs() <= 1e-6, format!("{hsc:.12}")));
            checks.push(Check::new(if n == 2 { "HBC(e1,e2), n=2" } else { "HBC(e1,e2), n=3" }, (hbc - 1.0).abs() <= 1e-6, format!("{hbc:.12}")));
        }
        checks
    })
}

fn schwarz_sweep(identity: SchwarzIdentity, per_case: usize) -> (usize, usize, f64, String) {
    let cfg = jets();
    let (mut checks, mut skips, mut worst_res, mut worst_case) = (0, 0, 0.0f64, String::new());
    for case in fixture_cases() {
        let result = run_fixture(&case, identity, per_case, 7, &cfg).unwrap();
        if result.skip.is_some() {
            skips += 1;
        }
        for r in &result.reports {
            checks += 1;
            if r.residual > worst_res || r.residual.is_nan() {
                worst_res = r.residual;
                worst_case = format!("{} {} -> {}", case.map, case.source, case.target);
            }
        }
    }
    (checks, skips, worst_res, worst_case)
}

fn c05_chern_lu_identity() -> bool {
    criterion(5, "Chern-Lu identity on the fixture cross-product", 60.0, || {
        let (checks, skips, res, at) = schwarz_sweep(SchwarzIdentity::ChernLu, 10);
        vec![
            Check::new("point checks", checks >= 100, format!("{checks} >= 100 ({skips} cases skipped)")),
            Check::new("worst residual", res <= 1e-5, format!("{res:.3e} <= 1e-5 at {at}")),
        ]
    })
}

fn c06_aubin_yau_identity() -> bool {
    criterion(6, "Aubin-Yau identity on invertible fixtures", 60.0, || {
        let (checks, skips, res, at) = schwarz_sweep(SchwarzIdentity::AubinYau, 10);
        vec![
            Check::new("point checks", checks >= 40, format!("{checks} >= 40 ({skips} cases skipped)")),
            Check::new("worst residual", res <= 1e-4, format!("{res:.3e} <= 1e-4 at {at}")),
        ]
    })
}

fn c07_curvature_operator() -> bool {
    criterion(7, "complex curvature operator suite", 10.0, || {
        let mut checks = Vec::new();
        // self-adjointness wherever 𝔎 is built, including the Hopf metric
        for spec in ["flat", "fubini_study", "hyperbolic_ball", "perturbed_flat", "hopf:n=2", "fubini_study:n=3,scale=4"] {
            let m = metric(spec);
            let res = worst(samples(&m, 10, 5).iter().map(|p| {
                CurvatureOperator::from_geometry(&geometry(&m, p)).unwrap().self_adjoint_residual()
            }));
            checks.push(Check::new("self-adjoint", res <= 1e-8, format!("{spec}: {res:.3e} <= 1e-8")));
        }
        // the metric is an eigenvector of unit eigenvalue on Hopf n=2
        let hopf = metric("hopf:n=2");
        let mut eig_err = 0.0f64;
        for p in samples(&hopf, 10, 6) {
            let geo = geometry(&hopf, &p);
            let op = CurvatureOperator::from_geometry(&geo).unwrap();
            let image = op.apply(&geo.metric.g);
            eig_err = eig_err.max(max_abs(&(image - &geo.metric.g)));
        }
        checks.push(Check::new("hopf: K(g) = g", eig_err <= 1e-6, format!("{eig_err:.3e} <= 1e-6")));
        // max spec K <= max{1, 1 − n B_min} at sampled points with Ric2 = g
        let mut bound_ok = true;
        let mut worst_gap = f64::NEG_INFINITY;
        let mut count = 0;
        for spec in ["hopf:n=2", "fubini_study:n=2,scale=3", "fubini_study:n=3,scale=4", "hopf:n=3,scale=2"] {
            let m = metric(spec);
            for p in samples(&m, 5, 8) {
                let geo = geometry(&m, &p);
                let check = spectral_bound_check_at(&geo, 1e-6, 200, 0).unwrap();
                // a sampled B_min never undercuts the true one, so a sampled bound is conservative
                let spectrum = operator_spectrum(&CurvatureOperator::from_geometry(&geo).unwrap()).unwrap();
                bound_ok &= check.holds && spectrum.max() == check.max_eig;
                worst_gap = worst_gap.max(check.max_eig - check.bound);
                count += 1;
            }
        }
        checks.push(Check::new(
            "spectral bound",
            bound_ok,
            format!("{count} Einstein points, max(max_eig - bound) = {worst_gap:.3e}"),
        ));
        checks
    })
}

fn defects(m: &CatalogMetric, count: usize, seed: u64) -> Vec<SampleDefects> {
    samples(m, count, seed).iter().map(|p| SampleDefects::from_geometry(&geometry(m, p))).collect()
}

fn c08_pluriclosed_routes() -> bool {
    criterion(8, "pluriclosed identity agrees with the ddbar route", 10.0, || {
        let tol = default_tolerance(&jets());
        let mut checks = Vec::new();
        let specs: Vec<String> = METRIC_NAMES.iter().map(|s| s.to_string()).chain(["hopf:n=3".to_string()]).collect();
        for spec in &specs {
            let d = defects(&metric(spec), 20, 9);
            let gap = worst(d.iter().map(|s| (s.pluriclosed_identity - s.pluriclosed_direct).abs()));
            checks.push(Check::new("route agreement", gap <= 1e-5, format!("{spec}: {gap:.3e} <= 1e-5")));
        }
        let p2 = worst(defects(&metric("hopf:n=2"), 20, 9).iter().map(|s| s.pluriclosed_identity));
        let p3 = worst(defects(&metric("hopf:n=3"), 20, 9).iter().map(|s| s.pluriclosed_identity));
        checks.push(Check::new("hopf n=2 pluriclosed", p2 <= tol, format!("{p2:.3e} <= {tol:e}")));
        checks.push(Check::new("hopf n=3 not pluriclosed", p3 > tol, format!("{p3:.3e} > {tol:e}")));
        checks
    })
}

fn c09_ric1_potential() -> bool {
    criterion(9, "first Chern Ricci is -ddbar log det g", 5.0, || {
        METRIC_NAMES
            .iter()
            .map(|name| {
                let m = metric(name);
                let res = worst(
                    samples(&m, 30, 10)
                        .iter()
                        .map(|p| ric1_potential_residual(m.metric.as_ref(), &geometry(&m, p), &jets()).unwrap()),
                );
                Check::new(name, res <= 1e-6, format!("{res:.3e} <= 1e-6 over 30 points"))
            })
            .collect()
    })
}

fn c10_implication_web() -> bool {
    criterion(10, "classifier implication web", 10.0, || {
        let cfg = jets();
        let tol = default_tolerance(&cfg);
        let mut checks = Vec::new();
        let specs: Vec<String> = METRIC_NAMES.iter().map(|s| s.to_string()).chain(["hopf:n=3".to_string()]).collect();
        for spec in &specs {
            let m = metric(spec);
            let pts = samples(&m, 30, 11);
            let report = classify_points(m.metric.as_ref(), &pts, &SampleSpec::new(30, 11, m.region()), &cfg, tol).unwrap();
            if m.expected.kahler == Some(true) {
                let ok = report.balanced.pass && report.pluriclosed.pass && report.kahler_like.pass;
                checks.push(Check::new(
                    "kahler fixture",
                    ok,
                    format!(
                        "{spec}: balanced {:.1e}, pluriclosed {:.1e}, kahler-like {:.1e}",
                        report.balanced.residual, report.pluriclosed.residual, report.kahler_like.residual
                    ),
                ));
            }
            let both = report.balanced.pass && report.pluriclosed.pass;
            let ok = !both || report.kahler.residual <= 10.0 * tol;
            checks.push(Check::new(
                "balanced and pluriclosed imply kahler",
                ok,
                format!("{spec}: premise {both}, torsion {:.1e}", report.kahler.residual),
            ));
        }
        checks
    })
}

/// Catalog metrics written in the text format.
const DSL_FIXTURES: [(&str, &str); 6] = [
    ("flat", "n = 2\ng[1][1] = 1\ng[2][2] = 1\n"),
    (
        "fubini_study",
        "n = 2\n\
         g[1][1] = 1 / (1 + abs2(z1) + abs2(z2)) - abs2(z1) / (1 + abs2(z1) + abs2(z2))^2\n\
         g[1][2] = -conj(z1) * z2 / (1 + abs2(z1) + abs2(z2))^2\n\
         g[2][2] = 1 / (1 + abs2(z1) + abs2(z2)) - abs2(z2) / (1 + abs2(z1) + abs2(z2))^2\n",
    ),
    (
        "hyperbolic_ball",
        "n = 2\n\
         domain = 1 - abs2(z1) - abs2(z2)\n\
         g[1][1] = 1 / (1 - abs2(z1) - abs2(z2)) + abs2(z1) / (1 - abs2(z1) - abs2(z2))^2\n\
         g[1][2] = conj(z1) * z2 / (1 - abs2(z1) - abs2(z2))^2\n\
         g[2][2] = 1 / (1 - abs2(z1) - abs2(z2)) + abs2(z2) / (1 - abs2(z1) - abs2(z2))^2\n",
    ),
    (
        "hopf",
        "n = 2\n\
         domain = abs2(z1) + abs2(z2)\n\
         g[1][1] = 1 / (abs2(z1) + abs2(z2))\n\
         g[2][2] = 1 / (abs2(z1) + abs2(z2))\n",
    ),
    (
        "conformal_flat",
        "n = 2\ng[1][1] = exp(log(1 + abs2(z1)))\ng[2][2] = exp(log(1 + abs2(z1)))\n",
    ),
    (
        "perturbed_flat_nonkahler",
        "n = 2\ng[1][1] = 1 + 0.1 * abs2(z2)\ng[2][2] = 1 + 0.1 * abs2(z1)\n",
    ),
];

fn cli_output(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = chernlab::cli::run(std::iter::once("chernlab").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn c11_dsl_and_determinism() -> bool {
    criterion(11, "text format, holomorphy and deterministic output", 5.0, || {
        let mut checks = Vec::new();
        for (name, text) in DSL_FIXTURES {
            let spec = parse_metric(text).unwrap();
            let m = metric(name);
            let pts = sample_region(2, &m.region(), 100, 12);
            let diff = worst(pts.iter().map(|p| {
                let a = metric_matrix(&spec, p.coords()).unwrap();
                let b = metric_matrix(m.metric.as_ref(), p.coords()).unwrap();
                max_abs(&(a - b))
            }));
            checks.push(Check::new("text equals catalog", diff <= 1e-12, format!("{name}: {diff:.3e} <= 1e-12 at 100 points")));
        }
        let rejected = ["n = 2\nf1 = conj(z1)\nf2 = z2\n", "n = 2\nf1 = z1\nf2 = abs2(z2)\n", "n = 1\nf1 = z1 * conj(z1)\n"]
            .iter()
            .all(|t| matches!(parse_map(t), Err(GeomError::HolomorphyViolation(_))));
        let accepted = parse_map("n = 2\nf1 = exp(z1) * z2\nf2 = z2^3 - 2 * z1\n").is_ok();
        checks.push(Check::new("holomorphy rejection", rejected && accepted, "conj and abs2 rejected, polynomial-exp map accepted"));
        let runs: [&[&str]; 4] = [
            &["analyze", "--metric", "hopf", "--random", "5", "--seed", "42"],
            &["classify", "--metric", "perturbed_flat_nonkahler", "--random", "20", "--seed", "42"],
            &["spectrum", "--metric", "fubini_study", "--random", "3", "--seed", "42", "--format", "csv"],
            &["schwarz", "--map", "identity", "--metric", "hopf", "--target-metric", "fubini_study", "--random", "4", "--seed", "42"],
        ];
        for args in runs {
            let (c1, a) = cli_output(args);
            let (c2, b) = cli_output(args);
            checks.push(Check::new(
                "byte-identical output",
                c1 == 0 && c2 == 0 && !a.is_empty() && a == b,
                format!("{}: {} bytes, exit {c1}", args[0], a.len()),
            ));
        }
        checks
    })
}

fn main() {
    let criteria: [fn() -> bool; 11] = [
        c01_flatness,
        c02_conjugate_symmetry,
        c03_hopf_einstein,
        c04_fubini_study_fixtures,
        c05_chern_lu_identity,
        c06_aubin_yau_identity,
        c07_curvature_operator,
        c08_pluriclosed_routes,
        c09_ric1_potential,
        c10_implication_web,
        c11_dsl_and_determinism,
    ];
    let failed = criteria.iter().filter(|c| !c()).count();
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
