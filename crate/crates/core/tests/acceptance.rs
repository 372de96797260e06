//! The ten acceptance criteria, run in order in one test so timings are
//! not distorted by sibling tests. Each prints one line.

use std::time::{Duration, Instant};

use dmlab::bounds::optimize_delta;
use dmlab::report::{Report, ReportEntry};
use dmlab::suite::{self, SuiteSettings};
use dmlab::tails::CONSISTENCY_TOL;

mod common;
use common::Q_GAUSSIAN;

/// For the unit Gaussian `|T_t f|^2` is a Gaussian of width `|1 + 4it|`,
/// so the space integral of its square is `1 / (sqrt(pi) |1 + 4it|)`.
fn gaussian_q_oracle() -> f64 {
    common::gaussian_quartic(1.0, 0.0, 0)
}

struct Line {
    ok: bool,
}

fn line(id: usize, name: &str, entries: &[&ReportEntry], extra: &str, elapsed: Duration, limit: Option<Duration>) -> Line {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let ok = !entries.is_empty() && entries.iter().all(|e| e.pass) && in_time;
    let worst = entries
        .iter()
        .min_by(|a, b| a.margin.total_cmp(&b.margin))
        .map(|e| format!("tightest {} value {:.6e} bound {:.6e} margin {:.3e}", e.check, e.value, e.bound, e.margin))
        .unwrap_or_else(|| "no entries".into());
    let limit = limit.map_or(String::new(), |l| format!(" (limit {:.0} s)", l.as_secs_f64()));
    println!(
        "criterion {id:>2} {} {name}: {} checks, {worst}{extra}; {:.2} s{limit}",
        if ok { "PASS" } else { "FAIL" },
        entries.len(),
        elapsed.as_secs_f64()
    );
    Line { ok }
}

fn pick<'a>(r: &'a Report, prefixes: &[&str]) -> Vec<&'a ReportEntry> {
    r.entries
        .iter()
        .filter(|e| prefixes.iter().any(|p| e.check.starts_with(p)))
        .collect()
}

fn margins(r: &Report, prefix: &str) {
    for e in r.matching(prefix) {
        println!("    {:<28} value {:.6} bound {:.6} margin {:+.4e} {}", e.check, e.value, e.bound, e.margin, e.params);
    }
}

#[test]
fn acceptance_criteria() {
    let s = SuiteSettings::default();
    let mut lines = Vec::new();

    // 1
    let t = Instant::now();
    let r = suite::gaussian_oracle_check(32).unwrap();
    let elapsed = t.elapsed();
    let oracle = gaussian_q_oracle();
    let value = r.entries[0].value;
    let rel = (value - oracle).abs() / oracle;
    let mut r1 = r.clone();
    r1.close("q4-vs-independent-quadrature", serde_json::json!({}), rel, 0.0, 1e-6);
    r1.close("independent-quadrature-vs-frozen", serde_json::json!({}), oracle, Q_GAUSSIAN, 1e-13);
    let all: Vec<_> = r1.entries.iter().collect();
    lines.push(line(
        1,
        "Gaussian quartic oracle",
        &all,
        &format!(", rel err {rel:.2e}"),
        elapsed,
        Some(Duration::from_secs(5)),
    ));

    // 2
    let t = Instant::now();
    let _ = optimize_delta();
    let opt_time = t.elapsed();
    let t = Instant::now();
    let bounds = suite::bounds_suite(&s).unwrap();
    let bounds_time = t.elapsed();
    lines.push(line(
        2,
        "lower-bound optimization",
        &pick(&bounds, &["delta-star", "lower-bound-max"]),
        "",
        opt_time,
        Some(Duration::from_secs(1)),
    ));

    // 3, 4
    lines.push(line(
        3,
        "upper bound on 200 random fields",
        &pick(&bounds, &["q-upper"]),
        "",
        bounds_time,
        Some(Duration::from_secs(120)),
    ));
    lines.push(line(4, "R bound on the same fields", &pick(&bounds, &["r-bound"]), "", bounds_time, None));

    // 5
    let t = Instant::now();
    let st = suite::strichartz_suite(&s).unwrap();
    let elapsed = t.elapsed();
    margins(&st, "strichartz");
    lines.push(line(5, "Strichartz sharpness probe", &st.entries.iter().collect::<Vec<_>>(), "", elapsed, None));

    // 6
    let t = Instant::now();
    let (gs, soliton) = suite::ground_state_suite(suite::soliton_grid(), suite::SOLITON_NODES, s.seed).unwrap();
    let elapsed = t.elapsed();
    lines.push(line(
        6,
        "ground state",
        &pick(&gs, &["soliton-residual", "soliton-omega-lower", "soliton-omega-upper", "soliton-scaling"]),
        &format!(", omega {:.12}, {} iterations", soliton.omega, soliton.iterations),
        elapsed,
        Some(Duration::from_secs(300)),
    ));

    // 7
    lines.push(line(7, "adjoint identity on 20 pairs", &pick(&bounds, &["adjoint"]), "", bounds_time, None));

    // 8
    let t = Instant::now();
    let ql = suite::quasilocal_suite(&s).unwrap();
    let elapsed = t.elapsed();
    margins(&ql, "quasilocal");
    lines.push(line(8, "quasi-locality", &ql.entries.iter().collect::<Vec<_>>(), "", elapsed, None));

    // 9
    let t = Instant::now();
    let mut bl = suite::bilinear_suite(&s).unwrap();
    bl.extend(suite::duality_suite(&s).unwrap());
    let elapsed = t.elapsed();
    margins(&bl, "bilinear-fourier-d");
    margins(&bl, "bilinear-x-d");
    margins(&bl, "duality");
    lines.push(line(
        9,
        "bilinear estimates and duality",
        &pick(&bl, &["bilinear-fourier-d", "bilinear-x-d", "duality"]),
        "",
        elapsed,
        None,
    ));

    // 10
    let t = Instant::now();
    let solved = dmlab::solver::solve_ground_state(
        &dmlab::solver::SolverConfig::default(),
        &dmlab::QuadratureRule::gauss_legendre(suite::SOLITON_NODES).unwrap(),
        suite::soliton_grid(),
    )
    .unwrap();
    assert_eq!(solved.field, soliton.field, "solver is not deterministic");
    let tails = suite::tails_analysis(&solved.field, solved.residual).unwrap();
    let elapsed = t.elapsed();
    margins(&tails.report, "");
    lines.push(line(
        10,
        "tail self-consistency and envelope",
        &pick(&tails.report, &["selfconsistency", "envelope"]),
        &format!(", tol {CONSISTENCY_TOL:e}, advisory {}", tails.advisory),
        elapsed,
        Some(Duration::from_secs(120)),
    ));

    let failed: Vec<usize> = lines.iter().enumerate().filter(|(_, l)| !l.ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
