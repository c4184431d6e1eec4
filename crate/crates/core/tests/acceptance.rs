//! Acceptance suite: the repository's exit criteria, one test per criterion,
//! run at the pinned truncations and tolerances. Each test prints its
//! pass/fail line through the harness; run with `--nocapture` to also see
//! per-check residuals:
//!
//! ```text
//! cargo test --test acceptance -- --test-threads=1 --nocapture
//! ```

use ncilw_core::report::Report;
use ncilw_core::verify;
use std::time::Instant;

fn finish(name: &str, report: Report, runtime_cap: Option<(f64, Instant)>) {
    print!("{}", report.summary());
    let mut failed: Vec<String> = report
        .results
        .iter()
        .filter(|r| !r.passed && !r.skipped)
        .map(|r| format!("{} (residual {:.3e} > tol {:.1e})", r.id, r.residual, r.tolerance))
        .collect();
    if let Some((cap, t0)) = runtime_cap {
        let secs = t0.elapsed().as_secs_f64();
        println!("{name}: runtime {secs:.1} s (cap {cap} s)");
        if secs > cap {
            failed.push(format!("runtime {secs:.1}s exceeded {cap}s"));
        }
    }
    assert!(failed.is_empty(), "{name}: {}", failed.join("; "));
}

#[test]
fn criterion_01_algebra_suite() {
    let t0 = Instant::now();
    let mut report = Report::new(0);
    verify::suite_algebra(&mut report, 1.0);
    finish("criterion 1", report, Some((60.0, t0)));
}

#[test]
fn criterion_02_vertex_multiplication_and_nfold() {
    let t0 = Instant::now();
    let mut report = Report::new(0);
    verify::suite_vertex(&mut report, 1.0, 24, 24, 20260810);
    finish("criterion 2", report, Some((300.0, t0)));
}

#[test]
fn criterion_03_correlators() {
    let mut report = Report::new(0);
    verify::suite_correlators(&mut report, 1.0, 24, 24);
    finish("criterion 3", report, None);
}

#[test]
fn criterion_04_exchange_relations() {
    let mut report = Report::new(0);
    verify::suite_exchange(&mut report, 1.0);
    finish("criterion 4", report, None);
}

#[test]
fn criterion_05_boson_representations() {
    let mut report = Report::new(0);
    verify::suite_boson_reps(&mut report, 1.0);
    finish("criterion 5", report, None);
}

#[test]
fn criterion_06_transforms() {
    let mut report = Report::new(0);
    verify::suite_transforms(&mut report, 1.0);
    finish("criterion 6", report, None);
}

#[test]
fn criterion_07_quantum_equation_of_motion() {
    let mut report = Report::new(0);
    verify::suite_heisenberg(&mut report, 1.0);
    finish("criterion 7", report, None);
}

#[test]
fn criterion_08_second_quantization() {
    let mut report = Report::new(0);
    verify::suite_second_quantization(&mut report, 1.0, 16, 16);
    finish("criterion 8", report, None);
}

#[test]
fn criterion_09_vacuum_identity() {
    let mut report = Report::new(0);
    verify::suite_vacuum_identity(&mut report, 1.0, 20260810);
    finish("criterion 9", report, None);
}

#[test]
fn criterion_10_constants() {
    // The c_eps(1e-4) clause is asserted exactly as stated. The measured
    // difference is 2.63e-4: c_eps converges to c0 at the O(eps) rate that
    // the invariants themselves require, so a 1e-6 threshold at eps = 1e-4
    // cannot be met by any faithful implementation. It is reported as an
    // honest failure rather than weakened.
    let mut report = Report::new(0);
    verify::suite_constants(&mut report, 1.0);
    finish("criterion 10", report, None);
}

#[test]
fn criterion_11_classical_pde() {
    let t0 = Instant::now();
    let mut report = Report::new(0);
    verify::suite_pde(&mut report, 1.0);
    finish("criterion 11", report, Some((120.0, t0)));
}

#[test]
fn criterion_12_bosonization() {
    let mut report = Report::new(0);
    verify::suite_bosonization(&mut report, 1.0);
    finish("criterion 12", report, None);
}

#[test]
fn criterion_13_substitution_and_point_splitting() {
    let mut report = Report::new(0);
    verify::suite_substitution_pointsplit(&mut report, 1.0);
    finish("criterion 13", report, None);
}
