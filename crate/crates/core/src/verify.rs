//! Named verification suites: every operator identity of the construction,
//! run as pass/fail checks with explicit tolerances and protected-subspace
//! accounting. `run_all` drives them at config scale; the `acceptance`
//! functions pin the parameters of the repository's exit criteria.
//!
//! Tolerances are tiered: machine-exact identities (pure operator algebra,
//! quadrature of trigonometric polynomials) at 1e-10..1e-12; checks mediated
//! by finite differences at 1e-5..1e-6 (5-point stencils, h ~ 1e-3 ell);
//! extrapolated point-splitting probes at 1e-4, reported informationally at
//! q > 0 where the underlying identities are conjectural.

use crate::config::Config;
use crate::fermion::{point_split_check, FermionBasis};
use crate::fock::{
    inner, norm, op_b, FockBasis, Gen, ModePoly, TruncationSpec,
};
use crate::hamiltonians::{
    c_from_quadrature, c_poly, correction_r_poly, ecs_potential, h3_poly, pair_potential,
    rho_poly, sandwich_apply, second_quantization_constant, substitution_check, w1_poly, w2_poly,
    w3_poly, w_from_quadrature, ParticleLabel,
};
use crate::params::{c0, c_eps, Mass, ModelParams};
use crate::pde::{self, heisenberg_residual, ic_preset, integrate, Scheme};
use crate::report::Report;
use crate::specfun::{
    self, delta_cap_pm, dirac_reg, sgn_reg, theta_checked, wp1_checked, zeta1_checked, ThetaKind,
};
use crate::transforms::{apply_t, apply_tt, multiplier_t, oracle_tt, pv_oracle_t, PeriodicField};
use crate::vertex::{
    anyon, anyon_descriptor, build_vertex, cocycle_chi, correlator_closed, correlator_fock,
    exchange_check, visited_sectors, Insertion, VertexDescriptor, VertexOp,
};
use crate::Chirality::{self, Minus, Plus};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

fn params_with_q(q: f64, r0: i64, s0: i64, nu_sign: i64, eps: f64) -> ModelParams {
    let delta = if q == 0.0 { 745.0 } else { -q.ln() };
    ModelParams::new(std::f64::consts::PI, delta, r0, s0, nu_sign, eps).unwrap()
}

fn seeded_probe(basis: &FockBasis, sector: (i32, i32), max_level: usize, seed: u64) -> Vec<Complex64> {
    let idx = basis.sector_states_up_to_level(sector, max_level);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = basis.zero();
    for &i in &idx {
        v[i] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let n = norm(&v);
    if n > 0.0 {
        v.iter_mut().for_each(|c| *c /= n);
    }
    v
}

fn rel_residual(lhs: &[Complex64], rhs: &[Complex64]) -> f64 {
    let num: f64 = lhs
        .iter()
        .zip(rhs.iter())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    num / norm(rhs).max(1e-300)
}

fn random_descriptor(
    rng: &mut ChaCha8Rng,
    support: i64,
    mu_max: i64,
    scale: f64,
    damping: f64,
) -> VertexDescriptor {
    let mut d = VertexDescriptor::default();
    d.mu = (
        rng.gen_range(-mu_max..=mu_max),
        rng.gen_range(-mu_max..=mu_max),
    );
    d.alpha0 = [
        Complex64::new(rng.gen_range(-1.0..1.0), 0.0),
        Complex64::new(rng.gen_range(-1.0..1.0), 0.0),
    ];
    for r in Chirality::BOTH {
        for n in 1..=support {
            let w = (-damping * n as f64).exp() / n as f64;
            let v = Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)) * w;
            d.set(r, n, v);
            d.set(r, -n, v.conj());
        }
    }
    d
}

// ---------------------------------------------------------------------------
// criterion 1: operator algebra at machine precision
// ---------------------------------------------------------------------------

pub fn suite_algebra(report: &mut Report, tol_scale: f64) {
    let spec = TruncationSpec::new(6, 8, 3);
    let params = params_with_q(0.5, 2, 1, 1, 0.25);
    let basis = FockBasis::build(spec, params).unwrap();
    let tol = 1e-12 * tol_scale;
    let trunc = format!("n_max=6 l_max=8 mu_max=3 q=0.5");

    // oscillator CCR: [a_{r,n}, a_{r',m}] = n delta_{n,-m} delta_{rr'}
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut protected_total = usize::MAX;
    for (r1, n1, r2, n2) in [
        (Plus, 1i64, Plus, -1i64),
        (Plus, 3, Plus, -3),
        (Plus, 2, Minus, -2),
        (Minus, 2, Minus, -2),
        (Plus, 1, Plus, 2),
        (Minus, 6, Minus, -6),
    ] {
        let budget = (n1.unsigned_abs() + n2.unsigned_abs()) as usize;
        if budget > basis.spec.l_max {
            continue;
        }
        let probe = seeded_probe(&basis, (0, 0), basis.spec.l_max - budget, 11);
        protected_total = protected_total.min(
            basis
                .sector_states_up_to_level((0, 0), basis.spec.l_max - budget)
                .len(),
        );
        let apply2 = |na: i64, ra: Chirality, nb: i64, rb: Chirality| -> Vec<Complex64> {
            let mut t = basis.zero();
            basis.apply_a_into(rb, nb, Complex64::new(1.0, 0.0), &probe, &mut t);
            let mut u = basis.zero();
            basis.apply_a_into(ra, na, Complex64::new(1.0, 0.0), &t, &mut u);
            u
        };
        let ab = apply2(n1, r1, n2, r2);
        let ba = apply2(n2, r2, n1, r1);
        let expect = if r1 == r2 && n1 == -n2 { n1 as f64 } else { 0.0 };
        let resid: f64 = ab
            .iter()
            .zip(ba.iter())
            .zip(probe.iter())
            .map(|((x, y), p)| (x - y - expect * p).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(resid);
    }
    report.record(
        "algebra.oscillator_ccr",
        "[a_{r,n}, a_{r',m}] = n delta_{n,-m} delta_{rr'}",
        trunc.clone(),
        protected_total,
        worst,
        tol,
        t0,
    );

    // Klein relations: R+R- = -R-R+, unitarity, vacuum overlaps, charge shifts
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let interior: Vec<usize> = (0..basis.dim())
        .filter(|&i| {
            let s = basis.state(i);
            s.mu_plus.abs() < 3 && s.mu_minus.abs() < 3
        })
        .collect();
    let probe = {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut v = basis.zero();
        for &i in &interior {
            v[i] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let n = norm(&v);
        v.iter_mut().for_each(|c| *c /= n);
        v
    };
    // anticommutation
    let mut pm = basis.zero();
    let mut t = basis.zero();
    basis.apply_klein_into(Minus, 1, Complex64::new(1.0, 0.0), &probe, &mut t);
    basis.apply_klein_into(Plus, 1, Complex64::new(1.0, 0.0), &t, &mut pm);
    let mut mp = basis.zero();
    let mut t = basis.zero();
    basis.apply_klein_into(Plus, 1, Complex64::new(1.0, 0.0), &probe, &mut t);
    basis.apply_klein_into(Minus, 1, Complex64::new(1.0, 0.0), &t, &mut mp);
    let anti: f64 = pm.iter().zip(mp.iter()).map(|(a, b)| (a + b).norm_sqr()).sum::<f64>().sqrt();
    worst = worst.max(anti);
    // unitarity R^{-1} R = I
    for r in Chirality::BOTH {
        let mut t = basis.zero();
        basis.apply_klein_into(r, 1, Complex64::new(1.0, 0.0), &probe, &mut t);
        let mut u = basis.zero();
        basis.apply_klein_into(r, -1, Complex64::new(1.0, 0.0), &t, &mut u);
        let resid: f64 = u.iter().zip(probe.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(resid);
    }
    // <Omega, R_+^a R_-^b Omega> = delta_{a0} delta_{b0}
    let om = basis.vacuum().unwrap();
    for a in -2i64..=2 {
        for b in -2i64..=2 {
            let mut p = ModePoly::new();
            p.push(
                Complex64::new(1.0, 0.0),
                vec![Gen::R { r: Plus, pow: a }, Gen::R { r: Minus, pow: b }],
            );
            let (v, _) = p.apply(&basis, &om);
            let overlap = inner(&om, &v);
            let expect = if a == 0 && b == 0 { 1.0 } else { 0.0 };
            worst = worst.max((overlap - Complex64::new(expect, 0.0)).norm());
        }
    }
    report.record(
        "algebra.klein",
        "R+R- = -R-R+, R^dag R = I, <Om,R+^a R-^b Om> = delta",
        trunc.clone(),
        interior.len(),
        worst,
        tol,
        t0,
    );

    // Bogoliubov modes: [b_{r,n}, b_{r',m}] = n delta delta, b^dag = b_{-n}
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut protected = 0usize;
    for n in 1..=2i64 {
        let budget = 2 * n as usize;
        let probe = seeded_probe(&basis, (0, 0), basis.spec.l_max - budget, 23u64.wrapping_add(n as u64));
        protected = basis
            .sector_states_up_to_level((0, 0), basis.spec.l_max - budget)
            .len();
        let bp = op_b(Plus, n, &basis).unwrap();
        let bm = op_b(Plus, -n, &basis).unwrap();
        let (t1, _) = bm.apply(&basis, &probe);
        let (t1, _) = bp.apply(&basis, &t1);
        let (t2, _) = bp.apply(&basis, &probe);
        let (t2, _) = bm.apply(&basis, &t2);
        let resid: f64 = t1
            .iter()
            .zip(t2.iter())
            .zip(probe.iter())
            .map(|((x, y), p)| (x - y - n as f64 * p).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(resid);
        // cross chirality commutes
        let bmm = op_b(Minus, -n, &basis).unwrap();
        let (u1, _) = bmm.apply(&basis, &probe);
        let (u1, _) = bp.apply(&basis, &u1);
        let (u2, _) = bp.apply(&basis, &probe);
        let (u2, _) = bmm.apply(&basis, &u2);
        let resid: f64 = u1.iter().zip(u2.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(resid);
    }
    report.record(
        "algebra.bogoliubov",
        "[b_{r,n}, b_{r',m}] = n delta_{n,-m} delta_{rr'} at q > 0",
        trunc.clone(),
        protected,
        worst,
        tol,
        t0,
    );

    // fermion CAR on the full mode-cutoff basis
    let t0 = Instant::now();
    let fb = FermionBasis::build(3, 36);
    let dim = fb.dim();
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut probe = vec![Complex64::new(0.0, 0.0); dim];
    for c in probe.iter_mut() {
        *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let pn = probe.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    probe.iter_mut().for_each(|c| *c /= pn);
    let anti = |r1, n1, d1, r2, n2, d2, expect: f64| -> f64 {
        let mut t1 = vec![Complex64::new(0.0, 0.0); dim];
        fb.apply_psi(r2, n2, d2, Complex64::new(1.0, 0.0), &probe, &mut t1).unwrap();
        let mut t2 = vec![Complex64::new(0.0, 0.0); dim];
        fb.apply_psi(r1, n1, d1, Complex64::new(1.0, 0.0), &t1, &mut t2).unwrap();
        let mut u1 = vec![Complex64::new(0.0, 0.0); dim];
        fb.apply_psi(r1, n1, d1, Complex64::new(1.0, 0.0), &probe, &mut u1).unwrap();
        let mut u2 = vec![Complex64::new(0.0, 0.0); dim];
        fb.apply_psi(r2, n2, d2, Complex64::new(1.0, 0.0), &u1, &mut u2).unwrap();
        t2.iter()
            .zip(u2.iter())
            .zip(probe.iter())
            .map(|((a, b), p)| (a + b - expect * p).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    worst = worst.max(anti(Plus, 1, false, Plus, 1, true, 1.0));
    worst = worst.max(anti(Plus, 1, false, Plus, 3, false, 0.0));
    worst = worst.max(anti(Plus, -1, false, Plus, -1, true, 1.0));
    worst = worst.max(anti(Plus, 1, false, Minus, 1, true, 0.0));
    worst = worst.max(anti(Minus, 3, true, Minus, 5, true, 0.0));
    report.record(
        "algebra.fermion_car",
        "{psi_{r,n}, psi^dag_{r',m}} = delta delta, {psi,psi} = 0",
        "cutoff=3 (full enumeration)".to_string(),
        dim,
        worst,
        tol,
        t0,
    );
}

// ---------------------------------------------------------------------------
// criterion 2: vertex multiplication rule and N-fold normal ordering
// ---------------------------------------------------------------------------

pub fn suite_vertex(report: &mut Report, tol_scale: f64, n_max: usize, l_max: usize, seed: u64) {
    let params = params_with_q(0.5, 2, 1, 1, 0.25);
    let tol = 1e-9 * tol_scale;
    let trunc = format!("n_max={n_max} l_max={l_max} q=0.5");

    // multiplication rule with random descriptors supported on |n| <= 4
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut protected = 0usize;
    for _ in 0..3 {
        let d1 = random_descriptor(&mut rng, 4, 1, 0.05, 0.25);
        let d2 = random_descriptor(&mut rng, 4, 1, 0.05, 0.25);
        let sum = d1.plus(&d2);
        let sectors = vec![
            (0, 0),
            (d2.mu.0 as i32, d2.mu.1 as i32),
            (sum.mu.0 as i32, sum.mu.1 as i32),
        ];
        let basis = FockBasis::with_sectors(TruncationSpec::new(n_max, l_max, 0), params, sectors)
            .unwrap();
        let chi = cocycle_chi(&d1, &d2, &params, n_max);
        let op1 = build_vertex(&d1, &basis).unwrap();
        let op2 = build_vertex(&d2, &basis).unwrap();
        let op12 = build_vertex(&sum, &basis).unwrap();
        let probes = [
            basis.vacuum().unwrap(),
            seeded_probe(&basis, (0, 0), 2, seed ^ 0x77),
        ];
        protected = basis.sector_states_up_to_level((0, 0), 2).len();
        for v in &probes {
            let (w, _) = op2.apply(&basis, v);
            let (lhs, _) = op1.apply(&basis, &w);
            let (mut rhs, _) = op12.apply(&basis, v);
            rhs.iter_mut().for_each(|c| *c *= chi);
            worst = worst.max(rel_residual(&lhs, &rhs));
        }
    }
    report.record(
        "vertex.multiplication_rule",
        "Phi(a) Phi(b) = chi(a,b) Phi(a+b) on protected states",
        trunc.clone(),
        protected,
        worst,
        tol,
        t0,
    );

    // N-fold normal ordering with anyons, eps >= 0.2
    let t0 = Instant::now();
    let eps = 1.3;
    let nu = params.nu();
    let ins = [
        Insertion { r: Plus, nu_eff: nu, x: 0.9, eps },
        Insertion { r: Minus, nu_eff: nu, x: 0.2, eps },
        Insertion { r: Plus, nu_eff: -nu, x: -0.7, eps },
    ];
    let mut sectors = visited_sectors(&ins, &params, (0, 0)).unwrap();
    sectors.push((0, 0));
    let basis =
        FockBasis::with_sectors(TruncationSpec::new(n_max, l_max, 0), params, sectors).unwrap();
    let mut log_pref = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;
    for j in 0..ins.len() {
        for k in (j + 1)..ins.len() {
            let (a, c) = (ins[j], ins[k]);
            log_pref += a.nu_eff
                * c.nu_eff
                * crate::vertex::log_theta_pair(a.r, c.r, a.x - c.x, a.eps + c.eps, &params)
                    .unwrap();
            let qa = a.charge(&params).unwrap();
            let qc = c.charge(&params).unwrap();
            if a.r == Minus && c.r == Plus && (qa * qc).rem_euclid(2) == 1 {
                sign = -sign;
            }
        }
    }
    let pref = sign * log_pref.exp();
    let mut total = VertexDescriptor::identity();
    for i in &ins {
        total = total.plus(&anyon_descriptor(*i, n_max, &params).unwrap());
    }
    let no_op = build_vertex(&total, &basis).unwrap();
    let ops: Vec<VertexOp> = ins.iter().map(|i| anyon(*i, &basis).unwrap()).collect();
    let probes = [
        basis.vacuum().unwrap(),
        seeded_probe(&basis, (0, 0), 2, seed ^ 0xabc),
    ];
    let mut worst = 0.0f64;
    for v in &probes {
        let mut lhs = v.clone();
        for op in ops.iter().rev() {
            let (w, _) = op.apply(&basis, &lhs);
            lhs = w;
        }
        let (mut rhs, _) = no_op.apply(&basis, v);
        rhs.iter_mut().for_each(|c| *c *= pref);
        worst = worst.max(rel_residual(&lhs, &rhs));
    }
    report.record(
        "vertex.nfold_normal_ordering",
        "phi_1..phi_N = prod sign theta^{nu_j nu_k} x normal-ordered product",
        format!("{trunc} eps={eps}"),
        basis.sector_states_up_to_level((0, 0), 2).len(),
        worst,
        tol,
        t0,
    );
}

// ---------------------------------------------------------------------------
// criterion 3: anyon correlators against the closed form
// ---------------------------------------------------------------------------

pub fn suite_correlators(report: &mut Report, tol_scale: f64, n_max: usize, l_max: usize) {
    let params = params_with_q(0.5, 2, 1, 1, 0.25);
    let nu = params.nu();
    let tol = 1e-6 * tol_scale;

    // 2-point
    let t0 = Instant::now();
    let eps = 0.35;
    let ins2 = [
        Insertion { r: Plus, nu_eff: nu, x: 0.6, eps },
        Insertion { r: Plus, nu_eff: -nu, x: -0.9, eps },
    ];
    let sectors = visited_sectors(&ins2, &params, (0, 0)).unwrap();
    let basis = FockBasis::with_sectors(TruncationSpec::new(n_max, l_max, 0), params, sectors)
        .unwrap();
    let closed = correlator_closed(&ins2, &params).unwrap();
    let (fock, _) = correlator_fock(&ins2, &basis).unwrap();
    report.record(
        "correlator.two_point",
        "<phi_{+,nu}(x) phi_{+,-nu}(x')> = theta1(kappa(x-x'); 2 kappa eps)^{-nu^2}",
        format!("n_max={n_max} l_max={l_max} eps={eps}"),
        1,
        (fock - closed).norm() / closed.norm(),
        tol,
        t0,
    );

    // charge selection rule
    let t0 = Instant::now();
    let mixed = [
        Insertion { r: Plus, nu_eff: nu, x: 0.6, eps },
        Insertion { r: Minus, nu_eff: nu, x: -0.9, eps },
    ];
    let sectors = visited_sectors(&mixed, &params, (0, 0)).unwrap();
    let bm = FockBasis::with_sectors(TruncationSpec::new(8, 10, 0), params, sectors).unwrap();
    let closed_mixed = correlator_closed(&mixed, &params).unwrap();
    let (fock_mixed, _) = correlator_fock(&mixed, &bm).unwrap();
    report.record(
        "correlator.charge_selection",
        "correlators vanish unless per-chirality charges sum to zero",
        "n_max=8 l_max=10".to_string(),
        1,
        closed_mixed.norm().max(fock_mixed.norm()),
        1e-12 * tol_scale,
        t0,
    );

    // mixed 4-point
    let t0 = Instant::now();
    let eps4 = 0.3;
    let inv = -1.0 / nu;
    let ins4 = [
        Insertion { r: Plus, nu_eff: nu, x: 0.8, eps: eps4 },
        Insertion { r: Plus, nu_eff: -nu, x: 0.1, eps: eps4 },
        Insertion { r: Minus, nu_eff: inv, x: -0.5, eps: eps4 },
        Insertion { r: Minus, nu_eff: -inv, x: -1.3, eps: eps4 },
    ];
    let sectors = visited_sectors(&ins4, &params, (0, 0)).unwrap();
    let b4 = FockBasis::with_sectors(TruncationSpec::new(n_max, l_max, 0), params, sectors)
        .unwrap();
    let closed4 = correlator_closed(&ins4, &params).unwrap();
    let (fock4, _) = correlator_fock(&ins4, &b4).unwrap();
    report.record(
        "correlator.four_point_mixed",
        "4-point mixed-species Fock value matches the pair-product closed form",
        format!("n_max={n_max} l_max={l_max} eps={eps4}"),
        1,
        (fock4 - closed4).norm() / closed4.norm(),
        tol,
        t0,
    );

    // exponential decay in l_max, slope at least the single-eps rate
    let t0 = Instant::now();
    let mut errs = Vec::new();
    let lms = [12usize, 16, 20, l_max.max(24)];
    for &lm in &lms {
        let sectors = visited_sectors(&ins2, &params, (0, 0)).unwrap();
        let b = FockBasis::with_sectors(TruncationSpec::new(n_max, lm, 0), params, sectors)
            .unwrap();
        let (f, _) = correlator_fock(&ins2, &b).unwrap();
        errs.push(((f - closed).norm() / closed.norm()).max(1e-300));
    }
    // least-squares slope of ln(err) vs l_max; the observed rate tracks
    // e^{-2 kappa (eps_j + eps_k) l_max}, at least as fast as e^{-2 kappa eps l_max}
    let n = lms.len() as f64;
    let sx: f64 = lms.iter().map(|&l| l as f64).sum();
    let sy: f64 = errs.iter().map(|e| e.ln()).sum();
    let sxx: f64 = lms.iter().map(|&l| (l as f64) * (l as f64)).sum();
    let sxy: f64 = lms.iter().zip(errs.iter()).map(|(&l, e)| l as f64 * e.ln()).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let required = 2.0 * params.kappa() * eps;
    report.record(
        "correlator.lmax_decay_slope",
        "truncation error decays exponentially in l_max (rate >= 2 kappa eps)",
        format!("l_max in {lms:?}, decay slope {slope:.3}"),
        lms.len(),
        // passes when -slope >= required
        (required + slope).max(0.0),
        1e-9,
        t0,
    );
}

// ---------------------------------------------------------------------------
// criterion 4: exchange relations and the eps -> 0 phase limit
// ---------------------------------------------------------------------------

pub fn suite_exchange(report: &mut Report, tol_scale: f64) {
    let tol = 1e-8 * tol_scale;
    let t0 = Instant::now();
    let params = params_with_q(0.5, 2, 1, 1, 0.25);
    let nu = params.nu();
    let eps = 1.3;
    let spec = TruncationSpec::new(12, 22, 2);
    let basis = FockBasis::build(spec, params).unwrap();
    let probes = [
        basis.vacuum().unwrap(),
        seeded_probe(&basis, (0, 0), 2, 91),
    ];
    let protected = basis.sector_states_up_to_level((0, 0), 2).len();
    let a = Insertion { r: Plus, nu_eff: nu, x: 0.9, eps };
    let b = Insertion { r: Plus, nu_eff: -nu, x: -0.4, eps };
    let rep_same = exchange_check(a, b, &basis, &probes).unwrap();
    let c = Insertion { r: Minus, nu_eff: nu, x: -0.4, eps };
    let rep_opp = exchange_check(a, c, &basis, &probes).unwrap();
    let worst = rep_same.residual.max(rep_opp.residual);
    report.record(
        "exchange.anyons",
        "phi phi' = phase phi' phi; same-chirality phase e^{-i pi nu nu' sgn}, opposite (-1)^{nu nu'/nu0^2}",
        "n_max=12 l_max=22 eps=1.3 q=0.5".to_string(),
        protected,
        worst,
        tol,
        t0,
    );

    // fermion case nu^2 = 1
    let t0 = Instant::now();
    let pf = params_with_q(0.5, 1, 1, -1, 0.25);
    let bf = FockBasis::build(TruncationSpec::new(12, 22, 2), pf).unwrap();
    let probes = [bf.vacuum().unwrap(), seeded_probe(&bf, (0, 0), 2, 93)];
    let af = Insertion { r: Plus, nu_eff: -1.0, x: 1.1, eps };
    let cf = Insertion { r: Plus, nu_eff: -1.0, x: -0.6, eps };
    let rep_f = exchange_check(af, cf, &bf, &probes).unwrap();
    report.record(
        "exchange.fermion_case",
        "nu^2 = 1 anyons obey the fermionic exchange relation",
        "n_max=12 l_max=22 eps=1.3 nu=-1".to_string(),
        bf.sector_states_up_to_level((0, 0), 2).len(),
        rep_f.residual,
        tol,
        t0,
    );

    // eps -> 0 phase limit: Richardson extrapolation of the closed-form phase
    // at eps = 4e-3, 2e-3, 1e-3 against sgn(x - x')
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for dx in [-2.6, -1.1, -0.3, 0.4, 1.5, 2.9] {
        let phase_at = |e: f64| -> Complex64 {
            let s = sgn_reg(dx, e, &pf).unwrap();
            (-I * std::f64::consts::PI * s).exp()
        };
        let p1 = phase_at(4e-3);
        let p2 = phase_at(2e-3);
        let p3 = phase_at(1e-3);
        // quadratic Richardson: error c1 e + c2 e^2 removed
        let extrap = (8.0 * p3 - 6.0 * p2 + p1) / 3.0;
        let expect = Complex64::new(0.0, -std::f64::consts::PI * dx.signum()).exp();
        worst = worst.max((extrap - expect).norm());
    }
    report.record(
        "exchange.sgn_limit",
        "exchange phase -> e^{-i pi nu nu' sgn(x-x')} as eps -> 0 (extrapolated at eps = 1e-3)",
        "eps grid {4e-3, 2e-3, 1e-3}".to_string(),
        6,
        worst,
        1e-6 * tol_scale,
        t0,
    );
}

// ---------------------------------------------------------------------------
// criterion 5: boson representations by exact quadrature
// ---------------------------------------------------------------------------

pub fn suite_boson_reps(report: &mut Report, tol_scale: f64) {
    let params = params_with_q(0.5, 2, 1, 1, 0.25);
    let basis = FockBasis::build(TruncationSpec::new(6, 12, 1), params).unwrap();
    let probe = seeded_probe(&basis, (0, 0), basis.spec.l_max, 41);
    let trunc = "n_max=6 l_max=12 q=0.5".to_string();
    let n_pts = 3 * basis.spec.n_max + 2;
    let tol = 1e-9 * tol_scale;

    for (k, name) in [(2usize, "W2"), (3, "W3")] {
        let t0 = Instant::now();
        let mut worst = 0.0f64;
        for r in Chirality::BOTH {
            let quad = w_from_quadrature(k, r, &basis, n_pts);
            let modes = if k == 2 { w2_poly(r, &basis) } else { w3_poly(r, &basis) };
            let (a, _) = quad.apply(&basis, &probe);
            let (b, _) = modes.apply(&basis, &probe);
            let resid: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(resid / norm(&b).max(1.0));
        }
        report.record(
            &format!("boson_rep.{}", name.to_lowercase()),
            &format!("(1/(2 pi k)) int :rho^{k}: dx reproduces {name} by exact trapezoid"),
            trunc.clone(),
            basis.dim(),
            worst,
            tol,
            t0,
        );
    }
    let t0 = Instant::now();
    let quad = c_from_quadrature(&basis, n_pts);
    let (a, _) = quad.apply(&basis, &probe);
    let (b, _) = c_poly(&basis).apply(&basis, &probe);
    let resid: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    report.record(
        "boson_rep.c_nonlocal",
        "-(1/4 pi) int sum_r :rho_r T rho_{r,x} + rho_{-r} T~ rho_{r,x}: dx reproduces C",
        trunc,
        basis.dim(),
        resid / norm(&b).max(1.0),
        tol,
        t0,
    );
}

// ---------------------------------------------------------------------------
// criterion 6: transforms against the quadrature oracles
// ---------------------------------------------------------------------------

pub fn suite_transforms(report: &mut Report, tol_scale: f64) {
    let params = params_with_q(0.5, 2, 1, 1, 0.25);
    let kappa = params.kappa();
    let t0 = Instant::now();
    let amps = [0.31, -0.82, 0.44, 0.12, -0.27];
    let phases = [0.1, 1.9, -0.4, 2.2, 0.8];
    let f = move |x: f64| -> f64 {
        amps.iter()
            .zip(phases.iter())
            .enumerate()
            .map(|(i, (a, ph))| a * (2.0 * kappa * (i + 1) as f64 * x + ph).sin())
            .sum()
    };
    let n = 256;
    let h = 2.0 * params.ell / n as f64;
    let field = PeriodicField::from_samples(
        params.ell,
        &(0..n).map(|j| f(-params.ell + j as f64 * h)).collect::<Vec<_>>(),
    )
    .unwrap();
    let tf = apply_t(&field, &params);
    let (ttf, _) = apply_tt(&field, &params);
    let mut worst = 0.0f64;
    for x in [-2.4, -0.9, 0.0, 0.7, 1.8, 3.0] {
        let (or_t, _) = pv_oracle_t(&f, x, &params, 2048, None).unwrap();
        worst = worst.max((or_t - tf.eval(x).re).abs());
        let (or_tt, _) = oracle_tt(&f, x, &params, 2048, None).unwrap();
        worst = worst.max((or_tt - ttf.eval(x)).norm());
    }
    report.record(
        "transforms.oracle_agreement",
        "multiplier T, T~ match PV / direct quadrature of the defining kernels",
        "N=256 field, 2048-point quadrature, q=0.5".to_string(),
        6,
        worst,
        1e-8 * tol_scale,
        t0,
    );

    let t0 = Instant::now();
    let ph = params_with_q(1e-8, 2, 1, 1, 0.25);
    let mut worst = 0.0f64;
    for nn in 1..=16i64 {
        worst = worst.max((multiplier_t(nn, &ph) - I).norm());
        worst = worst.max((multiplier_t(-nn, &ph) + I).norm());
    }
    report.record(
        "transforms.hilbert_limit",
        "delta -> infinity: T multiplier -> i sgn(n) (periodic Hilbert transform)",
        "q=1e-8".to_string(),
        16,
        worst,
        1e-10 * tol_scale,
        t0,
    );

    // antisymmetry and derivative commutation (machine identities)
    let t0 = Instant::now();
    let g = PeriodicField::from_samples(
        params.ell,
        &(0..n)
            .map(|j| {
                let x = -params.ell + j as f64 * h;
                (4.0 * kappa * x).cos() - 0.5 * (2.0 * kappa * x).sin()
            })
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let tg = apply_t(&g, &params);
    let mut worst = (g.integral_of_product(&tf) + tg.integral_of_product(&field)).norm();
    let a = apply_t(&field.derivative(1), &params);
    let b = apply_t(&field, &params).derivative(1);
    for (x, y) in a.coeffs().iter().zip(b.coeffs().iter()) {
        worst = worst.max((x - y).norm());
    }
    report.record(
        "transforms.antisymmetry_and_derivative",
        "<g, Tf> = -<Tg, f> on zero-mean fields; T commutes with d/dx",
        "N=256".to_string(),
        n,
        worst,
        1e-12 * tol_scale,
        t0,
    );
}

// ---------------------------------------------------------------------------
// criterion 7: quantum equation of motion
// ---------------------------------------------------------------------------

pub fn suite_heisenberg(report: &mut Report, tol_scale: f64) {
    let params = params_with_q(0.5, 2, 1, 1, 0.25);
    let basis =
        FockBasis::with_sectors(TruncationSpec::new(4, 14, 0), params, vec![(0, 0)]).unwrap();
    let eps = 0.3;
    let budget = basis.spec.l_max - 3 * basis.spec.n_max;
    let probes = vec![
        seeded_probe(&basis, (0, 0), budget, 51),
        seeded_probe(&basis, (0, 0), budget, 52),
    ];
    let protected = basis.sector_states_up_to_level((0, 0), budget).len();
    let xs: Vec<f64> = (0..32)
        .map(|j| -params.ell + 2.0 * params.ell * (j as f64 + 0.5) / 32.0)
        .collect();
    let t0 = Instant::now();
    let mut full = 0.0f64;
    let mut parts = 0.0f64;
    for r in Chirality::BOTH {
        for pt in heisenberg_residual(r, &xs, eps, &basis, &probes) {
            full = full.max(pt.residual_full);
            parts = parts.max(pt.residual_w2.max(pt.residual_c).max(pt.residual_w3));
        }
    }
    let trunc = format!("n_max={} l_max={} eps=0.3 q=0.5, 32-point grid", basis.spec.n_max, basis.spec.l_max);
    report.record(
        "heisenberg.equation_of_motion",
        "i[H3, rho_r] = -nu r :rho o rho_x: - (r/2)(nu^2-1)(T rho_xx + T~ rho_xx)",
        trunc.clone(),
        protected,
        full,
        1e-8 * tol_scale,
        t0,
    );
    let t0 = Instant::now();
    report.record(
        "heisenberg.constituents",
        "i[W2,rho] = -r rho_x; i[C,rho] = r(T rho_xx + T~ rho_xx); i[W3,rho] = -2r :rho o rho_x:",
        trunc,
        protected,
        parts,
        1e-8 * tol_scale,
        t0,
    );

    // FD-mediated CCR of the chiral bosons
    let t0 = Instant::now();
    let (x, xp, e1, e2) = (0.6, -0.2, 0.25, 0.15);
    let r1 = rho_poly(Plus, x, e1, 0, &basis);
    let r2 = rho_poly(Plus, xp, e2, 0, &basis);
    let v = seeded_probe(&basis, (0, 0), basis.spec.l_max - 2 * basis.spec.n_max, 53);
    let (a, _) = r2.apply(&basis, &v);
    let (a, _) = r1.apply(&basis, &a);
    let (b, _) = r1.apply(&basis, &v);
    let (b, _) = r2.apply(&basis, &b);
    let fd = specfun::fd1(
        |t| {
            Complex64::new(
                specfun::dirac_series(t - xp, e1 + e2, &params, Some(basis.spec.n_max)).unwrap(),
                0.0,
            )
        },
        x,
        2e-4,
    );
    let expect = -2.0 * std::f64::consts::PI * I * fd;
    let resid: f64 = a
        .iter()
        .zip(b.iter())
        .zip(v.iter())
        .map(|((p, q), s)| (p - q - expect * s).norm_sqr())
        .sum::<f64>()
        .sqrt();
    report.record(
        "heisenberg.boson_ccr_fd",
        "[rho_r(x;e), rho_r(x';e')] = -2 pi i FD_x[delta(x-x'; e+e')]",
        format!("n_max={} l_max={}", basis.spec.n_max, basis.spec.l_max),
        basis.sector_states_up_to_level((0, 0), basis.spec.l_max - 2 * basis.spec.n_max).len(),
        resid / expect.norm(),
        1e-6 * tol_scale,
        t0,
    );
}

// ---------------------------------------------------------------------------
// criterion 9: vacuum identity
// ---------------------------------------------------------------------------

pub fn suite_vacuum_identity(report: &mut Report, tol_scale: f64, seed: u64) {
    let params = params_with_q(0.5, 2, 1, 1, 0.25);
    // l_max >= 2 n_max keeps every H3 Omega component inside the basis, so
    // <Om, [H3, Phi] Om> cancels to rounding for any descriptor
    let basis = FockBasis::build(TruncationSpec::new(6, 12, 2), params).unwrap();
    let h3 = h3_poly(params.nu(), &basis);
    let om = basis.vacuum().unwrap();
    let (h3om, _) = h3.apply(&basis, &om);
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let mut d = random_descriptor(&mut rng, 4, 1, 0.5, 0.0);
        if k % 3 == 0 {
            d.mu = (0, 0); // the nontrivial charge-neutral case
        }
        let op = build_vertex(&d, &basis).unwrap();
        let (phi_om, _) = op.apply(&basis, &om);
        let dd = {
            let mut s = d.star().negated();
            s.mu = (-d.mu.0, -d.mu.1);
            s
        };
        let sign = if (d.mu.0 * d.mu.1).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let opd = build_vertex(&dd, &basis).unwrap();
        let (phid_om, _) = opd.apply(&basis, &om);
        // <Om,[H3,Phi]Om> = <H3 Om, Phi Om> - <Phi^dag Om, H3 Om>
        let val = inner(&h3om, &phi_om) - sign * inner(&phid_om, &h3om);
        worst = worst.max(val.norm());
    }
    report.record(
        "vacuum.h3_commutator_expectation",
        "<Omega, [H3, Phi_mu(alpha)] Omega> = 0 over a 100-descriptor seeded batch",
        "n_max=6 l_max=12 q=0.5".to_string(),
        100,
        worst,
        1e-9 * tol_scale,
        t0,
    );
}

// ---------------------------------------------------------------------------
// criterion 10: constants
// ---------------------------------------------------------------------------

pub fn suite_constants(report: &mut Report, tol_scale: f64) {
    // q = 0: c0 = kappa^2 / 3 exactly
    let t0 = Instant::now();
    let p0 = params_with_q(0.0, 2, 1, 1, 0.25);
    let expect = p0.kappa() * p0.kappa() / 3.0;
    report.record(
        "constants.c0_trigonometric",
        "q = 0: c0 = kappa^2 / 3",
        "ell=pi q=0".to_string(),
        1,
        (c0(&p0).unwrap() - expect).abs(),
        1e-15,
        t0,
    );

    // |c_{1e-4} - c0| at q = 0.5: the regularized constant converges to c0
    // at the O(eps) rate, so this difference sits at 2.6e-4. The stated
    // 1e-6 threshold is asserted as written and fails; see the convergence
    // check below for the rate.
    let t0 = Instant::now();
    let p = params_with_q(0.5, 2, 1, 1, 0.25);
    let c0v = c0(&p).unwrap();
    let diff = (c_eps(&p, 1e-4, None).unwrap() - c0v).abs();
    report.record(
        "constants.c_eps_1e4",
        "|c_eps(1e-4) - c0| < 1e-6 at q = 0.5 (converges at rate O(eps): diff = 2.63 eps)",
        "ell=pi q=0.5".to_string(),
        1,
        diff,
        1e-6 * tol_scale,
        t0,
    );

    // monotone O(eps) convergence of c_eps to c0
    let t0 = Instant::now();
    let ds: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&e| (c_eps(&p, e, None).unwrap() - c0v).abs())
        .collect();
    let monotone = ds.windows(2).all(|w| w[1] < w[0]);
    let rate = ds[1] / ds[2];
    let ok = monotone && (rate - 10.0).abs() < 1.0;
    report.record(
        "constants.c_eps_linear_rate",
        "c_eps -> c0 monotonically with observed rate O(eps)",
        format!("eps grid 1e-2..1e-4, decade ratio {rate:.2}"),
        3,
        if ok { 0.0 } else { 1.0 },
        0.5,
        t0,
    );

    // H_{3,nu} + nu^2 H_{3,-1/nu} = 0 as matrices
    let t0 = Instant::now();
    let basis = FockBasis::build(TruncationSpec::new(4, 6, 1), p).unwrap();
    let nu = p.nu();
    let h3 = h3_poly(nu, &basis);
    let h3i = h3_poly(-1.0 / nu, &basis);
    let v = seeded_probe(&basis, (0, 0), basis.spec.l_max, 61);
    let (a, _) = h3.apply(&basis, &v);
    let (b, _) = h3i.apply(&basis, &v);
    let resid: f64 = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x + nu * nu * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
        / norm(&a).max(1.0);
    report.record(
        "constants.h3_statistics_symmetry",
        "H_{3,nu} + nu^2 H_{3,-1/nu} = 0",
        "n_max=4 l_max=6 q=0.5".to_string(),
        basis.dim(),
        resid,
        1e-12 * tol_scale,
        t0,
    );
}

// ---------------------------------------------------------------------------
// criterion 11: classical PDE conservation and convergence
// ---------------------------------------------------------------------------

pub fn suite_pde(report: &mut Report, tol_scale: f64) {
    let params = params_with_q(0.5, 2, 1, 1, 0.25);
    let t0 = Instant::now();
    let state = ic_preset("default", params.ell, 256).unwrap();
    let (_, log) = integrate(state, 1e-3, 1000, Scheme::Rk4, &params, 250).unwrap();
    let first = log.first().unwrap();
    let last = log.last().unwrap();
    let mass_drift = (last.mass_u - first.mass_u)
        .abs()
        .max((last.mass_v - first.mass_v).abs());
    report.record(
        "pde.mass_conservation",
        "int u and int v drift over T = 1",
        "N=256 dt=1e-3 rk4".to_string(),
        1,
        mass_drift,
        1e-10 * tol_scale,
        t0,
    );
    let t0 = Instant::now();
    report.record(
        "pde.momentum_conservation",
        "int (u^2 - v^2) drift over T = 1",
        "N=256 dt=1e-3 rk4".to_string(),
        1,
        (last.momentum - first.momentum).abs(),
        1e-8 * tol_scale,
        t0,
    );
    let t0 = Instant::now();
    report.record(
        "pde.hamiltonian_conservation",
        "H = (2/(pi g)) int [(u^3+v^3)/3 + (g/4)(u T u_x + ...)] drift over T = 1",
        "N=256 dt=1e-3 rk4".to_string(),
        1,
        (last.hamiltonian - first.hamiltonian).abs(),
        1e-8 * tol_scale,
        t0,
    );

    // RK4 self-convergence order
    let t0 = Instant::now();
    let state = ic_preset("default", params.ell, 128).unwrap();
    let run = |dt: f64| {
        let steps = (0.25 / dt).round() as usize;
        integrate(state.clone(), dt, steps, Scheme::Rk4, &params, 0)
            .unwrap()
            .0
    };
    let f1 = run(2e-3);
    let f2 = run(1e-3);
    let f3 = run(5e-4);
    let err = |a: &pde::FieldPair, b: &pde::FieldPair| -> f64 {
        a.u.coeffs()
            .iter()
            .zip(b.u.coeffs().iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let order = (err(&f1, &f2) / err(&f2, &f3)).log2();
    report.record(
        "pde.rk4_order",
        "dt-halving self-convergence order = 4.0 +- 0.1",
        format!("N=128 T=0.25, measured order {order:.3}"),
        1,
        (order - 4.0).abs(),
        0.1,
        t0,
    );
}

// ---------------------------------------------------------------------------
// criterion 12: bosonization at q = 0
// ---------------------------------------------------------------------------

pub fn suite_bosonization(report: &mut Report, _tol_scale: f64) {
    let t0 = Instant::now();
    fn partitions(l: usize) -> usize {
        fn rec(l: usize, max: usize) -> usize {
            if l == 0 {
                return 1;
            }
            (1..=max.min(l)).map(|p| rec(l - p, p)).sum()
        }
        rec(l, l.max(1))
    }
    let params = params_with_q(0.0, 1, 1, -1, 0.25);
    let kappa = params.kappa();
    let fb = FermionBasis::build(8, 16);
    // census of one-chirality sectors
    let mut failures = 0usize;
    let mut checked = 0usize;
    let mut census: std::collections::HashMap<(i64, i64), usize> = std::collections::HashMap::new();
    for i in 0..fb.dim() {
        if fb.charge(i, Minus) != 0 || fb.twice_energy_of(i) != {
            // only pure plus-chirality excitations
            let e = fb.wf_eigenvalue(2, Plus, i, kappa) / kappa;
            // twice the plus-energy
            e.round() as i64
        } {
            continue;
        }
        let c = fb.charge(i, Plus);
        let e = fb.wf_eigenvalue(2, Plus, i, kappa) / (2.0 * kappa);
        let l = (e - (c * c) as f64 / 2.0).round() as i64;
        *census.entry((c, l)).or_default() += 1;
    }
    for c in -2i64..=2 {
        for l in 0..=6i64 {
            if (c * c) + 2 * l > fb.twice_e_max {
                continue;
            }
            checked += 1;
            if census.get(&(c, l)).copied().unwrap_or(0) != partitions(l as usize) {
                failures += 1;
            }
        }
    }
    report.record(
        "bosonization.sector_dimensions",
        "fermion charge-sector dimension at level L equals p(L) (boson side) up to level 6",
        "cutoff=8 levels<=6".to_string(),
        checked,
        failures as f64,
        0.5,
        t0,
    );

    // sector-wise H2 spectra with multiplicities
    let t0 = Instant::now();
    let level_cap = 6usize;
    let bb = FockBasis::build(TruncationSpec::new(level_cap, level_cap, 2), params).unwrap();
    let w2 = w2_poly(Plus, &bb);
    let mut boson: std::collections::HashMap<i64, Vec<f64>> = std::collections::HashMap::new();
    for i in 0..bb.dim() {
        let st = bb.state(i);
        if st.mu_minus != 0 {
            continue;
        }
        let half = st.occ.len() / 2;
        if st.occ[half..].iter().any(|&m| m > 0) {
            continue;
        }
        let mut e = bb.zero();
        e[i] = Complex64::new(1.0, 0.0);
        let (w, _) = w2.apply(&bb, &e);
        boson.entry(st.mu_plus as i64).or_default().push(inner(&e, &w).re);
    }
    let mut fermion: std::collections::HashMap<i64, Vec<f64>> = std::collections::HashMap::new();
    for i in 0..fb.dim() {
        if fb.charge(i, Minus) != 0 || !fb.is_sea(i, Minus) {
            continue;
        }
        fermion
            .entry(fb.charge(i, Plus))
            .or_default()
            .push(fb.wf_eigenvalue(2, Plus, i, kappa));
    }
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    for mu in -2i64..=2 {
        let emax = 2.0 * kappa * ((mu * mu) as f64 / 2.0 + level_cap as f64) + 1e-9;
        let mut bl: Vec<f64> = boson[&mu].iter().copied().filter(|&e| e <= emax).collect();
        let mut fl: Vec<f64> = fermion[&mu].iter().copied().filter(|&e| e <= emax).collect();
        bl.sort_by(|a, b| a.partial_cmp(b).unwrap());
        fl.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if bl.len() != fl.len() {
            worst = worst.max(1.0);
            continue;
        }
        compared += bl.len();
        for (x, y) in bl.iter().zip(fl.iter()) {
            worst = worst.max((x - y).abs());
        }
    }
    report.record(
        "bosonization.h2_spectra",
        "boson H2 and fermion H2^F spectra coincide sector-wise with multiplicities (q = 0)",
        format!("levels<=6, {compared} eigenvalues"),
        compared,
        worst,
        1e-12,
        t0,
    );
}

// ---------------------------------------------------------------------------
// criterion 13: substitution identity and point splitting
// ---------------------------------------------------------------------------

pub fn suite_substitution_pointsplit(report: &mut Report, tol_scale: f64) {
    let t0 = Instant::now();
    let p = params_with_q(0.5, 2, 1, 1, 0.25);
    let g = p.g();
    let mut worst = substitution_check(&[0.4], &[-0.9], &[], &[], g, &p).unwrap();
    worst = worst.max(substitution_check(&[0.4], &[], &[-0.9], &[], g, &p).unwrap());
    worst = worst.max(substitution_check(&[0.4, 1.3], &[-0.9], &[2.1], &[-2.4], g, &p).unwrap());
    report.record(
        "substitution.deformed_to_generalized",
        "shifting one variable group by i delta maps the two-type potential to the four-type one",
        "q=0.5 g=2".to_string(),
        3,
        worst,
        1e-11 * tol_scale,
        t0,
    );

    // point splitting at q = 0 (control) and q > 0 (informational)
    for (q, informational) in [(0.0, false), (0.4, true)] {
        let t0 = Instant::now();
        let params = params_with_q(q, 1, 1, -1, 0.25);
        let basis = FockBasis::with_sectors(
            TruncationSpec::new(10, 12, 0),
            params,
            vec![(0, 0)],
        )
        .unwrap();
        let mut pairs = Vec::new();
        for &i in basis.states_up_to_level(2).iter().take(4) {
            let mut e = basis.zero();
            e[i] = Complex64::new(1.0, 0.0);
            pairs.push((basis.vacuum().unwrap(), e.clone()));
            pairs.push((e.clone(), e));
        }
        let rep = point_split_check(Plus, 0.4, 1e-9, &basis, &pairs).unwrap();
        let worst = (0..3)
            .map(|k| rep.residual[k] / rep.scale[k])
            .fold(0.0f64, f64::max);
        let (id, tol) = if informational {
            ("pointsplit.densities_q_positive_informational", f64::INFINITY)
        } else {
            ("pointsplit.densities_q0", 1e-4 * tol_scale)
        };
        report.record(
            id,
            "a^0..a^2 coefficients of :psi^dag(x) psi(x-a): match the chiral-boson densities",
            format!("n_max=10 l_max=12 q={q}"),
            pairs.len(),
            worst,
            tol,
            t0,
        );
    }
}

// ---------------------------------------------------------------------------
// the anyon commutator suite (supporting checks with R and c_eps)
// ---------------------------------------------------------------------------

pub fn suite_anyon_commutators(report: &mut Report, tol_scale: f64) {
    // The right-hand sides follow the closed-form commutators; evaluated with
    // mode-truncated operators they converge at rate ~ e^{-2 kappa eps n_max}
    // (and the W2/W3 pair-creation drops at rate q^{(l_max - probe)/2}), so
    // eps, q, n_max are chosen to land the comparison below tolerance.
    let params = params_with_q(0.1, 2, 1, 1, 0.25);
    let nu = params.nu();
    let n_max = 12;
    let l_max = 14;
    let eps = 1.2;
    let x = 0.45;
    let basis = FockBasis::with_sectors(
        TruncationSpec::new(n_max, l_max, 0),
        params,
        vec![(0, 0), (2, 0)],
    )
    .unwrap();
    let ins = Insertion { r: Plus, nu_eff: nu, x, eps };
    let phi = anyon(ins, &basis).unwrap();
    let om = basis.vacuum().unwrap();
    let probes = vec![om.clone(), seeded_probe(&basis, (0, 0), 1, 71)];
    let trunc = format!("n_max={n_max} l_max={l_max} eps={eps} q=0.1");

    let commutator = |op: &ModePoly, v: &[Complex64]| -> Vec<Complex64> {
        let (pv, _) = phi.apply(&basis, v);
        let (opv, _) = op.apply(&basis, &pv);
        let (ov, _) = op.apply(&basis, v);
        let (pov, _) = phi.apply(&basis, &ov);
        opv.iter().zip(pov.iter()).map(|(a, b)| a - b).collect()
    };

    // [W_{1,r'}, phi] = nu delta_{rr'} phi
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for v in &probes {
        let lhs = commutator(&w1_poly(Plus, &basis), v);
        let (pv, _) = phi.apply(&basis, v);
        let rhs: Vec<Complex64> = pv.iter().map(|c| nu * c).collect();
        worst = worst.max(rel_residual(&lhs, &rhs));
        // wrong chirality: zero
        let lhs0 = commutator(&w1_poly(Minus, &basis), v);
        worst = worst.max(norm(&lhs0) / norm(&pv));
    }
    report.record(
        "anyon_comm.w1",
        "[W_{1,r'}, phi_{r,nu}] = nu delta_{rr'} phi",
        trunc.clone(),
        probes.len(),
        worst,
        1e-10 * tol_scale,
        t0,
    );

    // [W_{2,r}, phi] = i r FD_x[phi]
    let t0 = Instant::now();
    let h = 1e-3 * params.ell;
    let mut worst = 0.0f64;
    for v in &probes {
        let lhs = commutator(&w2_poly(Plus, &basis), v);
        // 5-point derivative of the vector map x -> phi(x) v
        let mut rhs = basis.zero();
        for (sh, w) in [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)] {
            let shifted = anyon(Insertion { x: x + sh * h, ..ins }, &basis).unwrap();
            let (sv, _) = shifted.apply(&basis, v);
            for (a, b) in rhs.iter_mut().zip(sv.iter()) {
                *a += w / (12.0 * h) * b;
            }
        }
        rhs.iter_mut().for_each(|c| *c *= I);
        worst = worst.max(rel_residual(&lhs, &rhs));
    }
    report.record(
        "anyon_comm.w2_fd",
        "[W_{2,r}, phi_{r,nu}(x)] = i r d/dx phi (finite differences)",
        trunc.clone(),
        probes.len(),
        worst,
        1e-6 * tol_scale,
        t0,
    );

    // [W_{3,r}, phi] = -phi''/nu + i r (nu^2-1) :rho' phi: + 2 nu :R phi: + nu^3 c_eps phi
    let t0 = Instant::now();
    let ce = c_eps(&params, eps, Some(n_max)).unwrap();
    let rho_prime = rho_poly(Plus, x, eps, 1, &basis);
    let corr = correction_r_poly(Plus, nu, x, eps, &basis);
    let mut worst = 0.0f64;
    for v in &probes {
        let lhs = commutator(&w3_poly(Plus, &basis), v);
        // phi'' by 5-point stencil
        let mut phi_pp = basis.zero();
        for (sh, w) in [(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)] {
            let shifted = anyon(Insertion { x: x + sh * h, ..ins }, &basis).unwrap();
            let (sv, _) = shifted.apply(&basis, v);
            for (a, b) in phi_pp.iter_mut().zip(sv.iter()) {
                *a += w / (12.0 * h * h) * b;
            }
        }
        let (rho_phi, _) = sandwich_apply(&rho_prime, &phi, &basis, v);
        let (corr_phi, _) = sandwich_apply(&corr, &phi, &basis, v);
        let (pv, _) = phi.apply(&basis, v);
        let rhs: Vec<Complex64> = (0..basis.dim())
            .map(|i| {
                -phi_pp[i] / nu
                    + I * (nu * nu - 1.0) * rho_phi[i]
                    + 2.0 * nu * corr_phi[i]
                    + nu.powi(3) * ce * pv[i]
            })
            .collect();
        worst = worst.max(rel_residual(&lhs, &rhs));
    }
    report.record(
        "anyon_comm.w3_full",
        "[W_{3,r}, phi] = -phi''/nu + i r (nu^2-1) :rho' phi: + 2 nu :R phi: + nu^3 c_eps phi",
        trunc.clone(),
        probes.len(),
        worst,
        1e-5 * tol_scale,
        t0,
    );

    // C-commutator identity on the vacuum for a mixed 2-anyon product:
    // ((1-nu^2)/2)[C, phi phi'] Om = -X Om + m m' nu^2 (nu^2-1) wp(x-x'; 2eps) phi phi' Om
    let t0 = Instant::now();
    let g = params.g();
    let ins2 = Insertion { r: Minus, nu_eff: -1.0 / nu, x: -0.8, eps };
    let sectors = vec![(0, 0), (0, -1), (2, -1)];
    let b2 = FockBasis::with_sectors(TruncationSpec::new(n_max, l_max, 0), params, sectors)
        .unwrap();
    let phi1 = anyon(ins, &b2).unwrap();
    let phi2 = anyon(ins2, &b2).unwrap();
    let cc = c_poly(&b2);
    let om2 = b2.vacuum().unwrap();
    let (p2om, _) = phi2.apply(&b2, &om2);
    let (prod_om, _) = phi1.apply(&b2, &p2om);
    // LHS: C Om = 0 so [C, phi phi'] Om = C (phi phi' Om)
    let (c_prod, _) = cc.apply(&b2, &prod_om);
    let lhs: Vec<Complex64> = c_prod.iter().map(|c| (1.0 - nu * nu) / 2.0 * c).collect();
    // X = (nu/2) sum_j i r_j (m_j^2 nu^2 - 1) phi ... :rho'_{r_j} phi_j: ...
    let (m1, m2) = (1.0, -1.0 / g);
    let rho1 = rho_poly(Plus, ins.x, eps, 1, &b2);
    let (s1, _) = sandwich_apply(&rho1, &phi1, &b2, &p2om);
    let rho2 = rho_poly(Minus, ins2.x, eps, 1, &b2);
    let (s2_inner, _) = sandwich_apply(&rho2, &phi2, &b2, &om2);
    let (s2, _) = phi1.apply(&b2, &s2_inner);
    let x_vec: Vec<Complex64> = (0..b2.dim())
        .map(|i| {
            nu / 2.0
                * (I * 1.0 * (m1 * m1 * nu * nu - 1.0) * s1[i]
                    + I * (-1.0) * (m2 * m2 * nu * nu - 1.0) * s2[i])
        })
        .collect();
    let wp = pair_potential(Plus, Minus, ins.x - ins2.x, 2.0 * eps, &params, Some(n_max)).unwrap();
    let pot = m1 * m2 * nu * nu * (nu * nu - 1.0) * wp;
    let rhs: Vec<Complex64> = (0..b2.dim())
        .map(|i| -x_vec[i] + pot * prod_om[i])
        .collect();
    report.record(
        "anyon_comm.c_identity_on_vacuum",
        "((1-nu^2)/2)[C, phi phi']Om = -X Om + m m' nu^2(nu^2-1) wp(x-x';2eps) phi phi' Om",
        trunc,
        1,
        rel_residual(&lhs, &rhs),
        1e-8 * tol_scale,
        t0,
    );
}

// ---------------------------------------------------------------------------
// criterion 8: second quantization of the generalized eCS model
// ---------------------------------------------------------------------------

/// One second-quantization case: the labels of the anyon product.
fn second_quantization_case(
    report: &mut Report,
    id: &str,
    labels: &[ParticleLabel],
    params: &ModelParams,
    n_max: usize,
    l_max: usize,
    eps: f64,
    tol: f64,
) {
    second_quantization_case_opt(report, id, labels, params, n_max, l_max, eps, tol, Some(n_max))
}

#[allow(clippy::too_many_arguments)]
fn second_quantization_case_opt(
    report: &mut Report,
    id: &str,
    labels: &[ParticleLabel],
    params: &ModelParams,
    n_max: usize,
    l_max: usize,
    eps: f64,
    tol: f64,
    fn_cut: Option<usize>,
) {
    let t0 = Instant::now();
    let g = params.g();
    let ins: Vec<Insertion> = labels
        .iter()
        .map(|l| Insertion {
            r: l.r,
            nu_eff: params.nu_eff(l.m),
            x: l.x,
            eps,
        })
        .collect();
    let mut sectors = visited_sectors(&ins, params, (0, 0)).unwrap();
    sectors.push((0, 0));
    let basis =
        FockBasis::with_sectors(TruncationSpec::new(n_max, l_max, 0), *params, sectors).unwrap();
    let target = *visited_sectors(&ins, params, (0, 0)).unwrap().last().unwrap();
    let etas: Vec<usize> = basis.sector_states_up_to_level(target, 3).into_iter().take(40).collect();
    let h3 = h3_poly(params.nu(), &basis);
    let om = basis.vacuum().unwrap();
    let (h3om, _) = h3.apply(&basis, &om);

    // product applied to an arbitrary start vector
    let apply_product = |xs: &[f64], start: &[Complex64]| -> Vec<Complex64> {
        let mut v = start.to_vec();
        for (k, l) in labels.iter().enumerate().rev() {
            let op = anyon(
                Insertion { r: l.r, nu_eff: params.nu_eff(l.m), x: xs[k], eps },
                &basis,
            )
            .unwrap();
            let (w, _) = op.apply(&basis, &v);
            v = w;
        }
        v
    };
    let xs0: Vec<f64> = labels.iter().map(|l| l.x).collect();
    let v0 = apply_product(&xs0, &om);
    let (h3v, _) = h3.apply(&basis, &v0);
    let prod_h3om = apply_product(&xs0, &h3om);

    // Psi correction: sum over slots of phi ... :R phi: ... phi Omega
    let mut psi = basis.zero();
    for j in 0..labels.len() {
        let mut w = om.clone();
        for (k, l) in labels.iter().enumerate().rev() {
            let op = anyon(
                Insertion { r: l.r, nu_eff: params.nu_eff(l.m), x: xs0[k], eps },
                &basis,
            )
            .unwrap();
            if k == j {
                let corr = correction_r_poly(l.r, params.nu_eff(l.m), xs0[k], eps, &basis);
                let (s, _) = sandwich_apply(&corr, &op, &basis, &w);
                w = s;
            } else {
                let (s, _) = op.apply(&basis, &w);
                w = s;
            }
        }
        let m = l_mass(labels[j].m, g);
        for (a, b) in psi.iter_mut().zip(w.iter()) {
            *a += params.nu() * params.nu() * m * b;
        }
    }

    // eCS action on the matrix elements: FD second derivatives per coordinate
    let h = 1e-3 * params.ell;
    let potential = {
        let pls: Vec<ParticleLabel> = labels.to_vec();
        ecs_potential(&pls, g, eps, params, fn_cut).unwrap()
    };
    let ce = second_quantization_constant(labels, params, eps, fn_cut).unwrap();
    let mut worst_num = 0.0f64;
    let mut worst_den = 0.0f64;
    // stencil values per eta: f_j(k) for each coordinate j, offset k
    let mut stencils: Vec<Vec<Vec<Complex64>>> = Vec::new(); // [j][offset][eta]
    for j in 0..labels.len() {
        let mut per_offset = Vec::new();
        for off in [-2.0, -1.0, 1.0, 2.0] {
            let mut xs = xs0.clone();
            xs[j] += off * h;
            let v = apply_product(&xs, &om);
            per_offset.push(etas.iter().map(|&e| v[e]).collect::<Vec<Complex64>>());
        }
        stencils.push(per_offset);
    }
    for (ei, &e) in etas.iter().enumerate() {
        let lhs = h3v[e] - prod_h3om[e];
        let center = v0[e];
        let mut kinetic = Complex64::new(0.0, 0.0);
        for (j, l) in labels.iter().enumerate() {
            let s = &stencils[j];
            let d2 = (-s[0][ei] + 16.0 * s[1][ei] - 30.0 * center + 16.0 * s[2][ei] - s[3][ei])
                / (12.0 * h * h);
            kinetic += -0.5 / l_mass(l.m, g) * d2;
        }
        let rhs = kinetic + (potential + ce) * center + psi[e];
        worst_num = worst_num.max((lhs - rhs).norm());
        worst_den = worst_den.max(rhs.norm());
    }
    report.record(
        id,
        "<eta, [H3, phi^N] Om> = (H_eCS(x;eps) + c(eps)) <eta, phi^N Om> + <eta, Psi Om>",
        format!("n_max={n_max} l_max={l_max} eps={eps} g={g}"),
        etas.len(),
        worst_num / worst_den.max(1.0),
        tol,
        t0,
    );
}

fn l_mass(m: Mass, g: f64) -> f64 {
    m.value(g)
}

/// Calibration entry: N=2 cases at explicit (q, eps, comparison cut).
pub fn sq_case_for_calibration(
    report: &mut Report,
    q: f64,
    eps: f64,
    n_max: usize,
    l_max: usize,
    fn_cut: Option<usize>,
) {
    let params = params_with_q(q, 2, 1, 1, 0.25);
    second_quantization_case_opt(
        report,
        "sq.calib_n2_same",
        &[
            ParticleLabel { r: Plus, m: Mass::Unit, x: 0.9 },
            ParticleLabel { r: Plus, m: Mass::Unit, x: -0.6 },
        ],
        &params,
        n_max,
        l_max,
        eps,
        1e-5,
        fn_cut,
    );
    second_quantization_case_opt(
        report,
        "sq.calib_n2_mixed_type",
        &[
            ParticleLabel { r: Plus, m: Mass::Unit, x: 0.9 },
            ParticleLabel { r: Plus, m: Mass::InvG, x: -0.6 },
        ],
        &params,
        n_max,
        l_max,
        eps,
        1e-5,
        fn_cut,
    );
}

pub fn suite_second_quantization(report: &mut Report, tol_scale: f64, n_max: usize, l_max: usize) {
    let params = params_with_q(0.3, 2, 1, 1, 0.25);
    let eps = 0.25;
    let tol = 1e-5 * tol_scale;
    // N = 1: all four label combinations
    for (name, r, m) in [
        ("sq.n1_plus_unit", Plus, Mass::Unit),
        ("sq.n1_minus_unit", Minus, Mass::Unit),
        ("sq.n1_plus_inv", Plus, Mass::InvG),
        ("sq.n1_minus_inv", Minus, Mass::InvG),
    ] {
        second_quantization_case(
            report,
            name,
            &[ParticleLabel { r, m, x: 0.35 }],
            &params,
            n_max,
            l_max,
            eps,
            tol,
        );
    }
    // N = 2: same species, mixed chirality, mixed type
    second_quantization_case(
        report,
        "sq.n2_same_species",
        &[
            ParticleLabel { r: Plus, m: Mass::Unit, x: 0.9 },
            ParticleLabel { r: Plus, m: Mass::Unit, x: -0.6 },
        ],
        &params,
        n_max,
        l_max,
        eps,
        tol,
    );
    second_quantization_case(
        report,
        "sq.n2_mixed_chirality",
        &[
            ParticleLabel { r: Plus, m: Mass::Unit, x: 0.9 },
            ParticleLabel { r: Minus, m: Mass::Unit, x: -0.6 },
        ],
        &params,
        n_max,
        l_max,
        eps,
        tol,
    );
    second_quantization_case(
        report,
        "sq.n2_mixed_type",
        &[
            ParticleLabel { r: Plus, m: Mass::Unit, x: 0.9 },
            ParticleLabel { r: Plus, m: Mass::InvG, x: -0.6 },
        ],
        &params,
        n_max,
        l_max,
        eps,
        tol,
    );

    // Psi shrinks with eps (N = 1 correction operator applied to the vacuum)
    let t0 = Instant::now();
    let sectors = vec![(0, 0), (2, 0)];
    let basis =
        FockBasis::with_sectors(TruncationSpec::new(n_max, l_max, 0), params, sectors).unwrap();
    let om = basis.vacuum().unwrap();
    let mut norms = Vec::new();
    for e in [0.4, 0.2, 0.1, 0.05, 0.025] {
        let op = anyon(Insertion { r: Plus, nu_eff: params.nu(), x: 0.35, eps: e }, &basis).unwrap();
        let corr = correction_r_poly(Plus, params.nu(), 0.35, e, &basis);
        let (psi, _) = sandwich_apply(&corr, &op, &basis, &om);
        norms.push(norm(&psi));
    }
    let monotone = norms.windows(2).all(|w| w[1] < w[0]);
    let slope = (norms[3] / norms[4]).ln() / 2f64.ln();
    report.record(
        "sq.psi_decay",
        "||Psi Omega|| shrinks monotonically on eps in {0.4,0.2,0.1}, approaching linear decay",
        format!("norms {norms:?}, asymptotic slope {slope:.2}"),
        norms.len(),
        if monotone && slope > 0.8 { 0.0 } else { 1.0 },
        0.5,
        t0,
    );
}

// ---------------------------------------------------------------------------
// specfun dual-path checks (supporting suite)
// ---------------------------------------------------------------------------

pub fn suite_specfun(report: &mut Report, tol_scale: f64) {
    let params = params_with_q(0.5, 2, 1, 1, 0.25);
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for x in [-2.3, -0.8, 0.4, 1.7, 2.9] {
        for eps in [0.1, 0.4] {
            theta_checked(ThetaKind::One, x, &params, eps, 1e-11).unwrap();
            theta_checked(ThetaKind::Four, x, &params, eps, 1e-11).unwrap();
            zeta1_checked(Complex64::new(x, 0.0), &params, 1e-11).unwrap();
            wp1_checked(x, eps, false, &params, 1e-11).unwrap();
            wp1_checked(x, eps, true, &params, 1e-11).unwrap();
        }
        // Delta sum rule and the theta shift relation
        let dp = delta_cap_pm(true, x, 0.3, &params).unwrap();
        let dm = delta_cap_pm(false, x, 0.3, &params).unwrap();
        let d = dirac_reg(x, 0.3, &params).unwrap();
        worst = worst.max((dp + dm - 2.0 * std::f64::consts::PI * d).norm());
        let kappa = params.kappa();
        let q = params.q();
        let lhs = specfun::theta_reg(
            ThetaKind::One,
            kappa * Complex64::new(x, params.delta),
            q,
            0.25,
        )
        .unwrap()
        .value;
        let rhs = q.powf(-0.5)
            * (-I * kappa * x).exp()
            * specfun::theta_reg(ThetaKind::Four, Complex64::new(kappa * x, 0.0), q, 0.25)
                .unwrap()
                .value;
        worst = worst.max((lhs - rhs).norm());
    }
    report.record(
        "specfun.dual_paths",
        "product/series/lattice paths agree; Delta_+ + Delta_- = 2 pi delta; theta shift relation",
        "q=0.5, grid of 5 x-points".to_string(),
        5,
        worst,
        1e-12 * tol_scale,
        t0,
    );
}

// ---------------------------------------------------------------------------
// adjoint/unitarity supporting suite
// ---------------------------------------------------------------------------

pub fn suite_anyon_unitarity(report: &mut Report, tol_scale: f64) {
    let params = params_with_q(0.5, 2, 1, 1, 0.25);
    let basis = FockBasis::build(TruncationSpec::new(10, 18, 2), params).unwrap();
    let t0 = Instant::now();
    let ins = Insertion { r: Plus, nu_eff: params.nu(), x: -0.4, eps: 1.4 };
    let desc = anyon_descriptor(ins, basis.spec.n_max, &params).unwrap();
    let c = crate::vertex::j_commutator(&desc, &desc, &params, basis.spec.n_max).exp();
    let op = anyon(ins, &basis).unwrap();
    let opd = anyon(Insertion { nu_eff: -ins.nu_eff, ..ins }, &basis).unwrap();
    let mut worst = 0.0f64;
    for seed in [81, 82] {
        let v = seeded_probe(&basis, (0, 0), 2, seed);
        let (pv, _) = op.apply(&basis, &v);
        let (ppv, _) = opd.apply(&basis, &pv);
        let diff: f64 = ppv
            .iter()
            .zip(v.iter())
            .map(|(x, y)| (x - c * y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(diff / c.norm());
    }
    report.record(
        "vertex.anyon_unitarity",
        "phi^dag phi = e^{[J^-(alpha), J^+(alpha)]} I (proportional to a unitary)",
        "n_max=10 l_max=18 eps=1.4".to_string(),
        basis.sector_states_up_to_level((0, 0), 2).len(),
        worst,
        1e-8 * tol_scale,
        t0,
    );
}

// ---------------------------------------------------------------------------
// driver
// ---------------------------------------------------------------------------

/// Run every suite at desk scale (config-driven truncations where they are
/// not pinned by an acceptance criterion). `only` filters by id substring.
pub fn run_all(cfg: &Config, only: Option<&str>) -> Report {
    let mut full = Report::new(cfg.seed);
    let ts = cfg.tolerance_scale;
    let sections: Vec<(Vec<&str>, Box<dyn Fn(&mut Report)>)> = vec![
        (vec!["specfun"], Box::new(move |r: &mut Report| suite_specfun(r, ts))),
        (vec!["transforms"], Box::new(move |r: &mut Report| suite_transforms(r, ts))),
        (vec!["algebra"], Box::new(move |r: &mut Report| suite_algebra(r, ts))),
        (vec!["vertex"], Box::new(move |r: &mut Report| {
            suite_vertex(r, ts, 12, 18, 7);
            suite_anyon_unitarity(r, ts);
        })),
        (vec!["correlator"], Box::new(move |r: &mut Report| suite_correlators(r, ts, 14, 20))),
        (vec!["exchange"], Box::new(move |r: &mut Report| suite_exchange(r, ts))),
        (vec!["boson_rep"], Box::new(move |r: &mut Report| suite_boson_reps(r, ts))),
        (vec!["heisenberg"], Box::new(move |r: &mut Report| suite_heisenberg(r, ts))),
        (vec!["anyon_comm"], Box::new(move |r: &mut Report| suite_anyon_commutators(r, ts))),
        (vec!["sq"], Box::new(move |r: &mut Report| suite_second_quantization(r, ts, 10, 10))),
        (vec!["vacuum"], Box::new(move |r: &mut Report| suite_vacuum_identity(r, ts, 7))),
        (vec!["constants"], Box::new(move |r: &mut Report| suite_constants(r, ts))),
        (vec!["pde"], Box::new(move |r: &mut Report| suite_pde(r, ts))),
        (vec!["bosonization"], Box::new(move |r: &mut Report| suite_bosonization(r, ts))),
        (
            vec!["substitution", "pointsplit"],
            Box::new(move |r: &mut Report| suite_substitution_pointsplit(r, ts)),
        ),
    ];
    for (prefixes, f) in sections {
        if let Some(filter) = only {
            let relevant = prefixes
                .iter()
                .any(|p| p.contains(filter) || filter.contains(p));
            if !relevant {
                continue;
            }
        }
        let mut section_report = Report::new(cfg.seed);
        f(&mut section_report);
        for r in section_report.results {
            if Report::matches(&r.id, only) {
                full.results.push(r);
            }
        }
    }
    full
}
