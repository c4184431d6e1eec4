//! Second-quantized operators `W_{k,r}`, `C`, `H_2`, `H_{3,nu}`, the
//! correction operator `R_{r,nu}(x;eps)`, chiral bosons, and the
//! first-quantized eCS differential operators they second-quantize.
//!
//! All mode sums share one index convention: with `b~_{r,0} = Q_r` and
//! `b~_{r,n} = b_{r,n}` otherwise,
//!
//! ```text
//! W_{k,r} = (2 kappa)^{k-1} / k * sum_{n_1+...+n_k = 0, |n_i| <= n_max, |partial sums bounded|}
//!           :b~_{r,n_1} ... b~_{r,n_k}:
//! C       = (2 kappa)^2 sum_{n=1..n_max} sum_r n a_{r,-n} a_{r,n}
//! rho_r(x;eps) = sum_{|n| <= n_max} 2 kappa e^{2 kappa (i r n x - |n| eps)} b~_{r,n}
//! ```
//!
//! The cubic sum of `W_3` runs over `{(n,m): |n|,|m|,|n+m| <= n_max}`; the
//! regularized product `:rho_r o rho_{r,x}:` in the quantum equation of
//! motion uses the *same* index set, which is what makes the Heisenberg
//! identity close exactly on the truncated space.

use crate::fock::{normal_ordered_b_product, FockBasis, Gen, ModePoly};
use crate::params::{c_eps, s_sq, Mass, ModelParams, ParamError};
use crate::specfun::{self, wp1_complex, wp1_series, SpecFunError, I};
use crate::transforms::{multiplier_t, multiplier_tt};
use crate::vertex::VertexOp;
use crate::Chirality;
use num_complex::Complex64;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HamError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("particle positions {0} and {1} coincide with eps = 0")]
    CoincidentPoints(f64, f64),
}

/// `W_{1,r} = Q_r = nu0 a_{r,0}`.
pub fn w1_poly(r: Chirality, basis: &FockBasis) -> ModePoly {
    let mut p = ModePoly::new();
    p.push(
        Complex64::new(basis.params.nu0(), 0.0),
        vec![Gen::A { r, n: 0 }],
    );
    p
}

/// `W_{2,r} = 2 kappa ( (1/2) sum_{n != 0} :b_{r,-n} b_{r,n}: + (1/2) Q_r^2 )`.
pub fn w2_poly(r: Chirality, basis: &FockBasis) -> ModePoly {
    let params = &basis.params;
    let kappa = params.kappa();
    let n_max = basis.spec.n_max as i64;
    let mut out = ModePoly::new();
    let nu0 = params.nu0();
    for n in -n_max..=n_max {
        // b~_{r,0} = Q_r = nu0 a_{r,0}
        let scale = Complex64::new(kappa, 0.0)
            * if n == 0 { nu0 * nu0 } else { 1.0 };
        out.add(&normal_ordered_b_product(scale, &[(r, -n), (r, n)], params));
    }
    out
}

/// `W_{3,r}` as the symmetric triple sum over
/// `{(n, m): |n|, |m|, |n+m| <= n_max}` of `:b~_{r,-n} b~_{r,-m} b~_{r,n+m}:`
/// times `(2 kappa)^2 / 3`; the terms with zero indices reproduce the
/// `Q_r sum :b b:` and `Q_r^3 / 3` pieces.
pub fn w3_poly(r: Chirality, basis: &FockBasis) -> ModePoly {
    let params = &basis.params;
    let kappa = params.kappa();
    let n_max = basis.spec.n_max as i64;
    let nu0 = params.nu0();
    let mut out = ModePoly::new();
    for n in -n_max..=n_max {
        for m in -n_max..=n_max {
            if (n + m).abs() > n_max {
                continue;
            }
            let mut scale = (2.0 * kappa) * (2.0 * kappa) / 3.0;
            for idx in [n, m, n + m] {
                if idx == 0 {
                    scale *= nu0;
                }
            }
            out.add(&normal_ordered_b_product(
                Complex64::new(scale, 0.0),
                &[(r, -n), (r, -m), (r, n + m)],
                params,
            ));
        }
    }
    out
}

/// `C = (2 kappa)^2 sum_{n=1..n_max} sum_r n a_{r,-n} a_{r,n}` (diagonal,
/// positive).
pub fn c_poly(basis: &FockBasis) -> ModePoly {
    let kappa = basis.params.kappa();
    let mut out = ModePoly::new();
    for r in Chirality::BOTH {
        for n in 1..=basis.spec.n_max as i64 {
            out.push(
                Complex64::new((2.0 * kappa) * (2.0 * kappa) * n as f64, 0.0),
                vec![Gen::A { r, n: -n }, Gen::A { r, n }],
            );
        }
    }
    out
}

/// `H_2 = sum_r W_{2,r}`.
pub fn h2_poly(basis: &FockBasis) -> ModePoly {
    let mut out = w2_poly(Chirality::Plus, basis);
    out.add(&w2_poly(Chirality::Minus, basis));
    out
}

/// `H_{3,nu} = (1/2) (nu sum_r W_{3,r} + (1 - nu^2) C)`.
pub fn h3_poly(nu: f64, basis: &FockBasis) -> ModePoly {
    let mut out = ModePoly::new();
    for r in Chirality::BOTH {
        out.add(&w3_poly(r, basis).scaled(Complex64::new(nu / 2.0, 0.0)));
    }
    out.add(&c_poly(basis).scaled(Complex64::new((1.0 - nu * nu) / 2.0, 0.0)));
    out
}

/// The regularized chiral boson `rho_r(x;eps)` or its `deriv`-th
/// x-derivative, as a linear mode polynomial.
pub fn rho_poly(r: Chirality, x: f64, eps: f64, deriv: u32, basis: &FockBasis) -> ModePoly {
    let params = &basis.params;
    let kappa = params.kappa();
    let n_max = basis.spec.n_max as i64;
    let nu0 = params.nu0();
    let mut out = ModePoly::new();
    for n in -n_max..=n_max {
        let base = 2.0 * kappa
            * (2.0 * kappa * (I * r.sign() * n as f64 * x - n.abs() as f64 * eps)).exp();
        let dfac = (2.0 * kappa * I * r.sign() * n as f64).powu(deriv);
        let coeff = base * dfac * if n == 0 { nu0 } else { 1.0 };
        if n == 0 && deriv > 0 {
            continue;
        }
        for (c, g) in crate::fock::b_mode(r, n, params) {
            out.push(coeff * c, vec![g]);
        }
    }
    out
}

/// `(T d^j rho_r / dx^j)(x;eps)` (or `T~` with `tilde = true`) from the mode
/// formulas: mode `n` of `rho_r` is multiplied by the transform multiplier at
/// the *spatial* frequency `r n` and by `(2 i kappa r n)^j`. `j >= 1` so the
/// mean mode never contributes.
pub fn t_rho_poly(
    r: Chirality,
    x: f64,
    eps: f64,
    deriv: u32,
    tilde: bool,
    basis: &FockBasis,
) -> ModePoly {
    assert!(deriv >= 1, "T/T~ are only applied to derivatives here");
    let params = &basis.params;
    let kappa = params.kappa();
    let n_max = basis.spec.n_max as i64;
    let mut out = ModePoly::new();
    for n in (-n_max..=n_max).filter(|&n| n != 0) {
        let spatial = r.sign() * n as f64; // frequency of e^{2 i kappa (r n) x}
        let mult = if tilde {
            multiplier_tt(spatial as i64, params)
        } else {
            multiplier_t(spatial as i64, params)
        };
        let base = 2.0 * kappa
            * (2.0 * kappa * (I * spatial * x - n.abs() as f64 * eps)).exp();
        let dfac = (2.0 * kappa * I * spatial).powu(deriv);
        let coeff = base * dfac * mult;
        for (c, g) in crate::fock::b_mode(r, n, params) {
            out.push(coeff * c, vec![g]);
        }
    }
    out
}

/// The regularized product `:(rho_r o rho_{r,x})(x;eps):` with the same
/// index set as `W_3`: sum over `|n|, |m| <= n_max`, `|n+m| <= n_max` of
/// `(2k)^2 (2 i kappa r m) e^{2 i kappa r (n+m) x} e^{-2 kappa |n+m| eps}
///  :b~_{r,n} b~_{r,m}:`.
pub fn circ_rho_rhox_poly(r: Chirality, x: f64, eps: f64, basis: &FockBasis) -> ModePoly {
    let params = &basis.params;
    let kappa = params.kappa();
    let n_max = basis.spec.n_max as i64;
    let nu0 = params.nu0();
    let mut out = ModePoly::new();
    for n in -n_max..=n_max {
        for m in -n_max..=n_max {
            if (n + m).abs() > n_max || m == 0 {
                continue;
            }
            let mut coeff = (2.0 * kappa)
                * (2.0 * kappa)
                * (2.0 * kappa * I * r.sign() * m as f64)
                * (2.0 * kappa * I * r.sign() * (n + m) as f64 * x).exp()
                * (-2.0 * kappa * (n + m).abs() as f64 * eps).exp();
            if n == 0 {
                coeff *= nu0;
            }
            out.add(&normal_ordered_b_product(coeff, &[(r, n), (r, m)], params));
        }
    }
    out
}

/// The correction operator `R_{r,nu}(x;eps)`:
///
/// ```text
/// (2k)^2 sum_{n,m=1..n_max} [ nu s_n^2 (e^{2 i k m r x} b_{r,m} - e^{-2 i k m r x} b_{r,-m}) e^{-2 k n eps}
///                             - e^{-2 i k (n-m) r x} :b_{r,-n} b_{r,m}: ]
///                           * (e^{-2 k (n+m) eps} - e^{-2 k |n-m| eps})
/// ```
///
/// Every coefficient carries the vanishing factor, so `R -> 0` termwise as
/// `eps -> 0+`; at `q = 0` only the `:b b:` part survives.
pub fn correction_r_poly(
    r: Chirality,
    nu_eff: f64,
    x: f64,
    eps: f64,
    basis: &FockBasis,
) -> ModePoly {
    let params = &basis.params;
    let kappa = params.kappa();
    let q = params.q();
    let n_max = basis.spec.n_max as i64;
    let four_k2 = (2.0 * kappa) * (2.0 * kappa);
    let mut out = ModePoly::new();
    // linear part: collapse the n-sum
    for m in 1..=n_max {
        let mut sigma = 0.0;
        for n in 1..=n_max {
            sigma += s_sq(n, q)
                * (-2.0 * kappa * n as f64 * eps).exp()
                * ((-2.0 * kappa * (n + m) as f64 * eps).exp()
                    - (-2.0 * kappa * (n - m).abs() as f64 * eps).exp());
        }
        let phase = (2.0 * kappa * I * m as f64 * r.sign() * x).exp();
        for (c, g) in crate::fock::b_mode(r, m, params) {
            out.push(four_k2 * nu_eff * sigma * phase * c, vec![g]);
        }
        for (c, g) in crate::fock::b_mode(r, -m, params) {
            out.push(-four_k2 * nu_eff * sigma * phase.conj() * c, vec![g]);
        }
    }
    // quadratic part
    for n in 1..=n_max {
        for m in 1..=n_max {
            let damp = (-2.0 * kappa * (n + m) as f64 * eps).exp()
                - (-2.0 * kappa * (n - m).abs() as f64 * eps).exp();
            if damp == 0.0 {
                continue;
            }
            let phase = (-2.0 * kappa * I * (n - m) as f64 * r.sign() * x).exp();
            out.add(&normal_ordered_b_product(
                -four_k2 * phase * damp,
                &[(r, -n), (r, m)],
                params,
            ));
        }
    }
    out
}

/// Apply the normal-ordered product `:P Phi: v`, where `P` is a mode
/// polynomial (no Klein factors) and `Phi` a vertex operator: each monomial
/// of `P` is split as creation parts to the left of `Phi`, annihilation
/// parts to the right, zero modes by the symmetric binomial rule. Monomials
/// sharing an annihilation side reuse one vertex application.
pub fn sandwich_apply(
    poly: &ModePoly,
    op: &VertexOp,
    basis: &FockBasis,
    v: &[Complex64],
) -> (Vec<Complex64>, f64) {
    // split monomials into (coeff, c_side, a_side) with zero-mode expansion
    type Side = Vec<(Chirality, i64)>;
    let mut groups: HashMap<Vec<(usize, i64)>, Vec<(Complex64, Side)>> = HashMap::new();
    let binom = |k: usize, j: usize| -> f64 {
        let mut b = 1.0;
        for i in 0..j {
            b = b * (k - i) as f64 / (i + 1) as f64;
        }
        b
    };
    for mono in &poly.terms {
        let mut creations: Side = Vec::new();
        let mut annihilations: Side = Vec::new();
        let mut zeros = [0usize; 2];
        for g in &mono.gens {
            match *g {
                Gen::A { r, n } if n < 0 => creations.push((r, n)),
                Gen::A { r, n } if n > 0 => annihilations.push((r, n)),
                Gen::A { r, .. } => zeros[r.idx()] += 1,
                Gen::R { .. } => panic!("sandwich_apply requires a Klein-free polynomial"),
            }
        }
        for jp in 0..=zeros[0] {
            for jm in 0..=zeros[1] {
                let w = binom(zeros[0], jp) * binom(zeros[1], jm)
                    / 2f64.powi((zeros[0] + zeros[1]) as i32);
                let mut c_side = creations.clone();
                for _ in 0..jp {
                    c_side.push((Chirality::Plus, 0));
                }
                for _ in 0..jm {
                    c_side.push((Chirality::Minus, 0));
                }
                let mut a_side = annihilations.clone();
                for _ in 0..(zeros[0] - jp) {
                    a_side.push((Chirality::Plus, 0));
                }
                for _ in 0..(zeros[1] - jm) {
                    a_side.push((Chirality::Minus, 0));
                }
                let key: Vec<(usize, i64)> = a_side.iter().map(|&(r, n)| (r.idx(), n)).collect();
                groups
                    .entry(key)
                    .or_default()
                    .push((mono.coeff * w, c_side));
            }
        }
    }
    let mut keys: Vec<&Vec<(usize, i64)>> = groups.keys().collect();
    keys.sort();
    let mut acc = basis.zero();
    let mut dropped = 0.0;
    for key in keys {
        // a-side applied right-to-left (ordering within commuting annihilators
        // and diagonal zero modes is immaterial)
        let mut u = v.to_vec();
        for &(ri, n) in key.iter().rev() {
            let r = if ri == 0 { Chirality::Plus } else { Chirality::Minus };
            let mut next = basis.zero();
            dropped += basis.apply_a_into(r, n, Complex64::new(1.0, 0.0), &u, &mut next);
            u = next;
        }
        let (w, d) = op.apply(basis, &u);
        dropped += d;
        for (coeff, c_side) in &groups[key] {
            let mut y = w.clone();
            for &(r, n) in c_side.iter().rev() {
                let mut next = basis.zero();
                dropped += basis.apply_a_into(r, n, Complex64::new(1.0, 0.0), &y, &mut next);
                y = next;
            }
            for (a, s) in acc.iter_mut().zip(y.iter()) {
                *a += coeff * s;
            }
        }
    }
    (acc, dropped)
}

/// Quadrature reconstruction of `W_{k,r}` from
/// `(1/(2 pi k)) int :rho_r(x;0)^k: dx` by the uniform trapezoid rule with
/// `n_points` nodes (exact once `n_points > k * n_max`). The x-integral is
/// carried out numerically on the scalar mode weights.
pub fn w_from_quadrature(
    k: usize,
    r: Chirality,
    basis: &FockBasis,
    n_points: usize,
) -> ModePoly {
    let params = &basis.params;
    let kappa = params.kappa();
    let ell = params.ell;
    let n_max = basis.spec.n_max as i64;
    let nu0 = params.nu0();
    let h = 2.0 * ell / n_points as f64;
    // numeric trapezoid of e^{2 i kappa s x} over the period, for each total s
    let quad_weight = |s: i64| -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..n_points {
            let x = -ell + j as f64 * h;
            sum += (2.0 * kappa * I * s as f64 * x).exp();
        }
        sum * h
    };
    let mut cache: HashMap<i64, Complex64> = HashMap::new();
    let weight = |s: i64, cache: &mut HashMap<i64, Complex64>| -> Complex64 {
        *cache.entry(s).or_insert_with(|| quad_weight(s))
    };
    let norm = 1.0 / (2.0 * std::f64::consts::PI * k as f64);
    let mut out = ModePoly::new();
    let mut tuple = vec![0i64; k];
    // iterate over all k-tuples with |n_i| <= n_max
    fn rec(
        pos: usize,
        tuple: &mut Vec<i64>,
        n_max: i64,
        r: Chirality,
        nu0: f64,
        norm: f64,
        basis: &FockBasis,
        weight: &mut dyn FnMut(i64) -> Complex64,
        out: &mut ModePoly,
    ) {
        if pos == tuple.len() {
            let s: i64 = tuple.iter().sum::<i64>() * (r.sign() as i64);
            let w = weight(s);
            if w.norm() < 1e-13 {
                return;
            }
            let mut coeff = w * norm * (2.0 * basis.params.kappa()).powi(tuple.len() as i32);
            for &n in tuple.iter() {
                if n == 0 {
                    coeff *= nu0;
                }
            }
            let modes: Vec<(Chirality, i64)> = tuple.iter().map(|&n| (r, n)).collect();
            out.add(&normal_ordered_b_product(coeff, &modes, &basis.params));
            return;
        }
        for n in -n_max..=n_max {
            tuple[pos] = n;
            rec(pos + 1, tuple, n_max, r, nu0, norm, basis, weight, out);
        }
    }
    rec(
        0,
        &mut tuple,
        n_max,
        r,
        nu0,
        norm,
        basis,
        &mut |s| weight(s, &mut cache),
        &mut out,
    );
    out
}

/// Quadrature reconstruction of `C` from
/// `-(1/4 pi) int sum_r :rho_r (T rho_{r,x}) + rho_{-r} (T~ rho_{r,x}): dx`,
/// with the transforms applied mode-wise through their multipliers.
pub fn c_from_quadrature(basis: &FockBasis, n_points: usize) -> ModePoly {
    let params = &basis.params;
    let kappa = params.kappa();
    let ell = params.ell;
    let n_max = basis.spec.n_max as i64;
    let nu0 = params.nu0();
    let h = 2.0 * ell / n_points as f64;
    let mut cache: HashMap<i64, Complex64> = HashMap::new();
    let mut weight = |s: i64| -> Complex64 {
        *cache.entry(s).or_insert_with(|| {
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n_points {
                let x = -ell + j as f64 * h;
                sum += (2.0 * kappa * I * s as f64 * x).exp();
            }
            sum * h
        })
    };
    let norm = -1.0 / (4.0 * std::f64::consts::PI);
    let mut out = ModePoly::new();
    for r in Chirality::BOTH {
        // :rho_r (T rho_{r,x}): term
        for n in -n_max..=n_max {
            for m in (-n_max..=n_max).filter(|&m| m != 0) {
                let s_rho = r.sign() as i64 * n; // spatial mode of rho_r factor
                let s_t = r.sign() as i64 * m;
                let w = weight(s_rho + s_t);
                if w.norm() < 1e-13 {
                    continue;
                }
                let mult = multiplier_t(s_t, params);
                let mut coeff = w
                    * norm
                    * (2.0 * kappa)
                    * (2.0 * kappa)
                    * (2.0 * kappa * I * s_t as f64)
                    * mult;
                if n == 0 {
                    coeff *= nu0;
                }
                out.add(&normal_ordered_b_product(coeff, &[(r, n), (r, m)], params));
            }
        }
        // :rho_{-r} (T~ rho_{r,x}): term
        for n in -n_max..=n_max {
            for m in (-n_max..=n_max).filter(|&m| m != 0) {
                let s_rho = (r.flip().sign()) as i64 * n;
                let s_t = r.sign() as i64 * m;
                let w = weight(s_rho + s_t);
                if w.norm() < 1e-13 {
                    continue;
                }
                let mult = multiplier_tt(s_t, params);
                let mut coeff = w
                    * norm
                    * (2.0 * kappa)
                    * (2.0 * kappa)
                    * (2.0 * kappa * I * s_t as f64)
                    * mult;
                if n == 0 {
                    coeff *= nu0;
                }
                out.add(&normal_ordered_b_product(
                    coeff,
                    &[(r.flip(), n), (r, m)],
                    params,
                ));
            }
        }
    }
    out
}

/// One first-quantized particle: chirality, type, position.
#[derive(Clone, Copy, Debug)]
pub struct ParticleLabel {
    pub r: Chirality,
    pub m: Mass,
    pub x: f64,
}

/// The pair potential `wp_{r,r'}(x; eps)`: same-chirality `wp1(x;eps)`,
/// opposite-chirality `wp1(x + i delta; eps)`. With `mode_cut = Some(n_max)`
/// the mode-truncated series is used (the form against which the truncated
/// Fock identities close); `None` gives the full function, and `eps = 0`
/// falls back to the unregularized evaluation at (possibly complex) argument.
pub fn pair_potential(
    r1: Chirality,
    r2: Chirality,
    dx: f64,
    eps: f64,
    params: &ModelParams,
    mode_cut: Option<usize>,
) -> Result<Complex64, HamError> {
    let shifted = r1 != r2;
    if eps == 0.0 && mode_cut.is_none() {
        let z = if shifted {
            Complex64::new(dx, params.delta)
        } else {
            Complex64::new(dx, 0.0)
        };
        return Ok(wp1_complex(z, params)?);
    }
    Ok(wp1_series(dx, eps, shifted, params, mode_cut)?.value)
}

/// Full interaction potential `sum_{j<k} m_j m_k g (g-1) wp_{r_j,r_k}(x_j - x_k; 2 eps)`.
pub fn ecs_potential(
    labels: &[ParticleLabel],
    g: f64,
    eps: f64,
    params: &ModelParams,
    mode_cut: Option<usize>,
) -> Result<Complex64, HamError> {
    let mut v = Complex64::new(0.0, 0.0);
    for j in 0..labels.len() {
        for k in (j + 1)..labels.len() {
            let (a, b) = (labels[j], labels[k]);
            if eps == 0.0 && a.r == b.r && (a.x - b.x).abs() < 1e-12 {
                return Err(HamError::CoincidentPoints(a.x, b.x));
            }
            let w = pair_potential(a.r, b.r, a.x - b.x, 2.0 * eps, params, mode_cut)?;
            v += a.m.value(g) * b.m.value(g) * g * (g - 1.0) * w;
        }
    }
    Ok(v)
}

/// Apply the generalized eCS Schroedinger operator
/// `H = -sum_j (1/(2 m_j)) d^2/dx_j^2 + potential` to a sampled function,
/// second derivatives by 5-point central differences with step `h`.
pub fn ecs_apply(
    labels: &[ParticleLabel],
    g: f64,
    eps: f64,
    f: &dyn Fn(&[f64]) -> Complex64,
    params: &ModelParams,
    h: f64,
    mode_cut: Option<usize>,
) -> Result<Complex64, HamError> {
    let xs: Vec<f64> = labels.iter().map(|l| l.x).collect();
    let mut out = Complex64::new(0.0, 0.0);
    for (j, label) in labels.iter().enumerate() {
        let fj = |t: f64| {
            let mut pt = xs.clone();
            pt[j] = t;
            f(&pt)
        };
        let d2 = specfun::fd2(fj, xs[j], h);
        out += -0.5 / label.m.value(g) * d2;
    }
    out += ecs_potential(labels, g, eps, params, mode_cut)? * f(&xs);
    Ok(out)
}

/// Residual of the analytic-continuation identity: the deformed two-type
/// potential with one variable group shifted by `i delta` against the
/// four-type potential with explicit chirality labels, evaluated at real
/// sample points. Returns the max absolute difference.
pub fn substitution_check(
    xs: &[f64],
    xts: &[f64],
    ys: &[f64],
    yts: &[f64],
    g: f64,
    params: &ModelParams,
) -> Result<f64, HamError> {
    // shifted plain-chirality evaluation
    let mut pts: Vec<(Complex64, f64)> = Vec::new(); // (position, m)
    for &x in xs {
        pts.push((Complex64::new(x, 0.0), 1.0));
    }
    for &x in xts {
        pts.push((Complex64::new(x, 0.0), -1.0 / g));
    }
    for &y in ys {
        pts.push((Complex64::new(y, params.delta), 1.0));
    }
    for &y in yts {
        pts.push((Complex64::new(y, params.delta), -1.0 / g));
    }
    let mut lhs = Complex64::new(0.0, 0.0);
    for j in 0..pts.len() {
        for k in (j + 1)..pts.len() {
            let d = pts[j].0 - pts[k].0;
            // reduce Im to {0, +delta}: wp1 is even
            let z = if d.im.abs() < 1e-14 {
                Complex64::new(d.re, 0.0)
            } else {
                Complex64::new(d.re * d.im.signum(), d.im.abs())
            };
            lhs += pts[j].1 * pts[k].1 * g * (g - 1.0) * wp1_complex(z, params)?;
        }
    }
    // labeled evaluation
    let mut labels: Vec<ParticleLabel> = Vec::new();
    for &x in xs {
        labels.push(ParticleLabel { r: Chirality::Plus, m: Mass::Unit, x });
    }
    for &x in xts {
        labels.push(ParticleLabel { r: Chirality::Plus, m: Mass::InvG, x });
    }
    for &y in ys {
        labels.push(ParticleLabel { r: Chirality::Minus, m: Mass::Unit, x: y });
    }
    for &y in yts {
        labels.push(ParticleLabel { r: Chirality::Minus, m: Mass::InvG, x: y });
    }
    let rhs = ecs_potential(&labels, g, 0.0, params, None)?;
    Ok((lhs - rhs).norm())
}

/// The scalar `c^{(m)}_{N;nu}(eps) = (nu/2) sum_j (nu m_j)^3 c_eps`.
pub fn second_quantization_constant(
    labels: &[ParticleLabel],
    params: &ModelParams,
    eps: f64,
    mode_cut: Option<usize>,
) -> Result<f64, HamError> {
    let nu = params.nu();
    let g = params.g();
    let ce = c_eps(params, eps, mode_cut)?;
    let sum: f64 = labels.iter().map(|l| (nu * l.m.value(g)).powi(3)).sum();
    Ok(0.5 * nu * sum * ce)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{inner, norm, FockBasis, TruncationSpec};
    use crate::vertex::{anyon, Insertion};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use Chirality::{Minus, Plus};

    fn params_q(q: f64) -> ModelParams {
        let delta = if q == 0.0 { 745.0 } else { -q.ln() };
        ModelParams::new(std::f64::consts::PI, delta, 2, 1, 1, 0.25).unwrap()
    }

    fn basis(q: f64, n_max: usize, l_max: usize, mu_max: i32) -> FockBasis {
        FockBasis::build(TruncationSpec::new(n_max, l_max, mu_max), params_q(q)).unwrap()
    }

    fn probe(b: &FockBasis, max_level: usize, seed: u64) -> Vec<Complex64> {
        let idx = b.states_up_to_level(max_level);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = b.zero();
        for &i in &idx {
            v[i] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let n = norm(&v);
        v.iter_mut().for_each(|c| *c /= n);
        v
    }

    #[test]
    fn w_operators_annihilate_vacuum_at_q_zero() {
        let b = basis(0.0, 4, 6, 1);
        let om = b.vacuum().unwrap();
        for r in [Plus, Minus] {
            let (v2, _) = w2_poly(r, &b).apply(&b, &om);
            assert!(norm(&v2) < 1e-14);
            let (v3, _) = w3_poly(r, &b).apply(&b, &om);
            assert!(norm(&v3) < 1e-14);
        }
        let (vc, _) = c_poly(&b).apply(&b, &om);
        assert!(norm(&vc) < 1e-14);
    }

    #[test]
    fn c_is_positive_diagonal() {
        let b = basis(0.5, 3, 5, 1);
        let c = c_poly(&b);
        for i in 0..b.dim().min(200) {
            let mut e = b.zero();
            e[i] = Complex64::new(1.0, 0.0);
            let (v, _) = c.apply(&b, &e);
            // diagonal
            for (k, val) in v.iter().enumerate() {
                if k != i {
                    assert!(val.norm() < 1e-14);
                }
            }
            assert!(v[i].re >= -1e-14 && v[i].im.abs() < 1e-14);
        }
    }

    #[test]
    fn h3_nu_symmetry() {
        // H_{3,nu} + nu^2 H_{3,-1/nu} = 0 exactly as matrices
        let b = basis(0.5, 3, 5, 1);
        let nu = b.params.nu();
        let h3 = h3_poly(nu, &b);
        let h3inv = h3_poly(-1.0 / nu, &b);
        let v = probe(&b, 3, 5);
        let (a, _) = h3.apply(&b, &v);
        let (c, _) = h3inv.apply(&b, &v);
        let resid: f64 = a
            .iter()
            .zip(c.iter())
            .map(|(x, y)| (x + nu * nu * y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(resid / norm(&a).max(1.0) < 1e-12, "residual {resid}");
    }

    #[test]
    fn hermiticity_and_charge_conservation() {
        let b = basis(0.5, 3, 6, 1);
        let h3 = h3_poly(b.params.nu(), &b);
        // Hermiticity on the protected window: <u, H v> = <H u, v>
        let u = probe(&b, 2, 11);
        let v = probe(&b, 2, 12);
        let (hu, _) = h3.apply(&b, &u);
        let (hv, _) = h3.apply(&b, &v);
        let lhs = inner(&u, &hv);
        let rhs = inner(&hu, &v);
        assert!((lhs - rhs).norm() < 1e-11 * lhs.norm().max(1.0));
        // [H3, Q_r] = 0: H3 never changes sector
        let mut e = b.zero();
        let idx = b.sector_states_up_to_level((1, -1), 2)[1];
        e[idx] = Complex64::new(1.0, 0.0);
        let (he, _) = h3.apply(&b, &e);
        for (i, val) in he.iter().enumerate() {
            if val.norm() > 1e-14 {
                assert_eq!(b.sector_of(i), (1, -1));
            }
        }
    }

    #[test]
    fn w3_linear_nu_dependence() {
        // H_{3,nu} - H_{3,nu'} = ((nu-nu')/2) sum_r W_3 + ((nu'^2-nu^2)/2) C
        let b = basis(0.4, 3, 5, 1);
        let (nu1, nu2) = (1.3, 0.6);
        let v = probe(&b, 3, 3);
        let (a, _) = h3_poly(nu1, &b).apply(&b, &v);
        let (c, _) = h3_poly(nu2, &b).apply(&b, &v);
        let mut w3sum = w3_poly(Plus, &b);
        w3sum.add(&w3_poly(Minus, &b));
        let (w3v, _) = w3sum.apply(&b, &v);
        let (cv, _) = c_poly(&b).apply(&b, &v);
        for i in 0..b.dim() {
            let predict = 0.5 * (nu1 - nu2) * w3v[i] + 0.5 * (nu2 * nu2 - nu1 * nu1) * cv[i];
            assert!((a[i] - c[i] - predict).norm() < 1e-12);
        }
    }

    #[test]
    fn quadrature_reconstructs_w2_w3() {
        let b = basis(0.5, 3, 6, 1);
        let v = probe(&b, 4, 17);
        for r in [Plus, Minus] {
            let n_pts = 3 * b.spec.n_max + 2;
            let w2q = w_from_quadrature(2, r, &b, n_pts.max(2 * b.spec.n_max + 2));
            let (a, _) = w2q.apply(&b, &v);
            let (c, _) = w2_poly(r, &b).apply(&b, &v);
            let resid: f64 = a.iter().zip(c.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            assert!(resid < 1e-10, "W2 {r}: {resid}");
            let w3q = w_from_quadrature(3, r, &b, n_pts);
            let (a3, _) = w3q.apply(&b, &v);
            let (c3, _) = w3_poly(r, &b).apply(&b, &v);
            let resid3: f64 = a3.iter().zip(c3.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            assert!(resid3 < 1e-10, "W3 {r}: {resid3}");
        }
    }

    #[test]
    fn quadrature_reconstructs_c() {
        let b = basis(0.5, 3, 6, 1);
        let v = probe(&b, 4, 19);
        let cq = c_from_quadrature(&b, 3 * b.spec.n_max + 2);
        let (a, _) = cq.apply(&b, &v);
        let (c, _) = c_poly(&b).apply(&b, &v);
        let resid: f64 = a.iter().zip(c.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        assert!(resid < 1e-9, "C reconstruction: {resid}");
    }

    #[test]
    fn chiral_boson_hermitian_periodic_and_commutators() {
        // probes at level <= l_max - n_max: no path leaves the truncation,
        // so the operator identities hold to rounding.
        let b = basis(0.5, 6, 8, 1);
        let p = b.params;
        let (x, eps) = (0.7, 0.3);
        let rho = rho_poly(Plus, x, eps, 0, &b);
        // Hermitian: <u, rho v> = <rho u, v>
        let u = probe(&b, 2, 23);
        let v = probe(&b, 2, 29);
        let (ru, _) = rho.apply(&b, &u);
        let (rv, _) = rho.apply(&b, &v);
        assert!((inner(&u, &rv) - inner(&ru, &v)).norm() < 1e-11);
        // periodicity
        let rho_shift = rho_poly(Plus, x + 2.0 * p.ell, eps, 0, &b);
        let (rv2, _) = rho_shift.apply(&b, &v);
        for (a, c) in rv.iter().zip(rv2.iter()) {
            assert!((a - c).norm() < 1e-12);
        }
        // [rho_+, rho_-] = 0
        let rho_m = rho_poly(Minus, -0.4, 0.2, 0, &b);
        let (pm, _) = rho_m.apply(&b, &rv);
        let (rp, _) = rho.apply(&b, &{
            let (t, _) = rho_m.apply(&b, &v);
            t
        });
        let resid: f64 = pm.iter().zip(rp.iter()).map(|(a, c)| (a - c).norm_sqr()).sum::<f64>().sqrt();
        assert!(resid < 1e-11, "cross-chirality commutator {resid}");
    }

    #[test]
    fn ccr_matches_dirac_derivative() {
        // [rho_+(x;eps), rho_+(x';eps')] = -2 pi i d/dx delta(x-x'; eps+eps'),
        // with the delta series cut at the same n_max as the field modes.
        let b = basis(0.5, 8, 10, 0);
        let p = b.params;
        let (x, xp, eps, epsp) = (0.6, -0.2, 0.25, 0.15);
        let r1 = rho_poly(Plus, x, eps, 0, &b);
        let r2 = rho_poly(Plus, xp, epsp, 0, &b);
        // protected probe: level + 2 n_max never leaves the basis
        let v = probe(&b, b.spec.l_max - b.spec.n_max, 31);
        let (v21, _) = r1.apply(&b, &{
            let (t, _) = r2.apply(&b, &v);
            t
        });
        let (v12, _) = r2.apply(&b, &{
            let (t, _) = r1.apply(&b, &v);
            t
        });
        let comm: Vec<Complex64> = v21.iter().zip(v12.iter()).map(|(a, c)| a - c).collect();
        // finite difference of the truncation-matched regularized delta in x
        let fd = specfun::fd1(
            |t| {
                Complex64::new(
                    specfun::dirac_series(t - xp, eps + epsp, &p, Some(b.spec.n_max)).unwrap(),
                    0.0,
                )
            },
            x,
            1e-4,
        );
        let expect = -2.0 * std::f64::consts::PI * I * fd;
        let resid: f64 = comm
            .iter()
            .zip(v.iter())
            .map(|(c, s)| (c - expect * s).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(resid / expect.norm() < 1e-8, "residual {}", resid / expect.norm());
    }

    #[test]
    fn correction_r_vanishes_with_eps_and_at_q0() {
        let b = basis(0.5, 6, 8, 0);
        let v = probe(&b, 4, 37);
        let mut norms = Vec::new();
        for eps in [0.4, 0.2, 0.1, 0.05, 0.025, 0.0125] {
            let rr = correction_r_poly(Plus, b.params.nu(), 0.3, eps, &b);
            let (rv, _) = rr.apply(&b, &v);
            norms.push(norm(&rv));
        }
        // R -> 0 as eps -> 0+, asymptotically linearly in eps
        for w in norms.windows(2) {
            assert!(w[1] < w[0], "{norms:?}");
        }
        let slope = (norms[4] / norms[5]).ln() / 2f64.ln();
        assert!(slope > 0.85, "asymptotic decay slope {slope}, norms {norms:?}");
        // q = 0: only the :bb: part survives
        let b0 = basis(0.0, 4, 6, 0);
        let rr0 = correction_r_poly(Plus, b0.params.nu(), 0.3, 0.2, &b0);
        for t in &rr0.terms {
            assert_eq!(t.gens.len(), 2, "linear s_n^2 part should vanish at q=0");
        }
    }

    #[test]
    fn sandwich_matches_direct_on_vacuum() {
        // :R phi: Omega keeps only creation monomials of R
        let b = basis(0.5, 4, 6, 2);
        let p = b.params;
        let ins = Insertion { r: Plus, nu_eff: p.nu(), x: 0.4, eps: 0.3 };
        let op = anyon(ins, &b).unwrap();
        let rr = correction_r_poly(Plus, p.nu(), ins.x, ins.eps, &b);
        let om = b.vacuum().unwrap();
        let (sv, _) = sandwich_apply(&rr, &op, &b, &om);
        // direct: apply phi then the creation-only part of each monomial
        let (phi_om, _) = op.apply(&b, &om);
        let mut direct = b.zero();
        for mono in &rr.terms {
            if mono.gens.iter().any(|g| matches!(g, Gen::A { n, .. } if *n > 0)) {
                continue;
            }
            let mut y = phi_om.clone();
            for g in mono.gens.iter().rev() {
                let Gen::A { r, n } = *g else { panic!() };
                let mut next = b.zero();
                b.apply_a_into(r, n, Complex64::new(1.0, 0.0), &y, &mut next);
                y = next;
            }
            for (a, s) in direct.iter_mut().zip(y.iter()) {
                *a += mono.coeff * s;
            }
        }
        let resid: f64 = sv.iter().zip(direct.iter()).map(|(a, c)| (a - c).norm_sqr()).sum::<f64>().sqrt();
        assert!(resid < 1e-12, "{resid}");
    }

    #[test]
    fn ecs_apply_single_particle_is_kinetic() {
        let p = params_q(0.5);
        let labels = [ParticleLabel { r: Plus, m: Mass::Unit, x: 0.3 }];
        let f = |xs: &[f64]| Complex64::new((2.0 * xs[0]).sin(), (0.5 * xs[0]).cos());
        let got = ecs_apply(&labels, 2.0, 0.2, &f, &p, 1e-3, None).unwrap();
        let expect = -0.5
            * Complex64::new(-4.0 * (2.0 * 0.3f64).sin(), -0.25 * (0.5 * 0.3f64).cos());
        assert!((got - expect).norm() < 1e-8, "{got} vs {expect}");
    }

    #[test]
    fn ecs_matches_deformed_split() {
        // labels (+,1)x N and (+,-1/g)x M reproduce the two-type split:
        // H_{N;g} - g H_{M;1/g} + (1-g) cross terms
        let p = params_q(0.5);
        let g = p.g();
        let labels = [
            ParticleLabel { r: Plus, m: Mass::Unit, x: 0.9 },
            ParticleLabel { r: Plus, m: Mass::Unit, x: -0.4 },
            ParticleLabel { r: Plus, m: Mass::InvG, x: 1.7 },
        ];
        let pot = ecs_potential(&labels, g, 0.0, &p, None).unwrap();
        let w = |d: f64| wp1_complex(Complex64::new(d, 0.0), &p).unwrap();
        let by_hand = g * (g - 1.0) * w(0.9 + 0.4)
            + (1.0 - g) * (w(0.9 - 1.7) + w(-0.4 - 1.7));
        assert!((pot - by_hand).norm() < 1e-12 * by_hand.norm().max(1.0));
        // g = 1: all interactions vanish identically
        let p1 = ModelParams::new(std::f64::consts::PI, std::f64::consts::LN_2, 1, 1, 1, 0.25).unwrap();
        let pot1 = ecs_potential(&labels, 1.0, 0.0, &p1, None).unwrap();
        assert!(pot1.norm() < 1e-14);
    }

    #[test]
    fn substitution_identity() {
        let p = params_q(0.5);
        let g = p.g();
        // (1,1,0,0), (1,0,1,0) and a bigger mixed case at random points
        assert!(substitution_check(&[0.4], &[-0.9], &[], &[], g, &p).unwrap() < 1e-12);
        assert!(substitution_check(&[0.4], &[], &[-0.9], &[], g, &p).unwrap() < 1e-12);
        assert!(
            substitution_check(&[0.4, 1.3], &[-0.9], &[2.1], &[-2.4], g, &p).unwrap() < 1e-11
        );
    }
}
