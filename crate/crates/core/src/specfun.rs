//! Regularized elliptic special functions with independent evaluation paths.
//!
//! Every function here exists in at least two algebraically independent
//! forms (infinite product vs. mode series vs. lattice sum vs. numerical
//! log-derivative). The `*_checked` evaluators compute two paths and treat
//! disagreement beyond tolerance as a hard error: these functions are the
//! oracles for the operator identities downstream, so a silent evaluation
//! bug here would invalidate everything built on top.
//!
//! Conventions: `kappa = pi/(2 ell)`, nome `q = exp(-2 kappa delta)`, and a
//! regularization length `eps >= 0` damping mode `n` by `exp(-2 kappa eps |n|)`.

use crate::params::{series_len, ModelParams};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error)]
pub enum SpecFunError {
    #[error("nome q must satisfy 0 <= q < 1, got {0}")]
    BadNome(f64),
    #[error("eps must be > 0 for this series form, got {0}")]
    NonPositiveEps(f64),
    #[error("argument within 1e-10 of the singular set: |sin(kappa z)| = {0:.3e}")]
    SingularInput(f64),
    #[error("evaluation paths disagree: {path_a} = {a}, {path_b} = {b}, |diff| = {diff:.3e} > {tol:.3e}")]
    PathDisagreement {
        path_a: EvalPath,
        path_b: EvalPath,
        a: Complex64,
        b: Complex64,
        diff: f64,
        tol: f64,
    },
}

/// Which evaluation route produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalPath {
    Series,
    Product,
    LatticeSum,
    LogDerivative,
}

impl std::fmt::Display for EvalPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EvalPath::Series => "series",
            EvalPath::Product => "product",
            EvalPath::LatticeSum => "lattice_sum",
            EvalPath::LogDerivative => "log_derivative",
        };
        f.write_str(s)
    }
}

/// A value together with the route and truncation that produced it.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RegularizedEval {
    pub value: Complex64,
    pub path: EvalPath,
    pub trunc: usize,
}

/// Theta-function kind: 1 (odd, same-chirality kernel) or 4 (even, opposite).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaKind {
    One,
    Four,
}

fn check_q(q: f64) -> Result<(), SpecFunError> {
    if (0.0..1.0).contains(&q) {
        Ok(())
    } else {
        Err(SpecFunError::BadNome(q))
    }
}

/// Product length so that `q^{2m} e^{2|Im x|} e^{-2 eps}` tails are < 1e-16.
fn product_len(q: f64, im_x: f64) -> usize {
    if q == 0.0 {
        return 0;
    }
    let log_tail = -16.0 * std::f64::consts::LN_10;
    let m = ((log_tail - 2.0 * im_x.abs()) / (2.0 * q.ln())).ceil();
    (m.max(4.0) as usize) + 8
}

/// Regularized theta function by its defining infinite product:
///
/// ```text
/// th1(x,q;eps) = (e^{-ix} - e^{ix-2eps}) prod_m (1 - q^{2m} e^{ 2ix-2eps})(1 - q^{2m} e^{-2ix-2eps})
/// th4(x,q;eps) = prod_m (1 - q^{2m-1} e^{2ix-2eps})(1 - q^{2m-1} e^{-2ix-2eps})
/// ```
///
/// The first argument may be complex; the shift relation
/// `th1(kappa(x + i delta), q; eps) = q^{-1/2} e^{-i kappa x} th4(kappa x, q; eps)`
/// connects the two kinds.
pub fn theta_reg(kind: ThetaKind, x: Complex64, q: f64, eps: f64) -> Result<RegularizedEval, SpecFunError> {
    check_q(q)?;
    let len = product_len(q, x.im);
    let e2p = (2.0 * I * x - 2.0 * eps).exp();
    let e2m = (-2.0 * I * x - 2.0 * eps).exp();
    let mut value = match kind {
        ThetaKind::One => (-I * x).exp() - (I * x - 2.0 * eps).exp(),
        ThetaKind::Four => Complex64::new(1.0, 0.0),
    };
    for m in 1..=len as i32 {
        let w = match kind {
            ThetaKind::One => q.powi(2 * m),
            ThetaKind::Four => q.powi(2 * m - 1),
        };
        value *= (1.0 - w * e2p) * (1.0 - w * e2m);
    }
    Ok(RegularizedEval {
        value,
        path: EvalPath::Product,
        trunc: len,
    })
}

/// Principal-value-free logarithm of the regularized theta functions, from
/// the mode series:
///
/// ```text
/// log th1(kappa x, q; kappa eps) = -i kappa x - C(x; eps)
/// log th4(kappa x, q; kappa eps) = -Ct(x; eps)
/// ```
///
/// This is the canonical continuous branch used for fractional powers
/// `theta^{nu nu'}` in anyon correlation functions.
pub fn log_theta(kind: ThetaKind, x: Complex64, params: &ModelParams, eps: f64) -> Result<Complex64, SpecFunError> {
    let kappa = params.kappa();
    match kind {
        ThetaKind::One => Ok(-I * kappa * x - c_fun(x, eps, params, None)?),
        ThetaKind::Four => Ok(-ct_fun(x, eps, params, None)?),
    }
}

/// `C(x;eps) = sum_{n>=1} (1/n)(e^{2 kappa (ix-eps) n} c_n^2 + e^{-2 kappa (ix+eps) n} s_n^2)`.
///
/// With `n_max = None` the log-product resummation is used (converges in
/// powers of q even at eps = 0 away from the singular set); with
/// `n_max = Some(k)` the literal mode series truncated at `k` is returned,
/// matching the mode-truncated Fock-space operators.
pub fn c_fun(x: Complex64, eps: f64, params: &ModelParams, n_max: Option<usize>) -> Result<Complex64, SpecFunError> {
    let q = params.q();
    check_q(q)?;
    let kappa = params.kappa();
    match n_max {
        Some(len) => {
            if !(eps > 0.0) && x.im == 0.0 && len > 100_000 {
                return Err(SpecFunError::NonPositiveEps(eps));
            }
            let zp = (2.0 * kappa * (I * x - eps)).exp();
            let zm = (2.0 * kappa * (-I * x - eps)).exp();
            let mut sum = Complex64::new(0.0, 0.0);
            let mut zpn = Complex64::new(1.0, 0.0);
            let mut zmn = Complex64::new(1.0, 0.0);
            for n in 1..=len as i64 {
                zpn *= zp;
                zmn *= zm;
                let q2n = q.powi(2 * n as i32);
                let c2 = 1.0 / (1.0 - q2n);
                let s2 = q2n / (1.0 - q2n);
                sum += (zpn * c2 + zmn * s2) / n as f64;
            }
            Ok(sum)
        }
        None => {
            // C = -log(1 - e^{2k(ix-eps)})
            //     - sum_m [log(1 - q^{2m} e^{2k(ix-eps)}) + log(1 - q^{2m} e^{-2k(ix+eps)})]
            let zp = (2.0 * kappa * (I * x - eps)).exp();
            let zm = (2.0 * kappa * (-I * x - eps)).exp();
            let one = Complex64::new(1.0, 0.0);
            let lead = one - zp;
            if lead.norm() < 1e-14 {
                return Err(SpecFunError::SingularInput(lead.norm()));
            }
            let mut sum = -lead.ln();
            for m in 1..=product_len(q, 2.0 * kappa * x.im) as i32 {
                let w = q.powi(2 * m);
                sum -= (one - w * zp).ln() + (one - w * zm).ln();
            }
            Ok(sum)
        }
    }
}

/// `Ct(x;eps) = sum_{n>=1} (c_n s_n / n)(e^{2 kappa (ix-eps) n} + e^{-2 kappa (ix+eps) n})`.
pub fn ct_fun(x: Complex64, eps: f64, params: &ModelParams, n_max: Option<usize>) -> Result<Complex64, SpecFunError> {
    let q = params.q();
    check_q(q)?;
    let kappa = params.kappa();
    match n_max {
        Some(len) => {
            let zp = (2.0 * kappa * (I * x - eps)).exp();
            let zm = (2.0 * kappa * (-I * x - eps)).exp();
            let mut sum = Complex64::new(0.0, 0.0);
            let mut zpn = Complex64::new(1.0, 0.0);
            let mut zmn = Complex64::new(1.0, 0.0);
            for n in 1..=len as i64 {
                zpn *= zp;
                zmn *= zm;
                let qn = q.powi(n as i32);
                let cs = qn / (1.0 - qn * qn);
                sum += cs * (zpn + zmn) / n as f64;
            }
            Ok(sum)
        }
        None => {
            // Ct = -sum_{m>=0} [log(1 - q^{2m+1} e^{2k(ix-eps)}) + log(1 - q^{2m+1} e^{-2k(ix+eps)})]
            let zp = (2.0 * kappa * (I * x - eps)).exp();
            let zm = (2.0 * kappa * (-I * x - eps)).exp();
            let one = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(0.0, 0.0);
            for m in 0..=product_len(q, 2.0 * kappa * x.im) as i32 {
                let w = q.powi(2 * m + 1);
                sum -= (one - w * zp).ln() + (one - w * zm).ln();
            }
            Ok(sum)
        }
    }
}

/// Modified Weierstrass zeta, `2 ell`-periodic: cotangent mode series
///
/// `zeta1(z) = kappa cot(kappa z) + 4 kappa sum_n q^{2n}/(1-q^{2n}) sin(2 n kappa z)`
///
/// valid for `|Im z| < 2 delta`, `z` off the real period lattice.
pub fn zeta1(z: Complex64, params: &ModelParams) -> Result<RegularizedEval, SpecFunError> {
    let q = params.q();
    check_q(q)?;
    let kappa = params.kappa();
    let s = (kappa * z).sin();
    if s.norm() < 1e-10 {
        return Err(SpecFunError::SingularInput(s.norm()));
    }
    let mut value = kappa * (kappa * z).cos() / s;
    // Tail of term n: q^{2n} e^{2 n kappa |Im z|}; require |Im z| < 2 delta.
    let margin = 2.0 * params.delta - z.im.abs();
    if margin <= 0.0 {
        return Err(SpecFunError::SingularInput(margin));
    }
    let len = if q == 0.0 {
        0
    } else {
        let l = (-16.0 * std::f64::consts::LN_10 / (-2.0 * kappa * margin)).ceil() as usize;
        l.max(4) + 8
    };
    for n in 1..=len as i32 {
        let q2n = q.powi(2 * n);
        value += 4.0 * kappa * q2n / (1.0 - q2n) * (2.0 * n as f64 * kappa * z).sin();
    }
    Ok(RegularizedEval {
        value,
        path: EvalPath::Series,
        trunc: len,
    })
}

/// Same function by the symmetric lattice sum
/// `zeta1(z) = lim_M sum_{m=-M..M} kappa cot(kappa (z - 2 i m delta))`,
/// with the `+m`/`-m` terms paired so the partial sums converge.
pub fn zeta1_lattice(z: Complex64, params: &ModelParams, m_max: usize) -> Result<RegularizedEval, SpecFunError> {
    let kappa = params.kappa();
    let cot = |w: Complex64| -> Result<Complex64, SpecFunError> {
        let s = w.sin();
        if s.norm() < 1e-12 {
            return Err(SpecFunError::SingularInput(s.norm()));
        }
        Ok(w.cos() / s)
    };
    let mut value = kappa * cot(kappa * z)?;
    for m in 1..=m_max as i32 {
        let shift = Complex64::new(0.0, 2.0 * m as f64 * params.delta);
        value += kappa * (cot(kappa * (z - shift))? + cot(kappa * (z + shift))?);
    }
    Ok(RegularizedEval {
        value,
        path: EvalPath::LatticeSum,
        trunc: m_max,
    })
}

/// `zeta1(z + i delta)` directly from its own series
/// `-i kappa + 4 kappa sum_n q^n/(1-q^{2n}) sin(2 n kappa z)`, valid `|Im z| < delta`.
pub fn zeta1_shifted(z: Complex64, params: &ModelParams) -> Result<RegularizedEval, SpecFunError> {
    let q = params.q();
    check_q(q)?;
    let kappa = params.kappa();
    let margin = params.delta - z.im.abs();
    if margin <= 0.0 {
        return Err(SpecFunError::SingularInput(margin));
    }
    let len = if q == 0.0 {
        0
    } else {
        let l = (-16.0 * std::f64::consts::LN_10 / (-2.0 * kappa * margin)).ceil() as usize;
        l.max(4) + 8
    };
    let mut value = Complex64::new(0.0, -kappa);
    for n in 1..=len as i32 {
        let qn = q.powi(n);
        value += 4.0 * kappa * qn / (1.0 - qn * qn) * (2.0 * n as f64 * kappa * z).sin();
    }
    Ok(RegularizedEval {
        value,
        path: EvalPath::Series,
        trunc: len,
    })
}

/// Unregularized modified Weierstrass pair potential at complex argument,
/// `wp1(z) = kappa^2/sin^2(kappa z) - 8 kappa^2 sum_n n q^{2n}/(1-q^{2n}) cos(2 n kappa z)`,
/// valid `|Im z| < 2 delta`. This is `-d/dz zeta1(z)`.
pub fn wp1_complex(z: Complex64, params: &ModelParams) -> Result<Complex64, SpecFunError> {
    let q = params.q();
    check_q(q)?;
    let kappa = params.kappa();
    let s = (kappa * z).sin();
    if s.norm() < 1e-10 {
        return Err(SpecFunError::SingularInput(s.norm()));
    }
    let margin = 2.0 * params.delta - z.im.abs();
    if margin <= 0.0 {
        return Err(SpecFunError::SingularInput(margin));
    }
    let mut value = kappa * kappa / (s * s);
    let len = if q == 0.0 {
        0
    } else {
        let l = (-16.0 * std::f64::consts::LN_10 / (-2.0 * kappa * margin)).ceil() as usize;
        l.max(4) + 16
    };
    for n in 1..=len as i32 {
        let q2n = q.powi(2 * n);
        value -= 8.0 * kappa * kappa * n as f64 * q2n / (1.0 - q2n) * (2.0 * n as f64 * kappa * z).cos();
    }
    Ok(value)
}

/// Regularized eCS pair potential `wp1(x; eps)` (same chirality,
/// `shifted = false`) or `wp1(x + i delta; eps)` (opposite chirality,
/// `shifted = true`), evaluated as `-d^2/dx^2 log theta` with every product
/// factor differentiated analytically.
///
/// For `eps > 0` the same-chirality potential acquires a small odd imaginary
/// part (the regularized product is not symmetric in x); the opposite-
/// chirality potential stays real, non-singular, and attractive.
pub fn wp1_reg(x: f64, eps: f64, shifted: bool, params: &ModelParams) -> Result<RegularizedEval, SpecFunError> {
    let q = params.q();
    check_q(q)?;
    let kappa = params.kappa();
    let len = product_len(q, 0.0);
    let mut value = Complex64::new(0.0, 0.0);
    if !shifted {
        // -d^2/dx^2 log sin(kappa (x + i eps)) = kappa^2 / sin^2(kappa (x + i eps))
        let s = (kappa * (Complex64::new(x, eps))).sin();
        if s.norm() < 1e-10 {
            return Err(SpecFunError::SingularInput(s.norm()));
        }
        value += kappa * kappa / (s * s);
    }
    // Shared structure of the remaining factors:
    //   f_m(x) = 1 - 2 w e^{-2 kappa eps} cos(2 kappa x) + w^2 e^{-4 kappa eps}
    // with w = q^{2m} (kind 1) or q^{2m-1} (kind 4);
    //   -d^2 log f = (f'^2 - f f'')/f^2.
    let damp = (-2.0 * kappa * eps).exp();
    let c2 = (2.0 * kappa * x).cos();
    let s2 = (2.0 * kappa * x).sin();
    for m in 1..=len as i32 {
        let w = if shifted { q.powi(2 * m - 1) } else { q.powi(2 * m) } * damp;
        let f = 1.0 - 2.0 * w * c2 + w * w;
        let fp = 4.0 * kappa * w * s2;
        let fpp = 8.0 * kappa * kappa * w * c2;
        value += (fp * fp - f * fpp) / (f * f);
    }
    Ok(RegularizedEval {
        value,
        path: EvalPath::Product,
        trunc: len,
    })
}

/// Series path for the regularized potentials: the second derivative of the
/// `C`/`Ct` mode series,
///
/// ```text
/// wp1(x;eps)        = C''(x;eps)  = -(2k)^2 sum_n n (c_n^2 e^{2k(ix-eps)n} + s_n^2 e^{-2k(ix+eps)n})
/// wp1(x+i delta;eps)= Ct''(x;eps) = -(2k)^2 sum_n n c_n s_n (e^{2k(ix-eps)n} + e^{-2k(ix+eps)n})
/// ```
///
/// With `n_max = Some(k)` this is exactly the potential the mode-truncated
/// Fock-space identities produce.
pub fn wp1_series(x: f64, eps: f64, shifted: bool, params: &ModelParams, n_max: Option<usize>) -> Result<RegularizedEval, SpecFunError> {
    let q = params.q();
    check_q(q)?;
    let kappa = params.kappa();
    let len = match n_max {
        Some(k) => k,
        None => {
            if !(eps > 0.0) {
                return Err(SpecFunError::NonPositiveEps(eps));
            }
            // terms ~ n e^{-2 kappa eps n}
            let l = (-18.0 * std::f64::consts::LN_10 / (-2.0 * kappa * eps)).ceil() as usize;
            l.max(8) + 16
        }
    };
    let fourk2 = 4.0 * kappa * kappa;
    let zp = (2.0 * kappa * (I * x - eps)).exp();
    let zm = (2.0 * kappa * (-I * x - eps)).exp();
    let mut zpn = Complex64::new(1.0, 0.0);
    let mut zmn = Complex64::new(1.0, 0.0);
    let mut value = Complex64::new(0.0, 0.0);
    for n in 1..=len as i64 {
        zpn *= zp;
        zmn *= zm;
        let q2n = q.powi(2 * n as i32);
        let (wp, wm) = if shifted {
            let cs = q.powi(n as i32) / (1.0 - q2n);
            (cs, cs)
        } else {
            (1.0 / (1.0 - q2n), q2n / (1.0 - q2n))
        };
        value -= fourk2 * n as f64 * (wp * zpn + wm * zmn);
    }
    Ok(RegularizedEval {
        value,
        path: EvalPath::Series,
        trunc: len,
    })
}

/// Regularized 2`ell`-periodic Dirac delta
/// `delta(x;eps) = (1/2ell) sum_{n in Z} e^{2 kappa (i n x - |n| eps)}`,
/// resummed to a closed form.
pub fn dirac_reg(x: f64, eps: f64, params: &ModelParams) -> Result<f64, SpecFunError> {
    if !(eps > 0.0) {
        return Err(SpecFunError::NonPositiveEps(eps));
    }
    let kappa = params.kappa();
    let z = (2.0 * kappa * (I * x - eps)).exp();
    let geom = z / (1.0 - z);
    Ok((1.0 + 2.0 * geom.re) / (2.0 * params.ell))
}

/// Mode-truncated regularized delta
/// `(1/2ell) sum_{|n| <= n_max} e^{2 kappa (i n x - |n| eps)}`: the form the
/// mode-truncated Fock-space commutators close against. `None` resums the
/// full series ([`dirac_reg`]).
pub fn dirac_series(x: f64, eps: f64, params: &ModelParams, n_max: Option<usize>) -> Result<f64, SpecFunError> {
    let Some(len) = n_max else {
        return dirac_reg(x, eps, params);
    };
    if !(eps > 0.0) && len > 100_000 {
        return Err(SpecFunError::NonPositiveEps(eps));
    }
    let kappa = params.kappa();
    let mut sum = 1.0;
    for n in 1..=len as i64 {
        sum += 2.0 * (2.0 * kappa * n as f64 * x).cos() * (-2.0 * kappa * n as f64 * eps).exp();
    }
    Ok(sum / (2.0 * params.ell))
}

/// One-sided geometric pieces `delta_pm(x;eps) = (1/2ell) sum_{n>=1} e^{2 kappa (∓ i n x - n eps)}`.
pub fn delta_pm(sign_plus: bool, x: f64, eps: f64, params: &ModelParams) -> Result<Complex64, SpecFunError> {
    if !(eps > 0.0) {
        return Err(SpecFunError::NonPositiveEps(eps));
    }
    let kappa = params.kappa();
    let phase = if sign_plus { -I } else { I };
    let z = (2.0 * kappa * (phase * x - eps)).exp();
    Ok(z / (1.0 - z) / (2.0 * params.ell))
}

/// Regularized sign function, continuous in `x`, `sgn(0;eps) = 0`,
/// `sgn(x + 2 ell; eps) = sgn(x; eps) + 2`.
pub fn sgn_reg(x: f64, eps: f64, params: &ModelParams) -> Result<f64, SpecFunError> {
    if !(eps > 0.0) {
        return Err(SpecFunError::NonPositiveEps(eps));
    }
    let ell = params.ell;
    let kappa = params.kappa();
    let k = (x / (2.0 * ell)).round();
    let y = x - 2.0 * ell * k;
    let num = 1.0 - (2.0 * kappa * (I * y - eps)).exp();
    let den = (2.0 * kappa * I * y).exp() - Complex64::new((-2.0 * kappa * eps).exp(), 0.0);
    let mut val = -(num / den).arg() / std::f64::consts::PI;
    // The principal branch wraps only at y = +/- ell; re-anchor by parity.
    if y > 0.0 && val < -0.5 {
        val += 2.0;
    } else if y < 0.0 && val > 0.5 {
        val -= 2.0;
    }
    Ok(2.0 * k + val)
}

/// Series form of the sign function,
/// `x/ell + (2/pi) sum_{n>=1} (1/n) sin(2 kappa n x) e^{-2 kappa n eps}`,
/// optionally truncated at `n_max` modes.
pub fn sgn_series(x: f64, eps: f64, params: &ModelParams, n_max: Option<usize>) -> Result<f64, SpecFunError> {
    if !(eps > 0.0) {
        return Err(SpecFunError::NonPositiveEps(eps));
    }
    let kappa = params.kappa();
    let len = match n_max {
        Some(k) => k,
        None => {
            let l = (-16.0 * std::f64::consts::LN_10 / (-2.0 * kappa * eps)).ceil() as usize;
            l.max(8) + 16
        }
    };
    let mut sum = x / params.ell;
    for n in 1..=len as i64 {
        sum += 2.0 / std::f64::consts::PI / n as f64
            * (2.0 * kappa * n as f64 * x).sin()
            * (-2.0 * kappa * n as f64 * eps).exp();
    }
    Ok(sum)
}

/// `j(x;eps) = (1/2ell) sum_n s_n^2 sin(2 kappa n x) e^{-2 kappa n eps}` and
/// its partner with `c_n s_n` weights. Both are q-damped (`s_n^2 ~ q^{2n}`).
pub fn j_fun(x: f64, eps: f64, params: &ModelParams, tilde: bool) -> Result<f64, SpecFunError> {
    let q = params.q();
    check_q(q)?;
    let kappa = params.kappa();
    let mut sum = 0.0;
    for n in 1..=series_len(q).max(8) as i64 {
        let q2n = q.powi(2 * n as i32);
        let w = if tilde {
            q.powi(n as i32) / (1.0 - q2n)
        } else {
            q2n / (1.0 - q2n)
        };
        sum += w * (2.0 * kappa * n as f64 * x).sin() * (-2.0 * kappa * n as f64 * eps).exp();
    }
    Ok(sum / (2.0 * params.ell))
}

/// `Delta_pm(x;eps) = kappa + 2 pi delta_pm(x;eps) ∓ 4 pi i j(x;eps)`;
/// the two pieces sum to `2 pi delta(x;eps)`.
pub fn delta_cap_pm(sign_plus: bool, x: f64, eps: f64, params: &ModelParams) -> Result<Complex64, SpecFunError> {
    let kappa = params.kappa();
    let dp = delta_pm(sign_plus, x, eps, params)?;
    let j = j_fun(x, eps, params, false)?;
    let pi = std::f64::consts::PI;
    let sgn = if sign_plus { -1.0 } else { 1.0 };
    Ok(Complex64::new(kappa, 0.0) + 2.0 * pi * dp + sgn * 4.0 * pi * I * j)
}

/// Dual-path theta evaluation: the infinite product against
/// `exp(log theta)` with the log from the independent mode/log-sum route.
/// Disagreement above `tol` (relative) is a hard error.
pub fn theta_checked(kind: ThetaKind, x: f64, params: &ModelParams, eps: f64, tol: f64) -> Result<RegularizedEval, SpecFunError> {
    let kappa = params.kappa();
    let a = theta_reg(kind, Complex64::new(kappa * x, 0.0), params.q(), kappa * eps)?;
    let b = log_theta(kind, Complex64::new(x, 0.0), params, eps)?.exp();
    let scale = a.value.norm().max(1.0);
    let diff = (a.value - b).norm();
    if diff > tol * scale {
        return Err(SpecFunError::PathDisagreement {
            path_a: EvalPath::Product,
            path_b: EvalPath::Series,
            a: a.value,
            b,
            diff,
            tol: tol * scale,
        });
    }
    Ok(a)
}

/// Dual-path zeta1: cotangent series against the symmetric lattice sum.
pub fn zeta1_checked(z: Complex64, params: &ModelParams, tol: f64) -> Result<RegularizedEval, SpecFunError> {
    let a = zeta1(z, params)?;
    let m_max = if params.q() == 0.0 { 1 } else { series_len(params.q()).max(20) };
    let b = zeta1_lattice(z, params, m_max)?;
    let scale = a.value.norm().max(1.0);
    let diff = (a.value - b.value).norm();
    if diff > tol * scale {
        return Err(SpecFunError::PathDisagreement {
            path_a: EvalPath::Series,
            path_b: EvalPath::LatticeSum,
            a: a.value,
            b: b.value,
            diff,
            tol: tol * scale,
        });
    }
    Ok(a)
}

/// Dual-path regularized potential: analytic product differentiation against
/// the mode series (eps > 0 required for the series route).
pub fn wp1_checked(x: f64, eps: f64, shifted: bool, params: &ModelParams, tol: f64) -> Result<RegularizedEval, SpecFunError> {
    let a = wp1_reg(x, eps, shifted, params)?;
    let b = wp1_series(x, eps, shifted, params, None)?;
    let scale = a.value.norm().max(1.0);
    let diff = (a.value - b.value).norm();
    if diff > tol * scale {
        return Err(SpecFunError::PathDisagreement {
            path_a: EvalPath::Product,
            path_b: EvalPath::Series,
            a: a.value,
            b: b.value,
            diff,
            tol: tol * scale,
        });
    }
    Ok(a)
}

/// 5-point central first derivative.
pub fn fd1<F: Fn(f64) -> Complex64>(f: F, x: f64, h: f64) -> Complex64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// 5-point central second derivative.
pub fn fd2<F: Fn(f64) -> Complex64>(f: F, x: f64, h: f64) -> Complex64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
        / (12.0 * h * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModelParams;

    fn params_q(q: f64) -> ModelParams {
        let delta = if q == 0.0 { 745.0 } else { -q.ln() };
        ModelParams::new(std::f64::consts::PI, delta, 2, 1, 1, 0.25).unwrap()
    }

    #[test]
    fn theta4_is_one_at_q_zero() {
        for x in [-2.0, 0.3, 1.9] {
            for eps in [0.0, 0.3] {
                let v = theta_reg(ThetaKind::Four, Complex64::new(x, 0.0), 0.0, eps).unwrap();
                assert_eq!(v.value, Complex64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn theta1_trigonometric_limit() {
        // th1(x, 0, 0) = -2i sin(x)
        for x in [-1.0, 0.4, 2.7] {
            let v = theta_reg(ThetaKind::One, Complex64::new(x, 0.0), 0.0, 0.0).unwrap();
            let expect = -2.0 * I * Complex64::new(x, 0.0).sin();
            assert!((v.value - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn theta_shift_relation() {
        // th1(kappa(x + i delta), q; eps) = q^{-1/2} e^{-i kappa x} th4(kappa x, q; eps)
        let p = params_q(0.4);
        let kappa = p.kappa();
        let q = p.q();
        for i in 0..16 {
            let x = -p.ell + 2.0 * p.ell * (i as f64 + 0.5) / 16.0;
            for eps in [0.1, 0.45] {
                let lhs = theta_reg(
                    ThetaKind::One,
                    kappa * Complex64::new(x, p.delta),
                    q,
                    eps,
                )
                .unwrap()
                .value;
                let rhs = q.powf(-0.5)
                    * (-I * kappa * x).exp()
                    * theta_reg(ThetaKind::Four, Complex64::new(kappa * x, 0.0), q, eps)
                        .unwrap()
                        .value;
                assert!((lhs - rhs).norm() < 1e-12, "x={x} eps={eps}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn zeta1_reduces_to_cot_at_q_zero() {
        let p = params_q(0.0);
        let kappa = p.kappa();
        for x in [0.3, -1.2, 2.5] {
            let z = Complex64::new(x, 0.0);
            let v = zeta1(z, &p).unwrap().value;
            let expect = kappa * (kappa * x).cos() / (kappa * x).sin();
            assert!((v - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn zeta1_is_odd() {
        let p = params_q(0.5);
        for x in [0.2, 0.9, 2.4] {
            let z = Complex64::new(x, 0.1);
            let a = zeta1(z, &p).unwrap().value;
            let b = zeta1(-z, &p).unwrap().value;
            assert!((a + b).norm() < 1e-13 * a.norm().max(1.0));
        }
    }

    #[test]
    fn zeta1_series_vs_lattice() {
        let p = params_q(0.5);
        for x in [0.37, 1.1, -2.2] {
            zeta1_checked(Complex64::new(x, 0.0), &p, 1e-11).unwrap();
        }
    }

    #[test]
    fn zeta1_is_log_derivative_of_theta1() {
        // zeta1(x) = d/dx log th1(kappa x, q; 0) by 5-point finite differences.
        let p = params_q(0.5);
        let kappa = p.kappa();
        let q = p.q();
        let f = |x: f64| theta_reg(ThetaKind::One, Complex64::new(kappa * x, 0.0), q, 0.0).unwrap().value.ln();
        for x in [0.5, 1.3, -2.0] {
            let fd = fd1(f, x, 1e-3);
            let v = zeta1(Complex64::new(x, 0.0), &p).unwrap().value;
            assert!((fd - v).norm() < 1e-8, "x={x}: {fd} vs {v}");
        }
    }

    #[test]
    fn zeta1_rejects_pole() {
        let p = params_q(0.3);
        assert!(matches!(
            zeta1(Complex64::new(0.0, 0.0), &p),
            Err(SpecFunError::SingularInput(_))
        ));
    }

    #[test]
    fn delta_to_infinity_limits() {
        // q -> 0: zeta1(z) -> kappa cot(kappa z), zeta1(z + i delta) -> -i kappa.
        let p = params_q(1e-9);
        let kappa = p.kappa();
        let z = Complex64::new(0.8, 0.0);
        let v = zeta1(z, &p).unwrap().value;
        let cot = kappa * (kappa * z).cos() / (kappa * z).sin();
        assert!((v - cot).norm() < 1e-8);
        let w = zeta1_shifted(z, &p).unwrap().value;
        assert!((w - Complex64::new(0.0, -kappa)).norm() < 1e-8);
    }

    #[test]
    fn wp1_trigonometric_case() {
        // q = 0, eps = 0: wp1(x) = kappa^2 / sin^2(kappa x)
        let p = params_q(0.0);
        let kappa = p.kappa();
        for x in [0.4, 1.1, -2.3] {
            let v = wp1_reg(x, 0.0, false, &p).unwrap().value;
            let expect = kappa * kappa / (kappa * x).sin().powi(2);
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-12 * expect.abs());
        }
    }

    #[test]
    fn wp1_shifted_is_regular_and_attractive() {
        let p = params_q(0.4);
        for x in [0.0, 0.05, -0.1, 0.5] {
            let v = wp1_reg(x, 0.0, true, &p).unwrap().value;
            assert!(v.im.abs() < 1e-12);
            assert!(v.re < 0.0, "x={x}: {v}");
        }
    }

    #[test]
    fn wp1_matches_fd_of_log_theta() {
        // wp1(x;eps) = -FD^2 log th1(kappa x, q; kappa eps)
        let p = params_q(0.5);
        let kappa = p.kappa();
        let q = p.q();
        let eps = 0.2;
        for (x, shifted) in [(0.7, false), (1.9, false), (0.3, true), (-1.1, true)] {
            let kind = if shifted { ThetaKind::Four } else { ThetaKind::One };
            let f = |t: f64| {
                theta_reg(kind, Complex64::new(kappa * t, 0.0), q, kappa * eps)
                    .unwrap()
                    .value
                    .ln()
            };
            let fd = -fd2(f, x, 2e-4);
            let v = wp1_reg(x, eps, shifted, &p).unwrap().value;
            assert!((fd - v).norm() < 1e-7, "x={x} shifted={shifted}: {fd} vs {v}");
        }
    }

    #[test]
    fn wp1_product_vs_series() {
        let p = params_q(0.5);
        for (x, eps, shifted) in [(0.6, 0.3, false), (1.4, 0.2, true), (-0.9, 0.5, false)] {
            wp1_checked(x, eps, shifted, &p, 1e-11).unwrap();
        }
    }

    #[test]
    fn sgn_basics() {
        let p = params_q(0.5);
        let eps = 0.2;
        assert_eq!(sgn_reg(0.0, eps, &p).unwrap(), 0.0);
        // odd, continuous, and matching the series form
        for x in [0.2, 0.9, 2.8, -1.4] {
            let a = sgn_reg(x, eps, &p).unwrap();
            let b = sgn_reg(-x, eps, &p).unwrap();
            assert!((a + b).abs() < 1e-13);
            let s = sgn_series(x, eps, &p, None).unwrap();
            assert!((a - s).abs() < 1e-12, "x={x}: closed {a} vs series {s}");
        }
        // 2 ell periodicity shift
        let a = sgn_reg(0.3, eps, &p).unwrap();
        let b = sgn_reg(0.3 + 2.0 * p.ell, eps, &p).unwrap();
        assert!((b - a - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sgn_derivative_is_twice_delta() {
        let p = params_q(0.5);
        let eps = 0.15;
        for x in [0.0, 0.4, -1.2] {
            let fd = fd1(|t| Complex64::new(sgn_reg(t, eps, &p).unwrap(), 0.0), x, 1e-4);
            let d = dirac_reg(x, eps, &p).unwrap();
            assert!((fd.re - 2.0 * d).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn delta_cap_sum_rule() {
        // Delta_+ + Delta_- = 2 pi delta(x;eps)
        let p = params_q(0.5);
        let eps = 0.3;
        for i in 0..12 {
            let x = -p.ell + 2.0 * p.ell * (i as f64 + 0.5) / 12.0;
            let dp = delta_cap_pm(true, x, eps, &p).unwrap();
            let dm = delta_cap_pm(false, x, eps, &p).unwrap();
            let d = dirac_reg(x, eps, &p).unwrap();
            let resid = (dp + dm - 2.0 * std::f64::consts::PI * d).norm();
            assert!(resid < 1e-12, "x={x}: {resid}");
        }
    }

    #[test]
    fn dirac_integrates_to_one() {
        // trapezoid over one period; the integrand is smooth and periodic.
        let p = params_q(0.5);
        let eps = 0.2;
        let n = 4096;
        let h = 2.0 * p.ell / n as f64;
        let mut sum = 0.0;
        for i in 0..n {
            let x = -p.ell + i as f64 * h;
            sum += dirac_reg(x, eps, &p).unwrap();
        }
        sum *= h;
        assert!((sum - 1.0).abs() < 1e-12, "integral {sum}");
    }

    #[test]
    fn exp_c_identities() {
        // e^{-i kappa x - C(x;eps)} = th1(kappa x, q; kappa eps)
        // e^{-Ct(x;eps)} = th4(kappa x, q; kappa eps)
        let p = params_q(0.5);
        let kappa = p.kappa();
        let q = p.q();
        for (x, eps) in [(0.7, 0.4), (-1.8, 0.2), (2.9, 0.9)] {
            let xc = Complex64::new(x, 0.0);
            let c = c_fun(xc, eps, &p, None).unwrap();
            let lhs = (-I * kappa * x - c).exp();
            let rhs = theta_reg(ThetaKind::One, kappa * xc, q, kappa * eps).unwrap().value;
            assert!((lhs - rhs).norm() < 1e-11, "C: x={x} eps={eps}");
            let ct = ct_fun(xc, eps, &p, None).unwrap();
            let lhs4 = (-ct).exp();
            let rhs4 = theta_reg(ThetaKind::Four, kappa * xc, q, kappa * eps).unwrap().value;
            assert!((lhs4 - rhs4).norm() < 1e-11, "Ct: x={x} eps={eps}");
        }
    }

    #[test]
    fn ct_vanishes_at_q_zero() {
        let p = params_q(0.0);
        let v = ct_fun(Complex64::new(0.9, 0.0), 0.3, &p, None).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
        let v4 = theta_reg(ThetaKind::Four, Complex64::new(0.9, 0.0), 0.0, 0.3).unwrap().value;
        assert_eq!(v4, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn c_series_truncated_matches_resummed() {
        // generous eps: explicit mode series converges to the log form
        let p = params_q(0.5);
        let x = Complex64::new(0.8, 0.0);
        let full = c_fun(x, 0.5, &p, None).unwrap();
        let series = c_fun(x, 0.5, &p, Some(500)).unwrap();
        assert!((full - series).norm() < 1e-12);
    }

    #[test]
    fn periodicity_of_everything() {
        let p = params_q(0.5);
        let two_ell = 2.0 * p.ell;
        let eps = 0.3;
        for x in [0.33, -1.21] {
            let pairs: Vec<(Complex64, Complex64)> = vec![
                (
                    zeta1(Complex64::new(x, 0.0), &p).unwrap().value,
                    zeta1(Complex64::new(x + two_ell, 0.0), &p).unwrap().value,
                ),
                (
                    wp1_reg(x, eps, false, &p).unwrap().value,
                    wp1_reg(x + two_ell, eps, false, &p).unwrap().value,
                ),
                (
                    Complex64::new(dirac_reg(x, eps, &p).unwrap(), 0.0),
                    Complex64::new(dirac_reg(x + two_ell, eps, &p).unwrap(), 0.0),
                ),
                (
                    theta_reg(ThetaKind::Four, Complex64::new(p.kappa() * x, 0.0), p.q(), eps).unwrap().value,
                    theta_reg(ThetaKind::Four, Complex64::new(p.kappa() * (x + two_ell), 0.0), p.q(), eps).unwrap().value,
                ),
            ];
            for (a, b) in pairs {
                assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
            }
        }
    }
}
