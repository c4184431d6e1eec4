//! Model parameters, derived constants, and the rational-coupling arithmetic.
//!
//! The construction is determined by a pair of non-zero integers `(r0, s0)`
//! with `g = r0/s0 > 0`, not by the float `g` itself: the statistics values
//! `nu = +/- sqrt(g)` and `-1/nu` must both be integer multiples of
//! `nu0 = 1/sqrt(r0*s0)`, and that integrality is what makes the four anyon
//! species live on one Fock space. The pair is therefore stored exactly and
//! everything derived (`g`, `nu`, `nu0`, `q`, `kappa`) is computed on demand.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tail bound used when truncating the q-series for constants.
pub const SERIES_TAIL: f64 = 1e-15;

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("half-period ell must be positive, got {0}")]
    BadEll(f64),
    #[error("imaginary half-period delta must be positive, got {0}")]
    BadDelta(f64),
    #[error("r0 and s0 must be non-zero with r0*s0 > 0, got ({0}, {1})")]
    BadCoupling(i64, i64),
    #[error("nu_sign must be +1 or -1, got {0}")]
    BadNuSign(i64),
    #[error("regularization eps must be >= 0, got {0}")]
    BadEps(f64),
    #[error("nome q must satisfy 0 <= q < 1, got {0}")]
    BadNome(f64),
    #[error("mode index n must be non-zero")]
    ZeroMode,
}

/// Global model parameters. Immutable after construction.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ModelParams {
    /// Half-period of the spatial circle `[-ell, ell)`.
    pub ell: f64,
    /// Imaginary half-period; the nome is `q = exp(-2*kappa*delta)`.
    pub delta: f64,
    /// Numerator of the coupling `g = r0/s0`.
    pub r0: i64,
    /// Denominator of the coupling `g = r0/s0`.
    pub s0: i64,
    /// Sign of `nu = nu_sign * sqrt(g)`.
    pub nu_sign: i64,
    /// Default regularization length for anyons and chiral bosons.
    pub eps: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        // ell = pi (kappa = 1/2), q = 1/2, g = 2.
        ModelParams {
            ell: std::f64::consts::PI,
            delta: std::f64::consts::LN_2,
            r0: 2,
            s0: 1,
            nu_sign: 1,
            eps: 0.25,
        }
    }
}

impl ModelParams {
    pub fn new(
        ell: f64,
        delta: f64,
        r0: i64,
        s0: i64,
        nu_sign: i64,
        eps: f64,
    ) -> Result<Self, ParamError> {
        if !(ell > 0.0) {
            return Err(ParamError::BadEll(ell));
        }
        if !(delta > 0.0) {
            return Err(ParamError::BadDelta(delta));
        }
        if r0 == 0 || s0 == 0 || r0.checked_mul(s0).map_or(true, |p| p <= 0) {
            return Err(ParamError::BadCoupling(r0, s0));
        }
        if nu_sign != 1 && nu_sign != -1 {
            return Err(ParamError::BadNuSign(nu_sign));
        }
        if !(eps >= 0.0) {
            return Err(ParamError::BadEps(eps));
        }
        Ok(ModelParams {
            ell,
            delta,
            r0,
            s0,
            nu_sign,
            eps,
        })
    }

    /// `kappa = pi / (2 ell)`.
    #[inline]
    pub fn kappa(&self) -> f64 {
        std::f64::consts::PI / (2.0 * self.ell)
    }

    /// Nome `q = exp(-2 kappa delta)`, in `[0, 1)`.
    #[inline]
    pub fn q(&self) -> f64 {
        (-2.0 * self.kappa() * self.delta).exp()
    }

    /// Coupling `g = r0 / s0 > 0`.
    #[inline]
    pub fn g(&self) -> f64 {
        self.r0 as f64 / self.s0 as f64
    }

    /// Statistics parameter `nu = nu_sign * sqrt(g)`.
    #[inline]
    pub fn nu(&self) -> f64 {
        self.nu_sign as f64 * self.g().sqrt()
    }

    /// Charge quantum `nu0 = 1 / sqrt(r0 s0)`.
    #[inline]
    pub fn nu0(&self) -> f64 {
        1.0 / ((self.r0 * self.s0) as f64).sqrt()
    }

    /// Integer charge `nu/nu0 = nu_sign * |r0|` carried by a `nu`-anyon.
    #[inline]
    pub fn charge_nu(&self) -> i64 {
        self.nu_sign * self.r0.abs()
    }

    /// Integer charge `(-1/nu)/nu0 = -nu_sign * |s0|` carried by a `-1/nu`-anyon.
    #[inline]
    pub fn charge_inv_nu(&self) -> i64 {
        -self.nu_sign * self.s0.abs()
    }

    /// Effective statistics parameter for a particle of type `m in {1, -1/g}`:
    /// `m = 1` gives `nu`, `m = -1/g` gives `-1/nu`.
    pub fn nu_eff(&self, m: Mass) -> f64 {
        match m {
            Mass::Unit => self.nu(),
            Mass::InvG => -1.0 / self.nu(),
        }
    }

    /// Integer Klein charge of a particle of type `m`.
    pub fn charge_eff(&self, m: Mass) -> i64 {
        match m {
            Mass::Unit => self.charge_nu(),
            Mass::InvG => self.charge_inv_nu(),
        }
    }
}

/// Particle type label `m in {1, -1/g}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mass {
    /// `m = 1` (statistics `nu`).
    Unit,
    /// `m = -1/g` (statistics `-1/nu`).
    InvG,
}

impl Mass {
    pub fn value(self, g: f64) -> f64 {
        match self {
            Mass::Unit => 1.0,
            Mass::InvG => -1.0 / g,
        }
    }
}

/// Bogoliubov coefficients for one non-zero mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BogoCoeffs {
    pub n: i64,
    pub c: f64,
    pub s: f64,
}

/// `c_n = (1 - q^{2|n|})^{-1/2}`, `s_n = q^{|n|} (1 - q^{2|n|})^{-1/2}`.
pub fn bogo(n: i64, params: &ModelParams) -> Result<BogoCoeffs, ParamError> {
    if n == 0 {
        return Err(ParamError::ZeroMode);
    }
    let q = params.q();
    if !(0.0..1.0).contains(&q) {
        return Err(ParamError::BadNome(q));
    }
    let qn = q.powi(n.unsigned_abs() as i32);
    let denom = (1.0 - qn * qn).sqrt();
    Ok(BogoCoeffs {
        n,
        c: 1.0 / denom,
        s: qn / denom,
    })
}

/// `s_n^2 = q^{2n} / (1 - q^{2n})` for `n >= 1`, as a plain function of `q`.
#[inline]
pub fn s_sq(n: i64, q: f64) -> f64 {
    let q2n = q.powi(2 * n.unsigned_abs() as i32);
    q2n / (1.0 - q2n)
}

/// Number of series terms needed so that the `q^{2n}`-weighted tail is
/// below [`SERIES_TAIL`]. Exact (zero terms needed) at `q = 0`.
pub fn series_len(q: f64) -> usize {
    if q == 0.0 {
        return 0;
    }
    // tail ~ q^{2N}; solve q^{2N} < SERIES_TAIL with a safety margin.
    let n = (SERIES_TAIL.ln() / (2.0 * q.ln())).ceil() as usize;
    n.max(4) + 8
}

/// The constant `c_0 = kappa^2/3 - 8 kappa^2 sum_{n>=1} n q^{2n}/(1-q^{2n})`.
pub fn c0(params: &ModelParams) -> Result<f64, ParamError> {
    let q = params.q();
    if !(0.0..1.0).contains(&q) {
        return Err(ParamError::BadNome(q));
    }
    let k2 = params.kappa() * params.kappa();
    let mut sum = 0.0;
    for n in 1..=series_len(q) as i64 {
        sum += n as f64 * s_sq(n, q);
    }
    Ok(k2 / 3.0 - 8.0 * k2 * sum)
}

/// The regularized constant
/// `c_eps = kappa^2/3 - 8 kappa^2 sum_n n s_n^2 e^{-4 kappa n eps}
///  - 8 kappa^2 sum_{n,m} s_n^2 s_m^2 e^{-2 kappa (n+m) eps}
///    (e^{-2 kappa |n-m| eps} - e^{-2 kappa (n+m) eps})`,
/// reducing to `c_0` as `eps -> 0+`.
///
/// `n_max = None` evaluates the full series to tail bound [`SERIES_TAIL`];
/// `n_max = Some(k)` truncates both sums at `k` terms, which is the value the
/// mode-truncated Fock-space identities close against.
pub fn c_eps(params: &ModelParams, eps: f64, n_max: Option<usize>) -> Result<f64, ParamError> {
    if !(eps >= 0.0) {
        return Err(ParamError::BadEps(eps));
    }
    let q = params.q();
    if !(0.0..1.0).contains(&q) {
        return Err(ParamError::BadNome(q));
    }
    let kappa = params.kappa();
    let k2 = kappa * kappa;
    let len = n_max.unwrap_or_else(|| series_len(q)) as i64;
    let mut single = 0.0;
    for n in 1..=len {
        single += n as f64 * s_sq(n, q) * (-4.0 * kappa * n as f64 * eps).exp();
    }
    let mut double = 0.0;
    for n in 1..=len {
        let sn2 = s_sq(n, q);
        for m in 1..=len {
            let sm2 = s_sq(m, q);
            let sum_damp = (-2.0 * kappa * (n + m) as f64 * eps).exp();
            let diff_damp = (-2.0 * kappa * (n - m).abs() as f64 * eps).exp();
            double += sn2 * sm2 * sum_damp * (diff_damp - sum_damp);
        }
    }
    Ok(k2 / 3.0 - 8.0 * k2 * single - 8.0 * k2 * double)
}

/// Euler-product constant `G = prod_{m>=1} (1 - q^{2m})`, relative tail < 1e-15.
pub fn g_const(params: &ModelParams) -> Result<f64, ParamError> {
    let q = params.q();
    if !(0.0..1.0).contains(&q) {
        return Err(ParamError::BadNome(q));
    }
    let mut prod = 1.0;
    for m in 1..=series_len(q) as i32 {
        prod *= 1.0 - q.powi(2 * m);
    }
    Ok(prod)
}
