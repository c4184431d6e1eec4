//! The nonlocal integral transforms `T` and `T~` on 2`ell`-periodic fields.
//!
//! Both are exact Fourier multipliers: on mode `n != 0`,
//!
//! ```text
//! T  -> i sgn(n) (c_n^2 + s_n^2) = i sgn(n) coth(2 n kappa delta)
//! T~ -> i sgn(n)  2 c_n s_n      = i sgn(n) csch(2 n kappa delta)
//! ```
//!
//! derived from the mode expansion of the defining kernels `zeta1(x'-x)`
//! (principal value) and `zeta1(x'-x + i delta)`. The multipliers are
//! computed from the Bogoliubov coefficients `(c_n, s_n)` rather than from
//! hyperbolic functions so that they are bit-identical to the Fock-space
//! side, where the same combinations appear in `T rho_x` mode sums.
//!
//! `T` annihilates the mean mode; `T~` maps the mean `m` to the imaginary
//! constant `-i m` (its kernel has constant part `-i kappa / pi`), so in
//! real-field contexts it must only be applied to zero-mean inputs.
//!
//! [`pv_oracle_t`] and [`oracle_tt`] are direct quadratures of the defining
//! integrals, kept independent of the multiplier path; the multiplier is
//! trusted only because it reproduces the oracle (see tests and the
//! `transforms` verify suite).

use crate::params::{bogo, ModelParams};
use crate::specfun::{self, SpecFunError};
use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("grid size must be a positive power of two, got {0}")]
    BadGrid(usize),
    #[error("sample count {got} does not match grid size {expect}")]
    SampleCount { got: usize, expect: usize },
    #[error("quadrature did not reach the requested tolerance: est. error {est:.3e} > {tol:.3e}")]
    QuadratureTooCoarse { est: f64, tol: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// A real 2`ell`-periodic grid function stored by its Fourier coefficients
/// `f(x) = sum_n fhat_n e^{2 i kappa n x}`, with samples on the uniform grid
/// `x_j = -ell + 2 ell j / N`.
#[derive(Clone, Debug)]
pub struct PeriodicField {
    pub ell: f64,
    /// FFT-layout coefficients: index `k` holds mode `n = k` for `k <= N/2`,
    /// `n = k - N` otherwise.
    coeffs: Vec<Complex64>,
}

fn fft_mode(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

impl PeriodicField {
    pub fn zero(ell: f64, n_grid: usize) -> Result<Self, TransformError> {
        if n_grid == 0 || !n_grid.is_power_of_two() {
            return Err(TransformError::BadGrid(n_grid));
        }
        Ok(PeriodicField {
            ell,
            coeffs: vec![Complex64::new(0.0, 0.0); n_grid],
        })
    }

    /// Build from real samples at `x_j = -ell + 2 ell j / N`.
    pub fn from_samples(ell: f64, samples: &[f64]) -> Result<Self, TransformError> {
        let n = samples.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(TransformError::BadGrid(n));
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        // fhat_n = (1/N) sum_j f_j e^{-2 i kappa n x_j} = (-1)^n (1/N) FFT_n
        for (k, c) in buf.iter_mut().enumerate() {
            let m = fft_mode(k, n);
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            *c *= sign / n as f64;
        }
        Ok(PeriodicField { ell, coeffs: buf })
    }

    pub fn from_coeffs(ell: f64, coeffs: Vec<Complex64>) -> Result<Self, TransformError> {
        if coeffs.is_empty() || !coeffs.len().is_power_of_two() {
            return Err(TransformError::BadGrid(coeffs.len()));
        }
        Ok(PeriodicField { ell, coeffs })
    }

    pub fn n_grid(&self) -> usize {
        self.coeffs.len()
    }

    pub fn kappa(&self) -> f64 {
        std::f64::consts::PI / (2.0 * self.ell)
    }

    /// Coefficient of mode `n` (0 outside the resolved band).
    pub fn coeff(&self, n: i64) -> Complex64 {
        let len = self.coeffs.len() as i64;
        if n < -(len / 2) || n > len / 2 - 1 + (len % 2) {
            return Complex64::new(0.0, 0.0);
        }
        let k = n.rem_euclid(len) as usize;
        self.coeffs[k]
    }

    pub fn set_coeff(&mut self, n: i64, v: Complex64) {
        let len = self.coeffs.len() as i64;
        let k = n.rem_euclid(len) as usize;
        self.coeffs[k] = v;
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Complex samples at the grid points (exact inverse transform).
    pub fn samples_complex(&self) -> Vec<Complex64> {
        let n = self.coeffs.len();
        let mut buf = self.coeffs.clone();
        for (k, c) in buf.iter_mut().enumerate() {
            let m = fft_mode(k, n);
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            *c *= sign;
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        buf
    }

    /// Real parts of the samples; valid when the field is real-symmetric.
    pub fn samples(&self) -> Vec<f64> {
        self.samples_complex().iter().map(|c| c.re).collect()
    }

    /// Evaluate the trigonometric interpolant at an arbitrary point.
    pub fn eval(&self, x: f64) -> Complex64 {
        let kappa = self.kappa();
        let n = self.coeffs.len();
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, &c) in self.coeffs.iter().enumerate() {
            let m = fft_mode(k, n);
            sum += c * (2.0 * specfun::I * kappa * m as f64 * x).exp();
        }
        sum
    }

    /// Max deviation from the real-field symmetry `fhat_{-n} = conj(fhat_n)`.
    pub fn reality_defect(&self) -> f64 {
        let n = self.coeffs.len() as i64;
        let mut worst: f64 = self.coeffs[0].im.abs();
        for m in 1..n / 2 {
            let a = self.coeff(m);
            let b = self.coeff(-m);
            worst = worst.max((a - b.conj()).norm());
        }
        worst
    }

    /// k-th derivative: multiply mode `n` by `(2 i kappa n)^k`. The unpaired
    /// Nyquist mode is zeroed to preserve reality.
    pub fn derivative(&self, k: u32) -> PeriodicField {
        let n = self.coeffs.len();
        let kappa = self.kappa();
        let mut out = self.coeffs.clone();
        for (idx, c) in out.iter_mut().enumerate() {
            let m = fft_mode(idx, n);
            if m == -(n as i64) / 2 {
                *c = Complex64::new(0.0, 0.0);
                continue;
            }
            *c *= (2.0 * specfun::I * kappa * m as f64).powu(k);
        }
        PeriodicField {
            ell: self.ell,
            coeffs: out,
        }
    }

    /// Zero all modes with `|n| > N/3` (2/3-rule dealiasing).
    pub fn dealias(&mut self) {
        let n = self.coeffs.len();
        let cut = n as i64 / 3;
        for k in 0..n {
            let m = fft_mode(k, n);
            if m.abs() > cut {
                self.coeffs[k] = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// `int f g dx` over one period (complex-bilinear in the coefficients).
    pub fn integral_of_product(&self, other: &PeriodicField) -> Complex64 {
        let n = self.coeffs.len() as i64;
        let mut sum = Complex64::new(0.0, 0.0);
        for m in -(n / 2)..n / 2 {
            sum += self.coeff(m) * other.coeff(-m);
        }
        sum * 2.0 * self.ell
    }

    pub fn scale_add(&mut self, a: f64, other: &PeriodicField) {
        for (c, o) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *c += a * o;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples_complex()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Parse a samples CSV: one sample per line, either `value` or `x,value`
/// (the `x` column is ignored; samples are taken in row order). Lines that
/// are empty or start with `#` are skipped, as is a leading non-numeric
/// header row. The sample count must be a power of two.
pub fn parse_samples_csv(text: &str) -> Result<Vec<f64>, TransformError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or("").trim();
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            _ if i == 0 => continue, // header row
            _ => {
                return Err(TransformError::SampleCount {
                    got: i,
                    expect: usize::MAX,
                })
            }
        }
    }
    if out.is_empty() || !out.len().is_power_of_two() {
        return Err(TransformError::BadGrid(out.len()));
    }
    Ok(out)
}

/// Multiplier of `T` on mode `n`: `i sgn(n) (c_n^2 + s_n^2)`, `0` at `n = 0`.
pub fn multiplier_t(n: i64, params: &ModelParams) -> Complex64 {
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let b = bogo(n, params).expect("n != 0");
    specfun::I * (n.signum() as f64) * (b.c * b.c + b.s * b.s)
}

/// Multiplier of `T~` on mode `n`: `i sgn(n) 2 c_n s_n` for `n != 0`;
/// the mean mode maps to `-i` times itself.
pub fn multiplier_tt(n: i64, params: &ModelParams) -> Complex64 {
    if n == 0 {
        return -specfun::I;
    }
    let b = bogo(n, params).expect("n != 0");
    specfun::I * (n.signum() as f64) * 2.0 * b.c * b.s
}

fn apply_multiplier(f: &PeriodicField, mult: impl Fn(i64) -> Complex64) -> PeriodicField {
    let n = f.n_grid();
    let mut out = f.coeffs.clone();
    for (k, c) in out.iter_mut().enumerate() {
        let m = fft_mode(k, n);
        if m == -(n as i64) / 2 {
            // unpaired Nyquist mode cannot carry the odd imaginary multiplier
            *c = Complex64::new(0.0, 0.0);
            continue;
        }
        *c *= mult(m);
    }
    PeriodicField {
        ell: f.ell,
        coeffs: out,
    }
}

/// Apply `T` by its Fourier multiplier. Real fields map to real fields.
pub fn apply_t(f: &PeriodicField, params: &ModelParams) -> PeriodicField {
    apply_multiplier(f, |n| multiplier_t(n, params))
}

/// Apply `T~` by its Fourier multiplier. Returns the transformed field and a
/// warning flag set when the input had a non-negligible mean (the output then
/// carries an imaginary constant `-i * mean` and is not a real field).
pub fn apply_tt(f: &PeriodicField, params: &ModelParams) -> (PeriodicField, bool) {
    let warn = f.mean().norm() > 1e-13;
    (apply_multiplier(f, |n| multiplier_tt(n, params)), warn)
}

/// Direct principal-value quadrature of
/// `(T f)(x) = (1/pi) pv int zeta1(x'-x) f(x') dx'`
/// by a symmetric punctured midpoint rule centred on the singularity, so the
/// odd pole cancels pairwise. Returns `(value, error_estimate)`, the estimate
/// from comparison with the half-resolution rule.
pub fn pv_oracle_t<F: Fn(f64) -> f64>(
    f: &F,
    x: f64,
    params: &ModelParams,
    m_half_points: usize,
    tol: Option<f64>,
) -> Result<(f64, f64), TransformError> {
    let coarse = pv_midpoint(f, x, params, m_half_points / 2)?;
    let fine = pv_midpoint(f, x, params, m_half_points)?;
    let est = (fine - coarse).abs();
    if let Some(t) = tol {
        if est > t {
            return Err(TransformError::QuadratureTooCoarse { est, tol: t });
        }
    }
    Ok((fine, est))
}

fn pv_midpoint<F: Fn(f64) -> f64>(
    f: &F,
    x: f64,
    params: &ModelParams,
    m: usize,
) -> Result<f64, TransformError> {
    let h = params.ell / m as f64;
    let mut sum = 0.0;
    for j in 0..m {
        let d = (j as f64 + 0.5) * h;
        // paired points x +/- d: the kernel is odd in d up to the regular part
        let zp = specfun::zeta1(Complex64::new(d, 0.0), params)?.value.re;
        let zm = specfun::zeta1(Complex64::new(-d, 0.0), params)?.value.re;
        sum += zp * f(x + d) + zm * f(x - d);
    }
    Ok(sum * h / std::f64::consts::PI)
}

/// Direct quadrature of `(T~ f)(x) = (1/pi) int zeta1(x'-x + i delta) f(x') dx'`
/// (smooth kernel, plain midpoint rule). Returns the complex value and an
/// error estimate.
pub fn oracle_tt<F: Fn(f64) -> f64>(
    f: &F,
    x: f64,
    params: &ModelParams,
    n_points: usize,
    tol: Option<f64>,
) -> Result<(Complex64, f64), TransformError> {
    let coarse = tt_midpoint(f, x, params, n_points / 2)?;
    let fine = tt_midpoint(f, x, params, n_points)?;
    let est = (fine - coarse).norm();
    if let Some(t) = tol {
        if est > t {
            return Err(TransformError::QuadratureTooCoarse { est, tol: t });
        }
    }
    Ok((fine, est))
}

fn tt_midpoint<F: Fn(f64) -> f64>(
    f: &F,
    x: f64,
    params: &ModelParams,
    n: usize,
) -> Result<Complex64, TransformError> {
    let h = 2.0 * params.ell / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let xp = x - params.ell + (j as f64 + 0.5) * h;
        let ker = specfun::zeta1_shifted(Complex64::new(xp - x, 0.0), params)?.value;
        sum += ker * f(xp);
    }
    Ok(sum * h / std::f64::consts::PI)
}
