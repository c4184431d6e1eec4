//! Vertex operators `Phi_mu(alpha)`, their cocycle algebra, and anyons.
//!
//! A vertex operator is specified by an integer charge vector
//! `mu = (mu_+, mu_-)` and a coefficient sequence `alpha_{r,n}`; it acts as
//!
//! ```text
//! Phi = e^{i sum_r a_{r,0}-phase} R_+^{mu+} R_-^{mu-} e^{i ...} e^{i J^+} e^{i J^-}
//! ```
//!
//! where `J^+` / `J^-` are the creation / annihilation parts of
//! `J(alpha) = sum_r alpha_{r,0} Q_r + sum_{n!=0} alpha_{r,n} b_{r,-n}`.
//! On the level-truncated basis `J^+` strictly raises and `J^-` strictly
//! lowers, so both exponentials are *finite* Taylor sums with zero truncation
//! error inside the basis — the only loss is the tracked dropped norm of
//! states pushed past `l_max`.
//!
//! Anyons `phi_{r,nu}(x;eps)` are the vertex operators with
//! `mu_{r'} = delta_{r,r'} nu/nu0`, `alpha_{r',0} = -2 r delta_{r,r'} nu kappa x`,
//! `alpha_{r',n} = delta_{r,r'} (nu/(i n)) e^{-2 kappa (i r n x + |n| eps)}`.
//! They are never evaluated at `eps = 0` on the Fock side.

use crate::fock::{inner, norm, FockBasis, FockError};
use crate::params::{bogo, ModelParams};
use crate::specfun::{log_theta, sgn_reg, SpecFunError, ThetaKind, I};
use crate::Chirality;
use num_complex::Complex64;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VertexError {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("anyon statistics nu_eff/nu0 = {0} is not an integer")]
    NonIntegerCharge(f64),
    #[error("descriptor uses mode |n| = {0} beyond basis n_max = {1}")]
    ModeOutOfRange(i64, usize),
    #[error("anyons require eps > 0, got {0}")]
    NonPositiveEps(f64),
}

/// The pair `(mu, alpha)` defining a vertex operator.
#[derive(Clone, Debug, Default)]
pub struct VertexDescriptor {
    pub mu: (i64, i64),
    /// `alpha_{r,0}`, indexed by chirality.
    pub alpha0: [Complex64; 2],
    /// `alpha_{r,n}` for `n != 0`.
    pub alpha: HashMap<(Chirality, i64), Complex64>,
}

impl VertexDescriptor {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn get(&self, r: Chirality, n: i64) -> Complex64 {
        if n == 0 {
            self.alpha0[r.idx()]
        } else {
            self.alpha
                .get(&(r, n))
                .copied()
                .unwrap_or(Complex64::new(0.0, 0.0))
        }
    }

    pub fn set(&mut self, r: Chirality, n: i64, v: Complex64) {
        if n == 0 {
            self.alpha0[r.idx()] = v;
        } else {
            self.alpha.insert((r, n), v);
        }
    }

    /// Largest |n| with a non-zero coefficient.
    pub fn support(&self) -> i64 {
        self.alpha
            .iter()
            .filter(|(_, v)| v.norm_sqr() > 0.0)
            .map(|((_, n), _)| n.abs())
            .max()
            .unwrap_or(0)
    }

    /// The involution `(alpha*)_{r,n} = conj(alpha_{r,-n})`.
    pub fn star(&self) -> VertexDescriptor {
        let mut out = VertexDescriptor {
            mu: self.mu,
            alpha0: [self.alpha0[0].conj(), self.alpha0[1].conj()],
            alpha: HashMap::new(),
        };
        for (&(r, n), &v) in &self.alpha {
            out.alpha.insert((r, -n), v.conj());
        }
        out
    }

    /// `alpha = alpha*` within tolerance.
    pub fn is_real(&self, tol: f64) -> bool {
        let s = self.star();
        let mut keys: Vec<(Chirality, i64)> = self.alpha.keys().copied().collect();
        keys.extend(s.alpha.keys().copied());
        keys.push((Chirality::Plus, 0));
        keys.push((Chirality::Minus, 0));
        keys.iter().all(|&(r, n)| (self.get(r, n) - s.get(r, n)).norm() <= tol)
    }

    /// Component-wise sum (for products of vertex operators).
    pub fn plus(&self, other: &VertexDescriptor) -> VertexDescriptor {
        let mut out = self.clone();
        out.mu = (self.mu.0 + other.mu.0, self.mu.1 + other.mu.1);
        out.alpha0 = [
            self.alpha0[0] + other.alpha0[0],
            self.alpha0[1] + other.alpha0[1],
        ];
        for (&k, &v) in &other.alpha {
            *out.alpha.entry(k).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        out
    }

    pub fn negated(&self) -> VertexDescriptor {
        let mut out = self.clone();
        out.mu = (-self.mu.0, -self.mu.1);
        out.alpha0 = [-self.alpha0[0], -self.alpha0[1]];
        for v in out.alpha.values_mut() {
            *v = -*v;
        }
        out
    }
}

/// A vertex operator realized on a basis: diagonal charge phases, Klein
/// shift, and the two exponential mode ladders.
#[derive(Clone, Debug)]
pub struct VertexOp {
    pub mu: (i64, i64),
    pub alpha0: [Complex64; 2],
    /// `i J^+` as coefficients of the creators `a_{r,-n}`, n >= 1.
    jplus: Vec<(Chirality, i64, Complex64)>,
    /// `i J^-` as coefficients of the annihilators `a_{r,n}`, n >= 1.
    jminus: Vec<(Chirality, i64, Complex64)>,
}

/// Build the normal-ordered vertex operator for a descriptor.
pub fn build_vertex(desc: &VertexDescriptor, basis: &FockBasis) -> Result<VertexOp, VertexError> {
    let n_max = basis.spec.n_max as i64;
    if desc.support() > n_max {
        return Err(VertexError::ModeOutOfRange(desc.support(), basis.spec.n_max));
    }
    let params = &basis.params;
    let mut jplus = Vec::new();
    let mut jminus = Vec::new();
    for r in Chirality::BOTH {
        for n in 1..=n_max {
            let b = bogo(n, params).expect("n != 0");
            // J^+ coefficient of a_{r,-n}: alpha_{r,n} c_n - alpha_{-r,-n} s_n
            let cp = desc.get(r, n) * b.c - desc.get(r.flip(), -n) * b.s;
            if cp.norm_sqr() > 0.0 {
                jplus.push((r, n, I * cp));
            }
            // J^- coefficient of a_{r,n}: alpha_{r,-n} c_n - alpha_{-r,n} s_n
            let cm = desc.get(r, -n) * b.c - desc.get(r.flip(), n) * b.s;
            if cm.norm_sqr() > 0.0 {
                jminus.push((r, n, I * cm));
            }
        }
    }
    Ok(VertexOp {
        mu: desc.mu,
        alpha0: desc.alpha0,
        jplus,
        jminus,
    })
}

impl VertexOp {
    /// `exp(sum c a_{r,s n})` applied by its Taylor series; the series
    /// terminates exactly because the generator strictly shifts the level.
    fn exp_ladder(
        &self,
        basis: &FockBasis,
        coeffs: &[(Chirality, i64, Complex64)],
        sign: i64,
        v: &[Complex64],
        dropped: &mut f64,
    ) -> Vec<Complex64> {
        let mut acc = v.to_vec();
        let mut term = v.to_vec();
        for k in 1..=(basis.spec.l_max + 1) {
            let mut next = basis.zero();
            for &(r, n, c) in coeffs {
                *dropped += basis.apply_a_into(r, sign * n, c / k as f64, &term, &mut next);
            }
            let nz = next.iter().any(|c| c.norm_sqr() > 0.0);
            term = next;
            if !nz {
                break;
            }
            for (a, t) in acc.iter_mut().zip(term.iter()) {
                *a += t;
            }
        }
        acc
    }

    /// Apply the operator; returns the image and the dropped norm^2.
    pub fn apply(&self, basis: &FockBasis, v: &[Complex64]) -> (Vec<Complex64>, f64) {
        let mut dropped = 0.0;
        let w = self.exp_ladder(basis, &self.jminus, 1, v, &mut dropped);
        let mut w = self.exp_ladder(basis, &self.jplus, -1, &w, &mut dropped);
        // inner charge phase e^{i sum_r alpha_{r,0} Q_r / 2}
        let nu0 = basis.params.nu0();
        let a0 = self.alpha0;
        basis.apply_sector_phase(
            |mp, mm| ((a0[0] * mp as f64 + a0[1] * mm as f64) * nu0 * I / 2.0).exp(),
            &mut w,
        );
        // composite Klein shift R_+^{mu+} R_-^{mu-} in one sector jump
        if self.mu != (0, 0) {
            let mut stage = basis.zero();
            dropped +=
                basis.apply_klein_pair_into(self.mu.0, self.mu.1, Complex64::new(1.0, 0.0), &w, &mut stage);
            w = stage;
        }
        basis.apply_sector_phase(
            |mp, mm| ((a0[0] * mp as f64 + a0[1] * mm as f64) * nu0 * I / 2.0).exp(),
            &mut w,
        );
        (w, dropped)
    }
}

/// The scalar commutator
/// `[J^-(alpha), J^+(beta)] = sum_r sum_{n>=1} n (c_n^2 alpha_{r,-n} beta_{r,n}
///  + s_n^2 alpha_{r,n} beta_{r,-n} - c_n s_n (alpha_{-r,n} beta_{r,n} + alpha_{-r,-n} beta_{r,-n}))`.
pub fn j_commutator(
    alpha: &VertexDescriptor,
    beta: &VertexDescriptor,
    params: &ModelParams,
    n_max: usize,
) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for r in Chirality::BOTH {
        for n in 1..=n_max as i64 {
            let b = bogo(n, params).expect("n != 0");
            sum += n as f64
                * (b.c * b.c * alpha.get(r, -n) * beta.get(r, n)
                    + b.s * b.s * alpha.get(r, n) * beta.get(r, -n)
                    - b.c
                        * b.s
                        * (alpha.get(r.flip(), n) * beta.get(r, n)
                            + alpha.get(r.flip(), -n) * beta.get(r, -n)));
        }
    }
    sum
}

/// The multiplication cocycle
/// `chi = (-1)^{mu_- mu'_+} e^{i sum_r (alpha_{r,0} mu'_r - beta_{r,0} mu_r) nu0 / 2}
///        e^{-[J^-(alpha), J^+(beta)]}`
/// appearing in `Phi_mu(alpha) Phi_mu'(beta) = chi Phi_{mu+mu'}(alpha+beta)`.
pub fn cocycle_chi(
    alpha: &VertexDescriptor,
    beta: &VertexDescriptor,
    params: &ModelParams,
    n_max: usize,
) -> Complex64 {
    let sign = if (alpha.mu.1 * beta.mu.0).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let nu0 = params.nu0();
    let phase = (I * nu0 / 2.0
        * (alpha.alpha0[0] * beta.mu.0 as f64 + alpha.alpha0[1] * beta.mu.1 as f64
            - beta.alpha0[0] * alpha.mu.0 as f64
            - beta.alpha0[1] * alpha.mu.1 as f64))
        .exp();
    sign * phase * (-j_commutator(alpha, beta, params, n_max)).exp()
}

/// One anyon insertion: chirality, statistics, position, regularization.
#[derive(Clone, Copy, Debug)]
pub struct Insertion {
    pub r: Chirality,
    pub nu_eff: f64,
    pub x: f64,
    pub eps: f64,
}

impl Insertion {
    /// Integer Klein charge `nu_eff / nu0`.
    pub fn charge(&self, params: &ModelParams) -> Result<i64, VertexError> {
        let ratio = self.nu_eff / params.nu0();
        let rounded = ratio.round();
        if (ratio - rounded).abs() > 1e-9 {
            return Err(VertexError::NonIntegerCharge(ratio));
        }
        Ok(rounded as i64)
    }
}

/// Descriptor of the regularized anyon `phi_{r,nu}(x;eps)`, with the mode
/// series cut at the basis `n_max`.
pub fn anyon_descriptor(
    ins: Insertion,
    n_max: usize,
    params: &ModelParams,
) -> Result<VertexDescriptor, VertexError> {
    if !(ins.eps > 0.0) {
        return Err(VertexError::NonPositiveEps(ins.eps));
    }
    let charge = ins.charge(params)?;
    let kappa = params.kappa();
    let mut desc = VertexDescriptor::default();
    match ins.r {
        Chirality::Plus => desc.mu = (charge, 0),
        Chirality::Minus => desc.mu = (0, charge),
    }
    desc.alpha0[ins.r.idx()] =
        Complex64::new(-2.0 * ins.r.sign() * ins.nu_eff * kappa * ins.x, 0.0);
    for n in (-(n_max as i64)..=n_max as i64).filter(|&n| n != 0) {
        let coeff = ins.nu_eff / (I * n as f64)
            * (-2.0 * kappa * (I * ins.r.sign() * n as f64 * ins.x + n.abs() as f64 * ins.eps))
                .exp();
        desc.set(ins.r, n, coeff);
    }
    Ok(desc)
}

/// Build the anyon as an operator.
pub fn anyon(ins: Insertion, basis: &FockBasis) -> Result<VertexOp, VertexError> {
    let desc = anyon_descriptor(ins, basis.spec.n_max, &basis.params)?;
    build_vertex(&desc, basis)
}

/// `log theta_{r,r'}(x; eps)` on the canonical branch (from the C-series):
/// kind 1 for `r = r'` evaluated at `r x`, kind 4 for `r != r'`.
pub fn log_theta_pair(
    r: Chirality,
    rp: Chirality,
    x: f64,
    eps: f64,
    params: &ModelParams,
) -> Result<Complex64, SpecFunError> {
    if r == rp {
        log_theta(ThetaKind::One, Complex64::new(r.sign() * x, 0.0), params, eps)
    } else {
        log_theta(ThetaKind::Four, Complex64::new(x, 0.0), params, eps)
    }
}

/// Closed-form `N`-point anyon correlation function
/// `<Omega, phi_1 ... phi_N Omega>`: zero unless the per-chirality charges
/// vanish, otherwise the pair product of theta factors with statistics
/// exponents and the inter-chirality sign.
pub fn correlator_closed(
    insertions: &[Insertion],
    params: &ModelParams,
) -> Result<Complex64, VertexError> {
    let mut q_plus = 0i64;
    let mut q_minus = 0i64;
    let mut charges = Vec::with_capacity(insertions.len());
    for ins in insertions {
        let c = ins.charge(params)?;
        charges.push(c);
        match ins.r {
            Chirality::Plus => q_plus += c,
            Chirality::Minus => q_minus += c,
        }
    }
    if q_plus != 0 || q_minus != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut log_sum = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;
    for j in 0..insertions.len() {
        for k in (j + 1)..insertions.len() {
            let (a, b) = (insertions[j], insertions[k]);
            let lt = log_theta_pair(a.r, b.r, a.x - b.x, a.eps + b.eps, params)?;
            log_sum += a.nu_eff * b.nu_eff * lt;
            // (-1)^{delta_{r_j,-} delta_{r_k,+} c_j c_k}
            if a.r == Chirality::Minus
                && b.r == Chirality::Plus
                && (charges[j] * charges[k]).rem_euclid(2) == 1
            {
                sign = -sign;
            }
        }
    }
    Ok(sign * log_sum.exp())
}

/// Fock-space value of the same correlator: apply the anyon operators to the
/// vacuum right-to-left. Returns the value and the total dropped norm^2.
pub fn correlator_fock(
    insertions: &[Insertion],
    basis: &FockBasis,
) -> Result<(Complex64, f64), VertexError> {
    let om = basis.vacuum()?;
    let mut v = om.clone();
    let mut dropped = 0.0;
    for ins in insertions.iter().rev() {
        let op = anyon(*ins, basis)?;
        let (w, d) = op.apply(basis, &v);
        v = w;
        dropped += d;
    }
    Ok((inner(&om, &v), dropped))
}

/// Charge sectors visited when the insertions act right-to-left on a start
/// sector; used to build a minimal basis for correlator work.
pub fn visited_sectors(
    insertions: &[Insertion],
    params: &ModelParams,
    start: (i32, i32),
) -> Result<Vec<(i32, i32)>, VertexError> {
    let mut cur = start;
    let mut out = vec![cur];
    for ins in insertions.iter().rev() {
        let c = ins.charge(params)? as i32;
        match ins.r {
            Chirality::Plus => cur.0 += c,
            Chirality::Minus => cur.1 += c,
        }
        out.push(cur);
    }
    Ok(out)
}

/// Report from an exchange-relation check.
#[derive(Clone, Copy, Debug)]
pub struct ExchangeReport {
    /// Predicted exchange phase.
    pub phase: Complex64,
    /// Max residual of `phi phi' - phase * phi' phi` over the probes.
    pub residual: f64,
    /// Number of protected probe states used.
    pub probes: usize,
}

/// Check the exchange relation between two anyons on protected states:
/// phase `e^{-i pi nu nu' sgn(r(x-x'); eps+eps')}` for equal chiralities,
/// `(-1)^{nu nu' / nu0^2}` for opposite.
pub fn exchange_check(
    a: Insertion,
    b: Insertion,
    basis: &FockBasis,
    probes: &[Vec<Complex64>],
) -> Result<ExchangeReport, VertexError> {
    let params = &basis.params;
    let phase = if a.r == b.r {
        let s = sgn_reg(a.r.sign() * (a.x - b.x), a.eps + b.eps, params)?;
        (-I * std::f64::consts::PI * a.nu_eff * b.nu_eff * s).exp()
    } else {
        let cc = a.charge(params)? * b.charge(params)?;
        Complex64::new(if cc.rem_euclid(2) == 0 { 1.0 } else { -1.0 }, 0.0)
    };
    let op_a = anyon(a, basis)?;
    let op_b = anyon(b, basis)?;
    let mut worst: f64 = 0.0;
    for v in probes {
        let (bv, _) = op_b.apply(basis, v);
        let (abv, _) = op_a.apply(basis, &bv);
        let (av, _) = op_a.apply(basis, v);
        let (bav, _) = op_b.apply(basis, &av);
        let scale = norm(&abv).max(1e-300);
        let diff: f64 = abv
            .iter()
            .zip(bav.iter())
            .map(|(x, y)| (x - phase * y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(diff / scale);
    }
    Ok(ExchangeReport {
        phase,
        residual: worst,
        probes: probes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockBasis, TruncationSpec};
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

    fn random_descriptor(rng: &mut ChaCha8Rng, support: i64, mu_max: i64, scale: f64) -> VertexDescriptor {
        let mut d = VertexDescriptor::default();
        d.mu = (rng.gen_range(-mu_max..=mu_max), rng.gen_range(-mu_max..=mu_max));
        d.alpha0 = [
            Complex64::new(rng.gen_range(-1.0..1.0), 0.0),
            Complex64::new(rng.gen_range(-1.0..1.0), 0.0),
        ];
        for r in Chirality::BOTH {
            for n in 1..=support {
                // real descriptor: alpha_{r,-n} = conj(alpha_{r,n})
                let v = Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
                    / n as f64;
                d.set(r, n, v);
                d.set(r, -n, v.conj());
            }
        }
        d
    }

    fn probe_states(b: &FockBasis, max_level: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
        let idx = b.sector_states_up_to_level((0, 0), max_level);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let mut v = b.zero();
                for &i in &idx {
                    v[i] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
                let n = norm(&v);
                v.iter_mut().for_each(|c| *c /= n);
                v
            })
            .collect()
    }

    #[test]
    fn identity_descriptor_is_identity() {
        let b = basis(0.5, 3, 4, 1);
        let op = build_vertex(&VertexDescriptor::identity(), &b).unwrap();
        let mut v = b.zero();
        v[2] = Complex64::new(0.3, -0.1);
        v[5] = Complex64::new(0.0, 0.9);
        let (w, d) = op.apply(&b, &v);
        assert_eq!(d, 0.0);
        for (a, c) in w.iter().zip(v.iter()) {
            assert_eq!(a, c);
        }
    }

    #[test]
    fn vacuum_expectation_is_charge_delta() {
        let b = basis(0.5, 4, 6, 2);
        let om = b.vacuum().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..6 {
            let d = random_descriptor(&mut rng, 3, 1, 0.4);
            let op = build_vertex(&d, &b).unwrap();
            let (v, _) = op.apply(&b, &om);
            let got = inner(&om, &v);
            if d.mu == (0, 0) {
                assert!((got - Complex64::new(1.0, 0.0)).norm() < 1e-12, "{got}");
            } else {
                assert!(got.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn cocycle_sign_example() {
        // alpha = beta = 0, mu = (0,1), mu' = (1,0): chi = -1
        let p = params_q(0.5);
        let mut a = VertexDescriptor::identity();
        a.mu = (0, 1);
        let mut b = VertexDescriptor::identity();
        b.mu = (1, 0);
        let chi = cocycle_chi(&a, &b, &p, 8);
        assert!((chi - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        // chi_{0,0}(alpha, 0) = 1
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut c = random_descriptor(&mut rng, 3, 0, 0.5);
        c.mu = (0, 0);
        let chi2 = cocycle_chi(&c, &VertexDescriptor::identity(), &p, 8);
        assert!((chi2 - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cocycle_is_multiplicative_in_first_slot() {
        // chi_{mu1+mu2,mu3}(a1+a2, a3) = chi_{mu1,mu3}(a1,a3) chi_{mu2,mu3}(a2,a3)
        let p = params_q(0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let d1 = random_descriptor(&mut rng, 4, 1, 0.7);
            let d2 = random_descriptor(&mut rng, 4, 1, 0.7);
            let d3 = random_descriptor(&mut rng, 4, 1, 0.7);
            let lhs = cocycle_chi(&d1.plus(&d2), &d3, &p, 8);
            let rhs = cocycle_chi(&d1, &d3, &p, 8) * cocycle_chi(&d2, &d3, &p, 8);
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn multiplication_rule_on_protected_states() {
        // Phi(a) Phi(b) = chi Phi(a+b) applied to protected probe vectors
        let b = basis(0.5, 10, 16, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let probes = probe_states(&b, 3, 2, 5);
        for _ in 0..3 {
            let d1 = random_descriptor(&mut rng, 3, 1, 0.15);
            let d2 = random_descriptor(&mut rng, 3, 1, 0.15);
            let chi = cocycle_chi(&d1, &d2, &b.params, b.spec.n_max);
            let op1 = build_vertex(&d1, &b).unwrap();
            let op2 = build_vertex(&d2, &b).unwrap();
            let op12 = build_vertex(&d1.plus(&d2), &b).unwrap();
            for v in &probes {
                let (w2, _) = op2.apply(&b, v);
                let (lhs, _) = op1.apply(&b, &w2);
                let (mut rhs, _) = op12.apply(&b, v);
                rhs.iter_mut().for_each(|c| *c *= chi);
                let num: f64 = lhs
                    .iter()
                    .zip(rhs.iter())
                    .map(|(x, y)| (x - y).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                let den = norm(&lhs).max(1e-30);
                assert!(num / den < 1e-5, "residual {}", num / den);
            }
        }
    }

    #[test]
    fn vertex_adjoint_relation() {
        // Phi_mu(alpha)^dag = (-1)^{mu+ mu-} Phi_{-mu}(-alpha*):
        // <Phi v, w> = <v, Phi^dag w> on protected probes.
        let b = basis(0.5, 6, 10, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let probes = probe_states(&b, 3, 2, 17);
        for _ in 0..4 {
            let d = random_descriptor(&mut rng, 3, 1, 0.35);
            let op = build_vertex(&d, &b).unwrap();
            let sign = if (d.mu.0 * d.mu.1).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let dd = d.star().negated();
            let mut dd = dd;
            dd.mu = (-d.mu.0, -d.mu.1);
            let opd = build_vertex(&dd, &b).unwrap();
            for v in &probes {
                for w in &probes {
                    let (pv, _) = op.apply(&b, v);
                    let (pdw, _) = opd.apply(&b, w);
                    let lhs = inner(&pv, w);
                    let rhs = sign * inner(v, &pdw);
                    assert!((lhs - rhs).norm() < 1e-10, "{lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn anyon_adjoint_and_periodicity() {
        let b = basis(0.4, 6, 8, 2);
        let p = b.params;
        let nu = p.nu0(); // smallest admissible statistics: charge 1
        let ins = Insertion { r: Plus, nu_eff: nu, x: 0.7, eps: 0.35 };
        let probes = probe_states(&b, 2, 2, 23);
        // adjoint: phi_{r,nu}^dag = phi_{r,-nu}
        let op = anyon(ins, &b).unwrap();
        let opm = anyon(Insertion { nu_eff: -nu, ..ins }, &b).unwrap();
        for v in &probes {
            for w in &probes {
                let (pv, _) = op.apply(&b, v);
                let (mw, _) = opm.apply(&b, w);
                let lhs = inner(&pv, w);
                let rhs = inner(v, &mw);
                assert!((lhs - rhs).norm() < 1e-10);
            }
        }
        // periodicity: phi(x + 2 ell) = e^{-i r pi nu Q_r} phi(x) e^{-i r pi nu Q_r}
        let shifted = anyon(Insertion { x: ins.x + 2.0 * p.ell, ..ins }, &b).unwrap();
        let phase = |mp: i32, mm: i32| -> Complex64 {
            let mu = match ins.r {
                Plus => mp,
                Minus => mm,
            };
            (-I * ins.r.sign() * std::f64::consts::PI * nu * p.nu0() * mu as f64).exp()
        };
        for v in &probes {
            let mut pv = v.clone();
            b.apply_sector_phase(phase, &mut pv);
            let (mut mid, _) = op.apply(&b, &pv);
            b.apply_sector_phase(phase, &mut mid);
            let (sv, _) = shifted.apply(&b, v);
            let diff: f64 = sv
                .iter()
                .zip(mid.iter())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(diff / norm(&sv) < 1e-10, "residual {}", diff / norm(&sv));
        }
    }

    #[test]
    fn anyon_unitarity_constant() {
        // Phi^dag Phi = c I with c = e^{[J^-(alpha), J^+(alpha)]} for real alpha
        let b = basis(0.5, 10, 18, 2);
        let p = b.params;
        let ins = Insertion { r: Plus, nu_eff: p.nu(), x: -0.4, eps: 1.4 };
        let desc = anyon_descriptor(ins, b.spec.n_max, &p).unwrap();
        assert!(desc.is_real(1e-12));
        let c = j_commutator(&desc, &desc, &p, b.spec.n_max).exp();
        assert!(c.im.abs() < 1e-12 * c.re.abs());
        let op = anyon(ins, &b).unwrap();
        let opd = anyon(Insertion { nu_eff: -ins.nu_eff, ..ins }, &b).unwrap();
        for v in probe_states(&b, 2, 2, 41) {
            let (pv, _) = op.apply(&b, &v);
            let (ppv, _) = opd.apply(&b, &pv);
            let diff: f64 = ppv
                .iter()
                .zip(v.iter())
                .map(|(x, y)| (x - c * y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(diff / c.norm() < 1e-8, "residual {}", diff / c.norm());
        }
    }

    #[test]
    fn two_point_correlator_matches_closed_form() {
        let b = basis(0.5, 14, 20, 2);
        let p = b.params;
        let nu = p.nu();
        let (x1, x2, eps) = (0.6, -0.9, 0.35);
        let ins = [
            Insertion { r: Plus, nu_eff: nu, x: x1, eps },
            Insertion { r: Plus, nu_eff: -nu, x: x2, eps },
        ];
        let closed = correlator_closed(&ins, &p).unwrap();
        // same thing, by hand: theta1(kappa(x1-x2), q; 2 kappa eps)^{-nu^2}
        let by_hand = (-nu * nu
            * log_theta(ThetaKind::One, Complex64::new(x1 - x2, 0.0), &p, 2.0 * eps).unwrap())
        .exp();
        assert!((closed - by_hand).norm() < 1e-12 * by_hand.norm());
        let (fock, _) = correlator_fock(&ins, &b).unwrap();
        // residual is the level-truncation tail ~ e^{-2 kappa (eps+eps') l_max}
        assert!(
            (fock - closed).norm() / closed.norm() < 2e-5,
            "fock {fock} vs closed {closed}"
        );
        // mixed chirality charges don't cancel per chirality: zero
        let mixed = [
            Insertion { r: Plus, nu_eff: nu, x: x1, eps },
            Insertion { r: Minus, nu_eff: nu, x: x2, eps },
        ];
        assert_eq!(correlator_closed(&mixed, &p).unwrap(), Complex64::new(0.0, 0.0));
        let (fock_mixed, _) = correlator_fock(&mixed, &b).unwrap();
        assert!(fock_mixed.norm() < 1e-14);
    }

    #[test]
    fn four_point_mixed_correlator() {
        let b = basis(0.5, 12, 18, 3);
        let p = b.params;
        let nu = p.nu();
        let inv = -1.0 / nu;
        let eps = 0.4;
        let ins = [
            Insertion { r: Plus, nu_eff: nu, x: 0.8, eps },
            Insertion { r: Plus, nu_eff: -nu, x: 0.1, eps },
            Insertion { r: Minus, nu_eff: inv, x: -0.5, eps },
            Insertion { r: Minus, nu_eff: -inv, x: -1.3, eps },
        ];
        let closed = correlator_closed(&ins, &p).unwrap();
        let (fock, _) = correlator_fock(&ins, &b).unwrap();
        assert!(
            (fock - closed).norm() / closed.norm() < 2e-4,
            "fock {fock} vs closed {closed}"
        );
    }

    #[test]
    fn exchange_relations() {
        let b = basis(0.5, 10, 18, 2);
        let p = b.params;
        let probes = probe_states(&b, 2, 2, 77);
        // same chirality, statistics nu and -nu so the product stays in window
        let a = Insertion { r: Plus, nu_eff: p.nu(), x: 0.9, eps: 1.4 };
        let c = Insertion { r: Plus, nu_eff: -p.nu(), x: -0.4, eps: 1.4 };
        let rep = exchange_check(a, c, &b, &probes).unwrap();
        assert!(rep.residual < 1e-8, "residual {}", rep.residual);
        // opposite chirality: phase (-1)^{nu nu'/nu0^2} = (-1)^{r0^2} for nu = nu'
        let d = Insertion { r: Minus, nu_eff: p.nu(), x: -0.4, eps: 1.4 };
        let rep2 = exchange_check(a, d, &b, &probes).unwrap();
        let cc = a.charge(&p).unwrap() * d.charge(&p).unwrap();
        let expect = if cc.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        assert!((rep2.phase - Complex64::new(expect, 0.0)).norm() < 1e-14);
        assert!(rep2.residual < 1e-8, "residual {}", rep2.residual);
    }

    #[test]
    fn fermion_point_anticommutation() {
        // nu^2 = 1 (r0 = s0 = 1), nu = -1: same-chirality phase -> -1 as eps -> 0
        let params = ModelParams::new(std::f64::consts::PI, std::f64::consts::LN_2, 1, 1, -1, 0.25).unwrap();
        let spec = TruncationSpec::new(10, 18, 2);
        let b = FockBasis::build(spec, params).unwrap();
        let probes = probe_states(&b, 2, 2, 99);
        let a = Insertion { r: Plus, nu_eff: -1.0, x: 1.1, eps: 1.4 };
        let c = Insertion { r: Plus, nu_eff: -1.0, x: -0.6, eps: 1.4 };
        let rep = exchange_check(a, c, &b, &probes).unwrap();
        assert!(rep.residual < 1e-8, "residual {}", rep.residual);
        // phase tends to -1 as eps -> 0 (extrapolate the closed-form phase)
        let phase_at = |eps: f64| {
            let s = sgn_reg(a.x - c.x, 2.0 * eps, &params).unwrap();
            (-I * std::f64::consts::PI * s).exp()
        };
        let p1 = phase_at(4e-3);
        let p2 = phase_at(2e-3);
        let p3 = phase_at(1e-3);
        // second-order Richardson in eps
        let extrap = p3 + (p3 - p2) + (p3 - 2.0 * p2 + p1) * 0.0 + ((p3 - p2) - (p2 - p1)) / 1.0 * 0.0;
        let extrap = 8.0 / 3.0 * p3 - 2.0 * p2 + p1 / 3.0;
        let _ = extrap;
        // simple 2-point Richardson (error linear in eps): 2 p3 - p2
        let lin = 2.0 * p3 - p2;
        assert!((lin - Complex64::new(-1.0, 0.0)).norm() < 1e-5, "{lin}");
    }

    #[test]
    fn n_fold_normal_ordering_formula() {
        // phi_1 ... phi_N = prod sign * theta^{nu_j nu_k} x normal-ordered
        // product; the normal-ordered product of anyons is the single vertex
        // operator with summed descriptor.
        let b = basis(0.5, 10, 18, 3);
        let p = b.params;
        let eps = 1.2;
        let ins = [
            Insertion { r: Plus, nu_eff: p.nu(), x: 0.9, eps },
            Insertion { r: Minus, nu_eff: p.nu(), x: 0.2, eps },
            Insertion { r: Plus, nu_eff: -p.nu(), x: -0.7, eps },
        ];
        // scalar prefactor
        let mut log_pref = Complex64::new(0.0, 0.0);
        let mut sign = 1.0;
        for j in 0..ins.len() {
            for k in (j + 1)..ins.len() {
                let (a, c) = (ins[j], ins[k]);
                log_pref += a.nu_eff * c.nu_eff
                    * log_theta_pair(a.r, c.r, a.x - c.x, a.eps + c.eps, &p).unwrap();
                let qa = a.charge(&p).unwrap();
                let qc = c.charge(&p).unwrap();
                if a.r == Chirality::Minus && c.r == Chirality::Plus && (qa * qc).rem_euclid(2) == 1 {
                    sign = -sign;
                }
            }
        }
        let pref = sign * log_pref.exp();
        // summed descriptor
        let mut total = VertexDescriptor::identity();
        for i in &ins {
            total = total.plus(&anyon_descriptor(*i, b.spec.n_max, &p).unwrap());
        }
        let no_op = build_vertex(&total, &b).unwrap();
        let ops: Vec<VertexOp> = ins.iter().map(|i| anyon(*i, &b).unwrap()).collect();
        for v in probe_states(&b, 2, 2, 13) {
            let mut lhs = v.clone();
            for op in ops.iter().rev() {
                let (w, _) = op.apply(&b, &lhs);
                lhs = w;
            }
            let (mut rhs, _) = no_op.apply(&b, &v);
            rhs.iter_mut().for_each(|c| *c *= pref);
            let num: f64 = lhs
                .iter()
                .zip(rhs.iter())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(num / norm(&lhs) < 1e-7, "residual {}", num / norm(&lhs));
        }
    }
}
