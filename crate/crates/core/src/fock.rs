//! Truncated two-chirality bosonic Fock space with Klein factors.
//!
//! Basis states are `eta = prod a_{r,-n}^{m_{r,n}} / sqrt(m! n^m) . R_+^{mu+} R_-^{mu-} Omega`,
//! orthonormal by construction, truncated three ways:
//! * modes `1..=n_max` per chirality,
//! * total level `sum n m_{r,n} <= l_max`,
//! * Klein charges inside a window (or an explicit sector list).
//!
//! Layout: the oscillator content (one 2-colored bounded partition) is shared
//! by all charge sectors, so a global index is `sector * n_occ + occ`, with
//! occupation states ordered by (level, occupation-lex) and sectors sorted.
//! Operators that push a state outside the truncation drop it; every apply
//! reports the dropped norm so a check can certify its protected subspace.
//!
//! Amplitude conventions (`[a_{r,n}, a_{r,-n}] = n`):
//! `a_{r,n}|m> = sqrt(n m) |m-1>`, `a_{r,-n}|m> = sqrt(n (m+1)) |m+1>` for
//! `n > 0`, and `a_{r,0}` diagonal with eigenvalue `mu_r`. Klein factors act
//! on the canonical charge labels as `R_+ |mu+, mu-> = (-1)^{mu-} |mu+ + 1, mu->`
//! and `R_- |mu+, mu-> = |mu+, mu- + 1>`, which realizes `R_+ R_- = -R_- R_+`
//! and `<Omega, R_+^a R_-^b Omega> = delta_{a,0} delta_{b,0}`.

use crate::params::{bogo, ModelParams};
use crate::Chirality;
use num_complex::Complex64;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("basis would hold {0} states, above the memory guard {1}")]
    TooLarge(usize, usize),
    #[error("mode |n| = {0} outside n_max = {1}")]
    ModeOutOfRange(i64, usize),
    #[error("vacuum sector (0,0) not present in this basis")]
    NoVacuum,
    #[error("pair-coherent tail {0:.3e} above the requested bound {1:.3e}")]
    TailBound(f64, f64),
    #[error("vector length {0} does not match basis dimension {1}")]
    DimensionMismatch(usize, usize),
}

/// Truncation parameters of the Fock basis.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct TruncationSpec {
    /// Oscillator modes `1..=n_max` per chirality.
    pub n_max: usize,
    /// Maximum total level `sum_{r,n} n m_{r,n}`.
    pub l_max: usize,
    /// Klein charge window `|mu_+-| <= mu_max` (ignored by `with_sectors`).
    pub mu_max: i32,
    /// Memory guard on the total state count.
    pub max_states: usize,
}

impl TruncationSpec {
    pub fn new(n_max: usize, l_max: usize, mu_max: i32) -> Self {
        TruncationSpec {
            n_max,
            l_max,
            mu_max,
            max_states: 50_000_000,
        }
    }
}

/// View of one basis state.
#[derive(Clone, Copy, Debug)]
pub struct BasisState<'a> {
    pub occ: &'a [u8],
    pub mu_plus: i32,
    pub mu_minus: i32,
    pub level: usize,
}

impl<'a> BasisState<'a> {
    pub fn occupation(&self, r: Chirality, n: usize) -> u8 {
        self.occ[r.idx() * (self.occ.len() / 2) + (n - 1)]
    }
}

/// The truncated basis plus cached single-mode transition tables.
pub struct FockBasis {
    pub spec: TruncationSpec,
    pub params: ModelParams,
    stride: usize,
    occ: Vec<u8>,
    levels: Vec<u16>,
    occ_index: HashMap<Vec<u8>, u32>,
    sectors: Vec<(i32, i32)>,
    sector_index: HashMap<(i32, i32), u32>,
    /// `lower[r][n-1][occ]`: target occ index under `a_{r,n}` (occupation-1),
    /// `u32::MAX` when the occupation is 0.
    lower: Vec<Vec<u32>>,
    /// `raise[r][n-1][occ]`: target occ index under `a_{r,-n}`,
    /// `u32::MAX` when the result leaves the level truncation.
    raise: Vec<Vec<u32>>,
}

const NONE: u32 = u32::MAX;

fn enumerate_occupations(n_max: usize, l_max: usize) -> Vec<Vec<u8>> {
    // Bounded 2-colored partitions: slots 0..2*n_max, slot s has mode
    // (s % n_max) + 1.
    let mut out: Vec<Vec<u8>> = Vec::new();
    let mut cur = vec![0u8; 2 * n_max];
    fn rec(slot: usize, budget: usize, n_max: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if slot == cur.len() {
            out.push(cur.clone());
            return;
        }
        let mode = (slot % n_max) + 1;
        let max_m = budget / mode;
        for m in 0..=max_m {
            cur[slot] = m as u8;
            rec(slot + 1, budget - m * mode, n_max, cur, out);
        }
        cur[slot] = 0;
    }
    rec(0, l_max, n_max, &mut cur, &mut out);
    out
}

impl FockBasis {
    /// Basis over the full charge window `|mu_+-| <= mu_max`.
    pub fn build(spec: TruncationSpec, params: ModelParams) -> Result<Self, FockError> {
        let mut sectors = Vec::new();
        for mp in -spec.mu_max..=spec.mu_max {
            for mm in -spec.mu_max..=spec.mu_max {
                sectors.push((mp, mm));
            }
        }
        Self::with_sectors(spec, params, sectors)
    }

    /// Basis over an explicit list of charge sectors (deduplicated, sorted).
    pub fn with_sectors(
        spec: TruncationSpec,
        params: ModelParams,
        mut sectors: Vec<(i32, i32)>,
    ) -> Result<Self, FockError> {
        sectors.sort_unstable();
        sectors.dedup();
        let mut occs = enumerate_occupations(spec.n_max, spec.l_max);
        let level_of = |o: &[u8]| -> usize {
            o.iter()
                .enumerate()
                .map(|(s, &m)| ((s % spec.n_max) + 1) * m as usize)
                .sum()
        };
        occs.sort_by(|a, b| (level_of(a), &a[..]).cmp(&(level_of(b), &b[..])));
        let total = occs.len() * sectors.len();
        if total > spec.max_states {
            return Err(FockError::TooLarge(total, spec.max_states));
        }
        let stride = 2 * spec.n_max;
        let mut occ_flat = Vec::with_capacity(occs.len() * stride);
        let mut levels = Vec::with_capacity(occs.len());
        let mut occ_index = HashMap::with_capacity(occs.len());
        for (i, o) in occs.iter().enumerate() {
            occ_flat.extend_from_slice(o);
            levels.push(level_of(o) as u16);
            occ_index.insert(o.clone(), i as u32);
        }
        let sector_index = sectors
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i as u32))
            .collect();

        // single-mode transition tables shared by every sector
        let n_occ = occs.len();
        let mut lower = vec![vec![NONE; n_occ]; stride];
        let mut raise = vec![vec![NONE; n_occ]; stride];
        let mut scratch = vec![0u8; stride];
        for (i, o) in occs.iter().enumerate() {
            for slot in 0..stride {
                let mode = (slot % spec.n_max) + 1;
                if o[slot] > 0 {
                    scratch.copy_from_slice(o);
                    scratch[slot] -= 1;
                    lower[slot][i] = occ_index[&scratch];
                }
                if levels[i] as usize + mode <= spec.l_max && o[slot] < u8::MAX {
                    scratch.copy_from_slice(o);
                    scratch[slot] += 1;
                    if let Some(&j) = occ_index.get(&scratch) {
                        raise[slot][i] = j;
                    }
                }
            }
        }

        Ok(FockBasis {
            spec,
            params,
            stride,
            occ: occ_flat,
            levels,
            occ_index,
            sectors,
            sector_index,
            lower,
            raise,
        })
    }

    pub fn n_occ(&self) -> usize {
        self.levels.len()
    }

    pub fn n_sectors(&self) -> usize {
        self.sectors.len()
    }

    pub fn dim(&self) -> usize {
        self.n_occ() * self.n_sectors()
    }

    pub fn sectors(&self) -> &[(i32, i32)] {
        &self.sectors
    }

    pub fn sector_of(&self, idx: usize) -> (i32, i32) {
        self.sectors[idx / self.n_occ()]
    }

    pub fn state(&self, idx: usize) -> BasisState<'_> {
        let (sec, occ) = (idx / self.n_occ(), idx % self.n_occ());
        let (mu_plus, mu_minus) = self.sectors[sec];
        BasisState {
            occ: &self.occ[occ * self.stride..(occ + 1) * self.stride],
            mu_plus,
            mu_minus,
            level: self.levels[occ] as usize,
        }
    }

    pub fn level_of(&self, idx: usize) -> usize {
        self.levels[idx % self.n_occ()] as usize
    }

    /// Index of a state given occupations and charges, if present.
    pub fn index_of(&self, occ: &[u8], mu: (i32, i32)) -> Option<usize> {
        let s = *self.sector_index.get(&mu)? as usize;
        let o = *self.occ_index.get(occ)? as usize;
        Some(s * self.n_occ() + o)
    }

    /// Index of the vacuum `Omega`.
    pub fn vacuum_index(&self) -> Result<usize, FockError> {
        self.index_of(&vec![0u8; self.stride], (0, 0))
            .ok_or(FockError::NoVacuum)
    }

    pub fn vacuum(&self) -> Result<Vec<Complex64>, FockError> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        v[self.vacuum_index()?] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn zero(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.dim()]
    }

    fn slot(&self, r: Chirality, n: usize) -> usize {
        r.idx() * self.spec.n_max + (n - 1)
    }

    /// Apply `a_{r,n}` (annihilator for n>0, creator for n<0, charge for n=0)
    /// to `v`, accumulating `coeff * a v` into `out`. Returns dropped norm^2.
    pub fn apply_a_into(
        &self,
        r: Chirality,
        n: i64,
        coeff: Complex64,
        v: &[Complex64],
        out: &mut [Complex64],
    ) -> f64 {
        let n_occ = self.n_occ();
        if n == 0 {
            for (sec_i, &(mp, mm)) in self.sectors.iter().enumerate() {
                let mu = match r {
                    Chirality::Plus => mp,
                    Chirality::Minus => mm,
                } as f64;
                let base = sec_i * n_occ;
                for o in 0..n_occ {
                    out[base + o] += coeff * mu * v[base + o];
                }
            }
            return 0.0;
        }
        let mode = n.unsigned_abs() as usize;
        assert!(mode <= self.spec.n_max, "mode {n} beyond n_max");
        let slot = self.slot(r, mode);
        let mut dropped = 0.0;
        if n > 0 {
            let table = &self.lower[slot];
            for sec_i in 0..self.sectors.len() {
                let base = sec_i * n_occ;
                for o in 0..n_occ {
                    let src = v[base + o];
                    if src.norm_sqr() == 0.0 {
                        continue;
                    }
                    let tgt = table[o];
                    if tgt != NONE {
                        let m = self.occ[o * self.stride + slot] as f64;
                        let w = (mode as f64 * m).sqrt();
                        out[base + tgt as usize] += coeff * w * src;
                    }
                }
            }
        } else {
            let table = &self.raise[slot];
            for sec_i in 0..self.sectors.len() {
                let base = sec_i * n_occ;
                for o in 0..n_occ {
                    let src = v[base + o];
                    if src.norm_sqr() == 0.0 {
                        continue;
                    }
                    let tgt = table[o];
                    let m = self.occ[o * self.stride + slot] as f64;
                    let w = (mode as f64 * (m + 1.0)).sqrt();
                    if tgt != NONE {
                        out[base + tgt as usize] += coeff * w * src;
                    } else {
                        dropped += (coeff * w * src).norm_sqr();
                    }
                }
            }
        }
        dropped
    }

    /// Apply `R_r^{pow}` in one jump:
    /// `R_+^p |mu+, mu-> = (-1)^{p mu-} |mu+ + p, mu->`,
    /// `R_-^p |mu+, mu-> = |mu+, mu- + p>`.
    pub fn apply_klein_into(
        &self,
        r: Chirality,
        pow: i64,
        coeff: Complex64,
        v: &[Complex64],
        out: &mut [Complex64],
    ) -> f64 {
        if pow == 0 {
            for (o, s) in out.iter_mut().zip(v.iter()) {
                *o += coeff * s;
            }
            return 0.0;
        }
        let n_occ = self.n_occ();
        let mut dropped = 0.0;
        for (sec_i, &(mp, mm)) in self.sectors.iter().enumerate() {
            let (tgt_mu, phase) = match r {
                Chirality::Plus => (
                    (mp + pow as i32, mm),
                    if (pow * mm as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 },
                ),
                Chirality::Minus => ((mp, mm + pow as i32), 1.0),
            };
            let base = sec_i * n_occ;
            match self.sector_index.get(&tgt_mu) {
                Some(&t) => {
                    let tbase = t as usize * n_occ;
                    for o in 0..n_occ {
                        out[tbase + o] += coeff * phase * v[base + o];
                    }
                }
                None => {
                    for o in 0..n_occ {
                        dropped += (coeff * v[base + o]).norm_sqr();
                    }
                }
            }
        }
        dropped
    }

    /// Apply the composite Klein factor `R_+^{p_plus} R_-^{p_minus}` in one
    /// jump (no intermediate sector needed):
    /// sign `(-1)^{p_plus (mu_- + p_minus)}`, target `(mu_+ + p_plus, mu_- + p_minus)`.
    pub fn apply_klein_pair_into(
        &self,
        p_plus: i64,
        p_minus: i64,
        coeff: Complex64,
        v: &[Complex64],
        out: &mut [Complex64],
    ) -> f64 {
        if p_plus == 0 && p_minus == 0 {
            for (o, s) in out.iter_mut().zip(v.iter()) {
                *o += coeff * s;
            }
            return 0.0;
        }
        let n_occ = self.n_occ();
        let mut dropped = 0.0;
        for (sec_i, &(mp, mm)) in self.sectors.iter().enumerate() {
            let tgt = (mp + p_plus as i32, mm + p_minus as i32);
            let phase = if (p_plus * (mm as i64 + p_minus)).rem_euclid(2) == 0 {
                1.0
            } else {
                -1.0
            };
            let base = sec_i * n_occ;
            match self.sector_index.get(&tgt) {
                Some(&t) => {
                    let tbase = t as usize * n_occ;
                    for o in 0..n_occ {
                        out[tbase + o] += coeff * phase * v[base + o];
                    }
                }
                None => {
                    for o in 0..n_occ {
                        dropped += (coeff * v[base + o]).norm_sqr();
                    }
                }
            }
        }
        dropped
    }

    /// Multiply by a per-sector scalar `f(mu_+, mu_-)`.
    pub fn apply_sector_phase(&self, f: impl Fn(i32, i32) -> Complex64, v: &mut [Complex64]) {
        let n_occ = self.n_occ();
        for (sec_i, &(mp, mm)) in self.sectors.iter().enumerate() {
            let ph = f(mp, mm);
            for o in 0..n_occ {
                v[sec_i * n_occ + o] *= ph;
            }
        }
    }

    /// Indices of all states with level <= `max_level` (any sector).
    pub fn states_up_to_level(&self, max_level: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for sec_i in 0..self.sectors.len() {
            for o in 0..self.n_occ() {
                if self.levels[o] as usize <= max_level {
                    out.push(sec_i * self.n_occ() + o);
                }
            }
        }
        out
    }

    /// Indices with level <= `max_level` in the sector `mu`.
    pub fn sector_states_up_to_level(&self, mu: (i32, i32), max_level: usize) -> Vec<usize> {
        let Some(&s) = self.sector_index.get(&mu) else {
            return Vec::new();
        };
        let base = s as usize * self.n_occ();
        (0..self.n_occ())
            .filter(|&o| self.levels[o] as usize <= max_level)
            .map(|o| base + o)
            .collect()
    }
}

/// Generators of the operator algebra: oscillator modes and Klein factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    /// `a_{r,n}`; `n > 0` annihilates, `n < 0` creates, `n = 0` is the charge.
    A { r: Chirality, n: i64 },
    /// `R_r^{pow}`.
    R { r: Chirality, pow: i64 },
}

/// `coeff * g_1 g_2 ... g_k`, applied right-to-left.
#[derive(Clone, Debug)]
pub struct Monomial {
    pub coeff: Complex64,
    pub gens: Vec<Gen>,
}

/// A finite sum of monomials: the concrete form of every mode-sum operator.
#[derive(Clone, Debug, Default)]
pub struct ModePoly {
    pub terms: Vec<Monomial>,
}

impl ModePoly {
    pub fn new() -> Self {
        ModePoly { terms: Vec::new() }
    }

    pub fn push(&mut self, coeff: Complex64, gens: Vec<Gen>) {
        if coeff.norm_sqr() != 0.0 {
            self.terms.push(Monomial { coeff, gens });
        }
    }

    pub fn add(&mut self, other: &ModePoly) {
        self.terms.extend(other.terms.iter().cloned());
    }

    pub fn scaled(&self, s: Complex64) -> ModePoly {
        ModePoly {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial {
                    coeff: s * m.coeff,
                    gens: m.gens.clone(),
                })
                .collect(),
        }
    }

    /// Formal adjoint: reverse each monomial, conjugate, `a_{r,n} -> a_{r,-n}`,
    /// `R^p -> R^{-p}`.
    pub fn dagger(&self) -> ModePoly {
        ModePoly {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial {
                    coeff: m.coeff.conj(),
                    gens: m
                        .gens
                        .iter()
                        .rev()
                        .map(|g| match *g {
                            Gen::A { r, n } => Gen::A { r, n: -n },
                            Gen::R { r, pow } => Gen::R { r, pow: -pow },
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Apply to a vector; returns the result and the dropped norm^2. Large
    /// polynomials on large bases are split over a rayon pool with a
    /// deterministic chunk-ordered reduction.
    pub fn apply(&self, basis: &FockBasis, v: &[Complex64]) -> (Vec<Complex64>, f64) {
        assert_eq!(v.len(), basis.dim());
        if self.terms.len() >= 64 && basis.dim() >= 8192 {
            use rayon::prelude::*;
            let n_chunks = rayon::current_num_threads().max(1);
            let chunk = self.terms.len().div_ceil(n_chunks);
            let partials: Vec<(Vec<Complex64>, f64)> = self
                .terms
                .par_chunks(chunk)
                .map(|terms| Self::apply_terms(terms, basis, v))
                .collect();
            let mut acc = basis.zero();
            let mut dropped = 0.0;
            for (part, d) in partials {
                for (a, c) in acc.iter_mut().zip(part.iter()) {
                    *a += c;
                }
                dropped += d;
            }
            return (acc, dropped);
        }
        Self::apply_terms(&self.terms, basis, v)
    }

    fn apply_terms(terms: &[Monomial], basis: &FockBasis, v: &[Complex64]) -> (Vec<Complex64>, f64) {
        let mut acc = basis.zero();
        let mut dropped = 0.0;
        let mut cur: Vec<Complex64>;
        let mut next = basis.zero();
        for mono in terms {
            cur = v.to_vec();
            for g in mono.gens.iter().rev() {
                for c in next.iter_mut() {
                    *c = Complex64::new(0.0, 0.0);
                }
                dropped += match *g {
                    Gen::A { r, n } => basis.apply_a_into(r, n, Complex64::new(1.0, 0.0), &cur, &mut next),
                    Gen::R { r, pow } => basis.apply_klein_into(r, pow, Complex64::new(1.0, 0.0), &cur, &mut next),
                };
                std::mem::swap(&mut cur, &mut next);
            }
            for (a, c) in acc.iter_mut().zip(cur.iter()) {
                *a += mono.coeff * c;
            }
        }
        (acc, dropped)
    }

    /// Dense matrix on a (small) basis, column by column.
    pub fn dense(&self, basis: &FockBasis) -> Vec<Vec<Complex64>> {
        let dim = basis.dim();
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut e = basis.zero();
            e[j] = Complex64::new(1.0, 0.0);
            let (col, _) = self.apply(basis, &e);
            cols.push(col);
        }
        cols
    }
}

/// `a_{r,n}` as an operator.
pub fn op_a(r: Chirality, n: i64, basis: &FockBasis) -> Result<ModePoly, FockError> {
    if n.unsigned_abs() as usize > basis.spec.n_max {
        return Err(FockError::ModeOutOfRange(n, basis.spec.n_max));
    }
    let mut p = ModePoly::new();
    p.push(Complex64::new(1.0, 0.0), vec![Gen::A { r, n }]);
    Ok(p)
}

/// `R_r^{pow}` as an operator.
pub fn op_klein(r: Chirality, pow: i64) -> ModePoly {
    let mut p = ModePoly::new();
    p.push(Complex64::new(1.0, 0.0), vec![Gen::R { r, pow }]);
    p
}

/// Bogoliubov mode `b_{r,n} = c_n a_{r,n} - s_n a_{-r,-n}` (`b_{r,0} = a_{r,0}`)
/// as a gen-pair with coefficients; used to expand b-monomials.
pub fn b_mode(r: Chirality, n: i64, params: &ModelParams) -> Vec<(Complex64, Gen)> {
    if n == 0 {
        return vec![(Complex64::new(1.0, 0.0), Gen::A { r, n: 0 })];
    }
    let bc = bogo(n, params).expect("n != 0");
    vec![
        (Complex64::new(bc.c, 0.0), Gen::A { r, n }),
        (Complex64::new(-bc.s, 0.0), Gen::A { r: r.flip(), n: -n }),
    ]
}

/// `b_{r,n}` as an operator.
pub fn op_b(r: Chirality, n: i64, basis: &FockBasis) -> Result<ModePoly, FockError> {
    if n.unsigned_abs() as usize > basis.spec.n_max {
        return Err(FockError::ModeOutOfRange(n, basis.spec.n_max));
    }
    let mut p = ModePoly::new();
    for (c, g) in b_mode(r, n, &basis.params) {
        p.push(c, vec![g]);
    }
    Ok(p)
}

/// Normal order a single monomial of generators: creation parts left,
/// annihilation parts right, Klein factors to canonical `R_+^a R_-^b` order
/// with the anticommutation sign, zero modes split symmetrically by the
/// binomial rule `:a_0^k M: = 2^{-k} sum_j C(k,j) a_0^j M a_0^{k-j}`.
/// The result is independent of the input ordering.
pub fn normal_order(coeff: Complex64, gens: &[Gen]) -> ModePoly {
    let mut creation: Vec<Gen> = Vec::new();
    let mut annihilation: Vec<Gen> = Vec::new();
    let mut zero_plus: usize = 0;
    let mut zero_minus: usize = 0;
    // Klein bookkeeping: collapse to R_+^a R_-^b, tracking the sign of the
    // reordering (R_+^j and R_-^k anticommute with sign (-1)^{jk}).
    let mut rp: i64 = 0;
    let mut rm: i64 = 0;
    let mut sign = 1.0;
    for g in gens {
        match *g {
            Gen::A { r, n } => {
                if n < 0 {
                    creation.push(Gen::A { r, n });
                } else if n > 0 {
                    annihilation.push(Gen::A { r, n });
                } else {
                    match r {
                        Chirality::Plus => zero_plus += 1,
                        Chirality::Minus => zero_minus += 1,
                    }
                }
            }
            Gen::R { r, pow } => match r {
                Chirality::Plus => {
                    // move past the accumulated R_-^{rm}
                    if (pow * rm).rem_euclid(2) == 1 {
                        sign = -sign;
                    }
                    rp += pow;
                }
                Chirality::Minus => {
                    rm += pow;
                }
            },
        }
    }
    // canonical sort inside the commuting groups for reproducibility
    let key = |g: &Gen| match *g {
        Gen::A { r, n } => (r.idx() as i64, n),
        Gen::R { .. } => unreachable!(),
    };
    creation.sort_by_key(key);
    annihilation.sort_by_key(key);

    let mut core: Vec<Gen> = creation;
    if rp != 0 {
        core.push(Gen::R {
            r: Chirality::Plus,
            pow: rp,
        });
    }
    if rm != 0 {
        core.push(Gen::R {
            r: Chirality::Minus,
            pow: rm,
        });
    }
    core.extend(annihilation);

    // binomial zero-mode splitting, per chirality
    let mut out = ModePoly::new();
    let binom = |k: usize, j: usize| -> f64 {
        let mut b = 1.0;
        for i in 0..j {
            b = b * (k - i) as f64 / (i + 1) as f64;
        }
        b
    };
    for jp in 0..=zero_plus {
        for jm in 0..=zero_minus {
            let w = binom(zero_plus, jp) * binom(zero_minus, jm)
                / 2f64.powi((zero_plus + zero_minus) as i32);
            let mut gens_full: Vec<Gen> = Vec::with_capacity(core.len() + zero_plus + zero_minus);
            for _ in 0..jp {
                gens_full.push(Gen::A { r: Chirality::Plus, n: 0 });
            }
            for _ in 0..jm {
                gens_full.push(Gen::A { r: Chirality::Minus, n: 0 });
            }
            gens_full.extend(core.iter().copied());
            for _ in 0..(zero_plus - jp) {
                gens_full.push(Gen::A { r: Chirality::Plus, n: 0 });
            }
            for _ in 0..(zero_minus - jm) {
                gens_full.push(Gen::A { r: Chirality::Minus, n: 0 });
            }
            out.push(coeff * sign * w, gens_full);
        }
    }
    out
}

/// Expand a product of `b`-modes (given as `(r, n)` pairs, `n = 0` meaning
/// `b_{r,0} = a_{r,0}`) into normal-ordered `a`-monomials: the concrete
/// realization of `:b_{r1,n1} ... b_{rk,nk}:`.
pub fn normal_ordered_b_product(
    coeff: Complex64,
    modes: &[(Chirality, i64)],
    params: &ModelParams,
) -> ModePoly {
    // multiply out the Bogoliubov binomials
    let mut expansions: Vec<(Complex64, Vec<Gen>)> = vec![(coeff, Vec::new())];
    for &(r, n) in modes {
        let parts = b_mode(r, n, params);
        let mut next = Vec::with_capacity(expansions.len() * parts.len());
        for (c, gens) in &expansions {
            for (pc, pg) in &parts {
                let mut g2 = gens.clone();
                g2.push(*pg);
                next.push((c * pc, g2));
            }
        }
        expansions = next;
    }
    let mut out = ModePoly::new();
    for (c, gens) in expansions {
        out.add(&normal_order(c, &gens));
    }
    out
}

/// Luttinger (Bogoliubov) vacuum: the normalized state annihilated by all
/// `b_{r,n}`, `n > 0`, built from its pair-coherent closed form
/// `exp(sum_n (q^n / n) a_{+,-n} a_{-,-n}) Omega` with phase `<Omega, ~Omega> > 0`.
/// Errors if the level truncation leaves more than `tail_bound` of the exact
/// squared norm outside the basis.
pub fn luttinger_vacuum(
    basis: &FockBasis,
    tail_bound: f64,
) -> Result<(Vec<Complex64>, f64), FockError> {
    let q = basis.params.q();
    let mut v = basis.vacuum()?;
    let mut term = v.clone();
    // exact squared norm of the untruncated state
    let mut exact_norm2 = 1.0;
    for n in 1..=basis.spec.n_max as i32 {
        exact_norm2 /= 1.0 - q.powi(2 * n);
    }
    if q > 0.0 {
        for k in 1..=(basis.spec.l_max / 2 + 1) {
            // term <- (sum_n t_n a_{+,-n} a_{-,-n}) term / k
            let mut next = basis.zero();
            for n in 1..=basis.spec.n_max as i64 {
                let t = q.powi(n as i32) / n as f64;
                let mut stage = basis.zero();
                basis.apply_a_into(Chirality::Minus, -n, Complex64::new(1.0, 0.0), &term, &mut stage);
                basis.apply_a_into(Chirality::Plus, -n, Complex64::new(t / k as f64, 0.0), &stage, &mut next);
            }
            let norm: f64 = next.iter().map(|c| c.norm_sqr()).sum();
            term = next;
            for (a, b) in v.iter_mut().zip(term.iter()) {
                *a += b;
            }
            if norm == 0.0 {
                break;
            }
        }
    }
    let norm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    let tail = 1.0 - norm2 / exact_norm2;
    if tail > tail_bound {
        return Err(FockError::TailBound(tail, tail_bound));
    }
    let inv = 1.0 / norm2.sqrt();
    for c in v.iter_mut() {
        *c *= inv;
    }
    Ok((v, tail))
}

/// `<a, b>` with the physics convention (conjugate-linear in the first slot).
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Chirality::{Minus, Plus};

    fn params_q(q: f64) -> ModelParams {
        let delta = if q == 0.0 { 745.0 } else { -q.ln() };
        ModelParams::new(std::f64::consts::PI, delta, 2, 1, 1, 0.25).unwrap()
    }

    fn small_basis(q: f64, n_max: usize, l_max: usize, mu_max: i32) -> FockBasis {
        FockBasis::build(TruncationSpec::new(n_max, l_max, mu_max), params_q(q)).unwrap()
    }

    /// Reference partition counter: number of partitions of `l` into parts
    /// `<= n_max`, counted by brute-force recursion.
    fn partitions_bounded(l: usize, n_max: usize) -> usize {
        fn rec(l: usize, max_part: usize) -> usize {
            if l == 0 {
                return 1;
            }
            (1..=max_part.min(l)).map(|p| rec(l - p, p)).sum()
        }
        rec(l, n_max)
    }

    #[test]
    fn basis_vacuum_only() {
        let b = small_basis(0.5, 1, 0, 0);
        assert_eq!(b.dim(), 1);
        assert_eq!(b.vacuum_index().unwrap(), 0);
    }

    #[test]
    fn basis_six_states() {
        // n_max=1, l_max=2, mu_max=0: occupations m+ + m- <= 2 -> 6 states
        let b = small_basis(0.5, 1, 2, 0);
        assert_eq!(b.dim(), 6);
    }

    #[test]
    fn basis_counts_match_partition_oracle() {
        // single-sector level census vs independent bounded-partition count
        let b = small_basis(0.0, 5, 8, 0);
        let mut per_level = vec![0usize; b.spec.l_max + 1];
        for i in 0..b.dim() {
            per_level[b.level_of(i)] += 1;
        }
        for l in 0..=8usize {
            // 2-colored bounded partitions of l
            let expect: usize = (0..=l)
                .map(|k| partitions_bounded(k, 5) * partitions_bounded(l - k, 5))
                .sum();
            assert_eq!(per_level[l], expect, "level {l}");
        }
    }

    #[test]
    fn oscillator_commutator_is_n_on_protected_states() {
        let b = small_basis(0.5, 3, 6, 0);
        for n in 1..=2i64 {
            let protected = b.states_up_to_level(b.spec.l_max - 2 * n as usize);
            for &i in &protected {
                let mut e = b.zero();
                e[i] = Complex64::new(1.0, 0.0);
                // [a_n, a_-n] e = n e
                let mut t1 = b.zero();
                b.apply_a_into(Plus, -n, Complex64::new(1.0, 0.0), &e, &mut t1);
                let mut t2 = b.zero();
                b.apply_a_into(Plus, n, Complex64::new(1.0, 0.0), &t1, &mut t2);
                let mut u1 = b.zero();
                b.apply_a_into(Plus, n, Complex64::new(1.0, 0.0), &e, &mut u1);
                let mut u2 = b.zero();
                b.apply_a_into(Plus, -n, Complex64::new(1.0, 0.0), &u1, &mut u2);
                for (k, (x, y)) in t2.iter().zip(u2.iter()).enumerate() {
                    let expect = if k == i { n as f64 } else { 0.0 };
                    assert!(((x - y) - Complex64::new(expect, 0.0)).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn annihilator_kills_vacuum_and_cross_chirality_commutes() {
        let b = small_basis(0.5, 2, 4, 1);
        let om = b.vacuum().unwrap();
        let mut out = b.zero();
        b.apply_a_into(Plus, 1, Complex64::new(1.0, 0.0), &om, &mut out);
        assert!(norm(&out) == 0.0);
        // [a_{+,1}, a_{-,-1}] = 0 on protected states
        let protected = b.states_up_to_level(b.spec.l_max - 2);
        for &i in protected.iter().take(10) {
            let mut e = b.zero();
            e[i] = Complex64::new(1.0, 0.0);
            let mut ab = b.zero();
            let mut t = b.zero();
            b.apply_a_into(Minus, -1, Complex64::new(1.0, 0.0), &e, &mut t);
            b.apply_a_into(Plus, 1, Complex64::new(1.0, 0.0), &t, &mut ab);
            let mut ba = b.zero();
            let mut u = b.zero();
            b.apply_a_into(Plus, 1, Complex64::new(1.0, 0.0), &e, &mut u);
            b.apply_a_into(Minus, -1, Complex64::new(1.0, 0.0), &u, &mut ba);
            for (x, y) in ab.iter().zip(ba.iter()) {
                assert!((x - y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn klein_relations() {
        let b = small_basis(0.5, 1, 1, 2);
        let om = b.vacuum().unwrap();
        // <Omega, R_+^a R_-^b Omega> = delta_{a0} delta_{b0}
        for a in -1..=1i64 {
            for bb in -1..=1i64 {
                let mut p = ModePoly::new();
                p.push(
                    Complex64::new(1.0, 0.0),
                    vec![Gen::R { r: Plus, pow: a }, Gen::R { r: Minus, pow: bb }],
                );
                let (v, _) = p.apply(&b, &om);
                let overlap = inner(&om, &v);
                let expect = if a == 0 && bb == 0 { 1.0 } else { 0.0 };
                assert!((overlap - Complex64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
        // R_+ R_- + R_- R_+ = 0 on interior sectors
        let protected: Vec<usize> = (0..b.dim())
            .filter(|&i| {
                let s = b.state(i);
                s.mu_plus.abs() < 2 && s.mu_minus.abs() < 2
            })
            .collect();
        let mut pm = ModePoly::new();
        pm.push(Complex64::new(1.0, 0.0), vec![Gen::R { r: Plus, pow: 1 }, Gen::R { r: Minus, pow: 1 }]);
        pm.push(Complex64::new(1.0, 0.0), vec![Gen::R { r: Minus, pow: 1 }, Gen::R { r: Plus, pow: 1 }]);
        for &i in &protected {
            let mut e = b.zero();
            e[i] = Complex64::new(1.0, 0.0);
            let (v, _) = pm.apply(&b, &e);
            assert!(norm(&v) < 1e-14);
        }
        // unitarity: R_r^{-1} R_r = I
        for r in [Plus, Minus] {
            let mut p = ModePoly::new();
            p.push(Complex64::new(1.0, 0.0), vec![Gen::R { r, pow: -1 }, Gen::R { r, pow: 1 }]);
            for &i in &protected {
                let mut e = b.zero();
                e[i] = Complex64::new(1.0, 0.0);
                let (v, _) = p.apply(&b, &e);
                let mut diff = v.clone();
                diff[i] -= Complex64::new(1.0, 0.0);
                assert!(norm(&diff) < 1e-14);
            }
        }
    }

    #[test]
    fn exp_charge_klein_exchange() {
        // e^{i alpha Q_r} R_r = e^{i alpha nu0} R_r e^{i alpha Q_r}
        let b = small_basis(0.5, 1, 1, 2);
        let nu0 = b.params.nu0();
        let alpha = 0.77;
        let phase = |mp: i32, mm: i32, r: Chirality| {
            let mu = match r {
                Plus => mp,
                Minus => mm,
            };
            (specfun_i() * alpha * nu0 * mu as f64).exp()
        };
        fn specfun_i() -> Complex64 {
            Complex64::new(0.0, 1.0)
        }
        for r in [Plus, Minus] {
            for i in b.states_up_to_level(1) {
                let s = b.state(i);
                if s.mu_plus.abs() >= 2 || s.mu_minus.abs() >= 2 {
                    continue;
                }
                let mut e = b.zero();
                e[i] = Complex64::new(1.0, 0.0);
                // lhs: e^{i a Q} R e
                let mut re = b.zero();
                b.apply_klein_into(r, 1, Complex64::new(1.0, 0.0), &e, &mut re);
                let mut lhs = re.clone();
                b.apply_sector_phase(|mp, mm| phase(mp, mm, r), &mut lhs);
                // rhs: e^{i a nu0} R e^{i a Q} e
                let mut pe = e.clone();
                b.apply_sector_phase(|mp, mm| phase(mp, mm, r), &mut pe);
                let mut rhs = b.zero();
                b.apply_klein_into(r, 1, Complex64::new(1.0, 0.0), &pe, &mut rhs);
                let scale = (specfun_i() * alpha * nu0).exp();
                for (x, y) in lhs.iter().zip(rhs.iter()) {
                    assert!((x - scale * y).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn bogoliubov_modes() {
        // q = 0: b = a as operators
        let b0 = small_basis(0.0, 2, 4, 0);
        let p = op_b(Plus, 1, &b0).unwrap();
        // the s-part carries weight 0 at q=0 and is dropped
        assert_eq!(p.terms.len(), 1);
        assert_eq!(p.terms[0].gens, vec![Gen::A { r: Plus, n: 1 }]);

        // q = 0.5: [b_{+,1}, b_{+,-1}] = I on protected states, b^dag = b_{-n}
        let b = small_basis(0.5, 2, 6, 0);
        let bp = op_b(Plus, 1, &b).unwrap();
        let bm = op_b(Plus, -1, &b).unwrap();
        assert_eq!(format!("{:?}", bp.dagger().terms), format!("{:?}", {
            let mut t = bm.terms.clone();
            t.iter_mut().for_each(|m| m.coeff = m.coeff.conj());
            t
        }));
        let protected = b.states_up_to_level(b.spec.l_max - 2);
        for &i in &protected {
            let mut e = b.zero();
            e[i] = Complex64::new(1.0, 0.0);
            let (v1, _) = bm.apply(&b, &e);
            let (v1, _) = bp.apply(&b, &v1);
            let (v2, _) = bp.apply(&b, &e);
            let (v2, _) = bm.apply(&b, &v2);
            let mut comm: Vec<Complex64> = v1.iter().zip(v2.iter()).map(|(a, c)| a - c).collect();
            comm[i] -= Complex64::new(1.0, 0.0);
            assert!(norm(&comm) < 1e-13, "state {i}");
        }
    }

    #[test]
    fn luttinger_vacuum_properties() {
        // q = 0: Omega~ = Omega exactly
        let b0 = small_basis(0.0, 2, 4, 0);
        let (v, tail) = luttinger_vacuum(&b0, 1e-12).unwrap();
        assert_eq!(tail, 0.0);
        let om = b0.vacuum().unwrap();
        assert!((inner(&om, &v) - Complex64::new(1.0, 0.0)).norm() < 1e-14);

        // small q, enough levels: b_{r,n} Omega~ ~ 0 and positive phase
        let b = small_basis(0.02, 4, 14, 0);
        let (v, tail) = luttinger_vacuum(&b, 1e-11).unwrap();
        assert!(tail < 1e-11);
        let om = b.vacuum().unwrap();
        let overlap = inner(&om, &v);
        assert!(overlap.re > 0.0 && overlap.im.abs() < 1e-15);
        for r in [Plus, Minus] {
            let bop = op_b(r, 1, &b).unwrap();
            let (bv, _) = bop.apply(&b, &v);
            assert!(norm(&bv) < 1e-10, "residual {}", norm(&bv));
        }

        // tail bound violation reported
        let btight = small_basis(0.3, 3, 6, 0);
        assert!(matches!(
            luttinger_vacuum(&btight, 1e-12),
            Err(FockError::TailBound(_, _))
        ));
    }

    #[test]
    fn normal_order_examples() {
        let b = small_basis(0.5, 2, 4, 1);
        // :a_{+,1} a_{+,-1}: = a_{+,-1} a_{+,1}
        let no = normal_order(
            Complex64::new(1.0, 0.0),
            &[Gen::A { r: Plus, n: 1 }, Gen::A { r: Plus, n: -1 }],
        );
        let mut direct = ModePoly::new();
        direct.push(
            Complex64::new(1.0, 0.0),
            vec![Gen::A { r: Plus, n: -1 }, Gen::A { r: Plus, n: 1 }],
        );
        let da = no.dense(&b);
        let db = direct.dense(&b);
        for (ca, cb) in da.iter().zip(db.iter()) {
            for (x, y) in ca.iter().zip(cb.iter()) {
                assert_eq!(x, y);
            }
        }
        // zero-mode rule: :M a_0: = (1/2)(:M: a_0 + a_0 :M:) with M = R_+
        let no0 = normal_order(
            Complex64::new(1.0, 0.0),
            &[Gen::R { r: Plus, pow: 1 }, Gen::A { r: Plus, n: 0 }],
        );
        let mut by_hand = ModePoly::new();
        by_hand.push(
            Complex64::new(0.5, 0.0),
            vec![Gen::R { r: Plus, pow: 1 }, Gen::A { r: Plus, n: 0 }],
        );
        by_hand.push(
            Complex64::new(0.5, 0.0),
            vec![Gen::A { r: Plus, n: 0 }, Gen::R { r: Plus, pow: 1 }],
        );
        let da = no0.dense(&b);
        let db = by_hand.dense(&b);
        for (ca, cb) in da.iter().zip(db.iter()) {
            for (x, y) in ca.iter().zip(cb.iter()) {
                assert!((x - y).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn normal_order_input_order_invariance() {
        let b = small_basis(0.5, 2, 4, 1);
        let gens = [
            Gen::A { r: Plus, n: 2 },
            Gen::A { r: Minus, n: -1 },
            Gen::A { r: Plus, n: 0 },
            Gen::R { r: Minus, pow: 1 },
        ];
        let base = normal_order(Complex64::new(1.0, 0.0), &gens).dense(&b);
        // a cyclic shift and a swap-reversal must give the identical matrix
        let mut rot = gens.to_vec();
        rot.rotate_left(2);
        let da = normal_order(Complex64::new(1.0, 0.0), &rot).dense(&b);
        let mut rev = gens.to_vec();
        rev.reverse();
        let dbm = normal_order(Complex64::new(1.0, 0.0), &rev).dense(&b);
        for j in 0..b.dim() {
            for i in 0..b.dim() {
                assert!((base[j][i] - da[j][i]).norm() < 1e-14);
                assert!((base[j][i] - dbm[j][i]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn adjoint_is_conjugate_transpose() {
        let b = small_basis(0.4, 2, 3, 1);
        let mut p = ModePoly::new();
        p.push(
            Complex64::new(0.3, -0.7),
            vec![Gen::A { r: Plus, n: -2 }, Gen::R { r: Minus, pow: 1 }, Gen::A { r: Minus, n: 1 }],
        );
        p.push(Complex64::new(0.0, 1.1), vec![Gen::A { r: Plus, n: 0 }]);
        let d = p.dense(&b);
        let dd = p.dagger().dense(&b);
        // adjoint truncation caveat: compare only entries whose row & column
        // both sit safely inside the level window
        let safe = b.states_up_to_level(b.spec.l_max - 2);
        for &j in &safe {
            for &i in &safe {
                assert!(
                    (dd[j][i] - d[i][j].conj()).norm() < 1e-14,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn charge_spectrum_degeneracies() {
        // Q_r spectrum = nu0 * {-mu_max..mu_max}, each with 2-colored
        // partition degeneracy per level
        let b = small_basis(0.5, 3, 3, 2);
        let mut counts: HashMap<i32, usize> = HashMap::new();
        for i in 0..b.dim() {
            *counts.entry(b.state(i).mu_plus).or_default() += 1;
        }
        let per_sector = b.n_occ() * (2 * b.spec.mu_max as usize + 1);
        for mu in -2..=2i32 {
            assert_eq!(counts[&mu], per_sector);
        }
    }

    #[test]
    fn memory_guard_trips() {
        let mut spec = TruncationSpec::new(8, 20, 8);
        spec.max_states = 1000;
        assert!(matches!(
            FockBasis::build(spec, params_q(0.5)),
            Err(FockError::TooLarge(_, _))
        ));
    }
}
