//! Numerical laboratory for a non-chiral CFT on the circle and its classical limit.
//!
//! The crate builds, at desk scale, the full chain
//!
//! ```text
//! elliptic special functions  ->  nonlocal transforms T, T~
//!          |                              |
//! truncated two-chirality Fock space  ->  vertex operators / anyons
//!          |                              |
//! second-quantized Hamiltonians W_k, C, H_2, H_{3,nu}
//!          |
//! quantum + classical ncILW equation, fermion cross-checks
//! ```
//!
//! and machine-verifies the operator identities tying the layers together.
//! Everything is regularized: anyons and chiral bosons carry an exponential
//! mode damping `exp(-2*kappa*eps*|n|)` and all identities hold exactly at
//! finite `eps` on a protected subspace of the truncated basis.
//!
//! Entry points:
//! * [`params::ModelParams`] — model constants (`ell`, `delta`, rational
//!   coupling `g = r0/s0`, regularization `eps`) and truncation sizes.
//! * [`fock::FockBasis`] — the truncated occupation-number basis.
//! * [`verify`] — the named check suites behind the `ncilw verify` CLI.

pub mod config;
pub mod fermion;
pub mod fock;
pub mod hamiltonians;
pub mod insertions;
pub mod params;
pub mod pde;
pub mod report;
pub mod specfun;
pub mod transforms;
pub mod verify;
pub mod vertex;

pub use num_complex::Complex64;

/// Chirality index `r = +/-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Chirality {
    Plus,
    Minus,
}

impl Chirality {
    pub const BOTH: [Chirality; 2] = [Chirality::Plus, Chirality::Minus];

    /// The sign `r` as a float, `+1.0` or `-1.0`.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Chirality::Plus => 1.0,
            Chirality::Minus => -1.0,
        }
    }

    #[inline]
    pub fn flip(self) -> Chirality {
        match self {
            Chirality::Plus => Chirality::Minus,
            Chirality::Minus => Chirality::Plus,
        }
    }

    /// 0 for `+`, 1 for `-`; used for array indexing.
    #[inline]
    pub fn idx(self) -> usize {
        match self {
            Chirality::Plus => 0,
            Chirality::Minus => 1,
        }
    }
}

impl std::fmt::Display for Chirality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Chirality::Plus => "+",
            Chirality::Minus => "-",
        })
    }
}

impl std::str::FromStr for Chirality {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+" | "plus" | "p" => Ok(Chirality::Plus),
            "-" | "minus" | "m" => Ok(Chirality::Minus),
            other => Err(format!("invalid chirality {other:?}, expected + or -")),
        }
    }
}
