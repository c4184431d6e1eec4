//! Parser for anyon-insertion spec strings used by the `correlator` CLI.
//!
//! Grammar: insertions separated by `;`, each one `r,m,x,eps` with
//! `r in {+, -}`, the particle type `m in {1, -1/g}` (statistics `nu` or
//! `-1/nu`), and decimal `x`, `eps`. `eps` may be omitted to use the model
//! default. Example: `+,1,0.8,0.3; +,-1/g,-0.4,0.3; -,1,1.1,0.3`.

use crate::params::{Mass, ModelParams};
use crate::vertex::Insertion;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InsertionParseError {
    #[error("insertion {0}: expected `r,m,x[,eps]`, got {1:?}")]
    BadShape(usize, String),
    #[error("insertion {0}: invalid chirality {1:?} (want + or -)")]
    BadChirality(usize, String),
    #[error("insertion {0}: invalid particle type {1:?} (want 1 or -1/g)")]
    BadMass(usize, String),
    #[error("insertion {0}: invalid number {1:?}")]
    BadNumber(usize, String),
    #[error("insertion {0}: eps must be > 0, got {1}")]
    BadEps(usize, f64),
    #[error("empty insertion list")]
    Empty,
}

/// One parsed insertion plus the particle type it came from.
#[derive(Clone, Copy, Debug)]
pub struct ParsedInsertion {
    pub insertion: Insertion,
    pub mass: Mass,
}

pub fn parse_insertions(
    text: &str,
    params: &ModelParams,
) -> Result<Vec<ParsedInsertion>, InsertionParseError> {
    let mut out = Vec::new();
    for (idx, chunk) in text.split(';').enumerate() {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let fields: Vec<&str> = chunk.split(',').map(str::trim).collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(InsertionParseError::BadShape(idx, chunk.to_string()));
        }
        let r = fields[0]
            .parse()
            .map_err(|_| InsertionParseError::BadChirality(idx, fields[0].to_string()))?;
        let mass = match fields[1] {
            "1" | "unit" | "p" => Mass::Unit,
            "-1/g" | "inv" | "h" => Mass::InvG,
            other => return Err(InsertionParseError::BadMass(idx, other.to_string())),
        };
        let x: f64 = fields[2]
            .parse()
            .map_err(|_| InsertionParseError::BadNumber(idx, fields[2].to_string()))?;
        if !x.is_finite() {
            return Err(InsertionParseError::BadNumber(idx, fields[2].to_string()));
        }
        let eps = if fields.len() == 4 {
            let e: f64 = fields[3]
                .parse()
                .map_err(|_| InsertionParseError::BadNumber(idx, fields[3].to_string()))?;
            e
        } else {
            params.eps
        };
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(InsertionParseError::BadEps(idx, eps));
        }
        out.push(ParsedInsertion {
            insertion: Insertion {
                r,
                nu_eff: params.nu_eff(mass),
                x,
                eps,
            },
            mass,
        });
    }
    if out.is_empty() {
        return Err(InsertionParseError::Empty);
    }
    Ok(out)
}
