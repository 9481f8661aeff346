//! Exact intersection theory for Fano manifolds with Lefschetz defect 3:
//! the two blow-up constructions over a P2-bundle, their invariants, the
//! relative Mori cone and the dimension-four classification.

pub mod bases;
pub mod blowclass;
pub mod cli;
pub mod cone;
pub mod error;
pub mod families;
pub mod fano;
pub mod iring;
pub mod linalg;
pub mod pbundle;

pub use error::{Error, Result};

use serde::Serialize;

/// Which of the two blow-up constructions produced X.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Construction {
    /// Blow-up of three disjoint sections of a split P2-bundle.
    A,
    /// Blow-up of two sections and a double cover of the base.
    B,
}

impl std::fmt::Display for Construction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Construction::A => "A",
            Construction::B => "B",
        })
    }
}

impl std::str::FromStr for Construction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Construction::A),
            "B" | "b" => Ok(Construction::B),
            _ => Err(Error::Usage(format!("construction must be A or B, got {s:?}"))),
        }
    }
}
