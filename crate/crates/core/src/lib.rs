//! Kite pseudo effect algebras and their lexicographic-extension models.
//!
//! The crate builds concrete partially ordered groups ([`pogroup`]), the kite
//! construction over them ([`kite`]), the semidirect lexicographic extension
//! and its n-perfect intervals ([`lexext`]), and checks their axioms and
//! refinement properties on explicit finite windows ([`pea`], [`rdp`]).
//! [`structure`] covers orbit analysis of the index bijection, the kite to
//! interval isomorphism, and subdirect-irreducibility decisions. [`cli`] is
//! the configuration-driven runner used by the `kite` binary.
//!
//! Every exhaustive claim made by a checker is bounded. Reports state the
//! bound or the sample size they were run with.

pub mod cli;
pub mod error;
pub mod kite;
pub mod lexext;
pub mod pea;
pub mod pogroup;
pub mod rdp;
pub mod report;
pub mod structure;

mod tuple;

pub use error::{Error, Result};
pub use kite::{Cone, KiteAlgebra, KiteElement};
pub use lexext::{LexElement, LexGroup, NPerfectAlgebra};
pub use pea::{PeaUniverse, Window, WindowSpec};
pub use pogroup::{GroupElement, GroupKind, PoGroup};
pub use rdp::{RdpClass, RefinementTable};
pub use report::{Check, CheckReport, Status};
pub use structure::Permutation;
pub use tuple::Tuple;

use std::fmt;

/// Three-valued answer for questions that bounded search cannot always settle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Tri::Yes
    }

    /// Conjunction where `No` dominates `Unknown`.
    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::No, _) | (_, Tri::No) => Tri::No,
            (Tri::Yes, Tri::Yes) => Tri::Yes,
            _ => Tri::Unknown,
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Unknown => "unknown",
        })
    }
}
