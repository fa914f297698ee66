//! Invariant ideals of finite abelian Markov semigroups.
//!
//! ```
//! use invariant_ideals::graph::StateSet;
//! use invariant_ideals::means::{radical_membership_via_means, ErgodicNetConfig};
//! use invariant_ideals::spectrum::{minimal_center_support, prim_spectrum};
//! use invariant_ideals::system::{load_system, FnK, SystemSpec};
//!
//! # fn main() -> Result<(), invariant_ideals::error::Error> {
//! let spec = SystemSpec::from_json(r#"{"n":3,"generators":[[[0,0.5,0.5],[0,1,0],[0,0,1]]]}"#)?;
//! let s = load_system(&spec)?;
//! assert_eq!(prim_spectrum(&s)?.len(), 2);
//! assert_eq!(minimal_center_support(&s)?, StateSet::new(vec![1, 2]));
//!
//! let probe = FnK(vec![1.0, 0.0, 0.0]);
//! let m = radical_membership_via_means(&s, &StateSet::full(3), &probe, &ErgodicNetConfig::default())?;
//! assert!(m.member);
//! # Ok(())
//! # }
//! ```

pub mod cli;
pub mod error;
pub mod gelfand;
pub mod graph;
pub mod ideals;
pub mod linalg;
pub mod means;
pub mod measures;
pub mod scalar;
pub mod spectrum;
pub mod system;
pub mod systems;
pub mod verify;
