//! Res(s) proofs for unary and binary CNF encodings: formula families,
//! explicit refutations, proof translations, independent checkers and
//! random-restriction experiments.

pub mod constructors;
pub mod covering;
pub mod encoders;
pub mod experiments;
pub mod formats;
pub mod graphs;
pub mod cnf;
pub mod error;
pub mod logic;
pub mod proofs;
pub mod restriction;
pub mod translators;

pub use cnf::{CnfFormula, VarDescriptor};
pub use covering::{covering_number, record_covering_number};
pub use error::{Error, Result};
pub use logic::{negate_clause, Clause, Literal, Record, SClause, Term};
pub use restriction::{apply_to_formula, apply_to_sclause, Restriction};
