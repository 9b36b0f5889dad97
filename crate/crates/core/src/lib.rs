//! FD-aware query engine: mining of minimal exact and approximate functional
//! dependencies, dependency sets as queryable objects, FDML, and SELECT with
//! dependency predicates.

pub mod error;
pub mod fdstore;
pub mod miner;
pub mod partition;
pub mod query;
pub mod relation;
pub mod session;
pub mod syntax;
pub mod table;

pub use error::{Error, Pos, Result};
pub use relation::{Relation, RowSet, Value};
