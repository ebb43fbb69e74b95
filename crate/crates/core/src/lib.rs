//! grel: an embedded typed graph-relational database engine.
//!
//! Graphs are stored in ordinary base tables — one table per node or edge
//! type — on top of a strongly typed in-memory relational core. A small SQL
//! extension adds inline graph `CREATE`, `CREATE TYPE ... NODETYPE/EDGETYPE`,
//! and a backtracking `MATCH`. Schemas evolve incrementally from the data:
//! conflicting edge endpoints are generalized under a fresh anonymous
//! supertype instead of being rejected.

pub mod engine;
pub mod error;
pub mod eval;
pub mod graph;
pub mod matcher;
pub mod relational;
pub mod schema;
pub mod syntax;
pub mod values;

pub use engine::{CommitReport, Engine, EngineState, StatementOutcome};
pub use error::EngineError;
pub use graph::{Component, EdgeRef, NodeRef};
pub use matcher::{Bound, MatchResult};
pub use schema::{DiagnosticKind, Multiplicity, SchemaDiagnostic};
pub use values::{DataType, Literal, SimpleKind, TypeDef, TypeDefSpec, TypeId, TypeRegistry, Value};
