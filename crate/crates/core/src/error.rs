//! Error and violation types shared across the engine.
//!
//! A single enum covers lexical/syntax errors, immediate typing errors, and
//! the integrity violations collected at commit time. Statement execution
//! reports failures as a list of [`EngineError`] values and leaves the
//! database state untouched.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: u32,
        column: u32,
        message: String,
    },

    #[error("duplicate data type name {0}")]
    DuplicateTypeName(String),

    #[error("unknown component type {component} in definition of {type_name}")]
    UnknownComponentType {
        type_name: String,
        component: String,
    },

    #[error("type mismatch for {context}: expected {expected}, found {found}")]
    TypeMismatch {
        context: String,
        expected: String,
        found: String,
    },

    #[error("range violation for {context}: value {value} fails {constraint}")]
    RangeViolation {
        context: String,
        value: i64,
        constraint: String,
    },

    #[error("invalid date {0}: expected DD/MM/YYYY")]
    InvalidDate(String),

    #[error("duplicate table name {0}")]
    DuplicateTableName(String),

    #[error("unknown table {0}")]
    UnknownTable(String),

    #[error("unknown column {column} in table {table}")]
    UnknownColumn { table: String, column: String },

    #[error("unknown column type {type_name} for column {column}")]
    UnknownColumnType { column: String, type_name: String },

    #[error("duplicate primary key {key} in table {table}")]
    DuplicateKey { table: String, key: String },

    #[error("foreign key violation: {table}.{column} value {key} has no target row")]
    ForeignKeyViolation {
        table: String,
        column: String,
        key: String,
    },

    #[error("null value not allowed in key column {table}.{column}")]
    NullKeyViolation { table: String, column: String },

    #[error("no row with key {key} in table {table}")]
    UnknownRow { table: String, key: String },

    #[error("row {key} of table {table} is referenced by a foreign key in {by_table}")]
    ReferencedByForeignKey {
        table: String,
        key: String,
        by_table: String,
    },

    #[error("a transaction is already open")]
    TransactionAlreadyOpen,

    #[error("no transaction is open")]
    NoOpenTransaction,

    #[error("duplicate type label {0}")]
    DuplicateTypeLabel(String),

    #[error("unknown supertype {0}")]
    UnknownSupertype(String),

    #[error("unknown endpoint type {0}")]
    UnknownEndpointType(String),

    #[error("unknown type label {0}")]
    UnknownTypeLabel(String),

    #[error("{0} is not a node type")]
    NotANodeType(String),

    #[error("{0} is not an edge type")]
    NotAnEdgeType(String),

    #[error("declaring {label} UNDER {supertype} would create a cycle")]
    SupertypeCycle { label: String, supertype: String },

    #[error("{label} is already declared UNDER {existing}, cannot also be UNDER {requested}")]
    SupertypeConflict {
        label: String,
        existing: String,
        requested: String,
    },

    #[error(
        "multiplicity violation: {count} {edge_type} edge(s) {end} at node {node}, \
         bounds [{min}, {max}]"
    )]
    MultiplicityViolation {
        edge_type: String,
        node: String,
        end: String,
        count: u32,
        min: u32,
        max: String,
    },

    #[error("multiplicity of edge type {0} is already declared and differs")]
    MultiplicityRedefinition(String),

    #[error("constraint {name} violated by row {key} of {target}")]
    ConstraintViolation {
        name: String,
        target: String,
        key: String,
    },

    #[error("invalid metadata: {0}")]
    InvalidMetadata(String),

    #[error("duplicate doc key {0}")]
    DuplicateDocKey(String),

    #[error("node {0} is already tracked")]
    DuplicateNode(String),

    #[error("edge endpoint {0} is not tracked")]
    UnknownEndpoint(String),

    #[error("edge {0} is not tracked")]
    UnknownEdge(String),

    #[error("node {0} is not tracked")]
    UnknownNode(String),

    #[error("node {0} still has incident edges")]
    HasIncidentEdges(String),

    #[error("type error in WHERE clause: {0}")]
    TypeErrorInWhere(String),

    #[error("unknown identifier {0}")]
    UnknownIdentifier(String),

    #[error("unresolved reference {0}: no such node or edge")]
    UnresolvedReference(String),

    #[error("identifier {0} is already bound")]
    IdentifierAlreadyBound(String),

    #[error("node {0} needs a type label to be created")]
    NodeTypeRequired(String),

    #[error("edge between {0} and {1} needs a type label to be created")]
    EdgeTypeRequired(String, String),
}

impl EngineError {
    /// Position-carrying constructor used by the lexer and parser.
    pub fn syntax(line: u32, column: u32, message: impl Into<String>) -> Self {
        EngineError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}
