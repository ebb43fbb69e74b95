//! The engine: serialized statement execution over a transactional state.
//!
//! Each statement runs as its own transaction. A transaction works on a copy
//! of the committed state; commit validates keys, foreign keys,
//! multiplicities, and constraints over the whole working state and swaps it
//! in atomically, so an aborted statement leaves no trace. Disjoint-graph
//! tracking is updated at commit from the statement's net node and edge
//! deltas.

mod create;
mod exec;
mod export;
mod validate;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::EngineError;
use crate::graph::{Component, ComponentSet, EdgeRef, NodeRef};
use crate::matcher::{self, MatchResult};
use crate::relational::{Column, KeyRole, Row, Tables};
use crate::schema::{Multiplicity, SchemaCatalog, SchemaDiagnostic, TypeDecl};
use crate::syntax::ast::{render_ident, render_type_name};
use crate::syntax::{self, Statement};
use crate::values::{TypeId, TypeRegistry, Value};

/// Everything a statement can change, cloned at transaction begin.
#[derive(Debug, Clone)]
pub struct EngineState {
    pub types: TypeRegistry,
    pub tables: Tables,
    pub schema: SchemaCatalog,
    pub graphs: ComponentSet,
    /// Database-global counter behind generated `&n` names, shared between
    /// anonymous types and generated keys.
    pub next_anon: u64,
}

impl EngineState {
    fn new() -> Self {
        EngineState {
            types: TypeRegistry::new(),
            tables: Tables::new(),
            schema: SchemaCatalog::new(),
            graphs: ComponentSet::new(),
            next_anon: 1,
        }
    }

    pub fn alloc_anon(&mut self) -> String {
        let name = format!("&{}", self.next_anon);
        self.next_anon += 1;
        name
    }

    /// Keeps the generated-name counter ahead of any explicit `&n` name.
    pub fn bump_anon_past(&mut self, name: &str) {
        if let Some(digits) = name.strip_prefix('&') {
            if let Ok(n) = digits.parse::<u64>() {
                self.next_anon = self.next_anon.max(n + 1);
            }
        }
    }

    /// Addresses of all node rows, in table creation then key order.
    pub fn node_refs(&self) -> Vec<NodeRef> {
        let mut out = Vec::new();
        for label in self.schema.node_labels() {
            if let Some(table) = self.tables.get(label) {
                for row in table.rows_by_key() {
                    out.push(NodeRef {
                        label: label.to_string(),
                        id: table.primary_key(row).clone(),
                    });
                }
            }
        }
        out
    }

    /// Addresses of all edge rows with endpoints resolved.
    pub fn edge_refs(&self) -> Vec<EdgeRef> {
        let mut out = Vec::new();
        for label in self.schema.edge_labels() {
            out.extend(matcher::resolved_edges(&self.tables, &self.schema, label));
        }
        out
    }
}

struct Transaction {
    work: EngineState,
    diagnostics: Vec<SchemaDiagnostic>,
    /// Labels of tables created by this statement, for commit-time ordering.
    new_tables: Vec<String>,
    rows_inserted: usize,
    rows_updated: usize,
    rows_deleted: usize,
    rows_matched: Option<usize>,
}

/// Summary of one committed statement.
#[derive(Debug, Clone, Default)]
pub struct CommitReport {
    pub tables_created: Vec<String>,
    pub rows_inserted: usize,
    pub rows_updated: usize,
    pub rows_deleted: usize,
    /// Binding rows consumed by a trailing statement, when the statement was
    /// a MATCH.
    pub rows_matched: Option<usize>,
    pub diagnostics: Vec<SchemaDiagnostic>,
}

/// What one statement produced.
#[derive(Debug, Clone)]
pub enum StatementOutcome {
    Committed(CommitReport),
    Rows(MatchResult),
}

/// The embedded database engine. Statements execute serially; reads between
/// statements see the last committed state.
pub struct Engine {
    committed: EngineState,
    tx: Option<Transaction>,
}

impl Engine {
    pub fn new() -> Self {
        Engine {
            committed: EngineState::new(),
            tx: None,
        }
    }

    /// The last committed state.
    pub fn state(&self) -> &EngineState {
        &self.committed
    }

    pub fn components(&self) -> &[Component] {
        self.committed.graphs.components()
    }

    pub fn registry(&self) -> &TypeRegistry {
        &self.committed.types
    }

    pub fn schema_catalog(&self) -> &SchemaCatalog {
        &self.committed.schema
    }

    pub fn tables(&self) -> &Tables {
        &self.committed.tables
    }

    // ------------------------------------------------------------------
    // Transactional API
    // ------------------------------------------------------------------

    /// Opens the statement transaction; at most one can be open.
    pub fn begin_statement(&mut self) -> Result<(), EngineError> {
        if self.tx.is_some() {
            return Err(EngineError::TransactionAlreadyOpen);
        }
        self.tx = Some(Transaction {
            work: self.committed.clone(),
            diagnostics: Vec::new(),
            new_tables: Vec::new(),
            rows_inserted: 0,
            rows_updated: 0,
            rows_deleted: 0,
            rows_matched: None,
        });
        Ok(())
    }

    /// Drops the open transaction, restoring the pre-statement state.
    pub fn abort_statement(&mut self) {
        self.tx = None;
    }

    pub fn transaction_open(&self) -> bool {
        self.tx.is_some()
    }

    fn tx_mut(&mut self) -> Result<&mut Transaction, EngineError> {
        self.tx.as_mut().ok_or(EngineError::NoOpenTransaction)
    }

    /// Working state of the open transaction. Only called from staging code,
    /// which runs strictly between begin and commit.
    pub(super) fn work(&mut self) -> &mut EngineState {
        &mut self.tx.as_mut().expect("transaction open").work
    }

    pub(super) fn push_diagnostic(&mut self, diagnostic: SchemaDiagnostic) {
        if let Some(tx) = self.tx.as_mut() {
            tx.diagnostics.push(diagnostic);
        }
    }

    /// Records a table created inside schema machinery (generalization) so
    /// commit-time ordering sees it as part of this statement.
    pub(super) fn note_new_table(&mut self, label: &str) {
        if let Some(tx) = self.tx.as_mut() {
            if !tx.new_tables.iter().any(|t| t == label) {
                tx.new_tables.push(label.to_string());
            }
        }
    }

    pub(super) fn set_rows_matched(&mut self, rows: usize) {
        if let Some(tx) = self.tx.as_mut() {
            tx.rows_matched = Some(rows);
        }
    }

    /// Validates the working state and swaps it in. On violations the
    /// transaction is aborted and the committed state is untouched.
    pub fn commit(&mut self) -> Result<CommitReport, Vec<EngineError>> {
        let tx = match self.tx.take() {
            Some(tx) => tx,
            None => return Err(vec![EngineError::NoOpenTransaction]),
        };
        let mut work = tx.work;
        let violations = validate::validate(&work);
        if !violations.is_empty() {
            return Err(violations);
        }

        // New node tables come before new edge tables so that the schema
        // export replays in creation order with every reference pointing
        // backwards.
        let new_tables = tx.new_tables;
        let new_edge_tables: BTreeSet<String> = new_tables
            .iter()
            .filter(|name| work.schema.edge_decl(name).is_some())
            .cloned()
            .collect();
        let rank = |name: &str| -> usize {
            if !new_tables.iter().any(|t| t == name) {
                0
            } else if new_edge_tables.contains(name) {
                2
            } else {
                1
            }
        };
        work.tables.reorder_by(rank);
        work.schema.reorder_by(rank);

        // Replay the statement's net node/edge deltas into the graph set.
        let old_nodes: BTreeSet<NodeRef> = self.committed.node_refs().into_iter().collect();
        let old_edges: BTreeSet<EdgeRef> = self.committed.edge_refs().into_iter().collect();
        let new_nodes: BTreeSet<NodeRef> = work.node_refs().into_iter().collect();
        let new_edges: BTreeSet<EdgeRef> = work.edge_refs().into_iter().collect();
        for edge in old_edges.difference(&new_edges) {
            work.graphs
                .on_edge_removed(edge)
                .expect("committed edge is tracked");
        }
        for node in old_nodes.difference(&new_nodes) {
            work.graphs
                .on_node_removed(node)
                .expect("validated node removal");
        }
        for node in new_nodes.difference(&old_nodes) {
            work.graphs
                .on_node_added(node.clone())
                .expect("new node is untracked");
        }
        for edge in new_edges.difference(&old_edges) {
            work.graphs
                .on_edge_added(edge.clone())
                .expect("validated endpoints are tracked");
        }

        self.committed = work;
        Ok(CommitReport {
            tables_created: new_tables,
            rows_inserted: tx.rows_inserted,
            rows_updated: tx.rows_updated,
            rows_deleted: tx.rows_deleted,
            rows_matched: tx.rows_matched,
            diagnostics: tx.diagnostics,
        })
    }

    // ------------------------------------------------------------------
    // Staged relational operations (require an open transaction)
    // ------------------------------------------------------------------

    pub fn create_table(&mut self, name: &str, columns: Vec<Column>) -> Result<(), EngineError> {
        let tx = self.tx_mut()?;
        tx.work.tables.create(name, columns)?;
        tx.new_tables.push(name.to_string());
        Ok(())
    }

    pub fn insert_row(&mut self, table: &str, row: Row) -> Result<(), EngineError> {
        let tx = self.tx_mut()?;
        let table_ref = tx.work.tables.require(table)?;
        let pk = table_ref.primary_index();
        if let Value::Char(key) = &row.values[pk] {
            let key = key.clone();
            tx.work.bump_anon_past(&key);
        }
        let types = tx.work.types.clone();
        tx.work.tables.insert_row(&types, table, row)?;
        tx.rows_inserted += 1;
        Ok(())
    }

    pub fn update_property(
        &mut self,
        table: &str,
        key: &Value,
        column: &str,
        value: Value,
    ) -> Result<(), EngineError> {
        let tx = self.tx_mut()?;
        let types = tx.work.types.clone();
        tx.work
            .tables
            .update_property(&types, table, key, column, value)?;
        tx.rows_updated += 1;
        Ok(())
    }

    /// Stages a row deletion. Deleting a node row that is still referenced by
    /// an edge in the working state fails immediately, so edges must be
    /// deleted before their endpoints.
    pub fn delete_row(&mut self, table: &str, key: &Value) -> Result<(), EngineError> {
        let tx = self.tx_mut()?;
        if tx.work.schema.node_decl(table).is_some() {
            if let Some(by_table) = referencing_edge_table(&tx.work, table, key) {
                return Err(EngineError::ReferencedByForeignKey {
                    table: table.to_string(),
                    key: key.render(),
                    by_table,
                });
            }
        }
        tx.work.tables.delete_row(table, key)?;
        tx.rows_deleted += 1;
        Ok(())
    }

    // ------------------------------------------------------------------
    // Staged schema operations
    // ------------------------------------------------------------------

    pub fn declare_node_type(
        &mut self,
        label: &str,
        properties: &[(String, TypeId)],
        supertype: Option<&str>,
    ) -> Result<(), EngineError> {
        let tx = self.tx_mut()?;
        let anonymous = label.starts_with('&');
        tx.work.bump_anon_past(label);
        tx.work
            .schema
            .declare_node_type(&mut tx.work.tables, label, properties, supertype, anonymous)?;
        tx.new_tables.push(label.to_string());
        Ok(())
    }

    pub fn declare_edge_type(
        &mut self,
        label: &str,
        properties: &[(String, TypeId)],
        leaving: &str,
        arriving: &str,
        multiplicity: Option<(Multiplicity, Multiplicity)>,
    ) -> Result<(), EngineError> {
        let tx = self.tx_mut()?;
        tx.work.bump_anon_past(label);
        tx.work.schema.declare_edge_type(
            &mut tx.work.tables,
            label,
            properties,
            leaving,
            arriving,
            multiplicity,
        )?;
        tx.new_tables.push(label.to_string());
        Ok(())
    }

    /// Registers a data type. Outside a transaction the registration is its
    /// own statement and commits directly.
    pub fn register_type(
        &mut self,
        name: &str,
        spec: crate::values::TypeDefSpec,
    ) -> Result<TypeId, EngineError> {
        match &mut self.tx {
            Some(tx) => tx.work.types.register(name, spec),
            None => self.committed.types.register(name, spec),
        }
    }

    /// Registers a CHECK constraint on a declared type; applies to the open
    /// transaction when one exists, otherwise commits directly.
    pub fn add_constraint(&mut self, target: &str, predicate: &str) -> Result<(), EngineError> {
        match &mut self.tx {
            Some(tx) => tx.work.schema.add_constraint(&tx.work.tables, target, predicate),
            None => {
                let state = &mut self.committed;
                state.schema.add_constraint(&state.tables, target, predicate)
            }
        }
    }

    pub fn conforms(&self, instance: &str, declared: &str) -> Result<bool, EngineError> {
        self.committed.schema.conforms(instance, declared)
    }

    pub fn export_schema(&self) -> String {
        self.committed
            .schema
            .export(&self.committed.tables, &self.committed.types)
    }

    pub fn export_data(&self) -> String {
        export::export_data(&self.committed)
    }

    // ------------------------------------------------------------------
    // Statement execution
    // ------------------------------------------------------------------

    /// Parses and runs one statement in its own transaction.
    pub fn execute(&mut self, source: &str) -> Result<StatementOutcome, Vec<EngineError>> {
        if self.tx.is_some() {
            return Err(vec![EngineError::TransactionAlreadyOpen]);
        }
        let statement = syntax::parse_statement(source).map_err(|e| vec![e])?;
        self.execute_parsed(&statement)
    }

    pub fn execute_parsed(
        &mut self,
        statement: &Statement,
    ) -> Result<StatementOutcome, Vec<EngineError>> {
        match statement {
            Statement::Match(m) if m.trailing.is_none() => {
                let result = matcher::evaluate(
                    &self.committed.tables,
                    &self.committed.schema,
                    &m.paths,
                    m.where_clause.as_ref(),
                )
                .map_err(|e| vec![e])?;
                Ok(StatementOutcome::Rows(result))
            }
            other => {
                self.begin_statement().map_err(|e| vec![e])?;
                let staged = exec::stage_statement(self, other);
                match staged {
                    Ok(()) => self.commit().map(StatementOutcome::Committed),
                    Err(e) => {
                        self.abort_statement();
                        Err(vec![e])
                    }
                }
            }
        }
    }

    /// Splits source text into statements and runs each in order.
    pub fn execute_all(
        &mut self,
        source: &str,
    ) -> Vec<(String, Result<StatementOutcome, Vec<EngineError>>)> {
        let statements = match syntax::split_statements(source) {
            Ok(s) => s,
            Err(e) => return vec![(source.to_string(), Err(vec![e]))],
        };
        statements
            .into_iter()
            .map(|text| {
                let outcome = self.execute(&text);
                (text, outcome)
            })
            .collect()
    }

    /// Canonical textual dump: tables in creation order, columns in declared
    /// order, rows sorted by primary key. Byte-deterministic per state.
    pub fn dump(&self) -> String {
        let state = &self.committed;
        let mut out = String::new();
        for table in state.tables.iter() {
            let columns: Vec<String> = table
                .columns
                .iter()
                .map(|c| {
                    let mut text = format!(
                        "{} {}",
                        render_ident(&c.name),
                        render_type_name(state.types.name_of(c.ty))
                    );
                    match &c.role {
                        KeyRole::Primary => text.push_str(" PRIMARY KEY"),
                        KeyRole::Foreign { target } => {
                            let _ = write!(text, " REFERENCES {}", render_ident(target));
                        }
                        KeyRole::Plain => {}
                    }
                    text
                })
                .collect();
            let _ = writeln!(out, "{} ({})", render_ident(&table.name), columns.join(", "));
            for row in table.rows_by_key() {
                let values: Vec<String> = row.values.iter().map(|v| v.render()).collect();
                let _ = writeln!(out, "  ({})", values.join(", "));
            }
        }
        out
    }
}

impl Default for Engine {
    fn default() -> Self {
        Self::new()
    }
}

/// First edge table in creation order holding a reference to the given node
/// row, considering type families.
fn referencing_edge_table(state: &EngineState, node_table: &str, key: &Value) -> Option<String> {
    for decl in state.schema.decls() {
        let edge = match decl {
            TypeDecl::Edge(e) => e,
            _ => continue,
        };
        let table = match state.tables.get(&edge.label) {
            Some(t) => t,
            None => continue,
        };
        for (endpoint, column) in [
            (&edge.leaving, crate::schema::LEAVING_COLUMN),
            (&edge.arriving, crate::schema::ARRIVING_COLUMN),
        ] {
            let family = state.schema.family(endpoint);
            if !family.contains(&node_table) {
                continue;
            }
            let idx = match table.column_index(column) {
                Some(i) => i,
                None => continue,
            };
            for row in &table.rows {
                if &row.values[idx] == key {
                    // The reference targets this node only if resolution
                    // lands on its table.
                    if let Some(resolved) =
                        state.schema.resolve_node(&state.tables, endpoint, key)
                    {
                        if resolved.label == node_table {
                            return Some(edge.label.clone());
                        }
                    }
                }
            }
        }
    }
    None
}
