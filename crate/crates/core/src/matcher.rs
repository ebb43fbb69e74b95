//! MATCH evaluation: depth-first backtracking over pattern elements.
//!
//! Every identifier in a MATCH pattern is a variable. The walk proceeds along
//! each path binding node, edge, and property-value variables to database
//! entities; when an element cannot be matched the last binding is undone and
//! the next alternative is taken. A completed assignment that passes the
//! optional WHERE condition contributes one row to the default result.
//!
//! Candidates are enumerated in primary-key order with tables in creation
//! order, so results are reproducible. A label absent from the schema yields
//! zero rows rather than an error.

use std::collections::{HashMap, HashSet};

use crate::error::EngineError;
use crate::eval::{self, EvalContext, EvalTerm};
use crate::graph::{EdgeRef, NodeRef};
use crate::relational::Tables;
use crate::schema::{SchemaCatalog, ARRIVING_COLUMN, LEAVING_COLUMN};
use crate::syntax::ast::{Direction, Doc, DocValue, EdgeItem, Expr, NodeItem, Path};
use crate::values::{Literal, Value};

/// One bound entity or captured property value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bound {
    Node(NodeRef),
    Edge(EdgeRef),
    Val(Value),
}

impl Bound {
    pub fn render(&self) -> String {
        match self {
            Bound::Node(n) => n.render(),
            Bound::Edge(e) => e.render(),
            Bound::Val(v) => v.render(),
        }
    }
}

/// Result of a MATCH without a trailing statement: columns in
/// first-appearance order, duplicate-free rows in discovery order.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Bound>>,
}

impl MatchResult {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows as name → binding maps.
    pub fn binding_rows(&self) -> Vec<HashMap<String, Bound>> {
        self.rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .cloned()
                    .zip(row.iter().cloned())
                    .collect()
            })
            .collect()
    }
}

/// All node rows conforming to every given label, in candidate order.
/// Unknown labels produce an empty stream.
pub fn node_candidates(
    tables: &Tables,
    schema: &SchemaCatalog,
    labels: &[String],
) -> Vec<NodeRef> {
    let family: Vec<&str> = match labels.first() {
        Some(label) => {
            if schema.node_decl(label).is_none() {
                return Vec::new();
            }
            schema.family(label)
        }
        None => schema.node_labels(),
    };
    let mut out = Vec::new();
    for label in family {
        let conforms_rest = labels.iter().skip(1).all(|extra| {
            schema.conforms(label, extra).unwrap_or(false)
        });
        if !conforms_rest {
            continue;
        }
        if let Some(table) = tables.get(label) {
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

/// Edge rows of the label-filtered edge tables whose resolved endpoints agree
/// with any already-bound endpoints.
pub fn edge_candidates(
    tables: &Tables,
    schema: &SchemaCatalog,
    label: Option<&str>,
    leaving: Option<&NodeRef>,
    arriving: Option<&NodeRef>,
) -> Vec<EdgeRef> {
    let edge_labels: Vec<&str> = match label {
        Some(l) => {
            if schema.edge_decl(l).is_none() {
                return Vec::new();
            }
            vec![l]
        }
        None => schema.edge_labels(),
    };
    let mut out = Vec::new();
    for edge_label in edge_labels {
        for edge in resolved_edges(tables, schema, edge_label) {
            if leaving.is_none_or(|n| &edge.leaving == n)
                && arriving.is_none_or(|n| &edge.arriving == n)
            {
                out.push(edge);
            }
        }
    }
    out
}

/// All rows of one edge table with endpoints resolved; rows whose endpoints
/// do not resolve are skipped.
pub fn resolved_edges(tables: &Tables, schema: &SchemaCatalog, label: &str) -> Vec<EdgeRef> {
    let decl = match schema.edge_decl(label) {
        Some(d) => d,
        None => return Vec::new(),
    };
    let table = match tables.get(label) {
        Some(t) => t,
        None => return Vec::new(),
    };
    let (pk, leaving_idx, arriving_idx) = match (
        table.column_index(LEAVING_COLUMN),
        table.column_index(ARRIVING_COLUMN),
    ) {
        (Some(l), Some(a)) => (table.primary_index(), l, a),
        _ => return Vec::new(),
    };
    let mut out = Vec::new();
    for row in table.rows_by_key() {
        let leaving = schema.resolve_node(tables, &decl.leaving, &row.values[leaving_idx]);
        let arriving = schema.resolve_node(tables, &decl.arriving, &row.values[arriving_idx]);
        if let (Some(leaving), Some(arriving)) = (leaving, arriving) {
            out.push(EdgeRef {
                label: label.to_string(),
                id: row.values[pk].clone(),
                leaving,
                arriving,
            });
        }
    }
    out
}

/// Looks up a property of an entity; absent columns read as NULL.
pub fn entity_property(tables: &Tables, label: &str, id: &Value, property: &str) -> Value {
    let table = match tables.get(label) {
        Some(t) => t,
        None => return Value::Null,
    };
    let col = match table.column_index(property) {
        Some(c) => c,
        None => return Value::Null,
    };
    match table.find_row(id) {
        Some(row) => table.rows[row].values[col].clone(),
        None => Value::Null,
    }
}

/// Evaluates a MATCH pattern, returning the default result rows.
pub fn evaluate(
    tables: &Tables,
    schema: &SchemaCatalog,
    paths: &[Path],
    where_clause: Option<&Expr>,
) -> Result<MatchResult, EngineError> {
    let columns = collect_columns(paths);
    let mut walk = Walk {
        tables,
        schema,
        where_clause,
        columns: &columns,
        bindings: HashMap::new(),
        rows: Vec::new(),
        seen: HashSet::new(),
        error: None,
    };
    walk.paths(paths, 0, None);
    let (rows, error) = (walk.rows, walk.error);
    if let Some(err) = error {
        return Err(err);
    }
    Ok(MatchResult { columns, rows })
}

/// Identifiers in first-appearance order: path variables and doc value
/// variables, textually.
fn collect_columns(paths: &[Path]) -> Vec<String> {
    let mut columns = Vec::new();
    let push = |name: &str, columns: &mut Vec<String>| {
        if !columns.iter().any(|c| c == name) {
            columns.push(name.to_string());
        }
    };
    let doc_vars = |doc: &Option<Doc>, columns: &mut Vec<String>| {
        if let Some(doc) = doc {
            for (_, value) in &doc.entries {
                if let DocValue::Ident(name) = value {
                    if !columns.iter().any(|c| c == name) {
                        columns.push(name.clone());
                    }
                }
            }
        }
    };
    for path in paths {
        if let Some(id) = &path.start.id {
            push(id, &mut columns);
        }
        doc_vars(&path.start.doc, &mut columns);
        for (edge, node) in &path.segments {
            if let Some(id) = &edge.id {
                push(id, &mut columns);
            }
            doc_vars(&edge.doc, &mut columns);
            if let Some(id) = &node.id {
                push(id, &mut columns);
            }
            doc_vars(&node.doc, &mut columns);
        }
    }
    columns
}

struct Walk<'a> {
    tables: &'a Tables,
    schema: &'a SchemaCatalog,
    where_clause: Option<&'a Expr>,
    columns: &'a [String],
    bindings: HashMap<String, Bound>,
    rows: Vec<Vec<Bound>>,
    seen: HashSet<Vec<Bound>>,
    error: Option<EngineError>,
}

impl<'a> Walk<'a> {
    fn paths(&mut self, paths: &[Path], path_idx: usize, _last: Option<NodeRef>) {
        if self.error.is_some() {
            return;
        }
        match paths.get(path_idx) {
            None => self.complete(),
            Some(path) => self.node_step(paths, path_idx, path, None),
        }
    }

    /// Binds the start node of a path, then walks its segments.
    fn node_step(&mut self, paths: &[Path], path_idx: usize, path: &Path, _from: Option<()>) {
        let item = &path.start;
        let candidates = self.node_item_candidates(item);
        for node in candidates {
            let mut trail = Vec::new();
            if self.admit_node(item, &node, &mut trail) {
                self.segments(paths, path_idx, path, 0, node);
            }
            self.unwind(trail);
            if self.error.is_some() {
                return;
            }
        }
    }

    fn segments(
        &mut self,
        paths: &[Path],
        path_idx: usize,
        path: &Path,
        seg_idx: usize,
        left: NodeRef,
    ) {
        if self.error.is_some() {
            return;
        }
        let (edge_item, node_item) = match path.segments.get(seg_idx) {
            None => {
                self.paths(paths, path_idx + 1, Some(left));
                return;
            }
            Some(seg) => seg,
        };
        for edge in self.edge_item_candidates(edge_item, &left) {
            let right = match edge_item.direction {
                Direction::Rightward => edge.arriving.clone(),
                Direction::Leftward => edge.leaving.clone(),
            };
            let mut trail = Vec::new();
            if self.admit_edge(edge_item, &edge, &mut trail)
                && self.admit_node(node_item, &right, &mut trail)
            {
                self.segments(paths, path_idx, path, seg_idx + 1, right);
            }
            self.unwind(trail);
            if self.error.is_some() {
                return;
            }
        }
    }

    fn node_item_candidates(&self, item: &NodeItem) -> Vec<NodeRef> {
        if let Some(id) = &item.id {
            if let Some(bound) = self.bindings.get(id) {
                return match bound {
                    Bound::Node(n) => vec![n.clone()],
                    // A kind clash binds nothing.
                    _ => Vec::new(),
                };
            }
        }
        node_candidates(self.tables, self.schema, &item.labels)
    }

    fn edge_item_candidates(&self, item: &EdgeItem, left: &NodeRef) -> Vec<EdgeRef> {
        let (leaving, arriving) = match item.direction {
            Direction::Rightward => (Some(left), None),
            Direction::Leftward => (None, Some(left)),
        };
        if let Some(id) = &item.id {
            if let Some(bound) = self.bindings.get(id) {
                return match bound {
                    Bound::Edge(e) => {
                        let end_ok = match item.direction {
                            Direction::Rightward => &e.leaving == left,
                            Direction::Leftward => &e.arriving == left,
                        };
                        if end_ok {
                            vec![e.clone()]
                        } else {
                            Vec::new()
                        }
                    }
                    _ => Vec::new(),
                };
            }
        }
        edge_candidates(
            self.tables,
            self.schema,
            item.label.as_deref(),
            leaving,
            arriving,
        )
    }

    /// Checks labels and doc constraints and binds the item's variables.
    /// Returns false (without touching `error`) when the candidate fails.
    fn admit_node(&mut self, item: &NodeItem, node: &NodeRef, trail: &mut Vec<String>) -> bool {
        for label in &item.labels {
            if !self.schema.conforms(&node.label, label).unwrap_or(false) {
                return false;
            }
        }
        if !self.admit_doc(&item.doc, &node.label, &node.id, trail) {
            return false;
        }
        if let Some(id) = &item.id {
            match self.bindings.get(id) {
                Some(Bound::Node(existing)) => return existing == node,
                Some(_) => return false,
                None => {
                    self.bindings.insert(id.clone(), Bound::Node(node.clone()));
                    trail.push(id.clone());
                }
            }
        }
        true
    }

    fn admit_edge(&mut self, item: &EdgeItem, edge: &EdgeRef, trail: &mut Vec<String>) -> bool {
        if let Some(label) = &item.label {
            if &edge.label != label {
                return false;
            }
        }
        if !self.admit_doc(&item.doc, &edge.label, &edge.id, trail) {
            return false;
        }
        if let Some(id) = &item.id {
            match self.bindings.get(id) {
                Some(Bound::Edge(existing)) => return existing == edge,
                Some(_) => return false,
                None => {
                    self.bindings.insert(id.clone(), Bound::Edge(edge.clone()));
                    trail.push(id.clone());
                }
            }
        }
        true
    }

    /// Doc constraints: a constant must equal the stored property, an
    /// identifier captures it (consistently across reuses). NULL properties
    /// never produce a binding.
    fn admit_doc(
        &mut self,
        doc: &Option<Doc>,
        label: &str,
        id: &Value,
        trail: &mut Vec<String>,
    ) -> bool {
        let doc = match doc {
            Some(d) => d,
            None => return true,
        };
        for (key, expected) in &doc.entries {
            let actual = entity_property(self.tables, label, id, key);
            match expected {
                DocValue::Literal(Literal::Null) => {
                    if !actual.is_null() {
                        return false;
                    }
                }
                DocValue::Literal(lit) => {
                    if actual != lit.to_value() {
                        return false;
                    }
                }
                DocValue::Ident(var) => {
                    if actual.is_null() {
                        return false;
                    }
                    match self.bindings.get(var) {
                        Some(Bound::Val(existing)) => {
                            if existing != &actual {
                                return false;
                            }
                        }
                        Some(_) => return false,
                        None => {
                            self.bindings.insert(var.clone(), Bound::Val(actual));
                            trail.push(var.clone());
                        }
                    }
                }
                DocValue::Array(_) => return false,
            }
        }
        true
    }

    fn unwind(&mut self, trail: Vec<String>) {
        for name in trail {
            self.bindings.remove(&name);
        }
    }

    fn complete(&mut self) {
        if let Some(cond) = self.where_clause {
            let ctx = BindingContext {
                tables: self.tables,
                bindings: &self.bindings,
            };
            match eval::eval(cond, &ctx) {
                Ok(t) if t.definitely_true() => {}
                Ok(_) => return,
                Err(e) => {
                    self.error = Some(e);
                    return;
                }
            }
        }
        let row: Vec<Bound> = self
            .columns
            .iter()
            .map(|name| self.bindings.get(name).cloned().expect("total binding"))
            .collect();
        if self.seen.insert(row.clone()) {
            self.rows.push(row);
        }
    }
}

/// WHERE-clause evaluation environment over one complete binding.
pub struct BindingContext<'a> {
    pub tables: &'a Tables,
    pub bindings: &'a HashMap<String, Bound>,
}

impl EvalContext for BindingContext<'_> {
    fn ident(&self, name: &str) -> Result<EvalTerm, EngineError> {
        match self.bindings.get(name) {
            Some(Bound::Val(v)) => Ok(EvalTerm::Value(v.clone())),
            Some(_) => Ok(EvalTerm::Entity),
            None => Err(EngineError::UnknownIdentifier(name.to_string())),
        }
    }

    fn property(&self, base: &str, property: &str) -> Result<Value, EngineError> {
        match self.bindings.get(base) {
            Some(Bound::Node(n)) => Ok(entity_property(self.tables, &n.label, &n.id, property)),
            Some(Bound::Edge(e)) => Ok(entity_property(self.tables, &e.label, &e.id, property)),
            Some(Bound::Val(_)) => Err(EngineError::TypeErrorInWhere(format!(
                "{} is a value and has no properties",
                base
            ))),
            None => Err(EngineError::UnknownIdentifier(base.to_string())),
        }
    }
}
