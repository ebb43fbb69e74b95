//! Execution of graph CREATE statements.
//!
//! A CREATE runs in two phases inside its transaction. The first walks every
//! path and develops the schema: new labels become node or edge types with
//! columns inferred from their doc literals, existing types gain missing
//! columns, and an edge meeting an incompatible endpoint type triggers
//! generalization. The second walk generates the rows, supplying `&n` keys
//! where none were given. Because nothing is committed until both phases and
//! the validation sweep succeed, inference never leaves partial schema
//! behind.

use std::collections::HashMap;

use super::{Engine, EngineState};
use crate::error::EngineError;
use crate::graph::NodeRef;
use crate::matcher::Bound;
use crate::relational::{Column, Row};
use crate::schema::{EdgeEnd, Multiplicity, ARRIVING_COLUMN, ID_COLUMN, LEAVING_COLUMN};
use crate::syntax::ast::{Direction, Doc, DocValue, EdgeItem, NodeItem, Path};
use crate::values::{Literal, TypeRegistry, Value};

pub(super) type Env = HashMap<String, Bound>;

const MULTIPLICITY_KEY: &str = "MULTIPLICITY";

pub(super) fn run_create(
    engine: &mut Engine,
    paths: &[Path],
    env: &Env,
) -> Result<(), EngineError> {
    elaborate(engine, paths, env)?;
    instantiate(engine, paths, env)
}

// ----------------------------------------------------------------------
// Phase 1: schema inference
// ----------------------------------------------------------------------

fn elaborate(engine: &mut Engine, paths: &[Path], env: &Env) -> Result<(), EngineError> {
    // Node types first, so every edge can name its endpoints.
    let mut type_scope: HashMap<String, String> = HashMap::new();
    for path in paths {
        for item in path.node_items() {
            elaborate_node_item(engine, item, env, &mut type_scope)?;
        }
    }
    for path in paths {
        for (idx, (edge, right)) in path.segments.iter().enumerate() {
            let left = if idx == 0 {
                &path.start
            } else {
                &path.segments[idx - 1].1
            };
            let left_type = item_type(engine, left, env, &type_scope)?;
            let right_type = item_type(engine, right, env, &type_scope)?;
            let (leaving, arriving) = match edge.direction {
                Direction::Rightward => (left_type, right_type),
                Direction::Leftward => (right_type, left_type),
            };
            elaborate_edge(engine, edge, &leaving, &arriving)?;
        }
    }
    Ok(())
}

fn elaborate_node_item(
    engine: &mut Engine,
    item: &NodeItem,
    env: &Env,
    type_scope: &mut HashMap<String, String>,
) -> Result<(), EngineError> {
    if item.is_bare() {
        return Ok(());
    }
    let primary = match item.labels.first() {
        Some(label) => label.clone(),
        None => {
            let what = item.id.clone().unwrap_or_else(|| "(anonymous)".into());
            return Err(EngineError::NodeTypeRequired(what));
        }
    };
    if let Some(id) = &item.id {
        if env.contains_key(id) {
            return Err(EngineError::IdentifierAlreadyBound(id.clone()));
        }
    }

    if !engine.work().schema.has(&primary) {
        let properties = inferred_properties(&item.doc, false)?;
        engine.declare_node_type(&primary, &properties, None)?;
    } else {
        if engine.work().schema.node_decl(&primary).is_none() {
            return Err(EngineError::NotANodeType(primary.clone()));
        }
        widen_type(engine, &primary, &item.doc, false)?;
    }

    // A second label ascribes a supertype, as in `:WoodScrew:&1`.
    if let Some(ascribed) = item.labels.get(1) {
        if !engine.work().schema.has(ascribed) {
            engine.declare_node_type(ascribed, &[], None)?;
        }
        let work = engine.work();
        if work.schema.node_decl(ascribed).is_none() {
            return Err(EngineError::NotANodeType(ascribed.clone()));
        }
        if !work.schema.conforms(&primary, ascribed)? {
            let root = work.schema.root_of(&primary).to_string();
            work.schema.retrofit_under(&root, ascribed)?;
            let message = format!("{} declared UNDER {}", root, ascribed);
            engine.push_diagnostic(crate::schema::SchemaDiagnostic {
                kind: crate::schema::DiagnosticKind::GeneralizationPerformed,
                labels: vec![root, ascribed.clone()],
                message,
            });
        }
    }

    if let Some(id) = &item.id {
        type_scope.entry(id.clone()).or_insert(primary);
    }
    Ok(())
}

/// The node type a path item contributes to edge typing.
fn item_type(
    engine: &mut Engine,
    item: &NodeItem,
    env: &Env,
    type_scope: &HashMap<String, String>,
) -> Result<String, EngineError> {
    if let Some(label) = item.labels.first() {
        return Ok(label.clone());
    }
    let id = item.id.as_ref().expect("label-less items carry an id");
    if let Some(bound) = env.get(id) {
        return match bound {
            Bound::Node(node) => Ok(node.label.clone()),
            _ => Err(EngineError::TypeMismatch {
                context: id.clone(),
                expected: "node binding".into(),
                found: "edge or value binding".into(),
            }),
        };
    }
    if let Some(label) = type_scope.get(id) {
        return Ok(label.clone());
    }
    let work = engine.work();
    let key = Value::Char(id.clone());
    for label in work.schema.node_labels() {
        if let Some(table) = work.tables.get(label) {
            if table.find_row(&key).is_some() {
                return Ok(label.to_string());
            }
        }
    }
    Err(EngineError::UnresolvedReference(id.clone()))
}

fn elaborate_edge(
    engine: &mut Engine,
    edge: &EdgeItem,
    leaving: &str,
    arriving: &str,
) -> Result<(), EngineError> {
    let label = match &edge.label {
        Some(label) => label.clone(),
        None => {
            return Err(EngineError::EdgeTypeRequired(
                leaving.to_string(),
                arriving.to_string(),
            ))
        }
    };
    let bounds = multiplicity_metadata(&edge.doc)?;

    if !engine.work().schema.has(&label) {
        let properties = inferred_properties(&edge.doc, true)?;
        engine.declare_edge_type(&label, &properties, leaving, arriving, bounds)?;
        return Ok(());
    }
    if engine.work().schema.edge_decl(&label).is_none() {
        return Err(EngineError::NotAnEdgeType(label.clone()));
    }
    if let Some(bounds) = bounds {
        engine.work().schema.set_multiplicity(&label, bounds)?;
    }
    widen_type(engine, &label, &edge.doc, true)?;

    // Endpoint conformance; a mismatch generalizes rather than fails.
    for (end, wanted) in [(EdgeEnd::Leaving, leaving), (EdgeEnd::Arriving, arriving)] {
        let declared = {
            let decl = engine.work().schema.edge_decl(&label).expect("edge exists");
            match end {
                EdgeEnd::Leaving => decl.leaving.clone(),
                EdgeEnd::Arriving => decl.arriving.clone(),
            }
        };
        if engine.work().schema.conforms(wanted, &declared)? {
            continue;
        }
        let work = engine.work();
        let EngineState {
            schema,
            tables,
            next_anon,
            ..
        } = work;
        let diags = schema.generalize_endpoint(tables, &label, end, wanted, next_anon)?;
        for diag in diags {
            if diag.kind == crate::schema::DiagnosticKind::NewAnonymousType {
                if let Some(anon) = diag.labels.first() {
                    let anon = anon.clone();
                    engine.note_new_table(&anon);
                }
            }
            engine.push_diagnostic(diag);
        }
    }
    Ok(())
}

/// Property columns inferred from a doc's literal values; NULL and variable
/// values contribute no column here.
fn inferred_properties(
    doc: &Option<Doc>,
    is_edge: bool,
) -> Result<Vec<(String, crate::values::TypeId)>, EngineError> {
    let mut properties = Vec::new();
    if let Some(doc) = doc {
        for (key, value) in &doc.entries {
            if is_metadata_key(key, is_edge) {
                continue;
            }
            match value {
                DocValue::Literal(Literal::Null) | DocValue::Ident(_) => {}
                DocValue::Literal(lit) => {
                    let kind = lit.kind().expect("non-null literal has a kind");
                    properties.push((key.clone(), TypeRegistry::simple(kind)));
                }
                DocValue::Array(_) => {
                    return Err(EngineError::InvalidMetadata(format!(
                        "unexpected array value for property {}",
                        key
                    )))
                }
            }
        }
    }
    Ok(properties)
}

/// Adds columns for properties unknown to an existing type; a conflicting
/// kind for a known column is an error, not a migration.
fn widen_type(
    engine: &mut Engine,
    label: &str,
    doc: &Option<Doc>,
    is_edge: bool,
) -> Result<(), EngineError> {
    let doc = match doc {
        Some(d) => d,
        None => return Ok(()),
    };
    for (key, value) in &doc.entries {
        if is_metadata_key(key, is_edge) {
            continue;
        }
        let lit = match value {
            DocValue::Literal(Literal::Null) | DocValue::Ident(_) => continue,
            DocValue::Literal(lit) => lit,
            DocValue::Array(_) => {
                return Err(EngineError::InvalidMetadata(format!(
                    "unexpected array value for property {}",
                    key
                )))
            }
        };
        let kind = lit.kind().expect("non-null literal has a kind");
        let work = engine.work();
        let table = work.tables.require(label)?;
        match table.column_index(key) {
            Some(idx) => {
                let column_ty = table.columns[idx].ty;
                if work.types.base_kind(column_ty) != Some(kind) {
                    return Err(EngineError::TypeMismatch {
                        context: format!("{}.{}", label, key),
                        expected: work.types.name_of(column_ty).to_string(),
                        found: format!("{} literal {}", kind.name(), lit.render()),
                    });
                }
            }
            None => {
                work.tables
                    .add_column(label, Column::plain(key.clone(), TypeRegistry::simple(kind)))?;
            }
        }
    }
    Ok(())
}

fn is_metadata_key(key: &str, is_edge: bool) -> bool {
    is_edge && key == MULTIPLICITY_KEY
}

/// Parses the MULTIPLICITY metadata value: `[[min, max], [min, max]]` for
/// the leaving and arriving ends, with `'*'` as an unbounded max.
pub(super) fn multiplicity_metadata(
    doc: &Option<Doc>,
) -> Result<Option<(Multiplicity, Multiplicity)>, EngineError> {
    let value = match doc.as_ref().and_then(|d| d.get(MULTIPLICITY_KEY)) {
        Some(v) => v,
        None => return Ok(None),
    };
    let invalid = || {
        EngineError::InvalidMetadata(
            "MULTIPLICITY expects [[min, max], [min, max]] with '*' for unbounded".to_string(),
        )
    };
    let ends = match value {
        DocValue::Array(items) if items.len() == 2 => items,
        _ => return Err(invalid()),
    };
    let mut parsed = Vec::with_capacity(2);
    for end in ends {
        let pair = match end {
            DocValue::Array(pair) if pair.len() == 2 => pair,
            _ => return Err(invalid()),
        };
        let min = match &pair[0] {
            DocValue::Literal(Literal::Num(n)) if *n >= 0 => *n as u32,
            _ => return Err(invalid()),
        };
        let max = match &pair[1] {
            DocValue::Literal(Literal::Num(n)) if *n >= 0 => Some(*n as u32),
            DocValue::Literal(Literal::Str(s)) if s == "*" => None,
            _ => return Err(invalid()),
        };
        if let Some(max) = max {
            if min > max {
                return Err(invalid());
            }
        }
        parsed.push(Multiplicity { min, max });
    }
    Ok(Some((parsed[0], parsed[1])))
}

// ----------------------------------------------------------------------
// Phase 2: row generation
// ----------------------------------------------------------------------

fn instantiate(engine: &mut Engine, paths: &[Path], env: &Env) -> Result<(), EngineError> {
    let mut scope: HashMap<String, NodeRef> = HashMap::new();
    for path in paths {
        let first_family = path.segments.first().and_then(|(edge, _)| {
            endpoint_family(engine, edge, true)
        });
        let mut current =
            materialize_node(engine, &path.start, env, &mut scope, first_family)?;
        for (edge, node) in &path.segments {
            let family = endpoint_family(engine, edge, false);
            let right = materialize_node(engine, node, env, &mut scope, family)?;
            create_edge_row(engine, edge, &current, &right, env)?;
            current = right;
        }
    }
    Ok(())
}

/// The family root the given end of an edge points at, used to disambiguate
/// bare references: `left` selects the end adjacent to the path's previous
/// node item.
fn endpoint_family(engine: &mut Engine, edge: &EdgeItem, left: bool) -> Option<String> {
    let label = edge.label.as_deref()?;
    let decl = engine.work().schema.edge_decl(label)?;
    let leaving_side = match edge.direction {
        Direction::Rightward => left,
        Direction::Leftward => !left,
    };
    Some(if leaving_side {
        decl.leaving.clone()
    } else {
        decl.arriving.clone()
    })
}

fn materialize_node(
    engine: &mut Engine,
    item: &NodeItem,
    env: &Env,
    scope: &mut HashMap<String, NodeRef>,
    family: Option<String>,
) -> Result<NodeRef, EngineError> {
    if item.is_bare() {
        let id = item.id.as_ref().expect("bare items carry an id");
        let node = resolve_reference(engine, id, env, scope, family)?;
        scope.entry(id.clone()).or_insert_with(|| node.clone());
        return Ok(node);
    }

    let label = item.labels.first().expect("elaboration required a label").clone();
    let key_text = match &item.id {
        Some(id) => id.clone(),
        None => engine.work().alloc_anon(),
    };
    engine.work().bump_anon_past(&key_text);
    let key = Value::Char(key_text.clone());
    let row = build_row(engine, &label, &key, None, &item.doc, env, false)?;
    engine.insert_row(&label, row)?;
    let node = NodeRef {
        label,
        id: key,
    };
    if item.id.is_some() {
        scope.entry(key_text).or_insert_with(|| node.clone());
    }
    Ok(node)
}

/// Resolves a bare node reference: match bindings first, then ids introduced
/// by this statement, then the adjacent edge's endpoint family, then any
/// node table in creation order.
fn resolve_reference(
    engine: &mut Engine,
    id: &str,
    env: &Env,
    scope: &HashMap<String, NodeRef>,
    family: Option<String>,
) -> Result<NodeRef, EngineError> {
    if let Some(bound) = env.get(id) {
        return match bound {
            Bound::Node(node) => Ok(node.clone()),
            _ => Err(EngineError::TypeMismatch {
                context: id.to_string(),
                expected: "node binding".into(),
                found: "edge or value binding".into(),
            }),
        };
    }
    if let Some(node) = scope.get(id) {
        return Ok(node.clone());
    }
    let work = engine.work();
    let key = Value::Char(id.to_string());
    if let Some(root) = family {
        if let Some(node) = work.schema.resolve_node(&work.tables, &root, &key) {
            return Ok(node);
        }
    }
    for label in work.schema.node_labels() {
        if let Some(table) = work.tables.get(label) {
            if table.find_row(&key).is_some() {
                return Ok(NodeRef {
                    label: label.to_string(),
                    id: key,
                });
            }
        }
    }
    Err(EngineError::UnresolvedReference(id.to_string()))
}

fn create_edge_row(
    engine: &mut Engine,
    edge: &EdgeItem,
    left: &NodeRef,
    right: &NodeRef,
    env: &Env,
) -> Result<(), EngineError> {
    let label = edge.label.clone().expect("elaboration required a label");
    let key_text = match &edge.id {
        Some(id) => id.clone(),
        None => engine.work().alloc_anon(),
    };
    engine.work().bump_anon_past(&key_text);
    let key = Value::Char(key_text);
    let (leaving, arriving) = match edge.direction {
        Direction::Rightward => (left, right),
        Direction::Leftward => (right, left),
    };
    let row = build_row(
        engine,
        &label,
        &key,
        Some((leaving.id.clone(), arriving.id.clone())),
        &edge.doc,
        env,
        true,
    )?;
    engine.insert_row(&label, row)?;
    Ok(())
}

/// Assembles a row for the current column layout of a table, coercing doc
/// literals and substituting bound variables. A variable value for a column
/// the type does not yet have widens the type on the spot.
fn build_row(
    engine: &mut Engine,
    label: &str,
    key: &Value,
    endpoints: Option<(Value, Value)>,
    doc: &Option<Doc>,
    env: &Env,
    is_edge: bool,
) -> Result<Row, EngineError> {
    // Widen first for variable-valued properties, so the column list below
    // is complete.
    if let Some(doc) = doc {
        for (prop, value) in &doc.entries {
            if is_metadata_key(prop, is_edge) {
                continue;
            }
            if let DocValue::Ident(var) = value {
                let bound = resolve_value_var(var, env)?;
                let work = engine.work();
                if work.tables.require(label)?.column_index(prop).is_none() {
                    if let Some(kind) = bound.kind() {
                        work.tables
                            .add_column(label, Column::plain(prop.clone(), TypeRegistry::simple(kind)))?;
                    }
                }
            }
        }
    }

    let work = engine.work();
    let table = work.tables.require(label)?;
    let columns: Vec<(String, crate::values::TypeId)> = table
        .columns
        .iter()
        .map(|c| (c.name.clone(), c.ty))
        .collect();
    let mut values = Vec::with_capacity(columns.len());
    for (name, ty) in &columns {
        if name == ID_COLUMN {
            values.push(key.clone());
            continue;
        }
        if let Some((leaving, arriving)) = &endpoints {
            if name == LEAVING_COLUMN {
                values.push(leaving.clone());
                continue;
            }
            if name == ARRIVING_COLUMN {
                values.push(arriving.clone());
                continue;
            }
        }
        let entry = doc.as_ref().and_then(|d| d.get(name));
        let value = match entry {
            None => Value::Null,
            Some(DocValue::Literal(lit)) => engine.work().types.coerce_literal(lit, *ty)?,
            Some(DocValue::Ident(var)) => {
                let value = resolve_value_var(var, env)?;
                engine.work().types.check_value(&value, *ty).map_err(|e| {
                    match e {
                        EngineError::TypeMismatch { expected, found, .. } => {
                            EngineError::TypeMismatch {
                                context: format!("{}.{}", label, name),
                                expected,
                                found,
                            }
                        }
                        other => other,
                    }
                })?;
                value
            }
            Some(DocValue::Array(_)) => {
                return Err(EngineError::InvalidMetadata(format!(
                    "unexpected array value for property {}",
                    name
                )))
            }
        };
        values.push(value);
    }
    Ok(Row::new(values))
}

fn resolve_value_var(var: &str, env: &Env) -> Result<Value, EngineError> {
    match env.get(var) {
        Some(Bound::Val(v)) => Ok(v.clone()),
        Some(_) => Err(EngineError::TypeMismatch {
            context: var.to_string(),
            expected: "property value binding".into(),
            found: "node or edge binding".into(),
        }),
        None => Err(EngineError::UnknownIdentifier(var.to_string())),
    }
}
