//! Staging of parsed statements into the open transaction.



use super::create::{self, Env};
use super::Engine;
use crate::error::EngineError;
use crate::eval;
use crate::matcher::{self, Bound, BindingContext};
use crate::syntax::ast::{CreateTypeStmt, DeleteStmt, DocValue, SetStmt, Statement, TypeKindClause};
use crate::values::{Literal, TypeId, Value};

pub(super) fn stage_statement(engine: &mut Engine, statement: &Statement) -> Result<(), EngineError> {
    let env = Env::new();
    match statement {
        Statement::CreateGraph(paths) => create::run_create(engine, paths, &env),
        Statement::CreateType(stmt) => run_create_type(engine, stmt),
        Statement::Set(stmt) => run_set(engine, stmt, &env),
        Statement::Delete(stmt) => run_delete(engine, stmt, &env),
        Statement::Match(stmt) => {
            let trailing = stmt
                .trailing
                .as_deref()
                .expect("bare MATCH is handled without a transaction");
            // The read phase runs against the stable committed snapshot.
            let result = matcher::evaluate(
                &engine.committed.tables,
                &engine.committed.schema,
                &stmt.paths,
                stmt.where_clause.as_ref(),
            )?;
            engine.set_rows_matched(result.rows.len());
            for env in result.binding_rows() {
                match trailing {
                    Statement::CreateGraph(paths) => create::run_create(engine, paths, &env)?,
                    Statement::Set(set) => run_set(engine, set, &env)?,
                    Statement::Delete(delete) => run_delete(engine, delete, &env)?,
                    _ => unreachable!("parser restricts trailing statements"),
                }
            }
            Ok(())
        }
    }
}

fn run_create_type(engine: &mut Engine, stmt: &CreateTypeStmt) -> Result<(), EngineError> {
    let mut columns: Vec<(String, TypeId)> = Vec::new();
    for (name, type_name) in &stmt.columns {
        let ty = engine.work().types.lookup(type_name).ok_or_else(|| {
            EngineError::UnknownColumnType {
                column: name.clone(),
                type_name: type_name.clone(),
            }
        })?;
        columns.push((name.clone(), ty));
    }

    let bounds = create::multiplicity_metadata(&stmt.doc)?;
    let mut checks: Vec<String> = Vec::new();
    if let Some(doc) = &stmt.doc {
        for (key, value) in &doc.entries {
            match key.as_str() {
                "MULTIPLICITY" => {}
                "CHECK" => match value {
                    DocValue::Literal(Literal::Str(text)) => checks.push(text.clone()),
                    DocValue::Array(items) => {
                        for item in items {
                            match item {
                                DocValue::Literal(Literal::Str(text)) => {
                                    checks.push(text.clone())
                                }
                                _ => {
                                    return Err(EngineError::InvalidMetadata(
                                        "CHECK expects a string predicate".into(),
                                    ))
                                }
                            }
                        }
                    }
                    _ => {
                        return Err(EngineError::InvalidMetadata(
                            "CHECK expects a string predicate".into(),
                        ))
                    }
                },
                other => {
                    return Err(EngineError::InvalidMetadata(format!(
                        "unknown metadata key {} in CREATE TYPE",
                        other
                    )))
                }
            }
        }
    }

    match &stmt.kind {
        TypeKindClause::Node => {
            if bounds.is_some() {
                return Err(EngineError::InvalidMetadata(
                    "MULTIPLICITY applies to edge types".into(),
                ));
            }
            engine.declare_node_type(&stmt.label, &columns, None)?;
        }
        TypeKindClause::Edge { leaving, arriving } => {
            engine.declare_edge_type(&stmt.label, &columns, leaving, arriving, bounds)?;
        }
        TypeKindClause::Under(supertype) => {
            if bounds.is_some() {
                return Err(EngineError::InvalidMetadata(
                    "MULTIPLICITY applies to edge types".into(),
                ));
            }
            if engine.work().schema.has(&stmt.label) {
                // Retrofit an UNDER link onto an existing node type.
                if !stmt.columns.is_empty() {
                    return Err(EngineError::DuplicateTypeLabel(stmt.label.clone()));
                }
                engine.work().schema.retrofit_under(&stmt.label, supertype)?;
            } else {
                engine.declare_node_type(&stmt.label, &columns, Some(supertype))?;
            }
        }
    }

    for predicate in checks {
        let work = engine.work();
        work.schema
            .add_constraint(&work.tables, &stmt.label, &predicate)?;
    }
    Ok(())
}

fn run_set(engine: &mut Engine, stmt: &SetStmt, env: &Env) -> Result<(), EngineError> {
    let (table, key) = resolve_entity(engine, &stmt.target, env)?;
    let ctx = BindingContext {
        tables: &engine.committed.tables,
        bindings: env,
    };
    let value = eval::atom_value(&stmt.value, &ctx)?;
    engine.update_property(&table, &key, &stmt.property, value)
}

fn run_delete(engine: &mut Engine, stmt: &DeleteStmt, env: &Env) -> Result<(), EngineError> {
    let (table, key) = resolve_entity(engine, &stmt.target, env)?;
    engine.delete_row(&table, &key)
}

/// Resolves a SET/DELETE target to (table, key): a bound variable when one
/// exists, otherwise a node then edge row with that primary key.
fn resolve_entity(
    engine: &mut Engine,
    target: &str,
    env: &Env,
) -> Result<(String, Value), EngineError> {
    if let Some(bound) = env.get(target) {
        return match bound {
            Bound::Node(n) => Ok((n.label.clone(), n.id.clone())),
            Bound::Edge(e) => Ok((e.label.clone(), e.id.clone())),
            Bound::Val(_) => Err(EngineError::TypeMismatch {
                context: target.to_string(),
                expected: "node or edge binding".into(),
                found: "value binding".into(),
            }),
        };
    }
    let work = engine.work();
    let key = Value::Char(target.to_string());
    let labels: Vec<String> = work
        .schema
        .node_labels()
        .into_iter()
        .chain(work.schema.edge_labels())
        .map(str::to_string)
        .collect();
    for label in labels {
        if let Some(table) = work.tables.get(&label) {
            if table.find_row(&key).is_some() {
                return Ok((label, key));
            }
        }
    }
    Err(EngineError::UnresolvedReference(target.to_string()))
}
