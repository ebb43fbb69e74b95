//! Data export: the committed instance as one replayable CREATE statement.
//!
//! Nodes come first (tables in creation order, rows by key), then edges as
//! three-element paths whose bare endpoint references resolve within the
//! statement. Emitting a single statement keeps the replay atomic, so
//! min-multiplicity bounds hold throughout.

use std::fmt::Write as _;

use super::EngineState;
use crate::matcher::resolved_edges;
use crate::schema::{ARRIVING_COLUMN, ID_COLUMN, LEAVING_COLUMN};
use crate::syntax::ast::render_ident;
use crate::values::Value;

pub(super) fn export_data(state: &EngineState) -> String {
    let mut paths: Vec<String> = Vec::new();

    for label in state.schema.node_labels() {
        let table = match state.tables.get(label) {
            Some(t) => t,
            None => continue,
        };
        for row in table.rows_by_key() {
            let id = table.primary_key(row);
            let mut item = format!(
                "({}:{}",
                render_ident(&id_text(id)),
                render_ident(label)
            );
            let props = render_props(table.columns.iter().map(|c| c.name.as_str()), &row.values, &[ID_COLUMN]);
            if !props.is_empty() {
                let _ = write!(item, " {{{}}}", props);
            }
            item.push(')');
            paths.push(item);
        }
    }

    for label in state.schema.edge_labels() {
        let table = match state.tables.get(label) {
            Some(t) => t,
            None => continue,
        };
        for edge in resolved_edges(&state.tables, &state.schema, label) {
            let row_idx = match table.find_row(&edge.id) {
                Some(i) => i,
                None => continue,
            };
            let row = &table.rows[row_idx];
            let mut item = format!(
                "({})-[{}:{}",
                render_ident(&id_text(&edge.leaving.id)),
                render_ident(&id_text(&edge.id)),
                render_ident(label)
            );
            let props = render_props(
                table.columns.iter().map(|c| c.name.as_str()),
                &row.values,
                &[ID_COLUMN, LEAVING_COLUMN, ARRIVING_COLUMN],
            );
            if !props.is_empty() {
                let _ = write!(item, " {{{}}}", props);
            }
            let _ = write!(item, "]->({})", render_ident(&id_text(&edge.arriving.id)));
            paths.push(item);
        }
    }

    if paths.is_empty() {
        String::new()
    } else {
        format!("CREATE\n  {};\n", paths.join(",\n  "))
    }
}

fn id_text(value: &Value) -> String {
    match value {
        Value::Char(s) => s.clone(),
        other => other.render(),
    }
}

fn render_props<'a>(
    columns: impl Iterator<Item = &'a str>,
    values: &[Value],
    skip: &[&str],
) -> String {
    let mut parts = Vec::new();
    for (name, value) in columns.zip(values) {
        if skip.contains(&name) || value.is_null() {
            continue;
        }
        parts.push(format!("{}: {}", render_ident(name), value.render()));
    }
    parts.join(", ")
}
