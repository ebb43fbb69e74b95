//! Commit-time validation: the full type, key, foreign-key, multiplicity,
//! and constraint sweep that runs before any statement's effects become
//! visible.

use super::EngineState;
use crate::error::EngineError;
use crate::relational::KeyRole;

pub fn validate(state: &EngineState) -> Vec<EngineError> {
    let mut violations = Vec::new();

    for table in state.tables.iter() {
        // Type conformance for every stored value.
        for row in &table.rows {
            for (column, value) in table.columns.iter().zip(&row.values) {
                if let Err(e) = state.types.check_value(value, column.ty) {
                    violations.push(contextual(e, &table.name, &column.name));
                }
            }
        }

        // Primary keys: non-null and unique.
        let pk = table.primary_index();
        for row in &table.rows {
            if row.values[pk].is_null() {
                violations.push(EngineError::NullKeyViolation {
                    table: table.name.clone(),
                    column: table.columns[pk].name.clone(),
                });
            }
        }
        for key in table.duplicate_keys() {
            violations.push(EngineError::DuplicateKey {
                table: table.name.clone(),
                key: key.render(),
            });
        }

        // Foreign keys: non-null and resolvable within the target family.
        for (idx, column) in table.columns.iter().enumerate() {
            let target = match &column.role {
                KeyRole::Foreign { target } => target,
                _ => continue,
            };
            for row in table.rows_by_key() {
                let value = &row.values[idx];
                if value.is_null() {
                    violations.push(EngineError::NullKeyViolation {
                        table: table.name.clone(),
                        column: column.name.clone(),
                    });
                    continue;
                }
                if state
                    .schema
                    .resolve_node(&state.tables, target, value)
                    .is_none()
                {
                    violations.push(EngineError::ForeignKeyViolation {
                        table: table.name.clone(),
                        column: column.name.clone(),
                        key: value.render(),
                    });
                }
            }
        }
    }

    violations.extend(state.schema.check_multiplicity(&state.tables));
    violations.extend(state.schema.check_constraints(&state.tables));
    violations
}

fn contextual(err: EngineError, table: &str, column: &str) -> EngineError {
    match err {
        EngineError::TypeMismatch { expected, found, .. } => EngineError::TypeMismatch {
            context: format!("{}.{}", table, column),
            expected,
            found,
        },
        EngineError::RangeViolation { value, constraint, .. } => EngineError::RangeViolation {
            context: format!("{}.{}", table, column),
            value,
            constraint,
        },
        other => other,
    }
}
