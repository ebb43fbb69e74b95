//! In-memory base tables with ordered typed columns and primary/foreign keys.
//!
//! One base table holds the instances of one node or edge type. Columns have
//! a fixed, observable order. Type checks run immediately on insert and
//! update; key and foreign-key checks run at commit so a single statement can
//! introduce a node and an edge referencing it in any order.

use std::collections::HashMap;

use crate::error::EngineError;
use crate::values::{TypeId, TypeRegistry, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyRole {
    Primary,
    /// Foreign key into the table family rooted at a node type label.
    Foreign { target: String },
    Plain,
}

#[derive(Debug, Clone)]
pub struct Column {
    pub name: String,
    pub ty: TypeId,
    pub role: KeyRole,
}

impl Column {
    pub fn plain(name: impl Into<String>, ty: TypeId) -> Self {
        Column {
            name: name.into(),
            ty,
            role: KeyRole::Plain,
        }
    }

    pub fn primary(name: impl Into<String>, ty: TypeId) -> Self {
        Column {
            name: name.into(),
            ty,
            role: KeyRole::Primary,
        }
    }

    pub fn foreign(name: impl Into<String>, ty: TypeId, target: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            ty,
            role: KeyRole::Foreign {
                target: target.into(),
            },
        }
    }
}

/// An ordered tuple of values, positionally matching the table's columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub values: Vec<Value>,
}

impl Row {
    pub fn new(values: Vec<Value>) -> Self {
        Row { values }
    }
}

#[derive(Debug, Clone)]
pub struct BaseTable {
    pub name: String,
    pub columns: Vec<Column>,
    /// Rows in insertion order; the dump and candidate streams sort by key.
    pub rows: Vec<Row>,
}

impl BaseTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn primary_index(&self) -> usize {
        self.columns
            .iter()
            .position(|c| c.role == KeyRole::Primary)
            .expect("every base table has a primary key column")
    }

    pub fn primary_key<'a>(&self, row: &'a Row) -> &'a Value {
        &row.values[self.primary_index()]
    }

    pub fn find_row(&self, key: &Value) -> Option<usize> {
        let pk = self.primary_index();
        self.rows.iter().position(|r| &r.values[pk] == key)
    }

    /// Row references sorted by primary key, the canonical enumeration order.
    pub fn rows_by_key(&self) -> Vec<&Row> {
        let pk = self.primary_index();
        let mut rows: Vec<&Row> = self.rows.iter().collect();
        rows.sort_by(|a, b| a.values[pk].cmp(&b.values[pk]));
        rows
    }

    /// Primary-key values that occur more than once, each reported once.
    pub fn duplicate_keys(&self) -> Vec<Value> {
        let pk = self.primary_index();
        let mut seen: HashMap<&Value, u32> = HashMap::new();
        for row in &self.rows {
            *seen.entry(&row.values[pk]).or_insert(0) += 1;
        }
        let mut dups: Vec<Value> = seen
            .into_iter()
            .filter(|(_, n)| *n > 1)
            .map(|(v, _)| v.clone())
            .collect();
        dups.sort();
        dups
    }
}

/// The table store: tables in creation order plus a name index.
#[derive(Debug, Clone, Default)]
pub struct Tables {
    tables: Vec<BaseTable>,
    by_name: HashMap<String, usize>,
}

impl Tables {
    pub fn new() -> Self {
        Tables::default()
    }

    pub fn create(&mut self, name: &str, columns: Vec<Column>) -> Result<(), EngineError> {
        if self.by_name.contains_key(name) {
            return Err(EngineError::DuplicateTableName(name.to_string()));
        }
        debug_assert_eq!(
            columns.iter().filter(|c| c.role == KeyRole::Primary).count(),
            1,
            "exactly one primary column"
        );
        self.by_name.insert(name.to_string(), self.tables.len());
        self.tables.push(BaseTable {
            name: name.to_string(),
            columns,
            rows: Vec::new(),
        });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&BaseTable> {
        self.by_name.get(name).map(|&i| &self.tables[i])
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut BaseTable> {
        let idx = *self.by_name.get(name)?;
        Some(&mut self.tables[idx])
    }

    pub fn require(&self, name: &str) -> Result<&BaseTable, EngineError> {
        self.get(name)
            .ok_or_else(|| EngineError::UnknownTable(name.to_string()))
    }

    /// Tables in creation order.
    pub fn iter(&self) -> impl Iterator<Item = &BaseTable> {
        self.tables.iter()
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    /// Stages a row; all column type checks run now, key checks at commit.
    pub fn insert_row(
        &mut self,
        registry: &TypeRegistry,
        table_name: &str,
        row: Row,
    ) -> Result<(), EngineError> {
        let table = self
            .get_mut(table_name)
            .ok_or_else(|| EngineError::UnknownTable(table_name.to_string()))?;
        if row.values.len() != table.columns.len() {
            return Err(EngineError::TypeMismatch {
                context: table.name.clone(),
                expected: format!("{} column value(s)", table.columns.len()),
                found: format!("{} value(s)", row.values.len()),
            });
        }
        for (column, value) in table.columns.iter().zip(&row.values) {
            if column.role == KeyRole::Primary && value.is_null() {
                return Err(EngineError::NullKeyViolation {
                    table: table.name.clone(),
                    column: column.name.clone(),
                });
            }
            registry.check_value(value, column.ty).map_err(|e| {
                contextualize(e, &table.name, &column.name)
            })?;
        }
        table.rows.push(row);
        Ok(())
    }

    /// Replaces one property value; setting NULL removes the property.
    /// Key and endpoint columns reject NULL.
    pub fn update_property(
        &mut self,
        registry: &TypeRegistry,
        table_name: &str,
        key: &Value,
        column_name: &str,
        new_value: Value,
    ) -> Result<(), EngineError> {
        let table = self
            .get_mut(table_name)
            .ok_or_else(|| EngineError::UnknownTable(table_name.to_string()))?;
        let col_idx = table.column_index(column_name).ok_or_else(|| {
            EngineError::UnknownColumn {
                table: table_name.to_string(),
                column: column_name.to_string(),
            }
        })?;
        let row_idx = table.find_row(key).ok_or_else(|| EngineError::UnknownRow {
            table: table_name.to_string(),
            key: key.render(),
        })?;
        let column = &table.columns[col_idx];
        if new_value.is_null() && column.role != KeyRole::Plain {
            return Err(EngineError::NullKeyViolation {
                table: table_name.to_string(),
                column: column_name.to_string(),
            });
        }
        registry
            .check_value(&new_value, column.ty)
            .map_err(|e| contextualize(e, table_name, column_name))?;
        table.rows[row_idx].values[col_idx] = new_value;
        Ok(())
    }

    pub fn delete_row(&mut self, table_name: &str, key: &Value) -> Result<Row, EngineError> {
        let table = self
            .get_mut(table_name)
            .ok_or_else(|| EngineError::UnknownTable(table_name.to_string()))?;
        let row_idx = table.find_row(key).ok_or_else(|| EngineError::UnknownRow {
            table: table_name.to_string(),
            key: key.render(),
        })?;
        Ok(table.rows.remove(row_idx))
    }

    /// Appends a nullable plain column, padding existing rows with NULL.
    pub fn add_column(&mut self, table_name: &str, column: Column) -> Result<(), EngineError> {
        let table = self
            .get_mut(table_name)
            .ok_or_else(|| EngineError::UnknownTable(table_name.to_string()))?;
        debug_assert!(table.column_index(&column.name).is_none());
        table.columns.push(column);
        for row in &mut table.rows {
            row.values.push(Value::Null);
        }
        Ok(())
    }

    /// Reorders tables by the given name ranking, preserving relative order
    /// within equal ranks. Used at commit to place a statement's new node
    /// tables ahead of its new edge tables.
    pub fn reorder_by<F>(&mut self, rank: F)
    where
        F: Fn(&str) -> usize,
    {
        let mut indexed: Vec<(usize, BaseTable)> = self.tables.drain(..).enumerate().collect();
        indexed.sort_by_key(|(original, table)| (rank(&table.name), *original));
        self.tables = indexed.into_iter().map(|(_, t)| t).collect();
        self.by_name = self
            .tables
            .iter()
            .enumerate()
            .map(|(i, t)| (t.name.clone(), i))
            .collect();
    }
}

fn contextualize(err: EngineError, table: &str, column: &str) -> EngineError {
    match err {
        EngineError::TypeMismatch {
            expected, found, ..
        } => EngineError::TypeMismatch {
            context: format!("{}.{}", table, column),
            expected,
            found,
        },
        EngineError::RangeViolation {
            value, constraint, ..
        } => EngineError::RangeViolation {
            context: format!("{}.{}", table, column),
            value,
            constraint,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn customer_columns() -> Vec<Column> {
        vec![
            Column::primary("ID", TypeRegistry::CHAR),
            Column::plain("Name", TypeRegistry::CHAR),
            Column::plain("ADDRESS", TypeRegistry::CHAR),
        ]
    }

    fn joe() -> Row {
        Row::new(vec![
            Value::Char("JOE".into()),
            Value::Char("Joe Edwards".into()),
            Value::Char("10 Station Rd.".into()),
        ])
    }

    #[test]
    fn create_and_duplicate_table() {
        let mut tables = Tables::new();
        tables.create("CUSTOMER", customer_columns()).unwrap();
        let err = tables.create("CUSTOMER", customer_columns()).unwrap_err();
        assert_eq!(err, EngineError::DuplicateTableName("CUSTOMER".into()));
    }

    #[test]
    fn insert_checks_types_immediately() {
        let registry = TypeRegistry::new();
        let mut tables = Tables::new();
        tables.create("CUSTOMER", customer_columns()).unwrap();
        tables.insert_row(&registry, "CUSTOMER", joe()).unwrap();
        let err = tables
            .insert_row(
                &registry,
                "CUSTOMER",
                Row::new(vec![
                    Value::Char("X".into()),
                    Value::Int(5),
                    Value::Null,
                ]),
            )
            .unwrap_err();
        assert!(matches!(err, EngineError::TypeMismatch { .. }));
    }

    #[test]
    fn duplicate_keys_detected_for_commit() {
        let registry = TypeRegistry::new();
        let mut tables = Tables::new();
        tables.create("CUSTOMER", customer_columns()).unwrap();
        tables.insert_row(&registry, "CUSTOMER", joe()).unwrap();
        tables.insert_row(&registry, "CUSTOMER", joe()).unwrap();
        let dups = tables.get("CUSTOMER").unwrap().duplicate_keys();
        assert_eq!(dups, vec![Value::Char("JOE".into())]);
    }

    #[test]
    fn update_property_and_null_removal() {
        let registry = TypeRegistry::new();
        let mut tables = Tables::new();
        tables.create("CUSTOMER", customer_columns()).unwrap();
        tables.insert_row(&registry, "CUSTOMER", joe()).unwrap();
        let key = Value::Char("JOE".into());
        tables
            .update_property(
                &registry,
                "CUSTOMER",
                &key,
                "ADDRESS",
                Value::Char("11 Station Rd.".into()),
            )
            .unwrap();
        tables
            .update_property(&registry, "CUSTOMER", &key, "ADDRESS", Value::Null)
            .unwrap();
        let table = tables.get("CUSTOMER").unwrap();
        let row = &table.rows[table.find_row(&key).unwrap()];
        assert_eq!(row.values[2], Value::Null);
        // Key columns reject NULL.
        let err = tables
            .update_property(&registry, "CUSTOMER", &key, "ID", Value::Null)
            .unwrap_err();
        assert!(matches!(err, EngineError::NullKeyViolation { .. }));
    }

    #[test]
    fn unknown_row_and_column() {
        let registry = TypeRegistry::new();
        let mut tables = Tables::new();
        tables.create("CUSTOMER", customer_columns()).unwrap();
        let missing = Value::Char("NOBODY".into());
        assert!(matches!(
            tables.delete_row("CUSTOMER", &missing),
            Err(EngineError::UnknownRow { .. })
        ));
        assert!(matches!(
            tables.update_property(&registry, "CUSTOMER", &missing, "NOPE", Value::Null),
            Err(EngineError::UnknownColumn { .. })
        ));
    }

    #[test]
    fn rows_sort_by_primary_key() {
        let registry = TypeRegistry::new();
        let mut tables = Tables::new();
        tables
            .create("T", vec![Column::primary("ID", TypeRegistry::CHAR)])
            .unwrap();
        for id in ["B", "A", "C"] {
            tables
                .insert_row(&registry, "T", Row::new(vec![Value::Char(id.into())]))
                .unwrap();
        }
        let keys: Vec<String> = tables
            .get("T")
            .unwrap()
            .rows_by_key()
            .iter()
            .map(|r| match &r.values[0] {
                Value::Char(s) => s.clone(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(keys, vec!["A", "B", "C"]);
    }

    #[test]
    fn widening_pads_existing_rows() {
        let registry = TypeRegistry::new();
        let mut tables = Tables::new();
        tables.create("CUSTOMER", customer_columns()).unwrap();
        tables.insert_row(&registry, "CUSTOMER", joe()).unwrap();
        tables
            .add_column("CUSTOMER", Column::plain("PHONE", TypeRegistry::CHAR))
            .unwrap();
        let table = tables.get("CUSTOMER").unwrap();
        assert_eq!(table.columns.len(), 4);
        assert_eq!(table.rows[0].values.len(), 4);
        assert_eq!(table.rows[0].values[3], Value::Null);
    }
}
