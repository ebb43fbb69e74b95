//! The type universe: simple and structured data types, and typed values.
//!
//! Types are registered once and addressed by [`TypeId`]. A value is either a
//! tagged scalar or a structured tuple of named components. Null conforms to
//! every type; nullability is enforced by key constraints, not here.

use std::collections::HashMap;
use std::fmt;

use chrono::NaiveDate;

use crate::error::EngineError;

/// The closed set of scalar kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimpleKind {
    Char,
    Int,
    Date,
    Boolean,
}

impl SimpleKind {
    pub fn name(self) -> &'static str {
        match self {
            SimpleKind::Char => "CHAR",
            SimpleKind::Int => "INT",
            SimpleKind::Date => "DATE",
            SimpleKind::Boolean => "BOOLEAN",
        }
    }
}

impl fmt::Display for SimpleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Handle to a registered data type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeId(pub(crate) usize);

/// Resolved definition of a registered type.
#[derive(Debug, Clone, PartialEq)]
pub enum TypeDef {
    Simple(SimpleKind),
    /// Integer restricted to an inclusive range; either bound may be open.
    IntRange { min: Option<i64>, max: Option<i64> },
    Structured(Vec<(String, TypeId)>),
}

/// Definition supplied to [`TypeRegistry::register`], with components named
/// rather than resolved. A structured component may name the type being
/// registered, which permits recursive definitions.
#[derive(Debug, Clone)]
pub enum TypeDefSpec {
    Simple(SimpleKind),
    IntRange { min: Option<i64>, max: Option<i64> },
    Structured(Vec<(String, String)>),
}

/// A named data type, the elements of the type universe.
#[derive(Debug, Clone)]
pub struct DataType {
    pub name: String,
    pub def: TypeDef,
}

/// A typed value: a tagged scalar or a structured tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Date(NaiveDate),
    Char(String),
    Structured(Vec<(String, Value)>),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn kind(&self) -> Option<SimpleKind> {
        match self {
            Value::Bool(_) => Some(SimpleKind::Boolean),
            Value::Int(_) => Some(SimpleKind::Int),
            Value::Date(_) => Some(SimpleKind::Date),
            Value::Char(_) => Some(SimpleKind::Char),
            Value::Null | Value::Structured(_) => None,
        }
    }

    /// Canonical literal rendering, reused by the dump and export formats.
    pub fn render(&self) -> String {
        match self {
            Value::Null => "NULL".to_string(),
            Value::Bool(true) => "TRUE".to_string(),
            Value::Bool(false) => "FALSE".to_string(),
            Value::Int(i) => i.to_string(),
            Value::Date(d) => format!("date'{}'", render_date_dmy(*d)),
            Value::Char(s) => render_string(s),
            Value::Structured(fields) => {
                let body: Vec<String> = fields
                    .iter()
                    .map(|(name, value)| format!("{}: {}", name, value.render()))
                    .collect();
                format!("({})", body.join(", "))
            }
        }
    }

    fn described(&self) -> String {
        match self {
            Value::Null => "NULL".to_string(),
            Value::Structured(_) => "structured value".to_string(),
            other => format!("{} {}", other.kind().unwrap().name(), other.render()),
        }
    }
}

/// A constant as it appears in source text, before typing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Str(String),
    Num(i64),
    Date(NaiveDate),
    Bool(bool),
    Null,
}

impl Literal {
    /// The scalar kind a literal implies for schema inference.
    pub fn kind(&self) -> Option<SimpleKind> {
        match self {
            Literal::Str(_) => Some(SimpleKind::Char),
            Literal::Num(_) => Some(SimpleKind::Int),
            Literal::Date(_) => Some(SimpleKind::Date),
            Literal::Bool(_) => Some(SimpleKind::Boolean),
            Literal::Null => None,
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            Literal::Str(s) => Value::Char(s.clone()),
            Literal::Num(n) => Value::Int(*n),
            Literal::Date(d) => Value::Date(*d),
            Literal::Bool(b) => Value::Bool(*b),
            Literal::Null => Value::Null,
        }
    }

    pub fn render(&self) -> String {
        self.to_value().render()
    }
}

/// Renders a string constant in single quotes, doubling embedded quotes.
pub fn render_string(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// Parses a DD/MM/YYYY date, the convention for `date'...'` literals.
pub fn parse_date_dmy(text: &str) -> Result<NaiveDate, EngineError> {
    let err = || EngineError::InvalidDate(text.to_string());
    let parts: Vec<&str> = text.split('/').collect();
    if parts.len() != 3 {
        return Err(err());
    }
    let day: u32 = parts[0].parse().map_err(|_| err())?;
    let month: u32 = parts[1].parse().map_err(|_| err())?;
    let year: i32 = parts[2].parse().map_err(|_| err())?;
    NaiveDate::from_ymd_opt(year, month, day).ok_or_else(err)
}

pub fn render_date_dmy(d: NaiveDate) -> String {
    use chrono::Datelike;
    format!("{:02}/{:02}/{:04}", d.day(), d.month(), d.year())
}

/// Registry of all data types known to the engine.
///
/// The four scalar kinds are pre-registered; everything else is added with
/// [`register`](TypeRegistry::register). Names are unique and the registry is
/// immutable between committed statements.
#[derive(Debug, Clone)]
pub struct TypeRegistry {
    types: Vec<DataType>,
    by_name: HashMap<String, TypeId>,
}

impl TypeRegistry {
    pub const CHAR: TypeId = TypeId(0);
    pub const INT: TypeId = TypeId(1);
    pub const DATE: TypeId = TypeId(2);
    pub const BOOLEAN: TypeId = TypeId(3);

    pub fn new() -> Self {
        let mut registry = TypeRegistry {
            types: Vec::new(),
            by_name: HashMap::new(),
        };
        for kind in [
            SimpleKind::Char,
            SimpleKind::Int,
            SimpleKind::Date,
            SimpleKind::Boolean,
        ] {
            registry
                .register(kind.name(), TypeDefSpec::Simple(kind))
                .expect("predefined type");
        }
        registry
    }

    pub fn simple(kind: SimpleKind) -> TypeId {
        match kind {
            SimpleKind::Char => Self::CHAR,
            SimpleKind::Int => Self::INT,
            SimpleKind::Date => Self::DATE,
            SimpleKind::Boolean => Self::BOOLEAN,
        }
    }

    pub fn register(&mut self, name: &str, spec: TypeDefSpec) -> Result<TypeId, EngineError> {
        if self.by_name.contains_key(name) {
            return Err(EngineError::DuplicateTypeName(name.to_string()));
        }
        let id = TypeId(self.types.len());
        let def = match spec {
            TypeDefSpec::Simple(kind) => TypeDef::Simple(kind),
            TypeDefSpec::IntRange { min, max } => TypeDef::IntRange { min, max },
            TypeDefSpec::Structured(components) => {
                let mut resolved = Vec::with_capacity(components.len());
                for (component, type_name) in components {
                    // A component may reference the type being defined.
                    let component_id = if type_name == name {
                        id
                    } else {
                        self.lookup(&type_name).ok_or_else(|| {
                            EngineError::UnknownComponentType {
                                type_name: name.to_string(),
                                component: component.clone(),
                            }
                        })?
                    };
                    resolved.push((component, component_id));
                }
                TypeDef::Structured(resolved)
            }
        };
        self.types.push(DataType {
            name: name.to_string(),
            def,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<TypeId> {
        self.by_name.get(name).copied()
    }

    pub fn get(&self, id: TypeId) -> &DataType {
        &self.types[id.0]
    }

    pub fn name_of(&self, id: TypeId) -> &str {
        &self.types[id.0].name
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// The scalar kind behind a type, if it is not structured.
    pub fn base_kind(&self, id: TypeId) -> Option<SimpleKind> {
        match &self.get(id).def {
            TypeDef::Simple(kind) => Some(*kind),
            TypeDef::IntRange { .. } => Some(SimpleKind::Int),
            TypeDef::Structured(_) => None,
        }
    }

    /// Checks a value against a type. Violations are returned, not panicked;
    /// null conforms to every type.
    pub fn check_value(&self, value: &Value, ty: TypeId) -> Result<(), EngineError> {
        self.check_value_in(value, ty, self.name_of(ty))
    }

    fn check_value_in(&self, value: &Value, ty: TypeId, context: &str) -> Result<(), EngineError> {
        if value.is_null() {
            return Ok(());
        }
        let data_type = self.get(ty);
        match (&data_type.def, value) {
            (TypeDef::Simple(kind), v) => match v.kind() {
                Some(actual) if actual == *kind => Ok(()),
                _ => Err(EngineError::TypeMismatch {
                    context: context.to_string(),
                    expected: kind.name().to_string(),
                    found: v.described(),
                }),
            },
            (TypeDef::IntRange { min, max }, Value::Int(i)) => {
                let in_range = min.is_none_or(|m| *i >= m) && max.is_none_or(|m| *i <= m);
                if in_range {
                    Ok(())
                } else {
                    Err(EngineError::RangeViolation {
                        context: context.to_string(),
                        value: *i,
                        constraint: render_range(*min, *max),
                    })
                }
            }
            (TypeDef::IntRange { .. }, v) => Err(EngineError::TypeMismatch {
                context: context.to_string(),
                expected: SimpleKind::Int.name().to_string(),
                found: v.described(),
            }),
            (TypeDef::Structured(components), Value::Structured(fields)) => {
                if components.len() != fields.len() {
                    return Err(EngineError::TypeMismatch {
                        context: context.to_string(),
                        expected: format!("{} component(s)", components.len()),
                        found: format!("{} component(s)", fields.len()),
                    });
                }
                for ((comp_name, comp_ty), (field_name, field_value)) in
                    components.iter().zip(fields)
                {
                    if comp_name != field_name {
                        return Err(EngineError::TypeMismatch {
                            context: format!("{}.{}", context, comp_name),
                            expected: format!("component {}", comp_name),
                            found: format!("component {}", field_name),
                        });
                    }
                    let nested = format!("{}.{}", context, comp_name);
                    self.check_value_in(field_value, *comp_ty, &nested)?;
                }
                Ok(())
            }
            (TypeDef::Structured(_), v) => Err(EngineError::TypeMismatch {
                context: context.to_string(),
                expected: format!("structured {}", data_type.name),
                found: v.described(),
            }),
        }
    }

    /// Turns a source literal into a value of the given type, or reports why
    /// no lossless coercion exists. The result always passes `check_value`.
    pub fn coerce_literal(&self, literal: &Literal, ty: TypeId) -> Result<Value, EngineError> {
        if matches!(literal, Literal::Null) {
            return Ok(Value::Null);
        }
        let data_type = self.get(ty);
        let target = match self.base_kind(ty) {
            Some(kind) => kind,
            None => {
                return Err(EngineError::TypeMismatch {
                    context: data_type.name.clone(),
                    expected: format!("structured {}", data_type.name),
                    found: format!("literal {}", literal.render()),
                })
            }
        };
        let value = literal.to_value();
        match value.kind() {
            Some(actual) if actual == target => {
                self.check_value(&value, ty)?;
                Ok(value)
            }
            _ => Err(EngineError::TypeMismatch {
                context: data_type.name.clone(),
                expected: target.name().to_string(),
                found: format!("not {}: {}", kind_adjective(target), literal.render()),
            }),
        }
    }
}

impl Default for TypeRegistry {
    fn default() -> Self {
        Self::new()
    }
}

fn kind_adjective(kind: SimpleKind) -> &'static str {
    match kind {
        SimpleKind::Int => "numeric",
        SimpleKind::Char => "textual",
        SimpleKind::Date => "a date",
        SimpleKind::Boolean => "boolean",
    }
}

fn render_range(min: Option<i64>, max: Option<i64>) -> String {
    match (min, max) {
        (Some(a), Some(b)) => format!("[{}..{}]", a, b),
        (Some(a), None) => format!(">= {}", a),
        (None, Some(b)) => format!("<= {}", b),
        (None, None) => "unbounded".to_string(),
    }
}
