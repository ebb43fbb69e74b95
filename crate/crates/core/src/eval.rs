//! Three-valued evaluation of boolean expressions.
//!
//! Comparisons involving NULL are unknown; filtering collapses unknown to
//! false, so a row passes only on definite true. Comparing incompatible
//! kinds is a type error, not unknown.

use crate::error::EngineError;
use crate::syntax::ast::{CmpOp, Expr};
use crate::values::{SimpleKind, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    pub fn definitely_true(self) -> bool {
        self == Tri::True
    }

    fn from_bool(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }

    fn or(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::True, _) | (_, Tri::True) => Tri::True,
            (Tri::False, Tri::False) => Tri::False,
            _ => Tri::Unknown,
        }
    }

    fn not(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
        }
    }
}

/// What an expression term resolves to: a plain value, or an entity binding
/// (node or edge), which supports dotted property access but not comparison.
#[derive(Debug, Clone)]
pub enum EvalTerm {
    Value(Value),
    Entity,
}

/// Name resolution environment for one evaluation.
pub trait EvalContext {
    /// Resolves a bare identifier.
    fn ident(&self, name: &str) -> Result<EvalTerm, EngineError>;

    /// Resolves `base.property`. Returns NULL for an absent property.
    fn property(&self, base: &str, property: &str) -> Result<Value, EngineError>;
}

pub fn eval(expr: &Expr, ctx: &dyn EvalContext) -> Result<Tri, EngineError> {
    match expr {
        Expr::And(a, b) => Ok(eval(a, ctx)?.and(eval(b, ctx)?)),
        Expr::Or(a, b) => Ok(eval(a, ctx)?.or(eval(b, ctx)?)),
        Expr::Not(e) => Ok(eval(e, ctx)?.not()),
        Expr::Compare(a, op, b) => {
            let left = atom_value(a, ctx)?;
            let right = atom_value(b, ctx)?;
            compare(&left, *op, &right)
        }
        // A bare boolean atom.
        other => match atom_value(other, ctx)? {
            Value::Bool(b) => Ok(Tri::from_bool(b)),
            Value::Null => Ok(Tri::Unknown),
            v => Err(EngineError::TypeErrorInWhere(format!(
                "{} is not a boolean condition",
                v.render()
            ))),
        },
    }
}

/// Evaluates an expression for its value (SET right-hand sides, doc values).
pub fn atom_value(expr: &Expr, ctx: &dyn EvalContext) -> Result<Value, EngineError> {
    match expr {
        Expr::Literal(lit) => Ok(lit.to_value()),
        Expr::Ident(name) => match ctx.ident(name)? {
            EvalTerm::Value(v) => Ok(v),
            EvalTerm::Entity => Err(EngineError::TypeErrorInWhere(format!(
                "{} is bound to a node or edge and cannot be used as a value",
                name
            ))),
        },
        Expr::Property(base, property) => ctx.property(base, property),
        other => Err(EngineError::TypeErrorInWhere(format!(
            "expected a value, found condition {}",
            other.render()
        ))),
    }
}

pub fn compare(left: &Value, op: CmpOp, right: &Value) -> Result<Tri, EngineError> {
    if left.is_null() || right.is_null() {
        return Ok(Tri::Unknown);
    }
    let (lk, rk) = (left.kind(), right.kind());
    match (lk, rk) {
        (Some(a), Some(b)) if a == b => {}
        _ => {
            return Err(EngineError::TypeErrorInWhere(format!(
                "cannot compare {} with {}",
                left.render(),
                right.render()
            )))
        }
    }
    if lk == Some(SimpleKind::Boolean) && !matches!(op, CmpOp::Eq | CmpOp::Ne) {
        return Err(EngineError::TypeErrorInWhere(
            "booleans support only = and <>".to_string(),
        ));
    }
    let ordering = left.cmp(right);
    Ok(Tri::from_bool(match op {
        CmpOp::Eq => ordering.is_eq(),
        CmpOp::Ne => !ordering.is_eq(),
        CmpOp::Lt => ordering.is_lt(),
        CmpOp::Le => ordering.is_le(),
        CmpOp::Gt => ordering.is_gt(),
        CmpOp::Ge => ordering.is_ge(),
    }))
}

/// Context exposing the columns of a single row by bare name, as used by
/// CHECK constraints.
pub struct RowContext<'a> {
    pub columns: &'a [(String, Value)],
}

impl EvalContext for RowContext<'_> {
    fn ident(&self, name: &str) -> Result<EvalTerm, EngineError> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| EvalTerm::Value(v.clone()))
            .ok_or_else(|| EngineError::UnknownIdentifier(name.to_string()))
    }

    fn property(&self, base: &str, _property: &str) -> Result<Value, EngineError> {
        Err(EngineError::TypeErrorInWhere(format!(
            "dotted access {}.* is not allowed in a constraint",
            base
        )))
    }
}
