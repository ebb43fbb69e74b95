//! Statement AST and the canonical renderer.
//!
//! The renderer is a deterministic pretty-printer: rendering an AST and
//! parsing the result yields an identical AST. Identifiers are rendered bare
//! when they survive case-folding unchanged, double-quoted otherwise.

use chrono::NaiveDate;

use super::token::is_bare_identifier;
use crate::values::Literal;

/// Renders an identifier, quoting it when it is not bare-safe.
pub fn render_ident(s: &str) -> String {
    if is_bare_identifier(s) {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('"', "\"\""))
    }
}

/// Renders a column type name; DATE is a keyword but valid bare here.
pub fn render_type_name(s: &str) -> String {
    if s == "DATE" {
        s.to_string()
    } else {
        render_ident(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DocValue {
    Literal(Literal),
    /// An identifier: a bound variable in MATCH docs and in statements that
    /// trail a MATCH.
    Ident(String),
    /// Arrays appear only in metadata entries such as MULTIPLICITY.
    Array(Vec<DocValue>),
}

impl DocValue {
    pub fn render(&self) -> String {
        match self {
            DocValue::Literal(lit) => lit.render(),
            DocValue::Ident(name) => render_ident(name),
            DocValue::Array(items) => {
                let body: Vec<String> = items.iter().map(|v| v.render()).collect();
                format!("[{}]", body.join(", "))
            }
        }
    }
}

/// JSON-like property block; keys are unique and order is preserved.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Doc {
    pub entries: Vec<(String, DocValue)>,
}

impl Doc {
    pub fn get(&self, key: &str) -> Option<&DocValue> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn render(&self) -> String {
        let body: Vec<String> = self
            .entries
            .iter()
            .map(|(k, v)| format!("{}: {}", render_ident(k), v.render()))
            .collect();
        format!("{{{}}}", body.join(", "))
    }
}

/// One node position in a path: a bare reference or a NewG.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeItem {
    pub id: Option<String>,
    /// At most two: the node's type, optionally followed by a supertype
    /// ascription as in `:WoodScrew:&1`.
    pub labels: Vec<String>,
    pub doc: Option<Doc>,
}

impl NodeItem {
    /// A bare reference carries only an identifier.
    pub fn is_bare(&self) -> bool {
        self.id.is_some() && self.labels.is_empty() && self.doc.is_none()
    }

    pub fn render(&self) -> String {
        let mut out = String::from("(");
        if let Some(id) = &self.id {
            out.push_str(&render_ident(id));
        }
        for label in &self.labels {
            out.push(':');
            out.push_str(&render_ident(label));
        }
        if let Some(doc) = &self.doc {
            if self.id.is_some() || !self.labels.is_empty() {
                out.push(' ');
            }
            out.push_str(&doc.render());
        }
        out.push(')');
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Rightward,
    Leftward,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeItem {
    pub direction: Direction,
    pub id: Option<String>,
    pub label: Option<String>,
    pub doc: Option<Doc>,
}

impl EdgeItem {
    pub fn render(&self) -> String {
        let mut inner = String::new();
        if let Some(id) = &self.id {
            inner.push_str(&render_ident(id));
        }
        if let Some(label) = &self.label {
            inner.push(':');
            inner.push_str(&render_ident(label));
        }
        if let Some(doc) = &self.doc {
            if !inner.is_empty() {
                inner.push(' ');
            }
            inner.push_str(&doc.render());
        }
        match self.direction {
            Direction::Rightward => format!("-[{}]->", inner),
            Direction::Leftward => format!("<-[{}]-", inner),
        }
    }
}

/// A path: alternating node and edge items, starting and ending on a node.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub start: NodeItem,
    pub segments: Vec<(EdgeItem, NodeItem)>,
}

impl Path {
    pub fn node_items(&self) -> impl Iterator<Item = &NodeItem> {
        std::iter::once(&self.start).chain(self.segments.iter().map(|(_, n)| n))
    }

    pub fn render(&self) -> String {
        let mut out = self.start.render();
        for (edge, node) in &self.segments {
            out.push_str(&edge.render());
            out.push_str(&node.render());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn render(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// Boolean expression over properties and constants, used by WHERE clauses,
/// SET values, and CHECK constraints.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(Literal),
    Ident(String),
    Property(String, String),
    Compare(Box<Expr>, CmpOp, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    pub fn render(&self) -> String {
        match self {
            Expr::Literal(lit) => lit.render(),
            Expr::Ident(name) => render_ident(name),
            Expr::Property(base, prop) => format!("{}.{}", render_ident(base), render_ident(prop)),
            Expr::Compare(a, op, b) => {
                format!("{} {} {}", a.render_atom(), op.render(), b.render_atom())
            }
            Expr::And(a, b) => format!("{} AND {}", a.render_operand(), b.render_operand()),
            Expr::Or(a, b) => format!("({} OR {})", a.render_operand(), b.render_operand()),
            Expr::Not(e) => format!("NOT {}", e.render_operand()),
        }
    }

    fn render_atom(&self) -> String {
        match self {
            Expr::Literal(_) | Expr::Ident(_) | Expr::Property(_, _) => self.render(),
            other => format!("({})", other.render()),
        }
    }

    fn render_operand(&self) -> String {
        match self {
            Expr::Or(_, _) => self.render(),
            Expr::And(_, _) | Expr::Not(_) => self.render(),
            other => other.render_atom(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeKindClause {
    Node,
    Edge { leaving: String, arriving: String },
    Under(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CreateTypeStmt {
    pub label: String,
    /// Declared property columns as (column name, type name).
    pub columns: Vec<(String, String)>,
    pub kind: TypeKindClause,
    pub doc: Option<Doc>,
}

impl CreateTypeStmt {
    pub fn render(&self) -> String {
        let mut out = format!("CREATE TYPE {}", render_ident(&self.label));
        if !self.columns.is_empty() {
            let cols: Vec<String> = self
                .columns
                .iter()
                .map(|(name, ty)| format!("{} {}", render_ident(name), render_ident(ty)))
                .collect();
            out.push_str(&format!(" AS ({})", cols.join(", ")));
        }
        match &self.kind {
            TypeKindClause::Node => out.push_str(" NODETYPE"),
            TypeKindClause::Edge { leaving, arriving } => out.push_str(&format!(
                " EDGETYPE({}, {})",
                render_ident(leaving),
                render_ident(arriving)
            )),
            TypeKindClause::Under(supertype) => {
                out.push_str(&format!(" UNDER {}", render_ident(supertype)))
            }
        }
        if let Some(doc) = &self.doc {
            out.push(' ');
            out.push_str(&doc.render());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchStmt {
    pub paths: Vec<Path>,
    pub where_clause: Option<Expr>,
    pub trailing: Option<Box<Statement>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetStmt {
    pub target: String,
    pub property: String,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeleteStmt {
    pub target: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    CreateGraph(Vec<Path>),
    CreateType(CreateTypeStmt),
    Match(MatchStmt),
    Set(SetStmt),
    Delete(DeleteStmt),
}

impl Statement {
    pub fn render(&self) -> String {
        match self {
            Statement::CreateGraph(paths) => {
                let body: Vec<String> = paths.iter().map(|p| p.render()).collect();
                format!("CREATE {}", body.join(", "))
            }
            Statement::CreateType(stmt) => stmt.render(),
            Statement::Match(stmt) => {
                let body: Vec<String> = stmt.paths.iter().map(|p| p.render()).collect();
                let mut out = format!("MATCH {}", body.join(", "));
                if let Some(cond) = &stmt.where_clause {
                    out.push_str(&format!(" WHERE {}", cond.render()));
                }
                if let Some(trailing) = &stmt.trailing {
                    out.push(' ');
                    out.push_str(&trailing.render());
                }
                out
            }
            Statement::Set(stmt) => format!(
                "SET {}.{} = {}",
                render_ident(&stmt.target),
                render_ident(&stmt.property),
                stmt.value.render()
            ),
            Statement::Delete(stmt) => format!("DELETE {}", render_ident(&stmt.target)),
        }
    }
}

/// Convenience constructors used by tests and the exporters.
impl NodeItem {
    pub fn reference(id: impl Into<String>) -> Self {
        NodeItem {
            id: Some(id.into()),
            labels: Vec::new(),
            doc: None,
        }
    }

    pub fn new(id: impl Into<String>, label: impl Into<String>, doc: Option<Doc>) -> Self {
        NodeItem {
            id: Some(id.into()),
            labels: vec![label.into()],
            doc,
        }
    }
}

pub fn date_literal(year: i32, month: u32, day: u32) -> Literal {
    Literal::Date(NaiveDate::from_ymd_opt(year, month, day).expect("valid date"))
}
