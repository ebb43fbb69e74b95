//! The typed graph schema: node and edge type declarations, endpoint
//! assignment, min-max multiplicities, integrity constraints, and the UNDER
//! subtype lattice.
//!
//! Each declared label is realized as exactly one base table. Node tables
//! get a leading ID primary key of kind CHAR; edge tables get ID, LEAVING,
//! and ARRIVING, the latter two being foreign keys into the endpoint type's
//! table family (the type itself plus its UNDER descendants).
//!
//! When an existing edge type is asked to connect to an incompatible node
//! type, the schema is not rejected: a fresh anonymous node type is declared,
//! both endpoint types are placed UNDER it, and the edge is retargeted. This
//! generalization is the mechanism that lets schemas evolve bottom-up from
//! the data.

use std::collections::HashMap;

use crate::error::EngineError;
use crate::eval::{self, RowContext};
use crate::graph::NodeRef;
use crate::relational::{Column, KeyRole, Tables};
use crate::syntax::ast::{render_ident, render_type_name, Expr};
use crate::syntax::parse_expression;
use crate::values::{TypeId, TypeRegistry, Value};

pub const ID_COLUMN: &str = "ID";
pub const LEAVING_COLUMN: &str = "LEAVING";
pub const ARRIVING_COLUMN: &str = "ARRIVING";

/// Min-max bounds on edge connections at one end. `max: None` is unbounded;
/// min 0 means the connection is optional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Multiplicity {
    pub min: u32,
    pub max: Option<u32>,
}

impl Multiplicity {
    pub const DEFAULT: Multiplicity = Multiplicity { min: 0, max: None };

    pub fn is_default(&self) -> bool {
        *self == Self::DEFAULT
    }

    pub fn render_max(&self) -> String {
        match self.max {
            Some(m) => m.to_string(),
            None => "*".to_string(),
        }
    }
}

impl Default for Multiplicity {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Clone)]
pub struct NodeTypeDecl {
    pub label: String,
    pub supertype: Option<String>,
    pub anonymous: bool,
}

#[derive(Debug, Clone)]
pub struct EdgeTypeDecl {
    pub label: String,
    /// Tail node type.
    pub leaving: String,
    /// Head node type.
    pub arriving: String,
    pub leaving_mult: Multiplicity,
    pub arriving_mult: Multiplicity,
}

#[derive(Debug, Clone)]
pub enum TypeDecl {
    Node(NodeTypeDecl),
    Edge(EdgeTypeDecl),
}

impl TypeDecl {
    pub fn label(&self) -> &str {
        match self {
            TypeDecl::Node(n) => &n.label,
            TypeDecl::Edge(e) => &e.label,
        }
    }
}

/// A CHECK-style predicate over the rows of one type.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    pub target: String,
    pub text: String,
    pub expr: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    GeneralizationPerformed,
    TypeRetargeted,
    NewAnonymousType,
}

/// Advisory notice emitted while a statement's schema inference runs.
#[derive(Debug, Clone)]
pub struct SchemaDiagnostic {
    pub kind: DiagnosticKind,
    pub labels: Vec<String>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeEnd {
    Leaving,
    Arriving,
}

impl EdgeEnd {
    pub fn name(self) -> &'static str {
        match self {
            EdgeEnd::Leaving => "leaving",
            EdgeEnd::Arriving => "arriving",
        }
    }
}

/// All type declarations, in declaration order, plus constraints.
#[derive(Debug, Clone, Default)]
pub struct SchemaCatalog {
    decls: Vec<TypeDecl>,
    by_label: HashMap<String, usize>,
    constraints: Vec<Constraint>,
}

impl SchemaCatalog {
    pub fn new() -> Self {
        SchemaCatalog::default()
    }

    pub fn decls(&self) -> impl Iterator<Item = &TypeDecl> {
        self.decls.iter()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn has(&self, label: &str) -> bool {
        self.by_label.contains_key(label)
    }

    pub fn node_decl(&self, label: &str) -> Option<&NodeTypeDecl> {
        match self.by_label.get(label).map(|&i| &self.decls[i]) {
            Some(TypeDecl::Node(n)) => Some(n),
            _ => None,
        }
    }

    pub fn edge_decl(&self, label: &str) -> Option<&EdgeTypeDecl> {
        match self.by_label.get(label).map(|&i| &self.decls[i]) {
            Some(TypeDecl::Edge(e)) => Some(e),
            _ => None,
        }
    }

    fn node_decl_mut(&mut self, label: &str) -> Option<&mut NodeTypeDecl> {
        match self.by_label.get(label).map(|&i| &mut self.decls[i]) {
            Some(TypeDecl::Node(n)) => Some(n),
            _ => None,
        }
    }

    fn edge_decl_mut(&mut self, label: &str) -> Option<&mut EdgeTypeDecl> {
        match self.by_label.get(label).map(|&i| &mut self.decls[i]) {
            Some(TypeDecl::Edge(e)) => Some(e),
            _ => None,
        }
    }

    /// Node type labels in declaration order.
    pub fn node_labels(&self) -> Vec<&str> {
        self.decls
            .iter()
            .filter_map(|d| match d {
                TypeDecl::Node(n) => Some(n.label.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn edge_labels(&self) -> Vec<&str> {
        self.decls
            .iter()
            .filter_map(|d| match d {
                TypeDecl::Edge(e) => Some(e.label.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Direct UNDER children of a node type, in declaration order.
    pub fn subtypes_of(&self, label: &str) -> Vec<&str> {
        self.decls
            .iter()
            .filter_map(|d| match d {
                TypeDecl::Node(n) if n.supertype.as_deref() == Some(label) => {
                    Some(n.label.as_str())
                }
                _ => None,
            })
            .collect()
    }

    /// Declares a node type and realizes its base table with a leading ID
    /// primary key column of kind CHAR.
    pub fn declare_node_type(
        &mut self,
        tables: &mut Tables,
        label: &str,
        properties: &[(String, TypeId)],
        supertype: Option<&str>,
        anonymous: bool,
    ) -> Result<(), EngineError> {
        if self.has(label) {
            return Err(EngineError::DuplicateTypeLabel(label.to_string()));
        }
        if let Some(sup) = supertype {
            if self.node_decl(sup).is_none() {
                return Err(EngineError::UnknownSupertype(sup.to_string()));
            }
        }
        let mut columns = vec![Column::primary(ID_COLUMN, TypeRegistry::CHAR)];
        for (name, ty) in properties {
            columns.push(Column::plain(name.clone(), *ty));
        }
        tables.create(label, columns)?;
        self.by_label.insert(label.to_string(), self.decls.len());
        self.decls.push(TypeDecl::Node(NodeTypeDecl {
            label: label.to_string(),
            supertype: supertype.map(str::to_string),
            anonymous,
        }));
        Ok(())
    }

    /// Declares an edge type and realizes its base table with ID, LEAVING,
    /// and ARRIVING columns ahead of the property columns.
    pub fn declare_edge_type(
        &mut self,
        tables: &mut Tables,
        label: &str,
        properties: &[(String, TypeId)],
        leaving: &str,
        arriving: &str,
        multiplicity: Option<(Multiplicity, Multiplicity)>,
    ) -> Result<(), EngineError> {
        if self.has(label) {
            return Err(EngineError::DuplicateTypeLabel(label.to_string()));
        }
        for endpoint in [leaving, arriving] {
            if self.node_decl(endpoint).is_none() {
                return Err(EngineError::UnknownEndpointType(endpoint.to_string()));
            }
        }
        let mut columns = vec![
            Column::primary(ID_COLUMN, TypeRegistry::CHAR),
            Column::foreign(LEAVING_COLUMN, TypeRegistry::CHAR, leaving),
            Column::foreign(ARRIVING_COLUMN, TypeRegistry::CHAR, arriving),
        ];
        for (name, ty) in properties {
            columns.push(Column::plain(name.clone(), *ty));
        }
        tables.create(label, columns)?;
        let (leaving_mult, arriving_mult) = multiplicity.unwrap_or_default();
        self.by_label.insert(label.to_string(), self.decls.len());
        self.decls.push(TypeDecl::Edge(EdgeTypeDecl {
            label: label.to_string(),
            leaving: leaving.to_string(),
            arriving: arriving.to_string(),
            leaving_mult,
            arriving_mult,
        }));
        Ok(())
    }

    /// Places an existing node type UNDER a supertype.
    pub fn retrofit_under(&mut self, label: &str, supertype: &str) -> Result<(), EngineError> {
        if self.node_decl(supertype).is_none() {
            return Err(if self.has(supertype) {
                EngineError::NotANodeType(supertype.to_string())
            } else {
                EngineError::UnknownSupertype(supertype.to_string())
            });
        }
        // Acyclicity: the supertype's chain must not already reach the label.
        if label == supertype || self.conforms(supertype, label)? {
            return Err(EngineError::SupertypeCycle {
                label: label.to_string(),
                supertype: supertype.to_string(),
            });
        }
        let decl = self
            .node_decl_mut(label)
            .ok_or_else(|| EngineError::UnknownTypeLabel(label.to_string()))?;
        match &decl.supertype {
            Some(existing) if existing == supertype => Ok(()),
            Some(existing) => Err(EngineError::SupertypeConflict {
                label: label.to_string(),
                existing: existing.clone(),
                requested: supertype.to_string(),
            }),
            None => {
                decl.supertype = Some(supertype.to_string());
                Ok(())
            }
        }
    }

    /// True iff `instance` equals `declared` or is a transitive UNDER
    /// descendant of it.
    pub fn conforms(&self, instance: &str, declared: &str) -> Result<bool, EngineError> {
        for label in [instance, declared] {
            if self.node_decl(label).is_none() {
                return Err(EngineError::UnknownTypeLabel(label.to_string()));
            }
        }
        let mut current = instance;
        loop {
            if current == declared {
                return Ok(true);
            }
            match self.node_decl(current).and_then(|d| d.supertype.as_deref()) {
                Some(next) => current = next,
                None => return Ok(false),
            }
        }
    }

    /// The root of a node type's supertype chain.
    pub fn root_of<'a>(&'a self, label: &'a str) -> &'a str {
        let mut current = label;
        while let Some(next) = self.node_decl(current).and_then(|d| d.supertype.as_deref()) {
            current = next;
        }
        current
    }

    /// The table family of a node type: the type itself plus all UNDER
    /// descendants, in declaration order.
    pub fn family(&self, root: &str) -> Vec<&str> {
        self.decls
            .iter()
            .filter_map(|d| match d {
                TypeDecl::Node(n) => {
                    if self.conforms(&n.label, root).unwrap_or(false) {
                        Some(n.label.as_str())
                    } else {
                        None
                    }
                }
                _ => None,
            })
            .collect()
    }

    /// Resolves a primary key within a type family to a node address.
    pub fn resolve_node(&self, tables: &Tables, root: &str, key: &Value) -> Option<NodeRef> {
        for label in self.family(root) {
            if let Some(table) = tables.get(label) {
                if table.find_row(key).is_some() {
                    return Some(NodeRef {
                        label: label.to_string(),
                        id: key.clone(),
                    });
                }
            }
        }
        None
    }

    /// Makes an edge endpoint accept a new node type.
    ///
    /// If the new type already conforms, nothing happens. If the current
    /// endpoint type is an anonymous generalization, the new type joins it.
    /// Otherwise a fresh anonymous node type is declared, both types are
    /// placed UNDER it, and the endpoint is retargeted.
    pub fn generalize_endpoint(
        &mut self,
        tables: &mut Tables,
        edge_label: &str,
        end: EdgeEnd,
        new_label: &str,
        next_anon: &mut u64,
    ) -> Result<Vec<SchemaDiagnostic>, EngineError> {
        let edge = self
            .edge_decl(edge_label)
            .ok_or_else(|| EngineError::NotAnEdgeType(edge_label.to_string()))?;
        let current = match end {
            EdgeEnd::Leaving => edge.leaving.clone(),
            EdgeEnd::Arriving => edge.arriving.clone(),
        };
        if self.node_decl(new_label).is_none() {
            return Err(EngineError::UnknownTypeLabel(new_label.to_string()));
        }
        if self.conforms(new_label, &current)? {
            return Ok(Vec::new());
        }

        let mut diagnostics = Vec::new();
        let retarget_to: String;

        if self.conforms(&current, new_label)? {
            // The new type is already a supertype of the current endpoint.
            retarget_to = new_label.to_string();
        } else if self.node_decl(&current).map(|d| d.anonymous) == Some(true) {
            // Reuse the existing anonymous generalization.
            let joining = self.root_of(new_label).to_string();
            self.retrofit_under(&joining, &current)?;
            diagnostics.push(SchemaDiagnostic {
                kind: DiagnosticKind::GeneralizationPerformed,
                labels: vec![joining.clone(), current.clone()],
                message: format!(
                    "{} declared UNDER {}",
                    render_ident(&joining),
                    render_ident(&current)
                ),
            });
            return Ok(diagnostics);
        } else {
            let anon = format!("&{}", *next_anon);
            *next_anon += 1;
            self.declare_node_type(tables, &anon, &[], None, true)?;
            diagnostics.push(SchemaDiagnostic {
                kind: DiagnosticKind::NewAnonymousType,
                labels: vec![anon.clone()],
                message: format!("created anonymous node type {}", anon),
            });
            for joining in [self.root_of(&current).to_string(), self.root_of(new_label).to_string()] {
                self.retrofit_under(&joining, &anon)?;
                diagnostics.push(SchemaDiagnostic {
                    kind: DiagnosticKind::GeneralizationPerformed,
                    labels: vec![joining.clone(), anon.clone()],
                    message: format!(
                        "{} declared UNDER {}",
                        render_ident(&joining),
                        anon
                    ),
                });
            }
            retarget_to = anon;
        }

        let edge = self.edge_decl_mut(edge_label).expect("edge exists");
        match end {
            EdgeEnd::Leaving => edge.leaving = retarget_to.clone(),
            EdgeEnd::Arriving => edge.arriving = retarget_to.clone(),
        }
        // Keep the realized table's foreign-key target in step.
        let table = tables.get_mut(edge_label).expect("edge table exists");
        let column_name = match end {
            EdgeEnd::Leaving => LEAVING_COLUMN,
            EdgeEnd::Arriving => ARRIVING_COLUMN,
        };
        let idx = table.column_index(column_name).expect("endpoint column");
        table.columns[idx].role = KeyRole::Foreign {
            target: retarget_to.clone(),
        };
        diagnostics.push(SchemaDiagnostic {
            kind: DiagnosticKind::TypeRetargeted,
            labels: vec![edge_label.to_string(), retarget_to.clone()],
            message: format!(
                "{} {} endpoint retargeted from {} to {}",
                render_ident(edge_label),
                end.name(),
                render_ident(&current),
                render_ident(&retarget_to)
            ),
        });
        Ok(diagnostics)
    }

    /// Sets an edge type's multiplicity; rejects a differing redefinition.
    pub fn set_multiplicity(
        &mut self,
        edge_label: &str,
        bounds: (Multiplicity, Multiplicity),
    ) -> Result<(), EngineError> {
        let edge = self
            .edge_decl_mut(edge_label)
            .ok_or_else(|| EngineError::NotAnEdgeType(edge_label.to_string()))?;
        let current = (edge.leaving_mult, edge.arriving_mult);
        if current == bounds {
            return Ok(());
        }
        if current != (Multiplicity::DEFAULT, Multiplicity::DEFAULT) {
            return Err(EngineError::MultiplicityRedefinition(edge_label.to_string()));
        }
        edge.leaving_mult = bounds.0;
        edge.arriving_mult = bounds.1;
        Ok(())
    }

    /// Registers a CHECK constraint; the predicate may reference only the
    /// columns of the target type.
    pub fn add_constraint(
        &mut self,
        tables: &Tables,
        target: &str,
        text: &str,
    ) -> Result<(), EngineError> {
        if !self.has(target) {
            return Err(EngineError::UnknownTypeLabel(target.to_string()));
        }
        let expr = parse_expression(text)?;
        let table = tables.require(target)?;
        validate_constraint_columns(&expr, table.columns.iter().map(|c| c.name.as_str()), target)?;
        let ordinal = self
            .constraints
            .iter()
            .filter(|c| c.target == target)
            .count()
            + 1;
        self.constraints.push(Constraint {
            name: format!("{}_CHECK_{}", target, ordinal),
            target: target.to_string(),
            text: text.to_string(),
            expr,
        });
        Ok(())
    }

    /// Evaluates every edge type's min-max bounds over the whole database.
    /// For each node whose type conforms to an endpoint, the count of
    /// incident edges at that end must lie within the declared bounds.
    pub fn check_multiplicity(&self, tables: &Tables) -> Vec<EngineError> {
        let mut violations = Vec::new();
        for decl in &self.decls {
            let edge = match decl {
                TypeDecl::Edge(e) => e,
                _ => continue,
            };
            for (end, endpoint, bounds) in [
                (EdgeEnd::Leaving, &edge.leaving, edge.leaving_mult),
                (EdgeEnd::Arriving, &edge.arriving, edge.arriving_mult),
            ] {
                if bounds.is_default() {
                    continue;
                }
                let table = match tables.get(&edge.label) {
                    Some(t) => t,
                    None => continue,
                };
                let column = match end {
                    EdgeEnd::Leaving => LEAVING_COLUMN,
                    EdgeEnd::Arriving => ARRIVING_COLUMN,
                };
                let col_idx = match table.column_index(column) {
                    Some(i) => i,
                    None => continue,
                };
                let mut counts: HashMap<NodeRef, u32> = HashMap::new();
                for row in &table.rows {
                    if let Some(node) = self.resolve_node(tables, endpoint, &row.values[col_idx]) {
                        *counts.entry(node).or_insert(0) += 1;
                    }
                }
                for member in self.family(endpoint) {
                    let member_table = match tables.get(member) {
                        Some(t) => t,
                        None => continue,
                    };
                    for row in member_table.rows_by_key() {
                        let node = NodeRef {
                            label: member.to_string(),
                            id: member_table.primary_key(row).clone(),
                        };
                        let count = counts.get(&node).copied().unwrap_or(0);
                        let below = count < bounds.min;
                        let above = bounds.max.is_some_and(|m| count > m);
                        if below || above {
                            violations.push(EngineError::MultiplicityViolation {
                                edge_type: edge.label.clone(),
                                node: node.render(),
                                end: end.name().to_string(),
                                count,
                                min: bounds.min,
                                max: bounds.render_max(),
                            });
                        }
                    }
                }
            }
        }
        violations
    }

    /// Evaluates every constraint on every row of its target type; a false
    /// or unknown predicate is a violation.
    pub fn check_constraints(&self, tables: &Tables) -> Vec<EngineError> {
        let mut violations = Vec::new();
        for constraint in &self.constraints {
            let table = match tables.get(&constraint.target) {
                Some(t) => t,
                None => continue,
            };
            for row in table.rows_by_key() {
                let columns: Vec<(String, Value)> = table
                    .columns
                    .iter()
                    .zip(&row.values)
                    .map(|(c, v)| (c.name.clone(), v.clone()))
                    .collect();
                let passed = eval::eval(&constraint.expr, &RowContext { columns: &columns })
                    .map(|t| t.definitely_true())
                    .unwrap_or(false);
                if !passed {
                    violations.push(EngineError::ConstraintViolation {
                        name: constraint.name.clone(),
                        target: constraint.target.clone(),
                        key: table.primary_key(row).render(),
                    });
                }
            }
        }
        violations
    }

    /// Deterministic textual rendering of the schema, replayable as
    /// CREATE TYPE statements. Types appear in declaration (and table
    /// creation) order; UNDER links follow as separate statements so every
    /// reference points backwards.
    pub fn export(&self, tables: &Tables, registry: &TypeRegistry) -> String {
        let mut lines = Vec::new();
        for decl in &self.decls {
            let label = decl.label();
            let table = match tables.get(label) {
                Some(t) => t,
                None => continue,
            };
            let skip = match decl {
                TypeDecl::Node(_) => 1,
                TypeDecl::Edge(_) => 3,
            };
            let props: Vec<String> = table
                .columns
                .iter()
                .skip(skip)
                .map(|c| {
                    format!(
                        "{} {}",
                        render_ident(&c.name),
                        render_type_name(registry.name_of(c.ty))
                    )
                })
                .collect();
            let mut line = format!("CREATE TYPE {}", render_ident(label));
            if !props.is_empty() {
                line.push_str(&format!(" AS ({})", props.join(", ")));
            }
            match decl {
                TypeDecl::Node(_) => line.push_str(" NODETYPE"),
                TypeDecl::Edge(e) => {
                    line.push_str(&format!(
                        " EDGETYPE({}, {})",
                        render_ident(&e.leaving),
                        render_ident(&e.arriving)
                    ));
                }
            }
            let mut doc_entries = Vec::new();
            if let TypeDecl::Edge(e) = decl {
                if !e.leaving_mult.is_default() || !e.arriving_mult.is_default() {
                    doc_entries.push(format!(
                        "MULTIPLICITY: [[{}, {}], [{}, {}]]",
                        e.leaving_mult.min,
                        render_mult_max(e.leaving_mult),
                        e.arriving_mult.min,
                        render_mult_max(e.arriving_mult)
                    ));
                }
            }
            let checks: Vec<String> = self
                .constraints
                .iter()
                .filter(|c| c.target == label)
                .map(|c| crate::values::render_string(&c.text))
                .collect();
            match checks.len() {
                0 => {}
                1 => doc_entries.push(format!("CHECK: {}", checks[0])),
                _ => doc_entries.push(format!("CHECK: [{}]", checks.join(", "))),
            }
            if !doc_entries.is_empty() {
                line.push_str(&format!(" {{{}}}", doc_entries.join(", ")));
            }
            line.push(';');
            lines.push(line);
        }
        for decl in &self.decls {
            if let TypeDecl::Node(n) = decl {
                if let Some(sup) = &n.supertype {
                    lines.push(format!(
                        "CREATE TYPE {} UNDER {};",
                        render_ident(&n.label),
                        render_ident(sup)
                    ));
                }
            }
        }
        if lines.is_empty() {
            String::new()
        } else {
            format!("{}\n", lines.join("\n"))
        }
    }

    /// Reorders declarations by the given label ranking, mirroring
    /// `Tables::reorder_by` so declaration and table order stay aligned.
    pub fn reorder_by<F>(&mut self, rank: F)
    where
        F: Fn(&str) -> usize,
    {
        let mut indexed: Vec<(usize, TypeDecl)> = self.decls.drain(..).enumerate().collect();
        indexed.sort_by_key(|(original, decl)| (rank(decl.label()), *original));
        self.decls = indexed.into_iter().map(|(_, d)| d).collect();
        self.by_label = self
            .decls
            .iter()
            .enumerate()
            .map(|(i, d)| (d.label().to_string(), i))
            .collect();
    }
}

fn render_mult_max(m: Multiplicity) -> String {
    match m.max {
        Some(n) => n.to_string(),
        None => "'*'".to_string(),
    }
}

fn validate_constraint_columns<'a>(
    expr: &Expr,
    columns: impl Iterator<Item = &'a str>,
    target: &str,
) -> Result<(), EngineError> {
    let names: Vec<&str> = columns.collect();
    fn walk(expr: &Expr, names: &[&str], target: &str) -> Result<(), EngineError> {
        match expr {
            Expr::Ident(name) => {
                if names.contains(&name.as_str()) {
                    Ok(())
                } else {
                    Err(EngineError::UnknownColumn {
                        table: target.to_string(),
                        column: name.clone(),
                    })
                }
            }
            Expr::Property(base, _) => Err(EngineError::TypeErrorInWhere(format!(
                "dotted access {}.* is not allowed in a constraint",
                base
            ))),
            Expr::Literal(_) => Ok(()),
            Expr::Compare(a, _, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                walk(a, names, target)?;
                walk(b, names, target)
            }
            Expr::Not(e) => walk(e, names, target),
        }
    }
    walk(expr, &names, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::Row;

    struct Fixture {
        registry: TypeRegistry,
        tables: Tables,
        schema: SchemaCatalog,
        next_anon: u64,
    }

    impl Fixture {
        fn new() -> Self {
            Fixture {
                registry: TypeRegistry::new(),
                tables: Tables::new(),
                schema: SchemaCatalog::new(),
                next_anon: 1,
            }
        }

        fn node(&mut self, label: &str, props: &[(&str, TypeId)]) {
            let props: Vec<(String, TypeId)> =
                props.iter().map(|(n, t)| (n.to_string(), *t)).collect();
            self.schema
                .declare_node_type(&mut self.tables, label, &props, None, false)
                .unwrap();
        }

        fn edge(&mut self, label: &str, props: &[(&str, TypeId)], leaving: &str, arriving: &str) {
            let props: Vec<(String, TypeId)> =
                props.iter().map(|(n, t)| (n.to_string(), *t)).collect();
            self.schema
                .declare_edge_type(&mut self.tables, label, &props, leaving, arriving, None)
                .unwrap();
        }

        fn insert(&mut self, table: &str, values: Vec<Value>) {
            self.tables
                .insert_row(&self.registry, table, Row::new(values))
                .unwrap();
        }
    }

    #[test]
    fn node_type_realizes_table_with_id_column() {
        let mut fx = Fixture::new();
        fx.node(
            "CUSTOMER",
            &[("Name", TypeRegistry::CHAR), ("ADDRESS", TypeRegistry::CHAR)],
        );
        let table = fx.tables.get("CUSTOMER").unwrap();
        let names: Vec<&str> = table.columns.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, vec!["ID", "Name", "ADDRESS"]);
        assert_eq!(table.columns[0].role, KeyRole::Primary);
        let err = fx
            .schema
            .declare_node_type(&mut fx.tables, "CUSTOMER", &[], None, false)
            .unwrap_err();
        assert_eq!(err, EngineError::DuplicateTypeLabel("CUSTOMER".into()));
    }

    #[test]
    fn edge_type_realizes_three_initial_columns() {
        let mut fx = Fixture::new();
        fx.node("CUSTOMER", &[]);
        fx.node("Order", &[]);
        fx.edge("ORDERED", &[("Date", TypeRegistry::DATE)], "CUSTOMER", "Order");
        let table = fx.tables.get("ORDERED").unwrap();
        let names: Vec<&str> = table.columns.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, vec!["ID", "LEAVING", "ARRIVING", "Date"]);
        assert_eq!(
            table.columns[1].role,
            KeyRole::Foreign { target: "CUSTOMER".into() }
        );
        let err = fx
            .schema
            .declare_edge_type(&mut fx.tables, "X", &[], "CUSTOMER", "MISSING", None)
            .unwrap_err();
        assert_eq!(err, EngineError::UnknownEndpointType("MISSING".into()));
    }

    #[test]
    fn conforms_is_reflexive_and_transitive() {
        let mut fx = Fixture::new();
        fx.node("A", &[]);
        fx.node("B", &[]);
        fx.node("C", &[]);
        fx.schema.retrofit_under("B", "A").unwrap();
        fx.schema.retrofit_under("C", "B").unwrap();
        assert!(fx.schema.conforms("A", "A").unwrap());
        assert!(fx.schema.conforms("C", "A").unwrap());
        assert!(!fx.schema.conforms("A", "C").unwrap());
        assert!(matches!(
            fx.schema.conforms("A", "MISSING"),
            Err(EngineError::UnknownTypeLabel(_))
        ));
    }

    #[test]
    fn under_cycles_rejected() {
        let mut fx = Fixture::new();
        fx.node("A", &[]);
        fx.node("B", &[]);
        fx.schema.retrofit_under("B", "A").unwrap();
        let err = fx.schema.retrofit_under("A", "B").unwrap_err();
        assert!(matches!(err, EngineError::SupertypeCycle { .. }));
        let err = fx.schema.retrofit_under("A", "A").unwrap_err();
        assert!(matches!(err, EngineError::SupertypeCycle { .. }));
    }

    #[test]
    fn generalization_creates_anonymous_supertype_once() {
        let mut fx = Fixture::new();
        fx.node("Order", &[]);
        fx.node("WOODSCREW", &[]);
        fx.node("WALLPLUG", &[]);
        fx.node("RUBBERGLUE", &[]);
        fx.edge("ITEM", &[("QTY", TypeRegistry::INT)], "Order", "WOODSCREW");

        let diags = fx
            .schema
            .generalize_endpoint(
                &mut fx.tables,
                "ITEM",
                EdgeEnd::Arriving,
                "WALLPLUG",
                &mut fx.next_anon,
            )
            .unwrap();
        assert_eq!(fx.next_anon, 2);
        assert!(diags
            .iter()
            .any(|d| d.kind == DiagnosticKind::NewAnonymousType));
        assert_eq!(fx.schema.edge_decl("ITEM").unwrap().arriving, "&1");
        assert_eq!(fx.schema.subtypes_of("&1"), vec!["WOODSCREW", "WALLPLUG"]);
        assert!(fx.schema.node_decl("&1").unwrap().anonymous);

        // A later conflicting type joins the same anonymous supertype.
        let diags = fx
            .schema
            .generalize_endpoint(
                &mut fx.tables,
                "ITEM",
                EdgeEnd::Arriving,
                "RUBBERGLUE",
                &mut fx.next_anon,
            )
            .unwrap();
        assert_eq!(fx.next_anon, 2);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::GeneralizationPerformed);
        assert_eq!(
            fx.schema.subtypes_of("&1"),
            vec!["WOODSCREW", "WALLPLUG", "RUBBERGLUE"]
        );

        // A type that already conforms is a no-op.
        let diags = fx
            .schema
            .generalize_endpoint(
                &mut fx.tables,
                "ITEM",
                EdgeEnd::Arriving,
                "WOODSCREW",
                &mut fx.next_anon,
            )
            .unwrap();
        assert!(diags.is_empty());
    }

    #[test]
    fn multiplicity_bounds_checked_both_ways() {
        let mut fx = Fixture::new();
        fx.node("CUSTOMER", &[]);
        fx.node("Order", &[]);
        fx.edge("ORDERED", &[], "CUSTOMER", "Order");
        fx.schema
            .set_multiplicity(
                "ORDERED",
                (
                    Multiplicity { min: 0, max: None },
                    Multiplicity { min: 0, max: Some(1) },
                ),
            )
            .unwrap();
        fx.insert("CUSTOMER", vec![Value::Char("JOE".into())]);
        fx.insert("Order", vec![Value::Char("ORD201".into())]);
        fx.insert(
            "ORDERED",
            vec![
                Value::Char("&2".into()),
                Value::Char("JOE".into()),
                Value::Char("ORD201".into()),
            ],
        );
        assert!(fx.schema.check_multiplicity(&fx.tables).is_empty());
        fx.insert(
            "ORDERED",
            vec![
                Value::Char("&3".into()),
                Value::Char("JOE".into()),
                Value::Char("ORD201".into()),
            ],
        );
        let violations = fx.schema.check_multiplicity(&fx.tables);
        assert_eq!(violations.len(), 1);
        match &violations[0] {
            EngineError::MultiplicityViolation { node, count, max, .. } => {
                assert!(node.contains("ORD201"));
                assert_eq!(*count, 2);
                assert_eq!(max, "1");
            }
            other => panic!("expected multiplicity violation, got {:?}", other),
        }
    }

    #[test]
    fn min_multiplicity_flags_unconnected_nodes() {
        let mut fx = Fixture::new();
        fx.node("CUSTOMER", &[]);
        fx.node("Order", &[]);
        fx.edge("ORDERED", &[], "CUSTOMER", "Order");
        fx.schema
            .set_multiplicity(
                "ORDERED",
                (Multiplicity { min: 1, max: None }, Multiplicity::DEFAULT),
            )
            .unwrap();
        fx.insert("CUSTOMER", vec![Value::Char("JOE".into())]);
        let violations = fx.schema.check_multiplicity(&fx.tables);
        assert_eq!(violations.len(), 1);
        match &violations[0] {
            EngineError::MultiplicityViolation { count, min, .. } => {
                assert_eq!((*count, *min), (0, 1));
            }
            other => panic!("expected multiplicity violation, got {:?}", other),
        }
    }

    #[test]
    fn constraints_flag_false_and_null_rows() {
        let mut fx = Fixture::new();
        fx.node("PART", &[("QTY", TypeRegistry::INT)]);
        fx.schema
            .add_constraint(&fx.tables, "PART", "QTY > 0")
            .unwrap();
        assert!(fx.schema.check_constraints(&fx.tables).is_empty());
        fx.insert("PART", vec![Value::Char("A".into()), Value::Int(5)]);
        assert!(fx.schema.check_constraints(&fx.tables).is_empty());
        fx.insert("PART", vec![Value::Char("B".into()), Value::Int(0)]);
        fx.insert("PART", vec![Value::Char("C".into()), Value::Null]);
        let violations = fx.schema.check_constraints(&fx.tables);
        assert_eq!(violations.len(), 2);
    }

    #[test]
    fn constraint_must_reference_known_columns() {
        let mut fx = Fixture::new();
        fx.node("PART", &[("QTY", TypeRegistry::INT)]);
        let err = fx
            .schema
            .add_constraint(&fx.tables, "PART", "WEIGHT > 0")
            .unwrap_err();
        assert!(matches!(err, EngineError::UnknownColumn { .. }));
    }

    #[test]
    fn export_renders_empty_schema_as_empty() {
        let fx = Fixture::new();
        assert_eq!(fx.schema.export(&fx.tables, &fx.registry), "");
    }

    #[test]
    fn export_lists_types_then_under_links() {
        let mut fx = Fixture::new();
        fx.node("CUSTOMER", &[("Name", TypeRegistry::CHAR)]);
        fx.node("WOODSCREW", &[]);
        fx.node("WALLPLUG", &[]);
        fx.edge("ITEM", &[("QTY", TypeRegistry::INT)], "CUSTOMER", "WOODSCREW");
        fx.schema
            .generalize_endpoint(
                &mut fx.tables,
                "ITEM",
                EdgeEnd::Arriving,
                "WALLPLUG",
                &mut fx.next_anon,
            )
            .unwrap();
        let export = fx.schema.export(&fx.tables, &fx.registry);
        let lines: Vec<&str> = export.lines().collect();
        assert_eq!(
            lines,
            vec![
                "CREATE TYPE CUSTOMER AS (\"Name\" CHAR) NODETYPE;",
                "CREATE TYPE WOODSCREW NODETYPE;",
                "CREATE TYPE WALLPLUG NODETYPE;",
                "CREATE TYPE ITEM AS (QTY INT) EDGETYPE(CUSTOMER, &1);",
                "CREATE TYPE &1 NODETYPE;",
                "CREATE TYPE WOODSCREW UNDER &1;",
                "CREATE TYPE WALLPLUG UNDER &1;",
            ]
        );
    }
}
