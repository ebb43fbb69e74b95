//! Maintenance of the set of disjoint graphs in the instance.
//!
//! Every node starts as its own component; an edge either lands inside one
//! component or merges two. Removing an edge dissolves the containing
//! component and rebuilds it from its remaining members, leaving at most two
//! pieces. Each component is identified by a representative: its minimum
//! member under (type label, node id) ordering.

use std::fmt::Write as _;

use crate::error::EngineError;
use crate::syntax::ast::render_ident;
use crate::values::Value;

/// Address of one node row: its type label plus primary key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef {
    pub label: String,
    pub id: Value,
}

impl NodeRef {
    pub fn new(label: impl Into<String>, id: impl Into<String>) -> Self {
        NodeRef {
            label: label.into(),
            id: Value::Char(id.into()),
        }
    }

    pub fn render(&self) -> String {
        format!("{}({})", render_ident(&self.label), self.id.render())
    }
}

/// Address of one edge row, with both endpoints resolved.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub label: String,
    pub id: Value,
    pub leaving: NodeRef,
    pub arriving: NodeRef,
}

impl EdgeRef {
    pub fn render(&self) -> String {
        format!("{}({})", render_ident(&self.label), self.id.render())
    }
}

/// One disjoint graph: representative plus sorted member lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub representative: NodeRef,
    pub nodes: Vec<NodeRef>,
    pub edges: Vec<EdgeRef>,
}

impl Component {
    fn singleton(node: NodeRef) -> Self {
        Component {
            representative: node.clone(),
            nodes: vec![node],
            edges: Vec::new(),
        }
    }

    fn contains(&self, node: &NodeRef) -> bool {
        self.nodes.binary_search(node).is_ok()
    }

    fn normalize(&mut self) {
        self.nodes.sort();
        self.nodes.dedup();
        self.edges.sort();
        self.edges.dedup();
        self.representative = self.nodes[0].clone();
    }
}

/// The set of disjoint graphs, kept sorted by representative.
#[derive(Debug, Clone, Default)]
pub struct ComponentSet {
    components: Vec<Component>,
}

impl ComponentSet {
    pub fn new() -> Self {
        ComponentSet::default()
    }

    /// Read-only snapshot in deterministic (representative) order.
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    fn position_of(&self, node: &NodeRef) -> Option<usize> {
        self.components.iter().position(|c| c.contains(node))
    }

    fn resort(&mut self) {
        self.components
            .sort_by(|a, b| a.representative.cmp(&b.representative));
    }

    pub fn on_node_added(&mut self, node: NodeRef) -> Result<(), EngineError> {
        if self.position_of(&node).is_some() {
            return Err(EngineError::DuplicateNode(node.render()));
        }
        self.components.push(Component::singleton(node));
        self.resort();
        Ok(())
    }

    pub fn on_edge_added(&mut self, edge: EdgeRef) -> Result<(), EngineError> {
        let left = self
            .position_of(&edge.leaving)
            .ok_or_else(|| EngineError::UnknownEndpoint(edge.leaving.render()))?;
        let right = self
            .position_of(&edge.arriving)
            .ok_or_else(|| EngineError::UnknownEndpoint(edge.arriving.render()))?;
        if left == right {
            let component = &mut self.components[left];
            component.edges.push(edge);
            component.normalize();
        } else {
            // The edge connects two previously disjoint graphs.
            let (keep, merge) = (left.min(right), left.max(right));
            let absorbed = self.components.remove(merge);
            let component = &mut self.components[keep];
            component.nodes.extend(absorbed.nodes);
            component.edges.extend(absorbed.edges);
            component.edges.push(edge);
            component.normalize();
        }
        self.resort();
        Ok(())
    }

    /// Removes an edge by dissolving its component and adding the remaining
    /// nodes and edges back in; the result is one or two components.
    pub fn on_edge_removed(&mut self, edge: &EdgeRef) -> Result<(), EngineError> {
        let idx = self
            .components
            .iter()
            .position(|c| c.edges.binary_search(edge).is_ok())
            .ok_or_else(|| EngineError::UnknownEdge(edge.render()))?;
        let dissolved = self.components.remove(idx);
        let mut rebuilt = ComponentSet::new();
        for node in dissolved.nodes {
            rebuilt.on_node_added(node).expect("dissolved nodes are distinct");
        }
        for remaining in dissolved.edges {
            if &remaining != edge {
                rebuilt
                    .on_edge_added(remaining)
                    .expect("endpoints stay within the dissolved component");
            }
        }
        self.components.extend(rebuilt.components);
        self.resort();
        Ok(())
    }

    pub fn on_node_removed(&mut self, node: &NodeRef) -> Result<(), EngineError> {
        let idx = self
            .position_of(node)
            .ok_or_else(|| EngineError::UnknownNode(node.render()))?;
        let component = &self.components[idx];
        let incident = component
            .edges
            .iter()
            .any(|e| &e.leaving == node || &e.arriving == node);
        if incident {
            return Err(EngineError::HasIncidentEdges(node.render()));
        }
        if component.nodes.len() == 1 {
            self.components.remove(idx);
        } else {
            // No incident edges, so the node is isolated inside its component
            // only if the component is a singleton; otherwise it cannot be a
            // member of a connected component at all. Rebuild to be safe.
            let component = &mut self.components[idx];
            component.nodes.retain(|n| n != node);
            component.normalize();
        }
        self.resort();
        Ok(())
    }

    /// Textual listing for the GRAPHS shell command.
    pub fn render_listing(&self) -> String {
        if self.components.is_empty() {
            return "no graphs\n".to_string();
        }
        let mut out = String::new();
        for (i, component) in self.components.iter().enumerate() {
            let _ = writeln!(
                out,
                "graph {}: representative {}, {} node(s), {} edge(s)",
                i + 1,
                component.representative.render(),
                component.nodes.len(),
                component.edges.len()
            );
            let nodes: Vec<String> = component.nodes.iter().map(|n| n.render()).collect();
            let _ = writeln!(out, "  nodes: {}", nodes.join(", "));
            if !component.edges.is_empty() {
                let edges: Vec<String> = component.edges.iter().map(|e| e.render()).collect();
                let _ = writeln!(out, "  edges: {}", edges.join(", "));
            }
        }
        out
    }
}
