//! Flat arena of pattern subexpressions with continuation links.
//!
//! Every subexpression gets a [`NodeId`] in depth-first pre-order, so
//! ids increase from the root down and left to right. Alongside its
//! kind, each node stores its continuation: the code to run once the
//! node itself has matched. Continuations follow three laws, rooted at
//! `kont(root) = Terminal`:
//!
//! * `Concat(l, r)`: `kont(l) = r`, `kont(r) = kont(self)`
//! * `Alt(l, r)`: both branches inherit `kont(self)`
//! * `Star(body)`: `kont(body)` is the star itself
//!
//! The matcher, the pump search, and attack synthesis all navigate the
//! pattern exclusively through this table; the tree shape is only kept
//! implicitly in the child links.

use crate::ast::Ast;
use crate::charset::CharSet;
use std::fmt;

/// Index of a subexpression in its [`ExprArena`]. Ordering follows
/// pre-order numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn from_u32(n: u32) -> NodeId {
        NodeId(n)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn as_u32(self) -> u32 {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point in the pattern program: either a subexpression or the
/// terminal continuation reached after the whole pattern has matched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    Node(NodeId),
    Terminal,
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Code::Node(id) => write!(f, "{id}"),
            Code::Terminal => write!(f, "bot"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Epsilon,
    Constant(CharSet),
    Concat(NodeId, NodeId),
    Alt(NodeId, NodeId),
    Star { body: NodeId, greedy: bool },
    AnchorStart,
    AnchorEnd,
}

#[derive(Clone, Debug)]
struct Node {
    kind: NodeKind,
    kont: Code,
}

#[derive(Clone, Debug)]
pub struct ExprArena {
    nodes: Vec<Node>,
    root: NodeId,
}

impl ExprArena {
    pub fn build(ast: &Ast) -> ExprArena {
        let mut nodes = Vec::with_capacity(ast.node_count());
        let root = alloc(ast, &mut nodes);
        let mut arena = ExprArena { nodes, root };
        arena.assign_kont(root, Code::Terminal);
        arena
    }

    fn assign_kont(&mut self, id: NodeId, k: Code) {
        self.nodes[id.index()].kont = k;
        match self.nodes[id.index()].kind {
            NodeKind::Concat(l, r) => {
                self.assign_kont(l, Code::Node(r));
                self.assign_kont(r, k);
            }
            NodeKind::Alt(l, r) => {
                self.assign_kont(l, k);
                self.assign_kont(r, k);
            }
            NodeKind::Star { body, .. } => self.assign_kont(body, Code::Node(id)),
            _ => {}
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn kind(&self, id: NodeId) -> &NodeKind {
        &self.nodes[id.index()].kind
    }

    pub fn kont(&self, id: NodeId) -> Code {
        self.nodes[id.index()].kont
    }

    /// All Kleene (star) nodes in pre-order.
    pub fn kleene_nodes(&self) -> Vec<NodeId> {
        (0..self.nodes.len() as u32)
            .map(NodeId)
            .filter(|id| matches!(self.kind(*id), NodeKind::Star { .. }))
            .collect()
    }

    /// True when the subexpression can match the empty string. Anchors
    /// count as zero-width.
    pub fn nullable(&self, id: NodeId) -> bool {
        match self.kind(id) {
            NodeKind::Epsilon | NodeKind::AnchorStart | NodeKind::AnchorEnd => true,
            NodeKind::Constant(_) => false,
            NodeKind::Concat(l, r) => self.nullable(*l) && self.nullable(*r),
            NodeKind::Alt(l, r) => self.nullable(*l) || self.nullable(*r),
            NodeKind::Star { .. } => true,
        }
    }

    /// Reconstructs the subtree rooted at `id`.
    pub fn to_ast(&self, id: NodeId) -> Ast {
        match self.kind(id) {
            NodeKind::Epsilon => Ast::Epsilon,
            NodeKind::Constant(cs) => Ast::Constant(cs.clone()),
            NodeKind::Concat(l, r) => Ast::concat(self.to_ast(*l), self.to_ast(*r)),
            NodeKind::Alt(l, r) => Ast::alt(self.to_ast(*l), self.to_ast(*r)),
            NodeKind::Star { body, greedy } => Ast::Star {
                body: Box::new(self.to_ast(*body)),
                greedy: *greedy,
            },
            NodeKind::AnchorStart => Ast::AnchorStart,
            NodeKind::AnchorEnd => Ast::AnchorEnd,
        }
    }

    /// Pattern text of the subtree rooted at `id`, for reports.
    pub fn subpattern(&self, id: NodeId) -> String {
        self.to_ast(id).to_pattern()
    }

    /// One line per node: `<id> <kind(children)> <kont>`, with `bot`
    /// for the terminal continuation.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, node) in self.nodes.iter().enumerate() {
            let kind = match &node.kind {
                NodeKind::Epsilon => "eps".to_string(),
                NodeKind::Constant(cs) => format!("const({})", cs.describe()),
                NodeKind::Concat(l, r) => format!("cat({l},{r})"),
                NodeKind::Alt(l, r) => format!("alt({l},{r})"),
                NodeKind::Star { body, .. } => format!("star({body})"),
                NodeKind::AnchorStart => "caret".to_string(),
                NodeKind::AnchorEnd => "dollar".to_string(),
            };
            out.push_str(&format!("{i} {kind} {}\n", node.kont));
        }
        out
    }
}

fn alloc(ast: &Ast, nodes: &mut Vec<Node>) -> NodeId {
    let id = NodeId(nodes.len() as u32);
    nodes.push(Node {
        kind: NodeKind::Epsilon,
        kont: Code::Terminal,
    });
    let kind = match ast {
        Ast::Epsilon => NodeKind::Epsilon,
        Ast::Constant(cs) => NodeKind::Constant(cs.clone()),
        Ast::Concat(l, r) => {
            let li = alloc(l, nodes);
            let ri = alloc(r, nodes);
            NodeKind::Concat(li, ri)
        }
        Ast::Alt(l, r) => {
            let li = alloc(l, nodes);
            let ri = alloc(r, nodes);
            NodeKind::Alt(li, ri)
        }
        Ast::Star { body, greedy } => {
            let b = alloc(body, nodes);
            NodeKind::Star {
                body: b,
                greedy: *greedy,
            }
        }
        Ast::AnchorStart => NodeKind::AnchorStart,
        Ast::AnchorEnd => NodeKind::AnchorEnd,
    };
    nodes[id.index()].kind = kind;
    id
}
