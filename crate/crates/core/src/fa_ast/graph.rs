use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::FaAstError;

/// The ten edge kinds of a flow-augmented AST.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    AstChild,
    AstParent,
    NextToken,
    NextSibling,
    NextUse,
    IfFlow,
    ElseFlow,
    WhileFlow,
    ForFlow,
    NextStatement,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 10] = [
        EdgeKind::AstChild,
        EdgeKind::AstParent,
        EdgeKind::NextToken,
        EdgeKind::NextSibling,
        EdgeKind::NextUse,
        EdgeKind::IfFlow,
        EdgeKind::ElseFlow,
        EdgeKind::WhileFlow,
        EdgeKind::ForFlow,
        EdgeKind::NextStatement,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::AstChild => "AstChild",
            EdgeKind::AstParent => "AstParent",
            EdgeKind::NextToken => "NextToken",
            EdgeKind::NextSibling => "NextSibling",
            EdgeKind::NextUse => "NextUse",
            EdgeKind::IfFlow => "IfFlow",
            EdgeKind::ElseFlow => "ElseFlow",
            EdgeKind::WhileFlow => "WhileFlow",
            EdgeKind::ForFlow => "ForFlow",
            EdgeKind::NextStatement => "NextStatement",
        }
    }

    pub fn is_ast(self) -> bool {
        matches!(self, EdgeKind::AstChild | EdgeKind::AstParent)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EdgeKind {
    type Err = FaAstError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EdgeKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| FaAstError::Format(format!("unknown edge kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ParseDepth {
    #[default]
    File,
    System,
}

impl FromStr for ParseDepth {
    type Err = FaAstError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "file" => Ok(ParseDepth::File),
            "system" => Ok(ParseDepth::System),
            other => Err(FaAstError::Format(format!("unknown parse depth `{other}`"))),
        }
    }
}

impl fmt::Display for ParseDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseDepth::File => "file",
            ParseDepth::System => "system",
        })
    }
}

/// One AST node. Node ids are dense indices into [`CodeGraph::nodes`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AstNode {
    pub id: usize,
    pub kind: String,
    /// Present exactly for terminals.
    pub token: Option<String>,
    /// `(start_line, end_line)`, 1-based. Not serialized and never used as a feature.
    pub span: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn new(src: usize, dst: usize, kind: EdgeKind) -> Self {
        Self { src, dst, kind }
    }
}

/// Flow-augmented AST of one source file.
///
/// AST child edges are stored in sibling order; the order of `AstChild` edges
/// in [`CodeGraph::edges`] is what defines "next sibling" and token order.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeGraph {
    pub path: String,
    pub depth: ParseDepth,
    pub nodes: Vec<AstNode>,
    pub edges: Vec<Edge>,
    /// Set when the front end had to recover from syntax errors.
    pub partial: bool,
}

impl CodeGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn count_kind(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn edge_kind_counts(&self) -> [usize; 10] {
        let mut counts = [0; 10];
        for e in &self.edges {
            counts[e.kind.index()] += 1;
        }
        counts
    }

    /// Ordered child lists derived from `AstChild` edges.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.nodes.len()];
        for e in self.edges.iter().filter(|e| e.kind == EdgeKind::AstChild) {
            children[e.src].push(e.dst);
        }
        children
    }

    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parents = vec![None; self.nodes.len()];
        for e in self.edges.iter().filter(|e| e.kind == EdgeKind::AstChild) {
            parents[e.dst] = Some(e.src);
        }
        parents
    }

    /// The unique node without an AST parent. Node 0 for graphs built here.
    pub fn root(&self) -> Option<usize> {
        let parents = self.parents();
        (0..self.nodes.len()).find(|&i| parents[i].is_none())
    }

    /// Nodes in depth-first pre-order over the AST.
    pub fn preorder(&self) -> Vec<usize> {
        let children = self.children();
        let mut order = Vec::with_capacity(self.nodes.len());
        let Some(root) = self.root() else {
            return order;
        };
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            order.push(n);
            stack.extend(children[n].iter().rev().copied());
        }
        order
    }

    pub fn is_terminal(&self, children: &[Vec<usize>], id: usize) -> bool {
        children[id].is_empty()
    }

    /// Terminals in source (pre-order) order.
    pub fn terminals(&self) -> Vec<usize> {
        let children = self.children();
        self.preorder()
            .into_iter()
            .filter(|&n| children[n].is_empty())
            .collect()
    }

    /// Copy of this graph keeping only AST child/parent edges.
    pub fn ast_only(&self) -> CodeGraph {
        CodeGraph {
            edges: self.edges.iter().copied().filter(|e| e.kind.is_ast()).collect(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = GraphDoc {
            path: self.path.clone(),
            depth: self.depth,
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDoc {
                    id: n.id,
                    kind: n.kind.clone(),
                    token: n.token.clone(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| (e.src, e.dst, e.kind.as_str().to_string()))
                .collect(),
        };
        serde_json::to_value(doc).expect("graph document is always serializable")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("graph document is always serializable")
    }

    /// Reads the graph exchange format. Node ids may be any unique integers;
    /// they are remapped to dense indices in document order.
    pub fn from_json_str(s: &str) -> Result<CodeGraph, FaAstError> {
        let doc: GraphDoc =
            serde_json::from_str(s).map_err(|e| FaAstError::Format(e.to_string()))?;
        let mut remap = std::collections::HashMap::with_capacity(doc.nodes.len());
        for (i, n) in doc.nodes.iter().enumerate() {
            if remap.insert(n.id, i).is_some() {
                return Err(FaAstError::Format(format!("duplicate node id {}", n.id)));
            }
        }
        let nodes = doc
            .nodes
            .into_iter()
            .enumerate()
            .map(|(i, n)| AstNode {
                id: i,
                kind: n.kind,
                token: n.token,
                span: None,
            })
            .collect();
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (src, dst, kind) in doc.edges {
            let lookup = |id: usize| {
                remap
                    .get(&id)
                    .copied()
                    .ok_or_else(|| FaAstError::Format(format!("edge references unknown node {id}")))
            };
            edges.push(Edge::new(lookup(src)?, lookup(dst)?, kind.parse()?));
        }
        Ok(CodeGraph {
            path: doc.path,
            depth: doc.depth,
            nodes,
            edges,
            partial: false,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    path: String,
    depth: ParseDepth,
    nodes: Vec<NodeDoc>,
    edges: Vec<(usize, usize, String)>,
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    id: usize,
    kind: String,
    token: Option<String>,
}
