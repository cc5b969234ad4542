//! Java front end and AST normalization.
//!
//! A [`JavaFrontEnd`] produces a concrete syntax tree ([`RawTree`]). The
//! normalizer then turns that into the AST used everywhere else: punctuation
//! and most keywords are dropped, qualified names and literals collapse into
//! single terminals, and node kinds are renamed to CamelCase so nothing
//! downstream depends on the grammar's naming.

use super::graph::{AstNode, CodeGraph, Edge, EdgeKind, ParseDepth};
use super::{strip_comments, FaAstError};

/// Concrete syntax node as delivered by a front end.
#[derive(Debug, Clone)]
pub struct RawNode {
    pub kind: String,
    pub named: bool,
    /// Grammar field under which this node hangs off its parent.
    pub field: Option<String>,
    pub byte_range: (usize, usize),
    /// 1-based `(start_line, end_line)`.
    pub lines: (usize, usize),
    pub column: usize,
    pub is_error: bool,
    pub is_missing: bool,
    pub children: Vec<RawNode>,
}

#[derive(Debug, Clone)]
pub struct RawTree {
    pub source: String,
    pub root: RawNode,
}

impl RawTree {
    fn text(&self, node: &RawNode) -> &str {
        &self.source[node.byte_range.0..node.byte_range.1]
    }
}

/// Narrow interface to a grammar-based Java parser.
pub trait JavaFrontEnd {
    fn parse(&self, source: &str) -> Result<RawTree, FaAstError>;
}

/// Front end backed by the tree-sitter Java grammar.
#[derive(Debug, Default, Clone, Copy)]
pub struct TreeSitterJava;

impl JavaFrontEnd for TreeSitterJava {
    fn parse(&self, source: &str) -> Result<RawTree, FaAstError> {
        let mut parser = tree_sitter::Parser::new();
        parser
            .set_language(&tree_sitter_java::LANGUAGE.into())
            .map_err(|e| FaAstError::FrontEnd(e.to_string()))?;
        let tree = parser
            .parse(source, None)
            .ok_or_else(|| FaAstError::FrontEnd("parser returned no tree".into()))?;
        let root = convert_ts(tree.root_node(), None);
        Ok(RawTree {
            source: source.to_string(),
            root,
        })
    }
}

fn convert_ts(node: tree_sitter::Node<'_>, field: Option<&str>) -> RawNode {
    let mut children = Vec::with_capacity(node.child_count());
    let mut cursor = node.walk();
    if cursor.goto_first_child() {
        loop {
            let child = cursor.node();
            children.push(convert_ts(child, cursor.field_name()));
            if !cursor.goto_next_sibling() {
                break;
            }
        }
    }
    RawNode {
        kind: node.kind().to_string(),
        named: node.is_named(),
        field: field.map(str::to_string),
        byte_range: (node.start_byte(), node.end_byte()),
        lines: (node.start_position().row + 1, node.end_position().row + 1),
        column: node.start_position().column + 1,
        is_error: node.is_error(),
        is_missing: node.is_missing(),
        children,
    }
}

/// Owned normalized tree, the intermediate form between front end and graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct TreeNode {
    pub kind: String,
    pub token: Option<String>,
    pub span: Option<(usize, usize)>,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn count(&self) -> usize {
        1 + self.children.iter().map(TreeNode::count).sum::<usize>()
    }

    /// Flattens into a graph with pre-order ids and `AstChild`/`AstParent` edges.
    pub fn into_graph(self, path: &str, depth: ParseDepth, partial: bool) -> CodeGraph {
        let mut nodes = Vec::with_capacity(self.count());
        let mut child_edges = Vec::new();
        // Explicit stack so deeply nested expressions cannot overflow.
        let mut stack: Vec<(TreeNode, Option<usize>)> = vec![(self, None)];
        while let Some((node, parent)) = stack.pop() {
            let id = nodes.len();
            if let Some(p) = parent {
                child_edges.push(Edge::new(p, id, EdgeKind::AstChild));
            }
            let TreeNode {
                kind,
                token,
                span,
                children,
            } = node;
            let token = if children.is_empty() {
                Some(token.unwrap_or_default())
            } else {
                None
            };
            nodes.push(AstNode {
                id,
                kind,
                token,
                span,
            });
            for child in children.into_iter().rev() {
                stack.push((child, Some(id)));
            }
        }
        // Pre-order push gives children of a parent in ascending id order;
        // sort by (parent, child) to keep sibling order explicit in the list.
        child_edges.sort_by_key(|e| (e.src, e.dst));
        let parent_edges: Vec<Edge> = child_edges
            .iter()
            .map(|e| Edge::new(e.dst, e.src, EdgeKind::AstParent))
            .collect();
        let mut edges = child_edges;
        edges.extend(parent_edges);
        CodeGraph {
            path: path.to_string(),
            depth,
            nodes,
            edges,
            partial,
        }
    }

    /// Rebuilds the owned tree from a graph's AST edges.
    pub fn from_graph(g: &CodeGraph) -> Option<TreeNode> {
        let children = g.children();
        let root = g.root()?;
        fn build(g: &CodeGraph, children: &[Vec<usize>], id: usize) -> TreeNode {
            let n = &g.nodes[id];
            TreeNode {
                kind: n.kind.clone(),
                token: n.token.clone(),
                span: n.span,
                children: children[id].iter().map(|&c| build(g, children, c)).collect(),
            }
        }
        Some(build(g, &children, root))
    }
}

/// Raw kinds whose anonymous children are operators worth keeping.
const OPERATOR_PARENTS: &[&str] = &[
    "binary_expression",
    "unary_expression",
    "update_expression",
    "assignment_expression",
];

/// Kinds collapsed into a single terminal carrying their full text.
const LITERAL_KINDS: &[&str] = &["string_literal", "character_literal", "text_block"];

fn camel_case(kind: &str) -> String {
    match kind {
        "program" => return "CompilationUnit".to_string(),
        "ERROR" => return "Error".to_string(),
        _ => {}
    }
    let mut out = String::with_capacity(kind.len());
    for part in kind.split('_').filter(|p| !p.is_empty()) {
        let mut chars = part.chars();
        if let Some(first) = chars.next() {
            out.extend(first.to_uppercase());
            out.push_str(chars.as_str());
        }
    }
    out
}

fn squash_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn strip_whitespace(text: &str) -> String {
    text.chars().filter(|c| !c.is_whitespace()).collect()
}

/// `a.b.c`, `this.x`: field accesses made only of names.
fn is_pure_member_chain(node: &RawNode) -> bool {
    node.children.iter().all(|c| match c.kind.as_str() {
        "identifier" | "this" | "super" | "." => true,
        "field_access" => is_pure_member_chain(c),
        _ => false,
    })
}

struct Normalizer<'a> {
    tree: &'a RawTree,
}

impl Normalizer<'_> {
    fn span(node: &RawNode) -> Option<(usize, usize)> {
        Some(node.lines)
    }

    fn terminal(&self, kind: &str, node: &RawNode, token: String) -> TreeNode {
        TreeNode {
            kind: kind.to_string(),
            token: Some(token),
            span: Self::span(node),
            children: Vec::new(),
        }
    }

    /// Normalizes `node`, returning zero (dropped), one, or several (spliced) nodes.
    fn normalize(&self, node: &RawNode, parent_kind: &str, out: &mut Vec<TreeNode>) {
        let kind = node.kind.as_str();
        if matches!(kind, "line_comment" | "block_comment") {
            return;
        }
        let text = self.tree.text(node);
        if !node.named {
            if node.is_error {
                out.push(self.terminal("Error", node, squash_whitespace(text)));
            } else if parent_kind == "modifiers" {
                out.push(self.terminal("Modifier", node, text.to_string()));
            } else if OPERATOR_PARENTS.contains(&parent_kind) && is_operator(text) {
                out.push(self.terminal("Operator", node, text.to_string()));
            }
            return;
        }
        if LITERAL_KINDS.contains(&kind) {
            out.push(self.terminal(&camel_case(kind), node, text.to_string()));
            return;
        }
        match kind {
            "scoped_identifier" => {
                out.push(self.terminal("QualifiedName", node, strip_whitespace(text)));
                return;
            }
            "scoped_type_identifier" if node.children.iter().all(|c| !c.named || c.kind.ends_with("identifier")) => {
                out.push(self.terminal("ScopedTypeIdentifier", node, strip_whitespace(text)));
                return;
            }
            "field_access" if is_pure_member_chain(node) => {
                out.push(self.terminal("MemberReference", node, strip_whitespace(text)));
                return;
            }
            "parenthesized_expression" => {
                let mut inner = Vec::new();
                for c in &node.children {
                    self.normalize(c, kind, &mut inner);
                }
                if inner.len() == 1 {
                    out.append(&mut inner);
                } else {
                    out.push(self.nonterminal(kind, node, inner, text));
                }
                return;
            }
            "for_statement" => {
                out.push(self.for_statement(node));
                return;
            }
            _ => {}
        }
        let mut children = Vec::new();
        for c in &node.children {
            self.normalize(c, kind, &mut children);
        }
        out.push(self.nonterminal(kind, node, children, text));
    }

    fn nonterminal(&self, kind: &str, node: &RawNode, children: Vec<TreeNode>, text: &str) -> TreeNode {
        let token = children.is_empty().then(|| squash_whitespace(text));
        TreeNode {
            kind: camel_case(kind),
            token,
            span: Self::span(node),
            children,
        }
    }

    /// `for (init; cond; update) body` becomes
    /// `ForStatement[ForInit?, cond?, ForUpdate?, body]` so the condition is
    /// identifiable from kinds alone.
    fn for_statement(&self, node: &RawNode) -> TreeNode {
        let mut init = Vec::new();
        let mut cond = Vec::new();
        let mut update = Vec::new();
        let mut body = Vec::new();
        for c in &node.children {
            let target = match c.field.as_deref() {
                Some("init") => &mut init,
                Some("condition") => &mut cond,
                Some("update") => &mut update,
                Some("body") => &mut body,
                _ => {
                    // Comments and punctuation only.
                    continue;
                }
            };
            self.normalize(c, "for_statement", target);
        }
        let wrap = |kind: &str, parts: Vec<TreeNode>| -> Option<TreeNode> {
            (!parts.is_empty()).then(|| TreeNode {
                kind: kind.to_string(),
                token: None,
                span: span_of(&parts),
                children: parts,
            })
        };
        let mut children = Vec::new();
        children.extend(wrap("ForInit", init));
        children.extend(cond);
        children.extend(wrap("ForUpdate", update));
        children.extend(body);
        let token = children.is_empty().then(|| squash_whitespace(self.tree.text(node)));
        TreeNode {
            kind: "ForStatement".to_string(),
            token,
            span: Self::span(node),
            children,
        }
    }
}

fn span_of(parts: &[TreeNode]) -> Option<(usize, usize)> {
    let start = parts.iter().filter_map(|p| p.span).map(|s| s.0).min()?;
    let end = parts.iter().filter_map(|p| p.span).map(|s| s.1).max()?;
    Some((start, end))
}

fn is_operator(text: &str) -> bool {
    !text.is_empty()
        && text
            .chars()
            .all(|c| matches!(c, '+' | '-' | '*' | '/' | '%' | '<' | '>' | '=' | '!' | '&' | '|' | '^' | '~'))
        || text == "instanceof"
}

fn first_error(node: &RawNode) -> Option<&RawNode> {
    if node.is_error || node.is_missing {
        return Some(node);
    }
    node.children.iter().find_map(first_error)
}

/// Normalizes a raw tree into an AST-only graph.
pub fn normalize(tree: &RawTree, path: &str) -> Result<CodeGraph, FaAstError> {
    let root = &tree.root;
    let has_content = !tree.source.trim().is_empty();
    let has_good_child = root
        .children
        .iter()
        .any(|c| c.named && !c.is_error && !matches!(c.kind.as_str(), "line_comment" | "block_comment"));
    if root.is_error || (has_content && !has_good_child) {
        let at = first_error(root).unwrap_or(root);
        return Err(FaAstError::Parse {
            path: path.to_string(),
            line: at.lines.0,
            column: at.column,
        });
    }
    let partial = first_error(root).is_some();
    let normalizer = Normalizer { tree };
    let mut out = Vec::with_capacity(1);
    normalizer.normalize(root, "", &mut out);
    let tree_node = out.pop().expect("root is a named node");
    Ok(tree_node.into_graph(path, ParseDepth::File, partial))
}

/// Parses Java source into an AST-only graph (comments removed first).
pub fn parse_ast(source: &str, path: &str) -> Result<CodeGraph, FaAstError> {
    parse_ast_with(&TreeSitterJava, source, path)
}

pub fn parse_ast_with(front_end: &dyn JavaFrontEnd, source: &str, path: &str) -> Result<CodeGraph, FaAstError> {
    let stripped = strip_comments(source);
    let raw = front_end.parse(&stripped)?;
    normalize(&raw, path)
}
