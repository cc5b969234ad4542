//! Flow augmentation of an AST graph.
//!
//! Everything here is computed from node kinds, tokens and the ordered
//! `AstChild` edges, so augmenting a graph read back from JSON gives the same
//! result as augmenting a freshly parsed one.

use std::collections::HashMap;

use super::graph::{CodeGraph, Edge, EdgeKind};

/// Kinds whose direct children form a sequential statement list.
const BLOCK_KINDS: &[&str] = &["Block", "ConstructorBody"];

/// Kinds that open a lexical scope for variable resolution.
const SCOPE_KINDS: &[&str] = &[
    "ClassBody",
    "InterfaceBody",
    "EnumBody",
    "RecordDeclaration",
    "Block",
    "ConstructorBody",
    "MethodDeclaration",
    "ConstructorDeclaration",
    "ForStatement",
    "EnhancedForStatement",
    "LambdaExpression",
    "CatchClause",
    "TryWithResourcesStatement",
    "SwitchBlock",
];

/// Parents under which an `Identifier` names a declaration or label rather
/// than reading a variable.
const NON_USE_PARENTS: &[&str] = &[
    "MethodDeclaration",
    "ConstructorDeclaration",
    "CompactConstructorDeclaration",
    "ClassDeclaration",
    "InterfaceDeclaration",
    "EnumDeclaration",
    "RecordDeclaration",
    "AnnotationTypeDeclaration",
    "AnnotationTypeElementDeclaration",
    "MarkerAnnotation",
    "Annotation",
    "ElementValuePair",
    "LabeledStatement",
    "BreakStatement",
    "ContinueStatement",
    "EnumConstant",
    "MethodReference",
];

/// Returns `g` with every flow edge recomputed from its AST.
///
/// Existing non-AST edges are discarded first, which makes the operation
/// idempotent. Flow edges are appended grouped by kind, in the order
/// NextToken, NextSibling, NextUse, IfFlow, ElseFlow, WhileFlow, ForFlow,
/// NextStatement.
pub fn augment_flow(g: &CodeGraph) -> CodeGraph {
    let mut out = g.ast_only();
    let children = out.children();
    let order = out.preorder();

    let mut flow: Vec<Edge> = Vec::new();

    // NextToken: consecutive terminals in source order.
    let terminals: Vec<usize> = order.iter().copied().filter(|&n| children[n].is_empty()).collect();
    flow.extend(terminals.windows(2).map(|w| Edge::new(w[0], w[1], EdgeKind::NextToken)));

    // NextSibling: consecutive children of every node.
    for &n in &order {
        flow.extend(children[n].windows(2).map(|w| Edge::new(w[0], w[1], EdgeKind::NextSibling)));
    }

    flow.extend(next_use_edges(&out, &children, &order));

    let kind = |n: usize| out.nodes[n].kind.as_str();
    let mut control: [Vec<Edge>; 4] = Default::default();
    let mut loop_back = Vec::new();
    for &n in &order {
        let ch = &children[n];
        match kind(n) {
            "IfStatement" if ch.len() >= 2 => {
                control[0].push(Edge::new(ch[0], ch[1], EdgeKind::IfFlow));
                if ch.len() >= 3 {
                    control[1].push(Edge::new(ch[0], ch[2], EdgeKind::ElseFlow));
                }
            }
            "WhileStatement" if ch.len() >= 2 => {
                control[2].push(Edge::new(ch[0], ch[1], EdgeKind::WhileFlow));
                loop_back.push(Edge::new(ch[1], ch[0], EdgeKind::NextUse));
            }
            "ForStatement" => {
                let body = ch.last().copied();
                let cond = ch
                    .iter()
                    .copied()
                    .take(ch.len().saturating_sub(1))
                    .find(|&c| !matches!(kind(c), "ForInit" | "ForUpdate"));
                if let (Some(cond), Some(body)) = (cond, body) {
                    control[3].push(Edge::new(cond, body, EdgeKind::ForFlow));
                    loop_back.push(Edge::new(body, cond, EdgeKind::NextUse));
                }
            }
            "EnhancedForStatement" if ch.len() >= 2 => {
                // `for (T x : iterable) body`: the iterable drives the loop.
                let body = ch[ch.len() - 1];
                let iterable = ch[ch.len() - 2];
                control[3].push(Edge::new(iterable, body, EdgeKind::ForFlow));
                loop_back.push(Edge::new(body, iterable, EdgeKind::NextUse));
            }
            _ => {}
        }
    }
    flow.extend(loop_back);
    for group in control {
        flow.extend(group);
    }

    // NextStatement: consecutive statements of a block.
    for &n in &order {
        if BLOCK_KINDS.contains(&kind(n)) {
            flow.extend(children[n].windows(2).map(|w| Edge::new(w[0], w[1], EdgeKind::NextStatement)));
        }
    }

    // Keep the documented grouping: stable sort by kind only.
    flow.sort_by_key(|e| e.kind);
    out.edges.extend(flow);
    out
}

#[derive(Default)]
struct Scope {
    vars: HashMap<String, usize>,
}

/// Variable bindings are numbered; each remembers the last node that touched it.
struct UseTracker {
    scopes: Vec<Scope>,
    last_seen: Vec<usize>,
    members: HashMap<(Option<usize>, String), usize>,
    edges: Vec<Edge>,
}

impl UseTracker {
    fn lookup(&self, name: &str) -> Option<usize> {
        self.scopes.iter().rev().find_map(|s| s.vars.get(name).copied())
    }

    fn declare(&mut self, name: &str, node: usize) {
        let binding = self.last_seen.len();
        self.last_seen.push(node);
        self.scopes
            .last_mut()
            .expect("scope stack is never empty")
            .vars
            .insert(name.to_string(), binding);
    }

    fn use_var(&mut self, name: &str, node: usize) {
        if let Some(b) = self.lookup(name) {
            let prev = self.last_seen[b];
            if prev != node {
                self.edges.push(Edge::new(prev, node, EdgeKind::NextUse));
            }
            self.last_seen[b] = node;
        }
    }

    /// Qualified references chain on their full text, keyed by the binding of
    /// their receiver when it is a local name.
    fn use_member(&mut self, text: &str, node: usize) {
        let receiver = text.split('.').next().unwrap_or(text);
        let key = (self.lookup(receiver), text.to_string());
        if let Some(prev) = self.members.insert(key, node) {
            self.edges.push(Edge::new(prev, node, EdgeKind::NextUse));
        }
    }
}

/// Lexical, single-pass, name-based def/use chaining. Innermost declaration
/// wins; uses before a declaration in source order stay unresolved.
fn next_use_edges(g: &CodeGraph, children: &[Vec<usize>], order: &[usize]) -> Vec<Edge> {
    let parents = g.parents();
    let kind = |n: usize| g.nodes[n].kind.as_str();
    let token = |n: usize| g.nodes[n].token.as_deref().unwrap_or("");

    // Mark which identifier terminals are declarations.
    let mut is_decl = vec![false; g.nodes.len()];
    for &n in order {
        let ch = &children[n];
        let mut mark = |c: usize| {
            if kind(c) == "Identifier" {
                is_decl[c] = true;
            }
        };
        match kind(n) {
            "VariableDeclarator" => {
                if let Some(&c) = ch.first() {
                    mark(c);
                }
            }
            "FormalParameter" | "SpreadParameter" | "CatchFormalParameter" | "Resource" | "InferredParameters" => {
                for &c in ch {
                    mark(c);
                }
            }
            "LambdaExpression" => {
                if let Some(&c) = ch.first() {
                    mark(c);
                }
            }
            "EnhancedForStatement" if ch.len() >= 3 => mark(ch[ch.len() - 3]),
            _ => {}
        }
    }

    let mut tracker = UseTracker {
        scopes: vec![Scope::default()],
        last_seen: Vec::new(),
        members: HashMap::new(),
        edges: Vec::new(),
    };

    // Iterative DFS with explicit exit markers for scope handling.
    enum Step {
        Enter(usize),
        Exit,
    }
    let Some(root) = g.root() else {
        return Vec::new();
    };
    let mut stack = vec![Step::Enter(root)];
    while let Some(step) = stack.pop() {
        let n = match step {
            Step::Exit => {
                tracker.scopes.pop();
                continue;
            }
            Step::Enter(n) => n,
        };
        if SCOPE_KINDS.contains(&kind(n)) {
            tracker.scopes.push(Scope::default());
            stack.push(Step::Exit);
        }
        if children[n].is_empty() {
            match kind(n) {
                "Identifier" if is_decl[n] => tracker.declare(token(n), n),
                "Identifier" => {
                    let parent = parents[n];
                    let parent_kind = parent.map(kind).unwrap_or("");
                    let is_method_name = parent_kind == "MethodInvocation"
                        && parent.is_some_and(|p| {
                            let sib = &children[p];
                            let pos = sib.iter().position(|&c| c == n);
                            pos.is_some_and(|i| i + 1 < sib.len() && kind(sib[i + 1]) == "ArgumentList")
                        });
                    if !is_method_name && !NON_USE_PARENTS.contains(&parent_kind) {
                        tracker.use_var(token(n), n);
                    }
                }
                "MemberReference" => tracker.use_member(token(n), n),
                _ => {}
            }
        }
        for &c in children[n].iter().rev() {
            stack.push(Step::Enter(c));
        }
    }
    tracker.edges
}
