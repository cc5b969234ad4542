//! System-level parsing: inline corpus-local declarations at reference sites.
//!
//! Method calls are matched to method declarations by simple name and
//! argument count; type identifiers are matched to class, interface, enum or
//! record declarations by simple name. A match inlines a copy of the
//! declaration's AST next to the referencing leaf (as a following sibling), so
//! the leaf stays a terminal. Each declaration is inlined at most once per
//! resulting graph, which also bounds the expansion; a reference back to a
//! declaration that is currently being expanded is reported as a cycle and
//! left as a leaf. References that match nothing in the corpus (JDK,
//! third-party) stay leaves.

use std::collections::{HashMap, HashSet};

use super::augment::augment_flow;
use super::graph::{CodeGraph, ParseDepth};
use super::parse::TreeNode;

const TYPE_DECL_KINDS: &[&str] = &[
    "ClassDeclaration",
    "InterfaceDeclaration",
    "EnumDeclaration",
    "RecordDeclaration",
];

/// Identity of a declaration: graph index in the corpus plus node id.
pub type DeclId = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionCycle {
    /// Path of the graph being resolved.
    pub path: String,
    /// `name/arity` for methods, the type name for types.
    pub reference: String,
}

#[derive(Debug, Clone)]
pub struct SystemResolution {
    pub graph: CodeGraph,
    pub cycles: Vec<ResolutionCycle>,
    pub inlined: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum DeclKey {
    Method(String, usize),
    Type(String),
}

impl DeclKey {
    fn describe(&self) -> String {
        match self {
            DeclKey::Method(name, arity) => format!("{name}/{arity}"),
            DeclKey::Type(name) => name.clone(),
        }
    }
}

/// Index of every method and type declaration across a corpus.
pub struct DeclarationIndex<'a> {
    corpus: &'a [CodeGraph],
    by_key: HashMap<DeclKey, Vec<DeclId>>,
    all_decls: HashSet<DeclId>,
    children: Vec<Vec<Vec<usize>>>,
}

fn first_child_token(g: &CodeGraph, children: &[Vec<usize>], n: usize, kind: &str) -> Option<String> {
    children[n]
        .iter()
        .find(|&&c| g.nodes[c].kind == kind)
        .and_then(|&c| g.nodes[c].token.clone())
}

fn parameter_count(g: &CodeGraph, children: &[Vec<usize>], decl: usize) -> usize {
    children[decl]
        .iter()
        .find(|&&c| g.nodes[c].kind == "FormalParameters")
        .map(|&p| {
            children[p]
                .iter()
                .filter(|&&c| matches!(g.nodes[c].kind.as_str(), "FormalParameter" | "SpreadParameter"))
                .count()
        })
        .unwrap_or(0)
}

fn declaration_keys(g: &CodeGraph, children: &[Vec<usize>]) -> Vec<(DeclKey, usize)> {
    let mut keys = Vec::new();
    for n in g.preorder() {
        let kind = g.nodes[n].kind.as_str();
        if kind == "MethodDeclaration" {
            if let Some(name) = first_child_token(g, children, n, "Identifier") {
                keys.push((DeclKey::Method(name, parameter_count(g, children, n)), n));
            }
        } else if TYPE_DECL_KINDS.contains(&kind) {
            if let Some(name) = first_child_token(g, children, n, "Identifier") {
                keys.push((DeclKey::Type(name), n));
            }
        }
    }
    keys
}

impl<'a> DeclarationIndex<'a> {
    pub fn new(corpus: &'a [CodeGraph]) -> Self {
        let mut by_key: HashMap<DeclKey, Vec<DeclId>> = HashMap::new();
        let mut children = Vec::with_capacity(corpus.len());
        for (gi, g) in corpus.iter().enumerate() {
            let ch = g.children();
            for (key, node) in declaration_keys(g, &ch) {
                by_key.entry(key).or_default().push((gi, node));
            }
            children.push(ch);
        }
        let all_decls = by_key.values().flatten().copied().collect();
        Self {
            corpus,
            by_key,
            all_decls,
            children,
        }
    }

    fn subtree(&self, (gi, node): DeclId) -> TreeNode {
        let g = &self.corpus[gi];
        let children = &self.children[gi];
        fn build(g: &CodeGraph, children: &[Vec<usize>], id: usize) -> TreeNode {
            let n = &g.nodes[id];
            TreeNode {
                kind: n.kind.clone(),
                token: n.token.clone(),
                span: n.span,
                children: children[id].iter().map(|&c| build(g, children, c)).collect(),
            }
        }
        build(g, children, node)
    }
}

/// Reference carried by a leaf, given its parent and position.
fn leaf_reference(parent: &TreeNode, idx: usize) -> Option<DeclKey> {
    let leaf = &parent.children[idx];
    let token = leaf.token.as_deref()?;
    match leaf.kind.as_str() {
        "Identifier" if parent.kind == "MethodInvocation" => {
            let args = parent.children.get(idx + 1)?;
            if args.kind != "ArgumentList" {
                return None;
            }
            Some(DeclKey::Method(token.to_string(), args.children.len()))
        }
        "TypeIdentifier" => Some(DeclKey::Type(token.to_string())),
        _ => None,
    }
}

struct Expander<'i, 'a> {
    index: &'i DeclarationIndex<'a>,
    present: HashSet<DeclId>,
    on_path: Vec<DeclId>,
    cycles: Vec<ResolutionCycle>,
    inlined: usize,
    path: String,
}

impl Expander<'_, '_> {
    fn expand(&mut self, node: &mut TreeNode) {
        let mut i = 0;
        while i < node.children.len() {
            if node.children[i].children.is_empty() {
                if let Some(key) = leaf_reference(node, i) {
                    if let Some(sub) = self.resolve(&key) {
                        node.children.insert(i + 1, sub);
                        // Skip the freshly expanded subtree.
                        i += 2;
                        continue;
                    }
                }
            } else {
                self.expand(&mut node.children[i]);
            }
            i += 1;
        }
    }

    fn resolve(&mut self, key: &DeclKey) -> Option<TreeNode> {
        let candidates = self.index.by_key.get(key)?.clone();
        if candidates.iter().any(|d| self.on_path.contains(d)) {
            self.cycles.push(ResolutionCycle {
                path: self.path.clone(),
                reference: key.describe(),
            });
            return None;
        }
        // Candidates are in corpus order, so the pick is deterministic.
        let decl = candidates.into_iter().find(|d| !self.present.contains(d))?;
        self.present.insert(decl);
        self.on_path.push(decl);
        let mut sub = self.index.subtree(decl);
        self.mark_nested(decl);
        self.expand(&mut sub);
        self.on_path.pop();
        self.inlined += 1;
        Some(sub)
    }

    /// Declarations nested inside an inlined one become present too.
    fn mark_nested(&mut self, decl: DeclId) {
        let (gi, root) = decl;
        let children = &self.index.children[gi];
        let mut stack = vec![root];
        let mut nested = Vec::new();
        while let Some(n) = stack.pop() {
            nested.push((gi, n));
            stack.extend(children[n].iter().copied());
        }
        for d in nested {
            if self.index.all_decls.contains(&d) {
                self.present.insert(d);
            }
        }
    }
}

/// Resolves `corpus[target]` at system level. The corpus must be parsed at
/// file level; flow edges of the result are recomputed over the expanded tree.
pub fn resolve_system_level(corpus: &[CodeGraph], target: usize) -> SystemResolution {
    let index = DeclarationIndex::new(corpus);
    resolve_with_index(&index, target)
}

pub fn resolve_with_index(index: &DeclarationIndex<'_>, target: usize) -> SystemResolution {
    let g = &index.corpus[target];
    let path = g.path.clone();
    let partial = g.partial;
    let Some(mut tree) = TreeNode::from_graph(g) else {
        return SystemResolution {
            graph: g.clone(),
            cycles: Vec::new(),
            inlined: 0,
        };
    };
    // Everything declared in the file itself is already present.
    let present: HashSet<DeclId> = index.all_decls.iter().copied().filter(|d| d.0 == target).collect();
    let mut expander = Expander {
        index,
        present,
        on_path: Vec::new(),
        cycles: Vec::new(),
        inlined: 0,
        path: path.clone(),
    };
    expander.expand(&mut tree);
    let cycles = expander.cycles;
    let inlined = expander.inlined;
    let graph = augment_flow(&tree.into_graph(&path, ParseDepth::System, partial));
    SystemResolution { graph, cycles, inlined }
}

/// Resolves every graph of a file-level corpus.
pub fn resolve_corpus(corpus: &[CodeGraph]) -> Vec<SystemResolution> {
    let index = DeclarationIndex::new(corpus);
    (0..corpus.len()).map(|i| resolve_with_index(&index, i)).collect()
}
