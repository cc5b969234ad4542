use crate::fa_ast::CodeGraph;

/// Directed multigraph over dense node ids `0..n`.
///
/// `out[v]` lists one entry per edge (parallel edges repeat); `inc` is the
/// reverse index and always holds the same multiset of edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            out: vec![Vec::new(); n],
            inc: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Undirected convenience: adds both directions of every pair.
    pub fn from_undirected(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
            g.add_edge(v, u);
        }
        g
    }

    pub fn from_code_graph(cg: &CodeGraph) -> Self {
        Self::from_edges(cg.node_count(), cg.edges.iter().map(|e| (e.src, e.dst)))
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "edge ({u}, {v}) out of range for {} nodes", self.n);
        self.out[u].push(v);
        self.inc[v].push(u);
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Edge count including parallel edges.
    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out.iter().enumerate().flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    /// Sorted, deduplicated out-neighbors without self-loops.
    pub fn simple_out(&self) -> Vec<Vec<usize>> {
        self.out
            .iter()
            .enumerate()
            .map(|(u, vs)| {
                let mut s: Vec<usize> = vs.iter().copied().filter(|&v| v != u).collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect()
    }

    /// Reverse of [`Digraph::simple_out`].
    pub fn simple_in(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (u, vs) in self.simple_out().into_iter().enumerate() {
            for v in vs {
                inc[v].push(u);
            }
        }
        inc
    }

    /// Sorted neighbor sets of the undirected simple projection.
    pub fn undirected(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (u, v) in self.edges() {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    pub fn simple_edge_count(&self) -> usize {
        self.simple_out().iter().map(Vec::len).sum()
    }

    pub fn undirected_edge_count(&self) -> usize {
        self.undirected().iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Relabels nodes: node `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Digraph {
        assert_eq!(perm.len(), self.n);
        Digraph::from_edges(self.n, self.edges().map(|(u, v)| (perm[u], perm[v])))
    }

    pub fn is_consistent(&self) -> bool {
        let mut fwd: Vec<(usize, usize)> = self.edges().collect();
        let mut rev: Vec<(usize, usize)> = self
            .inc
            .iter()
            .enumerate()
            .flat_map(|(v, us)| us.iter().map(move |&u| (u, v)))
            .collect();
        fwd.sort_unstable();
        rev.sort_unstable();
        fwd == rev
    }
}
