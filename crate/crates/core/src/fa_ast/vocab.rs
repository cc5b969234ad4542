use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::graph::CodeGraph;

/// `(kind, token)` key; non-terminals have no token.
pub type VocabKey = (String, Option<String>);

/// Dense ids for every `(kind, token)` pair in a corpus, assigned in
/// lexicographic key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    ids: BTreeMap<VocabKey, usize>,
}

impl Vocabulary {
    pub fn build<'a>(corpus: impl IntoIterator<Item = &'a CodeGraph>) -> Self {
        let mut keys: BTreeMap<VocabKey, usize> = BTreeMap::new();
        for g in corpus {
            for n in &g.nodes {
                keys.entry((n.kind.clone(), n.token.clone())).or_insert(0);
            }
        }
        for (i, v) in keys.values_mut().enumerate() {
            *v = i;
        }
        Self { ids: keys }
    }

    pub fn size(&self) -> usize {
        self.ids.len()
    }

    pub fn get(&self, kind: &str, token: Option<&str>) -> Option<usize> {
        self.ids.get(&(kind.to_string(), token.map(str::to_string))).copied()
    }

    /// Per-node ids for one graph. Pairs unseen at build time map to `size()`.
    pub fn node_ids(&self, g: &CodeGraph) -> Vec<usize> {
        g.nodes
            .iter()
            .map(|n| self.get(&n.kind, n.token.as_deref()).unwrap_or(self.size()))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VocabKey, usize)> {
        self.ids.iter().map(|(k, v)| (k, *v))
    }
}

/// Convenience wrapper over [`Vocabulary::build`].
pub fn build_vocabulary(corpus: &[CodeGraph]) -> Vocabulary {
    Vocabulary::build(corpus)
}
