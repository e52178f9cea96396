//! Dependency graphs over a tweet's tokens and hop distances between tokens.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::conllu::ConlluSentence;
use crate::normalize::Token;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GraphSource {
    Supplied,
    TokenWindowFallback,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    n: usize,
    /// Parse words with no matching token; node ids `n..n + hidden`.
    hidden: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    source: GraphSource,
}

impl DependencyGraph {
    /// Undirected graph on `n` nodes. Pairs are stored as `(min, max)`.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        source: GraphSource,
    ) -> Result<Self, Error> {
        Self::with_hidden(n, 0, edges, source)
    }

    fn with_hidden(
        n: usize,
        hidden: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        source: GraphSource,
    ) -> Result<Self, Error> {
        let total = n + hidden;
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= total || b >= total {
                return Err(Error::Contract(format!("edge ({a}, {b}) outside {total} nodes")));
            }
            if a == b {
                return Err(Error::Contract(format!("self-loop on node {a}")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut adjacency = vec![Vec::new(); total];
        for &(a, b) in &set {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        Ok(Self {
            n,
            hidden,
            edges: set,
            adjacency,
            source,
        })
    }

    /// Chain linking each token to its immediate neighbours, so graph
    /// distance equals token distance.
    pub fn token_window(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i)), GraphSource::TokenWindowFallback)
            .expect("window edges are in range")
    }

    /// Build a graph over `tokens` from a supplied parse. Parse words are
    /// matched to tokens in order by surface form. Unmatched parse words stay
    /// in the graph as hidden nodes so paths through them keep their length;
    /// tokens the parse does not cover are chained to their left neighbour.
    pub fn from_parse(sentence: &ConlluSentence, tokens: &[Token]) -> Self {
        let n = tokens.len();
        let mut node_of_word = vec![usize::MAX; sentence.words.len()];
        let mut covered = vec![false; n];
        for (w, t) in align(sentence, tokens) {
            node_of_word[w] = t;
            covered[t] = true;
        }
        let mut hidden = 0;
        for node in node_of_word.iter_mut().filter(|v| **v == usize::MAX) {
            *node = n + hidden;
            hidden += 1;
        }
        let mut edges = Vec::new();
        for (w, word) in sentence.words.iter().enumerate() {
            if let Some(h) = word.head.filter(|&h| h < sentence.words.len() && h != w) {
                edges.push((node_of_word[w], node_of_word[h]));
            }
        }
        for t in (0..n).filter(|&t| !covered[t]) {
            match t {
                0 if n > 1 => edges.push((0, 1)),
                0 => {}
                _ => edges.push((t - 1, t)),
            }
        }
        Self::with_hidden(n, hidden, edges, GraphSource::Supplied)
            .expect("aligned edges are in range")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn source(&self) -> GraphSource {
        self.source
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Hop counts from `from` to every node; `None` where unreachable.
    pub fn distances_from(&self, from: usize) -> Result<Vec<Option<usize>>, Error> {
        if from >= self.n {
            return Err(Error::Contract(format!("node {from} outside {} nodes", self.n)));
        }
        let mut dist = vec![None; self.n + self.hidden];
        dist[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued nodes have a distance");
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist.truncate(self.n);
        Ok(dist)
    }
}

/// Shortest undirected path length between two tokens; `Ok(None)` when they
/// are not connected.
pub fn graph_distance(g: &DependencyGraph, i: usize, j: usize) -> Result<Option<usize>, Error> {
    if j >= g.n {
        return Err(Error::Contract(format!("node {j} outside {} nodes", g.n)));
    }
    Ok(g.distances_from(i)?[j])
}

/// Pairs `(word index, token index)`, monotone in both.
fn align(sentence: &ConlluSentence, tokens: &[Token]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut cursor = 0;
    for (w, word) in sentence.words.iter().enumerate() {
        if let Some(off) = tokens[cursor.min(tokens.len())..]
            .iter()
            .position(|t| t.surface == word.form)
        {
            out.push((w, cursor + off));
            cursor += off + 1;
        }
    }
    out
}
