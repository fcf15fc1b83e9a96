//! Directed binary networks.

use crate::error::{HmmsbError, Result};

/// A directed binary network on `n` actors without self-edges.
///
/// Storage is a dense row-major adjacency; diagonal entries do not exist as
/// far as the API is concerned and read access to them panics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedNetwork {
    n: usize,
    adj: Vec<bool>,
    /// Optional display labels, index-aligned with actors.
    labels: Option<Vec<String>>,
}

impl DirectedNetwork {
    /// Empty network on `n >= 1` actors.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(HmmsbError::Config(
                "a network needs at least one actor".to_string(),
            ));
        }
        if n > u16::MAX as usize {
            return Err(HmmsbError::Config(format!(
                "at most {} actors are supported, got {n}",
                u16::MAX
            )));
        }
        Ok(DirectedNetwork {
            n,
            adj: vec![false; n * n],
            labels: None,
        })
    }

    pub fn n_actors(&self) -> usize {
        self.n
    }

    pub fn edge(&self, i: usize, j: usize) -> bool {
        assert!(i != j, "self-edge ({i},{i}) queried; the diagonal is excluded from the model");
        self.adj[i * self.n + j]
    }

    pub fn set_edge(&mut self, i: usize, j: usize, value: bool) {
        assert!(i != j, "self-edge ({i},{i}) written; the diagonal is excluded from the model");
        self.adj[i * self.n + j] = value;
    }

    /// All ordered pairs `(i, j)` with `i != j`, lexicographic.
    pub fn ordered_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (0..n).filter_map(move |j| (i != j).then_some((i, j))))
    }

    pub fn edge_count(&self) -> usize {
        self.ordered_pairs().filter(|&(i, j)| self.edge(i, j)).count()
    }

    /// Fraction of the `n(n-1)` ordered pairs carrying an edge.
    pub fn density(&self) -> f64 {
        self.edge_count() as f64 / (self.n * (self.n - 1)) as f64
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.n {
            return Err(HmmsbError::Config(format!(
                "{} labels supplied for {} actors",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(())
    }

    /// Induced subgraph on `actors` (order defines the new indexing).
    pub fn induced_subgraph(&self, actors: &[usize]) -> Result<Self> {
        let mut sub = DirectedNetwork::new(actors.len())?;
        for (a, &i) in actors.iter().enumerate() {
            for (b, &j) in actors.iter().enumerate() {
                if a != b {
                    sub.set_edge(a, b, self.edge(i, j));
                }
            }
        }
        if let Some(labels) = &self.labels {
            sub.labels = Some(actors.iter().map(|&i| labels[i].clone()).collect());
        }
        Ok(sub)
    }
}
