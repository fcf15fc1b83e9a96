//! Interaction level indicators.

use crate::path::Level;

/// Which endpoint of a directed pair an indicator belongs to.
///
/// For the pair `(i, j)`, the donor indicator is drawn from actor `i`'s
/// membership vector and the receiver indicator from actor `j`'s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Donor,
    Receiver,
}

/// Donor and receiver level indicators for every ordered pair `(i, j)`,
/// `i != j`. Values are 1-based levels bounded by the hierarchy depth;
/// diagonal entries are unused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelAssignments {
    n: usize,
    donor: Vec<Level>,
    receiver: Vec<Level>,
}

impl LevelAssignments {
    /// All indicators set to level 1.
    pub fn ones(n: usize) -> Self {
        LevelAssignments {
            n,
            donor: vec![1; n * n],
            receiver: vec![1; n * n],
        }
    }

    pub fn n_actors(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i != j, "diagonal level indicator ({i},{i}) accessed");
        i * self.n + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, dir: crate::levels::Direction) -> Level {
        let idx = self.idx(i, j);
        match dir {
            Direction::Donor => self.donor[idx],
            Direction::Receiver => self.receiver[idx],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, dir: Direction, value: Level) {
        debug_assert!(value >= 1);
        let idx = self.idx(i, j);
        match dir {
            Direction::Donor => self.donor[idx] = value,
            Direction::Receiver => self.receiver[idx] = value,
        }
    }

    #[inline]
    pub fn donor(&self, i: usize, j: usize) -> Level {
        self.donor[self.idx(i, j)]
    }

    #[inline]
    pub fn receiver(&self, i: usize, j: usize) -> Level {
        self.receiver[self.idx(i, j)]
    }

    /// The indicators drawn from actor `a`'s membership vector: donor levels
    /// of pairs `(a, j)` and receiver levels of pairs `(i, a)`.
    pub fn actor_indicators(&self, a: usize) -> impl Iterator<Item = Level> + '_ {
        let n = self.n;
        (0..n)
            .filter(move |&j| j != a)
            .map(move |j| self.donor(a, j))
            .chain((0..n).filter(move |&i| i != a).map(move |i| self.receiver(i, a)))
    }

    /// Number of indicators per actor: `2 (n - 1)`.
    pub fn indicators_per_actor(&self) -> usize {
        2 * (self.n - 1)
    }

    /// Fraction of all indicators equal to `level`.
    pub fn level_fraction(&self, level: Level) -> f64 {
        let total = 2 * self.n * (self.n - 1);
        let count: usize = (0..self.n)
            .map(|a| self.actor_indicators(a).filter(|&z| z == level).count())
            .sum();
        count as f64 / total as f64
    }

    /// Flat row-major off-diagonal sequence of donor levels, for serialization.
    pub fn donor_sequence(&self) -> Vec<Level> {
        self.sequence(Direction::Donor)
    }

    pub fn receiver_sequence(&self) -> Vec<Level> {
        self.sequence(Direction::Receiver)
    }

    fn sequence(&self, dir: Direction) -> Vec<Level> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1));
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    out.push(self.get(i, j, dir));
                }
            }
        }
        out
    }

    /// Rebuilds from flat off-diagonal sequences (inverse of the accessors above).
    pub fn from_sequences(n: usize, donor: &[Level], receiver: &[Level]) -> Option<Self> {
        if donor.len() != n * (n - 1) || receiver.len() != n * (n - 1) {
            return None;
        }
        let mut la = LevelAssignments::ones(n);
        let mut pos = 0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    la.set(i, j, Direction::Donor, donor[pos]);
                    la.set(i, j, Direction::Receiver, receiver[pos]);
                    pos += 1;
                }
            }
        }
        Some(la)
    }
}
