//! Reproducible random star expressions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chart::DEFAULT_CAP;
use crate::syntax::{Action, StarExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    /// Upper bound on the height of generated syntax trees.
    pub max_depth: usize,
    /// Number of actions, taken from `a`, `b`, `c`, ...
    pub alphabet_size: usize,
    pub vertex_cap: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: 42,
            count: 200,
            max_depth: 5,
            alphabet_size: 3,
            vertex_cap: DEFAULT_CAP,
        }
    }
}

impl CorpusConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.count == 0 {
            return Err("count must be at least 1".into());
        }
        if self.max_depth == 0 {
            return Err("max depth must be at least 1".into());
        }
        if !(1..=26).contains(&self.alphabet_size) {
            return Err("alphabet size must be between 1 and 26".into());
        }
        Ok(())
    }

    /// The `index`-th expression of the corpus. Each index draws from its
    /// own stream, so the result does not depend on `count`.
    pub fn expr(&self, index: usize) -> StarExpr {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        self.generate(&mut rng, self.max_depth)
    }

    pub fn exprs(&self) -> impl Iterator<Item = StarExpr> + '_ {
        (0..self.count).map(|i| self.expr(i))
    }

    fn action(&self, rng: &mut ChaCha8Rng) -> StarExpr {
        let c = (b'a' + rng.gen_range(0..self.alphabet_size) as u8) as char;
        StarExpr::Act(Action::new(c.to_string()).expect("letters are actions"))
    }

    // Leaves are weighted Act 2 : One 1 : Zero 1.
    fn leaf(&self, rng: &mut ChaCha8Rng) -> StarExpr {
        match rng.gen_range(0..4) {
            0 => StarExpr::Zero,
            1 => StarExpr::One,
            _ => self.action(rng),
        }
    }

    fn generate(&self, rng: &mut ChaCha8Rng, depth: usize) -> StarExpr {
        if depth <= 1 {
            return self.leaf(rng);
        }
        match rng.gen_range(0..6) {
            0 => StarExpr::Zero,
            1 => StarExpr::One,
            2 => self.action(rng),
            3 => StarExpr::plus(self.generate(rng, depth - 1), self.generate(rng, depth - 1)),
            4 => StarExpr::dot(self.generate(rng, depth - 1), self.generate(rng, depth - 1)),
            _ => StarExpr::star(self.generate(rng, depth - 1)),
        }
    }
}

/// Height of the syntax tree; leaves have depth 1.
pub fn depth(e: &StarExpr) -> usize {
    match e {
        StarExpr::Zero | StarExpr::One | StarExpr::Act(_) => 1,
        StarExpr::Plus(l, r) | StarExpr::Dot(l, r) => 1 + depth(l).max(depth(r)),
        StarExpr::Star(b) => 1 + depth(b),
    }
}
