//! Seed queue and energy schedule.
//!
//! A seed's energy starts at `1 + |coverage_new|` and halves on every pick,
//! never dropping below 1. A seed picked at energy 1 is exhausted and sits
//! out until every seed is exhausted, at which point all of them recharge.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::js::Ast;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedSource {
    Poc,
    Mutant,
}

#[derive(Debug, Clone)]
pub struct Seed {
    pub id: String,
    pub source: SeedSource,
    pub text: String,
    pub ast: Arc<Ast>,
    pub parent: Option<String>,
    pub coverage_new: BTreeSet<u32>,
    pub energy: u64,
    pub picks: u64,
    exhausted: bool,
}

impl Seed {
    pub fn new(id: &str, source: SeedSource, text: String, ast: Ast, parent: Option<String>, coverage_new: BTreeSet<u32>) -> Seed {
        let mut s = Seed {
            id: id.to_string(),
            source,
            text,
            ast: Arc::new(ast),
            parent,
            coverage_new,
            energy: 0,
            picks: 0,
            exhausted: false,
        };
        s.recharge();
        s
    }

    pub fn base_energy(&self) -> u64 {
        1 + self.coverage_new.len() as u64
    }

    fn recharge(&mut self) {
        self.energy = self.base_energy();
        self.exhausted = false;
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }
}

#[derive(Debug, Clone, Default)]
pub struct Queue {
    seeds: Vec<Seed>,
}

impl Queue {
    pub fn new() -> Self {
        Queue::default()
    }

    pub fn push(&mut self, seed: Seed) {
        self.seeds.push(seed);
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.seeds
    }

    pub fn get(&self, i: usize) -> &Seed {
        &self.seeds[i]
    }

    /// Draws a seed index proportionally to energy among non-exhausted seeds
    /// and charges the pick. None only for an empty queue.
    pub fn schedule_next<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<usize> {
        if self.seeds.is_empty() {
            return None;
        }
        if self.seeds.iter().all(Seed::is_exhausted) {
            self.seeds.iter_mut().for_each(Seed::recharge);
        }
        let total: u64 = self.seeds.iter().filter(|s| !s.exhausted).map(|s| s.energy).sum();
        let mut ticket = rng.gen_range(0..total);
        let i = self
            .seeds
            .iter()
            .position(|s| {
                if s.exhausted {
                    return false;
                }
                if ticket < s.energy {
                    return true;
                }
                ticket -= s.energy;
                false
            })
            .expect("ticket within total energy");
        let s = &mut self.seeds[i];
        s.picks += 1;
        if s.energy == 1 {
            s.exhausted = true;
        }
        s.energy = (s.energy / 2).max(1);
        Some(i)
    }
}
