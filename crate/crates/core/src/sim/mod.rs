//! Assembly engine: FIFO frontier, deterministic and seeded-random attachment,
//! bounded runs and exhaustive exploration of tiny systems.

mod explore;
mod rules;

pub use explore::{audit_replay, enumerate_terminal, Overflow};
pub use rules::{Rules, TasRules};

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Assembly, Dim, Loc};

/// Default ceiling on `run`'s step argument.
pub const DEFAULT_STEP_CAP: u64 = 1 << 32;

static STEP_CAP: AtomicU64 = AtomicU64::new(DEFAULT_STEP_CAP);

pub fn set_step_cap(cap: u64) {
    STEP_CAP.store(cap, Ordering::Relaxed);
}

pub fn step_cap() -> u64 {
    STEP_CAP.load(Ordering::Relaxed)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("requested {requested} steps, the hard cap is {cap}")]
    StepBudgetOverflow { requested: u64, cap: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    PaperOrder,
    UniformRandom(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Placed { loc: Loc, tile: usize },
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOutcome {
    pub terminal: bool,
    pub steps: u64,
}

pub struct SimState<'r, R: Rules + ?Sized> {
    rules: &'r R,
    pub asm: Assembly,
    fifo: VecDeque<Loc>,
    /// Frontier membership together with the currently legal tiles.
    live: IndexMap<Loc, Vec<usize>>,
    pub steps: u64,
    rng: Option<(u64, ChaCha8Rng)>,
    scratch: Vec<usize>,
}

impl<'r, R: Rules + ?Sized> SimState<'r, R> {
    pub fn new(rules: &'r R) -> Self {
        let mut s = SimState {
            rules,
            asm: Assembly::default(),
            fifo: VecDeque::new(),
            live: IndexMap::new(),
            steps: 0,
            rng: None,
            scratch: Vec::new(),
        };
        for &(loc, t) in rules.seed() {
            s.asm.place(loc, t).expect("seed locations are distinct");
        }
        let seeds: Vec<Loc> = rules.seed().iter().map(|&(l, _)| l).collect();
        for loc in seeds {
            s.update_frontier(loc);
        }
        s
    }

    pub fn rules(&self) -> &'r R {
        self.rules
    }

    /// Frontier locations in FIFO order.
    pub fn frontier(&self) -> Vec<Loc> {
        let mut seen = std::collections::HashSet::new();
        self.fifo
            .iter()
            .copied()
            .filter(|l| self.live.contains_key(l) && seen.insert(*l))
            .collect()
    }

    pub fn frontier_len(&self) -> usize {
        self.live.len()
    }

    fn legal(&mut self, loc: Loc) -> Vec<usize> {
        self.scratch.clear();
        let mut out = std::mem::take(&mut self.scratch);
        self.rules.legal_tiles(&self.asm, loc, &mut out);
        let v = out.clone();
        self.scratch = out;
        v
    }

    /// Refreshes frontier entries around a just-placed (or seed) location.
    pub fn update_frontier(&mut self, loc: Loc) {
        self.live.shift_remove(&loc);
        let dim: Dim = self.rules.dim();
        for &d in dim.probe() {
            let n = loc.step(d);
            if self.asm.contains(n) || !self.rules.in_bounds(n) {
                continue;
            }
            let legal = self.legal(n);
            if let Some(entry) = self.live.get_mut(&n) {
                *entry = legal;
            } else if !legal.is_empty() {
                self.live.insert(n, legal);
                self.fifo.push_back(n);
            }
        }
    }

    fn place(&mut self, loc: Loc, tile: usize) {
        self.asm.place(loc, tile).expect("frontier locations are empty");
        self.steps += 1;
        self.update_frontier(loc);
    }

    pub fn add_tile(&mut self, policy: Policy) -> Step {
        match policy {
            Policy::PaperOrder => {
                while let Some(loc) = self.fifo.pop_front() {
                    if !self.live.contains_key(&loc) {
                        continue;
                    }
                    let legal = self.legal(loc);
                    match legal.first() {
                        Some(&t) => {
                            self.place(loc, t);
                            return Step::Placed { loc, tile: t };
                        }
                        None => {
                            self.live.shift_remove(&loc);
                        }
                    }
                }
                Step::Exhausted
            }
            Policy::UniformRandom(seed) => {
                if self.rng.as_ref().map(|r| r.0) != Some(seed) {
                    self.rng = Some((seed, ChaCha8Rng::seed_from_u64(seed)));
                }
                let total: usize = self.live.values().map(Vec::len).sum();
                if total == 0 {
                    return Step::Exhausted;
                }
                let rng = &mut self.rng.as_mut().expect("initialized above").1;
                let mut pick = rng.gen_range(0..total);
                let mut chosen = None;
                for (loc, tiles) in &self.live {
                    if pick < tiles.len() {
                        chosen = Some((*loc, tiles[pick]));
                        break;
                    }
                    pick -= tiles.len();
                }
                let (loc, tile) = chosen.expect("pick is below the total");
                self.place(loc, tile);
                Step::Placed { loc, tile }
            }
        }
    }

    /// Adds tiles until none fit or `max_steps` have been taken by this call.
    pub fn run(&mut self, max_steps: u64, policy: Policy) -> Result<RunOutcome, SimError> {
        let cap = step_cap();
        if max_steps > cap {
            return Err(SimError::StepBudgetOverflow { requested: max_steps, cap });
        }
        let mut taken = 0;
        while taken < max_steps {
            match self.add_tile(policy) {
                Step::Placed { .. } => taken += 1,
                Step::Exhausted => return Ok(RunOutcome { terminal: true, steps: self.steps }),
            }
        }
        let terminal = self.frontier_is_dead();
        Ok(RunOutcome { terminal, steps: self.steps })
    }

    fn frontier_is_dead(&self) -> bool {
        self.live.values().all(Vec::is_empty)
    }

    /// One `STEP n x y [z] name` line per non-seed placement.
    pub fn trace(&self) -> String {
        let skip = self.rules.seed().len();
        let mut out = String::new();
        for (i, &(loc, t)) in self.asm.placements().iter().skip(skip).enumerate() {
            let name = self.rules.tile_name(t);
            match self.rules.dim() {
                Dim::Two => out.push_str(&format!("STEP {} {} {} {}\n", i + 1, loc.x, loc.y, name)),
                Dim::Three => {
                    out.push_str(&format!("STEP {} {} {} {} {}\n", i + 1, loc.x, loc.y, loc.z, name))
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_palette, Glue, TileAssemblySystem, TileSet, TileType};

    fn sys(tiles: Vec<TileType>, tau: u32) -> TileAssemblySystem {
        let ts = TileSet { tiles, palette: default_palette() };
        TileAssemblySystem::new(ts, vec![(Loc::new(0, 0), 0)], tau, Dim::Two).unwrap()
    }

    fn t(name: &str, g: [(&str, u32); 4]) -> TileType {
        TileType::new(name, 0, g.iter().map(|(l, s)| Glue::new(*l, *s)).collect())
    }

    #[test]
    fn null_tile_is_terminal_immediately() {
        let s = sys(vec![t("a", [("", 0); 4])], 1);
        let r = TasRules::new(&s);
        let mut st = SimState::new(&r);
        assert!(st.frontier().is_empty());
        assert_eq!(st.run(10, Policy::PaperOrder).unwrap(), RunOutcome { terminal: true, steps: 0 });
    }

    #[test]
    fn east_west_frontier_order() {
        let s = sys(vec![t("a", [("", 0), ("x", 1), ("", 0), ("x", 1)])], 1);
        let r = TasRules::new(&s);
        let st = SimState::new(&r);
        assert_eq!(st.frontier(), vec![Loc::new(1, 0), Loc::new(-1, 0)]);
    }

    #[test]
    fn unbounded_growth_stops_at_budget() {
        let s = sys(vec![t("a", [("x", 1); 4])], 1);
        let r = TasRules::new(&s);
        let mut st = SimState::new(&r);
        let out = st.run(100, Policy::PaperOrder).unwrap();
        assert_eq!(out, RunOutcome { terminal: false, steps: 100 });
        assert_eq!(st.asm.len(), 101);
    }

    #[test]
    fn random_runs_reproduce() {
        let s = sys(vec![t("a", [("x", 1); 4])], 1);
        let r = TasRules::new(&s);
        let mut a = SimState::new(&r);
        let mut b = SimState::new(&r);
        a.run(200, Policy::UniformRandom(7)).unwrap();
        b.run(200, Policy::UniformRandom(7)).unwrap();
        assert_eq!(a.trace(), b.trace());
    }

    #[test]
    fn budget_cap_enforced() {
        let s = sys(vec![t("a", [("", 0); 4])], 1);
        let r = TasRules::new(&s);
        let mut st = SimState::new(&r);
        assert!(matches!(
            st.run(u64::MAX, Policy::PaperOrder),
            Err(SimError::StepBudgetOverflow { .. })
        ));
    }

    #[test]
    fn corner_cell_enters_frontier_once() {
        // Seed at origin, tiles east and north each expose strength 1 toward (1,1).
        let seed = t("seed", [("n", 2), ("e", 2), ("", 0), ("", 0)]);
        let east = t("east", [("c1", 1), ("", 0), ("", 0), ("e", 2)]);
        let north = t("north", [("", 0), ("c2", 1), ("n", 2), ("", 0)]);
        let corner = t("corner", [("", 0), ("", 0), ("c1", 1), ("c2", 1)]);
        let s = sys(vec![seed, east, north, corner], 2);
        let r = TasRules::new(&s);
        let mut st = SimState::new(&r);
        assert_eq!(st.frontier(), vec![Loc::new(1, 0), Loc::new(0, 1)]);
        st.add_tile(Policy::PaperOrder);
        assert_eq!(st.frontier(), vec![Loc::new(0, 1)]);
        st.add_tile(Policy::PaperOrder);
        assert_eq!(st.frontier(), vec![Loc::new(1, 1)]);
        assert!(st.run(10, Policy::PaperOrder).unwrap().terminal);
        assert_eq!(st.asm.len(), 4);
    }
}
