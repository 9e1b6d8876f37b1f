use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use super::Rules;
use crate::model::{Assembly, Loc};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("exploration exceeded its bounds")]
pub struct Overflow;

fn empty_neighbors<R: Rules + ?Sized>(rules: &R, asm: &Assembly) -> Vec<Loc> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &(loc, _) in asm.placements() {
        for &d in rules.dim().probe() {
            let n = loc.step(d);
            if !asm.contains(n) && rules.in_bounds(n) && seen.insert(n) {
                out.push(n);
            }
        }
    }
    out.sort();
    out
}

/// Breadth-first search over all producible assemblies. Returns the terminal
/// ones, sorted by their canonical placement list.
pub fn enumerate_terminal<R: Rules + ?Sized>(
    rules: &R,
    max_assemblies: usize,
    max_size: usize,
) -> Result<Vec<Assembly>, Overflow> {
    let mut start = Assembly::default();
    for &(loc, t) in rules.seed() {
        start.place(loc, t).map_err(|_| Overflow)?;
    }
    let mut visited: HashSet<Vec<(Loc, usize)>> = HashSet::new();
    visited.insert(start.canonical());
    let mut queue = VecDeque::from([start]);
    let mut terminal = Vec::new();
    let mut buf = Vec::new();
    while let Some(asm) = queue.pop_front() {
        if asm.len() > max_size {
            return Err(Overflow);
        }
        let mut any = false;
        for loc in empty_neighbors(rules, &asm) {
            buf.clear();
            rules.legal_tiles(&asm, loc, &mut buf);
            for &t in &buf {
                any = true;
                let mut next = asm.clone();
                next.place(loc, t).expect("location is empty");
                if visited.insert(next.canonical()) {
                    if visited.len() > max_assemblies {
                        return Err(Overflow);
                    }
                    queue.push_back(next);
                }
            }
        }
        if !any {
            terminal.push(asm);
        }
    }
    terminal.sort_by_key(Assembly::canonical);
    Ok(terminal)
}

/// Replays an assembly in insertion order and checks that every non-seed
/// placement was legal when it happened.
pub fn audit_replay<R: Rules + ?Sized>(rules: &R, asm: &Assembly) -> bool {
    let seed = rules.seed().len();
    let mut replay = Assembly::default();
    let mut buf = Vec::new();
    for (i, &(loc, t)) in asm.placements().iter().enumerate() {
        if i >= seed {
            buf.clear();
            rules.legal_tiles(&replay, loc, &mut buf);
            if !buf.contains(&t) {
                return false;
            }
        }
        if replay.place(loc, t).is_err() {
            return false;
        }
    }
    true
}
