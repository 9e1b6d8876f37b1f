use std::collections::HashMap;

use crate::model::{Assembly, Dim, Loc, TileAssemblySystem};

/// Attachment semantics the engine is generic over.
pub trait Rules {
    fn dim(&self) -> Dim;
    fn seed(&self) -> &[(Loc, usize)];
    fn tile_count(&self) -> usize;
    fn tile_name(&self, tile: usize) -> String;
    /// Pushes every tile index that may attach at the empty location `loc`,
    /// in ascending tile order.
    fn legal_tiles(&self, asm: &Assembly, loc: Loc, out: &mut Vec<usize>);

    fn in_bounds(&self, loc: Loc) -> bool {
        match self.dim() {
            Dim::Two => loc.z == 0,
            Dim::Three => (0..=1).contains(&loc.z),
        }
    }
}

/// Standard aTAM rule: total matching glue strength must reach the temperature.
pub struct TasRules<'a> {
    pub system: &'a TileAssemblySystem,
    /// Interned glue id per tile side (0 means null / non-binding).
    sides: Vec<[u32; 6]>,
    strength: Vec<u32>,
    /// (side index, glue id) -> tiles carrying that glue on that side.
    by_side: HashMap<(usize, u32), Vec<usize>>,
}

impl<'a> TasRules<'a> {
    pub fn new(system: &'a TileAssemblySystem) -> TasRules<'a> {
        let mut ids: HashMap<(&str, u32), u32> = HashMap::new();
        let mut strength = vec![0];
        let mut sides = Vec::with_capacity(system.tiles().len());
        let mut by_side: HashMap<(usize, u32), Vec<usize>> = HashMap::new();
        for (ti, t) in system.tiles().iter().enumerate() {
            let mut s = [0u32; 6];
            for &d in system.dim.dirs() {
                let g = t.glue(d);
                if g.is_null() || g.strength == 0 {
                    continue;
                }
                let next = strength.len() as u32;
                let id = *ids.entry((g.label.as_str(), g.strength)).or_insert(next);
                if id == next {
                    strength.push(g.strength);
                }
                s[d.index()] = id;
                by_side.entry((d.index(), id)).or_default().push(ti);
            }
            sides.push(s);
        }
        TasRules { system, sides, strength, by_side }
    }

    pub fn strength_at(&self, asm: &Assembly, loc: Loc, tile: usize) -> u32 {
        let mut total = 0;
        for &d in self.system.dim.dirs() {
            let mine = self.sides[tile][d.index()];
            if mine == 0 {
                continue;
            }
            if let Some(nb) = asm.get(loc.step(d)) {
                if self.sides[nb][d.opposite().index()] == mine {
                    total += self.strength[mine as usize];
                }
            }
        }
        total
    }
}

impl Rules for TasRules<'_> {
    fn dim(&self) -> Dim {
        self.system.dim
    }

    fn seed(&self) -> &[(Loc, usize)] {
        &self.system.seed
    }

    fn tile_count(&self) -> usize {
        self.sides.len()
    }

    fn tile_name(&self, tile: usize) -> String {
        self.system.tiles()[tile].name.clone()
    }

    fn legal_tiles(&self, asm: &Assembly, loc: Loc, out: &mut Vec<usize>) {
        if !self.in_bounds(loc) {
            return;
        }
        let mut acc: Vec<(usize, u32)> = Vec::new();
        for &d in self.system.dim.dirs() {
            let Some(nb) = asm.get(loc.step(d)) else { continue };
            let facing = self.sides[nb][d.opposite().index()];
            if facing == 0 {
                continue;
            }
            if let Some(list) = self.by_side.get(&(d.index(), facing)) {
                for &t in list {
                    acc.push((t, self.strength[facing as usize]));
                }
            }
        }
        acc.sort_unstable();
        let tau = self.system.temperature;
        let mut i = 0;
        while i < acc.len() {
            let t = acc[i].0;
            let mut sum = 0;
            while i < acc.len() && acc[i].0 == t {
                sum += acc[i].1;
                i += 1;
            }
            if sum >= tau {
                out.push(t);
            }
        }
    }
}
