//! Compilers describe the intended terminal assembly cell by cell; the tile
//! set is the set of distinct (glues, color) cell descriptions.

use std::collections::HashMap;

use indexmap::IndexMap;

use crate::model::{Dim, Dir, Glue, Loc, TileAssemblySystem, TileSet, TileType};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    pub glues: [Glue; 6],
    pub color: u16,
    pub group: String,
}

impl Cell {
    pub fn new(group: &str, color: u16) -> Cell {
        Cell { glues: Default::default(), color, group: group.to_string() }
    }
}

#[derive(Debug, Clone)]
pub struct Blueprint {
    pub dim: Dim,
    pub temperature: u32,
    pub palette: Vec<String>,
    cells: IndexMap<Loc, Cell>,
    seed: Option<Loc>,
    extra: Vec<TileType>,
}

impl Blueprint {
    pub fn new(dim: Dim, temperature: u32, palette: Vec<String>) -> Blueprint {
        Blueprint { dim, temperature, palette, cells: IndexMap::new(), seed: None, extra: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, loc: Loc) -> bool {
        self.cells.contains_key(&loc)
    }

    /// Adds a cell; panics if the location is already described, since that
    /// always means two gadgets overlap.
    pub fn put(&mut self, loc: Loc, cell: Cell) {
        let prev = self.cells.insert(loc, cell);
        assert!(prev.is_none(), "blueprint cell {loc} described twice");
    }

    pub fn cell_mut(&mut self, loc: Loc) -> &mut Cell {
        self.cells.get_mut(&loc).unwrap_or_else(|| panic!("no blueprint cell at {loc}"))
    }

    pub fn get(&self, loc: Loc) -> Option<&Cell> {
        self.cells.get(&loc)
    }

    pub fn set_glue(&mut self, loc: Loc, d: Dir, g: Glue) {
        self.cell_mut(loc).glues[d.index()] = g;
    }

    /// Puts the same glue on `loc`'s side `d` and on the neighbor's facing side.
    pub fn link(&mut self, loc: Loc, d: Dir, g: Glue) {
        self.set_glue(loc, d, g.clone());
        self.set_glue(loc.step(d), d.opposite(), g);
    }

    pub fn set_seed(&mut self, loc: Loc) {
        assert!(self.cells.contains_key(&loc), "seed must be a described cell");
        self.seed = Some(loc);
    }

    /// Tiles listed before all harvested ones, under their own names.
    pub fn add_extra(&mut self, t: TileType) {
        self.extra.push(t);
    }

    pub fn cells(&self) -> impl Iterator<Item = (&Loc, &Cell)> {
        self.cells.iter()
    }

    pub fn build(&self) -> TileAssemblySystem {
        let sides = self.dim.sides();
        let mut tiles: Vec<TileType> = self.extra.clone();
        let mut by_key: HashMap<(Vec<Glue>, u16), usize> = HashMap::new();
        for (i, t) in tiles.iter().enumerate() {
            by_key.entry((t.glues.clone(), t.color)).or_insert(i);
        }
        let mut per_group: HashMap<String, usize> = HashMap::new();
        let mut seed_tile = None;
        for (loc, cell) in &self.cells {
            let glues: Vec<Glue> = cell.glues[..sides].to_vec();
            let key = (glues.clone(), cell.color);
            let idx = match by_key.get(&key) {
                Some(&i) => i,
                None => {
                    let n = per_group.entry(cell.group.clone()).or_insert(0);
                    let name = format!("{}{}", cell.group, n);
                    *n += 1;
                    tiles.push(TileType::new(name, cell.color, glues));
                    by_key.insert(key, tiles.len() - 1);
                    tiles.len() - 1
                }
            };
            if Some(*loc) == self.seed {
                seed_tile = Some(idx);
            }
        }
        let seed = self.seed.expect("blueprint has a seed");
        let ts = TileSet { tiles, palette: self.palette.clone() };
        TileAssemblySystem::new(ts, vec![(seed, seed_tile.expect("seed cell"))], self.temperature, self.dim)
            .expect("blueprints build valid systems")
    }
}

pub fn g(label: impl Into<String>, strength: u32) -> Glue {
    Glue::new(label, strength)
}

/// Lays a hard-coded path through `cells` (consecutive cells adjacent),
/// joining them with unique strength-`s` glues named `{ns}:{k}`.
pub fn hard_path(bp: &mut Blueprint, ns: &str, cells: &[Loc], s: u32) {
    for (k, w) in cells.windows(2).enumerate() {
        let d = dir_between(w[0], w[1]);
        bp.link(w[0], d, g(format!("{ns}:{k}"), s));
    }
}

pub fn dir_between(a: Loc, b: Loc) -> Dir {
    for d in Dir::ALL {
        if a.step(d) == b {
            return d;
        }
    }
    panic!("{a} and {b} are not adjacent");
}
