//! Tiles, glues, assemblies and the attachment rule.

mod codec;

pub use codec::{parse_system, serialize_system, CodecError};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// The eight named colors used by the default palette, in id order.
pub const DEFAULT_PALETTE: [&str; 8] = [
    "White", "Black", "Red", "Green", "Aqua", "Blue", "Yellow", "Fuchsia",
];

pub fn default_palette() -> Vec<String> {
    DEFAULT_PALETTE.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("location {0} is already occupied")]
    OccupiedLocation(Loc),
    #[error("invalid system: {0}")]
    Invalid(String),
}

/// Side of a tile. `U`/`D` only exist in two-plane 3D systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    N = 0,
    E = 1,
    S = 2,
    W = 3,
    U = 4,
    D = 5,
}

impl Dir {
    pub const ALL: [Dir; 6] = [Dir::N, Dir::E, Dir::S, Dir::W, Dir::U, Dir::D];
    pub const PLANAR: [Dir; 4] = [Dir::N, Dir::E, Dir::S, Dir::W];
    /// Order in which neighbors of a fresh tile are probed for the frontier.
    pub const PROBE: [Dir; 6] = [Dir::E, Dir::W, Dir::N, Dir::S, Dir::U, Dir::D];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::N => Dir::S,
            Dir::S => Dir::N,
            Dir::E => Dir::W,
            Dir::W => Dir::E,
            Dir::U => Dir::D,
            Dir::D => Dir::U,
        }
    }

    pub fn offset(self) -> (i32, i32, i32) {
        match self {
            Dir::N => (0, 1, 0),
            Dir::E => (1, 0, 0),
            Dir::S => (0, -1, 0),
            Dir::W => (-1, 0, 0),
            Dir::U => (0, 0, 1),
            Dir::D => (0, 0, -1),
        }
    }

    pub fn letter(self) -> &'static str {
        ["N", "E", "S", "W", "U", "D"][self.index()]
    }

    pub fn from_letter(s: &str) -> Option<Dir> {
        Dir::ALL.iter().copied().find(|d| d.letter() == s)
    }

    /// Quarter turn counterclockwise in the plane.
    pub fn left(self) -> Dir {
        match self {
            Dir::N => Dir::W,
            Dir::W => Dir::S,
            Dir::S => Dir::E,
            Dir::E => Dir::N,
            d => d,
        }
    }

    pub fn right(self) -> Dir {
        self.left().opposite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn sides(self) -> usize {
        match self {
            Dim::Two => 4,
            Dim::Three => 6,
        }
    }

    pub fn dirs(self) -> &'static [Dir] {
        &Dir::ALL[..self.sides()]
    }

    pub fn probe(self) -> &'static [Dir] {
        &Dir::PROBE[..self.sides()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Loc {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Loc {
    pub const fn new(x: i32, y: i32) -> Loc {
        Loc { x, y, z: 0 }
    }

    pub const fn new3(x: i32, y: i32, z: i32) -> Loc {
        Loc { x, y, z }
    }

    pub fn step(self, d: Dir) -> Loc {
        let (dx, dy, dz) = d.offset();
        Loc { x: self.x + dx, y: self.y + dy, z: self.z + dz }
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Glue {
    pub label: String,
    pub strength: u32,
}

impl Glue {
    pub fn null() -> Glue {
        Glue::default()
    }

    pub fn new(label: impl Into<String>, strength: u32) -> Glue {
        let label = label.into();
        if label.is_empty() {
            return Glue::null();
        }
        Glue { label, strength }
    }

    pub fn is_null(&self) -> bool {
        self.label.is_empty()
    }
}

/// Binding strength between two abutting glues.
pub fn glue_binds(a: &Glue, b: &Glue) -> u32 {
    if a.strength > 0 && !a.is_null() && a == b {
        a.strength
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TileType {
    pub name: String,
    pub color: u16,
    /// Indexed by `Dir::index`; length 4 in 2D and 6 in 3D.
    pub glues: Vec<Glue>,
}

impl TileType {
    pub fn new(name: impl Into<String>, color: u16, glues: Vec<Glue>) -> TileType {
        TileType { name: name.into(), color, glues }
    }

    pub fn glue(&self, d: Dir) -> &Glue {
        static NULL: Glue = Glue { label: String::new(), strength: 0 };
        self.glues.get(d.index()).unwrap_or(&NULL)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileSet {
    pub tiles: Vec<TileType>,
    pub palette: Vec<String>,
}

impl TileSet {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.tiles.iter().position(|t| t.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileAssemblySystem {
    pub tileset: TileSet,
    /// Seed placements as (location, tile index).
    pub seed: Vec<(Loc, usize)>,
    pub temperature: u32,
    pub dim: Dim,
}

impl TileAssemblySystem {
    /// Builds a system, clamping glue strengths above the temperature and
    /// checking structural invariants.
    pub fn new(
        mut tileset: TileSet,
        seed: Vec<(Loc, usize)>,
        temperature: u32,
        dim: Dim,
    ) -> Result<TileAssemblySystem, ModelError> {
        if temperature == 0 {
            return Err(ModelError::Invalid("temperature must be positive".into()));
        }
        let mut names = std::collections::HashSet::new();
        for t in &mut tileset.tiles {
            if !names.insert(t.name.clone()) {
                return Err(ModelError::Invalid(format!("duplicate tile name {}", t.name)));
            }
            if t.glues.len() != dim.sides() {
                return Err(ModelError::Invalid(format!(
                    "tile {} has {} glues, expected {}",
                    t.name,
                    t.glues.len(),
                    dim.sides()
                )));
            }
            if usize::from(t.color) >= tileset.palette.len() {
                return Err(ModelError::Invalid(format!("tile {} color out of palette", t.name)));
            }
            for g in &mut t.glues {
                if g.is_null() && g.strength != 0 {
                    return Err(ModelError::Invalid(format!(
                        "tile {} has an unlabeled glue with nonzero strength",
                        t.name
                    )));
                }
                if g.label.chars().any(|c| c.is_whitespace() || c == '|') || g.label == "-" {
                    return Err(ModelError::Invalid(format!("bad glue label {:?}", g.label)));
                }
                g.strength = g.strength.min(temperature);
            }
        }
        if seed.is_empty() {
            return Err(ModelError::Invalid("seed is empty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &(loc, t) in &seed {
            if t >= tileset.tiles.len() {
                return Err(ModelError::Invalid("seed tile index out of range".into()));
            }
            match dim {
                Dim::Two if loc.z != 0 => {
                    return Err(ModelError::Invalid("2D system has a seed tile off the z=0 plane".into()))
                }
                Dim::Three if !(0..=1).contains(&loc.z) => {
                    return Err(ModelError::Invalid("3D seed z must be 0 or 1".into()))
                }
                _ => {}
            }
            if !seen.insert(loc) {
                return Err(ModelError::Invalid(format!("seed location {loc} used twice")));
            }
        }
        Ok(TileAssemblySystem { tileset, seed, temperature, dim })
    }

    pub fn tiles(&self) -> &[TileType] {
        &self.tileset.tiles
    }

    pub fn seed_assembly(&self) -> Assembly {
        let mut a = Assembly::default();
        for &(loc, t) in &self.seed {
            a.place(loc, t).expect("seed locations are distinct");
        }
        a
    }
}

/// Partial placement of tiles on the lattice, remembering insertion order.
#[derive(Debug, Clone, Default)]
pub struct Assembly {
    cells: HashMap<Loc, usize>,
    order: Vec<(Loc, usize)>,
    min: Option<Loc>,
    max: Option<Loc>,
}

impl Assembly {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn get(&self, loc: Loc) -> Option<usize> {
        self.cells.get(&loc).copied()
    }

    pub fn contains(&self, loc: Loc) -> bool {
        self.cells.contains_key(&loc)
    }

    pub fn place(&mut self, loc: Loc, tile: usize) -> Result<(), ModelError> {
        if self.cells.contains_key(&loc) {
            return Err(ModelError::OccupiedLocation(loc));
        }
        self.cells.insert(loc, tile);
        self.order.push((loc, tile));
        let (lo, hi) = match (self.min, self.max) {
            (Some(lo), Some(hi)) => (
                Loc::new3(lo.x.min(loc.x), lo.y.min(loc.y), lo.z.min(loc.z)),
                Loc::new3(hi.x.max(loc.x), hi.y.max(loc.y), hi.z.max(loc.z)),
            ),
            _ => (loc, loc),
        };
        self.min = Some(lo);
        self.max = Some(hi);
        Ok(())
    }

    /// Placements in insertion order.
    pub fn placements(&self) -> &[(Loc, usize)] {
        &self.order
    }

    /// Inclusive bounding box, `None` for an empty assembly.
    pub fn bounds(&self) -> Option<(Loc, Loc)> {
        Some((self.min?, self.max?))
    }

    /// Sorted placement list, usable as a canonical key.
    pub fn canonical(&self) -> Vec<(Loc, usize)> {
        let mut v = self.order.clone();
        v.sort();
        v
    }
}

/// Total binding strength `tile` would have at `loc` given the current assembly.
pub fn attachment_strength(
    system: &TileAssemblySystem,
    asm: &Assembly,
    loc: Loc,
    tile: &TileType,
) -> Result<u32, ModelError> {
    if asm.contains(loc) {
        return Err(ModelError::OccupiedLocation(loc));
    }
    let mut total = 0;
    for &d in system.dim.dirs() {
        if let Some(nb) = asm.get(loc.step(d)) {
            let other = &system.tileset.tiles[nb];
            total += glue_binds(tile.glue(d), other.glue(d.opposite()));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(l: &str, s: u32) -> Glue {
        Glue::new(l, s)
    }

    #[test]
    fn binds_only_on_exact_match() {
        assert_eq!(glue_binds(&g("a", 2), &g("a", 2)), 2);
        assert_eq!(glue_binds(&g("a", 2), &g("a", 1)), 0);
        assert_eq!(glue_binds(&Glue::null(), &Glue::null()), 0);
        assert_eq!(glue_binds(&g("a", 0), &g("a", 0)), 0);
    }

    fn two_d(tiles: Vec<TileType>, t: u32) -> TileAssemblySystem {
        let ts = TileSet { tiles, palette: default_palette() };
        TileAssemblySystem::new(ts, vec![(Loc::new(0, 0), 0)], t, Dim::Two).unwrap()
    }

    #[test]
    fn cooperative_strength() {
        let n = Glue::null();
        let a = TileType::new("a", 0, vec![g("x", 1), g("y", 1), n.clone(), n.clone()]);
        let b = TileType::new("b", 0, vec![n.clone(), n.clone(), n.clone(), g("y", 1)]);
        let c = TileType::new("c", 0, vec![n.clone(), n.clone(), g("x", 1), g("y", 1)]);
        let sys = two_d(vec![a, b, c.clone()], 2);
        let mut asm = sys.seed_assembly();
        asm.place(Loc::new(1, 0), 1).unwrap();
        asm.place(Loc::new(0, 1), 0).unwrap();
        // (1,1): south neighbor b has null N, west neighbor a has E "y".
        assert_eq!(attachment_strength(&sys, &asm, Loc::new(1, 1), &c).unwrap(), 1);
        assert!(matches!(
            attachment_strength(&sys, &asm, Loc::new(0, 0), &c),
            Err(ModelError::OccupiedLocation(_))
        ));
    }

    #[test]
    fn strengths_clamped_to_temperature() {
        let n = Glue::null();
        let a = TileType::new("a", 0, vec![g("x", 5), n.clone(), n.clone(), n.clone()]);
        let sys = two_d(vec![a], 2);
        assert_eq!(sys.tiles()[0].glues[0].strength, 2);
    }

    #[test]
    fn rejects_duplicate_names() {
        let n = Glue::null();
        let a = TileType::new("a", 0, vec![n.clone(); 4]);
        let ts = TileSet { tiles: vec![a.clone(), a], palette: default_palette() };
        assert!(TileAssemblySystem::new(ts, vec![(Loc::new(0, 0), 0)], 1, Dim::Two).is_err());
    }
}
