//! Strength-free systems: tiles whose attachment is decided by a cooperation
//! set instead of glue strengths, plus their naive enumeration.

use num_bigint::BigUint;
use num_traits::Zero;

use super::coop::{coop_sets, eval, NUM_COOP_SETS, SIDE_E, SIDE_N, SIDE_S, SIDE_W};
use super::Universe;
use crate::model::{Assembly, Dim, Dir, Loc};
use crate::sim::Rules;

/// One tile type: N, E, S, W labels (0 is null), color and cooperation set id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SfTile {
    pub labels: [u32; 4],
    pub color: u32,
    pub coop: u32,
}

impl SfTile {
    pub fn new(n: u32, e: u32, s: u32, w: u32, color: u32, coop: u32) -> SfTile {
        SfTile { labels: [n, e, s, w], color, coop }
    }

    pub fn label(&self, d: Dir) -> u32 {
        match d {
            Dir::N => self.labels[0],
            Dir::E => self.labels[1],
            Dir::S => self.labels[2],
            Dir::W => self.labels[3],
            _ => 0,
        }
    }

    /// The six fields in tuple order.
    pub fn fields(&self) -> [u32; 6] {
        let [n, e, s, w] = self.labels;
        [n, e, s, w, self.color, self.coop]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SfSystem {
    pub tiles: Vec<SfTile>,
    pub seed_index: usize,
    /// Cooperation id `k` means table entry `(coop_base + k) mod 168`.
    pub coop_base: u32,
}

impl SfSystem {
    pub fn new(tiles: Vec<SfTile>, seed_index: usize) -> SfSystem {
        assert!(!tiles.is_empty() && seed_index < tiles.len());
        SfSystem { tiles, seed_index, coop_base: 0 }
    }

    pub fn truth_table(&self, tile: usize) -> u16 {
        let id = (self.coop_base as usize + self.tiles[tile].coop as usize) % NUM_COOP_SETS;
        coop_sets()[id]
    }
}

const SIDES: [(Dir, u8); 4] = [(Dir::N, SIDE_N), (Dir::E, SIDE_E), (Dir::S, SIDE_S), (Dir::W, SIDE_W)];

/// Side-match vector of `tile` at `loc`: a side matches when the neighbor is
/// present and both facing labels are equal and non-null.
pub fn match_vector(sys: &SfSystem, asm: &Assembly, loc: Loc, tile: usize) -> u8 {
    let t = &sys.tiles[tile];
    let mut v = 0;
    for (d, bit) in SIDES {
        let mine = t.label(d);
        if mine == 0 {
            continue;
        }
        if let Some(j) = asm.get(loc.step(d)) {
            if sys.tiles[j].label(d.opposite()) == mine {
                v |= bit;
            }
        }
    }
    v
}

pub fn sf_attachable(sys: &SfSystem, asm: &Assembly, loc: Loc, tile: usize) -> bool {
    eval(sys.truth_table(tile), match_vector(sys, asm, loc, tile))
}

/// Engine rules for a strength-free system with its seed at the origin.
pub struct SfRules<'a> {
    pub sys: &'a SfSystem,
    seed: [(Loc, usize); 1],
}

impl<'a> SfRules<'a> {
    pub fn new(sys: &'a SfSystem) -> SfRules<'a> {
        SfRules { sys, seed: [(Loc::new(0, 0), sys.seed_index)] }
    }
}

impl Rules for SfRules<'_> {
    fn dim(&self) -> Dim {
        Dim::Two
    }

    fn seed(&self) -> &[(Loc, usize)] {
        &self.seed
    }

    fn tile_count(&self) -> usize {
        self.sys.tiles.len()
    }

    fn tile_name(&self, tile: usize) -> String {
        format!("sf{tile}")
    }

    fn legal_tiles(&self, asm: &Assembly, loc: Loc, out: &mut Vec<usize>) {
        if asm.contains(loc) || !SIDES.iter().any(|(d, _)| asm.contains(loc.step(*d))) {
            return;
        }
        out.extend((0..self.sys.tiles.len()).filter(|&t| sf_attachable(self.sys, asm, loc, t)));
    }
}

/// Number of systems the enumeration visits:
/// sum over t of (coops * colors * (t+1)^4)^t * t.
pub fn count_sf_systems(u: &Universe) -> BigUint {
    let mut total = BigUint::zero();
    for t in 1..=u.max_tile_types {
        let glues = BigUint::from(t + 1);
        let per_tile = BigUint::from(u.num_coop_sets) * BigUint::from(u.num_colors) * glues.pow(4);
        total += per_tile.pow(t) * BigUint::from(t);
    }
    total
}

/// Odometer over tile sets, then seeds.
#[derive(Debug, Clone)]
pub struct SfEnumerator {
    max_tiles: u32,
    colors: u32,
    coops: u32,
    coop_base: u32,
    tiles: Vec<SfTile>,
    seed: usize,
    done: bool,
}

impl SfEnumerator {
    pub fn new(u: &Universe) -> SfEnumerator {
        SfEnumerator {
            max_tiles: u.max_tile_types,
            colors: u.num_colors,
            coops: u.num_coop_sets,
            coop_base: u.coop_base,
            tiles: vec![SfTile::default()],
            seed: 0,
            done: u.max_tile_types == 0,
        }
    }

    /// Advances the tile set; returns false when it wrapped around.
    fn increment(&mut self) -> bool {
        let glues = self.tiles.len() as u32 + 1;
        for tile in &mut self.tiles {
            for slot in 0..4 {
                if tile.labels[slot] + 1 < glues {
                    tile.labels[slot] += 1;
                    return true;
                }
                tile.labels[slot] = 0;
            }
            if tile.color + 1 < self.colors {
                tile.color += 1;
                return true;
            }
            tile.color = 0;
            if tile.coop + 1 < self.coops {
                tile.coop += 1;
                return true;
            }
            tile.coop = 0;
        }
        false
    }
}

impl Iterator for SfEnumerator {
    type Item = SfSystem;

    fn next(&mut self) -> Option<SfSystem> {
        if self.done {
            return None;
        }
        let out = SfSystem { tiles: self.tiles.clone(), seed_index: self.seed, coop_base: self.coop_base };
        self.seed += 1;
        if self.seed == self.tiles.len() {
            self.seed = 0;
            if !self.increment() {
                let t = self.tiles.len() as u32 + 1;
                if t > self.max_tiles {
                    self.done = true;
                } else {
                    self.tiles = vec![SfTile::default(); t as usize];
                }
            }
        }
        Some(out)
    }
}

pub fn sf_enumerator(u: &Universe) -> SfEnumerator {
    SfEnumerator::new(u)
}

/// Exact count as a `u64`, if it fits.
pub fn count_u64(u: &Universe) -> Option<u64> {
    let c = count_sf_systems(u);
    let digits = c.to_u64_digits();
    match digits.len() {
        0 => Some(0),
        1 => Some(digits[0]),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::coop::{all_of, coop_index};
    use crate::sim::{Policy, SimState};

    fn universe(tiles: u32, colors: u32, coops: u32) -> Universe {
        Universe { num_colors: colors, num_coop_sets: coops, ..Universe::new(tiles) }
    }

    #[test]
    fn counts() {
        assert_eq!(count_sf_systems(&Universe::new(1)), BigUint::from(21504u32));
        assert_eq!(count_sf_systems(&Universe::new(2)), BigUint::from(23_702_762_496u64));
        assert_eq!(count_u64(&universe(1, 2, 2)), Some(64));
    }

    #[test]
    fn enumeration_order() {
        let u = universe(2, 2, 2);
        let all: Vec<SfSystem> = sf_enumerator(&u).collect();
        assert_eq!(all.len() as u64, count_u64(&u).unwrap());
        assert_eq!(all[0].tiles, vec![SfTile::default()]);
        assert_eq!(all[1].tiles[0].fields(), [1, 0, 0, 0, 0, 0]);
        assert_eq!(all[2].tiles[0].fields(), [0, 1, 0, 0, 0, 0]);
        assert_eq!(all[16].tiles[0].fields(), [0, 0, 0, 0, 1, 0]);
        // first two-tile set, both seeds
        assert_eq!(all[64].tiles.len(), 2);
        assert_eq!((all[64].seed_index, all[65].seed_index), (0, 1));
        assert_eq!(all[64].tiles, all[65].tiles);
        assert_eq!(all[66].tiles[0].fields(), [1, 0, 0, 0, 0, 0]);
        let last = all.last().unwrap();
        assert!(last.tiles.iter().all(|t| t.fields() == [2, 2, 2, 2, 1, 1]));
    }

    #[test]
    fn attachability() {
        let never = SfSystem::new(vec![SfTile::new(1, 1, 1, 1, 0, 0)], 0);
        assert!(!sf_attachable(&never, &Assembly::default(), Loc::new(1, 0), 0));
        let idx = coop_index(all_of(SIDE_N)).unwrap() as u32;
        let needs_n = SfSystem::new(vec![SfTile::new(1, 0, 1, 0, 0, idx)], 0);
        let mut asm = Assembly::default();
        asm.place(Loc::new(0, 0), 0).unwrap();
        assert!(sf_attachable(&needs_n, &asm, Loc::new(0, -1), 0));
        assert!(!sf_attachable(&needs_n, &asm, Loc::new(0, 1), 0));
        let always = SfSystem::new(vec![SfTile::new(0, 0, 0, 0, 0, 167)], 0);
        assert!(sf_attachable(&always, &asm, Loc::new(5, 5), 0));
    }

    #[test]
    fn rules_drive_the_engine() {
        // Grows a horizontal line: east and west labels match each other.
        let any = coop_index(crate::diag::coop::any_of(0xF)).unwrap() as u32;
        let sys = SfSystem::new(vec![SfTile::new(0, 1, 0, 1, 0, any)], 0);
        let rules = SfRules::new(&sys);
        let mut st = SimState::new(&rules);
        st.run(10, Policy::PaperOrder).unwrap();
        assert_eq!(st.asm.len(), 11);
        assert!(st.asm.placements().iter().all(|(l, _)| l.y == 0));
        let (lo, hi) = st.asm.bounds().unwrap();
        assert_eq!((lo.x, hi.x), (-5, 5));
    }
}
