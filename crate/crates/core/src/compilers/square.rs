//! Arbitrary two-colored squares at temperature 1.
//!
//! A hard-coded skeleton (the bottom row plus a column every `2L+1` cells,
//! `L = floor(log2 n)`) carries the pattern colors of its own cells and, on
//! each side, a glue naming the bit string of the rib that grows there. Rib
//! tiles peel one bit off the string per step.

use thiserror::Error;

use super::blueprint::{g, hard_path, Blueprint, Cell};
use super::{Budget, CompiledSystem};
use crate::model::{Dim, Dir, Glue, Loc, TileType};
use crate::patterns::{Pattern, BLACK};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SquareError {
    #[error("pattern must use a palette of exactly two colors")]
    NotTwoColored,
    #[error("pattern is {0}x{1}, not square")]
    NotSquare(u32, u32),
}

pub fn floor_log2(n: u32) -> u32 {
    31 - n.max(1).leading_zeros()
}

/// Skeleton geometry for side `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub n: u32,
    /// Rib length of the full rib-pairs.
    pub arm: u32,
    /// Column x-coordinates with their (west, east) rib lengths.
    pub columns: Vec<(u32, u32, u32)>,
    /// Last x of the hard-coded bottom row (it starts at the seed).
    pub row_end: u32,
}

impl Skeleton {
    pub fn new(n: u32) -> Skeleton {
        assert!(n >= 2);
        let arm = floor_log2(n);
        let pair = 2 * arm + 1;
        let (f, r) = (n / pair, n % pair);
        let mut columns: Vec<(u32, u32, u32)> = (0..f).map(|k| (arm + k * pair, arm, arm)).collect();
        if r >= arm + 1 {
            columns.push((f * pair + arm, arm, r - arm - 1));
        } else if r >= 1 {
            columns.push((f * pair, 0, r - 1));
        }
        let last = columns.last().expect("at least one column").0;
        Skeleton { n, arm, columns, row_end: (last + 1).min(n - 1) }
    }

    pub fn seed(&self) -> (u32, u32) {
        (self.arm, 0)
    }

    /// Per-direction rib family size, `2^(L+1) - 2`.
    pub fn rib_family_size(&self) -> usize {
        (1usize << (self.arm + 1)) - 2
    }
}

fn bit(p: &Pattern, x: u32, y: u32) -> char {
    if p.get(x, y) == BLACK {
        '0'
    } else {
        '1'
    }
}

fn rib_glue(prefix: &str, s: &str) -> Glue {
    if s.is_empty() {
        Glue::null()
    } else {
        g(format!("{prefix}:{s}"), 1)
    }
}

/// All bit strings of lengths `1..=len`.
fn strings(len: u32) -> Vec<String> {
    let mut out = Vec::new();
    for l in 1..=len {
        for v in 0..(1u32 << l) {
            out.push((0..l).rev().map(|i| if (v >> i) & 1 == 1 { '1' } else { '0' }).collect());
        }
    }
    out
}

fn color_of(s: &str) -> u16 {
    if s.starts_with('0') {
        BLACK
    } else {
        1 - BLACK
    }
}

/// Eastward rib tiles (`re*`) followed by westward ones (`rw*`).
pub fn rib_tiles(arm: u32) -> Vec<TileType> {
    let mut tiles = Vec::new();
    for (prefix, inward, outward) in [("re", Dir::W, Dir::E), ("rw", Dir::E, Dir::W)] {
        for s in strings(arm) {
            let mut glues = vec![Glue::null(); 4];
            glues[inward.index()] = rib_glue(prefix, &s);
            glues[outward.index()] = rib_glue(prefix, &s[1..]);
            tiles.push(TileType::new(format!("{prefix}{s}"), color_of(&s), glues));
        }
    }
    tiles
}

pub(crate) fn check_pattern(p: &Pattern) -> Result<u32, SquareError> {
    if !p.is_square() {
        return Err(SquareError::NotSquare(p.width(), p.height()));
    }
    if p.palette.len() != 2 {
        return Err(SquareError::NotTwoColored);
    }
    Ok(p.width())
}

pub fn compile_square_pattern(p: &Pattern) -> Result<CompiledSystem, SquareError> {
    let n = check_pattern(p)?;
    let budget = Budget::square(n);
    let mut bp = Blueprint::new(Dim::Two, 1, p.palette.clone());
    if n == 1 {
        bp.put(Loc::new(0, 0), Cell::new("sk", p.get(0, 0)));
        bp.set_seed(Loc::new(0, 0));
        return Ok(CompiledSystem { system: bp.build(), target: p.clone(), budget });
    }
    let sk = Skeleton::new(n);
    for t in rib_tiles(sk.arm) {
        bp.add_extra(t);
    }
    let (sx, _) = sk.seed();
    let put = |bp: &mut Blueprint, x: u32, y: u32| bp.put(Loc::new(x as i32, y as i32), Cell::new("sk", p.get(x, y)));
    let row: Vec<Loc> = (sx..=sk.row_end).map(|x| Loc::new(x as i32, 0)).collect();
    for x in sx..=sk.row_end {
        put(&mut bp, x, 0);
    }
    hard_path(&mut bp, "sk:r", &row, 1);
    for &(cx, _, _) in &sk.columns {
        let col: Vec<Loc> = (0..n).map(|y| Loc::new(cx as i32, y as i32)).collect();
        for y in 1..n {
            put(&mut bp, cx, y);
        }
        hard_path(&mut bp, &format!("sk:c{cx}"), &col, 1);
    }
    // Rib sources: (cell, direction, length).
    let mut sources: Vec<(u32, u32, Dir, u32)> = Vec::new();
    for &(cx, west, east) in &sk.columns {
        for y in 1..n {
            sources.push((cx, y, Dir::W, west));
            sources.push((cx, y, Dir::E, east));
        }
    }
    sources.push((sx, 0, Dir::W, sx));
    sources.push((sk.row_end, 0, Dir::E, n - 1 - sk.row_end));
    for (x, y, d, len) in sources {
        if len == 0 {
            continue;
        }
        let xs: Vec<u32> = match d {
            Dir::E => (x + 1..=x + len).collect(),
            _ => (x - len..x).rev().collect(),
        };
        let s: String = xs.iter().map(|&rx| bit(p, rx, y)).collect();
        let prefix = if d == Dir::E { "re" } else { "rw" };
        bp.set_glue(Loc::new(x as i32, y as i32), d, rib_glue(prefix, &s));
        for (t, &rx) in xs.iter().enumerate() {
            let rest = &s[t..];
            let mut c = Cell::new(prefix, color_of(rest));
            c.glues[d.opposite().index()] = rib_glue(prefix, rest);
            c.glues[d.index()] = rib_glue(prefix, &rest[1..]);
            bp.put(Loc::new(rx as i32, y as i32), c);
        }
    }
    bp.set_seed(Loc::new(sx as i32, 0));
    Ok(CompiledSystem { system: bp.build(), target: p.clone(), budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{assembly_pattern, two_color_palette};
    use crate::sim::{Policy, SimState, TasRules};
    use rand::{Rng, SeedableRng};

    fn random_pattern(n: u32, seed: u64) -> Pattern {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut p = Pattern::new(n, n, two_color_palette(), 0);
        for y in 0..n {
            for x in 0..n {
                p.set(x, y, rng.gen_range(0..2));
            }
        }
        p
    }

    fn assert_grows(cs: &CompiledSystem, policy: Policy) {
        let rules = TasRules::new(&cs.system);
        let mut st = SimState::new(&rules);
        assert!(st.run(1_000_000, policy).unwrap().terminal);
        let pat = assembly_pattern(&st.asm, cs.system.tiles(), &cs.system.tileset.palette, false).unwrap();
        assert_eq!(pat.first_mismatch(&cs.target), None);
        assert_eq!(st.asm.len() as u32, cs.target.width() * cs.target.height());
    }

    #[test]
    fn sixteen_geometry() {
        let sk = Skeleton::new(16);
        assert_eq!(sk.seed(), (4, 0));
        assert_eq!(sk.columns, vec![(4, 4, 4), (13, 4, 2)]);
        assert_eq!(sk.row_end, 14);
        assert_eq!(sk.rib_family_size(), 30);
    }

    #[test]
    fn rib_families_are_exact() {
        for n in [8u32, 16, 32, 64] {
            let cs = compile_square_pattern(&random_pattern(n, 1)).unwrap();
            let east = cs.system.tiles().iter().filter(|t| t.name.starts_with("re")).count();
            let west = cs.system.tiles().iter().filter(|t| t.name.starts_with("rw")).count();
            assert_eq!((east, west), (2 * n as usize - 2, 2 * n as usize - 2));
        }
    }

    #[test]
    fn small_sides() {
        for n in 1..=20 {
            for seed in 0..3 {
                let cs = compile_square_pattern(&random_pattern(n, seed)).unwrap();
                assert_eq!(cs.system.temperature, 1);
                assert_grows(&cs, Policy::PaperOrder);
                assert_grows(&cs, Policy::UniformRandom(seed));
            }
        }
    }

    #[test]
    fn solid_patterns() {
        for c in [0, 1] {
            let p = Pattern::new(16, 16, two_color_palette(), c);
            assert_grows(&compile_square_pattern(&p).unwrap(), Policy::UniformRandom(5));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = Pattern::new(3, 4, two_color_palette(), 0);
        assert_eq!(compile_square_pattern(&p).unwrap_err(), SquareError::NotSquare(3, 4));
        let p = Pattern::new(3, 3, crate::model::default_palette(), 0);
        assert_eq!(compile_square_pattern(&p).unwrap_err(), SquareError::NotTwoColored);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn random_squares_match(n in 2u32..40, seed: u64) {
            let cs = compile_square_pattern(&random_pattern(n, seed)).unwrap();
            assert_grows(&cs, Policy::UniformRandom(seed));
            proptest::prop_assert!(cs.within_budget());
        }
    }
}
