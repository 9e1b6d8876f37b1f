//! Colored grid patterns, the pattern-class generators, and extraction of a
//! pattern from an assembly.

mod io;

pub use io::{default_rgb, export_ppm, parse_pattern, serialize_pattern};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{Assembly, TileType};

pub const WHITE: u16 = 0;
pub const BLACK: u16 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("coordinate {coord:?} out of range for size {n}")]
    OutOfRange { coord: (i64, i64), n: u32 },
    #[error("pixels {a:?} and {b:?} are closer than {need} in both axes")]
    SeparationViolation { a: (u32, u32), b: (u32, u32), need: u32 },
    #[error("assembly domain is not a rectangle, first hole at {0:?}")]
    NotRectangular((i32, i32)),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no RGB value for color {0:?}")]
    MissingColor(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Pattern {
    width: u32,
    height: u32,
    /// Row-major from the southwest corner: index `y * width + x`.
    cells: Vec<u16>,
    pub palette: Vec<String>,
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Pattern {}x{} {:?}", self.width, self.height, self.palette)?;
        for y in (0..self.height).rev() {
            let row: Vec<String> = (0..self.width).map(|x| self.get(x, y).to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Number of bits needed to write `n` distinct values, i.e. `ceil(log2 n)`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

pub fn two_color_palette() -> Vec<String> {
    vec!["White".to_string(), "Black".to_string()]
}

impl Pattern {
    pub fn new(width: u32, height: u32, palette: Vec<String>, fill: u16) -> Pattern {
        assert!(width > 0 && height > 0, "patterns are non-empty");
        Pattern { width, height, cells: vec![fill; (width * height) as usize], palette }
    }

    pub fn from_fn(width: u32, height: u32, palette: Vec<String>, f: impl Fn(u32, u32) -> u16) -> Pattern {
        let mut p = Pattern::new(width, height, palette, 0);
        for y in 0..height {
            for x in 0..width {
                p.set(x, y, f(x, y));
            }
        }
        p
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> u16 {
        self.cells[(y * self.width + x) as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, c: u16) {
        self.cells[(y * self.width + x) as usize] = c;
    }

    pub fn color_name(&self, x: u32, y: u32) -> &str {
        &self.palette[usize::from(self.get(x, y))]
    }

    pub fn is_square(&self) -> bool {
        self.width == self.height
    }

    /// Distinct color ids that occur.
    pub fn colors_used(&self) -> BTreeSet<u16> {
        self.cells.iter().copied().collect()
    }

    pub fn count(&self, c: u16) -> usize {
        self.cells.iter().filter(|&&v| v == c).count()
    }

    pub fn transpose(&self) -> Pattern {
        Pattern::from_fn(self.height, self.width, self.palette.clone(), |x, y| self.get(y, x))
    }

    /// True when both patterns have the same size and the same color name in every cell.
    pub fn same_colors(&self, other: &Pattern) -> bool {
        self.width == other.width
            && self.height == other.height
            && (0..self.height)
                .all(|y| (0..self.width).all(|x| self.color_name(x, y) == other.color_name(x, y)))
    }

    /// First cell (scanning rows from the south) where the color names differ.
    pub fn first_mismatch(&self, other: &Pattern) -> Option<(u32, u32)> {
        for y in 0..self.height.min(other.height) {
            for x in 0..self.width.min(other.width) {
                if self.color_name(x, y) != other.color_name(x, y) {
                    return Some((x, y));
                }
            }
        }
        if self.width != other.width || self.height != other.height {
            return Some((self.width.min(other.width), self.height.min(other.height)));
        }
        None
    }
}

fn check_range(n: u32, x: u32, y: u32) -> Result<(), PatternError> {
    if x >= n || y >= n {
        return Err(PatternError::OutOfRange { coord: (x.into(), y.into()), n });
    }
    Ok(())
}

pub fn single_pixel(n: u32, i: u32, j: u32) -> Result<Pattern, PatternError> {
    check_range(n, i, j)?;
    let mut p = Pattern::new(n, n, two_color_palette(), WHITE);
    p.set(i, j, BLACK);
    Ok(p)
}

/// Minimum separation between pixels of a multi-pixel pattern of size `n`.
pub fn pixel_separation(n: u32) -> u32 {
    ceil_log2(n.into())
}

pub fn multi_pixel(n: u32, pixels: &[(u32, u32)]) -> Result<Pattern, PatternError> {
    let need = pixel_separation(n);
    let uniq: BTreeSet<(u32, u32)> = pixels.iter().copied().collect();
    let list: Vec<_> = uniq.into_iter().collect();
    for &(x, y) in &list {
        check_range(n, x, y)?;
    }
    for (k, &a) in list.iter().enumerate() {
        for &b in &list[k + 1..] {
            if a.0.abs_diff(b.0) < need && a.1.abs_diff(b.1) < need {
                return Err(PatternError::SeparationViolation { a, b, need });
            }
        }
    }
    let mut p = Pattern::new(n, n, two_color_palette(), WHITE);
    for &(x, y) in &list {
        p.set(x, y, BLACK);
    }
    Ok(p)
}

pub fn stripes(n: u32, i: u32, j: u32) -> Result<Pattern, PatternError> {
    if i == 0 || j == 0 || i >= n || j >= n {
        return Err(PatternError::OutOfRange { coord: (i.into(), j.into()), n });
    }
    Ok(Pattern::from_fn(n, n, two_color_palette(), |x, y| {
        if x % i == 0 || y % j == 0 {
            BLACK
        } else {
            WHITE
        }
    }))
}

pub fn grid_repeat(p: &Pattern, m: u32) -> Pattern {
    assert!(m > 0, "repeat count must be positive");
    let (w, h) = (p.width, p.height);
    Pattern::from_fn(w * m, h * m, p.palette.clone(), |x, y| p.get(x % w, y % h))
}

/// Reads the colored rectangle covered by `asm` (the z=0 plane for planar
/// assemblies, or the plane `layer` when given).
pub fn assembly_pattern_layer(
    asm: &Assembly,
    tiles: &[TileType],
    palette: &[String],
    normalize: bool,
    layer: i32,
) -> Result<Pattern, PatternError> {
    let cells: Vec<_> = asm.placements().iter().filter(|(l, _)| l.z == layer).collect();
    if cells.is_empty() {
        return Err(PatternError::Invalid("no tiles in the requested plane".into()));
    }
    let min_x = cells.iter().map(|(l, _)| l.x).min().unwrap();
    let max_x = cells.iter().map(|(l, _)| l.x).max().unwrap();
    let min_y = cells.iter().map(|(l, _)| l.y).min().unwrap();
    let max_y = cells.iter().map(|(l, _)| l.y).max().unwrap();
    let (ox, oy) = if normalize { (min_x, min_y) } else { (0, 0) };
    if ox > min_x || oy > min_y {
        return Err(PatternError::Invalid("negative coordinates need normalization".into()));
    }
    let w = (max_x - ox + 1) as u32;
    let h = (max_y - oy + 1) as u32;
    let mut grid = vec![None; (w * h) as usize];
    for (l, t) in cells {
        grid[((l.y - oy) as u32 * w + (l.x - ox) as u32) as usize] = Some(tiles[*t].color);
    }
    let mut p = Pattern::new(w, h, palette.to_vec(), 0);
    for y in 0..h {
        for x in 0..w {
            match grid[(y * w + x) as usize] {
                Some(c) => p.set(x, y, c),
                None => return Err(PatternError::NotRectangular((x as i32 + ox, y as i32 + oy))),
            }
        }
    }
    Ok(p)
}

pub fn assembly_pattern(
    asm: &Assembly,
    tiles: &[TileType],
    palette: &[String],
    normalize: bool,
) -> Result<Pattern, PatternError> {
    assembly_pattern_layer(asm, tiles, palette, normalize, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Glue, Loc};
    use proptest::prelude::*;

    #[test]
    fn generator_examples() {
        let p = single_pixel(16, 10, 2).unwrap();
        assert_eq!(p.get(10, 2), BLACK);
        assert_eq!(p.count(WHITE), 255);
        // 18 cells in even columns plus 6 on rows 0 and 3 at odd x.
        assert_eq!(stripes(6, 2, 3).unwrap().count(BLACK), 24);
        assert_eq!(stripes(4, 1, 1).unwrap().count(BLACK), 16);
        assert!(matches!(single_pixel(4, 4, 0), Err(PatternError::OutOfRange { .. })));
        let mp = multi_pixel(16, &[(2, 2), (10, 2), (2, 12)]).unwrap();
        assert_eq!(mp.count(BLACK), 3);
        assert_eq!(multi_pixel(16, &[(5, 5)]).unwrap(), single_pixel(16, 5, 5).unwrap());
        assert!(matches!(
            multi_pixel(16, &[(0, 0), (1, 1)]),
            Err(PatternError::SeparationViolation { a: (0, 0), b: (1, 1), need: 4 })
        ));
    }

    #[test]
    fn repeat_of_single_pixel() {
        let g = grid_repeat(&single_pixel(4, 1, 2).unwrap(), 3);
        for y in 0..12 {
            for x in 0..12 {
                let black = x % 4 == 1 && y % 4 == 2;
                assert_eq!(g.get(x, y) == BLACK, black);
            }
        }
    }

    #[test]
    fn l_shape_is_not_rectangular() {
        let t = TileType::new("a", 1, vec![Glue::null(); 4]);
        let mut asm = Assembly::default();
        asm.place(Loc::new(0, 0), 0).unwrap();
        asm.place(Loc::new(1, 0), 0).unwrap();
        asm.place(Loc::new(0, 1), 0).unwrap();
        let err = assembly_pattern(&asm, &[t.clone()], &two_color_palette(), true).unwrap_err();
        assert_eq!(err, PatternError::NotRectangular((1, 1)));
        let mut one = Assembly::default();
        one.place(Loc::new(5, -3), 0).unwrap();
        let p = assembly_pattern(&one, &[t], &two_color_palette(), true).unwrap();
        assert_eq!((p.width(), p.height(), p.get(0, 0)), (1, 1, BLACK));
    }

    fn arb_pattern() -> impl Strategy<Value = Pattern> {
        (1u32..5, 1u32..5).prop_flat_map(|(w, h)| {
            proptest::collection::vec(0u16..3, (w * h) as usize).prop_map(move |v| {
                let pal = vec!["White".into(), "Black".into(), "Red".into()];
                Pattern::from_fn(w, h, pal, |x, y| v[(y * w + x) as usize])
            })
        })
    }

    proptest! {
        #[test]
        fn repeat_composes(p in arb_pattern(), a in 1u32..4, b in 1u32..4) {
            prop_assert_eq!(grid_repeat(&p, 1), p.clone());
            prop_assert_eq!(grid_repeat(&grid_repeat(&p, a), b), grid_repeat(&p, a * b));
        }

        #[test]
        fn stripes_transpose(n in 2u32..20, i in 1u32..20, j in 1u32..20) {
            prop_assume!(i < n && j < n);
            prop_assert_eq!(stripes(n, i, j).unwrap().transpose(), stripes(n, j, i).unwrap());
        }

        #[test]
        fn pixel_counts(n in 1u32..40, i in 0u32..40, j in 0u32..40) {
            prop_assume!(i < n && j < n);
            prop_assert_eq!(single_pixel(n, i, j).unwrap().count(BLACK), 1);
        }

        #[test]
        fn multi_pixel_count(n in 4u32..40, pts in proptest::collection::vec((0u32..40, 0u32..40), 0..6)) {
            let sep = pixel_separation(n);
            let mut keep: Vec<(u32, u32)> = Vec::new();
            for (x, y) in pts {
                if x < n && y < n && keep.iter().all(|&(a, b)| a.abs_diff(x) >= sep || b.abs_diff(y) >= sep) {
                    keep.push((x, y));
                }
            }
            prop_assert_eq!(multi_pixel(n, &keep).unwrap().count(BLACK), keep.len());
        }

        #[test]
        fn pat_round_trip(p in arb_pattern()) {
            let text = serialize_pattern(&p);
            let back = parse_pattern(&text).unwrap();
            prop_assert_eq!(serialize_pattern(&back), text);
            prop_assert_eq!(back, p);
        }
    }
}
