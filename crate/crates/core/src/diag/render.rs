//! The grid pattern described by a bit sequence.

use crate::model::default_palette;
use crate::patterns::Pattern;

/// Default-palette ids of the eight colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u16)]
pub enum PnColor {
    White = 0,
    Black = 1,
    Red = 2,
    Green = 3,
    Aqua = 4,
    Blue = 5,
    Yellow = 6,
    Fuchsia = 7,
}

/// Color of a cell with the given (row bit, column bit).
pub fn pn_color(boundary: bool, row: u8, col: u8) -> u16 {
    use PnColor::*;
    let c = match (boundary, row & 1, col & 1) {
        (true, 0, 0) => Red,
        (true, 0, 1) => Green,
        (true, 1, 0) => Black,
        (true, _, _) => White,
        (false, 0, 0) => Fuchsia,
        (false, 0, 1) => Blue,
        (false, 1, 0) => Yellow,
        (false, _, _) => Aqua,
    };
    c as u16
}

/// Inverse of [`pn_color`]: (boundary, row bit, column bit).
pub fn color_bits(color: u16) -> Option<(bool, u8, u8)> {
    for boundary in [true, false] {
        for row in 0..2 {
            for col in 0..2 {
                if pn_color(boundary, row, col) == color {
                    return Some((boundary, row, col));
                }
            }
        }
    }
    None
}

/// `m x m` grid of `c x c` cells. Rows are counted from the north edge; the
/// `i`-th row and column of each cell carry bit `b[i mod |b|]`, and row/column
/// 0 of each cell is its boundary.
pub fn render_pn(b: &[u8], c: u32, m: u32) -> Pattern {
    assert!(c >= 2, "cell size must be at least 2");
    assert!(!b.is_empty(), "bit sequence must be non-empty");
    let bit = |i: u32| b[(i % c) as usize % b.len()];
    Pattern::from_fn(m, m, default_palette(), |x, y| {
        let r = m - 1 - y;
        pn_color(x % c == 0 || r % c == 0, bit(r), bit(x))
    })
}

/// Checks that reflecting across the NW-SE diagonal, i.e. swapping column
/// index and row-from-north index, swaps row and column bits. Returns the
/// first cell where that fails.
pub fn symmetry_violation(p: &Pattern) -> Option<(u32, u32)> {
    let m = p.width();
    if p.height() != m {
        return Some((0, 0));
    }
    for y in 0..m {
        for x in 0..m {
            let (mx, my) = (m - 1 - y, m - 1 - x);
            let ok = match (color_bits(p.get(x, y)), color_bits(p.get(mx, my))) {
                (Some((b1, r1, c1)), Some((b2, r2, c2))) => b1 == b2 && r1 == c2 && c1 == r2,
                _ => false,
            };
            if !ok {
                return Some((x, y));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;
    use PnColor::*;

    fn bits(s: &str) -> Vec<u8> {
        s.bytes().map(|c| c - b'0').collect()
    }

    fn boundary_colors(p: &Pattern, c: u32) -> BTreeSet<u16> {
        let m = p.width();
        let mut s = BTreeSet::new();
        for y in 0..m {
            for x in 0..m {
                if x % c == 0 || (m - 1 - y) % c == 0 {
                    s.insert(p.get(x, y));
                }
            }
        }
        s
    }

    #[test]
    fn color_map_round_trips() {
        for c in 0..8u16 {
            let (b, r, col) = color_bits(c).unwrap();
            assert_eq!(pn_color(b, r, col), c);
        }
        assert_eq!(color_bits(8), None);
        assert_eq!(pn_color(true, 1, 1), White as u16);
        assert_eq!(pn_color(false, 0, 0), Fuchsia as u16);
    }

    #[test]
    fn boundary_sets() {
        let p = render_pn(&bits("11010101"), 8, 24);
        let want: BTreeSet<u16> = [White, Green, Black].iter().map(|c| *c as u16).collect();
        assert_eq!(boundary_colors(&p, 8), want);
        assert_eq!(p.colors_used().len(), 7);
        let p = render_pn(&bits("00101010"), 8, 24);
        let want: BTreeSet<u16> = [Red, Green, Black].iter().map(|c| *c as u16).collect();
        assert_eq!(boundary_colors(&p, 8), want);
    }

    #[test]
    fn all_zero_bits() {
        let p = render_pn(&[0, 0], 2, 4);
        for y in 0..4 {
            for x in 0..4 {
                let boundary = x % 2 == 0 || (3 - y) % 2 == 0;
                let c = p.get(x, y);
                if boundary {
                    assert_eq!(c, Red as u16);
                } else {
                    assert_eq!(c, Fuchsia as u16);
                }
            }
        }
    }

    #[test]
    fn north_west_corner_is_bit_zero_boundary() {
        let p = render_pn(&[1, 0, 1], 3, 7);
        assert_eq!(p.get(0, 6), White as u16);
        assert_eq!(p.get(1, 6), Black as u16);
        assert_eq!(p.get(1, 5), Fuchsia as u16);
        assert_eq!(p.get(2, 5), Blue as u16);
    }

    proptest! {
        #[test]
        fn symmetric(b in proptest::collection::vec(0u8..2, 1..12), c in 2u32..10, m in 1u32..30) {
            prop_assert_eq!(symmetry_violation(&render_pn(&b, c, m)), None);
        }

        #[test]
        fn at_most_seven_colors(b in proptest::collection::vec(0u8..2, 1..12), c in 2u32..10, m in 1u32..30) {
            prop_assert!(render_pn(&b, c, m).colors_used().len() <= 7);
        }
    }
}
