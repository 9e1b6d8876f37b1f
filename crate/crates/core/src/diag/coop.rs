//! Cooperation sets: monotone boolean functions of the four side matches.
//!
//! A match vector packs one bit per side (N=1, E=2, S=4, W=8) and a function
//! is stored as its 16-bit truth table, bit `v` holding the value on vector `v`.

use std::sync::OnceLock;

pub const SIDE_N: u8 = 1;
pub const SIDE_E: u8 = 2;
pub const SIDE_S: u8 = 4;
pub const SIDE_W: u8 = 8;

/// Number of monotone functions on four variables.
pub const NUM_COOP_SETS: usize = 168;

pub fn is_monotone(table: u16) -> bool {
    (0..16u8).all(|v| {
        let on = (table >> v) & 1 == 1;
        !on || (0..4).all(|b| (table >> (v | (1 << b))) & 1 == 1)
    })
}

/// All monotone truth tables in ascending numeric order.
pub fn coop_sets() -> &'static [u16] {
    static TABLE: OnceLock<Vec<u16>> = OnceLock::new();
    TABLE.get_or_init(|| (0..=u16::MAX).filter(|&t| is_monotone(t)).collect())
}

pub fn eval(table: u16, matches: u8) -> bool {
    (table >> (matches & 0xF)) & 1 == 1
}

/// Position of a truth table in [`coop_sets`].
pub fn coop_index(table: u16) -> Option<usize> {
    coop_sets().binary_search(&table).ok()
}

/// Truth table of "at least one of `sides` matches" (sides as a mask).
pub fn any_of(sides: u8) -> u16 {
    (0..16u16).filter(|v| (*v as u8) & sides != 0).fold(0, |t, v| t | (1 << v))
}

/// Truth table of "every side in `sides` matches".
pub fn all_of(sides: u8) -> u16 {
    (0..16u16).filter(|v| (*v as u8) & sides == sides).fold(0, |t, v| t | (1 << v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape() {
        let t = coop_sets();
        assert_eq!(t.len(), NUM_COOP_SETS);
        assert_eq!(t[0], 0);
        assert_eq!(t[167], 0xFFFF);
        assert_eq!(t[166], any_of(0xF));
        assert!(t.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn named_functions() {
        let n_only = all_of(SIDE_N);
        assert!(coop_index(n_only).is_some());
        assert!(!eval(n_only, 0));
        assert!(eval(n_only, SIDE_N | SIDE_S));
        let ne = all_of(SIDE_N | SIDE_E);
        assert!(eval(ne, SIDE_N | SIDE_E));
        assert!(!eval(ne, SIDE_N));
        assert!(eval(0xFFFF, 0));
        // true on {N} only, false on {N,E}
        assert!(!is_monotone(0b10));
    }
}
