//! Diagonalization pipeline: enumerate strength-free systems, run each for a
//! bounded number of steps, read one flip bit per system, and render the grid
//! pattern those bits describe. Also builds the two-plane system that prints
//! such a pattern.

pub mod coop;
mod extract;
mod lift;
mod render;
mod sf;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use coop::{coop_sets, NUM_COOP_SETS};
pub use extract::{
    compute_bits, compute_bits_capped, get_pattern_value, parse_bit_string, simulate_sf, Axis, BitRecord, BitSequence, Probe, Reason,
    DEFAULT_MAX_SYSTEMS, DEFAULT_MAX_WORK,
};
pub use lift::compile_pn_lift;
pub use render::{color_bits, pn_color, render_pn, symmetry_violation, PnColor};
pub use sf::{
    count_sf_systems, count_u64, match_vector, sf_attachable, sf_enumerator, SfEnumerator, SfRules, SfSystem, SfTile,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("universe too large: {what} exceeds the cap of {cap}")]
    UniverseTooLarge { what: String, cap: u64 },
    #[error("bit sequence of length {len} does not fit a square of side {m}")]
    BadLength { len: usize, m: u32 },
    #[error("bad universe: {0}")]
    BadUniverse(String),
    #[error("bad bit sequence: {0}")]
    BadBits(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Simulate cooperation-set semantics directly.
    DirectSf,
    /// Convert to an ordinary system first (needs an external algorithm).
    PaperFlow,
}

/// Enumeration parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    pub max_tile_types: u32,
    pub num_colors: u32,
    pub num_coop_sets: u32,
    /// Offset into the cooperation table: id `k` uses entry `(coop_base + k) mod 168`.
    pub coop_base: u32,
    /// Step budget override; the default is `(2 * systems)^2`.
    pub steps: Option<u64>,
    /// Cell size override; the default is the number of systems.
    pub patt_size: Option<u64>,
    pub mode: Mode,
}

impl Universe {
    pub fn new(max_tile_types: u32) -> Universe {
        Universe {
            max_tile_types,
            num_colors: 8,
            num_coop_sets: NUM_COOP_SETS as u32,
            coop_base: 0,
            steps: None,
            patt_size: None,
            mode: Mode::DirectSf,
        }
    }

    pub fn step_budget(&self, systems: u64) -> u64 {
        self.steps.unwrap_or_else(|| (2 * systems).saturating_mul(2 * systems))
    }

    pub fn cell_size(&self, systems: u64) -> u64 {
        self.patt_size.unwrap_or(systems)
    }

    pub fn validate(&self) -> Result<(), DiagError> {
        let bad = |s: &str| Err(DiagError::BadUniverse(s.into()));
        if self.max_tile_types == 0 {
            return bad("tiles must be at least 1");
        }
        if !(1..=8).contains(&self.num_colors) {
            return bad("colors must be in 1..=8");
        }
        if !(1..=NUM_COOP_SETS as u32).contains(&self.num_coop_sets) {
            return bad("coops must be in 1..=168");
        }
        if self.coop_base >= NUM_COOP_SETS as u32 {
            return bad("coopbase must be below 168");
        }
        Ok(())
    }
}

impl Default for Universe {
    fn default() -> Universe {
        Universe::new(1)
    }
}

/// `tiles=1,colors=2,coops=2,coopbase=166,steps=400,pattsize=16,mode=direct`
impl FromStr for Universe {
    type Err = DiagError;

    fn from_str(s: &str) -> Result<Universe, DiagError> {
        let mut u = Universe::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| DiagError::BadUniverse(format!("expected key=value, got {part:?}")))?;
            let num = || v.parse::<u64>().map_err(|_| DiagError::BadUniverse(format!("{k}: bad number {v:?}")));
            let small = || {
                num().and_then(|n| u32::try_from(n).map_err(|_| DiagError::BadUniverse(format!("{k} too large"))))
            };
            match k {
                "tiles" => u.max_tile_types = small()?,
                "colors" => u.num_colors = small()?,
                "coops" => u.num_coop_sets = small()?,
                "coopbase" => u.coop_base = small()?,
                "steps" => u.steps = Some(num()?),
                "pattsize" => u.patt_size = Some(num()?),
                "mode" => {
                    u.mode = match v {
                        "direct" | "directSF" => Mode::DirectSf,
                        "paper" | "paperFlow" => Mode::PaperFlow,
                        _ => return Err(DiagError::BadUniverse(format!("unknown mode {v:?}"))),
                    }
                }
                _ => return Err(DiagError::BadUniverse(format!("unknown key {k:?}"))),
            }
        }
        u.validate()?;
        Ok(u)
    }
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tiles={},colors={},coops={},coopbase={}",
            self.max_tile_types, self.num_colors, self.num_coop_sets, self.coop_base
        )?;
        if let Some(s) = self.steps {
            write!(f, ",steps={s}")?;
        }
        if let Some(p) = self.patt_size {
            write!(f, ",pattsize={p}")?;
        }
        if self.mode == Mode::PaperFlow {
            write!(f, ",mode=paper")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universe_round_trip() {
        let u: Universe = "tiles=1,colors=2,coops=2,coopbase=166,steps=400,pattsize=16".parse().unwrap();
        assert_eq!(u.num_colors, 2);
        assert_eq!(u.steps, Some(400));
        assert_eq!(u.to_string().parse::<Universe>().unwrap(), u);
        assert!("tiles=0".parse::<Universe>().is_err());
        assert!("colors=9".parse::<Universe>().is_err());
        assert!("bogus=1".parse::<Universe>().is_err());
        assert_eq!("mode=paper".parse::<Universe>().unwrap().mode, Mode::PaperFlow);
    }

    #[test]
    fn defaults() {
        let u = Universe::new(1);
        assert_eq!((u.num_colors, u.num_coop_sets), (8, 168));
        assert_eq!(u.step_budget(21504), 4 * 21504 * 21504);
        assert_eq!(u.cell_size(64), 64);
    }
}
