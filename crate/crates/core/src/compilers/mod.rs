//! Pattern-to-tile-system compilers.

pub mod blueprint;
pub mod comb;
pub mod counter;
pub mod grid;
pub mod square;
pub mod stripes;

use std::fmt;

use crate::model::TileAssemblySystem;
use crate::patterns::{ceil_log2, Pattern};

pub use comb::{compile_multi_pixel, compile_single_pixel, CombError};
pub use grid::{compile_grid_repeat, GridError};
pub use square::{compile_square_pattern, SquareError};
pub use stripes::{compile_stripes, StripesError};

/// Asymptotic tile-type bound claimed by a compiler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetKind {
    LogN,
    PixelsLogN,
    SquareOverLog,
    SquareOverLogPlusLogNm,
    Lift,
}

impl BudgetKind {
    pub fn symbol(self) -> &'static str {
        match self {
            BudgetKind::LogN => "O(log n)",
            BudgetKind::PixelsLogN => "O(|L| log n)",
            BudgetKind::SquareOverLog => "O(n²/log n)",
            BudgetKind::SquareOverLogPlusLogNm => "O(n²/log n + log nm)",
            BudgetKind::Lift => "O(|b| + log m)",
        }
    }

    pub fn from_symbol(s: &str) -> Option<BudgetKind> {
        [
            BudgetKind::LogN,
            BudgetKind::PixelsLogN,
            BudgetKind::SquareOverLog,
            BudgetKind::SquareOverLogPlusLogNm,
            BudgetKind::Lift,
        ]
        .into_iter()
        .find(|k| k.symbol() == s)
    }
}

/// Multiplicative and additive constants behind each cap.
pub mod constants {
    pub const LOG_N: (u64, u64) = (96, 64);
    pub const PIXELS_LOG_N: (u64, u64) = (48, 96);
    pub const SQUARE: (u64, u64) = (4, 64);
    pub const GRID: (u64, u64, u64) = (16, 64, 256);
    pub const LIFT: (u64, u64, u64) = (4, 4, 640);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub kind: BudgetKind,
    pub cap: u64,
}

fn lg(n: u64) -> u64 {
    u64::from(ceil_log2(n)).max(1)
}

impl Budget {
    pub fn log_n(n: u32) -> Budget {
        let (c, c0) = constants::LOG_N;
        Budget { kind: BudgetKind::LogN, cap: c * lg(n.into()) + c0 }
    }

    pub fn pixels_log_n(n: u32, pixels: usize) -> Budget {
        let (c, c0) = constants::PIXELS_LOG_N;
        Budget { kind: BudgetKind::PixelsLogN, cap: c * (pixels.max(1) as u64) * lg(n.into()) + c0 }
    }

    pub fn square(n: u32) -> Budget {
        let (c, c0) = constants::SQUARE;
        let n = u64::from(n);
        Budget { kind: BudgetKind::SquareOverLog, cap: c * n * n / lg(n) + c0 }
    }

    pub fn grid(n: u32, m: u32) -> Budget {
        let (c, c1, c0) = constants::GRID;
        let n = u64::from(n);
        let nm = n * u64::from(m);
        Budget { kind: BudgetKind::SquareOverLogPlusLogNm, cap: c * n * n / lg(n) + c1 * lg(nm) + c0 }
    }

    pub fn lift(bits: usize, m: u32) -> Budget {
        let (c, c1, c0) = constants::LIFT;
        Budget { kind: BudgetKind::Lift, cap: c * bits as u64 + c1 * lg(m.into()) + c0 }
    }
}

#[derive(Debug, Clone)]
pub struct CompiledSystem {
    pub system: TileAssemblySystem,
    pub target: Pattern,
    pub budget: Budget,
}

impl CompiledSystem {
    pub fn tile_count(&self) -> usize {
        self.system.tiles().len()
    }

    pub fn within_budget(&self) -> bool {
        self.tile_count() as u64 <= self.budget.cap
    }

    pub fn budget_line(&self) -> BudgetLine {
        BudgetLine { kind: self.budget.kind, cap: self.budget.cap, actual: self.tile_count() as u64 }
    }
}

/// The `BUDGET <symbolic> <cap> <actual>` sidecar line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetLine {
    pub kind: BudgetKind,
    pub cap: u64,
    pub actual: u64,
}

impl fmt::Display for BudgetLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BUDGET {} {} {}", self.kind.symbol(), self.cap, self.actual)
    }
}

impl BudgetLine {
    pub fn parse(line: &str) -> Option<BudgetLine> {
        let rest = line.trim().strip_prefix("BUDGET ")?;
        let mut it = rest.rsplitn(3, ' ');
        let actual = it.next()?.parse().ok()?;
        let cap = it.next()?.parse().ok()?;
        let kind = BudgetKind::from_symbol(it.next()?)?;
        Some(BudgetLine { kind, cap, actual })
    }
}

/// Namespace of a glue label: everything before the first `:`.
pub fn label_namespace(label: &str) -> &str {
    label.split(':').next().unwrap_or(label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_line_round_trip() {
        for kind in [BudgetKind::LogN, BudgetKind::SquareOverLogPlusLogNm, BudgetKind::Lift] {
            let l = BudgetLine { kind, cap: 99, actual: 12 };
            assert_eq!(BudgetLine::parse(&l.to_string()), Some(l));
        }
        assert_eq!(BudgetLine::parse("BUDGET O(n) 1 2"), None);
    }
}
