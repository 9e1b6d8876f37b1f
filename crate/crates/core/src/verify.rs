//! Checking compiled systems against their target patterns, auditing tile
//! counts, and re-checking the diagonal pattern against the systems it beats.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::compilers::{BudgetKind, CompiledSystem};
use crate::diag::{
    color_bits, sf_enumerator, simulate_sf, Axis, BitSequence, DiagError, Reason, Universe,
};
use crate::model::{Assembly, Dim};
use crate::patterns::{assembly_pattern_layer, ceil_log2, Pattern, PatternError};
use crate::sim::{enumerate_terminal, Policy, SimState, TasRules};

/// Exhaustive search is used up to this many target cells...
pub const EXHAUSTIVE_MAX_CELLS: u64 = 64;
/// ...and this many tile types.
pub const EXHAUSTIVE_MAX_TILES: usize = 16;
/// Producible assemblies explored before falling back to sampling.
pub const EXHAUSTIVE_MAX_ASSEMBLIES: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("trial {trial} did not terminate within {cap} steps")]
    NonTerminating { trial: usize, cap: u64 },
    #[error("trials must be positive")]
    NoTrials,
}

/// First cell where an assembly and the target disagree. Colors are ids in
/// the target's and the system's palettes; `None` means no tile (or no cell).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mismatch {
    pub loc: (i64, i64),
    pub expected: Option<u16>,
    pub actual: Option<u16>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub trials: usize,
    pub all_terminal: bool,
    pub all_match: bool,
    pub distinct_terminals: usize,
    pub first_mismatch: Option<Mismatch>,
    pub exhaustive: bool,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.all_match && self.distinct_terminals == 1
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "VERIFY {} trials={} distinct={} exhaustive={}",
            if self.passed() { "pass" } else { "fail" },
            self.trials,
            self.distinct_terminals,
            u8::from(self.exhaustive)
        )?;
        if let Some(m) = self.first_mismatch {
            write!(f, " mismatch={},{}", m.loc.0, m.loc.1)?;
        }
        Ok(())
    }
}

/// Plane compared against the target: z=1 for two-plane systems.
fn layer_of(cs: &CompiledSystem) -> i32 {
    match cs.system.dim {
        Dim::Two => 0,
        Dim::Three => 1,
    }
}

/// Compares one terminal assembly with the target.
pub fn check_assembly(cs: &CompiledSystem, asm: &Assembly, strict: bool) -> Option<Mismatch> {
    let sys = &cs.system;
    let target = &cs.target;
    let got = match assembly_pattern_layer(asm, sys.tiles(), &sys.tileset.palette, true, layer_of(cs)) {
        Ok(p) => p,
        Err(PatternError::NotRectangular((x, y))) => {
            let (lo, _) = asm.bounds().expect("non-empty assembly");
            let (x, y) = (i64::from(x) - i64::from(lo.x), i64::from(y) - i64::from(lo.y));
            let expected = (x < target.width().into() && y < target.height().into())
                .then(|| target.get(x as u32, y as u32));
            return Some(Mismatch { loc: (x, y), expected, actual: None });
        }
        Err(_) => return Some(Mismatch { loc: (0, 0), expected: Some(target.get(0, 0)), actual: None }),
    };
    if let Some((x, y)) = got.first_mismatch(target) {
        let cell = |p: &Pattern| (x < p.width() && y < p.height()).then(|| p.get(x, y));
        return Some(Mismatch { loc: (x.into(), y.into()), expected: cell(target), actual: cell(&got) });
    }
    if strict {
        // Every tile in the set must be colored from the pattern's colors.
        let allowed: BTreeSet<&str> = target.colors_used().iter().map(|&c| target.palette[c as usize].as_str()).collect();
        if let Some(t) = sys.tiles().iter().find(|t| !allowed.contains(sys.tileset.palette[t.color as usize].as_str())) {
            return Some(Mismatch { loc: (-1, -1), expected: None, actual: Some(t.color) });
        }
        // In the planar case the whole assembly is the pattern; for two
        // planes, nothing may sit outside the footprint of the checked plane.
        let area = u64::from(target.width()) * u64::from(target.height());
        let on_plane = asm.placements().iter().filter(|(l, _)| l.z == layer_of(cs)).count() as u64;
        if sys.dim == Dim::Two && on_plane != asm.len() as u64 || on_plane != area {
            return Some(Mismatch { loc: (-1, -1), expected: None, actual: None });
        }
    }
    None
}

fn small_enough(cs: &CompiledSystem) -> bool {
    u64::from(cs.target.width()) * u64::from(cs.target.height()) <= EXHAUSTIVE_MAX_CELLS
        && cs.system.tiles().len() <= EXHAUSTIVE_MAX_TILES
}

fn run_trial(rules: &TasRules<'_>, policy: Policy, cap: u64, trial: usize) -> Result<Assembly, VerifyError> {
    let mut st = SimState::new(rules);
    let out = st.run(cap, policy).map_err(|_| VerifyError::NonTerminating { trial, cap })?;
    if !out.terminal {
        return Err(VerifyError::NonTerminating { trial, cap });
    }
    Ok(st.asm)
}

/// Grows `cs` to terminality and compares with its target. Trial 0 uses
/// PaperOrder, trial `k > 0` uses UniformRandom(rng_seed + k). Tiny systems
/// are explored exhaustively instead.
pub fn verify_weak(cs: &CompiledSystem, trials: usize, rng_seed: u64, strict: bool) -> Result<VerifyReport, VerifyError> {
    if trials == 0 {
        return Err(VerifyError::NoTrials);
    }
    let rules = TasRules::new(&cs.system);
    let area = u64::from(cs.target.width()) * u64::from(cs.target.height());
    let cap = 4 * area.max(1);

    let (terminals, exhaustive) = match small_enough(cs)
        .then(|| enumerate_terminal(&rules, EXHAUSTIVE_MAX_ASSEMBLIES, cap as usize).ok())
        .flatten()
    {
        Some(t) => (t, true),
        None => {
            let policy = |k: usize| if k == 0 { Policy::PaperOrder } else { Policy::UniformRandom(rng_seed.wrapping_add(k as u64)) };
            let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(trials);
            let results: Vec<Result<Assembly, VerifyError>> = std::thread::scope(|s| {
                let handles: Vec<_> = (0..workers)
                    .map(|w| {
                        let rules = &rules;
                        s.spawn(move || {
                            (w..trials).step_by(workers).map(|k| (k, run_trial(rules, policy(k), cap, k))).collect::<Vec<_>>()
                        })
                    })
                    .collect();
                let mut all: Vec<_> = handles.into_iter().flat_map(|h| h.join().expect("trial thread panicked")).collect();
                all.sort_by_key(|(k, _)| *k);
                all.into_iter().map(|(_, r)| r).collect()
            });
            (results.into_iter().collect::<Result<Vec<_>, _>>()?, false)
        }
    };

    let mut first_mismatch = None;
    let mut distinct = BTreeSet::new();
    for asm in &terminals {
        distinct.insert(asm.canonical());
        if first_mismatch.is_none() {
            first_mismatch = check_assembly(cs, asm, strict);
        }
    }
    Ok(VerifyReport {
        trials: if exhaustive { terminals.len() } else { trials },
        all_terminal: true,
        all_match: first_mismatch.is_none() && !terminals.is_empty(),
        distinct_terminals: distinct.len(),
        first_mismatch,
        exhaustive,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditRow {
    pub params: String,
    pub kind: BudgetKind,
    /// Side of the target square.
    pub n: u32,
    pub tile_count: u64,
    pub budget_cap: u64,
    pub within_budget: bool,
}

impl fmt::Display for AuditRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AUDIT {} n={} tiles={} cap={} {}",
            self.params,
            self.n,
            self.tile_count,
            self.budget_cap,
            if self.within_budget { "ok" } else { "over" }
        )
    }
}

/// Normalized tile count of one audit row.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthPoint {
    pub params: String,
    pub n: u32,
    /// `tiles / (n^2 / ceil(log n))` for square rows, `tiles / ceil(log n)` otherwise.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GrowthSummary {
    pub points: Vec<GrowthPoint>,
    pub max_ratio: f64,
    /// Largest `tiles(2n) - tiles(n)` among rows whose sides differ by a factor of two.
    pub max_doubling_increase: Option<i64>,
}

pub fn audit_row(params: impl Into<String>, cs: &CompiledSystem) -> AuditRow {
    let tile_count = cs.tile_count() as u64;
    AuditRow {
        params: params.into(),
        kind: cs.budget.kind,
        n: cs.target.width(),
        tile_count,
        budget_cap: cs.budget.cap,
        within_budget: tile_count <= cs.budget.cap,
    }
}

fn lg(n: u32) -> f64 {
    f64::from(ceil_log2(n.into()).max(1))
}

/// Growth summary over rows of one compiler family.
pub fn growth_summary(rows: &[AuditRow]) -> GrowthSummary {
    let points: Vec<GrowthPoint> = rows
        .iter()
        .map(|r| {
            let base = match r.kind {
                BudgetKind::SquareOverLog | BudgetKind::SquareOverLogPlusLogNm => {
                    f64::from(r.n) * f64::from(r.n) / lg(r.n)
                }
                _ => lg(r.n),
            };
            GrowthPoint { params: r.params.clone(), n: r.n, ratio: r.tile_count as f64 / base }
        })
        .collect();
    let max_ratio = points.iter().map(|p| p.ratio).fold(0.0, f64::max);
    let mut max_doubling_increase = None;
    for a in rows {
        for b in rows.iter().filter(|b| b.n == 2 * a.n) {
            let d = b.tile_count as i64 - a.tile_count as i64;
            max_doubling_increase = Some(max_doubling_increase.map_or(d, |m: i64| m.max(d)));
        }
    }
    GrowthSummary { points, max_ratio, max_doubling_increase }
}

pub fn complexity_audit(rows: &[(String, &CompiledSystem)]) -> (Vec<AuditRow>, GrowthSummary) {
    let audit: Vec<AuditRow> = rows.iter().map(|(p, cs)| audit_row(p.clone(), cs)).collect();
    let summary = growth_summary(&audit);
    (audit, summary)
}

/// A location where the diagonal pattern fails to disagree with a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub serial: u64,
    /// Pattern cell that should disagree, or the boundary location it is
    /// measured from when that location is not boundary-colored.
    pub loc: (u32, u32),
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffersReport {
    pub holds: bool,
    /// Flip systems replayed.
    pub flips: usize,
    /// (boundary location, offset cell) pairs examined.
    pub checked: u64,
    pub witnesses: Vec<Witness>,
}

/// Replays every system whose bit came from a flip and checks that, from
/// every boundary location of the probe's axis, the cell `index` further
/// along carries the opposite class to the one the system showed there.
pub fn pn_differs(pattern: &Pattern, u: &Universe, bits: &BitSequence) -> Result<DiffersReport, DiagError> {
    u.validate()?;
    let systems = bits.len() as u64;
    let steps = u.step_budget(systems);
    let c = u.cell_size(systems);
    let (w, h) = (pattern.width(), pattern.height());
    let mut report = DiffersReport::default();
    let mut witnesses = Vec::new();
    let flips: HashMap<u64, u8> =
        bits.records.iter().filter(|r| r.reason == Reason::Flip).map(|r| (r.serial, r.bit)).collect();
    for (serial, sys) in sf_enumerator(u).enumerate().take(bits.len()) {
        let serial = serial as u64;
        let Some(&bit) = flips.get(&serial) else { continue };
        report.flips += 1;
        let probe = simulate_sf(&sys, steps, c, serial, u.mode)?;
        let Some((axis, color)) = probe.probed.filter(|_| probe.reason == Reason::Flip && probe.bit == bit) else {
            witnesses.push(wit(serial, (0, 0), format!("replay gave bit {} ({})", probe.bit, probe.reason)));
            continue;
        };
        let k = serial as u32;
        for y in 0..h {
            let r = h - 1 - y;
            for x in 0..w {
                let (on_axis, target) = match axis {
                    Axis::Horizontal => (u64::from(x) % c == 0, (x + k < w).then(|| (x + k, y))),
                    Axis::Vertical => (u64::from(r) % c == 0, (y >= k).then(|| (x, y - k))),
                };
                if !on_axis {
                    continue;
                }
                if !color_bits(pattern.get(x, y)).is_some_and(|(b, _, _)| b) {
                    witnesses.push(wit(serial, (x, y), "boundary location is not boundary-colored".into()));
                    continue;
                }
                let Some((tx, ty)) = target else { continue };
                report.checked += 1;
                let found = color_bits(pattern.get(tx, ty)).map(|(_, row, col)| match axis {
                    Axis::Horizontal => col,
                    Axis::Vertical => row,
                });
                if found != Some(bit) {
                    witnesses.push(wit(
                        serial,
                        (tx, ty),
                        format!("system showed color {color}, cell has class {found:?}, expected {bit}"),
                    ));
                }
            }
        }
    }
    report.holds = witnesses.is_empty();
    report.witnesses = witnesses;
    Ok(report)
}

fn wit(serial: u64, loc: (u32, u32), detail: String) -> Witness {
    Witness { serial, loc, detail }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compilers::{compile_single_pixel, compile_square_pattern, compile_stripes, Budget};
    use crate::diag::{compute_bits, render_pn};
    use crate::model::{default_palette, Glue, Loc, TileAssemblySystem, TileSet, TileType};
    use crate::patterns::{single_pixel, two_color_palette};

    #[test]
    fn stripes_pass() {
        let cs = compile_stripes(16, 3, 5).unwrap();
        let r = verify_weak(&cs, 20, 7, false).unwrap();
        assert!(r.all_match && r.all_terminal);
        assert_eq!(r.distinct_terminals, 1);
        assert!(r.to_string().starts_with("VERIFY pass trials=20 distinct=1 exhaustive=0"));
    }

    #[test]
    fn wrong_target_is_reported() {
        let mut cs = compile_single_pixel(8, 3, 3).unwrap();
        cs.target = single_pixel(8, 3, 4).unwrap();
        let r = verify_weak(&cs, 3, 1, false).unwrap();
        assert!(!r.all_match);
        let m = r.first_mismatch.unwrap();
        assert!(m.loc == (3, 3) || m.loc == (3, 4), "{m:?}");
        assert!(r.to_string().starts_with("VERIFY fail"));
        assert!(r.to_string().ends_with(&format!("mismatch={},{}", m.loc.0, m.loc.1)));
    }

    fn single_tile(color: u16) -> CompiledSystem {
        let ts = TileSet { tiles: vec![TileType::new("w", color, vec![Glue::null(); 4])], palette: two_color_palette() };
        let system = TileAssemblySystem::new(ts, vec![(Loc::new(0, 0), 0)], 1, Dim::Two).unwrap();
        CompiledSystem { system, target: Pattern::new(1, 1, two_color_palette(), 0), budget: Budget::log_n(1) }
    }

    #[test]
    fn one_tile_strict() {
        let r = verify_weak(&single_tile(0), 5, 0, true).unwrap();
        assert!(r.passed() && r.exhaustive);
        let r = verify_weak(&single_tile(1), 5, 0, true).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn strict_rejects_foreign_colors() {
        // Same shape, but the tile set carries a color the pattern never uses.
        let mut cs = single_tile(0);
        cs.system.tileset.palette = default_palette();
        cs.system.tileset.tiles.push(TileType::new("red", 2, vec![Glue::null(); 4]));
        assert!(verify_weak(&cs, 1, 0, false).unwrap().passed());
        assert!(!verify_weak(&cs, 1, 0, true).unwrap().passed());
    }

    #[test]
    fn square_is_strict() {
        let p = Pattern::from_fn(12, 12, two_color_palette(), |x, y| ((x * 7 + y * 3) % 5 < 2) as u16);
        let cs = compile_square_pattern(&p).unwrap();
        assert!(verify_weak(&cs, 4, 3, true).unwrap().passed());
    }

    #[test]
    fn non_terminating_is_an_error() {
        let grow = TileType::new("g", 0, vec![Glue::null(), Glue::new("a", 1), Glue::null(), Glue::new("a", 1)]);
        let ts = TileSet { tiles: vec![grow], palette: two_color_palette() };
        let system = TileAssemblySystem::new(ts, vec![(Loc::new(0, 0), 0)], 1, Dim::Two).unwrap();
        let cs = CompiledSystem { system, target: Pattern::new(2, 1, two_color_palette(), 0), budget: Budget::log_n(2) };
        assert!(matches!(verify_weak(&cs, 2, 0, false), Err(VerifyError::NonTerminating { .. })));
    }

    #[test]
    fn audit_flags_overrun() {
        let mut cs = compile_stripes(16, 2, 2).unwrap();
        cs.budget.cap = 3;
        let (rows, _) = complexity_audit(&[("stripes 16 2 2".into(), &cs)]);
        assert!(!rows[0].within_budget);
    }

    #[test]
    fn single_pixel_growth() {
        let cs: Vec<_> = [8, 16, 32, 64].iter().map(|&n| compile_single_pixel(n, n / 2, n / 2).unwrap()).collect();
        let rows: Vec<_> = cs.iter().map(|c| audit_row("single-pixel", c)).collect();
        let g = growth_summary(&rows);
        assert!(g.max_doubling_increase.unwrap() <= 80, "{g:?}");
        assert!(rows.iter().all(|r| r.within_budget));
    }

    fn micro() -> Universe {
        "tiles=1,colors=8,coops=2,coopbase=166,steps=40,pattsize=6".parse().unwrap()
    }

    #[test]
    fn pipeline_differs() {
        let u = micro();
        let bits = compute_bits(&u).unwrap();
        assert!(bits.records.iter().any(|r| r.reason == Reason::Flip));
        let p = render_pn(&bits.bits(), 6, 30);
        let r = pn_differs(&p, &u, &bits).unwrap();
        assert!(r.holds && r.checked > 0, "{:?}", r.witnesses.first());
    }

    #[test]
    fn corrupted_boundary_is_caught() {
        let u = micro();
        let bits = compute_bits(&u).unwrap();
        let serial = bits.records.iter().find(|r| r.reason == Reason::Flip && r.serial > 0).unwrap().serial;
        let sys = sf_enumerator(&u).nth(serial as usize).unwrap();
        let (axis, _) = simulate_sf(&sys, 40, 6, serial, u.mode).unwrap().probed.unwrap();
        let mut p = render_pn(&bits.bits(), 6, 30);
        // Offset cell measured from the NW corner, which is on both boundary axes.
        let k = serial as u32;
        let (x, y) = match axis {
            Axis::Horizontal => (k, 29),
            Axis::Vertical => (0, 29 - k),
        };
        let (b, row, col) = color_bits(p.get(x, y)).unwrap();
        let swapped = match axis {
            Axis::Horizontal => crate::diag::pn_color(b, row, 1 - col),
            Axis::Vertical => crate::diag::pn_color(b, 1 - row, col),
        };
        p.set(x, y, swapped);
        let r = pn_differs(&p, &u, &bits).unwrap();
        assert!(!r.holds);
        assert!(r.witnesses.iter().any(|w| w.loc == (x, y)));
    }

    #[test]
    fn no_flips_is_vacuous() {
        let u: Universe = "tiles=1,colors=2,coops=2,steps=40,pattsize=6".parse().unwrap();
        let bits = compute_bits(&u).unwrap();
        assert!(bits.records.iter().all(|r| r.reason != Reason::Flip));
        let r = pn_differs(&render_pn(&bits.bits(), 6, 12), &u, &bits).unwrap();
        assert!(r.holds && r.flips == 0);
    }
}
