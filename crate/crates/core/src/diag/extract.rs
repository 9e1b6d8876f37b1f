//! Bounded runs of strength-free systems and the index probe that turns each
//! run into one bit.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::render::PnColor;
use super::sf::{count_sf_systems, sf_enumerator, SfRules, SfSystem};
use super::{DiagError, Mode, Universe};
use crate::model::Assembly;
use crate::sim::{Policy, SimState};

/// Systems `compute_bits` accepts unless told otherwise.
pub const DEFAULT_MAX_SYSTEMS: u64 = 1 << 20;
/// Cap on `systems * (steps + 1)`, the attachments a full run may make.
pub const DEFAULT_MAX_WORK: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    Flip,
    EmptyFrontierEarly,
    NoBoundaryColor,
    TooSmall,
    NoIndexTile,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::Flip => "flip",
            Reason::EmptyFrontierEarly => "emptyFrontierEarly",
            Reason::NoBoundaryColor => "noBoundaryColor",
            Reason::TooSmall => "tooSmall",
            Reason::NoIndexTile => "noIndexTile",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Reason {
    type Err = DiagError;

    fn from_str(s: &str) -> Result<Reason, DiagError> {
        [Reason::Flip, Reason::EmptyFrontierEarly, Reason::NoBoundaryColor, Reason::TooSmall, Reason::NoIndexTile]
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| DiagError::BadBits(format!("unknown reason {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// Outcome of inspecting one assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Probe {
    pub bit: u8,
    pub reason: Reason,
    /// Scan direction and color of the probed tile, for flips.
    pub probed: Option<(Axis, u16)>,
}

impl Probe {
    fn fail(reason: Reason) -> Probe {
        Probe { bit: 0, reason, probed: None }
    }
}

fn is_boundary(c: u16) -> bool {
    [PnColor::Red, PnColor::Green, PnColor::Black, PnColor::White].iter().any(|p| *p as u16 == c)
}

/// Bit that disagrees with the probed color.
pub(crate) fn flip_bit(axis: Axis, index: u64, color: u16) -> u8 {
    use PnColor::*;
    let ones: [PnColor; 2] = match (axis, index == 0) {
        (Axis::Horizontal, true) => [White, Green],
        (Axis::Horizontal, false) => [Aqua, Blue],
        (Axis::Vertical, true) => [White, Black],
        (Axis::Vertical, false) => [Aqua, Yellow],
    };
    u8::from(!ones.iter().any(|p| *p as u16 == color))
}

/// First-placed tile color per coordinate value.
fn first_by(asm: &Assembly, color_of: &dyn Fn(usize) -> u16, key: fn(&crate::model::Loc) -> i32) -> HashMap<i32, u16> {
    let mut m = HashMap::new();
    for (l, t) in asm.placements() {
        m.entry(key(l)).or_insert_with(|| color_of(*t));
    }
    m
}

/// Finds the first boundary-colored column (scanning east from the west edge)
/// or row (scanning south from the north edge) and reports the color `index`
/// steps further along.
pub fn get_pattern_value(asm: &Assembly, color_of: &dyn Fn(usize) -> u16, patt_size: u64, index: u64) -> Probe {
    let Some((lo, hi)) = asm.bounds() else {
        return Probe::fail(Reason::TooSmall);
    };
    if index >= patt_size {
        return Probe::fail(Reason::TooSmall);
    }
    let (axis, firsts, coords, step): (Axis, _, Vec<i32>, i64) = if (hi.x - lo.x) as u64 >= patt_size {
        (Axis::Horizontal, first_by(asm, color_of, |l| l.x), (lo.x..=hi.x).collect(), 1)
    } else if (hi.y - lo.y) as u64 >= patt_size {
        (Axis::Vertical, first_by(asm, color_of, |l| l.y), (lo.y..=hi.y).rev().collect(), -1)
    } else {
        return Probe::fail(Reason::TooSmall);
    };
    let Some(base) = coords.iter().copied().find(|c| firsts.get(c).copied().is_some_and(is_boundary)) else {
        return Probe::fail(Reason::NoBoundaryColor);
    };
    let target = i64::from(base) + step * index as i64;
    let Some(&color) = i32::try_from(target).ok().and_then(|t| firsts.get(&t)) else {
        return Probe::fail(Reason::NoIndexTile);
    };
    Probe { bit: flip_bit(axis, index, color), reason: Reason::Flip, probed: Some((axis, color)) }
}

/// Runs `sys` for at most `num_steps + 1` attachments in PaperOrder and probes
/// the result. A frontier that empties at any point gives bit 0.
pub fn simulate_sf(sys: &SfSystem, num_steps: u64, patt_size: u64, index: u64, mode: Mode) -> Result<Probe, DiagError> {
    if mode == Mode::PaperFlow {
        return Err(DiagError::Unsupported(
            "paperFlow needs strength-free to standard conversion, which is not implemented".into(),
        ));
    }
    let rules = SfRules::new(sys);
    let mut st = SimState::new(&rules);
    for _ in 0..=num_steps {
        st.add_tile(Policy::PaperOrder);
        if st.frontier_len() == 0 {
            return Ok(Probe::fail(Reason::EmptyFrontierEarly));
        }
    }
    let color_of = |t: usize| sys.tiles[t].color as u16;
    Ok(get_pattern_value(&st.asm, &color_of, patt_size, index))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitRecord {
    pub serial: u64,
    pub bit: u8,
    pub reason: Reason,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitSequence {
    pub records: Vec<BitRecord>,
}

impl BitSequence {
    pub fn bits(&self) -> Vec<u8> {
        self.records.iter().map(|r| r.bit).collect()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// One `0`/`1` character per bit, newline-terminated.
    pub fn bit_string(&self) -> String {
        let mut s: String = self.records.iter().map(|r| if r.bit == 1 { '1' } else { '0' }).collect();
        s.push('\n');
        s
    }

    /// `BIT <serial> <value> <reason>` lines.
    pub fn sidecar(&self) -> String {
        self.records.iter().map(|r| format!("BIT {} {} {}\n", r.serial, r.bit, r.reason)).collect()
    }

    pub fn parse_sidecar(text: &str) -> Result<BitSequence, DiagError> {
        let mut records = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || DiagError::BadBits(format!("bad sidecar line {line:?}"));
            if f.len() != 4 || f[0] != "BIT" {
                return Err(bad());
            }
            let serial = f[1].parse().map_err(|_| bad())?;
            let bit = match f[2] {
                "0" => 0,
                "1" => 1,
                _ => return Err(bad()),
            };
            records.push(BitRecord { serial, bit, reason: f[3].parse()? });
        }
        Ok(BitSequence { records })
    }
}

/// Parses a plain `0101...` string (whitespace ignored).
pub fn parse_bit_string(s: &str) -> Result<Vec<u8>, DiagError> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(DiagError::BadBits(format!("unexpected character {c:?}"))),
        })
        .collect()
}

pub fn compute_bits(u: &Universe) -> Result<BitSequence, DiagError> {
    compute_bits_capped(u, DEFAULT_MAX_SYSTEMS, DEFAULT_MAX_WORK)
}

/// Runs every enumerated system, in order, with the universe's budgets.
pub fn compute_bits_capped(u: &Universe, max_systems: u64, max_work: u64) -> Result<BitSequence, DiagError> {
    u.validate()?;
    let count = count_sf_systems(u);
    let systems = match super::sf::count_u64(u) {
        Some(n) if n <= max_systems => n,
        _ => return Err(DiagError::UniverseTooLarge { what: format!("{count} systems"), cap: max_systems }),
    };
    let steps = u.step_budget(systems);
    match systems.checked_mul(steps.saturating_add(1)) {
        Some(w) if w <= max_work => {}
        _ => {
            return Err(DiagError::UniverseTooLarge {
                what: format!("{systems} systems x {} attachments", steps.saturating_add(1)),
                cap: max_work,
            })
        }
    }
    let patt = u.cell_size(systems);
    let mut records = Vec::with_capacity(systems as usize);
    for (serial, sys) in sf_enumerator(u).enumerate() {
        let serial = serial as u64;
        let p = simulate_sf(&sys, steps, patt, serial, u.mode)?;
        records.push(BitRecord { serial, bit: p.bit, reason: p.reason });
    }
    debug_assert_eq!(records.len() as u64, systems);
    Ok(BitSequence { records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::coop::{any_of, coop_index};
    use crate::diag::SfTile;
    use crate::model::Loc;

    fn asm_of(cells: &[(i32, i32, u16)]) -> (Assembly, Vec<u16>) {
        let mut a = Assembly::default();
        let mut colors = Vec::new();
        for (i, &(x, y, c)) in cells.iter().enumerate() {
            a.place(Loc::new(x, y), i).unwrap();
            colors.push(c);
        }
        (a, colors)
    }

    fn probe(cells: &[(i32, i32, u16)], patt: u64, index: u64) -> Probe {
        let (a, colors) = asm_of(cells);
        get_pattern_value(&a, &|t| colors[t], patt, index)
    }

    fn row(colors: &[PnColor]) -> Vec<(i32, i32, u16)> {
        colors.iter().enumerate().map(|(x, c)| (x as i32, 0, *c as u16)).collect()
    }

    #[test]
    fn yellow_six_east_of_black() {
        use PnColor::*;
        let cells = row(&[Fuchsia, Black, Aqua, Aqua, Aqua, Aqua, Aqua, Yellow, Aqua, Aqua]);
        let p = probe(&cells, 8, 6);
        assert_eq!((p.bit, p.reason), (1, Reason::Flip));
        assert_eq!(p.probed, Some((Axis::Horizontal, Yellow as u16)));
    }

    #[test]
    fn four_branches() {
        use PnColor::*;
        // horizontal, index 0: White probes to 0, Red to 1
        assert_eq!(probe(&row(&[White; 9]), 8, 0).bit, 0);
        assert_eq!(probe(&row(&[Red; 9]), 8, 0).bit, 1);
        // horizontal interior: Blue is column bit 1
        assert_eq!(probe(&row(&[Green, Blue, Blue, Blue, Blue, Blue, Blue, Blue, Blue]), 8, 3).bit, 0);
        assert_eq!(probe(&row(&[Green, Yellow, Yellow, Yellow, Yellow, Yellow, Yellow, Yellow, Yellow]), 8, 3).bit, 1);
        // vertical scans run from the north edge southward
        let col = |cs: &[PnColor]| -> Vec<(i32, i32, u16)> {
            cs.iter().enumerate().map(|(i, c)| (0, -(i as i32), *c as u16)).collect()
        };
        assert_eq!(probe(&col(&[Black; 9]), 8, 0).bit, 0);
        assert_eq!(probe(&col(&[Green; 9]), 8, 0).bit, 1);
        let p = probe(&col(&[Aqua, Red, Blue, Yellow, Aqua, Aqua, Aqua, Aqua, Aqua]), 8, 2);
        assert_eq!(p.probed, Some((Axis::Vertical, Yellow as u16)));
        assert_eq!(p.bit, 0);
        assert_eq!(probe(&col(&[Aqua, Red, Blue, Blue, Aqua, Aqua, Aqua, Aqua, Aqua]), 8, 2).bit, 1);
    }

    #[test]
    fn failure_paths() {
        use PnColor::*;
        assert_eq!(probe(&row(&[Aqua; 12]), 8, 3).reason, Reason::NoBoundaryColor);
        assert_eq!(probe(&row(&[Aqua; 4]), 8, 3).reason, Reason::TooSmall);
        let mut cells = row(&[Aqua, Aqua, Aqua, Aqua, Aqua, Aqua, Aqua, Red, Aqua]);
        assert_eq!(probe(&cells, 8, 3).reason, Reason::NoIndexTile);
        cells.push((9, 0, Aqua as u16));
        cells.push((10, 0, Aqua as u16));
        assert_eq!(probe(&cells, 8, 3).reason, Reason::Flip);
        assert_eq!(probe(&row(&[White; 20]), 8, 8).reason, Reason::TooSmall);
    }

    #[test]
    fn first_tile_wins_per_column() {
        use PnColor::*;
        // (0,0) Aqua placed before (0,1) Red: column 0 reads Aqua
        let cells = vec![
            (0, 0, Aqua as u16),
            (0, 1, Red as u16),
            (1, 0, Aqua as u16),
            (2, 0, White as u16),
            (3, 0, Aqua as u16),
            (4, 0, Aqua as u16),
        ];
        let p = probe(&cells, 4, 2);
        assert_eq!(p.probed, Some((Axis::Horizontal, Aqua as u16)));
    }

    #[test]
    fn simulation_examples() {
        let dead = SfSystem::new(vec![SfTile::new(0, 0, 0, 0, 0, 0)], 0);
        let p = simulate_sf(&dead, 100, 8, 0, Mode::DirectSf).unwrap();
        assert_eq!((p.bit, p.reason), (0, Reason::EmptyFrontierEarly));
        // White monochrome growth: every tile adjacency suffices, but the
        // color is a boundary color; use Aqua (4) so no boundary appears.
        let blob = SfSystem::new(vec![SfTile::new(0, 0, 0, 0, 4, 167)], 0);
        let p = simulate_sf(&blob, 200, 8, 0, Mode::DirectSf).unwrap();
        assert_eq!((p.bit, p.reason), (0, Reason::NoBoundaryColor));
        let white = SfSystem::new(vec![SfTile::new(0, 0, 0, 0, 0, 167)], 0);
        let p = simulate_sf(&white, 200, 8, 0, Mode::DirectSf).unwrap();
        assert_eq!((p.bit, p.reason), (0, Reason::Flip));
        assert!(simulate_sf(&white, 10, 8, 0, Mode::PaperFlow).is_err());
    }

    #[test]
    fn line_runs_until_budget() {
        let any = coop_index(any_of(0xF)).unwrap() as u32;
        let line = SfSystem::new(vec![SfTile::new(0, 1, 0, 1, 3, any)], 0);
        // Green line, probe 5 east of its west end
        let p = simulate_sf(&line, 40, 8, 5, Mode::DirectSf).unwrap();
        assert_eq!((p.bit, p.reason), (1, Reason::Flip));
    }

    #[test]
    fn bits_and_sidecar() {
        let u = Universe { num_colors: 2, num_coop_sets: 2, steps: Some(50), ..Universe::new(1) };
        let a = compute_bits(&u).unwrap();
        assert_eq!(a.len(), 64);
        assert_eq!(a, compute_bits(&u).unwrap());
        // table entries 0 and 1 never let a tile attach
        assert!(a.records.iter().all(|r| r.bit == 0 && r.reason == Reason::EmptyFrontierEarly));
        assert_eq!(BitSequence::parse_sidecar(&a.sidecar()).unwrap(), a);
        assert_eq!(a.bit_string().trim().len(), 64);
        assert_eq!(parse_bit_string("01 1").unwrap(), vec![0, 1, 1]);
        let big = Universe::new(1);
        assert!(matches!(compute_bits_capped(&big, 100, DEFAULT_MAX_WORK), Err(DiagError::UniverseTooLarge { .. })));
        // 21504 systems fit the system cap, but not their (2 * 21504)^2 step budgets
        assert!(matches!(compute_bits(&big), Err(DiagError::UniverseTooLarge { .. })));
    }

    #[test]
    fn shifted_coops_make_flips() {
        let u = Universe { num_colors: 2, num_coop_sets: 2, coop_base: 166, steps: Some(100), ..Universe::new(1) };
        let a = compute_bits(&u).unwrap();
        assert!(a.records.iter().any(|r| r.reason == Reason::Flip));
    }
}
