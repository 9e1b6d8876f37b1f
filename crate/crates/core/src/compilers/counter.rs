//! Zig-zag binary counter gadget.
//!
//! Rows are stacked along `forward`; position `k` of row `r` sits at
//! `origin + r*forward + k*left`, position 0 holding the least significant
//! bit. Odd rows are built from position 0 upward and carry the increment;
//! even rows run back down and use the prefix-AND bits left by the odd row
//! below. Each cell also tracks whether the row value has reached `end`, so
//! the last row knows to stop and expose `done`.
//!
//! An optional second register (`modulus`) counts alongside the main value
//! modulo `period`; rows where it reads 0 are Black.

use std::collections::BTreeSet;

use thiserror::Error;

use super::blueprint::{g, Blueprint, Cell};
use crate::model::{Dim, Dir, Glue, Loc, TileType};
use crate::patterns::{two_color_palette, BLACK, WHITE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CounterError {
    #[error("counter start {start} is after end {end}")]
    StartAfterEnd { start: u64, end: u64 },
    #[error("counter values up to {end} do not fit in {width} bits")]
    TooNarrow { end: u64, width: u32 },
    #[error("bad counter spec: {0}")]
    Spec(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModRegister {
    pub width: u32,
    pub start: u64,
    pub period: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterSpec {
    /// Width of the main register.
    pub width: u32,
    pub start: u64,
    pub end: u64,
    pub forward: Dir,
    pub left: Dir,
    pub namespace: String,
    pub modulus: Option<ModRegister>,
    /// Per-position forced Black; shorter vectors are padded with `false`.
    pub col_black: Vec<bool>,
    /// Glue on the outer side of the last position, for White and Black rows.
    pub left_face: [Glue; 2],
    /// Glue on the outer side of position 0, for White and Black rows.
    pub right_face: [Glue; 2],
    pub done: Option<Glue>,
}

impl CounterSpec {
    pub fn new(width: u32, start: u64, end: u64, forward: Dir, namespace: &str) -> CounterSpec {
        CounterSpec {
            width,
            start,
            end,
            forward,
            left: forward.left(),
            namespace: namespace.to_string(),
            modulus: None,
            col_black: Vec::new(),
            left_face: Default::default(),
            right_face: Default::default(),
            done: None,
        }
    }

    pub fn total_width(&self) -> u32 {
        self.width + self.modulus.as_ref().map_or(0, |m| m.width)
    }

    pub fn rows(&self) -> u64 {
        self.end - self.start
    }

    pub fn cell(&self, origin: Loc, r: u64, k: u32) -> Loc {
        let (fx, fy, fz) = self.forward.offset();
        let (lx, ly, lz) = self.left.offset();
        let (r, k) = (r as i32, k as i32);
        Loc::new3(origin.x + r * fx + k * lx, origin.y + r * fy + k * ly, origin.z + r * fz + k * lz)
    }

    /// Position at which row `r` ends.
    pub fn row_end(&self, r: u64) -> u32 {
        if r % 2 == 1 {
            self.total_width() - 1
        } else {
            0
        }
    }

    /// Location of the cell carrying `done` when rows start at `origin`.
    pub fn done_cell(&self, origin: Loc) -> Loc {
        self.cell(origin, self.rows(), self.row_end(self.rows()))
    }

    fn validate(&self) -> Result<(), CounterError> {
        if self.start > self.end {
            return Err(CounterError::StartAfterEnd { start: self.start, end: self.end });
        }
        if self.width == 0 || self.width >= 63 || self.end >= 1u64 << self.width {
            return Err(CounterError::TooNarrow { end: self.end, width: self.width });
        }
        if self.left != self.forward.left() && self.left != self.forward.right() {
            return Err(CounterError::Spec("left must be perpendicular to forward".into()));
        }
        if let Some(m) = &self.modulus {
            if m.period == 0 || m.start >= m.period || (m.period - 1) >> m.width != 0 {
                return Err(CounterError::Spec("modulus register does not fit".into()));
            }
        }
        Ok(())
    }

    fn is_mod(&self, k: u32) -> bool {
        k >= self.width
    }

    fn col_black(&self, k: u32) -> bool {
        self.col_black.get(k as usize).copied().unwrap_or(false)
    }

    fn label(&self, rest: std::fmt::Arguments) -> String {
        format!("{}:{}", self.namespace, rest)
    }
}

fn bit(v: u64, i: u32) -> bool {
    (v >> i) & 1 == 1
}

fn b(x: bool) -> u8 {
    x as u8
}

/// Per-cell description before it is placed in global coordinates.
struct RowCell {
    back: Glue,
    side_in: Glue,
    side_out: Glue,
    forward: Glue,
    row_black: bool,
}

fn flags(spec: &CounterSpec, reset: bool) -> String {
    if spec.modulus.is_some() {
        format!("{}", b(reset))
    } else {
        String::new()
    }
}

/// Register values held by the row below the first stepper row.
fn initial_values(spec: &CounterSpec) -> (u64, u64) {
    (spec.start, spec.modulus.as_ref().map_or(0, |m| m.start))
}

fn reset_after(spec: &CounterSpec, u: u64) -> bool {
    spec.modulus.as_ref().is_some_and(|m| u == m.period - 1)
}

fn field_bit(spec: &CounterSpec, v: u64, u: u64, k: u32) -> bool {
    if spec.is_mod(k) {
        bit(u, k - spec.width)
    } else {
        bit(v, k)
    }
}

/// Forward-side glues of the row holding `start` (the "base" of the gadget),
/// position by position.
pub fn base_glues(spec: &CounterSpec) -> Vec<Glue> {
    let (v0, u0) = initial_values(spec);
    let w = spec.total_width();
    let mut out = Vec::with_capacity(w as usize);
    for k in 0..w {
        let bk = b(field_bit(spec, v0, u0, k));
        if k == 0 {
            if spec.start == spec.end {
                out.push(spec.done.clone().unwrap_or_default());
            } else {
                let f = flags(spec, reset_after(spec, u0));
                out.push(g(spec.label(format_args!("te:{bk}:{f}")), 2));
            }
        } else {
            out.push(g(spec.label(format_args!("e{k}:{bk}")), 1));
        }
    }
    out
}

/// Whether the row holding `start` is Black (only meaningful with a modulus).
pub fn base_row_black(spec: &CounterSpec) -> bool {
    spec.modulus.as_ref().is_some_and(|m| m.start == 0)
}

fn simulate_rows(spec: &CounterSpec) -> Vec<Vec<RowCell>> {
    let w = spec.total_width();
    let (mut v, mut u) = initial_values(spec);
    // Bits and prefix-AND flags exposed by the previous row.
    let mut below_bits: Vec<bool> = (0..w).map(|k| field_bit(spec, v, u, k)).collect();
    let mut below_p: Vec<bool> = vec![false; w as usize];
    let mut reset = reset_after(spec, u);
    let mut rows = Vec::new();
    for r in 1..=spec.rows() {
        let odd = r % 2 == 1;
        let f = flags(spec, reset);
        let black = spec.modulus.is_some() && reset;
        let mut cells: Vec<Option<RowCell>> = (0..w).map(|_| None).collect();
        let mut new_bits = vec![false; w as usize];
        let mut new_p = vec![false; w as usize];
        let order: Vec<u32> = if odd { (0..w).collect() } else { (0..w).rev().collect() };
        let start_k = order[0];
        let end_k = *order.last().unwrap();
        // Running state.
        let mut carry = true;
        let mut q = true;
        let mut em = true;
        let mut eu = true;
        let mut side_in = Glue::null();
        let (v_target, u_target) = (spec.end, spec.modulus.as_ref().map_or(0, |m| m.period - 1));
        for &k in &order {
            let bk = below_bits[k as usize];
            let back = if k == start_k {
                if odd {
                    g(spec.label(format_args!("te:{}:{f}", b(bk))), 2)
                } else {
                    let pk = below_p[k as usize];
                    g(spec.label(format_args!("to:{}{}:{f}", b(bk), b(pk))), 2)
                }
            } else if odd {
                g(spec.label(format_args!("e{k}:{}", b(bk))), 1)
            } else {
                let pk = below_p[k as usize];
                g(spec.label(format_args!("o{k}:{}{}", b(bk), b(pk))), 1)
            };
            if odd && k == spec.width {
                carry = true;
                q = true;
            }
            let new = if spec.is_mod(k) && reset {
                false
            } else if odd {
                bk ^ carry
            } else {
                bk ^ below_p[k as usize]
            };
            if odd {
                carry &= bk;
                new_p[k as usize] = q;
                q &= new;
            }
            if spec.is_mod(k) {
                eu &= new == bit(u_target, k - spec.width);
            } else {
                em &= new == bit(v_target, k);
            }
            new_bits[k as usize] = new;
            let side_out = if k == end_k {
                Glue::null()
            } else if odd {
                g(spec.label(format_args!("so{}:{}{}{}{}{f}", k + 1, b(carry), b(q), b(em), b(eu))), 1)
            } else {
                g(spec.label(format_args!("se{}:{}{}{f}", k - 1, b(em), b(eu))), 1)
            };
            let forward = if k == end_k {
                if em {
                    spec.done.clone().unwrap_or_default()
                } else {
                    let f2 = flags(spec, spec.modulus.is_some() && eu);
                    if odd {
                        g(spec.label(format_args!("to:{}{}:{f2}", b(new), b(new_p[k as usize]))), 2)
                    } else {
                        g(spec.label(format_args!("te:{}:{f2}", b(new))), 2)
                    }
                }
            } else if odd {
                g(spec.label(format_args!("o{k}:{}{}", b(new), b(new_p[k as usize]))), 1)
            } else {
                g(spec.label(format_args!("e{k}:{}", b(new))), 1)
            };
            cells[k as usize] = Some(RowCell {
                back,
                side_in: side_in.clone(),
                side_out: side_out.clone(),
                forward,
                row_black: black,
            });
            side_in = side_out;
        }
        v += 1;
        u = if reset { 0 } else { u + 1 };
        debug_assert_eq!(
            (0..w).map(|k| field_bit(spec, v, u, k)).collect::<Vec<_>>(),
            new_bits,
            "row machine disagrees with arithmetic"
        );
        debug_assert_eq!(em, v == spec.end);
        reset = reset_after(spec, u);
        below_bits = new_bits;
        below_p = new_p;
        rows.push(cells.into_iter().map(|c| c.expect("every position visited")).collect());
    }
    rows
}

/// Places rows `1..=rows()` into the blueprint, above a row 0 at `origin`
/// that the caller provides (its forward faces must be `base_glues`).
/// Returns the location of the cell exposing `done`.
pub fn place_rows(bp: &mut Blueprint, spec: &CounterSpec, origin: Loc) -> Result<Loc, CounterError> {
    spec.validate()?;
    let w = spec.total_width();
    let rows = simulate_rows(spec);
    for (ri, row) in rows.iter().enumerate() {
        let r = ri as u64 + 1;
        let odd = r % 2 == 1;
        // Side glues: odd rows pass information toward `left`, even rows toward `right`.
        let (in_dir, out_dir) = if odd { (spec.left.opposite(), spec.left) } else { (spec.left, spec.left.opposite()) };
        for k in 0..w {
            let rc = &row[k as usize];
            let color = if rc.row_black || spec.col_black(k) { BLACK } else { WHITE };
            let mut cell = Cell::new(&spec.namespace, color);
            cell.glues[spec.forward.opposite().index()] = rc.back.clone();
            cell.glues[spec.forward.index()] = rc.forward.clone();
            cell.glues[in_dir.index()] = rc.side_in.clone();
            cell.glues[out_dir.index()] = rc.side_out.clone();
            let row_black = usize::from(rc.row_black);
            debug_assert_eq!(rc.row_black, row_is_black(spec, r));
            if k == w - 1 {
                cell.glues[spec.left.index()] = spec.left_face[row_black].clone();
            }
            if k == 0 {
                cell.glues[spec.left.opposite().index()] = spec.right_face[row_black].clone();
            }
            bp.put(spec.cell(origin, r, k), cell);
        }
    }
    Ok(spec.done_cell(origin))
}

fn row_is_black(spec: &CounterSpec, r: u64) -> bool {
    match &spec.modulus {
        Some(m) => (m.start + r) % m.period == 0,
        None => false,
    }
}

/// A standalone counter: a hard-coded row holding `start` plus the stepper
/// tiles, as its own τ=2 system seeded at position 0 of the first row.
#[derive(Debug, Clone)]
pub struct CounterGadget {
    pub system: crate::model::TileAssemblySystem,
    /// Names of the tiles of the hard-coded initial row.
    pub initial: Vec<String>,
    pub steppers: Vec<TileType>,
    pub base: Vec<Glue>,
    pub done: Option<Glue>,
    pub left_face: [Glue; 2],
    pub right_face: [Glue; 2],
}

pub fn make_counter(spec: &CounterSpec) -> Result<CounterGadget, CounterError> {
    spec.validate()?;
    let w = spec.total_width();
    let origin = Loc::new(0, 0);
    let mut bp = Blueprint::new(Dim::Two, 2, two_color_palette());
    let base = base_glues(spec);
    let row0_black = base_row_black(spec);
    let init_group = format!("{}:init", spec.namespace);
    for k in 0..w {
        let color = if row0_black || spec.col_black(k) { BLACK } else { WHITE };
        let mut cell = Cell::new(&init_group, color);
        cell.glues[spec.forward.index()] = base[k as usize].clone();
        if k == w - 1 {
            cell.glues[spec.left.index()] = spec.left_face[usize::from(row0_black)].clone();
        }
        if k == 0 {
            cell.glues[spec.left.opposite().index()] = spec.right_face[usize::from(row0_black)].clone();
        }
        bp.put(spec.cell(origin, 0, k), cell);
    }
    let path: Vec<Loc> = (0..w).map(|k| spec.cell(origin, 0, k)).collect();
    super::blueprint::hard_path(&mut bp, &format!("{}:init", spec.namespace), &path, 2);
    bp.set_seed(path[0]);
    place_rows(&mut bp, spec, origin)?;
    let system = bp.build();
    let initial: Vec<String> = path
        .iter()
        .map(|&l| {
            let glues = &bp.get(l).expect("initial row cell").glues;
            system
                .tiles()
                .iter()
                .find(|t| t.glues[..] == glues[..4] && t.name.starts_with(&init_group))
                .expect("initial tile present")
                .name
                .clone()
        })
        .collect();
    let steppers = system.tiles().iter().filter(|t| !initial.contains(&t.name)).cloned().collect();
    Ok(CounterGadget {
        system,
        initial,
        steppers,
        base,
        done: spec.done.clone(),
        left_face: spec.left_face.clone(),
        right_face: spec.right_face.clone(),
    })
}

/// Labels used by a set of tiles, excluding null glues.
pub fn labels(tiles: &[TileType]) -> BTreeSet<String> {
    tiles.iter().flat_map(|t| t.glues.iter()).filter(|g| !g.is_null()).map(|g| g.label.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::assembly_pattern;
    use crate::sim::{Policy, SimState, TasRules};

    fn grow(sys: &crate::model::TileAssemblySystem, policy: Policy) -> crate::model::Assembly {
        let rules = TasRules::new(sys);
        let mut st = SimState::new(&rules);
        assert!(st.run(100_000, policy).unwrap().terminal);
        st.asm
    }

    #[test]
    fn three_bit_counter_is_a_rectangle() {
        let mut spec = CounterSpec::new(3, 0, 7, Dir::N, "c");
        spec.done = Some(g("c:done", 2));
        let gadget = make_counter(&spec).unwrap();
        for policy in [Policy::PaperOrder, Policy::UniformRandom(3)] {
            let asm = grow(&gadget.system, policy);
            assert_eq!(asm.len(), 24);
            let (lo, hi) = asm.bounds().unwrap();
            assert_eq!((lo.x, lo.y, hi.x, hi.y), (-2, 0, 0, 7));
            // Row 7 is odd and ends at position 2, i.e. x = -2.
            let t = asm.get(Loc::new(-2, 7)).unwrap();
            assert_eq!(gadget.system.tiles()[t].glue(Dir::N), &g("c:done", 2));
        }
    }

    #[test]
    fn degenerate_zero_length() {
        let mut spec = CounterSpec::new(1, 0, 0, Dir::E, "z");
        spec.done = Some(g("z:done", 2));
        let gadget = make_counter(&spec).unwrap();
        assert_eq!(gadget.system.tiles().len(), 1);
        assert_eq!(gadget.system.tiles()[0].glue(Dir::E), &g("z:done", 2));
        assert_eq!(grow(&gadget.system, Policy::PaperOrder).len(), 1);
    }

    #[test]
    fn start_after_end_rejected() {
        let spec = CounterSpec::new(3, 5, 2, Dir::N, "c");
        assert_eq!(make_counter(&spec).unwrap_err(), CounterError::StartAfterEnd { start: 5, end: 2 });
    }

    #[test]
    fn namespaces_do_not_collide() {
        let a = make_counter(&CounterSpec::new(3, 1, 6, Dir::N, "a")).unwrap();
        let c = make_counter(&CounterSpec::new(3, 1, 6, Dir::N, "b")).unwrap();
        assert!(labels(a.system.tiles()).is_disjoint(&labels(c.system.tiles())));
    }

    #[test]
    fn modulus_paints_periodic_rows() {
        for (dir, period) in [(Dir::N, 3u64), (Dir::E, 1), (Dir::S, 4)] {
            let mut spec = CounterSpec::new(4, 0, 11, dir, "m");
            spec.modulus = Some(ModRegister { width: 64 - (period.max(2) - 1).leading_zeros(), start: 0, period });
            if period == 1 {
                spec.modulus.as_mut().unwrap().width = 0;
            }
            let gadget = make_counter(&spec).unwrap();
            let asm = grow(&gadget.system, Policy::UniformRandom(11));
            let pat = assembly_pattern(&asm, gadget.system.tiles(), &gadget.system.tileset.palette, true).unwrap();
            for r in 0..12u32 {
                let k = 0;
                let loc = spec.cell(Loc::new(0, 0), r.into(), k);
                let t = asm.get(loc).unwrap();
                let black = gadget.system.tiles()[t].color == BLACK;
                assert_eq!(black, u64::from(r) % period == 0, "row {r} dir {dir:?}");
            }
            assert_eq!(pat.width() * pat.height(), 12 * spec.total_width());
        }
    }

    #[test]
    fn counts_match_arithmetic_for_many_ranges() {
        for w in 1..5u32 {
            for start in 0..(1u64 << w) {
                for end in start..(1u64 << w) {
                    let mut spec = CounterSpec::new(w, start, end, Dir::W, "r");
                    spec.done = Some(g("r:done", 2));
                    let gadget = make_counter(&spec).unwrap();
                    let asm = grow(&gadget.system, Policy::PaperOrder);
                    assert_eq!(asm.len() as u64, u64::from(w) * (end - start + 1));
                    let t = asm.get(spec.done_cell(Loc::new(0, 0))).unwrap();
                    assert_eq!(gadget.system.tiles()[t].glue(Dir::W), &g("r:done", 2));
                }
            }
        }
    }
}
