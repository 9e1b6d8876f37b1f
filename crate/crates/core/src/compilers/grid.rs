//! `m x m` repetitions of a square pattern at temperature 2.
//!
//! Every `n x n` block is built like the temperature-1 square: spines (a
//! base row segment plus a vertical shaft) carrying ribs. Blocks in the west
//! block-columns form a vertical arm in which each spine is one bit of a
//! counter over block-rows; base rows run zig-zag increment passes and the
//! shafts carry the digit to the top of the block. A transposed copy counts
//! block-columns along the south edge. The rest is filled by blocks whose
//! base rows read a column index from the block below and a start signal from
//! the west. The seed grows a hard-coded L made of the first base rows of
//! both arms, which holds the initial counter values.

use thiserror::Error;

use super::blueprint::{g, hard_path, Blueprint, Cell};
use super::square::{check_pattern, compile_square_pattern, Skeleton, SquareError};
use super::{Budget, CompiledSystem};
use crate::model::{Dim, Dir, Glue, Loc};
use crate::patterns::{ceil_log2, grid_repeat, Pattern};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error(transparent)]
    Square(#[from] SquareError),
    #[error("repeat count must be positive")]
    ZeroRepeat,
    #[error("unsupported size: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    transpose: bool,
    x0: i32,
}

impl Frame {
    fn loc(self, u: i32, v: i32) -> Loc {
        if self.transpose {
            Loc::new(self.x0 + v, u)
        } else {
            Loc::new(self.x0 + u, v)
        }
    }

    fn dir(self, d: Dir) -> Dir {
        if !self.transpose {
            return d;
        }
        match d {
            Dir::N => Dir::E,
            Dir::E => Dir::N,
            Dir::S => Dir::W,
            Dir::W => Dir::S,
            other => other,
        }
    }
}

/// Cell under construction, glues indexed by frame direction.
struct FCell {
    glues: [Glue; 4],
    color: u16,
    group: String,
}

impl FCell {
    fn new(group: &str, color: u16) -> FCell {
        FCell { glues: Default::default(), color, group: group.to_string() }
    }

    fn set(&mut self, d: Dir, gl: Glue) -> &mut FCell {
        self.glues[d.index()] = gl;
        self
    }
}

struct Writer<'a> {
    bp: &'a mut Blueprint,
    frame: Frame,
    q: &'a Pattern,
    n: i32,
}

impl Writer<'_> {
    fn color(&self, u: i32, v: i32) -> u16 {
        self.q.get(u.rem_euclid(self.n) as u32, v.rem_euclid(self.n) as u32)
    }

    fn put(&mut self, u: i32, v: i32, c: FCell) -> Loc {
        let mut cell = Cell::new(&c.group, c.color);
        for d in Dir::PLANAR {
            cell.glues[self.frame.dir(d).index()] = c.glues[d.index()].clone();
        }
        let l = self.frame.loc(u, v);
        self.bp.put(l, cell);
        l
    }
}

fn bits(xs: impl Iterator<Item = u16>) -> String {
    xs.map(|c| if c == crate::patterns::BLACK { '0' } else { '1' }).collect()
}

fn rib_glue(ns: &str, side: &str, s: &str) -> Glue {
    if s.is_empty() {
        Glue::null()
    } else {
        g(format!("{ns}:{side}:{s}"), 2)
    }
}

/// Standard ribs from a shaft cell at `(u, v)` in both directions.
fn put_ribs(w: &mut Writer, ns: &str, u: i32, v: i32, west: i32, east: i32, custom_east: Option<&dyn Fn(i32) -> Glue>) -> (Glue, Glue) {
    let east_s = bits((1..=east).map(|k| w.color(u + k, v)));
    let west_s = bits((1..=west).map(|k| w.color(u - k, v)));
    let east_face = match custom_east {
        Some(tip) => {
            // Position-specific ribs ending in a custom glue.
            let voff = v.rem_euclid(w.n);
            let mut first = Glue::null();
            for k in 1..=east {
                let inward = g(format!("{ns}:me:{voff}:{k}"), 2);
                if k == 1 {
                    first = inward.clone();
                }
                let outward = if k == east { tip(voff) } else { g(format!("{ns}:me:{voff}:{}", k + 1), 2) };
                let mut c = FCell::new(&format!("{ns}me"), w.color(u + k, v));
                c.set(Dir::W, inward).set(Dir::E, outward);
                w.put(u + k, v, c);
            }
            first
        }
        None => {
            for k in 1..=east {
                let rest = &east_s[(k - 1) as usize..];
                let mut c = FCell::new(&format!("{ns}re"), w.color(u + k, v));
                c.set(Dir::W, rib_glue(ns, "re", rest)).set(Dir::E, rib_glue(ns, "re", &rest[1..]));
                w.put(u + k, v, c);
            }
            rib_glue(ns, "re", &east_s)
        }
    };
    for k in 1..=west {
        let rest = &west_s[(k - 1) as usize..];
        let mut c = FCell::new(&format!("{ns}rw"), w.color(u - k, v));
        c.set(Dir::E, rib_glue(ns, "rw", rest)).set(Dir::W, rib_glue(ns, "rw", &rest[1..]));
        w.put(u - k, v, c);
    }
    (rib_glue(ns, "rw", &west_s), east_face)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Run {
    carry: bool,
    q: bool,
    em: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Digit {
    new: bool,
    newp: bool,
    turn: bool,
    before: Run,
    after: Run,
}

/// Digit-level trace of the counter: one entry per block-row.
fn counter_rows(digits: u32, start: u64) -> Vec<Vec<Digit>> {
    let d = digits as usize;
    let all = if digits == 64 { u64::MAX } else { (1u64 << digits) - 1 };
    let mut rows = Vec::new();
    let mut row: Vec<Digit> =
        (0..d).map(|k| Digit { new: (start >> k) & 1 == 1, ..Digit::default() }).collect();
    row[0].turn = start != all;
    rows.push(row.clone());
    let mut value = start;
    while value != all {
        let y = rows.len();
        let odd = y % 2 == 1;
        let order: Vec<usize> = if odd { (0..d).collect() } else { (0..d).rev().collect() };
        let mut run = Run { carry: true, q: true, em: true };
        let mut next = row.clone();
        for &k in &order {
            let (b, p) = (row[k].new, row[k].newp);
            let before = run;
            let (new, newp) = if odd {
                let new = b ^ run.carry;
                let newp = run.q;
                run.carry &= b;
                run.q &= new;
                (new, newp)
            } else {
                (b ^ p, false)
            };
            run.em &= new;
            next[k] = Digit { new, newp, turn: false, before, after: run };
        }
        let end = *order.last().expect("at least one digit");
        next[end].turn = !run.em;
        value += 1;
        debug_assert!((0..d).all(|k| next[k].new == ((value >> k) & 1 == 1)));
        rows.push(next.clone());
        row = next;
    }
    rows
}

/// What the far side of an arm exposes to the fill.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Edge {
    /// East edge base cells expose the fill start signal.
    Start,
    /// Every cell on the east edge exposes its column index.
    Columns,
}

struct Arm<'a> {
    ns: &'a str,
    frame: Frame,
    q: &'a Pattern,
    sk: &'a Skeleton,
    /// Width in blocks.
    width: i32,
    start: u64,
    edge: Edge,
}

fn b01(x: bool) -> u8 {
    u8::from(x)
}

impl Arm<'_> {
    fn spines(&self) -> usize {
        self.sk.columns.len()
    }

    fn spine_of(&self, xo: i32) -> usize {
        self.sk
            .columns
            .iter()
            .position(|&(cx, w, e)| xo >= (cx - w) as i32 && xo <= (cx + e) as i32)
            .expect("spines cover the block")
    }

    /// Builds every block of the arm; returns the cells of block-row 0's
    /// base in increasing `u` for the caller to join into the seed path.
    fn build(&self, bp: &mut Blueprint) -> Vec<Loc> {
        let n = self.sk.n as i32;
        let ns = self.ns;
        let s = self.spines();
        let digits = self.width as u32 * s as u32;
        let rows = counter_rows(digits, self.start);
        let last_u = self.width * n - 1;
        let mut w = Writer { bp, frame: self.frame, q: self.q, n };
        let mut seed_row = Vec::new();
        let ft = |voff: i32| g(format!("gv:ft:{voff}"), 1);
        for (y, row) in rows.iter().enumerate() {
            let y = y as i32;
            let par = (y % 2) as u8;
            let v0 = y * n;
            let digit_tag = |d: usize, dg: &Digit| {
                format!("{}{}{}{}", b01(dg.new), b01(dg.newp), b01(d == 0), b01(d + 1 == digits as usize))
            };
            let next_start_u = if (y + 1) % 2 == 1 { 0 } else { last_u };
            // Base row.
            let order: Vec<i32> = if par == 1 { (0..=last_u).collect() } else { (0..=last_u).rev().collect() };
            let mut cells: Vec<(i32, FCell)> = Vec::new();
            for (idx, &u) in order.iter().enumerate() {
                let xo = u % n;
                let j = self.spine_of(xo);
                let d = (u / n) as usize * s + j;
                let (cx, west, east) = self.sk.columns[j];
                let first_of_spine = if par == 1 { xo == (cx - west) as i32 } else { xo == (cx + east) as i32 };
                let dg = &row[d];
                let mut c = FCell::new(if y == 0 { "ts" } else { ns }, w.color(u, v0));
                if y > 0 {
                    let below = &rows[(y - 1) as usize][d];
                    let tag = digit_tag(d, below);
                    let sglue = if idx == 0 {
                        g(format!("{ns}:dt:{xo}:{tag}"), 2)
                    } else {
                        g(format!("{ns}:dg:{xo}:{tag}"), 1)
                    };
                    c.set(Dir::S, sglue);
                    let (back, fwd) = if par == 1 { (Dir::W, Dir::E) } else { (Dir::E, Dir::W) };
                    // State carried into this cell and out of it.
                    let side = |recv_xo: i32, recv_first: bool, run: Run, dg: &Digit| {
                        let base = format!("{}{}{}", b01(run.carry), b01(run.q), b01(run.em));
                        if recv_first {
                            g(format!("{ns}:b{par}:{recv_xo}:{base}"), 1)
                        } else {
                            g(format!("{ns}:b{par}:{recv_xo}:{base}{}{}{}", b01(dg.new), b01(dg.newp), b01(dg.turn)), 1)
                        }
                    };
                    if idx > 0 {
                        let run_in = if first_of_spine { dg.before } else { dg.after };
                        c.set(back, side(xo, first_of_spine, run_in, dg));
                    }
                    if idx + 1 < order.len() {
                        let nu = order[idx + 1];
                        let nxo = nu % n;
                        let nj = self.spine_of(nxo);
                        let (ncx, nw, ne) = self.sk.columns[nj];
                        let nfirst = if par == 1 { nxo == (ncx - nw) as i32 } else { nxo == (ncx + ne) as i32 };
                        let nd = (nu / n) as usize * s + nj;
                        let run_out = if nfirst { row[nd].before } else { dg.after };
                        c.set(fwd, side(nxo, nfirst, run_out, dg));
                    }
                }
                if xo == cx as i32 {
                    let st = format!("{par}{}", digit_tag(d, dg)) + &b01(dg.turn).to_string();
                    c.set(Dir::N, g(format!("{ns}:s{j}:1:{st}"), 2));
                }
                if u == last_u && y > 0 {
                    match self.edge {
                        Edge::Start => {
                            c.set(Dir::E, g("gv:fs", 1));
                        }
                        Edge::Columns => {
                            c.set(Dir::E, ft(0));
                        }
                    }
                } else if u == last_u && self.edge == Edge::Columns {
                    c.set(Dir::E, ft(0));
                }
                cells.push((u, c));
            }
            cells.sort_by_key(|(u, _)| *u);
            for (u, c) in cells {
                let l = w.put(u, v0, c);
                if y == 0 {
                    seed_row.push(l);
                }
            }
            // Spines.
            for d in 0..digits as usize {
                let (c, j) = ((d / s) as i32, d % s);
                let (cx, west, east) = self.sk.columns[j];
                let (cx, west, east) = (cx as i32, west as i32, east as i32);
                let u = c * n + cx;
                let dg = &row[d];
                let tag = digit_tag(d, dg);
                let st = format!("{par}{tag}{}", b01(dg.turn));
                let msb_edge = d + 1 == digits as usize && self.edge == Edge::Columns;
                for voff in 1..n {
                    let v = v0 + voff;
                    let mut cell = FCell::new(ns, w.color(u, v));
                    cell.set(Dir::S, g(format!("{ns}:s{j}:{voff}:{st}"), 2));
                    if voff < n - 1 {
                        cell.set(Dir::N, g(format!("{ns}:s{j}:{}:{st}", voff + 1), 2));
                        let tip = |voff: i32| ft(voff);
                        let custom: Option<&dyn Fn(i32) -> Glue> = if msb_edge && east > 0 { Some(&tip) } else { None };
                        let (wg, eg) = put_ribs(&mut w, ns, u, v, west, east, custom);
                        cell.set(Dir::W, wg).set(Dir::E, eg);
                    } else {
                        // Top row: carry the digit outward and up.
                        let top_n = |xo: i32| {
                            let uu = c * n + xo;
                            if dg.turn && uu == next_start_u {
                                g(format!("{ns}:dt:{xo}:{tag}"), 2)
                            } else {
                                g(format!("{ns}:dg:{xo}:{tag}"), 1)
                            }
                        };
                        cell.set(Dir::N, top_n(cx));
                        for (dir, len) in [(Dir::E, east), (Dir::W, west)] {
                            let step = if dir == Dir::E { 1 } else { -1 };
                            for k in 1..=len {
                                let xo = cx + step * k;
                                let glue = g(format!("{ns}:t{j}:{xo}:{st}"), 2);
                                if k == 1 {
                                    cell.set(dir, glue.clone());
                                }
                                let mut r = FCell::new(&format!("{ns}t"), w.color(c * n + xo, v));
                                r.set(dir.opposite(), glue).set(Dir::N, top_n(xo));
                                if k < len {
                                    r.set(dir, g(format!("{ns}:t{j}:{}:{st}", xo + step), 2));
                                } else if msb_edge && dir == Dir::E {
                                    r.set(Dir::E, ft(voff));
                                }
                                w.put(c * n + xo, v, r);
                            }
                        }
                    }
                    if msb_edge && east == 0 {
                        cell.set(Dir::E, ft(voff));
                    }
                    w.put(u, v, cell);
                }
            }
        }
        seed_row
    }
}

/// Fill blocks covering block-columns `xs` and block-rows `ys`.
fn build_fill(bp: &mut Blueprint, p: &Pattern, sk: &Skeleton, xs: std::ops::Range<i32>, ys: std::ops::Range<i32>) {
    let n = sk.n as i32;
    let mut w = Writer { bp, frame: Frame { transpose: false, x0: 0 }, q: p, n };
    let ns = "gv";
    for by in ys {
        for bx in xs.clone() {
            let (u0, v0) = (bx * n, by * n);
            for xo in 0..n {
                let mut c = FCell::new("gvf", w.color(xo, 0));
                c.set(Dir::W, if xo == 0 { g("gv:fs", 1) } else { g(format!("gv:fb:{xo}"), 1) });
                c.set(Dir::E, if xo == n - 1 { g("gv:fs", 1) } else { g(format!("gv:fb:{}", xo + 1), 1) });
                c.set(Dir::S, g(format!("gv:ft:{xo}"), 1));
                if let Some(j) = sk.columns.iter().position(|col| col.0 as i32 == xo) {
                    c.set(Dir::N, g(format!("gv:f{j}:1"), 2));
                }
                w.put(u0 + xo, v0, c);
            }
            for (j, &(cx, west, east)) in sk.columns.iter().enumerate() {
                let (cx, west, east) = (cx as i32, west as i32, east as i32);
                for voff in 1..n {
                    let (u, v) = (u0 + cx, v0 + voff);
                    let mut cell = FCell::new("gvf", w.color(u, v));
                    cell.set(Dir::S, g(format!("gv:f{j}:{voff}"), 2));
                    if voff < n - 1 {
                        cell.set(Dir::N, g(format!("gv:f{j}:{}", voff + 1), 2));
                        let (wg, eg) = put_ribs(&mut w, ns, u, v, west, east, None);
                        cell.set(Dir::W, wg).set(Dir::E, eg);
                    } else {
                        cell.set(Dir::N, g(format!("gv:ft:{cx}"), 1));
                        for (dir, len) in [(Dir::E, east), (Dir::W, west)] {
                            let step = if dir == Dir::E { 1 } else { -1 };
                            for k in 1..=len {
                                let xo = cx + step * k;
                                let glue = g(format!("gv:fr{j}:{xo}"), 2);
                                if k == 1 {
                                    cell.set(dir, glue.clone());
                                }
                                let mut r = FCell::new("gvf", w.color(u0 + xo, v));
                                r.set(dir.opposite(), glue).set(Dir::N, g(format!("gv:ft:{xo}"), 1));
                                if k < len {
                                    r.set(dir, g(format!("gv:fr{j}:{}", xo + step), 2));
                                }
                                w.put(u0 + xo, v, r);
                            }
                        }
                    }
                    w.put(u, v, cell);
                }
            }
        }
    }
}

/// Arm widths `(a, b)` in blocks and the digit count of each arm.
fn arm_shape(n: u32, m: u32) -> (u32, u32, u32, u32) {
    let s = Skeleton::new(n).columns.len() as u32;
    let bv = ceil_log2(m.into()).max(1);
    let a = bv.div_ceil(s);
    let bh = ceil_log2(u64::from(m - a)).max(1);
    let b = bh.div_ceil(s);
    (a, b, a * s, b * s)
}

fn double_strengths(cs: &mut CompiledSystem) {
    for t in cs.system.tileset.tiles.iter_mut() {
        for gl in t.glues.iter_mut() {
            if !gl.is_null() {
                gl.strength = 2;
            }
        }
    }
    cs.system.temperature = 2;
}

pub fn compile_grid_repeat(p: &Pattern, m: u32) -> Result<CompiledSystem, GridError> {
    let n = check_pattern(p)?;
    if m == 0 {
        return Err(GridError::ZeroRepeat);
    }
    let target = grid_repeat(p, m);
    let budget = Budget::grid(n, m);
    if m == 1 {
        let mut cs = compile_square_pattern(p)?;
        double_strengths(&mut cs);
        cs.budget = budget;
        return Ok(cs);
    }
    if n == 1 {
        return Err(GridError::Unsupported("grid repetition needs blocks of side at least 2".into()));
    }
    let sk = Skeleton::new(n);
    let (a, b, dv, dh) = arm_shape(n, m);
    if dv >= 63 || dh >= 63 {
        return Err(GridError::Unsupported(format!("counter of {} digits", dv.max(dh))));
    }
    let ni = n as i32;
    let mut bp = Blueprint::new(Dim::Two, 2, p.palette.clone());
    let vertical = Arm {
        ns: "gv",
        frame: Frame { transpose: false, x0: 0 },
        q: p,
        sk: &sk,
        width: a as i32,
        start: (1u64 << dv) - u64::from(m),
        edge: Edge::Start,
    };
    let pt = p.transpose();
    let eastward = Arm {
        ns: "gh",
        frame: Frame { transpose: true, x0: a as i32 * ni },
        q: &pt,
        sk: &sk,
        width: b as i32,
        start: (1u64 << dh) - u64::from(m - a),
        edge: Edge::Columns,
    };
    let mut path = vertical.build(&mut bp);
    path.extend(eastward.build(&mut bp));
    // Fill blocks are all alike, so one of them yields every fill tile.
    build_fill(&mut bp, p, &sk, a as i32..a as i32 + 1, b as i32..b as i32 + 1);
    hard_path(&mut bp, "ts", &path, 2);
    bp.set_seed(path[0]);
    Ok(CompiledSystem { system: bp.build(), target, budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{assembly_pattern, single_pixel, two_color_palette};
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
        assert!(st.run(5_000_000, policy).unwrap().terminal);
        let pat = assembly_pattern(&st.asm, cs.system.tiles(), &cs.system.tileset.palette, false).unwrap();
        assert_eq!(pat.first_mismatch(&cs.target), None, "{policy:?}");
        assert_eq!(st.asm.len() as u32, cs.target.width() * cs.target.height());
    }

    #[test]
    fn counter_trace_counts() {
        for (digits, start) in [(1u32, 0u64), (2, 1), (3, 0), (4, 5), (5, 31)] {
            let rows = counter_rows(digits, start);
            assert_eq!(rows.len() as u64, (1u64 << digits) - start);
        }
    }

    #[test]
    fn single_pixel_block_three_times() {
        let p = single_pixel(4, 1, 2).unwrap();
        let cs = compile_grid_repeat(&p, 3).unwrap();
        assert_eq!(cs.target.width(), 12);
        assert_grows(&cs, Policy::PaperOrder);
        assert_grows(&cs, Policy::UniformRandom(3));
    }

    #[test]
    fn one_repeat_is_the_pattern() {
        let p = random_pattern(4, 9);
        let cs = compile_grid_repeat(&p, 1).unwrap();
        assert_eq!(cs.system.temperature, 2);
        assert_eq!(cs.target, p);
        assert_grows(&cs, Policy::UniformRandom(1));
    }

    #[test]
    fn many_sizes() {
        for n in 2..=6 {
            for m in 2..=6 {
                let cs = compile_grid_repeat(&random_pattern(n, u64::from(n * 31 + m)), m).unwrap();
                assert_grows(&cs, Policy::PaperOrder);
                assert_grows(&cs, Policy::UniformRandom(u64::from(m)));
                assert!(cs.within_budget(), "n={n} m={m}: {}", cs.tile_count());
            }
        }
    }

    #[test]
    fn tile_count_flat_in_m() {
        let p = random_pattern(4, 2);
        let counts: Vec<usize> = (2..=4).map(|m| compile_grid_repeat(&p, m).unwrap().tile_count()).collect();
        let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
        assert!(spread <= 120, "{counts:?}");
    }
}
