//! Single- and multi-pixel compilers.
//!
//! Layout: a vertical trunk of width `w = ceil(log2 n)` spans the square;
//! horizontal bands of the same width cross it. Every crossing is a
//! junction box, every pixel sits on the ring of a `w x w` box inside a band,
//! and the stretches between boxes (and out to the edges) are counters that
//! measure the gap. Four constant fill tiles complete the quadrants.

use thiserror::Error;

use super::blueprint::{g, hard_path, Blueprint, Cell};
use super::counter::{base_glues, place_rows, CounterError, CounterSpec};
use super::{Budget, CompiledSystem};
use crate::model::{Dim, Dir, Glue, Loc};
use crate::patterns::{ceil_log2, multi_pixel, single_pixel, two_color_palette, PatternError, BLACK, WHITE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombError {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("could not route a comb through the pixels: {0}")]
    RoutingFailure(String),
    #[error(transparent)]
    Counter(#[from] CounterError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct BoxAt {
    x0: i32,
    y0: i32,
    w: i32,
    h: i32,
}

impl BoxAt {
    fn contains(&self, p: (i32, i32)) -> bool {
        p.0 >= self.x0 && p.0 < self.x0 + self.w && p.1 >= self.y0 && p.1 < self.y0 + self.h
    }

    fn on_ring(&self, p: (i32, i32)) -> bool {
        self.contains(p)
            && (p.0 == self.x0 || p.0 == self.x0 + self.w - 1 || p.1 == self.y0 || p.1 == self.y0 + self.h - 1)
    }
}

/// A horizontal strip crossing the trunk. Its height is `w` except possibly
/// for the band nearest the edge the greedy assignment ran into.
#[derive(Debug, Clone)]
struct Band {
    y0: i32,
    h: i32,
    east: Vec<BoxAt>,
    west: Vec<BoxAt>,
}

#[derive(Debug, Clone)]
struct Layout {
    n: i32,
    w: i32,
    tx: i32,
    bands: Vec<Band>,
}

/// Band rows as `(y0, h)`, bottom to top.
fn assign_bands(n: i32, w: i32, pixels: &[(i32, i32)]) -> Vec<(i32, i32)> {
    let mut ys: Vec<i32> = pixels.iter().map(|p| p.1).collect();
    ys.sort();
    ys.dedup();
    let mut bands: Vec<(i32, i32)> = Vec::new();
    for &y in &ys {
        match bands.last_mut() {
            Some(&mut (y0, h)) if y < y0 + h => {}
            Some(last) if y + w > n => last.1 = n - last.0,
            Some(_) => bands.push((y, w)),
            None => bands.push((y.min(n - w), w)),
        }
    }
    bands
}

fn route_band(tx: i32, w: i32, (y0, h): (i32, i32), pixels: &[(i32, i32)]) -> Band {
    let mut east: Vec<i32> = Vec::new();
    let mut west: Vec<i32> = Vec::new();
    for &(x, _) in pixels.iter().filter(|p| p.1 >= y0 && p.1 < y0 + h) {
        if x >= tx + w {
            east.push(x);
        } else if x < tx {
            west.push(x);
        }
    }
    east.sort();
    east.dedup();
    west.sort_by(|a, b| b.cmp(a));
    west.dedup();
    let column = |x0| BoxAt { x0, y0, w: 1, h };
    Band { y0, h, east: east.into_iter().map(column).collect(), west: west.into_iter().map(column).collect() }
}

fn plan(n: i32, w: i32, pixels: &[(i32, i32)]) -> Result<Layout, CombError> {
    let mut xs: Vec<i32> = pixels.iter().map(|p| p.0).collect();
    xs.sort();
    let median = xs[xs.len() / 2];
    let tx = (median - (w - 1) / 2).clamp(0, n - w);
    let bands = assign_bands(n, w, pixels).into_iter().map(|b| route_band(tx, w, b, pixels)).collect();
    let layout = Layout { n, w, tx, bands };
    if layout_is_sound(&layout, pixels) {
        Ok(layout)
    } else {
        Err(CombError::RoutingFailure(format!("{} pixels in a {n}x{n} square", pixels.len())))
    }
}

/// Every pixel lies in exactly one box and bands stay inside the square.
fn layout_is_sound(l: &Layout, pixels: &[(i32, i32)]) -> bool {
    let mut prev_top = 0;
    for band in &l.bands {
        if band.y0 < prev_top || band.h < l.w || band.y0 + band.h > l.n {
            return false;
        }
        prev_top = band.y0 + band.h;
    }
    pixels.iter().all(|&p| {
        l.bands.iter().any(|b| {
            let junction = BoxAt { x0: l.tx, y0: b.y0, w: l.w, h: b.h };
            junction.contains(p) || b.east.iter().chain(&b.west).any(|bx| bx.contains(p))
        })
    })
}

/// Ring cells in clockwise order starting at the SW corner.
fn ring(b: BoxAt) -> Vec<Loc> {
    let BoxAt { x0, y0, w, h } = b;
    if w == 1 || h == 1 {
        return (x0..x0 + w).flat_map(|x| (y0..y0 + h).map(move |y| Loc::new(x, y))).collect();
    }
    let mut v = Vec::new();
    for y in y0..y0 + h {
        v.push(Loc::new(x0, y));
    }
    for x in x0 + 1..x0 + w {
        v.push(Loc::new(x, y0 + h - 1));
    }
    for y in (y0..y0 + h - 1).rev() {
        v.push(Loc::new(x0 + w - 1, y));
    }
    for x in (x0 + 1..x0 + w - 1).rev() {
        v.push(Loc::new(x, y0));
    }
    v
}

struct Builder<'a> {
    bp: Blueprint,
    pixels: &'a [(i32, i32)],
    links: Vec<(Loc, Dir, Glue)>,
}

impl Builder<'_> {
    fn color(&self, l: Loc) -> u16 {
        if self.pixels.contains(&(l.x, l.y)) {
            BLACK
        } else {
            WHITE
        }
    }

    fn put_box(&mut self, b: BoxAt, ns: &str, entry: Loc) {
        let BoxAt { x0, y0, w, h } = b;
        let mut cells = ring(b);
        let ordered: Vec<Loc> = if w == 1 || h == 1 {
            if cells.last() == Some(&entry) {
                cells.reverse();
            }
            assert_eq!(cells[0], entry, "a line box is entered at one of its ends");
            cells
        } else {
            let start = cells.iter().position(|&l| l == entry).expect("entry lies on the ring");
            cells[start..].iter().chain(&cells[..start]).copied().collect()
        };
        for &l in &ordered {
            let c = Cell::new(ns, self.color(l));
            self.bp.put(l, c);
        }
        hard_path(&mut self.bp, ns, &ordered, 2);
        // Interior pixels get a hard-coded column rising from the bottom of the ring.
        let mut spokes: Vec<i32> = self
            .pixels
            .iter()
            .filter(|&&p| b.contains(p) && !b.on_ring(p))
            .map(|p| p.0)
            .collect();
        spokes.sort();
        spokes.dedup();
        for &x in &spokes {
            let col: Vec<Loc> = (y0..y0 + h - 1).map(|y| Loc::new(x, y)).collect();
            for &l in &col[1..] {
                let c = Cell::new(ns, self.color(l));
                self.bp.put(l, c);
            }
            hard_path(&mut self.bp, &format!("{ns}:sp{x}"), &col, 2);
        }
        for y in y0 + 1..y0 + h - 1 {
            for x in x0 + 1..x0 + w - 1 {
                if spokes.contains(&x) {
                    continue;
                }
                let mut c = Cell::new("fin", WHITE);
                c.glues[Dir::W.index()] = g("fin:h", 1);
                c.glues[Dir::E.index()] = g("fin:h", 1);
                c.glues[Dir::S.index()] = g("fin:v", 1);
                c.glues[Dir::N.index()] = g("fin:v", 1);
                self.bp.put(Loc::new(x, y), c);
                let west = Loc::new(x - 1, y);
                self.bp.set_glue(west, Dir::E, g("fin:h", 1));
                if y == y0 + 1 {
                    self.bp.set_glue(Loc::new(x, y0), Dir::N, g("fin:v", 1));
                }
            }
        }
    }

    /// Grows `rows` counter rows off a box side whose position-0 cell is
    /// `origin`; with `into_box` the last row hands off to the next box and
    /// the entry cell of that box is returned.
    fn counter(&mut self, ns: &str, origin: Loc, forward: Dir, width: i32, rows: i32, into_box: bool) -> Result<Loc, CombError> {
        let mut spec = CounterSpec::new(width as u32, 0, rows as u64, forward, ns);
        if into_box {
            let done = g(format!("{ns}:done"), 2);
            self.links.push((spec.done_cell(origin), forward, done.clone()));
            spec.done = Some(done);
        }
        for (k, gl) in base_glues(&spec).into_iter().enumerate() {
            self.bp.set_glue(spec.cell(origin, 0, k as u32), forward, gl);
        }
        let done = place_rows(&mut self.bp, &spec, origin)?;
        Ok(done.step(forward))
    }

    /// Joins a box side to the next box `gap` cells further along.
    fn segment(&mut self, ns: &str, origin: Loc, forward: Dir, width: i32, gap: i32) -> Result<Loc, CombError> {
        if gap == 0 {
            self.links.push((origin, forward, g(format!("{ns}:link"), 2)));
            return Ok(origin.step(forward));
        }
        self.counter(ns, origin, forward, width, gap, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quadrant {
    Ne,
    Nw,
    Se,
    Sw,
}

impl Quadrant {
    fn tag(self) -> &'static str {
        match self {
            Quadrant::Ne => "ne",
            Quadrant::Nw => "nw",
            Quadrant::Se => "se",
            Quadrant::Sw => "sw",
        }
    }

    /// Sides of a neighboring structure cell that feed this quadrant's fill.
    fn feeds(self, d: Dir) -> bool {
        matches!(
            (self, d),
            (Quadrant::Ne, Dir::E | Dir::N)
                | (Quadrant::Nw, Dir::W | Dir::N)
                | (Quadrant::Se, Dir::E | Dir::S)
                | (Quadrant::Sw, Dir::W | Dir::S)
        )
    }
}

fn fill_label(q: Quadrant, region: usize, d: Dir) -> Glue {
    let axis = if matches!(d, Dir::E | Dir::W) { "h" } else { "v" };
    g(format!("fill:{}{region}:{axis}", q.tag()), 1)
}

fn build(layout: &Layout, pixels: &[(i32, i32)]) -> Result<Blueprint, CombError> {
    let Layout { n, w, tx, ref bands } = *layout;
    let mut b = Builder { bp: Blueprint::new(Dim::Two, 2, two_color_palette()), pixels, links: Vec::new() };
    let j0 = BoxAt { x0: tx, y0: bands[0].y0, w, h: bands[0].h };
    let seed = ring(j0).into_iter().find(|l| pixels.contains(&(l.x, l.y))).unwrap_or(Loc::new(j0.x0, j0.y0));
    let mut entry = seed;
    for (k, band) in bands.iter().enumerate() {
        let (y0, h) = (band.y0, band.h);
        let jb = BoxAt { x0: tx, y0, w, h };
        b.put_box(jb, &format!("j{k}"), entry);

        let mut prev = jb;
        for (i, bx) in band.east.iter().enumerate() {
            let origin = Loc::new(prev.x0 + prev.w - 1, y0);
            let e = b.segment(&format!("e{k}s{i}"), origin, Dir::E, h, bx.x0 - (prev.x0 + prev.w))?;
            b.put_box(*bx, &format!("e{k}b{i}"), e);
            prev = *bx;
        }
        let rest = n - (prev.x0 + prev.w);
        if rest > 0 {
            let origin = Loc::new(prev.x0 + prev.w - 1, y0);
            b.counter(&format!("e{k}s{}", band.east.len()), origin, Dir::E, h, rest, false)?;
        }

        let mut prev = jb;
        for (i, bx) in band.west.iter().enumerate() {
            let origin = Loc::new(prev.x0, y0 + h - 1);
            let e = b.segment(&format!("w{k}s{i}"), origin, Dir::W, h, prev.x0 - (bx.x0 + bx.w))?;
            b.put_box(*bx, &format!("w{k}b{i}"), e);
            prev = *bx;
        }
        if prev.x0 > 0 {
            let origin = Loc::new(prev.x0, y0 + h - 1);
            b.counter(&format!("w{k}s{}", band.west.len()), origin, Dir::W, h, prev.x0, false)?;
        }

        let origin = Loc::new(tx + w - 1, y0 + h - 1);
        let top = y0 + h;
        match bands.get(k + 1) {
            Some(next) => entry = b.segment(&format!("t{k}"), origin, Dir::N, w, next.y0 - top)?,
            None if top < n => {
                b.counter(&format!("t{k}"), origin, Dir::N, w, n - top, false)?;
            }
            None => {}
        }
    }
    if j0.y0 > 0 {
        b.counter("tb", Loc::new(tx, j0.y0), Dir::S, w, j0.y0, false)?;
    }
    let mut bp = b.bp;
    for (l, d, gl) in b.links {
        bp.link(l, d, gl);
    }

    let quadrant = |l: Loc| -> (Quadrant, usize) {
        let east = l.x >= tx + w;
        if l.y < bands[0].y0 {
            (if east { Quadrant::Se } else { Quadrant::Sw }, 0)
        } else {
            let region = bands.iter().rposition(|b| b.y0 <= l.y).expect("above the first band");
            (if east { Quadrant::Ne } else { Quadrant::Nw }, region)
        }
    };
    let structure: Vec<Loc> = bp.cells().map(|(l, _)| *l).collect();
    let mut fill = Vec::new();
    for y in 0..n {
        for x in 0..n {
            let l = Loc::new(x, y);
            if !bp.contains(l) {
                fill.push(l);
            }
        }
    }
    let is_fill = |l: Loc| l.x >= 0 && l.y >= 0 && l.x < n && l.y < n && !structure.contains(&l);
    for &s in &structure {
        for d in Dir::PLANAR {
            let nb = s.step(d);
            if !is_fill(nb) {
                continue;
            }
            let (q, region) = quadrant(nb);
            if q.feeds(d) {
                let cell = bp.cell_mut(s);
                assert!(cell.glues[d.index()].is_null(), "structure face at {s} already used");
                cell.glues[d.index()] = fill_label(q, region, d);
            }
        }
    }
    for l in fill {
        let (q, region) = quadrant(l);
        let mut c = Cell::new(&format!("fill{}{region}", q.tag()), WHITE);
        for d in Dir::PLANAR {
            c.glues[d.index()] = fill_label(q, region, d);
        }
        bp.put(l, c);
    }
    bp.set_seed(seed);
    Ok(bp)
}

fn one_tile(color: u16) -> Blueprint {
    let mut bp = Blueprint::new(Dim::Two, 2, two_color_palette());
    bp.put(Loc::new(0, 0), Cell::new("px", color));
    bp.set_seed(Loc::new(0, 0));
    bp
}

pub fn compile_single_pixel(n: u32, i: u32, j: u32) -> Result<CompiledSystem, CombError> {
    let target = single_pixel(n, i, j)?;
    let budget = Budget::log_n(n);
    if n == 1 {
        return Ok(CompiledSystem { system: one_tile(BLACK).build(), target, budget });
    }
    let (n, i, j) = (n as i32, i as i32, j as i32);
    let w = ceil_log2(n as u64) as i32;
    // The box takes the quadrant around the pixel with the most room.
    let away = |c: i32| if n - 1 - c >= c { c } else { c - w + 1 };
    let layout = Layout { n, w, tx: away(i), bands: vec![Band { y0: away(j), h: w, east: vec![], west: vec![] }] };
    let bp = build(&layout, &[(i, j)])?;
    Ok(CompiledSystem { system: bp.build(), target, budget })
}

pub fn compile_multi_pixel(n: u32, pixels: &[(u32, u32)]) -> Result<CompiledSystem, CombError> {
    let target = multi_pixel(n, pixels)?;
    let budget = Budget::pixels_log_n(n, pixels.len());
    if n == 1 {
        let color = if pixels.is_empty() { WHITE } else { BLACK };
        return Ok(CompiledSystem { system: one_tile(color).build(), target, budget });
    }
    let ps: Vec<(i32, i32)> = pixels.iter().map(|&(x, y)| (x as i32, y as i32)).collect();
    let n = n as i32;
    let w = ceil_log2(n as u64) as i32;
    let layout = if ps.is_empty() {
        Layout { n, w, tx: 0, bands: vec![Band { y0: 0, h: w, east: vec![], west: vec![] }] }
    } else {
        plan(n, w, &ps)?
    };
    let bp = build(&layout, &ps)?;
    Ok(CompiledSystem { system: bp.build(), target, budget })
}
