//! Two-plane system printing `render_pn(b, |b|, m)` on the upper plane.
//!
//! Lower plane: a hard-coded seed column holding `b` (rotated by one), then
//! zig-zag columns. Each column is a counter (bottom, deciding when column
//! `m - 1` is reached) under a copy register of height `|b|` that shifts by
//! one cell per column, so the top row reads `b[x mod |b|]`. The top cell of
//! the last column lifts into the upper plane.
//!
//! Upper plane: the north row grows west from the lift reading the column
//! values below it. Every later row starts at a diagonal tile (one step east
//! each row), takes its row value from the column value there, and spreads
//! both ways.

use super::render::pn_color;
use super::DiagError;
use crate::compilers::{Budget, CompiledSystem};
use crate::model::{default_palette, Dim, Dir, Glue, Loc, TileAssemblySystem, TileSet, TileType};
use crate::patterns::{ceil_log2, BLACK, WHITE};

use super::render_pn;

/// (bit, index-zero) pair carried by the copy register.
type Val = (u8, u8);

const VALS: [Val; 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

fn v(p: Val) -> String {
    format!("{}{}", p.0, p.1)
}

fn g1(label: String) -> Glue {
    Glue::new(label, 1)
}

fn g2(label: String) -> Glue {
    Glue::new(label, 2)
}

struct Tiles {
    list: Vec<TileType>,
}

impl Tiles {
    fn add(&mut self, group: &str, color: u16, glues: Vec<(Dir, Glue)>) -> usize {
        let mut gs = vec![Glue::null(); 6];
        for (d, g) in glues {
            gs[d.index()] = g;
        }
        let n = self.list.iter().filter(|t| t.name.starts_with(group)).count();
        self.list.push(TileType::new(format!("{group}{n}"), color, gs));
        self.list.len() - 1
    }
}

fn bit_color(bit: u8) -> u16 {
    if bit == 1 {
        WHITE
    } else {
        BLACK
    }
}

/// Counter digit flags: bottom, middle, top, or the only digit.
const FLAGS: [char; 4] = ['b', 'm', 't', 'o'];

fn is_bottom(f: char) -> bool {
    f == 'b' || f == 'o'
}

fn is_top(f: char) -> bool {
    f == 't' || f == 'o'
}

fn flag(k: u32, w: u32) -> char {
    match (k == 0, k + 1 == w) {
        (true, true) => 'o',
        (true, false) => 'b',
        (false, true) => 't',
        (false, false) => 'm',
    }
}

fn counter_tiles(t: &mut Tiles) {
    for b in 0..2u8 {
        for f in FLAGS {
            let states: Vec<(u8, u8)> = if is_bottom(f) { vec![(1, 1)] } else { vec![(0, 0), (0, 1), (1, 0), (1, 1)] };
            for (carry, em) in states {
                let new = b ^ carry;
                let (c2, em2) = (carry & b, em & new);
                let mut gs = vec![(Dir::E, g1(format!("lz:cu:{new}{f}")))];
                if is_bottom(f) {
                    gs.push((Dir::W, g2(format!("lz:turn:{b}{f}"))));
                } else {
                    gs.push((Dir::W, g1(format!("lz:cd:{b}{f}"))));
                    gs.push((Dir::S, g1(format!("lz:cr:{carry}{em}"))));
                }
                gs.push(if is_top(f) {
                    (Dir::N, g1(format!("lz:cdone:{em2}")))
                } else {
                    (Dir::N, g1(format!("lz:cr:{c2}{em2}")))
                });
                t.add("lzcu", WHITE, gs);
            }
            let mut gs = vec![(Dir::W, g1(format!("lz:cu:{b}{f}"))), (Dir::N, g1("lz:cv".into()))];
            if is_bottom(f) {
                gs.push((Dir::E, g2(format!("lz:turn:{b}{f}"))));
            } else {
                gs.push((Dir::E, g1(format!("lz:cd:{b}{f}"))));
                gs.push((Dir::S, g1("lz:cv".into())));
            }
            t.add("lzcd", WHITE, gs);
        }
    }
}

fn copy_tiles(t: &mut Tiles) {
    // Upward columns.
    for d in 0..2u8 {
        for val in VALS {
            for above in VALS {
                t.add(
                    "lzub",
                    bit_color(above.0),
                    vec![
                        (Dir::S, g1(format!("lz:cdone:{d}"))),
                        (Dir::W, g1(format!("lz:xdb:{}{}", v(val), v(above)))),
                        (Dir::N, g1(format!("lz:up:{}{}{d}", v(val), v(above)))),
                        (Dir::E, g1(format!("lz:xub:{}", v(above)))),
                    ],
                );
            }
        }
        for wrap in VALS {
            for own0 in VALS {
                let up = format!("lz:up:{}{}{d}", v(wrap), v(own0));
                for above in VALS {
                    t.add(
                        "lzum",
                        bit_color(above.0),
                        vec![
                            (Dir::S, g1(up.clone())),
                            (Dir::W, g1(format!("lz:xd:{}", v(above)))),
                            (Dir::N, g1(up.clone())),
                            (Dir::E, g1(format!("lz:xu:{}", v(above)))),
                        ],
                    );
                }
                for b0 in 0..2u8 {
                    for first in 0..2u8 {
                        let w = if first == 1 { format!("lz:xdt1:{b0}") } else { format!("lz:xdt:{b0}") };
                        let mut gs = vec![(Dir::S, g1(up.clone())), (Dir::W, g1(w))];
                        if d == 1 {
                            gs.push((Dir::U, g2(format!("lz:lift:{}{b0}{first}", v(wrap)))));
                        } else {
                            gs.push((Dir::U, g1(format!("lz:top:{}{b0}{first}", v(wrap)))));
                            gs.push((Dir::E, g2(format!("lz:tu:{}{}{b0}", v(wrap), v(own0)))));
                        }
                        t.add("lzut", bit_color(wrap.0), gs);
                    }
                }
            }
        }
    }
    // Downward columns.
    for o in VALS {
        for o0 in VALS {
            for b0 in 0..2u8 {
                for first in 0..2u8 {
                    let w = if first == 1 { "tu1" } else { "tu" };
                    t.add(
                        "lzdt",
                        bit_color(o0.0),
                        vec![
                            (Dir::W, g2(format!("lz:{w}:{}{}{b0}", v(o), v(o0)))),
                            (Dir::S, g1(format!("lz:dn:{}{}", v(o), v(o0)))),
                            (Dir::E, g1(format!("lz:xdt:{b0}"))),
                            (Dir::U, g1(format!("lz:top:{}{b0}{first}", v(o0)))),
                        ],
                    );
                }
            }
        }
    }
    for pass in VALS {
        for above in VALS {
            let n = g1(format!("lz:dn:{}{}", v(pass), v(above)));
            for o in VALS {
                t.add(
                    "lzdm",
                    bit_color(pass.0),
                    vec![
                        (Dir::N, n.clone()),
                        (Dir::W, g1(format!("lz:xu:{}", v(o)))),
                        (Dir::E, g1(format!("lz:xd:{}", v(above)))),
                        (Dir::S, g1(format!("lz:dn:{}{}", v(o), v(pass)))),
                    ],
                );
                t.add(
                    "lzdb",
                    bit_color(pass.0),
                    vec![
                        (Dir::N, n.clone()),
                        (Dir::W, g1(format!("lz:xub:{}", v(o)))),
                        (Dir::E, g1(format!("lz:xdb:{}{}", v(pass), v(above)))),
                        (Dir::S, g1("lz:cv".into())),
                    ],
                );
            }
        }
    }
}

/// Row values travel east on `re` glues and west on `rw` glues, so a tile
/// built to grow one way can never attach from the other side.
fn grid_tiles(t: &mut Tiles) {
    let color = |r: Val, c: Val| pn_color(r.1 == 1 || c.1 == 1, r.0, c.0);
    let south = |c: Val, first: u8| {
        if first == 1 {
            g2(format!("lg:diag:{}", v(c)))
        } else {
            g1(format!("lg:col:{}", v(c)))
        }
    };
    let east = |r: Val| g1(format!("lg:re:{}", v(r)));
    let west = |r: Val| g1(format!("lg:rw:{}", v(r)));
    let col = |c: Val| g1(format!("lg:col:{}", v(c)));
    for c in VALS {
        for b0 in 0..2u8 {
            let r = (b0, 1);
            for first in 0..2u8 {
                t.add(
                    "lgl",
                    color(r, c),
                    vec![
                        (Dir::D, g2(format!("lz:lift:{}{b0}{first}", v(c)))),
                        (Dir::W, west(r)),
                        (Dir::S, south(c, first)),
                    ],
                );
                t.add(
                    "lgn",
                    color(r, c),
                    vec![
                        (Dir::D, g1(format!("lz:top:{}{b0}{first}", v(c)))),
                        (Dir::E, west(r)),
                        (Dir::W, west(r)),
                        (Dir::S, south(c, first)),
                    ],
                );
            }
        }
    }
    for c in VALS {
        let r = c;
        t.add(
            "lgd",
            color(r, c),
            vec![
                (Dir::N, g2(format!("lg:diag:{}", v(c)))),
                (Dir::W, west(r)),
                (Dir::E, g1(format!("lg:rdiag:{}", v(r)))),
                (Dir::S, col(c)),
            ],
        );
    }
    for r in VALS {
        for c in VALS {
            t.add("lge", color(r, c), vec![(Dir::N, col(c)), (Dir::S, col(c)), (Dir::W, east(r)), (Dir::E, east(r))]);
            t.add("lgw", color(r, c), vec![(Dir::N, col(c)), (Dir::S, col(c)), (Dir::E, west(r)), (Dir::W, west(r))]);
            t.add(
                "lgt",
                color(r, c),
                vec![
                    (Dir::W, g1(format!("lg:rdiag:{}", v(r)))),
                    (Dir::N, col(c)),
                    (Dir::E, east(r)),
                    (Dir::S, g2(format!("lg:diag:{}", v(c)))),
                ],
            );
        }
    }
}

/// Geometry of the lower plane for `c = |b|` and side `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LiftShape {
    /// Counter digits.
    pub width: u32,
    /// Counter value in the seed column.
    pub start: u64,
    /// Whether column 1 grows upward.
    pub first_up: bool,
}

pub(crate) fn lift_shape(m: u32) -> LiftShape {
    let ups = (1..m).filter(|x| (m - 1 - x) % 2 == 0).count() as u64;
    let width = ceil_log2(ups + 1).max(1);
    LiftShape { width, start: (1u64 << width) - 1 - ups, first_up: (m - 1 - 1) % 2 == 0 }
}

/// Builds the two-plane system. Needs `2 <= |b| <= m`.
pub fn compile_pn_lift(b: &[u8], m: u32) -> Result<CompiledSystem, DiagError> {
    let c = b.len();
    if c < 2 || c > m as usize || b.iter().any(|&x| x > 1) {
        return Err(DiagError::BadLength { len: c, m });
    }
    let shape = lift_shape(m);
    let w = shape.width;
    let height = w + c as u32;
    let y0 = m as i32 - height as i32;
    let b0 = b[0];
    // Seed column copy register: cell j holds b[(j + 1) mod c].
    let seed_val = |j: usize| -> Val { (b[(j + 1) % c], u8::from((j + 1) % c == 0)) };

    let mut t = Tiles { list: Vec::new() };
    let mut seed_ids = Vec::new();
    for k in 0..height {
        let mut gs = Vec::new();
        if k > 0 {
            gs.push((Dir::S, g2(format!("ls:{}", k - 1))));
        }
        if k + 1 < height {
            gs.push((Dir::N, g2(format!("ls:{k}"))));
        }
        let color = if k < w {
            let bit = ((shape.start >> k) & 1) as u8;
            let f = flag(k, w);
            gs.push(match (shape.first_up, is_bottom(f)) {
                (true, true) => (Dir::E, g2(format!("lz:turn:{bit}{f}"))),
                (true, false) => (Dir::E, g1(format!("lz:cd:{bit}{f}"))),
                (false, _) => (Dir::E, g1(format!("lz:cu:{bit}{f}"))),
            });
            WHITE
        } else {
            let j = (k - w) as usize;
            let here = seed_val(j);
            let top = j + 1 == c;
            if top {
                gs.push((Dir::U, g1(format!("lz:top:{}{b0}0", v(here)))));
            }
            gs.push(match (shape.first_up, j == 0, top) {
                (true, true, _) => (Dir::E, g1(format!("lz:xdb:{}{}", v(here), v(seed_val(1))))),
                (true, false, false) => (Dir::E, g1(format!("lz:xd:{}", v(seed_val(j + 1))))),
                (true, false, true) => (Dir::E, g1(format!("lz:xdt1:{b0}"))),
                (false, true, _) => (Dir::E, g1(format!("lz:xub:{}", v(here)))),
                (false, false, false) => (Dir::E, g1(format!("lz:xu:{}", v(here)))),
                (false, false, true) => (Dir::E, g2(format!("lz:tu1:{}{}{b0}", v(here), v(seed_val(0))))),
            });
            bit_color(here.0)
        };
        seed_ids.push(t.add("ls", color, gs));
    }
    counter_tiles(&mut t);
    copy_tiles(&mut t);
    grid_tiles(&mut t);

    let ts = TileSet { tiles: t.list, palette: default_palette() };
    let system = TileAssemblySystem::new(ts, vec![(Loc::new3(0, y0, 0), seed_ids[0])], 2, Dim::Three)
        .expect("lift tiles are well formed");
    Ok(CompiledSystem { system, target: render_pn(b, c as u32, m), budget: Budget::lift(c, m) })
}
