//! Stripes compiler.
//!
//! A vertical counter band along the west edge counts rows and, with a
//! register modulo `j`, knows which rows are Black; a horizontal band along
//! the south edge does the same for columns modulo `i`. Both expose one
//! Black/White bit per row or column, and four cooperative fill tiles combine
//! them in the interior.

use super::blueprint::{g, hard_path, Blueprint, Cell};
use super::counter::{base_glues, base_row_black, place_rows, CounterError, CounterSpec, ModRegister};
use super::{Budget, CompiledSystem};
use crate::model::{Dim, Dir, Loc};
use crate::patterns::{stripes, two_color_palette, PatternError, BLACK, WHITE};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum StripesError {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Counter(#[from] CounterError),
}

fn bit_len(v: u64) -> u32 {
    64 - v.leading_zeros()
}

fn color(black: bool) -> u16 {
    if black {
        BLACK
    } else {
        WHITE
    }
}

fn row_glue(black: bool) -> crate::model::Glue {
    g(format!("sf:r{}", u8::from(black)), 1)
}

fn col_glue(black: bool) -> crate::model::Glue {
    g(format!("sf:c{}", u8::from(black)), 1)
}

/// Band widths `(west band, south band)` for a square of side `n`.
pub fn band_widths(n: u32, i: u32, j: u32) -> (u32, u32) {
    let main = bit_len(u64::from(n) - 1);
    (main + bit_len(u64::from(j) - 1), main + bit_len(u64::from(i) - 1))
}

pub fn compile_stripes(n: u32, i: u32, j: u32) -> Result<CompiledSystem, StripesError> {
    let target = stripes(n, i, j)?;
    let budget = Budget::log_n(n);
    let mut bp = Blueprint::new(Dim::Two, 2, two_color_palette());
    let (wv, wh) = band_widths(n, i, j);
    if wv > n || (wv < n && wh > n) {
        // Too small for the bands: write the square out.
        let mut path = Vec::new();
        for y in 0..n as i32 {
            let xs: Vec<i32> = if y % 2 == 0 { (0..n as i32).collect() } else { (0..n as i32).rev().collect() };
            for x in xs {
                let l = Loc::new(x, y);
                bp.put(l, Cell::new("sx", target.get(x as u32, y as u32)));
                path.push(l);
            }
        }
        hard_path(&mut bp, "sx", &path, 2);
        bp.set_seed(path[0]);
        return Ok(CompiledSystem { system: bp.build(), target, budget });
    }
    let main = bit_len(u64::from(n) - 1);
    let black = |x: u32, y: u32| x % i == 0 || y % j == 0;

    let mut vspec = CounterSpec::new(main, 0, u64::from(n) - 1, Dir::N, "sv");
    vspec.modulus = Some(ModRegister { width: wv - main, start: 0, period: j.into() });
    vspec.col_black = (0..wv).map(|k| (wv - 1 - k) % i == 0).collect();
    vspec.right_face = [row_glue(false), row_glue(true)];
    let vorigin = Loc::new(wv as i32 - 1, 0);

    let mut path: Vec<Loc> = (0..wv as i32).map(|x| Loc::new(x, 0)).collect();
    let vbase = base_glues(&vspec);
    for (k, gl) in vbase.into_iter().enumerate() {
        let l = vspec.cell(vorigin, 0, k as u32);
        let mut c = Cell::new("ss", color(black(l.x as u32, 0)));
        c.glues[Dir::N.index()] = gl;
        bp.put(l, c);
    }
    if wv < n {
        let mut hspec = CounterSpec::new(main, wv.into(), u64::from(n) - 1, Dir::E, "sh");
        hspec.modulus = Some(ModRegister { width: wh - main, start: (wv % i).into(), period: i.into() });
        hspec.col_black = (0..wh).map(|k| k % j == 0).collect();
        hspec.left_face = [col_glue(false), col_glue(true)];
        let horigin = Loc::new(wv as i32, 0);
        let column_black = base_row_black(&hspec);
        for (k, gl) in base_glues(&hspec).into_iter().enumerate() {
            let l = hspec.cell(horigin, 0, k as u32);
            let mut c = Cell::new("ss", color(black(wv, l.y as u32)));
            c.glues[Dir::E.index()] = gl;
            if k as u32 == wh - 1 {
                c.glues[Dir::N.index()] = col_glue(column_black);
            }
            bp.put(l, c);
            path.push(l);
        }
        place_rows(&mut bp, &hspec, horigin)?;
        for y in wh..n {
            for x in wv..n {
                let (rb, cb) = (y % j == 0, x % i == 0);
                let mut c = Cell::new("sf", color(rb || cb));
                c.glues[Dir::W.index()] = row_glue(rb);
                c.glues[Dir::E.index()] = row_glue(rb);
                c.glues[Dir::S.index()] = col_glue(cb);
                c.glues[Dir::N.index()] = col_glue(cb);
                bp.put(Loc::new(x as i32, y as i32), c);
            }
        }
    }
    place_rows(&mut bp, &vspec, vorigin)?;
    hard_path(&mut bp, "ss", &path, 2);
    bp.set_seed(path[0]);
    Ok(CompiledSystem { system: bp.build(), target, budget })
}
