//! TAMSET v1 text format.
//!
//! ```text
//! TAMSET v1
//! DIM 3                      (omitted for 2D)
//! TEMP 2
//! PALETTE 0=White 1=Black    (omitted when it is the default palette)
//! TILE a COLOR 0 N x|1 E -|0 S -|0 W -|0
//! SEED a 0 0
//! ```
//! Blank lines and lines starting with `#` are ignored by the parser.

use thiserror::Error;

use super::{default_palette, Dim, Dir, Glue, Loc, ModelError, TileAssemblySystem, TileSet, TileType};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation error: {0}")]
    Validation(String),
}

fn perr(line: usize, msg: impl Into<String>) -> CodecError {
    CodecError::Parse { line, msg: msg.into() }
}

fn glue_text(g: &Glue) -> String {
    if g.is_null() {
        "-|0".to_string()
    } else {
        format!("{}|{}", g.label, g.strength)
    }
}

pub fn serialize_system(sys: &TileAssemblySystem) -> String {
    let mut out = String::from("TAMSET v1\n");
    if sys.dim == Dim::Three {
        out.push_str("DIM 3\n");
    }
    out.push_str(&format!("TEMP {}\n", sys.temperature));
    if sys.tileset.palette != default_palette() {
        out.push_str("PALETTE");
        for (i, name) in sys.tileset.palette.iter().enumerate() {
            out.push_str(&format!(" {i}={name}"));
        }
        out.push('\n');
    }
    for t in &sys.tileset.tiles {
        out.push_str(&format!("TILE {} COLOR {}", t.name, t.color));
        for &d in sys.dim.dirs() {
            out.push_str(&format!(" {} {}", d.letter(), glue_text(t.glue(d))));
        }
        out.push('\n');
    }
    for &(loc, t) in &sys.seed {
        let name = &sys.tileset.tiles[t].name;
        match sys.dim {
            Dim::Two => out.push_str(&format!("SEED {} {} {}\n", name, loc.x, loc.y)),
            Dim::Three => out.push_str(&format!("SEED {} {} {} {}\n", name, loc.x, loc.y, loc.z)),
        }
    }
    out
}

fn parse_glue(tok: &str, line: usize) -> Result<Glue, CodecError> {
    let (label, strength) = tok
        .split_once('|')
        .ok_or_else(|| perr(line, format!("glue {tok:?} is not label|strength")))?;
    let strength: u32 = strength
        .parse()
        .map_err(|_| perr(line, format!("bad glue strength {strength:?}")))?;
    if label == "-" {
        if strength != 0 {
            return Err(perr(line, "null glue must have strength 0"));
        }
        return Ok(Glue::null());
    }
    if label.is_empty() {
        return Err(perr(line, "empty glue label"));
    }
    Ok(Glue { label: label.to_string(), strength })
}

fn parse_int<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, CodecError> {
    tok.parse().map_err(|_| perr(line, format!("bad {what} {tok:?}")))
}

pub fn parse_system(text: &str) -> Result<TileAssemblySystem, CodecError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, "TAMSET v1")) => {}
        Some((n, other)) => return Err(perr(n, format!("expected header `TAMSET v1`, got {other:?}"))),
        None => return Err(perr(1, "empty input")),
    }

    let mut dim = None;
    let mut temp = None;
    let mut palette = None;
    let mut tiles: Vec<TileType> = Vec::new();
    let mut seeds: Vec<(String, Loc, usize)> = Vec::new();

    for (n, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "DIM" => {
                if dim.is_some() || temp.is_some() || !tiles.is_empty() {
                    return Err(perr(n, "DIM must come right after the header, once"));
                }
                dim = match toks.get(1..) {
                    Some(["2"]) => Some(Dim::Two),
                    Some(["3"]) => Some(Dim::Three),
                    _ => return Err(perr(n, "DIM must be 2 or 3")),
                };
            }
            "TEMP" => {
                if temp.is_some() || !tiles.is_empty() {
                    return Err(perr(n, "TEMP given twice or after tiles"));
                }
                if toks.len() != 2 {
                    return Err(perr(n, "TEMP takes one value"));
                }
                temp = Some(parse_int::<u32>(toks[1], n, "temperature")?);
            }
            "PALETTE" => {
                if palette.is_some() || !tiles.is_empty() {
                    return Err(perr(n, "PALETTE given twice or after tiles"));
                }
                let mut p = Vec::new();
                for (i, tok) in toks[1..].iter().enumerate() {
                    let (idx, name) = tok
                        .split_once('=')
                        .ok_or_else(|| perr(n, format!("palette entry {tok:?} is not idx=name")))?;
                    if parse_int::<usize>(idx, n, "palette index")? != i || name.is_empty() {
                        return Err(perr(n, "palette indices must be 0,1,2,... in order"));
                    }
                    p.push(name.to_string());
                }
                if p.is_empty() {
                    return Err(perr(n, "empty palette"));
                }
                palette = Some(p);
            }
            "TILE" => {
                if temp.is_none() {
                    return Err(perr(n, "TILE before TEMP"));
                }
                if !seeds.is_empty() {
                    return Err(perr(n, "TILE after SEED"));
                }
                let d = dim.unwrap_or(Dim::Two);
                let want = 4 + 2 * d.sides();
                if toks.len() != want || toks[2] != "COLOR" {
                    return Err(perr(n, format!("TILE line needs name, COLOR and {} glues", d.sides())));
                }
                let color = parse_int::<u16>(toks[3], n, "color")?;
                let mut glues: Vec<Option<Glue>> = vec![None; d.sides()];
                for pair in toks[4..].chunks(2) {
                    let dir = Dir::from_letter(pair[0])
                        .filter(|x| x.index() < d.sides())
                        .ok_or_else(|| perr(n, format!("unknown side {:?}", pair[0])))?;
                    if glues[dir.index()].is_some() {
                        return Err(perr(n, format!("side {} given twice", pair[0])));
                    }
                    glues[dir.index()] = Some(parse_glue(pair[1], n)?);
                }
                let glues = glues.into_iter().map(|g| g.expect("all sides present")).collect();
                tiles.push(TileType::new(toks[1], color, glues));
            }
            "SEED" => {
                let d = dim.unwrap_or(Dim::Two);
                let want = if d == Dim::Two { 4 } else { 5 };
                if toks.len() != want {
                    return Err(perr(n, "malformed SEED line"));
                }
                let x = parse_int::<i32>(toks[2], n, "x")?;
                let y = parse_int::<i32>(toks[3], n, "y")?;
                let z = if want == 5 { parse_int::<i32>(toks[4], n, "z")? } else { 0 };
                seeds.push((toks[1].to_string(), Loc::new3(x, y, z), n));
            }
            other => return Err(perr(n, format!("unknown directive {other:?}"))),
        }
    }

    let temp = temp.ok_or_else(|| perr(text.lines().count().max(1), "missing TEMP"))?;
    let palette = palette.unwrap_or_else(default_palette);
    let ts = TileSet { tiles, palette };
    let mut seed = Vec::new();
    for (name, loc, n) in seeds {
        let idx = ts
            .tiles
            .iter()
            .position(|t| t.name == name)
            .ok_or_else(|| CodecError::Validation(format!("line {n}: SEED names unknown tile {name:?}")))?;
        seed.push((loc, idx));
    }
    TileAssemblySystem::new(ts, seed, temp, dim.unwrap_or(Dim::Two)).map_err(|e| match e {
        ModelError::Invalid(m) => CodecError::Validation(m),
        other => CodecError::Validation(other.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: &str = "TAMSET v1\nTEMP 1\nTILE a COLOR 0 N -|0 E x|1 S -|0 W x|1\nSEED a 0 0\n";

    #[test]
    fn one_tile_is_four_lines() {
        let sys = parse_system(ONE).unwrap();
        let text = serialize_system(&sys);
        assert_eq!(text, ONE);
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn duplicate_names_rejected() {
        let t = "TAMSET v1\nTEMP 1\nTILE a COLOR 0 N -|0 E -|0 S -|0 W -|0\nTILE a COLOR 0 N -|0 E -|0 S -|0 W -|0\nSEED a 0 0\n";
        assert!(matches!(parse_system(t), Err(CodecError::Validation(_))));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let t = "TAMSET v1\nTEMP 1\nTILE a COLOR 0 N -|0 E -|0 S -|0\nSEED a 0 0\n";
        assert!(matches!(parse_system(t), Err(CodecError::Parse { line: 3, .. })));
        assert!(matches!(parse_system("nope"), Err(CodecError::Parse { line: 1, .. })));
    }

    #[test]
    fn two_d_rejects_z() {
        let t = "TAMSET v1\nTEMP 1\nTILE a COLOR 0 N -|0 E -|0 S -|0 W -|0\nSEED a 0 0 1\n";
        assert!(parse_system(t).is_err());
    }

    #[test]
    fn three_d_round_trip() {
        let t = "TAMSET v1\nDIM 3\nTEMP 2\nPALETTE 0=White 1=Black\nTILE a COLOR 1 N -|0 E -|0 S -|0 W -|0 U up|2 D -|0\nSEED a 3 -4 0\n";
        let sys = parse_system(t).unwrap();
        assert_eq!(serialize_system(&sys), t);
    }

    #[test]
    fn canonicalizes_strength_and_comments() {
        let t = "# c\nTAMSET v1\n\nTEMP 2\nTILE a COLOR 0 N x|9 E -|0 S -|0 W -|0\nSEED a 0 0\n";
        let sys = parse_system(t).unwrap();
        assert_eq!(
            serialize_system(&sys),
            "TAMSET v1\nTEMP 2\nTILE a COLOR 0 N x|2 E -|0 S -|0 W -|0\nSEED a 0 0\n"
        );
    }
}
