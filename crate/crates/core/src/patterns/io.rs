use std::collections::HashMap;

use super::{Pattern, PatternError};

fn perr(line: usize, msg: impl Into<String>) -> PatternError {
    PatternError::Parse { line, msg: msg.into() }
}

/// PAT v1 text, rows listed north first.
pub fn serialize_pattern(p: &Pattern) -> String {
    let mut out = format!("PAT v1\nSIZE {} {}\nPALETTE", p.width(), p.height());
    for (i, name) in p.palette.iter().enumerate() {
        out.push_str(&format!(" {i}={name}"));
    }
    out.push('\n');
    for y in (0..p.height()).rev() {
        out.push_str("ROW");
        for x in 0..p.width() {
            out.push_str(&format!(" {}", p.get(x, y)));
        }
        out.push('\n');
    }
    out
}

pub fn parse_pattern(text: &str) -> Result<Pattern, PatternError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, "PAT v1")) => {}
        Some((n, _)) => return Err(perr(n, "expected header `PAT v1`")),
        None => return Err(perr(1, "empty input")),
    }
    let (n, size) = lines.next().ok_or_else(|| perr(2, "missing SIZE"))?;
    let toks: Vec<&str> = size.split_whitespace().collect();
    let (w, h) = match toks.as_slice() {
        ["SIZE", w, h] => (
            w.parse::<u32>().map_err(|_| perr(n, "bad width"))?,
            h.parse::<u32>().map_err(|_| perr(n, "bad height"))?,
        ),
        _ => return Err(perr(n, "expected SIZE <w> <h>")),
    };
    if w == 0 || h == 0 {
        return Err(perr(n, "pattern sizes must be positive"));
    }
    let (n, pal) = lines.next().ok_or_else(|| perr(3, "missing PALETTE"))?;
    let mut toks = pal.split_whitespace();
    if toks.next() != Some("PALETTE") {
        return Err(perr(n, "expected PALETTE"));
    }
    let mut palette = Vec::new();
    for (i, tok) in toks.enumerate() {
        match tok.split_once('=') {
            Some((idx, name)) if idx.parse::<usize>() == Ok(i) && !name.is_empty() => {
                palette.push(name.to_string())
            }
            _ => return Err(perr(n, format!("bad palette entry {tok:?}"))),
        }
    }
    if palette.is_empty() {
        return Err(perr(n, "empty palette"));
    }
    let mut p = Pattern::new(w, h, palette, 0);
    let mut rows = 0;
    for (n, l) in lines {
        let mut toks = l.split_whitespace();
        if toks.next() != Some("ROW") {
            return Err(perr(n, "expected ROW"));
        }
        if rows == h {
            return Err(perr(n, "too many rows"));
        }
        let vals: Vec<&str> = toks.collect();
        if vals.len() != w as usize {
            return Err(perr(n, format!("row has {} cells, expected {w}", vals.len())));
        }
        let y = h - 1 - rows;
        for (x, v) in vals.iter().enumerate() {
            let c: u16 = v.parse().map_err(|_| perr(n, format!("bad color {v:?}")))?;
            if usize::from(c) >= p.palette.len() {
                return Err(perr(n, format!("color {c} not in palette")));
            }
            p.set(x as u32, y, c);
        }
        rows += 1;
    }
    if rows != h {
        return Err(perr(text.lines().count(), format!("expected {h} rows, found {rows}")));
    }
    Ok(p)
}

/// RGB values for the default palette names.
pub fn default_rgb() -> HashMap<String, [u8; 3]> {
    [
        ("White", [255, 255, 255]),
        ("Black", [0, 0, 0]),
        ("Red", [255, 0, 0]),
        ("Green", [0, 128, 0]),
        ("Aqua", [0, 255, 255]),
        ("Blue", [0, 0, 255]),
        ("Yellow", [255, 255, 0]),
        ("Fuchsia", [255, 0, 255]),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Plain-text P3 image, north row first.
pub fn export_ppm(p: &Pattern, colors: &HashMap<String, [u8; 3]>) -> Result<Vec<u8>, PatternError> {
    let mut rgb = Vec::with_capacity(p.palette.len());
    for name in &p.palette {
        rgb.push(colors.get(name).copied());
    }
    let mut out = format!("P3\n{} {}\n255\n", p.width(), p.height());
    for y in (0..p.height()).rev() {
        let mut row = Vec::with_capacity(p.width() as usize);
        for x in 0..p.width() {
            let c = p.get(x, y);
            let [r, g, b] = rgb[usize::from(c)]
                .ok_or_else(|| PatternError::MissingColor(p.palette[usize::from(c)].clone()))?;
            row.push(format!("{r} {g} {b}"));
        }
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out.into_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{stripes, two_color_palette};

    #[test]
    fn white_cell_file() {
        let p = Pattern::new(1, 1, two_color_palette(), 0);
        let text = serialize_pattern(&p);
        assert_eq!(text, "PAT v1\nSIZE 1 1\nPALETTE 0=White 1=Black\nROW 0\n");
        assert_eq!(parse_pattern(&text).unwrap(), p);
    }

    #[test]
    fn rows_are_north_first() {
        let p = parse_pattern("PAT v1\nSIZE 2 2\nPALETTE 0=White 1=Black\nROW 1 0\nROW 0 0\n").unwrap();
        assert_eq!(p.get(0, 1), 1);
        assert_eq!(p.get(0, 0), 0);
    }

    #[test]
    fn stripes_round_trip() {
        let p = stripes(6, 2, 3).unwrap();
        let t = serialize_pattern(&p);
        assert_eq!(serialize_pattern(&parse_pattern(&t).unwrap()), t);
    }

    #[test]
    fn ppm_header_and_missing_color() {
        let p = Pattern::new(2, 2, two_color_palette(), 1);
        let bytes = export_ppm(&p, &default_rgb()).unwrap();
        assert!(String::from_utf8(bytes).unwrap().starts_with("P3\n2 2\n255\n0 0 0 0 0 0\n"));
        let odd = Pattern::new(1, 1, vec!["Mauve".into()], 0);
        assert_eq!(export_ppm(&odd, &default_rgb()), Err(PatternError::MissingColor("Mauve".into())));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_pattern("PAT v1\nSIZE 2 1\nPALETTE 0=White\nROW 0\n"),
            Err(PatternError::Parse { line: 4, .. })
        ));
        assert!(matches!(
            parse_pattern("PAT v1\nSIZE 1 1\nPALETTE 0=White\nROW 3\n"),
            Err(PatternError::Parse { line: 4, .. })
        ));
    }
}
