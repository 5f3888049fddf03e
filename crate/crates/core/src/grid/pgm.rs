//! Binary PGM (P5) serialization of grids and scalar fields.
//!
//! Header layout:
//!
//! ```text
//! P5
//! # minkperi h=<spacing> origin=<x> <y> [<z>] [dims=<nx> <ny> <nz>]
//! <width> <height>
//! 255
//! ```
//!
//! Rows are written in increasing `y`, one byte per cell, 255 for occupied
//! and 0 for empty. Three-dimensional grids stack their `z` slices
//! vertically (`height = ny * nz`) and carry `dims=` in the comment.
//!
//! Scalar fields use the same layout with an extra `# minkperi float32`
//! comment line, and four little-endian IEEE bytes per cell instead of one.
//! Spacing and origin are printed in shortest round-trip form, so reading a
//! written file reproduces the geometry bit for bit.

use std::io::{BufRead, Write};

use super::{GridSet, ScalarField};
use crate::error::{Error, Result};
use crate::scalar::Real;

const FLOAT_TAG: &str = "float32";

struct Header<T> {
    spacing: T,
    origin: Vec<T>,
    dims: Vec<usize>,
    float: bool,
}

fn write_header<T: Real, W: Write>(w: &mut W, spacing: T, origin: &[T], dims: &[usize], float: bool) -> Result<()> {
    writeln!(w, "P5")?;
    if float {
        writeln!(w, "# minkperi {FLOAT_TAG}")?;
    }
    write!(w, "# minkperi h={spacing} origin=")?;
    let coords: Vec<String> = origin.iter().map(|o| o.to_string()).collect();
    write!(w, "{}", coords.join(" "))?;
    if dims.len() == 3 {
        write!(w, " dims={} {} {}", dims[0], dims[1], dims[2])?;
    }
    writeln!(w)?;
    let width = dims[0];
    let height: usize = dims[1..].iter().product();
    writeln!(w, "{width} {height}")?;
    writeln!(w, "255")?;
    Ok(())
}

/// Writes `grid` as P5 bytes.
pub fn write_grid<T: Real, W: Write>(grid: &GridSet<T>, mut w: W) -> Result<()> {
    write_header(&mut w, grid.spacing(), grid.origin(), grid.dims(), false)?;
    let bytes: Vec<u8> = grid.occupancy().iter().map(|&b| if b { 255 } else { 0 }).collect();
    w.write_all(&bytes)?;
    Ok(())
}

/// Writes a scalar field as the float32 PGM variant.
pub fn write_field<T: Real, W: Write>(field: &ScalarField<T>, mut w: W) -> Result<()> {
    write_header(&mut w, field.spacing(), field.origin(), field.dims(), true)?;
    let mut bytes = Vec::with_capacity(field.values().len() * 4);
    for v in field.values() {
        let x = v.to_f32().unwrap_or(f32::NAN);
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&bytes)?;
    Ok(())
}

/// Reads a grid written by [`write_grid`].
pub fn read_grid<T: Real, R: BufRead>(mut r: R) -> Result<GridSet<T>> {
    let header = read_header::<T, _>(&mut r)?;
    if header.float {
        return Err(Error::Parse("float32 field where an occupancy grid was expected".into()));
    }
    let cells: usize = header.dims.iter().product();
    let mut bytes = vec![0u8; cells];
    r.read_exact(&mut bytes).map_err(|e| Error::Parse(format!("truncated pixel data: {e}")))?;
    let occupancy = bytes
        .iter()
        .map(|&b| match b {
            0 => Ok(false),
            255 => Ok(true),
            other => Err(Error::Parse(format!("pixel value {other} is neither 0 nor 255"))),
        })
        .collect::<Result<Vec<bool>>>()?;
    GridSet::from_parts(header.spacing, header.origin, header.dims, occupancy)
}

/// Reads a float32 field written by [`write_field`].
pub fn read_field<T: Real, R: BufRead>(mut r: R) -> Result<ScalarField<T>> {
    let header = read_header::<T, _>(&mut r)?;
    if !header.float {
        return Err(Error::Parse(format!("missing `# minkperi {FLOAT_TAG}` comment")));
    }
    let cells: usize = header.dims.iter().product();
    let mut bytes = vec![0u8; cells * 4];
    r.read_exact(&mut bytes).map_err(|e| Error::Parse(format!("truncated field data: {e}")))?;
    let values = bytes
        .chunks_exact(4)
        .map(|c| T::lit(f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64))
        .collect();
    ScalarField::new(header.spacing, header.origin, header.dims, values)
}

/// Reads whitespace-separated header tokens, gathering comment lines.
fn read_header<T: Real, R: BufRead>(r: &mut R) -> Result<Header<T>> {
    let mut comments = Vec::new();
    let mut tokens = Vec::new();
    while tokens.len() < 4 {
        let mut byte = [0u8; 1];
        // Skip whitespace.
        loop {
            if r.read(&mut byte)? == 0 {
                return Err(Error::Parse("unexpected end of PGM header".into()));
            }
            if !byte[0].is_ascii_whitespace() {
                break;
            }
        }
        if byte[0] == b'#' {
            let mut line = String::new();
            r.read_line(&mut line)?;
            comments.push(line.trim().to_string());
            continue;
        }
        let mut tok = vec![byte[0]];
        loop {
            if r.read(&mut byte)? == 0 {
                break;
            }
            if byte[0].is_ascii_whitespace() {
                // The single whitespace byte after maxval is consumed here.
                break;
            }
            tok.push(byte[0]);
        }
        tokens.push(String::from_utf8_lossy(&tok).into_owned());
    }
    if tokens[0] != "P5" {
        return Err(Error::Parse(format!("bad magic {:?}, expected P5", tokens[0])));
    }
    let num = |s: &str, what: &str| -> Result<usize> {
        s.parse::<usize>().map_err(|_| Error::Parse(format!("bad {what} {s:?}")))
    };
    let width = num(&tokens[1], "width")?;
    let height = num(&tokens[2], "height")?;
    if num(&tokens[3], "maxval")? != 255 {
        return Err(Error::Parse("maxval must be 255".into()));
    }

    let mut float = false;
    let mut geometry = None;
    for c in &comments {
        let Some(body) = c.strip_prefix("minkperi") else { continue };
        let body = body.trim();
        if body == FLOAT_TAG {
            float = true;
        } else {
            geometry = Some(body.to_string());
        }
    }
    let geometry = geometry.ok_or_else(|| Error::Parse("missing `# minkperi h=... origin=...` comment".into()))?;
    let (spacing, origin, dims3) = parse_geometry::<T>(&geometry)?;
    let dims = match (origin.len(), dims3) {
        (3, Some(d)) => {
            if d[0] != width || d[1] * d[2] != height {
                return Err(Error::Parse(format!("dims {d:?} disagree with image size {width}x{height}")));
            }
            d.to_vec()
        }
        (3, None) => return Err(Error::Parse("three-dimensional grid without dims=".into())),
        (2, None) => vec![width, height],
        (1, None) if height == 1 => vec![width],
        _ => return Err(Error::Parse("origin dimension does not match image layout".into())),
    };
    Ok(Header { spacing, origin, dims, float })
}

fn parse_geometry<T: Real>(s: &str) -> Result<(T, Vec<T>, Option<[usize; 3]>)> {
    let bad = |what: &str| Error::Parse(format!("malformed minkperi comment ({what}): {s:?}"));
    let mut words = s.split_whitespace().peekable();
    let h = words.next().and_then(|w| w.strip_prefix("h=")).ok_or_else(|| bad("h="))?;
    let spacing: T = h.parse().map_err(|_| bad("spacing"))?;
    let first = words.next().and_then(|w| w.strip_prefix("origin=")).ok_or_else(|| bad("origin="))?;
    let mut origin = vec![first.parse::<T>().map_err(|_| bad("origin"))?];
    while let Some(w) = words.peek() {
        if w.starts_with("dims=") {
            break;
        }
        origin.push(w.parse::<T>().map_err(|_| bad("origin"))?);
        words.next();
    }
    let dims = match words.next() {
        None => None,
        Some(w) => {
            let d0 = w.strip_prefix("dims=").ok_or_else(|| bad("dims="))?;
            let rest: Vec<&str> = words.collect();
            if rest.len() != 2 {
                return Err(bad("dims"));
            }
            let p = |x: &str| x.parse::<usize>().map_err(|_| bad("dims"));
            Some([p(d0)?, p(rest[0])?, p(rest[1])?])
        }
    };
    if origin.len() > 3 {
        return Err(bad("origin"));
    }
    Ok((spacing, origin, dims))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(g: &GridSet<f64>) -> GridSet<f64> {
        let mut buf = Vec::new();
        write_grid(g, &mut buf).unwrap();
        read_grid(&buf[..]).unwrap()
    }

    #[test]
    fn grid_roundtrip_2d() {
        let g = GridSet::<f64>::rasterize_ball(&[0.1, 1.0 / 3.0], 0.7, 0.037).unwrap();
        assert_eq!(roundtrip(&g), g);
    }

    #[test]
    fn grid_roundtrip_3d() {
        let g = GridSet::<f64>::rasterize_ball(&[0.0, 0.2, -0.3], 0.5, 0.1).unwrap();
        let mut buf = Vec::new();
        write_grid(&g, &mut buf).unwrap();
        let text = String::from_utf8_lossy(&buf[..120]).into_owned();
        assert!(text.contains("dims="));
        assert_eq!(read_grid::<f64, _>(&buf[..]).unwrap(), g);
    }

    #[test]
    fn header_is_plain_pgm() {
        let mut g = GridSet::<f64>::empty(0.5, vec![0.0, 1.0], vec![3, 2]).unwrap();
        g.set(1, true);
        let mut buf = Vec::new();
        write_grid(&g, &mut buf).unwrap();
        let expected = b"P5\n# minkperi h=0.5 origin=0 1\n3 2\n255\n\x00\xff\x00\x00\x00\x00";
        assert_eq!(buf, expected);
    }

    #[test]
    fn field_roundtrip() {
        let f = ScalarField::new(0.25, vec![-1.0, 2.0], vec![2, 3], vec![1.5, -2.0, 0.0, 3.25, 1e-3, 7.0]).unwrap();
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        let back: ScalarField<f64> = read_field(&buf[..]).unwrap();
        assert_eq!(back.dims(), f.dims());
        for (a, b) in back.values().iter().zip(f.values()) {
            assert_eq!(*a, *b as f32 as f64);
        }
        assert!(read_grid::<f64, _>(&buf[..]).is_err());
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(read_grid::<f64, _>(&b"P2\n2 2\n255\n"[..]).is_err());
        assert!(read_grid::<f64, _>(&b"P5\n2 1\n255\n\x00\xff"[..]).is_err());
        assert!(read_grid::<f64, _>(&b"P5\n# minkperi h=1 origin=0 0\n2 1\n255\n\x00"[..]).is_err());
        assert!(read_grid::<f64, _>(&b"P5\n# minkperi h=1 origin=0 0\n2 1\n255\n\x00\x07"[..]).is_err());
    }
}
