//! Image file formats.
//!
//! Exact data travels in a minimal raw format: a single header line
//! `IMGF64 N`, followed by N² little-endian IEEE-754 doubles in row-major
//! order. Previews are written as portable graymaps, either ASCII (P2) or
//! binary (P5), at 8 or 16 bits, normalized to the image range.

use crate::error::{Error, Result};
use crate::imaging::grid::ImageGrid;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &str = "IMGF64";

/// Writes the exact raw format.
pub fn write_imgf64(path: &Path, img: &ImageGrid) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{MAGIC} {}", img.side())?;
    for v in img.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the exact raw format.
pub fn read_imgf64(path: &Path) -> Result<ImageGrid> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = Vec::new();
    // read a single header line byte by byte
    loop {
        let mut byte = [0u8; 1];
        r.read_exact(&mut byte)?;
        if byte[0] == b'\n' {
            break;
        }
        if header.len() > 64 {
            return Err(Error::Format {
                path: path.display().to_string(),
                reason: "header line too long".into(),
            });
        }
        header.push(byte[0]);
    }
    let header = String::from_utf8(header).map_err(|_| Error::Format {
        path: path.display().to_string(),
        reason: "header is not utf-8".into(),
    })?;
    let mut parts = header.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(MAGIC), Some(n), None) => {
            let side: usize = n.parse().map_err(|_| Error::Format {
                path: path.display().to_string(),
                reason: format!("bad side length '{n}'"),
            })?;
            let count = side * side;
            let mut raw = vec![0u8; count * 8];
            r.read_exact(&mut raw)?;
            let data: Vec<f64> = raw
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            ImageGrid::new(side, data)
        }
        _ => Err(Error::Format {
            path: path.display().to_string(),
            reason: format!("expected '{MAGIC} N' header, got '{header}'"),
        }),
    }
}

/// Bit depth for graymap previews.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmDepth {
    Eight,
    Sixteen,
}

/// Writes a preview graymap, normalizing [min, max] to the full bit range.
/// `binary` selects P5; otherwise ASCII P2.
pub fn write_pgm(path: &Path, img: &ImageGrid, depth: PgmDepth, binary: bool) -> Result<()> {
    let (lo, hi) = (img.min(), img.max());
    let span = if hi > lo { hi - lo } else { 1.0 };
    let maxval: u32 = match depth {
        PgmDepth::Eight => 255,
        PgmDepth::Sixteen => 65535,
    };
    let quantize =
        |v: f64| -> u32 { (((v - lo) / span) * maxval as f64).round().clamp(0.0, maxval as f64) as u32 };

    let mut w = BufWriter::new(File::create(path)?);
    let magic = if binary { "P5" } else { "P2" };
    writeln!(w, "{magic}\n{} {}\n{maxval}", img.side(), img.side())?;
    if binary {
        for &v in img.data() {
            let q = quantize(v);
            match depth {
                PgmDepth::Eight => w.write_all(&[q as u8])?,
                PgmDepth::Sixteen => w.write_all(&(q as u16).to_be_bytes())?,
            }
        }
    } else {
        for (i, &v) in img.data().iter().enumerate() {
            let sep = if (i + 1) % img.side() == 0 { "\n" } else { " " };
            write!(w, "{}{sep}", quantize(v))?;
        }
    }
    w.flush()?;
    Ok(())
}
