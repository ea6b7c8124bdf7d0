//! Text and binary serialization of lattice functions.
//!
//! **CSV** (`.csv`), UTF-8, comma separated, one record per line:
//!
//! ```text
//! latinterp-lattice,1
//! d,N_1,…,N_d,m
//! ξ_1,…,ξ_d,v_1,…,v_m      (one line per site, canonical coordinates)
//! ```
//!
//! Sites may appear in any order but each site of the box must appear
//! exactly once. Values are written in shortest round-trip decimal form.
//!
//! **Binary** (`.latf`), little endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4 | magic `LATF` |
//! | 2 | format version `1` (u16) |
//! | 1 | scalar width in bytes, 4 or 8 |
//! | 1 | `d` |
//! | 8·d | `N_1 … N_d` (u64) |
//! | 8 | `m` (u64) |
//! | w·m·ΠN | values in storage order (row-major sites, last axis fastest, components interleaved) |

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, LatticeFunction};
use crate::scalar::Scalar;

pub const CSV_MAGIC: &str = "latinterp-lattice";
pub const BINARY_MAGIC: &[u8; 4] = b"LATF";
pub const FORMAT_VERSION: u16 = 1;

pub fn write_csv<T: Scalar, W: Write>(u: &LatticeFunction<T>, mut out: W) -> Result<()> {
    let dom = u.domain();
    writeln!(out, "{CSV_MAGIC},{FORMAT_VERSION}")?;
    let mut header: Vec<String> = vec![dom.dim().to_string()];
    header.extend(dom.extent().iter().map(|n| n.to_string()));
    header.push(u.components().to_string());
    writeln!(out, "{}", header.join(","))?;
    for (i, site) in dom.sites().enumerate() {
        let mut fields: Vec<String> = site.iter().map(|s| s.to_string()).collect();
        fields.extend(u.at(i).iter().map(|v| v.to_string()));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn read_csv<T: Scalar, R: BufRead>(input: R) -> Result<LatticeFunction<T>> {
    let mut lines = input.lines();
    let mut next_line = |what: &str| -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))?
            .map_err(Error::from)
    };
    let magic = next_line("magic line")?;
    if magic.trim() != format!("{CSV_MAGIC},{FORMAT_VERSION}") {
        return Err(Error::Parse(format!("bad magic line {magic:?}")));
    }
    let header: Vec<usize> = next_line("header")?
        .split(',')
        .map(|f| f.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("bad header: {e}")))?;
    let d = *header
        .first()
        .ok_or_else(|| Error::Parse("empty header".into()))?;
    if header.len() != d + 2 {
        return Err(Error::Parse(format!(
            "header has {} fields, expected {}",
            header.len(),
            d + 2
        )));
    }
    let domain = LatticeDomain::new(header[1..=d].to_vec())?;
    let m = header[d + 1];
    let n = domain.len();
    let mut values = vec![T::zero(); n * m];
    let mut seen = vec![false; n];
    let mut count = 0usize;
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != d + m {
            return Err(Error::Parse(format!(
                "record {} has {} fields, expected {}",
                lineno + 1,
                fields.len(),
                d + m
            )));
        }
        let site: Vec<i64> = fields[..d]
            .iter()
            .map(|f| f.parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("bad site on record {}: {e}", lineno + 1)))?;
        for (axis, (&s, &ext)) in site.iter().zip(domain.extent()).enumerate() {
            if s < 0 || s >= ext as i64 {
                return Err(Error::Parse(format!(
                    "site coordinate {s} on axis {axis} outside [0, {ext})"
                )));
            }
        }
        let idx = domain.index(&site);
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::Parse(format!("duplicate site {site:?}")));
        }
        for (c, f) in fields[d..].iter().enumerate() {
            let v: f64 = f
                .parse()
                .map_err(|e| Error::Parse(format!("bad value {f:?}: {e}")))?;
            values[idx * m + c] = T::of(v);
        }
        count += 1;
    }
    if count != n {
        return Err(Error::Parse(format!(
            "expected {n} site records, found {count}"
        )));
    }
    LatticeFunction::new(domain, m, values)
}

pub fn write_binary<T: Scalar, W: Write>(u: &LatticeFunction<T>, mut out: W) -> Result<()> {
    let width = std::mem::size_of::<T>();
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&[width as u8, u.domain().dim() as u8])?;
    for &n in u.domain().extent() {
        out.write_all(&(n as u64).to_le_bytes())?;
    }
    out.write_all(&(u.components() as u64).to_le_bytes())?;
    for &v in u.values() {
        match width {
            4 => out.write_all(&(v.to_f64_lossy() as f32).to_le_bytes())?,
            _ => out.write_all(&v.to_f64_lossy().to_le_bytes())?,
        }
    }
    Ok(())
}

pub fn read_binary<T: Scalar, R: Read>(mut input: R) -> Result<LatticeFunction<T>> {
    let mut head = [0u8; 8];
    input.read_exact(&mut head)?;
    if &head[..4] != BINARY_MAGIC {
        return Err(Error::Parse("bad binary magic".into()));
    }
    let version = u16::from_le_bytes([head[4], head[5]]);
    if version != FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported format version {version}"
        )));
    }
    let width = head[6] as usize;
    let d = head[7] as usize;
    if width != 4 && width != 8 {
        return Err(Error::Parse(format!("unsupported scalar width {width}")));
    }
    let read_u64 = |input: &mut R| -> Result<u64> {
        let mut b = [0u8; 8];
        input.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    };
    let extent = (0..d)
        .map(|_| read_u64(&mut input).map(|v| v as usize))
        .collect::<Result<Vec<_>>>()?;
    let m = read_u64(&mut input)? as usize;
    let domain = LatticeDomain::new(extent)?;
    let count = domain.len() * m;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let v = if width == 4 {
            let mut b = [0u8; 4];
            input.read_exact(&mut b)?;
            f32::from_le_bytes(b) as f64
        } else {
            let mut b = [0u8; 8];
            input.read_exact(&mut b)?;
            f64::from_le_bytes(b)
        };
        values.push(T::of(v));
    }
    LatticeFunction::new(domain, m, values)
}
