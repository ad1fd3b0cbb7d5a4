//! Raw path files.
//!
//! Layout, all little-endian: the 8 bytes `MAPATH1\0`, then `m`, `L` and
//! `seed` as `u64`, then the `m·d` values `X_1, …, X_m` as `f64`.

use std::io::{Read, Write};

use super::Path;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"MAPATH1\0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapathHeader {
    pub m: u64,
    pub lag: u64,
    pub seed: u64,
}

pub fn write_mapath<W: Write>(path: &Path, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    for v in [path.len() as u64, path.lag, path.seed] {
        w.write_all(&v.to_le_bytes())?;
    }
    for x in &path.x {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

/// Header and values; the dimension is `values.len() / m`.
pub fn read_mapath<R: Read>(mut r: R) -> Result<(MapathHeader, Vec<f64>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Io("not a MAPATH1 file".into()));
    }
    let mut word = [0u8; 8];
    let mut next = |r: &mut R| -> Result<u64> {
        r.read_exact(&mut word)?;
        Ok(u64::from_le_bytes(word))
    };
    let header = MapathHeader {
        m: next(&mut r)?,
        lag: next(&mut r)?,
        seed: next(&mut r)?,
    };
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if rest.len() % 8 != 0 || (header.m > 0 && (rest.len() / 8) as u64 % header.m != 0) {
        return Err(Error::Io("truncated MAPATH1 payload".into()));
    }
    let values = rest
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((header, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut p = Path::from_increments(vec![1.5, -2.0, 0.25], 1);
        p.lag = 4;
        p.seed = 99;
        let mut buf = Vec::new();
        write_mapath(&p, &mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 24);
        assert_eq!(&buf[..7], b"MAPATH1");
        let (h, v) = read_mapath(buf.as_slice()).unwrap();
        assert_eq!(
            h,
            MapathHeader {
                m: 3,
                lag: 4,
                seed: 99
            }
        );
        assert_eq!(v, p.x);
    }
}
