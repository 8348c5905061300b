//! Binary zero-set cache: a canonical little-endian encoding of a
//! [`ProductSpec`] and its [`WitnessSet`], closed by a SHA-256 checksum.
//!
//! Layout: `b"INVTHRSH"`, `u32` version, `u8` kind, kind payload, `u64` row
//! count and `(α, γ)` per row, then the witness points `v` and `f_zeros`
//! (each a `u64` count and `(chart u8, re, im)` per point), then 32 checksum
//! bytes over everything before them. Reals are stored as `f64` bit patterns.

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::blaschke::{ProductSpec, RowSpec, StackKind};
use crate::construction::{AdaptiveLevel, WitnessSet};
use crate::error::{Error, Result};
use crate::geometry::{Chart, Point};

pub const MAGIC: &[u8; 8] = b"INVTHRSH";
pub const VERSION: u32 = 1;

const KIND_UNIFORM: u8 = 0;
const KIND_ADAPTIVE: u8 = 1;
const KIND_EXPLICIT: u8 = 2;

fn put_f64(out: &mut Vec<u8>, x: f64) {
    out.extend_from_slice(&x.to_bits().to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, x: u64) {
    out.extend_from_slice(&x.to_le_bytes());
}

fn put_points(out: &mut Vec<u8>, pts: &[Point<f64>]) {
    put_u64(out, pts.len() as u64);
    for p in pts {
        out.push(match p.chart() {
            Chart::HalfPlane => 0,
            Chart::Disk => 1,
        });
        put_f64(out, p.re());
        put_f64(out, p.im());
    }
}

fn encode_spec(out: &mut Vec<u8>, spec: &ProductSpec<f64>) {
    match spec.kind() {
        StackKind::UniformStack {
            alpha,
            beta,
            rho,
            n_levels,
        } => {
            out.push(KIND_UNIFORM);
            put_f64(out, *alpha);
            put_f64(out, *beta);
            put_f64(out, *rho);
            put_u64(out, *n_levels as u64);
        }
        StackKind::Adaptive { alpha, levels } => {
            out.push(KIND_ADAPTIVE);
            put_f64(out, *alpha);
            put_u64(out, levels.len() as u64);
            for l in levels {
                put_u64(out, l.n as u64);
                put_f64(out, l.alpha_n);
                put_f64(out, l.beta_n);
                put_f64(out, l.rho_n);
                put_u64(out, l.m_n);
            }
        }
        StackKind::Explicit => out.push(KIND_EXPLICIT),
    }
    put_u64(out, spec.rows().len() as u64);
    for r in spec.rows() {
        put_f64(out, r.alpha());
        put_f64(out, r.gamma());
    }
}

/// Canonical bytes of the spec alone (no header, no witness).
pub fn spec_bytes(spec: &ProductSpec<f64>) -> Vec<u8> {
    let mut out = Vec::new();
    encode_spec(&mut out, spec);
    out
}

/// Lower-case hex SHA-256 of [`spec_bytes`].
pub fn spec_hash(spec: &ProductSpec<f64>) -> String {
    Sha256::digest(spec_bytes(spec))
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn encode(spec: &ProductSpec<f64>, witness: &WitnessSet<f64>) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    encode_spec(&mut out, spec);
    put_points(&mut out, &witness.v);
    put_points(&mut out, &witness.f_zeros);
    let sum = Sha256::digest(&out);
    out.extend_from_slice(&sum);
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Cache(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn len(&mut self) -> Result<usize> {
        let n = self.u64()?;
        // every counted item takes at least 8 bytes
        if n > (self.buf.len() / 8) as u64 {
            return Err(Error::Cache(format!("implausible count {n}")));
        }
        Ok(n as usize)
    }

    fn points(&mut self) -> Result<Vec<Point<f64>>> {
        let n = self.len()?;
        (0..n)
            .map(|_| {
                let chart = self.u8()?;
                let (re, im) = (self.f64()?, self.f64()?);
                match chart {
                    0 => Point::half_plane(re, im),
                    1 => Point::disk(re, im),
                    c => Err(Error::Cache(format!("unknown chart tag {c}"))),
                }
            })
            .collect()
    }
}

pub fn decode(bytes: &[u8]) -> Result<(ProductSpec<f64>, WitnessSet<f64>)> {
    if bytes.len() < MAGIC.len() + 4 + 32 || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::Cache("not a zero-set cache file".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(Error::Cache(format!(
            "cache version {version}, this build reads version {VERSION}"
        )));
    }
    let (body, sum) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != sum {
        return Err(Error::Cache("checksum mismatch".into()));
    }
    let mut r = Reader { buf: body, pos: 12 };
    let kind = r.u8()?;
    let rebuilt = match kind {
        KIND_UNIFORM => {
            let (alpha, beta, rho) = (r.f64()?, r.f64()?, r.f64()?);
            let n_levels = r.u64()? as usize;
            let spec = ProductSpec::uniform(alpha, rho, n_levels)?;
            if !matches!(spec.kind(), StackKind::UniformStack { beta: b, .. } if b.to_bits() == beta.to_bits()) {
                return Err(Error::Cache("stored β disagrees with β(α)".into()));
            }
            Some(spec)
        }
        KIND_ADAPTIVE => {
            let alpha = r.f64()?;
            let n = r.len()?;
            let mut levels = Vec::with_capacity(n);
            for _ in 0..n {
                levels.push(AdaptiveLevel {
                    n: r.u64()? as usize,
                    alpha_n: r.f64()?,
                    beta_n: r.f64()?,
                    rho_n: r.f64()?,
                    m_n: r.u64()?,
                });
            }
            Some(ProductSpec::adaptive(alpha, levels)?)
        }
        KIND_EXPLICIT => None,
        k => return Err(Error::Cache(format!("unknown spec kind {k}"))),
    };
    let n_rows = r.len()?;
    let mut rows = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        rows.push(RowSpec::new(r.f64()?, r.f64()?)?);
    }
    let spec = match rebuilt {
        Some(spec) => {
            let same = spec.rows().len() == rows.len()
                && spec.rows().iter().zip(&rows).all(|(a, b)| {
                    a.alpha().to_bits() == b.alpha().to_bits() && a.gamma().to_bits() == b.gamma().to_bits()
                });
            if !same {
                return Err(Error::Cache("stored rows disagree with the stored parameters".into()));
            }
            spec
        }
        None => ProductSpec::explicit(rows)?,
    };
    let v = r.points()?;
    let f_zeros = r.points()?;
    if r.pos != body.len() {
        return Err(Error::Cache(format!("{} trailing bytes", body.len() - r.pos)));
    }
    Ok((spec, WitnessSet { v, f_zeros }))
}

pub fn save(path: &Path, spec: &ProductSpec<f64>, witness: &WitnessSet<f64>) -> Result<()> {
    std::fs::write(path, encode(spec, witness)).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<(ProductSpec<f64>, WitnessSet<f64>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{ThresholdTarget, adaptive_construction, uniform_stack};

    #[test]
    fn round_trips() {
        let (u, wu) = uniform_stack(1.0, 2.0, 5).unwrap();
        let t = ThresholdTarget::from_alpha(1.0).unwrap();
        let (a, wa) = adaptive_construction(t, 1.0, 3).unwrap();
        let e = ProductSpec::explicit(vec![RowSpec::new(0.5, 1.0).unwrap(), RowSpec::new(0.5, 3.0).unwrap()]).unwrap();
        let we = WitnessSet {
            v: vec![Point::disk(0.1, -0.2).unwrap()],
            f_zeros: vec![],
        };
        for (s, w) in [(u, wu), (a, wa), (e, we)] {
            let bytes = encode(&s, &w);
            let (s2, w2) = decode(&bytes).unwrap();
            assert_eq!(s, s2);
            assert_eq!(w, w2);
            assert_eq!(encode(&s2, &w2), bytes);
            assert_eq!(spec_hash(&s), spec_hash(&s2));
        }
    }

    #[test]
    fn rejects_damage() {
        let (s, w) = uniform_stack(1.0, 1.0, 3).unwrap();
        let bytes = encode(&s, &w);
        let mut flipped = bytes.clone();
        flipped[20] ^= 1;
        assert!(matches!(decode(&flipped), Err(Error::Cache(m)) if m.contains("checksum")));
        let mut versioned = bytes.clone();
        versioned[8] = 2;
        assert!(matches!(decode(&versioned), Err(Error::Cache(m)) if m.contains("version")));
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode(b"nope").is_err());
    }
}
