//! Field files: a text header line `machlab-field n=<n> L=<L> name=<name>`
//! followed by `n²` little-endian `f64` grid values in row-major order.
//! A file may hold several such blocks back to back.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{io_at, Error, Result};
use crate::spectral::{Grid, SpectralField, VectorField};

const MAGIC: &str = "machlab-field";

/// A field with its name tag.
#[derive(Debug, Clone)]
pub struct NamedField {
    pub name: String,
    pub field: SpectralField,
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

/// Appends one block to a writer.
pub fn write_block<W: Write>(w: &mut W, name: &str, field: &SpectralField) -> Result<()> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(Error::Config(format!("field name '{name}' must be nonempty without whitespace")));
    }
    let g = field.grid();
    writeln!(w, "{MAGIC} n={} L={} name={name}", g.n(), g.box_length())?;
    let mut buf = Vec::with_capacity(8 * g.len());
    for v in field.physical() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads the next block, or `None` at end of input.
pub fn read_block<R: BufRead>(r: &mut R) -> Result<Option<NamedField>> {
    let mut header = Vec::new();
    if r.read_until(b'\n', &mut header)? == 0 {
        return Ok(None);
    }
    let header = String::from_utf8(header).map_err(|_| format_err("field header is not UTF-8"))?;
    let mut parts = header.trim_end().split(' ');
    if parts.next() != Some(MAGIC) {
        return Err(format_err(format!("missing '{MAGIC}' header")));
    }
    let (mut n, mut l, mut name) = (None, None, None);
    for p in parts {
        match p.split_once('=') {
            Some(("n", v)) => n = v.parse::<usize>().ok(),
            Some(("L", v)) => l = v.parse::<f64>().ok(),
            Some(("name", v)) => name = Some(v.to_string()),
            _ => return Err(format_err(format!("unexpected header token '{p}'"))),
        }
    }
    let (n, l, name) = match (n, l, name) {
        (Some(n), Some(l), Some(name)) => (n, l, name),
        _ => return Err(format_err("header needs n, L and name")),
    };
    let g = Grid::new(n, l).map_err(|e| format_err(format!("bad grid in header: {e}")))?;
    let mut bytes = vec![0u8; 8 * g.len()];
    r.read_exact(&mut bytes).map_err(|_| format_err(format!("field '{name}' is truncated")))?;
    let vals = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(Some(NamedField { name, field: SpectralField::from_physical(g, vals)? }))
}

pub fn write_fields(path: &Path, fields: &[(&str, &SpectralField)]) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| io_at(path, e))?;
    let mut w = std::io::BufWriter::new(f);
    for (name, field) in fields {
        write_block(&mut w, name, field)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_fields(path: &Path) -> Result<Vec<NamedField>> {
    let f = std::fs::File::open(path).map_err(|e| io_at(path, e))?;
    let mut r = BufReader::new(f);
    let mut out = Vec::new();
    while let Some(b) = read_block(&mut r)? {
        out.push(b);
    }
    if out.is_empty() {
        return Err(format_err(format!("{} holds no fields", path.display())));
    }
    Ok(out)
}

pub fn write_field(path: &Path, name: &str, field: &SpectralField) -> Result<()> {
    write_fields(path, &[(name, field)])
}

/// First field of a file.
pub fn read_field(path: &Path) -> Result<NamedField> {
    Ok(read_fields(path)?.remove(0))
}

/// Velocity snapshots `v1@<t>`, `v2@<t>` of a stored trajectory.
pub fn write_velocity_history(path: &Path, times: &[f64], velocities: &[VectorField]) -> Result<()> {
    let names: Vec<(String, String)> = times.iter().map(|t| (format!("v1@{t}"), format!("v2@{t}"))).collect();
    let mut blocks = Vec::new();
    for ((a, b), v) in names.iter().zip(velocities) {
        blocks.push((a.as_str(), &v.v1));
        blocks.push((b.as_str(), &v.v2));
    }
    write_fields(path, &blocks)
}

/// Inverse of [`write_velocity_history`]; other blocks are ignored.
pub fn read_velocity_history(path: &Path) -> Result<(Vec<f64>, Vec<VectorField>)> {
    let fields = read_fields(path)?;
    let mut times = Vec::new();
    let mut vs = Vec::new();
    let mut pending: Option<(f64, SpectralField)> = None;
    for f in fields {
        let Some((comp, t)) = f.name.split_once('@') else { continue };
        let t: f64 = t.parse().map_err(|_| format_err(format!("bad time in field name '{}'", f.name)))?;
        match (comp, pending.take()) {
            ("v1", None) => pending = Some((t, f.field)),
            ("v2", Some((t1, v1))) if t1 == t => {
                times.push(t);
                vs.push(VectorField::new(v1, f.field)?);
            }
            ("v1" | "v2", _) => return Err(format_err(format!("unpaired velocity component '{}'", f.name))),
            _ => {}
        }
    }
    if vs.is_empty() || pending.is_some() {
        return Err(format_err(format!("{} holds no complete velocity snapshots", path.display())));
    }
    Ok((times, vs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random;
    use std::f64::consts::PI;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let f = random::smooth(g, &mut random::rng(1), 4.0);
        let p = dir.path().join("a.field");
        write_field(&p, "omega", &f).unwrap();
        let back = read_field(&p).unwrap();
        assert_eq!(back.name, "omega");
        assert_eq!(back.field.grid(), g);
        assert_eq!(back.field.physical(), f.physical());
        let text = std::fs::read(&p).unwrap();
        assert!(text.starts_with(format!("machlab-field n=16 L={} name=omega\n", 2.0 * PI).as_bytes()));
        assert_eq!(text.len(), format!("machlab-field n=16 L={} name=omega\n", 2.0 * PI).len() + 8 * 256);
    }

    #[test]
    fn velocity_history_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::new(8, 4.0).unwrap();
        let mut r = random::rng(2);
        let vs = vec![random::smooth_vector(g, &mut r, 2.0), random::smooth_vector(g, &mut r, 2.0)];
        let p = dir.path().join("traj.field");
        write_velocity_history(&p, &[0.0, 0.5], &vs).unwrap();
        let (t, back) = read_velocity_history(&p).unwrap();
        assert_eq!(t, vec![0.0, 0.5]);
        assert_eq!(back[1].v2.physical(), vs[1].v2.physical());
    }

    #[test]
    fn malformed_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad");
        for body in [&b"hello\n"[..], b"machlab-field n=8 L=4 name=x\n\x00\x01", b"machlab-field n=4 name=x\n", b""] {
            std::fs::write(&p, body).unwrap();
            assert!(matches!(read_fields(&p), Err(Error::Format(_))));
        }
        assert!(matches!(read_fields(&dir.path().join("missing")), Err(Error::Io(_))));
        let g = Grid::new(8, 4.0).unwrap();
        assert!(write_field(&p, "has space", &SpectralField::zeros(g)).is_err());
    }
}
