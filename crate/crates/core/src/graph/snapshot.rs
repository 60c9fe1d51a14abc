//! Binary graph snapshot.
//!
//! Layout (little-endian): `"NEGR"`, version `u16`, `N` `u32`, `H` `u32`,
//! focal count `u16`, each focal label as `u16` byte length plus UTF-8, then
//! `H` rows of `ceil(N/64)` `u64` words. Optional sections follow, each a
//! four-byte tag, a `u64` payload length and the payload:
//!
//! * `ASGN`: `H` assignment rows in the same word layout as the edges.
//! * `MASS`: `H` design weights as `f64`.
//! * `LABL`: `u32` dictionary size, labels as above, then `H*N` `u16` codes.
//!
//! Readers skip unknown tags.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{ExposureTable, NullExposureGraph};
use crate::bits;
use crate::error::{Error, Result};
use crate::exposure::{Assignment, Label};

const MAGIC: &[u8; 4] = b"NEGR";
const VERSION: u16 = 1;

/// A graph plus the design weights of its assignments, if known.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub graph: NullExposureGraph,
    pub weights: Option<Vec<f64>>,
}

pub fn write_snapshot<W: Write>(graph: &NullExposureGraph, weights: Option<&[f64]>, out: &mut W) -> Result<()> {
    let n = u32::try_from(graph.n_units()).map_err(|_| Error::Format("too many units".into()))?;
    let h = u32::try_from(graph.n_assignments()).map_err(|_| Error::Format("too many assignments".into()))?;
    let nf = u16::try_from(graph.focal().len()).map_err(|_| Error::Format("too many focal labels".into()))?;
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&n.to_le_bytes())?;
    out.write_all(&h.to_le_bytes())?;
    out.write_all(&nf.to_le_bytes())?;
    for label in graph.focal() {
        write_label(out, label)?;
    }
    write_words(out, graph.raw_rows())?;

    if !graph.assignments().is_empty() {
        let mut buf = Vec::new();
        for z in graph.assignments() {
            write_words(&mut buf, z.words())?;
        }
        write_section(out, b"ASGN", &buf)?;
    }
    if let Some(w) = weights {
        if w.len() != graph.n_assignments() {
            return Err(Error::LengthMismatch { expected: graph.n_assignments(), found: w.len() });
        }
        let buf: Vec<u8> = w.iter().flat_map(|x| x.to_le_bytes()).collect();
        write_section(out, b"MASS", &buf)?;
    }
    if let Some(table) = graph.exposure_table() {
        let mut buf = Vec::new();
        buf.extend_from_slice(&(table.dict().len() as u32).to_le_bytes());
        for label in table.dict() {
            write_label(&mut buf, label)?;
        }
        for c in table.codes() {
            buf.extend_from_slice(&c.to_le_bytes());
        }
        write_section(out, b"LABL", &buf)?;
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(input: &mut R) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut cur = Cursor { bytes: &bytes, pos: 0 };
    if cur.take(4)? != MAGIC {
        return Err(Error::Format("not a graph snapshot (bad magic)".into()));
    }
    let version = cur.u16()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported snapshot version {version}")));
    }
    let n = cur.u32()? as usize;
    let h = cur.u32()? as usize;
    let nf = cur.u16()? as usize;
    let mut focal = Vec::with_capacity(nf);
    for _ in 0..nf {
        focal.push(cur.label()?);
    }
    let words = bits::words_for(n);
    let rows = cur.words(words * h)?;

    let mut assignments = Vec::new();
    let mut weights = None;
    let mut table = None;
    while cur.pos < bytes.len() {
        let tag: [u8; 4] = cur.take(4)?.try_into().unwrap();
        let len = usize::try_from(cur.u64()?).map_err(|_| Error::Format("section too long".into()))?;
        let body = cur.take(len)?;
        let mut sec = Cursor { bytes: body, pos: 0 };
        match &tag {
            b"ASGN" => {
                let all = sec.words(words * h)?;
                assignments = all.chunks(words.max(1)).take(h).map(|c| Assignment::from_words(n, c.to_vec())).collect();
                if words == 0 {
                    assignments = vec![Assignment::zeros(0); h];
                }
            }
            b"MASS" => {
                let mut w = Vec::with_capacity(h);
                for _ in 0..h {
                    w.push(f64::from_le_bytes(sec.take(8)?.try_into().unwrap()));
                }
                weights = Some(w);
            }
            b"LABL" => {
                let d = sec.u32()? as usize;
                let mut dict = Vec::with_capacity(d);
                for _ in 0..d {
                    dict.push(sec.label()?);
                }
                let mut codes = Vec::with_capacity(n * h);
                for _ in 0..n * h {
                    codes.push(sec.u16()?);
                }
                table = Some(ExposureTable::from_parts(n, h, dict, codes)?);
            }
            _ => {}
        }
    }
    let graph = NullExposureGraph::from_raw_parts(n, rows, focal, assignments, table)?;
    if graph.n_assignments() != h {
        return Err(Error::Format("assignment count mismatch".into()));
    }
    Ok(Snapshot { graph, weights })
}

pub fn save_snapshot(path: &Path, graph: &NullExposureGraph, weights: Option<&[f64]>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_snapshot(graph, weights, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<Snapshot> {
    read_snapshot(&mut BufReader::new(File::open(path)?))
}

fn write_label<W: Write>(out: &mut W, label: &Label) -> Result<()> {
    let s = label.to_string();
    let len = u16::try_from(s.len()).map_err(|_| Error::Format("label too long".into()))?;
    out.write_all(&len.to_le_bytes())?;
    out.write_all(s.as_bytes())?;
    Ok(())
}

fn write_words<W: Write>(out: &mut W, words: &[u64]) -> Result<()> {
    for w in words {
        out.write_all(&w.to_le_bytes())?;
    }
    Ok(())
}

fn write_section<W: Write>(out: &mut W, tag: &[u8; 4], body: &[u8]) -> Result<()> {
    out.write_all(tag)?;
    out.write_all(&(body.len() as u64).to_le_bytes())?;
    out.write_all(body)?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Format("snapshot truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn words(&mut self, count: usize) -> Result<Vec<u64>> {
        (0..count).map(|_| self.u64()).collect()
    }

    fn label(&mut self) -> Result<Label> {
        let len = self.u16()? as usize;
        let s = std::str::from_utf8(self.take(len)?).map_err(|_| Error::Format("label is not UTF-8".into()))?;
        s.parse().map_err(|_| Error::Format(format!("bad label {s:?}")))
    }
}
