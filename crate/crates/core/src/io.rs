//! Sample-set file formats.
//!
//! CSV: header `x1,...,xn`, one point per row.
//! Binary: magic `SEPK1`, `n` and `M` as little-endian `u64`, then `M * n`
//! little-endian `f64` in point order.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geometry::{DistributionSpec, SampleSet};

pub const BINARY_MAGIC: &[u8; 5] = b"SEPK1";

pub fn write_csv<W: Write>(sample: &SampleSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record((1..=sample.dim()).map(|k| format!("x{k}")))?;
    for row in sample.points() {
        // `{:?}` on f64 is the shortest round-tripping representation
        w.write_record(row.iter().map(|x| format!("{x:?}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV sample; `dist` and `seed` are attached as provenance.
pub fn read_csv<R: Read>(input: R, dist: DistributionSpec, seed: u64) -> Result<SampleSet> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let n = headers.len();
    for (k, h) in headers.iter().enumerate() {
        if h != format!("x{}", k + 1) {
            return Err(Error::Format(format!("unexpected header column {h:?} at position {}", k + 1)));
        }
    }
    let mut data = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        for field in record.iter() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("row {}: cannot parse {field:?}", i + 1)))?;
            data.push(v);
        }
    }
    SampleSet::from_rows(data, n, dist, seed)
}

pub fn write_binary<W: Write>(sample: &SampleSet, mut out: W) -> Result<()> {
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&(sample.dim() as u64).to_le_bytes())?;
    out.write_all(&(sample.len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(sample.as_slice().len() * 8);
    for x in sample.as_slice() {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R, dist: DistributionSpec, seed: u64) -> Result<SampleSet> {
    let mut magic = [0u8; 5];
    input.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::Format("bad magic, expected SEPK1".into()));
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word);
    input.read_exact(&mut word)?;
    let m = u64::from_le_bytes(word);
    let count = n
        .checked_mul(m)
        .and_then(|c| usize::try_from(c).ok())
        .filter(|c| c.checked_mul(8).is_some())
        .ok_or_else(|| Error::Format(format!("header n = {n}, M = {m} overflows")))?;
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() != count * 8 {
        return Err(Error::Format(format!(
            "payload has {} bytes, header promises {}",
            bytes.len(),
            count * 8
        )));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    SampleSet::from_rows(data, n as usize, dist, seed)
}
