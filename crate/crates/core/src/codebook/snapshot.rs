//! Plain-text snapshots of sequence matrices and codebooks.
//!
//! ```text
//! N K M seed
//! <N entries>      one line per sequence / codeword
//! ```
//!
//! Entries are whitespace separated and written as `re+imi` or `re-imi`
//! using the shortest decimal that round-trips, so a read-back is exact.
//! A sequence matrix is stored with `M = 1` and one line per user. A
//! codebook set stores `K * M` lines: user `k`, codeword `m` sits on line
//! `k * M + m`.

use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex64;

use super::{build_codebook, circular_shift, Codebook, SequenceMatrix, ShiftPattern, SpreadSequence};
use crate::linalg::CMatrix;
use crate::{Error, Result};

fn format_entry(out: &mut String, z: Complex64) {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    let _ = write!(out, "{}{}{}i", z.re, sign, z.im.abs());
}

fn write_row<W: Write>(w: &mut W, row: &[Complex64]) -> std::io::Result<()> {
    let mut line = String::with_capacity(row.len() * 48);
    for (i, &z) in row.iter().enumerate() {
        if i > 0 {
            line.push(' ');
        }
        format_entry(&mut line, z);
    }
    line.push('\n');
    w.write_all(line.as_bytes())
}

pub(crate) fn parse_entry(tok: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("malformed complex entry {tok:?}"));
    let body = tok.strip_suffix('i').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    // the real/imaginary split is the last sign that is not a leading sign
    // and not part of an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&i| {
            (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E')
        })
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split..].parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

struct Header {
    n: usize,
    k: usize,
    m: usize,
    seed: u64,
}

fn parse_snapshot(text: &str) -> Result<(Header, Vec<Vec<Complex64>>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let head = lines
        .next()
        .ok_or_else(|| Error::Parse("empty snapshot".into()))?;
    let fields: Vec<&str> = head.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(Error::Parse(format!("header must be `N K M seed`, got {head:?}")));
    }
    let num = |s: &str| -> Result<u64> {
        s.parse()
            .map_err(|_| Error::Parse(format!("bad header field {s:?}")))
    };
    let header = Header {
        n: num(fields[0])? as usize,
        k: num(fields[1])? as usize,
        m: num(fields[2])? as usize,
        seed: num(fields[3])?,
    };
    let rows = lines
        .map(|l| l.split_whitespace().map(parse_entry).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if let Some(r) = rows.iter().find(|r| r.len() != header.n) {
        return Err(Error::DimensionMismatch {
            what: "snapshot row length",
            expected: header.n,
            got: r.len(),
        });
    }
    if rows.len() != header.k * header.m {
        return Err(Error::DimensionMismatch {
            what: "snapshot row count",
            expected: header.k * header.m,
            got: rows.len(),
        });
    }
    Ok((header, rows))
}

pub fn write_sequences<W: Write>(w: &mut W, s: &SequenceMatrix) -> std::io::Result<()> {
    writeln!(w, "{} {} 1 {}", s.seq_len(), s.users(), s.seed())?;
    for k in 0..s.users() {
        write_row(w, s.column(k))?;
    }
    Ok(())
}

pub fn read_sequences(text: &str) -> Result<SequenceMatrix> {
    let (h, rows) = parse_snapshot(text)?;
    if h.m != 1 {
        return Err(Error::Parse(format!("sequence snapshot must have M = 1, got {}", h.m)));
    }
    let data: Vec<Complex64> = rows.into_iter().flatten().collect();
    SequenceMatrix::from_matrix(CMatrix::from_vec(h.n, h.k, data), h.seed)
}

pub fn write_codebooks<W: Write>(w: &mut W, codebooks: &[Codebook], seed: u64) -> Result<()> {
    let first = codebooks
        .first()
        .ok_or_else(|| Error::invalid("no codebooks to write"))?;
    let (n, m) = (first.seq_len(), first.order());
    if let Some(cb) = codebooks.iter().find(|cb| cb.seq_len() != n || cb.order() != m) {
        return Err(Error::DimensionMismatch {
            what: "codebook shape",
            expected: n * m,
            got: cb.seq_len() * cb.order(),
        });
    }
    let io = |e| Error::Parse(format!("snapshot write failed: {e}"));
    writeln!(w, "{} {} {} {}", n, codebooks.len(), m, seed).map_err(io)?;
    for cb in codebooks {
        for j in 0..m {
            write_row(w, cb.codeword(j)).map_err(io)?;
        }
    }
    Ok(())
}

/// Reads a codebook snapshot. Each user's base sequence is its first
/// codeword and the shift pattern is recovered by exact matching.
pub fn read_codebooks(text: &str) -> Result<(Vec<Codebook>, u64)> {
    let (h, rows) = parse_snapshot(text)?;
    let mut out = Vec::with_capacity(h.k);
    for user in rows.chunks(h.m) {
        let base = SpreadSequence::new(user[0].clone())?;
        let shifts = user
            .iter()
            .map(|row| {
                (0..h.n)
                    .find(|&j| circular_shift(&base, j).entries() == row.as_slice())
                    .ok_or_else(|| Error::Parse("codeword is not a shift of the base sequence".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(build_codebook(&base, &ShiftPattern::new(shifts)?)?);
    }
    Ok((out, h.seed))
}
