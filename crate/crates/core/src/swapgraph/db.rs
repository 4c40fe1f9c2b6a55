//! Reader for the published order-type databases: fixed-size records of n
//! points, unsigned coordinates, one byte each for n ≤ 8 and two bytes
//! little-endian for n = 9, 10.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::exactgeom::{IntPoint, Orientation};

pub const DB_DIR_ENV: &str = "COMPATRI_DB_DIR";

#[derive(Debug, Error)]
pub enum DbError {
    #[error("unsupported point count {0} (expected 3..=10)")]
    UnsupportedN(usize),
    #[error("file size {size} is not a multiple of the record size {record}")]
    SizeMismatch { size: u64, record: usize },
    #[error("record {0} is not in general position")]
    Degenerate(usize),
    #[error("database file not found: {0}")]
    Missing(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderTypeRecord {
    pub points: Vec<IntPoint>,
}

impl OrderTypeRecord {
    pub fn is_general_position(&self) -> bool {
        let p = &self.points;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                for k in j + 1..p.len() {
                    if IntPoint::orient(&p[i], &p[j], &p[k]).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Counterclockwise hull by gift wrapping; assumes general position.
    pub fn hull(&self) -> Vec<usize> {
        int_convex_hull(&self.points)
    }
}

pub fn int_convex_hull(p: &[IntPoint]) -> Vec<usize> {
    let n = p.len();
    if n < 3 {
        return (0..n).collect();
    }
    let start = (0..n).min_by_key(|&i| (p[i].x, p[i].y)).expect("nonempty");
    let mut hull = vec![start];
    let mut cur = start;
    loop {
        let mut next = if cur == 0 { 1 } else { 0 };
        for k in 0..n {
            if k != cur
                && IntPoint::orient(&p[cur], &p[next], &p[k]) == crate::exactgeom::Sign::Negative
            {
                next = k;
            }
        }
        if next == start {
            return hull;
        }
        hull.push(next);
        cur = next;
        if hull.len() > n {
            return hull;
        }
    }
}

pub fn coordinate_width(n: usize) -> Result<usize, DbError> {
    match n {
        3..=8 => Ok(1),
        9..=10 => Ok(2),
        _ => Err(DbError::UnsupportedN(n)),
    }
}

pub fn record_size(n: usize) -> Result<usize, DbError> {
    Ok(n * 2 * coordinate_width(n)?)
}

/// Conventional file name, e.g. `otypes08.b08`, `otypes10.b16`.
pub fn db_file_name(n: usize) -> Result<String, DbError> {
    Ok(format!("otypes{:02}.b{:02}", n, 8 * coordinate_width(n)?))
}

/// Path under `$COMPATRI_DB_DIR` (or `dir` when given).
pub fn default_db_path(n: usize, dir: Option<&Path>) -> Result<PathBuf, DbError> {
    let base = match dir {
        Some(d) => d.to_path_buf(),
        None => PathBuf::from(std::env::var(DB_DIR_ENV).unwrap_or_else(|_| ".".into())),
    };
    Ok(base.join(db_file_name(n)?))
}

pub fn decode_record(buf: &[u8], n: usize, index: usize) -> Result<OrderTypeRecord, DbError> {
    let w = coordinate_width(n)?;
    let coord = |k: usize| -> i64 {
        if w == 1 {
            buf[k] as i64
        } else {
            u16::from_le_bytes([buf[2 * k], buf[2 * k + 1]]) as i64
        }
    };
    let points = (0..n)
        .map(|i| IntPoint::new(coord(2 * i), coord(2 * i + 1)))
        .collect();
    let rec = OrderTypeRecord { points };
    if !rec.is_general_position() {
        return Err(DbError::Degenerate(index));
    }
    Ok(rec)
}

pub fn encode_record(rec: &OrderTypeRecord, out: &mut Vec<u8>) -> Result<(), DbError> {
    let n = rec.points.len();
    let w = coordinate_width(n)?;
    for p in &rec.points {
        for v in [p.x, p.y] {
            if w == 1 {
                out.push(v as u8);
            } else {
                out.extend_from_slice(&(v as u16).to_le_bytes());
            }
        }
    }
    Ok(())
}

/// Streaming reader over one database file.
pub struct DbReader<R: Read> {
    inner: R,
    n: usize,
    buf: Vec<u8>,
    index: usize,
}

impl DbReader<BufReader<File>> {
    pub fn open(path: &Path, n: usize) -> Result<Self, DbError> {
        let record = record_size(n)?;
        let file = File::open(path).map_err(|e| match e.kind() {
            ErrorKind::NotFound => DbError::Missing(path.to_path_buf()),
            _ => DbError::Io(e),
        })?;
        let size = file.metadata()?.len();
        if size % record as u64 != 0 {
            return Err(DbError::SizeMismatch { size, record });
        }
        Ok(DbReader::new(BufReader::with_capacity(1 << 20, file), n)?)
    }
}

impl<R: Read> DbReader<R> {
    pub fn new(inner: R, n: usize) -> Result<Self, DbError> {
        Ok(DbReader {
            inner,
            n,
            buf: vec![0; record_size(n)?],
            index: 0,
        })
    }
}

impl<R: Read> Iterator for DbReader<R> {
    type Item = Result<OrderTypeRecord, DbError>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut filled = 0;
        while filled < self.buf.len() {
            match self.inner.read(&mut self.buf[filled..]) {
                Ok(0) => break,
                Ok(k) => filled += k,
                Err(e) if e.kind() == ErrorKind::Interrupted => {}
                Err(e) => return Some(Err(e.into())),
            }
        }
        if filled == 0 {
            return None;
        }
        if filled < self.buf.len() {
            return Some(Err(DbError::SizeMismatch {
                size: (self.index * self.buf.len() + filled) as u64,
                record: self.buf.len(),
            }));
        }
        let rec = decode_record(&self.buf, self.n, self.index);
        self.index += 1;
        Some(rec)
    }
}

pub fn read_order_type_db(path: &Path, n: usize) -> Result<Vec<OrderTypeRecord>, DbError> {
    DbReader::open(path, n)?.collect()
}

pub fn parse_order_type_bytes(bytes: &[u8], n: usize) -> Result<Vec<OrderTypeRecord>, DbError> {
    let record = record_size(n)?;
    if bytes.len() % record != 0 {
        return Err(DbError::SizeMismatch {
            size: bytes.len() as u64,
            record,
        });
    }
    bytes
        .chunks(record)
        .enumerate()
        .map(|(i, c)| decode_record(c, n, i))
        .collect()
}

pub fn write_order_type_db(
    path: &Path,
    n: usize,
    records: &[OrderTypeRecord],
) -> Result<(), DbError> {
    let mut out = Vec::with_capacity(records.len() * record_size(n)?);
    for r in records {
        if r.points.len() != n {
            return Err(DbError::UnsupportedN(r.points.len()));
        }
        encode_record(r, &mut out)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&out)?;
    w.flush()?;
    Ok(())
}
