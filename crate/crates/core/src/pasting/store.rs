//! Row storage with disk spill, and block checkpoints.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::layout::Row;

const BATCH: usize = 1 << 16;

/// Append-only row sink that moves to a temporary file once it holds more
/// than `budget` rows in memory.
pub struct RowSink {
    budget: usize,
    mem: Vec<Row>,
    disk: Option<(File, BufWriter<File>)>,
    count: u64,
    spill_dir: Option<std::path::PathBuf>,
}

impl RowSink {
    pub fn new(budget: usize, spill_dir: Option<&Path>) -> Self {
        Self {
            budget: budget.max(1),
            mem: Vec::new(),
            disk: None,
            count: 0,
            spill_dir: spill_dir.map(Path::to_path_buf),
        }
    }

    pub fn from_rows(rows: Vec<Row>) -> RowSource {
        RowSource::Memory(rows)
    }

    #[inline]
    pub fn push(&mut self, r: Row) -> io::Result<()> {
        self.count += 1;
        if let Some((_, w)) = self.disk.as_mut() {
            return w.write_all(&r.to_le_bytes());
        }
        self.mem.push(r);
        if self.mem.len() > self.budget {
            self.spill()?;
        }
        Ok(())
    }

    fn spill(&mut self) -> io::Result<()> {
        let file = match &self.spill_dir {
            Some(d) => tempfile::tempfile_in(d)?,
            None => tempfile::tempfile()?,
        };
        let mut w = BufWriter::with_capacity(1 << 20, file.try_clone()?);
        for r in self.mem.drain(..) {
            w.write_all(&r.to_le_bytes())?;
        }
        self.mem.shrink_to_fit();
        self.disk = Some((file, w));
        Ok(())
    }

    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn spilled(&self) -> bool {
        self.disk.is_some()
    }

    pub fn finish(self) -> io::Result<RowSource> {
        match self.disk {
            None => Ok(RowSource::Memory(self.mem)),
            Some((mut file, mut w)) => {
                w.flush()?;
                drop(w);
                file.seek(SeekFrom::Start(0))?;
                Ok(RowSource::Disk {
                    file,
                    count: self.count,
                })
            }
        }
    }
}

/// Rows produced by a layer, in memory or in a temporary file.
pub enum RowSource {
    Memory(Vec<Row>),
    Disk { file: File, count: u64 },
}

impl RowSource {
    pub fn len(&self) -> u64 {
        match self {
            RowSource::Memory(v) => v.len() as u64,
            RowSource::Disk { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Feeds the rows to `f` in batches.
    pub fn for_each_batch(&mut self, mut f: impl FnMut(&[Row]) -> io::Result<()>) -> io::Result<()> {
        match self {
            RowSource::Memory(v) => {
                for b in v.chunks(BATCH) {
                    f(b)?;
                }
                Ok(())
            }
            RowSource::Disk { file, count } => {
                file.seek(SeekFrom::Start(0))?;
                let mut r = BufReader::with_capacity(1 << 20, &*file);
                let mut left = *count;
                let mut buf = vec![0u8; 16 * BATCH];
                let mut rows = Vec::with_capacity(BATCH);
                while left > 0 {
                    let n = left.min(BATCH as u64) as usize;
                    r.read_exact(&mut buf[..16 * n])?;
                    rows.clear();
                    rows.extend(
                        buf[..16 * n]
                            .chunks_exact(16)
                            .map(|c| Row::from_le_bytes(c.try_into().expect("16 bytes"))),
                    );
                    f(&rows)?;
                    left -= n as u64;
                }
                Ok(())
            }
        }
    }

    pub fn into_vec(mut self) -> io::Result<Vec<Row>> {
        if let RowSource::Memory(v) = self {
            return Ok(v);
        }
        let mut out = Vec::with_capacity(self.len() as usize);
        self.for_each_batch(|b| {
            out.extend_from_slice(b);
            Ok(())
        })?;
        Ok(out)
    }
}

/// Header of a block checkpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckpointHeader {
    pub polytope: String,
    /// Number of chunks pasted so far.
    pub layer: usize,
    /// Layout column pairs as `ij` tokens.
    pub layout: Vec<(usize, usize)>,
    pub determined: Row,
    pub rows: u64,
    pub sha256: String,
}

const MAGIC: &str = "coxpoly-block-checkpoint v1";

fn header_text(h: &CheckpointHeader) -> String {
    let cols: Vec<String> = h.layout.iter().map(|(i, j)| format!("{i}-{j}")).collect();
    format!(
        "{MAGIC}\npolytope {}\nlayer {}\nlayout {}\ndetermined {:032x}\nrows {}\nsha256 {}\n\n",
        h.polytope,
        h.layer,
        cols.join(" "),
        h.determined,
        h.rows,
        h.sha256
    )
}

/// Writes the header followed by 16-byte little-endian rows.
pub fn write_checkpoint(
    path: &Path,
    polytope: &str,
    layer: usize,
    layout: &[(usize, usize)],
    determined: Row,
    source: &mut RowSource,
) -> io::Result<CheckpointHeader> {
    let mut h = Sha256::new();
    source.for_each_batch(|b| {
        for r in b {
            h.update(r.to_le_bytes());
        }
        Ok(())
    })?;
    let header = CheckpointHeader {
        polytope: polytope.to_string(),
        layer,
        layout: layout.to_vec(),
        determined,
        rows: source.len(),
        sha256: h.finalize().iter().map(|b| format!("{b:02x}")).collect(),
    };
    let tmp = path.with_extension("partial");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        w.write_all(header_text(&header).as_bytes())?;
        source.for_each_batch(|b| {
            for r in b {
                w.write_all(&r.to_le_bytes())?;
            }
            Ok(())
        })?;
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(header)
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

/// Reads a checkpoint and verifies its content hash.
pub fn read_checkpoint(path: &Path) -> io::Result<(CheckpointHeader, Vec<Row>)> {
    let bytes = std::fs::read(path)?;
    let split = bytes
        .windows(2)
        .position(|w| w == b"\n\n")
        .ok_or_else(|| invalid("checkpoint header not terminated"))?;
    let text = std::str::from_utf8(&bytes[..split]).map_err(|_| invalid("header not UTF-8"))?;
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(invalid("not a block checkpoint"));
    }
    let mut field = |name: &str| -> io::Result<String> {
        let l = lines.next().ok_or_else(|| invalid(format!("missing {name}")))?;
        l.strip_prefix(name)
            .map(|s| s.trim().to_string())
            .ok_or_else(|| invalid(format!("expected {name}")))
    };
    let polytope = field("polytope")?;
    let layer = field("layer")?.parse().map_err(|_| invalid("layer"))?;
    let layout = field("layout")?
        .split_whitespace()
        .map(|t| {
            let (a, b) = t.split_once('-').ok_or_else(|| invalid("layout token"))?;
            Ok((
                a.parse().map_err(|_| invalid("layout token"))?,
                b.parse().map_err(|_| invalid("layout token"))?,
            ))
        })
        .collect::<io::Result<Vec<_>>>()?;
    let determined = Row::from_str_radix(&field("determined")?, 16).map_err(|_| invalid("determined"))?;
    let rows: u64 = field("rows")?.parse().map_err(|_| invalid("rows"))?;
    let sha256 = field("sha256")?;
    let payload = &bytes[split + 2..];
    if payload.len() as u64 != 16 * rows {
        return Err(invalid("payload length does not match row count"));
    }
    let digest: String = Sha256::digest(payload).iter().map(|b| format!("{b:02x}")).collect();
    if digest != sha256 {
        return Err(invalid("checkpoint content hash mismatch"));
    }
    let data = payload
        .chunks_exact(16)
        .map(|c| Row::from_le_bytes(c.try_into().expect("16 bytes")))
        .collect();
    Ok((
        CheckpointHeader {
            polytope,
            layer,
            layout,
            determined,
            rows,
            sha256,
        },
        data,
    ))
}
