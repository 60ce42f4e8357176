//! Little-endian binary traces.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "CORE"
//! 4       2     format version (1)
//! 6       2     dtype (0 = f32, 1 = f64)
//! 8       4     dim
//! 12      4     record count (0 in a stream header: unbounded)
//! 16      ...   records: u32 step, then dim values of dtype
//! ```

use std::io::{self, Read, Write};

use super::{RecordChecker, Trace, TraceError, TraceRecord};

pub const MAGIC: &[u8; 4] = b"CORE";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F32,
    F64,
}

impl Dtype {
    pub fn code(self) -> u16 {
        match self {
            Dtype::F32 => 0,
            Dtype::F64 => 1,
        }
    }

    pub fn from_code(code: u16) -> Option<Self> {
        match code {
            0 => Some(Dtype::F32),
            1 => Some(Dtype::F64),
            _ => None,
        }
    }

    pub fn width(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinaryHeader {
    pub version: u16,
    pub dtype: Dtype,
    pub dim: u32,
    pub count: u32,
}

impl BinaryHeader {
    pub fn new(dtype: Dtype, dim: u32, count: u32) -> Self {
        Self {
            version: VERSION,
            dtype,
            dim,
            count,
        }
    }

    pub fn to_bytes(self) -> [u8; 16] {
        let mut out = [0u8; 16];
        out[..4].copy_from_slice(MAGIC);
        out[4..6].copy_from_slice(&self.version.to_le_bytes());
        out[6..8].copy_from_slice(&self.dtype.code().to_le_bytes());
        out[8..12].copy_from_slice(&self.dim.to_le_bytes());
        out[12..16].copy_from_slice(&self.count.to_le_bytes());
        out
    }

    pub fn parse(bytes: &[u8; 16]) -> Result<Self, TraceError> {
        if &bytes[..4] != MAGIC {
            return Err(TraceError::MalformedHeader(format!("bad magic {:?}", &bytes[..4])));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(TraceError::MalformedHeader(format!("unsupported version {version}")));
        }
        let code = u16::from_le_bytes([bytes[6], bytes[7]]);
        let dtype =
            Dtype::from_code(code).ok_or_else(|| TraceError::MalformedHeader(format!("unknown dtype code {code}")))?;
        let dim = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        let count = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
        Ok(Self {
            version,
            dtype,
            dim,
            count,
        })
    }

    pub fn record_len(&self) -> u64 {
        4 + u64::from(self.dim) * self.dtype.width() as u64
    }
}

pub fn write_header(w: &mut impl Write, header: BinaryHeader) -> io::Result<()> {
    w.write_all(&header.to_bytes())
}

/// Writes one record. Values that do not fit the dtype are rejected.
pub fn write_record(w: &mut impl Write, dtype: Dtype, step: u32, values: &[f64], record: usize) -> Result<(), TraceError> {
    let mut buf = Vec::with_capacity(4 + values.len() * dtype.width());
    buf.extend_from_slice(&step.to_le_bytes());
    for &v in values {
        match dtype {
            Dtype::F32 => {
                let narrow = v as f32;
                if !narrow.is_finite() {
                    return Err(TraceError::NonFiniteValue { record });
                }
                buf.extend_from_slice(&narrow.to_le_bytes());
            }
            Dtype::F64 => {
                if !v.is_finite() {
                    return Err(TraceError::NonFiniteValue { record });
                }
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Writes a whole trace. With [`Dtype::F32`] values are narrowed, so only
/// f32-representable traces survive a round trip unchanged.
pub fn write(w: &mut impl Write, trace: &Trace, dtype: Dtype) -> Result<(), TraceError> {
    trace.validate()?;
    let count = u32::try_from(trace.len()).map_err(|_| TraceError::MalformedHeader("too many records".into()))?;
    let dim = u32::try_from(trace.dim().unwrap_or(0))
        .map_err(|_| TraceError::MalformedHeader("dimension exceeds u32".into()))?;
    write_header(w, BinaryHeader::new(dtype, dim, count))?;
    for (i, r) in trace.records.iter().enumerate() {
        let step = u32::try_from(r.step).map_err(|_| TraceError::BadStepIndex {
            record: i,
            step: r.step,
            previous: None,
        })?;
        write_record(w, dtype, step, &r.embedding, i)?;
    }
    Ok(())
}

pub fn read(r: impl Read) -> Result<Trace, TraceError> {
    let mut frames = FrameReader::open_file(r)?;
    let mut records = Vec::with_capacity(frames.header().count as usize);
    while let Some((step, embedding)) = frames.next_frame()? {
        records.push(TraceRecord {
            step: u64::from(step),
            embedding,
            text: None,
        });
    }
    frames.expect_end()?;
    Ok(Trace { records })
}

/// Incremental reader over a binary trace file or stream.
pub struct FrameReader<R> {
    inner: R,
    header: BinaryHeader,
    unbounded: bool,
    read: usize,
    offset: u64,
    checker: RecordChecker,
}

impl<R: Read> FrameReader<R> {
    /// Reads a file header; the record count is exact.
    pub fn open_file(inner: R) -> Result<Self, TraceError> {
        Self::open(inner, false)
    }

    /// Reads a stream header; a count of zero means "until end of input".
    pub fn open_stream(inner: R) -> Result<Self, TraceError> {
        Self::open(inner, true)
    }

    fn open(mut inner: R, stream: bool) -> Result<Self, TraceError> {
        let mut bytes = [0u8; 16];
        let n = read_full(&mut inner, &mut bytes)?;
        if n < bytes.len() {
            return Err(TraceError::MalformedHeader(format!("header is {n} bytes, expected 16")));
        }
        let header = BinaryHeader::parse(&bytes)?;
        if header.dim == 0 && (stream || header.count > 0) {
            return Err(TraceError::MalformedHeader("dimension is zero".into()));
        }
        Ok(Self {
            inner,
            header,
            unbounded: stream && header.count == 0,
            read: 0,
            offset: HEADER_LEN,
            checker: RecordChecker::with_dim(header.dim as usize),
        })
    }

    pub fn header(&self) -> &BinaryHeader {
        &self.header
    }

    /// Next `(step, values)` or `None` once the declared records are consumed
    /// (or, for an unbounded stream, at a clean end of input).
    pub fn next_frame(&mut self) -> Result<Option<(u32, Vec<f64>)>, TraceError> {
        if !self.unbounded && self.read >= self.header.count as usize {
            return Ok(None);
        }
        let record_len = self.header.record_len() as usize;
        let mut buf = vec![0u8; record_len];
        let n = read_full(&mut self.inner, &mut buf)?;
        if n == 0 && self.unbounded {
            return Ok(None);
        }
        if n < record_len {
            return Err(TraceError::TruncatedFile {
                offset: self.offset,
                record: self.read,
            });
        }

        let step = u32::from_le_bytes(buf[..4].try_into().unwrap());
        let values: Vec<f64> = match self.header.dtype {
            Dtype::F32 => buf[4..]
                .chunks_exact(4)
                .map(|c| f64::from(f32::from_le_bytes(c.try_into().unwrap())))
                .collect(),
            Dtype::F64 => buf[4..]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        };
        self.checker.check(self.read, u64::from(step), &values)?;
        self.read += 1;
        self.offset += record_len as u64;
        Ok(Some((step, values)))
    }

    /// Fails if bytes remain after the declared records.
    pub fn expect_end(&mut self) -> Result<(), TraceError> {
        let extra = io::copy(&mut self.inner, &mut io::sink())?;
        if extra > 0 {
            return Err(TraceError::TrailingData(extra));
        }
        Ok(())
    }
}

fn read_full(r: &mut impl Read, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}
