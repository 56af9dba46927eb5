//! The `HPD1` text format for decompositions.
//!
//! ```text
//! HPD1 q=<q> m=<m> n=<count>
//! <m+1 lowercase hex labels separated by single spaces>
//! ...
//! ```
//!
//! One path per line, `n` lines, each terminated by `\n`. Labels have no
//! leading zeros and are below `2^q`; coordinate 1 of the cube is the least
//! significant bit of a label. Nothing else may appear in the file.

use std::fmt;
use std::io::{BufRead, Write};

use crate::cube::Vertex;
use crate::decompose::Decomposition;
use crate::error::{Error, Result};
use crate::verify::{PathVerifier, Report};
use crate::Limits;

pub const MAGIC: &str = "HPD1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub q: u32,
    pub m: u32,
    pub n: u64,
}

impl fmt::Display for Header {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{MAGIC} q={} m={} n={}", self.q, self.m, self.n)
    }
}

fn bad(line: u64, msg: impl Into<String>) -> Error {
    Error::Format {
        line,
        msg: msg.into(),
    }
}

/// A decimal field without sign or leading zeros.
fn decimal<T: std::str::FromStr>(line: u64, field: &str, text: Option<&str>) -> Result<T> {
    let value = text
        .and_then(|t| t.strip_prefix(field))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| bad(line, format!("expected `{field}=<n>`")))?;
    let canonical = !value.is_empty()
        && value.bytes().all(|b| b.is_ascii_digit())
        && (value == "0" || !value.starts_with('0'));
    if !canonical {
        return Err(bad(line, format!("malformed {field} value `{value}`")));
    }
    value
        .parse()
        .map_err(|_| bad(line, format!("{field} value `{value}` out of range")))
}

impl Header {
    pub fn parse(line: &str) -> Result<Header> {
        let mut fields = line.split(' ');
        if fields.next() != Some(MAGIC) {
            return Err(bad(1, format!("missing `{MAGIC}` magic")));
        }
        let q = decimal(1, "q", fields.next())?;
        let m = decimal(1, "m", fields.next())?;
        let n = decimal(1, "n", fields.next())?;
        if fields.next().is_some() {
            return Err(bad(1, "trailing fields in header"));
        }
        if q > 64 {
            return Err(bad(1, format!("q={q} exceeds 64")));
        }
        Ok(Header { q, m, n })
    }
}

/// Writes paths one line at a time after the header.
pub struct PathWriter<W: Write> {
    out: W,
    header: Header,
    written: u64,
}

impl<W: Write> PathWriter<W> {
    pub fn new(mut out: W, header: Header) -> Result<Self> {
        writeln!(out, "{header}")?;
        Ok(PathWriter {
            out,
            header,
            written: 0,
        })
    }

    pub fn write_path(&mut self, verts: &[Vertex]) -> Result<()> {
        if verts.len() != self.header.m as usize + 1 {
            return Err(Error::param(format!(
                "path with {} vertices in a P_{} file",
                verts.len(),
                self.header.m
            )));
        }
        for (i, v) in verts.iter().enumerate() {
            if i > 0 {
                self.out.write_all(b" ")?;
            }
            write!(self.out, "{v:x}")?;
        }
        self.out.write_all(b"\n")?;
        self.written += 1;
        Ok(())
    }

    /// Flush and return the sink; fails if the path count differs from the header.
    pub fn finish(mut self) -> Result<W> {
        if self.written != self.header.n {
            return Err(Error::param(format!(
                "header promises {} paths, {} written",
                self.header.n, self.written
            )));
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Stream a decomposition to `out`.
pub fn write_decomposition<W: Write>(d: &Decomposition, out: W) -> Result<W> {
    let n =
        u64::try_from(d.path_count()).map_err(|_| Error::param("too many paths for one file"))?;
    let header = Header {
        q: d.dim(),
        m: d.path_len(),
        n,
    };
    let mut w = PathWriter::new(out, header)?;
    let mut status = Ok(());
    d.for_each_path(&mut |p| {
        if status.is_ok() {
            status = w.write_path(p);
        }
    });
    status?;
    w.finish()
}

/// Reads paths one line at a time, rejecting anything non-canonical.
pub struct PathReader<R: BufRead> {
    input: R,
    header: Header,
    line_no: u64,
    read: u64,
    line: String,
}

impl<R: BufRead> PathReader<R> {
    pub fn new(mut input: R) -> Result<Self> {
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Err(bad(1, "empty input"));
        }
        let text = line
            .strip_suffix('\n')
            .ok_or_else(|| bad(1, "header is not newline-terminated"))?;
        let header = Header::parse(text)?;
        Ok(PathReader {
            input,
            header,
            line_no: 1,
            read: 0,
            line,
        })
    }

    pub fn header(&self) -> Header {
        self.header
    }

    /// Read the next path into `out`. Returns false after the last one.
    pub fn next_path(&mut self, out: &mut Vec<Vertex>) -> Result<bool> {
        self.line.clear();
        let got = self.input.read_line(&mut self.line)?;
        self.line_no += 1;
        let line = self.line_no;
        if self.read == self.header.n {
            return if got == 0 {
                Ok(false)
            } else {
                Err(bad(
                    line,
                    format!("data after the {} promised paths", self.header.n),
                ))
            };
        }
        if got == 0 {
            return Err(bad(
                line,
                format!("expected {} paths, found {}", self.header.n, self.read),
            ));
        }
        let text = self
            .line
            .strip_suffix('\n')
            .ok_or_else(|| bad(line, "line is not newline-terminated"))?;
        out.clear();
        for label in text.split(' ') {
            out.push(parse_label(line, label, self.header.q)?);
        }
        if out.len() != self.header.m as usize + 1 {
            return Err(bad(
                line,
                format!("{} labels, expected {}", out.len(), self.header.m + 1),
            ));
        }
        self.read += 1;
        Ok(true)
    }
}

fn parse_label(line: u64, label: &str, q: u32) -> Result<Vertex> {
    let canonical = !label.is_empty()
        && label.len() <= 16
        && label
            .bytes()
            .all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
        && (label == "0" || !label.starts_with('0'));
    if !canonical {
        return Err(bad(line, format!("malformed label `{label}`")));
    }
    let v = u64::from_str_radix(label, 16)
        .map_err(|_| bad(line, format!("malformed label `{label}`")))?;
    if q < 64 && v >> q != 0 {
        return Err(bad(line, format!("label {label} is outside Q_{q}")));
    }
    Ok(v)
}

/// Parse and verify a decomposition file in one streaming pass.
///
/// Format errors are returned as errors; a well-formed file that is not a
/// decomposition yields a failing report.
pub fn verify_reader<R: BufRead>(input: R, limits: &Limits) -> Result<(Header, Report)> {
    let mut reader = PathReader::new(input)?;
    let h = reader.header();
    if h.m == 0 {
        return Err(bad(1, "m must be positive"));
    }
    let mut v = PathVerifier::new(h.q, h.m, limits)?;
    let mut buf = Vec::with_capacity(h.m as usize + 1);
    while reader.next_path(&mut buf)? {
        v.push(&buf);
    }
    Ok((h, v.finish()))
}
