//! Deterministic emission: JSON with floats at 17 significant digits and
//! CSV with LF line endings. Output is built fully in memory so a failing
//! run never leaves partial output behind.

use std::io;

use serde::Serialize;

/// Compact JSON formatter printing every finite double with 17
/// significant digits (`{:.16e}`), so emissions are byte-stable across
/// runs and platforms.
struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter);
    value.serialize(&mut ser).expect("serialization cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// Minimal CSV builder: header row, `.` decimal separator (Rust float
/// Display), LF endings, empty cells for absent values.
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Csv {
            buf,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "column count mismatch");
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

pub fn cell_f64(x: f64) -> String {
    format!("{x}")
}

pub fn cell_opt(x: Option<f64>) -> String {
    x.map(cell_f64).unwrap_or_default()
}
