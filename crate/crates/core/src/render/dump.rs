//! CSV frame dumps: `step, v0, v1, ..., v(n-1)` per line. The first line is
//! the potential, tagged with step `-1`. Values are written in shortest
//! round-trip form, so reading a dump back recovers the exact doubles.

use std::fmt::Write as _;
use std::io::{self, Write};

pub const POTENTIAL_ROW: i64 = -1;

#[derive(Debug, Clone, PartialEq)]
pub struct DumpRow {
    pub step: i64,
    pub values: Vec<f64>,
}

/// Streams rows to any writer, reusing one line buffer.
pub struct DumpWriter<W: Write> {
    out: W,
    line: String,
    rows: usize,
}

impl<W: Write> DumpWriter<W> {
    pub fn new(out: W) -> Self {
        Self {
            out,
            line: String::new(),
            rows: 0,
        }
    }

    pub fn write_row(&mut self, step: i64, values: &[f64]) -> io::Result<()> {
        self.line.clear();
        write!(self.line, "{step}").expect("writing to a String");
        for v in values {
            write!(self.line, ",{v:e}").expect("writing to a String");
        }
        self.line.push('\n');
        self.out.write_all(self.line.as_bytes())?;
        self.rows += 1;
        Ok(())
    }

    pub fn write_potential(&mut self, values: &[f64]) -> io::Result<()> {
        self.write_row(POTENTIAL_ROW, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Parses a dump produced by [`DumpWriter`].
pub fn read_dump(text: &str) -> Result<Vec<DumpRow>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.is_empty())
        .map(|(i, line)| {
            let mut fields = line.split(',');
            let step = fields
                .next()
                .and_then(|s| s.parse::<i64>().ok())
                .ok_or_else(|| format!("line {}: bad step index", i + 1))?;
            let values = fields
                .map(|f| f.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| format!("line {}: {e}", i + 1))?;
            Ok(DumpRow { step, values })
        })
        .collect()
}
