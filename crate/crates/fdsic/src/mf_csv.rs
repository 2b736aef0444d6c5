//! Learned-filter coefficient files: `index,real,imag` rows after a `#`
//! header line carrying the oversampling factor and span.
//!
//! ```text
//! # fdsic learned_mf oversampling=8 span_symbols=4
//! index,real,imag
//! 0,0.0123,-0.4
//! ```

use std::io::{BufRead, Write};

use anyhow::{bail, Context, Result};
use fdsic_core::mf::LearnedMf;
use fdsic_core::Complex64;

pub fn write_mf_csv<W: Write>(mut out: W, mf: &LearnedMf) -> Result<()> {
    writeln!(
        out,
        "# fdsic learned_mf oversampling={} span_symbols={}",
        mf.oversampling(),
        mf.span_symbols()
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "real", "imag"])?;
    for (i, c) in mf.coeffs().iter().enumerate() {
        // `{}` on f64 is the shortest representation that parses back exactly.
        w.write_record([i.to_string(), c.re.to_string(), c.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn header_field(line: &str, key: &str) -> Option<usize> {
    line.split_whitespace()
        .find_map(|tok| tok.strip_prefix(key)?.strip_prefix('=')?.parse().ok())
}

pub fn read_mf_csv<R: BufRead>(mut input: R) -> Result<LearnedMf> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let (Some(m), Some(span)) = (
        header_field(&first, "oversampling"),
        header_field(&first, "span_symbols"),
    ) else {
        bail!("missing `# ... oversampling=M span_symbols=L` header line");
    };
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut coeffs = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| -> Result<&str> {
            rec.get(i).with_context(|| format!("row {row}: missing column {i}"))
        };
        let index: usize = field(0)?.parse().with_context(|| format!("row {row}: index"))?;
        if index != row {
            bail!("row {row}: expected index {row}, found {index}");
        }
        let re: f64 = field(1)?.parse().with_context(|| format!("row {row}: real"))?;
        let im: f64 = field(2)?.parse().with_context(|| format!("row {row}: imag"))?;
        coeffs.push(Complex64::new(re, im));
    }
    Ok(LearnedMf::new(coeffs, m, span)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_missing_header_and_bad_rows() {
        assert!(read_mf_csv("index,real,imag\n0,1,0\n".as_bytes()).is_err());
        let bad_index = "# oversampling=1 span_symbols=2\nindex,real,imag\n0,1,0\n2,0,0\n";
        assert!(read_mf_csv(bad_index.as_bytes()).is_err());
        let short = "# oversampling=2 span_symbols=2\nindex,real,imag\n0,1,0\n";
        assert!(read_mf_csv(short.as_bytes()).is_err());
    }
}
