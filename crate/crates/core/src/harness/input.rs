use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FormatPreset;
use crate::error::{Error, Result};

/// `n` values with real and imaginary parts uniform in [-1, 1].
pub fn random_sequence(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect()
}

/// Text sequence file: a header line `<n> <format>`, then one `<re> <im>`
/// line per value. Fields may also be separated by commas; `#` starts a comment.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFile {
    pub format: FormatPreset,
    pub values: Vec<Complex64>,
}

fn fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|f| !f.is_empty())
        .collect()
}

pub fn read_sequence_file(r: impl BufRead) -> Result<SequenceFile> {
    let mut lines = r
        .lines()
        .map(|l| l.map(|l| l.split('#').next().unwrap_or("").trim().to_string()))
        .filter(|l| l.as_ref().map_or(true, |l| !l.is_empty()));
    let bad = |m: String| Error::Config(format!("sequence file: {m}"));
    let header = lines.next().ok_or_else(|| bad("missing header".into()))??;
    let h = fields(&header);
    if h.len() != 2 {
        return Err(bad(format!("header must be `<n> <format>`, got `{header}`")));
    }
    let n: usize = h[0].parse().map_err(|_| bad(format!("bad length `{}`", h[0])))?;
    let format = h[1].parse()?;
    let mut values = Vec::with_capacity(n);
    for line in lines {
        let line = line?;
        let f = fields(&line);
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number `{s}`")));
        match f.as_slice() {
            [re] => values.push(Complex64::new(num(re)?, 0.0)),
            [re, im] => values.push(Complex64::new(num(re)?, num(im)?)),
            _ => return Err(bad(format!("bad line `{line}`"))),
        }
    }
    if values.len() != n {
        return Err(Error::Length {
            expected: n,
            got: values.len(),
        });
    }
    Ok(SequenceFile { format, values })
}

pub fn write_sequence_file(mut w: impl Write, seq: &SequenceFile) -> Result<()> {
    writeln!(w, "{} {}", seq.values.len(), seq.format)?;
    for v in &seq.values {
        writeln!(w, "{} {}", v.re, v.im)?;
    }
    Ok(())
}
