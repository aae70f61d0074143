//! Command-line front end: graph generation with distance certificates,
//! worked-example replay, and the scalability and validity benchmarks.
//!
//! Every command is a plain function here so that tests can drive it
//! without spawning the binary.

pub mod bench;
pub mod generate;
pub mod validity;

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

/// First line of every CSV artifact.
pub const SCHEMA_HEADER: &str = "# ged-exactgen schema v1";

/// Worker pool sized by `GEDGEN_THREADS` (rayon's default when unset).
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("GEDGEN_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("GEDGEN_THREADS={v:?} is not a thread count"))?;
        builder = builder.num_threads(n.max(1));
    }
    Ok(builder.build()?)
}

/// Serializes `records` as CSV below the schema comment line.
pub fn write_csv<T: serde::Serialize>(out: &mut impl Write, records: &[T]) -> Result<()> {
    writeln!(out, "{SCHEMA_HEADER}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file<T: serde::Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut f =
        std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_csv(&mut f, records)
}

/// Parses a byte size such as `2048`, `512M` or `3G` (binary units).
pub fn parse_bytes(s: &str) -> Result<u64> {
    let t = s.trim();
    let (num, mul) = match t.chars().last().map(|c| c.to_ascii_uppercase()) {
        Some('K') => (&t[..t.len() - 1], 1u64 << 10),
        Some('M') => (&t[..t.len() - 1], 1 << 20),
        Some('G') => (&t[..t.len() - 1], 1 << 30),
        _ => (t, 1),
    };
    let v: u64 = num
        .trim()
        .parse()
        .with_context(|| format!("bad size {s:?}"))?;
    v.checked_mul(mul)
        .with_context(|| format!("size {s:?} overflows"))
}

/// Text report of the worked examples; the flag is true when all passed.
pub fn examples_report() -> Result<(String, bool)> {
    let mut text = String::new();
    let mut all = true;
    for ex in ged_exactgen::worked::examples() {
        let r = ged_exactgen::worked::check(&ex)?;
        match &r.first_mismatch {
            None => text.push_str(&format!("{}: pass ({} values)\n", r.name, r.compared)),
            Some(m) => {
                all = false;
                text.push_str(&format!("{}: FAIL at {m}\n", r.name));
            }
        }
    }
    Ok((text, all))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_sizes() {
        assert_eq!(parse_bytes("2048").unwrap(), 2048);
        assert_eq!(parse_bytes("512M").unwrap(), 512 << 20);
        assert_eq!(parse_bytes("3g").unwrap(), 3 << 30);
        assert!(parse_bytes("lots").is_err());
    }

    #[test]
    fn csv_starts_with_schema_line() {
        #[derive(serde::Serialize)]
        struct Row {
            a: u32,
        }
        let mut buf = Vec::new();
        write_csv(&mut buf, &[Row { a: 1 }]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# ged-exactgen schema v1\na\n1\n"
        );
    }
}
