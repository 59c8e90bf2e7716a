use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use sampcorr::Pmf;

pub fn digest(bytes: &[u8]) -> String {
    let h = Sha256::digest(bytes);
    let hex: String = h.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

pub struct Input {
    pub bytes: Vec<u8>,
}

impl Input {
    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(Input { bytes })
    }

    pub fn digest(&self) -> String {
        digest(&self.bytes)
    }

    pub fn pmf(&self) -> Result<Pmf> {
        let s = std::str::from_utf8(&self.bytes).context("pmf file is not UTF-8")?;
        Pmf::from_json(s, false).context("expected a pmf JSON object {\"n\": .., \"p\": [..]}")
    }

    /// One element of `{1..n}` per row, first column; a non-numeric first
    /// row is taken as a header.
    pub fn stream(&self) -> Result<Vec<usize>> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(self.bytes.as_slice());
        let mut out = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec.context("malformed CSV stream")?;
            let field = rec.get(0).unwrap_or("").trim();
            match field.parse::<usize>() {
                Ok(x) => out.push(x),
                Err(_) if k == 0 => continue,
                Err(_) => bail!("row {}: expected an element, got {field:?}", k + 1),
            }
        }
        Ok(out)
    }

    /// A JSON array of cdf values.
    pub fn cdf_table(&self) -> Result<Vec<f64>> {
        serde_json::from_slice(&self.bytes).context("expected a JSON array of cdf values")
    }
}

pub fn stream_bytes(samples: &[usize]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for &x in samples {
        w.write_record([x.to_string()])?;
    }
    Ok(w.into_inner()?)
}

pub fn pmf_bytes(p: &Pmf) -> Vec<u8> {
    let mut s = p.to_json();
    s.push('\n');
    s.into_bytes()
}

/// Writes to `path`, or stdout for `None` or `-`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))
        }
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Shortest decimal that reads back to within `1e-12`.
pub fn number(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}
