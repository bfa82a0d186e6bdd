//! Two-column CSV spectra and all-or-nothing file output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use csv::{ReaderBuilder, Trim};

use crate::error::{Error, Result};
use crate::spectrum::{Baseline, Spectrum};

/// Read `channel,intensity` rows. A first row that does not parse as two
/// numbers is taken as a header. Rows are sorted by channel if needed.
pub fn read_spectrum_csv(path: impl AsRef<Path>) -> Result<Spectrum> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spectrum_csv(&text, path)
}

pub(crate) fn parse_spectrum_csv(text: &str, path: &Path) -> Result<Spectrum> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(text.as_bytes());

    let parse_error = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    // (channel, intensity, line)
    let mut rows: Vec<(f64, f64, u64)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        let fields: Vec<&str> = record.iter().collect();
        let parsed = match fields.as_slice() {
            [c, v] => c.parse::<f64>().ok().zip(v.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some((c, v)) if c.is_finite() && v.is_finite() => rows.push((c, v, line)),
            Some(_) => {
                return Err(parse_error(line, "non-finite value".into()));
            }
            None if i == 0 => continue,
            None if fields.len() != 2 => {
                return Err(parse_error(
                    line,
                    format!("expected 2 columns, found {}", fields.len()),
                ));
            }
            None => {
                return Err(parse_error(line, format!("cannot parse {:?} as numbers", fields)));
            }
        }
    }

    if rows.len() < 3 {
        return Err(Error::Validation(format!(
            "{}: need at least 3 data rows, found {}",
            path.display(),
            rows.len()
        )));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Validation(format!(
            "{}: line {}: duplicate channel {}",
            path.display(),
            w[0].2.max(w[1].2),
            w[0].0
        )));
    }
    let (channels, intensities) = rows.into_iter().map(|(c, v, _)| (c, v)).unzip();
    Spectrum::new(channels, intensities)
}

pub(crate) fn format_columns(header: &str, channels: &[f64], values: &[f64]) -> String {
    let mut out = String::with_capacity(24 * channels.len());
    out.push_str(header);
    out.push('\n');
    for (c, v) in channels.iter().zip(values) {
        // `{}` on f64 prints the shortest string that parses back exactly
        out.push_str(&format!("{c},{v}\n"));
    }
    out
}

pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    format_columns("channel,intensity", spectrum.channels(), spectrum.intensities())
}

pub fn baseline_csv(baseline: &Baseline) -> String {
    format_columns("channel,baseline", baseline.channels(), baseline.values())
}

pub fn write_spectrum_csv(spectrum: &Spectrum, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), spectrum_csv(spectrum).as_bytes())
}

pub fn write_baseline_csv(baseline: &Baseline, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), baseline_csv(baseline).as_bytes())
}

fn temp_path_for(path: &Path) -> Result<PathBuf> {
    let name = path.file_name().ok_or_else(|| {
        Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidInput, "not a file path"),
        )
    })?;
    let mut tmp = name.to_os_string();
    tmp.push(format!(".tmp{}", std::process::id()));
    Ok(path.with_file_name(tmp))
}

/// Files staged next to their destination and renamed into place only when
/// every one of them has been written.
#[derive(Debug, Default)]
pub struct OutputBatch {
    staged: Vec<(PathBuf, PathBuf)>,
}

impl OutputBatch {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stage(&mut self, path: impl AsRef<Path>, contents: &[u8]) -> Result<()> {
        let path = path.as_ref();
        let tmp = temp_path_for(path)?;
        let written = fs::File::create(&tmp).and_then(|mut f| {
            f.write_all(contents)?;
            f.sync_all()
        });
        if let Err(e) = written {
            let _ = fs::remove_file(&tmp);
            return Err(Error::io(path, e));
        }
        self.staged.push((tmp, path.to_path_buf()));
        Ok(())
    }

    pub fn commit(mut self) -> Result<()> {
        let staged = std::mem::take(&mut self.staged);
        for (i, (tmp, dest)) in staged.iter().enumerate() {
            if let Err(e) = fs::rename(tmp, dest) {
                for (tmp, _) in &staged[i..] {
                    let _ = fs::remove_file(tmp);
                }
                return Err(Error::io(dest, e));
            }
        }
        Ok(())
    }
}

impl Drop for OutputBatch {
    fn drop(&mut self) {
        for (tmp, _) in &self.staged {
            let _ = fs::remove_file(tmp);
        }
    }
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut batch = OutputBatch::new();
    batch.stage(path, contents)?;
    batch.commit()
}
