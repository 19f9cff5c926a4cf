//! Deterministic CSV and JSON writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use kgsae::spectral::ModeShape;
use kgsae::{FieldState, SpectralData};
use serde::Serialize;
use sha1::{Digest, Sha1};

/// Seventeen significant digits: round-trips every `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Files written by one command, in order.
#[derive(Debug, Default)]
pub struct Bundle {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Bundle {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Bundle { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: String) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, &contents).with_context(|| format!("writing {}", path.display()))?;
        self.files.push((name.to_string(), contents.into_bytes()));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text)
    }

    /// Git blob hash of every file written so far.
    pub fn blob_hashes(&self) -> Vec<(String, String)> {
        self.files.iter().map(|(n, b)| (n.clone(), blob_hash(b))).collect()
    }

    /// Hash over the file names and blob hashes, in the style of a git tree.
    pub fn content_hash(&self) -> String {
        let mut h = Sha1::new();
        for (name, blob) in self.blob_hashes() {
            h.update(format!("{name} {blob}\n"));
        }
        format!("{:x}", h.finalize())
    }
}

pub fn blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha1::new();
    h.update(format!("blob {}\0", bytes.len()));
    h.update(bytes);
    format!("{:x}", h.finalize())
}

/// `t,x,re_phi,im_phi,re_phidot,im_phidot,component`.
pub fn snapshots_csv(states: &[FieldState]) -> String {
    let mut s = String::from("t,x,re_phi,im_phi,re_phidot,im_phidot,component\n");
    for st in states {
        for ((p, f), g) in st.points.iter().zip(&st.phi).zip(&st.phidot) {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                num(st.t),
                num(p.x),
                num(f.re),
                num(f.im),
                num(g.re),
                num(g.im),
                p.component
            );
        }
    }
    s
}

pub struct ConservedRow {
    pub t: f64,
    pub energy: f64,
    pub sigma: Option<f64>,
    pub leakage: Option<f64>,
    pub phi_norm: f64,
}

/// `t,E,sigma,leakage,phi_norm`; missing values are empty.
pub fn conserved_csv(rows: &[ConservedRow]) -> String {
    let mut s = String::from("t,E,sigma,leakage,phi_norm\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", num(r.t), num(r.energy), opt(r.sigma), opt(r.leakage), num(r.phi_norm));
    }
    s
}

const COEFFS: usize = 6;

fn shape_columns(shape: &ModeShape) -> (&'static str, Vec<f64>) {
    match *shape {
        ModeShape::Trig { a, b, k } => ("trig", vec![a.re, a.im, b.re, b.im, k]),
        ModeShape::Hyperbolic { left, right, kappa, length } => {
            ("hyperbolic", vec![left.re, left.im, right.re, right.im, kappa, length])
        }
        ModeShape::Linear { a, b } => ("linear", vec![a.re, a.im, b.re, b.im]),
        ModeShape::ExponentialDecay { c, kappa } => ("exponential_decay", vec![c, kappa]),
        ModeShape::Fourier { n, parity, circumference } => {
            let tag = match parity {
                kgsae::spectral::Parity::Cos => "fourier_cos",
                kgsae::spectral::Parity::Sin => "fourier_sin",
            };
            (tag, vec![n as f64, circumference])
        }
    }
}

/// One row per eigenmode, then one row per continuum part:
/// `index,lambda,multiplicity,mode_tag,component,c0..c5`.
///
/// Coefficients by tag: `trig` re a, im a, re b, im b, k; `hyperbolic` re
/// left, im left, re right, im right, κ, length; `linear` re a, im a, re b,
/// im b; `exponential_decay` c, κ; `fourier_*` n, circumference;
/// `continuum` α, μ with `lambda` the bottom of the continuum.
pub fn spectrum_csv(sd: &SpectralData) -> String {
    let mut s = String::from("index,lambda,multiplicity,mode_tag,component");
    for i in 0..COEFFS {
        let _ = write!(s, ",c{i}");
    }
    s.push('\n');
    let mut index = 0;
    let mut row = |s: &mut String, lambda: f64, mult: String, tag: &str, comp: usize, cs: Vec<f64>| {
        let _ = write!(s, "{index},{},{mult},{tag},{comp}", num(lambda));
        for i in 0..COEFFS {
            s.push(',');
            if let Some(c) = cs.get(i) {
                s.push_str(&num(*c));
            }
        }
        s.push('\n');
        index += 1;
    };
    for e in &sd.discrete {
        for m in &e.modes {
            let (tag, cs) = shape_columns(&m.shape);
            row(&mut s, e.lambda, e.multiplicity().to_string(), tag, m.component, cs);
        }
    }
    for c in &sd.continuum {
        row(&mut s, c.mu, String::new(), "continuum", c.component, vec![c.alpha, c.mu]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn blob_hash_matches_git() {
        // `printf 'hello\n' | git hash-object --stdin`
        assert_eq!(blob_hash(b"hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
    }
}
