//! CSV and JSON artifacts. Everything is rendered in memory, then written
//! through temporary files and renamed into place.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::CliError;
use crate::quasidist::{Marginal, PhaseSpaceField};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn header(out: &mut String, meta: &[(&str, String)]) {
    for (k, v) in meta {
        let _ = writeln!(out, "# {k}={v}");
    }
}

/// `alpha,beta,re,im` rows, β fastest. Char functions use `theta,tau`.
pub fn field_csv(field: &PhaseSpaceField, meta: &[(&str, String)]) -> Vec<u8> {
    let mut out = String::new();
    header(&mut out, meta);
    let (a, b) = match field.role() {
        crate::quasidist::FieldRole::CharFunction => ("theta", "tau"),
        _ => ("alpha", "beta"),
    };
    let _ = writeln!(out, "{a},{b},re,im");
    let v = field.values();
    for (i, x) in field.alpha().iter().enumerate() {
        for (j, y) in field.beta().iter().enumerate() {
            let z = v[(i, j)];
            let _ = writeln!(out, "{x:.16e},{y:.16e},{:.16e},{:.16e}", z.re, z.im);
        }
    }
    out.into_bytes()
}

/// One row per lattice point: computed probability, `|c|²·w` from the state, and the imaginary residue bound.
pub fn marginal_csv(name: &str, m: &Marginal, expected: &[f64], meta: &[(&str, String)]) -> Vec<u8> {
    let mut out = String::new();
    header(&mut out, meta);
    let _ = writeln!(out, "# max_imag={:.16e}", m.max_imag);
    let _ = writeln!(out, "{name},probability,expected");
    for ((x, p), e) in m.axis.iter().zip(&m.values).zip(expected) {
        let _ = writeln!(out, "{x:.16e},{p:.16e},{e:.16e}");
    }
    out.into_bytes()
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("serializable report");
    v.push(b'\n');
    v
}

/// Write all files or none: each goes to a temporary sibling first and is renamed once every
/// temporary has been written.
pub fn write_all(dir: &Path, files: &BTreeMap<String, Vec<u8>>) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::config(format!("cannot create {}: {e}", dir.display())))?;
    let io = |e: std::io::Error| CliError::config(format!("write failed in {}: {e}", dir.display()));
    let mut staged = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        tmp.write_all(bytes).map_err(io)?;
        tmp.as_file().sync_all().map_err(io)?;
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, target) in staged {
        tmp.persist(&target).map_err(|e| io(e.error))?;
    }
    Ok(())
}
