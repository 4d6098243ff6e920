//! On-disk JSON formats for key configurations and schemes.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sgc_core::fmatrix::FMatrix;
use sgc_core::gf::Field;
use sgc_core::keyspace::{KeyConfig, ReceiverSet};
use sgc_core::scheme::{KeySegment, LinearScheme};
use sgc_core::synth::Synthesis;

use crate::{CliError, Exit};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyEntry {
    pub subset: Vec<usize>,
    pub symbols: u64,
}

/// `{"K": 4, "qualified": [1], "keys": [{"subset": [1, 2], "symbols": 4}]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "K")]
    pub k: usize,
    pub qualified: Vec<usize>,
    #[serde(default)]
    pub keys: Vec<KeyEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentEntry {
    pub subset: Vec<usize>,
    pub width: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builder: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escalations: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// A scheme `X = A·W + B·S` with its key layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeFile {
    pub p: u64,
    #[serde(rename = "K")]
    pub k: usize,
    pub qualified: Vec<usize>,
    #[serde(rename = "L")]
    pub blocks: u64,
    #[serde(rename = "Lw")]
    pub lw: usize,
    #[serde(rename = "Lx")]
    pub lx: usize,
    pub layout: Vec<SegmentEntry>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<u64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<u64>>,
    #[serde(default)]
    pub meta: Meta,
}

fn in_file<T>(path: &Path, r: Result<T, CliError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::new(e.exit, format!("{}: {}", path.display(), e.message)))
}

/// Reads a file, tagging I/O failures with the path.
pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::new(Exit::Parse, format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    // serde_json messages already end in "at line L column C"
    serde_json::from_str(text).map_err(|e| CliError::new(Exit::Parse, e.to_string()))
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::new(Exit::Parse, msg)
}

/// Builds a receiver set, rejecting empty lists, repeats and labels outside
/// `1..=k`.
fn receiver_set(what: &str, list: &[usize], k: usize) -> Result<ReceiverSet, CliError> {
    if list.is_empty() {
        return Err(invalid(format!("{what}: empty receiver list")));
    }
    let mut seen = BTreeSet::new();
    for &r in list {
        if r == 0 || r > k {
            return Err(invalid(format!("{what}: receiver {r} outside 1..={k}")));
        }
        if !seen.insert(r) {
            return Err(invalid(format!("{what}: receiver {r} repeated")));
        }
    }
    Ok(ReceiverSet::of(list))
}

fn k_in_range(k: usize) -> Result<(), CliError> {
    if (2..=20).contains(&k) {
        Ok(())
    } else {
        Err(invalid(format!("K: {k} outside 2..=20")))
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        parse_json(text)
    }

    pub fn load(path: &Path) -> Result<KeyConfig, CliError> {
        in_file(path, Self::parse(&read(path)?).and_then(|f| f.to_config()))
    }

    pub fn to_config(&self) -> Result<KeyConfig, CliError> {
        k_in_range(self.k)?;
        let q = receiver_set("qualified", &self.qualified, self.k)?;
        let mut keys = Vec::with_capacity(self.keys.len());
        let mut seen = BTreeSet::new();
        for (i, e) in self.keys.iter().enumerate() {
            let u = receiver_set(&format!("keys[{i}].subset"), &e.subset, self.k)?;
            if !seen.insert(u) {
                return Err(invalid(format!("keys[{i}]: subset {u} listed twice")));
            }
            keys.push((u, e.symbols));
        }
        KeyConfig::new(self.k, q, keys).map_err(|e| invalid(e.to_string()))
    }

    pub fn from_config(config: &KeyConfig) -> Self {
        ConfigFile {
            k: config.receivers(),
            qualified: config.qualified().iter().collect(),
            keys: config
                .keys()
                .map(|(u, symbols)| KeyEntry {
                    subset: u.iter().collect(),
                    symbols,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        crate::report::pretty(&serde_json::to_value(self).expect("plain data serializes"))
    }
}

fn matrix(field: Field, what: &str, rows: &[Vec<u64>], cols: usize) -> Result<FMatrix, CliError> {
    let mut m = FMatrix::zeros(field, rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(invalid(format!("{what}[{i}]: {} entries, expected {cols}", row.len())));
        }
        for (j, &v) in row.iter().enumerate() {
            if v >= field.p() {
                return Err(invalid(format!("{what}[{i}][{j}]: {v} is not in GF({})", field.p())));
            }
            m.set(i, j, field.from_u64(v));
        }
    }
    Ok(m)
}

impl SchemeFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        parse_json(text)
    }

    pub fn load(path: &Path) -> Result<LinearScheme, CliError> {
        in_file(path, Self::parse(&read(path)?).and_then(|f| f.to_scheme()))
    }

    pub fn to_scheme(&self) -> Result<LinearScheme, CliError> {
        let field = Field::new(self.p).map_err(|e| invalid(format!("p: {e}")))?;
        k_in_range(self.k)?;
        let q = receiver_set("qualified", &self.qualified, self.k)?;
        let layout = self
            .layout
            .iter()
            .enumerate()
            .map(|(i, s)| {
                Ok(KeySegment::new(
                    receiver_set(&format!("layout[{i}].subset"), &s.subset, self.k)?,
                    s.width,
                ))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let key_len: usize = layout.iter().map(|s| s.width).sum();
        if self.a.len() != self.lx || self.b.len() != self.lx {
            return Err(invalid(format!(
                "Lx is {} but A has {} rows and B has {}",
                self.lx,
                self.a.len(),
                self.b.len()
            )));
        }
        let a = matrix(field, "A", &self.a, self.lw)?;
        let b = matrix(field, "B", &self.b, key_len)?;
        LinearScheme::new(self.blocks, self.k, q, layout, a, b).map_err(|e| invalid(e.to_string()))
    }

    pub fn from_scheme(scheme: &LinearScheme, meta: Meta) -> Self {
        SchemeFile {
            p: scheme.field().p(),
            k: scheme.receivers(),
            qualified: scheme.qualified().iter().collect(),
            blocks: scheme.blocks(),
            lw: scheme.message_len(),
            lx: scheme.transmit_len(),
            layout: scheme
                .layout()
                .iter()
                .map(|s| SegmentEntry {
                    subset: s.subset.iter().collect(),
                    width: s.width,
                })
                .collect(),
            a: scheme.a().to_rows(),
            b: scheme.b().to_rows(),
            meta,
        }
    }

    pub fn from_synthesis(out: &Synthesis) -> Self {
        Self::from_scheme(
            &out.scheme,
            Meta {
                builder: Some(out.builder.to_string()),
                seed: Some(out.seed),
                escalations: Some(out.escalations),
                notes: out.notes.clone(),
            },
        )
    }

    pub fn to_json(&self) -> String {
        crate::report::pretty(&serde_json::to_value(self).expect("plain data serializes"))
    }
}
