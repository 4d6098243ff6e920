//! Two qualified receivers out of four, over GF(2).
//!
//! The instance is decomposed into independent one-bit components, each a
//! tiny scheme that consumes one bit from a few keys. How many times each
//! component runs is decided by a case analysis on the key sizes.
//!
//! Labels below are after normalization: qualified `{1, 2}` with
//! `L_1 <= L_2`, eavesdroppers `{3, 4}` with `L_124 <= L_123`.

use std::collections::BTreeMap;

use super::{finish, prune, Builder, Synthesis};
use crate::error::{Error, Result};
use crate::fmatrix::FMatrix;
use crate::gf::Field;
use crate::keyspace::{KeyConfig, ReceiverSet, Setting};
use crate::scheme::{KeySegment, LinearScheme};

/// A one-bit component. Every transmitted row is `W` plus the listed keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Component {
    pub name: &'static str,
    /// Key subsets consumed, one bit each.
    pub keys: &'static [&'static [usize]],
    /// Per transmitted row, indices into `keys`.
    pub rows: &'static [&'static [usize]],
}

impl Component {
    pub fn tx_bits(&self) -> usize {
        self.rows.len()
    }

    pub fn msg_bits(&self) -> usize {
        1
    }

    pub fn consumes(&self) -> BTreeMap<ReceiverSet, u64> {
        self.keys.iter().map(|k| (ReceiverSet::of(k), 1)).collect()
    }

    /// The component as a standalone scheme over GF(2) with receivers
    /// `{1..4}`, qualified `{1, 2}`.
    pub fn scheme(&self) -> LinearScheme {
        let f = Field::gf2();
        let layout = self
            .keys
            .iter()
            .map(|k| KeySegment::new(ReceiverSet::of(k), 1))
            .collect();
        let a = FMatrix::from_rows(f, &vec![vec![1]; self.rows.len()]).expect("column of ones");
        let b_rows: Vec<Vec<i64>> = self
            .rows
            .iter()
            .map(|r| (0..self.keys.len()).map(|j| r.contains(&j) as i64).collect())
            .collect();
        let b = FMatrix::from_rows(f, &b_rows).expect("rectangular");
        LinearScheme::new(1, 4, ReceiverSet::of(&[1, 2]), layout, a, b).expect("consistent component")
    }
}

pub const OTP12: Component = Component {
    name: "OTP12",
    keys: &[&[1, 2]],
    rows: &[&[0]],
};

pub const CMP1: Component = Component {
    name: "Cmp1",
    keys: &[&[1, 2, 3], &[1, 2, 4]],
    rows: &[&[0, 1]],
};

pub const CMP2: Component = Component {
    name: "Cmp2",
    keys: &[&[1], &[2]],
    rows: &[&[0], &[1]],
};

pub const CMP3: Component = Component {
    name: "Cmp3",
    keys: &[&[2], &[1, 3], &[1, 4]],
    rows: &[&[0], &[1, 2]],
};

pub const CMP4: Component = Component {
    name: "Cmp4",
    keys: &[&[1, 2, 3], &[2, 4], &[1, 4]],
    rows: &[&[0, 1], &[0, 2]],
};

pub const CMP5: Component = Component {
    name: "Cmp5",
    keys: &[&[2], &[1, 2, 3], &[1, 4]],
    rows: &[&[0], &[1, 2]],
};

pub const CMP6: Component = Component {
    name: "Cmp6",
    keys: &[&[1, 3], &[1, 4], &[2, 3], &[2, 4]],
    rows: &[&[0, 1], &[2, 3]],
};

/// All components in invocation-count order.
pub const COMPONENTS: [Component; 7] = [OTP12, CMP1, CMP2, CMP3, CMP4, CMP5, CMP6];

/// How many times each entry of [`COMPONENTS`] runs, plus the case reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invocations {
    pub counts: [u64; 7],
    pub case: &'static str,
}

impl Invocations {
    pub fn rate(&self) -> u64 {
        self.counts
            .iter()
            .zip(COMPONENTS)
            .map(|(&n, c)| n * c.msg_bits() as u64)
            .sum()
    }

    pub fn bandwidth(&self) -> u64 {
        self.counts
            .iter()
            .zip(COMPONENTS)
            .map(|(&n, c)| n * c.tx_bits() as u64)
            .sum()
    }

    pub fn usage(&self) -> BTreeMap<ReceiverSet, u64> {
        let mut out = BTreeMap::new();
        for (&n, c) in self.counts.iter().zip(COMPONENTS) {
            for (u, bits) in c.consumes() {
                *out.entry(u).or_insert(0) += n * bits;
            }
        }
        out.retain(|_, v| *v > 0);
        out
    }
}

/// Walks the case tree on a normalized configuration.
pub fn invocation_counts(config: &KeyConfig) -> Invocations {
    let l = |v: &[usize]| config.size(ReceiverSet::of(v)) as i64;
    let (l1, l2, l13, l14, l23, l24) = (l(&[1]), l(&[2]), l(&[1, 3]), l(&[1, 4]), l(&[2, 3]), l(&[2, 4]));
    let (l12, l123, l124) = (l(&[1, 2]), l(&[1, 2, 3]), l(&[1, 2, 4]));
    debug_assert!(l1 <= l2 && l124 <= l123, "configuration is not normalized");

    let mut n = [0i64; 7];
    n[0] = l12;
    n[1] = l124;
    n[2] = l1;
    let case;
    if l2 - l1 >= l13.min(l14) {
        n[3] = l13.min(l14);
        if l14 <= l13 {
            case = "1.1";
        } else {
            let m = [l14 - l13, l123 - l124, l24];
            let first = argmin(&m);
            n[4] = m[first];
            case = match first {
                0 => "1.2.1",
                1 => "1.2.2",
                _ => {
                    let m2 = [l2 - l1 - l13, l14 - l13 - l24, l123 - l124 - l24];
                    let second = argmin(&m2);
                    n[5] = m2[second];
                    ["1.2.3.1", "1.2.3.2", "1.2.3.3"][second]
                }
            };
        }
    } else {
        n[3] = l2 - l1;
        let m = [l24, l14 - l2 + l1, l123 - l124];
        let first = argmin(&m);
        n[4] = m[first];
        case = match first {
            0 => "2.1",
            1 => "2.2",
            _ => {
                let m2 = [l14 - l2 + l1 - l123 + l124, l13 - l2 + l1, l24 - l123 + l124, l23];
                let second = argmin(&m2);
                n[6] = m2[second];
                ["2.3.1", "2.3.2", "2.3.3", "2.3.4"][second]
            }
        };
    }
    debug_assert!(n.iter().all(|&c| c >= 0), "negative count in case {case}");
    Invocations {
        counts: n.map(|c| c.max(0) as u64),
        case,
    }
}

/// Index of the first minimum, so ties follow the listed case order.
fn argmin(values: &[i64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

pub fn groupcast_2of4(config: &KeyConfig) -> Result<Synthesis> {
    let (norm, perm) = config.normalize_labels(Setting::Groupcast2of4)?;
    let norm = prune(&norm);
    let inv = invocation_counts(&norm);
    let usage = inv.usage();
    if let Some((&subset, &used)) = usage.iter().find(|(&u, &used)| used > norm.size(u)) {
        return Err(Error::KeyBudget {
            subset,
            used,
            available: norm.size(subset),
        });
    }
    let parts: Vec<LinearScheme> = inv
        .counts
        .iter()
        .zip(COMPONENTS)
        .flat_map(|(&n, c)| std::iter::repeat_n(c.scheme(), n as usize))
        .collect();
    let scheme = if parts.is_empty() {
        LinearScheme::empty(Field::gf2(), 4, ReceiverSet::of(&[1, 2]))
    } else {
        LinearScheme::concat(&parts)?
    };
    let mut out = Synthesis::new(scheme.relabel(&perm.inverse()), Builder::Groupcast2of4, 0);
    let summary: Vec<String> = inv
        .counts
        .iter()
        .zip(COMPONENTS)
        .filter(|(&n, _)| n > 0)
        .map(|(n, c)| format!("{n} x {}", c.name))
        .collect();
    out.notes.push(format!("case {}: {}", inv.case, summary.join(" + ")));
    finish(config, out)
}
