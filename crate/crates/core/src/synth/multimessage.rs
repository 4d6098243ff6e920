//! Three messages over three receivers, in bits.
//!
//! Receiver 1 holds `s_1, s_12` and wants `(W_1, W_12)`; receiver 2 holds
//! `s_2, s_12` and wants `(W_2, W_12)`; receiver 3 holds nothing and must
//! learn nothing. Receiver 1 must also learn nothing about `W_2`, and
//! receiver 2 nothing about `W_1`.
//!
//! The achievable region is
//!
//! ```text
//! R_1 + R_12 <= L_1 + L_12     R_2 + R_12 <= L_2 + L_12
//! R_1 <= L_1                   R_2 <= L_2
//! ```
//!
//! and the minimum bandwidth is `R_1 + R_2 + max(R_12, 2 R_12 - L_12)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::fmatrix::FMatrix;
use crate::gf::Field;
use crate::keyspace::ReceiverSet;
use crate::oracle::{LinearSystem, TOLERANCE};
use crate::scheme::KeySegment;

/// Key sizes `(L_1, L_2, L_12)` in bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct KeySizes {
    pub l1: u64,
    pub l2: u64,
    pub l12: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct RateTuple {
    pub r1: u64,
    pub r2: u64,
    pub r12: u64,
}

impl fmt::Display for RateTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(R1, R2, R12) = ({}, {}, {})", self.r1, self.r2, self.r12)
    }
}

/// Checks the four region inequalities in order, naming the first one
/// violated.
pub fn region_check(sizes: KeySizes, rates: RateTuple) -> Result<()> {
    let KeySizes { l1, l2, l12 } = sizes;
    let RateTuple { r1, r2, r12 } = rates;
    let checks = [
        (r1 + r12, l1 + l12, "R1 + R12 <= L1 + L12"),
        (r2 + r12, l2 + l12, "R2 + R12 <= L2 + L12"),
        (r1, l1, "R1 <= L1"),
        (r2, l2, "R2 <= L2"),
    ];
    for (lhs, rhs, name) in checks {
        if lhs > rhs {
            return Err(Error::Infeasible(format!("{name} fails: {lhs} > {rhs}")));
        }
    }
    Ok(())
}

/// Minimum bandwidth of a feasible tuple.
pub fn min_bandwidth(sizes: KeySizes, rates: RateTuple) -> u64 {
    rates.r1 + rates.r2 + rates.r12.max((2 * rates.r12).saturating_sub(sizes.l12))
}

/// Which messages a constraint talks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Messages {
    W1,
    W2,
    All,
}

impl fmt::Display for Messages {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Messages::W1 => "W1",
            Messages::W2 => "W2",
            Messages::All => "(W1, W2, W12)",
        })
    }
}

/// The security constraints: `(receiver, messages it must not learn)`.
pub const SECRECY: [(usize, Messages); 3] = [(1, Messages::W2), (2, Messages::W1), (3, Messages::All)];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiMessageScheme {
    sizes: KeySizes,
    rates: RateTuple,
    layout: Vec<KeySegment>,
    /// Columns `W_1 | W_2 | W_12`.
    a: FMatrix,
    b: FMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiReport {
    /// Receiver and whether it decodes both wanted messages.
    pub decodes: Vec<(usize, bool)>,
    /// Receiver, forbidden messages, leakage in bits.
    pub leakage: Vec<(usize, Messages, f64)>,
}

impl MultiReport {
    pub fn passed(&self) -> bool {
        self.decodes.iter().all(|&(_, ok)| ok) && self.leakage.iter().all(|&(_, _, l)| l.abs() < TOLERANCE)
    }
}

/// Builds the bit-slicing scheme for a feasible tuple.
pub fn multimessage(sizes: KeySizes, rates: RateTuple) -> Result<MultiMessageScheme> {
    region_check(sizes, rates)?;
    let RateTuple { r1, r2, r12 } = rates;
    let (r1, r2, r12) = (r1 as usize, r2 as usize, r12 as usize);
    let l12 = sizes.l12 as usize;
    // W_12 bits beyond L_12 are sent twice, padded by s_1 and by s_2
    let shared = r12.min(l12);
    let extra = r12 - shared;
    let (u1, u2) = (r1 + extra, r2 + extra);
    let (c1, c2, c12) = (0, u1, u1 + u2);
    let (w1, w2, w12) = (0, r1, r1 + r2);
    let lw = r1 + r2 + r12;
    let d = u1 + u2 + shared;

    // (message column, key column) per row
    let mut rows: Vec<(usize, usize)> = Vec::new();
    rows.extend((0..r1).map(|j| (w1 + j, c1 + j)));
    rows.extend((0..r2).map(|j| (w2 + j, c2 + j)));
    rows.extend((0..shared).map(|j| (w12 + j, c12 + j)));
    rows.extend((0..extra).map(|t| (w12 + shared + t, c1 + r1 + t)));
    rows.extend((0..extra).map(|t| (w12 + shared + t, c2 + r2 + t)));

    let f = Field::gf2();
    let mut a = FMatrix::zeros(f, rows.len(), lw);
    let mut b = FMatrix::zeros(f, rows.len(), d);
    for (i, &(w, s)) in rows.iter().enumerate() {
        a.set(i, w, f.elem(1));
        b.set(i, s, f.elem(1));
    }
    let layout = [
        (ReceiverSet::of(&[1]), u1),
        (ReceiverSet::of(&[2]), u2),
        (ReceiverSet::of(&[1, 2]), shared),
    ]
    .into_iter()
    .filter(|&(_, w)| w > 0)
    .map(|(u, w)| KeySegment::new(u, w))
    .collect();
    Ok(MultiMessageScheme {
        sizes,
        rates,
        layout,
        a,
        b,
    })
}

impl MultiMessageScheme {
    pub fn sizes(&self) -> KeySizes {
        self.sizes
    }

    pub fn rates(&self) -> RateTuple {
        self.rates
    }

    pub fn layout(&self) -> &[KeySegment] {
        &self.layout
    }

    pub fn a(&self) -> &FMatrix {
        &self.a
    }

    pub fn b(&self) -> &FMatrix {
        &self.b
    }

    pub fn transmit_len(&self) -> usize {
        self.a.rows()
    }

    /// 1 when `R_12 <= L_12`, otherwise 2.
    pub fn case(&self) -> u8 {
        if self.rates.r12 <= self.sizes.l12 {
            1
        } else {
            2
        }
    }

    /// Key bits used per subset.
    pub fn key_usage(&self) -> Vec<(ReceiverSet, usize)> {
        self.layout.iter().map(|s| (s.subset, s.width)).collect()
    }

    fn message_cols(&self, m: Messages) -> Vec<usize> {
        let RateTuple { r1, r2, r12 } = self.rates;
        let (r1, r2, r12) = (r1 as usize, r2 as usize, r12 as usize);
        match m {
            Messages::W1 => (0..r1).collect(),
            Messages::W2 => (r1..r1 + r2).collect(),
            Messages::All => (0..r1 + r2 + r12).collect(),
        }
    }

    fn wanted(&self, k: usize) -> Vec<usize> {
        let RateTuple { r1, r2, r12 } = self.rates;
        let (r1, r2, r12) = (r1 as usize, r2 as usize, r12 as usize);
        let w12 = r1 + r2..r1 + r2 + r12;
        match k {
            1 => (0..r1).chain(w12).collect(),
            2 => (r1..r1 + r2).chain(w12).collect(),
            _ => Vec::new(),
        }
    }

    fn key_cols(&self, k: usize, known: bool) -> Vec<usize> {
        let mut out = Vec::new();
        let mut start = 0;
        for seg in &self.layout {
            if seg.subset.contains(k) == known {
                out.extend(start..start + seg.width);
            }
            start += seg.width;
        }
        out
    }

    /// Rank test: the observer sees `X` and its keys; every message column
    /// outside `target` and every unknown key column is noise. Returns
    /// `rank([A_target | noise]) - rank(noise)`.
    fn visible_rank(&self, k: usize, target: &[usize]) -> usize {
        let others: Vec<usize> = (0..self.a.cols()).filter(|c| !target.contains(c)).collect();
        let noise = FMatrix::hstack(&[
            &self.a.select_cols(&others),
            &self.b.select_cols(&self.key_cols(k, false)),
        ])
        .expect("same height");
        let joint = FMatrix::hstack(&[&self.a.select_cols(target), &noise]).expect("same height");
        joint.rank() - noise.rank()
    }

    /// Algebraic verification of both decoding and all three secrecy
    /// constraints; leakage is reported in bits.
    pub fn verify(&self) -> MultiReport {
        MultiReport {
            decodes: [1, 2]
                .into_iter()
                .map(|k| {
                    let want = self.wanted(k);
                    (k, self.visible_rank(k, &want) == want.len())
                })
                .collect(),
            leakage: SECRECY
                .into_iter()
                .map(|(k, m)| (k, m, self.visible_rank(k, &self.message_cols(m)) as f64))
                .collect(),
        }
    }

    /// Exhaustive verification over all message and key values.
    pub fn oracle_verify(&self, cap: u64) -> Result<MultiReport> {
        let g = FMatrix::hstack(&[&self.a, &self.b])?;
        let lw = self.a.cols();
        let sys = LinearSystem::new(g, cap)?;
        let known = |k: usize| -> Vec<usize> { self.key_cols(k, true).into_iter().map(|c| c + lw).collect() };
        Ok(MultiReport {
            decodes: [1, 2]
                .into_iter()
                .map(|k| (k, sys.conditional_entropy(&self.wanted(k), &known(k)).abs() < TOLERANCE))
                .collect(),
            leakage: SECRECY
                .into_iter()
                .map(|(k, m)| (k, m, sys.mutual_information(&self.message_cols(m), &known(k))))
                .collect(),
        })
    }
}
