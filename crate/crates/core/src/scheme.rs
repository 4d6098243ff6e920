//! Linear secure-groupcast schemes and their exact algebraic verification.
//!
//! A scheme transmits `X = A·W + B·S` where `W` holds `L_W` uniform message
//! symbols and `S` is the global key vector, laid out as consecutive segments
//! each belonging to one receiver subset. Receiver `k` observes `X` together
//! with every segment whose subset contains `k`.
//!
//! With uniform independent keys the information an observer gets about `W`
//! is fully determined by ranks: if `B_u` are the key columns the observer
//! does not know, then
//!
//! * `H(W | X, Z_k) = 0` iff `rank([A | B_u]) = L_W + rank(B_u)`;
//! * `I(W; X, Z_e) = rank([B_u | A]) - rank(B_u)` symbols.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fmatrix::FMatrix;
use crate::gf::{Field, FieldElem};
use crate::keyspace::{KeyConfig, Permutation, ReceiverSet};
use crate::oracle::{self, OracleReport};

/// A run of `width` consecutive key columns belonging to the key of `subset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeySegment {
    pub subset: ReceiverSet,
    pub width: usize,
}

impl KeySegment {
    pub fn new(subset: ReceiverSet, width: usize) -> Self {
        KeySegment { subset, width }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearScheme {
    field: Field,
    blocks: u64,
    k: usize,
    qualified: ReceiverSet,
    layout: Vec<KeySegment>,
    a: FMatrix,
    b: FMatrix,
}

impl LinearScheme {
    pub fn new(
        blocks: u64,
        k: usize,
        qualified: ReceiverSet,
        layout: Vec<KeySegment>,
        a: FMatrix,
        b: FMatrix,
    ) -> Result<Self> {
        let field = a.field();
        if b.field() != field {
            return Err(Error::FieldMismatch(field.p(), b.field().p()));
        }
        if a.rows() != b.rows() {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows but B has {}",
                a.rows(),
                b.rows()
            )));
        }
        let width: usize = layout.iter().map(|s| s.width).sum();
        if width != b.cols() {
            return Err(Error::DimensionMismatch(format!(
                "layout covers {width} key columns but B has {}",
                b.cols()
            )));
        }
        if blocks == 0 {
            return Err(Error::InvalidConfig("a scheme needs at least one key block".into()));
        }
        let all = ReceiverSet::full(k);
        if !qualified.is_subset(all) {
            return Err(Error::InvalidConfig(format!("qualified set {qualified} outside {all}")));
        }
        if let Some(seg) = layout.iter().find(|s| s.subset.is_empty() || !s.subset.is_subset(all)) {
            return Err(Error::InvalidConfig(format!(
                "key segment {} outside {all}",
                seg.subset
            )));
        }
        Ok(LinearScheme {
            field,
            blocks,
            k,
            qualified,
            layout,
            a,
            b,
        })
    }

    /// The scheme that sends nothing.
    pub fn empty(field: Field, k: usize, qualified: ReceiverSet) -> Self {
        LinearScheme {
            field,
            blocks: 1,
            k,
            qualified,
            layout: Vec::new(),
            a: FMatrix::zeros(field, 0, 0),
            b: FMatrix::zeros(field, 0, 0),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Key blocks `L`.
    pub fn blocks(&self) -> u64 {
        self.blocks
    }

    pub fn receivers(&self) -> usize {
        self.k
    }

    pub fn qualified(&self) -> ReceiverSet {
        self.qualified
    }

    pub fn eavesdroppers(&self) -> ReceiverSet {
        ReceiverSet::full(self.k).difference(self.qualified)
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

    /// `L_W`.
    pub fn message_len(&self) -> usize {
        self.a.cols()
    }

    /// `L_X`.
    pub fn transmit_len(&self) -> usize {
        self.a.rows()
    }

    /// `D`, the width of the global key vector.
    pub fn key_len(&self) -> usize {
        self.b.cols()
    }

    /// Message symbols per key block.
    pub fn rate(&self) -> Ratio<i64> {
        Ratio::new(self.message_len() as i64, self.blocks as i64)
    }

    /// Transmitted symbols per key block.
    pub fn bandwidth(&self) -> Ratio<i64> {
        Ratio::new(self.transmit_len() as i64, self.blocks as i64)
    }

    /// Key columns held by receiver `k`.
    pub fn known_columns(&self, k: usize) -> Vec<usize> {
        self.columns_where(|u| u.contains(k))
    }

    pub fn unknown_columns(&self, k: usize) -> Vec<usize> {
        self.columns_where(|u| !u.contains(k))
    }

    fn columns_where(&self, pred: impl Fn(ReceiverSet) -> bool) -> Vec<usize> {
        let mut cols = Vec::new();
        let mut start = 0;
        for seg in &self.layout {
            if pred(seg.subset) {
                cols.extend(start..start + seg.width);
            }
            start += seg.width;
        }
        cols
    }

    /// Whether receiver `k` can recover `W` from `X` and its keys.
    pub fn verify_correctness(&self, k: usize) -> bool {
        let bu = self.b.select_cols(&self.unknown_columns(k));
        let joint = FMatrix::hstack(&[&self.a, &bu]).expect("same height and field");
        joint.rank() == self.message_len() + bu.rank()
    }

    /// `I(W; X, Z_e)` in symbols.
    pub fn verify_security(&self, e: usize) -> usize {
        self.leakage_with_unknown(&self.unknown_columns(e))
    }

    /// Leakage to an observer who knows every key column except `unknown`.
    pub fn leakage_with_unknown(&self, unknown: &[usize]) -> usize {
        let bu = self.b.select_cols(unknown);
        let joint = FMatrix::hstack(&[&bu, &self.a]).expect("same height and field");
        joint.rank() - bu.rank()
    }

    /// Algebraic verdicts for every receiver.
    pub fn verify(&self) -> VerifyReport {
        VerifyReport {
            correctness: self.qualified.iter().map(|k| (k, self.verify_correctness(k))).collect(),
            leakage: self
                .eavesdroppers()
                .iter()
                .map(|e| (e, self.verify_security(e)))
                .collect(),
            oracle: None,
        }
    }

    /// Algebraic verdicts plus an exhaustive enumeration check.
    pub fn verify_with_oracle(&self, cap: u64) -> Result<VerifyReport> {
        let mut report = self.verify();
        report.oracle = Some(oracle::oracle_verify_with_cap(self, cap)?);
        Ok(report)
    }

    /// A matrix `M` with `W = M·[X; S_known]`, where `S_known` lists the key
    /// symbols of receiver `k` in column order.
    pub fn decoder_for(&self, k: usize) -> Result<FMatrix> {
        let known = self.known_columns(k);
        let bu = self.b.select_cols(&self.unknown_columns(k));
        let bk = self.b.select_cols(&known);
        let lw = self.message_len();
        let lx = self.transmit_len();
        // find N with N·A = I and N·B_u = 0, then W = N·X - N·B_k·S_k
        let joint = FMatrix::hstack(&[&self.a, &bu])?;
        let target = FMatrix::hstack(&[
            &FMatrix::identity(self.field, lw),
            &FMatrix::zeros(self.field, lw, bu.cols()),
        ])?;
        let n = match joint.transpose().solve_right(&target.transpose()) {
            Ok(nt) => nt.transpose(),
            Err(Error::NoSolution) => return Err(Error::NotDecodable(k)),
            Err(e) => return Err(e),
        };
        debug_assert_eq!(n.rows(), lw);
        debug_assert_eq!(n.cols(), lx);
        let nbk = n.mul(&bk)?.neg();
        FMatrix::hstack(&[&n, &nbk])
    }

    /// `X` for the given message and key vector.
    pub fn encode(&self, w: &[FieldElem], s: &[FieldElem]) -> Vec<FieldElem> {
        let x1 = self.a.apply(w);
        let x2 = self.b.apply(s);
        x1.into_iter().zip(x2).map(|(a, b)| self.field.add(a, b)).collect()
    }

    /// Draws `W` and `S` from a seeded generator, encodes, and runs every
    /// qualified receiver's decoder.
    pub fn simulate(&self, seed: u64) -> Result<Transcript> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = self.field.p();
        let mut draw =
            |n: usize| -> Vec<FieldElem> { (0..n).map(|_| self.field.from_u64(rng.gen_range(0..p))).collect() };
        let w = draw(self.message_len());
        let s = draw(self.key_len());
        let x = self.encode(&w, &s);
        let mut decoded = Vec::new();
        for k in self.qualified.iter() {
            let m = self.decoder_for(k)?;
            let mut input = x.clone();
            input.extend(self.known_columns(k).into_iter().map(|c| s[c]));
            let got = m.apply(&input);
            if got != w {
                return Err(Error::DecodeFailure { receiver: k });
            }
            decoded.push((k, got));
        }
        Ok(Transcript { w, s, x, decoded })
    }

    /// Runs the schemes side by side: block-diagonal `A` and `B` over fresh keys.
    pub fn concat(schemes: &[LinearScheme]) -> Result<LinearScheme> {
        let Some(first) = schemes.first() else {
            return Ok(LinearScheme::empty(Field::gf2(), 0, ReceiverSet::EMPTY));
        };
        for s in &schemes[1..] {
            if s.field != first.field {
                return Err(Error::FieldMismatch(first.field.p(), s.field.p()));
            }
            if s.k != first.k || s.qualified != first.qualified {
                return Err(Error::ShapeMismatch(format!(
                    "receivers {} / qualified {} vs {} / {}",
                    first.k, first.qualified, s.k, s.qualified
                )));
            }
            if s.blocks != first.blocks {
                return Err(Error::ShapeMismatch(format!(
                    "{} key blocks vs {}",
                    first.blocks, s.blocks
                )));
            }
        }
        let a: Vec<&FMatrix> = schemes.iter().map(|s| &s.a).collect();
        let b: Vec<&FMatrix> = schemes.iter().map(|s| &s.b).collect();
        Ok(LinearScheme {
            field: first.field,
            blocks: first.blocks,
            k: first.k,
            qualified: first.qualified,
            layout: schemes.iter().flat_map(|s| s.layout.iter().copied()).collect(),
            a: FMatrix::block_diag(first.field, &a)?,
            b: FMatrix::block_diag(first.field, &b)?,
        })
    }

    /// Same scheme with one segment per subset, subsets in increasing
    /// bitmask order. Only reorders key columns.
    pub fn merge_segments(&self) -> LinearScheme {
        let mut by_subset: BTreeMap<ReceiverSet, Vec<usize>> = BTreeMap::new();
        let mut start = 0;
        for seg in &self.layout {
            by_subset
                .entry(seg.subset)
                .or_default()
                .extend(start..start + seg.width);
            start += seg.width;
        }
        let order: Vec<usize> = by_subset.values().flatten().copied().collect();
        LinearScheme {
            layout: by_subset
                .iter()
                .filter(|(_, c)| !c.is_empty())
                .map(|(&u, c)| KeySegment::new(u, c.len()))
                .collect(),
            b: self.b.select_cols(&order),
            ..self.clone()
        }
    }

    /// Key columns consumed per subset.
    pub fn key_usage(&self) -> BTreeMap<ReceiverSet, usize> {
        let mut usage = BTreeMap::new();
        for seg in &self.layout {
            *usage.entry(seg.subset).or_insert(0) += seg.width;
        }
        usage
    }

    /// Fails if some subset uses more key symbols than `L_U · L`.
    pub fn check_key_budget(&self, config: &KeyConfig) -> Result<()> {
        for (subset, used) in self.key_usage() {
            let available = config.size(subset) * self.blocks;
            if used as u64 > available {
                return Err(Error::KeyBudget {
                    subset,
                    used: used as u64,
                    available,
                });
            }
        }
        Ok(())
    }

    /// Renames receivers; `perm` maps old labels to new ones.
    pub fn relabel(&self, perm: &Permutation) -> LinearScheme {
        LinearScheme {
            qualified: perm.apply(self.qualified),
            layout: self
                .layout
                .iter()
                .map(|s| KeySegment::new(perm.apply(s.subset), s.width))
                .collect(),
            ..self.clone()
        }
    }

    /// `n` independent copies over `n` times as many key blocks.
    pub fn repeat(&self, n: u64) -> Result<LinearScheme> {
        if n == 0 {
            return Err(Error::InvalidConfig("cannot repeat a scheme zero times".into()));
        }
        let copies = vec![self.clone(); n as usize];
        let mut out = LinearScheme::concat(&copies)?;
        out.blocks = self.blocks * n;
        Ok(out)
    }

    /// Moves the scheme onto `blocks` key blocks without changing matrices.
    pub fn with_blocks(mut self, blocks: u64) -> Result<LinearScheme> {
        if blocks == 0 {
            return Err(Error::InvalidConfig("a scheme needs at least one key block".into()));
        }
        self.blocks = blocks;
        Ok(self)
    }
}

/// One seeded run of a scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub w: Vec<FieldElem>,
    pub s: Vec<FieldElem>,
    pub x: Vec<FieldElem>,
    pub decoded: Vec<(usize, Vec<FieldElem>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    /// Qualified receiver and whether it decodes.
    pub correctness: Vec<(usize, bool)>,
    /// Eavesdropper and its leakage in symbols.
    pub leakage: Vec<(usize, usize)>,
    pub oracle: Option<OracleReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.correctness.iter().all(|&(_, ok)| ok) && self.leakage.iter().all(|&(_, l)| l == 0)
    }

    pub fn oracle_used(&self) -> bool {
        self.oracle.is_some()
    }

    pub fn failing_receivers(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .correctness
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|&(k, _)| k)
            .chain(self.leakage.iter().filter(|(_, l)| *l > 0).map(|&(e, _)| e))
            .collect();
        out.sort_unstable();
        out
    }

    /// True when the oracle was run and matches every algebraic verdict.
    pub fn oracle_agrees(&self, field: Field) -> bool {
        let Some(o) = &self.oracle else {
            return false;
        };
        let bits = field.symbol_bits();
        let correct_ok = self
            .correctness
            .iter()
            .all(|&(k, ok)| o.decoding.iter().any(|d| d.receiver == k && d.decodes() == ok));
        let leak_ok = self.leakage.iter().all(|&(e, l)| {
            o.leakage_bits
                .iter()
                .any(|&(r, b)| r == e && (b - l as f64 * bits).abs() < oracle::TOLERANCE)
        });
        correct_ok && leak_ok
    }
}
