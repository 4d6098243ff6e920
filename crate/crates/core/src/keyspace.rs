//! Combinatorial key configurations and the exact entropy calculus on them.
//!
//! Every nonempty receiver subset `U` may share an independent uniform key
//! `s_U` of `L_U` symbols; receiver `k` holds `z_k = (s_U : k in U)`. Because
//! the keys are independent, every entropy of a collection of `z`'s given a
//! sub-collection of keys is an integer sum of key sizes, reported here in
//! symbols (multiply by `log2 p` for bits).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};

/// Largest supported receiver count.
pub const MAX_RECEIVERS: usize = 20;

/// A set of receivers encoded as a bitmask; receiver `k` (1-based) is bit
/// `k - 1`.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReceiverSet(u32);

impl ReceiverSet {
    pub const EMPTY: ReceiverSet = ReceiverSet(0);

    pub fn from_bits(bits: u32) -> Self {
        ReceiverSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `{1, ..., k}`.
    pub fn full(k: usize) -> Self {
        debug_assert!(k <= MAX_RECEIVERS);
        ReceiverSet(((1u64 << k) - 1) as u32)
    }

    pub fn singleton(k: usize) -> Self {
        debug_assert!((1..=MAX_RECEIVERS).contains(&k));
        ReceiverSet(1 << (k - 1))
    }

    pub fn of(receivers: &[usize]) -> Self {
        receivers
            .iter()
            .map(|&k| Self::singleton(k))
            .fold(Self::EMPTY, Self::union)
    }

    pub fn contains(self, k: usize) -> bool {
        (1..=32).contains(&k) && self.0 >> (k - 1) & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        ReceiverSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ReceiverSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ReceiverSet(self.0 & !other.0)
    }

    pub fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn insert(&mut self, k: usize) {
        self.0 |= Self::singleton(k).0;
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |i| self.0 >> i & 1 == 1).map(|i| i + 1)
    }

    /// All subsets of `self` (including the empty set), in bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = ReceiverSet> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(ReceiverSet(cur))
        })
    }

    /// Subsets of `self` with exactly `size` members.
    pub fn subsets_of_size(self, size: usize) -> impl Iterator<Item = ReceiverSet> {
        self.subsets().filter(move |s| s.len() == size)
    }
}

impl fmt::Debug for ReceiverSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ReceiverSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|k| k.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl FromIterator<usize> for ReceiverSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().map(Self::singleton).fold(Self::EMPTY, Self::union)
    }
}

/// A sub-collection of key symbols: for each subset `U`, some index ranges
/// inside `[0, L_U)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyCollection {
    parts: BTreeMap<ReceiverSet, Vec<Range<u64>>>,
}

impl KeyCollection {
    pub fn new() -> Self {
        Self::default()
    }

    /// Whole keys `s_U` for every `U` in `subsets`.
    pub fn whole(config: &KeyConfig, subsets: impl IntoIterator<Item = ReceiverSet>) -> Self {
        let mut c = Self::new();
        for u in subsets {
            let size = config.size(u);
            if size > 0 {
                c.add(u, 0..size);
            }
        }
        c
    }

    /// All keys held by the receivers in `holders`, i.e. `z_A`.
    pub fn known_to(config: &KeyConfig, holders: ReceiverSet) -> Self {
        Self::whole(config, config.keys().map(|(u, _)| u).filter(|u| u.intersects(holders)))
    }

    pub fn add(&mut self, subset: ReceiverSet, range: Range<u64>) {
        if range.is_empty() {
            return;
        }
        let ranges = self.parts.entry(subset).or_default();
        ranges.push(range);
        ranges.sort_by_key(|r| r.start);
        let mut merged: Vec<Range<u64>> = Vec::with_capacity(ranges.len());
        for r in ranges.drain(..) {
            match merged.last_mut() {
                Some(last) if r.start <= last.end => last.end = last.end.max(r.end),
                _ => merged.push(r),
            }
        }
        *ranges = merged;
    }

    /// Number of symbols of `s_U` in the collection, clipped to `[0, size)`.
    pub fn symbols_of(&self, subset: ReceiverSet, size: u64) -> u64 {
        self.parts.get(&subset).map_or(0, |rs| {
            rs.iter()
                .map(|r| r.end.min(size).saturating_sub(r.start.min(size)))
                .sum()
        })
    }

    pub fn is_valid_for(&self, config: &KeyConfig) -> bool {
        self.parts
            .iter()
            .all(|(&u, rs)| rs.iter().all(|r| r.end <= config.size(u)))
    }

    pub fn subsets(&self) -> impl Iterator<Item = ReceiverSet> + '_ {
        self.parts.keys().copied()
    }
}

/// A combinatorial key configuration: receiver count, qualified set and the
/// size `L_U` of every nonempty subset key (absent means zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyConfig {
    k: usize,
    qualified: ReceiverSet,
    keys: BTreeMap<ReceiverSet, u64>,
}

impl KeyConfig {
    pub fn new(k: usize, qualified: ReceiverSet, keys: impl IntoIterator<Item = (ReceiverSet, u64)>) -> Result<Self> {
        if !(2..=MAX_RECEIVERS).contains(&k) {
            return Err(Error::InvalidConfig(format!(
                "receiver count {k} outside 2..={MAX_RECEIVERS}"
            )));
        }
        let all = ReceiverSet::full(k);
        if qualified.is_empty() || !qualified.is_subset(all) || qualified == all {
            return Err(Error::InvalidConfig(format!(
                "qualified set {qualified} must be a nonempty proper subset of {all}"
            )));
        }
        let mut map = BTreeMap::new();
        for (u, size) in keys {
            if u.is_empty() || !u.is_subset(all) {
                return Err(Error::InvalidConfig(format!("key subset {u} is not inside {all}")));
            }
            if map.insert(u, size).is_some() {
                return Err(Error::InvalidConfig(format!("key subset {u} listed twice")));
            }
        }
        map.retain(|_, s| *s > 0);
        Ok(KeyConfig {
            k,
            qualified,
            keys: map,
        })
    }

    /// Convenience constructor from receiver lists, e.g. `(&[1, 3, 4], 3)`.
    pub fn from_lists(k: usize, qualified: &[usize], keys: &[(&[usize], u64)]) -> Result<Self> {
        Self::new(
            k,
            ReceiverSet::of(qualified),
            keys.iter().map(|(u, s)| (ReceiverSet::of(u), *s)),
        )
    }

    pub fn receivers(&self) -> usize {
        self.k
    }

    pub fn all(&self) -> ReceiverSet {
        ReceiverSet::full(self.k)
    }

    pub fn qualified(&self) -> ReceiverSet {
        self.qualified
    }

    pub fn eavesdroppers(&self) -> ReceiverSet {
        self.all().difference(self.qualified)
    }

    pub fn size(&self, u: ReceiverSet) -> u64 {
        self.keys.get(&u).copied().unwrap_or(0)
    }

    /// Keys with nonzero size.
    pub fn keys(&self) -> impl Iterator<Item = (ReceiverSet, u64)> + '_ {
        self.keys.iter().map(|(&u, &s)| (u, s))
    }

    pub fn total_symbols(&self) -> u64 {
        self.keys.values().sum()
    }

    /// Same receivers and qualified set, with every key size multiplied.
    pub fn scaled(&self, factor: u64) -> KeyConfig {
        KeyConfig {
            keys: self
                .keys
                .iter()
                .map(|(&u, &s)| (u, s * factor))
                .filter(|&(_, s)| s > 0)
                .collect(),
            ..self.clone()
        }
    }

    /// `H(z_A | given)` in symbols.
    pub fn entropy_of(&self, receivers: ReceiverSet, given: &KeyCollection) -> u64 {
        self.keys()
            .filter(|(u, _)| u.intersects(receivers))
            .map(|(u, s)| s - given.symbols_of(u, s))
            .sum()
    }

    /// `I(z_A; z_B | given)` in symbols.
    pub fn mutual_info(&self, a: ReceiverSet, b: ReceiverSet, given: &KeyCollection) -> u64 {
        self.keys()
            .filter(|(u, _)| u.intersects(a) && u.intersects(b))
            .map(|(u, s)| s - given.symbols_of(u, s))
            .sum()
    }

    /// `H(z_q | z_e)`, the basic conditional entropy used by the converses.
    pub fn cond_entropy(&self, q: usize, e: usize) -> u64 {
        self.entropy_of(
            ReceiverSet::singleton(q),
            &KeyCollection::known_to(self, ReceiverSet::singleton(e)),
        )
    }

    /// Per-cardinality sizes `L^[1..=K]` when every subset of equal
    /// cardinality carries the same key size. Index 0 is unused.
    pub fn symmetric_profile(&self) -> Option<Vec<u64>> {
        let mut profile = vec![0u64; self.k + 1];
        for (u, slot) in profile.iter_mut().enumerate().skip(1) {
            let mut sizes = self.all().subsets_of_size(u).map(|s| self.size(s));
            let first = sizes.next().unwrap_or(0);
            if sizes.any(|s| s != first) {
                return None;
            }
            *slot = first;
        }
        Some(profile)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric_profile().is_some()
    }

    /// Applies a receiver relabelling to the qualified set and every key.
    pub fn relabel(&self, perm: &Permutation) -> KeyConfig {
        assert_eq!(perm.len(), self.k, "permutation size must match receiver count");
        KeyConfig {
            k: self.k,
            qualified: perm.apply(self.qualified),
            keys: self.keys().map(|(u, s)| (perm.apply(u), s)).collect(),
        }
    }

    /// Relabels receivers so that the configuration satisfies the ordering a
    /// builder assumes without loss of generality. Returns the relabelled
    /// configuration and the permutation that produced it (old -> new).
    pub fn normalize_labels(&self, setting: Setting) -> Result<(KeyConfig, Permutation)> {
        let perm = match setting {
            Setting::MulticastK4 => self.multicast_k4_order()?,
            Setting::Groupcast2of4 => self.groupcast_2of4_order()?,
        };
        Ok((self.relabel(&perm), perm))
    }

    fn multicast_k4_order(&self) -> Result<Permutation> {
        if self.k != 4 || self.eavesdroppers().len() != 1 {
            return Err(Error::WrongShape(format!(
                "multicast K=4 needs 4 receivers with one eavesdropper, got K={} with {} eavesdroppers",
                self.k,
                self.eavesdroppers().len()
            )));
        }
        let e = self.eavesdroppers().iter().next().expect("one eavesdropper");
        let q: Vec<usize> = self.qualified.iter().collect();
        let first = *q
            .iter()
            .min_by_key(|&&x| (self.cond_entropy(x, e), x))
            .expect("three qualified receivers");
        let mut rest: Vec<usize> = q.into_iter().filter(|&x| x != first).collect();
        rest.sort_by_key(|&x| (self.size(ReceiverSet::of(&[first, x])), x));
        let mut to = vec![0usize; 4];
        to[first - 1] = 1;
        to[rest[0] - 1] = 2;
        to[rest[1] - 1] = 3;
        to[e - 1] = 4;
        Permutation::new(to)
    }

    fn groupcast_2of4_order(&self) -> Result<Permutation> {
        if self.k != 4 || self.qualified.len() != 2 {
            return Err(Error::WrongShape(format!(
                "groupcast 2-of-4 needs K=4 with two qualified receivers, got K={} with {}",
                self.k,
                self.qualified.len()
            )));
        }
        let mut q: Vec<usize> = self.qualified.iter().collect();
        let mut e: Vec<usize> = self.eavesdroppers().iter().collect();
        if self.size(ReceiverSet::singleton(q[0])) > self.size(ReceiverSet::singleton(q[1])) {
            q.swap(0, 1);
        }
        let with_e = |x: usize| self.size(ReceiverSet::of(&[q[0], q[1], x]));
        // the key shared with the receiver labelled 4 must not exceed the one labelled 3
        if with_e(e[1]) > with_e(e[0]) {
            e.swap(0, 1);
        }
        let mut to = vec![0usize; 4];
        to[q[0] - 1] = 1;
        to[q[1] - 1] = 2;
        to[e[0] - 1] = 3;
        to[e[1] - 1] = 4;
        Permutation::new(to)
    }
}

/// Settings with a canonical labelling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Setting {
    /// K = 4, qualified {1,2,3}: `H(z1|z4)` minimal among the qualified and
    /// `L_12 <= L_13`.
    MulticastK4,
    /// K = 4, qualified {1,2}: `L_1 <= L_2` and `L_124 <= L_123`.
    Groupcast2of4,
}

/// A receiver relabelling, stored as `old -> new` (both 1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    to: Vec<usize>,
}

impl Permutation {
    pub fn new(to: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; to.len()];
        for &t in &to {
            if t == 0 || t > to.len() || seen[t - 1] {
                return Err(Error::InvalidConfig(format!("{to:?} is not a permutation")));
            }
            seen[t - 1] = true;
        }
        Ok(Permutation { to })
    }

    pub fn identity(k: usize) -> Self {
        Permutation { to: (1..=k).collect() }
    }

    pub fn len(&self) -> usize {
        self.to.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.to.iter().enumerate().all(|(i, &t)| t == i + 1)
    }

    /// New label of receiver `k`.
    pub fn map(&self, k: usize) -> usize {
        self.to[k - 1]
    }

    pub fn apply(&self, set: ReceiverSet) -> ReceiverSet {
        set.iter().map(|k| self.map(k)).collect()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.to.len()];
        for (i, &t) in self.to.iter().enumerate() {
            inv[t - 1] = i + 1;
        }
        Permutation { to: inv }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.to
    }
}
