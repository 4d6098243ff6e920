//! Converse bounds and exact capacity values.
//!
//! All quantities are in symbols per key block. Capacities can be
//! fractional (the 2-of-5 alignment instance has `C = 5ℓ/3`), so they are
//! reported as exact rationals.

use std::fmt;

use num_rational::Ratio;

use crate::keyspace::{KeyCollection, KeyConfig, Permutation, ReceiverSet, Setting};

/// Largest number of `u_e` sub-collections enumerated per eavesdropper.
pub const SUBCOLLECTION_CAP: usize = 1 << 16;

pub type Symbols = Ratio<i64>;

/// `n choose k`, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> u64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// The rate converse: `min H(z_q | z_e)` over qualified `q` and
/// eavesdropping `e`.
pub fn rate_converse(config: &KeyConfig) -> u64 {
    let mut best = u64::MAX;
    for q in config.qualified().iter() {
        for e in config.eavesdroppers().iter() {
            best = best.min(config.cond_entropy(q, e));
        }
    }
    best
}

/// Which choice attains a bandwidth converse value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BwWitness {
    pub eavesdropper: usize,
    pub group: ReceiverSet,
    /// Whole keys of the eavesdropper that are conditioned on.
    pub given: Vec<ReceiverSet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BwBound {
    pub value: Symbols,
    /// Set when some eavesdropper holds too many keys for a full search of
    /// sub-collections; the value is then still a valid lower bound.
    pub heuristic: bool,
    pub witness: Option<BwWitness>,
}

/// The bandwidth converse at rate `rate`:
///
/// `max |Q|·R - (sum_q H(z_q | u_e) - H(z_Q | u_e))`
///
/// over eavesdroppers `e`, nonempty qualified groups `Q` and sub-collections
/// `u_e` of whole keys held by `e`.
pub fn bw_converse(config: &KeyConfig, rate: Symbols) -> BwBound {
    let mut best = BwBound {
        value: Ratio::from_integer(0),
        heuristic: false,
        witness: None,
    };
    if rate <= Ratio::from_integer(0) {
        return best;
    }
    let groups: Vec<ReceiverSet> = config.qualified().subsets().filter(|g| !g.is_empty()).collect();
    for e in config.eavesdroppers().iter() {
        let held: Vec<ReceiverSet> = config.keys().map(|(u, _)| u).filter(|u| u.contains(e)).collect();
        let choices: Vec<Vec<ReceiverSet>> = if held.len() < 64 && 1usize << held.len() <= SUBCOLLECTION_CAP {
            (0u64..1 << held.len())
                .map(|mask| {
                    held.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &u)| u)
                        .collect()
                })
                .collect()
        } else {
            best.heuristic = true;
            let mut c = vec![Vec::new(), held.clone()];
            c.extend(held.iter().map(|&u| vec![u]));
            c
        };
        for given in choices {
            let u = KeyCollection::whole(config, given.iter().copied());
            for &group in &groups {
                let sum: u64 = group
                    .iter()
                    .map(|q| config.entropy_of(ReceiverSet::singleton(q), &u))
                    .sum();
                let joint = config.entropy_of(group, &u);
                let value = rate * group.len() as i64 - Ratio::from_integer((sum - joint) as i64);
                if best.witness.is_none() || value > best.value {
                    best.value = value;
                    best.witness = Some(BwWitness {
                        eavesdropper: e,
                        group,
                        given: given.clone(),
                    });
                }
            }
        }
    }
    if best.value < Ratio::from_integer(0) {
        best.value = Ratio::from_integer(0);
    }
    best
}

/// Settings with a known capacity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolvedSetting {
    Unicast,
    Multicast,
    Groupcast2of4,
    Symmetric,
    Instance2of5,
}

impl fmt::Display for SolvedSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolvedSetting::Unicast => "unicast",
            SolvedSetting::Multicast => "multicast",
            SolvedSetting::Groupcast2of4 => "groupcast_2of4",
            SolvedSetting::Symmetric => "symmetric",
            SolvedSetting::Instance2of5 => "instance_2of5",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exact {
    pub setting: SolvedSetting,
    pub c: Symbols,
    /// `None` when the minimum bandwidth is not characterized.
    pub beta_star: Option<Symbols>,
}

/// Exact capacity and, where known, minimum bandwidth.
pub fn exact_capacity(config: &KeyConfig) -> Option<Exact> {
    let k = config.receivers();
    let n = config.qualified().len();
    let int = |v: u64| Ratio::from_integer(v as i64);
    if n == 1 {
        let c = int(rate_converse(config));
        return Some(Exact {
            setting: SolvedSetting::Unicast,
            c,
            beta_star: Some(c),
        });
    }
    if n == k - 1 {
        return Some(Exact {
            setting: SolvedSetting::Multicast,
            c: int(rate_converse(config)),
            beta_star: multicast_beta_star(config).map(int),
        });
    }
    if n == 2 && k == 4 {
        let c = rate_converse(config);
        let q = config.qualified();
        let with = |x: usize| config.size(q.union(ReceiverSet::singleton(x)));
        let eves: Vec<usize> = config.eavesdroppers().iter().collect();
        let beta = 2 * c - config.size(q) - with(eves[0]).min(with(eves[1]));
        return Some(Exact {
            setting: SolvedSetting::Groupcast2of4,
            c: int(c),
            beta_star: Some(int(beta)),
        });
    }
    if let Some(profile) = config.symmetric_profile() {
        let (c, beta) = symmetric_values(k, n, &profile);
        return Some(Exact {
            setting: SolvedSetting::Symmetric,
            c: int(c),
            beta_star: Some(int(beta)),
        });
    }
    if let Some((l, _)) = two_of_five_topology(config) {
        return Some(Exact {
            setting: SolvedSetting::Instance2of5,
            c: Ratio::new(5 * l as i64, 3),
            beta_star: Some(Ratio::new(10 * l as i64, 3)),
        });
    }
    None
}

/// `(C, β*)` of the symmetric setting for the profile `L^[u]`.
pub fn symmetric_values(k: usize, n: usize, profile: &[u64]) -> (u64, u64) {
    let (k, n) = (k as i64, n as i64);
    let mut c = 0;
    let mut beta = 0;
    for (u, &l) in profile.iter().enumerate().skip(1) {
        let u = u as i64;
        c += binomial(k - 2, u - 1) * l;
        beta += (binomial(k - 1, u) - binomial(k - n - 1, u)) * l;
    }
    (c, beta)
}

fn multicast_beta_star(config: &KeyConfig) -> Option<u64> {
    let e = config.eavesdroppers().iter().next()?;
    let h: Vec<u64> = config.qualified().iter().map(|q| config.cond_entropy(q, e)).collect();
    if h.iter().all(|&x| x == h[0]) {
        return Some(config.keys().filter(|(u, _)| !u.contains(e)).map(|(_, s)| s).sum());
    }
    if config.receivers() != 4 {
        return None;
    }
    let (c, _) = config.normalize_labels(Setting::MulticastK4).ok()?;
    let l = |v: &[usize]| c.size(ReceiverSet::of(v)) as i64;
    let (l1, l12, l13, l23, l123) = (l(&[1]), l(&[1, 2]), l(&[1, 3]), l(&[2, 3]), l(&[1, 2, 3]));
    let a = 2 * l1 + l12 + 2 * l13;
    let b = 3 * l1 + 2 * l12 + 2 * l13 - l23;
    Some((l123 + a.max(b)) as u64)
}

/// The five key subsets of the 2-of-5 alignment instance.
pub const TWO_OF_FIVE_KEYS: [&[usize]; 5] = [&[1], &[1, 2, 3], &[1, 4, 5], &[2, 4], &[2, 5]];

/// Recognizes the 2-of-5 alignment instance up to a relabelling that maps
/// the qualified pair onto `{1, 2}`. Returns the common key size and the
/// relabelling (old -> new).
pub fn two_of_five_topology(config: &KeyConfig) -> Option<(u64, Permutation)> {
    if config.receivers() != 5 || config.qualified().len() != 2 {
        return None;
    }
    let keys: Vec<(ReceiverSet, u64)> = config.keys().collect();
    if keys.len() != 5 {
        return None;
    }
    let l = keys[0].1;
    if keys.iter().any(|&(_, s)| s != l) {
        return None;
    }
    let mut target: Vec<ReceiverSet> = TWO_OF_FIVE_KEYS.iter().map(|v| ReceiverSet::of(v)).collect();
    target.sort();
    let q: Vec<usize> = config.qualified().iter().collect();
    let e: Vec<usize> = config.eavesdroppers().iter().collect();
    for qp in permutations(&[1, 2]) {
        for ep in permutations(&[3, 4, 5]) {
            let mut to = vec![0; 5];
            for (i, &old) in q.iter().enumerate() {
                to[old - 1] = qp[i];
            }
            for (i, &old) in e.iter().enumerate() {
                to[old - 1] = ep[i];
            }
            let perm = Permutation::new(to).expect("built from disjoint label lists");
            let mut mapped: Vec<ReceiverSet> = keys.iter().map(|&(u, _)| perm.apply(u)).collect();
            mapped.sort();
            if mapped == target {
                return Some((l, perm));
            }
        }
    }
    None
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Comparison between the rate converse and the exact capacity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorityCheck {
    pub rate_upper: u64,
    pub capacity: Option<Symbols>,
    /// The converse is strictly above the capacity.
    pub gap: bool,
}

impl fmt::Display for PriorityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.capacity {
            Some(c) if self.gap => write!(
                f,
                "conditional-entropy bound {} is not tight: capacity is {}",
                self.rate_upper, c
            ),
            Some(c) => write!(f, "conditional-entropy bound {} equals capacity {}", self.rate_upper, c),
            None => write!(f, "capacity unknown; conditional-entropy bound is {}", self.rate_upper),
        }
    }
}

pub fn priority_check(config: &KeyConfig) -> PriorityCheck {
    let rate_upper = rate_converse(config);
    let capacity = exact_capacity(config).map(|e| e.c);
    PriorityCheck {
        rate_upper,
        capacity,
        gap: capacity.is_some_and(|c| c < Ratio::from_integer(rate_upper as i64)),
    }
}

/// Everything the bounds module knows about a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    pub rate_upper: u64,
    /// Rate at which the bandwidth converse was evaluated: the capacity when
    /// known, otherwise the rate converse.
    pub rate_for_bw: Symbols,
    pub bw_lower: BwBound,
    pub exact: Option<Exact>,
    pub gap: bool,
}

pub fn report(config: &KeyConfig) -> BoundsReport {
    let rate_upper = rate_converse(config);
    let exact = exact_capacity(config);
    let rate_for_bw = exact.as_ref().map_or(Ratio::from_integer(rate_upper as i64), |e| e.c);
    BoundsReport {
        rate_upper,
        rate_for_bw,
        bw_lower: bw_converse(config, rate_for_bw),
        gap: exact
            .as_ref()
            .is_some_and(|e| e.c < Ratio::from_integer(rate_upper as i64)),
        exact,
    }
}
