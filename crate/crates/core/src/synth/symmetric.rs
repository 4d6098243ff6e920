//! Symmetric key sizes: `L_U` depends only on `|U|`.
//!
//! Keys of different cardinalities are coded separately. Among the `u`-keys,
//! those meeting the qualified set in exactly the set `I` (with `|I| = i`)
//! form one block. In that block every eavesdropper misses exactly
//! `C(K-N-1, u-i)` of the keys, so the block may carry that many padded
//! combinations of a group message `W^{[u,i]}`. A qualified receiver sits in
//! `C(N-1, i-1)` blocks of the group, which fixes the group message size.

use std::fmt;

use super::{empty_for, finish, search_field, Builder, SynthOptions, Synthesis};
use crate::bounds::binomial;
use crate::error::{Error, Result};
use crate::fmatrix::FMatrix;
use crate::keyspace::{KeyConfig, ReceiverSet};
use crate::scheme::{KeySegment, LinearScheme};

/// Rate and bandwidth contributed by the `(u, i)` group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupContribution {
    pub u: usize,
    pub i: usize,
    pub rate: u64,
    pub bandwidth: u64,
}

impl fmt::Display for GroupContribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "u={} i={}: rate {} bandwidth {}",
            self.u, self.i, self.rate, self.bandwidth
        )
    }
}

struct Group {
    u: usize,
    i: usize,
    /// Rows per block.
    r: usize,
    /// Message symbols of the group.
    m: usize,
    /// Qualified subsets `I`, and for each the keys of its block.
    blocks: Vec<Vec<ReceiverSet>>,
    key_size: usize,
}

fn plan(config: &KeyConfig, profile: &[u64]) -> Vec<Group> {
    let k = config.receivers() as i64;
    let q = config.qualified();
    let n = q.len() as i64;
    let eves = config.eavesdroppers();
    let mut groups = Vec::new();
    for (u, &lu) in profile.iter().enumerate().skip(1) {
        if lu == 0 {
            continue;
        }
        // larger intersections first, matching the usual presentation
        for i in (1..=u.min(n as usize)).rev() {
            let r = binomial(k - n - 1, (u - i) as i64) * lu;
            if r == 0 {
                continue;
            }
            let m = binomial(n - 1, i as i64 - 1) * r;
            let blocks = q
                .subsets_of_size(i)
                .map(|set| eves.subsets_of_size(u - i).map(|e| set.union(e)).collect())
                .collect();
            groups.push(Group {
                u,
                i,
                r: r as usize,
                m: m as usize,
                blocks,
                key_size: lu as usize,
            });
        }
    }
    groups
}

pub fn symmetric(config: &KeyConfig, opts: &SynthOptions) -> Result<Synthesis> {
    let profile = config.symmetric_profile().ok_or(Error::NotSymmetric)?;
    let groups = plan(config, &profile);
    let contributions: Vec<GroupContribution> = groups
        .iter()
        .map(|g| GroupContribution {
            u: g.u,
            i: g.i,
            rate: g.m as u64,
            bandwidth: (g.blocks.len() * g.r) as u64,
        })
        .collect();
    if groups.is_empty() {
        let mut out = Synthesis::new(empty_for(config), Builder::Symmetric, opts.seed);
        out.groups = contributions;
        return finish(config, out);
    }
    let points = groups
        .iter()
        .map(|g| (g.blocks.len() * g.r + g.m).max(g.r + g.blocks[0].len() * g.key_size))
        .max()
        .unwrap_or(0);

    let found = search_field(points, opts, |src| {
        let f = src.field();
        let mut parts = Vec::with_capacity(groups.len());
        for g in &groups {
            let vw = src.draw(g.blocks.len() * g.r, g.m)?;
            let mut b_blocks = Vec::with_capacity(g.blocks.len());
            let mut layout = Vec::new();
            for keys in &g.blocks {
                b_blocks.push(src.draw(g.r, keys.len() * g.key_size)?);
                layout.extend(keys.iter().map(|&u| KeySegment::new(u, g.key_size)));
            }
            let refs: Vec<&FMatrix> = b_blocks.iter().collect();
            parts.push(LinearScheme::new(
                1,
                config.receivers(),
                config.qualified(),
                layout,
                vw,
                FMatrix::block_diag(f, &refs)?,
            )?);
        }
        LinearScheme::concat(&parts)
    })?;
    let mut out = Synthesis::new(found.scheme, Builder::Symmetric, opts.seed);
    out.escalations = found.escalations;
    out.notes.push(found.note);
    out.notes.extend(contributions.iter().map(|c| c.to_string()));
    out.groups = contributions;
    finish(config, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::symmetric_values;
    use crate::keyspace::fixtures::{example3, example4};

    fn sym(k: usize, n: usize, profile: &[u64]) -> KeyConfig {
        let all = ReceiverSet::full(k);
        let q: ReceiverSet = (1..=n).collect();
        KeyConfig::new(
            k,
            q,
            all.subsets().filter(|u| !u.is_empty()).map(|u| (u, profile[u.len()])),
        )
        .unwrap()
    }

    #[test]
    fn example4_groups() {
        let out = symmetric(&example4(), &SynthOptions::seeded(0)).unwrap();
        let rates: Vec<u64> = out.groups.iter().map(|g| g.rate).collect();
        let bws: Vec<u64> = out.groups.iter().map(|g| g.bandwidth).collect();
        assert_eq!(rates, vec![1, 4, 1]);
        assert_eq!(bws, vec![1, 6, 3]);
        assert_eq!((out.scheme.message_len(), out.scheme.transmit_len()), (6, 10));
    }

    #[test]
    fn two_seeds_both_verify() {
        let a = symmetric(&example4(), &SynthOptions::seeded(1)).unwrap();
        let b = symmetric(&example4(), &SynthOptions::seeded(2)).unwrap();
        assert!(a.scheme.verify().passed() && b.scheme.verify().passed());
    }

    #[test]
    fn pure_one_time_pad_group() {
        // only the 2-key {1,2} lies inside the qualified set
        let c = sym(4, 2, &[0, 0, 1, 0, 0]);
        let out = symmetric(&c, &SynthOptions::seeded(0)).unwrap();
        assert_eq!(
            out.groups[0],
            GroupContribution {
                u: 2,
                i: 2,
                rate: 1,
                bandwidth: 1
            }
        );
    }

    #[test]
    fn empty_profile() {
        let c = KeyConfig::from_lists(5, &[1, 2], &[]).unwrap();
        let out = symmetric(&c, &SynthOptions::default()).unwrap();
        assert_eq!(out.scheme.transmit_len(), 0);
        assert!(out.groups.is_empty());
    }

    #[test]
    fn not_symmetric() {
        assert_eq!(
            symmetric(&example3(), &SynthOptions::default()),
            Err(Error::NotSymmetric)
        );
    }

    #[test]
    fn meets_formulas_on_small_profiles() {
        for k in 3..=5 {
            for n in 1..k {
                for seed in 0..4u64 {
                    let profile: Vec<u64> = (0..=k).map(|u| (seed >> (u % 3) & 1) + (u as u64 % 2)).collect();
                    let c = sym(k, n, &profile);
                    let out = symmetric(&c, &SynthOptions::seeded(seed)).unwrap();
                    let (rate, bw) = symmetric_values(k, n, &profile);
                    assert_eq!(out.scheme.message_len() as u64, rate, "K={k} N={n} {profile:?}");
                    assert_eq!(out.scheme.transmit_len() as u64, bw, "K={k} N={n} {profile:?}");
                }
            }
        }
    }
}
