//! Brute-force verification by enumerating every message and key value.
//!
//! For a linear system `X = G·V` over a uniform state vector `V`, the oracle
//! walks all `p^n` states, records each requested view (some coordinates of
//! `V`, optionally with `X`), and computes entropies from the exact
//! multiplicities. Nothing here uses rank arguments, so agreement with the
//! algebraic verifier in [`crate::scheme`] is a genuine cross-check.

use crate::error::{Error, Result};
use crate::fmatrix::FMatrix;
use crate::gf::{Field, FieldElem};
use crate::scheme::LinearScheme;

/// Default cap on enumerated states.
pub const DEFAULT_CAP: u64 = 1 << 22;

/// Environment variable overriding [`DEFAULT_CAP`]; must be a power of two.
pub const CAP_ENV: &str = "SGC_ORACLE_CAP";

/// Tolerance when comparing entropies in bits.
/// Views of at most this many bits are counted in a direct histogram
/// instead of being sorted.
const HISTOGRAM_BITS: usize = 20;

pub const TOLERANCE: f64 = 1e-9;

/// The cap from `SGC_ORACLE_CAP`, or the default when unset or invalid.
pub fn cap_from_env() -> u64 {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|v| v.is_power_of_two())
        .unwrap_or(DEFAULT_CAP)
}

/// What the oracle observed for one qualified receiver.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleDecode {
    pub receiver: usize,
    /// `H(W | X, Z_k)` in bits.
    pub residual_bits: f64,
    /// Whether the algebraic decoder reproduced `W` on every state; `None`
    /// when no decoder exists.
    pub decoder_ok: Option<bool>,
}

impl OracleDecode {
    pub fn decodes(&self) -> bool {
        self.residual_bits.abs() < TOLERANCE && self.decoder_ok != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub states: u128,
    pub decoding: Vec<OracleDecode>,
    /// Eavesdropper and `I(W; X, Z_e)` in bits.
    pub leakage_bits: Vec<(usize, f64)>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.decoding.iter().all(OracleDecode::decodes) && self.leakage_bits.iter().all(|&(_, b)| b.abs() < TOLERANCE)
    }
}

/// A linear map `X = G·V` from a uniform state `V in GF(p)^n`.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    field: Field,
    g: FMatrix,
    states: u128,
}

impl LinearSystem {
    /// Refuses systems with more than `cap` states.
    pub fn new(g: FMatrix, cap: u64) -> Result<Self> {
        let field = g.field();
        let n = g.cols();
        let states = (field.p() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if states > cap as u128 {
            return Err(Error::TooLarge { states, cap });
        }
        Ok(LinearSystem { field, g, states })
    }

    pub fn states(&self) -> u128 {
        self.states
    }

    /// Calls `visit(state, x)` for every state in odometer order.
    pub fn for_each_state(&self, mut visit: impl FnMut(&[FieldElem], &[FieldElem])) {
        let n = self.g.cols();
        let m = self.g.rows();
        let p = self.field.p();
        let cols: Vec<Vec<FieldElem>> = (0..n).map(|j| (0..m).map(|i| self.g.get(i, j)).collect()).collect();
        let mut state = vec![FieldElem::ZERO; n];
        let mut x = vec![FieldElem::ZERO; m];
        loop {
            visit(&state, &x);
            // increment the odometer; adding column j once per step returns x
            // to its old value after p steps, so wrapping needs no correction
            let mut j = 0;
            loop {
                if j == n {
                    return;
                }
                for (xi, &c) in x.iter_mut().zip(&cols[j]) {
                    *xi = self.field.add(*xi, c);
                }
                let next = state[j].value() + 1;
                if next < p {
                    state[j] = self.field.from_u64(next);
                    break;
                }
                state[j] = FieldElem::ZERO;
                j += 1;
            }
        }
    }

    /// Entropy in bits of the view made of the listed state coordinates,
    /// plus `X` when `with_x` is set.
    pub fn entropy(&self, coords: &[usize], with_x: bool) -> f64 {
        let width = coords.len() + if with_x { self.g.rows() } else { 0 };
        if width == 0 {
            return 0.0;
        }
        let bits = symbol_width(self.field.p());
        let pack = |v: &[FieldElem], x: &[FieldElem]| -> u128 {
            let mut key = 0u128;
            for &c in coords {
                key = key << bits | v[c].value() as u128;
            }
            if with_x {
                for xi in x {
                    key = key << bits | xi.value() as u128;
                }
            }
            key
        };
        let total = width * bits;
        if total <= HISTOGRAM_BITS {
            let mut counts = vec![0u32; 1 << total];
            self.for_each_state(|v, x| counts[pack(v, x) as usize] += 1);
            entropy_of_counts(counts.into_iter().filter(|&c| c > 0).map(u64::from), self.states)
        } else if total <= 64 {
            let mut seen: Vec<u64> = Vec::with_capacity(self.states as usize);
            self.for_each_state(|v, x| seen.push(pack(v, x) as u64));
            seen.sort_unstable();
            entropy_of_sorted(&seen, self.states)
        } else if total <= 128 {
            let mut seen: Vec<u128> = Vec::with_capacity(self.states as usize);
            self.for_each_state(|v, x| seen.push(pack(v, x)));
            seen.sort_unstable();
            entropy_of_sorted(&seen, self.states)
        } else {
            let mut seen: Vec<Vec<u64>> = Vec::with_capacity(self.states as usize);
            self.for_each_state(|v, x| {
                let mut key: Vec<u64> = coords.iter().map(|&c| v[c].value()).collect();
                if with_x {
                    key.extend(x.iter().map(|xi| xi.value()));
                }
                seen.push(key);
            });
            seen.sort_unstable();
            entropy_of_sorted(&seen, self.states)
        }
    }

    /// `I(V_msg; view)` in bits, where the view is `coords` plus `X`.
    pub fn mutual_information(&self, msg: &[usize], coords: &[usize]) -> f64 {
        let h_msg = msg.len() as f64 * self.field.symbol_bits();
        let joint: Vec<usize> = msg.iter().chain(coords).copied().collect();
        let mi = h_msg + self.entropy(coords, true) - self.entropy(&joint, true);
        clean(mi)
    }

    /// `H(V_msg | view)` in bits, where the view is `coords` plus `X`.
    pub fn conditional_entropy(&self, msg: &[usize], coords: &[usize]) -> f64 {
        let joint: Vec<usize> = msg.iter().chain(coords).copied().collect();
        clean(self.entropy(&joint, true) - self.entropy(coords, true))
    }
}

fn symbol_width(p: u64) -> usize {
    (64 - (p - 1).leading_zeros()).max(1) as usize
}

fn clean(v: f64) -> f64 {
    if v.abs() < TOLERANCE {
        0.0
    } else {
        v
    }
}

/// `log2 N - (1/N) sum c log2 c` over the multiplicities `c`.
fn entropy_of_counts(counts: impl Iterator<Item = u64>, states: u128) -> f64 {
    let n = states as f64;
    let acc: f64 = counts.map(|c| c as f64 * (c as f64).log2()).sum();
    n.log2() - acc / n
}

fn entropy_of_sorted<T: PartialEq>(sorted: &[T], states: u128) -> f64 {
    let runs = sorted.chunk_by(|a, b| a == b).map(|run| run.len() as u64);
    entropy_of_counts(runs, states)
}

/// Exhaustive check of a scheme using the cap from the environment.
pub fn oracle_verify(scheme: &LinearScheme) -> Result<OracleReport> {
    oracle_verify_with_cap(scheme, cap_from_env())
}

/// Exhaustive check of every qualified receiver's decodability and every
/// eavesdropper's leakage.
pub fn oracle_verify_with_cap(scheme: &LinearScheme, cap: u64) -> Result<OracleReport> {
    let lw = scheme.message_len();
    let g = FMatrix::hstack(&[scheme.a(), scheme.b()])?;
    let sys = LinearSystem::new(g, cap)?;
    let msg: Vec<usize> = (0..lw).collect();
    let keys_of = |k: usize| -> Vec<usize> { scheme.known_columns(k).into_iter().map(|c| c + lw).collect() };

    let mut decoding = Vec::new();
    for k in scheme.qualified().iter() {
        let known = keys_of(k);
        let residual_bits = sys.conditional_entropy(&msg, &known);
        let decoder_ok = scheme.decoder_for(k).ok().map(|m| {
            let p = sys.field.p() as u128;
            let rows = m.to_rows();
            let mut ok = true;
            let mut input: Vec<u64> = Vec::with_capacity(m.cols());
            sys.for_each_state(|v, x| {
                if !ok {
                    return;
                }
                input.clear();
                input.extend(x.iter().map(|e| e.value()));
                input.extend(known.iter().map(|&c| v[c].value()));
                ok = rows.iter().zip(&v[..lw]).all(|(row, w)| {
                    let dot: u128 = row.iter().zip(&input).map(|(&a, &b)| a as u128 * b as u128).sum();
                    (dot % p) as u64 == w.value()
                });
            });
            ok
        });
        decoding.push(OracleDecode {
            receiver: k,
            residual_bits,
            decoder_ok,
        });
    }

    let leakage_bits = scheme
        .eavesdroppers()
        .iter()
        .map(|e| (e, sys.mutual_information(&msg, &keys_of(e))))
        .collect();

    Ok(OracleReport {
        states: sys.states(),
        decoding,
        leakage_bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keyspace::ReceiverSet;
    use crate::scheme::fixtures::otp;
    use crate::scheme::KeySegment;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_time_pad() {
        let s = otp(Field::gf2(), 2, &[1], &[1]);
        let r = oracle_verify_with_cap(&s, DEFAULT_CAP).unwrap();
        assert_eq!(r.states, 4);
        assert_eq!(r.leakage_bits, vec![(2, 0.0)]);
        assert!(r.passed());
    }

    #[test]
    fn no_key_leaks_everything() {
        let f = Field::new(3).unwrap();
        let s = LinearScheme::new(
            1,
            3,
            ReceiverSet::of(&[1]),
            vec![],
            FMatrix::identity(f, 2),
            FMatrix::zeros(f, 2, 0),
        )
        .unwrap();
        let r = oracle_verify_with_cap(&s, DEFAULT_CAP).unwrap();
        for (_, bits) in r.leakage_bits {
            assert!((bits - 2.0 * 3f64.log2()).abs() < 1e-12);
        }
        assert!(r.decoding[0].decodes());
    }

    #[test]
    fn cmp1_candidate() {
        // X = W + s123 + s124
        let f = Field::gf2();
        let s = LinearScheme::new(
            1,
            4,
            ReceiverSet::of(&[1, 2]),
            vec![
                KeySegment::new(ReceiverSet::of(&[1, 2, 3]), 1),
                KeySegment::new(ReceiverSet::of(&[1, 2, 4]), 1),
            ],
            FMatrix::identity(f, 1),
            FMatrix::from_rows(f, &[vec![1, 1]]).unwrap(),
        )
        .unwrap();
        let r = oracle_verify_with_cap(&s, DEFAULT_CAP).unwrap();
        assert_eq!(r.states, 8);
        assert!(r.passed());
        assert_eq!(r.leakage_bits.len(), 2);
    }

    #[test]
    fn undecodable_receiver_has_residual() {
        let s = otp(Field::gf2(), 3, &[1, 2], &[1]);
        let r = oracle_verify_with_cap(&s, DEFAULT_CAP).unwrap();
        let d2 = r.decoding.iter().find(|d| d.receiver == 2).unwrap();
        assert!((d2.residual_bits - 1.0).abs() < 1e-12);
        assert_eq!(d2.decoder_ok, None);
        assert!(!r.passed());
    }

    #[test]
    fn cap_is_enforced() {
        let f = Field::gf2();
        let g = FMatrix::zeros(f, 1, 23);
        assert_eq!(
            LinearSystem::new(g, DEFAULT_CAP).unwrap_err(),
            Error::TooLarge {
                states: 1 << 23,
                cap: DEFAULT_CAP
            }
        );
    }

    #[test]
    fn enumeration_matches_direct_product() {
        let f = Field::new(3).unwrap();
        let g = FMatrix::from_rows(f, &[vec![1, 2, 0], vec![2, 2, 1]]).unwrap();
        let sys = LinearSystem::new(g.clone(), 1 << 10).unwrap();
        let mut count = 0;
        sys.for_each_state(|v, x| {
            assert_eq!(g.apply(v), x);
            count += 1;
        });
        assert_eq!(count, 27);
    }

    #[test]
    fn wide_views_use_the_fallback_path() {
        // 130 binary rows do not fit in a u128 key
        let f = Field::gf2();
        let rows: Vec<Vec<i64>> = (0..130).map(|i| vec![(i % 2) as i64, (i % 3 == 0) as i64]).collect();
        let sys = LinearSystem::new(FMatrix::from_rows(f, &rows).unwrap(), 8).unwrap();
        assert!((sys.entropy(&[], true) - 2.0).abs() < 1e-12);
        assert!((sys.entropy(&[0], true) - 2.0).abs() < 1e-12);
        assert!((sys.entropy(&[0], false) - 1.0).abs() < 1e-12);
        assert_eq!(symbol_width(2), 1);
        assert_eq!(symbol_width(5), 3);
        assert_eq!(symbol_width(17), 5);
    }

    #[test]
    fn every_key_width_agrees_with_rank() {
        // 6, 30, 90 and 150 packed bits: histogram, u64, u128, vectors
        let f = Field::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for rows in [3, 15, 45, 75] {
            let g = FMatrix::random(f, rows, 5, &mut rng);
            let sys = LinearSystem::new(g.clone(), 1 << 10).unwrap();
            let expected = g.rank() as f64 * 3f64.log2();
            assert!((sys.entropy(&[], true) - expected).abs() < 1e-9, "{rows} rows");
        }
    }
}
