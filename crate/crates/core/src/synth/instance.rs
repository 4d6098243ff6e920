//! The 2-of-5 instance with keys `a = s_1`, `b = s_123`, `c = s_145`,
//! `d = s_24`, `e = s_25`, all of size `ℓ`, where the capacity `5ℓ/3` is
//! strictly below the conditional-entropy bound `2ℓ`.
//!
//! The base scheme runs over three key blocks and sends ten bits carrying
//! five message bits. Eavesdroppers 4 and 5 each see one message combination
//! twice, padded by the same `b` symbol both times (noise alignment), so the
//! repetition reveals nothing.

use super::{finish, Builder, Synthesis};
use crate::error::{Error, Result};
use crate::fmatrix::FMatrix;
use crate::gf::Field;
use crate::keyspace::{KeyConfig, ReceiverSet};
use crate::scheme::{KeySegment, LinearScheme};

/// Key blocks used by the base scheme.
pub const BASE_BLOCKS: u64 = 3;

// key column offsets in the base layout: a0..a2, b0..b2, c0..c1, d0..d2, e0..e2
const A: usize = 0;
const B: usize = 3;
const C: usize = 6;
const D: usize = 8;
const E: usize = 11;
const KEY_COLS: usize = 14;

/// `(message index, key columns)` per transmitted row.
const ROWS: [(usize, &[usize]); 10] = [
    // decoded by receiver 1 from a, b, c
    (1, &[A]),
    (2, &[A + 1]),
    (4, &[A + 2]),
    (0, &[B, C]),
    (3, &[B + 1, C + 1]),
    // decoded by receiver 2 from b, d, e
    (0, &[B, D]),
    (1, &[B + 2, D + 1]),
    (3, &[B + 1, E]),
    (4, &[B + 2, E + 1]),
    (2, &[D + 2, E + 2]),
];

/// The unit-key scheme over GF(2): `L_W = 5`, `L_X = 10`, `L = 3`.
pub fn instance_base() -> LinearScheme {
    let f = Field::gf2();
    let mut a = FMatrix::zeros(f, ROWS.len(), 5);
    let mut b = FMatrix::zeros(f, ROWS.len(), KEY_COLS);
    for (r, &(w, keys)) in ROWS.iter().enumerate() {
        a.set(r, w, f.elem(1));
        for &k in keys {
            b.set(r, k, f.elem(1));
        }
    }
    let seg = |v: &[usize], w| KeySegment::new(ReceiverSet::of(v), w);
    let layout = vec![
        seg(&[1], 3),
        seg(&[1, 2, 3], 3),
        seg(&[1, 4, 5], 2),
        seg(&[2, 4], 3),
        seg(&[2, 5], 3),
    ];
    LinearScheme::new(BASE_BLOCKS, 5, ReceiverSet::of(&[1, 2]), layout, a, b).expect("consistent base scheme")
}

/// `ℓ` independent copies of the base scheme over the same three blocks.
pub fn instance_2of5(key_size: u64) -> Result<Synthesis> {
    if key_size == 0 {
        return Err(Error::InvalidConfig("the 2-of-5 instance needs nonempty keys".into()));
    }
    let base = instance_base();
    let copies = vec![base; key_size as usize];
    let scheme = LinearScheme::concat(&copies)?;
    let config = KeyConfig::from_lists(
        5,
        &[1, 2],
        &[
            (&[1], key_size),
            (&[1, 2, 3], key_size),
            (&[1, 4, 5], key_size),
            (&[2, 4], key_size),
            (&[2, 5], key_size),
        ],
    )?;
    let mut out = Synthesis::new(scheme, Builder::Instance2of5, 0);
    out.notes.push(format!(
        "aligned base scheme over {BASE_BLOCKS} key blocks, repeated {key_size} times"
    ));
    finish(&config, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn base_shape_and_verdicts() {
        let s = instance_base();
        assert_eq!((s.message_len(), s.transmit_len(), s.key_len()), (5, 10, 14));
        assert_eq!(s.rate(), Ratio::new(5, 3));
        assert_eq!(s.bandwidth(), Ratio::new(10, 3));
        let r = s.verify();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn eavesdropper_views_are_aligned() {
        let s = instance_base();
        // receivers 4 and 5 see a residual noise matrix with a repeated row
        for e in [4, 5] {
            let bu = s.b().select_cols(&s.unknown_columns(e));
            assert_eq!(bu.rank(), 9, "eavesdropper {e}");
        }
        let bu3 = s.b().select_cols(&s.unknown_columns(3));
        assert_eq!(bu3.rank(), 10);
    }

    #[test]
    fn two_copies() {
        let out = instance_2of5(2).unwrap();
        assert_eq!(out.scheme.rate(), Ratio::new(10, 3));
        assert_eq!(out.scheme.blocks(), 3);
        assert!(instance_2of5(0).is_err());
    }
}
