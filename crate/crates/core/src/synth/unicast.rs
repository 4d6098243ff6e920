//! One qualified receiver: mix the message with a generic combination of
//! every key symbol that receiver holds.
//!
//! `X = W + V·S` where `S` stacks the receiver's keys. Eavesdropper `e`
//! cannot remove the columns of `V` it does not know; as long as those
//! columns have full row rank the message stays hidden, which needs
//! `L_W <= H(z_q | z_e)` for every `e`.

use super::{empty_for, finish, key_subsets, prune, search_field, Builder, FieldPolicy, SynthOptions, Synthesis};
use crate::bounds::rate_converse;
use crate::error::{Error, Result};
use crate::fmatrix::FMatrix;
use crate::keyspace::KeyConfig;
use crate::scheme::{KeySegment, LinearScheme};

pub fn unicast(config: &KeyConfig, opts: &SynthOptions) -> Result<Synthesis> {
    if config.qualified().len() != 1 {
        return Err(Error::WrongShape(format!(
            "unicast needs one qualified receiver, got {}",
            config.qualified()
        )));
    }
    let useful = prune(config);
    let lw = rate_converse(config) as usize;
    if lw == 0 {
        return finish(config, Synthesis::new(empty_for(config), Builder::Unicast, opts.seed));
    }
    let keys = key_subsets(&useful);
    let d: usize = keys.iter().map(|&(_, s)| s as usize).sum();
    let layout: Vec<KeySegment> = keys.iter().map(|&(u, s)| KeySegment::new(u, s as usize)).collect();

    let found = search_field(lw + d, opts, |src| {
        let v = src.draw(lw, d)?;
        LinearScheme::new(
            1,
            config.receivers(),
            config.qualified(),
            layout.clone(),
            FMatrix::identity(src.field(), lw),
            v,
        )
    })?;
    let mut out = Synthesis::new(found.scheme, Builder::Unicast, opts.seed);
    out.escalations = found.escalations;
    out.notes.push(found.note);
    finish(config, out)
}

/// The unicast construction with Cauchy coefficients over the least prime
/// `p >= L_W + D`, skipping the small-field search.
pub fn unicast_cauchy(config: &KeyConfig, seed: u64) -> Result<Synthesis> {
    unicast(
        config,
        &SynthOptions {
            seed,
            policy: FieldPolicy::Cauchy,
        },
    )
}
