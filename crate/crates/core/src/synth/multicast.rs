//! One eavesdropper: pad generic combinations of the message with every key
//! the eavesdropper lacks.
//!
//! For each such key `s_U` the transmitter sends `V_U·W + s_U`. Security is
//! automatic because the eavesdropper knows none of the pads; receiver `q`
//! collects `H(z_q | z_e)` clean combinations, enough to decode when the
//! stacked `V` is MDS.

use super::{empty_for, finish, prune, search_field, Builder, SynthOptions, Synthesis};
use crate::bounds::rate_converse;
use crate::error::{Error, Result};
use crate::fmatrix::FMatrix;
use crate::keyspace::{KeyConfig, ReceiverSet, Setting};
use crate::scheme::{KeySegment, LinearScheme};

/// `(subset, rows)` per transmit block; each block pads with the first
/// `rows` symbols of that subset's key.
type Blocks = Vec<(ReceiverSet, usize)>;

fn check_shape(config: &KeyConfig) -> Result<()> {
    if config.eavesdroppers().len() != 1 {
        return Err(Error::WrongShape(format!(
            "multicast needs exactly one eavesdropper, got {}",
            config.eavesdroppers()
        )));
    }
    Ok(())
}

/// The generic construction: every useful key is used in full.
pub fn multicast(config: &KeyConfig, opts: &SynthOptions) -> Result<Synthesis> {
    check_shape(config)?;
    let blocks: Blocks = prune(config).keys().map(|(u, s)| (u, s as usize)).collect();
    build(config, blocks, Builder::Multicast, opts)
}

/// The bandwidth-optimal construction for four receivers, which truncates
/// the keys `s_2`, `s_3` and `s_23` according to the key sizes.
pub fn multicast_k4_bw(config: &KeyConfig, opts: &SynthOptions) -> Result<Synthesis> {
    check_shape(config)?;
    let (norm, perm) = config.normalize_labels(Setting::MulticastK4)?;
    let l = |v: &[usize]| norm.size(ReceiverSet::of(v)) as usize;
    let (l1, l12, l13, l23, l123) = (l(&[1]), l(&[1, 2]), l(&[1, 3]), l(&[2, 3]), l(&[1, 2, 3]));
    let set = ReceiverSet::of;

    let (case, x2, x3, x23) = if l23 >= l1 + l13 {
        (1, 0, 0, l1 + l13)
    } else if l23 >= l1 + l12 {
        (2, l1 + l13 - l23, 0, l23)
    } else {
        (3, l1 + l13 - l23, l1 + l12 - l23, l23)
    };
    let blocks: Blocks = vec![
        (set(&[1]), l1),
        (set(&[2]), x2),
        (set(&[3]), x3),
        (set(&[1, 2]), l12),
        (set(&[1, 3]), l13),
        (set(&[2, 3]), x23),
        (set(&[1, 2, 3]), l123),
    ];
    let mut out = build(&norm, blocks, Builder::MulticastK4, opts)?;
    out.scheme = out.scheme.relabel(&perm.inverse());
    out.notes
        .insert(0, format!("case {case} of the four-receiver construction"));
    if !perm.is_identity() {
        out.notes
            .push(format!("built under relabelling {:?} (old -> new)", perm.as_slice()));
    }
    finish(config, out)
}

fn build(config: &KeyConfig, blocks: Blocks, builder: Builder, opts: &SynthOptions) -> Result<Synthesis> {
    let lw = rate_converse(config) as usize;
    let blocks: Blocks = blocks.into_iter().filter(|&(_, w)| w > 0).collect();
    let lx: usize = blocks.iter().map(|&(_, w)| w).sum();
    if lw == 0 {
        return finish(config, Synthesis::new(empty_for(config), builder, opts.seed));
    }
    let layout: Vec<KeySegment> = blocks.iter().map(|&(u, w)| KeySegment::new(u, w)).collect();
    let found = search_field(lx + lw, opts, |src| {
        let v = src.draw(lx, lw)?;
        LinearScheme::new(
            1,
            config.receivers(),
            config.qualified(),
            layout.clone(),
            v,
            FMatrix::identity(src.field(), lx),
        )
    })?;
    let mut out = Synthesis::new(found.scheme, builder, opts.seed);
    out.escalations = found.escalations;
    out.notes.push(found.note);
    finish(config, out)
}
