//! Worked instances, run end to end: bounds, synthesis, verification and a
//! seeded simulation.

use std::fmt::Write;

use clap::ValueEnum;
use sgc_core::bounds;
use sgc_core::keyspace::{KeyConfig, ReceiverSet};
use sgc_core::oracle::{cap_from_env, oracle_verify_with_cap};
use sgc_core::synth::multimessage::{min_bandwidth, multimessage, region_check, KeySizes, RateTuple};
use sgc_core::synth::{self, Synthesis};
use sgc_core::Error;

use crate::report::fraction;
use crate::{CliError, Exit};

/// Seed used by every demo so output is reproducible.
pub const DEMO_SEED: u64 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    /// Unicast to receiver 1 of 4.
    Ex1,
    /// Multicast to receivers 1, 2, 3 of 4.
    Ex2,
    /// Receivers 1 and 2 of 4.
    Ex3,
    /// Three of six receivers with one symbol per 3-key.
    Ex4,
    /// Receivers 1 and 2 of 5, where the capacity is below the simple bound.
    Fig4,
    /// Three messages over three receivers: corner points of the region.
    Region,
}

/// The key configuration behind a demo; `None` for `region`.
pub fn config(demo: Demo) -> Option<KeyConfig> {
    let cfg = match demo {
        Demo::Ex1 => KeyConfig::from_lists(4, &[1], &[(&[1, 2], 4), (&[1, 3], 2), (&[1, 4], 1), (&[1, 3, 4], 3)]),
        Demo::Ex2 => KeyConfig::from_lists(4, &[1, 2, 3], &[(&[1], 1), (&[1, 3], 2), (&[2, 3], 3)]),
        Demo::Ex3 => KeyConfig::from_lists(
            4,
            &[1, 2],
            &[
                (&[1], 1),
                (&[2], 2),
                (&[1, 3], 2),
                (&[1, 4], 3),
                (&[2, 3], 1),
                (&[2, 4], 2),
                (&[1, 2, 3], 2),
                (&[1, 2, 4], 1),
            ],
        ),
        Demo::Ex4 => {
            let q = ReceiverSet::of(&[1, 2, 3]);
            KeyConfig::new(6, q, ReceiverSet::full(6).subsets_of_size(3).map(|u| (u, 1)))
        }
        Demo::Fig4 => KeyConfig::from_lists(
            5,
            &[1, 2],
            &[(&[1], 1), (&[1, 2, 3], 1), (&[1, 4, 5], 1), (&[2, 4], 1), (&[2, 5], 1)],
        ),
        Demo::Region => return None,
    };
    Some(cfg.expect("demo configurations are valid"))
}

pub fn run(demo: Demo) -> Result<String, CliError> {
    match config(demo) {
        Some(cfg) => instance(demo, &cfg),
        None => region(),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn keys_line(cfg: &KeyConfig) -> String {
    cfg.keys()
        .map(|(u, s)| format!("{u}:{s}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn internal(e: Error) -> CliError {
    CliError::new(Exit::Internal, e.to_string())
}

fn instance(demo: Demo, cfg: &KeyConfig) -> Result<String, CliError> {
    let b = bounds::report(cfg);
    let out: Synthesis = synth::synthesize(cfg, DEMO_SEED).map_err(internal)?;
    let s = &out.scheme;
    let v = s.verify();
    let mut t = String::new();
    let row = |t: &mut String, k: &str, v: String| writeln!(t, "  {k:<18}{v}").unwrap();

    writeln!(
        t,
        "{}: qualified {} of K={}",
        demo.to_possible_value().expect("no skipped variants").get_name(),
        cfg.qualified(),
        cfg.receivers()
    )
    .unwrap();
    row(&mut t, "keys", keys_line(cfg));
    row(&mut t, "rate upper bound", b.rate_upper.to_string());
    let exact = b.exact.as_ref();
    row(
        &mut t,
        "setting",
        exact.map_or("unsolved".into(), |e| e.setting.to_string()),
    );
    row(&mut t, "capacity C", exact.map_or("unknown".into(), |e| fraction(e.c)));
    row(
        &mut t,
        "beta*",
        exact.and_then(|e| e.beta_star).map_or("unknown".into(), fraction),
    );
    row(&mut t, "bandwidth bound", fraction(b.bw_lower.value));
    row(&mut t, "bound gap", yes(b.gap).into());
    row(&mut t, "builder", out.builder.to_string());
    for note in &out.notes {
        row(&mut t, "note", note.clone());
    }
    row(&mut t, "field", format!("GF({})", s.field().p()));
    row(
        &mut t,
        "L / L_W / L_X",
        format!("{} / {} / {}", s.blocks(), s.message_len(), s.transmit_len()),
    );
    row(&mut t, "rate", fraction(s.rate()));
    row(&mut t, "bandwidth", fraction(s.bandwidth()));
    let dec: Vec<String> = v
        .correctness
        .iter()
        .map(|&(k, ok)| format!("{k}:{}", yes(ok)))
        .collect();
    row(&mut t, "decodes", dec.join(" "));
    let leak: Vec<String> = v.leakage.iter().map(|&(e, l)| format!("{e}:{l}")).collect();
    row(&mut t, "leakage (symbols)", leak.join(" "));
    let cap = cap_from_env();
    match oracle_verify_with_cap(s, cap) {
        Ok(o) => {
            let bits: Vec<String> = o.leakage_bits.iter().map(|&(e, x)| format!("{e}:{x:.3}")).collect();
            row(
                &mut t,
                "oracle",
                format!(
                    "{} states, leakage bits {}, {}",
                    o.states,
                    bits.join(" "),
                    if o.passed() { "pass" } else { "FAIL" }
                ),
            );
        }
        Err(Error::TooLarge { states, cap }) => {
            row(&mut t, "oracle", format!("skipped: {states} states over cap {cap}"))
        }
        Err(e) => return Err(internal(e)),
    }
    let sim = s.simulate(DEMO_SEED).map_err(internal)?;
    row(
        &mut t,
        "simulation",
        format!("seed {DEMO_SEED}: {} receivers recovered W", sim.decoded.len()),
    );
    let rate_ok = exact.is_none_or(|e| e.c == s.rate());
    let bw_ok = exact.and_then(|e| e.beta_star).is_none_or(|x| x == s.bandwidth());
    row(&mut t, "matches C, beta*", yes(rate_ok && bw_ok && v.passed()).into());
    Ok(t)
}

/// Region corner points for a few key sizes: feasible integer tuples not
/// dominated by another feasible tuple.
fn region() -> Result<String, CliError> {
    let mut t = String::new();
    writeln!(t, "Region: three messages W1, W2, W12 over three receivers").unwrap();
    writeln!(t, "  L1,L2,L12   R1,R2,R12       case  beta*   L_X   oracle").unwrap();
    let cap = cap_from_env();
    for (l1, l2, l12) in [(1, 1, 1), (2, 2, 1), (3, 2, 2)] {
        let sizes = KeySizes { l1, l2, l12 };
        let top = l1.max(l2) + l12;
        let feasible: Vec<RateTuple> = (0..=top)
            .flat_map(|r1| (0..=top).flat_map(move |r2| (0..=top).map(move |r12| RateTuple { r1, r2, r12 })))
            .filter(|&r| region_check(sizes, r).is_ok())
            .collect();
        let dominated = |a: &RateTuple| {
            feasible
                .iter()
                .any(|b| b != a && b.r1 >= a.r1 && b.r2 >= a.r2 && b.r12 >= a.r12)
        };
        for r in feasible.iter().filter(|r| !dominated(r)) {
            let s = multimessage(sizes, *r).map_err(internal)?;
            let oracle = match s.oracle_verify(cap) {
                Ok(rep) => if rep.passed() { "pass" } else { "FAIL" }.to_string(),
                Err(Error::TooLarge { .. }) => "skipped".to_string(),
                Err(e) => return Err(internal(e)),
            };
            writeln!(
                t,
                "  {:<12}{:<16}{:<6}{:<8}{:<6}{}",
                format!("{l1},{l2},{l12}"),
                format!("{},{},{}", r.r1, r.r2, r.r12),
                s.case(),
                min_bandwidth(sizes, *r),
                s.transmit_len(),
                oracle
            )
            .unwrap();
        }
    }
    Ok(t)
}
