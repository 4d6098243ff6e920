//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process fails if any criterion does.
//!
//! Expected values are recomputed here from closed forms rather than read
//! back from the library.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgc_core::bounds::{self, bw_converse, exact_capacity, rate_converse};
use sgc_core::keyspace::{KeyConfig, Permutation, ReceiverSet};
use sgc_core::oracle::DEFAULT_CAP;
use sgc_core::scheme::{KeySegment, LinearScheme};
use sgc_core::synth::multimessage::{multimessage, KeySizes, RateTuple};
use sgc_core::synth::{self, groupcast_2of4, instance_2of5, multicast_k4_bw, symmetric, SynthOptions};
use sgc_core::{FMatrix, Field};

type Outcome = Result<String, String>;

fn r(n: i64) -> Ratio<i64> {
    Ratio::from_integer(n)
}

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn example1() -> KeyConfig {
    KeyConfig::from_lists(4, &[1], &[(&[1, 2], 4), (&[1, 3], 2), (&[1, 4], 1), (&[1, 3, 4], 3)]).unwrap()
}

fn example2() -> KeyConfig {
    KeyConfig::from_lists(4, &[1, 2, 3], &[(&[1], 1), (&[1, 3], 2), (&[2, 3], 3)]).unwrap()
}

/// Sizes ordered `L1, L2, L13, L14, L23, L24, L123, L124`.
fn two_of_four(v: [u64; 8], l12: u64) -> KeyConfig {
    let subsets: [&[usize]; 8] = [&[1], &[2], &[1, 3], &[1, 4], &[2, 3], &[2, 4], &[1, 2, 3], &[1, 2, 4]];
    let mut keys: Vec<(&[usize], u64)> = subsets.iter().copied().zip(v).collect();
    keys.push((&[1, 2], l12));
    KeyConfig::from_lists(4, &[1, 2], &keys).unwrap()
}

fn example4() -> KeyConfig {
    KeyConfig::new(
        6,
        ReceiverSet::of(&[1, 2, 3]),
        ReceiverSet::full(6).subsets_of_size(3).map(|u| (u, 1)),
    )
    .unwrap()
}

fn two_of_five(l: u64) -> KeyConfig {
    KeyConfig::from_lists(
        5,
        &[1, 2],
        &[(&[1], l), (&[1, 2, 3], l), (&[1, 4, 5], l), (&[2, 4], l), (&[2, 5], l)],
    )
    .unwrap()
}

fn oracle_clean(s: &LinearScheme) -> Result<u128, String> {
    let rep = s.verify_with_oracle(DEFAULT_CAP).map_err(|e| e.to_string())?;
    let o = rep.oracle.as_ref().expect("oracle ran");
    check!(rep.passed() && o.passed(), "oracle rejected: {o:?}");
    check!(rep.oracle_agrees(s.field()), "oracle and algebra disagree");
    Ok(o.states)
}

fn criterion1() -> Outcome {
    let cfg = example1();
    let ex = exact_capacity(&cfg).ok_or("no exact capacity")?;
    check!(
        rate_converse(&cfg) == 5 && ex.c == r(5) && ex.beta_star == Some(r(5)),
        "bounds {ex:?}"
    );
    let s = synth::synthesize(&cfg, 0).map_err(|e| e.to_string())?.scheme;
    check!(
        (s.message_len(), s.transmit_len()) == (5, 5),
        "scheme is {}x{}",
        s.message_len(),
        s.transmit_len()
    );
    let v = s.verify();
    check!(v.leakage == vec![(2, 0), (3, 0), (4, 0)], "leakage {:?}", v.leakage);
    let states = oracle_clean(&s)?;
    Ok(format!(
        "C = 5, beta* = 5, GF({}), oracle over {states} states",
        s.field().p()
    ))
}

fn criterion2() -> Outcome {
    let cfg = example2();
    let ex = exact_capacity(&cfg).ok_or("no exact capacity")?;
    check!(ex.c == r(3) && ex.beta_star == Some(r(6)), "bounds {ex:?}");
    let s = multicast_k4_bw(&cfg, &SynthOptions::seeded(0))
        .map_err(|e| e.to_string())?
        .scheme;
    check!(
        (s.message_len(), s.transmit_len()) == (3, 6),
        "scheme is {}x{}",
        s.message_len(),
        s.transmit_len()
    );
    oracle_clean(&s)?;
    Ok("C = 3, beta* = 6, L_X = 6".into())
}

fn criterion3() -> Outcome {
    let cfg = two_of_four([1, 2, 2, 3, 1, 2, 2, 1], 0);
    let ex = exact_capacity(&cfg).ok_or("no exact capacity")?;
    check!(ex.c == r(5) && ex.beta_star == Some(r(9)), "bounds {ex:?}");
    let s = groupcast_2of4(&cfg).map_err(|e| e.to_string())?.scheme;
    check!(s.field().p() == 2, "field GF({})", s.field().p());
    check!(
        (s.message_len(), s.transmit_len()) == (5, 9),
        "scheme is {}x{}",
        s.message_len(),
        s.transmit_len()
    );
    let states = oracle_clean(&s)?;
    Ok(format!(
        "C = 5, beta* = 9, GF(2) 9-bit scheme, oracle over {states} states"
    ))
}

fn criterion4() -> Outcome {
    let cfg = example4();
    let ex = exact_capacity(&cfg).ok_or("no exact capacity")?;
    check!(ex.c == r(6) && ex.beta_star == Some(r(10)), "bounds {ex:?}");
    let out = symmetric(&cfg, &SynthOptions::seeded(0)).map_err(|e| e.to_string())?;
    let s = &out.scheme;
    check!(
        (s.message_len(), s.transmit_len()) == (6, 10),
        "scheme is {}x{}",
        s.message_len(),
        s.transmit_len()
    );
    check!(s.verify().passed(), "verification failed");
    let rates: Vec<u64> = out.groups.iter().map(|g| g.rate).collect();
    let bws: Vec<u64> = out.groups.iter().map(|g| g.bandwidth).collect();
    check!(rates == [1, 4, 1] && bws == [1, 6, 3], "groups {rates:?}/{bws:?}");
    Ok("C = 6, beta* = 10, groups (1,4,1)/(1,6,3)".into())
}

fn criterion5() -> Outcome {
    let out = instance_2of5(1).map_err(|e| e.to_string())?;
    let s = &out.scheme;
    check!(
        (s.message_len(), s.transmit_len(), s.blocks()) == (5, 10, 3),
        "L_W={} L_X={} L={}",
        s.message_len(),
        s.transmit_len(),
        s.blocks()
    );
    check!(
        s.rate() == Ratio::new(5, 3) && s.bandwidth() == Ratio::new(10, 3),
        "rate/bandwidth"
    );
    let rep = s.verify_with_oracle(DEFAULT_CAP).map_err(|e| e.to_string())?;
    let o = rep.oracle.as_ref().unwrap();
    let eves: Vec<usize> = o.leakage_bits.iter().map(|&(e, _)| e).collect();
    check!(eves == [3, 4, 5], "eavesdroppers {eves:?}");
    check!(
        o.leakage_bits.iter().all(|&(_, b)| b.abs() < 1e-9),
        "leakage {:?}",
        o.leakage_bits
    );
    check!(
        o.decoding.iter().all(|d| d.decodes()) && o.decoding.len() == 2,
        "decoding {:?}",
        o.decoding
    );
    let b = bounds::report(&two_of_five(1));
    check!(b.rate_upper == 2 && b.gap, "bounds report {b:?}");
    check!(b.exact.map(|e| e.c) == Some(Ratio::new(5, 3)), "capacity");
    Ok(format!(
        "rate 5/3, bandwidth 10/3, oracle over {} states, gap 2 > 5/3",
        o.states
    ))
}

fn criterion6() -> Outcome {
    let (mut feasible, mut total) = (0, 0);
    for l1 in 0..=3 {
        for l2 in 0..=3 {
            for l12 in 0..=3 {
                let sizes = KeySizes { l1, l2, l12 };
                for r1 in 0..=6 {
                    for r2 in 0..=6 {
                        for r12 in 0..=6 {
                            total += 1;
                            let rates = RateTuple { r1, r2, r12 };
                            let inside = r1 + r12 <= l1 + l12 && r2 + r12 <= l2 + l12 && r1 <= l1 && r2 <= l2;
                            let built = multimessage(sizes, rates);
                            check!(built.is_ok() == inside, "membership differs at {sizes:?} {rates}");
                            let Ok(s) = built else { continue };
                            feasible += 1;
                            let beta = r1 + r2 + r12.max((2 * r12).saturating_sub(l12));
                            check!(
                                s.transmit_len() as u64 == beta,
                                "bandwidth {} != {beta} at {sizes:?} {rates}",
                                s.transmit_len()
                            );
                            check!(s.verify().passed(), "algebraic check fails at {sizes:?} {rates}");
                            let o = s.oracle_verify(DEFAULT_CAP).map_err(|e| e.to_string())?;
                            check!(o.passed(), "oracle rejects {sizes:?} {rates}: {o:?}");
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{feasible} feasible of {total} tuples, all oracle-clean"))
}

/// The closed forms for two qualified receivers out of four.
fn two_of_four_values(v: [u64; 8], l12: u64) -> (u64, u64) {
    let [l1, l2, l13, l14, l23, l24, l123, l124] = v;
    let c = l12
        + (l1 + l14 + l124)
            .min(l1 + l13 + l123)
            .min(l2 + l24 + l124)
            .min(l2 + l23 + l123);
    (c, 2 * c - l12 - l123.min(l124))
}

fn check_two_of_four(v: [u64; 8], l12: u64) -> Result<(), String> {
    let cfg = two_of_four(v, l12);
    let (c, beta) = two_of_four_values(v, l12);
    let s = groupcast_2of4(&cfg).map_err(|e| format!("{v:?}/{l12}: {e}"))?.scheme;
    check!(
        (s.message_len() as u64, s.transmit_len() as u64) == (c, beta),
        "{v:?}/{l12}: scheme {}x{}, expected {c}x{beta}",
        s.message_len(),
        s.transmit_len()
    );
    check!(s.verify().passed(), "{v:?}/{l12}: verification failed");
    Ok(())
}

fn criterion7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5000 {
        let v: [u64; 8] = std::array::from_fn(|_| rng.gen_range(0..=6));
        check_two_of_four(v, rng.gen_range(0..=6))?;
    }
    let mut exhaustive = 0;
    for code in 0..3u64.pow(9) {
        let d: Vec<u64> = (0..9).map(|i| code / 3u64.pow(i) % 3).collect();
        check_two_of_four(std::array::from_fn(|i| d[i]), d[8])?;
        exhaustive += 1;
    }
    Ok(format!(
        "5000 samples in [0,6] and {exhaustive} exhaustive vectors in [0,2]"
    ))
}

fn random_scheme(rng: &mut ChaCha8Rng) -> LinearScheme {
    loop {
        let p = *[2u64, 3, 5].choose(rng).unwrap();
        let field = Field::new(p).unwrap();
        let k = rng.gen_range(3..=5);
        let full = (1u32 << k) - 1;
        let qualified = ReceiverSet::from_bits(rng.gen_range(1..full));
        let layout: Vec<KeySegment> = (0..rng.gen_range(1..=4))
            .map(|_| KeySegment::new(ReceiverSet::from_bits(rng.gen_range(1..=full)), rng.gen_range(1..=3)))
            .collect();
        let d: usize = layout.iter().map(|s| s.width).sum();
        let lw = rng.gen_range(1..=3);
        if (p as f64).powi((lw + d) as i32) > (1 << 16) as f64 {
            continue;
        }
        let lx = rng.gen_range(1..=5);
        // sparse entries so that both verdicts occur often
        let mut entry = |_| {
            if rng.gen_bool(0.4) {
                0
            } else {
                rng.gen_range(0..p as i64)
            }
        };
        let a: Vec<Vec<i64>> = (0..lx).map(|_| (0..lw).map(&mut entry).collect()).collect();
        let b: Vec<Vec<i64>> = (0..lx).map(|_| (0..d).map(&mut entry).collect()).collect();
        let a = FMatrix::from_rows_with_cols(field, lw, &a).unwrap();
        let b = FMatrix::from_rows_with_cols(field, d, &b).unwrap();
        return LinearScheme::new(1, k, qualified, layout, a, b).unwrap();
    }
}

fn criterion8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut decodes, mut fails, mut leaks) = (0, 0, 0);
    for i in 0..1000 {
        let s = random_scheme(&mut rng);
        let rep = s.verify_with_oracle(DEFAULT_CAP).map_err(|e| e.to_string())?;
        let o = rep.oracle.as_ref().unwrap();
        let bits = (s.field().p() as f64).log2();
        for &(k, ok) in &rep.correctness {
            let d = o.decoding.iter().find(|d| d.receiver == k).ok_or("missing receiver")?;
            check!(d.decodes() == ok, "scheme {i}: receiver {k} algebra {ok}, oracle {d:?}");
            if ok {
                decodes += 1;
            } else {
                fails += 1;
            }
        }
        for &(e, l) in &rep.leakage {
            let &(_, b) = o.leakage_bits.iter().find(|x| x.0 == e).ok_or("missing eavesdropper")?;
            check!(
                (l as f64 * bits - b).abs() < 1e-9,
                "scheme {i}: receiver {e} leaks {l} symbols, oracle {b} bits"
            );
            leaks += (l > 0) as usize;
        }
    }
    check!(decodes > 0 && fails > 0 && leaks > 0, "degenerate sample");
    Ok(format!(
        "1000 schemes: {decodes} decoding / {fails} failing receivers, {leaks} leaky views"
    ))
}

fn corpus() -> Vec<KeyConfig> {
    let mut out = vec![
        example1(),
        example2(),
        two_of_four([1, 2, 2, 3, 1, 2, 2, 1], 0),
        example4(),
        two_of_five(1),
        two_of_five(2),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        out.push(two_of_four(
            std::array::from_fn(|_| rng.gen_range(0..=4)),
            rng.gen_range(0..=2),
        ));
        out.push(solved_k4(&mut rng));
    }
    out
}

/// A random four-receiver configuration with one or three qualified
/// receivers, both solved.
fn solved_k4(rng: &mut ChaCha8Rng) -> KeyConfig {
    let q: &[usize] = if rng.gen_bool(0.5) { &[1] } else { &[1, 2, 3] };
    KeyConfig::new(
        4,
        ReceiverSet::of(q),
        ReceiverSet::full(4)
            .subsets()
            .filter(|u| !u.is_empty())
            .map(|u| (u, rng.gen_range(0..=3))),
    )
    .unwrap()
}

fn criterion9() -> Outcome {
    let configs = corpus();
    for cfg in &configs {
        let s = synth::synthesize(cfg, 0).map_err(|e| e.to_string())?.scheme;
        check!(
            s.rate() <= r(rate_converse(cfg) as i64),
            "rate above converse for {cfg:?}"
        );
        let bw = bw_converse(cfg, s.rate());
        check!(s.bandwidth() >= bw.value, "bandwidth below converse for {cfg:?}");
    }

    let mut runner = TestRunner::new(Config {
        cases: 100,
        ..Config::default()
    });
    let scaling = (any::<u64>(), 1u64..=4);
    runner
        .run(&scaling, |(seed, t)| {
            let cfg = solved_k4(&mut ChaCha8Rng::seed_from_u64(seed));
            let big = cfg.scaled(t);
            prop_assert_eq!(rate_converse(&big), t * rate_converse(&cfg));
            let rt = r(t as i64);
            let (e, eb) = (exact_capacity(&cfg).unwrap(), exact_capacity(&big).unwrap());
            prop_assert_eq!(eb.c, e.c * rt);
            prop_assert_eq!(eb.beta_star, e.beta_star.map(|b| b * rt));
            prop_assert_eq!(bw_converse(&big, e.c * rt).value, bw_converse(&cfg, e.c).value * rt);
            Ok(())
        })
        .map_err(|e| format!("homogeneity: {e}"))?;

    let relabel = (any::<u64>(), any::<u64>());
    runner
        .run(&relabel, |(seed, shuffle)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cfg = if seed % 2 == 0 {
                solved_k4(&mut rng)
            } else {
                two_of_four(std::array::from_fn(|_| rng.gen_range(0..=4)), rng.gen_range(0..=2))
            };
            let mut to: Vec<usize> = (1..=4).collect();
            to.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
            let moved = cfg.relabel(&Permutation::new(to).unwrap());
            prop_assert_eq!(rate_converse(&moved), rate_converse(&cfg));
            let (e, em) = (exact_capacity(&cfg).unwrap(), exact_capacity(&moved).unwrap());
            prop_assert_eq!((em.c, em.beta_star), (e.c, e.beta_star));
            prop_assert_eq!(bw_converse(&moved, e.c).value, bw_converse(&cfg, e.c).value);
            let s = synth::synthesize(&moved, seed).unwrap().scheme;
            prop_assert_eq!(s.rate(), e.c);
            Ok(())
        })
        .map_err(|e| format!("relabelling: {e}"))?;
    Ok(format!(
        "{} corpus configs within both converses; 100 scalings and 100 relabellings invariant",
        configs.len()
    ))
}

/// Name, check, and time limit in seconds.
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn main() {
    let criteria: [Criterion; 9] = [
        ("unicast example", criterion1, Some(1)),
        ("multicast example", criterion2, Some(1)),
        ("2-of-4 example", criterion3, Some(1)),
        ("symmetric example", criterion4, Some(5)),
        ("2-of-5 alignment instance", criterion5, Some(30)),
        ("three-message region sweep", criterion6, Some(60)),
        ("2-of-4 case-tree sweep", criterion7, Some(120)),
        ("oracle/algebra equivalence", criterion8, None),
        ("converse consistency", criterion9, None),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(secs)) if took > Duration::from_secs(secs) => Err(format!("took {took:.2?}, limit {secs} s")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} ({took:.2?})", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
