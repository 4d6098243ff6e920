//! Builders for capacity-achieving linear schemes.
//!
//! Every builder returns a [`Synthesis`] whose scheme has already passed the
//! algebraic verifier and respects the key budget of the configuration it
//! was built for. [`synthesize`] picks the builder from the shape of the
//! configuration.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds;
use crate::error::{Error, Result};
use crate::fmatrix::FMatrix;
use crate::gf::{least_prime_at_least, Field};
use crate::keyspace::{KeyConfig, ReceiverSet};
use crate::scheme::LinearScheme;

mod groupcast;
mod instance;
mod multicast;
pub mod multimessage;
mod symmetric;
mod unicast;

pub use groupcast::{groupcast_2of4, invocation_counts, Component, Invocations, COMPONENTS};
pub use instance::{instance_2of5, instance_base};
pub use multicast::{multicast, multicast_k4_bw};
pub use multimessage::{multimessage, MultiMessageScheme, RateTuple};
pub use symmetric::{symmetric, GroupContribution};
pub use unicast::{unicast, unicast_cauchy};

/// Field redraws after the first Cauchy attempt.
pub const MAX_ESCALATIONS: u32 = 8;

/// Random dense draws tried per prime below the Cauchy threshold.
pub const SMALL_FIELD_DRAWS: u32 = 16;

/// How Cauchy-based builders choose their field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FieldPolicy {
    /// Try random dense coefficients over every prime below the Cauchy
    /// threshold first, then fall back to Cauchy matrices. Small fields keep
    /// schemes within reach of the exhaustive oracle.
    #[default]
    Smallest,
    /// Go straight to Cauchy matrices over the least prime that fits them.
    Cauchy,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SynthOptions {
    pub seed: u64,
    pub policy: FieldPolicy,
}

impl SynthOptions {
    pub fn seeded(seed: u64) -> Self {
        SynthOptions {
            seed,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builder {
    Unicast,
    Multicast,
    MulticastK4,
    Groupcast2of4,
    Symmetric,
    Instance2of5,
}

impl fmt::Display for Builder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Builder::Unicast => "unicast",
            Builder::Multicast => "multicast",
            Builder::MulticastK4 => "multicast_k4_bw",
            Builder::Groupcast2of4 => "groupcast_2of4",
            Builder::Symmetric => "symmetric",
            Builder::Instance2of5 => "instance_2of5",
        })
    }
}

impl std::str::FromStr for Builder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "unicast" => Builder::Unicast,
            "multicast" => Builder::Multicast,
            "multicast_k4_bw" => Builder::MulticastK4,
            "groupcast_2of4" => Builder::Groupcast2of4,
            "symmetric" => Builder::Symmetric,
            "instance_2of5" => Builder::Instance2of5,
            other => return Err(Error::InvalidConfig(format!("unknown builder `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synthesis {
    pub scheme: LinearScheme,
    pub builder: Builder,
    pub seed: u64,
    /// Primes skipped after the first Cauchy attempt failed verification.
    pub escalations: u32,
    /// Per-group accounting, filled by the symmetric builder.
    pub groups: Vec<GroupContribution>,
    pub notes: Vec<String>,
}

impl Synthesis {
    fn new(scheme: LinearScheme, builder: Builder, seed: u64) -> Self {
        Synthesis {
            scheme,
            builder,
            seed,
            escalations: 0,
            groups: Vec::new(),
            notes: Vec::new(),
        }
    }
}

/// Picks a builder by shape and runs it with the default field policy.
pub fn synthesize(config: &KeyConfig, seed: u64) -> Result<Synthesis> {
    synthesize_with(config, &SynthOptions::seeded(seed))
}

pub fn synthesize_with(config: &KeyConfig, opts: &SynthOptions) -> Result<Synthesis> {
    let k = config.receivers();
    let n = config.qualified().len();
    if n == 1 {
        return unicast(config, opts);
    }
    if n == k - 1 {
        return if k == 4 {
            multicast_k4_bw(config, opts)
        } else {
            multicast(config, opts)
        };
    }
    if n == 2 && k == 4 {
        return groupcast_2of4(config);
    }
    if config.is_symmetric() {
        return symmetric(config, opts);
    }
    if let Some((l, perm)) = bounds::two_of_five_topology(config) {
        let mut out = instance_2of5(l)?;
        out.scheme = out.scheme.relabel(&perm.inverse());
        out.scheme.check_key_budget(config)?;
        return Ok(out);
    }
    Err(Error::Unsolved(format!(
        "no known construction for N={n} of K={k} with this key configuration; \
         capacity is open outside unicast, multicast, N=2 of K=4, the symmetric \
         setting and the 2-of-5 alignment instance"
    )))
}

/// Drops keys that every eavesdropper holds or that no qualified receiver
/// holds; such keys appear in no capacity formula.
pub fn prune(config: &KeyConfig) -> KeyConfig {
    let eves = config.eavesdroppers();
    let q = config.qualified();
    KeyConfig::new(
        config.receivers(),
        q,
        config.keys().filter(|&(u, _)| u.intersects(q) && !eves.is_subset(u)),
    )
    .expect("subset of a valid configuration")
}

/// Final gate shared by all builders.
fn finish(config: &KeyConfig, mut out: Synthesis) -> Result<Synthesis> {
    let report = out.scheme.verify();
    if !report.passed() {
        return Err(Error::VerificationFailed {
            escalations: out.escalations,
        });
    }
    out.scheme.check_key_budget(config)?;
    out.scheme = out.scheme.merge_segments();
    Ok(out)
}

fn empty_for(config: &KeyConfig) -> LinearScheme {
    LinearScheme::empty(Field::gf2(), config.receivers(), config.qualified())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Coefficients {
    Dense,
    Cauchy,
}

/// Hands out coefficient matrices to a builder during field search.
pub(crate) struct Source {
    field: Field,
    kind: Coefficients,
    rng: ChaCha8Rng,
}

impl Source {
    pub(crate) fn field(&self) -> Field {
        self.field
    }

    pub(crate) fn draw(&mut self, rows: usize, cols: usize) -> Result<FMatrix> {
        match self.kind {
            Coefficients::Dense => Ok(FMatrix::random(self.field, rows, cols, &mut self.rng)),
            Coefficients::Cauchy => FMatrix::random_cauchy(rows, cols, self.field, &mut self.rng),
        }
    }
}

pub(crate) struct Found {
    pub scheme: LinearScheme,
    pub escalations: u32,
    pub note: String,
}

/// Runs `build` over candidate fields until the result verifies.
///
/// `cauchy_points` is the largest `rows + cols` of any matrix the builder
/// draws; the least prime at or above it is where Cauchy matrices start.
pub(crate) fn search_field(
    cauchy_points: usize,
    opts: &SynthOptions,
    mut build: impl FnMut(&mut Source) -> Result<LinearScheme>,
) -> Result<Found> {
    let threshold = least_prime_at_least(cauchy_points as u64);
    let mut attempt = |p: u64, kind: Coefficients, stream: u64| -> Result<Option<LinearScheme>> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(p << 8 | stream);
        let mut src = Source {
            field: Field::new(p)?,
            kind,
            rng,
        };
        match build(&mut src) {
            Ok(s) if s.verify().passed() => Ok(Some(s)),
            Ok(_) | Err(Error::FieldTooSmall { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };

    if opts.policy == FieldPolicy::Smallest {
        let mut p = 2;
        while p < threshold {
            for draw in 0..SMALL_FIELD_DRAWS {
                if let Some(scheme) = attempt(p, Coefficients::Dense, draw as u64)? {
                    return Ok(Found {
                        scheme,
                        escalations: 0,
                        note: format!("random coefficients over GF({p}) verified on draw {}", draw + 1),
                    });
                }
            }
            p = least_prime_at_least(p + 1);
        }
    }
    let mut p = threshold;
    for escalation in 0..=MAX_ESCALATIONS {
        if let Some(scheme) = attempt(p, Coefficients::Cauchy, 255)? {
            return Ok(Found {
                scheme,
                escalations: escalation,
                note: format!("Cauchy coefficients over GF({p})"),
            });
        }
        p = least_prime_at_least(p + 1);
    }
    Err(Error::VerificationFailed {
        escalations: MAX_ESCALATIONS,
    })
}

/// The subsets holding the keys of `config`, in increasing bitmask order.
fn key_subsets(config: &KeyConfig) -> Vec<(ReceiverSet, u64)> {
    config.keys().collect()
}
