//! Secure groupcast over a noiseless broadcast channel when receivers share
//! combinatorial keys.
//!
//! The crate covers three things:
//!
//! * [`bounds`]: converse bounds on rate and broadcast bandwidth, and the
//!   exact capacity and minimum bandwidth for every solved setting;
//! * [`synth`]: builders for explicit linear schemes over GF(p) that meet
//!   those values;
//! * [`scheme`] and [`oracle`]: exact verification of any linear scheme,
//!   both by rank computations and by exhaustive enumeration.
//!
//! ```
//! use sgc_core::keyspace::KeyConfig;
//! use sgc_core::{bounds, synth};
//!
//! // unicast to receiver 1 of 4
//! let cfg = KeyConfig::from_lists(
//!     4,
//!     &[1],
//!     &[(&[1, 2], 4), (&[1, 3], 2), (&[1, 4], 1), (&[1, 3, 4], 3)],
//! )
//! .unwrap();
//! assert_eq!(bounds::rate_converse(&cfg), 5);
//! let out = synth::synthesize(&cfg, 7).unwrap();
//! assert_eq!(out.scheme.message_len(), 5);
//! assert!(out.scheme.verify().passed());
//! ```

pub mod bounds;
pub mod error;
pub mod fmatrix;
pub mod gf;
pub mod keyspace;
pub mod oracle;
pub mod scheme;
pub mod synth;

pub use error::{Error, Result};
pub use fmatrix::FMatrix;
pub use gf::{Field, FieldElem};
pub use keyspace::{KeyCollection, KeyConfig, ReceiverSet};
pub use scheme::LinearScheme;
