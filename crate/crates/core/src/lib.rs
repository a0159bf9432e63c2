//! Construction, asymptotic analysis and simulation of protograph-based
//! partially doped GLDPC codes on the binary erasure channel.

pub mod component;
pub mod doping;
pub mod ensemble;
pub mod error;
pub mod gf2;
pub mod lifting;
pub mod peg;
pub mod pexit;
pub mod protograph;
pub mod seeds;
pub mod sim;
pub mod sparse;

pub use component::{ComponentCode, ExitTable};
pub use doping::{dope_conventional, dope_partial, typical_dmin_check, DopingSpec, PdGldpcCode};
pub use error::{Error, Result};
pub use lifting::{lift, LiftedPcm, RowOrigin};
pub use peg::{peg_build, PegConfig};
pub use pexit::{de_threshold, pexit_evaluate, threshold, PexitCode, PexitLimits, PexitMode, ThresholdResult};
pub use protograph::{BaseMatrix, DegreeCountVector, EnsembleDistribution, Rate};
pub use sim::{decode_block, erasure_rank_oracle, run_bler, DecoderMode, SimConfig, SimResult};
pub use sparse::SparsePcm;
