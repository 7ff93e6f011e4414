//! Binary convolutional codes: distance profiles, code search, distance
//! spectra and sequential decoding over the binary-input AWGN channel.

pub mod count;
pub mod decode;
pub mod distance;
pub mod error;
mod gf2poly;
pub mod polymat;
pub mod search;
pub mod simulate;
pub mod spectrum;
pub mod tables;
pub mod trellis;

pub use count::Count;
pub use distance::{Profile, ProfileKind, Quality, Shortening};
pub use error::{Error, Result};
pub use polymat::{GeneratorMatrix, Permutation};
pub use spectrum::{ExactSpectrum, Spectrum, Spectrum128};
pub use trellis::{Encoder, EncoderState, Frame};
pub use decode::{BistackConfig, DecodeOutcome, SoftFrame};
pub use simulate::{DecoderKind, EnergyConvention, SimConfig, SimReport};

pub type SoftFrame64 = SoftFrame<f64>;
pub type SoftFrame32 = SoftFrame<f32>;
pub type DecodeOutcome64 = DecodeOutcome<f64>;
pub type DecodeOutcome32 = DecodeOutcome<f32>;
