//! Simulation core for a signed two-species molecular communication link.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod harness;
pub mod modulation;
pub mod precoder;
pub mod quantizer;
pub mod reaction_fdm;
pub mod receiver;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision instantiations.
pub type ChannelModelF64 = channel::ChannelModel<f64>;
pub type TapVectorF64 = channel::TapVector<f64>;
pub type PrecoderF64 = precoder::PrecoderFilter<f64>;
pub type QuantizerF64 = quantizer::Quantizer<f64>;
pub type NoiseModelF64 = receiver::NoiseModel<f64>;
pub type FdmParamsF64 = reaction_fdm::FdmParams<f64>;

/// Single-precision instantiations.
pub type ChannelModelF32 = channel::ChannelModel<f32>;
pub type TapVectorF32 = channel::TapVector<f32>;
pub type PrecoderF32 = precoder::PrecoderFilter<f32>;
pub type QuantizerF32 = quantizer::Quantizer<f32>;
pub type NoiseModelF32 = receiver::NoiseModel<f32>;
pub type FdmParamsF32 = reaction_fdm::FdmParams<f32>;
