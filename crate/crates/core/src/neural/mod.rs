//! A small recurrent network written out by hand: one LSTM layer feeding
//! five dense layers with an additive skip from the first dense layer into
//! the last, inverted dropout, mean-squared-error loss, exact
//! backpropagation through time and the ADAM optimiser.
//!
//! Everything runs in double precision on the CPU; the networks are sized
//! for loss triangles, which yield a few dozen training sequences.

mod adam;
mod dropout;
mod init;
mod lstm;
mod matrix;
mod network;
mod train;

pub use adam::{adam_step, AdamConfig, OptimizerState};
pub use dropout::{dropout, Mode};
pub use init::{init_glorot, init_orthogonal};
pub use lstm::{lstm_forward, LstmWeights};
pub use matrix::Matrix;
pub use network::{
    mse_loss, Architecture, Checkpoint, Dense, DenseStack, DropoutMasks, Network, NamedTensor,
    Sample, FEATURES,
};
pub use train::{train, TrainConfig, TrainedNetwork};
