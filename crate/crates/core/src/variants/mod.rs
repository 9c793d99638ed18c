//! Gated recurrent units and the Grid LSTM family.

pub mod grid;
pub mod gru;

pub use grid::{
    grid_block, lstm_transform, multidim_memory, multidim_step, stacked_step, Affine,
    MultidimWeights, TransformWeights,
};
pub use gru::{gru_step, Gru, GruLayerState, GruParams, GruShape};
