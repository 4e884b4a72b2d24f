//! Daubechies wavelets: filters, cascade evaluation, periodic fast transforms
//! in one and two dimensions, wavelet packets and demonstration signals.

mod cascade;
mod demo;
mod dwt;
mod dwt2;
mod filters;
mod packet;

pub use cascade::{cascade_evaluate, CascadeSamples};
pub use demo::DemoSignal;
pub use dwt::{
    analysis_step, dwt_forward, dwt_inverse, mra_components, signal_level, synthesis_step, Boundary,
    MraDecomposition,
};
pub use dwt2::{dwt2_forward, dwt2_inverse, Dwt2};
pub use filters::{daubechies_filters, wavelet_basis, WaveletBasis, WaveletFamily};
pub use packet::{entropy_cost, packet_table, reconstruct_nodes, wavelet_packet_best_basis, PacketNode, WaveletPacketTree};
