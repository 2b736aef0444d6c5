//! Packet-level Monte Carlo harness.
//!
//! Every packet draws its own channel, pilot block, data block and noise from
//! independent ChaCha streams keyed by `(master_seed, packet_index)`, so
//! results do not depend on how packets are scheduled across workers.

mod ber;
mod config;
mod executor;
mod link;
mod ofdm;
mod packet;
mod streams;
mod sweep;

pub use ber::{ber_packet, run_ber, BerMode, BerOptions, BerPacket, BerPoint, DesiredLink};
pub use config::{ExperimentConfig, Method, SweepParam};
pub use executor::{PacketExecutor, Sequential};
pub use link::SiLink;
pub use ofdm::{gen_bpsk_symbols, gen_ofdm_like_symbols};
pub use packet::{run_packet, MethodResidual, PacketResult, PacketRunner};
pub use streams::{packet_rng, Stream};
pub use sweep::{run_packets, summarize, sweep, MethodStats, SweepPoint, SweepResult};
