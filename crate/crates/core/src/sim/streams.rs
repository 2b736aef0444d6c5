use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random sources within one packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Channel = 0,
    PilotSymbols = 1,
    DataSymbols = 2,
    PilotNoise = 3,
    DataNoise = 4,
    DesiredBits = 5,
    DesiredChannel = 6,
}

const STREAMS_PER_PACKET: u64 = 16;

/// The generator for one `(packet, stream)` pair under `master_seed`.
pub fn packet_rng(master_seed: u64, packet: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(packet * STREAMS_PER_PACKET + stream as u64);
    rng
}
