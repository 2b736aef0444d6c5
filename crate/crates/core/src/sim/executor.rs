use alloc::vec::Vec;

/// Evaluates independent per-packet work items and returns them in packet
/// order. Implementations may run items concurrently; the output order must
/// not depend on scheduling.
pub trait PacketExecutor {
    fn map_packets<T, F>(&self, n_packets: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Runs packets one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl PacketExecutor for Sequential {
    fn map_packets<T, F>(&self, n_packets: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..n_packets).map(f).collect()
    }
}
