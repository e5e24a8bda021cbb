/// Working-memory cap for operations that can materialize large
/// intermediates. The default is 8 GiB.
#[derive(Clone, Copy, Debug)]
pub struct MemoryBudget {
    pub bytes: u64,
}

impl MemoryBudget {
    pub const DEFAULT_BYTES: u64 = 8 << 30;

    pub fn new(bytes: u64) -> Self {
        MemoryBudget { bytes }
    }

    pub fn bits(&self) -> u64 {
        self.bytes.saturating_mul(8)
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        MemoryBudget {
            bytes: Self::DEFAULT_BYTES,
        }
    }
}
