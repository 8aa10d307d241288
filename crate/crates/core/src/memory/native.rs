use super::{Memory, Region, StackAllocator};

/// Plain in-process arena. Tracks the peak number of allocated cells so that
/// auxiliary space can be measured.
#[derive(Debug, Default, Clone)]
pub struct NativeMemory {
    cells: Vec<u64>,
    stack: StackAllocator,
}

impl NativeMemory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pre-sizes the arena for `cells` cells.
    pub fn with_capacity(cells: usize) -> Self {
        Self {
            cells: Vec::with_capacity(cells),
            stack: StackAllocator::default(),
        }
    }

    /// Cells currently allocated.
    pub fn in_use(&self) -> usize {
        self.stack.top()
    }

    /// Largest value of [`NativeMemory::in_use`] since creation or the last
    /// [`NativeMemory::reset_peak`].
    pub fn peak(&self) -> usize {
        self.stack.peak()
    }

    pub fn reset_peak(&mut self) {
        self.stack.reset_peak();
    }

    /// Number of live (unreleased) allocations.
    pub fn live_allocations(&self) -> usize {
        self.stack.live()
    }
}

impl Memory for NativeMemory {
    fn alloc(&mut self, len: usize) -> Region {
        let region = self.stack.push(len, 1);
        let end = region.base() + len;
        if self.cells.len() < end {
            self.cells.resize(end, 0);
        }
        region
    }

    fn release(&mut self, region: Region) {
        self.stack.pop(region);
    }

    #[inline]
    fn read(&mut self, region: Region, idx: usize) -> u64 {
        self.cells[region.addr(idx)]
    }

    #[inline]
    fn write(&mut self, region: Region, idx: usize, value: u64) {
        self.cells[region.addr(idx)] = value;
    }

    #[inline]
    fn peek(&self, region: Region, idx: usize) -> u64 {
        self.cells[region.addr(idx)]
    }
}
