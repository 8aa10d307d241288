use super::{Memory, MemoryError, Region, StackAllocator};

/// Parameters of the two-level memory: a cache of `cache` cells organised in
/// blocks of `block` cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CacheConfig {
    cache: usize,
    block: usize,
}

impl CacheConfig {
    pub fn new(cache: usize, block: usize) -> Result<Self, MemoryError> {
        if block == 0 {
            return Err(MemoryError::ZeroBlock);
        }
        if cache < block {
            return Err(MemoryError::CacheSmallerThanBlock { cache, block });
        }
        if !cache.is_multiple_of(block) {
            return Err(MemoryError::NotBlockMultiple { cache, block });
        }
        Ok(Self { cache, block })
    }

    /// Cache size `M` in cells.
    pub fn cache(&self) -> usize {
        self.cache
    }

    /// Block size `B` in cells.
    pub fn block(&self) -> usize {
        self.block
    }

    /// Number of block frames, `M / B`.
    pub fn frames(&self) -> usize {
        self.cache / self.block
    }

    /// `M >= B^2`.
    pub fn is_tall(&self) -> bool {
        self.cache >= self.block.saturating_mul(self.block)
    }
}

/// Block-transfer counts since the last reset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IoCounter {
    pub loads: u64,
    pub writebacks: u64,
}

impl IoCounter {
    pub fn total(&self) -> u64 {
        self.loads + self.writebacks
    }
}

const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Frame {
    block: usize,
    dirty: bool,
    prev: u32,
    next: u32,
}

/// A flat, unbounded address space behind a fully associative LRU cache with
/// write-allocate / write-back policy.
///
/// Values behave exactly like a plain array; the cache only affects
/// [`IoCounter`]. Regions are block aligned.
#[derive(Debug, Clone)]
pub struct SimMemory {
    config: CacheConfig,
    block_shift: Option<u32>,
    cells: Vec<u64>,
    stack: StackAllocator,
    // frame index per block id, NIL when not resident
    residency: Vec<u32>,
    frames: Vec<Frame>,
    // most recently used frame
    head: u32,
    // least recently used frame
    tail: u32,
    mru_block: usize,
    counter: IoCounter,
}

impl SimMemory {
    pub fn new(config: CacheConfig) -> Self {
        let block = config.block();
        Self {
            config,
            block_shift: block.is_power_of_two().then(|| block.trailing_zeros()),
            cells: Vec::new(),
            stack: StackAllocator::default(),
            residency: Vec::new(),
            frames: Vec::with_capacity(config.frames()),
            head: NIL,
            tail: NIL,
            mru_block: usize::MAX,
            counter: IoCounter::default(),
        }
    }

    pub fn config(&self) -> CacheConfig {
        self.config
    }

    pub fn is_tall_cache(&self) -> bool {
        self.config.is_tall()
    }

    /// Writes back every dirty resident block (counting each writeback) and
    /// returns the counters. The cache is left clean but still populated.
    pub fn stats(&mut self) -> IoCounter {
        for frame in &mut self.frames {
            if frame.dirty {
                frame.dirty = false;
                self.counter.writebacks += 1;
            }
        }
        self.counter
    }

    /// Zeroes the counters without touching residency.
    pub fn reset_stats(&mut self) {
        self.counter = IoCounter::default();
    }

    /// Flushes like [`SimMemory::stats`] and then empties the cache.
    pub fn evict_all(&mut self) {
        self.stats();
        for frame in &self.frames {
            self.residency[frame.block] = NIL;
        }
        self.frames.clear();
        self.head = NIL;
        self.tail = NIL;
        self.mru_block = usize::MAX;
    }

    pub fn resident_blocks(&self) -> usize {
        self.frames.len()
    }

    /// Cells currently allocated (including alignment padding).
    pub fn in_use(&self) -> usize {
        self.stack.top()
    }

    #[inline]
    fn block_of(&self, addr: usize) -> usize {
        match self.block_shift {
            Some(shift) => addr >> shift,
            None => addr / self.config.block(),
        }
    }

    fn unlink(&mut self, f: u32) {
        let Frame { prev, next, .. } = self.frames[f as usize];
        if prev == NIL {
            self.head = next;
        } else {
            self.frames[prev as usize].next = next;
        }
        if next == NIL {
            self.tail = prev;
        } else {
            self.frames[next as usize].prev = prev;
        }
    }

    fn push_front(&mut self, f: u32) {
        let old = self.head;
        {
            let frame = &mut self.frames[f as usize];
            frame.prev = NIL;
            frame.next = old;
        }
        if old == NIL {
            self.tail = f;
        } else {
            self.frames[old as usize].prev = f;
        }
        self.head = f;
    }

    #[inline]
    fn touch(&mut self, addr: usize, write: bool) {
        let block = self.block_of(addr);
        if block == self.mru_block {
            if write {
                self.frames[self.head as usize].dirty = true;
            }
            return;
        }
        self.touch_slow(block, write);
    }

    fn touch_slow(&mut self, block: usize, write: bool) {
        let resident = self.residency[block];
        let f = if resident != NIL {
            self.unlink(resident);
            resident
        } else {
            self.counter.loads += 1;
            let f = if self.frames.len() < self.config.frames() {
                self.frames.push(Frame {
                    block,
                    dirty: false,
                    prev: NIL,
                    next: NIL,
                });
                (self.frames.len() - 1) as u32
            } else {
                let victim = self.tail;
                self.unlink(victim);
                let old = self.frames[victim as usize];
                if old.dirty {
                    self.counter.writebacks += 1;
                }
                self.residency[old.block] = NIL;
                self.frames[victim as usize].block = block;
                self.frames[victim as usize].dirty = false;
                victim
            };
            self.residency[block] = f;
            f
        };
        self.push_front(f);
        if write {
            self.frames[f as usize].dirty = true;
        }
        self.mru_block = block;
    }
}

impl Memory for SimMemory {
    fn alloc(&mut self, len: usize) -> Region {
        let region = self.stack.push(len, self.config.block());
        let end = region.base() + len;
        if self.cells.len() < end {
            self.cells.resize(end, 0);
            let blocks = end.div_ceil(self.config.block());
            if self.residency.len() < blocks {
                self.residency.resize(blocks, NIL);
            }
        }
        region
    }

    fn release(&mut self, region: Region) {
        self.stack.pop(region);
    }

    #[inline]
    fn read(&mut self, region: Region, idx: usize) -> u64 {
        let addr = region.addr(idx);
        self.touch(addr, false);
        self.cells[addr]
    }

    #[inline]
    fn write(&mut self, region: Region, idx: usize, value: u64) {
        let addr = region.addr(idx);
        self.touch(addr, true);
        self.cells[addr] = value;
    }

    fn peek(&self, region: Region, idx: usize) -> u64 {
        self.cells[region.addr(idx)]
    }
}
