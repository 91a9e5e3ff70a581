//! Comparison sorts that leave a record from which their exchange sequence
//! can be replayed without looking at the data.

use crate::error::{Error, Result};

/// Output of one recorded sort.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Transcript {
    /// Exchanges in execution order, as position pairs.
    pub swaps: Vec<(usize, usize)>,
    /// Scratch bits, packed into the low bits of a word.
    pub record: u64,
}

impl Transcript {
    /// Parity of the number of exchanges.
    pub fn parity(&self) -> bool {
        self.swaps.len() % 2 == 1
    }
}

/// A deterministic sort whose exchanges are recoverable from its record.
pub trait SortSchedule {
    /// Scratch bits needed to sort `n` keys.
    fn record_bits(&self, n: usize) -> usize;

    /// Sorts a copy of `keys` ascending and reports what it did.
    fn sort(&self, keys: &[u64]) -> Transcript;

    /// Rebuilds the exchange sequence from a record alone.
    fn decode(&self, n: usize, record: u64) -> Result<Vec<(usize, usize)>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SortKind {
    /// Heap sort; each sift-down level records (exchanged?, which child).
    #[default]
    Heap,
    /// Odd–even transposition network; one bit per comparator.
    OddEven,
}

impl SortSchedule for SortKind {
    fn record_bits(&self, n: usize) -> usize {
        match self {
            SortKind::Heap => heap_plan(n).iter().map(|s| 2 * s.levels).sum(),
            SortKind::OddEven => odd_even_comparators(n).len(),
        }
    }

    fn sort(&self, keys: &[u64]) -> Transcript {
        match self {
            SortKind::Heap => heap_sort(keys),
            SortKind::OddEven => odd_even_sort(keys),
        }
    }

    fn decode(&self, n: usize, record: u64) -> Result<Vec<(usize, usize)>> {
        match self {
            SortKind::Heap => heap_decode(n, record),
            SortKind::OddEven => Ok(odd_even_comparators(n)
                .into_iter()
                .enumerate()
                .filter(|(slot, _)| (record >> slot) & 1 == 1)
                .map(|(_, c)| c)
                .collect()),
        }
    }
}

/// Applies exchanges in order.
pub fn apply_swaps<T>(items: &mut [T], swaps: &[(usize, usize)]) {
    for &(i, j) in swaps {
        items.swap(i, j);
    }
}

/// Undoes exchanges (reverse order).
pub fn undo_swaps<T>(items: &mut [T], swaps: &[(usize, usize)]) {
    for &(i, j) in swaps.iter().rev() {
        items.swap(i, j);
    }
}

/// One step of the heap sort schedule.
#[derive(Debug, Clone, Copy)]
struct Sift {
    /// Unconditional exchange of the root with `end` before sifting (the
    /// extraction phase).
    extract: bool,
    start: usize,
    end: usize,
    levels: usize,
    slot: usize,
}

fn depth(i: usize) -> usize {
    (usize::BITS - 1 - (i + 1).leading_zeros()) as usize
}

fn heap_plan(n: usize) -> Vec<Sift> {
    let mut plan = Vec::new();
    let mut slot = 0;
    let mut push = |extract, start, end| {
        let levels = if end == 0 { 0 } else { depth(end - 1).saturating_sub(depth(start)) };
        plan.push(Sift { extract, start, end, levels, slot });
        slot += 2 * levels;
    };
    for start in (0..n / 2).rev() {
        push(false, start, n);
    }
    for end in (1..n).rev() {
        push(true, 0, end);
    }
    plan
}

fn heap_sort(keys: &[u64]) -> Transcript {
    let mut a = keys.to_vec();
    let mut t = Transcript::default();
    for s in heap_plan(keys.len()) {
        if s.extract {
            a.swap(0, s.end);
            t.swaps.push((0, s.end));
        }
        let mut root = s.start;
        for level in 0..s.levels {
            let mut child = 2 * root + 1;
            if child >= s.end {
                break;
            }
            let right = child + 1 < s.end && a[child] < a[child + 1];
            if right {
                child += 1;
            }
            if a[root] >= a[child] {
                break;
            }
            a.swap(root, child);
            t.swaps.push((root, child));
            let bit = s.slot + 2 * level;
            t.record |= 1 << bit;
            if right {
                t.record |= 1 << (bit + 1);
            }
            root = child;
        }
    }
    t
}

fn heap_decode(n: usize, record: u64) -> Result<Vec<(usize, usize)>> {
    let mut swaps = Vec::new();
    let mut used = 0u64;
    for s in heap_plan(n) {
        if s.extract {
            swaps.push((0, s.end));
        }
        let mut root = s.start;
        for level in 0..s.levels {
            let bit = s.slot + 2 * level;
            if (record >> bit) & 1 == 0 {
                break;
            }
            let child = 2 * root + 1 + ((record >> (bit + 1)) & 1) as usize;
            if child >= s.end {
                return Err(Error::invalid("sort record points outside the heap"));
            }
            used |= 0b11 << bit;
            swaps.push((root, child));
            root = child;
        }
    }
    if record & !used != 0 {
        return Err(Error::invalid("sort record has stray bits"));
    }
    Ok(swaps)
}

fn odd_even_comparators(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|round| (round % 2..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)))
        .collect()
}

fn odd_even_sort(keys: &[u64]) -> Transcript {
    let mut a = keys.to_vec();
    let mut t = Transcript::default();
    for (slot, (i, j)) in odd_even_comparators(keys.len()).into_iter().enumerate() {
        if a[i] > a[j] {
            a.swap(i, j);
            t.swaps.push((i, j));
            t.record |= 1 << slot;
        }
    }
    t
}
