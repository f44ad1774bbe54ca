//! Segmented crossing-out over an integer interval.
//!
//! Primes no larger than the segment length keep a running "next multiple"
//! cursor. Larger primes have at most one multiple per segment, so they are
//! handled cofactor by cofactor: for a fixed `m`, the primes with `m·p` in the
//! segment form a contiguous run found by binary search.

use alloc::vec;
use alloc::vec::Vec;

/// Calls `visit(base, alive)` for consecutive segments covering `(lo, hi]`,
/// where `alive[i]` is nonzero exactly when `base + i` has no prime factor in
/// `sieving` (which must be sorted).
pub(crate) fn for_each_segment(
    lo: u64,
    hi: u64,
    sieving: &[u32],
    segment_len: usize,
    mut visit: impl FnMut(u64, &[u8]),
) {
    if hi <= lo {
        return;
    }
    let seg = segment_len.max(64) as u64;
    let split = sieving.partition_point(|&p| (p as u64) <= seg);
    let (small, large) = sieving.split_at(split);
    let start = lo + 1;
    let mut next: Vec<u64> = small
        .iter()
        .map(|&p| {
            let p = p as u64;
            start.div_ceil(p) * p
        })
        .collect();
    let mut buf = vec![1u8; seg as usize];
    let mut s = start;
    while s <= hi {
        let e = (s + seg).min(hi + 1); // segment is [s, e)
        let len = (e - s) as usize;
        let alive = &mut buf[..len];
        alive.fill(1);
        for (cursor, &p) in next.iter_mut().zip(small) {
            let p = p as u64;
            let mut j = *cursor;
            while j < e {
                alive[(j - s) as usize] = 0;
                j += p;
            }
            *cursor = j;
        }
        if let Some(&first) = large.first() {
            let first = first as u64;
            let active = &large[..large.partition_point(|&p| (p as u64) < e)];
            let m_max = (e - 1) / first;
            if m_max as usize <= active.len() {
                for m in 1..=m_max {
                    let a = s.div_ceil(m);
                    let b = e.div_ceil(m); // primes in [a, b)
                    let i = active.partition_point(|&p| (p as u64) < a);
                    let j = active.partition_point(|&p| (p as u64) < b);
                    for &p in &active[i..j] {
                        alive[(m * p as u64 - s) as usize] = 0;
                    }
                }
            } else {
                for &p in active {
                    let p = p as u64;
                    let j = s.div_ceil(p) * p;
                    if j < e {
                        alive[(j - s) as usize] = 0;
                    }
                }
            }
        }
        visit(s, alive);
        s = e;
    }
}

/// Survivor count in `(lo, hi]`.
pub(crate) fn count_survivors(lo: u64, hi: u64, sieving: &[u32], segment_len: usize) -> u64 {
    let mut total = 0u64;
    for_each_segment(lo, hi, sieving, segment_len, |_, alive| {
        total += alive.iter().map(|&a| a as u64).sum::<u64>();
    });
    total
}
