//! Deterministic work splitting.
//!
//! Scans are cut into fixed-width segments that do not depend on how many
//! workers exist; workers compute per-segment partials which are then folded
//! in segment order. Result ordering therefore never varies with thread
//! count, which is what makes the byte-identical-output guarantee possible.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Segment width for value scans. Fixed so that partial sums associate the
/// same way no matter the worker count.
pub const SCAN_SEGMENT: u64 = 1 << 16;

/// Inclusive [lo, hi] cut into [start, end] windows of at most `seg` values.
pub fn segments(lo: u64, hi: u64, seg: u64) -> Vec<(u64, u64)> {
    assert!(seg > 0, "segment width must be positive");
    let mut out = Vec::new();
    if lo > hi {
        return out;
    }
    let mut s = lo;
    loop {
        let e = s.saturating_add(seg - 1).min(hi);
        out.push((s, e));
        if e == hi {
            break;
        }
        s = e + 1;
    }
    out
}

/// True when the parallel feature is compiled in and the current rayon pool
/// actually has more than one thread. A one-thread pool runs the sequential
/// reference path, so `--workers 1` doubles as a cross-check mode.
pub fn parallel_enabled() -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads() > 1
    }
    #[cfg(not(feature = "parallel"))]
    {
        false
    }
}

/// Maps f over fixed segments of [lo, hi], returning per-segment results in
/// segment order regardless of scheduling.
pub fn map_segments<T, F>(lo: u64, hi: u64, seg: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    let segs = segments(lo, hi, seg);
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        return segs.par_iter().map(|&(s, e)| f(s, e)).collect();
    }
    segs.iter().map(|&(s, e)| f(s, e)).collect()
}

/// Runs f over disjoint chunks of a slice; f receives the chunk's start
/// offset. Chunk boundaries are fixed by `chunk`, not by the worker count.
pub fn fill_chunks<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    assert!(chunk > 0);
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i * chunk, c));
        return;
    }
    for (i, c) in data.chunks_mut(chunk).enumerate() {
        f(i * chunk, c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments_cover_exactly() {
        assert_eq!(segments(5, 4, 10), vec![]);
        assert_eq!(segments(1, 10, 4), vec![(1, 4), (5, 8), (9, 10)]);
        assert_eq!(segments(7, 7, 1), vec![(7, 7)]);
        let segs = segments(1, 1_000_000, SCAN_SEGMENT);
        assert_eq!(segs.first().unwrap().0, 1);
        assert_eq!(segs.last().unwrap().1, 1_000_000);
        let total: u64 = segs.iter().map(|&(s, e)| e - s + 1).sum();
        assert_eq!(total, 1_000_000);
    }

    #[test]
    fn map_segments_is_ordered() {
        let out = map_segments(1, 100, 7, |s, e| (s, e));
        assert_eq!(out, segments(1, 100, 7));
    }

    #[test]
    fn fill_chunks_offsets_line_up() {
        let mut v = vec![0u64; 1000];
        fill_chunks(&mut v, 64, |off, chunk| {
            for (i, slot) in chunk.iter_mut().enumerate() {
                *slot = (off + i) as u64;
            }
        });
        assert!(v.iter().enumerate().all(|(i, &x)| x == i as u64));
    }
}
