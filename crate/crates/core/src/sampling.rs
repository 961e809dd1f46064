//! Bernoulli selection over index ranges and node pairs.

use rand::Rng;

/// Calls `hit(k)` for every `k` in `0..len` selected independently with probability `p`.
///
/// Sparse probabilities use geometric gap sampling, which has the same
/// distribution as one uniform draw per index.
pub(crate) fn bernoulli_indices<R: Rng + ?Sized>(
    len: usize,
    p: f64,
    rng: &mut R,
    mut hit: impl FnMut(usize),
) {
    if len == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..len).for_each(hit);
        return;
    }
    if p > 0.25 {
        for k in 0..len {
            if rng.random::<f64>() < p {
                hit(k);
            }
        }
        return;
    }
    let log_q = (-p).ln_1p();
    let mut pos = 0usize;
    loop {
        let u: f64 = rng.random();
        let gap = ((1.0 - u).ln() / log_q).floor();
        if !gap.is_finite() || gap >= (len - pos) as f64 {
            return;
        }
        pos += gap as usize;
        hit(pos);
        pos += 1;
        if pos >= len {
            return;
        }
    }
}

/// Number of off-diagonal slots: unordered pairs when undirected, ordered pairs otherwise.
pub(crate) fn pair_slots(n: usize, directed: bool) -> usize {
    if n < 2 {
        0
    } else if directed {
        n * (n - 1)
    } else {
        n * (n - 1) / 2
    }
}

/// Calls `hit(i, j)` for each off-diagonal slot selected with probability `p`.
///
/// Undirected slots are the strict lower triangle `i > j` in row-major order.
pub(crate) fn bernoulli_pairs<R: Rng + ?Sized>(
    n: usize,
    directed: bool,
    p: f64,
    rng: &mut R,
    mut hit: impl FnMut(usize, usize),
) {
    let slots = pair_slots(n, directed);
    if directed {
        let m = n - 1;
        bernoulli_indices(slots, p, rng, |k| {
            let i = k / m;
            let r = k % m;
            let j = if r >= i { r + 1 } else { r };
            hit(i, j);
        });
    } else {
        // rows are visited in increasing order, so a cursor suffices
        let mut row = 1usize;
        let mut row_start = 0usize;
        bernoulli_indices(slots, p, rng, |k| {
            while k >= row_start + row {
                row_start += row;
                row += 1;
            }
            hit(row, k - row_start);
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn extreme_probabilities() {
        let mut rng = stream(1, 0);
        let mut count = 0;
        bernoulli_indices(100, 0.0, &mut rng, |_| count += 1);
        assert_eq!(count, 0);
        bernoulli_indices(100, 1.0, &mut rng, |_| count += 1);
        assert_eq!(count, 100);
    }

    #[test]
    fn pair_enumeration_covers_every_slot_once() {
        let mut rng = stream(1, 0);
        for directed in [false, true] {
            let mut seen = vec![vec![0u32; 7]; 7];
            bernoulli_pairs(7, directed, 1.0, &mut rng, |i, j| seen[i][j] += 1);
            for i in 0..7 {
                for j in 0..7 {
                    let expected = u32::from(i != j && (directed || i > j));
                    assert_eq!(seen[i][j], expected, "({i},{j}) directed={directed}");
                }
            }
        }
    }

    #[test]
    fn gap_sampling_frequency() {
        // slot frequency for p = 0.05 over 200k slots, 3 sigma
        let mut rng = stream(9, 2);
        let len = 200_000;
        let p = 0.05;
        let mut count = 0usize;
        let mut last = None;
        bernoulli_indices(len, p, &mut rng, |k| {
            assert!(last.is_none_or(|l| k > l));
            last = Some(k);
            count += 1;
        });
        let mean = len as f64 * p;
        let sd = (len as f64 * p * (1.0 - p)).sqrt();
        assert!((count as f64 - mean).abs() < 3.0 * sd, "{count} vs {mean}");
    }
}
