//! Seeded sampling of key sets for experiments.

use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{config, Result};

/// Stream ids keep the different key populations of one experiment apart.
pub const STREAM_KEYS: u64 = 1;
pub const STREAM_QUERIES: u64 = 2;
pub const STREAM_BASELINE: u64 = 3;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// `count` distinct keys from `[0, key_mask]`, none of them in `exclude`,
/// in draw order.
pub fn distinct_keys<R: Rng>(rng: &mut R, count: usize, key_mask: u64, exclude: &[u64]) -> Result<Vec<u64>> {
    let excluded: HashSet<u64> = exclude.iter().copied().filter(|&x| x <= key_mask).collect();
    let universe = key_mask as u128 + 1;
    if count as u128 + excluded.len() as u128 > universe {
        return config(format!("cannot draw {count} distinct keys from a universe of {universe}"));
    }
    if universe <= 1 << 22 && count as u128 * 2 > universe - excluded.len() as u128 {
        // dense: sample positions among the admissible keys
        let pool: Vec<u64> = (0..=key_mask).filter(|x| !excluded.contains(x)).collect();
        return Ok(index::sample(rng, pool.len(), count).into_iter().map(|i| pool[i]).collect());
    }
    let mut seen = excluded;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = rng.gen::<u64>() & key_mask;
        if seen.insert(x) {
            out.push(x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_and_excluding() {
        for (count, mask) in [(100, 0xffff_ffff), (200, 0xff), (256, 0xff), (1000, u64::MAX)] {
            let exclude = [3u64, 7];
            let count = if mask == 0xff { count - 2 } else { count };
            let keys = distinct_keys(&mut rng(1, STREAM_KEYS), count, mask, &exclude).unwrap();
            assert_eq!(keys.len(), count);
            let set: HashSet<_> = keys.iter().collect();
            assert_eq!(set.len(), count);
            assert!(keys.iter().all(|&k| k <= mask && k != 3 && k != 7));
        }
        assert!(distinct_keys(&mut rng(1, 0), 256, 0xff, &[1]).is_err());
    }

    #[test]
    fn reproducible() {
        let a = distinct_keys(&mut rng(9, STREAM_KEYS), 50, 0xffff, &[]).unwrap();
        let b = distinct_keys(&mut rng(9, STREAM_KEYS), 50, 0xffff, &[]).unwrap();
        let c = distinct_keys(&mut rng(9, STREAM_QUERIES), 50, 0xffff, &[]).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
