//! Weighted sampling without replacement by successive renormalized draws.
//!
//! Each draw picks a remaining item with probability `w_i / Σ remaining w`,
//! then removes it. Weights live in a sum tree so a draw costs `O(log n)`.
//! Once every remaining weight is zero the urn falls back to uniform draws
//! over what is left and reports it through [`WeightedUrn::fell_back`].

use rand::Rng;

#[derive(Clone, Debug)]
pub struct WeightedUrn {
    leaves: usize,
    tree: Vec<f64>,
    remaining: usize,
    alive: Vec<bool>,
    fell_back: bool,
}

impl WeightedUrn {
    pub fn new(weights: &[f64]) -> Self {
        let leaves = weights.len().next_power_of_two().max(1);
        let mut tree = vec![0.0; 2 * leaves];
        for (i, &w) in weights.iter().enumerate() {
            assert!(w.is_finite() && w >= 0.0, "invalid weight {w}");
            tree[leaves + i] = w;
        }
        for i in (1..leaves).rev() {
            tree[i] = tree[2 * i] + tree[2 * i + 1];
        }
        WeightedUrn {
            leaves,
            tree,
            remaining: weights.len(),
            alive: vec![true; weights.len()],
            fell_back: false,
        }
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    /// True once at least one draw was made uniformly because all remaining
    /// weights were zero.
    pub fn fell_back(&self) -> bool {
        self.fell_back
    }

    fn total(&self) -> f64 {
        self.tree[1]
    }

    fn set(&mut self, item: usize, w: f64) {
        let mut i = self.leaves + item;
        self.tree[i] = w;
        while i > 1 {
            i /= 2;
            self.tree[i] = self.tree[2 * i] + self.tree[2 * i + 1];
        }
    }

    /// Draw and remove one item; `None` when the urn is empty.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<usize> {
        if self.remaining == 0 {
            return None;
        }
        let item = if self.total() > 0.0 {
            let mut u = rng.random::<f64>() * self.total();
            let mut i = 1;
            while i < self.leaves {
                let (left, right) = (self.tree[2 * i], self.tree[2 * i + 1]);
                if left > 0.0 && (u < left || right <= 0.0) {
                    i *= 2;
                } else {
                    u -= left;
                    i = 2 * i + 1;
                }
            }
            i - self.leaves
        } else {
            self.fell_back = true;
            let k = rng.random_range(0..self.remaining);
            self.alive
                .iter()
                .enumerate()
                .filter(|(_, &a)| a)
                .nth(k)
                .map(|(i, _)| i)
                .expect("remaining count out of sync")
        };
        self.alive[item] = false;
        self.remaining -= 1;
        self.set(item, 0.0);
        Some(item)
    }

    /// Draw up to `k` distinct items in draw order.
    pub fn draw_many<R: Rng + ?Sized>(&mut self, k: usize, rng: &mut R) -> Vec<usize> {
        let mut out = Vec::with_capacity(k.min(self.remaining));
        while out.len() < k {
            match self.draw(rng) {
                Some(i) => out.push(i),
                None => break,
            }
        }
        out
    }
}

/// Convenience: `k` distinct indices drawn without replacement.
pub fn weighted_sample<R: Rng + ?Sized>(weights: &[f64], k: usize, rng: &mut R) -> (Vec<usize>, bool) {
    let mut urn = WeightedUrn::new(weights);
    let picked = urn.draw_many(k, rng);
    (picked, urn.fell_back())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn draws_are_distinct_and_exhaustive() {
        let mut rng = seeded(1);
        let (picked, fell_back) = weighted_sample(&[1.0, 0.0, 3.0, 2.0, 0.0], 5, &mut rng);
        let mut sorted = picked.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
        assert!(fell_back);
        // Positive weights are exhausted before any zero-weight item.
        assert!(picked[..3].iter().all(|&i| i != 1 && i != 4));
    }

    #[test]
    fn first_draw_matches_weights() {
        let weights = [1.0, 2.0, 3.0, 4.0];
        let trials = 40_000;
        let mut counts = [0usize; 4];
        let mut rng = seeded(7);
        for _ in 0..trials {
            let mut urn = WeightedUrn::new(&weights);
            counts[urn.draw(&mut rng).unwrap()] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let p = weights[i] / 10.0;
            let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (c as f64 - trials as f64 * p).abs() < 4.0 * sigma,
                "item {i}: {c}"
            );
        }
    }

    #[test]
    fn second_draw_is_renormalized() {
        // After removing item 0 (weight 2) the others share {1, 1}.
        let trials = 20_000;
        let mut second_is_one = 0;
        let mut first_zero = 0;
        let mut rng = seeded(11);
        for _ in 0..trials {
            let mut urn = WeightedUrn::new(&[2.0, 1.0, 1.0]);
            if urn.draw(&mut rng) == Some(0) {
                first_zero += 1;
                if urn.draw(&mut rng) == Some(1) {
                    second_is_one += 1;
                }
            }
        }
        let ratio = second_is_one as f64 / first_zero as f64;
        assert!((ratio - 0.5).abs() < 0.03, "{ratio}");
    }

    #[test]
    fn empty_urn() {
        let mut urn = WeightedUrn::new(&[]);
        assert_eq!(urn.draw(&mut seeded(0)), None);
    }
}
