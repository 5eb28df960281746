//! Seeded rejection sampling of generic numeric points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hypnum::{CNum, PointV, PointW};

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_BUDGET: usize = 10_000;
pub const BUDGET_ENV: &str = "WEYLHYP_REJECTION_BUDGET";

/// Minimum separation between real parts of the free coordinates.
pub const JITTER: f64 = 1e-3;

pub fn budget_from_env() -> usize {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&b| b > 0)
        .unwrap_or(DEFAULT_BUDGET)
}

/// A deterministic stream of points. Each accepted point advances the
/// stream, so the k-th point for a seed never changes.
pub struct Sampler {
    rng: ChaCha8Rng,
    budget: usize,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler::with_budget(seed, budget_from_env())
    }

    pub fn with_budget(seed: u64, budget: usize) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), budget }
    }

    fn draw<const N: usize>(&mut self) -> [CNum; N] {
        loop {
            let mut re = [0.0; N];
            for x in re.iter_mut() {
                *x = self.rng.gen_range(0.1..=0.9);
            }
            let mut sorted = re;
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).any(|w| w[1] - w[0] < JITTER) {
                continue;
            }
            let mut out = [CNum::default(); N];
            for (o, r) in out.iter_mut().zip(re) {
                *o = CNum::new(r, self.rng.gen_range(-0.3..=0.3));
            }
            return out;
        }
    }

    pub fn point_w(&mut self, admissible: impl Fn(&PointW) -> bool) -> Result<PointW> {
        for _ in 0..self.budget {
            let p = PointW::new(self.draw::<7>());
            if admissible(&p) {
                return Ok(p);
            }
        }
        Err(Error::RejectionBudget(self.budget))
    }

    pub fn point_v(&mut self, admissible: impl Fn(&PointV) -> bool) -> Result<PointV> {
        for _ in 0..self.budget {
            let p = PointV::new(self.draw::<6>());
            if admissible(&p) {
                return Ok(p);
            }
        }
        Err(Error::RejectionBudget(self.budget))
    }

    /// Free parameters for a twiddle point `(x0..x5)`.
    pub fn twiddle(&mut self) -> [CNum; 6] {
        let mut out = self.draw::<6>();
        // centre on zero so that sign flips stay in range
        for z in out.iter_mut() {
            z.re -= 0.5;
        }
        out
    }

    /// Uniform complex number with both parts in `[-r, r]`.
    pub fn complex(&mut self, r: f64) -> CNum {
        CNum::new(self.rng.gen_range(-r..=r), self.rng.gen_range(-r..=r))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_point() {
        let a = Sampler::with_budget(7, 100).point_w(|_| true).unwrap();
        let b = Sampler::with_budget(7, 100).point_w(|_| true).unwrap();
        assert_eq!(a, b);
        let c = Sampler::with_budget(8, 100).point_w(|_| true).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn ranges_and_hyperplane() {
        let mut s = Sampler::with_budget(1, 100);
        for _ in 0..50 {
            let p = s.point_w(|_| true).unwrap();
            let w = p.coords();
            for z in &w[..7] {
                assert!((0.1..=0.9).contains(&z.re) && z.im.abs() <= 0.3);
            }
            let r: CNum = w[1..].iter().sum::<CNum>() - 3.0 * w[0] - 2.0;
            assert!(r.norm() < 1e-14);
        }
    }

    #[test]
    fn budget_exhaustion() {
        let mut s = Sampler::with_budget(3, 20);
        assert_eq!(s.point_v(|_| false), Err(Error::RejectionBudget(20)));
    }
}
