use rand::Rng;

use super::zeta::hurwitz_zeta;

pub const DEFAULT_TABLE_CAP: u64 = 1_000_000;

/// Discrete power law `P(k) = k^{-α} / ζ(α, k_min)` for `k ≥ k_min`.
///
/// Inverse-CDF sampling from a cumulative table up to `cap`; the remaining
/// mass above `cap` is drawn from the continuous Pareto approximation.
#[derive(Debug, Clone)]
pub struct DiscretePowerLaw {
    alpha: f64,
    k_min: u64,
    cap: u64,
    cdf: Vec<f64>,
    table_mass: f64,
}

impl DiscretePowerLaw {
    pub fn new(alpha: f64, k_min: u64, cap: u64) -> Self {
        assert!(alpha > 1.0 && k_min >= 1);
        let z = hurwitz_zeta(alpha, k_min as f64);
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        if cap >= k_min {
            cdf.reserve((cap - k_min + 1) as usize);
            for k in k_min..=cap {
                acc += (k as f64).powf(-alpha) / z;
                cdf.push(acc);
            }
        }
        let table_mass = if cap >= k_min { 1.0 - hurwitz_zeta(alpha, (cap + 1) as f64) / z } else { 0.0 };
        Self { alpha, k_min, cap: cap.max(k_min - 1), cdf, table_mass }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k_min(&self) -> u64 {
        self.k_min
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.gen();
        if u < self.table_mass {
            let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
            return self.k_min + idx as u64;
        }
        // P(K ≥ k | K > cap) ≈ ((k − ½) / (cap + ½))^{1−α}
        let v: f64 = 1.0 - rng.gen::<f64>();
        let base = self.cap as f64 + 0.5;
        let k = (base * v.powf(-1.0 / (self.alpha - 1.0)) + 0.5).floor();
        if k >= u64::MAX as f64 {
            u64::MAX
        } else {
            (k as u64).max(self.cap + 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn head_frequencies_match_pmf() {
        let pl = DiscretePowerLaw::new(2.5, 1, 10_000);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 200_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let k = pl.sample(&mut rng);
            assert!(k >= 1);
            if k <= 4 {
                counts[k as usize - 1] += 1;
            }
        }
        let z = hurwitz_zeta(2.5, 1.0);
        for (i, &c) in counts.iter().enumerate() {
            let p = ((i + 1) as f64).powf(-2.5) / z;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((c as f64 / n as f64 - p).abs() < 5.0 * se, "k={} ", i + 1);
        }
    }

    #[test]
    fn tail_beyond_cap_is_heavy() {
        // with a tiny table most draws go through the Pareto branch
        let pl = DiscretePowerLaw::new(2.0, 5, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let draws: Vec<u64> = (0..n).map(|_| pl.sample(&mut rng)).collect();
        assert!(draws.iter().all(|&k| k >= 5));
        // P(K ≥ 100) = ζ(2, 100) / ζ(2, 5)
        let p = hurwitz_zeta(2.0, 100.0) / hurwitz_zeta(2.0, 5.0);
        let got = draws.iter().filter(|&&k| k >= 100).count() as f64 / n as f64;
        assert!((got - p).abs() < 0.01, "{got} vs {p}");
    }

    #[test]
    fn kmin_above_cap() {
        let pl = DiscretePowerLaw::new(3.0, 50, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..1000).all(|_| pl.sample(&mut rng) >= 50));
    }
}
