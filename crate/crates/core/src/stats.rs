//! Seeding, sampling helpers and small statistics.

use rand_core::{RngCore, SeedableRng};

/// RNG used for every shot draw. One stream per (master seed, task).
pub type SimRng = rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Uniform draw on `[0, 1)` with 53 random bits.
pub fn uniform01(rng: &mut SimRng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable seed for a task identified by `path` under `master`.
///
/// Depends only on the arguments, so a cell's seed does not change with
/// scheduling order or with which other cells run.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |h, &p| splitmix64(h ^ splitmix64(p)))
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation with denominator `len - 1`; zero for fewer
/// than two values.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    libm::sqrt(ss / (xs.len() - 1) as f64)
}

/// Value at `u = 0` of the polynomial through `(u_i, y_i)` (Neville).
///
/// With `u = θ²` this is Richardson extrapolation of a quantity whose
/// error expands in even powers of `θ`.
pub fn extrapolate_to_zero(us: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(us.len(), ys.len());
    let mut p: alloc::vec::Vec<f64> = ys.to_vec();
    let m = us.len();
    for level in 1..m {
        for i in 0..(m - level) {
            let (ui, uj) = (us[i], us[i + level]);
            p[i] = (uj * p[i] - ui * p[i + 1]) / (uj - ui);
        }
    }
    p[0]
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let mx = mean(xs);
    let my = mean(ys);
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Log-log slope, i.e. the fitted exponent `p` in `y ≈ K xᵖ`.
pub fn fit_power_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: alloc::vec::Vec<f64> = xs.iter().map(|&x| libm::log(x)).collect();
    let ly: alloc::vec::Vec<f64> = ys.iter().map(|&y| libm::log(y)).collect();
    fit_slope(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(derive_seed(7, &[1, 2, 3]), derive_seed(7, &[1, 2, 3]));
        assert_ne!(derive_seed(7, &[1, 2, 3]), derive_seed(7, &[1, 3, 2]));
        assert_ne!(derive_seed(7, &[1]), derive_seed(8, &[1]));
    }

    #[test]
    fn std_matches_textbook_formula() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        // Σ(x-5)² = 32, / 7
        assert!((sample_std(&xs) - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!(sample_std(&[3.0]), 0.0);
    }

    #[test]
    fn extrapolation_is_exact_for_polynomials() {
        let us = [0.04, 0.01, 0.0025];
        let ys: alloc::vec::Vec<f64> = us.iter().map(|u| 1.5 - 2.0 * u + 0.7 * u * u).collect();
        assert!((extrapolate_to_zero(&us, &ys) - 1.5).abs() < 1e-13);
    }

    #[test]
    fn power_fit_recovers_exponent() {
        let xs = [0.1, 0.2, 0.4];
        let ys: alloc::vec::Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        assert!((fit_power_exponent(&xs, &ys) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut r = rng(1);
        for _ in 0..1000 {
            let u = uniform01(&mut r);
            assert!((0.0..1.0).contains(&u));
        }
    }
}
