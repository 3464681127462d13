//! Shared test oracles, independent of the library's computation paths.
#![allow(dead_code)]

use euler_zeta::rng::SplitMix64;
use euler_zeta::value::ComplexRational;
use num::BigRational;

/// Brute-force local coefficients: expand prod_k (1 - alpha_k x)^{-1} as a
/// truncated power series by explicit polynomial multiplication of the
/// geometric factors. Exact; the independent oracle for the Newton
/// recurrence.
pub fn brute_force_local_series(alphas: &[ComplexRational], r_max: usize) -> Vec<ComplexRational> {
    let mut acc = vec![ComplexRational::zero(); r_max + 1];
    acc[0] = ComplexRational::one();
    for alpha in alphas {
        // geometric series 1 + alpha x + alpha^2 x^2 + ...
        let mut geom = Vec::with_capacity(r_max + 1);
        let mut pow = ComplexRational::one();
        for _ in 0..=r_max {
            geom.push(pow.clone());
            pow = &pow * alpha;
        }
        let mut next = vec![ComplexRational::zero(); r_max + 1];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, g) in geom.iter().take(r_max + 1 - i).enumerate() {
                next[i + j] = &next[i + j] + &(a * g);
            }
        }
        acc = next;
    }
    acc
}

/// Random Gaussian rational with |v| <= 1 and denominators <= 12.
pub fn random_unit_disc_value(rng: &mut SplitMix64) -> ComplexRational {
    loop {
        let den = (rng.next_u64() % 12 + 1) as i64;
        let num_re = (rng.next_u64() % (2 * den as u64 + 1)) as i64 - den;
        let den2 = (rng.next_u64() % 12 + 1) as i64;
        let num_im = (rng.next_u64() % (2 * den2 as u64 + 1)) as i64 - den2;
        let v = ComplexRational::new(
            BigRational::new(num_re.into(), den.into()),
            BigRational::new(num_im.into(), den2.into()),
        );
        if v.magnitude_at_most_one() {
            return v;
        }
    }
}

/// Random real rational in [-1, 1] with denominator <= 12.
pub fn random_real_value(rng: &mut SplitMix64) -> ComplexRational {
    let den = (rng.next_u64() % 12 + 1) as i64;
    let num = (rng.next_u64() % (2 * den as u64 + 1)) as i64 - den;
    ComplexRational::new(BigRational::new(num.into(), den.into()), BigRational::from_integer(0.into()))
}
