//! Independent oracles and random generators shared by the integration
//! tests. Nothing here calls into the expansion code under test.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};
use quasimod_core::modforms::{monomials, Level, QMForm};
use quasimod_core::qseries::{int, rat, QSeries, Rational};
use rand::Rng;

/// Bernoulli numbers by the Akiyama-Tanigawa algorithm (`B_1 = +1/2`).
pub fn bernoulli(n: usize) -> Rational {
    let mut a: Vec<Rational> = (0..=n).map(|m| rat(1, m as i64 + 1)).collect();
    for m in 0..=n {
        a[m] = rat(1, m as i64 + 1);
        for j in (1..=m).rev() {
            a[j - 1] = (&a[j - 1] - &a[j]) * int(j as i64);
        }
    }
    a[0].clone()
}

pub fn sigma(k: u32, n: u64) -> BigInt {
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| BigInt::from(d).pow(k))
        .sum()
}

fn factorial(n: u64) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// `-B_k / (k * k!) + (2 / k!) sum sigma_{k-1}(n) q^n`.
pub fn eisenstein_c(k: u32, order: i64) -> QSeries {
    let kf = factorial(k as u64);
    QSeries::from_fn(0, order, |n| {
        if n == 0 {
            -bernoulli(k as usize) / Rational::from_integer(BigInt::from(k) * &kf)
        } else {
            Rational::new(BigInt::from(2) * sigma(k - 1, n as u64), kf.clone())
        }
    })
    .unwrap()
}

/// `1/Δ = q^{-1} prod (1 - q^n)^{-24}`, the product coefficients coming from
/// the recurrence `n a(n) = 24 sum sigma_1(j) a(n - j)`.
pub fn inverse_delta(order: i64) -> QSeries {
    let len = (order + 2) as usize;
    let mut a = vec![BigInt::zero(); len];
    a[0] = BigInt::one();
    for n in 1..len {
        let s: BigInt = (1..=n).map(|j| sigma(1, j as u64) * &a[n - j]).sum();
        a[n] = s * 24 / n;
    }
    QSeries::new(-1, a.into_iter().map(Rational::from_integer).collect()).unwrap()
}

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    rat(rng.gen_range(-40..=40), rng.gen_range(1..=9))
}

/// Random series on `[lo, hi]` with small rational coefficients.
pub fn random_series(rng: &mut impl Rng, lo: i64, hi: i64) -> QSeries {
    QSeries::from_fn(lo, hi, |_| random_rational(rng)).unwrap()
}

/// Random `P / Δ^m` with every monomial of the right weight present with a
/// small integer coefficient. `None` when the space is empty.
pub fn random_form(rng: &mut impl Rng, level: Level, weight: i64, pole: u32) -> Option<QMForm> {
    let monos = monomials(level, weight + 12 * pole as i64);
    if monos.is_empty() {
        return None;
    }
    let terms: Vec<_> = monos.into_iter().map(|m| (m, int(rng.gen_range(-6..=6)))).collect();
    Some(QMForm::from_terms(level, weight, pole, terms).unwrap())
}
