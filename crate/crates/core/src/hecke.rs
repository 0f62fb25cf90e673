//! Hecke operators on expansions, including the "wrong weight" variant
//! `T_{m,l}` and the Dirichlet-convolution coefficients relating the two.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::Result;
use crate::qseries::{pow_i, QSeries, Rational};

/// Möbius function. Panics on `n == 0`.
pub fn mobius(n: u64) -> i64 {
    assert!(n >= 1, "mobius needs n >= 1");
    let mut n = n;
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// `sum_{ad=m} a^{w-1} B_a U_d f`.
fn hecke_sum(m: u32, w: i64, f: &QSeries) -> Result<QSeries> {
    assert!(m >= 1, "Hecke index must be positive");
    let mut acc: Option<QSeries> = None;
    for a in divisors(m as u64) {
        let d = m as u64 / a;
        let term = f.u_op(d as u32)?.b_op(a as u32).scale(&pow_i(a as i64, w - 1));
        acc = Some(match acc {
            None => term,
            Some(s) => &s + &term,
        });
    }
    Ok(acc.expect("m has at least one divisor"))
}

/// Classical `T_m` in weight `k`.
pub fn hecke_t(m: u32, k: i64, f: &QSeries) -> Result<QSeries> {
    hecke_sum(m, k, f)
}

/// `T_{m,l}`: the Hecke formula with `l` in place of the operand's weight.
pub fn t_wrong(m: u32, ell: i64, f: &QSeries) -> Result<QSeries> {
    hecke_sum(m, ell, f)
}

/// `c_{k,l}(a) = sum_{r | a} r^{l-1} mu(a/r) (a/r)^{k-1}`, so that
/// `T_{m,l} = sum_{ad=m} c_{k,l}(a) B_a T_d` on weight-`k` operands.
pub fn c_coeff(k: i64, ell: i64, a: u32) -> Rational {
    assert!(a >= 1, "c_coeff needs a >= 1");
    let mut s = Rational::zero();
    for r in divisors(a as u64) {
        let q = a as u64 / r;
        let mu = mobius(q);
        if mu != 0 {
            s += pow_i(r as i64, ell - 1) * pow_i(q as i64, k - 1) * Rational::from_integer(mu.into());
        }
    }
    s
}

/// Index, acting weight and operand weight of a Hecke operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HeckeSpec {
    pub m: u32,
    pub ell: i64,
    pub k: i64,
}

impl HeckeSpec {
    pub fn new(m: u32, ell: i64, k: i64) -> Self {
        assert!(m >= 1, "Hecke index must be positive");
        Self { m, ell, k }
    }

    pub fn apply(&self, f: &QSeries) -> Result<QSeries> {
        t_wrong(self.m, self.ell, f)
    }

    /// The same operator written through classical Hecke operators.
    pub fn apply_via_classical(&self, f: &QSeries) -> Result<QSeries> {
        let mut acc: Option<QSeries> = None;
        for a in divisors(self.m as u64) {
            let d = self.m / a as u32;
            let term = hecke_t(d, self.k, f)?
                .b_op(a as u32)
                .scale(&c_coeff(self.k, self.ell, a as u32));
            acc = Some(match acc {
                None => term,
                Some(s) => &s + &term,
            });
        }
        Ok(acc.expect("m has at least one divisor"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::{discriminant, inverse_discriminant_power, sigma};
    use crate::qseries::{int, rat};

    #[test]
    fn mobius_values() {
        let want = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(mobius(i as u64 + 1), *w, "mu({})", i + 1);
        }
    }

    #[test]
    fn t1_is_identity() {
        let f = inverse_discriminant_power(1, 10);
        assert_eq!(hecke_t(1, -12, &f).unwrap(), f);
        assert_eq!(t_wrong(1, 7, &f).unwrap(), f);
    }

    #[test]
    fn t2_of_inverse_discriminant() {
        let f = inverse_discriminant_power(1, 12);
        let want = &f.u_op(2).unwrap() + &f.b_op(2).scale(&pow_i(2, -13));
        assert_eq!(hecke_t(2, -12, &f).unwrap(), want);

        let g = t_wrong(2, -2, &f).unwrap();
        assert_eq!((g.valuation(), g.order()), (-2, 6));
        assert_eq!(g.coeff(-2), Some(rat(1, 8)));
        assert_eq!(g.coeff(0), Some(int(27)));
    }

    #[test]
    fn constants_scale_by_divisor_sums() {
        let one = QSeries::one(12).unwrap();
        for m in 1..=6u32 {
            for k in [2i64, 4, 6] {
                let want = Rational::from_integer(sigma(k as u32 - 1, m as u64));
                let got = hecke_t(m, k, &one).unwrap();
                assert_eq!(got.coeff(0), Some(want));
                assert!(got.iter().all(|(n, c)| n == 0 || c.is_zero()));
            }
        }
    }

    #[test]
    fn dirichlet_coefficients() {
        assert_eq!(c_coeff(-12, -2, 2), rat(1023, 8192));
        assert_eq!(c_coeff(-10, 0, 2), rat(1023, 2048));
        for (k, l) in [(-12, -2), (4, 9), (0, 0)] {
            assert_eq!(c_coeff(k, l, 1), int(1));
        }
        // Equal weights collapse the convolution to the identity.
        for a in 2..12 {
            assert_eq!(c_coeff(6, 6, a), Rational::zero());
        }
    }

    #[test]
    fn classical_route_agrees_on_delta() {
        let d = discriminant(40);
        let spec = HeckeSpec::new(6, 3, 12);
        assert_eq!(spec.apply(&d).unwrap(), spec.apply_via_classical(&d).unwrap());
        // Δ is a Hecke eigenform with eigenvalue tau(2) = -24.
        let t2 = hecke_t(2, 12, &d).unwrap();
        assert!(t2.agrees_with(&d.scale(&int(-24))));
    }
}
