//! Truncated Laurent series in `q` over exact rationals.
//!
//! A [`QSeries`] knows its coefficients on an explicit window
//! `[valuation, order]`. Every exponent below the valuation is exactly zero;
//! every exponent above the order is unknown. Operations propagate the window
//! so that no result ever claims a coefficient it cannot determine.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n/d` as a rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `base^exp` for a possibly negative exponent.
pub fn pow_i(base: i64, exp: i64) -> Rational {
    assert!(base != 0 || exp >= 0, "zero to a negative power");
    let p = num_traits::pow(BigInt::from(base), exp.unsigned_abs() as usize);
    if exp >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    valuation: i64,
    coeffs: Vec<Rational>,
}

/// First exponent at which two series disagree on their common window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub exponent: i64,
    pub left: Rational,
    pub right: Rational,
}

impl QSeries {
    pub fn new(valuation: i64, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyWindow {
                lo: valuation,
                hi: valuation - 1,
            });
        }
        Ok(Self { valuation, coeffs })
    }

    /// Series on `[lo, hi]` with coefficient `f(n)` at `q^n`.
    pub fn from_fn(lo: i64, hi: i64, f: impl FnMut(i64) -> Rational) -> Result<Self> {
        if hi < lo {
            return Err(Error::EmptyWindow { lo, hi });
        }
        Ok(Self {
            valuation: lo,
            coeffs: (lo..=hi).map(f).collect(),
        })
    }

    pub fn zero(lo: i64, hi: i64) -> Result<Self> {
        Self::from_fn(lo, hi, |_| Rational::zero())
    }

    /// The constant `c`, known through `q^order`.
    pub fn constant(c: Rational, order: i64) -> Result<Self> {
        Self::monomial(0, c, order)
    }

    pub fn one(order: i64) -> Result<Self> {
        Self::constant(Rational::one(), order)
    }

    /// `c * q^exponent`, known through `q^order`.
    pub fn monomial(exponent: i64, c: Rational, order: i64) -> Result<Self> {
        let mut c = Some(c);
        Self::from_fn(exponent, order, |n| {
            if n == exponent {
                c.take().unwrap_or_else(Rational::zero)
            } else {
                Rational::zero()
            }
        })
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// Highest exponent with a known coefficient.
    pub fn order(&self) -> i64 {
        self.valuation + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `q^n`; `None` when `n` lies above the known window.
    pub fn coeff(&self, n: i64) -> Option<Rational> {
        if n < self.valuation {
            Some(Rational::zero())
        } else if n > self.order() {
            None
        } else {
            Some(self.coeffs[(n - self.valuation) as usize].clone())
        }
    }

    fn at(&self, n: i64) -> &Rational {
        &self.coeffs[(n - self.valuation) as usize]
    }

    fn get_or_zero(&self, n: i64) -> Rational {
        if n < self.valuation || n > self.order() {
            Rational::zero()
        } else {
            self.at(n).clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Exponent of the first nonzero known coefficient.
    pub fn leading_exponent(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.valuation + i as i64)
    }

    /// Forget every coefficient above `q^order`.
    pub fn truncate(&self, order: i64) -> Result<Self> {
        let hi = order.min(self.order());
        if hi < self.valuation {
            return Err(Error::EmptyWindow { lo: self.valuation, hi });
        }
        let len = (hi - self.valuation + 1) as usize;
        Ok(Self {
            valuation: self.valuation,
            coeffs: self.coeffs[..len].to_vec(),
        })
    }

    /// Re-express on `[lo, order]` with `lo <= valuation`, padding with the
    /// known zeros.
    pub fn with_valuation(&self, lo: i64) -> Self {
        if lo >= self.valuation {
            return self.clone();
        }
        let pad = (self.valuation - lo) as usize;
        let mut coeffs = Vec::with_capacity(pad + self.coeffs.len());
        coeffs.resize(pad, Rational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { valuation: lo, coeffs }
    }

    /// Compare coefficientwise on `[min(v), min(N)]`.
    pub fn first_mismatch(&self, other: &Self) -> Option<Mismatch> {
        let lo = self.valuation.min(other.valuation);
        let hi = self.order().min(other.order());
        (lo..=hi).find_map(|n| {
            let (a, b) = (self.get_or_zero(n), other.get_or_zero(n));
            (a != b).then_some(Mismatch {
                exponent: n,
                left: a,
                right: b,
            })
        })
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Common denominator and integer numerators.
    fn integral_parts(&self) -> (Vec<BigInt>, BigInt) {
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self.coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        (nums, den)
    }

    /// Multiplicative inverse; requires a nonzero coefficient at the
    /// valuation. The result has valuation `-v` and the same relative
    /// precision.
    pub fn invert(&self) -> Result<Self> {
        let lead = self.at(self.valuation);
        if lead.is_zero() {
            return Err(Error::ZeroLeadingCoefficient {
                exponent: self.valuation,
            });
        }
        // f = A/D with A integral, so 1/f = D * h_n / A0^(n+1) where
        // h_0 = 1 and h_n = -sum_{j=1..n} A_j A0^(j-1) h_{n-j}.
        let (a, den) = self.integral_parts();
        let len = a.len();
        let a0 = &a[0];
        let mut a0_pows = Vec::with_capacity(len + 1);
        a0_pows.push(BigInt::one());
        for i in 1..=len {
            let next = &a0_pows[i - 1] * a0;
            a0_pows.push(next);
        }
        let mut h: Vec<BigInt> = Vec::with_capacity(len);
        h.push(BigInt::one());
        for n in 1..len {
            let mut s = BigInt::zero();
            for j in 1..=n {
                if !a[j].is_zero() && !h[n - j].is_zero() {
                    s += &a[j] * &a0_pows[j - 1] * &h[n - j];
                }
            }
            h.push(-s);
        }
        let coeffs = h
            .into_iter()
            .enumerate()
            .map(|(n, hn)| Rational::new(&den * hn, a0_pows[n + 1].clone()))
            .collect();
        Ok(Self {
            valuation: -self.valuation,
            coeffs,
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        match e {
            0 => Self::one(self.order() - self.valuation).expect("nonempty window"),
            1 => self.clone(),
            _ => {
                let half = self.pow(e / 2);
                let sq = &half * &half;
                if e % 2 == 1 {
                    &sq * self
                } else {
                    sq
                }
            }
        }
    }

    /// `D_q = q d/dq`: `a_n -> n a_n`.
    pub fn dq(&self) -> Self {
        Self {
            valuation: self.valuation,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigInt::from(self.valuation + i as i64))
                .collect(),
        }
    }

    pub fn dq_pow(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |f, _| f.dq())
    }

    /// `B_d`: substitute `q -> q^d`. Window `[dv, dN]`.
    pub fn b_op(&self, d: u32) -> Self {
        assert!(d >= 1, "B_d needs d >= 1");
        if d == 1 {
            return self.clone();
        }
        let d = d as i64;
        let lo = d * self.valuation;
        let hi = d * self.order();
        let mut coeffs = Vec::with_capacity((hi - lo + 1) as usize);
        for n in lo..=hi {
            if n.rem_euclid(d) == 0 {
                coeffs.push(self.at(n / d).clone());
            } else {
                coeffs.push(Rational::zero());
            }
        }
        Self { valuation: lo, coeffs }
    }

    /// `U_d`: keep `a_{dn}` at `q^n`. Window `[ceil(v/d), floor(N/d)]`.
    pub fn u_op(&self, d: u32) -> Result<Self> {
        assert!(d >= 1, "U_d needs d >= 1");
        let d = d as i64;
        let lo = Integer::div_ceil(&self.valuation, &d);
        let hi = Integer::div_floor(&self.order(), &d);
        Self::from_fn(lo, hi, |n| self.at(d * n).clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.valuation + i as i64, c))
    }
}

impl<'a> Add<&'a QSeries> for &'a QSeries {
    type Output = QSeries;

    fn add(self, rhs: &'a QSeries) -> QSeries {
        let lo = self.valuation.min(rhs.valuation);
        let hi = self.order().min(rhs.order());
        // hi >= lo always holds: each order is at least its own valuation.
        QSeries {
            valuation: lo,
            coeffs: (lo..=hi).map(|n| self.get_or_zero(n) + rhs.get_or_zero(n)).collect(),
        }
    }
}

impl<'a> Sub<&'a QSeries> for &'a QSeries {
    type Output = QSeries;

    fn sub(self, rhs: &'a QSeries) -> QSeries {
        self + &(-rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;

    fn neg(self) -> QSeries {
        QSeries {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> Mul<&'a QSeries> for &'a QSeries {
    type Output = QSeries;

    /// Cauchy product on `[v_f + v_g, min(v_f + N_g, v_g + N_f)]`.
    fn mul(self, rhs: &'a QSeries) -> QSeries {
        let len = self.coeffs.len().min(rhs.coeffs.len());
        let (a, da) = self.integral_parts();
        let (b, db) = rhs.integral_parts();
        let den = da * db;
        let coeffs = (0..len)
            .map(|n| {
                let mut s = BigInt::zero();
                for i in 0..=n {
                    if !a[i].is_zero() && !b[n - i].is_zero() {
                        s += &a[i] * &b[n - i];
                    }
                }
                Rational::new(s, den.clone())
            })
            .collect();
        QSeries {
            valuation: self.valuation + rhs.valuation,
            coeffs,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<QSeries> for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a QSeries> for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: &'a QSeries) -> QSeries {
                (&self).$m(rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        -&self
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries[{}..={}](", self.valuation, self.order())?;
        for (i, (n, c)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}:{c}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for QSeries {
    /// `a q^n + ... + O(q^{N+1})`, skipping zero terms.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.iter().filter(|(_, c)| !c.is_zero()) {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => write!(f, "q^{n}")?,
                _ => write!(f, "{mag}*q^{n}")?,
            }
        }
        if !first {
            f.write_str(" + ")?;
        }
        write!(f, "O(q^{})", self.order() + 1)
    }
}
