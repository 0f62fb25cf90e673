//! Eisenstein series, the discriminant, and quasimodular forms of level 1
//! and 2 as polynomials in `C2` over the ring of modular forms.
//!
//! A [`QMForm`] of weight `k` and pole order `m` stands for `P / Δ^m` where
//! `P` is a polynomial in the level's three generators of total weight
//! `k + 12m`. The first generator is always `C2`, so `d/dC2` is formal
//! differentiation in the first exponent.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Solve};
use crate::qseries::{int, QSeries, Rational};

/// Extra equations beyond the dimension demanded before a decomposition is
/// accepted.
pub const DEFAULT_SURPLUS: usize = 10;

pub fn bernoulli(n: u32) -> Rational {
    let n = n as usize;
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::one());
    for m in 1..=n {
        let mut binom = BigInt::one(); // C(m+1, j)
        let mut s = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            s += bj * Rational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-s / int(m as i64 + 1));
    }
    b.pop().unwrap()
}

/// Divisor power sum `sigma_k(n)`.
pub fn sigma(k: u32, n: u64) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += num_traits::pow(BigInt::from(d), k as usize);
            let e = n / d;
            if e != d {
                s += num_traits::pow(BigInt::from(e), k as usize);
            }
        }
        d += 1;
    }
    s
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn check_eisenstein_weight(k: i64) -> Result<u32> {
    if k <= 0 || k % 2 != 0 {
        return Err(Error::InvalidEisensteinWeight(k));
    }
    Ok(k as u32)
}

/// `E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n`, through `q^order`.
pub fn eisenstein_e(k: i64, order: i64) -> Result<QSeries> {
    let k = check_eisenstein_weight(k)?;
    let factor = -int(2 * k as i64) / bernoulli(k);
    QSeries::from_fn(0, order.max(0), |n| {
        if n == 0 {
            Rational::one()
        } else {
            &factor * Rational::from_integer(sigma(k - 1, n as u64))
        }
    })
}

/// Renormalized Eisenstein series `C_k = -B_k / (k * k!) * E_k`.
pub fn eisenstein_c(k: i64, order: i64) -> Result<QSeries> {
    let k = check_eisenstein_weight(k)?;
    let constant = -bernoulli(k) / Rational::from_integer(BigInt::from(k) * factorial(k));
    let scale = Rational::new(BigInt::from(2), factorial(k));
    QSeries::from_fn(0, order.max(0), |n| {
        if n == 0 {
            constant.clone()
        } else {
            &scale * Rational::from_integer(sigma(k - 1, n as u64))
        }
    })
}

/// `Δ = q prod (1 - q^n)^24` through `q^order`, via Jacobi's
/// `prod (1 - q^n)^3 = sum (-1)^j (2j+1) q^{j(j+1)/2}`.
pub fn discriminant(order: i64) -> QSeries {
    let order = order.max(1);
    let len = order as usize; // exponents 0..order-1 of the eta^24 part
    let mut cube = vec_int(len);
    let mut j: usize = 0;
    while j * (j + 1) / 2 < len {
        let c = (2 * j + 1) as i64 * if j.is_multiple_of(2) { 1 } else { -1 };
        cube[j * (j + 1) / 2] = BigInt::from(c);
        j += 1;
    }
    let mut p = cube;
    for _ in 0..3 {
        p = square_int(&p);
    }
    QSeries::new(1, p.into_iter().map(Rational::from_integer).collect()).expect("nonempty window")
}

fn vec_int(len: usize) -> Vec<BigInt> {
    (0..len).map(|_| BigInt::zero()).collect()
}

fn square_int(a: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec_int(a.len());
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in a[..a.len() - i].iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// `Δ^{-m}` on exactly `[-m, order]`.
pub fn inverse_discriminant_power(m: u32, order: i64) -> QSeries {
    if m == 0 {
        return QSeries::one(order.max(0)).expect("nonempty window");
    }
    let m = m as i64;
    let delta_m = discriminant(order + m + 1).pow(m as u32);
    delta_m
        .invert()
        .expect("Δ has leading coefficient 1")
        .truncate(order)
        .expect("window reaches -m")
}

/// `X2 = 2 E2(q^2) - E2(q)` and `X4 = E4`, generators of the modular forms
/// for `Γ0(2)`.
pub fn level2_generators(order: i64) -> (QSeries, QSeries) {
    let e2 = eisenstein_e(2, order).expect("weight 2");
    let e2_sq = e2.b_op(2).truncate(order).expect("same window");
    let x2 = &e2_sq.scale(&int(2)) - &e2;
    (x2, eisenstein_e(4, order).expect("weight 4"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    One,
    Two,
}

impl Level {
    pub fn from_number(n: u32) -> Option<Self> {
        match n {
            1 => Some(Level::One),
            2 => Some(Level::Two),
            _ => None,
        }
    }

    pub fn number(self) -> u32 {
        match self {
            Level::One => 1,
            Level::Two => 2,
        }
    }

    pub fn generators(self) -> [Generator; 3] {
        match self {
            Level::One => [Generator::C2, Generator::C4, Generator::C6],
            Level::Two => [Generator::C2, Generator::X2, Generator::X4],
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    C2,
    C4,
    C6,
    X2,
    X4,
}

impl Generator {
    pub fn weight(self) -> i64 {
        match self {
            Generator::C2 | Generator::X2 => 2,
            Generator::C4 | Generator::X4 => 4,
            Generator::C6 => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Generator::C2 => "C2",
            Generator::C4 => "C4",
            Generator::C6 => "C6",
            Generator::X2 => "X2",
            Generator::X4 => "X4",
        }
    }

    pub fn expansion(self, order: i64) -> QSeries {
        match self {
            Generator::C2 => eisenstein_c(2, order).expect("weight 2"),
            Generator::C4 => eisenstein_c(4, order).expect("weight 4"),
            Generator::C6 => eisenstein_c(6, order).expect("weight 6"),
            Generator::X2 => level2_generators(order).0,
            Generator::X4 => eisenstein_e(4, order).expect("weight 4"),
        }
    }
}

/// Exponents of the level's three generators, `C2` first.
pub type Monomial = [u32; 3];

/// All generator monomials of the given weight, ordered by descending `C2`
/// exponent, then descending second exponent.
pub fn monomials(level: Level, weight: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    if weight < 0 || weight % 2 != 0 {
        return out;
    }
    let [w0, w1, w2] = level.generators().map(Generator::weight);
    for a in (0..=weight / w0).rev() {
        let rest = weight - a * w0;
        for b in (0..=rest / w1).rev() {
            let r = rest - b * w1;
            if r % w2 == 0 {
                out.push([a as u32, b as u32, (r / w2) as u32]);
            }
        }
    }
    out
}

/// Generator expansions and their powers at a fixed order.
struct PowerTable {
    order: i64,
    gens: [QSeries; 3],
    powers: [Vec<QSeries>; 3],
}

impl PowerTable {
    fn new(level: Level, order: i64) -> Self {
        let gens = level.generators().map(|g| g.expansion(order));
        let one = QSeries::one(order).expect("nonempty window");
        Self {
            order,
            powers: [alloc::vec![one.clone()], alloc::vec![one.clone()], alloc::vec![one]],
            gens,
        }
    }

    fn power(&mut self, i: usize, e: u32) -> &QSeries {
        while self.powers[i].len() <= e as usize {
            let next = self.powers[i].last().unwrap() * &self.gens[i];
            self.powers[i].push(next);
        }
        &self.powers[i][e as usize]
    }

    fn monomial(&mut self, m: &Monomial) -> QSeries {
        let a = self.power(0, m[0]).clone();
        let b = self.power(1, m[1]).clone();
        let c = self.power(2, m[2]).clone();
        let out = &(&a * &b) * &c;
        debug_assert_eq!(out.order(), self.order);
        out
    }
}

/// Weakly holomorphic quasimodular form `P / Δ^m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QMForm {
    level: Level,
    weight: i64,
    pole_order: u32,
    poly: BTreeMap<Monomial, Rational>,
}

impl QMForm {
    pub fn zero(level: Level, weight: i64, pole_order: u32) -> Self {
        Self {
            level,
            weight,
            pole_order,
            poly: BTreeMap::new(),
        }
    }

    /// Build from monomial terms; each monomial must have weight
    /// `weight + 12 * pole_order`.
    pub fn from_terms(
        level: Level,
        weight: i64,
        pole_order: u32,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Result<Self> {
        let total = weight + 12 * pole_order as i64;
        let gw = level.generators().map(Generator::weight);
        let mut poly: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (mono, c) in terms {
            let w: i64 = mono.iter().zip(gw).map(|(&e, w)| e as i64 * w).sum();
            if w != total {
                return Err(Error::WeightMismatch {
                    expected: total,
                    found: w,
                });
            }
            *poly.entry(mono).or_insert_with(Rational::zero) += c;
        }
        poly.retain(|_, c| !c.is_zero());
        Ok(Self {
            level,
            weight,
            pole_order,
            poly,
        })
    }

    /// A single generator as a form of pole order zero.
    pub fn generator(level: Level, g: Generator) -> Option<Self> {
        let idx = level.generators().iter().position(|&x| x == g)?;
        let mut mono = [0; 3];
        mono[idx] = 1;
        Some(Self::from_terms(level, g.weight(), 0, [(mono, Rational::one())]).expect("weight matches"))
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn pole_order(&self) -> u32 {
        self.pole_order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.poly.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Rational {
        self.poly.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_empty()
    }

    /// Degree in `C2`; `None` for the zero form.
    pub fn depth(&self) -> Option<u32> {
        self.poly.keys().map(|m| m[0]).max()
    }

    /// Formal `d/dC2`: weight drops by two, level and pole order are kept.
    pub fn ddc2(&self) -> Self {
        let poly = self
            .poly
            .iter()
            .filter(|(m, _)| m[0] > 0)
            .map(|(m, c)| ([m[0] - 1, m[1], m[2]], c * int(m[0] as i64)))
            .collect();
        Self {
            level: self.level,
            weight: self.weight - 2,
            pole_order: self.pole_order,
            poly,
        }
    }

    /// Expansion on `[-pole_order, order]`.
    pub fn to_qseries(&self, order: i64) -> QSeries {
        let m = self.pole_order as i64;
        let num_order = (order + m).max(0);
        let mut table = PowerTable::new(self.level, num_order);
        let mut num = QSeries::zero(0, num_order).expect("nonempty window");
        for (mono, c) in &self.poly {
            num = &num + &table.monomial(mono).scale(c);
        }
        let out = &num * &inverse_discriminant_power(self.pole_order, order);
        out.truncate(order).expect("window reaches -m")
    }
}

impl fmt::Display for QMForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_empty() {
            return f.write_str("0");
        }
        let names = self.level.generators().map(Generator::name);
        for (i, (mono, c)) in self.poly.iter().enumerate() {
            let mag = if c.is_negative() { -c } else { c.clone() };
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let factors: Vec<_> = mono.iter().zip(names).filter(|(&e, _)| e > 0).collect();
            if factors.is_empty() {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            for (j, (&e, name)) in factors.iter().enumerate() {
                if j > 0 {
                    f.write_str("*")?;
                }
                if e == 1 {
                    write!(f, "{name}")?;
                } else {
                    write!(f, "{name}^{e}")?;
                }
            }
        }
        if self.pole_order > 0 {
            write!(f, " / Δ^{}", self.pole_order)?;
        }
        Ok(())
    }
}

/// Expansions of `m_i / Δ^m` for every generator monomial of weight
/// `k + 12m`, each on `[-m, order]`. Fails when the window cannot separate
/// them.
pub fn basis(level: Level, weight: i64, pole_order: u32, order: i64) -> Result<Vec<QSeries>> {
    let m = pole_order as i64;
    let monos = monomials(level, weight + 12 * m);
    let num_order = (order + m).max(0);
    let mut table = PowerTable::new(level, num_order);
    let inv = inverse_discriminant_power(pole_order, order);
    let out: Vec<QSeries> = monos
        .iter()
        .map(|mono| {
            (&table.monomial(mono) * &inv)
                .truncate(order)
                .expect("window reaches -m")
        })
        .collect();
    let available = (order + m + 1).max(0) as usize;
    if !out.is_empty() {
        let cols: Vec<Vec<Rational>> = out.iter().map(|s| s.with_valuation(-m).coeffs().to_vec()).collect();
        if linalg::rank(&cols) < out.len() {
            return Err(Error::Precision {
                required: out.len(),
                available,
            });
        }
    }
    Ok(out)
}

pub fn decompose(f: &QSeries, level: Level, weight: i64, pole_order: u32) -> Result<QMForm> {
    decompose_with_surplus(f, level, weight, pole_order, DEFAULT_SURPLUS)
}

/// Write `f` as `P / Δ^m` with `P` in the level's quasimodular ring. The
/// window of `f` must hold at least `dim + surplus` coefficients from
/// `q^{-m}` on; every one of them is matched exactly.
pub fn decompose_with_surplus(
    f: &QSeries,
    level: Level,
    weight: i64,
    pole_order: u32,
    surplus: usize,
) -> Result<QMForm> {
    let m = pole_order as i64;
    let monos = monomials(level, weight + 12 * m);
    let dim = monos.len();
    let available = (f.order() + m + 1).max(0) as usize;
    if available < dim + surplus {
        return Err(Error::Precision {
            required: dim + surplus,
            available,
        });
    }

    // g = Δ^m f, known on [v_f + m, N_f + m].
    let hi = f.order() + m;
    let g = if pole_order == 0 {
        f.clone()
    } else {
        let dm = discriminant(hi - f.valuation() + 1).pow(pole_order);
        (&dm * f).truncate(hi)?
    };
    let lo = g.valuation().min(0);
    let g = g.with_valuation(lo);

    let mut table = PowerTable::new(level, hi.max(0));
    let cols: Vec<Vec<Rational>> = monos
        .iter()
        .map(|mono| table.monomial(mono).with_valuation(lo).coeffs().to_vec())
        .collect();
    let rhs = g.coeffs().to_vec();

    let solution = if dim == 0 {
        Vec::new()
    } else {
        match linalg::solve(&cols, &rhs) {
            Solve::Unique(x) => x,
            Solve::RankDeficient { .. } => {
                return Err(Error::Precision {
                    required: dim + surplus,
                    available,
                })
            }
        }
    };

    for (row, target) in rhs.iter().enumerate() {
        let fitted: Rational = cols.iter().zip(&solution).map(|(col, x)| &col[row] * x).sum();
        if &fitted != target {
            return Err(Error::NotInSpace {
                level,
                weight,
                pole_order,
                exponent: lo + row as i64 - m,
            });
        }
    }

    QMForm::from_terms(level, weight, pole_order, monos.into_iter().zip(solution))
}
