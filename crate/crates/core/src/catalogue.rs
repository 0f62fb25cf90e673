//! Closed-form generating series that seed every computation: the
//! primitive K3 potentials, the elliptic fiber series, and the relative
//! series of `(S, E)` and `(P^1 x E, E)` used by the degeneration formula.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::modforms::{eisenstein_c, inverse_discriminant_power};
use crate::potentials::{apply_mcf, reduce, Insertion, InsertionClass, PotentialExpr, PotentialKey};
use crate::qseries::{int, rat, QSeries, Rational};

/// Class carried by a contact point with the divisor `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelClass {
    Unit,
    Omega,
}

impl RelClass {
    pub fn dual(self) -> Self {
        match self {
            RelClass::Unit => RelClass::Omega,
            RelClass::Omega => RelClass::Unit,
        }
    }
}

impl fmt::Display for RelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelClass::Unit => "1",
            RelClass::Omega => "ω",
        })
    }
}

/// Cohomology weighted partition `((μ_1, δ_1), ..., (μ_l, δ_l))`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelativeProfile {
    pub parts: Vec<(u32, RelClass)>,
}

impl RelativeProfile {
    pub fn new(parts: impl IntoIterator<Item = (u32, RelClass)>) -> Self {
        let parts: Vec<_> = parts.into_iter().collect();
        assert!(parts.iter().all(|&(mu, _)| mu >= 1), "multiplicities are positive");
        Self { parts }
    }

    pub fn degree(&self) -> u32 {
        self.parts.iter().map(|p| p.0).sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Parts in a canonical order, for comparing unordered profiles.
    pub fn sorted(&self) -> Self {
        let mut parts = self.parts.clone();
        parts.sort();
        Self { parts }
    }

    pub fn dual(&self) -> Self {
        Self::new(self.parts.iter().map(|&(mu, c)| (mu, c.dual())))
    }

    pub fn all_omega(&self) -> bool {
        self.parts.iter().all(|p| p.1 == RelClass::Omega)
    }

    pub fn multiplicity_product(&self) -> u32 {
        self.parts.iter().map(|p| p.0).product()
    }

    /// Number of distinct orderings of the parts.
    pub fn orderings(&self) -> u64 {
        let sorted = self.sorted();
        let mut count = factorial(sorted.len() as u64);
        let mut i = 0;
        while i < sorted.parts.len() {
            let j = (i..sorted.parts.len())
                .find(|&j| sorted.parts[j] != sorted.parts[i])
                .unwrap_or(sorted.parts.len());
            count /= factorial((j - i) as u64);
            i = j;
        }
        count
    }
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

impl fmt::Display for RelativeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (mu, c)) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({mu},{c})")?;
        }
        f.write_str(")")
    }
}

/// Connected relative potential of `(P^1 x E, E)` with point insertions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct P1EKey {
    pub g: u32,
    pub points: u32,
    pub profile: RelativeProfile,
}

impl P1EKey {
    pub fn new(g: u32, points: u32, profile: RelativeProfile) -> Self {
        Self { g, points, profile }
    }
}

impl fmt::Display for P1EKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "G_{{{},{}}}(τ0(p)^{} | {})",
            self.g,
            self.profile.degree(),
            self.points,
            self.profile
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CatalogueRef {
    Absolute(PotentialKey),
    /// `F^E_g(τ_{g-1}(ω) τ0(ω)^r)` of the elliptic curve.
    FiberElliptic {
        g: u32,
        omega_points: u32,
    },
    /// Relative series of `(S, E)` in divisibility two without insertions.
    RelSE(RelativeProfile),
    RelP1E(P1EKey),
}

impl fmt::Display for CatalogueRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogueRef::Absolute(k) => write!(f, "{k}"),
            CatalogueRef::FiberElliptic { g, omega_points } => {
                write!(f, "F^E_{g}(τ{}(ω)", g.saturating_sub(1))?;
                if *omega_points > 0 {
                    write!(f, " τ0(ω)^{omega_points}")?;
                }
                f.write_str(")")
            }
            CatalogueRef::RelSE(p) => write!(f, "F^rel_2(∅ | {p})"),
            CatalogueRef::RelP1E(k) => write!(f, "{k}"),
        }
    }
}

/// Key of `F_{g,m}(τ0(p)^g)`, the only absolute entries.
pub fn point_key(g: u32, m: u32) -> PotentialKey {
    PotentialKey::new(g, m, (0..g).map(|_| Insertion::tau0(InsertionClass::Point)))
}

/// True for keys with a closed form in any divisibility.
pub fn is_catalogued(key: &PotentialKey) -> bool {
    key.marker.is_none() && key.g <= 2 && *key == point_key(key.g, key.m)
}

fn dq_c2(order: i64) -> QSeries {
    eisenstein_c(2, order).expect("weight 2").dq()
}

/// The series catalogue, optionally with additive perturbations of the
/// primitive entries.
#[derive(Debug, Clone, Default)]
pub struct Catalogue {
    perturbations: BTreeMap<PotentialKey, Vec<(i64, Rational)>>,
}

impl Catalogue {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `delta q^exponent` to the primitive series of `key`. Every
    /// quantity derived from it changes accordingly.
    pub fn with_perturbation(mut self, key: PotentialKey, exponent: i64, delta: Rational) -> Self {
        let key = key.at_divisibility(1);
        self.perturbations.entry(key).or_default().push((exponent, delta));
        self
    }

    /// Divisibility-one series on `[-1, order]`.
    pub fn primitive(&self, key: &PotentialKey, order: i64) -> Result<QSeries> {
        let key = key.at_divisibility(1);
        if !is_catalogued(&key) {
            return Err(Error::Uncatalogued(key.to_string()));
        }
        let inv = inverse_discriminant_power(1, order);
        let d = dq_c2(order + 1);
        let mut f = match key.g {
            0 => inv,
            1 => &d * &inv,
            _ => &(&d * &d) * &inv,
        };
        if let Some(list) = self.perturbations.get(&key) {
            let mut cs = f.coeffs().to_vec();
            for (e, delta) in list {
                let idx = e - f.valuation();
                if (0..cs.len() as i64).contains(&idx) {
                    cs[idx as usize] += delta;
                }
            }
            f = QSeries::new(f.valuation(), cs)?;
        }
        Ok(f)
    }

    /// Any catalogued absolute key, through the multiple cover formula.
    pub fn absolute(&self, key: &PotentialKey, order: i64) -> Result<QSeries> {
        if key.m == 1 {
            return self.primitive(key, order);
        }
        let m = key.m as i64;
        let prim = self.primitive(key, m * order.max(0) + m)?;
        apply_mcf(&prim, key.g, key.m, key.insertions())?.truncate(order)
    }

    pub fn fiber_elliptic(&self, g: u32, omega_points: u32, order: i64) -> Result<QSeries> {
        if g == 0 {
            return Err(Error::Uncatalogued(
                CatalogueRef::FiberElliptic { g, omega_points }.to_string(),
            ));
        }
        let factor = Rational::new(
            (1..=g).fold(BigInt::from(1), |acc, i| acc * BigInt::from(i)),
            BigInt::from(2).pow(g - 1),
        );
        Ok(eisenstein_c(2 * g as i64, order)?.scale(&factor).dq_pow(omega_points))
    }

    /// `(S, E)` relative series in divisibility two.
    pub fn rel_se(&self, profile: &RelativeProfile, order: i64) -> Result<QSeries> {
        use RelClass::*;
        let pad = order + 2;
        let f02 = self.absolute(&point_key(0, 2), pad)?;
        let c2 = eisenstein_c(2, pad)?;
        let dc2 = c2.dq();
        let sorted = profile.sorted();
        let out = match &sorted.parts[..] {
            [(1, Unit), (1, Unit)] => f02.scale(&int(2)),
            [(1, Unit), (1, Omega)] => {
                let f12 = self.absolute(&point_key(1, 2), pad)?;
                &f12 - &(&f02 * &dc2).scale(&int(2))
            }
            [(2, Unit)] => &f02.dq().scale(&rat(1, 3)) - &(&c2 * &f02).scale(&int(4)),
            _ => return Err(Error::Uncatalogued(CatalogueRef::RelSE(profile.clone()).to_string())),
        };
        out.truncate(order)
    }

    /// `(P^1 x E, E)` relative series.
    pub fn rel_p1e(&self, key: &P1EKey, order: i64) -> Result<QSeries> {
        use RelClass::*;
        let dc2 = || dq_c2(order);
        let sorted = key.profile.sorted();
        let out = match (key.g, key.points, &sorted.parts[..]) {
            (0, 1, [(1, Unit)]) | (0, 0, [(1, Omega)]) => QSeries::one(order)?,
            (1, 1, [(1, Omega)]) => dc2(),
            (1, 2, [(1, Unit)]) => dc2().scale(&int(2)),
            (2, 2, [(1, Omega)]) => dc2().pow(2),
            (1, 2, [(2, Omega)]) => dc2().dq(),
            (1, 2, [(1, Omega), (1, Omega)]) => dc2().dq_pow(2),
            _ => return Err(Error::Uncatalogued(key.to_string())),
        };
        Ok(out)
    }

    pub fn base_series(&self, r: &CatalogueRef, order: i64) -> Result<QSeries> {
        match r {
            CatalogueRef::Absolute(k) => self.absolute(k, order),
            CatalogueRef::FiberElliptic { g, omega_points } => self.fiber_elliptic(*g, *omega_points, order),
            CatalogueRef::RelSE(p) => self.rel_se(p, order),
            CatalogueRef::RelP1E(k) => self.rel_p1e(k, order),
        }
    }

    /// Reduce `expr` and expand every remaining atom.
    pub fn evaluate(&self, expr: &PotentialExpr, order: i64) -> Result<QSeries> {
        let normal = reduce(expr);
        let mut acc = QSeries::zero(0, order)?;
        for (c, j, key) in normal.terms() {
            let s = self.absolute(key, order)?.dq_pow(j).scale(c);
            acc = &acc + &s;
        }
        Ok(acc)
    }
}

/// Constant term of `F^E_g(τ_{g-1}(ω))` from the Bernoulli numbers.
pub fn fiber_constant_term(g: u32) -> Rational {
    let g2 = 2 * g;
    let fact = |n: u32| (1..=n).fold(BigInt::from(1), |acc, i| acc * BigInt::from(i));
    let denom = BigInt::from(2).pow(g - 1) * BigInt::from(g2) * fact(g2);
    -crate::modforms::bernoulli(g2) * Rational::new(fact(g), denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::discriminant;
    use crate::potentials::InsertionClass::*;
    use alloc::format;
    use num_traits::Zero;

    fn unit(mu: u32) -> (u32, RelClass) {
        (mu, RelClass::Unit)
    }

    fn omega(mu: u32) -> (u32, RelClass) {
        (mu, RelClass::Omega)
    }

    #[test]
    fn primitive_entries() {
        let cat = Catalogue::new();
        let f01 = cat.primitive(&point_key(0, 1), 4).unwrap();
        assert_eq!(f01.coeff(0), Some(int(24)));
        let f21 = cat.primitive(&point_key(2, 1), 3).unwrap();
        assert_eq!(f21.valuation(), -1);
        assert_eq!(f21.coeff(-1), Some(int(0)));
        assert_eq!(f21.coeff(0), Some(int(0)));
        assert_eq!(f21.coeff(1), Some(int(1)));
        // Oracle: multiply back by Δ.
        let d = dq_c2(20);
        let f11 = cat.primitive(&point_key(1, 1), 19).unwrap();
        assert!((&f11 * &discriminant(25)).agrees_with(&d));
    }

    #[test]
    fn divisibility_two_is_mcf() {
        let cat = Catalogue::new();
        let f02 = cat.absolute(&point_key(0, 2), 10).unwrap();
        assert_eq!((f02.valuation(), f02.order()), (-2, 10));
        assert_eq!(f02.coeff(-2), Some(rat(1, 8)));
        assert_eq!(f02.coeff(0), Some(int(27)));
        for g in 0..=2 {
            let k = point_key(g, 2);
            let prim = cat.primitive(&k, 24).unwrap();
            let direct = apply_mcf(&prim, g, 2, k.insertions()).unwrap();
            assert!(direct.agrees_with(&cat.absolute(&k, 12).unwrap()));
        }
    }

    #[test]
    fn uncatalogued_keys() {
        let cat = Catalogue::new();
        let k = PotentialKey::new(1, 1, [Insertion::new(2, One)]);
        assert!(!is_catalogued(&k));
        assert_eq!(cat.absolute(&k, 5), Err(Error::Uncatalogued(k.to_string())));
        assert!(is_catalogued(&point_key(2, 7)));
    }

    #[test]
    fn fiber_series() {
        let cat = Catalogue::new();
        let f2 = cat.fiber_elliptic(2, 0, 3).unwrap();
        assert_eq!(f2.coeff(1), Some(rat(1, 12)));
        for g in 1..=5 {
            let f = cat.fiber_elliptic(g, 0, 2).unwrap();
            assert_eq!(f.coeff(0).unwrap(), fiber_constant_term(g));
            // Sign of the constant term is the sign of -B_{2g}.
            let positive = g % 2 == 0;
            assert_eq!(f.coeff(0).unwrap() > Rational::zero(), positive);
        }
        let f = cat.fiber_elliptic(1, 2, 5).unwrap();
        assert!(f.agrees_with(&dq_c2(5).dq()));
    }

    #[test]
    fn relative_se_leading_terms() {
        let cat = Catalogue::new();
        let a = cat.rel_se(&RelativeProfile::new([unit(1), unit(1)]), 4).unwrap();
        assert_eq!(a.coeff(-2), Some(rat(1, 4)));
        let b = cat.rel_se(&RelativeProfile::new([unit(2)]), 4).unwrap();
        // (1/3)(-2)(1/8) - 4(-1/24)(1/8)
        assert_eq!(b.coeff(-2), Some(rat(-1, 16)));
        let c = cat.rel_se(&RelativeProfile::new([omega(1), unit(1)]), 4).unwrap();
        assert_eq!(c.valuation(), -2);
        assert!(cat.rel_se(&RelativeProfile::new([omega(2)]), 4).is_err());
    }

    #[test]
    fn relative_p1e_entries() {
        let cat = Catalogue::new();
        let g = |g, n, p: &[(u32, RelClass)]| {
            cat.rel_p1e(&P1EKey::new(g, n, RelativeProfile::new(p.iter().copied())), 6)
                .unwrap()
        };
        assert_eq!(g(1, 1, &[omega(1)]).coeff(1), Some(int(1)));
        assert_eq!(g(1, 2, &[omega(1), omega(1)]).coeff(1), Some(int(1)));
        assert_eq!(g(1, 2, &[omega(1), omega(1)]).coeff(2), Some(int(24)));
        assert!(g(0, 0, &[omega(1)]).agrees_with(&QSeries::one(6).unwrap()));
        assert!(cat
            .rel_p1e(&P1EKey::new(3, 0, RelativeProfile::new([unit(1)])), 3)
            .is_err());
    }

    #[test]
    fn evaluate_reduces_first() {
        let cat = Catalogue::new();
        let e = PotentialExpr::atom(PotentialKey::new(1, 2, [Insertion::new(1, F)]));
        let got = cat.evaluate(&e, 20).unwrap();
        let want = cat.absolute(&point_key(0, 2), 20).unwrap().dq().scale(&rat(1, 3));
        assert!(got.agrees_with(&want));
    }

    #[test]
    fn perturbation_propagates() {
        let cat = Catalogue::new().with_perturbation(point_key(1, 1), 2, int(1));
        let base = Catalogue::new();
        let d = &cat.primitive(&point_key(1, 1), 8).unwrap() - &base.primitive(&point_key(1, 1), 8).unwrap();
        assert_eq!(d.leading_exponent(), Some(2));
        assert_ne!(
            cat.absolute(&point_key(1, 2), 5).unwrap(),
            base.absolute(&point_key(1, 2), 5).unwrap()
        );
    }

    #[test]
    fn profile_helpers() {
        let p = RelativeProfile::new([unit(1), omega(1)]);
        assert_eq!(p.orderings(), 2);
        assert_eq!(RelativeProfile::new([unit(1), unit(1)]).orderings(), 1);
        assert_eq!(p.dual().sorted(), p.sorted());
        assert_eq!(format!("{p}"), "((1,1),(1,ω))");
        assert!(RelativeProfile::new([omega(2)]).all_omega());
    }
}
