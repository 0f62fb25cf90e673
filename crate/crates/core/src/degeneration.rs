//! Degeneration of the K3 surface to `S ∪_E (P^1 x E)` and the resulting
//! expression for `F_{2,2}(τ0(p)^2)` in terms of relative series.

use alloc::format;
use alloc::vec::Vec;

use crate::catalogue::{point_key, Catalogue, P1EKey, RelClass, RelativeProfile};
use crate::error::{Error, Result};
use crate::qseries::{int, Mismatch, QSeries, Rational};

/// One product of connected `(P^1 x E, E)` series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BubbleTerm {
    pub coeff: Rational,
    pub factors: Vec<P1EKey>,
}

/// An `(S, E)` profile glued to a sum of bubble configurations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    pub left: RelativeProfile,
    pub bubble: Vec<BubbleTerm>,
}

impl Splitting {
    /// `(#orderings) * prod μ_i / l!`.
    pub fn factor(&self) -> Rational {
        let l = self.left.len() as u64;
        let l_fact: u64 = (1..=l).product();
        Rational::new(
            (self.left.orderings() * self.left.multiplicity_product() as u64).into(),
            l_fact.into(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerationPlan {
    pub m: u32,
    pub points: u32,
    pub splittings: Vec<Splitting>,
}

fn unit(mu: u32) -> (u32, RelClass) {
    (mu, RelClass::Unit)
}

fn omega(mu: u32) -> (u32, RelClass) {
    (mu, RelClass::Omega)
}

/// `(genus, points, profile)` of one bubble factor.
type FactorSpec<'a> = (u32, u32, &'a [(u32, RelClass)]);

fn bubble(coeff: i64, factors: &[FactorSpec]) -> BubbleTerm {
    BubbleTerm {
        coeff: int(coeff),
        factors: factors
            .iter()
            .map(|&(g, n, p)| P1EKey::new(g, n, RelativeProfile::new(p.iter().copied())))
            .collect(),
    }
}

impl DegenerationPlan {
    /// Both point insertions of `F_{2,2}(τ0(p)^2)` moved to the bubble.
    pub fn genus_two_points() -> Self {
        Self {
            m: 2,
            points: 2,
            splittings: alloc::vec![
                Splitting {
                    left: RelativeProfile::new([unit(1), omega(1)]),
                    bubble: alloc::vec![
                        bubble(2, &[(1, 1, &[omega(1)]), (0, 1, &[unit(1)])]),
                        bubble(1, &[(0, 0, &[omega(1)]), (1, 2, &[unit(1)])]),
                    ],
                },
                Splitting {
                    left: RelativeProfile::new([unit(2)]),
                    bubble: alloc::vec![bubble(1, &[(1, 2, &[omega(2)])])],
                },
                Splitting {
                    left: RelativeProfile::new([unit(1), unit(1)]),
                    bubble: alloc::vec![
                        bubble(1, &[(1, 2, &[omega(1), omega(1)])]),
                        bubble(2, &[(2, 2, &[omega(1)]), (0, 0, &[omega(1)])]),
                        bubble(2, &[(1, 1, &[omega(1)]), (1, 1, &[omega(1)])]),
                    ],
                },
            ],
        }
    }

    /// Profiles must have degree `m`, never be all `ω` on the `(S, E)` side,
    /// and be matched by dual classes on the bubble, which carries every
    /// point insertion.
    pub fn validate(&self) -> Result<()> {
        for s in &self.splittings {
            if s.left.degree() != self.m {
                return Err(Error::InvalidPlan(format!(
                    "{} does not have degree {}",
                    s.left, self.m
                )));
            }
            if s.left.all_omega() {
                return Err(Error::InvalidPlan(format!("{} carries only ω", s.left)));
            }
            let want = s.left.dual().sorted();
            for t in &s.bubble {
                let joined = RelativeProfile::new(t.factors.iter().flat_map(|k| k.profile.parts.iter().copied()));
                if joined.sorted() != want {
                    return Err(Error::InvalidPlan(format!("bubble {joined} does not match {}", s.left)));
                }
                let points: u32 = t.factors.iter().map(|k| k.points).sum();
                if points != self.points {
                    return Err(Error::InvalidPlan(format!("bubble carries {points} points")));
                }
            }
        }
        Ok(())
    }

    pub fn assemble(&self, cat: &Catalogue, order: i64) -> Result<QSeries> {
        self.validate()?;
        // The (S, E) side starts at q^{-m}, so every factor needs m extra terms.
        let pad = order + self.m as i64;
        let mut acc = QSeries::zero(0, order)?;
        for s in &self.splittings {
            let mut bubble = QSeries::zero(0, pad)?;
            for t in &s.bubble {
                let mut prod = QSeries::one(pad)?;
                for k in &t.factors {
                    prod = &prod * &cat.rel_p1e(k, pad)?;
                }
                bubble = &bubble + &prod.scale(&t.coeff);
            }
            let left = cat.rel_se(&s.left, pad)?;
            let term = (&left * &bubble).scale(&s.factor());
            acc = &acc + &term;
        }
        acc.truncate(order)
    }
}

pub fn assemble_f22(order: i64) -> Result<QSeries> {
    assemble_f22_with(&Catalogue::new(), order)
}

pub fn assemble_f22_with(cat: &Catalogue, order: i64) -> Result<QSeries> {
    DegenerationPlan::genus_two_points().assemble(cat, order)
}

/// Comparison of the degeneration output with the multiple cover formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheck {
    pub holds: bool,
    pub degeneration: QSeries,
    pub mcf: QSeries,
    pub mismatch: Option<Mismatch>,
}

pub fn crosscheck_mcf(order: i64) -> Result<CrossCheck> {
    crosscheck_mcf_with(&Catalogue::new(), order)
}

pub fn crosscheck_mcf_with(cat: &Catalogue, order: i64) -> Result<CrossCheck> {
    let degeneration = assemble_f22_with(cat, order)?;
    let mcf = cat.absolute(&point_key(2, 2), order)?;
    let mismatch = degeneration.first_mismatch(&mcf);
    Ok(CrossCheck {
        holds: mismatch.is_none(),
        degeneration,
        mcf,
        mismatch,
    })
}

/// True when every listed coefficient matches.
pub fn matches_golden(f: &QSeries, golden: &[(i64, i64)]) -> bool {
    golden.iter().all(|&(e, v)| f.coeff(e) == Some(int(v)))
}

/// Printed coefficients of `F_{2,2}(τ0(p)^2)` at `q^1 .. q^4`.
pub const GOLDEN_F22: [(i64, i64); 4] = [(1, 36), (2, 8760), (3, 754992), (4, 36694512)];
