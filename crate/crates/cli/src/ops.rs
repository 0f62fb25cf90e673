//! Operators behind `quasimod apply`, with their effect on metadata.

use anyhow::{anyhow, bail, Result};
use quasimod_core::hecke::{hecke_t, t_wrong};
use quasimod_core::modforms::decompose;
use quasimod_core::potentials::{apply_mcf, degree_data, Insertion};
use quasimod_core::{Level, QSeries};

use crate::document::Metadata;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op {
    Dq,
    B {
        d: u32,
    },
    U {
        d: u32,
    },
    /// Classical `T_m`; the weight defaults to the document's.
    Hecke {
        m: u32,
        k: Option<i64>,
    },
    TWrong {
        m: u32,
        ell: i64,
    },
    Mcf {
        g: u32,
        m: u32,
        insertions: Vec<Insertion>,
    },
    /// `d/dC2`, which needs the document's level, weight and pole order.
    Ddc2,
}

fn need(meta: Option<Metadata>, op: &str) -> Result<Metadata> {
    meta.ok_or_else(|| anyhow!("{op} needs level, weight and pole order metadata"))
}

fn positive(x: u32, what: &str) -> Result<u32> {
    if x == 0 {
        bail!("{what} must be positive");
    }
    Ok(x)
}

/// Level `n * level`, if it is one we know.
fn raise(meta: Option<Metadata>, n: u32) -> Option<Metadata> {
    let meta = meta?;
    let level = Level::from_number(meta.level * n)?;
    Some(Metadata {
        level: level.number(),
        ..meta
    })
}

pub fn apply(op: &Op, f: &QSeries, meta: Option<Metadata>) -> Result<(QSeries, Option<Metadata>)> {
    Ok(match op {
        Op::Dq => (
            f.dq(),
            meta.map(|m| Metadata {
                weight: m.weight + 2,
                ..m
            }),
        ),
        Op::B { d } => {
            let d = positive(*d, "d")?;
            let meta = raise(meta, d).map(|m| Metadata {
                pole_order: m.pole_order * d,
                ..m
            });
            (f.b_op(d), meta)
        }
        Op::U { d } => (f.u_op(positive(*d, "d")?)?, None),
        Op::Hecke { m, k } => {
            let k = match (k, meta) {
                (Some(k), _) => *k,
                (None, Some(meta)) => meta.weight,
                (None, None) => bail!("hecke needs -k or a document weight"),
            };
            let m = positive(*m, "m")?;
            let meta = meta.filter(|x| x.level == 1 && x.weight == k).map(|x| Metadata {
                pole_order: x.pole_order * m,
                ..x
            });
            (hecke_t(m, k, f)?, meta)
        }
        Op::TWrong { m, ell } => {
            let m = positive(*m, "m")?;
            let meta = raise(meta, m).map(|x| Metadata {
                pole_order: x.pole_order * m,
                ..x
            });
            (t_wrong(m, *ell, f)?, meta)
        }
        Op::Mcf { g, m, insertions } => {
            let m = positive(*m, "m")?;
            let meta = Level::from_number(m).map(|l| Metadata::new(l, degree_data(*g, insertions).k, m));
            (apply_mcf(f, *g, m, insertions)?, meta)
        }
        Op::Ddc2 => {
            let meta = need(meta, "ddc2")?;
            let form = decompose(f, meta.level()?, meta.weight, meta.pole_order)?;
            let out = form.ddc2();
            let meta = Metadata {
                weight: meta.weight - 2,
                ..meta
            };
            (out.to_qseries(f.order()), Some(meta))
        }
    })
}
