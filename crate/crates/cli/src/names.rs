//! Names accepted by `quasimod series`.
//!
//! Builtins are the generators and `Delta`/`InvDelta`. Catalogue potentials
//! are spelled `F_<g>_<m>` with an optional `_<classes>` suffix listing
//! primary insertions from `1`, `F`, `W`, `p`, so `F_2_1_pp` is
//! `F_{2,1}(τ0(p)^2)`. `FE_<g>` is the elliptic fiber series.

use anyhow::{anyhow, bail, Context, Result};
use quasimod_core::catalogue::Catalogue;
use quasimod_core::modforms::{discriminant, inverse_discriminant_power};
use quasimod_core::potentials::{Insertion, InsertionClass, PotentialExpr, PotentialKey};
use quasimod_core::{Generator, Level, QSeries};

use crate::document::Metadata;

pub const BUILTINS: [&str; 7] = ["C2", "C4", "C6", "Delta", "X2", "X4", "InvDelta"];

fn builtin(name: &str, order: i64) -> Option<(QSeries, Option<Metadata>)> {
    let generator = |g: Generator, level| (g.expansion(order), Some(Metadata::new(level, g.weight(), 0)));
    Some(match name {
        "C2" => generator(Generator::C2, Level::One),
        "C4" => generator(Generator::C4, Level::One),
        "C6" => generator(Generator::C6, Level::One),
        "X2" => generator(Generator::X2, Level::Two),
        "X4" => generator(Generator::X4, Level::Two),
        "Delta" => (discriminant(order), Some(Metadata::new(Level::One, 12, 0))),
        "InvDelta" => (
            inverse_discriminant_power(1, order),
            Some(Metadata::new(Level::One, -12, 1)),
        ),
        _ => return None,
    })
}

pub fn parse_class(c: char) -> Result<InsertionClass> {
    Ok(match c {
        '1' => InsertionClass::One,
        'F' => InsertionClass::F,
        'W' => InsertionClass::W,
        'p' => InsertionClass::Point,
        _ => bail!("unknown insertion class {c:?}; use 1, F, W or p"),
    })
}

/// Primary insertions from a string such as `pp` or `WF`.
pub fn parse_insertions(s: &str) -> Result<Vec<Insertion>> {
    s.chars().map(|c| parse_class(c).map(Insertion::tau0)).collect()
}

fn number(part: Option<&str>, what: &str, name: &str) -> Result<u32> {
    part.ok_or_else(|| anyhow!("{name}: missing {what}"))?
        .parse()
        .with_context(|| format!("{name}: bad {what}"))
}

/// Metadata only when the divisibility is a level with a known basis.
fn potential(name: &str, order: i64) -> Result<(QSeries, Option<Metadata>)> {
    let mut parts = name.split('_').skip(1);
    let g = number(parts.next(), "genus", name)?;
    let m = number(parts.next(), "divisibility", name)?;
    let insertions = parse_insertions(parts.next().unwrap_or(""))?;
    if parts.next().is_some() || m == 0 {
        bail!("{name}: expected F_<g>_<m>[_<classes>] with m >= 1");
    }
    let key = PotentialKey::new(g, m, insertions);
    let weight = key.degree_data().k;
    let f = Catalogue::new().evaluate(&PotentialExpr::atom(key), order)?;
    Ok((f, Level::from_number(m).map(|l| Metadata::new(l, weight, m))))
}

fn fiber(name: &str, order: i64) -> Result<(QSeries, Option<Metadata>)> {
    let g = number(name.strip_prefix("FE_"), "genus", name)?;
    let f = Catalogue::new().fiber_elliptic(g, 0, order)?;
    Ok((f, Some(Metadata::new(Level::One, 2 * g as i64, 0))))
}

pub fn resolve(name: &str, order: i64) -> Result<(QSeries, Option<Metadata>)> {
    if let Some(hit) = builtin(name, order) {
        return Ok(hit);
    }
    if name.starts_with("FE_") {
        return fiber(name, order);
    }
    if name.starts_with("F_") {
        return potential(name, order);
    }
    bail!(
        "unknown series {name:?}; expected one of {}, F_<g>_<m>[_<classes>] or FE_<g>",
        BUILTINS.join(", ")
    )
}
