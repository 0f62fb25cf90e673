//! Verification suites behind `quasimod verify`.

use std::fmt;

use anyhow::{bail, Result};
use num_traits::Zero;
use quasimod_core::catalogue::{fiber_constant_term, point_key, Catalogue};
use quasimod_core::degeneration::{assemble_f22, assemble_f22_with, crosscheck_mcf, matches_golden, GOLDEN_F22};
use quasimod_core::hecke::{c_coeff, hecke_t, t_wrong, HeckeSpec};
use quasimod_core::modforms::{decompose, discriminant, inverse_discriminant_power, monomials, QMForm};
use quasimod_core::potentials::{check_divisor_compat, reduce, Insertion, InsertionClass, PotentialExpr, PotentialKey};
use quasimod_core::qseries::{int, rat, Mismatch};
use quasimod_core::{Generator, Level, QSeries, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_250_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Commutators,
    HeckeDecomp,
    Examples,
    Degeneration,
    Compat,
    Membership,
}

impl Suite {
    pub fn min_order(self) -> i64 {
        match self {
            Suite::Commutators | Suite::Examples => 10,
            Suite::HeckeDecomp => 30,
            Suite::Degeneration => 4,
            Suite::Compat => 0,
            Suite::Membership => 45,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {}", self.name)?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Report(Vec<Check>);

impl Report {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    /// Equality on the common window, reporting the first bad exponent.
    fn series(&mut self, name: impl Into<String>, a: &QSeries, b: &QSeries) {
        let hi = a.order().min(b.order());
        match a.first_mismatch(b) {
            None => self.push(name, true, format!("equal through q^{hi}")),
            Some(Mismatch { exponent, left, right }) => self.push(
                name,
                false,
                format!("first mismatch at q^{exponent}: {left} vs {right}"),
            ),
        }
    }

    fn outcome<T>(&mut self, name: impl Into<String>, r: quasimod_core::Result<T>, describe: impl Fn(&T) -> String) {
        match r {
            Ok(x) => self.push(name, true, describe(&x)),
            Err(e) => self.push(name, false, e.to_string()),
        }
    }
}

pub fn run(suite: Suite, order: i64) -> Result<Vec<Check>> {
    if order < suite.min_order() {
        bail!("suite {suite:?} needs --order of at least {}", suite.min_order());
    }
    let mut r = Report::default();
    match suite {
        Suite::Commutators => commutators(&mut r, order)?,
        Suite::HeckeDecomp => hecke_decomp(&mut r, order)?,
        Suite::Examples => examples(&mut r, order)?,
        Suite::Degeneration => degeneration(&mut r, order)?,
        Suite::Compat => compat(&mut r)?,
        Suite::Membership => membership(&mut r, order)?,
    }
    Ok(r.0)
}

fn random_series(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> QSeries {
    QSeries::from_fn(lo, hi, |_| rat(rng.gen_range(-30..=30), rng.gen_range(1..=7))).expect("nonempty window")
}

/// Random `P / Δ^pole` whose numerator space fits `order` with room to spare.
fn random_form(rng: &mut ChaCha8Rng, level: Level, order: i64, coeffs_wanted: usize) -> QMForm {
    loop {
        let weight = 2 * rng.gen_range(-6..=6i64);
        let pole = u32::from(weight < 0 || rng.gen_bool(0.3));
        let monos = monomials(level, weight + 12 * pole as i64);
        if monos.is_empty() || monos.len() + 10 + coeffs_wanted > (order + 1) as usize {
            continue;
        }
        let terms: Vec<_> = monos.into_iter().map(|m| (m, int(rng.gen_range(-6..=6)))).collect();
        return QMForm::from_terms(level, weight, pole, terms).expect("weights match");
    }
}

fn commutators(r: &mut Report, n: i64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let f = random_series(&mut rng, -2, 6 * n);
    let small = f.truncate(n)?;
    for (d, e) in [(2u32, 3u32), (3, 2), (4, 1)] {
        r.series(
            format!("(i) B_{d} B_{e} = B_{}", d * e),
            &small.b_op(e).b_op(d),
            &small.b_op(d * e),
        );
        r.series(
            format!("(ii) U_{d} U_{e} = U_{}", d * e),
            &f.u_op(e)?.u_op(d)?.truncate(n)?,
            &f.u_op(d * e)?.truncate(n)?,
        );
        let di = int(d as i64);
        r.series(
            format!("(iii) D_q B_{d} = {d} B_{d} D_q"),
            &small.b_op(d).dq(),
            &small.dq().b_op(d).scale(&di),
        );
        r.series(
            format!("(iii) U_{d} D_q = {d} D_q U_{d}"),
            &f.dq().u_op(d)?.truncate(n)?,
            &f.u_op(d)?.dq().scale(&di).truncate(n)?,
        );
    }
    for (m, ell) in [(2u32, -2i64), (3, 5), (6, -9)] {
        r.series(
            format!("(iv) T_{{{m},{}}} D_q = {m} D_q T_{{{m},{ell}}}", ell + 2),
            &t_wrong(m, ell + 2, &f.dq())?.truncate(n)?,
            &t_wrong(m, ell, &f)?.dq().scale(&int(m as i64)).truncate(n)?,
        );
    }
    // Hecke index two leaves level one, so d/dC2 is taken at level two.
    let big = 2 * (n + 120);
    for (level, m) in [(Level::One, 1u32), (Level::One, 2), (Level::One, 2)] {
        let form = random_form(&mut rng, level, 120, 0);
        let ell = rng.gen_range(-10..=10);
        let f = form.to_qseries(big);
        let tf = t_wrong(m, ell + 2, &f)?;
        let target = Level::from_number(m).expect("m <= 2");
        let lhs = decompose(&tf, target, form.weight(), m * form.pole_order())?
            .ddc2()
            .to_qseries(n);
        let rhs = t_wrong(m, ell, &form.ddc2().to_qseries(big))?
            .scale(&int(m as i64))
            .truncate(n)?;
        r.series(
            format!(
                "(v) d/dC2 T_{{{m},{}}} = {m} T_{{{m},{ell}}} d/dC2 on weight {}",
                ell + 2,
                form.weight()
            ),
            &lhs,
            &rhs,
        );
    }
    for level in [Level::One, Level::Two, Level::Two] {
        let form = random_form(&mut rng, level, 60, 0);
        let k = form.weight();
        // D_q f lives two weights up, where the space is larger.
        let f = form.to_qseries(n + 100);
        let lhs = &decompose(&f.dq(), level, k + 2, form.pole_order())?
            .ddc2()
            .to_qseries(n)
            - &form.ddc2().to_qseries(n).dq();
        r.series(
            format!("(vi) [d/dC2, D_q] = {} at level {level}", -2 * k),
            &lhs,
            &f.truncate(n)?.scale(&int(-2 * k)),
        );
    }
    Ok(())
}

fn hecke_decomp(r: &mut Report, n: i64) -> Result<()> {
    let c = c_coeff(-12, -2, 2);
    r.push("c(-12,-2,2) = 1023/8192", c == rat(1023, 8192), c.to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let ones = (0..20).all(|_| c_coeff(rng.gen_range(-12..=12), rng.gen_range(-12..=12), 1) == int(1));
    r.push("c(k,l,1) = 1", ones, "");
    for _ in 0..6 {
        let (k, ell) = (rng.gen_range(-12..=12), rng.gen_range(-12..=12));
        let f = random_series(&mut rng, -1, 12 * n);
        let mut bad = None;
        for m in 1..=12 {
            let spec = HeckeSpec::new(m, ell, k);
            if let Some(x) = spec.apply(&f)?.first_mismatch(&spec.apply_via_classical(&f)?) {
                bad = Some(format!("m={m}: first mismatch at q^{}", x.exponent));
                break;
            }
        }
        let name = format!("T_{{m,{ell}}} = Σ c({k},{ell},a) B_a T_d for m <= 12");
        r.push(name, bad.is_none(), bad.unwrap_or_default());
    }
    for level in [Level::One, Level::Two] {
        let mut ok = 0;
        let mut failure = String::new();
        for _ in 0..10 {
            let form = random_form(&mut rng, level, n, 0);
            match decompose(&form.to_qseries(n), level, form.weight(), form.pole_order()) {
                Ok(back) if back == form => ok += 1,
                Ok(back) => failure = format!("{form} came back as {back}"),
                Err(e) => failure = e.to_string(),
            }
        }
        r.push(format!("decompose roundtrip at level {level}"), ok == 10, failure);
    }
    let dc2 = Generator::C2.expansion(n).dq();
    let want = QMForm::from_terms(Level::One, 4, 0, [([2, 0, 0], int(-2)), ([0, 1, 0], int(10))])?;
    let got = decompose(&dc2, Level::One, 4, 0)?;
    r.push("D_qC2 = -2 C2^2 + 10 C4", got == want, got.to_string());
    Ok(())
}

fn examples(r: &mut Report, n: i64) -> Result<()> {
    let f01 = inverse_discriminant_power(1, 2 * n + 2);
    let f02 = Catalogue::new().absolute(&point_key(0, 2), n)?;
    let (lead, c0) = (f02.coeff(-2).unwrap_or_default(), f02.coeff(0).unwrap_or_default());
    r.push("F_{0,2} at q^-2 is 1/8", lead == rat(1, 8), lead.to_string());
    r.push("F_{0,2} at q^0 is 27", c0 == int(27), c0.to_string());
    let b = f01.b_op(2);
    r.series(
        "F_{0,2} = U_2 F_{0,1} + 1/8 B_2 F_{0,1}",
        &f02,
        &(&f01.u_op(2)? + &b.scale(&rat(1, 8))),
    );
    r.series(
        "F_{0,2} = T_2 F_{0,1} + 1023/8192 B_2 F_{0,1}",
        &f02,
        &(&hecke_t(2, -12, &f01)? + &b.scale(&rat(1023, 8192))),
    );

    let tau1f = PotentialKey::new(1, 1, [Insertion::new(1, InsertionClass::F)]);
    let normal = reduce(&PotentialExpr::atom(tau1f));
    let want = PotentialExpr::term(rat(1, 12), 1, PotentialKey::new(0, 1, []));
    r.push("F_{1,1}(τ1(F)) = 1/12 D_q F_{0,1}", normal == want, normal.to_string());
    let x = f01.dq().scale(&rat(1, 12));
    let rhs = &hecke_t(2, -10, &x)?.scale(&int(2)) + &x.b_op(2).scale(&rat(1023, 1024));
    r.series(
        "1/3 D_q F_{0,2} = 2 T_2 F_{1,1}(τ1(F)) + 1023/1024 B_2 F_{1,1}(τ1(F))",
        &f02.dq().scale(&rat(1, 3)),
        &rhs,
    );
    Ok(())
}

fn degeneration(r: &mut Report, n: i64) -> Result<()> {
    let f = assemble_f22(n)?;
    let got: Vec<String> = (1..=4).map(|e| f.coeff(e).unwrap_or_default().to_string()).collect();
    let want: Vec<String> = GOLDEN_F22.iter().map(|(_, v)| v.to_string()).collect();
    r.push(
        "F_{2,2}(τ0(p)^2) at q^1..q^4",
        matches_golden(&f, &GOLDEN_F22),
        format!("got {}, expected {}", got.join(", "), want.join(", ")),
    );
    let c = crosscheck_mcf(n)?;
    r.series("degeneration = multiple cover formula", &c.degeneration, &c.mcf);

    let key = point_key(1, 1);
    let survivors: Vec<i64> = [-1i64, 0, 1, 2, 4, 6]
        .into_iter()
        .filter(|&e| {
            let cat = Catalogue::new().with_perturbation(key.clone(), e, Rational::from_integer(1.into()));
            assemble_f22_with(&cat, 4).is_ok_and(|f| matches_golden(&f, &GOLDEN_F22))
        })
        .collect();
    r.push(
        "perturbing F_{1,1}(τ0(p)) breaks the golden values",
        survivors.is_empty(),
        if survivors.is_empty() {
            "q^-1, q^0, q^1, q^2, q^4, q^6 all detected".to_string()
        } else {
            format!("undetected at {survivors:?}")
        },
    );
    Ok(())
}

fn compat(r: &mut Report) -> Result<()> {
    for m in 1..=2 {
        for (g, a, factor) in [(0u32, 0u32, 20), (1, 1, 16)] {
            let base = [Insertion::new(a, InsertionClass::W)];
            let rep = check_divisor_compat(g, m, &base, InsertionClass::W, |_| true)?;
            let want = reduce(&PotentialExpr::term(int(factor), 0, PotentialKey::new(g, m, base)));
            let name = format!("H_{{{g},{m}}} commutes with τ0(W), residual {factor} F_{{{g},{m}}}(τ{a}(W))");
            r.push(name, rep.holds && rep.residual == want, rep.residual.to_string());
        }
    }
    Ok(())
}

fn membership(r: &mut Report, n: i64) -> Result<()> {
    let cat = Catalogue::new();
    let d2 = discriminant(n + 5).pow(2);
    for (g, weight) in [(0u32, 12i64), (1, 16), (2, 20)] {
        let f = cat.absolute(&point_key(g, 2), n)?;
        let lifted = (&d2 * &f).truncate(n)?;
        let name = format!("Δ^2 F_{{{g},2}} lies in weight {weight} at level 2");
        r.outcome(name, decompose(&lifted, Level::Two, weight, 0), |form| {
            format!("C2-depth {}", form.depth().unwrap_or(0))
        });
    }
    let f = cat.absolute(&point_key(0, 2), n)?;
    let form = decompose(&(&d2 * &f).truncate(n)?, Level::Two, 12, 0)?;
    r.push("d/dC2 of Δ^2 F_{0,2} vanishes", form.ddc2().is_zero(), form.to_string());
    for g in 1..=5u32 {
        let f = cat.fiber_elliptic(g, 0, n)?;
        let c0 = f.coeff(0).unwrap_or_else(Rational::zero);
        let ok = c0 == fiber_constant_term(g) && decompose(&f, Level::One, 2 * g as i64, 0).is_ok();
        r.push(
            format!("F^E_{g} is quasimodular of weight {}", 2 * g),
            ok,
            format!("constant term {c0}"),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_minimum_is_enforced() {
        assert!(run(Suite::Membership, 10).is_err());
        assert!(run(Suite::Degeneration, 3).is_err());
    }

    #[test]
    fn small_suites_pass() {
        for suite in [Suite::Degeneration, Suite::Compat, Suite::Examples] {
            let checks = run(suite, 12).unwrap();
            assert!(checks.iter().all(|c| c.passed), "{:?}", checks);
        }
    }
}
