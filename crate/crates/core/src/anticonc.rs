//! Empirical harness for discrete anti-concentration bounds.
//!
//! For a real homogeneous `f` of degree `r` in `n` variables and a threshold
//! `α = β^r`, the tested event is
//!
//! ```text
//! f(v)² ≤ (α − δ(8nr²)^{n+1})² · ‖f‖₂²,   v uniform on G_δ,
//! ```
//!
//! and its probability is compared against `C·r·β`. The threshold scales
//! with `‖f‖₂`, so `f` is never normalized. When `α` does not exceed the
//! grid correction the row is *vacuous*; its probability is still reported
//! with the threshold clamped at zero.
//!
//! The complex variant samples `G_δ^ℂ`, uses the correction
//! `δ(16nr²)^{2n+1}/2`, takes `α = β^r/2` so that `(2α)^{1/r} = β`, and
//! scales by the upper bound `2(‖Re f‖₂² + ‖Im f‖₂²)` on `‖f‖₂²`. The
//! enlarged event makes a passing row imply the statement for the true norm.

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, GridVariant, Seed};
use crate::norms::{complex_l2_parts, l2_norm_sq_direct};
use crate::poly::DensePoly;
use crate::scalar::{int, pow, rat, rational_str, GaussianRational, Rational};

pub const DEFAULT_C: i64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The corrected threshold is negative; the statement says nothing.
    Vacuous,
    /// Every point is below the threshold; only the fitted constant is informative.
    Saturated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sampled { samples: usize, seed: Seed },
    Exhaustive,
}

#[derive(Clone, Debug, Serialize)]
pub struct CWRow {
    #[serde(with = "rational_str")]
    pub beta: Rational,
    #[serde(with = "rational_str")]
    pub alpha: Rational,
    /// `α − correction`, possibly negative.
    #[serde(with = "rational_str")]
    pub corrected: Rational,
    /// Squared threshold compared against `|f(v)|²`.
    #[serde(with = "rational_str")]
    pub threshold_sq: Rational,
    pub hits: u64,
    pub total: u64,
    #[serde(with = "rational_str")]
    pub empirical: Rational,
    /// `C·r·β`.
    #[serde(with = "rational_str")]
    pub bound: Rational,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct CWReport {
    pub n: usize,
    pub r: u32,
    pub complex: bool,
    #[serde(with = "rational_str")]
    pub delta: Rational,
    #[serde(with = "rational_str")]
    pub correction: Rational,
    #[serde(with = "rational_str")]
    pub c: Rational,
    /// `‖f‖₂²`, or its upper bound in the complex case.
    #[serde(with = "rational_str")]
    pub norm_sq: Rational,
    pub mode: Mode,
    pub rows: Vec<CWRow>,
    /// `max p / (r·β)` over non-vacuous rows with `β > 0`.
    #[serde(with = "rational_str")]
    pub fitted_c: Rational,
}

impl CWReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Fail)
    }

    /// `(α, empirical, bound, status)` rows; the decimal column is labeled
    /// as an approximation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,beta,empirical,empirical_approx,bound,status\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.6},{},{:?}\n",
                row.alpha,
                row.beta,
                row.empirical,
                crate::scalar::approx(&row.empirical),
                row.bound,
                row.status
            ));
        }
        out
    }
}

/// `δ(8nr²)^{n+1}`.
pub fn real_correction(n: usize, r: u32, delta: &Rational) -> Rational {
    let (n, r) = (n as i64, r as i64);
    delta * pow(&int(8 * n * r * r), n as u32 + 1)
}

/// `δ(16nr²)^{2n+1} / 2`.
pub fn complex_correction(n: usize, r: u32, delta: &Rational) -> Rational {
    let (n, r) = (n as i64, r as i64);
    delta * pow(&int(16 * n * r * r), 2 * n as u32 + 1) / int(2)
}

/// Squared moduli of `f` on the chosen points, hit counts per threshold.
fn count_below(values: &[Rational], thresholds: &[Rational]) -> Vec<u64> {
    thresholds
        .iter()
        .map(|t| values.iter().filter(|v| *v <= t).count() as u64)
        .collect()
}

fn values_on(f: &DensePoly, grid: &GridSpec, mode: Mode) -> Result<Vec<Rational>> {
    let eval = |p: Vec<GaussianRational>| f.eval(&p).map(|v| v.norm_sq());
    match mode {
        Mode::Sampled { samples, seed } => grid.sample(seed, samples).into_par_iter().map(eval).collect(),
        Mode::Exhaustive => {
            let size = grid
                .size()
                .to_u64()
                .filter(|&s| s <= 50_000_000)
                .ok_or_else(|| Error::Budget(format!("grid of {} points is too large to enumerate", grid.size())))?;
            (0..size).into_par_iter().map(|i| eval(grid.point_u64(i))).collect()
        }
    }
}

struct Setup {
    grid: GridSpec,
    correction: Rational,
    norm_sq: Rational,
    complex: bool,
}

fn run(f: &DensePoly, s: Setup, betas: &[Rational], c: &Rational, mode: Mode) -> Result<CWReport> {
    let r = f.degree();
    let alphas: Vec<Rational> = betas
        .iter()
        .map(|b| if s.complex { pow(b, r) / int(2) } else { pow(b, r) })
        .collect();
    let corrected: Vec<Rational> = alphas.iter().map(|a| a - &s.correction).collect();
    let thresholds: Vec<Rational> = corrected
        .iter()
        .map(|t| {
            let t = if t.is_negative() { Rational::zero() } else { t.clone() };
            &t * &t * &s.norm_sq
        })
        .collect();
    let values = if betas.is_empty() { Vec::new() } else { values_on(f, &s.grid, mode)? };
    let total = values.len() as u64;
    let hits = count_below(&values, &thresholds);
    let r_rat = int(r as i64);

    let mut fitted = Rational::zero();
    let mut rows = Vec::with_capacity(betas.len());
    for i in 0..betas.len() {
        let empirical = if total == 0 { Rational::zero() } else { rat(hits[i] as i64, total as i64) };
        let bound = c * &r_rat * &betas[i];
        let vacuous = corrected[i].is_negative();
        let status = if vacuous {
            Status::Vacuous
        } else if hits[i] == total {
            Status::Saturated
        } else if empirical <= bound {
            Status::Pass
        } else {
            Status::Fail
        };
        if !vacuous && !betas[i].is_zero() {
            let ratio = &empirical / (&r_rat * &betas[i]);
            if ratio > fitted {
                fitted = ratio;
            }
        }
        rows.push(CWRow {
            beta: betas[i].clone(),
            alpha: alphas[i].clone(),
            corrected: corrected[i].clone(),
            threshold_sq: thresholds[i].clone(),
            hits: hits[i],
            total,
            empirical,
            bound,
            status,
        });
    }
    Ok(CWReport {
        n: f.n(),
        r,
        complex: s.complex,
        delta: s.grid.delta.clone(),
        correction: s.correction,
        c: c.clone(),
        norm_sq: s.norm_sq,
        mode,
        rows,
        fitted_c: fitted,
    })
}

pub fn cw_test_real(f: &DensePoly, delta: &Rational, betas: &[Rational], c: &Rational, mode: Mode) -> Result<CWReport> {
    let norm_sq = l2_norm_sq_direct(f)?;
    if norm_sq.is_zero() {
        return Err(Error::Degenerate("‖f‖₂ = 0".into()));
    }
    let setup = Setup {
        grid: GridSpec::new(f.n(), delta.clone(), GridVariant::Real)?,
        correction: real_correction(f.n(), f.degree(), delta),
        norm_sq,
        complex: false,
    };
    run(f, setup, betas, c, mode)
}

pub fn cw_test_complex(
    f: &DensePoly,
    delta: &Rational,
    betas: &[Rational],
    c: &Rational,
    mode: Mode,
) -> Result<CWReport> {
    let parts = complex_l2_parts(f);
    if parts.lower().is_zero() {
        return Err(Error::Degenerate("‖f‖₂ = 0".into()));
    }
    let setup = Setup {
        grid: GridSpec::new(f.n(), delta.clone(), GridVariant::Complex)?,
        correction: complex_correction(f.n(), f.degree(), delta),
        norm_sq: parts.upper(),
        complex: true,
    };
    run(f, setup, betas, c, mode)
}

/// `(p̂ − p)² ≤ 9·p(1−p)/N`: the sampled estimate lies within three standard
/// deviations of the exact probability.
pub fn within_three_sigma(sampled: &Rational, exact: &Rational, samples: usize) -> bool {
    let d = sampled - exact;
    let one = Rational::from_integer(1.into());
    &d * &d * int(samples as i64) <= int(9) * exact * (one - exact)
}
