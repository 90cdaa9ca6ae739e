//! Derived parameters for robust hitting-set constructions.
//!
//! Every quantity is an exact rational or integer. Unnamed constants are
//! configuration: `C_CW` (default 2), the size exponent `c_size` (default 1)
//! and the dimension/degree exponent `c_var` (default 1).

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::unit_fraction_denominator;
use crate::poly::n_hom;
use crate::scalar::{ceil_int, int, parse_rational, pow, pow_int, rational_str, Rational};

pub const DEFAULT_C_CW: i64 = 2;

mod biguint_str {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Optional replacements for the computed values. `eta` cascades into `δ`
/// and `ε_alg` unless those are overridden as well.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamOverrides {
    pub c_cw: Option<Rational>,
    pub c_size: Option<u32>,
    pub c_var: Option<u32>,
    pub eta: Option<Rational>,
    pub delta: Option<Rational>,
    pub eps_alg: Option<Rational>,
    pub m: Option<u64>,
}

impl ParamOverrides {
    /// Applies one `key=value` pair.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let q = || parse_rational(value).map_err(Error::from);
        let u = || -> Result<u64> {
            value.parse().map_err(|_| Error::validation(format!("`{key}` expects an integer, got `{value}`")))
        };
        match key {
            "c_cw" | "ccw" => self.c_cw = Some(q()?),
            "c_size" => self.c_size = Some(u()? as u32),
            "c_var" => self.c_var = Some(u()? as u32),
            "eta" => self.eta = Some(q()?),
            "delta" => self.delta = Some(q()?),
            "eps_alg" | "eps" => self.eps_alg = Some(q()?),
            "m" => self.m = Some(u()?),
            _ => return Err(Error::validation(format!("unknown parameter `{key}`"))),
        }
        Ok(())
    }

    pub fn parse_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::validation(format!("override `{pair}` is not key=value")))?;
        self.set(k.trim(), v.trim())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamBundle {
    pub n: usize,
    pub s: usize,
    pub r: u32,
    #[serde(with = "rational_str")]
    pub c_cw: Rational,
    pub c_size: u32,
    pub c_var: u32,
    #[serde(with = "biguint_str")]
    pub n_hom: BigUint,
    /// `2^{-n} / (20 (C_CW n r²)^r)`.
    #[serde(with = "rational_str")]
    pub eta: Rational,
    /// Alternate reading `2^{-n} / (2 (C_CW n r)^r)`, reported only.
    #[serde(with = "rational_str")]
    pub eta_alt: Rational,
    /// `η / (16 n r²)^{2n+1}` before rounding.
    #[serde(with = "rational_str")]
    pub delta_raw: Rational,
    /// `1 / ⌈1/δ_raw⌉`.
    #[serde(with = "rational_str")]
    pub delta: Rational,
    /// `(1/4) η (1/(32 n r²))^n`.
    #[serde(with = "rational_str")]
    pub eps_alg: Rational,
    #[serde(with = "biguint_str")]
    pub m: BigUint,
    #[serde(with = "biguint_str")]
    pub d_bound: BigUint,
    #[serde(with = "biguint_str")]
    pub log2_d_bound: BigUint,
    /// `max{2 log D, 12 r (n+r) d}`.
    #[serde(with = "biguint_str")]
    pub h_size_statement: BigUint,
    /// `max{2 log D, 18 (n+r) d}`.
    #[serde(with = "biguint_str")]
    pub h_size_proof: BigUint,
    /// Names of the overridden fields.
    pub provenance: Vec<String>,
}

pub fn eta_formula(n: usize, r: u32, c_cw: &Rational) -> Rational {
    let base = c_cw * int(n as i64) * int(r as i64 * r as i64);
    pow_int(2, n as u32).recip() / (int(20) * pow(&base, r))
}

pub fn eta_alt_formula(n: usize, r: u32, c_cw: &Rational) -> Rational {
    let base = c_cw * int(n as i64) * int(r as i64);
    pow_int(2, n as u32).recip() / (int(2) * pow(&base, r))
}

/// `1/⌈1/q⌉`, the largest unit fraction not exceeding `q` (for `0 < q ≤ 1`).
pub fn round_down_unit_fraction(q: &Rational) -> Rational {
    Rational::from_integer(ceil_int(&q.recip())).recip()
}

pub fn compute_params(n: usize, s: usize, r: u32, ov: &ParamOverrides) -> Result<ParamBundle> {
    if n == 0 || s == 0 || r == 0 {
        return Err(Error::validation("n, s and r must all be at least 1"));
    }
    let mut provenance = Vec::new();
    let mut note = |name: &str, set: bool| {
        if set {
            provenance.push(name.to_string());
        }
    };
    note("c_cw", ov.c_cw.is_some());
    note("c_size", ov.c_size.is_some());
    note("c_var", ov.c_var.is_some());
    note("eta", ov.eta.is_some());
    note("delta", ov.delta.is_some());
    note("eps_alg", ov.eps_alg.is_some());
    note("m", ov.m.is_some());

    let c_cw = ov.c_cw.clone().unwrap_or_else(|| int(DEFAULT_C_CW));
    if c_cw <= Rational::zero() {
        return Err(Error::validation("C_CW must be positive"));
    }
    let c_size = ov.c_size.unwrap_or(1);
    let c_var = ov.c_var.unwrap_or(1);
    let (ni, ri) = (n as i64, r as i64);

    let eta = ov.eta.clone().unwrap_or_else(|| eta_formula(n, r, &c_cw));
    if eta <= Rational::zero() {
        return Err(Error::validation("η must be positive"));
    }
    let delta_raw = &eta / pow(&int(16 * ni * ri * ri), 2 * n as u32 + 1);
    let delta = match &ov.delta {
        Some(d) => {
            unit_fraction_denominator(d)?;
            d.clone()
        }
        None => round_down_unit_fraction(&delta_raw),
    };
    let eps_alg = ov.eps_alg.clone().unwrap_or_else(|| {
        &eta / int(4) * pow(&int(32 * ni * ri * ri).recip(), n as u32)
    });
    let nsr = BigUint::from(n as u64 * s as u64 * r as u64);
    let m = ov.m.map(BigUint::from).unwrap_or_else(|| nsr.pow(c_size));
    let d_bound = nsr.pow(c_var);
    let log2_d_bound = d_bound.clone();
    let two_log_d = BigUint::from(2u32) * &log2_d_bound;
    let nr = BigUint::from(n as u64 + r as u64);
    let h_size_statement = two_log_d.clone().max(BigUint::from(12 * r as u64) * &nr * &d_bound);
    let h_size_proof = two_log_d.max(BigUint::from(18u32) * &nr * &d_bound);

    Ok(ParamBundle {
        n,
        s,
        r,
        eta_alt: eta_alt_formula(n, r, &c_cw),
        c_cw,
        c_size,
        c_var,
        n_hom: n_hom(n, r),
        eta,
        delta_raw,
        delta,
        eps_alg,
        m,
        d_bound,
        log2_d_bound,
        h_size_statement,
        h_size_proof,
        provenance,
    })
}

impl ParamBundle {
    pub fn is_overridden(&self, field: &str) -> bool {
        self.provenance.iter().any(|p| p == field)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }

    /// `(1/N^hom)^r`, the net radius used with the robust-net condition.
    pub fn net_epsilon(&self) -> Rational {
        pow(&Rational::from_integer(self.n_hom.clone().into()).recip(), self.r)
    }

    pub fn m_usize(&self) -> Result<usize> {
        usize::try_from(&self.m).map_err(|_| Error::Capacity(format!("m = {} is too large", self.m)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn ccw1() -> ParamOverrides {
        ParamOverrides { c_cw: Some(int(1)), ..Default::default() }
    }

    #[test]
    fn smallest_bundle() {
        let p = compute_params(1, 1, 1, &ccw1()).unwrap();
        assert_eq!(p.eta, rat(1, 40));
        assert_eq!(p.delta_raw, rat(1, 163840));
        assert_eq!(p.delta, rat(1, 163840));
        assert_eq!(p.eps_alg, rat(1, 5120));
        assert_eq!(p.n_hom, BigUint::from(1u32));
        assert_eq!(p.provenance, vec!["c_cw".to_string()]);
    }

    #[test]
    fn eta_override_cascades() {
        let ov = ParamOverrides { eta: Some(rat(1, 10)), ..Default::default() };
        let p = compute_params(1, 1, 1, &ov).unwrap();
        assert_eq!(p.delta, rat(1, 40960));
        assert_eq!(p.eps_alg, rat(1, 1280));
        let ov = ParamOverrides { eta: Some(rat(1, 10)), delta: Some(rat(1, 2)), ..Default::default() };
        assert_eq!(compute_params(1, 1, 1, &ov).unwrap().delta, rat(1, 2));
        let ov = ParamOverrides { delta: Some(rat(2, 3)), ..Default::default() };
        assert!(compute_params(1, 1, 1, &ov).is_err());
    }

    #[test]
    fn rounding_down() {
        assert_eq!(round_down_unit_fraction(&rat(2, 7)), rat(1, 4));
        assert_eq!(round_down_unit_fraction(&rat(1, 5)), rat(1, 5));
    }

    #[test]
    fn override_pairs() {
        let mut ov = ParamOverrides::default();
        ov.parse_pair("delta=1/2").unwrap();
        ov.parse_pair("m = 2").unwrap();
        assert_eq!(ov.delta, Some(rat(1, 2)));
        assert_eq!(ov.m, Some(2));
        assert!(ov.parse_pair("bogus=1").is_err());
        assert!(ov.parse_pair("m").is_err());
    }

    #[test]
    fn hitting_set_sizes() {
        let p = compute_params(2, 3, 2, &ParamOverrides::default()).unwrap();
        assert_eq!(p.d_bound, BigUint::from(12u32));
        assert_eq!(p.h_size_statement, BigUint::from(12u32 * 2 * 4 * 12));
        assert_eq!(p.h_size_proof, BigUint::from(18u32 * 4 * 12));
        assert_eq!(p.m, BigUint::from(12u32));
    }
}
