//! The homogeneous universal circuit skeleton `Ψ(x, y)` and constructive
//! embedding of balanced normal-form circuits.
//!
//! Layout: the degree-1 layer is the `n` essential inputs. For each degree
//! `t = 2..r` there are `w` product gates, each multiplying one weighted sum
//! over layer `⌈t/2⌉` by one weighted sum over layer `⌊t/2⌋`. The output is a
//! weighted sum over layer `r`. A weighted sum `Σ y_j·g_j` uses one fresh
//! auxiliary variable per wire, folded to the right.
//!
//! Essential variables occupy indices `0..n` of the base circuit and
//! auxiliary variables `n..n+m`.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    check_homogeneous, Circuit, CircuitBuilder, CircuitFile, GateId, GateKind, Homogeneity,
};
use crate::error::{Error, ParseError, Result};
use crate::grid::{block_rng, Seed};
use crate::scalar::{rat, GaussianRational};

/// Default cap on the per-degree product width.
pub const DEFAULT_WIDTH_CAP: usize = 64;

/// Size constant such that `m ≤ c₁·s·r⁴` and `size ≤ c₁·s·r⁴` hold for the
/// default width over `n, s, r ≤ 6` (checked in the tests).
pub const DEFAULT_C1: u64 = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniversalParams {
    pub n: usize,
    pub s: usize,
    pub r: u32,
    pub width: usize,
}

/// One product gate of the skeleton and the auxiliary indices of its input wires.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSlot {
    pub gate: GateId,
    pub left_sum: GateId,
    pub right_sum: GateId,
    /// Auxiliary indices (0-based within `y`) weighting layer `⌈t/2⌉`.
    pub left_weights: Vec<usize>,
    /// Auxiliary indices weighting layer `⌊t/2⌋`.
    pub right_weights: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub inputs: Vec<GateId>,
    /// `products[t]` lists the slots of degree `t`; entries 0 and 1 are empty.
    pub products: Vec<Vec<ProductSlot>>,
    pub output_sum: GateId,
    pub output_weights: Vec<usize>,
    /// Input gate of each auxiliary variable.
    pub aux_inputs: Vec<GateId>,
}

impl Layout {
    /// Gate ids of layer `t`.
    pub fn layer(&self, t: u32) -> Vec<GateId> {
        if t == 1 {
            self.inputs.clone()
        } else {
            self.products[t as usize].iter().map(|p| p.gate).collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalCircuit {
    pub base: Circuit,
    pub n_essential: usize,
    pub m_auxiliary: usize,
    pub params: UniversalParams,
    pub layout: Layout,
}

#[derive(Clone, Copy, Debug)]
pub struct UniversalConfig {
    pub width_cap: usize,
}

impl Default for UniversalConfig {
    fn default() -> Self {
        UniversalConfig { width_cap: DEFAULT_WIDTH_CAP }
    }
}

pub fn build_universal(n: usize, s: usize, r: u32, width_override: Option<usize>) -> Result<UniversalCircuit> {
    build_universal_with(n, s, r, width_override, UniversalConfig::default())
}

pub fn build_universal_with(
    n: usize,
    s: usize,
    r: u32,
    width_override: Option<usize>,
    cfg: UniversalConfig,
) -> Result<UniversalCircuit> {
    if n == 0 || s == 0 || r == 0 {
        return Err(Error::validation("n, s and r must all be at least 1"));
    }
    let width = match width_override {
        Some(w) if w > cfg.width_cap => {
            return Err(Error::Capacity(format!("width {w} exceeds cap {}", cfg.width_cap)))
        }
        Some(0) => return Err(Error::validation("width must be at least 1")),
        Some(w) => w,
        None => s.min(cfg.width_cap),
    };
    let layer_len = |t: u32| if t == 1 { n } else { width };
    let mut m = layer_len(r);
    for t in 2..=r {
        m += width * (layer_len(t.div_ceil(2)) + layer_len(t / 2));
    }

    let mut b = CircuitBuilder::new(n + m);
    let inputs: Vec<GateId> = (0..n).map(|i| b.input(i)).collect();
    let aux_inputs: Vec<GateId> = (0..m).map(|j| b.input(n + j)).collect();
    let mut next_aux = 0usize;
    let mut weighted_sum = |b: &mut CircuitBuilder, feed: &[GateId]| -> (GateId, Vec<usize>) {
        let mut terms = Vec::with_capacity(feed.len());
        let mut weights = Vec::with_capacity(feed.len());
        for &g in feed {
            terms.push(b.mul(aux_inputs[next_aux], g));
            weights.push(next_aux);
            next_aux += 1;
        }
        (b.sum(&terms), weights)
    };

    let mut layers: Vec<Vec<GateId>> = vec![Vec::new(), inputs.clone()];
    let mut products: Vec<Vec<ProductSlot>> = vec![Vec::new(), Vec::new()];
    for t in 2..=r {
        let (hi, lo) = (t.div_ceil(2) as usize, (t / 2) as usize);
        let mut slots = Vec::with_capacity(width);
        for _ in 0..width {
            let (left_sum, left_weights) = weighted_sum(&mut b, &layers[hi]);
            let (right_sum, right_weights) = weighted_sum(&mut b, &layers[lo]);
            let gate = b.mul(left_sum, right_sum);
            slots.push(ProductSlot { gate, left_sum, right_sum, left_weights, right_weights });
        }
        layers.push(slots.iter().map(|p| p.gate).collect());
        products.push(slots);
    }
    let (output_sum, output_weights) = weighted_sum(&mut b, &layers[r as usize]);
    debug_assert_eq!(next_aux, m);
    let base = b.finish(vec![output_sum], true)?;
    Ok(UniversalCircuit {
        base,
        n_essential: n,
        m_auxiliary: m,
        params: UniversalParams { n, s, r, width },
        layout: Layout { inputs, products, output_sum, output_weights, aux_inputs },
    })
}

impl UniversalCircuit {
    fn check_assignment(&self, a: &[GaussianRational]) -> Result<()> {
        if a.len() != self.m_auxiliary {
            return Err(Error::Dimension { expected: self.m_auxiliary, got: a.len() });
        }
        Ok(())
    }

    /// `Ψ(·, a)` as a circuit in the essential variables only.
    pub fn specialize(&self, a: &[GaussianRational]) -> Result<Circuit> {
        self.check_assignment(a)?;
        let n = self.n_essential;
        let kinds = self
            .base
            .gates()
            .iter()
            .map(|g| match &g.kind {
                GateKind::Input(v) if *v >= n => GateKind::Const(a[v - n].clone()),
                k => k.clone(),
            })
            .collect();
        Circuit::new(n, kinds, self.base.outputs().to_vec(), true)
    }

    /// `Ψ(x, a)` evaluated directly.
    pub fn eval(&self, x: &[GaussianRational], a: &[GaussianRational]) -> Result<GaussianRational> {
        if x.len() != self.n_essential {
            return Err(Error::Dimension { expected: self.n_essential, got: x.len() });
        }
        self.check_assignment(a)?;
        let point: Vec<GaussianRational> = x.iter().chain(a).cloned().collect();
        self.base.eval_single(&point)
    }

    pub fn to_file(&self) -> UniversalFile {
        UniversalFile {
            circuit: self.base.to_file(),
            universal: UniversalBlock {
                essential: (0..self.n_essential).collect(),
                auxiliary: (self.n_essential..self.n_essential + self.m_auxiliary).collect(),
                params: self.params,
                layout: self.layout.clone(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("universal circuit serializes")
    }

    /// Rebuilds from the recorded parameters and checks that the stored
    /// circuit and layout match the rebuild exactly.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: UniversalFile =
            serde_json::from_str(text).map_err(|e| ParseError::Document(e.to_string()))?;
        let p = file.universal.params;
        let u = build_universal_with(
            p.n,
            p.s,
            p.r,
            Some(p.width),
            UniversalConfig { width_cap: p.width.max(DEFAULT_WIDTH_CAP) },
        )?;
        let stored = Circuit::from_file(&file.circuit)?;
        if stored != u.base || file.universal.layout != u.layout {
            return Err(Error::validation("universal block does not match its parameters"));
        }
        Ok(u)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniversalBlock {
    pub essential: Vec<usize>,
    pub auxiliary: Vec<usize>,
    pub params: UniversalParams,
    pub layout: Layout,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniversalFile {
    #[serde(flatten)]
    pub circuit: CircuitFile,
    pub universal: UniversalBlock,
}

/// A gate of the source circuit viewed as a linear form over the nodes of
/// its degree layer, or as a plain scalar for degree 0.
#[derive(Clone, Debug)]
enum Form {
    Scalar(GaussianRational),
    Linear { degree: u32, coeffs: BTreeMap<usize, GaussianRational> },
}

impl Form {
    fn scale(&self, c: &GaussianRational) -> Form {
        match self {
            Form::Scalar(v) => Form::Scalar(v.clone() * c.clone()),
            Form::Linear { degree, coeffs } => Form::Linear {
                degree: *degree,
                coeffs: coeffs.iter().map(|(k, v)| (*k, v.clone() * c.clone())).collect(),
            },
        }
    }
}

struct Product {
    left: BTreeMap<usize, GaussianRational>,
    right: BTreeMap<usize, GaussianRational>,
}

/// Assignment `a` with `Ψ(x, a) ≡ c(x)` for a circuit in balanced normal form.
///
/// Every product of two non-constant gates must split its degree as
/// `⌈t/2⌉ + ⌊t/2⌋`; products with a degree-0 side are absorbed as scalings.
/// Only gates reachable from the (single) output are considered.
pub fn embed_normal_form(u: &UniversalCircuit, c: &Circuit) -> Result<Vec<GaussianRational>> {
    if c.n_vars() != u.n_essential {
        return Err(Error::Dimension { expected: u.n_essential, got: c.n_vars() });
    }
    if c.outputs().len() != 1 {
        return Err(Error::Shape("embedding needs a single-output circuit".into()));
    }
    if let Homogeneity::MixedAt(g) = check_homogeneous(c) {
        return Err(Error::Shape(format!("gate {g} mixes degrees")));
    }
    let root = c.outputs()[0];
    let r = u.params.r;
    if c.gates()[root].degree != r {
        return Err(Error::Shape(format!(
            "output degree {} differs from skeleton degree {r}",
            c.gates()[root].degree
        )));
    }

    let mut reachable = vec![false; c.gates().len()];
    reachable[root] = true;
    for g in c.gates().iter().rev() {
        if reachable[g.id] {
            if let Some((l, rr)) = g.kind.children() {
                reachable[l] = true;
                reachable[rr] = true;
            }
        }
    }

    let mut products: Vec<Vec<Product>> = (0..=r).map(|_| Vec::new()).collect();
    let mut forms: HashMap<GateId, Form> = HashMap::new();
    for g in c.gates().iter().filter(|g| reachable[g.id]) {
        let form = match &g.kind {
            GateKind::Input(i) => Form::Linear {
                degree: 1,
                coeffs: BTreeMap::from([(*i, GaussianRational::one())]),
            },
            GateKind::Const(v) => Form::Scalar(v.clone()),
            GateKind::Add(l, rr) => match (&forms[l], &forms[rr]) {
                (Form::Scalar(a), Form::Scalar(b)) => Form::Scalar(a.clone() + b.clone()),
                (Form::Linear { degree, coeffs: a }, Form::Linear { coeffs: b, .. }) => {
                    let mut sum = a.clone();
                    for (k, v) in b {
                        *sum.entry(*k).or_insert_with(GaussianRational::zero) += v;
                    }
                    Form::Linear { degree: *degree, coeffs: sum }
                }
                _ => unreachable!("homogeneity was checked"),
            },
            GateKind::Mul(l, rr) => match (&forms[l], &forms[rr]) {
                (Form::Scalar(a), other) | (other, Form::Scalar(a)) => other.scale(a),
                (
                    Form::Linear { degree: dl, coeffs: fl },
                    Form::Linear { degree: dr, coeffs: fr },
                ) => {
                    let t = dl + dr;
                    let (hi, lo) = (t.div_ceil(2), t / 2);
                    let (left, right) = if (*dl, *dr) == (hi, lo) {
                        (fl.clone(), fr.clone())
                    } else if (*dr, *dl) == (hi, lo) {
                        (fr.clone(), fl.clone())
                    } else {
                        return Err(Error::Shape(format!(
                            "gate {}: product of degrees {dl} and {dr} is not a balanced split",
                            g.id
                        )));
                    };
                    let slot = products[t as usize].len();
                    if slot >= u.params.width {
                        return Err(Error::Capacity(format!(
                            "more than {} products of degree {t}",
                            u.params.width
                        )));
                    }
                    products[t as usize].push(Product { left, right });
                    Form::Linear {
                        degree: t,
                        coeffs: BTreeMap::from([(slot, GaussianRational::one())]),
                    }
                }
            },
        };
        forms.insert(g.id, form);
    }

    let mut a = vec![GaussianRational::zero(); u.m_auxiliary];
    let mut assign = |weights: &[usize], coeffs: &BTreeMap<usize, GaussianRational>| {
        for (k, v) in coeffs {
            a[weights[*k]] = v.clone();
        }
    };
    for t in 2..=r as usize {
        for (slot, p) in products[t].iter().enumerate() {
            let s = &u.layout.products[t][slot];
            assign(&s.left_weights, &p.left);
            assign(&s.right_weights, &p.right);
        }
    }
    match &forms[&root] {
        Form::Linear { coeffs, .. } => assign(&u.layout.output_weights, coeffs),
        Form::Scalar(_) => unreachable!("output degree is at least 1"),
    }
    Ok(a)
}

/// `a′` with `Ψ(x, a′) = α·Ψ(x, a)`: the output-layer weights are multiplied by `α`.
pub fn scale_embedding(
    u: &UniversalCircuit,
    a: &[GaussianRational],
    alpha: &GaussianRational,
) -> Vec<GaussianRational> {
    let mut out = a.to_vec();
    for &j in &u.layout.output_weights {
        out[j] = out[j].clone() * alpha.clone();
    }
    out
}

/// Seeded random assignment with entries `p/q`, `|p| ≤ bound`, `1 ≤ q ≤ bound`.
pub fn random_assignment(u: &UniversalCircuit, seed: Seed, bound: i64) -> Vec<GaussianRational> {
    let mut rng = block_rng(seed, 0);
    (0..u.m_auxiliary)
        .map(|_| {
            let p = rng.gen_range(-bound..=bound);
            let q = rng.gen_range(1..=bound.max(1));
            GaussianRational::real(rat(p, q))
        })
        .collect()
}

/// `true` when every entry of `a` is zero.
pub fn is_zero_assignment(a: &[GaussianRational]) -> bool {
    a.iter().all(|v| v.re.is_zero() && v.im.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{expand, ExponentVector};

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn degree_one_skeleton() {
        let u = build_universal(2, 1, 1, None).unwrap();
        assert_eq!(u.m_auxiliary, 2);
        let a = vec![g(5), g(7)];
        let p = &expand(&u.specialize(&a).unwrap()).unwrap()[0];
        assert_eq!(p.coeff(&ExponentVector(vec![1, 0])), g(5));
        assert_eq!(p.coeff(&ExponentVector(vec![0, 1])), g(7));
    }

    #[test]
    fn specializations_are_homogeneous() {
        for (n, s, r) in [(1, 1, 1), (2, 2, 3), (3, 2, 4)] {
            let u = build_universal(n, s, r, None).unwrap();
            let a = random_assignment(&u, 9, 5);
            let c = u.specialize(&a).unwrap();
            assert_eq!(check_homogeneous(&c), Homogeneity::Homogeneous(vec![r]));
        }
    }

    #[test]
    fn embed_projection() {
        let u = build_universal(2, 1, 1, None).unwrap();
        let mut b = CircuitBuilder::new(2);
        let x = b.input(0);
        let c = b.finish(vec![x], true).unwrap();
        assert_eq!(embed_normal_form(&u, &c).unwrap(), vec![g(1), g(0)]);
    }

    fn three_x1x2() -> Circuit {
        let mut b = CircuitBuilder::new(2);
        let x1 = b.input(0);
        let x2 = b.input(1);
        let p = b.mul(x1, x2);
        let three = b.constant(g(3));
        let out = b.mul(three, p);
        b.finish(vec![out], true).unwrap()
    }

    #[test]
    fn embed_and_scale() {
        let u = build_universal(2, 4, 2, None).unwrap();
        let c = three_x1x2();
        let a = embed_normal_form(&u, &c).unwrap();
        assert_eq!(expand(&u.specialize(&a).unwrap()).unwrap(), expand(&c).unwrap());
        let x1x2 = ExponentVector(vec![1, 1]);

        let neg = scale_embedding(&u, &a, &GaussianRational::real(rat(-2, 3)));
        let p = &expand(&u.specialize(&neg).unwrap()).unwrap()[0];
        assert_eq!(p.coeff(&x1x2), g(-2));
        assert_eq!(scale_embedding(&u, &a, &GaussianRational::one()), a);
        let zero = scale_embedding(&u, &a, &GaussianRational::zero());
        assert!(expand(&u.specialize(&zero).unwrap()).unwrap()[0].is_zero());
    }

    #[test]
    fn embedding_errors() {
        let u = build_universal(2, 1, 3, None).unwrap();
        // x0 · (x0 · x1): the outer product splits 3 as 1 + 2, which is balanced.
        let mut b = CircuitBuilder::new(2);
        let x0 = b.input(0);
        let x1 = b.input(1);
        let p = b.mul(x0, x1);
        let q = b.mul(p, x0);
        let c = b.finish(vec![q], true).unwrap();
        assert!(embed_normal_form(&u, &c).is_ok());

        // Degree 4 as 3 + 1 is not balanced.
        let u4 = build_universal(2, 2, 4, None).unwrap();
        let mut b = CircuitBuilder::new(2);
        let x0 = b.input(0);
        let x1 = b.input(1);
        let p = b.mul(x0, x1);
        let q = b.mul(p, x0);
        let w = b.mul(q, x1);
        let c = b.finish(vec![w], true).unwrap();
        assert!(matches!(embed_normal_form(&u4, &c), Err(Error::Shape(_))));

        // Two degree-2 products do not fit in width 1.
        let u2 = build_universal(2, 1, 2, None).unwrap();
        let mut b = CircuitBuilder::new(2);
        let x0 = b.input(0);
        let x1 = b.input(1);
        let p = b.mul(x0, x0);
        let q = b.mul(x1, x1);
        let s = b.add(p, q);
        let c = b.finish(vec![s], true).unwrap();
        assert!(matches!(embed_normal_form(&u2, &c), Err(Error::Capacity(_))));
        assert_eq!(build_universal(2, 2, 2, None).map(|u| embed_normal_form(&u, &c).is_ok()).ok(), Some(true));
    }

    #[test]
    fn width_cap() {
        assert!(matches!(
            build_universal(2, 2, 2, Some(DEFAULT_WIDTH_CAP + 1)),
            Err(Error::Capacity(_))
        ));
        assert_eq!(build_universal(1, 200, 2, None).unwrap().params.width, DEFAULT_WIDTH_CAP);
    }

    #[test]
    fn size_bound_over_small_range() {
        for n in 1..=6 {
            for s in 1..=6 {
                for r in 1..=6u32 {
                    let u = build_universal(n, s, r, None).unwrap();
                    let cap = DEFAULT_C1 * s as u64 * (r as u64).pow(4);
                    assert!(u.m_auxiliary as u64 <= cap, "m at {n},{s},{r}");
                    assert!(u.base.size() as u64 <= cap, "size at {n},{s},{r}");
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let u = build_universal(2, 2, 3, None).unwrap();
        assert_eq!(UniversalCircuit::from_json(&u.to_json()).unwrap(), u);
    }
}
