//! Algebraic circuits over Gaussian rationals.
//!
//! A circuit is a list of gates in topological order: every child id is
//! strictly smaller than its parent id, so acyclicity holds by construction.
//! Gate fan-in is two; wider sums are built as right-folded chains.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, ParseError, Result};
use crate::scalar::GaussianRational;

pub type GateId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateKind {
    Input(usize),
    Const(GaussianRational),
    Add(GateId, GateId),
    Mul(GateId, GateId),
}

impl GateKind {
    pub fn children(&self) -> Option<(GateId, GateId)> {
        match *self {
            GateKind::Add(l, r) | GateKind::Mul(l, r) => Some((l, r)),
            _ => None,
        }
    }

    pub fn is_binary(&self) -> bool {
        self.children().is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub id: GateId,
    pub kind: GateKind,
    /// Formal (syntactic) degree.
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    n_vars: usize,
    gates: Vec<Gate>,
    outputs: Vec<GateId>,
    homogeneous: bool,
}

/// Result of [`check_homogeneous`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    /// Formal degree of each output.
    Homogeneous(Vec<u32>),
    /// First Add gate whose children disagree in degree.
    MixedAt(GateId),
}

impl Circuit {
    /// Validates gate kinds and computes degrees bottom-up.
    pub fn new(
        n_vars: usize,
        kinds: Vec<GateKind>,
        outputs: Vec<GateId>,
        homogeneous: bool,
    ) -> Result<Circuit> {
        let mut gates: Vec<Gate> = Vec::with_capacity(kinds.len());
        for (id, kind) in kinds.into_iter().enumerate() {
            let degree = match &kind {
                GateKind::Input(i) => {
                    if *i >= n_vars {
                        return Err(Error::validation(format!(
                            "gate {id}: variable index {i} out of range for {n_vars} variables"
                        )));
                    }
                    1
                }
                GateKind::Const(_) => 0,
                GateKind::Add(l, r) | GateKind::Mul(l, r) => {
                    if *l >= id || *r >= id {
                        return Err(Error::validation(format!(
                            "gate {id}: child reference ({l}, {r}) is not earlier in topological order"
                        )));
                    }
                    let (dl, dr) = (gates[*l].degree, gates[*r].degree);
                    match kind {
                        GateKind::Add(..) => {
                            if homogeneous && dl != dr {
                                return Err(Error::validation(format!(
                                    "gate {id}: Add of degrees {dl} and {dr} in a circuit declared homogeneous"
                                )));
                            }
                            dl.max(dr)
                        }
                        _ => dl + dr,
                    }
                }
            };
            gates.push(Gate { id, kind, degree });
        }
        if outputs.is_empty() {
            return Err(Error::validation("circuit has no outputs"));
        }
        if let Some(o) = outputs.iter().find(|&&o| o >= gates.len()) {
            return Err(Error::validation(format!("output {o} references a missing gate")));
        }
        Ok(Circuit { n_vars, gates, outputs, homogeneous })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[GateId] {
        &self.outputs
    }

    pub fn is_declared_homogeneous(&self) -> bool {
        self.homogeneous
    }

    /// Wire count: two per binary gate.
    pub fn size(&self) -> usize {
        2 * self.gates.iter().filter(|g| g.kind.is_binary()).count()
    }

    pub fn output_degrees(&self) -> Vec<u32> {
        self.outputs.iter().map(|&o| self.gates[o].degree).collect()
    }

    /// Exact evaluation, one value per output.
    pub fn eval(&self, point: &[GaussianRational]) -> Result<Vec<GaussianRational>> {
        let values = self.eval_all(point)?;
        Ok(self.outputs.iter().map(|&o| values[o].clone()).collect())
    }

    /// Every gate's value, indexed by gate id.
    pub fn eval_all(&self, point: &[GaussianRational]) -> Result<Vec<GaussianRational>> {
        if point.len() != self.n_vars {
            return Err(Error::Dimension { expected: self.n_vars, got: point.len() });
        }
        let mut values: Vec<GaussianRational> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match &gate.kind {
                GateKind::Input(i) => point[*i].clone(),
                GateKind::Const(c) => c.clone(),
                GateKind::Add(l, r) => &values[*l] + &values[*r],
                GateKind::Mul(l, r) => &values[*l] * &values[*r],
            };
            values.push(v);
        }
        Ok(values)
    }

    /// Single-output convenience wrapper over [`Circuit::eval`].
    pub fn eval_single(&self, point: &[GaussianRational]) -> Result<GaussianRational> {
        Ok(self.eval(point)?.swap_remove(0))
    }

    /// `c1 + c2` under a fresh root. Both circuits must have one output.
    pub fn join_add(&self, other: &Circuit) -> Result<Circuit> {
        self.join(other, GateKind::Add)
    }

    /// `c1 · c2` under a fresh root. Both circuits must have one output.
    pub fn join_mul(&self, other: &Circuit) -> Result<Circuit> {
        self.join(other, GateKind::Mul)
    }

    fn join(&self, other: &Circuit, op: fn(GateId, GateId) -> GateKind) -> Result<Circuit> {
        if self.n_vars != other.n_vars {
            return Err(Error::Dimension { expected: self.n_vars, got: other.n_vars });
        }
        if self.outputs.len() != 1 || other.outputs.len() != 1 {
            return Err(Error::validation("join requires single-output circuits"));
        }
        let offset = self.gates.len();
        let mut kinds: Vec<GateKind> = self.gates.iter().map(|g| g.kind.clone()).collect();
        kinds.extend(other.gates.iter().map(|g| match &g.kind {
            GateKind::Add(l, r) => GateKind::Add(l + offset, r + offset),
            GateKind::Mul(l, r) => GateKind::Mul(l + offset, r + offset),
            k => k.clone(),
        }));
        kinds.push(op(self.outputs[0], other.outputs[0] + offset));
        let root = kinds.len() - 1;
        let homogeneous = match op(0, 0) {
            GateKind::Add(..) => {
                self.homogeneous
                    && other.homogeneous
                    && self.gates[self.outputs[0]].degree == other.gates[other.outputs[0]].degree
            }
            _ => self.homogeneous && other.homogeneous,
        };
        Circuit::new(self.n_vars, kinds, vec![root], homogeneous)
    }

    pub fn to_file(&self) -> CircuitFile {
        let gates = self
            .gates
            .iter()
            .map(|g| {
                let (kind, args) = match &g.kind {
                    GateKind::Input(i) => ("input", vec![Value::from(*i)]),
                    GateKind::Const(c) => ("const", vec![Value::from(c.to_string())]),
                    GateKind::Add(l, r) => ("add", vec![Value::from(*l), Value::from(*r)]),
                    GateKind::Mul(l, r) => ("mul", vec![Value::from(*l), Value::from(*r)]),
                };
                GateRecord { id: g.id, kind: kind.to_string(), args }
            })
            .collect();
        CircuitFile {
            n_vars: self.n_vars,
            gates,
            outputs: self.outputs.clone(),
            homogeneous: self.homogeneous,
        }
    }

    pub fn from_file(file: &CircuitFile) -> Result<Circuit> {
        let mut kinds = Vec::with_capacity(file.gates.len());
        for (pos, rec) in file.gates.iter().enumerate() {
            if rec.id != pos {
                return Err(Error::validation(format!(
                    "gate at position {pos} has id {}; ids must be dense and in order",
                    rec.id
                )));
            }
            kinds.push(rec.to_kind()?);
        }
        Circuit::new(file.n_vars, kinds, file.outputs.clone(), file.homogeneous)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("circuit serializes")
    }
}

/// Formal homogeneity check; failure reports the first offending Add gate.
pub fn check_homogeneous(c: &Circuit) -> Homogeneity {
    for g in &c.gates {
        if let GateKind::Add(l, r) = g.kind {
            if c.gates[l].degree != c.gates[r].degree {
                return Homogeneity::MixedAt(g.id);
            }
        }
    }
    Homogeneity::Homogeneous(c.output_degrees())
}

/// Parse and validate the JSON circuit format.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let file: CircuitFile =
        serde_json::from_str(text).map_err(|e| ParseError::Document(e.to_string()))?;
    Circuit::from_file(&file)
}

/// On-disk form of a circuit.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CircuitFile {
    pub n_vars: usize,
    pub gates: Vec<GateRecord>,
    pub outputs: Vec<GateId>,
    pub homogeneous: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GateRecord {
    pub id: GateId,
    pub kind: String,
    pub args: Vec<Value>,
}

impl GateRecord {
    fn to_kind(&self) -> Result<GateKind> {
        let bad = |what: &str| -> Error {
            ParseError::Document(format!("gate {}: {what}", self.id)).into()
        };
        let index = |v: &Value| -> Result<usize> {
            v.as_u64().map(|x| x as usize).ok_or_else(|| bad("expected a nonnegative integer argument"))
        };
        let arity = |n: usize| -> Result<()> {
            if self.args.len() == n {
                Ok(())
            } else {
                Err(bad(&format!("expected {n} argument(s), got {}", self.args.len())))
            }
        };
        match self.kind.as_str() {
            "input" => {
                arity(1)?;
                Ok(GateKind::Input(index(&self.args[0])?))
            }
            "const" => {
                arity(1)?;
                let s = self.args[0].as_str().ok_or_else(|| bad("constants must be strings"))?;
                Ok(GateKind::Const(s.parse()?))
            }
            "add" | "mul" => {
                arity(2)?;
                let (l, r) = (index(&self.args[0])?, index(&self.args[1])?);
                Ok(if self.kind == "add" { GateKind::Add(l, r) } else { GateKind::Mul(l, r) })
            }
            other => Err(bad(&format!("unknown gate kind `{other}`"))),
        }
    }
}

/// Incremental construction in topological order.
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder {
    n_vars: usize,
    kinds: Vec<GateKind>,
}

impl CircuitBuilder {
    pub fn new(n_vars: usize) -> Self {
        CircuitBuilder { n_vars, kinds: Vec::new() }
    }

    fn push(&mut self, kind: GateKind) -> GateId {
        self.kinds.push(kind);
        self.kinds.len() - 1
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn input(&mut self, var: usize) -> GateId {
        self.push(GateKind::Input(var))
    }

    pub fn constant(&mut self, c: GaussianRational) -> GateId {
        self.push(GateKind::Const(c))
    }

    pub fn add(&mut self, l: GateId, r: GateId) -> GateId {
        self.push(GateKind::Add(l, r))
    }

    pub fn mul(&mut self, l: GateId, r: GateId) -> GateId {
        self.push(GateKind::Mul(l, r))
    }

    /// Right-folded chain `t0 + (t1 + (… + tk))`.
    pub fn sum(&mut self, terms: &[GateId]) -> GateId {
        let (&last, rest) = terms.split_last().expect("sum of at least one term");
        rest.iter().rev().fold(last, |acc, &t| self.add(t, acc))
    }

    pub fn finish(self, outputs: Vec<GateId>, homogeneous: bool) -> Result<Circuit> {
        Circuit::new(self.n_vars, self.kinds, outputs, homogeneous)
    }
}

/// The worked tensor example `T = x0·y0·z0 + (x1·y0 + x0·y1)·z1`.
///
/// Variables are ordered `x0, x1, y0, y1, z0, z1`.
pub fn tensor_t() -> Circuit {
    let mut b = CircuitBuilder::new(6);
    let [x0, x1, y0, y1, z0, z1] = [0, 1, 2, 3, 4, 5].map(|i| b.input(i));
    let x0y0 = b.mul(x0, y0);
    let first = b.mul(x0y0, z0);
    let x1y0 = b.mul(x1, y0);
    let x0y1 = b.mul(x0, y1);
    let inner = b.add(x1y0, x0y1);
    let second = b.mul(inner, z1);
    let root = b.add(first, second);
    b.finish(vec![root], true).expect("T is well formed")
}

/// `T_ε = (1/ε)(x0 + ε x1)(y0 + ε y1) z1 + x0 y0 (z0 − (1/ε) z1)`.
///
/// Returns `None` for `ε = 0`.
pub fn tensor_t_eps(eps: &crate::scalar::Rational) -> Option<Circuit> {
    use num_traits::Zero;
    if eps.is_zero() {
        return None;
    }
    let inv = GaussianRational::real(eps.recip());
    let mut b = CircuitBuilder::new(6);
    let [x0, x1, y0, y1, z0, z1] = [0, 1, 2, 3, 4, 5].map(|i| b.input(i));
    let e = b.constant(GaussianRational::real(eps.clone()));
    let ex1 = b.mul(e, x1);
    let xs = b.add(x0, ex1);
    let ey1 = b.mul(e, y1);
    let ys = b.add(y0, ey1);
    let inv_g = b.constant(inv.clone());
    let xy = b.mul(xs, ys);
    let xyz = b.mul(xy, z1);
    let left = b.mul(inv_g, xyz);
    let neg_inv = b.constant(-inv);
    let nz1 = b.mul(neg_inv, z1);
    let zs = b.add(z0, nz1);
    let x0y0 = b.mul(x0, y0);
    let right = b.mul(x0y0, zs);
    let root = b.add(left, right);
    Some(b.finish(vec![root], true).expect("T_eps is well formed"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn g(q: crate::scalar::Rational) -> GaussianRational {
        GaussianRational::real(q)
    }

    fn pt(vals: &[(i64, i64)]) -> Vec<GaussianRational> {
        vals.iter().map(|&(n, d)| g(rat(n, d))).collect()
    }

    #[test]
    fn tensor_circuit_shape() {
        let t = tensor_t();
        assert_eq!(t.n_vars(), 6);
        assert_eq!(check_homogeneous(&t), Homogeneity::Homogeneous(vec![3]));
        assert_eq!(t.size(), 2 * 7);
    }

    #[test]
    fn tensor_eps_at_bad_point() {
        let bad = pt(&[(0, 1), (1, 1), (0, 1), (1, 1), (0, 1), (1, 1)]);
        let c = tensor_t_eps(&rat(1, 10)).unwrap();
        assert_eq!(c.eval_single(&bad).unwrap(), g(rat(1, 10)));
        assert_eq!(tensor_t().eval_single(&bad).unwrap(), GaussianRational::zero());
        assert!(tensor_t_eps(&int(0)).is_none());
    }

    #[test]
    fn small_eval() {
        // x0*x1 + x2^2 at (2/3, 3/2, 1/2) = 5/4
        let mut b = CircuitBuilder::new(3);
        let (x0, x1, x2) = (b.input(0), b.input(1), b.input(2));
        let p = b.mul(x0, x1);
        let s = b.mul(x2, x2);
        let root = b.add(p, s);
        let c = b.finish(vec![root], true).unwrap();
        let v = c.eval_single(&pt(&[(2, 3), (3, 2), (1, 2)])).unwrap();
        assert_eq!(v, g(rat(5, 4)));
        assert!(matches!(c.eval(&pt(&[(1, 1)])), Err(Error::Dimension { expected: 3, got: 1 })));
    }

    #[test]
    fn single_input_circuit() {
        let c = Circuit::new(1, vec![GateKind::Input(0)], vec![0], true).unwrap();
        assert_eq!(c.output_degrees(), vec![1]);
        assert_eq!(c.size(), 0);
    }

    #[test]
    fn mixed_degree_rejected_when_declared_homogeneous() {
        let kinds = vec![
            GateKind::Input(0),
            GateKind::Input(1),
            GateKind::Mul(0, 1),
            GateKind::Add(0, 2),
        ];
        assert!(matches!(
            Circuit::new(2, kinds.clone(), vec![3], true),
            Err(Error::Validation(_))
        ));
        let c = Circuit::new(2, kinds, vec![3], false).unwrap();
        assert_eq!(check_homogeneous(&c), Homogeneity::MixedAt(3));
    }

    #[test]
    fn structural_validation() {
        assert!(Circuit::new(1, vec![GateKind::Input(3)], vec![0], true).is_err());
        assert!(Circuit::new(1, vec![GateKind::Add(0, 0)], vec![0], true).is_err());
        assert!(Circuit::new(1, vec![GateKind::Input(0)], vec![1], true).is_err());
        assert!(Circuit::new(1, vec![GateKind::Input(0)], vec![], true).is_err());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let c = tensor_t_eps(&rat(1, 3)).unwrap();
        let parsed = parse_circuit(&c.to_json()).unwrap();
        assert_eq!(parsed, c);

        let text = r#"{"n_vars": 1, "gates": [{"id": 0, "kind": "input", "args": [0]},
            {"id": 1, "kind": "const", "args": ["1/2+3 i"]},
            {"id": 2, "kind": "mul", "args": [1, 0]}], "outputs": [2], "homogeneous": true}"#;
        let c = parse_circuit(text).unwrap();
        let v = c.eval_single(&[g(int(2))]).unwrap();
        assert_eq!(v, GaussianRational::new(int(1), int(6)));

        assert!(matches!(parse_circuit("{"), Err(Error::Parse(_))));
        let dangling = r#"{"n_vars": 1, "gates": [{"id": 0, "kind": "add", "args": [0, 1]}],
            "outputs": [0], "homogeneous": false}"#;
        assert!(matches!(parse_circuit(dangling), Err(Error::Validation(_))));
        let float = r#"{"n_vars": 1, "gates": [{"id": 0, "kind": "const", "args": [0.5]}],
            "outputs": [0], "homogeneous": false}"#;
        assert!(matches!(parse_circuit(float), Err(Error::Parse(_))));
        let unordered = r#"{"n_vars": 1, "gates": [{"id": 1, "kind": "input", "args": [0]}],
            "outputs": [0], "homogeneous": false}"#;
        assert!(matches!(parse_circuit(unordered), Err(Error::Validation(_))));
    }

    #[test]
    fn sum_is_right_folded() {
        let mut b = CircuitBuilder::new(3);
        let xs: Vec<_> = (0..3).map(|i| b.input(i)).collect();
        let root = b.sum(&xs);
        let c = b.finish(vec![root], true).unwrap();
        assert_eq!(c.gates()[root].kind, GateKind::Add(0, 3));
        assert_eq!(c.gates()[3].kind, GateKind::Add(1, 2));
    }
}
