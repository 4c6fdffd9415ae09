//! Scalar computation tape with reverse-mode differentiation.
//!
//! Operations append nodes to a [`ValueGraph`] during the forward pass;
//! [`ValueGraph::backward`] replays the tape in reverse to accumulate
//! gradients via the chain rule. Node ids are issued in construction order,
//! so the tape is topologically sorted by construction and the backward pass
//! visits each node exactly once.
//!
//! Graphs are rebuilt every optimization step ([`ValueGraph::clear`] keeps
//! the allocation). All accumulation is sequential in tape order, which
//! keeps results bit-reproducible for a fixed op sequence.

use crate::error::{Error, Result};

/// Handle to a node on a [`ValueGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeId(u32);

impl NodeId {
    fn idx(self) -> usize {
        self.0 as usize
    }
}

/// Operation that produced a node.
#[derive(Debug, Clone, Copy)]
enum Op {
    /// Input or constant; gradient flows in but nowhere further.
    Leaf,
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Div(NodeId, NodeId),
    /// `a * b + c` in a single rounding (hardware FMA).
    MulAdd(NodeId, NodeId, NodeId),
    Neg(NodeId),
    Exp(NodeId),
    Ln(NodeId),
    Tanh(NodeId),
    Sqrt(NodeId),
    /// Maximum of two nodes; on ties the subgradient goes to the first.
    Max(NodeId, NodeId),
}

#[derive(Debug, Clone, Copy)]
struct Node {
    op: Op,
    value: f64,
}

/// Reverse-mode scalar tape.
#[derive(Debug, Default)]
pub struct ValueGraph {
    nodes: Vec<Node>,
}

impl ValueGraph {
    pub fn new() -> Self {
        Self { nodes: Vec::new() }
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            nodes: Vec::with_capacity(capacity),
        }
    }

    /// Number of nodes recorded so far.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Drops all nodes but keeps the allocation for the next step.
    pub fn clear(&mut self) {
        self.nodes.clear();
    }

    /// Cached value of a node.
    pub fn value(&self, id: NodeId) -> f64 {
        self.nodes[id.idx()].value
    }

    fn push(&mut self, op: Op, value: f64) -> NodeId {
        debug_assert!(value.is_finite(), "non-finite node value {value} from {op:?}");
        let id = NodeId(u32::try_from(self.nodes.len()).expect("graph node count overflow"));
        self.nodes.push(Node { op, value });
        id
    }

    /// Inserts a leaf node. Leaves carry inputs, parameters, and constants;
    /// which gradients are read afterwards is the caller's choice.
    pub fn leaf(&mut self, value: f64) -> NodeId {
        self.push(Op::Leaf, value)
    }

    /// Alias of [`ValueGraph::leaf`] for values used as constants.
    pub fn constant(&mut self, value: f64) -> NodeId {
        self.leaf(value)
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = self.value(a) + self.value(b);
        self.push(Op::Add(a, b), v)
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = self.value(a) - self.value(b);
        self.push(Op::Sub(a, b), v)
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = self.value(a) * self.value(b);
        self.push(Op::Mul(a, b), v)
    }

    pub fn div(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = self.value(a) / self.value(b);
        self.push(Op::Div(a, b), v)
    }

    /// `a * b + c` fused; the workhorse of dense layers.
    pub fn mul_add(&mut self, a: NodeId, b: NodeId, c: NodeId) -> NodeId {
        let v = self.value(a).mul_add(self.value(b), self.value(c));
        self.push(Op::MulAdd(a, b, c), v)
    }

    pub fn neg(&mut self, a: NodeId) -> NodeId {
        let v = -self.value(a);
        self.push(Op::Neg(a), v)
    }

    pub fn exp(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).exp();
        self.push(Op::Exp(a), v)
    }

    pub fn ln(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).ln();
        self.push(Op::Ln(a), v)
    }

    pub fn tanh(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).tanh();
        self.push(Op::Tanh(a), v)
    }

    pub fn sqrt(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).sqrt();
        self.push(Op::Sqrt(a), v)
    }

    pub fn max(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (va, vb) = (self.value(a), self.value(b));
        let v = if va >= vb { va } else { vb };
        self.push(Op::Max(a, b), v)
    }

    /// Sequential left-fold sum. Returns a zero constant for an empty slice.
    pub fn sum(&mut self, ids: &[NodeId]) -> NodeId {
        match ids.split_first() {
            None => self.constant(0.0),
            Some((&first, rest)) => {
                let mut acc = first;
                for &id in rest {
                    acc = self.add(acc, id);
                }
                acc
            }
        }
    }

    /// Reverse-mode sweep from a scalar output node.
    ///
    /// Every node reachable from `output` receives its adjoint; unreachable
    /// leaves keep gradient zero.
    pub fn backward(&self, output: NodeId) -> Result<Gradients> {
        if output.idx() >= self.nodes.len() {
            return Err(Error::InvalidArgument(format!(
                "backward output node {} not on graph of {} nodes",
                output.0,
                self.nodes.len()
            )));
        }
        let mut grads = vec![0.0; self.nodes.len()];
        grads[output.idx()] = 1.0;

        for idx in (0..=output.idx()).rev() {
            let g = grads[idx];
            if g == 0.0 {
                continue;
            }
            let node = self.nodes[idx];
            match node.op {
                Op::Leaf => {}
                Op::Add(a, b) => {
                    grads[a.idx()] += g;
                    grads[b.idx()] += g;
                }
                Op::Sub(a, b) => {
                    grads[a.idx()] += g;
                    grads[b.idx()] -= g;
                }
                Op::Mul(a, b) => {
                    let (va, vb) = (self.nodes[a.idx()].value, self.nodes[b.idx()].value);
                    grads[a.idx()] += g * vb;
                    grads[b.idx()] += g * va;
                }
                Op::Div(a, b) => {
                    let (va, vb) = (self.nodes[a.idx()].value, self.nodes[b.idx()].value);
                    grads[a.idx()] += g / vb;
                    grads[b.idx()] -= g * va / (vb * vb);
                }
                Op::MulAdd(a, b, c) => {
                    let (va, vb) = (self.nodes[a.idx()].value, self.nodes[b.idx()].value);
                    grads[a.idx()] += g * vb;
                    grads[b.idx()] += g * va;
                    grads[c.idx()] += g;
                }
                Op::Neg(a) => grads[a.idx()] -= g,
                Op::Exp(a) => grads[a.idx()] += g * node.value,
                Op::Ln(a) => grads[a.idx()] += g / self.nodes[a.idx()].value,
                Op::Tanh(a) => grads[a.idx()] += g * (1.0 - node.value * node.value),
                Op::Sqrt(a) => grads[a.idx()] += g / (2.0 * node.value),
                Op::Max(a, b) => {
                    let (va, vb) = (self.nodes[a.idx()].value, self.nodes[b.idx()].value);
                    if va >= vb {
                        grads[a.idx()] += g;
                    } else {
                        grads[b.idx()] += g;
                    }
                }
            }
        }
        Ok(Gradients { grads })
    }
}

/// Adjoints produced by [`ValueGraph::backward`].
#[derive(Debug)]
pub struct Gradients {
    grads: Vec<f64>,
}

impl Gradients {
    /// Gradient of the backward output with respect to a node.
    pub fn get(&self, id: NodeId) -> f64 {
        self.grads[id.idx()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_gradient() {
        // f(x) = x^2 at x = 3 -> df/dx = 6
        let mut g = ValueGraph::new();
        let x = g.leaf(3.0);
        let y = g.mul(x, x);
        assert_eq!(g.value(y), 9.0);
        let grads = g.backward(y).unwrap();
        assert_eq!(grads.get(x), 6.0);
    }

    #[test]
    fn constant_has_zero_gradient() {
        let mut g = ValueGraph::new();
        let x = g.leaf(5.0);
        let c = g.constant(11.0);
        let grads = g.backward(c).unwrap();
        assert_eq!(grads.get(x), 0.0);
    }

    #[test]
    fn unreached_leaves_get_zero() {
        let mut g = ValueGraph::new();
        let x = g.leaf(2.0);
        let y = g.leaf(4.0);
        let out = g.mul(x, x);
        let grads = g.backward(out).unwrap();
        assert_eq!(grads.get(y), 0.0);
        assert_eq!(grads.get(x), 4.0);
    }

    #[test]
    fn div_and_transcendental_rules() {
        // f(x) = exp(ln(x) / x) at x = 2; checked against central differences.
        let f = |x: f64| (x.ln() / x).exp();
        let mut g = ValueGraph::new();
        let x = g.leaf(2.0);
        let lx = g.ln(x);
        let q = g.div(lx, x);
        let y = g.exp(q);
        assert!((g.value(y) - f(2.0)).abs() < 1e-15);

        let grads = g.backward(y).unwrap();
        let h = 1e-6;
        let fd = (f(2.0 + h) - f(2.0 - h)) / (2.0 * h);
        assert!((grads.get(x) - fd).abs() < 1e-8);
    }

    #[test]
    fn mul_add_matches_separate_ops_gradient() {
        let mut g = ValueGraph::new();
        let a = g.leaf(1.5);
        let b = g.leaf(-2.0);
        let c = g.leaf(0.25);
        let out = g.mul_add(a, b, c);
        let grads = g.backward(out).unwrap();
        assert_eq!(grads.get(a), -2.0);
        assert_eq!(grads.get(b), 1.5);
        assert_eq!(grads.get(c), 1.0);
    }

    #[test]
    fn max_routes_gradient_to_first_on_ties() {
        let mut g = ValueGraph::new();
        let a = g.leaf(1.0);
        let b = g.leaf(1.0);
        let m = g.max(a, b);
        let grads = g.backward(m).unwrap();
        assert_eq!(grads.get(a), 1.0);
        assert_eq!(grads.get(b), 0.0);
    }

    #[test]
    fn tanh_and_sqrt_gradients() {
        let mut g = ValueGraph::new();
        let x = g.leaf(0.7);
        let t = g.tanh(x);
        let s = g.sqrt(x);
        let out = g.mul(t, s);
        let grads = g.backward(out).unwrap();
        let f = |x: f64| x.tanh() * x.sqrt();
        let h = 1e-6;
        let fd = (f(0.7 + h) - f(0.7 - h)) / (2.0 * h);
        assert!((grads.get(x) - fd).abs() < 1e-9);
    }

    #[test]
    fn sum_of_empty_slice_is_zero_constant() {
        let mut g = ValueGraph::new();
        let s = g.sum(&[]);
        assert_eq!(g.value(s), 0.0);
    }

    #[test]
    fn fan_out_accumulates() {
        // f(x) = x*x + x at x = 3 -> 2x + 1 = 7
        let mut g = ValueGraph::new();
        let x = g.leaf(3.0);
        let sq = g.mul(x, x);
        let y = g.add(sq, x);
        let grads = g.backward(y).unwrap();
        assert_eq!(grads.get(x), 7.0);
    }

    #[test]
    fn backward_rejects_dangling_node_id() {
        let g2 = {
            let mut g = ValueGraph::new();
            g.leaf(1.0);
            g
        };
        let mut big = ValueGraph::new();
        let a = big.leaf(1.0);
        let b = big.leaf(2.0);
        let id = big.add(a, b);
        assert!(g2.backward(id).is_err());
    }

    #[test]
    fn clear_retains_capacity() {
        let mut g = ValueGraph::with_capacity(16);
        for _ in 0..10 {
            g.leaf(1.0);
        }
        g.clear();
        assert!(g.is_empty());
        let x = g.leaf(4.0);
        assert_eq!(g.value(x), 4.0);
    }
}
