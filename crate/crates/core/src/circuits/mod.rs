//! Public interconnect between gate programs.
//!
//! A [`Circuit`] is a DAG of inputs, constants, gate slots and classical
//! wiring (NOT, XOR, fan-out). Only the slot tables are secret; the wiring is
//! public and travels with the program header.

mod predict;
mod randomize;

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{GateOtp, GateTable, Scheme};
use crate::error::{Error, Result};

pub use predict::{predict_success, SuccessPrediction};
pub use randomize::{randomize_not_pairs, randomize_not_pairs_with, Randomized};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Input { label: String },
    Const { bit: bool },
    /// A gate program. `table` is `None` in redacted (public) copies.
    OtpSlot {
        arity: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<GateTable>,
    },
    Not,
    Xor,
    Fanout,
    Output { label: String },
}

impl Node {
    pub fn slot(table: GateTable) -> Self {
        Node::OtpSlot {
            arity: table.k(),
            table: Some(table),
        }
    }

    fn in_degree(&self) -> usize {
        match self {
            Node::Input { .. } | Node::Const { .. } => 0,
            Node::OtpSlot { arity, .. } => *arity as usize,
            Node::Not | Node::Fanout | Node::Output { .. } => 1,
            Node::Xor => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub id: usize,
    #[serde(flatten)]
    pub node: Node,
}

/// Wire from the output of `from` into input `port` of `to`. Port 0 of a
/// slot is its most significant input bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub port: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit", into = "RawCircuit")]
pub struct Circuit {
    nodes: Vec<NodeEntry>,
    edges: Vec<Edge>,
    sources: Vec<Vec<usize>>,
    order: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawCircuit {
    nodes: Vec<NodeEntry>,
    edges: Vec<Edge>,
}

impl TryFrom<RawCircuit> for Circuit {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Self> {
        for (i, e) in raw.nodes.iter().enumerate() {
            if e.id != i {
                return Err(Error::invalid(format!("node at position {i} has id {}", e.id)));
            }
        }
        Circuit::new(raw.nodes.into_iter().map(|e| e.node).collect(), raw.edges)
    }
}

impl From<Circuit> for RawCircuit {
    fn from(c: Circuit) -> Self {
        RawCircuit {
            nodes: c.nodes,
            edges: c.edges,
        }
    }
}

impl Circuit {
    /// Validates arities, port coverage, out-degrees and acyclicity.
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self> {
        let n = nodes.len();
        let mut sources: Vec<Vec<Option<usize>>> = nodes.iter().map(|nd| vec![None; nd.in_degree()]).collect();
        let mut out_degree = vec![0usize; n];
        for e in &edges {
            if e.from >= n || e.to >= n {
                return Err(Error::invalid(format!("edge {e:?} references a missing node")));
            }
            let slot = sources[e.to]
                .get_mut(e.port)
                .ok_or_else(|| Error::invalid(format!("edge {e:?} targets a port the node does not have")))?;
            if slot.replace(e.from).is_some() {
                return Err(Error::invalid(format!("port {} of node {} wired twice", e.port, e.to)));
            }
            out_degree[e.from] += 1;
        }
        for (id, node) in nodes.iter().enumerate() {
            if sources[id].iter().any(Option::is_none) {
                return Err(Error::invalid(format!("node {id} has an unconnected input port")));
            }
            let outs = out_degree[id];
            let ok = match node {
                Node::Output { .. } => outs == 0,
                Node::Fanout => outs >= 1,
                _ => outs == 1,
            };
            if !ok {
                return Err(Error::invalid(format!("node {id} ({node:?}) has {outs} out-wires")));
            }
            if let Node::OtpSlot { arity, table: Some(t) } = node {
                if t.k() != *arity {
                    return Err(Error::invalid(format!("slot {id} arity {arity} disagrees with table {t}")));
                }
            }
            if let Node::OtpSlot { arity: 0, .. } = node {
                return Err(Error::invalid(format!("slot {id} has no inputs")));
            }
        }
        let sources: Vec<Vec<usize>> = sources
            .into_iter()
            .map(|s| s.into_iter().map(|x| x.expect("checked")).collect())
            .collect();

        let mut indeg: Vec<usize> = sources.iter().map(Vec::len).collect();
        let mut succ = vec![Vec::new(); n];
        for e in &edges {
            succ[e.from].push(e.to);
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
        if order.len() != n {
            return Err(Error::invalid("circuit contains a cycle"));
        }
        let nodes = nodes
            .into_iter()
            .enumerate()
            .map(|(id, node)| NodeEntry { id, node })
            .collect();
        Ok(Self {
            nodes,
            edges,
            sources,
            order,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawCircuit = serde_json::from_str(s).map_err(|e| Error::Parse {
            offset: json_offset(s, &e),
            message: e.to_string(),
        })?;
        raw.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().map(|e| &e.node)
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id].node
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Source node of each input port of `id`, by port.
    pub fn sources(&self, id: usize) -> &[usize] {
        &self.sources[id]
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    pub fn input_ids(&self) -> Vec<usize> {
        self.ids_where(|n| matches!(n, Node::Input { .. }))
    }

    pub fn output_ids(&self) -> Vec<usize> {
        self.ids_where(|n| matches!(n, Node::Output { .. }))
    }

    /// Slot ids in topological order.
    pub fn slot_ids(&self) -> Vec<usize> {
        self.order
            .iter()
            .copied()
            .filter(|&i| matches!(self.node(i), Node::OtpSlot { .. }))
            .collect()
    }

    fn ids_where(&self, f: impl Fn(&Node) -> bool) -> Vec<usize> {
        (0..self.len()).filter(|&i| f(self.node(i))).collect()
    }

    pub fn slot_table(&self, id: usize) -> Result<&GateTable> {
        match self.node(id) {
            Node::OtpSlot { table: Some(t), .. } => Ok(t),
            Node::OtpSlot { table: None, .. } => Err(Error::invalid(format!("slot {id} is redacted"))),
            other => Err(Error::invalid(format!("node {id} is not a slot: {other:?}"))),
        }
    }

    /// Public copy with every slot table removed.
    pub fn redacted(&self) -> Self {
        let mut c = self.clone();
        for e in &mut c.nodes {
            if let Node::OtpSlot { table, .. } = &mut e.node {
                *table = None;
            }
        }
        c
    }

    pub(crate) fn with_slot_table(&self, id: usize, t: GateTable) -> Self {
        let mut c = self.clone();
        c.nodes[id].node = Node::slot(t);
        c
    }

    /// Topological evaluation with a caller-supplied slot semantics.
    /// `inputs` follows [`Circuit::input_ids`] order; outputs follow
    /// [`Circuit::output_ids`] order.
    pub fn evaluate_with<F>(&self, inputs: &[bool], mut slot: F) -> Result<Vec<bool>>
    where
        F: FnMut(usize, &[bool]) -> Result<bool>,
    {
        let input_ids = self.input_ids();
        if inputs.len() != input_ids.len() {
            return Err(Error::invalid(format!(
                "circuit has {} inputs, got {}",
                input_ids.len(),
                inputs.len()
            )));
        }
        let mut value = vec![false; self.len()];
        for (&id, &b) in input_ids.iter().zip(inputs) {
            value[id] = b;
        }
        for &id in &self.order {
            let ins: Vec<bool> = self.sources[id].iter().map(|&s| value[s]).collect();
            value[id] = match self.node(id) {
                Node::Input { .. } => value[id],
                Node::Const { bit } => *bit,
                Node::OtpSlot { .. } => slot(id, &ins)?,
                Node::Not => !ins[0],
                Node::Xor => ins[0] ^ ins[1],
                Node::Fanout | Node::Output { .. } => ins[0],
            };
        }
        Ok(self.output_ids().iter().map(|&o| value[o]).collect())
    }

    /// Noiseless reference evaluation.
    pub fn ideal_eval(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        self.evaluate_with(inputs, |id, bits| self.slot_table(id)?.eval_bits(bits))
    }

    /// One noisy execution with every slot encoded under `scheme`.
    pub fn sample_outputs<R: Rng + ?Sized>(
        &self,
        inputs: &[bool],
        scheme: Scheme,
        fidelity: f64,
        rng: &mut R,
    ) -> Result<Vec<bool>> {
        self.evaluate_with(inputs, |id, bits| {
            let mut otp = GateOtp::encode(scheme, self.slot_table(id)?, rng)?;
            otp.apply_noise(fidelity, rng)?;
            otp.evaluate(bits, rng)
        })
    }
}

pub(crate) fn json_offset(s: &str, e: &serde_json::Error) -> usize {
    if e.line() == 0 {
        return s.len();
    }
    let line_start: usize = s.split_inclusive('\n').take(e.line() - 1).map(str::len).sum();
    (line_start + e.column().saturating_sub(1)).min(s.len())
}

/// Comparator for the millionaires problem. `alice_bits` is most significant
/// first. Bob's inputs are labelled `bob0` (most significant) onward and the
/// single output `gt` is `[bob > alice]`. Slots run least significant bit
/// first: Alice bit 1 gives AND, bit 0 gives OR, each fed (Bob bit, carry)
/// with the initial carry 0.
pub fn compile_millionaires(alice_bits: &[bool], n: usize) -> Result<Circuit> {
    if n == 0 || alice_bits.len() != n {
        return Err(Error::invalid(format!(
            "Alice's number has {} bits, expected width {n} >= 1",
            alice_bits.len()
        )));
    }
    let mut nodes: Vec<Node> = (0..n).map(|i| Node::Input { label: format!("bob{i}") }).collect();
    let mut edges = Vec::new();
    nodes.push(Node::Const { bit: false });
    let mut carry = n;
    for pos in (0..n).rev() {
        let table = if alice_bits[pos] { GateTable::and() } else { GateTable::or() };
        let id = nodes.len();
        nodes.push(Node::slot(table));
        edges.push(Edge { from: pos, to: id, port: 0 });
        edges.push(Edge { from: carry, to: id, port: 1 });
        carry = id;
    }
    let out = nodes.len();
    nodes.push(Node::Output { label: "gt".into() });
    edges.push(Edge { from: carry, to: out, port: 0 });
    Circuit::new(nodes, edges)
}

/// Parses a bit string such as "0101".
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::invalid(format!("bad bit {other:?} in {s:?}"))),
        })
        .collect()
}
