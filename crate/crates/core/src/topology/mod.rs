//! Network structure: units, roles, delayed connections and memory blocks.
//!
//! A [`NetworkSpec`] is a plain description. Executors ([`crate::ffnn`],
//! [`crate::rnn`], [`crate::lstm`]) compile it into their own index plans and
//! keep trainable values in a separate [`crate::params::Params`] store.

mod builders;
mod text;

use std::collections::BTreeSet;
use std::fmt;

use crate::activation::Activation;
use crate::error::{Error, Result};

pub use builders::LstmLayout;

/// Dense unit index, `0..units.len()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitId(pub usize);

impl UnitId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for UnitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type BlockId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitRole {
    Input,
    Hidden,
    Output,
    Cell(BlockId),
    InputGate(BlockId),
    OutputGate(BlockId),
    ForgetGate(BlockId),
    GruUnit,
}

impl UnitRole {
    pub fn is_input(self) -> bool {
        matches!(self, UnitRole::Input)
    }

    pub fn is_gate(self) -> bool {
        matches!(
            self,
            UnitRole::InputGate(_) | UnitRole::OutputGate(_) | UnitRole::ForgetGate(_)
        )
    }

    /// Units updated by the memory-block equations (cells and their gates).
    pub fn in_block(self) -> Option<BlockId> {
        match self {
            UnitRole::Cell(b)
            | UnitRole::InputGate(b)
            | UnitRole::OutputGate(b)
            | UnitRole::ForgetGate(b) => Some(b),
            _ => None,
        }
    }
}

/// Transmission delay of a connection, in time steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delay {
    /// The source activation of the same step (environmental input, or a
    /// feed-forward edge inside one step).
    Zero,
    /// The source activation of the previous step (recurrent edge).
    One,
}

impl Delay {
    pub fn steps(self) -> u8 {
        match self {
            Delay::Zero => 0,
            Delay::One => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    pub id: UnitId,
    pub role: UnitRole,
    pub activation: Activation,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    pub src: UnitId,
    pub dst: UnitId,
    pub weight: f64,
    pub delay: Delay,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub id: BlockId,
    pub cells: Vec<UnitId>,
    pub input_gate: UnitId,
    pub output_gate: UnitId,
    pub forget_gate: Option<UnitId>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NetworkSpec {
    pub units: Vec<Unit>,
    pub connections: Vec<Connection>,
    pub blocks: Vec<Block>,
}

/// One broken structural rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub subject: String,
    pub rule: Rule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    NonDenseId,
    DanglingEndpoint,
    IntoInput,
    InputDelay,
    OutputFedByGate,
    SameStepCycle,
    BlockReadsSameStep,
    UnknownBlock,
    BlockMembership,
    EmptyBlock,
    DuplicateConnection,
    NonFinite,
}

impl Rule {
    pub fn message(self) -> &'static str {
        match self {
            Rule::NonDenseId => "unit ids must be dense and in order",
            Rule::DanglingEndpoint => "connection endpoint is not a unit",
            Rule::IntoInput => "input unit has incoming connection",
            Rule::InputDelay => "connection from an input unit must have delay 0",
            Rule::OutputFedByGate => "output unit fed by gate",
            Rule::SameStepCycle => "delay-0 connections form a cycle",
            Rule::BlockReadsSameStep => {
                "memory-block unit reads a same-step activation of a non-input unit"
            }
            Rule::UnknownBlock => "role names a block that does not exist",
            Rule::BlockMembership => "block member has a role that does not match the block",
            Rule::EmptyBlock => "memory block has no cells",
            Rule::DuplicateConnection => "duplicate connection",
            Rule::NonFinite => "non-finite weight or bias",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.rule.message())
    }
}

/// Predecessor and successor lists, indexed by unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    pub predecessors: Vec<Vec<UnitId>>,
    pub successors: Vec<Vec<UnitId>>,
}

/// Connection counts of a standard memory-block network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConnectionCount {
    pub block_internal: usize,
    pub input_side: usize,
    pub output_side: usize,
}

impl NetworkSpec {
    pub fn unit(&self, id: UnitId) -> &Unit {
        &self.units[id.0]
    }

    pub fn role(&self, id: UnitId) -> UnitRole {
        self.units[id.0].role
    }

    pub fn ids_with(&self, pred: impl Fn(UnitRole) -> bool) -> Vec<UnitId> {
        self.units
            .iter()
            .filter(|u| pred(u.role))
            .map(|u| u.id)
            .collect()
    }

    pub fn input_units(&self) -> Vec<UnitId> {
        self.ids_with(|r| r.is_input())
    }

    pub fn output_units(&self) -> Vec<UnitId> {
        self.ids_with(|r| r == UnitRole::Output)
    }

    pub fn add_unit(&mut self, role: UnitRole, activation: Activation, bias: f64) -> UnitId {
        let id = UnitId(self.units.len());
        self.units.push(Unit {
            id,
            role,
            activation,
            bias,
        });
        id
    }

    pub fn connect(&mut self, src: UnitId, dst: UnitId, weight: f64, delay: Delay) {
        self.connections.push(Connection {
            src,
            dst,
            weight,
            delay,
        });
    }

    /// Checks every structural rule and returns the violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.units.len();
        let mut push = |subject: String, rule: Rule| out.push(Violation { subject, rule });

        for (i, u) in self.units.iter().enumerate() {
            if u.id.0 != i {
                push(
                    format!("unit at position {i} (id {})", u.id),
                    Rule::NonDenseId,
                );
            }
            if !u.bias.is_finite() {
                push(format!("unit {i}"), Rule::NonFinite);
            }
            if let Some(b) = u.role.in_block() {
                match self.blocks.iter().find(|blk| blk.id == b) {
                    None => push(format!("unit {i}"), Rule::UnknownBlock),
                    Some(blk) => {
                        let listed = match u.role {
                            UnitRole::Cell(_) => blk.cells.contains(&u.id),
                            UnitRole::InputGate(_) => blk.input_gate == u.id,
                            UnitRole::OutputGate(_) => blk.output_gate == u.id,
                            UnitRole::ForgetGate(_) => blk.forget_gate == Some(u.id),
                            _ => true,
                        };
                        if !listed {
                            push(format!("unit {i} (block {b})"), Rule::BlockMembership);
                        }
                    }
                }
            }
        }

        for blk in &self.blocks {
            let subject = format!("block {}", blk.id);
            if blk.cells.is_empty() {
                push(subject.clone(), Rule::EmptyBlock);
            }
            let mut check = |id: UnitId, expect: UnitRole| {
                if id.0 >= n || self.units[id.0].role != expect {
                    push(format!("{subject} member {id}"), Rule::BlockMembership);
                }
            };
            for &c in &blk.cells {
                check(c, UnitRole::Cell(blk.id));
            }
            check(blk.input_gate, UnitRole::InputGate(blk.id));
            check(blk.output_gate, UnitRole::OutputGate(blk.id));
            if let Some(f) = blk.forget_gate {
                check(f, UnitRole::ForgetGate(blk.id));
            }
        }

        let mut seen = BTreeSet::new();
        for (k, c) in self.connections.iter().enumerate() {
            let subject = format!("connection #{k} ({} -> {})", c.src, c.dst);
            if c.src.0 >= n || c.dst.0 >= n {
                push(subject, Rule::DanglingEndpoint);
                continue;
            }
            if !c.weight.is_finite() {
                push(subject.clone(), Rule::NonFinite);
            }
            if !seen.insert((c.src, c.dst, c.delay.steps())) {
                push(subject.clone(), Rule::DuplicateConnection);
            }
            let src = self.units[c.src.0].role;
            let dst = self.units[c.dst.0].role;
            if dst.is_input() {
                push(subject.clone(), Rule::IntoInput);
            }
            if src.is_input() && c.delay != Delay::Zero {
                push(subject.clone(), Rule::InputDelay);
            }
            if dst == UnitRole::Output && src.is_gate() {
                push(subject.clone(), Rule::OutputFedByGate);
            }
            if dst.in_block().is_some() && !src.is_input() && c.delay == Delay::Zero {
                push(subject, Rule::BlockReadsSameStep);
            }
        }

        if self.same_step_order().is_none() {
            push("network".to_string(), Rule::SameStepCycle);
        }
        out
    }

    /// Returns `Err(InvalidSpec)` unless [`validate`](Self::validate) is clean.
    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(v))
        }
    }

    /// Topological order of non-input units over delay-0 edges between
    /// non-input units, or `None` when those edges contain a cycle.
    pub(crate) fn same_step_order(&self) -> Option<Vec<UnitId>> {
        let n = self.units.len();
        let mut indeg = vec![0usize; n];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for c in &self.connections {
            if c.src.0 >= n || c.dst.0 >= n || c.delay != Delay::Zero {
                continue;
            }
            if self.units[c.src.0].role.is_input() {
                continue;
            }
            indeg[c.dst.0] += 1;
            succ[c.src.0].push(c.dst.0);
        }
        let mut ready: Vec<usize> = (0..n)
            .filter(|&u| !self.units[u].role.is_input() && indeg[u] == 0)
            .rev()
            .collect();
        let mut order = Vec::new();
        while let Some(u) = ready.pop() {
            order.push(UnitId(u));
            for &v in succ[u].iter().rev() {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.push(v);
                }
            }
        }
        let non_input = self.units.iter().filter(|u| !u.role.is_input()).count();
        (order.len() == non_input).then_some(order)
    }

    pub fn adjacency(&self) -> Adjacency {
        let n = self.units.len();
        let mut predecessors = vec![Vec::new(); n];
        let mut successors = vec![Vec::new(); n];
        for c in &self.connections {
            predecessors[c.dst.0].push(c.src);
            successors[c.src.0].push(c.dst);
        }
        Adjacency {
            predecessors,
            successors,
        }
    }

    /// Closed-form connection counts of a standard memory-block network with
    /// `B` blocks of `C` cells, `In` inputs and `Out` outputs.
    ///
    /// The input/forget gate terms are counted once per cell because their
    /// state traces are kept per cell; `S` in the input and output terms is
    /// read as `C`.
    pub fn count_connections(&self) -> Result<ConnectionCount> {
        let b = self.blocks.len();
        if b == 0 {
            return Ok(ConnectionCount {
                block_internal: 0,
                input_side: 0,
                output_side: 0,
            });
        }
        let c = self.blocks[0].cells.len();
        if self.blocks.iter().any(|blk| blk.cells.len() != c) {
            return Err(Error::UnsupportedTopology(
                "memory blocks hold different numbers of cells".into(),
            ));
        }
        if self.blocks.iter().any(|blk| blk.forget_gate.is_none()) {
            return Err(Error::UnsupportedTopology(
                "complexity terms assume a forget gate in every block".into(),
            ));
        }
        for conn in &self.connections {
            if self.role(conn.dst) == UnitRole::Output
                && !matches!(self.role(conn.src), UnitRole::Cell(_))
            {
                return Err(Error::UnsupportedTopology(
                    "output units must receive signals from cells only".into(),
                ));
            }
        }
        let inputs = self.input_units().len();
        let outputs = self.output_units().len();
        Ok(ConnectionCount {
            block_internal: b * (c * (3 * b * c) + b * c),
            input_side: inputs * b * c,
            output_side: outputs * b * c,
        })
    }
}
