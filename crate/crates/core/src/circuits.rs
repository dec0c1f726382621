//! Distributed circuits: exact NOT/XOR on shares, box-backed noisy AND.
//!
//! Every gate defines exactly one wire, so wire `i` is the output of gate
//! `i` and a gate may only read wires with smaller indices; this makes the
//! gate list its own topological order.
//!
//! # Text format
//!
//! ```text
//! # nlbox circuit v1
//! alice 2
//! bob 2
//! INPUT A0 -> w0
//! INPUT B0 -> w1
//! AND w0 w1 -> w2
//! NOT w2 -> w3
//! XOR w2 w3 -> w4
//! OUTPUT w4
//! ```
//!
//! The header line is mandatory. `alice`/`bob` declare input widths and
//! precede the gates. Wire names are identifiers (`[A-Za-z_][A-Za-z0-9_]*`)
//! and may be defined once. `A<i>`/`B<j>` name input bits of Alice/Bob.
//! Exactly one `OUTPUT` line ends the circuit. Blank lines and lines
//! starting with `#` after the header are ignored.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::RangeInclusive;

use crate::analysis::xor_chain_success;
use crate::bits::{Bit, DistributedBit};
use crate::boxes::BoxModel;
use crate::engines::{exact_success, sample_success, ExactMode, InputSelection, SampleConfig};
use crate::error::{Error, Result};
use crate::function::MAX_ARITY;
use crate::party::{Party, PartyContext};
use crate::protocols::{and_share, execute, Composition, DistributedAndGate, Protocol};
use crate::random::{derive_seed, RandomSource};
use crate::scalar::Scalar;

pub const FORMAT_HEADER: &str = "# nlbox circuit v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Alice(u32),
    Bob(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(Source),
    Not(usize),
    Xor(usize, usize),
    And(usize, usize),
}

impl Gate {
    fn operands(&self) -> Vec<usize> {
        match *self {
            Gate::Input(_) => vec![],
            Gate::Not(a) => vec![a],
            Gate::Xor(a, b) | Gate::And(a, b) => vec![a, b],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributedCircuit {
    alice_inputs: u32,
    bob_inputs: u32,
    gates: Vec<Gate>,
    output: usize,
}

impl DistributedCircuit {
    pub fn new(alice_inputs: u32, bob_inputs: u32, gates: Vec<Gate>, output: usize) -> Result<Self> {
        for (what, width) in [("alice inputs", alice_inputs), ("bob inputs", bob_inputs)] {
            if width > MAX_ARITY {
                return Err(Error::ArityGuard {
                    what,
                    value: width,
                    max: MAX_ARITY,
                });
            }
        }
        for (i, gate) in gates.iter().enumerate() {
            if let Some(bad) = gate.operands().into_iter().find(|&w| w >= i) {
                return Err(Error::InvalidCircuit(format!("gate {i} reads wire {bad} before it is defined")));
            }
            match *gate {
                Gate::Input(Source::Alice(k)) if k >= alice_inputs => {
                    return Err(Error::InvalidCircuit(format!("gate {i} reads A{k} but alice has {alice_inputs} inputs")))
                }
                Gate::Input(Source::Bob(k)) if k >= bob_inputs => {
                    return Err(Error::InvalidCircuit(format!("gate {i} reads B{k} but bob has {bob_inputs} inputs")))
                }
                _ => {}
            }
        }
        if output >= gates.len() {
            return Err(Error::InvalidCircuit(format!("output wire {output} is not defined")));
        }
        Ok(DistributedCircuit {
            alice_inputs,
            bob_inputs,
            gates,
            output,
        })
    }

    pub fn arity(&self) -> (u32, u32) {
        (self.alice_inputs, self.bob_inputs)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn and_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::And(..))).count()
    }

    pub fn xor_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Xor(..))).count()
    }

    /// Boxes needed for one evaluation: two per AND gate.
    pub fn box_count(&self) -> usize {
        2 * self.and_count()
    }

    /// The Boolean value the circuit computes.
    pub fn evaluate(&self, x: u64, y: u64) -> Bit {
        let mut wires: Vec<Bit> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match *gate {
                Gate::Input(Source::Alice(i)) => Bit::of(x, i),
                Gate::Input(Source::Bob(j)) => Bit::of(y, j),
                Gate::Not(a) => !wires[a],
                Gate::Xor(a, b) => wires[a] ^ wires[b],
                Gate::And(a, b) => wires[a] & wires[b],
            };
            wires.push(v);
        }
        wires[self.output]
    }

    /// One party's share of the output wire. AND gate `k` uses boxes
    /// `2k` and `2k + 1`.
    pub fn share<S: Scalar>(&self, input: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        let party = ctx.party();
        let mut wires: Vec<Bit> = Vec::with_capacity(self.gates.len());
        let mut and_index = 0;
        for gate in &self.gates {
            let v = match (*gate, party) {
                (Gate::Input(Source::Alice(i)), Party::Alice) => Bit::of(input, i),
                (Gate::Input(Source::Bob(j)), Party::Bob) => Bit::of(input, j),
                (Gate::Input(_), _) => Bit::ZERO,
                (Gate::Not(a), Party::Alice) => !wires[a],
                (Gate::Not(a), Party::Bob) => wires[a],
                (Gate::Xor(a, b), _) => wires[a] ^ wires[b],
                (Gate::And(a, b), _) => {
                    let slots = [2 * and_index, 2 * and_index + 1];
                    and_index += 1;
                    and_share(ctx, wires[a], wires[b], slots)?
                }
            };
            wires.push(v);
        }
        Ok(wires[self.output])
    }

    /// AND gates whose errors reach the output, if every AND gate reads
    /// only error-free wires. The output then equals the exact value XOR
    /// the independent errors of exactly these gates.
    pub fn output_error_set(&self) -> Option<BTreeSet<usize>> {
        let mut errors: Vec<BTreeSet<usize>> = Vec::with_capacity(self.gates.len());
        let mut and_index = 0;
        for gate in &self.gates {
            let set = match *gate {
                Gate::Input(_) => BTreeSet::new(),
                Gate::Not(a) => errors[a].clone(),
                Gate::Xor(a, b) => errors[a].symmetric_difference(&errors[b]).copied().collect(),
                Gate::And(a, b) => {
                    if !errors[a].is_empty() || !errors[b].is_empty() {
                        return None;
                    }
                    and_index += 1;
                    BTreeSet::from([and_index - 1])
                }
            };
            errors.push(set);
        }
        errors.swap_remove(self.output).into()
    }
}

/// `IP(x, y) = ⊕ᵢ xᵢ ∧ yᵢ`: one AND per bit pair, folded by an XOR chain.
pub fn build_ip_circuit(n: u32) -> Result<DistributedCircuit> {
    if n == 0 || n > MAX_ARITY {
        return Err(Error::ArityGuard {
            what: "inner product circuit width",
            value: n,
            max: MAX_ARITY,
        });
    }
    let mut gates = Vec::new();
    let mut acc = None;
    for i in 0..n {
        gates.push(Gate::Input(Source::Alice(i)));
        gates.push(Gate::Input(Source::Bob(i)));
        let len = gates.len();
        gates.push(Gate::And(len - 2, len - 1));
        let and = gates.len() - 1;
        acc = Some(match acc {
            None => and,
            Some(prev) => {
                gates.push(Gate::Xor(prev, and));
                gates.len() - 1
            }
        });
    }
    DistributedCircuit::new(n, n, gates, acc.expect("n >= 1"))
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::CircuitParse {
        line,
        message: message.into(),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_circuit(text: &str) -> Result<DistributedCircuit> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.find(|(_, l)| !l.is_empty()) {
        Some((_, l)) if l == FORMAT_HEADER => {}
        Some((n, l)) => return Err(parse_error(n, format!("expected `{FORMAT_HEADER}`, found `{l}`"))),
        None => return Err(parse_error(0, "empty circuit description")),
    }

    let mut alice = None;
    let mut bob = None;
    let mut gates = Vec::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut output = None;

    for (n, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if output.is_some() {
            return Err(parse_error(n, "nothing may follow OUTPUT"));
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let width = |slot: &mut Option<u32>, tokens: &[&str]| -> Result<()> {
            if !gates.is_empty() || slot.is_some() {
                return Err(parse_error(n, format!("`{}` must appear once, before the gates", tokens[0])));
            }
            let [_, w] = tokens else {
                return Err(parse_error(n, "expected `alice N` or `bob N`"));
            };
            *slot = Some(w.parse().map_err(|_| parse_error(n, format!("bad width `{w}`")))?);
            Ok(())
        };
        match tokens[0] {
            "alice" => width(&mut alice, &tokens)?,
            "bob" => width(&mut bob, &tokens)?,
            "OUTPUT" => {
                let [_, w] = tokens[..] else {
                    return Err(parse_error(n, "expected `OUTPUT wire`"));
                };
                output = Some(*names.get(w).ok_or_else(|| parse_error(n, format!("undefined wire `{w}`")))?);
            }
            op => {
                let (operands, target) = match tokens.iter().position(|t| *t == "->") {
                    Some(arrow) if arrow + 2 == tokens.len() => (&tokens[1..arrow], tokens[arrow + 1]),
                    _ => return Err(parse_error(n, "expected `OP operands -> wire`")),
                };
                let wire = |name: &str| -> Result<usize> {
                    names.get(name).copied().ok_or_else(|| parse_error(n, format!("undefined wire `{name}`")))
                };
                let gate = match (op, operands) {
                    ("INPUT", [src]) => {
                        let (party, index) = src.split_at(1.min(src.len()));
                        let index: u32 = index.parse().map_err(|_| parse_error(n, format!("bad input `{src}`")))?;
                        match party {
                            "A" => Gate::Input(Source::Alice(index)),
                            "B" => Gate::Input(Source::Bob(index)),
                            _ => return Err(parse_error(n, format!("bad input `{src}`"))),
                        }
                    }
                    ("NOT", [a]) => Gate::Not(wire(a)?),
                    ("XOR", [a, b]) => Gate::Xor(wire(a)?, wire(b)?),
                    ("AND", [a, b]) => Gate::And(wire(a)?, wire(b)?),
                    ("INPUT" | "NOT" | "XOR" | "AND", _) => {
                        return Err(parse_error(n, format!("wrong operand count for {op}")))
                    }
                    _ => return Err(parse_error(n, format!("unknown gate `{op}`"))),
                };
                if !is_identifier(target) {
                    return Err(parse_error(n, format!("bad wire name `{target}`")));
                }
                if names.insert(target.to_string(), gates.len()).is_some() {
                    return Err(parse_error(n, format!("wire `{target}` defined twice")));
                }
                gates.push(gate);
            }
        }
    }
    let output = output.ok_or_else(|| parse_error(0, "missing OUTPUT"))?;
    let alice = alice.ok_or_else(|| parse_error(0, "missing `alice N`"))?;
    let bob = bob.ok_or_else(|| parse_error(0, "missing `bob N`"))?;
    DistributedCircuit::new(alice, bob, gates, output)
}

impl fmt::Display for DistributedCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{FORMAT_HEADER}")?;
        writeln!(f, "alice {}", self.alice_inputs)?;
        writeln!(f, "bob {}", self.bob_inputs)?;
        for (i, gate) in self.gates.iter().enumerate() {
            match gate {
                Gate::Input(Source::Alice(k)) => writeln!(f, "INPUT A{k} -> w{i}")?,
                Gate::Input(Source::Bob(k)) => writeln!(f, "INPUT B{k} -> w{i}")?,
                Gate::Not(a) => writeln!(f, "NOT w{a} -> w{i}")?,
                Gate::Xor(a, b) => writeln!(f, "XOR w{a} w{b} -> w{i}")?,
                Gate::And(a, b) => writeln!(f, "AND w{a} w{b} -> w{i}")?,
            }
        }
        writeln!(f, "OUTPUT w{}", self.output)
    }
}

impl std::str::FromStr for DistributedCircuit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_circuit(s)
    }
}

/// A circuit evaluated by both parties over boxes of one model.
#[derive(Debug, Clone)]
pub struct CircuitProtocol<'a, S> {
    pub circuit: &'a DistributedCircuit,
    pub model: &'a BoxModel<S>,
}

impl<S: Scalar> Protocol<S> for CircuitProtocol<'_, S> {
    fn name(&self) -> String {
        format!("circuit({} and gates)", self.circuit.and_count())
    }
    fn arity(&self) -> (u32, u32) {
        self.circuit.arity()
    }
    fn target(&self, x: u64, y: u64) -> Bit {
        self.circuit.evaluate(x, y)
    }
    fn box_model(&self) -> Option<&BoxModel<S>> {
        Some(self.model)
    }
    fn box_count(&self) -> usize {
        self.circuit.box_count()
    }
    fn randomness_bits(&self) -> u64 {
        self.circuit.box_count() as u64 * u64::from(self.model.atom_bits())
    }
    fn alice(&self, x: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        self.circuit.share(x, ctx)
    }
    fn bob(&self, y: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        self.circuit.share(y, ctx)
    }
    fn composition(&self) -> Option<Composition<'_, S>> {
        let errors = self.circuit.output_error_set()?;
        Some(Composition::XorOfGates {
            gate: Box::new(DistributedAndGate { model: self.model }),
            count: errors.len(),
        })
    }
}

pub fn eval_circuit<S: Scalar>(
    circuit: &DistributedCircuit,
    x: u64,
    y: u64,
    model: &BoxModel<S>,
    source: &mut dyn RandomSource<S>,
) -> Result<DistributedBit> {
    let (m, n) = circuit.arity();
    if x >> m != 0 || y >> n != 0 {
        return Err(Error::InvalidConfig(format!("input ({x}, {y}) exceeds arity ({m}, {n})")));
    }
    Ok(execute(&CircuitProtocol { circuit, model }, x, y, source)?.output)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayEngine {
    /// Full enumeration up to `exact_up_to`, XOR-chain composition beyond.
    Exact,
    Sample,
    /// Full enumeration up to `exact_up_to`, sampling beyond.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecayConfig {
    pub engine: DecayEngine,
    pub exact_up_to: u32,
    pub trials: u64,
    /// Row `n` samples with `derive_seed(seed, n)`.
    pub seed: u64,
    pub workers: usize,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            engine: DecayEngine::Auto,
            exact_up_to: 3,
            trials: 100_000,
            seed: 0,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayMethod {
    FullEnumeration,
    Compositional,
    /// Sampled over uniformly random input pairs.
    Sampled,
}

impl fmt::Display for DecayMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayMethod::FullEnumeration => "exact",
            DecayMethod::Compositional => "compositional",
            DecayMethod::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow {
    pub n: u32,
    pub success: f64,
    pub method: DecayMethod,
    /// Present for sampled rows.
    pub ci95: Option<(f64, f64)>,
    pub trials: Option<u64>,
    /// `1/2 + 1/2·(2g − 1)ⁿ` when the AND gate success `g` is input-independent.
    pub analytic: Option<f64>,
}

/// Exact distributed-AND success, if it does not depend on the inputs.
pub fn and_gate_success(model: &BoxModel<f64>) -> Result<Option<f64>> {
    let exact = exact_success(&DistributedAndGate { model }, ExactMode::FullEnumeration)?;
    Ok(exact.is_input_independent().then_some(exact.worst_case))
}

/// Success of the inner-product circuit for each width in `widths`.
pub fn ip_decay_experiment(
    widths: RangeInclusive<u32>,
    model: &BoxModel<f64>,
    config: &DecayConfig,
) -> Result<Vec<DecayRow>> {
    model.validate()?;
    let g = and_gate_success(model)?;
    let mut rows = Vec::new();
    for n in widths {
        let circuit = build_ip_circuit(n)?;
        let protocol = CircuitProtocol {
            circuit: &circuit,
            model,
        };
        let analytic = g.map(|g| xor_chain_success(g, n as usize));
        let small = n <= config.exact_up_to;
        let row = match config.engine {
            DecayEngine::Exact | DecayEngine::Auto if small => {
                let exact = exact_success(&protocol, ExactMode::FullEnumeration)?;
                DecayRow {
                    n,
                    success: exact.worst_case,
                    method: DecayMethod::FullEnumeration,
                    ci95: None,
                    trials: None,
                    analytic,
                }
            }
            DecayEngine::Exact => {
                // The compositional value is input-independent, so skip
                // tabulating every input pair.
                let count = circuit
                    .output_error_set()
                    .ok_or_else(|| Error::CompositionUnavailable(protocol.name()))?
                    .len();
                let g = g.ok_or_else(|| Error::CompositionUnavailable("and gate success depends on its inputs".into()))?;
                DecayRow {
                    n,
                    success: xor_chain_success(g, count),
                    method: DecayMethod::Compositional,
                    ci95: None,
                    trials: None,
                    analytic,
                }
            }
            DecayEngine::Sample | DecayEngine::Auto => {
                let sampled = sample_success(
                    &protocol,
                    &SampleConfig::new(config.trials, derive_seed(config.seed, u64::from(n)))
                        .with_workers(config.workers)
                        .with_inputs(InputSelection::Uniform),
                )?;
                DecayRow {
                    n,
                    success: sampled.estimate,
                    method: DecayMethod::Sampled,
                    ci95: Some(sampled.ci95),
                    trials: Some(sampled.trials),
                    analytic,
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}
