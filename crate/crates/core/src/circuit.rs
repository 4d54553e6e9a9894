//! Sliced circuit representation.
//!
//! A circuit is an ordered list of slices. Every slice holds gates acting on
//! pairwise-disjoint qubit sets, so all gates of a slice may run concurrently.
//!
//! Text format, one slice per line:
//!
//! ```text
//! # comment
//! cnot(0,1) (2)
//! h( 3 ) swap(4, 5)
//! ```
//!
//! A gate tuple is an optional lowercase name followed by a parenthesised,
//! comma-separated list of qubit indices.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Location, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    name: Option<String>,
    qubits: Vec<usize>,
}

impl Gate {
    pub fn new(name: Option<String>, qubits: Vec<usize>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::Config("a gate needs at least one qubit".into()));
        }
        if let Some(q) = first_duplicate(&qubits) {
            return Err(Error::DuplicateQubit { line: 0, qubit: q });
        }
        Ok(Gate { name, qubits })
    }

    pub fn unnamed(qubits: Vec<usize>) -> Result<Self> {
        Gate::new(None, qubits)
    }

    pub fn named(name: &str, qubits: Vec<usize>) -> Result<Self> {
        Gate::new(Some(name.to_string()), qubits)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn arity(&self) -> usize {
        self.qubits.len()
    }

    /// Key used to look up the gate delay: the gate name, or `default_<k>q`.
    pub fn delay_key(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => default_delay_key(self.arity()),
        }
    }
}

pub fn default_delay_key(arity: usize) -> String {
    format!("default_{arity}q")
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.name {
            f.write_str(n)?;
        }
        f.write_str("(")?;
        for (i, q) in self.qubits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{q}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Slice {
    gates: Vec<Gate>,
}

impl Slice {
    pub fn new(gates: Vec<Gate>) -> Result<Self> {
        let mut seen = HashSet::new();
        for g in &gates {
            for &q in g.qubits() {
                if !seen.insert(q) {
                    return Err(Error::SliceOverlap { line: 0, qubit: q });
                }
            }
        }
        Ok(Slice { gates })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    slices: Vec<Slice>,
    num_qubits: usize,
}

impl Circuit {
    pub fn new(slices: Vec<Slice>) -> Self {
        let num_qubits = slices
            .iter()
            .flat_map(|s| s.gates.iter())
            .flat_map(|g| g.qubits.iter())
            .max()
            .map_or(0, |&m| m + 1);
        Circuit { slices, num_qubits }
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    /// One more than the largest qubit index referenced.
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_gates(&self) -> usize {
        self.slices.iter().map(Slice::len).sum()
    }

    /// Canonical text form; `parse_circuit(&c.render()) == c`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.slices {
            let line: Vec<String> = s.gates.iter().map(Gate::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CircuitStats {
    pub gates_by_arity: BTreeMap<usize, usize>,
    pub depth: usize,
}

pub fn circuit_stats(c: &Circuit) -> CircuitStats {
    let mut gates_by_arity = BTreeMap::new();
    for g in c.slices.iter().flat_map(|s| s.gates.iter()) {
        *gates_by_arity.entry(g.arity()).or_insert(0) += 1;
    }
    CircuitStats {
        gates_by_arity,
        depth: c.slices.len(),
    }
}

fn first_duplicate(qubits: &[usize]) -> Option<usize> {
    let mut seen = HashSet::with_capacity(qubits.len());
    qubits.iter().copied().find(|q| !seen.insert(*q))
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut slices = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let gates = LineParser::new(content, line_no).parse()?;
        let mut seen = HashSet::new();
        for g in &gates {
            for &q in &g.qubits {
                if !seen.insert(q) {
                    return Err(Error::SliceOverlap {
                        line: line_no,
                        qubit: q,
                    });
                }
            }
        }
        slices.push(Slice { gates });
    }
    Ok(Circuit::new(slices))
}

struct LineParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> LineParser<'a> {
    fn new(s: &'a str, line: usize) -> Self {
        LineParser {
            bytes: s.as_bytes(),
            pos: 0,
            line,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            at: Location {
                line: self.line,
                column: self.pos + 1,
            },
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r')) {
            self.pos += 1;
        }
    }

    fn parse(mut self) -> Result<Vec<Gate>> {
        let mut gates = Vec::new();
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                break;
            }
            gates.push(self.gate()?);
        }
        Ok(gates)
    }

    fn gate(&mut self) -> Result<Gate> {
        let name = self.name()?;
        if self.peek() != Some(b'(') {
            return Err(self.err("expected `(`"));
        }
        self.pos += 1;
        let mut qubits = Vec::new();
        loop {
            self.skip_ws();
            qubits.push(self.number()?);
            self.skip_ws();
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                Some(_) => return Err(self.err("expected `,` or `)`")),
                None => return Err(self.err("unterminated gate tuple")),
            }
        }
        if let Some(q) = first_duplicate(&qubits) {
            return Err(Error::DuplicateQubit {
                line: self.line,
                qubit: q,
            });
        }
        Ok(Gate { name, qubits })
    }

    fn name(&mut self) -> Result<Option<String>> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => {}
            Some(b'(') => return Ok(None),
            _ => return Err(self.err("expected gate name or `(`")),
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() || c == b'_')
        {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        Ok(Some(s.to_string()))
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected qubit index"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        s.parse().map_err(|_| {
            self.pos = start;
            self.err("qubit index out of range")
        })
    }
}

/// Probability vector over gate arities; entry `i` is the weight of arity `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArityDistribution(Vec<f64>);

impl ArityDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::ArityDistribution("empty distribution".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::ArityDistribution(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::ArityDistribution(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(ArityDistribution(probs))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    /// Largest arity with non-zero probability.
    pub fn max_arity(&self) -> usize {
        self.0.iter().rposition(|&p| p > 0.0).map_or(0, |i| i + 1)
    }
}

/// Generates a random sliced circuit.
///
/// Gates are drawn one at a time: an arity from `dist`, then that many
/// distinct qubits uniformly. A gate joins the current slice if none of its
/// qubits is already busy there; otherwise the slice is closed and the gate
/// opens the next one.
pub fn random_circuit(
    num_qubits: usize,
    num_gates: usize,
    dist: &ArityDistribution,
    seed: u64,
) -> Result<Circuit> {
    if num_gates == 0 {
        return Err(Error::ArityDistribution("num_gates must be at least 1".into()));
    }
    let max_arity = dist.max_arity();
    if max_arity > num_qubits {
        return Err(Error::ArityDistribution(format!(
            "arity {max_arity} exceeds the {num_qubits} available qubits"
        )));
    }
    let weights = WeightedIndex::new(dist.probabilities())
        .map_err(|e| Error::ArityDistribution(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut slices = Vec::new();
    let mut current: Vec<Gate> = Vec::new();
    let mut busy = vec![false; num_qubits];
    for _ in 0..num_gates {
        let arity = weights.sample(&mut rng) + 1;
        let qubits = rand::seq::index::sample(&mut rng, num_qubits, arity).into_vec();
        if qubits.iter().any(|&q| busy[q]) {
            for g in &current {
                for &q in &g.qubits {
                    busy[q] = false;
                }
            }
            slices.push(Slice {
                gates: std::mem::take(&mut current),
            });
        }
        for &q in &qubits {
            busy[q] = true;
        }
        current.push(Gate { name: None, qubits });
    }
    slices.push(Slice { gates: current });
    Ok(Circuit::new(slices))
}
