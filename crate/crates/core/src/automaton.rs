//! Deterministic finite automata with output reading base-`p` digits
//! least-significant first, their synthesis from the diagonal orbit,
//! minimization, evaluation, and decision procedures on residue sets.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::cartier::{diagonal_orbit, InvariantSpace, Orbit};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::rational::RationalFunction;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfao {
    field: PrimeField,
    outputs: Vec<u32>,
    initial: usize,
    transitions: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    id: usize,
    output: u32,
}

#[derive(Serialize, Deserialize)]
struct DfaoJson {
    p: u64,
    states: Vec<StateJson>,
    initial: usize,
    transitions: Vec<Vec<usize>>,
}

/// Base-`p` digits of `n`, least significant first; empty for `n = 0`.
pub fn digits_lsd(n: &BigUint, p: u32) -> Vec<u32> {
    let mut n = n.clone();
    let mut out = Vec::new();
    while n != BigUint::default() {
        let d = &n % p;
        out.push(d.iter_u32_digits().next().unwrap_or(0));
        n /= p;
    }
    out
}

fn from_digits(digits: &[u32], p: u32) -> BigUint {
    digits
        .iter()
        .rev()
        .fold(BigUint::default(), |acc, &d| acc * p + d)
}

impl Dfao {
    /// Validates and builds an automaton; `transitions[s][d]` is the target of
    /// state `s` on digit `d`.
    pub fn new(field: PrimeField, outputs: Vec<u32>, initial: usize, transitions: Vec<Vec<usize>>) -> Result<Self> {
        let n = outputs.len();
        let p = field.p() as usize;
        if n == 0 || initial >= n || transitions.len() != n {
            return Err(Error::Format("automaton state table is inconsistent".into()));
        }
        if transitions.iter().any(|row| row.len() != p || row.iter().any(|&t| t >= n)) {
            return Err(Error::Format("transition table must be total over digits 0..p".into()));
        }
        if outputs.iter().any(|&o| o >= field.p()) {
            return Err(Error::Format("outputs must be residues mod p".into()));
        }
        Ok(Dfao {
            field,
            outputs,
            initial,
            transitions,
        })
    }

    /// Automaton whose states are the orbit numerators; output is `S(0)`.
    pub fn from_orbit(field: PrimeField, orbit: &Orbit) -> Self {
        Dfao {
            field,
            outputs: orbit.states.iter().map(|s| s.constant_term()).collect(),
            initial: 0,
            transitions: orbit.transitions.clone(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn outputs(&self) -> &[u32] {
        &self.outputs
    }

    pub fn transitions(&self) -> &[Vec<usize>] {
        &self.transitions
    }

    pub fn step(&self, state: usize, digit: u32) -> usize {
        self.transitions[state][digit as usize]
    }

    pub fn run(&self, state: usize, digits: &[u32]) -> usize {
        digits.iter().fold(state, |s, &d| self.step(s, d))
    }

    pub fn evaluate(&self, n: u64) -> u32 {
        let p = self.p() as u64;
        let (mut s, mut n) = (self.initial, n);
        while n > 0 {
            s = self.step(s, (n % p) as u32);
            n /= p;
        }
        self.outputs[s]
    }

    pub fn evaluate_big(&self, n: &BigUint) -> u32 {
        self.outputs[self.run(self.initial, &digits_lsd(n, self.p()))]
    }

    /// `a(0), .., a(len - 1)` from the initial state.
    pub fn sequence(&self, len: usize) -> Vec<u32> {
        self.sequence_from(self.initial, len)
    }

    /// The first `len` terms of the sequence read from every state.
    pub fn state_sequences(&self, len: usize) -> Vec<Vec<u32>> {
        let p = self.p() as usize;
        let mut table: Vec<Vec<u32>> = vec![Vec::with_capacity(len); self.len()];
        for n in 0..len {
            for s in 0..self.len() {
                let v = if n == 0 {
                    self.outputs[s]
                } else {
                    table[self.transitions[s][n % p]][n / p]
                };
                table[s].push(v);
            }
        }
        table
    }

    /// Output sequence read from `state`, using `a_s(pn + i) = a_{δ(s,i)}(n)`
    /// level by level so only one full-length table is built.
    pub fn sequence_from(&self, state: usize, len: usize) -> Vec<u32> {
        if len == 0 {
            return Vec::new();
        }
        let p = self.p() as usize;
        let mut lens = vec![len];
        while *lens.last().unwrap() > 1 {
            let l = *lens.last().unwrap();
            lens.push(l.div_ceil(p));
        }
        let k = self.len();
        // top level: length 1, just the outputs
        let mut table: Vec<Vec<u32>> = (0..k).map(|s| vec![self.outputs[s]]).collect();
        for (level, &l) in lens.iter().enumerate().rev().skip(1) {
            let fill = |s: usize| -> Vec<u32> {
                (0..l)
                    .map(|m| {
                        if m == 0 {
                            self.outputs[s]
                        } else {
                            table[self.transitions[s][m % p]][m / p]
                        }
                    })
                    .collect()
            };
            table = if level == 0 {
                let mut t = vec![Vec::new(); k];
                t[state] = fill(state);
                t
            } else {
                (0..k).map(fill).collect()
            };
        }
        std::mem::take(&mut table[state])
    }

    /// Same automaton with a fresh initial state carrying `output`, so that
    /// only `n = 0` changes value.
    pub fn with_initial_output(&self, output: u32) -> Dfao {
        let mut d = self.clone();
        d.outputs.push(output % self.p());
        d.transitions.push(self.transitions[self.initial].clone());
        d.initial = d.outputs.len() - 1;
        d.canonical()
    }

    /// Drops unreachable states and renumbers breadth-first from the initial
    /// state, digits in increasing order.
    pub fn canonical(&self) -> Dfao {
        let mut order = vec![usize::MAX; self.len()];
        let mut seen = vec![self.initial];
        order[self.initial] = 0;
        let mut i = 0;
        while i < seen.len() {
            let s = seen[i];
            for &t in &self.transitions[s] {
                if order[t] == usize::MAX {
                    order[t] = seen.len();
                    seen.push(t);
                }
            }
            i += 1;
        }
        Dfao {
            field: self.field,
            outputs: seen.iter().map(|&s| self.outputs[s]).collect(),
            initial: 0,
            transitions: seen
                .iter()
                .map(|&s| self.transitions[s].iter().map(|&t| order[t]).collect())
                .collect(),
        }
    }

    /// Moore partition refinement followed by canonical renumbering.
    pub fn minimize(&self) -> Dfao {
        let d = self.canonical();
        let mut class: Vec<usize> = {
            let mut ids: HashMap<u32, usize> = HashMap::new();
            d.outputs
                .iter()
                .map(|o| {
                    let n = ids.len();
                    *ids.entry(*o).or_insert(n)
                })
                .collect()
        };
        let mut count = class.iter().max().map_or(0, |m| m + 1);
        loop {
            let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let next: Vec<usize> = (0..d.len())
                .map(|s| {
                    let sig = (class[s], d.transitions[s].iter().map(|&t| class[t]).collect());
                    let n = ids.len();
                    *ids.entry(sig).or_insert(n)
                })
                .collect();
            let new_count = ids.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut rep = vec![usize::MAX; count];
        for s in 0..d.len() {
            if rep[class[s]] == usize::MAX {
                rep[class[s]] = s;
            }
        }
        Dfao {
            field: d.field,
            outputs: rep.iter().map(|&s| d.outputs[s]).collect(),
            initial: class[d.initial],
            transitions: rep
                .iter()
                .map(|&s| d.transitions[s].iter().map(|&t| class[t]).collect())
                .collect(),
        }
        .canonical()
    }

    /// Equality after canonical renumbering of both sides.
    pub fn is_isomorphic(&self, other: &Dfao) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn to_json(&self) -> String {
        let j = DfaoJson {
            p: self.p() as u64,
            states: self
                .outputs
                .iter()
                .enumerate()
                .map(|(id, &output)| StateJson { id, output })
                .collect(),
            initial: self.initial,
            transitions: self.transitions.clone(),
        };
        serde_json::to_string_pretty(&j).expect("automaton serializes")
    }

    pub fn from_json(text: &str) -> Result<Dfao> {
        let j: DfaoJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let field = PrimeField::new(j.p)?;
        let mut outputs = vec![0; j.states.len()];
        let mut seen = vec![false; j.states.len()];
        for st in &j.states {
            if st.id >= outputs.len() || seen[st.id] {
                return Err(Error::Format(format!("bad state id {}", st.id)));
            }
            seen[st.id] = true;
            outputs[st.id] = st.output;
        }
        Dfao::new(field, outputs, j.initial, j.transitions)
    }

    /// Graphviz rendering: nodes `Qi/value`, one edge per target with the
    /// digits grouped into a single label.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph dfao {\n  rankdir=LR;\n  start [shape=point];\n");
        let _ = writeln!(out, "  start -> Q{};", self.initial);
        for (s, o) in self.outputs.iter().enumerate() {
            let _ = writeln!(out, "  Q{s} [shape=circle, label=\"Q{s}/{o}\"];");
        }
        for (s, row) in self.transitions.iter().enumerate() {
            let mut grouped: BTreeMap<usize, Vec<String>> = BTreeMap::new();
            for (d, &t) in row.iter().enumerate() {
                grouped.entry(t).or_default().push(d.to_string());
            }
            for (t, ds) in grouped {
                let _ = writeln!(out, "  Q{s} -> Q{t} [label=\"{}\"];", ds.join(","));
            }
        }
        out.push_str("}\n");
        out
    }

    /// Plain-text transition table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p = {}, states = {}, initial = Q{}", self.p(), self.len(), self.initial);
        for (s, row) in self.transitions.iter().enumerate() {
            let targets: Vec<String> = row.iter().map(|t| format!("Q{t}")).collect();
            let _ = writeln!(out, "Q{s}/{}: {}", self.outputs[s], targets.join(" "));
        }
        out
    }

    fn accepting(&self, b: u32) -> Vec<bool> {
        self.outputs.iter().map(|&o| o == b % self.p()).collect()
    }

    /// States reachable from the initial state.
    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        seen[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(s) = stack.pop() {
            for &t in &self.transitions[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// States from which some nonzero digit leads into an accepting state:
    /// the places where a canonical accepted word can end.
    fn pre_accepting(&self, acc: &[bool]) -> Vec<bool> {
        self.transitions
            .iter()
            .map(|row| row.iter().skip(1).any(|&t| acc[t]))
            .collect()
    }

    /// Least `n` with `a(n) = b`, if any.
    pub fn decide_emptiness(&self, b: u32) -> Emptiness {
        let acc = self.accepting(b);
        if acc[self.initial] {
            return Emptiness::Witness(BigUint::default());
        }
        let pre = self.pre_accepting(&acc);
        // layers[k] = states reachable by words of length exactly k
        let mut layers: Vec<Vec<bool>> = Vec::new();
        let mut cur = vec![false; self.len()];
        cur[self.initial] = true;
        let mut seen_layers: HashSet<Vec<bool>> = HashSet::new();
        let mut len = None;
        loop {
            if cur.iter().zip(&pre).any(|(&c, &q)| c && q) {
                len = Some(layers.len() + 1);
                layers.push(cur);
                break;
            }
            if !seen_layers.insert(cur.clone()) {
                break;
            }
            let mut next = vec![false; self.len()];
            for (s, &on) in cur.iter().enumerate() {
                if on {
                    for &t in &self.transitions[s] {
                        next[t] = true;
                    }
                }
            }
            layers.push(cur);
            cur = next;
        }
        let Some(len) = len else {
            return Emptiness::Empty;
        };
        // choose digits from the most significant end, smallest first
        let mut target = acc;
        let mut digits = vec![0u32; len];
        for j in (0..len).rev() {
            let lo = if j == len - 1 { 1 } else { 0 };
            let choice = (lo..self.p()).find_map(|d| {
                let back: Vec<bool> = (0..self.len()).map(|s| target[self.step(s, d)]).collect();
                layers[j]
                    .iter()
                    .zip(&back)
                    .any(|(&r, &x)| r && x)
                    .then_some((d, back))
            });
            let (d, back) = choice.expect("a feasible digit exists at every position");
            digits[j] = d;
            target = back;
        }
        Emptiness::Witness(from_digits(&digits, self.p()))
    }

    /// Whether `{n : a(n) = b}` is finite; finite sets are listed in
    /// increasing order.
    pub fn decide_finiteness(&self, b: u32) -> Finiteness {
        let acc = self.accepting(b);
        let pre = self.pre_accepting(&acc);
        let reach = self.reachable();
        // states that can reach a pre-accepting state
        let mut coreach = pre.clone();
        loop {
            let mut changed = false;
            for s in 0..self.len() {
                if !coreach[s] && self.transitions[s].iter().any(|&t| coreach[t]) {
                    coreach[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let useful: Vec<bool> = (0..self.len()).map(|s| reach[s] && coreach[s]).collect();
        if let Some((state, cycle)) = self.find_cycle(&useful) {
            let witness = match self.decide_emptiness(b) {
                Emptiness::Witness(n) => n,
                Emptiness::Empty => unreachable!("a useful cycle implies a member"),
            };
            return Finiteness::Infinite {
                witness,
                cycle_state: state,
                cycle,
            };
        }
        // acyclic on useful states: enumerate all paths
        let mut members = Vec::new();
        if acc[self.initial] {
            members.push(BigUint::default());
        }
        let mut stack: Vec<(usize, Vec<u32>)> = vec![(self.initial, Vec::new())];
        while let Some((s, word)) = stack.pop() {
            if !useful[s] {
                continue;
            }
            for d in 1..self.p() {
                if acc[self.step(s, d)] {
                    let mut w = word.clone();
                    w.push(d);
                    members.push(from_digits(&w, self.p()));
                }
            }
            for d in 0..self.p() {
                let t = self.step(s, d);
                if useful[t] {
                    let mut w = word.clone();
                    w.push(d);
                    stack.push((t, w));
                }
            }
        }
        members.sort();
        members.dedup();
        Finiteness::Finite(members)
    }

    /// A cycle inside the given state subset, as (state, digits returning to it).
    fn find_cycle(&self, allowed: &[bool]) -> Option<(usize, Vec<u32>)> {
        for start in 0..self.len() {
            if !allowed[start] {
                continue;
            }
            // BFS back to start within allowed states
            let mut prev: HashMap<usize, (usize, u32)> = HashMap::new();
            let mut queue = VecDeque::new();
            for d in 0..self.p() {
                let t = self.step(start, d);
                if allowed[t] && !prev.contains_key(&t) {
                    prev.insert(t, (start, d));
                    queue.push_back(t);
                }
            }
            while let Some(s) = queue.pop_front() {
                if s == start {
                    let mut digits = Vec::new();
                    let mut cur = start;
                    loop {
                        let (from, d) = prev[&cur];
                        digits.push(d);
                        cur = from;
                        if cur == start {
                            break;
                        }
                    }
                    digits.reverse();
                    return Some((start, digits));
                }
                for d in 0..self.p() {
                    let t = self.step(s, d);
                    if allowed[t] && !prev.contains_key(&t) {
                        prev.insert(t, (s, d));
                        queue.push_back(t);
                    }
                }
            }
        }
        None
    }

    /// Searches for `(q, r)` with `q <= period_cap`, `r <= preperiod_cap` such
    /// that `{n : a(n) = b}` agrees with the ultimately periodic set having
    /// period `q` from `r` on. Each candidate is checked exactly against the
    /// automaton; a negative answer only covers the searched range.
    pub fn decide_periodicity(&self, b: u32, period_cap: u64, preperiod_cap: u64) -> Periodicity {
        assert!(period_cap >= 1, "period cap must be positive");
        let acc = self.accepting(b);
        for q in 1..=period_cap {
            for r in 0..=preperiod_cap {
                let bits: Vec<bool> = (0..r + q).map(|n| acc[self.run_number(n)]).collect();
                if self.agrees_with_periodic(&acc, &bits, q, r) {
                    return Periodicity::Periodic { period: q, preperiod: r };
                }
            }
        }
        Periodicity::NotPeriodicWithin {
            period_cap,
            preperiod_cap,
        }
    }

    fn run_number(&self, n: u64) -> usize {
        let p = self.p() as u64;
        let (mut s, mut n) = (self.initial, n);
        while n > 0 {
            s = self.step(s, (n % p) as u32);
            n /= p;
        }
        s
    }

    /// Exact comparison over canonical words of the automaton's accept set
    /// with the periodic set given by `bits` (membership of `n < r + q`).
    fn agrees_with_periodic(&self, acc: &[bool], bits: &[bool], q: u64, r: u64) -> bool {
        let p = self.p() as u64;
        // tracker: (value capped at r, value mod q, p^k capped at r, p^k mod q)
        type Tracker = (u64, u64, u64, u64);
        let member = |t: &Tracker| -> bool {
            let (v, vm, _, _) = *t;
            if v < r {
                bits[v as usize]
            } else {
                let off = (vm + q - r % q) % q;
                bits[(r + off) as usize]
            }
        };
        let push = |t: &Tracker, d: u64| -> Tracker {
            let (v, vm, pk, pkm) = *t;
            let nv = if d == 0 { v } else { (v + d * pk).min(r) };
            let nvm = (vm + d * pkm) % q;
            let npk = (pk * p).min(r.max(1));
            (nv, nvm, npk, pkm * p % q)
        };
        let start: Tracker = (0, 0, 1, 1 % q);
        if acc[self.initial] != member(&start) {
            return false;
        }
        let mut seen: HashSet<(usize, Tracker)> = HashSet::new();
        let mut queue = VecDeque::from([(self.initial, start)]);
        seen.insert((self.initial, start));
        while let Some((s, t)) = queue.pop_front() {
            for d in 0..p {
                let s2 = self.step(s, d as u32);
                let t2 = push(&t, d);
                if d != 0 && acc[s2] != member(&t2) {
                    return false;
                }
                if seen.insert((s2, t2)) {
                    queue.push_back((s2, t2));
                }
            }
        }
        true
    }
}

/// Result of an emptiness query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    /// The least member.
    Witness(BigUint),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finiteness {
    Finite(Vec<BigUint>),
    Infinite {
        /// Least member.
        witness: BigUint,
        /// A state on a cycle from which accepted canonical words can be
        /// pumped, and the digits of that cycle.
        cycle_state: usize,
        cycle: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Periodicity {
    Periodic { period: u64, preperiod: u64 },
    NotPeriodicWithin { period_cap: u64, preperiod_cap: u64 },
}

/// Automaton for the diagonal coefficients of `r` mod p, built from the
/// Cartier orbit of the numerator. No truncation is involved.
pub fn synthesize_dfao(r: &RationalFunction, max_states: usize) -> Result<Dfao> {
    Ok(synthesize_with_orbit(r, max_states)?.0)
}

pub fn synthesize_with_orbit(r: &RationalFunction, max_states: usize) -> Result<(Dfao, Orbit)> {
    let space = InvariantSpace::for_rational(r)?;
    let orbit = diagonal_orbit(&space, r.numerator(), max_states)?;
    Ok((Dfao::from_orbit(r.field(), &orbit), orbit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartier::DEFAULT_MAX_STATES;
    use crate::rational::parse_rational;

    fn binom2() -> Dfao {
        let r = parse_rational("1/(1-x-y)", 2).unwrap();
        synthesize_dfao(&r, DEFAULT_MAX_STATES).unwrap()
    }

    #[test]
    fn central_binomial_mod_two() {
        let d = binom2();
        assert_eq!(d.len(), 2);
        assert_eq!(d.sequence(8), vec![1, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(d.decide_emptiness(1), Emptiness::Witness(0u32.into()));
        assert_eq!(d.with_initial_output(0).decide_emptiness(1), Emptiness::Empty);
        assert_eq!(d.decide_finiteness(1), Finiteness::Finite(vec![0u32.into()]));
        assert!(matches!(d.decide_finiteness(0), Finiteness::Infinite { .. }));
        assert_eq!(
            d.decide_periodicity(0, 4, 4),
            Periodicity::Periodic { period: 1, preperiod: 1 }
        );
    }

    #[test]
    fn constant_one_needs_two_states() {
        let r = parse_rational("1", 3).unwrap();
        let d = synthesize_dfao(&r, 10).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.sequence(5), vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn full_set_is_periodic_from_zero() {
        let k = PrimeField::new(3).unwrap();
        let d = Dfao::new(k, vec![2], 0, vec![vec![0, 0, 0]]).unwrap();
        assert_eq!(
            d.decide_periodicity(2, 2, 2),
            Periodicity::Periodic { period: 1, preperiod: 0 }
        );
        assert!(d.to_dot().contains("label=\"0,1,2\""));
    }

    #[test]
    fn merges_equivalent_states() {
        let k = PrimeField::new(2).unwrap();
        let d = Dfao::new(k, vec![1, 0, 0], 0, vec![vec![0, 1], vec![2, 1], vec![1, 2]]).unwrap();
        let m = d.minimize();
        assert_eq!(m.len(), 2);
        for n in 0..200 {
            assert_eq!(m.evaluate(n), d.evaluate(n));
        }
    }

    #[test]
    fn sequence_matches_evaluate() {
        let r = parse_rational("(1+x)/(1-x-y-x*y)", 3).unwrap();
        let d = synthesize_dfao(&r, 1000).unwrap();
        let seq = d.sequence(500);
        for (n, v) in seq.iter().enumerate() {
            assert_eq!(*v, d.evaluate(n as u64));
        }
        for s in 0..d.len() {
            let seq = d.sequence_from(s, 50);
            assert_eq!(seq[0], d.outputs()[s]);
        }
    }

    #[test]
    fn json_roundtrip() {
        let d = binom2();
        let back = Dfao::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert!(Dfao::from_json("{\"p\":4,\"states\":[],\"initial\":0,\"transitions\":[]}").is_err());
    }

    #[test]
    fn digits() {
        assert_eq!(digits_lsd(&BigUint::from(12u32), 5), vec![2, 2]);
        assert!(digits_lsd(&BigUint::default(), 5).is_empty());
        assert_eq!(from_digits(&[2, 2], 5), BigUint::from(12u32));
    }
}
