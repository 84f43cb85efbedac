//! Text, DOT and JSON serialization of automata.
//!
//! Text format:
//!
//! ```text
//! dfa arity 2 digits 0..1 initial 0 states 3
//! 0 [0,0] -> 0
//! 0 [0,1] -> 1
//! ...
//! accepting 0 2
//! ```
//!
//! A Dfao uses the header keyword `dfao` and replaces the `accepting` line
//! by one `output <state> <symbol>` line per state.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::alphabet::Alphabet;
use super::dfa::Dfa;
use super::dfao::Dfao;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Dot,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "txt" => Ok(Format::Text),
            "dot" => Ok(Format::Dot),
            "json" => Ok(Format::Json),
            _ => Err(Error::Format(format!("unknown export format `{s}`"))),
        }
    }
}

/// Serde mirror of the text format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub kind: String,
    pub arity: usize,
    pub radix: u32,
    pub initial: u32,
    pub states: usize,
    pub transitions: Vec<(u32, Vec<u32>, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepting: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<Vec<u32>>,
}

/// Either kind of automaton, as read back from a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Automaton {
    Dfa(Dfa),
    Dfao(Dfao),
}

fn header(kind: &str, alpha: Alphabet, initial: u32, states: usize) -> String {
    format!(
        "{kind} arity {} digits 0..{} initial {initial} states {states}\n",
        alpha.arity,
        alpha.radix - 1
    )
}

fn write_transitions(out: &mut String, alpha: Alphabet, states: usize, next: impl Fn(u32, usize) -> u32) {
    for s in 0..states as u32 {
        for l in 0..alpha.size() {
            let _ = writeln!(out, "{s} {} -> {}", alpha.format_letter(l), next(s, l));
        }
    }
}

pub fn dfa_to_text(dfa: &Dfa) -> String {
    let alpha = dfa.alphabet();
    let mut out = header("dfa", alpha, dfa.initial(), dfa.num_states());
    write_transitions(&mut out, alpha, dfa.num_states(), |s, l| dfa.next(s, l));
    out.push_str("accepting");
    for s in dfa.accepting_states() {
        let _ = write!(out, " {s}");
    }
    out.push('\n');
    out
}

pub fn dfao_to_text(m: &Dfao) -> String {
    let alpha = m.alphabet();
    let mut out = header("dfao", alpha, m.initial(), m.num_states());
    write_transitions(&mut out, alpha, m.num_states(), |s, l| m.next(s, l));
    for s in 0..m.num_states() as u32 {
        let _ = writeln!(out, "output {s} {}", m.output_of(s));
    }
    out
}

fn parse_usize(tok: Option<&str>, what: &str, line: usize) -> Result<usize> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Format(format!("line {line}: expected {what}")))
}

fn parse_letter(tok: &str, alpha: Alphabet, line: usize) -> Result<usize> {
    let inner = tok
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Format(format!("line {line}: bad letter `{tok}`")))?;
    let digits: Vec<u32> = if inner.is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|d| d.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Format(format!("line {line}: bad letter `{tok}`")))?
    };
    if digits.len() != alpha.arity || digits.iter().any(|&d| d >= alpha.radix) {
        return Err(Error::Format(format!("line {line}: letter `{tok}` not in {alpha}")));
    }
    Ok(alpha.encode(&digits))
}

/// Reads the text format back.
pub fn from_text(text: &str) -> Result<Automaton> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, head) = lines.next().ok_or_else(|| Error::Format("empty input".into()))?;
    let toks: Vec<&str> = head.split_whitespace().collect();
    let kind = toks.first().copied().unwrap_or("");
    if !matches!(kind, "dfa" | "dfao") || toks.len() != 9 {
        return Err(Error::Format(format!("line {ln}: bad header")));
    }
    let field = |name: &str| -> Result<&str> {
        toks.iter()
            .position(|&t| t == name)
            .and_then(|i| toks.get(i + 1).copied())
            .ok_or_else(|| Error::Format(format!("line {ln}: header lacks `{name}`")))
    };
    let arity = parse_usize(Some(field("arity")?), "arity", ln)?;
    let hi = field("digits")?
        .strip_prefix("0..")
        .and_then(|t| t.parse::<u32>().ok())
        .ok_or_else(|| Error::Format(format!("line {ln}: bad digit range")))?;
    let initial = parse_usize(Some(field("initial")?), "initial state", ln)? as u32;
    let states = parse_usize(Some(field("states")?), "state count", ln)?;
    let alpha = Alphabet::new(arity, hi + 1);
    let sigma = alpha.size();
    let mut trans = vec![u32::MAX; states * sigma];
    let mut accepting = vec![false; states];
    let mut output = vec![None; states];
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first().copied() {
            Some("accepting") => {
                for t in &toks[1..] {
                    let s = parse_usize(Some(t), "state", ln)?;
                    *accepting
                        .get_mut(s)
                        .ok_or_else(|| Error::Format(format!("line {ln}: state {s} out of range")))? = true;
                }
            }
            Some("output") => {
                let s = parse_usize(toks.get(1).copied(), "state", ln)?;
                let o = parse_usize(toks.get(2).copied(), "output", ln)? as u32;
                *output
                    .get_mut(s)
                    .ok_or_else(|| Error::Format(format!("line {ln}: state {s} out of range")))? = Some(o);
            }
            _ => {
                if toks.len() != 4 || toks[2] != "->" {
                    return Err(Error::Format(format!("line {ln}: expected `state [digits] -> state`")));
                }
                let s = parse_usize(Some(toks[0]), "state", ln)?;
                let l = parse_letter(toks[1], alpha, ln)?;
                let t = parse_usize(Some(toks[3]), "state", ln)?;
                if s >= states {
                    return Err(Error::Format(format!("line {ln}: state {s} out of range")));
                }
                trans[s * sigma + l] = t as u32;
            }
        }
    }
    if let Some(i) = trans.iter().position(|&t| t == u32::MAX) {
        return Err(Error::Format(format!(
            "missing transition from state {} on {}",
            i / sigma,
            alpha.format_letter(i % sigma)
        )));
    }
    if kind == "dfa" {
        Ok(Automaton::Dfa(Dfa::new(alpha, initial, trans, accepting)?))
    } else {
        let output = output
            .into_iter()
            .enumerate()
            .map(|(s, o)| o.ok_or_else(|| Error::Format(format!("state {s} has no output"))))
            .collect::<Result<Vec<u32>>>()?;
        Ok(Automaton::Dfao(Dfao::new(alpha, initial, trans, output)?))
    }
}

fn transitions_json(alpha: Alphabet, states: usize, next: impl Fn(u32, usize) -> u32) -> Vec<(u32, Vec<u32>, u32)> {
    (0..states as u32)
        .flat_map(|s| (0..alpha.size()).map(move |l| (s, l)))
        .map(|(s, l)| (s, alpha.decode(l), next(s, l)))
        .collect()
}

pub fn dfa_to_json(dfa: &Dfa) -> AutomatonJson {
    let alpha = dfa.alphabet();
    AutomatonJson {
        kind: "dfa".into(),
        arity: alpha.arity,
        radix: alpha.radix,
        initial: dfa.initial(),
        states: dfa.num_states(),
        transitions: transitions_json(alpha, dfa.num_states(), |s, l| dfa.next(s, l)),
        accepting: Some(dfa.accepting_states().collect()),
        output: None,
    }
}

pub fn dfao_to_json(m: &Dfao) -> AutomatonJson {
    let alpha = m.alphabet();
    AutomatonJson {
        kind: "dfao".into(),
        arity: alpha.arity,
        radix: alpha.radix,
        initial: m.initial(),
        states: m.num_states(),
        transitions: transitions_json(alpha, m.num_states(), |s, l| m.next(s, l)),
        accepting: None,
        output: Some((0..m.num_states() as u32).map(|s| m.output_of(s)).collect()),
    }
}

pub fn from_json(j: &AutomatonJson) -> Result<Automaton> {
    let alpha = Alphabet::new(j.arity, j.radix);
    let sigma = alpha.size();
    let mut trans = vec![u32::MAX; j.states * sigma];
    for (s, digits, t) in &j.transitions {
        if *s as usize >= j.states || digits.len() != j.arity || digits.iter().any(|&d| d >= j.radix) {
            return Err(Error::Format(format!("bad transition from state {s}")));
        }
        trans[*s as usize * sigma + alpha.encode(digits)] = *t;
    }
    if trans.contains(&u32::MAX) {
        return Err(Error::Format("incomplete transition table".into()));
    }
    match j.kind.as_str() {
        "dfa" => {
            let mut acc = vec![false; j.states];
            for &s in j.accepting.as_deref().unwrap_or(&[]) {
                *acc.get_mut(s as usize)
                    .ok_or_else(|| Error::Format(format!("accepting state {s} out of range")))? = true;
            }
            Ok(Automaton::Dfa(Dfa::new(alpha, j.initial, trans, acc)?))
        }
        "dfao" => {
            let out = j.output.clone().ok_or_else(|| Error::Format("dfao without outputs".into()))?;
            if out.len() != j.states {
                return Err(Error::Format("output table has the wrong length".into()));
            }
            Ok(Automaton::Dfao(Dfao::new(alpha, j.initial, trans, out)?))
        }
        k => Err(Error::Format(format!("unknown automaton kind `{k}`"))),
    }
}

/// Groups the letters of each edge `s -> t` into one label.
fn dot_edges(alpha: Alphabet, states: usize, next: impl Fn(u32, usize) -> u32) -> BTreeMap<(u32, u32), Vec<String>> {
    let mut edges: BTreeMap<(u32, u32), Vec<String>> = BTreeMap::new();
    for s in 0..states as u32 {
        for l in 0..alpha.size() {
            edges.entry((s, next(s, l))).or_default().push(alpha.format_letter(l));
        }
    }
    edges
}

fn dot_body(out: &mut String, initial: u32, edges: BTreeMap<(u32, u32), Vec<String>>) {
    let _ = writeln!(out, "  init [shape=point];");
    let _ = writeln!(out, "  init -> {initial};");
    for ((s, t), labels) in edges {
        let _ = writeln!(out, "  {s} -> {t} [label=\"{}\"];", labels.join(" "));
    }
    out.push_str("}\n");
}

pub fn dfa_to_dot(dfa: &Dfa) -> String {
    let mut out = String::from("digraph dfa {\n  rankdir=LR;\n");
    for s in 0..dfa.num_states() as u32 {
        let shape = if dfa.is_accepting(s) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  {s} [shape={shape}];");
    }
    let edges = dot_edges(dfa.alphabet(), dfa.num_states(), |s, l| dfa.next(s, l));
    dot_body(&mut out, dfa.initial(), edges);
    out
}

pub fn dfao_to_dot(m: &Dfao) -> String {
    let mut out = String::from("digraph dfao {\n  rankdir=LR;\n");
    for s in 0..m.num_states() as u32 {
        let _ = writeln!(out, "  {s} [shape=circle,label=\"{s}/{}\"];", m.output_of(s));
    }
    let edges = dot_edges(m.alphabet(), m.num_states(), |s, l| m.next(s, l));
    dot_body(&mut out, m.initial(), edges);
    out
}

impl Dfa {
    pub fn export(&self, format: Format) -> String {
        match format {
            Format::Text => dfa_to_text(self),
            Format::Dot => dfa_to_dot(self),
            Format::Json => serde_json::to_string_pretty(&dfa_to_json(self)).expect("plain data"),
        }
    }
}

impl Dfao {
    pub fn export(&self, format: Format) -> String {
        match format {
            Format::Text => dfao_to_text(self),
            Format::Dot => dfao_to_dot(self),
            Format::Json => serde_json::to_string_pretty(&dfao_to_json(self)).expect("plain data"),
        }
    }
}

/// Reads either format, guessing JSON from a leading `{`.
pub fn load(text: &str) -> Result<Automaton> {
    if text.trim_start().starts_with('{') {
        let j: AutomatonJson = serde_json::from_str(text)?;
        from_json(&j)
    } else {
        from_text(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Dfa {
        let alpha = Alphabet::new(2, 2);
        Dfa::explore(alpha, 0u32, |&s, l| (s + alpha.digit(l, 0) + 2 * alpha.digit(l, 1)) % 3, |&s| s == 0)
    }

    #[test]
    fn text_round_trip() {
        let d = sample();
        let back = from_text(&dfa_to_text(&d)).unwrap();
        assert_eq!(back, Automaton::Dfa(d));
    }

    #[test]
    fn json_round_trip() {
        let d = sample();
        let back = load(&d.export(Format::Json)).unwrap();
        assert_eq!(back, Automaton::Dfa(d));
        let m = Dfao::explore(Alphabet::new(1, 3), 0u32, |&s, a| (s + a as u32) % 2, |&s| s);
        assert_eq!(load(&m.export(Format::Json)).unwrap(), Automaton::Dfao(m.clone()));
        assert_eq!(load(&m.export(Format::Text)).unwrap(), Automaton::Dfao(m));
    }

    #[test]
    fn dot_mentions_every_edge_endpoint() {
        let d = sample();
        let dot = d.export(Format::Dot);
        for s in 0..d.num_states() {
            assert!(dot.contains(&format!("  {s} [shape=")));
        }
        assert!(dot.contains("init -> 0"));
    }

    #[test]
    fn rejects_incomplete_table() {
        let text = "dfa arity 1 digits 0..1 initial 0 states 1\n0 [0] -> 0\naccepting 0\n";
        assert!(from_text(text).is_err());
    }
}
