//! Line-oriented automaton text format.
//!
//! ```text
//! # comment
//! states 4
//! letter s cycles (1,2,3,4)
//! letter a images 3 2 3 4
//! defect-letter a
//! ```
//!
//! States are 1-indexed. `cycles` is accepted for permutations only; points
//! not mentioned are fixed. [`serialize_automaton`] always writes `images`.

use std::fmt::Write as _;

use crate::automaton::{Automaton, Letter, Transformation};
use crate::error::{Error, Result};
use crate::state_set::{StateId, MAX_STATES};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_automaton(text: &str) -> Result<Automaton> {
    let mut n: Option<usize> = None;
    let mut letters: Vec<Letter> = Vec::new();
    let mut hint: Option<(usize, String)> = None;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap_or_default();
        match head {
            "states" => {
                if n.is_some() {
                    return Err(err(lineno, "duplicate `states` line"));
                }
                let v = toks.next().ok_or_else(|| err(lineno, "missing state count"))?;
                let v: usize = v
                    .parse()
                    .map_err(|_| err(lineno, format!("invalid state count `{v}`")))?;
                if v == 0 {
                    return Err(err(lineno, "state count must be at least 1"));
                }
                if v > MAX_STATES {
                    return Err(err(lineno, format!("at most {MAX_STATES} states are supported")));
                }
                if toks.next().is_some() {
                    return Err(err(lineno, "trailing tokens after state count"));
                }
                n = Some(v);
            }
            "letter" => {
                let n = n.ok_or_else(|| err(lineno, "`letter` before `states`"))?;
                let name = toks.next().ok_or_else(|| err(lineno, "missing letter name"))?;
                if letters.iter().any(|l| l.name == name) {
                    return Err(err(lineno, format!("duplicate letter name `{name}`")));
                }
                let kind = toks
                    .next()
                    .ok_or_else(|| err(lineno, "expected `images` or `cycles`"))?;
                let rest: Vec<&str> = toks.collect();
                let map = match kind {
                    "images" => parse_images(n, &rest).map_err(|m| err(lineno, m))?,
                    "cycles" => parse_cycles(n, &rest.join("")).map_err(|m| err(lineno, m))?,
                    other => return Err(err(lineno, format!("unknown letter form `{other}`"))),
                };
                letters.push(Letter {
                    name: name.to_string(),
                    map,
                });
            }
            "defect-letter" => {
                let name = toks.next().ok_or_else(|| err(lineno, "missing letter name"))?;
                hint = Some((lineno, name.to_string()));
            }
            other => return Err(err(lineno, format!("unknown directive `{other}`"))),
        }
    }

    let n = n.ok_or_else(|| err(1, "missing `states` line"))?;
    let a = Automaton::new(n, letters).map_err(|e| err(0, e.to_string()))?;
    match hint {
        Some((lineno, name)) => a
            .with_defect_letter_hint(Some(name))
            .map_err(|e| err(lineno, e.to_string())),
        None => Ok(a),
    }
}

fn parse_images(n: usize, toks: &[&str]) -> std::result::Result<Transformation, String> {
    if toks.len() != n {
        return Err(format!("expected {n} images, found {}", toks.len()));
    }
    let images = toks
        .iter()
        .map(|t| {
            let v: usize = t.parse().map_err(|_| format!("invalid image `{t}`"))?;
            if v == 0 || v > n {
                return Err(format!("image {v} out of range 1..={n}"));
            }
            Ok(v - 1)
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Transformation::from_images(images).map_err(|e| e.to_string())
}

fn parse_cycles(n: usize, text: &str) -> std::result::Result<Transformation, String> {
    let mut cycles: Vec<Vec<StateId>> = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| format!("expected `(` in `{text}`"))?;
        let close = body.find(')').ok_or_else(|| format!("unclosed cycle in `{text}`"))?;
        let cycle = body[..close]
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                let v: usize = t.parse().map_err(|_| format!("invalid cycle point `{t}`"))?;
                if v == 0 || v > n {
                    return Err(format!("cycle point {v} out of range 1..={n}"));
                }
                Ok(v - 1)
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        cycles.push(cycle);
        rest = body[close + 1..].trim_start();
    }
    Transformation::from_cycles(n, &cycles).map_err(|e| e.to_string())
}

pub fn serialize_automaton(a: &Automaton) -> String {
    let mut out = String::new();
    writeln!(out, "states {}", a.n()).unwrap();
    for l in a.letters() {
        write!(out, "letter {} images", l.name).unwrap();
        for &q in l.map.images() {
            write!(out, " {}", q + 1).unwrap();
        }
        out.push('\n');
    }
    if let Some(h) = a.defect_letter_hint() {
        writeln!(out, "defect-letter {h}").unwrap();
    }
    out
}
