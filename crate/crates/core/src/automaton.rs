//! Automata, transformations and the almost-group shape.
//!
//! Letters act on the right: `q · uv = (q · u) · v`, so composing `t` then `u`
//! gives `q ↦ u[t[q]]`. This order is used everywhere in the crate.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm_group::GeneratorSet;
use crate::state_set::{StateId, StateSet, MAX_STATES};

/// A total map on `{0, .., n-1}`; `images[q] = q · t`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Transformation {
    images: Vec<StateId>,
}

impl Transformation {
    pub fn identity(n: usize) -> Transformation {
        Transformation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<StateId>) -> Result<Transformation> {
        let n = images.len();
        if let Some(&bad) = images.iter().find(|&&q| q >= n) {
            return Err(Error::InvalidParameter(format!(
                "image {} out of range for {} states",
                bad + 1,
                n
            )));
        }
        Ok(Transformation { images })
    }

    /// Builds a permutation from disjoint cycles; points not mentioned are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<StateId>]) -> Result<Transformation> {
        let mut images: Vec<StateId> = (0..n).collect();
        let mut seen = StateSet::EMPTY;
        for cycle in cycles {
            for (i, &q) in cycle.iter().enumerate() {
                if q >= n {
                    return Err(Error::InvalidParameter(format!(
                        "cycle point {} out of range for {} states",
                        q + 1,
                        n
                    )));
                }
                if seen.contains(q) {
                    return Err(Error::InvalidParameter(format!(
                        "point {} appears twice in cycle notation",
                        q + 1
                    )));
                }
                seen.insert(q);
                images[q] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Transformation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[StateId] {
        &self.images
    }

    #[inline]
    pub fn image(&self, q: StateId) -> StateId {
        self.images[q]
    }

    /// `self` first, then `then`.
    pub fn compose(&self, then: &Transformation) -> Result<Transformation> {
        if self.len() != then.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: then.len(),
            });
        }
        Ok(Transformation {
            images: self.images.iter().map(|&q| then.images[q]).collect(),
        })
    }

    pub fn apply_set(&self, set: StateSet) -> StateSet {
        set.iter().map(|q| self.images[q]).collect()
    }

    fn preimage_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.len()];
        for &q in &self.images {
            counts[q] += 1;
        }
        counts
    }

    pub fn excl(&self) -> StateSet {
        let counts = self.preimage_counts();
        (0..self.len()).filter(|&q| counts[q] == 0).collect()
    }

    pub fn dupl(&self) -> StateSet {
        let counts = self.preimage_counts();
        (0..self.len()).filter(|&q| counts[q] >= 2).collect()
    }

    pub fn defect(&self) -> usize {
        self.preimage_counts().iter().filter(|&&c| c == 0).count()
    }

    pub fn is_permutation(&self) -> bool {
        self.defect() == 0
    }

    /// The two states sharing an image; only defined for defect 1.
    pub fn coll(&self) -> Result<(StateId, StateId)> {
        let defect = self.defect();
        if defect != 1 {
            return Err(Error::DefectNotOne(defect));
        }
        let d = self.dupl().first().expect("defect 1 implies a duplicated state");
        let mut pre = (0..self.len()).filter(|&q| self.images[q] == d);
        let p = pre.next().expect("duplicated state has two preimages");
        let q = pre.next().expect("duplicated state has two preimages");
        Ok((p, q))
    }

    pub fn inverse(&self) -> Option<Transformation> {
        if !self.is_permutation() {
            return None;
        }
        let mut inv = vec![0; self.len()];
        for (q, &p) in self.images.iter().enumerate() {
            inv[p] = q;
        }
        Some(Transformation { images: inv })
    }
}

/// A sequence of letter indices into an [`Automaton`]'s alphabet.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn push(&mut self, letter: usize) {
        self.0.push(letter);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Letter {
    pub name: String,
    pub map: Transformation,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Automaton {
    n: usize,
    letters: Vec<Letter>,
    defect_letter_hint: Option<String>,
}

impl Automaton {
    pub fn new(n: usize, letters: Vec<Letter>) -> Result<Automaton> {
        if n == 0 {
            return Err(Error::InvalidParameter("an automaton needs at least one state".into()));
        }
        if n > MAX_STATES {
            return Err(Error::TooManyStates { n, cap: MAX_STATES });
        }
        for (i, l) in letters.iter().enumerate() {
            if l.name.is_empty() || l.name.chars().any(char::is_whitespace) {
                return Err(Error::InvalidParameter(format!("invalid letter name `{}`", l.name)));
            }
            if letters[..i].iter().any(|o| o.name == l.name) {
                return Err(Error::InvalidParameter(format!("duplicate letter `{}`", l.name)));
            }
            if l.map.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: l.map.len(),
                });
            }
        }
        Ok(Automaton {
            n,
            letters,
            defect_letter_hint: None,
        })
    }

    /// Convenience constructor from `(name, images)` pairs, 0-indexed.
    pub fn from_images(n: usize, letters: &[(&str, Vec<StateId>)]) -> Result<Automaton> {
        let letters = letters
            .iter()
            .map(|(name, images)| {
                Ok(Letter {
                    name: name.to_string(),
                    map: Transformation::from_images(images.clone())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Automaton::new(n, letters)
    }

    pub fn with_defect_letter_hint(mut self, name: Option<String>) -> Result<Automaton> {
        if let Some(ref h) = name {
            self.letter_index(h)?;
        }
        self.defect_letter_hint = name;
        Ok(self)
    }

    pub fn defect_letter_hint(&self) -> Option<&str> {
        self.defect_letter_hint.as_deref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn letter(&self, idx: usize) -> &Letter {
        &self.letters[idx]
    }

    pub fn letter_index(&self, name: &str) -> Result<usize> {
        self.letters
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    /// Replaces the map of one letter, keeping its name and position.
    pub fn with_letter_map(&self, idx: usize, map: Transformation) -> Result<Automaton> {
        if map.len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: map.len(),
            });
        }
        let mut out = self.clone();
        out.letters[idx].map = map;
        Ok(out)
    }

    pub fn word_transformation(&self, w: &Word) -> Transformation {
        let mut images: Vec<StateId> = (0..self.n).collect();
        for &l in w.letters() {
            let m = &self.letters[l].map;
            for q in images.iter_mut() {
                *q = m.image(*q);
            }
        }
        Transformation { images }
    }

    /// Parses a word. Tokens may be separated by whitespace or `.`; when every
    /// letter name is a single character an unseparated token is split into
    /// characters, so `ab3` style is not supported but `abbbaca` is.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let single_char = self.letters.iter().all(|l| l.name.chars().count() == 1);
        let mut w = Word::empty();
        for tok in text
            .split(|c: char| c.is_whitespace() || c == '.')
            .filter(|t| !t.is_empty())
        {
            if tok == "ε" {
                continue;
            }
            if let Ok(idx) = self.letter_index(tok) {
                w.push(idx);
            } else if single_char {
                for ch in tok.chars() {
                    w.push(self.letter_index(&ch.to_string())?);
                }
            } else {
                return Err(Error::UnknownLetter(tok.to_string()));
            }
        }
        Ok(w)
    }

    /// Renders a word with letter names; single-character alphabets are
    /// concatenated, longer names are space separated. Empty word is `ε`.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        let single_char = self.letters.iter().all(|l| l.name.chars().count() == 1);
        let names = w.letters().iter().map(|&l| self.letters[l].name.as_str());
        if single_char {
            names.collect()
        } else {
            names.collect::<Vec<_>>().join(" ")
        }
    }
}

/// Classified alphabet of an almost-group automaton.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AlmostGroupShape {
    /// Letter indices of the permutation letters, in alphabet order.
    pub perm_letters: Vec<usize>,
    pub defect_letter: usize,
    /// `excl(a)`.
    pub e: StateId,
    /// `dupl(a)`.
    pub d: StateId,
    /// `coll(a)`, smaller state first.
    pub coll: (StateId, StateId),
    pub standardized: bool,
}

impl AlmostGroupShape {
    pub fn coll_set(&self) -> StateSet {
        [self.coll.0, self.coll.1].into_iter().collect()
    }

    pub fn generators(&self, a: &Automaton) -> GeneratorSet {
        GeneratorSet::from_letters(a, &self.perm_letters)
    }
}

/// Splits the alphabet into permutation letters and exactly one letter of defect 1.
///
/// Transitivity is not checked here.
pub fn classify_shape(a: &Automaton) -> Result<AlmostGroupShape> {
    if a.n() == 1 {
        return Err(Error::NotAlmostGroup(
            "no defect-1 letter possible with one state".into(),
        ));
    }
    let mut perm_letters = Vec::new();
    let mut defect_letters = Vec::new();
    for (idx, l) in a.letters().iter().enumerate() {
        match l.map.defect() {
            0 => perm_letters.push(idx),
            1 => defect_letters.push(idx),
            k => {
                return Err(Error::NotAlmostGroup(format!("letter `{}` has defect {}", l.name, k)));
            }
        }
    }
    let defect_letter = match defect_letters.as_slice() {
        [] => return Err(Error::NotAlmostGroup("no defect-1 letter".into())),
        [one] => *one,
        _ => {
            return Err(Error::NotAlmostGroup(format!(
                "{} letters of defect 1; exactly one is required",
                defect_letters.len()
            )))
        }
    };
    if let Some(hint) = a.defect_letter_hint() {
        if a.letter(defect_letter).name != hint {
            return Err(Error::NotAlmostGroup(format!(
                "declared defect letter `{}` is a permutation",
                hint
            )));
        }
    }
    let map = &a.letter(defect_letter).map;
    let e = map.excl().first().expect("defect 1");
    let d = map.dupl().first().expect("defect 1");
    let coll = map.coll()?;
    Ok(AlmostGroupShape {
        perm_letters,
        defect_letter,
        e,
        d,
        coll,
        standardized: e == coll.0 || e == coll.1,
    })
}

/// Replaces the defect letter `a` by `u a` where `u` is a shortest
/// permutation word with `e · u` in `coll(a)`.
///
/// Returns the input unchanged with the empty word when already standardized.
pub fn standardize(a: &Automaton, shape: &AlmostGroupShape) -> Result<(Automaton, Word)> {
    if shape.standardized {
        return Ok((a.clone(), Word::empty()));
    }
    let gens = shape.generators(a);
    let orbit = gens.orbit(shape.e);
    // orbit.order is BFS discovery order, so the first hit has a shortest witness.
    let target = orbit
        .order
        .iter()
        .copied()
        .find(|&q| q == shape.coll.0 || q == shape.coll.1)
        .ok_or(Error::CannotStandardize)?;
    let u = orbit.witness(target).clone();
    let ua = a.word_transformation(&u).compose(&a.letter(shape.defect_letter).map)?;
    let out = a.with_letter_map(shape.defect_letter, ua)?;
    Ok((out, u))
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, q) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", q + 1)?;
        }
        f.write_str("]")
    }
}
