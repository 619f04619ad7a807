//! Freely reduced words over the alphabet of module generators and group generators.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// A module generator, indexed into the module's generator list.
    Module(usize),
    /// A polycyclic generator of the nilpotent group, indexed in normal-form order.
    Group(usize),
}

/// A word kept in freely reduced form: exponents are nonzero and adjacent
/// letters carry distinct symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<(Symbol, i64)>,
}

impl Word {
    pub fn new() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn from_letters<I: IntoIterator<Item = (Symbol, i64)>>(letters: I) -> Self {
        let mut w = Word::new();
        for (s, e) in letters {
            w.push(s, e);
        }
        w
    }

    pub fn letter(s: Symbol, e: i64) -> Self {
        Word::from_letters([(s, e)])
    }

    /// Appends `s^e`, merging with the last letter and cancelling as needed.
    pub fn push(&mut self, s: Symbol, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.0 == s {
                last.1 += e;
                if last.1 == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push((s, e));
    }

    pub fn append(&mut self, other: &Word) {
        for &(s, e) in &other.letters {
            self.push(s, e);
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.append(other);
        w
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|&(s, e)| (s, -e)).collect() }
    }

    /// `u^-1 · self · u`.
    pub fn conjugate_by(&self, u: &Word) -> Word {
        u.inverse().concat(self).concat(u)
    }

    pub fn letters(&self) -> &[(Symbol, i64)] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_group_word(&self) -> bool {
        self.letters.iter().all(|(s, _)| matches!(s, Symbol::Group(_)))
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> WordDisplay<'a> {
        WordDisplay { word: self, alphabet }
    }
}

/// Commutator `[g, h] = g^-1 h^-1 g h`.
pub fn commutator(g: &Word, h: &Word) -> Word {
    g.inverse().concat(&h.inverse()).concat(g).concat(h)
}

/// Printable names for both kinds of symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    pub module: Vec<String>,
    pub group: Vec<String>,
}

impl Alphabet {
    pub fn name(&self, s: Symbol) -> &str {
        match s {
            Symbol::Module(i) => &self.module[i],
            Symbol::Group(i) => &self.group[i],
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        if let Some(i) = self.module.iter().position(|n| n == name) {
            return Some(Symbol::Module(i));
        }
        self.group.iter().position(|n| n == name).map(Symbol::Group)
    }

    /// Module generators first, then group generators.
    pub fn symbols(&self) -> Vec<Symbol> {
        (0..self.module.len()).map(Symbol::Module).chain((0..self.group.len()).map(Symbol::Group)).collect()
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    alphabet: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &(s, e)) in self.word.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}^{}", self.alphabet.name(s), e)?;
        }
        Ok(())
    }
}
