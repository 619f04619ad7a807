//! Nilpotent groups given by a polycyclic presentation that refines a central
//! series with free-abelian factors.
//!
//! Generators are numbered in normal-form order: the basis of the first
//! factor `Q_1/Q_2` comes first, the basis of the last factor `Q_k` last.
//! For every pair `t < s` of generators the table stores the tail `τ(t, s)`
//! with `s·t = t·s·τ(t, s)`, i.e. `τ(t, s) = [s, t]` for the convention
//! `[g, h] = g^-1 h^-1 g h`. Tails must live strictly below the layer of `s`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::word::{Symbol, Word};

pub const DEFAULT_FUEL: usize = 1_000_000;

/// Normal-form exponent vector over the ordered generating set.
///
/// Ordering is lexicographic on the ordered words: the sparse sequences of
/// `(generator, exponent)` pairs are compared, a proper prefix sorts first.
/// So `1 < x^-1 < x^-1 y < x < y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement(Vec<i64>);

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        GroupElement(vec![0; n])
    }

    pub fn from_exponents(exps: Vec<i64>) -> Self {
        GroupElement(exps)
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn generator(n: usize, index: usize, exp: i64) -> Self {
        let mut v = vec![0; n];
        v[index] = exp;
        GroupElement(v)
    }

    /// Nonzero `(generator, exponent)` pairs in normal-form order.
    pub fn sparse(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, &e)| (i, e))
    }

    /// The ordered word representing this element.
    pub fn ordered_word(&self) -> Word {
        Word::from_letters(self.sparse().map(|(i, e)| (Symbol::Group(i), e)))
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sparse().cmp(other.sparse())
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

type Letters = Vec<(usize, i64)>;

#[derive(Clone, Debug)]
pub struct GroupSpec {
    names: Vec<String>,
    ranks: Vec<usize>,
    layer: Vec<usize>,
    offsets: Vec<usize>,
    tails: BTreeMap<(usize, usize), GroupElement>,
    // conj_pos[t][s] spells t^-1 s t, conj_neg[t][s] spells t s t^-1, for s > t.
    conj_pos: Vec<Vec<Letters>>,
    conj_neg: Vec<Vec<Letters>>,
    fuel: usize,
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.ranks == other.ranks && self.tails == other.tails
    }
}

impl GroupSpec {
    /// Builds a presentation from explicit tails `τ(t, s)` keyed by `(t, s)` with `t < s`.
    /// Pairs that are absent commute.
    pub fn new(names: Vec<String>, ranks: Vec<usize>, tails: BTreeMap<(usize, usize), Vec<i64>>) -> Result<Self> {
        let spec = Self::build(names, ranks, tails)?;
        spec.check_consistency()?;
        Ok(spec)
    }

    /// Builds a presentation from commutator relations `[g, h] = w`.
    ///
    /// The right-hand sides are collected with the tails of deeper layers,
    /// so relations are processed from the bottom of the series upwards.
    pub fn from_commutators(names: Vec<String>, ranks: Vec<usize>, relations: &[(usize, usize, Word)]) -> Result<Self> {
        let mut spec = Self::build(names.clone(), ranks.clone(), BTreeMap::new())?;
        let n = spec.generator_count();
        let mut seen = BTreeMap::new();
        for (idx, (g, h, _)) in relations.iter().enumerate() {
            if g == h || *g >= n || *h >= n {
                return Err(Error::InvalidGroup(format!(
                    "commutator relation {} pairs generators {} and {}",
                    idx + 1,
                    g,
                    h
                )));
            }
            let key = ((*g).min(*h), (*g).max(*h));
            if seen.insert(key, idx).is_some() {
                return Err(Error::InvalidGroup(format!(
                    "commutator of {} and {} given twice",
                    names[key.0], names[key.1]
                )));
            }
        }

        let mut tails: BTreeMap<(usize, usize), Vec<i64>> = BTreeMap::new();
        for level in (1..=spec.k()).rev() {
            let mut batch = Vec::new();
            for (g, h, w) in relations {
                let (t, s) = ((*g).min(*h), (*g).max(*h));
                if spec.layer[s] != level {
                    continue;
                }
                let value = spec.normalize(w)?;
                // [g, h] = w with g < h means τ(g, h) = [h, g] = w^-1.
                let tail = if g < h { spec.inverse(&value)? } else { value };
                batch.push(((t, s), tail.0));
            }
            for (key, tail) in batch {
                tails.insert(key, tail);
            }
            spec = Self::build(names.clone(), ranks.clone(), tails.clone())?;
        }
        spec.check_consistency()?;
        Ok(spec)
    }

    /// Free abelian group with one layer.
    pub fn free_abelian(names: Vec<String>) -> Result<Self> {
        let n = names.len();
        Self::new(names, vec![n], BTreeMap::new())
    }

    fn build(names: Vec<String>, ranks: Vec<usize>, raw_tails: BTreeMap<(usize, usize), Vec<i64>>) -> Result<Self> {
        if ranks.is_empty() || ranks.contains(&0) {
            return Err(Error::InvalidGroup("layer ranks must be positive and at least one layer is required".into()));
        }
        let n: usize = ranks.iter().sum();
        if names.len() != n {
            return Err(Error::InvalidGroup(format!("{} generator names for {} generators", names.len(), n)));
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || names[..i].contains(name) {
                return Err(Error::InvalidGroup(format!("generator name {name:?} is empty or repeated")));
            }
        }
        let mut layer = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(ranks.len() + 1);
        for (i, &r) in ranks.iter().enumerate() {
            offsets.push(layer.len());
            layer.extend(std::iter::repeat_n(i + 1, r));
        }
        offsets.push(n);

        let mut tails = BTreeMap::new();
        for ((t, s), tail) in raw_tails {
            if t >= s || s >= n {
                return Err(Error::InvalidGroup(format!("tail keyed by ({t}, {s}) is not an ordered generator pair")));
            }
            if tail.len() != n {
                return Err(Error::InvalidGroup(format!(
                    "tail for ({}, {}) has length {}, expected {}",
                    names[t],
                    names[s],
                    tail.len(),
                    n
                )));
            }
            let g = GroupElement(tail);
            if g.is_identity() {
                continue;
            }
            let depth = g.sparse().next().map(|(i, _)| layer[i]).unwrap_or(ranks.len() + 1);
            if depth <= layer[s] {
                return Err(Error::InvalidGroup(format!(
                    "tail of ({}, {}) reaches layer {}, must lie strictly below layer {}",
                    names[t], names[s], depth, layer[s]
                )));
            }
            tails.insert((t, s), g);
        }

        let mut spec = GroupSpec {
            names,
            ranks,
            layer,
            offsets,
            tails,
            conj_pos: vec![vec![Vec::new(); n]; n],
            conj_neg: vec![vec![Vec::new(); n]; n],
            fuel: DEFAULT_FUEL,
        };
        for t in 0..n {
            for s in (t + 1..n).rev() {
                let Some(tail) = spec.tails.get(&(t, s)) else { continue };
                let mut pos = vec![(s, 1)];
                pos.extend(tail.sparse());
                let inv_tail: Letters =
                    tail.sparse().collect::<Vec<_>>().into_iter().rev().map(|(i, e)| (i, -e)).collect();
                let mut neg = vec![(s, 1)];
                neg.extend(spec.conjugate_letters(&inv_tail, t, -1));
                spec.conj_pos[t][s] = pos;
                spec.conj_neg[t][s] = neg;
            }
        }
        Ok(spec)
    }

    /// Checks associativity on every triple of generator letters `t^±1`.
    fn check_consistency(&self) -> Result<()> {
        let n = self.generator_count();
        let letters: Vec<GroupElement> =
            (0..n).flat_map(|i| [GroupElement::generator(n, i, 1), GroupElement::generator(n, i, -1)]).collect();
        for a in &letters {
            for b in &letters {
                let ab = self.multiply(a, b)?;
                for c in &letters {
                    let left = self.multiply(&ab, c)?;
                    let right = self.multiply(a, &self.multiply(b, c)?)?;
                    if left != right {
                        return Err(Error::InvalidGroup(format!(
                            "inconsistent tails: associativity fails on {} {} {}",
                            self.format_element(a),
                            self.format_element(b),
                            self.format_element(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn with_fuel(mut self, fuel: usize) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn fuel(&self) -> usize {
        self.fuel
    }

    pub fn k(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, layer: usize) -> usize {
        self.ranks[layer - 1]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    /// Layer (1-based) of a generator.
    pub fn generator_layer(&self, index: usize) -> usize {
        self.layer[index]
    }

    /// Generator indices belonging to layer `i`.
    pub fn layer_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i - 1]..self.offsets[i]
    }

    pub fn tail(&self, t: usize, s: usize) -> Option<&GroupElement> {
        self.tails.get(&(t, s))
    }

    pub fn tails(&self) -> &BTreeMap<(usize, usize), GroupElement> {
        &self.tails
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.generator_count())
    }

    pub fn generator(&self, index: usize) -> GroupElement {
        GroupElement::generator(self.generator_count(), index, 1)
    }

    pub fn element(&self, exps: Vec<i64>) -> Result<GroupElement> {
        if exps.len() != self.generator_count() {
            return Err(Error::DimensionMismatch { expected: self.generator_count(), found: exps.len() });
        }
        Ok(GroupElement(exps))
    }

    fn conjugate_letters(&self, word: &[(usize, i64)], t: usize, sign: i64) -> Letters {
        let mut out = Vec::new();
        for &(s, e) in word {
            if !self.tails.contains_key(&(t, s)) {
                out.push((s, e));
                continue;
            }
            let unit = if sign > 0 { &self.conj_pos[t][s] } else { &self.conj_neg[t][s] };
            if e > 0 {
                for _ in 0..e {
                    out.extend_from_slice(unit);
                }
            } else {
                for _ in 0..(-e) {
                    out.extend(unit.iter().rev().map(|&(i, x)| (i, -x)));
                }
            }
        }
        out
    }

    /// Multiplies the normal form `exps` on the right by `letters`, collecting
    /// from the left one generator at a time.
    fn collect_onto(&self, exps: &mut [i64], letters: &[(usize, i64)]) -> Result<()> {
        let mut stack: Letters = letters.iter().rev().copied().collect();
        let mut steps = 0usize;
        while let Some((g, m)) = stack.pop() {
            if m == 0 {
                continue;
            }
            let sign = m.signum();
            if m != sign {
                stack.push((g, m - sign));
            }
            steps += 1;
            if steps > self.fuel {
                return Err(Error::NonTerminatingCollection(self.fuel));
            }
            let suffix: Letters =
                exps[g + 1..].iter().enumerate().filter(|(_, &e)| e != 0).map(|(j, &e)| (g + 1 + j, e)).collect();
            if suffix.iter().all(|&(s, _)| !self.tails.contains_key(&(g, s))) {
                exps[g] += sign;
                continue;
            }
            for e in &mut exps[g + 1..] {
                *e = 0;
            }
            exps[g] += sign;
            let moved = self.conjugate_letters(&suffix, g, sign);
            stack.extend(moved.into_iter().rev());
        }
        Ok(())
    }

    /// Collects a word over the group generators into normal form.
    pub fn normalize(&self, word: &Word) -> Result<GroupElement> {
        let letters = group_letters(word)?;
        let mut exps = vec![0; self.generator_count()];
        self.collect_onto(&mut exps, &letters)?;
        Ok(GroupElement(exps))
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        let mut exps = g.0.clone();
        let letters: Letters = h.sparse().collect();
        self.collect_onto(&mut exps, &letters)?;
        Ok(GroupElement(exps))
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        let letters: Letters = g.sparse().collect::<Vec<_>>().into_iter().rev().map(|(i, e)| (i, -e)).collect();
        let mut exps = vec![0; self.generator_count()];
        self.collect_onto(&mut exps, &letters)?;
        Ok(GroupElement(exps))
    }

    /// `[g, h] = g^-1 h^-1 g h`.
    pub fn commutator(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        let gi = self.inverse(g)?;
        let hi = self.inverse(h)?;
        let left = self.multiply(&gi, &hi)?;
        self.multiply(&self.multiply(&left, g)?, h)
    }

    /// Smallest `i` with `g ∈ Q_i`; the identity lies in `Q_{k+1}`.
    pub fn layer_of(&self, g: &GroupElement) -> usize {
        g.sparse().next().map(|(i, _)| self.layer[i]).unwrap_or(self.k() + 1)
    }

    /// Image of `g ∈ Q_i` in `Q_i/Q_{i+1} ≅ Z^{n_i}`.
    pub fn theta(&self, g: &GroupElement, i: usize) -> Result<Vec<i64>> {
        let actual = self.layer_of(g);
        if actual < i {
            return Err(Error::NotInLayer { layer: i, actual });
        }
        if i > self.k() {
            return Ok(Vec::new());
        }
        Ok(g.0[self.layer_range(i)].to_vec())
    }

    /// The polycyclic relators `s^-1 t^-1 s t τ(t, s)^-1`, one per pair `t < s`.
    pub fn relators(&self) -> Vec<Word> {
        let n = self.generator_count();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for t in 0..n {
            for s in t + 1..n {
                let mut w = Word::from_letters([
                    (Symbol::Group(s), -1),
                    (Symbol::Group(t), -1),
                    (Symbol::Group(s), 1),
                    (Symbol::Group(t), 1),
                ]);
                if let Some(tail) = self.tails.get(&(t, s)) {
                    w.append(&tail.ordered_word().inverse());
                }
                out.push(w);
            }
        }
        out
    }

    /// True when every generator occurring in a tail is central. Then the
    /// product is bilinear in the exponents and reducing all exponents
    /// modulo `N` is a homomorphism onto a finite group.
    pub fn is_exponent_linear(&self) -> bool {
        let central = |g: usize| !self.tails.keys().any(|&(t, s)| t == g || s == g);
        self.tails.values().all(|tail| tail.sparse().all(|(g, _)| central(g)))
    }

    pub fn format_element(&self, g: &GroupElement) -> String {
        if g.is_identity() {
            return "1".to_string();
        }
        g.sparse()
            .map(|(i, e)| if e == 1 { self.names[i].clone() } else { format!("{}^{}", self.names[i], e) })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn display_element<'a>(&'a self, g: &'a GroupElement) -> impl fmt::Display + 'a {
        struct D<'a>(&'a GroupSpec, &'a GroupElement);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.format_element(self.1))
            }
        }
        D(self, g)
    }
}

fn group_letters(word: &Word) -> Result<Letters> {
    word.letters()
        .iter()
        .map(|&(s, e)| match s {
            Symbol::Group(i) => Ok((i, e)),
            Symbol::Module(_) => Err(Error::NotGroupWord),
        })
        .collect()
}

/// Heisenberg group of rank `k` on `x1, y1, …, xk, yk, z` with `[x_i, y_i] = z`,
/// layered as `{1} < Z < Q`.
pub fn heisenberg(k: usize) -> Result<GroupSpec> {
    let mut names = Vec::new();
    for i in 1..=k {
        names.push(format!("x{i}"));
        names.push(format!("y{i}"));
    }
    names.push("z".to_string());
    let z = 2 * k;
    let relations: Vec<(usize, usize, Word)> =
        (0..k).map(|i| (2 * i, 2 * i + 1, Word::letter(Symbol::Group(z), 1))).collect();
    GroupSpec::from_commutators(names, vec![2 * k, 1], &relations)
}
