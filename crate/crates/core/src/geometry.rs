//! Layer characters, the open cones `O_L`, and the exact antipodal-cover test.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{fmt_vector, Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::lp::nonzero_in_polar_cone;

/// A character of `Q_i` vanishing on `Q_{i+1}`, given by its values on the
/// basis of `Q_i/Q_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerCharacter {
    layer: usize,
    vector: Vec<BigRational>,
}

impl LayerCharacter {
    pub fn new(layer: usize, vector: Vec<BigRational>) -> Result<Self> {
        if vector.iter().all(|c| c.is_zero()) {
            return Err(Error::ZeroDirection);
        }
        Ok(LayerCharacter { layer, vector })
    }

    pub fn from_integers(layer: usize, values: &[i64]) -> Result<Self> {
        Self::new(layer, values.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    pub fn layer(&self) -> usize {
        self.layer
    }

    pub fn vector(&self) -> &[BigRational] {
        &self.vector
    }

    pub fn negated(&self) -> Self {
        LayerCharacter { layer: self.layer, vector: self.vector.iter().map(|c| -c).collect() }
    }

    /// `χ(q) = <vector, ϑ_i(q)>`.
    pub fn eval(&self, q: &GroupElement, group: &GroupSpec) -> Result<BigRational> {
        let rank = group.rank(self.layer);
        if rank != self.vector.len() {
            return Err(Error::DimensionMismatch { expected: rank, found: self.vector.len() });
        }
        let theta = group.theta(q, self.layer)?;
        Ok(dot(&self.vector, &theta))
    }
}

pub(crate) fn dot(u: &[BigRational], y: &[i64]) -> BigRational {
    u.iter().zip(y).filter(|(_, &b)| b != 0).map(|(a, &b)| a * BigRational::from_integer(BigInt::from(b))).sum()
}

/// Finite subset of `Z^n`. Its open cone is `O_L = {u != 0 : <u, y> > 0 ∀ y ∈ L}`;
/// an empty set has the whole space as its cone.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeSet {
    dim: usize,
    points: BTreeSet<Vec<i64>>,
    provenance: String,
}

impl LatticeSet {
    pub fn new<I: IntoIterator<Item = Vec<i64>>>(dim: usize, points: I, provenance: impl Into<String>) -> Result<Self> {
        let points: BTreeSet<Vec<i64>> = points.into_iter().collect();
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
        Ok(LatticeSet { dim, points, provenance: provenance.into() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &BTreeSet<Vec<i64>> {
        &self.points
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn negated(&self) -> Self {
        LatticeSet {
            dim: self.dim,
            points: self.points.iter().map(|p| p.iter().map(|x| -x).collect()).collect(),
            provenance: format!("-{}", self.provenance),
        }
    }

    pub fn max_norm_sq(&self) -> i64 {
        self.points.iter().map(|p| norm_sq(p)).max().unwrap_or(0)
    }
}

impl fmt::Display for LatticeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self
            .points
            .iter()
            .map(|p| format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "{{{}}}", pts.join(", "))
    }
}

pub fn norm_sq(p: &[i64]) -> i64 {
    p.iter().map(|x| x * x).sum()
}

pub fn cone_contains(set: &LatticeSet, u: &[BigRational]) -> Result<bool> {
    if u.len() != set.dim {
        return Err(Error::DimensionMismatch { expected: set.dim, found: u.len() });
    }
    if u.iter().all(|c| c.is_zero()) {
        return Err(Error::ZeroDirection);
    }
    Ok(set.points.iter().all(|y| dot(u, y).is_positive()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverResult {
    Covered,
    /// A direction lying in no cone of the family.
    Witness(Vec<BigRational>),
}

impl CoverResult {
    pub fn is_covered(&self) -> bool {
        matches!(self, CoverResult::Covered)
    }
}

impl fmt::Display for CoverResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverResult::Covered => f.write_str("covered"),
            CoverResult::Witness(u) => write!(f, "witness: {}", fmt_vector(u)),
        }
    }
}

/// `F ∪ -F`, without duplicates, in a deterministic order.
pub fn close_under_negation(family: &[LatticeSet]) -> Vec<LatticeSet> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for l in family.iter().cloned().chain(family.iter().map(LatticeSet::negated)) {
        if seen.insert(l.points.clone()) {
            out.push(l);
        }
    }
    out
}

/// Decides whether `∪_{L ∈ F} O_L` is the whole sphere `S^{n-1}`.
///
/// A direction `u` is uncovered exactly when every `L` has a point `y_L` with
/// `<u, y_L> <= 0`. The search runs over choice functions `L ↦ y_L`, pruning
/// every partial choice whose polar cone `{u : <u, y> <= 0}` is `{0}`.
pub fn covers_sphere(family: &[LatticeSet], n: usize) -> Result<CoverResult> {
    if let Some(l) = family.iter().find(|l| l.dim != n) {
        return Err(Error::DimensionMismatch { expected: n, found: l.dim });
    }
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    let mut sets: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut seen = HashSet::new();
    for l in family {
        if seen.insert(l.points.clone()) {
            sets.push(l.points.iter().cloned().collect());
        }
    }
    // Small sets first: they constrain the search the most.
    sets.sort_by_key(|s| s.len());
    let mut search = ChoiceSearch { sets: &sets, n, infeasible: HashSet::new(), failed: HashSet::new() };
    let mut start = vec![BigRational::zero(); n];
    start[0] = BigRational::from_integer(1.into());
    let mut chosen = BTreeSet::new();
    Ok(match search.run(0, &mut chosen, start) {
        Some(u) => CoverResult::Witness(u),
        None => CoverResult::Covered,
    })
}

/// Decides whether `∪_{L ∈ F} (O_L ∪ -O_L)` is the whole sphere.
pub fn antipodal_cover(family: &[LatticeSet], n: usize) -> Result<CoverResult> {
    covers_sphere(&close_under_negation(family), n)
}

struct ChoiceSearch<'a> {
    sets: &'a [Vec<Vec<i64>>],
    n: usize,
    infeasible: HashSet<BTreeSet<Vec<i64>>>,
    failed: HashSet<(usize, BTreeSet<Vec<i64>>)>,
}

impl ChoiceSearch<'_> {
    fn run(
        &mut self,
        idx: usize,
        chosen: &mut BTreeSet<Vec<i64>>,
        witness: Vec<BigRational>,
    ) -> Option<Vec<BigRational>> {
        if idx == self.sets.len() {
            return Some(witness);
        }
        if self.failed.contains(&(idx, chosen.clone())) {
            return None;
        }
        let sets = self.sets;
        let set = &sets[idx];
        // Choosing a point already in use leaves the polar cone unchanged and
        // dominates every other choice.
        if set.iter().any(|y| chosen.contains(y)) {
            let res = self.run(idx + 1, chosen, witness);
            if res.is_none() {
                self.failed.insert((idx, chosen.clone()));
            }
            return res;
        }
        // Points the current witness already satisfies need no LP.
        let mut order: Vec<(bool, &Vec<i64>)> = set.iter().map(|y| (!dot(&witness, y).is_positive(), y)).collect();
        order.sort_by_key(|(ok, _)| !*ok);
        for (ok, y) in order {
            chosen.insert(y.clone());
            let next = if ok {
                Some(witness.clone())
            } else if self.infeasible.contains(chosen) {
                None
            } else {
                let rows: Vec<Vec<BigRational>> =
                    chosen.iter().map(|p| p.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
                let u = nonzero_in_polar_cone(&rows, self.n);
                if u.is_none() {
                    self.infeasible.insert(chosen.clone());
                }
                u
            };
            if let Some(w) = next {
                if let Some(found) = self.run(idx + 1, chosen, w) {
                    chosen.remove(y);
                    return Some(found);
                }
            }
            chosen.remove(y);
        }
        self.failed.insert((idx, chosen.clone()));
        None
    }
}
