//! Checks for emitted relators: exact ring identities for certificates, a
//! free-module evaluator over `ZQ`, and brute-force evaluation in a finite
//! quotient `Q̄ ⋉ Ā`.

use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::presenter::{Origin, Presentation};
use crate::ring::RingElement;
use crate::tameness::{ModuleSpec, SelfExpression};
use crate::word::{Alphabet, Symbol, Word};

/// Largest `|Q̄|` accepted for a model.
pub const MAX_GROUP_ORDER: usize = 1 << 14;
/// Largest dimension of `(Z/m)Q̄^𝒜` accepted for a model.
pub const MAX_ALGEBRA_DIM: usize = 1 << 13;

/// `(1 - λ)·q₀ = ε·μ` in `ZQ`.
pub fn ring_identity_check(se: &SelfExpression, mu: &RingElement, group: &GroupSpec) -> bool {
    let one = RingElement::one(group);
    match (&one - &se.lambda).scale_right(&se.pivot, group) {
        Ok(lhs) => lhs == mu.scale(&BigInt::from(se.pivot_sign)),
        Err(_) => false,
    }
}

/// Image of a word in `Q ⋉ (ZQ)^𝒜`: the group part and one ring element per
/// module generator.
pub fn evaluate_free(word: &Word, group: &GroupSpec, ngen: usize) -> Result<(GroupElement, Vec<RingElement>)> {
    let mut q = group.identity();
    let mut v = vec![RingElement::zero(); ngen];
    for &(s, e) in word.letters() {
        match s {
            Symbol::Group(i) => {
                let x = GroupElement::generator(group.generator_count(), i, e);
                q = group.multiply(&q, &x)?;
                for c in &mut v {
                    *c = c.scale_right(&x, group)?;
                }
            }
            Symbol::Module(a) => {
                if a >= ngen {
                    return Err(Error::Inconsistent(format!("module generator {a} out of range")));
                }
                v[a] = &v[a] + &RingElement::monomial(group.identity(), BigInt::from(e));
            }
        }
    }
    Ok((q, v))
}

/// A finite quotient `Q̄ ⋉ Ā`: `Q̄` reduces every exponent mod `N`, `Ā` is
/// `((Z/m)Q̄)^𝒜` modulo the submodule spanned by all relations.
pub struct FiniteModel {
    modulus: u64,
    quot: i64,
    ngen: usize,
    group_names: Vec<String>,
    order: usize,
    // right multiplication by generator i, exponent +1 (index 2i) or -1 (2i + 1)
    step: Vec<Vec<usize>>,
    // reduced row echelon basis of the relation submodule, keyed by pivot column
    pivots: Vec<Option<Vec<u64>>>,
    rank: usize,
}

impl fmt::Debug for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteModel")
            .field("modulus", &self.modulus)
            .field("quot", &self.quot)
            .field("group_order", &self.order)
            .field("module_dim", &self.module_dim())
            .finish()
    }
}

fn is_prime(m: u64) -> bool {
    m >= 2 && (2..).take_while(|d| d * d <= m).all(|d| !m.is_multiple_of(d))
}

impl FiniteModel {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn quot(&self) -> i64 {
        self.quot
    }

    pub fn group_order(&self) -> usize {
        self.order
    }

    pub fn algebra_dim(&self) -> usize {
        self.ngen * self.order
    }

    pub fn module_dim(&self) -> usize {
        self.algebra_dim() - self.rank
    }

    fn index(&self, exps: &[i64]) -> usize {
        exps.iter().fold(0usize, |acc, &e| acc * self.quot as usize + e.rem_euclid(self.quot) as usize)
    }

    fn exps(&self, mut idx: usize) -> Vec<i64> {
        let n = self.group_names.len();
        let mut out = vec![0; n];
        for j in (0..n).rev() {
            out[j] = (idx % self.quot as usize) as i64;
            idx /= self.quot as usize;
        }
        out
    }

    fn act(&self, v: &[u64], gen: usize, e: i64) -> Vec<u64> {
        let mut v = v.to_vec();
        let table = &self.step[2 * gen + usize::from(e < 0)];
        for _ in 0..e.unsigned_abs() {
            let mut next = vec![0; v.len()];
            for a in 0..self.ngen {
                for h in 0..self.order {
                    next[a * self.order + table[h]] = v[a * self.order + h];
                }
            }
            v = next;
        }
        v
    }

    /// Reduces `v` modulo the relation submodule.
    fn reduce(&self, v: &mut [u64]) {
        let m = self.modulus;
        for col in 0..v.len() {
            if v[col] == 0 {
                continue;
            }
            if let Some(row) = &self.pivots[col] {
                let c = v[col];
                for (x, r) in v.iter_mut().zip(row).skip(col) {
                    *x = (*x + m - c * r % m) % m;
                }
            }
        }
    }

    /// Evaluates a word in `Q̄ ⋉ Ā`. Returns the group part as an index and the
    /// reduced module part.
    fn evaluate(&self, word: &Word) -> Result<(usize, Vec<u64>)> {
        let m = self.modulus;
        let mut q = 0usize;
        let mut v = vec![0u64; self.algebra_dim()];
        for &(s, e) in word.letters() {
            match s {
                Symbol::Group(i) => {
                    if i >= self.group_names.len() {
                        return Err(Error::Inconsistent(format!("group generator {i} out of range")));
                    }
                    let table = &self.step[2 * i + usize::from(e < 0)];
                    for _ in 0..e.unsigned_abs() {
                        q = table[q];
                    }
                    v = self.act(&v, i, e);
                }
                Symbol::Module(a) => {
                    if a >= self.ngen {
                        return Err(Error::Inconsistent(format!("module generator {a} out of range")));
                    }
                    let c = e.rem_euclid(m as i64) as u64;
                    let slot = &mut v[a * self.order];
                    *slot = (*slot + c) % m;
                }
            }
        }
        self.reduce(&mut v);
        Ok((q, v))
    }

    /// Coordinates of a reduced vector on the free (non-pivot) columns.
    fn quotient_coords(&self, v: &[u64]) -> Vec<u64> {
        v.iter().enumerate().filter(|(c, _)| self.pivots[*c].is_none()).map(|(_, &x)| x).collect()
    }

    fn format_residue(&self, q: usize, v: &[u64]) -> String {
        let exps = self.exps(q);
        let coords: Vec<String> = self.quotient_coords(v).iter().map(|x| x.to_string()).collect();
        format!(
            "group ({}), module [{}]",
            exps.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "),
            coords.join(", ")
        )
    }
}

pub fn build_finite_model(group: &GroupSpec, module: &ModuleSpec, m: u64, quot: i64) -> Result<FiniteModel> {
    if m < 2 {
        return Err(Error::InvalidModel(format!("modulus {m} gives the trivial ring")));
    }
    if !is_prime(m) {
        return Err(Error::InvalidModel(format!("modulus {m} is not prime")));
    }
    if quot < 2 {
        return Err(Error::InvalidModel(format!("exponent modulus {quot} must be at least 2")));
    }
    if !group.is_exponent_linear() {
        return Err(Error::NonLinearTails);
    }
    let n = group.generator_count();
    let order = (0..n)
        .try_fold(1usize, |acc, _| acc.checked_mul(quot as usize).filter(|&o| o <= MAX_GROUP_ORDER))
        .ok_or_else(|| Error::InvalidModel(format!("group of order {quot}^{n} is too large")))?;
    let ngen = module.generators().len();
    let dim = ngen * order;
    if dim > MAX_ALGEBRA_DIM {
        return Err(Error::InvalidModel(format!("algebra dimension {dim} is too large")));
    }
    let mut model = FiniteModel {
        modulus: m,
        quot,
        ngen,
        group_names: group.names().to_vec(),
        order,
        step: Vec::new(),
        pivots: vec![None; dim],
        rank: 0,
    };
    let reps: Vec<GroupElement> = (0..order).map(|i| GroupElement::from_exponents(model.exps(i))).collect();
    let mul =
        |g: &GroupElement, h: &GroupElement| -> Result<usize> { Ok(model.index(group.multiply(g, h)?.exponents())) };
    let mut step = Vec::with_capacity(2 * n);
    for i in 0..n {
        for e in [1, -1] {
            let x = GroupElement::generator(n, i, e);
            step.push(reps.iter().map(|g| mul(g, &x)).collect::<Result<Vec<_>>>()?);
        }
    }

    let reduce_coeff = |c: &BigInt| -> u64 { c.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits in u64") };
    let relations = module
        .annihilators()
        .iter()
        .map(|a| (a.generator, &a.element))
        .chain(module.relators().iter().map(|r| (r.generator, &r.element)));
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for (a, mu) in relations {
        for g in &reps {
            let mut row = vec![0u64; dim];
            for (q, c) in mu.terms() {
                let col = a * order + mul(q, g)?;
                row[col] = (row[col] + reduce_coeff(c)) % m;
            }
            if row.iter().any(|&x| x != 0) {
                rows.push(row);
            }
        }
    }
    model.step = step;
    model.eliminate(rows);
    Ok(model)
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(m));
    e.x.mod_floor(&BigInt::from(m)).to_u64().expect("inverse fits in u64")
}

impl FiniteModel {
    /// Inserts rows into a fully reduced echelon basis.
    fn eliminate(&mut self, rows: Vec<Vec<u64>>) {
        let m = self.modulus;
        for mut row in rows {
            self.reduce(&mut row);
            let Some(p) = row.iter().position(|&x| x != 0) else { continue };
            let inv = inv_mod(row[p], m);
            for x in &mut row {
                *x = *x * inv % m;
            }
            for other in self.pivots.iter_mut().flatten() {
                let c = other[p];
                if c != 0 {
                    for (x, r) in other.iter_mut().zip(&row) {
                        *x = (*x + m - c * r % m) % m;
                    }
                }
            }
            self.pivots[p] = Some(row);
            self.rank += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelatorFailure {
    pub origin: Origin,
    pub index: usize,
    pub relator: String,
    pub residue: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub modulus: u64,
    pub quot: i64,
    pub group_order: usize,
    pub module_dim: usize,
    /// `(origin, passed, total)` for each family.
    pub families: Vec<(Origin, usize, usize)>,
    pub failures: Vec<RelatorFailure>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn into_result(self) -> Result<VerificationReport> {
        match self.failures.first() {
            None => Ok(self),
            Some(f) => {
                Err(Error::RelatorFails { origin: f.origin, relator: f.relator.clone(), residue: f.residue.clone() })
            }
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "model m = {}, N = {}: |Q| = {}, dim A = {}",
            self.modulus, self.quot, self.group_order, self.module_dim
        );
        for (o, pass, total) in &self.families {
            let _ = writeln!(s, "{o}: {pass}/{total} pass");
        }
        for fail in &self.failures {
            let _ = writeln!(s, "FAIL {} #{}: {} -> {}", fail.origin, fail.index + 1, fail.relator, fail.residue);
        }
        let verdict = if self.all_pass() { "all relators hold" } else { "relators fail" };
        write!(f, "{s}{verdict}")
    }
}

pub fn verify_relators(
    relators: &[(Origin, Word)],
    alphabet: &Alphabet,
    model: &FiniteModel,
) -> Result<VerificationReport> {
    let mut families: Vec<(Origin, usize, usize)> = Origin::ALL.iter().map(|&o| (o, 0, 0)).collect();
    let mut failures = Vec::new();
    let mut seen = [0usize; 4];
    for (origin, word) in relators {
        let slot = Origin::ALL.iter().position(|o| o == origin).expect("known origin");
        let (q, v) = model.evaluate(word)?;
        families[slot].2 += 1;
        if q == 0 && v.iter().all(|&x| x == 0) {
            families[slot].1 += 1;
        } else {
            failures.push(RelatorFailure {
                origin: *origin,
                index: seen[slot],
                relator: word.display(alphabet).to_string(),
                residue: model.format_residue(q, &v),
            });
        }
        seen[slot] += 1;
    }
    Ok(VerificationReport {
        modulus: model.modulus,
        quot: model.quot,
        group_order: model.order,
        module_dim: model.module_dim(),
        families,
        failures,
    })
}

pub fn verify_presentation(p: &Presentation, model: &FiniteModel) -> Result<VerificationReport> {
    if p.alphabet.module.len() != model.ngen || p.alphabet.group != model.group_names {
        return Err(Error::Inconsistent("presentation alphabet does not match the model".into()));
    }
    verify_relators(&p.relators, &p.alphabet, model)
}

/// `true` when `v` vanishes in `Ā`; exposed for tests of the model itself.
pub fn module_word_vanishes(model: &FiniteModel, word: &Word) -> Result<bool> {
    let (q, v) = model.evaluate(word)?;
    Ok(q == 0 && v.iter().all(|x| x.is_zero()))
}
