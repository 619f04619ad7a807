//! Modules by generators and annihilators, self-expressions `a = a·λ`, certificate-based
//! membership in `Σ⁰`, and the tameness verdict.
//!
//! Membership is only ever certified: a generator `a` with `a = a·λ` and
//! `v_χ(λ) > 0` puts `[χ]` into `Σ⁰`. Failing to find such certificates does
//! not prove the module is not tame, so the verdict reads "certified tame"
//! or "not certified".

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::geometry::{antipodal_cover, CoverResult, LatticeSet, LayerCharacter};
use crate::group::{GroupElement, GroupSpec};
use crate::ring::RingElement;

pub const DEFAULT_CERTIFICATE_CAP: usize = 64;

/// `a · μ = 0` with `μ` supported in `Q_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annihilator {
    pub generator: usize,
    pub layer: usize,
    pub element: RingElement,
}

/// A defining relation `a · μ = 0` of the module over the whole group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalRelator {
    pub generator: usize,
    pub element: RingElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleSpec {
    generators: Vec<String>,
    annihilators: Vec<Annihilator>,
    relators: Vec<GlobalRelator>,
}

impl ModuleSpec {
    pub fn new(
        group: &GroupSpec,
        generators: Vec<String>,
        annihilators: Vec<Annihilator>,
        relators: Vec<GlobalRelator>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidModule("at least one module generator is required".into()));
        }
        for (i, name) in generators.iter().enumerate() {
            if name.is_empty() || generators[..i].contains(name) || group.names().contains(name) {
                return Err(Error::InvalidModule(format!(
                    "module generator name {name:?} is empty, repeated, or clashes with a group generator"
                )));
            }
        }
        for (idx, ann) in annihilators.iter().enumerate() {
            if ann.generator >= generators.len() {
                return Err(Error::InvalidModule(format!("annihilator {} names an unknown generator", idx + 1)));
            }
            if ann.layer == 0 || ann.layer > group.k() {
                return Err(Error::InvalidModule(format!(
                    "annihilator {} is tagged with layer {}, valid layers are 1..={}",
                    idx + 1,
                    ann.layer,
                    group.k()
                )));
            }
            if ann.element.layer(group) < ann.layer {
                return Err(Error::InvalidModule(format!(
                    "annihilator {} is not supported in layer {}",
                    idx + 1,
                    ann.layer
                )));
            }
            check_length(group, &ann.element)?;
        }
        for (idx, rel) in relators.iter().enumerate() {
            if rel.generator >= generators.len() {
                return Err(Error::InvalidModule(format!("relator {} names an unknown generator", idx + 1)));
            }
            check_length(group, &rel.element)?;
        }
        Ok(ModuleSpec { generators, annihilators, relators })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn annihilators(&self) -> &[Annihilator] {
        &self.annihilators
    }

    pub fn relators(&self) -> &[GlobalRelator] {
        &self.relators
    }
}

fn check_length(group: &GroupSpec, r: &RingElement) -> Result<()> {
    match r.support().find(|g| g.exponents().len() != group.generator_count()) {
        Some(g) => Err(Error::DimensionMismatch { expected: group.generator_count(), found: g.exponents().len() }),
        None => Ok(()),
    }
}

/// A certified identity `a = a·λ` obtained by pivoting an annihilator at a
/// unit coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfExpression {
    pub generator: usize,
    pub layer: usize,
    pub lambda: RingElement,
    /// The support element `q₀` that was solved for.
    pub pivot: GroupElement,
    /// Coefficient `ε = ±1` of the annihilator at the pivot.
    pub pivot_sign: i64,
}

/// Pivots `μ` at every support element with coefficient `±1`.
///
/// With `μ = ε q₀ + ρ`, the relation `a·μ = 0` gives `a = a·λ` for
/// `λ = -ε ρ q₀⁻¹`, and `(1 - λ) q₀ = ε μ`.
pub fn derive_self_expressions(
    group: &GroupSpec,
    generator: usize,
    layer: usize,
    mu: &RingElement,
) -> Result<Vec<SelfExpression>> {
    if mu.is_zero() {
        return Err(Error::ZeroAnnihilator);
    }
    for g in mu.support() {
        let actual = group.layer_of(g);
        if actual < layer {
            return Err(Error::NotInLayer { layer, actual });
        }
    }
    let mut out = Vec::new();
    for (q0, c) in mu.terms() {
        if !c.abs().is_one() {
            continue;
        }
        let eps = if c.is_positive() { 1 } else { -1 };
        let rest = mu - &RingElement::monomial(q0.clone(), c.clone());
        let q0_inv = group.inverse(q0)?;
        let lambda = rest.scale_right(&q0_inv, group)?.scale(&BigInt::from(-eps));
        out.push(SelfExpression { generator, layer, lambda, pivot: q0.clone(), pivot_sign: eps });
    }
    Ok(out)
}

/// Sufficient test for `[χ] ∈ Σ⁰`: every generator has a certificate whose
/// valuation is positive. `certs[a]` holds the certificates for generator `a`.
pub fn sigma0_member(
    chi: &LayerCharacter,
    certs: &[Vec<SelfExpression>],
    names: &[String],
    group: &GroupSpec,
) -> Result<bool> {
    for (a, list) in certs.iter().enumerate() {
        if list.is_empty() {
            return Err(Error::MissingGenerator(names.get(a).cloned().unwrap_or_else(|| a.to_string())));
        }
    }
    for list in certs {
        let mut ok = false;
        for se in list {
            if se.lambda.v_chi(chi, group)?.is_positive() {
                ok = true;
                break;
            }
        }
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One diagonal certificate `Δ_{j,i}`: a self-expression per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonal {
    pub index: usize,
    pub entries: Vec<SelfExpression>,
    /// `L_{j,i} = ∪_a ϑ_i(supp λ(a; j, i))`.
    pub lattice: LatticeSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerReport {
    pub layer: usize,
    pub rank: usize,
    /// Self-expressions for each generator, by annihilator.
    pub certificates: Vec<(usize, Vec<SelfExpression>)>,
    /// Annihilators of this layer with no unit coefficient.
    pub unpivotable: Vec<usize>,
    pub diagonals: Vec<Diagonal>,
    /// True when the cap cut off further diagonal combinations.
    pub truncated: bool,
    pub cover: CoverResult,
}

impl LayerReport {
    pub fn family(&self) -> Vec<LatticeSet> {
        self.diagonals.iter().map(|d| d.lattice.clone()).collect()
    }

    /// Certificates grouped by generator.
    pub fn by_generator(&self, generator_count: usize) -> Vec<Vec<SelfExpression>> {
        let mut out = vec![Vec::new(); generator_count];
        for (_, list) in &self.certificates {
            for se in list {
                out[se.generator].push(se.clone());
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TamenessReport {
    pub layers: Vec<LayerReport>,
}

impl TamenessReport {
    pub fn is_tame(&self) -> bool {
        self.layers.iter().all(|l| l.cover.is_covered())
    }

    pub fn ells(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.diagonals.len()).collect()
    }

    pub fn render(&self, group: &GroupSpec, module: &ModuleSpec) -> String {
        let mut s = String::new();
        let names = module.generators();
        let _ = writeln!(s, "tameness report");
        for layer in &self.layers {
            let _ = writeln!(s, "layer {} rank {}", layer.layer, layer.rank);
            for (ann, list) in &layer.certificates {
                let a = &module.annihilators()[*ann];
                let _ =
                    writeln!(s, "  annihilator {} gen={}: {}", ann + 1, names[a.generator], a.element.display(group));
                for se in list {
                    let _ = writeln!(
                        s,
                        "    pivot {}: {} = {} * ({})",
                        group.display_element(&se.pivot),
                        names[se.generator],
                        names[se.generator],
                        se.lambda.display(group)
                    );
                }
            }
            for ann in &layer.unpivotable {
                let _ = writeln!(s, "  annihilator {} has no unit coefficient", ann + 1);
            }
            for d in &layer.diagonals {
                let entries: Vec<String> = d
                    .entries
                    .iter()
                    .map(|se| format!("{}: {}", names[se.generator], se.lambda.display(group)))
                    .collect();
                let _ = writeln!(s, "  diagonal {}: {} ; L = {}", d.index, entries.join(" ; "), d.lattice);
            }
            if layer.truncated {
                let _ = writeln!(s, "  diagonal combinations truncated at the certificate cap");
            }
            let _ = writeln!(s, "  cover: {}", layer.cover);
        }
        let verdict = if self.is_tame() { "certified tame" } else { "not certified" };
        let _ = writeln!(s, "verdict: {verdict}");
        s
    }
}

pub fn check_tame(group: &GroupSpec, module: &ModuleSpec) -> Result<TamenessReport> {
    check_tame_with_cap(group, module, DEFAULT_CERTIFICATE_CAP)
}

pub fn check_tame_with_cap(group: &GroupSpec, module: &ModuleSpec, cap: usize) -> Result<TamenessReport> {
    let ngen = module.generators().len();
    let mut layers = Vec::with_capacity(group.k());
    for i in 1..=group.k() {
        let rank = group.rank(i);
        let mut certificates = Vec::new();
        let mut unpivotable = Vec::new();
        let mut per_gen: Vec<Vec<SelfExpression>> = vec![Vec::new(); ngen];
        for (idx, ann) in module.annihilators().iter().enumerate() {
            if ann.layer != i {
                continue;
            }
            let list = derive_self_expressions(group, ann.generator, i, &ann.element)?;
            if list.is_empty() {
                unpivotable.push(idx);
            }
            per_gen[ann.generator].extend(list.iter().cloned());
            certificates.push((idx, list));
        }
        for list in &mut per_gen {
            // stable: ties keep derivation order
            list.sort_by_key(|se| se.lambda.support_len());
        }
        let (choices, truncated) = smallest_combinations(&per_gen, cap);
        let mut diagonals = Vec::with_capacity(choices.len());
        for (j, choice) in choices.into_iter().enumerate() {
            let entries: Vec<SelfExpression> = choice.iter().enumerate().map(|(a, &c)| per_gen[a][c].clone()).collect();
            let mut points = BTreeSet::new();
            for se in &entries {
                for q in se.lambda.support() {
                    points.insert(group.theta(q, i)?);
                }
            }
            let lattice = LatticeSet::new(rank, points, format!("diagonal {}", j + 1))?;
            diagonals.push(Diagonal { index: j + 1, entries, lattice });
        }
        let family: Vec<LatticeSet> = diagonals.iter().map(|d| d.lattice.clone()).collect();
        let cover = antipodal_cover(&family, rank)?;
        layers.push(LayerReport { layer: i, rank, certificates, unpivotable, diagonals, truncated, cover });
    }
    Ok(TamenessReport { layers })
}

/// The `cap` index tuples with the smallest total support size, one index
/// per list, ties broken lexicographically. Lists must be sorted by support size.
fn smallest_combinations(lists: &[Vec<SelfExpression>], cap: usize) -> (Vec<Vec<usize>>, bool) {
    if lists.iter().any(|l| l.is_empty()) || cap == 0 {
        return (Vec::new(), false);
    }
    let cost = |t: &[usize]| -> usize { t.iter().enumerate().map(|(a, &c)| lists[a][c].lambda.support_len()).sum() };
    let total: usize = lists.iter().map(|l| l.len()).fold(1usize, |acc, n| acc.saturating_mul(n));
    let start = vec![0; lists.len()];
    let mut heap = BinaryHeap::new();
    let mut seen = BTreeSet::new();
    heap.push(Reverse((cost(&start), start.clone())));
    seen.insert(start);
    let mut out = Vec::new();
    while let Some(Reverse((_, t))) = heap.pop() {
        out.push(t.clone());
        if out.len() == cap {
            break;
        }
        for a in 0..t.len() {
            if t[a] + 1 < lists[a].len() {
                let mut next = t.clone();
                next[a] += 1;
                if seen.insert(next.clone()) {
                    heap.push(Reverse((cost(&next), next)));
                }
            }
        }
    }
    let truncated = out.len() < total;
    (out, truncated)
}
