//! Assembly of the finite presentation `<A ∪ X | R_A ∪ K_0 ∪ C ∪ R_Q>` of
//! the split extension `Q ⋉ A`.

use std::collections::HashSet;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::geometry::close_under_negation;
use crate::group::GroupSpec;
use crate::radius::{compute_p0, lattice_ball, RadiusCert};
use crate::ring::RingElement;
use crate::tameness::{check_tame_with_cap, ModuleSpec, SelfExpression, TamenessReport};
use crate::word::{commutator, Alphabet, Symbol, Word};

/// Which family a relator belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    /// Lifted module relations.
    RA,
    /// Commutators `[a, b^w]` with `w ∈ W`.
    K0,
    /// The self-expressions `a = a·λ`.
    C,
    /// Polycyclic relators of `Q`.
    RQ,
}

impl Origin {
    pub const ALL: [Origin; 4] = [Origin::RA, Origin::K0, Origin::C, Origin::RQ];
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::RA => "RA",
            Origin::K0 => "K0",
            Origin::C => "C",
            Origin::RQ => "RQ",
        })
    }
}

impl FromStr for Origin {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "RA" => Ok(Origin::RA),
            "K0" => Ok(Origin::K0),
            "C" => Ok(Origin::C),
            "RQ" => Ok(Origin::RQ),
            other => Err(format!("unknown relator origin {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub ra: usize,
    pub k0: usize,
    pub c: usize,
    pub rq: usize,
}

impl Counts {
    pub fn get(&self, origin: Origin) -> usize {
        match origin {
            Origin::RA => self.ra,
            Origin::K0 => self.k0,
            Origin::C => self.c,
            Origin::RQ => self.rq,
        }
    }
}

impl fmt::Display for Counts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RA {}, K0 {}, C {}, RQ {}", self.ra, self.k0, self.c, self.rq)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerMeta {
    pub layer: usize,
    pub p0: i64,
    pub v_size: usize,
    pub ell: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relators: Vec<(Origin, Word)>,
    pub layers: Vec<LayerMeta>,
    pub w_size: usize,
    /// Counts before free reduction and deduplication.
    pub nominal: Counts,
    pub certificates: Vec<String>,
}

impl Presentation {
    pub fn emitted(&self) -> Counts {
        let mut c = Counts::default();
        for (o, _) in &self.relators {
            match o {
                Origin::RA => c.ra += 1,
                Origin::K0 => c.k0 += 1,
                Origin::C => c.c += 1,
                Origin::RQ => c.rq += 1,
            }
        }
        c
    }

    pub fn generators(&self) -> Vec<Symbol> {
        self.alphabet.symbols()
    }

    /// The text format: comment header, `gen <name>` lines, then
    /// `rel <origin> <word>` lines with `sym^exp` tokens.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# finite presentation of Q x| A");
        for l in &self.layers {
            let _ = writeln!(s, "# layer {}: p0 = {}, |V| = {}, diagonals = {}", l.layer, l.p0, l.v_size, l.ell);
        }
        let _ = writeln!(s, "# |W| = {}", self.w_size);
        let _ = writeln!(s, "# nominal counts: {}", self.nominal);
        let _ = writeln!(s, "# emitted counts: {}", self.emitted());
        for c in &self.certificates {
            let _ = writeln!(s, "# certificate {c}");
        }
        for sym in self.generators() {
            let _ = writeln!(s, "gen {}", self.alphabet.name(sym));
        }
        for (o, w) in &self.relators {
            let _ = writeln!(s, "rel {} {}", o, w.display(&self.alphabet));
        }
        s
    }
}

/// Generator names and relators read back from the text format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<(Origin, Word)>,
}

/// Parses the text format, resolving names against `alphabet`.
pub fn parse_presentation(text: &str, alphabet: &Alphabet) -> Result<ParsedPresentation> {
    let mut generators = Vec::new();
    let mut relators = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("gen") => {
                let name = parts.next().ok_or_else(|| err("gen without a name".into()))?;
                if parts.next().is_some() {
                    return Err(err("trailing tokens after generator name".into()));
                }
                generators.push(name.to_string());
            }
            Some("rel") => {
                let origin: Origin =
                    parts.next().ok_or_else(|| err("rel without origin".into()))?.parse().map_err(err)?;
                let mut word = Word::new();
                for tok in parts {
                    let (name, exp) =
                        tok.split_once('^').ok_or_else(|| err(format!("token {tok:?} is not sym^exp")))?;
                    let exp: i64 = exp.parse().map_err(|_| err(format!("bad exponent in {tok:?}")))?;
                    let sym = alphabet
                        .lookup(name)
                        .ok_or_else(|| Error::Inconsistent(format!("line {line_no}: unknown symbol {name:?}")))?;
                    word.push(sym, exp);
                }
                relators.push((origin, word));
            }
            Some(other) => return Err(err(format!("unexpected keyword {other:?}"))),
            None => unreachable!(),
        }
    }
    let expected: Vec<String> = alphabet.symbols().into_iter().map(|s| alphabet.name(s).to_string()).collect();
    if generators != expected {
        return Err(Error::Inconsistent(format!(
            "presentation generators [{}] differ from [{}]",
            generators.join(", "),
            expected.join(", ")
        )));
    }
    Ok(ParsedPresentation { generators, relators })
}

pub fn alphabet(group: &GroupSpec, module: &ModuleSpec) -> Alphabet {
    Alphabet { module: module.generators().to_vec(), group: group.names().to_vec() }
}

/// Ordered words `t_{1,i}^{m_1} … t_{n_i,i}^{m_{n_i}}` with `Σ m² <= p0`,
/// in lexicographic order of the exponent vectors.
pub fn build_vi(group: &GroupSpec, p0: i64, layer: usize) -> Vec<Word> {
    let range = group.layer_range(layer);
    lattice_ball(range.len(), p0)
        .into_iter()
        .map(|m| Word::from_letters(range.clone().zip(m).map(|(g, e)| (Symbol::Group(g), e))))
        .collect()
}

/// Complex product `V_1 · V_2 ⋯ V_k`, first factor varying slowest.
pub fn build_w(vs: &[Vec<Word>]) -> Vec<Word> {
    let mut out = vec![Word::new()];
    for v in vs {
        let mut next = Vec::with_capacity(out.len() * v.len());
        for prefix in &out {
            for w in v {
                next.push(prefix.concat(w));
            }
        }
        out = next;
    }
    out
}

/// `[a, b^w] = a^-1 w^-1 b^-1 w a w^-1 b w` for all `(a, b) ∈ A²`, `w ∈ W`,
/// before discarding empty words.
pub fn relators_k0(module_generators: usize, w: &[Word]) -> Vec<Word> {
    let mut out = Vec::with_capacity(module_generators * module_generators * w.len());
    for a in 0..module_generators {
        for b in 0..module_generators {
            let wa = Word::letter(Symbol::Module(a), 1);
            let wb = Word::letter(Symbol::Module(b), 1);
            for conj in w {
                out.push(commutator(&wa, &wb.conjugate_by(conj)));
            }
        }
    }
    out
}

/// `∏_q w_q^-1 a^{c_q} w_q` over the support of `λ`, factors in ordered-word
/// lexicographic order.
pub fn module_product(generator: usize, lambda: &RingElement) -> Word {
    let mut w = Word::new();
    for (q, c) in lambda.terms() {
        let exp = c.to_i64().expect("coefficient fits in i64");
        let u = q.ordered_word();
        w.append(&Word::letter(Symbol::Module(generator), exp).conjugate_by(&u));
    }
    w
}

/// `a^-1 · ∏_u u^-1 a^{λ(û)} u`, the relator form of `a = a·λ`.
pub fn relator_c(se: &SelfExpression) -> Word {
    let mut w = Word::letter(Symbol::Module(se.generator), -1);
    w.append(&module_product(se.generator, &se.lambda));
    w
}

/// One relator per generator, layer and diagonal, in that nesting
/// (layer outermost).
pub fn relators_c(report: &TamenessReport) -> Vec<Word> {
    let mut out = Vec::new();
    for layer in &report.layers {
        for d in &layer.diagonals {
            for se in &d.entries {
                out.push(relator_c(se));
            }
        }
    }
    out
}

pub fn relators_ra(module: &ModuleSpec) -> Vec<Word> {
    module.relators().iter().map(|r| module_product(r.generator, &r.element)).collect()
}

/// Keeps nonempty words, first occurrence only.
fn reduce_family(words: Vec<Word>) -> Vec<Word> {
    let mut seen = HashSet::new();
    words.into_iter().filter(|w| !w.is_empty() && seen.insert(w.clone())).collect()
}

pub fn assemble(
    group: &GroupSpec,
    module: &ModuleSpec,
    report: &TamenessReport,
    radii: &[RadiusCert],
) -> Result<Presentation> {
    if !report.is_tame() {
        return Err(Error::NotTame);
    }
    if radii.len() != group.k() {
        return Err(Error::DimensionMismatch { expected: group.k(), found: radii.len() });
    }
    let vs: Vec<Vec<Word>> = (1..=group.k()).map(|i| build_vi(group, radii[i - 1].p0, i)).collect();
    let w = build_w(&vs);
    let ngen = module.generators().len();

    let ra = relators_ra(module);
    let k0 = relators_k0(ngen, &w);
    let c = relators_c(report);
    let rq = group.relators();
    let nominal = Counts { ra: ra.len(), k0: k0.len(), c: c.len(), rq: rq.len() };

    let mut relators = Vec::new();
    for (origin, family) in [(Origin::RA, ra), (Origin::K0, k0), (Origin::C, c), (Origin::RQ, rq)] {
        relators.extend(reduce_family(family).into_iter().map(|w| (origin, w)));
    }

    let layers = report
        .layers
        .iter()
        .zip(radii)
        .zip(&vs)
        .map(|((l, r), v)| LayerMeta { layer: l.layer, p0: r.p0, v_size: v.len(), ell: l.diagonals.len() })
        .collect();
    let names = module.generators();
    let mut certificates = Vec::new();
    for l in &report.layers {
        for d in &l.diagonals {
            for se in &d.entries {
                certificates.push(format!(
                    "layer={} j={} gen={} pivot={} lambda={}",
                    l.layer,
                    d.index,
                    names[se.generator],
                    group.display_element(&se.pivot),
                    se.lambda.display(group)
                ));
            }
        }
    }
    Ok(Presentation { alphabet: alphabet(group, module), relators, layers, w_size: w.len(), nominal, certificates })
}

/// Radius certificates for every layer of a tame report.
pub fn layer_radii(report: &TamenessReport) -> Result<Vec<RadiusCert>> {
    report.layers.iter().map(|l| compute_p0(&close_under_negation(&l.family()), l.rank)).collect()
}

/// Full pipeline: tameness check, radii, presentation.
pub fn present(
    group: &GroupSpec,
    module: &ModuleSpec,
    cap: usize,
) -> Result<(TamenessReport, Vec<RadiusCert>, Presentation)> {
    let report = check_tame_with_cap(group, module, cap)?;
    if !report.is_tame() {
        return Err(Error::NotTame);
    }
    let radii = layer_radii(&report)?;
    let p = assemble(group, module, &report, &radii)?;
    Ok((report, radii, p))
}
