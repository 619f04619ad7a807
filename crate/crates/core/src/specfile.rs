//! The text format describing a group and a module, and the built-in
//! example families.
//!
//! ```text
//! # Heisenberg group, module ZQ/(1 + x1 - y1, z - 2)
//! [group]
//! k = 2
//! ranks = 2, 1
//! names = x1, y1, z
//! [x1, y1] = z
//!
//! [module]
//! generators = a
//! ann layer=1 gen=a 1 + x1 - y1
//! ann layer=2 gen=a z - 2
//! rel gen=a 1 + x1 - y1
//! rel gen=a z - 2
//!
//! [options]
//! cap = 64
//! mod = 7
//! quot = 3
//! ```

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::group::{GroupSpec, DEFAULT_FUEL};
use crate::ring::RingElement;
use crate::tameness::{Annihilator, GlobalRelator, ModuleSpec, DEFAULT_CERTIFICATE_CAP};
use crate::word::{Symbol, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub cap: usize,
    pub modulus: Option<u64>,
    pub quot: Option<i64>,
    pub fuel: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { cap: DEFAULT_CERTIFICATE_CAP, modulus: None, quot: None, fuel: DEFAULT_FUEL }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpecFile {
    pub group: GroupSpec,
    pub module: ModuleSpec,
    pub options: Options,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Caret,
    Star,
}

fn tokenize(s: &str) -> std::result::Result<Vec<Token>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Token::Int(digits.parse().map_err(|_| format!("bad integer {digits}"))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else {
            out.push(match c {
                '+' => Token::Plus,
                '-' => Token::Minus,
                '^' => Token::Caret,
                '*' => Token::Star,
                other => return Err(format!("unexpected character {other:?}")),
            });
            i += 1;
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn exponent(&mut self) -> std::result::Result<i64, String> {
        if self.peek() != Some(&Token::Caret) {
            return Ok(1);
        }
        self.pos += 1;
        let neg = match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                true
            }
            Some(Token::Plus) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        match self.next() {
            Some(Token::Int(n)) => {
                let n: i64 = n.try_into().map_err(|_| "exponent out of range".to_string())?;
                Ok(if neg { -n } else { n })
            }
            _ => Err("expected an integer exponent after '^'".into()),
        }
    }

    /// Factors up to the next `+`/`-` or the end: integers multiply the
    /// coefficient, names extend the group word.
    fn term(&mut self, names: &[String]) -> std::result::Result<(BigInt, Word), String> {
        let mut coeff = BigInt::one();
        let mut word = Word::new();
        let mut any = false;
        while let Some(t) = self.peek() {
            match t {
                Token::Plus | Token::Minus => break,
                Token::Star => {
                    self.pos += 1;
                }
                Token::Int(n) => {
                    coeff *= n;
                    self.pos += 1;
                    any = true;
                }
                Token::Ident(name) => {
                    let idx = names
                        .iter()
                        .position(|x| x == name)
                        .ok_or_else(|| format!("unknown group generator {name:?}"))?;
                    self.pos += 1;
                    let e = self.exponent()?;
                    word.push(Symbol::Group(idx), e);
                    any = true;
                }
                Token::Caret => return Err("'^' without a base".into()),
            }
        }
        if !any {
            return Err("empty term".into());
        }
        Ok((coeff, word))
    }
}

/// Parses `3 - 2 x^-1 y + z` style ring elements over the given group.
pub fn parse_ring(s: &str, group: &GroupSpec) -> std::result::Result<RingElement, String> {
    let toks = tokenize(s)?;
    let mut cur = Cursor { toks: &toks, pos: 0 };
    let mut out = RingElement::zero();
    let mut first = true;
    while cur.peek().is_some() {
        let sign = match cur.peek() {
            Some(Token::Plus) => {
                cur.pos += 1;
                1
            }
            Some(Token::Minus) => {
                cur.pos += 1;
                -1
            }
            _ if first => 1,
            _ => return Err("expected '+' or '-' between terms".into()),
        };
        first = false;
        let (c, w) = cur.term(group.names())?;
        let g = group.normalize(&w).map_err(|e| e.to_string())?;
        out.add_term(g, c * sign);
    }
    if first {
        return Err("empty ring element".into());
    }
    Ok(out)
}

/// Parses a group word such as `z^-1 x` or `1`.
pub fn parse_group_word(s: &str, names: &[String]) -> std::result::Result<Word, String> {
    let toks = tokenize(s)?;
    let mut cur = Cursor { toks: &toks, pos: 0 };
    let (c, w) = cur.term(names)?;
    if cur.peek().is_some() {
        return Err("a word cannot contain '+' or '-'".into());
    }
    if !c.is_one() {
        return Err("a word cannot carry an integer coefficient other than 1".into());
    }
    Ok(w)
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

#[derive(PartialEq, Clone, Copy)]
enum Section {
    None,
    Group,
    Module,
    Options,
}

struct RawAnn {
    line: usize,
    layer: Option<usize>,
    gen: String,
    body: String,
}

fn parse_tagged(rest: &str, line: usize) -> Result<(Option<usize>, String, String)> {
    let perr = |msg: String| Error::Parse { line, msg };
    let mut layer = None;
    let mut gen = None;
    let mut rest = rest.trim_start();
    loop {
        let (tok, tail) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        if let Some(v) = tok.strip_prefix("layer=") {
            layer = Some(v.parse().map_err(|_| perr(format!("bad layer {v:?}")))?);
        } else if let Some(v) = tok.strip_prefix("gen=") {
            gen = Some(v.to_string());
        } else {
            break;
        }
        rest = tail.trim_start();
    }
    let gen = gen.ok_or_else(|| perr("missing gen=<name>".into()))?;
    if rest.is_empty() {
        return Err(perr("missing ring element".into()));
    }
    Ok((layer, gen, rest.to_string()))
}

pub fn parse_spec(text: &str) -> Result<SpecFile> {
    let mut section = Section::None;
    let mut k: Option<(usize, usize)> = None;
    let mut ranks: Option<(usize, Vec<usize>)> = None;
    let mut names: Option<(usize, Vec<String>)> = None;
    let mut comms: Vec<(usize, String, String, String)> = Vec::new();
    let mut generators: Option<(usize, Vec<String>)> = None;
    let mut anns: Vec<RawAnn> = Vec::new();
    let mut rels: Vec<RawAnn> = Vec::new();
    let mut options = Options::default();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let perr = |msg: String| Error::Parse { line, msg };
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        match s {
            "[group]" => {
                section = Section::Group;
                continue;
            }
            "[module]" => {
                section = Section::Module;
                continue;
            }
            "[options]" => {
                section = Section::Options;
                continue;
            }
            _ => {}
        }
        match section {
            Section::None => return Err(perr(format!("{s:?} appears before any section header"))),
            Section::Group => {
                if let Some(rest) = s.strip_prefix('[') {
                    let (pair, rhs) = rest.split_once(']').ok_or_else(|| perr("unterminated commutator".into()))?;
                    let (a, b) = pair.split_once(',').ok_or_else(|| perr("commutator needs two generators".into()))?;
                    let rhs =
                        rhs.trim().strip_prefix('=').ok_or_else(|| perr("expected '=' after commutator".into()))?;
                    comms.push((line, a.trim().to_string(), b.trim().to_string(), rhs.trim().to_string()));
                    continue;
                }
                let (key, value) =
                    s.split_once('=').ok_or_else(|| perr(format!("expected key = value, found {s:?}")))?;
                let value = value.trim();
                match key.trim() {
                    "k" => k = Some((line, value.parse().map_err(|_| perr(format!("bad k {value:?}")))?)),
                    "ranks" => {
                        let r = split_list(value)
                            .iter()
                            .map(|x| x.parse::<usize>().map_err(|_| perr(format!("bad rank {x:?}"))))
                            .collect::<Result<Vec<_>>>()?;
                        ranks = Some((line, r));
                    }
                    "names" => names = Some((line, split_list(value))),
                    other => return Err(perr(format!("unknown group key {other:?}"))),
                }
            }
            Section::Module => {
                if let Some(rest) = s.strip_prefix("ann ") {
                    let (layer, gen, body) = parse_tagged(rest, line)?;
                    if layer.is_none() {
                        return Err(perr("annihilator needs layer=<i>".into()));
                    }
                    anns.push(RawAnn { line, layer, gen, body });
                } else if let Some(rest) = s.strip_prefix("rel ") {
                    let (layer, gen, body) = parse_tagged(rest, line)?;
                    if layer.is_some() {
                        return Err(perr("relators carry no layer".into()));
                    }
                    rels.push(RawAnn { line, layer, gen, body });
                } else if let Some((key, value)) = s.split_once('=') {
                    if key.trim() != "generators" {
                        return Err(perr(format!("unknown module key {:?}", key.trim())));
                    }
                    generators = Some((line, split_list(value)));
                } else {
                    return Err(perr(format!("unrecognised module line {s:?}")));
                }
            }
            Section::Options => {
                let (key, value) =
                    s.split_once('=').ok_or_else(|| perr(format!("expected key = value, found {s:?}")))?;
                let value = value.trim();
                let bad = || perr(format!("bad value {value:?} for {}", key.trim()));
                match key.trim() {
                    "cap" => options.cap = value.parse().map_err(|_| bad())?,
                    "mod" => options.modulus = Some(value.parse().map_err(|_| bad())?),
                    "quot" => options.quot = Some(value.parse().map_err(|_| bad())?),
                    "fuel" => options.fuel = value.parse().map_err(|_| bad())?,
                    other => return Err(perr(format!("unknown option {other:?}"))),
                }
            }
        }
    }

    let (ranks_line, ranks) = ranks.ok_or(Error::Parse { line: 0, msg: "missing ranks in [group]".into() })?;
    let (names_line, names) = names.ok_or(Error::Parse { line: 0, msg: "missing names in [group]".into() })?;
    if let Some((line, k)) = k {
        if k != ranks.len() {
            return Err(Error::Parse { line, msg: format!("k = {k} but {} ranks are given", ranks.len()) });
        }
    }
    if ranks.iter().sum::<usize>() != names.len() {
        return Err(Error::Parse {
            line: names_line.max(ranks_line),
            msg: format!("{} names for ranks summing to {}", names.len(), ranks.iter().sum::<usize>()),
        });
    }
    let mut relations = Vec::new();
    for (line, a, b, rhs) in &comms {
        let perr = |msg: String| Error::Parse { line: *line, msg };
        let find =
            |n: &str| names.iter().position(|x| x == n).ok_or_else(|| perr(format!("unknown group generator {n:?}")));
        let w = parse_group_word(rhs, &names).map_err(perr)?;
        relations.push((find(a)?, find(b)?, w));
    }
    let fail_at = |line: usize| move |e: Error| Error::Parse { line, msg: e.to_string() };
    let first_comm = comms.first().map(|c| c.0).unwrap_or(names_line);
    let group = GroupSpec::from_commutators(names.clone(), ranks, &relations)
        .map_err(fail_at(first_comm))?
        .with_fuel(options.fuel);

    let (gen_line, generators) =
        generators.ok_or(Error::Parse { line: 0, msg: "missing generators in [module]".into() })?;
    let gen_index = |r: &RawAnn| -> Result<usize> {
        generators
            .iter()
            .position(|g| *g == r.gen)
            .ok_or_else(|| Error::Parse { line: r.line, msg: format!("unknown module generator {:?}", r.gen) })
    };
    let mut annihilators = Vec::new();
    for r in &anns {
        let element = parse_ring(&r.body, &group).map_err(|msg| Error::Parse { line: r.line, msg })?;
        annihilators.push(Annihilator { generator: gen_index(r)?, layer: r.layer.unwrap_or(0), element });
    }
    let mut relators = Vec::new();
    for r in &rels {
        let element = parse_ring(&r.body, &group).map_err(|msg| Error::Parse { line: r.line, msg })?;
        relators.push(GlobalRelator { generator: gen_index(r)?, element });
    }
    let module = ModuleSpec::new(&group, generators, annihilators, relators).map_err(fail_at(gen_line))?;
    Ok(SpecFile { group, module, options })
}

pub fn render_spec(spec: &SpecFile) -> Result<String> {
    let g = &spec.group;
    let mut s = String::new();
    let _ = writeln!(s, "[group]");
    let _ = writeln!(s, "k = {}", g.k());
    let _ = writeln!(s, "ranks = {}", g.ranks().iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", "));
    let _ = writeln!(s, "names = {}", g.names().join(", "));
    for (&(t, u), tail) in g.tails() {
        // [t, u] = τ(t, u)^-1
        let w = g.inverse(tail)?;
        let _ = writeln!(s, "[{}, {}] = {}", g.names()[t], g.names()[u], g.format_element(&w));
    }
    let m = &spec.module;
    let _ = writeln!(s, "\n[module]");
    let _ = writeln!(s, "generators = {}", m.generators().join(", "));
    for a in m.annihilators() {
        let _ = writeln!(s, "ann layer={} gen={} {}", a.layer, m.generators()[a.generator], a.element.display(g));
    }
    for r in m.relators() {
        let _ = writeln!(s, "rel gen={} {}", m.generators()[r.generator], r.element.display(g));
    }
    let o = &spec.options;
    let _ = writeln!(s, "\n[options]");
    let _ = writeln!(s, "cap = {}", o.cap);
    if let Some(m) = o.modulus {
        let _ = writeln!(s, "mod = {m}");
    }
    if let Some(q) = o.quot {
        let _ = writeln!(s, "quot = {q}");
    }
    if o.fuel != DEFAULT_FUEL {
        let _ = writeln!(s, "fuel = {}", o.fuel);
    }
    Ok(s)
}

fn build(group: GroupSpec, anns: Vec<(usize, String)>, rels: Vec<String>, modulus: u64, quot: i64) -> Result<SpecFile> {
    let mut annihilators = Vec::new();
    for (layer, body) in anns {
        let element = parse_ring(&body, &group).map_err(Error::InvalidModule)?;
        annihilators.push(Annihilator { generator: 0, layer, element });
    }
    let mut relators = Vec::new();
    for body in rels {
        let element = parse_ring(&body, &group).map_err(Error::InvalidModule)?;
        relators.push(GlobalRelator { generator: 0, element });
    }
    let module = ModuleSpec::new(&group, vec!["a".into()], annihilators, relators)?;
    Ok(SpecFile { group, module, options: Options { modulus: Some(modulus), quot: Some(quot), ..Options::default() } })
}

/// `Z^{2k}` on `x1, y1, …` acting on `ZQ/(1 + x_i - y_i)`.
pub fn baumslag(k: usize) -> Result<SpecFile> {
    if k == 0 {
        return Err(Error::InvalidGroup("k must be positive".into()));
    }
    let mut names = Vec::new();
    for i in 1..=k {
        names.push(format!("x{i}"));
        names.push(format!("y{i}"));
    }
    let group = GroupSpec::free_abelian(names)?;
    let mus: Vec<String> = (1..=k).map(|i| format!("1 + x{i} - y{i}")).collect();
    build(group, mus.iter().map(|m| (1, m.clone())).collect(), mus, 5, 4)
}

/// Heisenberg group of rank `k` acting on `ZQ/(1 + x_i - y_i, z - ℓ)`.
pub fn heisenberg(k: usize, ell: i64) -> Result<SpecFile> {
    if k == 0 {
        return Err(Error::InvalidGroup("k must be positive".into()));
    }
    let group = crate::group::heisenberg(k)?;
    let mut mus: Vec<(usize, String)> = (1..=k).map(|i| (1, format!("1 + x{i} - y{i}"))).collect();
    mus.push((
        2,
        match ell {
            0 => "z".to_string(),
            l if l > 0 => format!("z - {l}"),
            l => format!("z + {}", -l),
        },
    ));
    let rels = mus.iter().map(|(_, m)| m.clone()).collect();
    build(group, mus, rels, 7, 3)
}

/// The free cyclic module over `Z^{2k}` on `x1, y1, …`.
pub fn free(k: usize) -> Result<SpecFile> {
    if k == 0 {
        return Err(Error::InvalidGroup("k must be positive".into()));
    }
    let names = (1..=k).flat_map(|i| [format!("x{i}"), format!("y{i}")]).collect();
    build(GroupSpec::free_abelian(names)?, vec![], vec![], 5, 3)
}
