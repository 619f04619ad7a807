//! Exact arithmetic in the integral group ring `ZQ` and the naive valuation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::geometry::LayerCharacter;
use crate::group::{GroupElement, GroupSpec};

/// Finite-support map `Q → Z`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RingElement {
    terms: BTreeMap<GroupElement, BigInt>,
}

/// Value of the naive valuation: a rational, or `+∞` for the zero element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(BigRational),
    Infinite,
}

impl Valuation {
    pub fn is_positive(&self) -> bool {
        match self {
            Valuation::Finite(v) => v.is_positive(),
            Valuation::Infinite => true,
        }
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl RingElement {
    pub fn zero() -> Self {
        RingElement::default()
    }

    pub fn one(group: &GroupSpec) -> Self {
        RingElement::monomial(group.identity(), BigInt::one())
    }

    pub fn monomial(g: GroupElement, c: BigInt) -> Self {
        let mut r = RingElement::zero();
        r.add_term(g, c);
        r
    }

    pub fn from_terms<I: IntoIterator<Item = (GroupElement, BigInt)>>(terms: I) -> Self {
        let mut r = RingElement::zero();
        for (g, c) in terms {
            r.add_term(g, c);
        }
        r
    }

    pub fn add_term(&mut self, g: GroupElement, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(g);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ordered-word lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &BigInt)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.keys()
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, g: &GroupElement) -> BigInt {
        self.terms.get(g).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn scale(&self, c: &BigInt) -> RingElement {
        RingElement::from_terms(self.terms.iter().map(|(g, x)| (g.clone(), x * c)))
    }

    /// Convolution product; supports multiply through collection in `group`.
    pub fn mul(&self, other: &RingElement, group: &GroupSpec) -> Result<RingElement> {
        let mut out = RingElement::zero();
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                out.add_term(group.multiply(g, h)?, a * b);
            }
        }
        Ok(out)
    }

    /// `λ · q`.
    pub fn scale_right(&self, q: &GroupElement, group: &GroupSpec) -> Result<RingElement> {
        let mut out = RingElement::zero();
        for (g, c) in &self.terms {
            out.add_term(group.multiply(g, q)?, c.clone());
        }
        Ok(out)
    }

    /// `q · λ`.
    pub fn scale_left(&self, q: &GroupElement, group: &GroupSpec) -> Result<RingElement> {
        let mut out = RingElement::zero();
        for (g, c) in &self.terms {
            out.add_term(group.multiply(q, g)?, c.clone());
        }
        Ok(out)
    }

    /// Naive valuation: the minimum of the character over the support.
    pub fn v_chi(&self, chi: &LayerCharacter, group: &GroupSpec) -> Result<Valuation> {
        let mut best: Option<BigRational> = None;
        for g in self.terms.keys() {
            let v = chi.eval(g, group)?;
            best = Some(match best {
                Some(b) if b <= v => b,
                _ => v,
            });
        }
        Ok(best.map_or(Valuation::Infinite, Valuation::Finite))
    }

    /// Smallest layer containing the whole support (`k + 1` for zero).
    pub fn layer(&self, group: &GroupSpec) -> usize {
        self.terms.keys().map(|g| group.layer_of(g)).min().unwrap_or(group.k() + 1)
    }

    pub fn display<'a>(&'a self, group: &'a GroupSpec) -> impl fmt::Display + 'a {
        RingDisplay { r: self, group }
    }
}

struct RingDisplay<'a> {
    r: &'a RingElement,
    group: &'a GroupSpec,
}

impl fmt::Display for RingDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r.is_zero() {
            return f.write_str("0");
        }
        for (k, (g, c)) in self.r.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if g.is_identity() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs} ")?;
                }
                f.write_str(&self.group.format_element(g))?;
            }
        }
        Ok(())
    }
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (g, c) in &rhs.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement { terms: self.terms.iter().map(|(g, c)| (g.clone(), -c)).collect() }
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        self + &(-rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::heisenberg;

    fn z2() -> GroupSpec {
        GroupSpec::free_abelian(vec!["x".into(), "y".into()]).unwrap()
    }

    fn el(g: &GroupSpec, e: &[i64]) -> GroupElement {
        g.element(e.to_vec()).unwrap()
    }

    fn poly(g: &GroupSpec, terms: &[(i64, &[i64])]) -> RingElement {
        RingElement::from_terms(terms.iter().map(|(c, e)| (el(g, e), BigInt::from(*c))))
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn addition_cancels() {
        let g = z2();
        let lam = poly(&g, &[(1, &[0, 0]), (1, &[1, 0]), (-1, &[0, 1])]);
        assert!((&lam + &(-&lam)).is_zero());
        let a = poly(&g, &[(1, &[0, 0]), (1, &[1, 0])]);
        let b = poly(&g, &[(-1, &[0, 0]), (1, &[0, 1])]);
        assert_eq!(&a + &b, poly(&g, &[(1, &[1, 0]), (1, &[0, 1])]));
        let s: Vec<_> = (&lam + &RingElement::zero()).support().cloned().collect();
        assert_eq!(s, lam.support().cloned().collect::<Vec<_>>());
    }

    #[test]
    fn products() {
        let g = GroupSpec::free_abelian(vec!["x".into()]).unwrap();
        let one = RingElement::one(&g);
        let a = poly(&g, &[(1, &[0]), (1, &[1])]);
        let b = poly(&g, &[(1, &[0]), (-1, &[1])]);
        assert_eq!(a.mul(&one, &g).unwrap(), a);
        assert_eq!(a.mul(&b, &g).unwrap(), poly(&g, &[(1, &[0]), (-1, &[2])]));

        let h = heisenberg(1).unwrap();
        let x = RingElement::monomial(h.generator(0), 1.into());
        let y = RingElement::monomial(h.generator(1), 1.into());
        let xy = x.mul(&y, &h).unwrap();
        let yx = y.mul(&x, &h).unwrap();
        assert_ne!(xy, yx);
        assert_eq!(&xy - &yx, poly(&h, &[(1, &[1, 1, 0]), (-1, &[1, 1, -1])]));
    }

    #[test]
    fn valuation_examples() {
        let g = z2();
        let chi = LayerCharacter::from_integers(1, &[1, 2]).unwrap();
        assert_eq!(RingElement::zero().v_chi(&chi, &g).unwrap(), Valuation::Infinite);
        let lam = poly(&g, &[(1, &[0, 0]), (1, &[1, 0]), (-1, &[0, 1])]);
        assert_eq!(lam.v_chi(&chi, &g).unwrap(), Valuation::Finite(q(0)));
        let shifted = lam.scale_right(&g.generator(1), &g).unwrap();
        assert_eq!(shifted.v_chi(&chi, &g).unwrap(), Valuation::Finite(q(2)));
    }

    #[test]
    fn valuation_requires_layer() {
        let h = heisenberg(1).unwrap();
        let chi = LayerCharacter::from_integers(2, &[1]).unwrap();
        let lam = RingElement::monomial(h.generator(0), 1.into());
        assert!(matches!(lam.v_chi(&chi, &h), Err(crate::Error::NotInLayer { .. })));
    }

    #[test]
    fn display_is_signed_sum() {
        let g = z2();
        let lam = poly(&g, &[(1, &[0, 0]), (1, &[1, 0]), (-1, &[0, 1])]);
        assert_eq!(lam.display(&g).to_string(), "1 + x - y");
        let mu = poly(&g, &[(-2, &[-1, 1]), (3, &[0, 0])]);
        assert_eq!(mu.display(&g).to_string(), "3 - 2 x^-1 y");
        assert_eq!(RingElement::zero().display(&g).to_string(), "0");
    }
}
