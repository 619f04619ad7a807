//! Exact rational feasibility by Fourier–Motzkin elimination.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// `coeffs · x <= rhs`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub rhs: BigRational,
}

impl Constraint {
    pub fn new(coeffs: Vec<BigRational>, rhs: BigRational) -> Self {
        Constraint { coeffs, rhs }
    }
}

/// Scales each row so its first nonzero coefficient has absolute value one,
/// keeps only the tightest right-hand side per direction, and drops trivial
/// rows. Returns `None` when a trivial row is violated.
fn normalize(rows: Vec<Constraint>) -> Option<Vec<Constraint>> {
    let mut tight: BTreeMap<Vec<BigRational>, BigRational> = BTreeMap::new();
    for row in rows {
        let Some(lead) = row.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) else {
            if row.rhs.is_negative() {
                return None;
            }
            continue;
        };
        let coeffs: Vec<BigRational> = row.coeffs.iter().map(|c| c / &lead).collect();
        let rhs = &row.rhs / &lead;
        tight
            .entry(coeffs)
            .and_modify(|r| {
                if rhs < *r {
                    *r = rhs.clone();
                }
            })
            .or_insert(rhs);
    }
    Some(tight.into_iter().map(|(coeffs, rhs)| Constraint { coeffs, rhs }).collect())
}

/// Returns a rational point satisfying every constraint, or `None` when the
/// system is infeasible.
pub fn feasible_point(constraints: &[Constraint], nvars: usize) -> Option<Vec<BigRational>> {
    let mut current = normalize(constraints.to_vec())?;
    // stages[v] is the system in variables 0..=v, before v is eliminated.
    let mut stages: Vec<Vec<Constraint>> = vec![Vec::new(); nvars];
    for v in (0..nvars).rev() {
        stages[v] = current.clone();
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for row in current {
            if row.coeffs[v].is_positive() {
                pos.push(row);
            } else if row.coeffs[v].is_negative() {
                neg.push(row);
            } else {
                rest.push(row);
            }
        }
        for p in &pos {
            for q in &neg {
                let wp = -&q.coeffs[v];
                let wq = p.coeffs[v].clone();
                let coeffs = p.coeffs.iter().zip(&q.coeffs).map(|(a, b)| a * &wp + b * &wq).collect();
                rest.push(Constraint { coeffs, rhs: &p.rhs * &wp + &q.rhs * &wq });
            }
        }
        current = normalize(rest)?;
    }

    let mut x = vec![BigRational::zero(); nvars];
    for v in 0..nvars {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for row in &stages[v] {
            let a = &row.coeffs[v];
            if a.is_zero() {
                continue;
            }
            let mut r = row.rhs.clone();
            for (c, xj) in row.coeffs[..v].iter().zip(&x) {
                r -= c * xj;
            }
            let bound = r / a;
            if a.is_positive() {
                if hi.as_ref().is_none_or(|h| bound < *h) {
                    hi = Some(bound);
                }
            } else if lo.as_ref().is_none_or(|l| bound > *l) {
                lo = Some(bound);
            }
        }
        let zero = BigRational::zero();
        let zero_ok = lo.as_ref().is_none_or(|l| *l <= zero) && hi.as_ref().is_none_or(|h| *h >= zero);
        x[v] = if zero_ok {
            zero
        } else if let Some(l) = lo {
            l
        } else {
            hi.expect("bounded above when zero is excluded")
        };
    }
    Some(x)
}

/// Finds `u != 0` with `<row, u> <= 0` for every row, normalizing one
/// coordinate of `u` to `+1` or `-1`.
pub fn nonzero_in_polar_cone(rows: &[Vec<BigRational>], n: usize) -> Option<Vec<BigRational>> {
    let one = BigRational::from_integer(1.into());
    for i in 0..n {
        for sign in [one.clone(), -one.clone()] {
            let mut cons: Vec<Constraint> =
                rows.iter().map(|r| Constraint::new(r.clone(), BigRational::zero())).collect();
            let mut unit = vec![BigRational::zero(); n];
            unit[i] = one.clone();
            cons.push(Constraint::new(unit.clone(), sign.clone()));
            cons.push(Constraint::new(unit.iter().map(|c| -c).collect(), -sign.clone()));
            if let Some(u) = feasible_point(&cons, n) {
                return Some(u);
            }
        }
    }
    None
}
