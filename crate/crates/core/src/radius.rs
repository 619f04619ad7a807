//! The constant `p₀` for a covering family of lattice sets: beyond squared
//! norm `p₀`, every lattice point `x` has some `L` in the family with
//! `x + L` inside the ball of squared radius `|x|² - 1`.
//!
//! The search is exact. A positive margin `c` with `max_L min_{y ∈ L} <u, y> >= c`
//! for all unit `u` bounds the region where the move can fail by
//! `R* = (M² + 1) / 2c`, `M` the largest point norm; the ball of radius
//! `⌈R*⌉` is then scanned exhaustively.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::geometry::{covers_sphere, norm_sq, CoverResult, LatticeSet};

pub const MAX_SUBDIVISION_DEPTH: u32 = 40;

/// Boxes are refined until the interval bound is within this fraction of
/// the value at the box centre.
const SLACK_NUM: i128 = 1;
const SLACK_DEN: i128 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiusCert {
    pub p0: i64,
    pub margin: BigRational,
    pub max_norm_sq: i64,
    pub tail_bound: BigRational,
    /// Squared radius of the scanned ball, `⌈R*⌉²`.
    pub scan_bound: i64,
    /// Nonzero lattice points in the scanned ball where no set moves inward.
    pub bad_points: Vec<Vec<i64>>,
}

impl fmt::Display for RadiusCert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p0 = {}", self.p0)?;
        writeln!(f, "margin = {}", self.margin)?;
        writeln!(f, "max point norm^2 = {}", self.max_norm_sq)?;
        writeln!(f, "tail bound R* = {}", self.tail_bound)?;
        writeln!(f, "scanned |x|^2 <= {}", self.scan_bound)?;
        let bad: Vec<String> = self
            .bad_points
            .iter()
            .map(|p| format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "bad points = [{}]", bad.join(", "))
    }
}

/// Lower bound `c > 0` on `min_{|u| = 1} max_{L} min_{y ∈ L} <u, y>`.
///
/// Each face of the cube `[-1, 1]^n` is split into dyadic boxes. On a box
/// with centre `C` and half-width `h`, `<u, y> >= <C, y> - h Σ_j |y_j|` over
/// the free coordinates, and `|u|` is bounded by the farthest corner.
pub fn positivity_margin(family: &[LatticeSet], n: usize) -> Result<BigRational> {
    if let CoverResult::Witness(witness) = covers_sphere(family, n)? {
        return Err(Error::NotCovered { witness });
    }
    if family.iter().any(|l| l.points().is_empty()) {
        // An empty set moves every point inward; any positive margin is valid.
        return Ok(BigRational::one());
    }
    let sets: Vec<Vec<Vec<i64>>> = family.iter().map(|l| l.points().iter().cloned().collect()).collect();
    // best = num / den
    let mut best: Option<(i128, i128)> = None;
    for axis in 0..n {
        for sign in [1i128, -1] {
            let mut centre = vec![0i128; n];
            centre[axis] = sign;
            let mut stack = vec![(centre, 0u32)];
            while let Some((c, depth)) = stack.pop() {
                let mut lower = i128::MIN;
                let mut central = i128::MIN;
                for set in &sets {
                    let mut lo = i128::MAX;
                    let mut mid = i128::MAX;
                    for y in set {
                        let d: i128 = c.iter().zip(y).map(|(a, &b)| a * b as i128).sum();
                        let spread: i128 =
                            y.iter().enumerate().filter(|(j, _)| *j != axis).map(|(_, &b)| (b as i128).abs()).sum();
                        lo = lo.min(d - spread);
                        mid = mid.min(d);
                    }
                    lower = lower.max(lo);
                    central = central.max(mid);
                }
                let tight = lower > 0 && SLACK_DEN * (central - lower) <= SLACK_NUM * central;
                if tight || (lower > 0 && depth == MAX_SUBDIVISION_DEPTH) {
                    let scale = 1i128 << depth;
                    let s: i128 = c
                        .iter()
                        .enumerate()
                        .map(|(j, &x)| if j == axis { scale * scale } else { (x.abs() + 1) * (x.abs() + 1) })
                        .sum();
                    // value >= lower / sqrt(s) >= lower * 2^10 / (isqrt(s * 2^20) + 1)
                    let root = isqrt(s);
                    let (num, den) = if root * root == s { (lower, root) } else { (lower << 10, isqrt(s << 20) + 1) };
                    let (g_num, g_den) = reduce(num, den);
                    best = Some(match best {
                        Some((bn, bd)) if bn * g_den <= g_num * bd => (bn, bd),
                        _ => (g_num, g_den),
                    });
                    continue;
                }
                if depth == MAX_SUBDIVISION_DEPTH {
                    return Err(Error::NeedSmallerBoxes(MAX_SUBDIVISION_DEPTH as usize));
                }
                let free: Vec<usize> = (0..n).filter(|&j| j != axis).collect();
                for mask in 0..(1u64 << free.len()) {
                    let mut child: Vec<i128> = c.iter().map(|x| 2 * x).collect();
                    for (b, &j) in free.iter().enumerate() {
                        child[j] += if mask >> b & 1 == 1 { 1 } else { -1 };
                    }
                    stack.push((child, depth + 1));
                }
            }
        }
    }
    let (num, den) = best.expect("at least one face is certified");
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

fn reduce(a: i128, b: i128) -> (i128, i128) {
    let (mut x, mut y) = (a.abs(), b.abs());
    while y != 0 {
        let t = x % y;
        x = y;
        y = t;
    }
    if x == 0 {
        (a, b)
    } else {
        (a / x, b / x)
    }
}

fn isqrt(v: i128) -> i128 {
    if v <= 0 {
        return 0;
    }
    let mut x = (v as f64).sqrt() as i128;
    while x * x > v {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= v {
        x += 1;
    }
    x
}

/// All lattice points with `|x|² <= r2`, in lexicographic order.
pub fn lattice_ball(n: usize, r2: i64) -> Vec<Vec<i64>> {
    fn rec(n: usize, left: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let m = isqrt(left as i128) as i64;
        for v in -m..=m {
            prefix.push(v);
            rec(n, left - v * v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if r2 >= 0 {
        rec(n, r2, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// True when `x + L` lies in the ball of squared radius `|x|² - 1`.
pub fn moves_inward(x: &[i64], set: &LatticeSet) -> bool {
    let target = norm_sq(x) - 1;
    set.points().iter().all(|y| {
        let s: i64 = x.iter().zip(y).map(|(a, b)| (a + b) * (a + b)).sum();
        s <= target
    })
}

pub fn compute_p0(family: &[LatticeSet], n: usize) -> Result<RadiusCert> {
    let margin = positivity_margin(family, n)?;
    let max_norm_sq = family.iter().map(LatticeSet::max_norm_sq).max().unwrap_or(0);
    let tail_bound = BigRational::from_integer(BigInt::from(max_norm_sq + 1)) / (&margin * BigInt::from(2));
    let ceil = tail_bound.ceil().to_integer();
    let r: i64 = ceil.try_into().map_err(|_| Error::NeedSmallerBoxes(MAX_SUBDIVISION_DEPTH as usize))?;
    let scan_bound = r * r;
    let mut bad_points = Vec::new();
    for x in lattice_ball(n, scan_bound) {
        if x.iter().all(|&v| v == 0) {
            continue;
        }
        if !family.iter().any(|l| moves_inward(&x, l)) {
            bad_points.push(x);
        }
    }
    let p0 = bad_points.iter().map(|x| norm_sq(x)).max().unwrap_or(0);
    Ok(RadiusCert { p0, margin, max_norm_sq, tail_bound, scan_bound, bad_points })
}

impl RadiusCert {
    pub fn summary(&self) -> String {
        format!("p0 = {}, margin = {}, R* = {}", self.p0, self.margin, self.tail_bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::close_under_negation;

    fn set(dim: usize, pts: &[&[i64]]) -> LatticeSet {
        LatticeSet::new(dim, pts.iter().map(|p| p.to_vec()), "test").unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn margin_on_the_line() {
        let fam = [set(1, &[&[1]]), set(1, &[&[-1]])];
        assert_eq!(positivity_margin(&fam, 1).unwrap(), q(1, 1));
    }

    #[test]
    fn margin_of_coordinate_axes() {
        // min over the circle of max |u_j| is 1/sqrt(2)
        let fam = close_under_negation(&[set(2, &[&[1, 0]]), set(2, &[&[0, 1]])]);
        let c = positivity_margin(&fam, 2).unwrap();
        assert!(c >= q(7, 10));
        assert!(&c * &c <= q(1, 2));
    }

    #[test]
    fn quadrant_family_does_not_cover() {
        let fam = close_under_negation(&[set(2, &[&[1, 0], &[0, 1]])]);
        assert!(matches!(positivity_margin(&fam, 2), Err(Error::NotCovered { .. })));
        assert!(matches!(compute_p0(&fam, 2), Err(Error::NotCovered { .. })));
    }

    #[test]
    fn p0_unit_steps() {
        let fam = [set(1, &[&[1]]), set(1, &[&[-1]])];
        let cert = compute_p0(&fam, 1).unwrap();
        assert_eq!(cert.p0, 0);
        assert!(cert.bad_points.is_empty());
    }

    #[test]
    fn p0_overshooting_steps() {
        let fam = [set(1, &[&[2]]), set(1, &[&[-2]])];
        let cert = compute_p0(&fam, 1).unwrap();
        assert_eq!(cert.p0, 1);
        assert_eq!(cert.bad_points, vec![vec![-1], vec![1]]);
    }

    #[test]
    fn ball_enumeration_counts() {
        assert_eq!(lattice_ball(2, 1).len(), 5);
        assert_eq!(lattice_ball(1, 2), vec![vec![-1], vec![0], vec![1]]);
        assert_eq!(lattice_ball(3, 0), vec![vec![0, 0, 0]]);
        // Gauss circle count for r^2 = 25
        assert_eq!(lattice_ball(2, 25).len(), 81);
    }
}
