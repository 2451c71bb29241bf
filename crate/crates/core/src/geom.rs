//! m-dimensional boxes with exact dyadic endpoints, and the fineness
//! predicate for tagged cells.

use std::fmt;

use crate::dyadic::DyadicScalar;
use crate::error::{Error, Result};

/// A point with exact dyadic coordinates. Tags, corners and cell centers are
/// all `Point`s; they are converted to `f64` only when a gauge or integrand
/// is evaluated.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Point(pub Vec<DyadicScalar>);

impl Point {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn from_f64s(coords: &[f64]) -> Option<Self> {
        coords.iter().map(|&c| DyadicScalar::from_f64(c)).collect::<Option<Vec<_>>>().map(Point)
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f64()).collect()
    }

    /// Max-norm distance between two points, exact.
    pub fn max_dist(&self, other: &Point) -> DyadicScalar {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(DyadicScalar::zero)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Classification of a box intersection. `NonDegenerate` means the
/// intersection has positive measure — the `|I ∩ J| > 0` test that the Hake
/// series and non-overlap predicates branch on, decided exactly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Overlap {
    NonDegenerate(Interval),
    Degenerate,
    Empty,
}

/// A closed non-degenerate axis-aligned box `∏ [lo_j, hi_j]` with dyadic
/// endpoints (`lo_j < hi_j` on every axis).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Vec<DyadicScalar>,
    hi: Vec<DyadicScalar>,
}

impl Interval {
    pub fn new(lo: Vec<DyadicScalar>, hi: Vec<DyadicScalar>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len().max(1), got: hi.len() });
        }
        for (axis, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if a >= b {
                return Err(Error::DegenerateInterval {
                    axis,
                    lo: a.to_string(),
                    hi: b.to_string(),
                });
            }
        }
        Ok(Interval { lo, hi })
    }

    /// 1D convenience constructor from integers.
    pub fn from_ints(lo: i64, hi: i64) -> Self {
        Interval::new(vec![DyadicScalar::from_int(lo)], vec![DyadicScalar::from_int(hi)]).unwrap()
    }

    /// `[-r, r]^m` cube.
    pub fn centered_cube(dim: usize, r: DyadicScalar) -> Self {
        Interval::new(vec![-&r; dim], vec![r; dim]).unwrap()
    }

    /// Exact conversion from f64 endpoints (every finite f64 is dyadic).
    pub fn from_f64s(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let lo = lo
            .iter()
            .map(|&c| DyadicScalar::from_f64(c).ok_or_else(|| Error::Parse(format!("non-finite endpoint {c}"))))
            .collect::<Result<Vec<_>>>()?;
        let hi = hi
            .iter()
            .map(|&c| DyadicScalar::from_f64(c).ok_or_else(|| Error::Parse(format!("non-finite endpoint {c}"))))
            .collect::<Result<Vec<_>>>()?;
        Interval::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[DyadicScalar] {
        &self.lo
    }

    pub fn hi(&self) -> &[DyadicScalar] {
        &self.hi
    }

    pub fn side(&self, axis: usize) -> DyadicScalar {
        &self.hi[axis] - &self.lo[axis]
    }

    pub fn max_side(&self) -> DyadicScalar {
        (0..self.dim()).map(|j| self.side(j)).max().unwrap()
    }

    /// Exact Lebesgue measure `∏ (hi_j − lo_j)`.
    pub fn measure(&self) -> DyadicScalar {
        let mut m = DyadicScalar::one();
        for j in 0..self.dim() {
            m = &m * &self.side(j);
        }
        m
    }

    pub fn center(&self) -> Point {
        Point(
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(a, b)| DyadicScalar::midpoint(a, b))
                .collect(),
        )
    }

    /// The `2^m` corners; bit `j` of `idx` selects `hi` on axis `j`.
    pub fn corner(&self, idx: usize) -> Point {
        Point(
            (0..self.dim())
                .map(|j| {
                    if idx >> j & 1 == 1 { self.hi[j].clone() } else { self.lo[j].clone() }
                })
                .collect(),
        )
    }

    pub fn corners(&self) -> impl Iterator<Item = (usize, Point)> + '_ {
        (0..1usize << self.dim()).map(|idx| (idx, self.corner(idx)))
    }

    /// Exact intersection classification.
    pub fn intersect(&self, other: &Interval) -> Result<Overlap> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        let mut degenerate = false;
        for j in 0..self.dim() {
            let a = self.lo[j].clone().max(other.lo[j].clone());
            let b = self.hi[j].clone().min(other.hi[j].clone());
            if a > b {
                return Ok(Overlap::Empty);
            }
            if a == b {
                degenerate = true;
            }
            lo.push(a);
            hi.push(b);
        }
        if degenerate {
            Ok(Overlap::Degenerate)
        } else {
            Ok(Overlap::NonDegenerate(Interval { lo, hi }))
        }
    }

    /// `|self ∩ other| > 0`, exact.
    pub fn overlaps(&self, other: &Interval) -> bool {
        matches!(self.intersect(other), Ok(Overlap::NonDegenerate(_)))
    }

    /// Non-overlapping in the partition sense: interiors disjoint.
    pub fn non_overlapping(&self, other: &Interval) -> bool {
        !self.overlaps(other)
    }

    pub fn contains_point(&self, p: &Point, strict: bool) -> bool {
        if p.dim() != self.dim() {
            return false;
        }
        self.lo.iter().zip(&self.hi).zip(&p.0).all(|((a, b), c)| {
            if strict { a < c && c < b } else { a <= c && c <= b }
        })
    }

    /// Closed containment `other ⊆ self`.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|j| self.lo[j] <= other.lo[j] && other.hi[j] <= self.hi[j])
    }

    /// `other ⊆ self°` (strict containment in the open interior).
    pub fn contains_interval_strictly(&self, other: &Interval) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|j| self.lo[j] < other.lo[j] && other.hi[j] < self.hi[j])
    }

    /// The `2^m` children of simultaneous bisection along every axis, in
    /// lexicographic corner order (deterministic).
    pub fn bisect(&self) -> Vec<Interval> {
        let m = self.dim();
        let mids: Vec<DyadicScalar> =
            (0..m).map(|j| DyadicScalar::midpoint(&self.lo[j], &self.hi[j])).collect();
        (0..1usize << m)
            .map(|idx| {
                let mut lo = Vec::with_capacity(m);
                let mut hi = Vec::with_capacity(m);
                for j in 0..m {
                    // axis 0 is the most significant bit so that ascending idx
                    // enumerates children lexicographically
                    if idx >> (m - 1 - j) & 1 == 0 {
                        lo.push(self.lo[j].clone());
                        hi.push(mids[j].clone());
                    } else {
                        lo.push(mids[j].clone());
                        hi.push(self.hi[j].clone());
                    }
                }
                Interval { lo, hi }
            })
            .collect()
    }

    /// Closed inflation by `r ≥ 0` on every side.
    pub fn inflate(&self, r: &DyadicScalar) -> Interval {
        Interval {
            lo: self.lo.iter().map(|a| a - r).collect(),
            hi: self.hi.iter().map(|b| b + r).collect(),
        }
    }

    pub fn lo_f64(&self) -> Vec<f64> {
        self.lo.iter().map(|c| c.to_f64()).collect()
    }

    pub fn hi_f64(&self) -> Vec<f64> {
        self.hi.iter().map(|c| c.to_f64()).collect()
    }

    /// Lexicographic order on (lo, hi) coordinate lists; used to fix
    /// deterministic enumeration orders.
    pub fn lex_cmp(&self, other: &Interval) -> std::cmp::Ordering {
        self.lo
            .iter()
            .chain(&self.hi)
            .cmp(other.lo.iter().chain(&other.hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.dim() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}..{}", self.lo[j], self.hi[j])?;
        }
        Ok(())
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// δ-fineness of a tagged cell: `I ⊂ B_m(tag, δ)` in the max norm, with the
/// open-ball strict inequality. The tag may lie outside the cell (McShane);
/// the farthest cell point still has to be within `δ`.
///
/// Exact: `δ` is converted to a dyadic (every finite f64 is one) and the
/// comparison is done in exact arithmetic.
pub fn is_fine(tag: &Point, cell: &Interval, delta_at_tag: f64) -> bool {
    if tag.dim() != cell.dim() || !(delta_at_tag > 0.0) {
        return false;
    }
    let delta = match DyadicScalar::from_f64(delta_at_tag) {
        Some(d) => d,
        None => return delta_at_tag == f64::INFINITY,
    };
    for j in 0..cell.dim() {
        let up = &cell.hi()[j] - &tag.0[j];
        let down = &tag.0[j] - &cell.lo()[j];
        let radius = up.max(down);
        if radius >= delta {
            return false;
        }
    }
    true
}
