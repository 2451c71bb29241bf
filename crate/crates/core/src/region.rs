//! Regions: sets `E ⊂ ℝ^m` with a declared negligible boundary
//! (`|E ∖ E°| = 0`), exposed through membership and box-classification
//! oracles plus exhaustion boxes. The negligible-boundary property is a
//! declared contract of each kind, not something the oracles can verify.

use std::sync::Arc;

use crate::dyadic::DyadicScalar;
use crate::error::{Error, Result};
use crate::geom::{Interval, Overlap, Point};

/// Point classification against a set: `Boundary` doubles as "unknown",
/// which is the honest answer on the topological boundary.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Containment {
    Inside,
    Outside,
    Boundary,
}

/// Box classification against the interior `G°`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BoxClass {
    /// Certified `C ⊆ G°`.
    InsideInterior,
    /// Certified `|C ∩ G°| = 0` (interior-disjoint; faces may touch).
    Disjoint,
    /// Neither certificate available.
    Straddles,
}

/// A named predicate region backed by closures. Builtins carry exact
/// classifiers; custom regions fall back to distance oracles or a
/// corner-sampling heuristic (flagged).
#[derive(Clone)]
pub struct PredicateRegion {
    pub name: String,
    pub dim: usize,
    pub bounded: Option<Interval>,
    membership: Arc<dyn Fn(&Point) -> Containment + Send + Sync>,
    interior: Arc<dyn Fn(&Point) -> Containment + Send + Sync>,
    classify: Option<Arc<dyn Fn(&Interval) -> BoxClass + Send + Sync>>,
    /// Lower bound on the Euclidean distance to the complement of `G°`
    /// (positive strictly inside).
    dist_to_complement: Option<Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>>,
    /// Lower bound on the Euclidean distance to the closure of `G°`
    /// (positive strictly outside).
    dist_to_closure: Option<Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>>,
}

#[derive(Clone)]
pub enum RegionKind {
    /// The closed box `E = [a, b]`; `E° = (a, b)`, `|E ∖ E°| = 0`.
    ClosedBox(Interval),
    /// The open box `E = E° = (a, b)`.
    OpenBox(Interval),
    /// Union of finitely many closed boxes.
    FiniteUnionOfBoxes(Vec<Interval>),
    /// Open axis-aligned orthant/half-space product `∏ (lo_j, hi_j)`,
    /// `None` meaning the axis is unbounded on that side.
    Orthant { lo: Vec<Option<DyadicScalar>>, hi: Vec<Option<DyadicScalar>> },
    Predicate(PredicateRegion),
}

/// A set `E` with `|E ∖ E°| = 0`, an interior-membership oracle and an
/// exhaustion. Cheap to clone.
#[derive(Clone)]
pub struct Region {
    kind: Arc<RegionKind>,
    dim: usize,
}

impl Region {
    pub fn new(kind: RegionKind) -> Result<Self> {
        let dim = match &kind {
            RegionKind::ClosedBox(b) | RegionKind::OpenBox(b) => b.dim(),
            RegionKind::FiniteUnionOfBoxes(list) => {
                let d = list.first().ok_or(Error::EmptyInput)?.dim();
                if list.iter().any(|b| b.dim() != d) {
                    return Err(Error::DimensionMismatch { expected: d, got: 0 });
                }
                d
            }
            RegionKind::Orthant { lo, hi } => {
                if lo.len() != hi.len() || lo.is_empty() {
                    return Err(Error::DimensionMismatch { expected: lo.len().max(1), got: hi.len() });
                }
                for (a, b) in lo.iter().zip(hi) {
                    if let (Some(a), Some(b)) = (a, b) {
                        if a >= b {
                            return Err(Error::DegenerateInterval {
                                axis: 0,
                                lo: a.to_string(),
                                hi: b.to_string(),
                            });
                        }
                    }
                }
                lo.len()
            }
            RegionKind::Predicate(p) => p.dim,
        };
        Ok(Region { kind: Arc::new(kind), dim })
    }

    pub fn closed_box(b: Interval) -> Self {
        Region::new(RegionKind::ClosedBox(b)).unwrap()
    }

    pub fn open_box(b: Interval) -> Self {
        Region::new(RegionKind::OpenBox(b)).unwrap()
    }

    pub fn union_of_boxes(list: Vec<Interval>) -> Result<Self> {
        Region::new(RegionKind::FiniteUnionOfBoxes(list))
    }

    /// `(0, +∞)` in one dimension.
    pub fn half_line_positive() -> Self {
        Region::new(RegionKind::Orthant { lo: vec![Some(DyadicScalar::zero())], hi: vec![None] })
            .unwrap()
    }

    /// Open positive quadrant/octant `(0, ∞)^m`.
    pub fn positive_orthant(dim: usize) -> Self {
        Region::new(RegionKind::Orthant {
            lo: vec![Some(DyadicScalar::zero()); dim],
            hi: vec![None; dim],
        })
        .unwrap()
    }

    pub fn orthant(lo: Vec<Option<DyadicScalar>>, hi: Vec<Option<DyadicScalar>>) -> Result<Self> {
        Region::new(RegionKind::Orthant { lo, hi })
    }

    /// Full space `ℝ^m`.
    pub fn full_space(dim: usize) -> Self {
        Region::new(RegionKind::Orthant { lo: vec![None; dim], hi: vec![None; dim] }).unwrap()
    }

    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> String {
        match &*self.kind {
            RegionKind::ClosedBox(b) => format!("closed:{b}"),
            RegionKind::OpenBox(b) => format!("open:{b}"),
            RegionKind::FiniteUnionOfBoxes(l) => format!("union of {} boxes", l.len()),
            RegionKind::Orthant { .. } => "orthant".to_string(),
            RegionKind::Predicate(p) => p.name.clone(),
        }
    }

    /// Whether certification relies on the corner-sampling heuristic rather
    /// than an exact classifier or a distance oracle.
    pub fn heuristic_certification(&self) -> bool {
        match &*self.kind {
            RegionKind::Predicate(p) => p.classify.is_none() && p.dist_to_complement.is_none(),
            _ => false,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.bounding_box().is_some()
    }

    /// Smallest enclosing box, when the region is bounded.
    pub fn bounding_box(&self) -> Option<Interval> {
        match &*self.kind {
            RegionKind::ClosedBox(b) | RegionKind::OpenBox(b) => Some(b.clone()),
            RegionKind::FiniteUnionOfBoxes(list) => {
                let d = list[0].dim();
                let mut lo = list[0].lo().to_vec();
                let mut hi = list[0].hi().to_vec();
                for b in &list[1..] {
                    for j in 0..d {
                        if b.lo()[j] < lo[j] {
                            lo[j] = b.lo()[j].clone();
                        }
                        if b.hi()[j] > hi[j] {
                            hi[j] = b.hi()[j].clone();
                        }
                    }
                }
                Some(Interval::new(lo, hi).unwrap())
            }
            RegionKind::Orthant { lo, hi } => {
                let mut blo = Vec::new();
                let mut bhi = Vec::new();
                for (a, b) in lo.iter().zip(hi) {
                    match (a, b) {
                        (Some(a), Some(b)) => {
                            blo.push(a.clone());
                            bhi.push(b.clone());
                        }
                        _ => return None,
                    }
                }
                Some(Interval::new(blo, bhi).unwrap())
            }
            RegionKind::Predicate(p) => p.bounded.clone(),
        }
    }

    /// `[-2^n, 2^n]^m`, intersected with the bounding box of a bounded
    /// region; the full cube when unbounded.
    pub fn exhaustion_box(&self, n: u32) -> Interval {
        let cube = Interval::centered_cube(self.dim, DyadicScalar::pow2(n as i64));
        match self.bounding_box() {
            None => cube,
            Some(bb) => match cube.intersect(&bb) {
                Ok(Overlap::NonDegenerate(i)) => i,
                // the window has not reached the region yet; the bounding
                // box itself is the honest clipped answer
                _ => bb,
            },
        }
    }

    /// Membership in the set `E` itself (used by zero-extension: `h = f` on
    /// `E`, `0` off `E`). `Boundary` is returned only where membership is
    /// genuinely undecidable from the declared contract.
    pub fn contains(&self, t: &Point) -> Result<Containment> {
        self.check_dim(t)?;
        Ok(match &*self.kind {
            RegionKind::ClosedBox(b) => {
                if b.contains_point(t, false) {
                    Containment::Inside
                } else {
                    Containment::Outside
                }
            }
            RegionKind::OpenBox(b) => {
                if b.contains_point(t, true) {
                    Containment::Inside
                } else {
                    Containment::Outside
                }
            }
            RegionKind::FiniteUnionOfBoxes(list) => {
                if list.iter().any(|b| b.contains_point(t, false)) {
                    Containment::Inside
                } else {
                    Containment::Outside
                }
            }
            RegionKind::Orthant { lo, hi } => {
                if orthant_contains(lo, hi, t) {
                    Containment::Inside
                } else {
                    Containment::Outside
                }
            }
            RegionKind::Predicate(p) => (p.membership)(t),
        })
    }

    /// Classification against `E°` / the interior of the complement:
    /// `Inside` iff certified in `G°`, `Outside` iff certified in the
    /// complement's interior, `Boundary` otherwise.
    pub fn interior_contains(&self, t: &Point) -> Result<Containment> {
        self.check_dim(t)?;
        Ok(match &*self.kind {
            RegionKind::ClosedBox(b) | RegionKind::OpenBox(b) => {
                if b.contains_point(t, true) {
                    Containment::Inside
                } else if b.contains_point(t, false) {
                    Containment::Boundary
                } else {
                    Containment::Outside
                }
            }
            RegionKind::FiniteUnionOfBoxes(list) => {
                // interior of the union can exceed the union of interiors:
                // certify via a tiny inflated box covered by the union
                let eps = DyadicScalar::pow2(-48);
                let probe = Interval::new(
                    t.0.iter().map(|c| c - &eps).collect(),
                    t.0.iter().map(|c| c + &eps).collect(),
                )
                .expect("inflated point box");
                if covered_by_union(&probe, list) {
                    Containment::Inside
                } else if list.iter().all(|b| !b.contains_point(t, false)) {
                    Containment::Outside
                } else {
                    Containment::Boundary
                }
            }
            RegionKind::Orthant { lo, hi } => {
                if orthant_contains(lo, hi, t) {
                    Containment::Inside
                } else if orthant_contains_closure(lo, hi, t) {
                    Containment::Boundary
                } else {
                    Containment::Outside
                }
            }
            RegionKind::Predicate(p) => (p.interior)(t),
        })
    }

    /// Classification of a box against `G°`; sound by construction (a box is
    /// only reported `InsideInterior` when the kind's exact test, a distance
    /// certificate, or — flagged — the corner heuristic accepts it).
    pub fn classify_box(&self, c: &Interval) -> Result<BoxClass> {
        if c.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: c.dim() });
        }
        Ok(match &*self.kind {
            RegionKind::ClosedBox(b) | RegionKind::OpenBox(b) => {
                if b.contains_interval_strictly(c) {
                    BoxClass::InsideInterior
                } else if !b.overlaps(c) {
                    BoxClass::Disjoint
                } else {
                    BoxClass::Straddles
                }
            }
            RegionKind::FiniteUnionOfBoxes(list) => {
                // sound interior test: inflating by a positive margin and
                // still being covered puts the original strictly inside
                let margin = &c.max_side() * &DyadicScalar::pow2(-8);
                if covered_by_union(&c.inflate(&margin), list) {
                    BoxClass::InsideInterior
                } else if list.iter().all(|b| !b.overlaps(c)) {
                    BoxClass::Disjoint
                } else {
                    BoxClass::Straddles
                }
            }
            RegionKind::Orthant { lo, hi } => {
                let mut inside = true;
                let mut disjoint = false;
                for j in 0..self.dim {
                    if let Some(a) = &lo[j] {
                        if &c.lo()[j] <= a {
                            inside = false;
                        }
                        if &c.hi()[j] <= a {
                            disjoint = true;
                        }
                    }
                    if let Some(b) = &hi[j] {
                        if &c.hi()[j] >= b {
                            inside = false;
                        }
                        if &c.lo()[j] >= b {
                            disjoint = true;
                        }
                    }
                }
                if inside {
                    BoxClass::InsideInterior
                } else if disjoint {
                    BoxClass::Disjoint
                } else {
                    BoxClass::Straddles
                }
            }
            RegionKind::Predicate(p) => {
                if let Some(classify) = &p.classify {
                    classify(c)
                } else if let Some(dist) = &p.dist_to_complement {
                    // sound: a cube of side s sits inside the Euclidean ball
                    // of radius (s/2)·sqrt(m) around its center
                    let center = c.center().to_f64s();
                    let needed = 0.5 * c.max_side().to_f64() * (self.dim as f64).sqrt();
                    if dist(&center) > needed {
                        BoxClass::InsideInterior
                    } else if let Some(dist_out) = &p.dist_to_closure {
                        if dist_out(&center) > needed {
                            BoxClass::Disjoint
                        } else {
                            BoxClass::Straddles
                        }
                    } else {
                        BoxClass::Straddles
                    }
                } else {
                    // corner-sampling fallback: heuristic, flagged via
                    // `heuristic_certification`
                    let mut all_in = true;
                    let mut all_out = true;
                    for (_, corner) in c.corners() {
                        match (p.interior)(&corner) {
                            Containment::Inside => all_out = false,
                            Containment::Outside => all_in = false,
                            Containment::Boundary => {
                                all_in = false;
                                all_out = false;
                            }
                        }
                    }
                    match (p.interior)(&c.center()) {
                        Containment::Inside => all_out = false,
                        Containment::Outside => all_in = false,
                        Containment::Boundary => {
                            all_in = false;
                            all_out = false;
                        }
                    }
                    if all_in {
                        BoxClass::InsideInterior
                    } else if all_out {
                        BoxClass::Disjoint
                    } else {
                        BoxClass::Straddles
                    }
                }
            }
        })
    }

    /// `I ⊆ E` (set membership of a whole box, closed test). Test boxes for
    /// Hake-function checks are drawn from this family.
    pub fn box_in_set(&self, c: &Interval) -> Result<bool> {
        if c.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: c.dim() });
        }
        Ok(match &*self.kind {
            RegionKind::ClosedBox(b) => b.contains_interval(c),
            RegionKind::OpenBox(b) => b.contains_interval_strictly(c),
            RegionKind::FiniteUnionOfBoxes(list) => covered_by_union(c, list),
            RegionKind::Orthant { .. } => self.classify_box(c)? == BoxClass::InsideInterior,
            RegionKind::Predicate(_) => self.classify_box(c)? == BoxClass::InsideInterior,
        })
    }

    /// Lower bound on the max-norm distance from `t` to the topological
    /// boundary of `G°`. Used to sharpen gauges near discontinuities of
    /// zero-extended integrands. `None` when the kind offers no bound.
    pub fn boundary_distance(&self, t: &[f64]) -> Option<f64> {
        match &*self.kind {
            RegionKind::ClosedBox(b) | RegionKind::OpenBox(b) => {
                let lo = b.lo_f64();
                let hi = b.hi_f64();
                let mut d = f64::INFINITY;
                for j in 0..self.dim {
                    d = d.min((t[j] - lo[j]).abs()).min((hi[j] - t[j]).abs());
                }
                Some(d)
            }
            RegionKind::FiniteUnionOfBoxes(list) => {
                // distance to the nearest face plane of any constituent box:
                // conservative (true boundary is a subset of those planes)
                let mut d = f64::INFINITY;
                for b in list {
                    let lo = b.lo_f64();
                    let hi = b.hi_f64();
                    for j in 0..self.dim {
                        d = d.min((t[j] - lo[j]).abs()).min((hi[j] - t[j]).abs());
                    }
                }
                Some(d)
            }
            RegionKind::Orthant { lo, hi } => {
                let mut d = f64::INFINITY;
                for j in 0..self.dim {
                    if let Some(a) = &lo[j] {
                        d = d.min((t[j] - a.to_f64()).abs());
                    }
                    if let Some(b) = &hi[j] {
                        d = d.min((b.to_f64() - t[j]).abs());
                    }
                }
                if d == f64::INFINITY {
                    None
                } else {
                    Some(d)
                }
            }
            RegionKind::Predicate(p) => {
                let inside = p.dist_to_complement.as_ref().map(|f| f(t));
                let outside = p.dist_to_closure.as_ref().map(|f| f(t));
                match (inside, outside) {
                    (Some(a), Some(b)) => Some((a.max(0.0)).max(b.max(0.0)) / (self.dim as f64).sqrt()),
                    (Some(a), None) => Some(a.max(0.0) / (self.dim as f64).sqrt()),
                    (None, Some(b)) => Some(b.max(0.0) / (self.dim as f64).sqrt()),
                    (None, None) => None,
                }
            }
        }
    }

    /// Deterministic anchor points on/near the boundary of `G°`, used by the
    /// negligible-variation estimator as tag sites outside the interior.
    pub fn boundary_anchors(&self, max_n: usize) -> Vec<Point> {
        let mut anchors: Vec<Point> = Vec::new();
        match &*self.kind {
            RegionKind::ClosedBox(b) | RegionKind::OpenBox(b) => {
                anchors.extend(b.corners().map(|(_, p)| p));
                for j in 0..self.dim {
                    let mut lo_face = b.center().0;
                    lo_face[j] = b.lo()[j].clone();
                    anchors.push(Point(lo_face));
                    let mut hi_face = b.center().0;
                    hi_face[j] = b.hi()[j].clone();
                    anchors.push(Point(hi_face));
                }
            }
            RegionKind::FiniteUnionOfBoxes(list) => {
                for b in list {
                    anchors.extend(b.corners().map(|(_, p)| p));
                }
            }
            RegionKind::Orthant { lo, hi } => {
                // finite corner (if any) plus points on each bounding face
                let mut corner = Vec::with_capacity(self.dim);
                for j in 0..self.dim {
                    corner.push(match (&lo[j], &hi[j]) {
                        (Some(a), _) => a.clone(),
                        (None, Some(b)) => b.clone(),
                        (None, None) => DyadicScalar::zero(),
                    });
                }
                anchors.push(Point(corner.clone()));
                for j in 0..self.dim {
                    if lo[j].is_some() || hi[j].is_some() {
                        let mut p = corner.clone();
                        for (k, c) in p.iter_mut().enumerate() {
                            if k != j {
                                *c = c.clone() + DyadicScalar::one();
                            }
                        }
                        anchors.push(Point(p));
                    }
                }
            }
            RegionKind::Predicate(p) => {
                if let Some(bb) = &p.bounded {
                    // dyadic probes on a coarse boundary-of-bbox grid plus
                    // bisection toward the predicate boundary from the center
                    anchors.extend(bb.corners().map(|(_, q)| q));
                    let center = bb.center();
                    for (_, corner) in bb.corners() {
                        if let Some(q) = bisect_to_boundary(self, &center, &corner) {
                            anchors.push(q);
                        }
                    }
                    for j in 0..self.dim {
                        let mut dir = center.0.clone();
                        dir[j] = bb.hi()[j].clone();
                        if let Some(q) = bisect_to_boundary(self, &center, &Point(dir)) {
                            anchors.push(q);
                        }
                        let mut dir2 = center.0.clone();
                        dir2[j] = bb.lo()[j].clone();
                        if let Some(q) = bisect_to_boundary(self, &center, &Point(dir2)) {
                            anchors.push(q);
                        }
                    }
                } else {
                    anchors.push(Point(vec![DyadicScalar::zero(); self.dim]));
                }
            }
        }
        // non-interior anchors only, deduplicated, deterministic order
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for a in anchors {
            if self.interior_contains(&a).map(|c| c != Containment::Inside).unwrap_or(false) {
                let key = a.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
                if seen.insert(key) {
                    out.push(a);
                    if out.len() >= max_n {
                        break;
                    }
                }
            }
        }
        out
    }

    fn check_dim(&self, t: &Point) -> Result<()> {
        if t.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: t.dim() });
        }
        Ok(())
    }
}

/// Dyadic bisection along the segment from an interior point to an exterior
/// point, returning a non-interior point close to the boundary.
fn bisect_to_boundary(region: &Region, inside: &Point, outside: &Point) -> Option<Point> {
    let mut a = inside.clone();
    let mut b = outside.clone();
    if region.interior_contains(&a).ok()? != Containment::Inside {
        return Some(a);
    }
    if region.interior_contains(&b).ok()? == Containment::Inside {
        return None;
    }
    for _ in 0..40 {
        let mid = Point(
            a.0.iter().zip(&b.0).map(|(x, y)| DyadicScalar::midpoint(x, y)).collect(),
        );
        if region.interior_contains(&mid).ok()? == Containment::Inside {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(b)
}

fn orthant_contains(
    lo: &[Option<DyadicScalar>],
    hi: &[Option<DyadicScalar>],
    t: &Point,
) -> bool {
    t.0.iter().enumerate().all(|(j, c)| {
        lo[j].as_ref().map_or(true, |a| c > a) && hi[j].as_ref().map_or(true, |b| c < b)
    })
}

fn orthant_contains_closure(
    lo: &[Option<DyadicScalar>],
    hi: &[Option<DyadicScalar>],
    t: &Point,
) -> bool {
    t.0.iter().enumerate().all(|(j, c)| {
        lo[j].as_ref().map_or(true, |a| c >= a) && hi[j].as_ref().map_or(true, |b| c <= b)
    })
}

/// Exact cover test: is the closed box `c` contained in the union of the
/// closed boxes in `list`? Recursive subtraction along face planes.
fn covered_by_union(c: &Interval, list: &[Interval]) -> bool {
    fn go(c: &Interval, list: &[Interval], depth: u32) -> bool {
        if depth > 64 {
            return false;
        }
        for b in list {
            if b.contains_interval(c) {
                return true;
            }
        }
        // find a box with positive overlap and split c along one of its
        // face planes strictly inside c
        for b in list {
            if let Ok(Overlap::NonDegenerate(_)) = c.intersect(b) {
                for j in 0..c.dim() {
                    for plane in [&b.lo()[j], &b.hi()[j]] {
                        if plane > &c.lo()[j] && plane < &c.hi()[j] {
                            let mut hi1 = c.hi().to_vec();
                            hi1[j] = plane.clone();
                            let mut lo2 = c.lo().to_vec();
                            lo2[j] = plane.clone();
                            let left = Interval::new(c.lo().to_vec(), hi1).unwrap();
                            let right = Interval::new(lo2, c.hi().to_vec()).unwrap();
                            return go(&left, list, depth + 1) && go(&right, list, depth + 1);
                        }
                    }
                }
            }
        }
        false
    }
    go(c, list, 0)
}

// ---------------------------------------------------------------------------
// Builtin predicate regions (exact dyadic classifiers throughout)
// ---------------------------------------------------------------------------

/// Exact squared Euclidean norm of a dyadic point.
fn norm_sq(t: &Point) -> DyadicScalar {
    t.0.iter().map(|c| c * c).fold(DyadicScalar::zero(), |acc, s| &acc + &s)
}

/// Open unit disc `{ |t| < 1 } ⊂ ℝ²`. All classifications are exact
/// (squared norms of dyadic corners compared with 1).
pub fn disc2d() -> Region {
    let one = DyadicScalar::one();
    let bb = Interval::new(vec![-&one, -&one], vec![one.clone(), one.clone()]).unwrap();
    let member = move |t: &Point| {
        let n = norm_sq(t);
        if n < DyadicScalar::one() {
            Containment::Inside
        } else if n == DyadicScalar::one() {
            Containment::Boundary
        } else {
            Containment::Outside
        }
    };
    let classify = |c: &Interval| {
        // farthest / nearest corner distances, exact
        let far: DyadicScalar = (0..2)
            .map(|j| c.lo()[j].abs().max(c.hi()[j].abs()))
            .map(|m| &m * &m)
            .fold(DyadicScalar::zero(), |acc, s| &acc + &s);
        if far < DyadicScalar::one() {
            return BoxClass::InsideInterior;
        }
        let near: DyadicScalar = (0..2)
            .map(|j| {
                if c.lo()[j].is_positive() {
                    c.lo()[j].clone()
                } else if c.hi()[j].is_negative() {
                    c.hi()[j].abs()
                } else {
                    DyadicScalar::zero()
                }
            })
            .map(|m| &m * &m)
            .fold(DyadicScalar::zero(), |acc, s| &acc + &s);
        if near >= DyadicScalar::one() {
            BoxClass::Disjoint
        } else {
            BoxClass::Straddles
        }
    };
    Region::new(RegionKind::Predicate(PredicateRegion {
        name: "disc2d".into(),
        dim: 2,
        bounded: Some(bb),
        membership: Arc::new(member),
        interior: Arc::new(member),
        classify: Some(Arc::new(classify)),
        dist_to_complement: Some(Arc::new(|t: &[f64]| {
            1.0 - (t[0] * t[0] + t[1] * t[1]).sqrt()
        })),
        dist_to_closure: Some(Arc::new(|t: &[f64]| {
            (t[0] * t[0] + t[1] * t[1]).sqrt() - 1.0
        })),
    }))
    .unwrap()
}

/// Open annulus `{ 1/2 < |t| < 1 } ⊂ ℝ²`, exact classifiers.
pub fn annulus2d() -> Region {
    let one = DyadicScalar::one();
    let quarter = DyadicScalar::new(num_bigint::BigInt::from(1), -2); // (1/2)^2
    let bb = Interval::new(vec![-&one, -&one], vec![one.clone(), one.clone()]).unwrap();
    let q = quarter.clone();
    let member = move |t: &Point| {
        let n = norm_sq(t);
        if n > q && n < DyadicScalar::one() {
            Containment::Inside
        } else if n == q || n == DyadicScalar::one() {
            Containment::Boundary
        } else {
            Containment::Outside
        }
    };
    let qc = quarter.clone();
    let classify = move |c: &Interval| {
        let far: DyadicScalar = (0..2)
            .map(|j| c.lo()[j].abs().max(c.hi()[j].abs()))
            .map(|m| &m * &m)
            .fold(DyadicScalar::zero(), |acc, s| &acc + &s);
        let near: DyadicScalar = (0..2)
            .map(|j| {
                if c.lo()[j].is_positive() {
                    c.lo()[j].clone()
                } else if c.hi()[j].is_negative() {
                    c.hi()[j].abs()
                } else {
                    DyadicScalar::zero()
                }
            })
            .map(|m| &m * &m)
            .fold(DyadicScalar::zero(), |acc, s| &acc + &s);
        if far < DyadicScalar::one() && near > qc {
            BoxClass::InsideInterior
        } else if near >= DyadicScalar::one() || far <= qc {
            BoxClass::Disjoint
        } else {
            BoxClass::Straddles
        }
    };
    Region::new(RegionKind::Predicate(PredicateRegion {
        name: "annulus2d".into(),
        dim: 2,
        bounded: Some(bb),
        membership: Arc::new(member),
        interior: {
            let q = quarter;
            Arc::new(move |t: &Point| {
                let n = norm_sq(t);
                if n > q && n < DyadicScalar::one() {
                    Containment::Inside
                } else if n == q || n == DyadicScalar::one() {
                    Containment::Boundary
                } else {
                    Containment::Outside
                }
            })
        },
        classify: Some(Arc::new(classify)),
        dist_to_complement: Some(Arc::new(|t: &[f64]| {
            let r = (t[0] * t[0] + t[1] * t[1]).sqrt();
            (1.0 - r).min(r - 0.5)
        })),
        dist_to_closure: Some(Arc::new(|t: &[f64]| {
            let r = (t[0] * t[0] + t[1] * t[1]).sqrt();
            (r - 1.0).max(0.5 - r)
        })),
    }))
    .unwrap()
}

fn unit_square() -> Interval {
    let one = DyadicScalar::one();
    Interval::new(vec![DyadicScalar::zero(), DyadicScalar::zero()], vec![one.clone(), one]).unwrap()
}

/// Open unit square minus the closed vertical segment `{1/2} × [0, 1]`.
/// `G = G°`; the removed segment is a nontrivial boundary piece strictly
/// inside the square. Exact classifiers.
pub fn square_minus_segment() -> Region {
    let sq = unit_square();
    let half = DyadicScalar::new(num_bigint::BigInt::from(1), -1);
    let h = half.clone();
    let sq_m = sq.clone();
    let member = move |t: &Point| {
        if !sq_m.contains_point(t, true) {
            if sq_m.contains_point(t, false) {
                return Containment::Boundary;
            }
            return Containment::Outside;
        }
        if t.0[0] == h {
            Containment::Boundary
        } else {
            Containment::Inside
        }
    };
    let h2 = half.clone();
    let sq_c = sq.clone();
    let classify = move |c: &Interval| {
        if !sq_c.overlaps(c) {
            return BoxClass::Disjoint;
        }
        if sq_c.contains_interval_strictly(c) && (c.hi()[0] < h2 || c.lo()[0] > h2) {
            return BoxClass::InsideInterior;
        }
        BoxClass::Straddles
    };
    Region::new(RegionKind::Predicate(PredicateRegion {
        name: "square-minus-segment".into(),
        dim: 2,
        bounded: Some(sq),
        membership: Arc::new(member.clone()),
        interior: Arc::new(member),
        classify: Some(Arc::new(classify)),
        dist_to_complement: Some(Arc::new(|t: &[f64]| {
            let edge = t[0].min(1.0 - t[0]).min(t[1]).min(1.0 - t[1]);
            edge.min((t[0] - 0.5).abs())
        })),
        dist_to_closure: Some(Arc::new(|t: &[f64]| {
            let dx = (t[0].max(1.0 - t[0]) - 1.0).max(0.0);
            let dy = (t[1].max(1.0 - t[1]) - 1.0).max(0.0);
            (dx * dx + dy * dy).sqrt()
        })),
    }))
    .unwrap()
}

/// Open unit square minus the main diagonal `{x = y}`. Exact classifiers
/// (boxes strictly above or below the diagonal).
pub fn square_minus_diagonal() -> Region {
    let sq = unit_square();
    let sq_m = sq.clone();
    let member = move |t: &Point| {
        if !sq_m.contains_point(t, true) {
            if sq_m.contains_point(t, false) {
                return Containment::Boundary;
            }
            return Containment::Outside;
        }
        if t.0[0] == t.0[1] {
            Containment::Boundary
        } else {
            Containment::Inside
        }
    };
    let sq_c = sq.clone();
    let classify = move |c: &Interval| {
        if !sq_c.overlaps(c) {
            return BoxClass::Disjoint;
        }
        if sq_c.contains_interval_strictly(c) && (c.hi()[0] < c.lo()[1] || c.lo()[0] > c.hi()[1]) {
            return BoxClass::InsideInterior;
        }
        BoxClass::Straddles
    };
    Region::new(RegionKind::Predicate(PredicateRegion {
        name: "square-minus-diagonal".into(),
        dim: 2,
        bounded: Some(sq),
        membership: Arc::new(member.clone()),
        interior: Arc::new(member),
        classify: Some(Arc::new(classify)),
        dist_to_complement: Some(Arc::new(|t: &[f64]| {
            let edge = t[0].min(1.0 - t[0]).min(t[1]).min(1.0 - t[1]);
            edge.min((t[0] - t[1]).abs() / std::f64::consts::SQRT_2)
        })),
        dist_to_closure: None,
    }))
    .unwrap()
}

/// Custom predicate region from raw oracles (certification falls back to
/// the distance oracle when provided, otherwise to the flagged
/// corner-sampling heuristic).
#[allow(clippy::too_many_arguments)]
pub fn predicate_region(
    name: impl Into<String>,
    dim: usize,
    bounded: Option<Interval>,
    membership: impl Fn(&Point) -> Containment + Send + Sync + 'static,
    interior: impl Fn(&Point) -> Containment + Send + Sync + 'static,
    dist_to_complement: Option<Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>>,
    dist_to_closure: Option<Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>>,
) -> Region {
    Region::new(RegionKind::Predicate(PredicateRegion {
        name: name.into(),
        dim,
        bounded,
        membership: Arc::new(membership),
        interior: Arc::new(interior),
        classify: None,
        dist_to_complement,
        dist_to_closure,
    }))
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt1(s: &str) -> Point {
        Point(vec![s.parse().unwrap()])
    }

    fn pt2(a: &str, b: &str) -> Point {
        Point(vec![a.parse().unwrap(), b.parse().unwrap()])
    }

    fn iv1(lo: &str, hi: &str) -> Interval {
        Interval::new(vec![lo.parse().unwrap()], vec![hi.parse().unwrap()]).unwrap()
    }

    fn iv2(lo: [&str; 2], hi: [&str; 2]) -> Interval {
        Interval::new(
            lo.iter().map(|s| s.parse().unwrap()).collect(),
            hi.iter().map(|s| s.parse().unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn interior_membership_examples() {
        let r = Region::open_box(iv1("0", "1"));
        assert_eq!(r.interior_contains(&pt1("0.5")).unwrap(), Containment::Inside);
        assert_eq!(r.interior_contains(&pt1("0")).unwrap(), Containment::Boundary);
        let hl = Region::half_line_positive();
        assert_eq!(hl.interior_contains(&pt1("-1")).unwrap(), Containment::Outside);
        assert_eq!(hl.interior_contains(&pt1("0")).unwrap(), Containment::Boundary);
        assert_eq!(hl.interior_contains(&pt1("2")).unwrap(), Containment::Inside);
    }

    #[test]
    fn exhaustion_boxes() {
        let hl = Region::half_line_positive();
        assert_eq!(hl.exhaustion_box(2), iv1("-4", "4"));
        let open = Region::open_box(iv1("0", "1"));
        assert_eq!(open.exhaustion_box(5), iv1("0", "1"));
        let plane = Region::full_space(2);
        assert_eq!(plane.exhaustion_box(0), iv2(["-1", "-1"], ["1", "1"]));
    }

    #[test]
    fn box_classification_open_box() {
        let r = Region::open_box(iv1("0", "1"));
        assert_eq!(r.classify_box(&iv1("0.25", "0.5")).unwrap(), BoxClass::InsideInterior);
        assert_eq!(r.classify_box(&iv1("0", "0.5")).unwrap(), BoxClass::Straddles);
        assert_eq!(r.classify_box(&iv1("1", "2")).unwrap(), BoxClass::Disjoint);
        assert_eq!(r.classify_box(&iv1("2", "3")).unwrap(), BoxClass::Disjoint);
    }

    #[test]
    fn union_region_interior_spans_shared_faces() {
        let r = Region::union_of_boxes(vec![iv1("0", "1"), iv1("1", "2")]).unwrap();
        // 1 is interior to the union even though it is a face of both parts
        assert_eq!(r.interior_contains(&pt1("1")).unwrap(), Containment::Inside);
        assert_eq!(r.interior_contains(&pt1("0")).unwrap(), Containment::Boundary);
        assert_eq!(r.classify_box(&iv1("0.5", "1.5")).unwrap(), BoxClass::InsideInterior);
        assert_eq!(r.classify_box(&iv1("-1", "-0.5")).unwrap(), BoxClass::Disjoint);
    }

    #[test]
    fn disc_classification_is_exact() {
        let d = disc2d();
        assert_eq!(d.interior_contains(&pt2("0", "0")).unwrap(), Containment::Inside);
        assert_eq!(d.interior_contains(&pt2("1", "0")).unwrap(), Containment::Boundary);
        assert_eq!(d.interior_contains(&pt2("1", "1")).unwrap(), Containment::Outside);
        assert_eq!(
            d.classify_box(&iv2(["0", "0"], ["0.5", "0.5"])).unwrap(),
            BoxClass::InsideInterior
        );
        assert_eq!(
            d.classify_box(&iv2(["0.75", "0.75"], ["1", "1"])).unwrap(),
            BoxClass::Disjoint
        );
        assert_eq!(
            d.classify_box(&iv2(["0.5", "0.5"], ["0.875", "0.875"])).unwrap(),
            BoxClass::Straddles
        );
    }

    #[test]
    fn segment_region_blocks_touching_boxes() {
        let r = square_minus_segment();
        assert_eq!(r.interior_contains(&pt2("0.25", "0.5")).unwrap(), Containment::Inside);
        assert_eq!(r.interior_contains(&pt2("0.5", "0.5")).unwrap(), Containment::Boundary);
        // a box whose face lies on the segment is not inside the interior
        assert_eq!(
            r.classify_box(&iv2(["0.25", "0.25"], ["0.5", "0.5"])).unwrap(),
            BoxClass::Straddles
        );
        assert_eq!(
            r.classify_box(&iv2(["0.25", "0.25"], ["0.375", "0.5"])).unwrap(),
            BoxClass::InsideInterior
        );
    }

    #[test]
    fn boundary_anchors_are_non_interior() {
        for r in [
            Region::open_box(iv1("0", "1")),
            disc2d(),
            square_minus_segment(),
            Region::half_line_positive(),
        ] {
            let anchors = r.boundary_anchors(16);
            assert!(!anchors.is_empty(), "no anchors for {}", r.name());
            for a in &anchors {
                assert_ne!(r.interior_contains(a).unwrap(), Containment::Inside);
            }
        }
    }

    #[test]
    fn box_in_set_respects_closed_vs_open() {
        let closed = Region::closed_box(iv1("0", "1"));
        let open = Region::open_box(iv1("0", "1"));
        let edge = iv1("0", "0.5");
        assert!(closed.box_in_set(&edge).unwrap());
        assert!(!open.box_in_set(&edge).unwrap());
    }
}
