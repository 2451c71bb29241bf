//! Tagged partitions with McShane / Henstock-Kurzweil tagging disciplines,
//! a constructive Cousin bisection that produces δ-fine partitions of a box,
//! and a randomized sampler for Z-tagged partitions in a box.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicScalar;
use crate::error::{Error, Result};
use crate::gauge::Gauge;
use crate::geom::{is_fine, Interval, Point};
use crate::value::{KahanSum, VectorValue};

/// Tagging discipline: McShane tags may lie anywhere in the ambient set,
/// Henstock-Kurzweil tags must lie in their own cell.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    McShane,
    HenstockKurzweil,
}

impl PartitionKind {
    pub fn label(&self) -> &'static str {
        match self {
            PartitionKind::McShane => "mcshane",
            PartitionKind::HenstockKurzweil => "hk",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TaggedCell {
    pub tag: Point,
    pub cell: Interval,
}

/// A finite list of tagged cells with pairwise non-overlapping boxes.
/// `of` is set when the cells exactly cover that box (a partition *of* it
/// rather than merely *in* it).
#[derive(Clone, Debug)]
pub struct TaggedPartition {
    pub kind: PartitionKind,
    pub cells: Vec<TaggedCell>,
    pub of: Option<Interval>,
}

/// What a partition check found wrong. Kept as data so tests and reports can
/// show the witness.
#[derive(Debug)]
pub enum PartitionDefect {
    Overlap(usize, usize),
    TagOutsideCell(usize),
    NotFine { index: usize, delta: f64 },
    CoverMeasure { expected: DyadicScalar, got: DyadicScalar },
    CellOutsideTarget(usize),
}

impl TaggedPartition {
    pub fn total_measure(&self) -> DyadicScalar {
        self.cells
            .iter()
            .map(|c| c.cell.measure())
            .fold(DyadicScalar::zero(), |acc, m| &acc + &m)
    }

    /// Exact pairwise non-overlap via a sweep on axis 0; O(n·k) with exact
    /// comparisons only on axis-0-overlapping pairs.
    pub fn check_non_overlap(&self) -> std::result::Result<(), PartitionDefect> {
        let mut order: Vec<usize> = (0..self.cells.len()).collect();
        order.sort_by(|&a, &b| {
            self.cells[a].cell.lo()[0].cmp(&self.cells[b].cell.lo()[0])
        });
        let mut active: Vec<usize> = Vec::new();
        for &i in &order {
            let ci = &self.cells[i].cell;
            active.retain(|&j| self.cells[j].cell.hi()[0] > ci.lo()[0]);
            for &j in &active {
                if ci.overlaps(&self.cells[j].cell) {
                    return Err(PartitionDefect::Overlap(j, i));
                }
            }
            active.push(i);
        }
        Ok(())
    }

    /// Full soundness check: non-overlap, tag discipline, optional
    /// δ-fineness, and exact cover when `of` is set.
    pub fn verify(&self, gauge: Option<&Gauge>) -> std::result::Result<(), PartitionDefect> {
        self.check_non_overlap()?;
        for (i, tc) in self.cells.iter().enumerate() {
            if self.kind == PartitionKind::HenstockKurzweil
                && !tc.cell.contains_point(&tc.tag, false)
            {
                return Err(PartitionDefect::TagOutsideCell(i));
            }
            if let Some(g) = gauge {
                let delta = g.value_at(&tc.tag).map_err(|_| PartitionDefect::NotFine {
                    index: i,
                    delta: f64::NAN,
                })?;
                if !is_fine(&tc.tag, &tc.cell, delta) {
                    return Err(PartitionDefect::NotFine { index: i, delta });
                }
            }
        }
        if let Some(target) = &self.of {
            for (i, tc) in self.cells.iter().enumerate() {
                if !target.contains_interval(&tc.cell) {
                    return Err(PartitionDefect::CellOutsideTarget(i));
                }
            }
            let total = self.total_measure();
            let expected = target.measure();
            if total != expected {
                return Err(PartitionDefect::CoverMeasure { expected, got: total });
            }
        }
        Ok(())
    }
}

/// Streaming core of the Cousin construction: recursively bisects `j` along
/// all axes and hands each accepted cell (center, cell, δ at center) to the
/// visitor without materializing the partition. A cell is accepted exactly
/// when it is δ-fine at its own center, so the result is valid under both
/// tagging disciplines.
pub fn cousin_visit<F>(j: &Interval, delta: &Gauge, depth_cap: u32, visitor: &mut F) -> Result<u64>
where
    F: FnMut(Point, Interval, f64) -> Result<()>,
{
    if depth_cap < 1 {
        return Err(Error::Invalid("depth_cap must be >= 1".into()));
    }
    fn recurse<F>(
        cell: Interval,
        depth: u32,
        cap: u32,
        delta: &Gauge,
        visitor: &mut F,
        count: &mut u64,
    ) -> Result<()>
    where
        F: FnMut(Point, Interval, f64) -> Result<()>,
    {
        let center = cell.center();
        let d = delta.value_at(&center)?;
        if is_fine(&center, &cell, d) {
            *count += 1;
            return visitor(center, cell, d);
        }
        if depth >= cap {
            return Err(Error::DepthExceeded { depth, cell: cell.to_string(), delta: d });
        }
        for child in cell.bisect() {
            recurse(child, depth + 1, cap, delta, visitor, count)?;
        }
        Ok(())
    }
    let mut count = 0;
    recurse(j.clone(), 0, depth_cap, delta, visitor, &mut count)?;
    Ok(count)
}

/// Constructive Cousin lemma: a δ-fine tagged partition OF `j` (exact
/// cover), tags at cell centers, deterministic bisection order.
pub fn cousin_partition(
    j: &Interval,
    delta: &Gauge,
    kind: PartitionKind,
    depth_cap: u32,
) -> Result<TaggedPartition> {
    let mut cells = Vec::new();
    cousin_visit(j, delta, depth_cap, &mut |tag, cell, _| {
        cells.push(TaggedCell { tag, cell });
        Ok(())
    })?;
    Ok(TaggedPartition { kind, cells, of: Some(j.clone()) })
}

/// Source of candidate tag points for Z-tagged partitions (boundary points,
/// finite exceptional sets, complement samples).
#[derive(Clone)]
pub struct PointSampler {
    pub label: String,
    gen: std::sync::Arc<dyn Fn(&mut ChaCha8Rng) -> Option<Point> + Send + Sync>,
}

impl PointSampler {
    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&mut ChaCha8Rng) -> Option<Point> + Send + Sync + 'static,
    {
        PointSampler { label: label.into(), gen: std::sync::Arc::new(f) }
    }

    pub fn empty() -> Self {
        Self::from_fn("empty", |_| None)
    }

    /// Cycles uniformly over a finite point set.
    pub fn finite(points: Vec<Point>) -> Self {
        Self::from_fn("finite-set", move |rng| {
            if points.is_empty() {
                None
            } else {
                Some(points[rng.gen_range(0..points.len())].clone())
            }
        })
    }

    /// Uniform dyadic points on the boundary of a box (pick a face, then
    /// dyadic coordinates at resolution `2^-q` on the remaining axes).
    pub fn box_boundary(b: Interval, q: u32) -> Self {
        Self::from_fn("box-boundary", move |rng| {
            let m = b.dim();
            let face_axis = rng.gen_range(0..m);
            let upper: bool = rng.gen();
            let mut coords = Vec::with_capacity(m);
            for j in 0..m {
                if j == face_axis {
                    coords.push(if upper { b.hi()[j].clone() } else { b.lo()[j].clone() });
                } else {
                    coords.push(random_dyadic_in(rng, &b.lo()[j], &b.hi()[j], q));
                }
            }
            Some(Point(coords))
        })
    }

    pub fn next(&self, rng: &mut ChaCha8Rng) -> Option<Point> {
        (self.gen)(rng)
    }
}

/// Uniform dyadic sample in `[a, b]` on the `2^-q` grid (exact endpoints
/// arithmetic, so the result is always a dyadic point of the interval).
pub fn random_dyadic_in(
    rng: &mut ChaCha8Rng,
    a: &DyadicScalar,
    b: &DyadicScalar,
    q: u32,
) -> DyadicScalar {
    let steps = 1u64 << q;
    let k = rng.gen_range(0..=steps);
    let frac = DyadicScalar::new(num_bigint::BigInt::from(k), -(q as i64));
    a + &(&(b - a) * &frac)
}

/// Builds a δ-fine Z-tagged partition IN `j` (not of `j`): greedily places
/// non-overlapping boxes around sampled tags, each inside `B(t, δ(t)) ∩ j`.
/// HK discipline additionally forces the tag into its box. Deterministic
/// given the seed; may return fewer than `max_cells` cells when placement
/// fails.
pub fn sample_z_tagged_partition(
    z: &PointSampler,
    delta: &Gauge,
    j: &Interval,
    kind: PartitionKind,
    max_cells: usize,
    seed: u64,
) -> Result<TaggedPartition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells: Vec<TaggedCell> = Vec::new();
    let attempts = max_cells.saturating_mul(6).max(8);
    'outer: for _ in 0..attempts {
        if cells.len() >= max_cells {
            break;
        }
        let Some(tag) = z.next(&mut rng) else { break };
        if tag.dim() != j.dim() {
            return Err(Error::DimensionMismatch { expected: j.dim(), got: tag.dim() });
        }
        let d = delta.value_at(&tag)?;
        // strictly inside the open ball
        let Some(radius0) = DyadicScalar::from_f64(d * 0.5) else { continue };
        let mut radius = radius0;
        'shrink: for _ in 0..6 {
            let offset = match kind {
                PartitionKind::HenstockKurzweil => DyadicScalar::zero(),
                // McShane freedom: the box may sit anywhere in the ball
                PartitionKind::McShane => {
                    let r = radius.clone();
                    random_dyadic_in(&mut rng, &-&r, &r, 8)
                }
            };
            let mut lo = Vec::with_capacity(j.dim());
            let mut hi = Vec::with_capacity(j.dim());
            for axis in 0..j.dim() {
                let c = &tag.0[axis] + &offset;
                let a = (&c - &radius).max(j.lo()[axis].clone());
                let b = (&c + &radius).min(j.hi()[axis].clone());
                lo.push(a);
                hi.push(b);
            }
            let Ok(cell) = Interval::new(lo, hi) else {
                radius = radius.half();
                continue 'shrink;
            };
            if kind == PartitionKind::HenstockKurzweil && !cell.contains_point(&tag, false) {
                radius = radius.half();
                continue 'shrink;
            }
            if !is_fine(&tag, &cell, d) {
                radius = radius.half();
                continue 'shrink;
            }
            if cells.iter().any(|tc| tc.cell.overlaps(&cell)) {
                // shrink toward the tag and retry placement
                radius = radius.half();
                if radius.is_zero() {
                    continue 'outer;
                }
                continue 'shrink;
            }
            debug_assert!(j.contains_interval(&cell));
            cells.push(TaggedCell { tag: tag.clone(), cell });
            continue 'outer;
        }
    }
    Ok(TaggedPartition { kind, cells, of: None })
}

/// `Σ f(tag) · |cell|`, measures converted to float once per cell,
/// compensated summation per component.
pub fn riemann_sum<F>(f: &F, pi: &TaggedPartition, dim_out: usize) -> Result<VectorValue>
where
    F: Fn(&Point) -> Result<Vec<f64>>,
{
    let mut acc = KahanSum::new(dim_out);
    for tc in &pi.cells {
        let v = f(&tc.tag)?;
        if v.len() != dim_out {
            return Err(Error::DimensionMismatch { expected: dim_out, got: v.len() });
        }
        acc.add_scaled(&v, tc.cell.measure().to_f64());
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv1(lo: &str, hi: &str) -> Interval {
        Interval::new(vec![lo.parse().unwrap()], vec![hi.parse().unwrap()]).unwrap()
    }

    fn unit_square() -> Interval {
        Interval::new(
            vec![DyadicScalar::zero(), DyadicScalar::zero()],
            vec![DyadicScalar::one(), DyadicScalar::one()],
        )
        .unwrap()
    }

    #[test]
    fn cousin_single_cell_when_gauge_is_loose() {
        let j = iv1("0", "1");
        let pi = cousin_partition(&j, &Gauge::constant(1.0), PartitionKind::McShane, 10).unwrap();
        assert_eq!(pi.cells.len(), 1);
        assert_eq!(pi.cells[0].tag, Point(vec!["0.5".parse().unwrap()]));
        pi.verify(Some(&Gauge::constant(1.0))).unwrap();
    }

    #[test]
    fn cousin_level_matches_fineness_rule() {
        // delta = 0.3 on the unit square: side-1 radius 0.5 is too big,
        // side-1/2 radius 0.25 < 0.3 is accepted, so 4 cells of side 1/2.
        let j = unit_square();
        let g = Gauge::constant(0.3);
        let pi = cousin_partition(&j, &g, PartitionKind::HenstockKurzweil, 20).unwrap();
        assert_eq!(pi.cells.len(), 4);
        for tc in &pi.cells {
            assert_eq!(tc.cell.max_side(), "0.5".parse().unwrap());
        }
        pi.verify(Some(&g)).unwrap();

        // tighter gauge drops to side 1/4 (radius 1/8 < 0.2)
        let g2 = Gauge::constant(0.2);
        let pi2 = cousin_partition(&j, &g2, PartitionKind::HenstockKurzweil, 20).unwrap();
        assert_eq!(pi2.cells.len(), 16);
        pi2.verify(Some(&g2)).unwrap();
    }

    #[test]
    fn cousin_with_shrinking_gauge_terminates_under_cap() {
        // delta(t) = max(t/2, 2^-20): cells shrink geometrically toward 0
        let j = iv1("0", "1");
        let g = Gauge::from_fn("t/2 floored", |t| (t[0] / 2.0).max(2f64.powi(-20)));
        let pi = cousin_partition(&j, &g, PartitionKind::HenstockKurzweil, 25).unwrap();
        pi.verify(Some(&g)).unwrap();
        // cells accumulate toward the origin: the smallest cell is tiny
        let min_side = pi.cells.iter().map(|c| c.cell.max_side()).min().unwrap();
        assert!(min_side.to_f64() < 1e-4);
        // refining the gauge never coarsens the partition
        let g_finer = Gauge::from_fn("t/4 floored", |t| (t[0] / 4.0).max(2f64.powi(-20)));
        let pi_finer = cousin_partition(&j, &g_finer, PartitionKind::HenstockKurzweil, 25).unwrap();
        assert!(pi_finer.cells.len() >= pi.cells.len());
    }

    #[test]
    fn cousin_depth_cap_is_a_reported_error() {
        let j = iv1("0", "1");
        let g = Gauge::constant(1e-12);
        let err = cousin_partition(&j, &g, PartitionKind::McShane, 8).unwrap_err();
        assert!(matches!(err, Error::DepthExceeded { .. }));
    }

    #[test]
    fn cousin_is_deterministic() {
        let j = unit_square();
        let g = Gauge::from_fn("radial", |t| 0.05 + 0.2 * (t[0] + t[1]));
        let a = cousin_partition(&j, &g, PartitionKind::McShane, 30).unwrap();
        let b = cousin_partition(&j, &g, PartitionKind::McShane, 30).unwrap();
        assert_eq!(a.cells.len(), b.cells.len());
        for (x, y) in a.cells.iter().zip(&b.cells) {
            assert_eq!(x.cell, y.cell);
            assert_eq!(x.tag, y.tag);
        }
    }

    #[test]
    fn sampler_hk_cell_at_an_endpoint() {
        let j = iv1("0", "1");
        let z = PointSampler::finite(vec![Point(vec![DyadicScalar::zero()])]);
        let g = Gauge::constant(0.1);
        let pi =
            sample_z_tagged_partition(&z, &g, &j, PartitionKind::HenstockKurzweil, 1, 7).unwrap();
        assert_eq!(pi.cells.len(), 1);
        let cell = &pi.cells[0].cell;
        assert_eq!(cell.lo()[0], DyadicScalar::zero());
        assert!(cell.hi()[0].to_f64() < 0.1);
        pi.verify(Some(&g)).unwrap();
    }

    #[test]
    fn sampler_boundary_collar_measure_bound() {
        let j = unit_square();
        let eps = 2f64.powi(-4);
        let z = PointSampler::box_boundary(unit_square(), 10);
        let g = Gauge::constant(eps);
        let pi = sample_z_tagged_partition(&z, &g, &j, PartitionKind::McShane, 64, 3).unwrap();
        pi.verify(Some(&g)).unwrap();
        assert!(!pi.cells.is_empty());
        // every cell is within max-norm eps of the boundary, so the total
        // measure is at most the boundary collar measure
        let bound = 8.0 * eps * (1.0 + 2.0 * eps);
        assert!(pi.total_measure().to_f64() <= bound + 1e-12);
    }

    #[test]
    fn sampler_empty_source_gives_empty_partition() {
        let j = iv1("0", "1");
        let pi = sample_z_tagged_partition(
            &PointSampler::empty(),
            &Gauge::constant(0.5),
            &j,
            PartitionKind::McShane,
            8,
            1,
        )
        .unwrap();
        assert!(pi.cells.is_empty());
    }

    #[test]
    fn sampler_is_deterministic_per_seed() {
        let j = unit_square();
        let z = PointSampler::box_boundary(unit_square(), 8);
        let g = Gauge::constant(0.05);
        let a = sample_z_tagged_partition(&z, &g, &j, PartitionKind::McShane, 16, 11).unwrap();
        let b = sample_z_tagged_partition(&z, &g, &j, PartitionKind::McShane, 16, 11).unwrap();
        assert_eq!(a.cells.len(), b.cells.len());
        for (x, y) in a.cells.iter().zip(&b.cells) {
            assert_eq!(x.cell, y.cell);
        }
    }

    #[test]
    fn riemann_sum_examples() {
        let j = iv1("0", "1");
        let g = Gauge::constant(0.01);
        let pi = cousin_partition(&j, &g, PartitionKind::McShane, 30).unwrap();
        // constant integrand
        let c = riemann_sum(&|_t: &Point| Ok(vec![3.0]), &pi, 1).unwrap();
        assert!((c.0[0] - 3.0).abs() < 1e-12);
        // linear integrand with center tags is exact up to rounding
        let lin = riemann_sum(&|t: &Point| Ok(vec![t.0[0].to_f64()]), &pi, 1).unwrap();
        assert!((lin.0[0] - 0.5).abs() < 1e-12);
        // vector-valued, componentwise
        let v = riemann_sum(&|t: &Point| Ok(vec![1.0, t.0[0].to_f64()]), &pi, 2).unwrap();
        assert!((v.0[0] - 1.0).abs() < 1e-12);
        assert!((v.0[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn riemann_sum_is_linear_and_additive() {
        let j = unit_square();
        let g = Gauge::constant(0.07);
        let pi = cousin_partition(&j, &g, PartitionKind::McShane, 30).unwrap();
        let f = |t: &Point| -> Result<Vec<f64>> {
            let x = t.to_f64s();
            Ok(vec![x[0] * x[0] + x[1]])
        };
        let h = |t: &Point| -> Result<Vec<f64>> {
            let x = t.to_f64s();
            Ok(vec![(x[0] - x[1]).sin()])
        };
        let sf = riemann_sum(&f, &pi, 1).unwrap().0[0];
        let sh = riemann_sum(&h, &pi, 1).unwrap().0[0];
        let combo = riemann_sum(
            &|t: &Point| Ok(vec![2.0 * f(t)?[0] - 3.0 * h(t)?[0]]),
            &pi,
            1,
        )
        .unwrap()
        .0[0];
        assert!((combo - (2.0 * sf - 3.0 * sh)).abs() < 1e-10);

        // additivity under concatenation of partitions of the two halves
        let kids = j.bisect();
        let mut total = 0.0;
        for k in &kids {
            let sub = cousin_partition(k, &g, PartitionKind::McShane, 30).unwrap();
            total += riemann_sum(&f, &sub, 1).unwrap().0[0];
        }
        let whole = cousin_partition(&j, &g, PartitionKind::McShane, 30).unwrap();
        let all = riemann_sum(&f, &whole, 1).unwrap().0[0];
        assert!((total - all).abs() < 1e-9);
    }
}
