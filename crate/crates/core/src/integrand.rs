//! Integrands: deterministic evaluators `ℝ^m → ℝ^d` attached to a domain
//! region, optionally carrying a closed-form point primitive (for oracle
//! corner sums) and hints about singular points that the integrator's gauge
//! schedule should pinch.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::region::{Containment, Region};

/// A declared singular (or exceptional) point of an integrand, with the
/// gauge shape to use near it. `δ(t) = clamp(coeff · dist(t)^power, floor,
/// ambient scale)` in the refinement schedule.
#[derive(Clone, Debug)]
pub struct SingularityHint {
    pub location: Point,
    /// Power of the distance law; 1 is the default linear pinch, higher
    /// powers resolve stronger singularities.
    pub power: f64,
    pub coeff: f64,
    pub floor: f64,
    /// Oscillatory singularities additionally switch the in-cell tag
    /// strategy to sign-change seeking within this max-norm radius.
    pub zero_tag_radius: f64,
}

impl SingularityHint {
    pub fn point(location: Point) -> Self {
        SingularityHint {
            location,
            power: 1.0,
            coeff: 0.25,
            floor: 2f64.powi(-40),
            zero_tag_radius: 0.0,
        }
    }
}

type Evaluator = Arc<dyn Fn(&[f64]) -> std::result::Result<Vec<f64>, String> + Send + Sync>;
type PointPrimitive = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// An integrand `f : G → ℝ^d`.
#[derive(Clone)]
pub struct Integrand {
    pub name: String,
    pub dim_in: usize,
    pub dim_out: usize,
    pub domain: Region,
    eval: Evaluator,
    /// Closed-form point primitive Φ with `F([a,b]) = alternating corner
    /// sum of Φ`, when one exists.
    pub point_primitive: Option<PointPrimitive>,
    pub singularities: Vec<SingularityHint>,
    /// When set, the integrator sharpens gauges toward the boundary of this
    /// region (used by zero-extensions, which are discontinuous across it).
    pub sharpen_boundary_of: Option<Region>,
}

impl Integrand {
    pub fn new<F>(name: impl Into<String>, domain: Region, dim_out: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> std::result::Result<Vec<f64>, String> + Send + Sync + 'static,
    {
        Integrand {
            name: name.into(),
            dim_in: domain.dim(),
            dim_out,
            domain,
            eval: Arc::new(f),
            point_primitive: None,
            singularities: Vec::new(),
            sharpen_boundary_of: None,
        }
    }

    /// Scalar integrand from a plain closure.
    pub fn scalar<F>(name: impl Into<String>, domain: Region, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(name, domain, 1, move |t| Ok(vec![f(t)]))
    }

    pub fn with_point_primitive<P>(mut self, phi: P) -> Self
    where
        P: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.point_primitive = Some(Arc::new(phi));
        self
    }

    pub fn with_singularity(mut self, hint: SingularityHint) -> Self {
        self.singularities.push(hint);
        self
    }

    pub fn with_boundary_sharpening(mut self, region: Region) -> Self {
        self.sharpen_boundary_of = Some(region);
        self
    }

    pub fn eval_f64(&self, t: &[f64]) -> Result<Vec<f64>> {
        if t.len() != self.dim_in {
            return Err(Error::DimensionMismatch { expected: self.dim_in, got: t.len() });
        }
        let v = (self.eval)(t).map_err(|reason| Error::Evaluation { at: t.to_vec(), reason })?;
        if v.len() != self.dim_out {
            return Err(Error::Evaluation {
                at: t.to_vec(),
                reason: format!("evaluator returned dimension {}, declared {}", v.len(), self.dim_out),
            });
        }
        Ok(v)
    }

    pub fn eval(&self, t: &Point) -> Result<Vec<f64>> {
        self.eval_f64(&t.to_f64s())
    }

    /// The same integrand with its values replaced on a finite point set
    /// (measure-zero modification). The overridden points are declared as
    /// exceptional so gauge schedules pinch them.
    pub fn with_point_overrides(&self, overrides: Vec<(Point, Vec<f64>)>) -> Integrand {
        let base = self.eval.clone();
        let table: Vec<(Vec<f64>, Vec<f64>)> = overrides
            .iter()
            .map(|(p, v)| (p.to_f64s(), v.clone()))
            .collect();
        let mut out = Integrand {
            name: format!("{}+overrides", self.name),
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            domain: self.domain.clone(),
            eval: Arc::new(move |t: &[f64]| {
                for (p, v) in &table {
                    if p.iter().zip(t).all(|(a, b)| a == b) {
                        return Ok(v.clone());
                    }
                }
                base(t)
            }),
            point_primitive: self.point_primitive.clone(),
            singularities: self.singularities.clone(),
            sharpen_boundary_of: self.sharpen_boundary_of.clone(),
        };
        for (p, _) in overrides {
            out.singularities.push(SingularityHint {
                coeff: 0.5,
                floor: 2f64.powi(-44),
                ..SingularityHint::point(p)
            });
        }
        out
    }
}

/// The zero-extension `h = f` on `G`, `0` off `G`, with membership decided
/// by the domain's set oracle. Boundary points where membership is
/// undecidable surface as evaluation errors rather than guesses. The result
/// lives on all of `ℝ^m` and carries a boundary-sharpening hint for the
/// original domain.
pub fn extension_h(f: &Integrand) -> Integrand {
    let region = f.domain.clone();
    let inner = f.clone();
    let zero = vec![0.0; f.dim_out];
    let mut h = Integrand::new(
        format!("zero-extension of {}", f.name),
        Region::full_space(f.dim_in),
        f.dim_out,
        move |t: &[f64]| {
            let p = Point::from_f64s(t).ok_or_else(|| "non-finite point".to_string())?;
            match region.contains(&p).map_err(|e| e.to_string())? {
                Containment::Inside => inner.eval_f64(t).map_err(|e| e.to_string()),
                Containment::Outside => Ok(zero.clone()),
                Containment::Boundary => Err(format!(
                    "membership of {t:?} in {} is undecidable",
                    region.name()
                )),
            }
        },
    );
    h.singularities = f.singularities.clone();
    h.sharpen_boundary_of = Some(f.domain.clone());
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicScalar;
    use crate::geom::Interval;

    fn open01() -> Region {
        Region::open_box(
            Interval::new(vec![DyadicScalar::zero()], vec![DyadicScalar::one()]).unwrap(),
        )
    }

    #[test]
    fn extension_examples() {
        let f = Integrand::scalar("one", open01(), |_| 1.0);
        let h = extension_h(&f);
        assert_eq!(h.eval_f64(&[0.5]).unwrap(), vec![1.0]);
        assert_eq!(h.eval_f64(&[-3.0]).unwrap(), vec![0.0]);
        // open region: the endpoint is outside the set, so h vanishes there
        assert_eq!(h.eval_f64(&[0.0]).unwrap(), vec![0.0]);

        let closed = Region::closed_box(
            Interval::new(vec![DyadicScalar::zero()], vec![DyadicScalar::one()]).unwrap(),
        );
        let g = Integrand::scalar("one", closed, |_| 1.0);
        let hg = extension_h(&g);
        // closed region: 0 is a member, h(0) = f(0)
        assert_eq!(hg.eval_f64(&[0.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn point_overrides_change_only_the_declared_points() {
        let f = Integrand::scalar("x", open01(), |t| t[0]);
        let p = Point(vec!["0.5".parse().unwrap()]);
        let g = f.with_point_overrides(vec![(p, vec![100.0])]);
        assert_eq!(g.eval_f64(&[0.5]).unwrap(), vec![100.0]);
        assert_eq!(g.eval_f64(&[0.25]).unwrap(), vec![0.25]);
        assert_eq!(g.singularities.len(), 1);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let f = Integrand::scalar("x", open01(), |t| t[0]);
        assert!(f.eval_f64(&[0.5, 0.5]).is_err());
    }
}
