//! Gauges: strictly positive functions `δ` controlling admissible cell
//! sizes through open max-norm balls `B(t, δ(t))`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::Point;

enum Node {
    Const(f64),
    Func { label: String, f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> },
    Min(Gauge, Gauge),
    /// `max(scale · dist(t, point)^power, floor)`; max-norm distance.
    DistTo { point: Vec<f64>, scale: f64, power: f64, floor: f64 },
}

/// A gauge `δ : Z → (0, ∞)`. Evaluating a non-positive value is a hard
/// error, never a silent clamp.
#[derive(Clone)]
pub struct Gauge {
    node: Arc<Node>,
}

/// Floor used by gauges that would otherwise vanish at their own center.
pub const DEFAULT_GAUGE_FLOOR: f64 = 9.094947017729282e-13; // 2^-40

impl Gauge {
    pub fn constant(v: f64) -> Self {
        Gauge { node: Arc::new(Node::Const(v)) }
    }

    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Gauge { node: Arc::new(Node::Func { label: label.into(), f: Arc::new(f) }) }
    }

    /// Pointwise minimum — the standard way gauges compose.
    pub fn min(a: Gauge, b: Gauge) -> Self {
        Gauge { node: Arc::new(Node::Min(a, b)) }
    }

    pub fn dist_to(point: Vec<f64>, scale: f64) -> Self {
        Self::dist_to_with(point, scale, 1.0, DEFAULT_GAUGE_FLOOR)
    }

    pub fn dist_to_with(point: Vec<f64>, scale: f64, power: f64, floor: f64) -> Self {
        Gauge { node: Arc::new(Node::DistTo { point, scale, power, floor }) }
    }

    fn raw(&self, t: &[f64]) -> f64 {
        match &*self.node {
            Node::Const(v) => *v,
            Node::Func { f, .. } => f(t),
            Node::Min(a, b) => a.raw(t).min(b.raw(t)),
            Node::DistTo { point, scale, power, floor } => {
                let dist = point
                    .iter()
                    .zip(t)
                    .fold(0.0f64, |m, (p, x)| m.max((p - x).abs()));
                (scale * dist.powf(*power)).max(*floor)
            }
        }
    }

    pub fn value_at_f64(&self, t: &[f64]) -> Result<f64> {
        let v = self.raw(t);
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonPositiveGauge { at: t.to_vec(), value: v })
        }
    }

    pub fn value_at(&self, t: &Point) -> Result<f64> {
        self.value_at_f64(&t.to_f64s())
    }
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.node {
            Node::Const(v) => write!(f, "const:{v}"),
            Node::Func { label, .. } => write!(f, "fn:{label}"),
            Node::Min(a, b) => write!(f, "min({a:?},{b:?})"),
            Node::DistTo { point, scale, power, floor } => {
                write!(f, "dist-to:{point:?}*{scale}^{power} (floor {floor})")
            }
        }
    }
}
