//! Finite-dimensional value space for integrands (the stand-in for a Banach
//! space target): `d` float components plus a norm chosen once per run.

use serde::{Deserialize, Serialize};

/// Which norm the run uses on value vectors.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    Max,
    Euclidean,
}

impl Norm {
    pub fn of(&self, v: &[f64]) -> f64 {
        match self {
            Norm::Max => v.iter().fold(0.0, |m, c| m.max(c.abs())),
            Norm::Euclidean => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct VectorValue(pub Vec<f64>);

impl VectorValue {
    pub fn zeros(dim: usize) -> Self {
        VectorValue(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self, norm: Norm) -> f64 {
        norm.of(&self.0)
    }

    pub fn add(&self, other: &VectorValue) -> VectorValue {
        VectorValue(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &VectorValue) -> VectorValue {
        VectorValue(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> VectorValue {
        VectorValue(self.0.iter().map(|a| a * s).collect())
    }

    pub fn dist(&self, other: &VectorValue, norm: Norm) -> f64 {
        self.sub(other).norm(norm)
    }
}

/// Compensated (Kahan) accumulator, one compensation term per component.
/// Riemann sums over many cells should not let float error masquerade as
/// gauge error.
#[derive(Clone, Debug)]
pub struct KahanSum {
    sum: Vec<f64>,
    comp: Vec<f64>,
}

impl KahanSum {
    pub fn new(dim: usize) -> Self {
        KahanSum { sum: vec![0.0; dim], comp: vec![0.0; dim] }
    }

    pub fn add(&mut self, v: &[f64]) {
        for (j, &x) in v.iter().enumerate() {
            let y = x - self.comp[j];
            let t = self.sum[j] + y;
            self.comp[j] = (t - self.sum[j]) - y;
            self.sum[j] = t;
        }
    }

    pub fn add_scaled(&mut self, v: &[f64], w: f64) {
        for (j, &x) in v.iter().enumerate() {
            let y = x * w - self.comp[j];
            let t = self.sum[j] + y;
            self.comp[j] = (t - self.sum[j]) - y;
            self.sum[j] = t;
        }
    }

    pub fn value(&self) -> VectorValue {
        VectorValue(self.sum.clone())
    }
}
