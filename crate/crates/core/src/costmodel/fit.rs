use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::costmodel::coefficients::{CostCoefficients, ModelKind};
use crate::costmodel::memory::{hier_basis, transformer_basis, HierWorkload, Workload};
use crate::error::{Error, Result};

/// One measured (or timed) training configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sample {
    Transformer {
        #[serde(flatten)]
        workload: Workload,
        value: f64,
    },
    Hier {
        #[serde(flatten)]
        workload: HierWorkload,
        value: f64,
    },
}

impl Sample {
    pub fn value(&self) -> f64 {
        match self {
            Sample::Transformer { value, .. } | Sample::Hier { value, .. } => *value,
        }
    }

    fn basis(&self, kind: ModelKind) -> Result<Vec<f64>> {
        match (self, kind) {
            (Sample::Hier { workload, .. }, ModelKind::HierRnn) => Ok(hier_basis(workload)),
            (Sample::Transformer { workload, .. }, k) => transformer_basis(k, workload),
            (Sample::Hier { .. }, k) => Err(Error::Domain(format!(
                "{k:?} fit needs token-length samples"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub coefficients: CostCoefficients,
    pub rmse: f64,
    pub r2: f64,
}

/// Evaluates `coeffs` on a sample's configuration.
pub fn predict(coeffs: &CostCoefficients, sample: &Sample) -> Result<f64> {
    let basis = sample.basis(coeffs.kind)?;
    Ok(basis.iter().zip(&coeffs.values).map(|(x, c)| x * c).sum())
}

/// Ordinary least squares over the basis of `kind`.
///
/// Columns are scaled to unit norm before solving so that terms of very
/// different magnitude (`1` next to `N²`) stay well conditioned.
pub fn fit_coefficients(samples: &[Sample], kind: ModelKind) -> Result<Fit> {
    let p = kind.num_terms();
    if samples.len() < p {
        return Err(Error::SingularFit(format!(
            "{} samples cannot determine {p} coefficients",
            samples.len()
        )));
    }
    let rows: Vec<Vec<f64>> = samples.iter().map(|s| s.basis(kind)).collect::<Result<_>>()?;
    let y = DVector::from_iterator(samples.len(), samples.iter().map(Sample::value));
    let mut a = DMatrix::from_fn(samples.len(), p, |i, j| rows[i][j]);
    let mut scale = vec![1.0; p];
    for (j, s) in scale.iter_mut().enumerate() {
        let norm = a.column(j).norm();
        if norm == 0.0 {
            return Err(Error::SingularFit(format!(
                "term `{}` is zero for every sample",
                kind.term_names()[j]
            )));
        }
        *s = norm;
        a.column_mut(j).scale_mut(1.0 / norm);
    }
    let svd = a.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    let min_sv = svd.singular_values.min();
    if min_sv <= max_sv * 1e-12 {
        return Err(Error::SingularFit(
            "design matrix is rank deficient".into(),
        ));
    }
    let solved = svd
        .solve(&y, max_sv * 1e-14)
        .map_err(|e| Error::SingularFit(e.to_string()))?;
    let values: Vec<f64> = solved.iter().zip(&scale).map(|(v, s)| v / s).collect();

    let residual = &a * &solved - &y;
    let sse = residual.norm_squared();
    let rmse = (sse / samples.len() as f64).sqrt();
    let mean = y.mean();
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let r2 = if sst == 0.0 { 1.0 } else { 1.0 - sse / sst };

    Ok(Fit {
        coefficients: CostCoefficients { kind, values },
        rmse,
        r2,
    })
}
