use serde::{Deserialize, Serialize};

use crate::attention::Window;
use crate::costmodel::coefficients::CoefficientSet;
use crate::costmodel::memory::{bart_memory, lobart_memory};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub n: usize,
    pub window: Window,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub n: usize,
    pub window: Window,
    pub total_gib: f64,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Advice {
    pub budget_gib: f64,
    pub m: usize,
    pub b: usize,
    /// Every candidate, in input order.
    pub points: Vec<OperatingPoint>,
    /// Indices into `points` that fit the budget.
    pub feasible: Vec<usize>,
}

/// Annotates each `(N, W)` candidate against a memory budget.
///
/// Full windows are costed with the BART model, local windows with LoBART.
pub fn advise_operating_point(
    budget_gib: f64,
    m: usize,
    b: usize,
    candidates: &[Candidate],
    coeffs: &CoefficientSet,
) -> Result<Advice> {
    if candidates.is_empty() {
        return Err(Error::Domain("no candidate operating points".into()));
    }
    let mut points = Vec::with_capacity(candidates.len());
    let mut feasible = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let total = match c.window {
            Window::Full => bart_memory(c.n, m, b, &coeffs.bart)?.total,
            Window::Local(w) => lobart_memory(c.n, m, w, b, &coeffs.lobart)?.total,
        };
        let ok = total <= budget_gib;
        if ok {
            feasible.push(i);
        }
        points.push(OperatingPoint {
            n: c.n,
            window: c.window,
            total_gib: total,
            feasible: ok,
        });
    }
    Ok(Advice {
        budget_gib,
        m,
        b,
        points,
        feasible,
    })
}
