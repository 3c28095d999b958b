use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bundled defaults from the fitted V100 memory profiles.
pub const DEFAULT_COEFFICIENTS: &str = include_str!("../../data/coefficients.txt");

/// Which closed-form basis a coefficient vector belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Full self-attention: `1, BM, BN, BMN, BM², BN²`.
    Bart,
    /// Local self-attention: `1, BM, BN, BMN, BM², BNW`.
    Lobart,
    /// Hierarchical RNN: `1, B·N1, B·N1·N2`.
    HierRnn,
    /// Timing basis for full attention: `1, BN, BN²`.
    TimeQuadratic,
    /// Timing basis for local attention: `1, BN, BNW`.
    TimeLinear,
}

impl ModelKind {
    pub fn term_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::Bart => &["constant", "M", "N", "MN", "M^2", "N^2"],
            ModelKind::Lobart => &["constant", "M", "N", "MN", "M^2", "NW"],
            ModelKind::HierRnn => &["constant", "N1", "N1*N2"],
            ModelKind::TimeQuadratic => &["constant", "N", "N^2"],
            ModelKind::TimeLinear => &["constant", "N", "NW"],
        }
    }

    pub fn num_terms(self) -> usize {
        self.term_names().len()
    }

    fn file_prefix(self) -> Option<&'static str> {
        match self {
            ModelKind::Bart => Some("c_b_"),
            ModelKind::Lobart => Some("c_l_"),
            ModelKind::HierRnn => Some("hier_c"),
            _ => None,
        }
    }

    /// Name of coefficient `i` (0-based) in the coefficient file.
    fn file_key(self, i: usize) -> Option<String> {
        let prefix = self.file_prefix()?;
        Some(match self {
            ModelKind::HierRnn => format!("{prefix}{i}"),
            _ => format!("{prefix}{}", i + 1),
        })
    }
}

/// Fitted constants for one model kind, constant term first, in GiB.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostCoefficients {
    pub kind: ModelKind,
    pub values: Vec<f64>,
}

impl CostCoefficients {
    pub fn new(kind: ModelKind, values: Vec<f64>) -> Result<Self> {
        if values.len() != kind.num_terms() {
            return Err(Error::Domain(format!(
                "{kind:?} needs {} coefficients, got {}",
                kind.num_terms(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain("coefficients must be finite and non-negative".into()));
        }
        Ok(CostCoefficients { kind, values })
    }

    pub fn bart_default() -> Self {
        CoefficientSet::default().bart
    }

    pub fn lobart_default() -> Self {
        CoefficientSet::default().lobart
    }

    pub fn hier_default() -> Self {
        CoefficientSet::default().hier_rnn
    }

    pub fn constant(&self) -> f64 {
        self.values[0]
    }

    /// The coefficient multiplying the dominant attention term (`N²` or `NW`).
    pub fn attention_term(&self) -> f64 {
        *self.values.last().expect("non-empty")
    }
}

/// Coefficients for every memory model, as carried by a coefficient file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub bart: CostCoefficients,
    pub lobart: CostCoefficients,
    pub hier_rnn: CostCoefficients,
}

impl Default for CoefficientSet {
    fn default() -> Self {
        Self::parse_complete(DEFAULT_COEFFICIENTS).expect("bundled coefficient file is valid")
    }
}

impl CoefficientSet {
    /// Parses `name = value` lines over the bundled defaults.
    ///
    /// Blank lines and `#` comments are ignored. Names not present keep their
    /// default; unknown names are an error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut set = Self::default();
        set.apply(text)?;
        Ok(set)
    }

    fn parse_complete(text: &str) -> Result<Self> {
        let mut set = CoefficientSet {
            bart: CostCoefficients {
                kind: ModelKind::Bart,
                values: vec![f64::NAN; 6],
            },
            lobart: CostCoefficients {
                kind: ModelKind::Lobart,
                values: vec![f64::NAN; 6],
            },
            hier_rnn: CostCoefficients {
                kind: ModelKind::HierRnn,
                values: vec![f64::NAN; 3],
            },
        };
        set.apply(text)?;
        for c in [&set.bart, &set.lobart, &set.hier_rnn] {
            if c.values.iter().any(|v| v.is_nan()) {
                return Err(Error::Input(format!("incomplete {:?} coefficients", c.kind)));
            }
        }
        Ok(set)
    }

    fn apply(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, value) = line.split_once('=').ok_or_else(|| {
                Error::Input(format!("line {}: expected `name = value`", lineno + 1))
            })?;
            let name = name.trim();
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Input(format!("line {}: `{}` is not a number", lineno + 1, value.trim()))
            })?;
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Domain(format!(
                    "line {}: coefficient {name} must be finite and non-negative",
                    lineno + 1
                )));
            }
            let slot = self.slot(name).ok_or_else(|| {
                Error::Input(format!("line {}: unknown coefficient `{name}`", lineno + 1))
            })?;
            *slot = value;
        }
        Ok(())
    }

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        for c in [&mut self.bart, &mut self.lobart, &mut self.hier_rnn] {
            for i in 0..c.values.len() {
                if c.kind.file_key(i).as_deref() == Some(name) {
                    return Some(&mut c.values[i]);
                }
            }
        }
        None
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, kind: ModelKind) -> Option<&CostCoefficients> {
        match kind {
            ModelKind::Bart => Some(&self.bart),
            ModelKind::Lobart => Some(&self.lobart),
            ModelKind::HierRnn => Some(&self.hier_rnn),
            _ => None,
        }
    }

    pub fn set(&mut self, coeffs: CostCoefficients) -> Result<()> {
        let slot = match coeffs.kind {
            ModelKind::Bart => &mut self.bart,
            ModelKind::Lobart => &mut self.lobart,
            ModelKind::HierRnn => &mut self.hier_rnn,
            k => return Err(Error::Domain(format!("{k:?} has no coefficient-file entry"))),
        };
        *slot = coeffs;
        Ok(())
    }

    /// Renders the set in coefficient-file syntax.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for c in [&self.bart, &self.lobart, &self.hier_rnn] {
            for (i, v) in c.values.iter().enumerate() {
                let key = c.kind.file_key(i).expect("file-backed kind");
                let _ = writeln!(out, "{key} = {v:e}");
            }
            out.push('\n');
        }
        out
    }
}
