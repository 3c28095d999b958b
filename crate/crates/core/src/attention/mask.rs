use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Mask;

/// Encoder self-attention span.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Full,
    /// Total band width in tokens; a query sees `floor(w / 2)` keys on each side.
    Local(usize),
}

impl Window {
    pub fn mask(self, n: usize) -> Result<Mask> {
        match self {
            Window::Full => Ok(Mask::full(n, n)),
            Window::Local(w) => build_local_mask(n, w),
        }
    }

    pub fn half_width(self) -> Option<usize> {
        match self {
            Window::Full => None,
            Window::Local(w) => Some(w / 2),
        }
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Window::Full => write!(f, "full"),
            Window::Local(w) => write!(f, "{w}"),
        }
    }
}

impl std::str::FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("full") {
            return Ok(Window::Full);
        }
        let w: usize = s
            .parse()
            .map_err(|_| Error::Input(format!("window must be `full` or a width, got `{s}`")))?;
        if w == 0 {
            return Err(Error::InvalidWindow);
        }
        Ok(Window::Local(w))
    }
}

/// Symmetric band mask: `mask[i][j]` iff `|i − j| ≤ floor(w / 2)`.
pub fn build_local_mask(n: usize, w: usize) -> Result<Mask> {
    if w == 0 {
        return Err(Error::InvalidWindow);
    }
    if n == 0 {
        return Err(Error::Domain("attention needs at least one position".into()));
    }
    let half = w / 2;
    Ok(Mask::from_fn(n, n, |i, j| i.abs_diff(j) <= half))
}
