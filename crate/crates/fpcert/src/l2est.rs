//! Betti-growth estimation along cyclic covers, and the deficiency/rank
//! bounds on the first L2-Betti number.
//!
//! The growth sequence `b1(K_n)/n` is an estimator only: the cyclic-cover
//! chain intersects in the kernel of the chosen map, so no convergence
//! claim is made and the report is labeled accordingly. Ratios are exact
//! rationals; no floating point appears in any tested value.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::covers::{betti_of_cover, CoverError};
use crate::presentations::FinitePresentation;
use crate::words::GenId;

pub const GROWTH_LABEL: &str = "cyclic-cover Betti growth";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthRow {
    pub n: usize,
    pub b1: usize,
    pub torsion: Vec<BigInt>,
    pub ratio: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trend {
    pub last_ratio: BigRational,
    pub nonincreasing: bool,
    pub nondecreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiGrowthReport {
    pub label: String,
    pub rows: Vec<GrowthRow>,
    pub trend: Trend,
}

/// Rows `(n, b1(K_n), torsion, b1(K_n)/n)` for `n = 1..=n_max`.
pub fn betti_growth(
    p: &FinitePresentation,
    t: GenId,
    n_max: usize,
) -> Result<BettiGrowthReport, CoverError> {
    if n_max < 1 {
        return Err(CoverError::BadDegree(n_max));
    }
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let ab = betti_of_cover(p, t, n)?;
        rows.push(GrowthRow {
            n,
            b1: ab.b1,
            torsion: ab.torsion,
            ratio: BigRational::new(BigInt::from(ab.b1), BigInt::from(n)),
        });
    }
    let ratios: Vec<&BigRational> = rows.iter().map(|r| &r.ratio).collect();
    let trend = Trend {
        last_ratio: rows.last().unwrap().ratio.clone(),
        nonincreasing: ratios.windows(2).all(|w| w[1] <= w[0]),
        nondecreasing: ratios.windows(2).all(|w| w[1] >= w[0]),
    };
    Ok(BettiGrowthReport {
        label: GROWTH_LABEL.to_string(),
        rows,
        trend,
    })
}

/// Two-sided bounds: `def(p) - 1` from below (clamped at 0) and
/// `generators - 1` from above. The upper bound uses the presentation's
/// generator count as a rank proxy and is labeled as such.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct L2Bounds {
    pub lower_from_deficiency: i64,
    pub upper_from_rank: i64,
    pub user_lower: Option<(BigRational, String)>,
}

pub fn l2_bounds(p: &FinitePresentation) -> L2Bounds {
    L2Bounds {
        lower_from_deficiency: (p.deficiency() - 1).max(0),
        upper_from_rank: p.generator_count() as i64 - 1,
        user_lower: None,
    }
}

/// Render an exact rational as `p` or `p/q`.
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p` or `p/q` (exact, arbitrary precision).
pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d == BigInt::from(0) {
        return None;
    }
    Some(BigRational::new(n, d))
}
