//! Outcome discretization: equal-quantile binning and rounding with a
//! refinement level.
//!
//! Rounding follows exact decimal semantics. `⌊a⌉_{s,t} = ⌊t·a⌉_s / t`
//! rounds `a` to the closest multiple of `1/(t·10^s)` with halves away from
//! zero; significant-digit rounding shifts the place by the leading digit,
//! `⌊a⌉^{(s,t)} = ⌊a⌉_{s−1−p(a),t}` with `p(a) = ⌊log₁₀|a|⌋`. All scaling
//! goes through exact integer powers of ten (refinement levels on the 0.1
//! grid are carried as the integer `10t`), and values that land within a
//! relative `1e-9` of a half boundary are snapped onto it before rounding,
//! so binary representation error such as `0.145 × 100 = 14.499999…` cannot
//! flip a decimal rounding decision.
//!
//! Non-positive outcomes are outside the classical significant-digit
//! definition; as a documented extension `0` maps to `0` and negative values
//! round by magnitude with the sign restored. Results carry a flag whenever
//! that extension was exercised.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{CpmError, Result};

/// Outcome vector after equal-quantile binning.
#[derive(Debug, Clone)]
pub struct BinningResult {
    /// Transformed outcome: every observation carries its bin's median.
    pub y_b: Vec<f64>,
    /// Cumulative bin boundaries in rank space: bin `i` covers sorted
    /// positions `bin_edges[i-1] .. bin_edges[i]` (with an implicit 0).
    pub bin_edges: Vec<usize>,
    /// Requested bin count.
    pub m_b: usize,
    /// Distinct values actually present in `y_b`.
    pub achieved: usize,
}

/// Group sorted outcomes into `m_b` bins of near-equal count and relabel
/// each observation with its bin median.
///
/// With `q = ⌊N/M_b⌋` and `r = N mod M_b` there are exactly `r` bins of
/// size `q+1` and `M_b − r` of size `q`, in a seed-determined random order.
pub fn bin_equal_quantile(y: &[f64], m_b: usize, rng: &mut impl Rng) -> Result<BinningResult> {
    let n = y.len();
    if m_b < 2 || m_b > n {
        return Err(CpmError::InvalidArgument(format!(
            "bin count must satisfy 2 <= M_b <= N, got M_b={m_b} with N={n}"
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(CpmError::NonFinite {
            context: "outcome vector",
        });
    }

    let q = n / m_b;
    let r = n % m_b;
    let mut sizes = vec![q; m_b];
    for s in sizes.iter_mut().take(r) {
        *s = q + 1;
    }
    sizes.shuffle(rng);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| y[a].partial_cmp(&y[b]).unwrap().then(a.cmp(&b)));

    let mut y_b = vec![0.0; n];
    let mut bin_edges = Vec::with_capacity(m_b);
    let mut start = 0usize;
    for &size in &sizes {
        let end = start + size;
        let median = if size % 2 == 1 {
            y[order[start + size / 2]]
        } else {
            let a = y[order[start + size / 2 - 1]];
            let b = y[order[start + size / 2]];
            0.5 * (a + b)
        };
        for &i in &order[start..end] {
            y_b[i] = median;
        }
        bin_edges.push(end);
        start = end;
    }

    let achieved = count_distinct(&y_b);
    Ok(BinningResult {
        y_b,
        bin_edges,
        m_b,
        achieved,
    })
}

/// Rounding strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundingMode {
    /// Round to decimal place `s`.
    Decimal,
    /// Round to `s` significant digits.
    SigDigit,
}

impl std::fmt::Display for RoundingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RoundingMode::Decimal => "decimal",
            RoundingMode::SigDigit => "sigdigit",
        })
    }
}

/// A fully determined rounding transformation.
#[derive(Debug, Clone)]
pub struct RoundingScheme {
    pub mode: RoundingMode,
    /// Decimal place (may be negative) or significant-digit count (≥ 1).
    pub s: i32,
    /// Refinement level in `[1, 10]`.
    pub t: f64,
    /// Distinct count obtained on the data the scheme was chosen for
    /// (0 until a search has run).
    pub achieved: usize,
    /// The refinement search could not get within 1% of the target.
    pub target_missed: bool,
    /// Non-positive outcomes were rounded via the signed extension.
    pub signed_extension: bool,
}

impl RoundingScheme {
    pub fn new(mode: RoundingMode, s: i32, t: f64) -> Result<Self> {
        if !(1.0..=10.0).contains(&t) {
            return Err(CpmError::InvalidArgument(format!(
                "refinement level must lie in [1, 10], got {t}"
            )));
        }
        if mode == RoundingMode::SigDigit && s < 1 {
            return Err(CpmError::InvalidArgument(format!(
                "significant-digit count must be >= 1, got {s}"
            )));
        }
        Ok(RoundingScheme {
            mode,
            s,
            t,
            achieved: 0,
            target_missed: false,
            signed_extension: false,
        })
    }
}

fn pow10(k: i32) -> f64 {
    10f64.powi(k)
}

fn normalize_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Round half away from zero, first snapping values within a relative 1e-9
/// of a half boundary onto it. The window is capped at an absolute 1e-3 so
/// it can never swallow genuinely off-half values at large magnitudes;
/// decimal-authored inputs carry at most ~1e-13 relative representation
/// error, far inside the window wherever decimal exactness is representable.
fn snap_round(x: f64) -> f64 {
    let ax = x.abs();
    if ax >= 9.007_199_254_740_992e15 {
        // Beyond 2^53 every f64 is integral.
        return x;
    }
    let floor = ax.floor();
    let frac = ax - floor;
    let eps = (1e-9 * ax.max(1.0)).min(1e-3);
    let rounded = if (frac - 0.5).abs() <= eps {
        floor + 1.0
    } else {
        ax.round()
    };
    if x < 0.0 {
        -rounded
    } else {
        rounded
    }
}

/// `⌊a⌉_{s,t}` with the refinement carried as the integer `t10 = 10·t`.
fn round_decimal_t10(a: f64, s: i32, t10: u32) -> f64 {
    debug_assert!((10..=100).contains(&t10));
    let e = s - 1; // combined exponent: t·10^s = t10·10^{s−1}
    let t = t10 as f64;
    if e >= 0 {
        let scale = t * pow10(e);
        let r = snap_round(a * scale);
        normalize_zero(r / scale)
    } else {
        let div = pow10(-e);
        let r = snap_round(a * t / div);
        normalize_zero(r * div / t)
    }
}

/// Place of the leading significant digit of a positive number,
/// `p(a) = ⌊log₁₀ a⌋`, with an exactness correction around powers of ten.
fn leading_place(a: f64) -> i32 {
    debug_assert!(a > 0.0);
    let mut p = a.log10().floor() as i32;
    if pow10(p + 1) <= a {
        p += 1;
    } else if pow10(p) > a {
        p -= 1;
    }
    p
}

fn round_sigdigit_t10(a: f64, s: i32, t10: u32) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let mag = a.abs();
    let place = s - 1 - leading_place(mag);
    let rounded = round_decimal_t10(mag, place, t10);
    if a < 0.0 {
        normalize_zero(-rounded)
    } else {
        rounded
    }
}

fn t10_of(t: f64) -> Option<u32> {
    let scaled = t * 10.0;
    let nearest = scaled.round();
    if (scaled - nearest).abs() < 1e-9 {
        Some(nearest as u32)
    } else {
        None
    }
}

/// Apply a rounding scheme to one value.
pub fn round_value(a: f64, scheme: &RoundingScheme) -> f64 {
    match t10_of(scheme.t) {
        Some(t10) => match scheme.mode {
            RoundingMode::Decimal => round_decimal_t10(a, scheme.s, t10),
            RoundingMode::SigDigit => round_sigdigit_t10(a, scheme.s, t10),
        },
        None => {
            // Off-grid refinement level: direct scaling, still half-away.
            let place = match scheme.mode {
                RoundingMode::Decimal => scheme.s,
                RoundingMode::SigDigit => {
                    if a == 0.0 {
                        return 0.0;
                    }
                    scheme.s - 1 - leading_place(a.abs())
                }
            };
            let scale = scheme.t * pow10(place);
            normalize_zero(snap_round(a * scale) / scale)
        }
    }
}

fn count_distinct(values: &[f64]) -> usize {
    let mut v: Vec<f64> = values.iter().map(|&x| normalize_zero(x)).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    v.len()
}

/// Distinct count after rounding the (already distinct) value set.
fn rounded_distinct_count(distinct: &[f64], mode: RoundingMode, s: i32, t10: u32) -> usize {
    let rounded: Vec<f64> = distinct
        .iter()
        .map(|&v| match mode {
            RoundingMode::Decimal => round_decimal_t10(v, s, t10),
            RoundingMode::SigDigit => round_sigdigit_t10(v, s, t10),
        })
        .collect();
    count_distinct(&rounded)
}

const DECIMAL_S_MIN: i32 = -40;
const DECIMAL_S_MAX: i32 = 40;
const SIGDIGIT_S_MAX: i32 = 25;

/// Search for the rounding scheme whose distinct count comes closest to the
/// target `m_r`: first bracket the place `s` with `m_{s,1} ≤ M_r < m_{s+1,1}`,
/// then walk the refinement grid `t ∈ {1.0, 1.1, …, 10.0}` minimizing
/// `|log m − log M_r|` (ties toward smaller `t`). Returns the scheme plus
/// the transformed outcome vector.
pub fn choose_rounding(
    y: &[f64],
    m_r: usize,
    mode: RoundingMode,
) -> Result<(RoundingScheme, Vec<f64>)> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(CpmError::NonFinite {
            context: "outcome vector",
        });
    }
    let mut distinct: Vec<f64> = y.iter().map(|&v| normalize_zero(v)).collect();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    let m = distinct.len();
    if m_r < 2 || m_r >= m {
        return Err(CpmError::InvalidArgument(format!(
            "target distinct count must satisfy 2 <= M_r < M, got M_r={m_r} with M={m}"
        )));
    }
    let signed_extension =
        mode == RoundingMode::SigDigit && distinct.first().copied().unwrap_or(1.0) <= 0.0;

    let count = |s: i32, t10: u32| rounded_distinct_count(&distinct, mode, s, t10);

    // Bracket s with m(s,1) <= M_r < m(s+1,1).
    let (s_lo, s_hi) = match mode {
        RoundingMode::Decimal => {
            let max_abs = distinct.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            let start = if max_abs > 0.0 {
                (-(leading_place(max_abs) + 2)).clamp(DECIMAL_S_MIN, DECIMAL_S_MAX)
            } else {
                0
            };
            let mut s = start;
            while s > DECIMAL_S_MIN && count(s, 10) > m_r {
                s -= 1;
            }
            (s, DECIMAL_S_MAX)
        }
        RoundingMode::SigDigit => (1, SIGDIGIT_S_MAX),
    };

    let mut s = s_lo;
    let mut m_here = count(s, 10);
    if m_here > m_r {
        // No coarser place exists (possible only in sigdigit mode, where one
        // significant digit is the coarsest): report the best we have.
        let mut scheme = RoundingScheme::new(mode, s, 1.0)?;
        scheme.achieved = m_here;
        scheme.target_missed = true;
        scheme.signed_extension = signed_extension;
        let y_r = y.iter().map(|&v| round_value(v, &scheme)).collect();
        return Ok((scheme, y_r));
    }
    while s < s_hi {
        let m_next = count(s + 1, 10);
        if m_next > m_r {
            break;
        }
        s += 1;
        m_here = m_next;
    }

    let (best_t10, best_m) = if m_here == m_r {
        (10u32, m_here)
    } else {
        let target_log = (m_r as f64).ln();
        let mut best = (10u32, m_here);
        let mut best_gap = ((m_here as f64).ln() - target_log).abs();
        for t10 in 11..=100u32 {
            let m_t = count(s, t10);
            let gap = ((m_t as f64).ln() - target_log).abs();
            if gap < best_gap {
                best = (t10, m_t);
                best_gap = gap;
            }
        }
        best
    };

    let mut scheme = RoundingScheme::new(mode, s, best_t10 as f64 / 10.0)?;
    scheme.achieved = best_m;
    scheme.target_missed = ((best_m as f64).ln() - (m_r as f64).ln()).abs() > 1.01f64.ln() + 1e-12;
    scheme.signed_extension = signed_extension;
    let y_r = y.iter().map(|&v| round_value(v, &scheme)).collect();
    Ok((scheme, y_r))
}

/// One row of the discretization report.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSummary {
    pub label: String,
    pub n_obs: usize,
    pub distinct_before: usize,
    pub distinct_after: usize,
}

/// Region-by-region diagnostics of a discretization: observation counts and
/// distinct counts before/after, split at the given edges.
#[derive(Debug, Clone)]
pub struct RoundingReport {
    pub regions: Vec<RegionSummary>,
    pub total: RegionSummary,
}

impl std::fmt::Display for RoundingReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "region\tn_obs\tdistinct_before\tdistinct_after")?;
        for row in self.regions.iter().chain(std::iter::once(&self.total)) {
            writeln!(
                f,
                "{}\t{}\t{}\t{}",
                row.label, row.n_obs, row.distinct_before, row.distinct_after
            )?;
        }
        Ok(())
    }
}

/// Build the per-region discretization report. Regions are
/// `(−∞, e₁), [e₁, e₂), …, [e_last, ∞)` for sorted edges.
pub fn rounding_report(y: &[f64], y_r: &[f64], region_edges: &[f64]) -> Result<RoundingReport> {
    if y.len() != y_r.len() {
        return Err(CpmError::DimensionMismatch {
            context: "original vs discretized outcome length",
            expected: y.len(),
            got: y_r.len(),
        });
    }
    if region_edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CpmError::InvalidArgument(
            "region edges must be strictly increasing".into(),
        ));
    }
    let n_regions = region_edges.len() + 1;
    let mut before: Vec<Vec<f64>> = vec![Vec::new(); n_regions];
    let mut after: Vec<Vec<f64>> = vec![Vec::new(); n_regions];
    for (&v, &vr) in y.iter().zip(y_r.iter()) {
        let region = region_edges.partition_point(|&e| e <= v);
        before[region].push(v);
        after[region].push(vr);
    }
    let label = |i: usize| -> String {
        if region_edges.is_empty() {
            "all".to_string()
        } else if i == 0 {
            format!("< {}", region_edges[0])
        } else if i == region_edges.len() {
            format!(">= {}", region_edges[i - 1])
        } else {
            format!("[{}, {})", region_edges[i - 1], region_edges[i])
        }
    };
    let regions = (0..n_regions)
        .map(|i| RegionSummary {
            label: label(i),
            n_obs: before[i].len(),
            distinct_before: count_distinct(&before[i]),
            distinct_after: count_distinct(&after[i]),
        })
        .collect();
    let total = RegionSummary {
        label: "total".to_string(),
        n_obs: y.len(),
        distinct_before: count_distinct(y),
        distinct_after: count_distinct(y_r),
    };
    Ok(RoundingReport { regions, total })
}
