//! The TC-generating series `Σ_{r≥1} TC_{r+1} z^r`, fitting it as
//! `P(z)/(1−z)²`, and the difference inequality `zcl_{r+1} − zcl_r ≥ cupl(F)`.

use serde::Serialize;
use thiserror::Error;

use crate::fibration::FibrationPresentation;
use crate::invariants::{fiber_category, fiber_cuplength, tc_sandwich, zcl, AssertionSet, Bound, InvariantError, SandwichOptions};
use crate::status::Status;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenfunError {
    #[error("need at least 3 coefficients, got {0}")]
    TooFewCoefficients(usize),
    #[error("first differences are not constant at the end of the window (second difference {0})")]
    NoFit(i64),
}

/// `P(z)` with `Σ c_r z^r = P(z)/(1−z)²` on the window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalFit {
    /// Coefficients of `P`, constant term first.
    pub p: Vec<i64>,
    pub p_at_1: i64,
    /// First index from which differences are constant.
    pub stable_from: usize,
}

impl RationalFit {
    pub fn format(&self) -> String {
        let mut out = String::new();
        for (k, &c) in self.p.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mag = c.unsigned_abs();
            let sign = if c < 0 { "-" } else { "+" };
            if out.is_empty() {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            let mono = match k {
                0 => String::new(),
                1 => "z".into(),
                _ => format!("z^{k}"),
            };
            match (mag, k) {
                (_, 0) => out.push_str(&mag.to_string()),
                (1, _) => out.push_str(&mono),
                _ => out.push_str(&format!("{mag}{mono}")),
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }

    /// First `n` coefficients `c_1..c_n` of `P(z)/(1−z)²`.
    pub fn expand(&self, n: usize) -> Vec<i64> {
        // 1/(1−z)² = Σ (j+1) z^j
        (1..=n)
            .map(|r| self.p.iter().enumerate().filter(|(k, _)| *k <= r).map(|(k, &c)| c * (r - k + 1) as i64).sum())
            .collect()
    }
}

/// Fits `c_1, c_2, …` (index 0 holds `c_1`) with eventually constant first
/// differences, verified by re-expansion.
pub fn fit_rational(coeffs: &[i64]) -> Result<RationalFit, GenfunError> {
    let n = coeffs.len();
    if n < 3 {
        return Err(GenfunError::TooFewCoefficients(n));
    }
    // c_0 = 0 and c_{-1} = 0 extend the sequence to the left.
    let c = |r: isize| if r < 1 { 0 } else { coeffs[r as usize - 1] };
    let second = |r: isize| c(r) - 2 * c(r - 1) + c(r - 2);
    let edge = second(n as isize);
    if edge != 0 {
        return Err(GenfunError::NoFit(edge));
    }
    let last_nonzero = (1..=n as isize).rev().find(|&r| second(r) != 0).unwrap_or(0);
    let p: Vec<i64> = (0..=last_nonzero).map(second).collect();
    let stable_from = (1..n).find(|&r| (r + 1..n).all(|s| second(s as isize + 1) == 0)).unwrap_or(n);
    let fit = RationalFit { p_at_1: p.iter().sum(), p, stable_from };
    debug_assert_eq!(fit.expand(n), coeffs);
    if fit.expand(n) != coeffs {
        return Err(GenfunError::NoFit(edge));
    }
    Ok(fit)
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesCoefficient {
    /// `c_r = TC_{r+1}`.
    pub r: u32,
    pub value: Option<u32>,
    pub lower: Option<u32>,
    pub upper: Option<u32>,
    pub status: Status,
    pub provenance: Vec<Bound>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub coefficients: Vec<SeriesCoefficient>,
    pub fit: Option<RationalFit>,
    pub fit_error: Option<String>,
    pub cat_fiber: Option<u32>,
    pub cat_fiber_status: Option<Status>,
    pub notes: Vec<String>,
}

pub const FACTOR_Z_NOTE: &str = "summing TC_{r+1} = r cat(F) from r = 1 gives cat(F) z/(1-z)^2, not cat(F)/(1-z)^2; \
the statement without the factor z is off by one index. P(1) = cat(F) holds either way.";

/// Coefficients `c_r = TC_{r+1}[f]` for `r = 1..=rmax` and a fit when all are exact.
pub fn series(
    f: &FibrationPresentation,
    rmax: u32,
    cutoff: impl Fn(u32) -> u32,
    a: &AssertionSet,
    opts: &SandwichOptions,
) -> Result<SeriesReport, InvariantError> {
    let mut coefficients = Vec::new();
    for r in 1..=rmax {
        let rep = tc_sandwich(f, r + 1, cutoff(r + 1), a, opts)?;
        coefficients.push(SeriesCoefficient {
            r,
            value: rep.exact,
            lower: rep.lower.value,
            upper: rep.upper.value,
            status: rep.status,
            provenance: rep.lower.provenance.into_iter().chain(rep.upper.provenance).collect(),
        });
    }
    let (cat_fiber, cat_fiber_status) = match fiber_category(f, cutoff(1), a)? {
        Some((v, s)) => (Some(v), Some(s)),
        None => (None, None),
    };
    let mut notes = Vec::new();
    let (fit, fit_error) = match coefficients.iter().map(|c| c.value.map(i64::from)).collect::<Option<Vec<_>>>() {
        None => (None, Some("not every coefficient is exact; fit refused".to_string())),
        Some(values) => match fit_rational(&values) {
            Ok(fit) => {
                if let Some(cat) = cat_fiber {
                    notes.push(if fit.p_at_1 == cat as i64 {
                        format!("P(1) = {cat} = cat(F)")
                    } else {
                        format!("P(1) = {} differs from cat(F) = {cat}", fit.p_at_1)
                    });
                }
                (Some(fit), None)
            }
            Err(e) => (None, Some(e.to_string())),
        },
    };
    if f.fiber_indices().iter().all(|&i| f.gens().generator(i).is_odd()) && !f.fiber_indices().is_empty() {
        notes.push(FACTOR_Z_NOTE.to_string());
    }
    Ok(SeriesReport { coefficients, fit, fit_error, cat_fiber, cat_fiber_status, notes })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiffNilStep {
    pub r: u32,
    pub zcl_r: u32,
    pub zcl_next: u32,
    pub difference: i64,
    pub holds: bool,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiffNilReport {
    pub cupl_fiber: u32,
    pub cupl_status: Status,
    pub steps: Vec<DiffNilStep>,
}

impl DiffNilReport {
    pub fn all_hold(&self) -> bool {
        self.steps.iter().all(|s| s.holds)
    }
}

/// Checks `zcl_{r+1} − zcl_r ≥ cupl(F)` for `2 <= r < rmax`.
pub fn diff_nil_check(
    f: &FibrationPresentation,
    rmax: u32,
    cutoff: impl Fn(u32) -> u32,
    a: &AssertionSet,
) -> Result<DiffNilReport, InvariantError> {
    let cupl = fiber_cuplength(f, cutoff(1), a)?;
    let values = (2..=rmax).map(|r| zcl(f, r, cutoff(r), a)).collect::<Result<Vec<_>, _>>()?;
    let steps = values
        .windows(2)
        .map(|w| {
            let difference = w[1].value as i64 - w[0].value as i64;
            DiffNilStep {
                r: w[0].r,
                zcl_r: w[0].value,
                zcl_next: w[1].value,
                difference,
                holds: difference >= cupl.value as i64,
                status: w[0].status.and(&w[1].status).and(&cupl.status),
            }
        })
        .collect();
    Ok(DiffNilReport { cupl_fiber: cupl.value, cupl_status: cupl.status, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits() {
        let f = fit_rational(&[3, 6, 9, 12, 15]).unwrap();
        assert_eq!((f.p.clone(), f.p_at_1), (vec![0, 3], 3));
        assert_eq!(f.format(), "3z");
        let f = fit_rational(&[0, 0, 0]).unwrap();
        assert_eq!((f.p.clone(), f.format()), (vec![0], "0".to_string()));
        let f = fit_rational(&[1, 2, 3, 4]).unwrap();
        assert_eq!((f.format(), f.p_at_1), ("z".to_string(), 1));
        let f = fit_rational(&[2, 3, 4, 5, 6]).unwrap();
        assert_eq!((f.format(), f.p_at_1), ("2z - z^2".to_string(), 1));
        let f = fit_rational(&[1, 5, 6, 7]).unwrap();
        assert_eq!(f.expand(6), vec![1, 5, 6, 7, 8, 9]);
        assert_eq!(f.stable_from, 2);
    }

    #[test]
    fn refuses() {
        assert_eq!(fit_rational(&[1, 4, 9, 16]), Err(GenfunError::NoFit(2)));
        assert_eq!(fit_rational(&[1, 2]), Err(GenfunError::TooFewCoefficients(2)));
    }
}
