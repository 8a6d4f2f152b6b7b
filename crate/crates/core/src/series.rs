//! Truncated growth series `Σ γ(h) z^h` and the numerator obtained by
//! clearing the denominator `∏ (1 − zᵢ)^{kᵢ}`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::growth::{detect_on_table, first_mismatch, gamma_grid, FittedPolynomial, Status};
use crate::lattice::{self, Grid};
use crate::scalar::ExactInt;
use crate::sumset::{growth_table, GrowthOptions, GrowthTable, Problem};

/// Zero layers required beyond the numerator support before calling it
/// terminated.
pub const TERMINATION_MARGIN: usize = 2;

/// Coefficients of `z^h` for every `h` in a box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries<T> {
    pub coeffs: Grid<T>,
}

impl<T: ExactInt> TruncatedSeries<T> {
    pub fn arity(&self) -> usize {
        self.coeffs.arity()
    }

    pub fn upper(&self) -> &[usize] {
        self.coeffs.upper()
    }
}

/// Repackages `γ` as series coefficients.
pub fn to_series<T: ExactInt>(table: &GrowthTable) -> TruncatedSeries<T> {
    TruncatedSeries {
        coeffs: gamma_grid(table),
    }
}

/// Multiplies by `(1 − z_axis)` in place: `c(h) ← c(h) − c(h − e_axis)`.
/// Exact on the whole box since the value at `h` only reads `h' ≤ h`.
pub(crate) fn one_minus_z<T: ExactInt>(grid: &mut Grid<T>, axis: usize) {
    let stride = grid.stride(axis);
    let n = grid.upper()[axis];
    let len = grid.len();
    let data = grid.data_mut();
    for i in (0..len).rev() {
        if !(i / stride).is_multiple_of(n + 1) {
            data[i] = data[i].clone() - data[i - stride].clone();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumeratorReport<T> {
    /// `F · ∏(1 − zᵢ)^{kᵢ}` on the series box.
    pub coeffs: Grid<T>,
    pub k: Vec<usize>,
    /// Componentwise minimum exponent with a nonzero coefficient.
    pub beta: Vec<usize>,
    /// Componentwise maximum exponent with a nonzero coefficient.
    pub degree: Vec<usize>,
    /// `Hᵢ − degreeᵢ`: zero layers observed past the support.
    pub margin: Vec<usize>,
    pub terminated: bool,
    /// Set when `β ≠ 0` or the coefficient at `z^β` vanishes.
    pub anomaly: Option<String>,
}

impl<T: ExactInt> NumeratorReport<T> {
    /// Nonzero `(exponent, coefficient)` pairs in lexicographic order.
    pub fn sparse(&self) -> Vec<(Vec<usize>, T)> {
        self.coeffs
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e, c.clone()))
            .collect()
    }

    /// `P(M, z)`, the numerator with `z^β` factored out.
    pub fn p_coefficients(&self) -> Vec<(Vec<usize>, T)> {
        self.sparse()
            .into_iter()
            .map(|(e, c)| (e.iter().zip(&self.beta).map(|(x, b)| x - b).collect(), c))
            .collect()
    }
}

/// Clears the denominator `∏(1 − zᵢ)^{kᵢ}` from a truncated series.
pub fn numerator<T: ExactInt>(
    series: &TruncatedSeries<T>,
    k: &[usize],
) -> Result<NumeratorReport<T>> {
    let r = series.arity();
    if k.len() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: k.len(),
        });
    }
    if r == 0 {
        return Err(Error::BoxTooSmall(0));
    }
    if let Some(i) = (0..r).find(|&i| series.upper()[i] < k[i]) {
        return Err(Error::BoxTooSmall(i));
    }
    let mut coeffs = series.coeffs.clone();
    for (axis, &ki) in k.iter().enumerate() {
        for _ in 0..ki {
            one_minus_z(&mut coeffs, axis);
        }
    }
    let mut beta: Option<Vec<usize>> = None;
    let mut degree = vec![0; r];
    for (e, c) in coeffs.iter() {
        if c.is_zero() {
            continue;
        }
        match &mut beta {
            None => beta = Some(e.clone()),
            Some(b) => b.iter_mut().zip(&e).for_each(|(b, &x)| *b = (*b).min(x)),
        }
        degree
            .iter_mut()
            .zip(&e)
            .for_each(|(d, &x)| *d = (*d).max(x));
    }
    let upper = series.upper();
    let margin: Vec<usize> = upper.iter().zip(&degree).map(|(u, d)| u - d).collect();
    let (beta, anomaly) = match beta {
        None => (
            vec![0; r],
            Some("numerator vanishes on the whole box".to_string()),
        ),
        Some(b) => {
            let anomaly = if b.iter().any(|&x| x != 0) {
                Some(format!("beta = {b:?} is not the origin"))
            } else if coeffs.get(&b).is_none_or(Zero::is_zero) {
                Some("coefficient at z^beta is zero".to_string())
            } else {
                None
            };
            (b, anomaly)
        }
    };
    let terminated = margin.iter().all(|&m| m >= TERMINATION_MARGIN);
    Ok(NumeratorReport {
        coeffs,
        k: k.to_vec(),
        beta,
        degree,
        margin,
        terminated,
        anomaly,
    })
}

/// Outcome of the full series pipeline on one problem.
#[derive(Debug, Clone)]
pub struct RationalFormSummary<T: ExactInt> {
    pub numerator: NumeratorReport<T>,
    pub fit: Option<FittedPolynomial<T>>,
    /// Tail region `h ≥ degree + 1` inside the box.
    pub tail_lo: Vec<usize>,
    pub tail_points: usize,
    /// `None` when there was nothing to compare (no fit or empty tail).
    pub tail_agrees: Option<bool>,
}

/// Growth table → series → numerator, cross-checked against the
/// stabilization fit on the tail past the numerator support.
pub fn rational_form_check<T: ExactInt>(
    p: &Problem,
    upper: &[usize],
    window: usize,
    opts: &GrowthOptions,
) -> Result<RationalFormSummary<T>> {
    let k = p.k();
    if upper.len() != k.len() {
        return Err(Error::DimensionMismatch {
            expected: k.len(),
            got: upper.len(),
        });
    }
    if let Some(i) = (0..k.len()).find(|&i| upper[i] < k[i]) {
        return Err(Error::BoxTooSmall(i));
    }
    let table = growth_table(p, upper, opts)?;
    rational_form_on_table(&table, window)
}

/// [`rational_form_check`] on an existing table.
pub fn rational_form_on_table<T: ExactInt>(
    table: &GrowthTable,
    window: usize,
) -> Result<RationalFormSummary<T>> {
    let series = to_series::<T>(table);
    let num = numerator(&series, table.k())?;
    // largest diagonal search that fits in the box
    let max_t = table
        .upper()
        .iter()
        .zip(table.k())
        .map(|(&u, &k)| u as i64 - (k as i64 - 1) - window as i64)
        .min()
        .unwrap_or(-1);
    let fit = if max_t >= 0 {
        let rep = detect_on_table::<T>(table, max_t as usize, window)?;
        match rep.status {
            Status::Stabilized => rep.fitted,
            Status::NotStabilized => None,
        }
    } else {
        None
    };
    let tail_lo: Vec<usize> = num.degree.iter().map(|d| d + 1).collect();
    let upper = table.upper();
    let tail_points = if tail_lo.iter().zip(upper).all(|(l, u)| l <= u) {
        lattice::points_between(&tail_lo, upper).count()
    } else {
        0
    };
    let tail_agrees = match &fit {
        Some(f) if tail_points > 0 => {
            Some(first_mismatch(&series.coeffs, &f.polynomial, &tail_lo, upper)?.is_none())
        }
        _ => None,
    };
    Ok(RationalFormSummary {
        numerator: num,
        fit,
        tail_lo,
        tail_points,
        tail_agrees,
    })
}
