//! Finite differences, exact interpolation of growth tables, and the
//! empirical search for the threshold past which `γ` is a polynomial.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{self, Grid};
use crate::poly::{shifted_binomial, Polynomial};
use crate::scalar::{ExactInt, Rat};
use crate::sumset::{growth_table, GrowthOptions, GrowthTable, Problem};

/// `γ` as a signed exact table.
pub fn gamma_grid<T: ExactInt>(table: &GrowthTable) -> Grid<T> {
    table.gamma().map(|&g| T::of_u64(g))
}

/// `Δᵢf(h) = f(h + eᵢ) − f(h)` on the box shrunk by one in direction `axis`.
pub fn finite_difference<T: ExactInt>(table: &Grid<T>, axis: usize) -> Result<Grid<T>> {
    if axis >= table.arity() {
        return Err(Error::DimensionMismatch {
            expected: table.arity(),
            got: axis + 1,
        });
    }
    if table.upper()[axis] == 0 {
        return Err(Error::BoxTooSmall(axis));
    }
    let mut upper = table.upper().to_vec();
    upper[axis] -= 1;
    let stride = table.stride(axis);
    Ok(Grid::from_fn(&upper, |h| {
        let i = table.offset(h);
        table.values()[i + stride].clone() - table.values()[i].clone()
    }))
}

/// Applies forward differences in place so that entry `α` becomes
/// `Δ^α f(0)`: the Newton coefficients of the grid's interpolant.
fn newton_coefficients<T: ExactInt>(grid: &mut Grid<T>) {
    let upper = grid.upper().to_vec();
    for (axis, &n) in upper.iter().enumerate() {
        let stride = grid.stride(axis);
        let len = grid.len();
        let data = grid.data_mut();
        for level in 1..=n {
            // top down along each line, so every read sees the previous level
            for line_start in 0..len {
                if !(line_start / stride).is_multiple_of(n + 1) {
                    continue;
                }
                for pos in (level..=n).rev() {
                    let hi = line_start + pos * stride;
                    let lo = hi - stride;
                    data[hi] = data[hi].clone() - data[lo].clone();
                }
            }
        }
    }
}

/// The unique polynomial of degree `≤ bounds[i]` in `hᵢ` agreeing with
/// `table` on the grid `base + ∏[0, bounds[i]]`, in the monomial basis.
pub fn fit_polynomial<T: ExactInt>(
    table: &Grid<T>,
    base: &[usize],
    bounds: &[usize],
) -> Result<Polynomial<T>> {
    let r = table.arity();
    if base.len() != r || bounds.len() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: base.len().max(bounds.len()),
        });
    }
    let hi: Vec<usize> = base.iter().zip(bounds).map(|(b, d)| b + d).collect();
    let mut newton = table.slice(base, &hi).map_err(|_| Error::GridOutsideBox)?;
    newton_coefficients(&mut newton);

    // Newton basis element α is ∏ C(hᵢ − baseᵢ, αᵢ); expand each factor.
    let factors: Vec<Vec<Vec<Rat<T>>>> = (0..r)
        .map(|i| {
            (0..=bounds[i])
                .map(|a| shifted_binomial(base[i], a))
                .collect()
        })
        .collect();
    let mut coeffs = Grid::from_fn(bounds, |_| Rat::<T>::zero());
    for (alpha, c) in newton.iter() {
        if c.is_zero() {
            continue;
        }
        let c = Rat::from_integer(c.clone());
        for e in lattice::points(&alpha) {
            let mut term = c.clone();
            for i in 0..r {
                term = term * factors[i][alpha[i]][e[i]].clone();
            }
            let slot = coeffs.get_mut(&e).expect("exponent within bounds");
            *slot = slot.clone() + term;
        }
    }
    Ok(Polynomial::from_grid(coeffs))
}

/// A polynomial certified to match `γ` on a finite region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FittedPolynomial<T: ExactInt> {
    pub polynomial: Polynomial<T>,
    /// Diagonal threshold `t = (τ,…,τ)` from which agreement was checked.
    pub thresholds: Vec<usize>,
    /// Best-effort per-coordinate relaxation of `thresholds`.
    pub relaxed_thresholds: Vec<usize>,
    pub window: usize,
    /// `dᵢ = kᵢ − 1`.
    pub degree_bounds: Vec<usize>,
    /// Inclusive corners of the region on which `γ = p` was verified.
    pub validated_lo: Vec<usize>,
    pub validated_hi: Vec<usize>,
}

impl<T: ExactInt> FittedPolynomial<T> {
    pub fn r(&self) -> usize {
        self.polynomial.arity()
    }

    pub fn evaluate(&self, h: &[i64]) -> Result<Rat<T>> {
        self.polynomial.evaluate(h)
    }

    /// Actual degree per variable (zeros for the zero polynomial).
    pub fn degrees(&self) -> Vec<usize> {
        self.polynomial
            .degrees()
            .unwrap_or_else(|| vec![0; self.r()])
    }

    pub fn respects_degree_bounds(&self) -> bool {
        self.degrees()
            .iter()
            .zip(&self.degree_bounds)
            .all(|(d, b)| d <= b)
    }
}

/// A lattice point where a candidate fit disagreed with the table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness<T: ExactInt> {
    pub threshold: usize,
    pub h: Vec<usize>,
    pub gamma: T,
    pub predicted: Rat<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Stabilized,
    NotStabilized,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizationReport<T: ExactInt> {
    pub status: Status,
    pub fitted: Option<FittedPolynomial<T>>,
    pub search_limit: usize,
    pub window: usize,
    /// Box of the growth table that was examined.
    pub table_box: Vec<usize>,
    /// One entry per rejected threshold.
    pub witnesses: Vec<Witness<T>>,
}

/// Box needed to search thresholds up to `max_threshold` with window `w`.
pub fn search_box(k: &[usize], max_threshold: usize, window: usize) -> Vec<usize> {
    k.iter()
        .map(|&ki| max_threshold + ki.saturating_sub(1) + window)
        .collect()
}

/// Computes the growth table and runs [`detect_on_table`].
pub fn detect_stabilization<T: ExactInt>(
    p: &Problem,
    max_threshold: usize,
    window: usize,
    opts: &GrowthOptions,
) -> Result<StabilizationReport<T>> {
    if window == 0 {
        return Err(Error::Unsupported("window must be >= 1".into()));
    }
    let upper = search_box(&p.k(), max_threshold, window);
    let table = growth_table(p, &upper, opts)?;
    detect_on_table(&table, max_threshold, window)
}

/// Searches `τ = 0, 1, …, max_threshold` for a diagonal threshold at which
/// the fit through `t + ∏[0, dᵢ]` also matches `γ` everywhere from `t` out to
/// the search box `T + dᵢ + w`. At `τ = T` that is exactly `t + ∏[0, dᵢ + w]`;
/// smaller thresholds are held to the whole computed tail, since a short
/// window is easily fooled by the collision-free start (`{0,3,5}` matches
/// `C(h+2, 2)` up to `h = 4`).
pub fn detect_on_table<T: ExactInt>(
    table: &GrowthTable,
    max_threshold: usize,
    window: usize,
) -> Result<StabilizationReport<T>> {
    let bounds: Vec<usize> = table.k().iter().map(|k| k.saturating_sub(1)).collect();
    let need = search_box(table.k(), max_threshold, window);
    if let Some(i) = need.iter().zip(table.upper()).position(|(n, u)| n > u) {
        return Err(Error::BoxTooSmall(i));
    }
    let gamma: Grid<T> = gamma_grid(table);
    let r = table.r();
    let mut witnesses = Vec::new();
    for tau in 0..=max_threshold {
        let base = vec![tau; r];
        let poly = fit_polynomial(&gamma, &base, &bounds)?;
        let hi = need.clone();
        match first_mismatch(&gamma, &poly, &base, &hi)? {
            Some((h, g, v)) => witnesses.push(Witness {
                threshold: tau,
                h,
                gamma: g,
                predicted: v,
            }),
            None => {
                let relaxed = relax(&gamma, &poly, &base, &hi)?;
                return Ok(StabilizationReport {
                    status: Status::Stabilized,
                    fitted: Some(FittedPolynomial {
                        polynomial: poly,
                        thresholds: base.clone(),
                        relaxed_thresholds: relaxed,
                        window,
                        degree_bounds: bounds,
                        validated_lo: base,
                        validated_hi: hi,
                    }),
                    search_limit: max_threshold,
                    window,
                    table_box: table.upper().to_vec(),
                    witnesses,
                });
            }
        }
    }
    Ok(StabilizationReport {
        status: Status::NotStabilized,
        fitted: None,
        search_limit: max_threshold,
        window,
        table_box: table.upper().to_vec(),
        witnesses,
    })
}

type Mismatch<T> = (Vec<usize>, T, Rat<T>);

/// First point of `∏[lo, hi]` where `poly` differs from `gamma`.
pub fn first_mismatch<T: ExactInt>(
    gamma: &Grid<T>,
    poly: &Polynomial<T>,
    lo: &[usize],
    hi: &[usize],
) -> Result<Option<Mismatch<T>>> {
    for h in lattice::points_between(lo, hi) {
        let g = gamma.get(&h).ok_or(Error::GridOutsideBox)?.clone();
        let v = poly.evaluate_at(&h)?;
        if v != Rat::from_integer(g.clone()) {
            return Ok(Some((h, g, v)));
        }
    }
    Ok(None)
}

/// Lowers one coordinate of the threshold at a time while `poly` keeps
/// matching on the enlarged region.
fn relax<T: ExactInt>(
    gamma: &Grid<T>,
    poly: &Polynomial<T>,
    base: &[usize],
    hi: &[usize],
) -> Result<Vec<usize>> {
    let mut t = base.to_vec();
    for i in 0..t.len() {
        while t[i] > 0 {
            let mut cand = t.clone();
            cand[i] -= 1;
            if first_mismatch(gamma, poly, &cand, hi)?.is_some() {
                break;
            }
            t = cand;
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::SemigroupSpec;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    type Q = Rat<BigInt>;

    fn q(n: i64) -> Q {
        Q::from_integer(BigInt::from(n))
    }

    fn grid1(v: &[i64]) -> Grid<i64> {
        Grid::from_vec(&[v.len() - 1], v.to_vec()).unwrap()
    }

    #[test]
    fn difference_examples() {
        let d = finite_difference(&grid1(&[1, 3, 6, 10, 15]), 0).unwrap();
        assert_eq!(d.values(), &[2, 3, 4, 5]);
        let d = finite_difference(&grid1(&[4, 4, 4]), 0).unwrap();
        assert!(d.values().iter().all(|&x| x == 0));
        let d = finite_difference(&grid1(&[1, 2, 3, 4]), 0).unwrap();
        assert!(d.values().iter().all(|&x| x == 1));
        assert_eq!(
            finite_difference(&grid1(&[7]), 0).unwrap_err(),
            Error::BoxTooSmall(0)
        );
    }

    #[test]
    fn difference_along_second_axis() {
        let g = Grid::from_fn(&[2, 3], |h| (h[0] * h[1] + h[1] * h[1]) as i64);
        let d = finite_difference(&g, 1).unwrap();
        assert_eq!(d.upper(), &[2, 2]);
        for (h, v) in d.iter() {
            let f = |a: usize, b: usize| (a * b + b * b) as i64;
            assert_eq!(*v, f(h[0], h[1] + 1) - f(h[0], h[1]));
        }
    }

    #[test]
    fn fit_examples() {
        let g: Grid<BigInt> = grid1(&[1, 3, 6, 10, 15, 20]).map(|&x| BigInt::from(x));
        let p = fit_polynomial(&g, &[3], &[2]).unwrap();
        assert_eq!(
            p,
            Polynomial::from_terms(1, &[(vec![1], q(5)), (vec![0], q(-5))])
        );

        let g: Grid<BigInt> = grid1(&[1, 2]).map(|&x| BigInt::from(x));
        let p = fit_polynomial(&g, &[0], &[1]).unwrap();
        assert_eq!(
            p,
            Polynomial::from_terms(1, &[(vec![1], q(1)), (vec![0], q(1))])
        );

        let g: Grid<BigInt> = grid1(&[9, 9, 9, 9]).map(|&x| BigInt::from(x));
        let p = fit_polynomial(&g, &[1], &[2]).unwrap();
        assert_eq!(p, Polynomial::constant(1, q(9)));

        assert_eq!(
            fit_polynomial(&g, &[2], &[2]).unwrap_err(),
            Error::GridOutsideBox
        );
    }

    #[test]
    fn detect_examples() {
        let opts = GrowthOptions::default();
        let p = Problem::from_ints(SemigroupSpec::free(1), &[0], &[&[0, 3, 5]]).unwrap();
        let rep = detect_stabilization::<BigInt>(&p, 10, 2, &opts).unwrap();
        assert_eq!(rep.status, Status::Stabilized);
        let fit = rep.fitted.unwrap();
        assert_eq!(fit.thresholds, vec![3]);
        assert_eq!(fit.polynomial.to_string(), "5h1 - 5");
        assert_eq!(fit.evaluate(&[7]).unwrap(), q(30));
        assert_eq!(rep.witnesses.len(), 3);

        let p =
            Problem::from_ints(SemigroupSpec::cyclic(12).unwrap(), &[0], &[&[0, 4, 6]]).unwrap();
        let rep = detect_stabilization::<BigInt>(&p, 10, 2, &opts).unwrap();
        let fit = rep.fitted.unwrap();
        assert_eq!(fit.thresholds, vec![3]);
        assert_eq!(fit.polynomial, Polynomial::constant(1, q(6)));
        assert_eq!(fit.evaluate(&[100]).unwrap(), q(6));
    }

    #[test]
    fn detect_two_summands() {
        let p = Problem::from_ints(SemigroupSpec::free(1), &[0], &[&[0, 1], &[0, 2, 3]]).unwrap();
        let rep = detect_stabilization::<BigInt>(&p, 5, 2, &GrowthOptions::default()).unwrap();
        let fit = rep.fitted.unwrap();
        assert_eq!(fit.polynomial.to_string(), "h1 + 3h2 + 1");
        assert_eq!(fit.evaluate(&[4, 4]).unwrap(), q(17));
        // h1 >= 1 suffices for every h2, and the h1 = 0 column is 3h2
        assert_eq!(fit.thresholds, vec![1, 1]);
        assert_eq!(fit.relaxed_thresholds, vec![1, 0]);
    }

    #[test]
    fn not_stabilized_reports_witnesses() {
        let p = Problem::from_ints(SemigroupSpec::free(1), &[0], &[&[0, 3, 5]]).unwrap();
        let rep = detect_stabilization::<BigInt>(&p, 2, 1, &GrowthOptions::default()).unwrap();
        assert_eq!(rep.status, Status::NotStabilized);
        assert_eq!(rep.witnesses.len(), 3);
        assert!(rep.fitted.is_none());
    }

    #[test]
    fn fixed_width_scalars_agree_with_bigint() {
        let p =
            Problem::from_ints(SemigroupSpec::free(1), &[0, 2], &[&[0, 3, 4], &[1, 2]]).unwrap();
        let opts = GrowthOptions::default();
        let a = detect_stabilization::<BigInt>(&p, 6, 2, &opts).unwrap();
        let b = detect_stabilization::<i64>(&p, 6, 2, &opts).unwrap();
        let (fa, fb) = (a.fitted.unwrap(), b.fitted.unwrap());
        assert_eq!(fa.thresholds, fb.thresholds);
        for h in lattice::points(&[6, 6]) {
            let va = fa.polynomial.evaluate_at(&h).unwrap();
            let vb = fb.polynomial.evaluate_at(&h).unwrap();
            assert_eq!(va.to_string(), vb.to_string());
        }
    }

    /// Lagrange interpolation on the tensor grid, written independently of
    /// the Newton path.
    fn lagrange(values: &Grid<i64>, base: &[usize], bounds: &[usize], at: &[usize]) -> Q {
        let mut total = q(0);
        for node in lattice::points(bounds) {
            let mut w = q(1);
            for i in 0..node.len() {
                let xi = (base[i] + node[i]) as i64;
                for j in 0..=bounds[i] {
                    if j != node[i] {
                        let xj = (base[i] + j) as i64;
                        w *= Q::new(BigInt::from(at[i] as i64 - xj), BigInt::from(xi - xj));
                    }
                }
            }
            let grid_pt: Vec<usize> = node.iter().zip(base).map(|(n, b)| n + b).collect();
            total += w * q(*values.get(&grid_pt).unwrap());
        }
        total
    }

    proptest! {
        #[test]
        fn fit_reproduces_grid_and_matches_lagrange(
            upper in prop::collection::vec(1usize..4, 1..4),
            seed in prop::collection::vec(-50i64..50, 64),
        ) {
            let g = Grid::from_fn(&upper, |h| {
                let i = h.iter().fold(0usize, |a, &x| a * 5 + x);
                seed[i % seed.len()]
            });
            let bounds: Vec<usize> = upper.iter().map(|&u| u - 1).collect();
            let base: Vec<usize> = vec![1; upper.len()];
            let big = g.map(|&x| BigInt::from(x));
            let p = fit_polynomial(&big, &base, &bounds).unwrap();
            for h in lattice::points(&upper) {
                prop_assert_eq!(p.evaluate_at(&h).unwrap(), lagrange(&g, &base, &bounds, &h));
            }
            for (h, v) in g.iter() {
                if h.iter().all(|&x| x >= 1) {
                    prop_assert_eq!(p.evaluate_at(&h).unwrap(), q(*v));
                }
            }
            if let Some(d) = p.degrees() {
                for (di, bi) in d.iter().zip(&bounds) {
                    prop_assert!(di <= bi);
                }
            }
        }
    }
}
