//! Integer sumsets: the low and high gap sets, the constants `c`, `d`, `Δ`,
//! and Frobenius numbers.
//!
//! For `S = ℤ` with every set shifted to start at 0 and the summands jointly
//! coprime, the sumset at large `h` is an interval with a fixed pattern of
//! holes near each end. [`structure_sets`] finds that pattern empirically.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::growth::FittedPolynomial;
use crate::poly::Polynomial;
use crate::semigroup::{Component, ElementSet, SemigroupSpec};
use crate::sumset::{set_sum, Problem};

/// Integer problem with every set translated to have minimum 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedIntegerProblem {
    pub base: Vec<i64>,
    pub summands: Vec<Vec<i64>>,
    /// Amount subtracted from `B`.
    pub base_shift: i64,
    /// Amount subtracted from each `Aᵢ`.
    pub summand_shifts: Vec<i64>,
    /// `b* = max B` after shifting.
    pub b_star: i64,
    /// `a*ᵢ = max Aᵢ` after shifting.
    pub a_star: Vec<i64>,
    /// gcd of the union of the shifted summands.
    pub gcd: u64,
}

fn sorted_unique(v: &[i64]) -> Vec<i64> {
    v.iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Shifts each set to minimum 0 and checks the summands are jointly coprime.
pub fn normalize(base: &[i64], summands: &[Vec<i64>]) -> Result<NormalizedIntegerProblem> {
    if base.is_empty() {
        return Err(Error::EmptySet("B".into()));
    }
    if summands.is_empty() {
        return Err(Error::Unsupported(
            "a problem needs at least one summand".into(),
        ));
    }
    let shift = |v: &[i64], name: String| -> Result<(Vec<i64>, i64)> {
        let v = sorted_unique(v);
        let m = *v.first().ok_or(Error::EmptySet(name))?;
        let out = v
            .iter()
            .map(|x| x.checked_sub(m).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok((out, m))
    };
    let (base, base_shift) = shift(base, "B".into())?;
    let mut shifted = Vec::with_capacity(summands.len());
    let mut shifts = Vec::with_capacity(summands.len());
    for (i, a) in summands.iter().enumerate() {
        let (a, m) = shift(a, format!("A_{}", i + 1))?;
        shifted.push(a);
        shifts.push(m);
    }
    let gcd = shifted
        .iter()
        .flatten()
        .fold(0u64, |g, &x| g.gcd(&(x as u64)));
    if gcd != 1 {
        return Err(Error::GcdNotOne(gcd));
    }
    Ok(NormalizedIntegerProblem {
        b_star: *base.last().unwrap(),
        a_star: shifted.iter().map(|a| *a.last().unwrap()).collect(),
        base,
        summands: shifted,
        base_shift,
        summand_shifts: shifts,
        gcd,
    })
}

/// Extracts integer sets from a problem over `ℤ¹` and normalizes them.
pub fn normalize_problem(p: &Problem) -> Result<NormalizedIntegerProblem> {
    let ints = integer_sets(p)?;
    normalize(&ints.0, &ints.1)
}

fn integer_sets(p: &Problem) -> Result<(Vec<i64>, Vec<Vec<i64>>)> {
    if **p.spec() != SemigroupSpec::Product(vec![Component::Free]) {
        return Err(Error::Unsupported(
            "integer structure needs a problem over the integers (one free component)".into(),
        ));
    }
    let scalars = |s: &ElementSet| s.sorted_scalars().expect("1-dimensional elements");
    Ok((
        scalars(p.base()),
        p.summands().iter().map(scalars).collect(),
    ))
}

impl NormalizedIntegerProblem {
    pub fn r(&self) -> usize {
        self.summands.len()
    }

    /// The normalized sets as a sumset problem over `ℤ`.
    pub fn to_problem(&self) -> Result<Problem> {
        let spec = Arc::new(SemigroupSpec::free(1));
        Problem::new(
            ElementSet::from_ints(&spec, &self.base)?,
            self.summands
                .iter()
                .map(|a| ElementSet::from_ints(&spec, a))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// `F(h) = b* + Σ a*ᵢ hᵢ`, the largest element of the sumset.
    pub fn top(&self, h: &[usize]) -> i64 {
        self.b_star
            + self
                .a_star
                .iter()
                .zip(h)
                .map(|(a, &x)| a * x as i64)
                .sum::<i64>()
    }

    /// `(b* − B; a*₁ − A₁, …, a*ᵣ − Aᵣ)`; its low gaps are our high gaps.
    pub fn reflected(&self) -> NormalizedIntegerProblem {
        let flip = |v: &[i64], m: i64| sorted_unique(&v.iter().map(|x| m - x).collect::<Vec<_>>());
        NormalizedIntegerProblem {
            base: flip(&self.base, self.b_star),
            summands: self
                .summands
                .iter()
                .zip(&self.a_star)
                .map(|(a, &m)| flip(a, m))
                .collect(),
            base_shift: 0,
            summand_shifts: vec![0; self.r()],
            b_star: self.b_star,
            a_star: self.a_star.clone(),
            gcd: self.gcd,
        }
    }
}

/// Holes of a sumset near each end, split at `⌊F/2⌋`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapProfile {
    /// Missing elements of `[0, ⌊F/2⌋]`.
    pub low: BTreeSet<i64>,
    /// `F − x` for each missing `x` in `(⌊F/2⌋, F]`.
    pub top: BTreeSet<i64>,
}

/// Gap profile of a sorted integer sumset with maximum `f`.
pub fn gap_profile(sorted: &[i64], f: i64) -> GapProfile {
    let present: BTreeSet<i64> = sorted.iter().copied().collect();
    let mid = f.div_euclid(2);
    let low = (0..=mid).filter(|x| !present.contains(x)).collect();
    let top = (mid + 1..=f)
        .filter(|x| !present.contains(x))
        .map(|x| f - x)
        .collect();
    GapProfile { low, top }
}

/// The asymptotic decomposition `C ∪ [c, F(h) − d] ∪ (F(h) − D)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub c: i64,
    pub c_set: BTreeSet<i64>,
    pub d: i64,
    pub d_set: BTreeSet<i64>,
    pub delta: i64,
    pub g_low: BTreeSet<i64>,
    pub g_top: BTreeSet<i64>,
    /// First diagonal point of the certified run.
    pub h_star: Vec<usize>,
    /// `F(h_star)`.
    pub top_at_h_star: i64,
    /// Diagonal steps over which the profile was seen unchanged.
    pub certified: Vec<usize>,
    pub b_star: i64,
    pub a_star: Vec<i64>,
}

impl StructureReport {
    fn from_profile(g: &GapProfile) -> (i64, BTreeSet<i64>, i64, BTreeSet<i64>) {
        let (c, c_set) = match g.low.last() {
            None => (0, BTreeSet::new()),
            Some(&m) => (m + 1, (0..m).filter(|x| !g.low.contains(x)).collect()),
        };
        let (d, d_set) = match g.top.last() {
            None => (0, BTreeSet::new()),
            Some(&m) => (m + 1, (0..m).filter(|x| !g.top.contains(x)).collect()),
        };
        (c, c_set, d, d_set)
    }

    /// The predicted sumset at a given top element `f`, in increasing order.
    pub fn decomposition(&self, f: i64) -> Vec<i64> {
        let mut out: Vec<i64> = self.c_set.iter().copied().collect();
        let hi = if self.d == 0 { f } else { f - self.d };
        out.extend(self.c..=hi);
        out.extend(self.d_set.iter().rev().map(|x| f - x));
        out
    }

    /// True when `C`, the middle interval and `F − D` are pairwise disjoint
    /// and ordered.
    pub fn parts_disjoint(&self, f: i64) -> bool {
        let hi = if self.d == 0 { f } else { f - self.d };
        let c_ok = self.c_set.last().is_none_or(|&x| x < self.c);
        let d_ok = self.d_set.iter().all(|&x| f - x > hi);
        c_ok && d_ok && self.c <= hi
    }
}

/// Walks the diagonal `h = (τ,…,τ)` until the gap profile is unchanged for
/// `window` consecutive steps with the gaps clear of the split point.
pub fn structure_sets(
    p: &NormalizedIntegerProblem,
    max_threshold: usize,
    window: usize,
) -> Result<StructureReport> {
    if p.gcd != 1 {
        return Err(Error::GcdNotOne(p.gcd));
    }
    let problem = p.to_problem()?;
    let r = p.r();
    let mut current = problem.base().clone();
    let mut run: Vec<(usize, GapProfile)> = Vec::new();
    for tau in 0..=max_threshold + window {
        if tau > 0 {
            for a in problem.summands() {
                current = set_sum(&current, a)?;
            }
        }
        let h = vec![tau; r];
        let f = p.top(&h);
        let sorted = current.sorted_scalars().expect("integer elements");
        let profile = gap_profile(&sorted, f);
        let clear = split_is_interior(&profile, f);
        match run.last() {
            Some((_, prev)) if clear && *prev == profile => run.push((tau, profile)),
            _ if clear => run = vec![(tau, profile)],
            _ => run.clear(),
        }
        if run.len() > window {
            let (start, g) = &run[0];
            if *start > max_threshold {
                break;
            }
            let (c, c_set, d, d_set) = StructureReport::from_profile(g);
            let h_star = vec![*start; r];
            return Ok(StructureReport {
                c,
                c_set,
                d,
                d_set,
                delta: (g.low.len() + g.top.len()) as i64,
                g_low: g.low.clone(),
                g_top: g.top.clone(),
                top_at_h_star: p.top(&h_star),
                h_star,
                certified: run.iter().map(|(t, _)| *t).collect(),
                b_star: p.b_star,
                a_star: p.a_star.clone(),
            });
        }
    }
    Err(Error::NotStabilized(max_threshold))
}

/// Both gap sets stay strictly away from `⌊F/2⌋`, so the middle interval
/// straddles the split.
fn split_is_interior(g: &GapProfile, f: i64) -> bool {
    let mid = f.div_euclid(2);
    let low_ok = g.low.last().is_none_or(|&m| m < mid);
    let top_ok = g.top.last().is_none_or(|&m| f - m > mid + 1);
    low_ok && top_ok
}

/// One failed check from [`verify_multilinear`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discrepancy {
    /// Fitted polynomial differs from `Σ a*ᵢhᵢ + b* + 1 − Δ`.
    Polynomial { fitted: String, expected: String },
    /// Decomposition does not reproduce the enumerated sumset at `h`.
    Decomposition { h: Vec<usize> },
    /// `F(h) + 1 − γ(h) ≠ Δ` at `h`.
    Delta { h: Vec<usize>, observed: i64 },
}

/// `Σ a*ᵢhᵢ + b* + 1 − Δ` as a polynomial.
pub fn multilinear_polynomial(p: &NormalizedIntegerProblem, delta: i64) -> Polynomial<BigInt> {
    let r = p.r();
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let mut terms = vec![(vec![0; r], q(p.b_star + 1 - delta))];
    for (i, &a) in p.a_star.iter().enumerate() {
        let mut e = vec![0; r];
        e[i] = 1;
        terms.push((e, q(a)));
    }
    Polynomial::from_terms(r, &terms)
}

/// Compares the fit against the multilinear formula and re-derives the
/// sumset from the decomposition at every certified step.
pub fn verify_multilinear(
    p: &NormalizedIntegerProblem,
    report: &StructureReport,
    fit: &FittedPolynomial<BigInt>,
) -> Result<Vec<Discrepancy>> {
    let mut out = Vec::new();
    let expected = multilinear_polynomial(p, report.delta);
    if fit.polynomial != expected {
        out.push(Discrepancy::Polynomial {
            fitted: fit.polynomial.to_string(),
            expected: expected.to_string(),
        });
    }
    let problem = p.to_problem()?;
    let r = p.r();
    let mut current = problem.base().clone();
    let last = *report.certified.last().unwrap_or(&0);
    for tau in 0..=last {
        if tau > 0 {
            for a in problem.summands() {
                current = set_sum(&current, a)?;
            }
        }
        if !report.certified.contains(&tau) {
            continue;
        }
        let h = vec![tau; r];
        let f = p.top(&h);
        let sorted = current.sorted_scalars().expect("integer elements");
        if report.decomposition(f) != sorted || !report.parts_disjoint(f) {
            out.push(Discrepancy::Decomposition { h: h.clone() });
        }
        let observed = f + 1 - sorted.len() as i64;
        if observed != report.delta {
            out.push(Discrepancy::Delta { h, observed });
        }
    }
    Ok(out)
}

/// Largest integer not a nonnegative combination of `generators`, or −1
/// when every integer is. Dynamic programming over `[0, min·max]`.
pub fn frobenius_number(generators: &[i64]) -> Result<i64> {
    Ok(representable_table(generators)?
        .iter()
        .rposition(|&ok| !ok)
        .map_or(-1, |i| i as i64))
}

/// Number of nonnegative integers not representable by `generators`.
pub fn gap_count(generators: &[i64]) -> Result<usize> {
    Ok(representable_table(generators)?
        .iter()
        .filter(|&&ok| !ok)
        .count())
}

fn representable_table(generators: &[i64]) -> Result<Vec<bool>> {
    if generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    if let Some(&g) = generators.iter().find(|&&g| g <= 0) {
        return Err(Error::BadGenerator(g));
    }
    let gcd = generators.iter().fold(0u64, |g, &x| g.gcd(&(x as u64)));
    if gcd != 1 {
        return Err(Error::GcdNotOne(gcd));
    }
    let lo = *generators.iter().min().unwrap() as usize;
    let hi = *generators.iter().max().unwrap() as usize;
    let n = lo.checked_mul(hi).ok_or(Error::Overflow)?;
    let mut ok = vec![false; n + 1];
    ok[0] = true;
    for x in 1..=n {
        ok[x] = generators
            .iter()
            .any(|&g| g as usize <= x && ok[x - g as usize]);
    }
    Ok(ok)
}
