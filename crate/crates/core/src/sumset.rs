//! Sumsets `B + h₁A₁ + ⋯ + hᵣAᵣ` and growth tables over boxes of `ℕ₀ʳ`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{self, Grid};
use crate::semigroup::{Element, ElementSet, SemigroupSpec};

/// `B` together with the summands `A₁,…,Aᵣ`, all nonempty, over one spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    spec: Arc<SemigroupSpec>,
    base: ElementSet,
    summands: Vec<ElementSet>,
}

impl Problem {
    pub fn new(base: ElementSet, summands: Vec<ElementSet>) -> Result<Self> {
        if summands.is_empty() {
            return Err(Error::Unsupported(
                "a problem needs at least one summand".into(),
            ));
        }
        if base.is_empty() {
            return Err(Error::EmptySet("B".into()));
        }
        for (i, a) in summands.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::EmptySet(format!("A_{}", i + 1)));
            }
            if !a.same_spec(&base) {
                return Err(Error::SpecMismatch);
            }
        }
        Ok(Problem {
            spec: Arc::clone(base.spec()),
            base,
            summands,
        })
    }

    /// Shorthand for problems over a 1-dimensional spec.
    pub fn from_ints(spec: SemigroupSpec, base: &[i64], summands: &[&[i64]]) -> Result<Self> {
        let spec = Arc::new(spec);
        let base = ElementSet::from_ints(&spec, base)?;
        let summands = summands
            .iter()
            .map(|a| ElementSet::from_ints(&spec, a))
            .collect::<Result<Vec<_>>>()?;
        Problem::new(base, summands)
    }

    pub fn spec(&self) -> &Arc<SemigroupSpec> {
        &self.spec
    }

    pub fn base(&self) -> &ElementSet {
        &self.base
    }

    pub fn summands(&self) -> &[ElementSet] {
        &self.summands
    }

    /// Number of summands `r`.
    pub fn r(&self) -> usize {
        self.summands.len()
    }

    /// `kᵢ = |Aᵢ|`.
    pub fn k(&self) -> Vec<usize> {
        self.summands.iter().map(ElementSet::len).collect()
    }

    /// `s = k₁ + ⋯ + kᵣ`.
    pub fn s(&self) -> usize {
        self.k().iter().sum()
    }

    /// The same problem with `B` replaced by `B + {t}`.
    pub fn translate_base(&self, t: &Element) -> Result<Self> {
        let shift = ElementSet::new(&self.spec, [t.clone()])?;
        Problem::new(set_sum(&self.base, &shift)?, self.summands.clone())
    }

    fn check_dim(&self, h: &[usize]) -> Result<()> {
        if h.len() != self.r() {
            return Err(Error::DimensionMismatch {
                expected: self.r(),
                got: h.len(),
            });
        }
        Ok(())
    }
}

/// `{ x + y : x ∈ X, y ∈ Y }`.
pub fn set_sum(x: &ElementSet, y: &ElementSet) -> Result<ElementSet> {
    if !x.same_spec(y) {
        return Err(Error::SpecMismatch);
    }
    let spec = x.spec();
    let mut out = HashSet::with_capacity(x.len().saturating_mul(y.len()).min(1 << 20));
    for a in x.iter() {
        for b in y.iter() {
            out.insert(spec.add_canonical(a, b)?);
        }
    }
    Ok(ElementSet::from_canonical(spec, out))
}

/// `hA`, with `0A = {0}`.
pub fn h_fold(a: &ElementSet, h: usize) -> Result<ElementSet> {
    let mut acc = ElementSet::singleton_identity(a.spec());
    for _ in 0..h {
        acc = set_sum(&acc, a)?;
    }
    Ok(acc)
}

/// `B + h₁A₁ + ⋯ + hᵣAᵣ`.
pub fn combined_sumset(p: &Problem, h: &[usize]) -> Result<ElementSet> {
    p.check_dim(h)?;
    let mut acc = p.base.clone();
    for (a, &hi) in p.summands.iter().zip(h) {
        if hi > 0 {
            acc = set_sum(&acc, &h_fold(a, hi)?)?;
        }
    }
    Ok(acc)
}

/// `C(n, k)` as a big integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n.saturating_sub(k));
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `|B| · ∏ C(hᵢ+kᵢ−1, kᵢ−1)`: the number of formal sums `b + u₁ + ⋯ + uᵣ`
/// before equal elements are identified, and hence an upper bound on `γ(h)`.
pub fn symbol_bound(p: &Problem, h: &[usize]) -> Result<BigUint> {
    p.check_dim(h)?;
    Ok(p.summands
        .iter()
        .zip(h)
        .fold(BigUint::from(p.base.len()), |acc, (a, &hi)| {
            let k = a.len() as u64;
            acc * binomial(hi as u64 + k - 1, k - 1)
        }))
}

/// Reference enumeration of the sumset: every `b ∈ B` combined with every
/// multiset of size `hᵢ` drawn from each `Aᵢ`. Independent of [`set_sum`].
pub fn brute_force_sumset(p: &Problem, h: &[usize], cap: u64) -> Result<ElementSet> {
    let needed = symbol_bound(p, h)?;
    if needed > BigUint::from(cap) {
        return Err(Error::EnumerationCapExceeded {
            needed: needed.to_string(),
            cap,
        });
    }
    let spec = &p.spec;
    let mut multiset_sums = Vec::with_capacity(p.r());
    for (a, &hi) in p.summands.iter().zip(h) {
        let elems = a.sorted();
        let mut sums = Vec::new();
        multisets(spec, &elems, hi, 0, spec.identity(), &mut sums)?;
        multiset_sums.push(sums);
    }
    let mut out = HashSet::new();
    for b in p.base.iter() {
        extend_sums(spec, &multiset_sums, b.clone(), &mut out)?;
    }
    Ok(ElementSet::from_canonical(spec, out))
}

fn multisets(
    spec: &SemigroupSpec,
    elems: &[Element],
    remaining: usize,
    start: usize,
    acc: Element,
    out: &mut Vec<Element>,
) -> Result<()> {
    if remaining == 0 {
        out.push(acc);
        return Ok(());
    }
    for j in start..elems.len() {
        let next = spec.add(&acc, &elems[j])?;
        multisets(spec, elems, remaining - 1, j, next, out)?;
    }
    Ok(())
}

fn extend_sums(
    spec: &SemigroupSpec,
    rest: &[Vec<Element>],
    acc: Element,
    out: &mut HashSet<Element>,
) -> Result<()> {
    match rest.split_first() {
        None => {
            out.insert(acc);
        }
        Some((first, tail)) => {
            for u in first {
                extend_sums(spec, tail, spec.add(&acc, u)?, out)?;
            }
        }
    }
    Ok(())
}

/// How a growth table is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Incremental recurrence `S(h + eᵢ) = S(h) + Aᵢ` over a frontier.
    #[default]
    Memoized,
    /// Independent [`combined_sumset`] call per lattice point.
    Brute,
}

/// Which sumsets a growth table keeps after it is built.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Retain {
    #[default]
    None,
    All,
    Points(BTreeSet<Vec<usize>>),
}

impl Retain {
    fn wants(&self, h: &[usize]) -> bool {
        match self {
            Retain::None => false,
            Retain::All => true,
            Retain::Points(pts) => pts.contains(h),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GrowthOptions {
    pub mode: Mode,
    /// Coordinate priority for the memoized traversal, most significant
    /// first. `None` is the identity order.
    pub order: Option<Vec<usize>>,
    pub retain: Retain,
    /// Upper limit on the total number of elements held by live sets.
    pub max_live_elements: usize,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            mode: Mode::Memoized,
            order: None,
            retain: Retain::None,
            max_live_elements: 50_000_000,
        }
    }
}

/// `γ(h)` at every point of a box `∏[0, Hᵢ]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthTable {
    k: Vec<usize>,
    gamma: Grid<u64>,
    retained: BTreeMap<Vec<usize>, ElementSet>,
}

impl GrowthTable {
    /// Builds a table from precomputed values; used by tests and loaders.
    pub fn from_values(k: Vec<usize>, gamma: Grid<u64>) -> Result<Self> {
        if k.len() != gamma.arity() {
            return Err(Error::DimensionMismatch {
                expected: k.len(),
                got: gamma.arity(),
            });
        }
        Ok(GrowthTable {
            k,
            gamma,
            retained: BTreeMap::new(),
        })
    }

    pub fn r(&self) -> usize {
        self.k.len()
    }

    /// Summand sizes of the problem the table came from.
    pub fn k(&self) -> &[usize] {
        &self.k
    }

    pub fn upper(&self) -> &[usize] {
        self.gamma.upper()
    }

    pub fn gamma(&self) -> &Grid<u64> {
        &self.gamma
    }

    pub fn get(&self, h: &[usize]) -> Option<u64> {
        self.gamma.get(h).copied()
    }

    /// Mutable access to a single entry, for fault-injection in oracle tests.
    pub fn get_mut(&mut self, h: &[usize]) -> Option<&mut u64> {
        self.gamma.get_mut(h)
    }

    pub fn retained(&self) -> &BTreeMap<Vec<usize>, ElementSet> {
        &self.retained
    }

    /// CSV with header `h_1,…,h_r,gamma`, rows in lexicographic `h` order.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 1..=self.r() {
            let _ = write!(s, "h_{i},");
        }
        s.push_str("gamma\n");
        for (h, g) in self.gamma.iter() {
            for x in h {
                let _ = write!(s, "{x},");
            }
            let _ = writeln!(s, "{g}");
        }
        s
    }
}

/// Computes `γ` over `∏[0, Hᵢ]`.
pub fn growth_table(p: &Problem, upper: &[usize], opts: &GrowthOptions) -> Result<GrowthTable> {
    p.check_dim(upper)?;
    if lattice::box_len(upper).is_none() {
        return Err(Error::BudgetExceeded(upper.to_vec()));
    }
    match opts.mode {
        Mode::Memoized => memoized(p, upper, opts),
        Mode::Brute => brute(p, upper, opts),
    }
}

fn brute(p: &Problem, upper: &[usize], opts: &GrowthOptions) -> Result<GrowthTable> {
    let pts: Vec<Vec<usize>> = lattice::points(upper).collect();
    let sets = pts
        .par_iter()
        .map(|h| {
            let s = combined_sumset(p, h)?;
            if s.len() > opts.max_live_elements {
                return Err(Error::BudgetExceeded(h.clone()));
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let gamma = Grid::from_vec(upper, sets.iter().map(|s| s.len() as u64).collect())?;
    let retained = pts
        .into_iter()
        .zip(sets)
        .filter(|(h, _)| opts.retain.wants(h))
        .collect();
    Ok(GrowthTable {
        k: p.k(),
        gamma,
        retained,
    })
}

fn memoized(p: &Problem, upper: &[usize], opts: &GrowthOptions) -> Result<GrowthTable> {
    let r = p.r();
    let order: Vec<usize> = match &opts.order {
        Some(o) => {
            let mut sorted = o.clone();
            sorted.sort_unstable();
            if sorted != (0..r).collect::<Vec<_>>() {
                return Err(Error::Unsupported(format!(
                    "traversal order {o:?} is not a permutation of 0..{r}"
                )));
            }
            o.clone()
        }
        None => (0..r).collect(),
    };
    // Work in permuted coordinates: q[j] = h[order[j]].
    let q_upper: Vec<usize> = order.iter().map(|&i| upper[i]).collect();
    let to_h = |q: &[usize]| {
        let mut h = vec![0; r];
        for (j, &i) in order.iter().enumerate() {
            h[i] = q[j];
        }
        h
    };
    // Position of the last nonzero permuted coordinate (0 for the origin).
    let last_nonzero = |q: &[usize]| q.iter().rposition(|&x| x > 0).unwrap_or(0);
    // Lexicographically last successor direction of q still inside the box.
    let last_successor = |q: &[usize]| (last_nonzero(q)..r).find(|&j| q[j] < q_upper[j]);

    let mut gamma = Grid::from_vec(upper, vec![0u64; lattice::box_len(upper).unwrap()])?;
    let mut live: HashMap<Vec<usize>, ElementSet> = HashMap::new();
    let mut live_elements = 0usize;
    let mut retained = BTreeMap::new();

    for q in lattice::points(&q_upper) {
        let set = match q.iter().rposition(|&x| x > 0) {
            None => p.base.clone(),
            Some(j) => {
                let mut pred = q.clone();
                pred[j] -= 1;
                let next = set_sum(&live[&pred], &p.summands[order[j]])?;
                if last_successor(&pred) == Some(j) {
                    let done = live.remove(&pred).expect("predecessor is live");
                    live_elements -= done.len();
                }
                next
            }
        };
        let h = to_h(&q);
        *gamma.get_mut(&h).expect("point inside box") = set.len() as u64;
        if opts.retain.wants(&h) {
            retained.insert(h.clone(), set.clone());
        }
        if last_successor(&q).is_some() {
            live_elements += set.len();
            if live_elements > opts.max_live_elements {
                return Err(Error::BudgetExceeded(h));
            }
            live.insert(q, set);
        }
    }
    debug_assert!(live.is_empty());
    Ok(GrowthTable {
        k: p.k(),
        gamma,
        retained,
    })
}

/// Result of comparing two growth tables point by point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub h: Vec<usize>,
    pub left: u64,
    pub right: u64,
}

/// First lattice point (lexicographically) where two tables differ.
pub fn first_divergence(a: &GrowthTable, b: &GrowthTable) -> Option<Divergence> {
    if a.upper() != b.upper() {
        return Some(Divergence {
            h: Vec::new(),
            left: a.gamma.len() as u64,
            right: b.gamma.len() as u64,
        });
    }
    a.gamma
        .iter()
        .zip(b.gamma.values())
        .find(|((_, x), y)| x != y)
        .map(|((h, &left), &right)| Divergence { h, left, right })
}
