#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sumset_growth::{Component, ElementSet, Problem, SemigroupSpec};

/// The ambient semigroup of a test case, described without the crate.
#[derive(Debug, Clone)]
pub enum Ambient {
    /// `None` is a free `ℤ` coordinate, `Some(m)` is `ℤ/m`.
    Product(Vec<Option<i64>>),
    Table {
        rows: Vec<Vec<usize>>,
        identity: usize,
    },
}

#[derive(Debug, Clone)]
pub struct Case {
    pub label: String,
    pub family: Family,
    pub ambient: Ambient,
    pub base: Vec<Vec<i64>>,
    pub summands: Vec<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    N0,
    Z2,
    Modular,
    Table,
}

impl Case {
    pub fn r(&self) -> usize {
        self.summands.len()
    }

    pub fn k(&self) -> Vec<usize> {
        self.summands.iter().map(|a| a.len()).collect()
    }

    pub fn is_finite(&self) -> bool {
        match &self.ambient {
            Ambient::Product(c) => c.iter().all(Option::is_some),
            Ambient::Table { .. } => true,
        }
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        match &self.ambient {
            Ambient::Product(comps) => comps
                .iter()
                .zip(x.iter().zip(y))
                .map(|(m, (a, b))| match m {
                    None => a + b,
                    Some(m) => (a + b).rem_euclid(*m),
                })
                .collect(),
            Ambient::Table { rows, .. } => vec![rows[x[0] as usize][y[0] as usize] as i64],
        }
    }

    pub fn spec(&self) -> SemigroupSpec {
        match &self.ambient {
            Ambient::Product(comps) => SemigroupSpec::product(
                comps
                    .iter()
                    .map(|m| match m {
                        None => Component::Free,
                        Some(m) => Component::Modular(*m as u64),
                    })
                    .collect(),
            )
            .unwrap(),
            Ambient::Table { rows, identity } => SemigroupSpec::table(rows, *identity).unwrap(),
        }
    }

    pub fn problem(&self) -> Problem {
        let spec = Arc::new(self.spec());
        let set = |v: &Vec<Vec<i64>>| ElementSet::from_raw(&spec, v.iter().cloned()).unwrap();
        Problem::new(set(&self.base), self.summands.iter().map(set).collect()).unwrap()
    }

    /// Integer lists of an ℕ₀ case, if it is one.
    pub fn integer_sets(&self) -> Option<(Vec<i64>, Vec<Vec<i64>>)> {
        if self.family != Family::N0 {
            return None;
        }
        let flat = |v: &Vec<Vec<i64>>| v.iter().map(|e| e[0]).collect::<Vec<_>>();
        Some((flat(&self.base), self.summands.iter().map(flat).collect()))
    }
}

/// `B + h₁A₁ + ⋯ + hᵣAᵣ` by repeated set addition, element by element.
pub fn naive_sumset(case: &Case, h: &[usize]) -> BTreeSet<Vec<i64>> {
    let mut cur: BTreeSet<Vec<i64>> = case.base.iter().cloned().collect();
    for (a, &hi) in case.summands.iter().zip(h) {
        for _ in 0..hi {
            let mut next = BTreeSet::new();
            for s in &cur {
                for x in a {
                    next.insert(case.add(s, x));
                }
            }
            cur = next;
        }
    }
    cur
}

pub fn set_as_vecs(s: &ElementSet) -> BTreeSet<Vec<i64>> {
    s.iter().map(|e| e.to_vec()).collect()
}

/// All points of `∏[0, upper_i]`, first coordinate most significant.
pub fn box_points(upper: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &u in upper {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=u).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

fn distinct<T: Ord + Clone>(
    rng: &mut ChaCha8Rng,
    n: usize,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> T,
) -> Vec<T> {
    let mut set = BTreeSet::new();
    let mut tries = 0;
    while set.len() < n && tries < 200 {
        set.insert(draw(rng));
        tries += 1;
    }
    set.into_iter().collect()
}

fn relabel(rows: &[Vec<usize>], identity: usize, rng: &mut ChaCha8Rng) -> (Vec<Vec<usize>>, usize) {
    let n = rows.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut out = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            out[perm[a]][perm[b]] = perm[rows[a][b]];
        }
    }
    (out, perm[identity])
}

/// A random commutative monoid of order at most 8 from a few families.
pub fn random_table(rng: &mut ChaCha8Rng) -> (String, Vec<Vec<usize>>, usize) {
    let table = |n: usize, f: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
        (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect()
    };
    let (name, rows, e) = match rng.gen_range(0..6) {
        0 => {
            let m = rng.gen_range(2..=8);
            (format!("Z/{m}"), table(m, &|a, b| (a + b) % m), 0)
        }
        1 => {
            let (p, q) = *[(2, 2), (2, 3), (2, 4), (4, 2), (3, 2)]
                .choose(rng)
                .unwrap();
            let rows = table(p * q, &|a, b| {
                ((a / q + b / q) % p) * q + (a % q + b % q) % q
            });
            (format!("Z/{p}xZ/{q}"), rows, 0)
        }
        2 => {
            let n = rng.gen_range(2..=8);
            (format!("sat{n}"), table(n, &|a, b| (a + b).min(n - 1)), 0)
        }
        3 => {
            let n = rng.gen_range(2..=8);
            (format!("max{n}"), table(n, &|a, b| a.max(b)), 0)
        }
        4 => {
            let n = rng.gen_range(2..=8);
            (format!("min{n}"), table(n, &|a, b| a.min(b)), n - 1)
        }
        _ => {
            let index = rng.gen_range(1..=4);
            let period = rng.gen_range(1..=4);
            let n = index + period;
            let reduce = move |s: usize| {
                if s < n {
                    s
                } else {
                    index + (s - index) % period
                }
            };
            (
                format!("cyc{index}+{period}"),
                table(n, &|a, b| reduce(a + b)),
                0,
            )
        }
    };
    let (rows, e) = relabel(&rows, e, rng);
    (name, rows, e)
}

type Draw = Box<dyn Fn(&mut ChaCha8Rng, bool) -> Vec<i64>>;

fn random_case(rng: &mut ChaCha8Rng, idx: usize) -> Case {
    let family = match idx % 4 {
        0 => Family::N0,
        1 => Family::Z2,
        2 => Family::Modular,
        _ => Family::Table,
    };
    let r = match family {
        Family::Z2 => rng.gen_range(1..=2),
        _ => rng.gen_range(1..=3),
    };
    let k: Vec<usize> = (0..r).map(|_| rng.gen_range(1..=4)).collect();
    let b_len = rng.gen_range(1..=3);
    let (name, ambient, draw): (String, Ambient, Draw) = match family {
        Family::N0 => {
            let top = [10, 6, 4][r - 1];
            (
                "N0".into(),
                Ambient::Product(vec![None]),
                Box::new(move |rng, base| vec![rng.gen_range(0..=if base { 6 } else { top })]),
            )
        }
        Family::Z2 => (
            "Z^2".into(),
            Ambient::Product(vec![None, None]),
            Box::new(|rng, _| vec![rng.gen_range(-2..=2), rng.gen_range(-2..=2)]),
        ),
        Family::Modular => {
            let comps = match rng.gen_range(0..3) {
                0 => vec![Some(rng.gen_range(2..=12))],
                1 => vec![None, Some(rng.gen_range(2..=6))],
                _ => vec![Some(rng.gen_range(2..=4)), Some(rng.gen_range(2..=6))],
            };
            let name = comps
                .iter()
                .map(|c| c.map_or("Z".to_string(), |m| format!("Z/{m}")))
                .collect::<Vec<_>>()
                .join("x");
            let c2 = comps.clone();
            (
                name,
                Ambient::Product(comps),
                Box::new(move |rng, _| {
                    c2.iter()
                        .map(|c| match c {
                            None => rng.gen_range(-3..=3),
                            Some(m) => rng.gen_range(0..*m),
                        })
                        .collect()
                }),
            )
        }
        Family::Table => {
            let (name, rows, identity) = random_table(rng);
            let n = rows.len() as i64;
            (
                name,
                Ambient::Table { rows, identity },
                Box::new(move |rng, _| vec![rng.gen_range(0..n)]),
            )
        }
    };
    let base = distinct(rng, b_len, |rng| draw(rng, true));
    let summands = k
        .iter()
        .map(|&ki| distinct(rng, ki, |rng| draw(rng, false)))
        .collect();
    Case {
        label: format!("#{idx} {name} r={r}"),
        family,
        ambient,
        base,
        summands,
    }
}

/// A reproducible suite of `n` problems spread evenly over the families.
pub fn suite(n: usize, seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| random_case(&mut rng, i)).collect()
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}
