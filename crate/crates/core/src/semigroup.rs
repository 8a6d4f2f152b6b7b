//! Abelian semigroups with identity, their elements, and finite element sets.
//!
//! Two kinds of ambient semigroup are supported: finite products of `ℤ` and
//! `ℤ/m`, and explicit Cayley tables. Every set operation in the crate is
//! written against [`SemigroupSpec::add`] and never assumes cancellation.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// One coordinate of a product semigroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    /// Unbounded signed integer coordinate.
    Free,
    /// Coordinate reduced modulo `m`.
    Modular(u64),
}

/// A validated Cayley table, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CayleyTable {
    order: usize,
    cells: Vec<u32>,
    identity: u32,
}

impl CayleyTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity as usize
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.cells[i * self.order + j] as usize
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// The ambient abelian semigroup `S`, containing an identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SemigroupSpec {
    Product(Vec<Component>),
    Table(CayleyTable),
}

/// Unvalidated semigroup description, as read from a problem file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RawSemigroup {
    Product {
        components: Vec<RawComponent>,
    },
    Table {
        table: Vec<Vec<i64>>,
        identity: i64,
        /// Adjoin a fresh identity element instead of using `identity`.
        #[serde(default)]
        adjoin_identity: bool,
    },
}

/// `"free"` or `{"modular": m}`; the modulus is signed so a bad value can be
/// reported rather than rejected by the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RawComponent {
    Free,
    Modular(i64),
}

/// Checks every axiom of a raw description and returns the validated spec.
///
/// Tables are scanned exhaustively, including the `O(n³)` associativity pass.
pub fn validate_spec(raw: &RawSemigroup) -> Result<SemigroupSpec> {
    match raw {
        RawSemigroup::Product { components } => {
            let mut out = Vec::with_capacity(components.len());
            for (i, c) in components.iter().enumerate() {
                out.push(match *c {
                    RawComponent::Free => Component::Free,
                    RawComponent::Modular(m) if m >= 1 => Component::Modular(m as u64),
                    RawComponent::Modular(m) => {
                        return Err(Error::BadModulus {
                            component: i,
                            modulus: m,
                        })
                    }
                });
            }
            SemigroupSpec::product(out)
        }
        RawSemigroup::Table {
            table,
            identity,
            adjoin_identity,
        } => {
            let rows = table_indices(table)?;
            if *adjoin_identity {
                let (rows, e) = adjoin_identity_rows(&rows);
                SemigroupSpec::table(&rows, e)
            } else {
                let e = usize::try_from(*identity).map_err(|_| Error::IndexOutOfRange {
                    index: *identity,
                    order: rows.len(),
                })?;
                SemigroupSpec::table(&rows, e)
            }
        }
    }
}

fn table_indices(table: &[Vec<i64>]) -> Result<Vec<Vec<usize>>> {
    let n = table.len();
    table
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| {
                    usize::try_from(v)
                        .ok()
                        .filter(|&v| v < n)
                        .ok_or(Error::IndexOutOfRange { index: v, order: n })
                })
                .collect()
        })
        .collect()
}

/// Appends a new element `n` acting as identity on an `n`-element table.
///
/// This changes the cardinality of any sumset that contains the new element,
/// which is why loaders only do it on explicit request.
pub fn adjoin_identity_rows(rows: &[Vec<usize>]) -> (Vec<Vec<usize>>, usize) {
    let n = rows.len();
    let mut out: Vec<Vec<usize>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.push(i);
            r
        })
        .collect();
    out.push((0..=n).collect());
    (out, n)
}

impl SemigroupSpec {
    pub fn product(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Malformed(
                "product needs at least one component".into(),
            ));
        }
        for (i, c) in components.iter().enumerate() {
            if let Component::Modular(0) = c {
                return Err(Error::BadModulus {
                    component: i,
                    modulus: 0,
                });
            }
        }
        Ok(SemigroupSpec::Product(components))
    }

    /// `ℤ^d`.
    pub fn free(d: usize) -> Self {
        SemigroupSpec::Product(vec![Component::Free; d])
    }

    /// `ℤ/m`.
    pub fn cyclic(m: u64) -> Result<Self> {
        Self::product(vec![Component::Modular(m)])
    }

    pub fn table(rows: &[Vec<usize>], identity: usize) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Malformed("table must have order >= 1".into()));
        }
        let mut cells = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::IndexOutOfRange {
                        index: v as i64,
                        order: n,
                    });
                }
                cells.push(v as u32);
            }
        }
        if identity >= n {
            return Err(Error::IndexOutOfRange {
                index: identity as i64,
                order: n,
            });
        }
        let t = CayleyTable {
            order: n,
            cells,
            identity: identity as u32,
        };
        for i in 0..n {
            for j in (i + 1)..n {
                if t.get(i, j) != t.get(j, i) {
                    return Err(Error::NotCommutative(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = t.get(i, j);
                for k in 0..n {
                    if t.get(ij, k) != t.get(i, t.get(j, k)) {
                        return Err(Error::NotAssociative(i, j, k));
                    }
                }
            }
        }
        for i in 0..n {
            if t.get(identity, i) != i {
                return Err(Error::NoIdentity(identity, i));
            }
        }
        Ok(SemigroupSpec::Table(t))
    }

    /// Coordinates per element (1 for tables).
    pub fn arity(&self) -> usize {
        match self {
            SemigroupSpec::Product(c) => c.len(),
            SemigroupSpec::Table(_) => 1,
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            SemigroupSpec::Product(c) => Element::Coords(SmallVec::from_elem(0, c.len())),
            SemigroupSpec::Table(t) => Element::Index(t.identity),
        }
    }

    /// Whether the semigroup is a group. Product specs always are; tables are
    /// checked by looking for an inverse of every element.
    pub fn is_group(&self) -> bool {
        match self {
            SemigroupSpec::Product(_) => true,
            SemigroupSpec::Table(t) => {
                let e = t.identity();
                (0..t.order).all(|i| (0..t.order).any(|j| t.get(i, j) == e))
            }
        }
    }

    /// Reduces raw coordinates into canonical form. Idempotent.
    pub fn canonicalize(&self, raw: &[i64]) -> Result<Element> {
        match self {
            SemigroupSpec::Product(comps) => {
                if raw.len() != comps.len() {
                    return Err(Error::ArityMismatch {
                        expected: comps.len(),
                        got: raw.len(),
                    });
                }
                Ok(Element::Coords(
                    raw.iter()
                        .zip(comps)
                        .map(|(&x, c)| match *c {
                            Component::Free => x,
                            Component::Modular(m) => reduce(x, m),
                        })
                        .collect(),
                ))
            }
            SemigroupSpec::Table(t) => {
                if raw.len() != 1 {
                    return Err(Error::ArityMismatch {
                        expected: 1,
                        got: raw.len(),
                    });
                }
                let i = raw[0];
                if i < 0 || i as usize >= t.order {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        order: t.order,
                    });
                }
                Ok(Element::Index(i as u32))
            }
        }
    }

    /// Canonicalizes an element that may already be typed.
    pub fn canonicalize_element(&self, e: &Element) -> Result<Element> {
        match e {
            Element::Coords(c) => self.canonicalize(c),
            Element::Index(i) => self.canonicalize(&[*i as i64]),
        }
    }

    /// True if `e` has the shape and range this spec requires.
    pub fn is_canonical(&self, e: &Element) -> bool {
        match (self, e) {
            (SemigroupSpec::Product(comps), Element::Coords(c)) => {
                c.len() == comps.len()
                    && c.iter().zip(comps).all(|(&x, comp)| match *comp {
                        Component::Free => true,
                        Component::Modular(m) => x >= 0 && (x as u64) < m,
                    })
            }
            (SemigroupSpec::Table(t), Element::Index(i)) => (*i as usize) < t.order,
            _ => false,
        }
    }

    /// The semigroup operation on canonical elements.
    pub fn add(&self, x: &Element, y: &Element) -> Result<Element> {
        if !self.is_canonical(x) || !self.is_canonical(y) {
            return Err(Error::SpecMismatch);
        }
        self.add_canonical(x, y)
    }

    /// [`add`](Self::add) without the canonical-form check on the inputs.
    /// Callers must guarantee both elements belong to `self`.
    #[inline]
    pub(crate) fn add_canonical(&self, x: &Element, y: &Element) -> Result<Element> {
        match (self, x, y) {
            (SemigroupSpec::Product(comps), Element::Coords(a), Element::Coords(b)) => {
                let mut out = SmallVec::with_capacity(comps.len());
                for ((&p, &q), c) in a.iter().zip(b.iter()).zip(comps) {
                    out.push(match *c {
                        Component::Free => p.checked_add(q).ok_or(Error::Overflow)?,
                        Component::Modular(m) => ((p as i128 + q as i128) % m as i128) as i64,
                    });
                }
                Ok(Element::Coords(out))
            }
            (SemigroupSpec::Table(t), Element::Index(a), Element::Index(b)) => {
                Ok(Element::Index(t.get(*a as usize, *b as usize) as u32))
            }
            _ => Err(Error::SpecMismatch),
        }
    }

    /// Every element of a finite semigroup, in canonical order. `None` when
    /// the spec has a free component.
    pub fn elements(&self) -> Option<Vec<Element>> {
        match self {
            SemigroupSpec::Table(t) => Some((0..t.order as u32).map(Element::Index).collect()),
            SemigroupSpec::Product(comps) => {
                let mut out = vec![SmallVec::<[i64; 4]>::new()];
                for c in comps {
                    let m = match c {
                        Component::Free => return None,
                        Component::Modular(m) => *m as i64,
                    };
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            (0..m).map(move |x| {
                                let mut p = prefix.clone();
                                p.push(x);
                                p
                            })
                        })
                        .collect();
                }
                Some(out.into_iter().map(Element::Coords).collect())
            }
        }
    }

    /// Description in problem-file form.
    pub fn to_raw(&self) -> RawSemigroup {
        match self {
            SemigroupSpec::Product(c) => RawSemigroup::Product {
                components: c
                    .iter()
                    .map(|c| match *c {
                        Component::Free => RawComponent::Free,
                        Component::Modular(m) => RawComponent::Modular(m as i64),
                    })
                    .collect(),
            },
            SemigroupSpec::Table(t) => RawSemigroup::Table {
                table: t
                    .rows()
                    .into_iter()
                    .map(|r| r.into_iter().map(|v| v as i64).collect())
                    .collect(),
                identity: t.identity() as i64,
                adjoin_identity: false,
            },
        }
    }
}

fn reduce(x: i64, m: u64) -> i64 {
    (x as i128).rem_euclid(m as i128) as i64
}

/// A canonical semigroup element. Ordering is lexicographic on coordinates
/// and numeric on table indices, which fixes every serialization order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Coords(SmallVec<[i64; 4]>),
    Index(u32),
}

impl Element {
    pub fn coords(c: &[i64]) -> Self {
        Element::Coords(SmallVec::from_slice(c))
    }

    /// The element as a plain integer list (table index as a 1-vector).
    pub fn to_vec(&self) -> Vec<i64> {
        match self {
            Element::Coords(c) => c.to_vec(),
            Element::Index(i) => vec![*i as i64],
        }
    }

    /// The single coordinate of a 1-dimensional element.
    pub fn scalar(&self) -> Option<i64> {
        match self {
            Element::Coords(c) if c.len() == 1 => Some(c[0]),
            Element::Index(i) => Some(*i as i64),
            _ => None,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Coords(c) if c.len() == 1 => write!(f, "{}", c[0]),
            Element::Coords(c) => {
                write!(f, "(")?;
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Element::Index(i) => write!(f, "#{i}"),
        }
    }
}

/// A finite, deduplicated set of canonical elements of one semigroup.
#[derive(Debug, Clone)]
pub struct ElementSet {
    spec: Arc<SemigroupSpec>,
    elements: HashSet<Element>,
}

impl ElementSet {
    /// Canonicalizes and deduplicates `raw`.
    pub fn new<I>(spec: &Arc<SemigroupSpec>, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = Element>,
    {
        let elements = raw
            .into_iter()
            .map(|e| spec.canonicalize_element(&e))
            .collect::<Result<HashSet<_>>>()?;
        Ok(ElementSet {
            spec: Arc::clone(spec),
            elements,
        })
    }

    /// Builds a set from raw integer coordinate lists.
    pub fn from_raw<I, V>(spec: &Arc<SemigroupSpec>, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[i64]>,
    {
        let elements = raw
            .into_iter()
            .map(|v| spec.canonicalize(v.as_ref()))
            .collect::<Result<HashSet<_>>>()?;
        Ok(ElementSet {
            spec: Arc::clone(spec),
            elements,
        })
    }

    /// 1-dimensional convenience constructor.
    pub fn from_ints(spec: &Arc<SemigroupSpec>, raw: &[i64]) -> Result<Self> {
        Self::from_raw(spec, raw.iter().map(|&x| [x]))
    }

    /// Wraps elements that are already canonical under `spec`.
    pub(crate) fn from_canonical(spec: &Arc<SemigroupSpec>, elements: HashSet<Element>) -> Self {
        ElementSet {
            spec: Arc::clone(spec),
            elements,
        }
    }

    pub fn singleton_identity(spec: &Arc<SemigroupSpec>) -> Self {
        let mut elements = HashSet::with_capacity(1);
        elements.insert(spec.identity());
        Self::from_canonical(spec, elements)
    }

    pub fn spec(&self) -> &Arc<SemigroupSpec> {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.elements.contains(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter()
    }

    /// Elements in the fixed total order.
    pub fn sorted(&self) -> Vec<Element> {
        let mut v: Vec<Element> = self.elements.iter().cloned().collect();
        v.sort_unstable();
        v
    }

    /// Sorted scalar values of a 1-dimensional set.
    pub fn sorted_scalars(&self) -> Option<Vec<i64>> {
        let mut v = self
            .elements
            .iter()
            .map(Element::scalar)
            .collect::<Option<Vec<_>>>()?;
        v.sort_unstable();
        Some(v)
    }

    pub fn same_spec(&self, other: &ElementSet) -> bool {
        same_spec(&self.spec, &other.spec)
    }
}

pub(crate) fn same_spec(a: &Arc<SemigroupSpec>, b: &Arc<SemigroupSpec>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl PartialEq for ElementSet {
    fn eq(&self, other: &Self) -> bool {
        self.same_spec(other) && self.elements == other.elements
    }
}

impl Eq for ElementSet {}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.sorted().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z() -> SemigroupSpec {
        SemigroupSpec::free(1)
    }

    #[test]
    fn product_free_is_valid() {
        let raw = RawSemigroup::Product {
            components: vec![RawComponent::Free],
        };
        assert_eq!(validate_spec(&raw).unwrap(), z());
    }

    #[test]
    fn z2_table_is_valid() {
        let spec = SemigroupSpec::table(&[vec![0, 1], vec![1, 0]], 0).unwrap();
        assert!(spec.is_group());
    }

    #[test]
    fn non_commutative_table_names_witness() {
        let err = SemigroupSpec::table(&[vec![0, 1], vec![0, 0]], 0).unwrap_err();
        assert_eq!(err, Error::NotCommutative(0, 1));
    }

    #[test]
    fn non_associative_table_is_rejected() {
        // commutative with identity 0, but (1+1)+2 = 2+2 = 0 while 1+(1+2) = 1+0 = 1
        let rows = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 0]];
        let err = SemigroupSpec::table(&rows, 0).unwrap_err();
        assert!(matches!(err, Error::NotAssociative(..)), "{err:?}");
    }

    #[test]
    fn missing_identity_is_rejected() {
        // max-semilattice on {0,1} with the wrong identity
        let err = SemigroupSpec::table(&[vec![0, 1], vec![1, 1]], 1).unwrap_err();
        assert_eq!(err, Error::NoIdentity(1, 0));
    }

    #[test]
    fn bad_modulus_is_rejected() {
        let raw = RawSemigroup::Product {
            components: vec![RawComponent::Free, RawComponent::Modular(0)],
        };
        assert_eq!(
            validate_spec(&raw).unwrap_err(),
            Error::BadModulus {
                component: 1,
                modulus: 0
            }
        );
    }

    #[test]
    fn adjoined_identity_makes_semigroup_valid() {
        // {a} with a+a = a has no separate identity element to begin with
        let raw = RawSemigroup::Table {
            table: vec![vec![0]],
            identity: 0,
            adjoin_identity: true,
        };
        let spec = validate_spec(&raw).unwrap();
        match &spec {
            SemigroupSpec::Table(t) => {
                assert_eq!(t.order(), 2);
                assert_eq!(t.identity(), 1);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn add_examples() {
        let s = z();
        let x = s
            .add(&Element::coords(&[3]), &Element::coords(&[5]))
            .unwrap();
        assert_eq!(x, Element::coords(&[8]));

        let m = SemigroupSpec::cyclic(12).unwrap();
        let x = m
            .add(&Element::coords(&[4]), &Element::coords(&[10]))
            .unwrap();
        assert_eq!(x, Element::coords(&[2]));

        let z2 = SemigroupSpec::free(2);
        let x = z2
            .add(&Element::coords(&[1, 0]), &Element::coords(&[0, 1]))
            .unwrap();
        assert_eq!(x, Element::coords(&[1, 1]));
    }

    #[test]
    fn add_rejects_foreign_elements() {
        let m = SemigroupSpec::cyclic(12).unwrap();
        assert_eq!(
            m.add(&Element::coords(&[14]), &Element::coords(&[0])),
            Err(Error::SpecMismatch)
        );
        assert_eq!(
            m.add(&Element::Index(0), &Element::coords(&[0])),
            Err(Error::SpecMismatch)
        );
    }

    #[test]
    fn add_overflow_is_reported() {
        let s = z();
        assert_eq!(
            s.add(&Element::coords(&[i64::MAX]), &Element::coords(&[1])),
            Err(Error::Overflow)
        );
    }

    #[test]
    fn canonicalize_examples() {
        let m = SemigroupSpec::cyclic(12).unwrap();
        assert_eq!(m.canonicalize(&[14]).unwrap(), Element::coords(&[2]));
        assert_eq!(m.canonicalize(&[-1]).unwrap(), Element::coords(&[11]));
        assert_eq!(z().canonicalize(&[-3]).unwrap(), Element::coords(&[-3]));
        let rows = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        let t = SemigroupSpec::table(&rows, 0).unwrap();
        assert_eq!(
            t.canonicalize(&[5]).unwrap_err(),
            Error::IndexOutOfRange { index: 5, order: 3 }
        );
        assert!(matches!(
            z().canonicalize(&[1, 2]),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn element_set_dedups_after_canonicalization() {
        let spec = Arc::new(SemigroupSpec::cyclic(12).unwrap());
        let s = ElementSet::from_ints(&spec, &[2, 14, 26, 3]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.sorted_scalars().unwrap(), vec![2, 3]);
    }

    #[test]
    fn finite_product_lists_all_elements() {
        let s = SemigroupSpec::product(vec![Component::Modular(2), Component::Modular(3)]).unwrap();
        assert_eq!(s.elements().unwrap().len(), 6);
        assert!(SemigroupSpec::free(1).elements().is_none());
    }

    fn product_spec() -> impl Strategy<Value = SemigroupSpec> {
        prop::collection::vec(
            prop_oneof![
                Just(Component::Free),
                (1u64..20).prop_map(Component::Modular)
            ],
            1..4,
        )
        .prop_map(|c| SemigroupSpec::product(c).unwrap())
    }

    fn spec_and_elems() -> impl Strategy<Value = (SemigroupSpec, Vec<Vec<i64>>)> {
        product_spec().prop_flat_map(|s| {
            let d = s.arity();
            (
                Just(s),
                prop::collection::vec(prop::collection::vec(-1000i64..1000, d), 3),
            )
        })
    }

    proptest! {
        #[test]
        fn product_axioms_hold((spec, raw) in spec_and_elems()) {
            let x = spec.canonicalize(&raw[0]).unwrap();
            let y = spec.canonicalize(&raw[1]).unwrap();
            let z = spec.canonicalize(&raw[2]).unwrap();
            let e = spec.identity();
            let xy = spec.add(&x, &y).unwrap();
            prop_assert!(spec.is_canonical(&xy));
            prop_assert_eq!(&xy, &spec.add(&y, &x).unwrap());
            prop_assert_eq!(
                spec.add(&xy, &z).unwrap(),
                spec.add(&x, &spec.add(&y, &z).unwrap()).unwrap()
            );
            prop_assert_eq!(spec.add(&e, &x).unwrap(), x);
        }

        #[test]
        fn canonicalize_is_idempotent((spec, raw) in spec_and_elems()) {
            let once = spec.canonicalize(&raw[0]).unwrap();
            prop_assert_eq!(spec.canonicalize_element(&once).unwrap(), once);
        }
    }
}
