//! Dense arrays over boxes `∏[0, Hᵢ]` of `ℕ₀ʳ`, stored in lexicographic
//! order (first coordinate most significant).

use crate::error::{Error, Result};

/// A value at every lattice point of a box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid<T> {
    upper: Vec<usize>,
    data: Vec<T>,
}

/// Number of points in `∏[0, Hᵢ]`, or `None` on overflow.
pub fn box_len(upper: &[usize]) -> Option<usize> {
    upper
        .iter()
        .try_fold(1usize, |acc, &h| acc.checked_mul(h.checked_add(1)?))
}

/// Iterates the points of `∏[lo_i, hi_i]` in lexicographic order.
pub fn points_between(lo: &[usize], hi: &[usize]) -> impl Iterator<Item = Vec<usize>> {
    let lo = lo.to_vec();
    let hi = hi.to_vec();
    let empty = lo.iter().zip(&hi).any(|(l, h)| l > h);
    let mut next = if empty { None } else { Some(lo.clone()) };
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut n = cur.clone();
        let mut i = n.len();
        while i > 0 {
            i -= 1;
            if n[i] < hi[i] {
                n[i] += 1;
                next = Some(n);
                break;
            }
            n[i] = lo[i];
        }
        Some(cur)
    })
}

/// Iterates the points of `∏[0, Hᵢ]` in lexicographic order.
pub fn points(upper: &[usize]) -> impl Iterator<Item = Vec<usize>> {
    points_between(&vec![0; upper.len()], upper)
}

impl<T> Grid<T> {
    /// Fills the box by evaluating `f` at every point, in lexicographic order.
    pub fn from_fn(upper: &[usize], mut f: impl FnMut(&[usize]) -> T) -> Self {
        let data = points(upper).map(|p| f(&p)).collect();
        Grid {
            upper: upper.to_vec(),
            data,
        }
    }

    /// Wraps data already laid out in lexicographic order.
    pub fn from_vec(upper: &[usize], data: Vec<T>) -> Result<Self> {
        match box_len(upper) {
            Some(n) if n == data.len() => Ok(Grid {
                upper: upper.to_vec(),
                data,
            }),
            _ => Err(Error::DimensionMismatch {
                expected: box_len(upper).unwrap_or(usize::MAX),
                got: data.len(),
            }),
        }
    }

    /// Inclusive upper corner `H`.
    pub fn upper(&self) -> &[usize] {
        &self.upper
    }

    pub fn arity(&self) -> usize {
        self.upper.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn contains(&self, h: &[usize]) -> bool {
        h.len() == self.upper.len() && h.iter().zip(&self.upper).all(|(x, u)| x <= u)
    }

    /// Flat index of `h`; caller guarantees `h` is inside the box.
    pub fn offset(&self, h: &[usize]) -> usize {
        h.iter()
            .zip(&self.upper)
            .fold(0, |acc, (&x, &u)| acc * (u + 1) + x)
    }

    /// Distance between flat indices of neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.upper[axis + 1..].iter().map(|u| u + 1).product()
    }

    pub fn get(&self, h: &[usize]) -> Option<&T> {
        if self.contains(h) {
            Some(&self.data[self.offset(h)])
        } else {
            None
        }
    }

    pub fn get_mut(&mut self, h: &[usize]) -> Option<&mut T> {
        if self.contains(h) {
            let i = self.offset(h);
            Some(&mut self.data[i])
        } else {
            None
        }
    }

    /// Points paired with their values, lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &T)> {
        points(&self.upper).zip(self.data.iter())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            upper: self.upper.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    pub(crate) fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }
}

impl<T: Clone> Grid<T> {
    /// The sub-box `∏[lo_i, hi_i]`, re-based at the origin.
    pub fn slice(&self, lo: &[usize], hi: &[usize]) -> Result<Grid<T>> {
        if lo.len() != self.arity() || hi.len() != self.arity() {
            return Err(Error::DimensionMismatch {
                expected: self.arity(),
                got: lo.len(),
            });
        }
        if !self.contains(hi) || lo.iter().zip(hi).any(|(l, h)| l > h) {
            return Err(Error::GridOutsideBox);
        }
        let upper: Vec<usize> = lo.iter().zip(hi).map(|(l, h)| h - l).collect();
        let data = points_between(lo, hi)
            .map(|p| self.data[self.offset(&p)].clone())
            .collect();
        Ok(Grid { upper, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_lexicographic() {
        let pts: Vec<_> = points(&[1, 2]).collect();
        assert_eq!(
            pts,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 1],
                vec![1, 2]
            ]
        );
    }

    #[test]
    fn offsets_follow_iteration_order() {
        let g = Grid::from_fn(&[2, 3, 1], |p| p.to_vec());
        for (i, (p, v)) in g.iter().enumerate() {
            assert_eq!(g.offset(&p), i);
            assert_eq!(&p, v);
        }
        assert_eq!(g.stride(0), 8);
        assert_eq!(g.stride(2), 1);
    }

    #[test]
    fn slice_rebases() {
        let g = Grid::from_fn(&[3, 3], |p| p[0] * 10 + p[1]);
        let s = g.slice(&[1, 2], &[3, 3]).unwrap();
        assert_eq!(s.upper(), &[2, 1]);
        assert_eq!(s.values(), &[12, 13, 22, 23, 32, 33]);
        assert_eq!(g.slice(&[0, 0], &[4, 0]), Err(Error::GridOutsideBox));
    }

    #[test]
    fn zero_dimensional_box_has_one_point() {
        assert_eq!(points(&[]).count(), 1);
        assert_eq!(box_len(&[]), Some(1));
    }
}
