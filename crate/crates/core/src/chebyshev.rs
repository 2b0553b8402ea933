//! Chebyshev interpolation of smooth functions on an interval.

use crate::scalar::{lit, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct Chebyshev<T> {
    lo: T,
    hi: T,
    coeffs: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("{x} outside interpolation interval [{lo}, {hi}]")]
pub struct OutOfInterval {
    pub x: f64,
    pub lo: f64,
    pub hi: f64,
}

impl<T: Real> Chebyshev<T> {
    /// Nodes (first kind) at which `fit` expects samples, ascending.
    pub fn nodes(n: usize, lo: T, hi: T) -> Vec<T> {
        let mid = (lo + hi) / lit(2.0);
        let half = (hi - lo) / lit(2.0);
        (0..n)
            .rev()
            .map(|k| {
                let t = T::PI() * (T::from_usize_lossy(k) + lit(0.5)) / T::from_usize_lossy(n);
                mid + half * t.cos()
            })
            .collect()
    }

    /// Interpolant through `values` sampled at [`Chebyshev::nodes`].
    pub fn fit(lo: T, hi: T, values: &[T]) -> Self {
        let n = values.len();
        assert!(n > 0 && hi > lo);
        let nf = T::from_usize_lossy(n);
        // values are ascending in x, i.e. descending node index k
        let coeffs = (0..n)
            .map(|j| {
                let jf = T::from_usize_lossy(j);
                let s = values.iter().rev().enumerate().fold(T::zero(), |acc, (k, &v)| {
                    let t = T::PI() * (T::from_usize_lossy(k) + lit(0.5)) / nf;
                    acc + v * (jf * t).cos()
                });
                let scale = if j == 0 { T::one() } else { lit(2.0) };
                scale * s / nf
            })
            .collect();
        Self { lo, hi, coeffs }
    }

    /// Samples `f` at the nodes and fits.
    pub fn from_fn<E, F: FnMut(T) -> Result<T, E>>(n: usize, lo: T, hi: T, mut f: F) -> Result<Self, E> {
        let values = Self::nodes(n, lo, hi)
            .into_iter()
            .map(&mut f)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::fit(lo, hi, &values))
    }

    pub fn interval(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn local(&self, x: T) -> Result<T, OutOfInterval> {
        if !(x >= self.lo && x <= self.hi) {
            return Err(OutOfInterval {
                x: x.as_f64(),
                lo: self.lo.as_f64(),
                hi: self.hi.as_f64(),
            });
        }
        Ok((lit::<T>(2.0) * x - self.lo - self.hi) / (self.hi - self.lo))
    }

    pub fn eval(&self, x: T) -> Result<T, OutOfInterval> {
        let t = self.local(x)?;
        // Clenshaw
        let (mut b1, mut b2) = (T::zero(), T::zero());
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = lit::<T>(2.0) * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        Ok(t * b1 - b2 + self.coeffs[0])
    }

    /// Interpolant of the derivative.
    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        let mut d = vec![T::zero(); n.max(1)];
        if n > 1 {
            // c'_{j-1} = c'_{j+1} + 2 j c_j, from the top down
            for j in (1..n).rev() {
                let above = if j + 1 < n { d[j + 1] } else { T::zero() };
                d[j - 1] = above + lit::<T>(2.0) * T::from_usize_lossy(j) * self.coeffs[j];
            }
            d[0] = d[0] / lit(2.0);
            d.truncate(n - 1);
        }
        let scale = lit::<T>(2.0) / (self.hi - self.lo);
        Self {
            lo: self.lo,
            hi: self.hi,
            coeffs: d.into_iter().map(|c| c * scale).collect(),
        }
    }
}
