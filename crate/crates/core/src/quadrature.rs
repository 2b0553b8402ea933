//! One-dimensional quadrature rules.

use crate::scalar::{lit, Real};

/// Nodes and weights of an `n`-point rule on a finite interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    /// Gauss–Legendre rule mapped to `[a, b]`.
    ///
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Tricomi initial guess; weights are `2 / ((1 - x^2) P_n'(x)^2)`.
    pub fn gauss_legendre(n: usize, a: T, b: T) -> Self {
        assert!(n > 0, "quadrature needs at least one node");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let half = (b - a) / lit(2.0);
        let mid = (a + b) / lit(2.0);
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Work in f64 for the node itself, then convert.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Descending x for i ascending; store ascending.
            nodes[i] = mid - half * lit(x);
            nodes[n - 1 - i] = mid + half * lit(x);
            weights[i] = half * lit(w);
            weights[n - 1 - i] = half * lit(w);
        }
        Self { nodes, weights }
    }

    /// Composite midpoint rule with `n` equal cells on `[a, b]`.
    pub fn midpoint(n: usize, a: T, b: T) -> Self {
        assert!(n > 0, "quadrature needs at least one cell");
        let h = (b - a) / T::from_usize_lossy(n);
        let nodes = (0..n).map(|i| a + h * (T::from_usize_lossy(i) + lit(0.5))).collect();
        Self {
            nodes,
            weights: vec![h; n],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Gauss–Legendre panels covering `[a, b]`, useful for integrands with
/// structure on several scales.
pub fn composite_gauss_legendre<T: Real>(panels: usize, order: usize, a: T, b: T) -> Rule<T> {
    let width = (b - a) / T::from_usize_lossy(panels);
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + width * T::from_usize_lossy(p);
        let r = Rule::gauss_legendre(order, lo, lo + width);
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    Rule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let r = Rule::<f64>::gauss_legendre(5, -1.0, 2.0);
        // degree 9 is the highest exact degree for 5 nodes
        let exact = (2f64.powi(10) - 1.0) / 10.0;
        assert_relative_eq!(r.integrate(|x| x.powi(9)), exact, max_relative = 1e-13);
        assert_relative_eq!(r.weights.iter().sum::<f64>(), 3.0, max_relative = 1e-14);
    }

    #[test]
    fn gauss_legendre_nodes_are_sorted_and_symmetric() {
        let r = Rule::<f64>::gauss_legendre(64, -1.0, 1.0);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        for i in 0..32 {
            assert_relative_eq!(r.nodes[i], -r.nodes[63 - i], epsilon = 1e-15);
        }
    }

    #[test]
    fn gaussian_integral_converges() {
        let r = Rule::<f64>::gauss_legendre(64, -8.0, 8.0);
        let v = r.integrate(|x| (-x * x).exp());
        assert_relative_eq!(v, std::f64::consts::PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn midpoint_cells_cover_interval() {
        let r = Rule::<f64>::midpoint(4, 0.0, 1.0);
        assert_eq!(r.nodes, vec![0.125, 0.375, 0.625, 0.875]);
        assert_relative_eq!(r.integrate(|x| x), 0.5);
    }

    #[test]
    fn composite_panels_match_single_rule_on_smooth_integrand() {
        let a = composite_gauss_legendre(4, 8, 0.0, 3.0).integrate(|x: f64| x.sin());
        assert_relative_eq!(a, 1.0 - 3f64.cos(), max_relative = 1e-14);
    }
}
