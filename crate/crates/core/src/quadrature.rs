//! Small numerical primitives shared by the grid, kernel and oracle code:
//! Gauss-Legendre rules on arbitrary intervals, Lagrange interpolation
//! weights and Fornberg finite-difference weights on scattered nodes.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Gauss-Legendre rule stored on the reference interval `[0, 1]`.
#[derive(Debug, Clone)]
pub struct UnitRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UnitRule {
    pub fn gauss_legendre(points: usize) -> Self {
        let points = NonZeroUsize::new(points.max(1)).expect("nonzero");
        let rule = GaussLegendre::new(points);
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = b - a;
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (a + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Lagrange basis weights at `x` for the given nodes.
pub fn lagrange_weights(nodes: &[f64], x: f64, out: &mut [f64]) {
    debug_assert_eq!(nodes.len(), out.len());
    for (i, wi) in out.iter_mut().enumerate() {
        let mut w = 1.0;
        for (j, &xj) in nodes.iter().enumerate() {
            if i != j {
                w *= (x - xj) / (nodes[i] - xj);
            }
        }
        *wi = w;
    }
}

/// Start index of a `width`-point stencil centred on the interval
/// `[nodes[cell], nodes[cell + 1]]`, clamped to the array.
pub fn stencil_start(cell: usize, width: usize, n: usize) -> usize {
    let half = width / 2;
    let start = (cell + 1).saturating_sub(half);
    start.min(n.saturating_sub(width))
}

/// Index of the interval containing `x` (clamped to the last interval).
pub fn locate(nodes: &[f64], x: f64) -> usize {
    let n = nodes.len();
    if x <= nodes[0] {
        return 0;
    }
    if x >= nodes[n - 1] {
        return n - 2;
    }
    match nodes.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(i) => i.min(n - 2),
        Err(i) => i - 1,
    }
}

/// Fornberg's recursion for finite-difference weights.
///
/// Returns `weights[m][j]` for derivative orders `m = 0..=max_order` at the
/// point `z` using the nodes `x`.
pub fn fornberg_weights(z: f64, x: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Derivative of order `order` at `z` of the polynomial through `(x, y)`.
pub fn polynomial_derivative(x: &[f64], y: &[f64], z: f64, order: usize) -> f64 {
    let w = fornberg_weights(z, x, order);
    w[order].iter().zip(y).map(|(a, b)| a * b).sum()
}
