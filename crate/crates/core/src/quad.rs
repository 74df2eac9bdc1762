//! Gaussian quadrature rules.
//!
//! Gauss-Legendre integrates over [-1, 1] with weight 1 and is exact for
//! polynomials of degree <= 2n-1. Gauss-Hermite integrates over the real
//! line with weight e^{-x^2} and is used to take expectations against
//! Gaussian noise.

use nalgebra::DMatrix;

/// An n-node Gauss-Legendre rule on [-1, 1].
///
/// Nodes are the roots of the degree-n Legendre polynomial, found by Newton
/// iteration from the Chebyshev-like initial guesses; weights follow from
/// w_i = 2 / ((1 - x_i^2) P_n'(x_i)^2).
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be at least 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Roots come in +/- pairs; solve the first half and mirror.
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (_, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of `f` over [-1, 1].
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integral of `f` over [a, b] via the affine change of variables.
    pub fn integrate_on<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let scale = 0.5 * (b - a);
        scale * self.integrate(|t| f(mid + scale * t))
    }
}

/// Composite Gauss-Legendre on [-1, 1]: `panels` equal subintervals, each
/// integrated with an `order`-node rule. An even panel count puts a panel
/// boundary at 0, so kinks there (e.g. |x|) do not spoil convergence.
pub fn composite_integrate<F: Fn(f64) -> f64>(rule: &GaussLegendre, panels: usize, f: F) -> f64 {
    assert!(panels >= 1);
    let width = 2.0 / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = -1.0 + p as f64 * width;
        total += rule.integrate_on(a, a + width, &f);
    }
    total
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let p_next = ((2 * k + 1) as f64 * x * p - k as f64 * p_prev) / (k + 1) as f64;
        p_prev = p;
        p = p_next;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

/// An n-node Gauss-Hermite rule for integrals of the form
/// `int f(x) e^{-x^2} dx` over the real line.
///
/// Built by the Golub-Welsch method: nodes are the eigenvalues of the
/// symmetric tridiagonal Jacobi matrix with off-diagonals sqrt(i/2), and
/// weights are sqrt(pi) times the squared first eigenvector components.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            let b = (i as f64 / 2.0).sqrt();
            jacobi[(i - 1, i)] = b;
            jacobi[(i, i - 1)] = b;
        }
        let eigen = jacobi.symmetric_eigen();
        let mu0 = std::f64::consts::PI.sqrt();
        let mut pairs: Vec<(f64, f64)> = eigen
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                let v0 = eigen.eigenvectors[(0, j)];
                (x, mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// E[f(Z)] for Z ~ Normal(0, sigma^2).
    pub fn gaussian_expectation<F: Fn(f64) -> f64>(&self, sigma: f64, f: F) -> f64 {
        let scale = std::f64::consts::SQRT_2 * sigma;
        let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(scale * x))
            .sum::<f64>()
            * inv_sqrt_pi
    }
}
