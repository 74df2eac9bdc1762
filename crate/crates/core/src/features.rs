//! Orthonormal Legendre feature maps on [-1, 1]^d, and the naive monomial
//! basis used as an experimental baseline.
//!
//! The 1-D building block is the L^2-normalized Legendre polynomial
//! sqrt((2n+1)/2) P_n(x), which has unit norm on [-1, 1] and satisfies
//! `int p_i p_j = delta_ij`. A multivariate feature of dimension d and
//! degree N stacks, for every multi-index (g_1,...,g_d) with total degree
//! sum g_i <= N, the product of the per-coordinate polynomials, scaled by
//! Ntilde^{-1/2} where Ntilde = binomial(N+d, d) is the number of indices.
//!
//! Normalization note: the L^2-normalized family is unbounded in sup norm
//! (its values at x = 1 grow like sqrt(n)), so the stacked vector can have
//! Euclidean norm above 1. Construction therefore computes a single global
//! `scale` = 1 / sup_x ||unscaled phi(x)||_2 on a dense grid and applies it
//! to every evaluation, restoring ||phi(x)||_2 <= 1 while keeping the
//! orthogonality structure intact (a constant rescaling commutes with
//! everything downstream).

use nalgebra::DVector;
use thiserror::Error;

/// Hard ceiling on the 1-D recurrence degree.
pub const MAX_DEGREE: usize = 64;

/// Cap on the index-set cardinality binomial(N+d, d).
pub const INDEX_SET_CAP: usize = 100_000;

/// Tolerance for points marginally outside [-1, 1].
const DOMAIN_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("evaluation point {0} lies outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("degree {n} exceeds the supported maximum {max}")]
    DegreeTooHigh { n: usize, max: usize },
    #[error("index set of size {required} exceeds the cap {cap}")]
    IndexSetOverflow { required: u128, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation requires a {expected:?} map, got {got:?}")]
    WrongKind { expected: FeatureKind, got: FeatureKind },
    #[error("dimension must be at least 1")]
    ZeroDimension,
}

/// Evaluate the L^2-normalized Legendre polynomial sqrt((2n+1)/2) P_n(x).
///
/// P_n follows the three-term recurrence
/// (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}, evaluated iteratively in
/// double precision.
pub fn eval_1d(n: usize, x: f64) -> Result<f64, FeatureError> {
    if n > MAX_DEGREE {
        return Err(FeatureError::DegreeTooHigh { n, max: MAX_DEGREE });
    }
    if x.abs() > 1.0 + DOMAIN_TOL || !x.is_finite() {
        return Err(FeatureError::OutOfDomain(x));
    }
    let norm = ((2 * n + 1) as f64 / 2.0).sqrt();
    if n == 0 {
        return Ok(norm);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let p_next = ((2 * k + 1) as f64 * x * p - k as f64 * p_prev) / (k + 1) as f64;
        p_prev = p;
        p = p_next;
    }
    Ok(norm * p)
}

/// Exponent tuple (g_1,...,g_d) of one multivariate basis element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exponents: Vec<usize>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<usize>) -> Self {
        Self { exponents }
    }

    pub fn exponents(&self) -> &[usize] {
        &self.exponents
    }

    pub fn dimension(&self) -> usize {
        self.exponents.len()
    }

    /// Sum of the per-coordinate exponents.
    pub fn total_degree(&self) -> usize {
        self.exponents.iter().sum()
    }
}

/// All multi-indices of dimension `d` with total degree <= `degree`, in
/// graded lexicographic order: ascending total degree, lexicographic within
/// a degree. The ordering is deterministic so that weight vectors indexed
/// by it are portable across runs.
pub fn enumerate_index_set(d: usize, degree: usize) -> Result<Vec<MultiIndex>, FeatureError> {
    if d == 0 {
        return Err(FeatureError::ZeroDimension);
    }
    let required = binomial(degree as u128 + d as u128, d as u128);
    if required > INDEX_SET_CAP as u128 {
        return Err(FeatureError::IndexSetOverflow { required, cap: INDEX_SET_CAP });
    }
    let mut out = Vec::with_capacity(required as usize);
    let mut current = vec![0usize; d];
    for total in 0..=degree {
        emit_compositions(&mut current, 0, total, &mut out);
    }
    Ok(out)
}

/// Append, in lexicographic order, every way of writing `remaining` as a sum
/// over coordinates `pos..d`.
fn emit_compositions(current: &mut Vec<usize>, pos: usize, remaining: usize, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for g in 0..=remaining {
        current[pos] = g;
        emit_compositions(current, pos + 1, remaining - g, out);
    }
    current[pos] = 0;
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result * (n - i) / (i + 1);
    }
    result
}

/// Which basis the map evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    /// Products of L^2-normalized Legendre polynomials, stacked and rescaled.
    LegendreOrthonormal,
    /// Plain monomials x^g: the naive polynomial baseline.
    MonomialNaive,
}

/// A fixed multivariate polynomial feature map over [-1, 1]^d.
///
/// Immutable after construction; evaluation is pure and can be called from
/// many threads at once.
#[derive(Debug, Clone)]
pub struct FeatureMap {
    dimension: usize,
    degree: usize,
    index_set: Vec<MultiIndex>,
    kind: FeatureKind,
    scale: f64,
}

impl FeatureMap {
    /// Orthonormal Legendre map of the given dimension and degree. The
    /// global rescaling factor is computed here, once, from a dense grid.
    pub fn legendre(dimension: usize, degree: usize) -> Result<Self, FeatureError> {
        if degree > MAX_DEGREE {
            return Err(FeatureError::DegreeTooHigh { n: degree, max: MAX_DEGREE });
        }
        let index_set = enumerate_index_set(dimension, degree)?;
        let mut map = Self { dimension, degree, index_set, kind: FeatureKind::LegendreOrthonormal, scale: 1.0 };
        map.scale = 1.0 / map.grid_sup_norm();
        Ok(map)
    }

    /// Monomial map with the same index set and ordering as the Legendre map
    /// of equal degree. No rescaling is applied: this is the naive baseline.
    pub fn monomial(dimension: usize, degree: usize) -> Result<Self, FeatureError> {
        if degree > MAX_DEGREE {
            return Err(FeatureError::DegreeTooHigh { n: degree, max: MAX_DEGREE });
        }
        let index_set = enumerate_index_set(dimension, degree)?;
        Ok(Self { dimension, degree, index_set, kind: FeatureKind::MonomialNaive, scale: 1.0 })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of features Ntilde = binomial(N+d, d).
    pub fn len(&self) -> usize {
        self.index_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_set.is_empty()
    }

    pub fn index_set(&self) -> &[MultiIndex] {
        &self.index_set
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    /// The global rescaling factor (1 for monomial maps).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Evaluate whichever basis this map was built over.
    pub fn evaluate(&self, x: &[f64]) -> Result<DVector<f64>, FeatureError> {
        match self.kind {
            FeatureKind::LegendreOrthonormal => self.feature_vector(x),
            FeatureKind::MonomialNaive => self.monomial_feature_vector(x),
        }
    }

    /// Orthonormal Legendre feature vector: component for (g_1,...,g_d) is
    /// scale * Ntilde^{-1/2} * prod_i eval_1d(g_i, x_i), ordered as
    /// `index_set`.
    pub fn feature_vector(&self, x: &[f64]) -> Result<DVector<f64>, FeatureError> {
        if self.kind != FeatureKind::LegendreOrthonormal {
            return Err(FeatureError::WrongKind {
                expected: FeatureKind::LegendreOrthonormal,
                got: self.kind,
            });
        }
        self.check_point(x)?;
        // One recurrence sweep per coordinate covers every multi-index.
        let table = self.legendre_table(x)?;
        let norm = 1.0 / (self.len() as f64).sqrt();
        let mut out = DVector::zeros(self.len());
        for (row, idx) in self.index_set.iter().enumerate() {
            let mut prod = 1.0;
            for (coord, &g) in idx.exponents().iter().enumerate() {
                prod *= table[coord][g];
            }
            out[row] = self.scale * norm * prod;
        }
        Ok(out)
    }

    /// Naive monomial feature vector: component for (g_1,...,g_d) is
    /// prod_i x_i^{g_i}, same index set and ordering as the Legendre map.
    pub fn monomial_feature_vector(&self, x: &[f64]) -> Result<DVector<f64>, FeatureError> {
        if self.kind != FeatureKind::MonomialNaive {
            return Err(FeatureError::WrongKind {
                expected: FeatureKind::MonomialNaive,
                got: self.kind,
            });
        }
        self.check_point(x)?;
        let mut powers: Vec<Vec<f64>> = Vec::with_capacity(self.dimension);
        for &xi in x {
            let mut col = Vec::with_capacity(self.degree + 1);
            let mut p = 1.0;
            for _ in 0..=self.degree {
                col.push(p);
                p *= xi;
            }
            powers.push(col);
        }
        let mut out = DVector::zeros(self.len());
        for (row, idx) in self.index_set.iter().enumerate() {
            let mut prod = 1.0;
            for (coord, &g) in idx.exponents().iter().enumerate() {
                prod *= powers[coord][g];
            }
            out[row] = prod;
        }
        Ok(out)
    }

    fn check_point(&self, x: &[f64]) -> Result<(), FeatureError> {
        if x.len() != self.dimension {
            return Err(FeatureError::DimensionMismatch { expected: self.dimension, got: x.len() });
        }
        for &xi in x {
            if xi.abs() > 1.0 + DOMAIN_TOL || !xi.is_finite() {
                return Err(FeatureError::OutOfDomain(xi));
            }
        }
        Ok(())
    }

    /// Normalized-Legendre values p_0(x_i)..p_N(x_i) per coordinate.
    fn legendre_table(&self, x: &[f64]) -> Result<Vec<Vec<f64>>, FeatureError> {
        let mut table = Vec::with_capacity(self.dimension);
        for &xi in x {
            let mut col = Vec::with_capacity(self.degree + 1);
            for n in 0..=self.degree {
                col.push(eval_1d(n, xi)?);
            }
            table.push(col);
        }
        Ok(table)
    }

    /// sup over a dense grid of the Euclidean norm of the unscaled vector.
    ///
    /// |P_n| attains its maximum at the endpoints, so any grid containing
    /// +/-1 recovers the exact supremum (it sits at a corner of the cube).
    fn grid_sup_norm(&self) -> f64 {
        let per_dim = grid_points_per_dim(self.dimension);
        let norm = 1.0 / (self.len() as f64).sqrt();
        let mut point = vec![0usize; self.dimension];
        let mut sup: f64 = 0.0;
        loop {
            let x: Vec<f64> = point
                .iter()
                .map(|&i| -1.0 + 2.0 * i as f64 / (per_dim - 1) as f64)
                .collect();
            let table = self.legendre_table(&x).expect("grid points lie in [-1,1]");
            let mut sq = 0.0;
            for idx in &self.index_set {
                let mut prod = 1.0;
                for (coord, &g) in idx.exponents().iter().enumerate() {
                    prod *= table[coord][g];
                }
                sq += (norm * prod) * (norm * prod);
            }
            sup = sup.max(sq.sqrt());
            // odometer increment over the grid
            let mut carry = true;
            for digit in point.iter_mut() {
                *digit += 1;
                if *digit < per_dim {
                    carry = false;
                    break;
                }
                *digit = 0;
            }
            if carry {
                break;
            }
        }
        sup
    }
}

/// Grid resolution for the sup-norm scan, bounded so the total point count
/// stays near 10^5 in any dimension.
fn grid_points_per_dim(dimension: usize) -> usize {
    let budget = 100_000f64;
    let per_dim = budget.powf(1.0 / dimension as f64).floor() as usize;
    per_dim.clamp(3, 1001) | 1 // odd, so the grid contains 0
}

/// Features over a state-action pair, the interface both learners consume.
///
/// Implementations must be pure: same inputs, same output, safe to share
/// across threads.
pub trait StateActionFeatures: Sync {
    /// Length of the feature vector.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn eval(&self, state: &[f64], action: &[f64]) -> Result<DVector<f64>, FeatureError>;
}

/// A polynomial map applied to the concatenated (state, action) vector.
#[derive(Debug, Clone)]
pub struct JointFeatureMap {
    map: FeatureMap,
    state_dim: usize,
    action_dim: usize,
}

impl JointFeatureMap {
    pub fn new(map: FeatureMap, state_dim: usize, action_dim: usize) -> Result<Self, FeatureError> {
        if map.dimension() != state_dim + action_dim {
            return Err(FeatureError::DimensionMismatch {
                expected: state_dim + action_dim,
                got: map.dimension(),
            });
        }
        Ok(Self { map, state_dim, action_dim })
    }

    pub fn map(&self) -> &FeatureMap {
        &self.map
    }
}

impl StateActionFeatures for JointFeatureMap {
    fn len(&self) -> usize {
        self.map.len()
    }

    fn eval(&self, state: &[f64], action: &[f64]) -> Result<DVector<f64>, FeatureError> {
        if state.len() != self.state_dim {
            return Err(FeatureError::DimensionMismatch { expected: self.state_dim, got: state.len() });
        }
        if action.len() != self.action_dim {
            return Err(FeatureError::DimensionMismatch { expected: self.action_dim, got: action.len() });
        }
        let mut joint = Vec::with_capacity(state.len() + action.len());
        joint.extend_from_slice(state);
        joint.extend_from_slice(action);
        self.map.evaluate(&joint)
    }
}

/// One-hot indicator features over a finite state-action table. States and
/// actions arrive as 1-vectors holding the (rounded) index; the resulting
/// pair (M, phi) is an exactly linear MDP, used as a reference model in
/// tests.
#[derive(Debug, Clone)]
pub struct TabularOneHot {
    pub n_states: usize,
    pub n_actions: usize,
}

impl StateActionFeatures for TabularOneHot {
    fn len(&self) -> usize {
        self.n_states * self.n_actions
    }

    fn eval(&self, state: &[f64], action: &[f64]) -> Result<DVector<f64>, FeatureError> {
        if state.len() != 1 {
            return Err(FeatureError::DimensionMismatch { expected: 1, got: state.len() });
        }
        if action.len() != 1 {
            return Err(FeatureError::DimensionMismatch { expected: 1, got: action.len() });
        }
        let s = state[0].round() as usize;
        let a = action[0].round() as usize;
        if s >= self.n_states {
            return Err(FeatureError::OutOfDomain(state[0]));
        }
        if a >= self.n_actions {
            return Err(FeatureError::OutOfDomain(action[0]));
        }
        let mut v = DVector::zeros(self.len());
        v[s * self.n_actions + a] = 1.0;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::GaussLegendre;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn eval_1d_trivial_values() {
        // P_0 = 1 with normalization sqrt(1/2)
        assert_abs_diff_eq!(eval_1d(0, 0.37).unwrap(), 0.7071067811865476, epsilon = 1e-12);
        // P_n(1) = 1 for all n
        assert_abs_diff_eq!(eval_1d(2, 1.0).unwrap(), 1.5811388300841898, epsilon = 1e-12);
        // P_2(x) = (3x^2 - 1)/2
        assert_abs_diff_eq!(eval_1d(2, 0.0).unwrap(), -0.7905694150420949, epsilon = 1e-12);
    }

    #[test]
    fn eval_1d_degree_seven_closed_form() {
        // Oracle: P_7(x) = (429x^7 - 693x^5 + 315x^3 - 35x)/16 evaluated at
        // x = 3/10 in exact rational arithmetic gives -35851677/160000000;
        // times sqrt(15/2) = -0.613649131790285666...
        let got = eval_1d(7, 0.3).unwrap();
        assert_abs_diff_eq!(got, -0.6136491317902857, epsilon = 1e-13);
    }

    #[test]
    fn eval_1d_recurrence_matches_closed_forms_on_grid() {
        for i in 0..=1000 {
            let x = -1.0 + 2.0 * i as f64 / 1000.0;
            let explicit = [
                (0.5f64).sqrt(),
                (1.5f64).sqrt() * x,
                (2.5f64).sqrt() * (1.5 * x * x - 0.5),
                (3.5f64).sqrt() * (2.5 * x * x * x - 1.5 * x),
            ];
            for (n, want) in explicit.iter().enumerate() {
                assert_abs_diff_eq!(eval_1d(n, x).unwrap(), *want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn eval_1d_rejects_bad_inputs() {
        assert!(matches!(eval_1d(2, 1.1), Err(FeatureError::OutOfDomain(_))));
        assert!(matches!(eval_1d(2, f64::NAN), Err(FeatureError::OutOfDomain(_))));
        assert!(matches!(
            eval_1d(MAX_DEGREE + 1, 0.0),
            Err(FeatureError::DegreeTooHigh { .. })
        ));
        // marginally outside is tolerated
        assert!(eval_1d(2, 1.0 + 1e-13).is_ok());
    }

    #[test]
    fn eval_1d_orthonormal_under_quadrature() {
        let rule = GaussLegendre::new(64);
        for i in 0..=10usize {
            for j in 0..=10usize {
                let integral = rule.integrate(|x| eval_1d(i, x).unwrap() * eval_1d(j, x).unwrap());
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(integral, expected, epsilon = 1e-10);
            }
        }
    }

    proptest! {
        #[test]
        fn eval_1d_parity(n in 0usize..=10, x in -1.0f64..=1.0) {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let left = eval_1d(n, -x).unwrap();
            let right = sign * eval_1d(n, x).unwrap();
            prop_assert!((left - right).abs() <= 1e-12);
        }

        #[test]
        fn index_set_cardinality(d in 1usize..=6, n in 0usize..=6) {
            let set = enumerate_index_set(d, n).unwrap();
            let expected = binomial((n + d) as u128, d as u128) as usize;
            prop_assert_eq!(set.len(), expected);
            prop_assert!(set.iter().all(|m| m.total_degree() <= n && m.dimension() == d));
        }
    }

    #[test]
    fn index_set_graded_lex_order() {
        let set = enumerate_index_set(1, 3).unwrap();
        let exps: Vec<_> = set.iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(exps, vec![vec![0], vec![1], vec![2], vec![3]]);

        let set = enumerate_index_set(2, 2).unwrap();
        let exps: Vec<_> = set.iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(
            exps,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]]
        );

        assert_eq!(enumerate_index_set(3, 3).unwrap().len(), 20);
    }

    #[test]
    fn index_set_overflow_guard() {
        // binomial(40+8, 8) = 377348994 >> cap
        assert!(matches!(
            enumerate_index_set(8, 40),
            Err(FeatureError::IndexSetOverflow { .. })
        ));
    }

    #[test]
    fn feature_vector_at_origin() {
        let map = FeatureMap::legendre(2, 1).unwrap();
        let v = map.feature_vector(&[0.0, 0.0]).unwrap();
        // Before `scale`: (1/(2 sqrt 3), 0, 0) for order [(0,0),(0,1),(1,0)].
        assert_abs_diff_eq!(v[0] / map.scale(), 0.28867513459481287, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn feature_vector_odd_indices_vanish_at_origin() {
        let map = FeatureMap::legendre(3, 4).unwrap();
        let v = map.feature_vector(&[0.0, 0.0, 0.0]).unwrap();
        for (row, idx) in map.index_set().iter().enumerate() {
            if idx.exponents().iter().any(|&g| g % 2 == 1) {
                assert_eq!(v[row], 0.0, "odd index {:?} must vanish at 0", idx.exponents());
            }
        }
    }

    #[test]
    fn feature_vector_norm_bounded_after_rescaling() {
        for (d, n) in [(1usize, 4usize), (2, 3), (3, 4)] {
            let map = FeatureMap::legendre(d, n).unwrap();
            // quasi-random sweep: golden-ratio lattice over the cube
            let mut seed = 0.5f64;
            for k in 0..10_000 {
                let mut x = Vec::with_capacity(d);
                for i in 0..d {
                    seed = (seed + 0.6180339887498949 * (k * d + i + 1) as f64).fract();
                    x.push(2.0 * seed - 1.0);
                }
                let v = map.feature_vector(&x).unwrap();
                assert!(v.norm() <= 1.0 + 1e-12, "norm {} at {:?}", v.norm(), x);
            }
            // the gridded supremum is attained at the all-ones corner
            let corner = map.feature_vector(&vec![1.0; d]).unwrap();
            assert_abs_diff_eq!(corner.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn feature_vector_dimension_mismatch() {
        let map = FeatureMap::legendre(2, 2).unwrap();
        assert!(matches!(
            map.feature_vector(&[0.0]),
            Err(FeatureError::DimensionMismatch { .. })
        ));
        let mono = FeatureMap::monomial(2, 2).unwrap();
        assert!(matches!(
            map.monomial_feature_vector(&[0.0, 0.0]),
            Err(FeatureError::WrongKind { .. })
        ));
        assert!(matches!(
            mono.feature_vector(&[0.0, 0.0]),
            Err(FeatureError::WrongKind { .. })
        ));
    }

    #[test]
    fn monomial_feature_vector_values() {
        let map = FeatureMap::monomial(1, 2).unwrap();
        let v = map.monomial_feature_vector(&[0.5]).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.5, 0.25]);

        let map = FeatureMap::monomial(2, 1).unwrap();
        let v = map.monomial_feature_vector(&[0.0, 0.0]).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.0, 0.0]);

        let map = FeatureMap::monomial(2, 2).unwrap();
        let v = map.monomial_feature_vector(&[-1.0, 1.0]).unwrap();
        for (row, idx) in map.index_set().iter().enumerate() {
            let want = if idx.exponents()[0] % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(v[row], want, "index {:?}", idx.exponents());
        }
    }

    #[test]
    fn multivariate_orthonormality_before_stack_normalization() {
        // Tensor-product quadrature of the pairwise products of the raw
        // Legendre products (no Ntilde^{-1/2}, no scale) is the identity.
        let d = 2;
        for degree in 1..=4usize {
            let map = FeatureMap::legendre(d, degree).unwrap();
            let rule = GaussLegendre::new(degree + 1);
            let m = map.len();
            let mut gram = vec![vec![0.0; m]; m];
            for (&xi, &wi) in rule.nodes().iter().zip(rule.weights()) {
                for (&xj, &wj) in rule.nodes().iter().zip(rule.weights()) {
                    let raw: Vec<f64> = map
                        .index_set()
                        .iter()
                        .map(|idx| {
                            eval_1d(idx.exponents()[0], xi).unwrap()
                                * eval_1d(idx.exponents()[1], xj).unwrap()
                        })
                        .collect();
                    for a in 0..m {
                        for b in 0..m {
                            gram[a][b] += wi * wj * raw[a] * raw[b];
                        }
                    }
                }
            }
            for a in 0..m {
                for b in 0..m {
                    let expected = if a == b { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(gram[a][b], expected, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn joint_map_concatenates_state_and_action() {
        let map = FeatureMap::legendre(3, 2).unwrap();
        let joint = JointFeatureMap::new(map.clone(), 2, 1).unwrap();
        let direct = map.feature_vector(&[0.1, -0.2, 0.6]).unwrap();
        let viajoint = joint.eval(&[0.1, -0.2], &[0.6]).unwrap();
        assert_eq!(direct, viajoint);
        assert!(JointFeatureMap::new(map, 1, 1).is_err());
    }

    #[test]
    fn tabular_one_hot_basis() {
        let feats = TabularOneHot { n_states: 5, n_actions: 2 };
        assert_eq!(feats.len(), 10);
        let v = feats.eval(&[3.0], &[1.0]).unwrap();
        assert_eq!(v[7], 1.0);
        assert_eq!(v.iter().filter(|&&x| x != 0.0).count(), 1);
        assert!(feats.eval(&[5.0], &[0.0]).is_err());
    }
}
