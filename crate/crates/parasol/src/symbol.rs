//! Constant-coefficient representation of the system, its matrix symbol,
//! characteristic roots, and the parabolicity / strong-ellipticity sweeps.
//!
//! The operator under study is `D_t u - sum_{|alpha|=2b} A_alpha D^alpha u`.
//! Its symbol at frequency `xi` is the m-by-m matrix
//! `M(xi) = (-1)^b sum_{|alpha|=2b} A_alpha xi^alpha`, whose eigenvalues are
//! the characteristic roots `p_s(xi)`. Parabolicity means
//! `Re p_s(xi) <= -delta |xi|^{2b}` with a positive margin `delta`; by
//! 2b-homogeneity of `M` it suffices to certify the margin on the unit
//! sphere.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Eigenvalue margins closer to zero than this are treated as zero margin:
/// the parabolicity condition demands a strict margin and eigen-solver noise
/// must not fabricate one.
pub const MARGIN_TOLERANCE: f64 = 1e-9;

/// Multi-index of spatial differentiation orders, one entry per axis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(components: Vec<usize>) -> Self {
        MultiIndex(components)
    }

    /// Number of spatial axes.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total differentiation order `|alpha|`.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn components(&self) -> &[usize] {
        &self.0
    }

    /// The monomial `xi^alpha = xi_1^{a_1} ... xi_n^{a_n}`.
    pub fn monomial(&self, xi: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(xi)
            .map(|(&a, &x)| x.powi(a as i32))
            .product()
    }

    /// `alpha - e_axis`, if `alpha_axis >= 1`.
    pub fn lowered(&self, axis: usize) -> Option<MultiIndex> {
        if axis >= self.0.len() || self.0[axis] == 0 {
            return None;
        }
        let mut c = self.0.clone();
        c[axis] -= 1;
        Some(MultiIndex(c))
    }

    /// Component-wise sum.
    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn unit(n: usize, axis: usize) -> MultiIndex {
        let mut c = vec![0; n];
        c[axis] = 1;
        MultiIndex(c)
    }

    pub fn zero(n: usize) -> MultiIndex {
        MultiIndex(vec![0; n])
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices of length `n` with total order `order`, in
/// lexicographic order.
pub fn multi_indices(n: usize, order: usize) -> Vec<MultiIndex> {
    fn rec(n: usize, order: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if n == 1 {
            prefix.push(order);
            out.push(MultiIndex::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for head in (0..=order).rev() {
            prefix.push(head);
            rec(n - 1, order - head, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, order, &mut Vec::new(), &mut out);
    out
}

/// The coefficient data of a constant-coefficient 2b-order system
/// `D_t u - sum_{|alpha|=2b} A_alpha D^alpha u`.
///
/// Variable coefficients are handled by freezing them at a point before
/// constructing this object; a slot for lower-order coefficient matrices is
/// stored for interchange purposes but no operator support exists for it.
#[derive(Debug, Clone)]
pub struct ParabolicSystem {
    n: usize,
    b: usize,
    m: usize,
    principal: BTreeMap<MultiIndex, DMatrix<f64>>,
    lower_order: BTreeMap<MultiIndex, DMatrix<f64>>,
}

impl ParabolicSystem {
    pub fn new(
        n: usize,
        b: usize,
        m: usize,
        principal: BTreeMap<MultiIndex, DMatrix<f64>>,
    ) -> Result<Self> {
        if n < 1 || b < 1 || m < 1 {
            return Err(Error::InvalidSystem(format!(
                "need n >= 1, b >= 1, m >= 1, got n={n}, b={b}, m={m}"
            )));
        }
        if principal.is_empty() {
            return Err(Error::InvalidSystem(
                "principal coefficient map is empty".into(),
            ));
        }
        let mut any_nonzero = false;
        for (alpha, mat) in &principal {
            if alpha.len() != n {
                return Err(Error::InvalidSystem(format!(
                    "multi-index {alpha} has length {} but n={n}",
                    alpha.len()
                )));
            }
            if alpha.order() != 2 * b {
                return Err(Error::InvalidSystem(format!(
                    "principal multi-index {alpha} has order {} but 2b={}",
                    alpha.order(),
                    2 * b
                )));
            }
            if mat.nrows() != m || mat.ncols() != m {
                return Err(Error::InvalidSystem(format!(
                    "coefficient matrix for {alpha} is {}x{} but m={m}",
                    mat.nrows(),
                    mat.ncols()
                )));
            }
            if mat.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSystem(format!(
                    "coefficient matrix for {alpha} has non-finite entries"
                )));
            }
            if mat.iter().any(|&v| v != 0.0) {
                any_nonzero = true;
            }
        }
        if !any_nonzero {
            return Err(Error::InvalidSystem(
                "all principal coefficient matrices are zero".into(),
            ));
        }
        Ok(ParabolicSystem {
            n,
            b,
            m,
            principal,
            lower_order: BTreeMap::new(),
        })
    }

    /// Attach reserved lower-order coefficient matrices `B_beta`,
    /// `|beta| <= 2b-1`. They are stored and round-tripped through the file
    /// format; no operator applies them.
    pub fn with_lower_order(
        mut self,
        lower: BTreeMap<MultiIndex, DMatrix<f64>>,
    ) -> Result<Self> {
        for (beta, mat) in &lower {
            if beta.len() != self.n {
                return Err(Error::InvalidSystem(format!(
                    "lower-order multi-index {beta} has length {} but n={}",
                    beta.len(),
                    self.n
                )));
            }
            if beta.order() > 2 * self.b - 1 {
                return Err(Error::InvalidSystem(format!(
                    "lower-order multi-index {beta} has order {} > 2b-1={}",
                    beta.order(),
                    2 * self.b - 1
                )));
            }
            if mat.nrows() != self.m || mat.ncols() != self.m {
                return Err(Error::InvalidSystem(format!(
                    "lower-order matrix for {beta} is {}x{} but m={}",
                    mat.nrows(),
                    mat.ncols(),
                    self.m
                )));
            }
        }
        self.lower_order = lower;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn principal(&self) -> &BTreeMap<MultiIndex, DMatrix<f64>> {
        &self.principal
    }

    pub fn lower_order(&self) -> &BTreeMap<MultiIndex, DMatrix<f64>> {
        &self.lower_order
    }

    /// The scalar heat system `D_t u - Delta u` in `n` space dimensions.
    pub fn heat(n: usize) -> ParabolicSystem {
        Self::diagonal_laplacian(n, &[1.0]).expect("heat system is valid")
    }

    /// The diagonal system `D_t u - diag(delta_1..delta_m) Delta u`.
    pub fn diagonal_laplacian(n: usize, deltas: &[f64]) -> Result<ParabolicSystem> {
        let m = deltas.len();
        let mut principal = BTreeMap::new();
        for axis in 0..n {
            let mut c = vec![0; n];
            c[axis] = 2;
            let mat = DMatrix::from_fn(m, m, |i, j| if i == j { deltas[i] } else { 0.0 });
            principal.insert(MultiIndex::new(c), mat);
        }
        ParabolicSystem::new(n, 1, m, principal)
    }

    /// The scalar system `D_t u - (-1)^{b+1} Delta^b u`, the canonical
    /// parabolic operator of order 2b (heat equation for b=1, `D_t + Delta^2`
    /// for b=2, ...). Coefficients come from the multinomial expansion of
    /// `Delta^b`.
    pub fn power_of_laplacian(n: usize, b: usize) -> Result<ParabolicSystem> {
        let sign = if b % 2 == 1 { 1.0 } else { -1.0 };
        let mut principal: BTreeMap<MultiIndex, DMatrix<f64>> = BTreeMap::new();
        // Delta^b = sum_{|beta|=b} b!/beta! prod_i D_i^{2 beta_i}
        for beta in multi_indices(n, b) {
            let mut coeff = factorial(b);
            for &bi in beta.components() {
                coeff /= factorial(bi);
            }
            let alpha = MultiIndex::new(beta.components().iter().map(|&x| 2 * x).collect());
            let entry = principal
                .entry(alpha)
                .or_insert_with(|| DMatrix::zeros(1, 1));
            entry[(0, 0)] += sign * coeff;
        }
        ParabolicSystem::new(n, b, 1, principal)
    }

    /// Symbol matrix `M(xi) = (-1)^b sum A_alpha xi^alpha`; equals
    /// `sum A_alpha (i xi)^alpha` because `i^{2b} = (-1)^b`.
    pub fn evaluate_symbol(&self, xi: &[f64]) -> Result<DMatrix<f64>> {
        if xi.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "xi has length {} but n={}",
                xi.len(),
                self.n
            )));
        }
        if xi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("xi has non-finite entries".into()));
        }
        let sign = if self.b % 2 == 0 { 1.0 } else { -1.0 };
        let mut acc = DMatrix::zeros(self.m, self.m);
        for (alpha, mat) in &self.principal {
            let w = alpha.monomial(xi);
            if w != 0.0 {
                acc += mat * w;
            }
        }
        Ok(acc * sign)
    }

    /// Spatial principal symbol `E(xi) = sum A_alpha xi^alpha` without the
    /// `(-1)^b` factor; this is the normalization under which the
    /// strong-ellipticity determinant bound is stated.
    pub fn spatial_symbol(&self, xi: &[f64]) -> Result<DMatrix<f64>> {
        let sign = if self.b % 2 == 0 { 1.0 } else { -1.0 };
        Ok(self.evaluate_symbol(xi)? * sign)
    }

    /// All eigenvalues of the symbol at `xi`, ordered by descending real
    /// part (ties broken by descending imaginary part).
    pub fn characteristic_roots(&self, xi: &[f64]) -> Result<Vec<Complex64>> {
        let sym = self.evaluate_symbol(xi)?;
        let mut roots = complex_eigenvalues(&sym)?;
        roots.sort_by(|a, b| {
            b.re.partial_cmp(&a.re)
                .unwrap()
                .then(b.im.partial_cmp(&a.im).unwrap())
        });
        Ok(roots)
    }

    /// Sweep the unit sphere for the parabolicity margin
    /// `delta = min_xi (-max_s Re p_s(xi))`, with a pattern-search
    /// refinement around the worst sample.
    pub fn check_parabolicity(&self, n_samples: usize) -> Result<ParabolicityReport> {
        if n_samples < 1 {
            return Err(Error::InvalidArgument("n_samples must be >= 1".into()));
        }
        let points = unit_sphere_points(self.n, n_samples);
        let samples_used = points.len();

        let mut worst_xi = points[0].clone();
        let mut worst_val = f64::NEG_INFINITY; // max over s of Re p_s at worst xi
        for xi in &points {
            let v = self.max_re_root(xi)?;
            if v > worst_val {
                worst_val = v;
                worst_xi = xi.clone();
            }
        }
        // Local refinement: maximize max Re p over the sphere from the worst
        // sample by coordinate pattern search with shrinking steps.
        let (xi_ref, val_ref) = self.refine_worst(&worst_xi, worst_val)?;
        worst_xi = xi_ref;
        worst_val = val_ref;

        let worst_margin = -worst_val;
        let delta_hat = if worst_margin <= MARGIN_TOLERANCE {
            0.0
        } else {
            worst_margin
        };
        let roots = self.characteristic_roots(&worst_xi)?;
        let worst_root = roots[0];
        Ok(ParabolicityReport {
            is_parabolic: delta_hat > 0.0,
            delta_hat,
            worst_margin,
            worst_xi,
            worst_root,
            samples_used,
            n: self.n,
        })
    }

    /// Sweep the unit sphere for `K = min det E(xi)`; strong ellipticity
    /// means `K > 0`. The sign-flagged variant `(-1)^{bm} det E(xi)` is
    /// reported alongside since the determinant normalization for odd `m` is
    /// convention-dependent.
    pub fn check_strong_ellipticity(&self, n_samples: usize) -> Result<EllipticityReport> {
        if n_samples < 1 {
            return Err(Error::InvalidArgument("n_samples must be >= 1".into()));
        }
        let points = unit_sphere_points(self.n, n_samples);
        let samples_used = points.len();
        let mut k_hat = f64::INFINITY;
        let mut worst_xi = points[0].clone();
        for xi in &points {
            let det = self.spatial_symbol(xi)?.determinant();
            if det < k_hat {
                k_hat = det;
                worst_xi = xi.clone();
            }
        }
        let sign = if (self.b * self.m) % 2 == 0 { 1.0 } else { -1.0 };
        // The signed variant has its own minimizer.
        let mut k_hat_signed = f64::INFINITY;
        for xi in &points {
            let det = sign * self.spatial_symbol(xi)?.determinant();
            k_hat_signed = k_hat_signed.min(det);
        }
        Ok(EllipticityReport {
            is_strongly_elliptic: k_hat > 0.0,
            k_hat,
            k_hat_signed,
            worst_xi,
            samples_used,
        })
    }

    fn max_re_root(&self, xi: &[f64]) -> Result<f64> {
        let roots = self.characteristic_roots(xi)?;
        Ok(roots[0].re)
    }

    fn refine_worst(&self, start: &[f64], start_val: f64) -> Result<(Vec<f64>, f64)> {
        let mut xi = start.to_vec();
        let mut val = start_val;
        let mut step = 0.1;
        while step > 1e-7 {
            let mut improved = false;
            for axis in 0..self.n {
                for dir in [-1.0, 1.0] {
                    let mut cand = xi.clone();
                    cand[axis] += dir * step;
                    let norm: f64 = cand.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm < 1e-12 {
                        continue;
                    }
                    for v in &mut cand {
                        *v /= norm;
                    }
                    let cv = self.max_re_root(&cand)?;
                    if cv > val + 1e-15 {
                        val = cv;
                        xi = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        Ok((xi, val))
    }
}

/// Result of the parabolicity sweep.
#[derive(Debug, Clone)]
pub struct ParabolicityReport {
    pub is_parabolic: bool,
    /// Certified-at-resolution margin, clamped to 0 when within eigen-solver
    /// tolerance of zero (the condition demands a strict margin).
    pub delta_hat: f64,
    /// Signed minimum of `-max_s Re p_s` over the sweep; negative when some
    /// root has positive real part.
    pub worst_margin: f64,
    pub worst_xi: Vec<f64>,
    /// Root with the largest real part at `worst_xi`.
    pub worst_root: Complex64,
    pub samples_used: usize,
    /// Spatial dimension; n = 1 lies outside the usual scope of the theory
    /// and reports should flag it.
    pub n: usize,
}

#[derive(Debug, Clone)]
pub struct EllipticityReport {
    pub is_strongly_elliptic: bool,
    /// min over the sphere of `det E(xi)`.
    pub k_hat: f64,
    /// min over the sphere of `(-1)^{bm} det E(xi)` (alternative sign
    /// convention, reported for comparison).
    pub k_hat_signed: f64,
    pub worst_xi: Vec<f64>,
    pub samples_used: usize,
}

/// Complex eigenvalues of a real square matrix via real Schur form.
pub fn complex_eigenvalues(mat: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let m = mat.nrows();
    if m == 1 {
        return Ok(vec![Complex64::new(mat[(0, 0)], 0.0)]);
    }
    let schur = nalgebra::linalg::Schur::try_new(mat.clone(), 1e-14, 10_000).ok_or_else(|| {
        Error::Numerical(format!(
            "Schur decomposition failed to converge for a {m}x{m} symbol matrix"
        ))
    })?;
    let eig = schur.complex_eigenvalues();
    Ok(eig.iter().map(|c| Complex64::new(c.re, c.im)).collect())
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// Deterministic quasi-uniform sample of the Euclidean unit sphere in R^n.
///
/// n = 1 is the two-point sphere; n = 2 uses equally spaced angles; n = 3 a
/// Fibonacci spiral; higher dimensions fall back to seeded normalized
/// Gaussian directions (still deterministic for fixed `n_samples`).
pub fn unit_sphere_points(n: usize, n_samples: usize) -> Vec<Vec<f64>> {
    match n {
        0 => panic!("dimension must be >= 1"),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let count = n_samples.max(4);
            (0..count)
                .map(|j| {
                    let theta = 2.0 * std::f64::consts::PI * (j as f64) / (count as f64);
                    vec![theta.cos(), theta.sin()]
                })
                .collect()
        }
        3 => {
            let count = n_samples.max(8);
            let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
            (0..count)
                .map(|j| {
                    let z = 1.0 - (2.0 * j as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * j as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let count = n_samples.max(16);
            let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0001);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let v: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
                let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-8 {
                    out.push(v.into_iter().map(|x| x / norm).collect());
                }
            }
            out
        }
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    use rand::Rng;
    // Box-Muller on two uniform draws.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn laplacian_2d() -> ParabolicSystem {
        ParabolicSystem::heat(2)
    }

    #[test]
    fn symbol_of_laplacian() {
        let sys = laplacian_2d();
        let m = sys.evaluate_symbol(&[1.0, 0.0]).unwrap();
        assert_relative_eq!(m[(0, 0)], -1.0, epsilon = 1e-14);
        let m = sys.evaluate_symbol(&[3.0, 4.0]).unwrap();
        assert_relative_eq!(m[(0, 0)], -25.0, epsilon = 1e-12);
    }

    #[test]
    fn symbol_of_diagonal_system() {
        // delta = (1, -1), xi = (0, 1) -> diag(-1, +1)
        let sys = ParabolicSystem::diagonal_laplacian(2, &[1.0, -1.0]).unwrap();
        let m = sys.evaluate_symbol(&[0.0, 1.0]).unwrap();
        assert_relative_eq!(m[(0, 0)], -1.0, epsilon = 1e-14);
        assert_relative_eq!(m[(1, 1)], 1.0, epsilon = 1e-14);
        assert_relative_eq!(m[(0, 1)], 0.0);
    }

    #[test]
    fn symbol_of_bilaplacian() {
        // D_t + Delta^2 with b=2: M(xi) = -|xi|^4; at xi=(1,1): -4.
        let sys = ParabolicSystem::power_of_laplacian(2, 2).unwrap();
        let m = sys.evaluate_symbol(&[1.0, 1.0]).unwrap();
        assert_relative_eq!(m[(0, 0)], -4.0, epsilon = 1e-12);
    }

    #[test]
    fn roots_of_laplacian() {
        let sys = laplacian_2d();
        let roots = sys.characteristic_roots(&[3.0, 4.0]).unwrap();
        assert_eq!(roots.len(), 1);
        assert_relative_eq!(roots[0].re, -25.0, epsilon = 1e-10);
        assert_relative_eq!(roots[0].im, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn roots_of_diagonal_system_are_negated_deltas() {
        let deltas = [1.0, 2.5, 0.5];
        let sys = ParabolicSystem::diagonal_laplacian(3, &deltas).unwrap();
        let xi = [0.0, 1.0, 0.0];
        let mut roots: Vec<f64> = sys
            .characteristic_roots(&xi)
            .unwrap()
            .iter()
            .map(|c| c.re)
            .collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected: Vec<f64> = deltas.iter().map(|d| -d).collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (r, e) in roots.iter().zip(&expected) {
            assert_relative_eq!(r, e, epsilon = 1e-10);
        }
    }

    #[test]
    fn roots_of_upper_triangular_coupling() {
        // Upper-triangular coupling in one coefficient: the 2x2 symbol is
        // triangular, so the roots are its diagonal entries. Brute-force
        // oracle: characteristic polynomial of [[a, c], [0, d]] has roots
        // {a, d}.
        let n = 2;
        let mut principal = BTreeMap::new();
        for axis in 0..n {
            let mut c = vec![0; n];
            c[axis] = 2;
            let mat = if axis == 0 {
                DMatrix::from_row_slice(2, 2, &[1.0, 0.7, 0.0, 2.0])
            } else {
                DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0])
            };
            principal.insert(MultiIndex::new(c), mat);
        }
        let sys = ParabolicSystem::new(n, 1, 2, principal).unwrap();
        let xi = [0.6, 0.8];
        let sym = sys.evaluate_symbol(&xi).unwrap();
        // symbol is triangular: roots are the diagonal entries
        let mut roots: Vec<f64> = sys
            .characteristic_roots(&xi)
            .unwrap()
            .iter()
            .map(|c| c.re)
            .collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected = vec![sym[(0, 0)], sym[(1, 1)]];
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (r, e) in roots.iter().zip(&expected) {
            assert_relative_eq!(r, e, epsilon = 1e-9);
        }
    }

    #[test]
    fn parabolicity_of_heat_is_one() {
        let report = laplacian_2d().check_parabolicity(512).unwrap();
        assert!(report.is_parabolic);
        assert_relative_eq!(report.delta_hat, 1.0, epsilon = 1e-9);
        assert_relative_eq!(report.worst_root.re, -1.0, epsilon = 1e-9);
    }

    #[test]
    fn mixed_signs_are_not_parabolic() {
        let sys = ParabolicSystem::diagonal_laplacian(2, &[1.0, -1.0]).unwrap();
        let report = sys.check_parabolicity(256).unwrap();
        assert!(!report.is_parabolic);
        assert_relative_eq!(report.worst_root.re, 1.0, epsilon = 1e-9);
        assert!(report.worst_margin < 0.0);
    }

    #[test]
    fn zero_delta_gives_zero_margin() {
        let sys = ParabolicSystem::diagonal_laplacian(2, &[1.0, 0.0]).unwrap();
        let report = sys.check_parabolicity(256).unwrap();
        assert!(!report.is_parabolic);
        assert_eq!(report.delta_hat, 0.0);
        assert!(report.worst_margin.abs() < 1e-9);
    }

    #[test]
    fn strong_ellipticity_of_negative_pair() {
        // delta = (-1,-1): det E = |xi|^4 > 0, strongly elliptic but not
        // parabolic.
        let sys = ParabolicSystem::diagonal_laplacian(2, &[-1.0, -1.0]).unwrap();
        let ell = sys.check_strong_ellipticity(256).unwrap();
        assert!(ell.is_strongly_elliptic);
        assert_relative_eq!(ell.k_hat, 1.0, epsilon = 1e-9);
        assert!(!sys.check_parabolicity(256).unwrap().is_parabolic);
    }

    #[test]
    fn strong_ellipticity_fails_for_mixed_signs() {
        let sys = ParabolicSystem::diagonal_laplacian(2, &[1.0, -1.0]).unwrap();
        let ell = sys.check_strong_ellipticity(256).unwrap();
        assert!(!ell.is_strongly_elliptic);
        assert_relative_eq!(ell.k_hat, -1.0, epsilon = 1e-9);
    }

    #[test]
    fn strong_ellipticity_of_heat() {
        let ell = laplacian_2d().check_strong_ellipticity(256).unwrap();
        assert!(ell.is_strongly_elliptic);
        assert_relative_eq!(ell.k_hat, 1.0, epsilon = 1e-9);
        // Signed convention flips for bm odd.
        assert_relative_eq!(ell.k_hat_signed, -1.0, epsilon = 1e-9);
    }

    #[test]
    fn root_homogeneity() {
        let sys = ParabolicSystem::diagonal_laplacian(3, &[1.0, 2.0]).unwrap();
        let xi = [0.3, -0.5, 0.81];
        let mu = 1.7;
        let scaled: Vec<f64> = xi.iter().map(|v| v * mu).collect();
        let r1 = sys.characteristic_roots(&xi).unwrap();
        let r2 = sys.characteristic_roots(&scaled).unwrap();
        let factor = mu.powi(2);
        for (a, b) in r1.iter().zip(&r2) {
            assert_relative_eq!(b.re, a.re * factor, max_relative = 1e-10);
        }
    }

    #[test]
    fn report_consistency_at_worst_xi() {
        let sys = ParabolicSystem::diagonal_laplacian(2, &[2.0, 3.0]).unwrap();
        let report = sys.check_parabolicity(512).unwrap();
        let roots = sys.characteristic_roots(&report.worst_xi).unwrap();
        assert_relative_eq!(roots[0].re, report.worst_root.re, epsilon = 1e-10);
        assert_relative_eq!(roots[0].re, -report.worst_margin, epsilon = 1e-10);
    }

    #[test]
    fn sign_patterns_up_to_m4() {
        // Parabolic iff all deltas positive, over every sign pattern in
        // {-1, 0, +1}^m \ {0}, m <= 3 here (m = 4 exercised in the
        // acceptance suite).
        for m in 1..=3usize {
            for pattern in 0..(3usize.pow(m as u32)) {
                let mut deltas = Vec::with_capacity(m);
                let mut code = pattern;
                for _ in 0..m {
                    deltas.push((code % 3) as f64 - 1.0);
                    code /= 3;
                }
                if deltas.iter().all(|&d| d == 0.0) {
                    continue; // all-zero principal part is rejected
                }
                let sys = ParabolicSystem::diagonal_laplacian(2, &deltas).unwrap();
                let report = sys.check_parabolicity(128).unwrap();
                let expect = deltas.iter().all(|&d| d > 0.0);
                assert_eq!(report.is_parabolic, expect, "deltas={deltas:?}");
            }
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let sys = laplacian_2d();
        assert!(sys.evaluate_symbol(&[1.0]).is_err());
        assert!(sys.evaluate_symbol(&[f64::NAN, 0.0]).is_err());
        let empty: BTreeMap<MultiIndex, DMatrix<f64>> = BTreeMap::new();
        assert!(ParabolicSystem::new(2, 1, 1, empty).is_err());
        let mut zero = BTreeMap::new();
        zero.insert(MultiIndex::new(vec![2, 0]), DMatrix::zeros(1, 1));
        assert!(ParabolicSystem::new(2, 1, 1, zero).is_err());
    }

    #[test]
    fn multi_index_enumeration() {
        let list = multi_indices(2, 2);
        assert_eq!(list.len(), 3);
        let list = multi_indices(3, 4);
        assert_eq!(list.len(), 15); // C(4+2, 2)
        for a in &list {
            assert_eq!(a.order(), 4);
        }
    }
}
