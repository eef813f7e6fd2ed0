//! Fundamental matrix of a frozen-coefficient parabolic system.
//!
//! The kernel is recovered by inverting the Fourier transform in x: for
//! `t > 0` the transformed matrix is `exp(t M(xi))` where `M` is the system
//! symbol, so
//!
//! `Gamma(x, t) = (2 pi)^{-n} int e^{i x.xi} exp(t M(xi)) dxi`,
//!
//! truncated to `|xi|_inf <= Xi` with the truncation radius chosen from the
//! parabolicity margin so the discarded tail is below 1e-16. Two routes
//! compute the transformed matrix:
//!
//! * exponential route (default): scaling-and-squaring matrix exponential
//!   per grid node;
//! * cofactor route (cross-check): residue summation of
//!   `e^{pt} adj(p I - M) / det(p I - M)` over the characteristic roots,
//!   falling back to trapezoid quadrature around a rectangular contour in
//!   the left half-plane when roots nearly collide.
//!
//! The kernel is extended by zero to `t <= 0` (forward causality), and all
//! sphere/shell diagnostics integrate over the parabolic unit sphere
//! `{max(|x|, |t|^{1/2b}) = 1}` with the angular measure induced by the
//! polar factorization `dx dt = mu^{n+2b-1} dmu dsigma` (lateral piece
//! carries weight 1, the caps carry weight 2b).

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{GridFunction, GridSpec};
use crate::fft::{fft_along_axis, wavenumber};
use crate::fit::log_log_fit;
use crate::symbol::{
    complex_eigenvalues, multi_indices, unit_sphere_points, MultiIndex, ParabolicityReport,
    ParabolicSystem,
};

/// Relative root-gap threshold below which the residue formula is abandoned
/// for contour quadrature.
const ROOT_GAP_THRESHOLD: f64 = 1e-6;

/// A parabolic system frozen at a point; construction fails unless the
/// parabolicity sweep certifies a positive margin (otherwise no decaying
/// fundamental matrix exists and the inversion contour cannot stay in the
/// left half-plane).
#[derive(Debug, Clone)]
pub struct FrozenOperator {
    system: ParabolicSystem,
    report: ParabolicityReport,
}

impl FrozenOperator {
    pub fn new(system: ParabolicSystem) -> Result<Self> {
        let samples = if system.n() <= 3 { 4096 } else { 16384 };
        let report = system.check_parabolicity(samples)?;
        if !report.is_parabolic {
            return Err(Error::InvalidSystem(format!(
                "system is not parabolic (margin {:.3e}); no fundamental matrix",
                report.worst_margin
            )));
        }
        Ok(FrozenOperator { system, report })
    }

    pub fn system(&self) -> &ParabolicSystem {
        &self.system
    }

    pub fn delta(&self) -> f64 {
        self.report.delta_hat
    }

    pub fn report(&self) -> &ParabolicityReport {
        &self.report
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum GridKind {
    /// exp(t M(xi)) per node.
    Exponential,
    /// Residue/contour evaluation of the resolvent integral.
    Cofactor,
    /// Scalar kernel 1/det route.
    Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct GridKey {
    t_bits: u64,
    m_per_axis: u32,
    dxi_bits: u64,
    kind: GridKind,
}

struct XiGrid {
    /// Half-width of the cube `[-Xi, Xi]^n`.
    xi_max: f64,
    dxi: f64,
    m_per_axis: usize,
    /// Row-major values: for each node (lex order over axes), m*m entries
    /// (or a single entry for the scalar kind).
    values: Vec<f64>,
    entry_len: usize,
}

/// Evaluator for the fundamental matrix of a frozen operator, with a
/// per-(t, resolution) cache of transformed-symbol grids shared by all
/// spatial evaluation points.
pub struct FundamentalMatrix {
    op: FrozenOperator,
    cache: Mutex<HashMap<GridKey, Arc<XiGrid>>>,
}

impl FundamentalMatrix {
    pub fn new(op: FrozenOperator) -> Self {
        FundamentalMatrix {
            op,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn operator(&self) -> &FrozenOperator {
        &self.op
    }

    pub fn system(&self) -> &ParabolicSystem {
        self.op.system()
    }

    fn n(&self) -> usize {
        self.op.system().n()
    }

    fn m(&self) -> usize {
        self.op.system().m()
    }

    fn b(&self) -> usize {
        self.op.system().b()
    }

    /// Scalar kernel: fundamental solution of `det L0 u = 0`.
    pub fn scalar_fundamental(&self, x: &[f64], t: f64) -> Result<f64> {
        let v = self.eval(x, t, None, GridKind::Scalar)?;
        Ok(v[(0, 0)])
    }

    /// Kernel matrix via the exponential route (default).
    pub fn matrix_fundamental(&self, x: &[f64], t: f64) -> Result<DMatrix<f64>> {
        self.eval(x, t, None, GridKind::Exponential)
    }

    /// Kernel matrix via the cofactor/residue route (cross-check).
    pub fn matrix_fundamental_cofactor(&self, x: &[f64], t: f64) -> Result<DMatrix<f64>> {
        self.eval(x, t, None, GridKind::Cofactor)
    }

    /// Spatial derivative `D^alpha Gamma`, `|alpha| <= 2b`.
    pub fn kernel_derivative(
        &self,
        alpha: &MultiIndex,
        x: &[f64],
        t: f64,
    ) -> Result<DMatrix<f64>> {
        if alpha.order() > 2 * self.b() {
            return Err(Error::InvalidArgument(format!(
                "derivative order {} exceeds 2b = {}",
                alpha.order(),
                2 * self.b()
            )));
        }
        self.eval(x, t, Some(alpha), GridKind::Exponential)
    }

    pub fn kernel_derivative_cofactor(
        &self,
        alpha: &MultiIndex,
        x: &[f64],
        t: f64,
    ) -> Result<DMatrix<f64>> {
        if alpha.order() > 2 * self.b() {
            return Err(Error::InvalidArgument(format!(
                "derivative order {} exceeds 2b = {}",
                alpha.order(),
                2 * self.b()
            )));
        }
        self.eval(x, t, Some(alpha), GridKind::Cofactor)
    }

    /// Unchecked-order variant used by the diagnostics (orders up to 2b+1
    /// appear in the boundedness report).
    pub(crate) fn kernel_derivative_any(
        &self,
        alpha: &MultiIndex,
        x: &[f64],
        t: f64,
    ) -> Result<DMatrix<f64>> {
        self.eval(x, t, Some(alpha), GridKind::Exponential)
    }

    /// Core evaluation: inverse Fourier sum over the cached xi-grid.
    fn eval(
        &self,
        x: &[f64],
        t: f64,
        alpha: Option<&MultiIndex>,
        kind: GridKind,
    ) -> Result<DMatrix<f64>> {
        let n = self.n();
        let m = if kind == GridKind::Scalar { 1 } else { self.m() };
        if x.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "x has length {} but n={n}",
                x.len()
            )));
        }
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "kernel evaluation requires t > 0, got {t}"
            )));
        }
        if let Some(a) = alpha {
            if a.len() != n {
                return Err(Error::DimensionMismatch("alpha length != n".into()));
            }
        }
        let max_x = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let grid = self.grid_for(t, max_x, kind)?;
        let mp = grid.m_per_axis;
        let entry = grid.entry_len;
        // e^{i x.xi} (i xi)^alpha factorizes over axes: precompute per-axis
        // tables e^{i x_a xi} xi^{alpha_a} and apply i^{|alpha|} at the end.
        let order = alpha.map(|a| a.order()).unwrap_or(0);
        let mut tables: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        for axis in 0..n {
            let pow = alpha.map(|a| a.components()[axis]).unwrap_or(0) as i32;
            let mut tab = Vec::with_capacity(mp);
            for idx in 0..mp {
                let xi = -grid.xi_max + (idx as f64 + 0.5) * grid.dxi;
                let c = Complex64::from_polar(1.0, x[axis] * xi) * xi.powi(pow);
                tab.push(c);
            }
            tables.push(tab);
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); entry];
        let total_outer = mp.pow(n as u32 - 1);
        let last = &tables[n - 1];
        for outer in 0..total_outer {
            let mut rem = outer;
            let mut prefix = Complex64::new(1.0, 0.0);
            for axis in (0..n - 1).rev() {
                let idx = rem % mp;
                rem /= mp;
                prefix *= tables[axis][idx];
            }
            let base = outer * mp * entry;
            for (j, &cj) in last.iter().enumerate() {
                let w = prefix * cj;
                let off = base + j * entry;
                for (e, a) in acc.iter_mut().enumerate() {
                    *a += w * grid.values[off + e];
                }
            }
        }
        // i^{|alpha| mod 4} rotation, then the real part
        let rot = match order % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let scale = (grid.dxi / (2.0 * std::f64::consts::PI)).powi(n as i32);
        let mut out = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] = (rot * acc[i * m + j]).re * scale;
            }
        }
        Ok(out)
    }

    /// Fetch or build the transformed-symbol grid for this (t, spread).
    fn grid_for(&self, t: f64, max_x: f64, kind: GridKind) -> Result<Arc<XiGrid>> {
        let n = self.n();
        let b = self.b();
        let delta = self.op.delta().max(1e-9);
        // truncation: e^{-delta Xi^{2b} t} Xi^{2b+2} < 1e-18
        let budget = 41.5f64;
        let mut xi_max = (budget / (delta * t)).powf(1.0 / (2 * b) as f64);
        xi_max = ((budget + (2 * b + 2) as f64 * (xi_max + 1.0).ln()) / (delta * t))
            .powf(1.0 / (2 * b) as f64);
        // aliasing: periodic images at 2 pi / dxi must clear the evaluation
        // point plus the kernel spread
        let spread = 16.0 * (t / delta.min(1.0)).powf(1.0 / (2 * b) as f64);
        let image_dist = 2.0 * (max_x + spread) + 2.0;
        // bucket for cache reuse
        let xi_bucket = bucket_up(xi_max, std::f64::consts::SQRT_2);
        let image_bucket = bucket_up(image_dist, 2.0);
        let dxi = 2.0 * std::f64::consts::PI / image_bucket;
        let mut m_per_axis = (2.0 * xi_bucket / dxi).ceil() as usize;
        if m_per_axis % 2 == 1 {
            m_per_axis += 1;
        }
        m_per_axis = m_per_axis.max(8);
        let dxi = 2.0 * xi_bucket / m_per_axis as f64;
        let key = GridKey {
            t_bits: t.to_bits(),
            m_per_axis: m_per_axis as u32,
            dxi_bits: dxi.to_bits(),
            kind,
        };
        if let Some(g) = self.cache.lock().unwrap().get(&key) {
            return Ok(g.clone());
        }
        let grid = self.build_grid(t, xi_bucket, dxi, m_per_axis, kind)?;
        let grid = Arc::new(grid);
        self.cache
            .lock()
            .unwrap()
            .insert(key, grid.clone());
        let _ = n;
        Ok(grid)
    }

    fn build_grid(
        &self,
        t: f64,
        xi_max: f64,
        dxi: f64,
        m_per_axis: usize,
        kind: GridKind,
    ) -> Result<XiGrid> {
        let n = self.n();
        let m = self.m();
        let entry_len = if kind == GridKind::Scalar { 1 } else { m * m };
        let total = m_per_axis.pow(n as u32);
        let mut values = vec![0.0f64; total * entry_len];
        let mut xi = vec![0.0f64; n];
        for node in 0..total {
            let mut rem = node;
            for axis in (0..n).rev() {
                let idx = rem % m_per_axis;
                rem /= m_per_axis;
                xi[axis] = -xi_max + (idx as f64 + 0.5) * dxi;
            }
            let base = node * entry_len;
            match kind {
                GridKind::Exponential => {
                    let sym = self.op.system().evaluate_symbol(&xi)?;
                    let e = mat_exp(&(sym * t));
                    for i in 0..m {
                        for j in 0..m {
                            values[base + i * m + j] = e[(i, j)];
                        }
                    }
                }
                GridKind::Cofactor => {
                    let e = self.transformed_cofactor(&xi, t)?;
                    for i in 0..m {
                        for j in 0..m {
                            values[base + i * m + j] = e[(i, j)];
                        }
                    }
                }
                GridKind::Scalar => {
                    values[base] = self.transformed_scalar(&xi, t)?;
                }
            }
        }
        Ok(XiGrid {
            xi_max,
            dxi,
            m_per_axis,
            values,
            entry_len,
        })
    }

    /// Residue/contour evaluation of
    /// `(1/2 pi i) oint e^{pt} adj(pI - M) / det(pI - M) dp`.
    fn transformed_cofactor(&self, xi: &[f64], t: f64) -> Result<DMatrix<f64>> {
        let m = self.m();
        let sym = self.op.system().evaluate_symbol(xi)?;
        if m == 1 {
            return Ok(DMatrix::from_element(1, 1, (sym[(0, 0)] * t).exp()));
        }
        let roots = complex_eigenvalues(&sym)?;
        let max_mod = roots.iter().fold(0.0f64, |a, r| a.max(r.norm()));
        let min_gap = min_pairwise_gap(&roots);
        if min_gap > ROOT_GAP_THRESHOLD * max_mod.max(1e-300) {
            // simple poles: sum of e^{p_s t} adj(p_s I - M) / prod (p_s-p_j)
            let symc = sym.map(|v| Complex64::new(v, 0.0));
            let mut acc = DMatrix::<Complex64>::zeros(m, m);
            for (s, &ps) in roots.iter().enumerate() {
                let mut denom = Complex64::new(1.0, 0.0);
                for (j, &pj) in roots.iter().enumerate() {
                    if j != s {
                        denom *= ps - pj;
                    }
                }
                let a = DMatrix::<Complex64>::identity(m, m) * ps - &symc;
                let adj = complex_adjugate(&a);
                let w = (ps * t).exp() / denom;
                acc += adj * w;
            }
            Ok(acc.map(|c| c.re))
        } else {
            self.contour_resolvent(&sym, &roots, t)
        }
    }

    /// Scalar transformed kernel `(1/2 pi i) oint e^{pt} / det(pI - M) dp`.
    fn transformed_scalar(&self, xi: &[f64], t: f64) -> Result<f64> {
        let m = self.m();
        let sym = self.op.system().evaluate_symbol(xi)?;
        if m == 1 {
            return Ok((sym[(0, 0)] * t).exp());
        }
        let roots = complex_eigenvalues(&sym)?;
        let max_mod = roots.iter().fold(0.0f64, |a, r| a.max(r.norm()));
        let min_gap = min_pairwise_gap(&roots);
        if min_gap > ROOT_GAP_THRESHOLD * max_mod.max(1e-300) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (s, &ps) in roots.iter().enumerate() {
                let mut denom = Complex64::new(1.0, 0.0);
                for (j, &pj) in roots.iter().enumerate() {
                    if j != s {
                        denom *= ps - pj;
                    }
                }
                acc += (ps * t).exp() / denom;
            }
            Ok(acc.re)
        } else {
            let g = self.contour_scalar(&roots, t)?;
            Ok(g)
        }
    }

    /// Rectangular contour in the left half-plane enclosing all roots.
    fn contour_nodes(roots: &[Complex64]) -> (f64, f64, f64) {
        let re_min = roots.iter().map(|r| r.re).fold(f64::INFINITY, f64::min);
        let re_max = roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);
        let im_max = roots.iter().map(|r| r.im.abs()).fold(0.0, f64::max);
        // right edge halfway between the rightmost root and 0 keeps e^{pt}
        // bounded; left/imag edges padded
        let right = re_max / 2.0;
        let left = re_min * 1.5 - 1.0;
        let top = im_max + 1.0 + 0.1 * (re_max - re_min).abs();
        (left, right, top)
    }

    fn contour_resolvent(
        &self,
        sym: &DMatrix<f64>,
        roots: &[Complex64],
        t: f64,
    ) -> Result<DMatrix<f64>> {
        let m = self.m();
        let symc = sym.map(|v| Complex64::new(v, 0.0));
        let ident = DMatrix::<Complex64>::identity(m, m);
        let integrand = |p: Complex64| -> Result<DMatrix<Complex64>> {
            let a = &ident * p - &symc;
            let inv = a.clone().try_inverse().ok_or_else(|| {
                Error::Numerical("resolvent singular on the contour".into())
            })?;
            Ok(inv * (p * t).exp())
        };
        let mut prev: Option<DMatrix<Complex64>> = None;
        let mut nodes = 64usize;
        loop {
            let val = contour_integral_matrix(roots, nodes, &integrand)?;
            if let Some(p) = &prev {
                let diff = (&val - p).map(|c| c.norm()).max();
                let scale = val.map(|c| c.norm()).max().max(1e-300);
                if diff <= 1e-12 * scale || nodes >= 4096 {
                    return Ok(val.map(|c| c.re));
                }
            }
            prev = Some(val);
            nodes *= 2;
        }
    }

    fn contour_scalar(&self, roots: &[Complex64], t: f64) -> Result<f64> {
        let coeffs: Vec<Complex64> = roots.to_vec();
        let integrand = |p: Complex64| -> Result<DMatrix<Complex64>> {
            let mut det = Complex64::new(1.0, 0.0);
            for &r in &coeffs {
                det *= p - r;
            }
            Ok(DMatrix::from_element(1, 1, (p * t).exp() / det))
        };
        let mut prev: Option<DMatrix<Complex64>> = None;
        let mut nodes = 64usize;
        loop {
            let val = contour_integral_matrix(roots, nodes, &integrand)?;
            if let Some(p) = &prev {
                let diff = (&val - p).map(|c| c.norm()).max();
                let scale = val.map(|c| c.norm()).max().max(1e-300);
                if diff <= 1e-12 * scale || nodes >= 4096 {
                    return Ok(val[(0, 0)].re);
                }
            }
            prev = Some(val);
            nodes *= 2;
        }
    }

    /// Estimated upper bound on the magnitude of the kernel at (x, t); used
    /// to skip quadrature nodes that cannot contribute. Deliberately loose.
    fn decay_negligible(&self, x: &[f64], t: f64) -> bool {
        let b = self.b() as f64;
        let delta = self.op.delta().min(1.0);
        let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if t <= 0.0 {
            return true;
        }
        let ratio = r / t.powf(1.0 / (2.0 * b));
        let exponent = delta / 8.0 * ratio.powf(2.0 * b / (2.0 * b - 1.0));
        exponent > 34.0
    }

    /// Convolve `exp(t M)` with a periodic grid field: the band-limited
    /// solution of the homogeneous system with initial data `phi`.
    pub fn evolve(&self, phi: &GridFunction, t: f64) -> Result<GridFunction> {
        if !phi.spec.periodic {
            return Err(Error::InvalidArgument(
                "evolve requires a periodic grid".into(),
            ));
        }
        let n = self.n();
        let m = self.m();
        if phi.spec.n() != n || phi.m != m {
            return Err(Error::DimensionMismatch(
                "field does not match the system".into(),
            ));
        }
        // FFT each component over space (first time slice of phi)
        let nx = phi.spec.nx.clone();
        let total: usize = nx.iter().product();
        let mut hats: Vec<ndarray::ArrayD<Complex64>> = Vec::with_capacity(m);
        for comp in 0..m {
            let mut data = ndarray::ArrayD::zeros(ndarray::IxDyn(&nx));
            let mut x_idx = vec![0usize; n];
            for flat in 0..total {
                let mut rem = flat;
                for axis in (0..n).rev() {
                    x_idx[axis] = rem % nx[axis];
                    rem /= nx[axis];
                }
                data[ndarray::IxDyn(&x_idx)] =
                    Complex64::new(phi.value(0, &x_idx, comp), 0.0);
            }
            for axis in 0..n {
                fft_along_axis(&mut data, axis, false);
            }
            hats.push(data);
        }
        // multiply by exp(t M(k)) per mode
        let mut out_hats = hats.clone();
        let mut x_idx = vec![0usize; n];
        let mut k = vec![0.0f64; n];
        for flat in 0..total {
            let mut rem = flat;
            for axis in (0..n).rev() {
                x_idx[axis] = rem % nx[axis];
                rem /= nx[axis];
            }
            for axis in 0..n {
                k[axis] = wavenumber(x_idx[axis], nx[axis], phi.spec.axis_len(axis));
            }
            let sym = self.op.system().evaluate_symbol(&k)?;
            let e = mat_exp(&(sym * t));
            for i in 0..m {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..m {
                    acc += e[(i, j)] * hats[j][ndarray::IxDyn(&x_idx)];
                }
                out_hats[i][ndarray::IxDyn(&x_idx)] = acc;
            }
        }
        // inverse transform, write into a one-slice grid function at t
        let mut out = GridFunction::zeros(
            GridSpec::new(
                phi.spec.bounds.clone(),
                phi.spec.t_max,
                phi.spec.nx.clone(),
                phi.spec.nt,
                true,
            )?,
            m,
        );
        for (comp, hat) in out_hats.iter_mut().enumerate() {
            for axis in 0..n {
                fft_along_axis(hat, axis, true);
            }
            for t_idx in 0..out.spec.nt {
                let mut x_idx = vec![0usize; n];
                for flat in 0..total {
                    let mut rem = flat;
                    for axis in (0..n).rev() {
                        x_idx[axis] = rem % nx[axis];
                        rem /= nx[axis];
                    }
                    let mut idx = Vec::with_capacity(n + 2);
                    idx.push(t_idx);
                    idx.extend_from_slice(&x_idx);
                    idx.push(comp);
                    out.values_mut()[ndarray::IxDyn(&idx)] = hat[ndarray::IxDyn(&x_idx)].re;
                }
            }
        }
        let _ = t;
        Ok(out)
    }
}

fn bucket_up(v: f64, base: f64) -> f64 {
    let k = (v.ln() / base.ln()).ceil();
    base.powf(k)
}

fn min_pairwise_gap(roots: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            gap = gap.min((roots[i] - roots[j]).norm());
        }
    }
    if roots.len() < 2 {
        f64::INFINITY
    } else {
        gap
    }
}

/// Matrix exponential; scalar fast path, scaling-and-squaring otherwise.
pub fn mat_exp(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.nrows() == 1 {
        DMatrix::from_element(1, 1, m[(0, 0)].exp())
    } else {
        m.exp()
    }
}

/// Adjugate of a complex matrix via cofactor minors (valid at singular
/// arguments, unlike det * inverse).
pub fn complex_adjugate(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let m = a.nrows();
    if m == 1 {
        return DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    }
    let mut adj = DMatrix::<Complex64>::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            // adj[i][j] = (-1)^{i+j} det(minor with row j, col i removed)
            let minor = a.clone().remove_row(j).remove_column(i);
            let det = minor.determinant();
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            adj[(i, j)] = det * sign;
        }
    }
    adj
}

/// Trapezoid integral of `f(p)/(2 pi i)` around the rectangular contour
/// enclosing the roots, `nodes` points per edge.
fn contour_integral_matrix<F>(
    roots: &[Complex64],
    nodes: usize,
    f: &F,
) -> Result<DMatrix<Complex64>>
where
    F: Fn(Complex64) -> Result<DMatrix<Complex64>>,
{
    let (left, right, top) = FundamentalMatrix::contour_nodes(roots);
    let corners = [
        Complex64::new(right, -top),
        Complex64::new(right, top),
        Complex64::new(left, top),
        Complex64::new(left, -top),
    ];
    let probe = f(corners[0])?;
    let m = probe.nrows();
    let mut acc = DMatrix::<Complex64>::zeros(m, m);
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let dz = (b - a) / nodes as f64;
        for k in 0..nodes {
            let p = a + dz * (k as f64 + 0.5);
            acc += f(p)? * dz;
        }
    }
    Ok(acc / Complex64::new(0.0, 2.0 * std::f64::consts::PI))
}

/// Gauss-Legendre nodes/weights mapped to [a, b].
pub fn gauss_nodes(k: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(k.max(2)).unwrap());
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * ((b - a) * x + (b + a)), 0.5 * (b - a) * w))
        .collect()
}

/// Quadrature rule over the parabolic unit sphere `{rho(x,t) = 1}` with the
/// polar angular measure (lateral weight 1, caps weight 2b). Only the
/// `t > 0` pieces are stored; the kernel vanishes identically for t <= 0.
pub struct ParabolicSphereRule {
    /// (x, t, weight) nodes.
    pub nodes: Vec<(Vec<f64>, f64, f64)>,
}

impl ParabolicSphereRule {
    pub fn build(n: usize, b: usize, resolution: usize) -> ParabolicSphereRule {
        let sphere = sphere_rule(n, resolution * 16);
        let mut nodes = Vec::new();
        // lateral piece {|x| = 1, t in (0, 1]}: measure dS(theta) dt.
        // Kernels have an essential singularity of e^{-c/t^{1/(2b-1)}} type
        // at t = 0, so a single Gauss rule converges poorly; composite
        // Gauss panels on geometric subintervals handle it.
        let t_rule = lateral_time_nodes(resolution);
        for &(ref theta, w_s) in &sphere {
            for &(t, w_t) in &t_rule {
                nodes.push((theta.clone(), t, w_s * w_t));
            }
        }
        // top cap {|x| <= 1, t = 1}: measure 2b * dy, dy = rho^{n-1} drho dS
        for &(rho, w_r) in &gauss_nodes(resolution * 2, 0.0, 1.0) {
            for &(ref theta, w_s) in &sphere {
                let y: Vec<f64> = theta.iter().map(|v| v * rho).collect();
                let w = 2.0 * b as f64 * w_r * rho.powi(n as i32 - 1) * w_s;
                nodes.push((y, 1.0, w));
            }
        }
        ParabolicSphereRule { nodes }
    }

    /// Integrate a matrix-valued kernel function over the sphere.
    pub fn integrate<F>(&self, m: usize, mut f: F) -> Result<DMatrix<f64>>
    where
        F: FnMut(&[f64], f64) -> Result<Option<DMatrix<f64>>>,
    {
        let mut acc = DMatrix::<f64>::zeros(m, m);
        for (x, t, w) in &self.nodes {
            if let Some(v) = f(x, *t)? {
                acc += v * *w;
            }
        }
        Ok(acc)
    }
}

/// Composite Gauss nodes on (0, 1] with geometric panels 4^{-p-1}..4^{-p};
/// panels below 4^{-8} are dropped (kernel values there are far below any
/// tolerance in use).
fn lateral_time_nodes(resolution: usize) -> Vec<(f64, f64)> {
    let mut nodes = Vec::new();
    let per_panel = (resolution + 2).max(8);
    for p in 0..8 {
        let hi = 0.25f64.powi(p);
        let lo = 0.25f64.powi(p + 1);
        nodes.extend(gauss_nodes(per_panel, lo, hi));
    }
    nodes
}

/// Surface quadrature points/weights on the Euclidean sphere S^{n-1}.
fn sphere_rule(n: usize, count: usize) -> Vec<(Vec<f64>, f64)> {
    match n {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => {
            let k = count.max(16);
            (0..k)
                .map(|j| {
                    let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / k as f64;
                    (vec![th.cos(), th.sin()], 2.0 * std::f64::consts::PI / k as f64)
                })
                .collect()
        }
        _ => {
            let pts = unit_sphere_points(n, count.max(64));
            let area = sphere_area(n);
            let w = area / pts.len() as f64;
            pts.into_iter().map(|p| (p, w)).collect()
        }
    }
}

fn sphere_area(n: usize) -> f64 {
    // |S^{n-1}| = n * |B_n|
    n as f64 * crate::field::unit_ball_volume(n)
}

/// Per-property outcome of the kernel diagnostics.
#[derive(Debug, Clone)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub pass: bool,
    /// Worst residual or the relevant summary statistic.
    pub statistic: f64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct PropertiesReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertiesReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Configuration of the diagnostics sweep.
#[derive(Debug, Clone)]
pub struct PropertiesConfig {
    /// Base resolution of sphere/shell rules.
    pub resolution: usize,
    /// Dyadic shell radii for the integrability slope.
    pub shell_radii: Vec<f64>,
}

impl Default for PropertiesConfig {
    fn default() -> Self {
        PropertiesConfig {
            resolution: 12,
            shell_radii: vec![0.25, 0.5, 1.0, 2.0],
        }
    }
}

/// Run the kernel diagnostics: smoothness consistency, mixed homogeneity,
/// sphere cancellation, boundedness of derivatives on the sphere, and the
/// dyadic-shell integrability slopes.
pub fn check_properties(
    fm: &FundamentalMatrix,
    cfg: &PropertiesConfig,
) -> Result<PropertiesReport> {
    let n = fm.n();
    let m = fm.m();
    let b = fm.b();
    let mut checks = Vec::new();

    // sample points on the parabolic sphere (off origin)
    let sample_points: Vec<(Vec<f64>, f64)> = {
        let sph = sphere_rule(n, 8);
        let mut pts: Vec<(Vec<f64>, f64)> = sph
            .iter()
            .take(4)
            .map(|(th, _)| (th.clone(), 0.7))
            .collect();
        pts.push((sph[0].0.iter().map(|v| 0.5 * v).collect(), 1.0));
        pts
    };

    // P1: spectral derivative vs central finite difference of the kernel
    {
        let mut worst = 0.0f64;
        let h = 1e-4;
        for (x, t) in &sample_points {
            for axis in 0..n {
                let alpha = MultiIndex::unit(n, axis);
                let spectral = fm.kernel_derivative(&alpha, x, *t)?;
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[axis] += h;
                xm[axis] -= h;
                let fd = (fm.matrix_fundamental(&xp, *t)? - fm.matrix_fundamental(&xm, *t)?)
                    / (2.0 * h);
                let scale = spectral.amax().max(1e-12);
                worst = worst.max((&spectral - &fd).amax() / scale);
            }
        }
        checks.push(PropertyCheck {
            name: "regularity",
            pass: worst < 1e-4,
            statistic: worst,
            detail: format!("max relative gap between spectral and FD first derivatives: {worst:.3e}"),
        });
    }

    // P2: mixed homogeneity at mu in {1/2, 2, 4}
    {
        let mut worst = 0.0f64;
        let betas = [MultiIndex::zero(n), multi_indices(n, 2 * b)[0].clone()];
        for mu in [0.5, 2.0, 4.0] {
            for (x, t) in &sample_points {
                for beta in &betas {
                    let lhs = {
                        let xs: Vec<f64> = x.iter().map(|v| v * mu).collect();
                        let ts = t * mu.powi(2 * b as i32);
                        fm.kernel_derivative_any(beta, &xs, ts)?
                    };
                    let rhs = fm.kernel_derivative_any(beta, x, *t)?
                        * mu.powi(-(n as i32) - beta.order() as i32);
                    let scale = rhs.amax().max(1e-12);
                    worst = worst.max((&lhs - &rhs).amax() / scale);
                }
            }
        }
        checks.push(PropertyCheck {
            name: "homogeneity",
            pass: worst < 1e-5,
            statistic: worst,
            detail: format!("max relative scaling residual at mu in {{1/2, 2, 4}}: {worst:.3e}"),
        });
    }

    // P3: cancellation of D^alpha Gamma over the parabolic sphere
    {
        let rule = ParabolicSphereRule::build(n, b, cfg.resolution);
        let mut worst = 0.0f64;
        for alpha in multi_indices(n, 2 * b) {
            let integral = rule.integrate(m, |x, t| {
                if fm.decay_negligible(x, t) {
                    return Ok(None);
                }
                Ok(Some(fm.kernel_derivative(&alpha, x, t)?))
            })?;
            worst = worst.max(integral.amax());
        }
        checks.push(PropertyCheck {
            name: "cancellation",
            pass: worst < 1e-6,
            statistic: worst,
            detail: format!("max |sphere mean of D^alpha Gamma| over |alpha| = 2b: {worst:.3e}"),
        });
    }

    // P4: boundedness of derivatives on the sphere, orders <= 2b+1
    {
        let rule = ParabolicSphereRule::build(n, b, cfg.resolution / 2 + 1);
        let mut max_by_order = Vec::new();
        let mut all_finite = true;
        for s in 0..=(2 * b + 1) {
            let mut sup = 0.0f64;
            for alpha in multi_indices(n, s) {
                for (x, t, _) in rule.nodes.iter().step_by(7) {
                    if fm.decay_negligible(x, *t) {
                        continue;
                    }
                    let v = fm.kernel_derivative_any(&alpha, x, *t)?;
                    if !v.iter().all(|e| e.is_finite()) {
                        all_finite = false;
                    }
                    sup = sup.max(v.amax());
                }
            }
            max_by_order.push(sup);
        }
        let overall = max_by_order.iter().fold(0.0f64, |a, &v| a.max(v));
        checks.push(PropertyCheck {
            name: "boundedness",
            pass: all_finite,
            statistic: overall,
            detail: format!("sup |D^beta Gamma| on the sphere by order: {max_by_order:?}"),
        });
    }

    // P5: dyadic-shell integrability slopes for |beta| in {2b-1, 2b}.
    // The same quadrature rule is reused at every radius, so rule
    // coarseness cancels in the slope; a coarse rule suffices.
    {
        let rule = ParabolicSphereRule::build(n, b, 4);
        let mut detail = String::new();
        let mut pass = true;
        let mut worst_gap = 0.0f64;
        for (ord, expect) in [(2 * b - 1, 1.0), (2 * b, 0.0)] {
            let mut beta_c = vec![0usize; n];
            beta_c[0] = ord;
            let beta = MultiIndex::new(beta_c);
            let mut masses = Vec::new();
            for &r in &cfg.shell_radii {
                // int_{r < rho < 2r} |D^beta Gamma| = int_r^{2r}
                // mu^{n+2b-1} dmu int_sphere |D^beta Gamma(mu o omega)|
                let mut mass = 0.0;
                for &(mu, w_mu) in &gauss_nodes(8, r, 2.0 * r) {
                    let shell = rule.integrate(1, |x, t| {
                        let xs: Vec<f64> = x.iter().map(|v| v * mu).collect();
                        let ts = t * mu.powi(2 * b as i32);
                        if fm.decay_negligible(&xs, ts) {
                            return Ok(None);
                        }
                        let v = fm.kernel_derivative_any(&beta, &xs, ts)?;
                        Ok(Some(DMatrix::from_element(1, 1, v.amax())))
                    })?;
                    mass += w_mu * mu.powi((n + 2 * b) as i32 - 1) * shell[(0, 0)];
                }
                masses.push(mass);
            }
            let fit = log_log_fit(&cfg.shell_radii, &masses);
            let gap = (fit.slope - (2.0 * b as f64 - ord as f64)).abs();
            worst_gap = worst_gap.max(gap);
            if gap > 0.05 {
                pass = false;
            }
            detail.push_str(&format!(
                "order {ord}: shell-mass slope {:.4} (expected {expect}); ",
                fit.slope
            ));
        }
        checks.push(PropertyCheck {
            name: "integrability",
            pass,
            statistic: worst_gap,
            detail,
        });
    }

    Ok(PropertiesReport { checks })
}

/// Stable content hash of a system's coefficient data (used in kernel-table
/// headers).
pub fn system_hash(system: &ParabolicSystem) -> String {
    let mut hasher = Sha256::new();
    hasher.update((system.n() as u64).to_le_bytes());
    hasher.update((system.b() as u64).to_le_bytes());
    hasher.update((system.m() as u64).to_le_bytes());
    for (alpha, mat) in system.principal() {
        for &c in alpha.components() {
            hasher.update((c as u64).to_le_bytes());
        }
        for v in mat.iter() {
            hasher.update(v.to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    digest.iter().take(16).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn heat_fm() -> FundamentalMatrix {
        FundamentalMatrix::new(FrozenOperator::new(ParabolicSystem::heat(2)).unwrap())
    }

    fn gauss_kernel(x: &[f64], t: f64, d: f64) -> f64 {
        let n = x.len() as f64;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        (4.0 * PI * d * t).powf(-n / 2.0) * (-r2 / (4.0 * d * t)).exp()
    }

    #[test]
    fn constructor_rejects_non_parabolic() {
        let bad = ParabolicSystem::diagonal_laplacian(2, &[1.0, -1.0]).unwrap();
        assert!(FrozenOperator::new(bad).is_err());
        let zero = ParabolicSystem::diagonal_laplacian(2, &[1.0, 0.0]).unwrap();
        assert!(FrozenOperator::new(zero).is_err());
    }

    #[test]
    fn heat_kernel_ground_truth() {
        let fm = heat_fm();
        // closed form at the origin: (4 pi t)^{-1}
        let v = fm.scalar_fundamental(&[0.0, 0.0], 1.0).unwrap();
        assert_relative_eq!(v, 1.0 / (4.0 * PI), max_relative = 1e-9);
        for (x, t) in [
            (vec![0.5, -0.3], 0.5),
            (vec![1.5, 1.0], 1.0),
            (vec![2.0, 0.0], 2.0),
            (vec![0.0, 0.0], 0.5),
        ] {
            let v = fm.matrix_fundamental(&x, t).unwrap()[(0, 0)];
            let e = gauss_kernel(&x, t, 1.0);
            assert_relative_eq!(v, e, max_relative = 1e-8);
        }
    }

    #[test]
    fn heat_first_derivative_matches_closed_form() {
        let fm = heat_fm();
        let alpha = MultiIndex::new(vec![1, 0]);
        for (x, t) in [(vec![0.7, 0.2], 1.0), (vec![-0.4, 1.1], 0.6)] {
            let v = fm.kernel_derivative(&alpha, &x, t).unwrap()[(0, 0)];
            let e = -x[0] / (2.0 * t) * gauss_kernel(&x, t, 1.0);
            assert_relative_eq!(v, e, max_relative = 1e-6);
        }
        // alpha = 0 reduces to the kernel itself
        let z = MultiIndex::zero(2);
        let v = fm.kernel_derivative(&z, &[0.3, 0.3], 0.8).unwrap();
        let w = fm.matrix_fundamental(&[0.3, 0.3], 0.8).unwrap();
        assert_relative_eq!(v[(0, 0)], w[(0, 0)], epsilon = 1e-14);
        // order above 2b rejected
        assert!(fm
            .kernel_derivative(&MultiIndex::new(vec![3, 0]), &[0.3, 0.3], 0.8)
            .is_err());
    }

    #[test]
    fn diagonal_system_gives_two_gaussians() {
        let sys = ParabolicSystem::diagonal_laplacian(2, &[1.0, 2.0]).unwrap();
        let fm = FundamentalMatrix::new(FrozenOperator::new(sys).unwrap());
        let x = [0.6, -0.8];
        let t = 0.9;
        let v = fm.matrix_fundamental(&x, t).unwrap();
        assert_relative_eq!(v[(0, 0)], gauss_kernel(&x, t, 1.0), max_relative = 1e-7);
        assert_relative_eq!(v[(1, 1)], gauss_kernel(&x, t, 2.0), max_relative = 1e-7);
        assert!(v[(0, 1)].abs() < 1e-12);
        // scalar kernel oracle: g = t int_1^2 G_s(x,t) ds by quadrature
        let sf = fm.scalar_fundamental(&x, t).unwrap();
        let mut oracle = 0.0;
        for &(s, w) in &gauss_nodes(48, 1.0, 2.0) {
            oracle += w * gauss_kernel(&x, t, s);
        }
        oracle *= t;
        assert_relative_eq!(sf, oracle, max_relative = 1e-7);
    }

    #[test]
    fn routes_agree_for_heat_and_diagonal() {
        let fm = heat_fm();
        for (x, t) in [(vec![0.5, 0.5], 0.5), (vec![1.2, -0.4], 1.7)] {
            let a = fm.matrix_fundamental(&x, t).unwrap()[(0, 0)];
            let c = fm.matrix_fundamental_cofactor(&x, t).unwrap()[(0, 0)];
            assert_relative_eq!(a, c, max_relative = 1e-10);
        }
        let sys = ParabolicSystem::diagonal_laplacian(2, &[1.0, 2.0]).unwrap();
        let fm = FundamentalMatrix::new(FrozenOperator::new(sys).unwrap());
        let x = [0.4, 0.9];
        let a = fm.matrix_fundamental(&x, 1.1).unwrap();
        let c = fm.matrix_fundamental_cofactor(&x, 1.1).unwrap();
        assert_relative_eq!(a[(0, 0)], c[(0, 0)], max_relative = 1e-6);
        assert_relative_eq!(a[(1, 1)], c[(1, 1)], max_relative = 1e-6);
    }

    #[test]
    fn triangular_offdiagonal_duhamel() {
        // coupled upper-triangular system: A for axis-0 carries coupling c
        use std::collections::BTreeMap;
        let c = 0.7;
        let mut principal = BTreeMap::new();
        for axis in 0..2usize {
            let mut comp = vec![0; 2];
            comp[axis] = 2;
            principal.insert(
                MultiIndex::new(comp),
                DMatrix::from_row_slice(2, 2, &[1.0, c, 0.0, 2.0]),
            );
        }
        let sys = ParabolicSystem::new(2, 1, 2, principal).unwrap();
        let fm = FundamentalMatrix::new(FrozenOperator::new(sys).unwrap());
        let x = [0.8, 0.1];
        let t = 0.7;
        let v = fm.matrix_fundamental(&x, t).unwrap();
        // off-diagonal = c * t * int_0^1 Laplacian(G_{2 - theta})(x,t) dtheta:
        // the Duhamel integral between the two Gaussians, brute-forced by
        // 1-d quadrature with the closed-form Laplacian
        // Lap G_d = (-n/(2dt) + |x|^2/(4 d^2 t^2)) G_d
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let lap_gauss = |d: f64| -> f64 {
            (-2.0 / (2.0 * d * t) + r2 / (4.0 * d * d * t * t)) * gauss_kernel(&x, t, d)
        };
        let mut oracle = 0.0;
        for &(theta, w) in &gauss_nodes(48, 0.0, 1.0) {
            oracle += w * lap_gauss(2.0 - theta);
        }
        oracle *= c * t;
        assert_relative_eq!(v[(0, 1)], oracle, max_relative = 1e-6);
        assert!(v[(1, 0)].abs() < 1e-12);
        // cofactor route agrees
        let vc = fm.matrix_fundamental_cofactor(&x, t).unwrap();
        assert_relative_eq!(v[(0, 1)], vc[(0, 1)], max_relative = 1e-6);
    }

    #[test]
    fn near_degenerate_roots_use_contour() {
        // equal diffusivities: double root everywhere; the residue formula
        // is invalid and the contour path must reproduce exp(tM)
        let sys = ParabolicSystem::diagonal_laplacian(2, &[1.0, 1.0]).unwrap();
        let fm = FundamentalMatrix::new(FrozenOperator::new(sys).unwrap());
        let x = [0.5, 0.2];
        let t = 0.8;
        let a = fm.matrix_fundamental(&x, t).unwrap();
        let c = fm.matrix_fundamental_cofactor(&x, t).unwrap();
        assert_relative_eq!(a[(0, 0)], c[(0, 0)], max_relative = 1e-6);
        assert_relative_eq!(a[(0, 0)], gauss_kernel(&x, t, 1.0), max_relative = 1e-7);
    }

    #[test]
    fn mixed_homogeneity_spot() {
        let fm = heat_fm();
        let alpha = MultiIndex::new(vec![1, 1]);
        let x = [0.6, -0.2];
        let t = 0.5;
        for mu in [0.5f64, 2.0] {
            let xs: Vec<f64> = x.iter().map(|v| v * mu).collect();
            let lhs = fm.kernel_derivative(&alpha, &xs, t * mu * mu).unwrap()[(0, 0)];
            let rhs = fm.kernel_derivative(&alpha, &x, t).unwrap()[(0, 0)]
                * mu.powi(-(2 + 2));
            assert_relative_eq!(lhs, rhs, max_relative = 1e-5);
        }
    }

    #[test]
    fn properties_report_for_heat() {
        let fm = heat_fm();
        let report = check_properties(&fm, &PropertiesConfig::default()).unwrap();
        for check in &report.checks {
            assert!(check.pass, "{}: {} ({})", check.name, check.statistic, check.detail);
        }
    }

    #[test]
    fn semigroup_solution_check() {
        // v(t) = evolve(phi, t) solves the homogeneous system; v -> phi as
        // t -> 0 with L2 error below 1e-3 at t = 1e-3 on band-limited phi
        let fm = heat_fm();
        let spec = GridSpec::uniform_box(2, -PI, PI, 32, 1.0, 48, true).unwrap();
        let phi = GridFunction::from_fn(spec.clone(), 1, |x, _, _| x[0].sin());
        let small = fm.evolve(&phi, 1e-3).unwrap();
        // relative L2 distance on the first slice
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..32 {
            for j in 0..32 {
                let a = small.value(0, &[i, j], 0);
                let b = phi.value(0, &[i, j], 0);
                num += (a - b) * (a - b);
                den += b * b;
            }
        }
        let rel = (num / den).sqrt();
        assert!(rel < 1e-3, "rel {rel}");
        // at t > 0 the evolved field solves the system: residual of the
        // full space-time field v(x, t) = e^{-t} sin(x1)
        let v = GridFunction::from_fn(spec, 1, |x, t, _| (-t).exp() * x[0].sin());
        let ev = fm.evolve(&v, 0.25).unwrap();
        let expect = (-0.25f64).exp();
        let got = ev.value(0, &[8, 0], 0) / v.value(0, &[8, 0], 0);
        assert_relative_eq!(got, expect, max_relative = 1e-9);
    }

    #[test]
    fn fourier_mass_is_conserved_for_heat() {
        // int Gamma(x, t) dx = 1 for the heat kernel: grid sum over a wide
        // box
        let fm = heat_fm();
        let t = 0.5;
        let half = 8.0;
        let k = 64usize;
        let h = 2.0 * half / k as f64;
        let mut mass = 0.0;
        for i in 0..k {
            for j in 0..k {
                let x = [-half + (i as f64 + 0.5) * h, -half + (j as f64 + 0.5) * h];
                mass += fm.matrix_fundamental(&x, t).unwrap()[(0, 0)] * h * h;
            }
        }
        assert_relative_eq!(mass, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = system_hash(&ParabolicSystem::heat(2));
        let b = system_hash(&ParabolicSystem::heat(2));
        assert_eq!(a, b);
        let c = system_hash(&ParabolicSystem::diagonal_laplacian(2, &[2.0]).unwrap());
        assert_ne!(a, c);
    }
}
