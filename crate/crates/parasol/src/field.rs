//! Sampled space-time fields, their derivatives, the parabolic metric and
//! parabolic cylinders.
//!
//! Values live on a tensor grid over `[a_1,b_1] x .. x [a_n,b_n] x [0,T]`,
//! stored time-major, then x_1..x_n, with the m components of the field
//! fastest. Periodic grids differentiate spectrally (exact on band-limited
//! data); non-periodic grids use 4th-order finite differences with one-sided
//! closures.

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{fft_along_axis, wavenumber};
use crate::symbol::{MultiIndex, ParabolicSystem};

/// Geometry of the sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Spatial box `[a_i, b_i]` per axis.
    pub bounds: Vec<(f64, f64)>,
    /// Final time `T`; samples span `[0, T]` inclusive.
    pub t_max: f64,
    /// Points per spatial axis. Periodic axes exclude the right endpoint.
    pub nx: Vec<usize>,
    /// Number of time samples (including t = 0 and t = T).
    pub nt: usize,
    pub periodic: bool,
}

impl GridSpec {
    pub fn new(
        bounds: Vec<(f64, f64)>,
        t_max: f64,
        nx: Vec<usize>,
        nt: usize,
        periodic: bool,
    ) -> Result<Self> {
        if bounds.is_empty() || bounds.len() != nx.len() {
            return Err(Error::InvalidGrid(format!(
                "bounds ({}) and nx ({}) must agree and be non-empty",
                bounds.len(),
                nx.len()
            )));
        }
        for (i, &(a, b)) in bounds.iter().enumerate() {
            if !(b > a) || !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "axis {i}: invalid bounds [{a}, {b}]"
                )));
            }
        }
        if nx.iter().any(|&k| k < 2) || nt < 2 {
            return Err(Error::InvalidGrid("need nx >= 2 per axis and nt >= 2".into()));
        }
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::InvalidGrid(format!("invalid t_max {t_max}")));
        }
        Ok(GridSpec {
            bounds,
            t_max,
            nx,
            nt,
            periodic,
        })
    }

    /// Uniform resolution across axes.
    pub fn uniform_box(
        n: usize,
        a: f64,
        b: f64,
        nx: usize,
        t_max: f64,
        nt: usize,
        periodic: bool,
    ) -> Result<Self> {
        Self::new(vec![(a, b); n], t_max, vec![nx; n], nt, periodic)
    }

    pub fn n(&self) -> usize {
        self.bounds.len()
    }

    pub fn axis_len(&self, axis: usize) -> f64 {
        self.bounds[axis].1 - self.bounds[axis].0
    }

    /// Grid spacing along a spatial axis.
    pub fn spacing(&self, axis: usize) -> f64 {
        let denom = if self.periodic {
            self.nx[axis]
        } else {
            self.nx[axis] - 1
        };
        self.axis_len(axis) / denom as f64
    }

    pub fn dt(&self) -> f64 {
        self.t_max / (self.nt - 1) as f64
    }

    pub fn x_coord(&self, axis: usize, idx: usize) -> f64 {
        self.bounds[axis].0 + self.spacing(axis) * idx as f64
    }

    pub fn t_coord(&self, idx: usize) -> f64 {
        self.dt() * idx as f64
    }

    /// Number of space-time samples (without the component dimension).
    pub fn num_points(&self) -> usize {
        self.nt * self.nx.iter().product::<usize>()
    }

    /// Shape [nt, nx_1, .., nx_n, m].
    fn value_shape(&self, m: usize) -> Vec<usize> {
        let mut s = Vec::with_capacity(self.n() + 2);
        s.push(self.nt);
        s.extend_from_slice(&self.nx);
        s.push(m);
        s
    }

    /// Quadrature weight of the sample at a multi-position (trapezoid per
    /// axis; periodic axes have uniform weight).
    fn point_weight(&self, t_idx: usize, x_idx: &[usize]) -> f64 {
        let mut w = self.dt();
        if t_idx == 0 || t_idx == self.nt - 1 {
            w *= 0.5;
        }
        for (axis, &i) in x_idx.iter().enumerate() {
            let mut wa = self.spacing(axis);
            if !self.periodic && (i == 0 || i == self.nx[axis] - 1) {
                wa *= 0.5;
            }
            w *= wa;
        }
        w
    }
}

/// An m-vector-valued field sampled on a [`GridSpec`].
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub m: usize,
    values: ArrayD<f64>,
}

impl GridFunction {
    pub fn zeros(spec: GridSpec, m: usize) -> Self {
        let shape = spec.value_shape(m);
        GridFunction {
            spec,
            m,
            values: ArrayD::zeros(IxDyn(&shape)),
        }
    }

    /// Sample `f(x, t, component)` over the grid.
    pub fn from_fn<F>(spec: GridSpec, m: usize, f: F) -> Self
    where
        F: Fn(&[f64], f64, usize) -> f64,
    {
        let n = spec.n();
        let mut g = GridFunction::zeros(spec, m);
        let mut x = vec![0.0; n];
        let spec = g.spec.clone();
        for (idx, v) in g.values.indexed_iter_mut() {
            let t = spec.t_coord(idx[0]);
            for axis in 0..n {
                x[axis] = spec.x_coord(axis, idx[1 + axis]);
            }
            *v = f(&x, t, idx[n + 1]);
        }
        g
    }

    pub fn values(&self) -> &ArrayD<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut ArrayD<f64> {
        &mut self.values
    }

    pub fn from_values(spec: GridSpec, m: usize, values: ArrayD<f64>) -> Result<Self> {
        let shape = spec.value_shape(m);
        if values.shape() != shape.as_slice() {
            return Err(Error::InvalidGrid(format!(
                "value shape {:?} does not match grid shape {:?}",
                values.shape(),
                shape
            )));
        }
        Ok(GridFunction { spec, m, values })
    }

    pub fn value(&self, t_idx: usize, x_idx: &[usize], comp: usize) -> f64 {
        let mut idx = Vec::with_capacity(self.spec.n() + 2);
        idx.push(t_idx);
        idx.extend_from_slice(x_idx);
        idx.push(comp);
        self.values[IxDyn(&idx)]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Extract one component as an m=1 field.
    pub fn component(&self, comp: usize) -> GridFunction {
        let n = self.spec.n();
        let view = self.values.index_axis(ndarray::Axis(n + 1), comp);
        let mut shape = view.shape().to_vec();
        shape.push(1);
        let values = view.to_owned().into_shape_with_order(IxDyn(&shape)).unwrap();
        GridFunction {
            spec: self.spec.clone(),
            m: 1,
            values,
        }
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        GridFunction {
            spec: self.spec.clone(),
            m: self.m,
            values: &self.values * c,
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with<F>(&self, other: &GridFunction, f: F) -> Result<GridFunction>
    where
        F: Fn(f64, f64) -> f64,
    {
        if self.spec != other.spec || self.m != other.m {
            return Err(Error::DimensionMismatch(
                "grid functions live on different grids".into(),
            ));
        }
        let mut out = self.clone();
        for (o, b) in out.values.iter_mut().zip(other.values.iter()) {
            *o = f(*o, *b);
        }
        Ok(out)
    }

    /// Spatial derivative `D^alpha u`. Periodic grids use the Fourier
    /// multiplier `(i k)^alpha`; non-periodic grids use 4th-order finite
    /// differences with one-sided closures at the boundary.
    pub fn spatial_derivative(&self, alpha: &MultiIndex) -> Result<GridFunction> {
        let n = self.spec.n();
        if alpha.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "alpha has length {} but grid has n={n}",
                alpha.len()
            )));
        }
        let order = alpha.order();
        if order == 0 {
            return Ok(self.clone());
        }
        for (axis, &k) in self.spec.nx.iter().enumerate() {
            if k < 4 * order.max(1) && alpha.components()[axis] > 0 {
                return Err(Error::Resolution(format!(
                    "axis {axis} has {k} points; need at least {} for a derivative of order {order}",
                    4 * order
                )));
            }
        }
        if self.spec.periodic {
            self.spectral_derivative(alpha)
        } else {
            let mut out = self.clone();
            for (axis, &ord) in alpha.components().iter().enumerate() {
                if ord > 0 {
                    out = out.fd_derivative_axis(1 + axis, ord, self.spec.spacing(axis))?;
                }
            }
            Ok(out)
        }
    }

    /// Time derivative `D_t u` by 4th-order finite differences with
    /// one-sided closures at the two ends.
    pub fn time_derivative(&self) -> Result<GridFunction> {
        if self.spec.nt < 4 {
            return Err(Error::Resolution(format!(
                "time axis has {} samples; need at least 4",
                self.spec.nt
            )));
        }
        self.fd_derivative_axis(0, 1, self.spec.dt())
    }

    fn spectral_derivative(&self, alpha: &MultiIndex) -> Result<GridFunction> {
        let n = self.spec.n();
        let mut data = self.values.mapv(|v| Complex64::new(v, 0.0));
        for (axis, &ord) in alpha.components().iter().enumerate() {
            if ord == 0 {
                continue;
            }
            let arr_axis = 1 + axis;
            let len = self.spec.nx[axis];
            let axis_len = self.spec.axis_len(axis);
            fft_along_axis(&mut data, arr_axis, false);
            // multiplier (i k)^ord; zero the unmatched Nyquist bin for odd
            // orders
            let mut mult = vec![Complex64::new(0.0, 0.0); len];
            for (idx, mv) in mult.iter_mut().enumerate() {
                let k = wavenumber(idx, len, axis_len);
                let ik = Complex64::new(0.0, k);
                let mut f = ik.powu(ord as u32);
                if ord % 2 == 1 && len % 2 == 0 && idx == len / 2 {
                    f = Complex64::new(0.0, 0.0);
                }
                *mv = f;
            }
            for (mut lane, _) in data
                .lanes_mut(ndarray::Axis(arr_axis))
                .into_iter()
                .zip(0..)
            {
                for (v, mv) in lane.iter_mut().zip(&mult) {
                    *v *= mv;
                }
            }
            fft_along_axis(&mut data, arr_axis, true);
        }
        let _ = n;
        let values = data.mapv(|c| c.re);
        Ok(GridFunction {
            spec: self.spec.clone(),
            m: self.m,
            values,
        })
    }

    /// Finite-difference derivative of given order along one array axis
    /// (axis 0 = time, axis 1+k = spatial axis k), 4th-order accurate where
    /// the stencil fits.
    fn fd_derivative_axis(&self, arr_axis: usize, ord: usize, h: f64) -> Result<GridFunction> {
        let len = self.values.shape()[arr_axis];
        let width = (ord + 4).min(len);
        if width <= ord {
            return Err(Error::Resolution(format!(
                "axis of length {len} cannot support derivative order {ord}"
            )));
        }
        // Precompute stencils for each output position.
        let mut stencils: Vec<(usize, Vec<f64>)> = Vec::with_capacity(len);
        for i in 0..len {
            let half = width / 2;
            let start = i.saturating_sub(half).min(len - width);
            let xs: Vec<f64> = (0..width).map(|j| (start + j) as f64 * h).collect();
            let w = fornberg_weights(i as f64 * h, &xs, ord);
            stencils.push((start, w));
        }
        let mut out = self.clone();
        let mut scratch = vec![0.0; len];
        for (lane_in, mut lane_out) in self
            .values
            .lanes(ndarray::Axis(arr_axis))
            .into_iter()
            .zip(out.values.lanes_mut(ndarray::Axis(arr_axis)))
        {
            for (s, v) in scratch.iter_mut().zip(lane_in.iter()) {
                *s = *v;
            }
            for (i, o) in lane_out.iter_mut().enumerate() {
                let (start, w) = &stencils[i];
                *o = w
                    .iter()
                    .enumerate()
                    .map(|(j, &wj)| wj * scratch[start + j])
                    .sum();
            }
        }
        Ok(out)
    }
}

/// Finite-difference weights for the `der`-th derivative at `x0` from nodes
/// `xs` (Fornberg's recursion).
pub fn fornberg_weights(x0: f64, xs: &[f64], der: usize) -> Vec<f64> {
    let n = xs.len();
    let m = der;
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Parabolic distance `max(|x_p - x_q|, |t_p - t_q|^{1/2b})`.
pub fn parabolic_distance(
    x_p: &[f64],
    t_p: f64,
    x_q: &[f64],
    t_q: f64,
    b: usize,
) -> f64 {
    assert!(b >= 1, "half-order b must be >= 1");
    assert_eq!(x_p.len(), x_q.len());
    let dx: f64 = x_p
        .iter()
        .zip(x_q)
        .map(|(a, c)| (a - c) * (a - c))
        .sum::<f64>()
        .sqrt();
    let dt = (t_p - t_q).abs().powf(1.0 / (2 * b) as f64);
    dx.max(dt)
}

/// Parabolic metric applied to a single offset.
pub fn parabolic_norm(dx: &[f64], dt: f64, b: usize) -> f64 {
    let zero = vec![0.0; dx.len()];
    parabolic_distance(dx, dt, &zero, 0.0, b)
}

/// The cylinder `B_r(x0) x (t0 - r^{2b}, t0]` anchored at its top time.
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicCylinder {
    pub center: Vec<f64>,
    pub top_time: f64,
    pub radius: f64,
    pub half_order: usize,
}

impl ParabolicCylinder {
    pub fn new(center: Vec<f64>, top_time: f64, radius: f64, half_order: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cylinder radius must be positive, got {radius}"
            )));
        }
        if half_order < 1 {
            return Err(Error::InvalidArgument("half_order must be >= 1".into()));
        }
        Ok(ParabolicCylinder {
            center,
            top_time,
            radius,
            half_order,
        })
    }

    pub fn depth(&self) -> f64 {
        self.radius.powi(2 * self.half_order as i32)
    }

    /// Lebesgue measure `|B_r| * r^{2b}`.
    pub fn measure(&self) -> f64 {
        unit_ball_volume(self.center.len()) * self.radius.powi(self.center.len() as i32)
            * self.depth()
    }

    /// Strict spatial ball, half-open time window (t0 - r^{2b}, t0].
    pub fn contains(&self, x: &[f64], t: f64) -> bool {
        let d2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c) * (a - c))
            .sum();
        d2 < self.radius * self.radius && t > self.top_time - self.depth() && t <= self.top_time
    }

    /// Concentric cylinder with radius scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> ParabolicCylinder {
        ParabolicCylinder {
            center: self.center.clone(),
            top_time: self.top_time,
            radius: self.radius * factor,
            half_order: self.half_order,
        }
    }
}

pub fn unit_ball_volume(n: usize) -> f64 {
    // pi^{n/2} / Gamma(n/2 + 1)
    let half = n as f64 / 2.0;
    std::f64::consts::PI.powf(half) / gamma(half + 1.0)
}

fn gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7.
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = COEF[0];
        let t = x + G + 0.5;
        for (i, &c) in COEF.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Sample subset of a grid lying inside a region, with tensor-trapezoid
/// quadrature weights clipped by the region indicator.
#[derive(Debug, Clone)]
pub struct Restriction {
    /// (t index, spatial indices) of each retained sample.
    pub indices: Vec<(usize, Vec<usize>)>,
    pub weights: Vec<f64>,
}

impl Restriction {
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Integration region for norms.
#[derive(Debug, Clone)]
pub enum Region {
    /// The whole grid box.
    All,
    /// `[lo_i, hi_i] x [t_lo, t_hi]`.
    SpaceTimeBox {
        lo: Vec<f64>,
        hi: Vec<f64>,
        t_lo: f64,
        t_hi: f64,
    },
    Cylinder(ParabolicCylinder),
}

impl Region {
    pub fn contains(&self, x: &[f64], t: f64) -> bool {
        match self {
            Region::All => true,
            Region::SpaceTimeBox { lo, hi, t_lo, t_hi } => {
                t >= *t_lo
                    && t <= *t_hi
                    && x.iter()
                        .zip(lo.iter().zip(hi))
                        .all(|(v, (l, h))| *v >= *l && *v <= *h)
            }
            Region::Cylinder(c) => c.contains(x, t),
        }
    }
}

/// Restrict a grid to the samples inside a cylinder. An empty intersection
/// yields an empty restriction, not an error.
pub fn restrict(u: &GridFunction, cyl: &ParabolicCylinder) -> Restriction {
    restrict_region(&u.spec, &Region::Cylinder(cyl.clone()))
}

pub fn restrict_region(spec: &GridSpec, region: &Region) -> Restriction {
    let n = spec.n();
    let mut indices = Vec::new();
    let mut weights = Vec::new();
    let mut x = vec![0.0; n];
    let mut x_idx = vec![0usize; n];
    let total_x: usize = spec.nx.iter().product();
    for t_idx in 0..spec.nt {
        let t = spec.t_coord(t_idx);
        for flat in 0..total_x {
            let mut rem = flat;
            for axis in (0..n).rev() {
                x_idx[axis] = rem % spec.nx[axis];
                rem /= spec.nx[axis];
            }
            for axis in 0..n {
                x[axis] = spec.x_coord(axis, x_idx[axis]);
            }
            if region.contains(&x, t) {
                indices.push((t_idx, x_idx.clone()));
                weights.push(spec.point_weight(t_idx, &x_idx));
            }
        }
    }
    Restriction { indices, weights }
}

/// Coefficient fields for variable-coefficient operator application:
/// `A_alpha(x, t)` for each principal multi-index.
pub trait CoefficientField {
    fn matrix(&self, alpha: &MultiIndex, x: &[f64], t: f64) -> nalgebra::DMatrix<f64>;
}

impl<F> CoefficientField for F
where
    F: Fn(&MultiIndex, &[f64], f64) -> nalgebra::DMatrix<f64>,
{
    fn matrix(&self, alpha: &MultiIndex, x: &[f64], t: f64) -> nalgebra::DMatrix<f64> {
        self(alpha, x, t)
    }
}

/// Apply `L u = D_t u - sum_alpha A_alpha D^alpha u` on the grid. With
/// `coeff` absent the constant matrices of `system` are used.
pub fn apply_operator(
    system: &ParabolicSystem,
    coeff: Option<&dyn CoefficientField>,
    u: &GridFunction,
) -> Result<GridFunction> {
    if u.spec.n() != system.n() {
        return Err(Error::DimensionMismatch(format!(
            "grid dimension {} != system dimension {}",
            u.spec.n(),
            system.n()
        )));
    }
    if u.m != system.m() {
        return Err(Error::DimensionMismatch(format!(
            "field has {} components but system has m={}",
            u.m,
            system.m()
        )));
    }
    let n = u.spec.n();
    let m = u.m;
    let mut out = u.time_derivative()?;
    for (alpha, a_const) in system.principal() {
        let du = u.spatial_derivative(alpha)?;
        match coeff {
            None => {
                // out -= A * du, pointwise matrix-vector product
                subtract_matvec_const(&mut out, a_const, &du);
            }
            Some(cf) => {
                let spec = u.spec.clone();
                let mut x = vec![0.0; n];
                let shape: Vec<usize> = du.values.shape().to_vec();
                let total_x: usize = spec.nx.iter().product();
                let _ = shape;
                for t_idx in 0..spec.nt {
                    let t = spec.t_coord(t_idx);
                    for flat in 0..total_x {
                        let mut rem = flat;
                        let mut x_idx = vec![0usize; n];
                        for axis in (0..n).rev() {
                            x_idx[axis] = rem % spec.nx[axis];
                            rem /= spec.nx[axis];
                        }
                        for axis in 0..n {
                            x[axis] = spec.x_coord(axis, x_idx[axis]);
                        }
                        let a = cf.matrix(alpha, &x, t);
                        let mut idx = Vec::with_capacity(n + 2);
                        idx.push(t_idx);
                        idx.extend_from_slice(&x_idx);
                        idx.push(0);
                        for i in 0..m {
                            idx[n + 1] = i;
                            let mut acc = 0.0;
                            for j in 0..m {
                                let mut jdx = idx.clone();
                                jdx[n + 1] = j;
                                acc += a[(i, j)] * du.values[IxDyn(&jdx)];
                            }
                            idx[n + 1] = i;
                            out.values[IxDyn(&idx)] -= acc;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn subtract_matvec_const(
    out: &mut GridFunction,
    a: &nalgebra::DMatrix<f64>,
    du: &GridFunction,
) {
    let m = out.m;
    if m == 1 {
        let c = a[(0, 0)];
        if c != 0.0 {
            for (o, d) in out.values.iter_mut().zip(du.values.iter()) {
                *o -= c * d;
            }
        }
        return;
    }
    let points = out.values.len() / m;
    let ov = out.values.as_slice_mut().unwrap();
    let dv = du.values.as_slice().unwrap();
    for p in 0..points {
        let base = p * m;
        for i in 0..m {
            let mut acc = 0.0;
            for j in 0..m {
                let c = a[(i, j)];
                if c != 0.0 {
                    acc += c * dv[base + j];
                }
            }
            ov[base + i] -= acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn periodic_2d(nx: usize, nt: usize) -> GridSpec {
        GridSpec::uniform_box(2, -std::f64::consts::PI, std::f64::consts::PI, nx, 1.0, nt, true)
            .unwrap()
    }

    #[test]
    fn parabolic_distance_cases() {
        assert_eq!(parabolic_distance(&[1.0, 2.0], 3.0, &[1.0, 2.0], 3.0, 2), 0.0);
        // b=2: max(3, 16^{1/4}) = 3
        let d = parabolic_distance(&[3.0, 0.0], 16.0, &[0.0, 0.0], 0.0, 2);
        assert_relative_eq!(d, 3.0);
        // b=1: max(1, 4^{1/2}) = 2
        let d = parabolic_distance(&[1.0], 4.0, &[0.0], 0.0, 1);
        assert_relative_eq!(d, 2.0);
    }

    #[test]
    fn quasi_metric_triangle_inequality() {
        // the max-form parabolic metric satisfies the genuine triangle
        // inequality
        let pts = [
            (vec![0.3, -0.2], 0.7),
            (vec![-1.0, 0.4], 0.1),
            (vec![0.9, 2.0], 0.95),
        ];
        let d = |a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)| {
            parabolic_distance(&a.0, a.1, &b.0, b.1, 1)
        };
        let d01 = d(&pts[0], &pts[1]);
        let d12 = d(&pts[1], &pts[2]);
        let d02 = d(&pts[0], &pts[2]);
        assert!(d02 <= d01 + d12 + 1e-15);
    }

    #[test]
    fn spectral_second_derivative_of_sine() {
        let spec = periodic_2d(32, 4);
        let u = GridFunction::from_fn(spec, 1, |x, _t, _| x[0].sin());
        let d2 = u
            .spatial_derivative(&MultiIndex::new(vec![2, 0]))
            .unwrap();
        let expect = GridFunction::from_fn(u.spec.clone(), 1, |x, _t, _| -x[0].sin());
        let err = d2.sub(&expect).unwrap().max_abs();
        assert!(err < 1e-10, "err={err}");
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let spec = periodic_2d(16, 4);
        let u = GridFunction::from_fn(spec, 1, |_, _, _| 3.25);
        for alpha in [vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1]] {
            let d = u.spatial_derivative(&MultiIndex::new(alpha)).unwrap();
            assert!(d.max_abs() < 1e-11);
        }
    }

    #[test]
    fn fd_second_derivative_of_parabola() {
        let spec = GridSpec::uniform_box(2, 0.0, 1.0, 17, 1.0, 4, false).unwrap();
        let u = GridFunction::from_fn(spec, 1, |x, _, _| x[0] * x[0]);
        let d2 = u
            .spatial_derivative(&MultiIndex::new(vec![2, 0]))
            .unwrap();
        for v in d2.values().iter() {
            assert_relative_eq!(*v, 2.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn time_derivatives() {
        let spec = periodic_2d(8, 16);
        let u = GridFunction::from_fn(spec.clone(), 1, |_, t, _| t);
        let dt = u.time_derivative().unwrap();
        for v in dt.values().iter() {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-9);
        }
        let u2 = GridFunction::from_fn(spec.clone(), 1, |_, t, _| t * t);
        let dt2 = u2.time_derivative().unwrap();
        // exact for quadratics with a 5-point 4th-order stencil
        let expect = GridFunction::from_fn(spec.clone(), 1, |_, t, _| 2.0 * t);
        assert!(dt2.sub(&expect).unwrap().max_abs() < 1e-9);
        let c = GridFunction::from_fn(spec, 1, |_, _, _| 1.5);
        assert!(c.time_derivative().unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn heat_solution_in_kernel_of_operator() {
        let spec = periodic_2d(32, 96);
        let u = GridFunction::from_fn(spec, 1, |x, t, _| (-t).exp() * x[0].sin());
        let sys = ParabolicSystem::heat(2);
        let lu = apply_operator(&sys, None, &u).unwrap();
        assert!(lu.max_abs() < 1e-8, "residual {}", lu.max_abs());
    }

    #[test]
    fn forced_zero_delta_component() {
        // (4.2) with delta = (0, 1): u = (t sin(N x1), 0) gives L u =
        // (sin(N x1), 0)
        let n_mode = 3.0;
        let spec = periodic_2d(32, 16);
        let sys = ParabolicSystem::diagonal_laplacian(2, &[0.0, 1.0]).unwrap();
        let u = GridFunction::from_fn(spec.clone(), 2, |x, t, k| {
            if k == 0 {
                t * (n_mode * x[0]).sin()
            } else {
                0.0
            }
        });
        let lu = apply_operator(&sys, None, &u).unwrap();
        let expect = GridFunction::from_fn(spec, 2, |x, _, k| {
            if k == 0 {
                (n_mode * x[0]).sin()
            } else {
                0.0
            }
        });
        assert!(lu.sub(&expect).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn operator_linearity() {
        let spec = periodic_2d(16, 8);
        let sys = ParabolicSystem::heat(2);
        let u = GridFunction::from_fn(spec.clone(), 1, |x, t, _| x[0].sin() * (1.0 + t));
        let v = GridFunction::from_fn(spec, 1, |x, t, _| (x[1] * 2.0).cos() * t * t);
        let lhs = apply_operator(&sys, None, &u.add(&v).unwrap()).unwrap();
        let rhs = apply_operator(&sys, None, &u)
            .unwrap()
            .add(&apply_operator(&sys, None, &v).unwrap())
            .unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn derivative_commutation() {
        let spec = periodic_2d(32, 4);
        let u = GridFunction::from_fn(spec, 1, |x, _, _| (2.0 * x[0]).sin() * x[1].cos());
        let a = MultiIndex::new(vec![1, 0]);
        let b = MultiIndex::new(vec![0, 1]);
        let p1 = u
            .spatial_derivative(&a)
            .unwrap()
            .spatial_derivative(&b)
            .unwrap();
        let p2 = u.spatial_derivative(&a.plus(&b)).unwrap();
        assert!(p1.sub(&p2).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn cylinder_membership_and_measure() {
        let c = ParabolicCylinder::new(vec![0.0, 0.0], 1.0, 1.0, 1).unwrap();
        assert!(c.contains(&[0.5, 0.0], 1.0)); // top included
        assert!(!c.contains(&[0.5, 0.0], 0.0)); // bottom excluded
        assert!(!c.contains(&[1.0, 0.0], 0.5)); // boundary sphere excluded
        assert_relative_eq!(c.measure(), std::f64::consts::PI, epsilon = 1e-12);
        // measure scaling: mu^{n+2b}
        let mu: f64 = 1.7;
        let scaled = c.scaled(mu);
        assert_relative_eq!(
            scaled.measure() / c.measure(),
            mu.powi(4),
            epsilon = 1e-10
        );
    }

    #[test]
    fn restriction_weights_sum_to_measure() {
        let spec = GridSpec::uniform_box(2, -2.0, 2.0, 64, 1.2, 33, false).unwrap();
        let u = GridFunction::zeros(spec, 1);
        // whole box
        let all = restrict_region(&u.spec, &Region::All);
        assert_relative_eq!(all.total_weight(), 16.0 * 1.2, epsilon = 1e-9);
        // unit cylinder with depth 1 within the box: weight ~ pi
        let c = ParabolicCylinder::new(vec![0.0, 0.0], 1.1, 1.0, 1).unwrap();
        let r = restrict(&u, &c);
        assert_relative_eq!(r.total_weight(), std::f64::consts::PI, max_relative = 0.05);
        // degenerate cylinder below grid resolution -> empty, not an error
        let tiny = ParabolicCylinder::new(vec![0.031, 0.033], 1.0, 1e-4, 1).unwrap();
        let r = restrict(&u, &tiny);
        assert!(r.is_empty());
    }

    #[test]
    fn fornberg_standard_stencils() {
        // central 3-point second derivative on unit spacing
        let w = fornberg_weights(1.0, &[0.0, 1.0, 2.0], 2);
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(w[1], -2.0, epsilon = 1e-12);
        assert_relative_eq!(w[2], 1.0, epsilon = 1e-12);
        // 5-point 4th-order first derivative
        let xs: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let w = fornberg_weights(2.0, &xs, 1);
        let expect = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        for (a, e) in w.iter().zip(expect) {
            assert_relative_eq!(*a, e, epsilon = 1e-12);
        }
    }
}
