//! Differentiation and quadrature on the three chart grid types: doubly
//! periodic Fourier, polar stereographic (Gauss-Legendre colatitude times
//! Fourier azimuth), and a periodic strip (Fourier times Gauss-Legendre).
//!
//! Complex Wirtinger derivatives follow the convention
//! del = (d/dq1 - i d/dq2)/2 and delbar = (d/dq1 + i d/dq2)/2.

use crate::{C64, CField, RField};
use ndarray::{Array2, Axis};
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Wavenumbers in FFT storage order, scaled by 2*pi/len. With `antiperiodic`
/// the whole ladder shifts by half a step, matching fields that flip sign
/// over one period.
pub fn fourier_wavenumbers(n: usize, len: f64, antiperiodic: bool) -> Vec<f64> {
    let shift = if antiperiodic { 0.5 } else { 0.0 };
    (0..n)
        .map(|i| {
            let k = if i <= (n - 1) / 2 {
                i as f64
            } else {
                i as f64 - n as f64
            };
            (k + shift) * 2.0 * PI / len
        })
        .collect()
}

/// Forward/inverse FFT plans for one length, inverse normalized by 1/n.
#[derive(Clone)]
pub struct FftPair {
    pub n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPair {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn forward(&self, buf: &mut [C64]) {
        self.fwd.process(buf);
    }

    pub fn inverse(&self, buf: &mut [C64]) {
        self.inv.process(buf);
        let s = 1.0 / self.n as f64;
        for v in buf.iter_mut() {
            *v *= s;
        }
    }
}

fn fft_axis(field: &mut CField, pair: &FftPair, axis: usize, forward: bool) {
    let mut buf = vec![C64::new(0.0, 0.0); pair.n];
    for mut lane in field.lanes_mut(Axis(axis)) {
        for (b, v) in buf.iter_mut().zip(lane.iter()) {
            *b = *v;
        }
        if forward {
            pair.forward(&mut buf);
        } else {
            pair.inverse(&mut buf);
        }
        for (v, b) in lane.iter_mut().zip(buf.iter()) {
            *v = *b;
        }
    }
}

/// Doubly periodic Fourier chart ops on `[0,l1) x [0,l2)`.
#[derive(Clone)]
pub struct TorusOps {
    pub n1: usize,
    pub n2: usize,
    pub l1: f64,
    pub l2: f64,
    fft1: FftPair,
    fft2: FftPair,
}

impl TorusOps {
    pub fn new(n1: usize, n2: usize, l1: f64, l2: f64) -> Self {
        TorusOps {
            n1,
            n2,
            l1,
            l2,
            fft1: FftPair::new(n1),
            fft2: FftPair::new(n2),
        }
    }

    pub fn nodes1(&self) -> Vec<f64> {
        (0..self.n1).map(|i| i as f64 * self.l1 / self.n1 as f64).collect()
    }

    pub fn nodes2(&self) -> Vec<f64> {
        (0..self.n2).map(|j| j as f64 * self.l2 / self.n2 as f64).collect()
    }

    pub fn weights(&self) -> RField {
        let w = self.l1 * self.l2 / (self.n1 * self.n2) as f64;
        Array2::from_elem((self.n1, self.n2), w)
    }

    /// Apply a per-mode multiplier m(k1, k2) in Fourier space.
    fn apply_multiplier<F: Fn(f64, f64) -> C64>(&self, f: &CField, m: F) -> CField {
        let k1 = fourier_wavenumbers(self.n1, self.l1, false);
        let k2 = fourier_wavenumbers(self.n2, self.l2, false);
        let mut g = f.clone();
        fft_axis(&mut g, &self.fft2, 1, true);
        fft_axis(&mut g, &self.fft1, 0, true);
        for ((i, j), v) in g.indexed_iter_mut() {
            *v *= m(k1[i], k2[j]);
        }
        fft_axis(&mut g, &self.fft1, 0, false);
        fft_axis(&mut g, &self.fft2, 1, false);
        g
    }

    pub fn d1(&self, f: &CField) -> CField {
        self.apply_multiplier(f, |a, _| C64::new(0.0, a))
    }

    pub fn d2(&self, f: &CField) -> CField {
        self.apply_multiplier(f, |_, b| C64::new(0.0, b))
    }

    pub fn del(&self, f: &CField) -> CField {
        self.apply_multiplier(f, |a, b| 0.5 * C64::new(b, a))
    }

    pub fn delbar(&self, f: &CField) -> CField {
        self.apply_multiplier(f, |a, b| 0.5 * C64::new(-b, a))
    }
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        // Newton from the Chebyshev-like initial guess; dp is the derivative
        // of the degree-n Legendre polynomial at the converged node.
        let mut xi = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = xi;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * xi * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (xi * p1 - p0) / (xi * xi - 1.0);
            let dx = p1 / dp;
            xi -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        x[n - 1 - i] = xi;
        w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
    (x, w)
}

/// Barycentric first-derivative matrix on arbitrary distinct nodes.
pub fn barycentric_diff(nodes: &[f64]) -> Array2<f64> {
    let n = nodes.len();
    let mut c = vec![1.0; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                c[i] *= nodes[i] - nodes[j];
            }
        }
    }
    // Normalize to tame under/overflow of the node-difference products; only
    // ratios c[j]/c[i] enter the matrix.
    let cmax = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for v in c.iter_mut() {
        *v /= cmax;
    }
    let mut d = Array2::zeros((n, n));
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let dij = (c[i] / c[j]) / (nodes[i] - nodes[j]);
                d[(i, j)] = dij;
                diag -= dij;
            }
        }
        d[(i, i)] = diag;
    }
    d
}

/// Polar stereographic chart ops for a sphere-like surface: Gauss-Legendre
/// nodes in the colatitude (axis 0), Fourier modes in the azimuth (axis 1).
/// The chart coordinate is z = r e^{i phi} with r = tan(theta/2).
#[derive(Clone)]
pub struct SphereOps {
    pub n1: usize,
    pub n2: usize,
    /// cos(theta) at the nodes, descending so theta ascends.
    pub t: Vec<f64>,
    pub theta: Vec<f64>,
    pub r: Vec<f64>,
    glw: Vec<f64>,
    dt: Array2<C64>,
    fft2: FftPair,
}

impl SphereOps {
    pub fn new(n1: usize, n2: usize) -> Self {
        let (x, w) = gauss_legendre(n1);
        let t: Vec<f64> = x.iter().rev().copied().collect();
        let glw: Vec<f64> = w.iter().rev().copied().collect();
        let theta: Vec<f64> = t.iter().map(|v| v.acos()).collect();
        let r: Vec<f64> = theta.iter().map(|th| (th / 2.0).tan()).collect();
        let dt = barycentric_diff(&t).mapv(|v| C64::new(v, 0.0));
        SphereOps {
            n1,
            n2,
            t,
            theta,
            r,
            glw,
            dt,
            fft2: FftPair::new(n2),
        }
    }

    pub fn phi(&self) -> Vec<f64> {
        (0..self.n2).map(|j| 2.0 * PI * j as f64 / self.n2 as f64).collect()
    }

    /// Flat-measure d^2q weights: Gauss-Legendre in cos(theta) pulled back
    /// through r = tan(theta/2), so that sum(w * rho) integrates area exactly
    /// for the round conformal factor.
    pub fn weights(&self) -> RField {
        let mut w = Array2::zeros((self.n1, self.n2));
        let fphi = 2.0 * PI / self.n2 as f64;
        for i in 0..self.n1 {
            let pref = (1.0 + self.r[i] * self.r[i]).powi(2) / 4.0;
            for j in 0..self.n2 {
                w[(i, j)] = self.glw[i] * fphi * pref;
            }
        }
        w
    }

    /// d/dtheta with the azimuthal-mode parity split: odd modes carry a
    /// sin(theta) factor whose half-integer power of (1 - t^2) defeats
    /// polynomial differentiation in t, so peel it off, differentiate the
    /// smooth remainder, and reassemble.
    pub fn d_theta(&self, f: &CField) -> CField {
        let mut fh = f.clone();
        fft_axis(&mut fh, &self.fft2, 1, true);
        let sin_th: Vec<f64> = self.theta.iter().map(|v| v.sin()).collect();
        let cos_th = &self.t;
        let half = self.n2 / 2;
        let mut even_idx = Vec::new();
        let mut odd_idx = Vec::new();
        for j in 0..self.n2 {
            let m = if j <= half { j } else { self.n2 - j };
            if m % 2 == 0 {
                even_idx.push(j);
            } else {
                odd_idx.push(j);
            }
        }
        let mut out: CField = Array2::zeros((self.n1, self.n2));
        if !even_idx.is_empty() {
            let mut even: CField = Array2::zeros((self.n1, even_idx.len()));
            for (c, &j) in even_idx.iter().enumerate() {
                for i in 0..self.n1 {
                    even[(i, c)] = fh[(i, j)];
                }
            }
            let deven = self.dt.dot(&even);
            for (c, &j) in even_idx.iter().enumerate() {
                for i in 0..self.n1 {
                    out[(i, j)] = -sin_th[i] * deven[(i, c)];
                }
            }
        }
        if !odd_idx.is_empty() {
            let mut g: CField = Array2::zeros((self.n1, odd_idx.len()));
            for (c, &j) in odd_idx.iter().enumerate() {
                for i in 0..self.n1 {
                    g[(i, c)] = fh[(i, j)] / sin_th[i];
                }
            }
            let dg = self.dt.dot(&g);
            for (c, &j) in odd_idx.iter().enumerate() {
                for i in 0..self.n1 {
                    out[(i, j)] = cos_th[i] * g[(i, c)] - sin_th[i] * sin_th[i] * dg[(i, c)];
                }
            }
        }
        fft_axis(&mut out, &self.fft2, 1, false);
        out
    }

    pub fn d_phi(&self, f: &CField) -> CField {
        let mut fh = f.clone();
        fft_axis(&mut fh, &self.fft2, 1, true);
        let k = fourier_wavenumbers(self.n2, 2.0 * PI, false);
        for ((_, j), v) in fh.indexed_iter_mut() {
            *v *= C64::new(0.0, k[j]);
        }
        fft_axis(&mut fh, &self.fft2, 1, false);
        fh
    }

    fn del_impl(&self, f: &CField, bar: bool) -> CField {
        let ft = self.d_theta(f);
        let fp = self.d_phi(f);
        let phi = self.phi();
        let mut out = Array2::zeros((self.n1, self.n2));
        for i in 0..self.n1 {
            let pref = 2.0 / (1.0 + self.r[i] * self.r[i]);
            let rinv = 1.0 / self.r[i];
            for j in 0..self.n2 {
                let e = C64::from_polar(1.0, if bar { phi[j] } else { -phi[j] });
                let fterm = if bar {
                    C64::new(0.0, rinv) * fp[(i, j)]
                } else {
                    C64::new(0.0, -rinv) * fp[(i, j)]
                };
                out[(i, j)] = 0.5 * e * (pref * ft[(i, j)] + fterm);
            }
        }
        out
    }

    pub fn del(&self, f: &CField) -> CField {
        self.del_impl(f, false)
    }

    pub fn delbar(&self, f: &CField) -> CField {
        self.del_impl(f, true)
    }
}

/// Periodic strip chart ops: Fourier in q1 = u (axis 1, period `lu`),
/// Gauss-Legendre in q2 = v (axis 0, on `[-vh, vh]`). z = u + i v.
#[derive(Clone)]
pub struct StripOps {
    pub nv: usize,
    pub nu: usize,
    pub lu: f64,
    pub vh: f64,
    pub v: Vec<f64>,
    glw: Vec<f64>,
    dmat_v: Array2<C64>,
    fftu: FftPair,
}

impl StripOps {
    pub fn new(nv: usize, nu: usize, lu: f64, vh: f64) -> Self {
        let (x, w) = gauss_legendre(nv);
        let v: Vec<f64> = x.iter().map(|xi| vh * xi).collect();
        let glw: Vec<f64> = w.iter().map(|wi| vh * wi).collect();
        let dmat_v = barycentric_diff(&v).mapv(|val| C64::new(val, 0.0));
        StripOps {
            nv,
            nu,
            lu,
            vh,
            v,
            glw,
            dmat_v,
            fftu: FftPair::new(nu),
        }
    }

    pub fn u(&self) -> Vec<f64> {
        (0..self.nu).map(|j| j as f64 * self.lu / self.nu as f64).collect()
    }

    pub fn weights(&self) -> RField {
        let fu = self.lu / self.nu as f64;
        let mut w = Array2::zeros((self.nv, self.nu));
        for i in 0..self.nv {
            for j in 0..self.nu {
                w[(i, j)] = self.glw[i] * fu;
            }
        }
        w
    }

    pub fn du(&self, f: &CField) -> CField {
        let mut fh = f.clone();
        fft_axis(&mut fh, &self.fftu, 1, true);
        let k = fourier_wavenumbers(self.nu, self.lu, false);
        for ((_, j), val) in fh.indexed_iter_mut() {
            *val *= C64::new(0.0, k[j]);
        }
        fft_axis(&mut fh, &self.fftu, 1, false);
        fh
    }

    pub fn dv(&self, f: &CField) -> CField {
        self.dmat_v.dot(f)
    }

    pub fn del(&self, f: &CField) -> CField {
        let a = self.du(f);
        let b = self.dv(f);
        let mut out = a;
        out.zip_mut_with(&b, |x, y| *x = 0.5 * (*x - C64::i() * *y));
        out
    }

    pub fn delbar(&self, f: &CField) -> CField {
        let a = self.du(f);
        let b = self.dv(f);
        let mut out = a;
        out.zip_mut_with(&b, |x, y| *x = 0.5 * (*x + C64::i() * *y));
        out
    }
}

/// Differentiation and quadrature for one chart, dispatching on grid type.
#[derive(Clone)]
pub enum ChartOps {
    Torus(TorusOps),
    Sphere(SphereOps),
    Strip(StripOps),
}

impl ChartOps {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            ChartOps::Torus(t) => (t.n1, t.n2),
            ChartOps::Sphere(s) => (s.n1, s.n2),
            ChartOps::Strip(s) => (s.nv, s.nu),
        }
    }

    pub fn weights(&self) -> RField {
        match self {
            ChartOps::Torus(t) => t.weights(),
            ChartOps::Sphere(s) => s.weights(),
            ChartOps::Strip(s) => s.weights(),
        }
    }

    pub fn del(&self, f: &CField) -> CField {
        match self {
            ChartOps::Torus(t) => t.del(f),
            ChartOps::Sphere(s) => s.del(f),
            ChartOps::Strip(s) => s.del(f),
        }
    }

    pub fn delbar(&self, f: &CField) -> CField {
        match self {
            ChartOps::Torus(t) => t.delbar(f),
            ChartOps::Sphere(s) => s.delbar(f),
            ChartOps::Strip(s) => s.delbar(f),
        }
    }

    pub fn del_real(&self, f: &RField) -> CField {
        self.del(&f.mapv(|v| C64::new(v, 0.0)))
    }

    pub fn delbar_real(&self, f: &RField) -> CField {
        self.delbar(&f.mapv(|v| C64::new(v, 0.0)))
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChartOps::Torus(_) => "torus",
            ChartOps::Sphere(_) => "sphere",
            ChartOps::Strip(_) => "strip",
        }
    }
}

/// Dense spectral first-derivative matrix for one periodic axis, built by
/// differentiating the identity columns. With `antiperiodic` the matrix acts
/// on fields expanded in half-integer modes.
pub fn fourier_diff_matrix(n: usize, len: f64, antiperiodic: bool) -> Array2<C64> {
    let pair = FftPair::new(n);
    let k = fourier_wavenumbers(n, len, antiperiodic);
    let phase: Vec<C64> = if antiperiodic {
        (0..n)
            .map(|j| C64::from_polar(1.0, PI * j as f64 / n as f64))
            .collect()
    } else {
        vec![C64::new(1.0, 0.0); n]
    };
    let mut d = Array2::zeros((n, n));
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for col in 0..n {
        for (j, b) in buf.iter_mut().enumerate() {
            *b = if j == col { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            // Strip the half-mode phase so the periodic FFT sees integer modes.
            *b *= phase[j].conj();
        }
        pair.forward(&mut buf);
        for (m, b) in buf.iter_mut().enumerate() {
            *b *= C64::new(0.0, k[m]);
        }
        pair.inverse(&mut buf);
        for j in 0..n {
            d[(j, col)] = phase[j] * buf[j];
        }
    }
    d
}

/// Random complex field with Fourier support `|k1| <= kmax, |k2| <= kmax`,
/// sampled on an `n1 x n2` periodic grid.
pub fn band_limited_field<R: Rng>(rng: &mut R, n1: usize, n2: usize, kmax: usize) -> CField {
    let mut modes = Vec::new();
    let km = kmax as i64;
    for a in -km..=km {
        for b in -km..=km {
            let c = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            modes.push((a, b, c));
        }
    }
    let mut f = Array2::zeros((n1, n2));
    for ((i, j), v) in f.indexed_iter_mut() {
        let q1 = 2.0 * PI * i as f64 / n1 as f64;
        let q2 = 2.0 * PI * j as f64 / n2 as f64;
        let mut s = C64::new(0.0, 0.0);
        for &(a, b, c) in &modes {
            s += c * C64::from_polar(1.0, a as f64 * q1 + b as f64 * q2);
        }
        *v = s;
    }
    f
}

/// Real band-limited field, normalized to unit max amplitude.
pub fn band_limited_real<R: Rng>(rng: &mut R, n1: usize, n2: usize, kmax: usize) -> RField {
    let f = band_limited_field(rng, n1, n2, kmax);
    let re = f.mapv(|v| v.re);
    let m = re.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    re.mapv(|v| v / m)
}

/// Sum of w * f over the grid.
pub fn integrate(w: &RField, f: &RField) -> f64 {
    w.iter().zip(f.iter()).map(|(a, b)| a * b).sum()
}

/// Sum of w * f over the grid for a complex integrand.
pub fn integrate_c(w: &RField, f: &CField) -> C64 {
    w.iter().zip(f.iter()).map(|(a, b)| b * *a).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn cfield<F: Fn(f64, f64) -> C64>(n1: usize, n2: usize, l1: f64, l2: f64, f: F) -> CField {
        let mut out = Array2::zeros((n1, n2));
        for ((i, j), v) in out.indexed_iter_mut() {
            *v = f(i as f64 * l1 / n1 as f64, j as f64 * l2 / n2 as f64);
        }
        out
    }

    #[test]
    fn torus_derivative_matches_plane_wave() {
        let l = 2.0 * PI;
        let ops = TorusOps::new(16, 16, l, l);
        let f = cfield(16, 16, l, l, |a, b| C64::from_polar(1.0, 3.0 * a - 2.0 * b));
        let d1 = ops.d1(&f);
        let del = ops.del(&f);
        for ((i, j), v) in d1.indexed_iter() {
            let want = C64::new(0.0, 3.0) * f[(i, j)];
            assert!((v - want).norm() < 1e-12);
        }
        for ((i, j), v) in del.indexed_iter() {
            // mode (3, -2): del multiplies by (i*3 - i*(i*(-2)))/2 = (3i - 2)/2
            let want = 0.5 * C64::new(-2.0, 3.0) * f[(i, j)];
            assert!((v - want).norm() < 1e-12);
        }
    }

    #[test]
    fn torus_derivative_on_rectangular_grid() {
        let ops = TorusOps::new(12, 20, 2.0 * PI, 4.0 * PI);
        let f = cfield(12, 20, 2.0 * PI, 4.0 * PI, |a, b| {
            C64::from_polar(1.0, 2.0 * a + 1.5 * b)
        });
        let d2 = ops.d2(&f);
        for ((i, j), v) in d2.indexed_iter() {
            let want = C64::new(0.0, 1.5) * f[(i, j)];
            assert!((v - want).norm() < 1e-12);
        }
    }

    #[test]
    fn antiperiodic_diff_matrix_exact_on_half_modes() {
        let n = 16;
        let l = 2.0 * PI;
        let d = fourier_diff_matrix(n, l, true);
        let kh = 2.5; // half-integer mode k + 1/2 with k = 2
        let f: Vec<C64> = (0..n)
            .map(|j| C64::from_polar(1.0, kh * j as f64 * l / n as f64))
            .collect();
        for i in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                s += d[(i, j)] * f[j];
            }
            let want = C64::new(0.0, kh) * f[i];
            assert!((s - want).norm() < 1e-11, "row {i}: {s} vs {want}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let int_x4: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(4)).sum();
        assert!((int_x4 - 0.4).abs() < 1e-14);
        let int_x10: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(10)).sum();
        assert!((int_x10 - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn barycentric_diff_exact_on_polynomials() {
        let (x, _) = gauss_legendre(12);
        let d = barycentric_diff(&x);
        let f: Vec<f64> = x.iter().map(|v| v.powi(5)).collect();
        for i in 0..x.len() {
            let mut s = 0.0;
            for j in 0..x.len() {
                s += d[(i, j)] * f[j];
            }
            assert!((s - 5.0 * x[i].powi(4)).abs() < 1e-11);
        }
    }

    #[test]
    fn sphere_del_matches_rational_chart_functions() {
        let ops = SphereOps::new(16, 16);
        let phi = ops.phi();
        // x1 = (z + zbar)/(1 + |z|^2) has the odd-parity sin(theta) factor.
        let mut f = Array2::zeros((16, 16));
        let mut want = Array2::zeros((16, 16));
        for i in 0..16 {
            let r = ops.r[i];
            for j in 0..16 {
                let z = C64::from_polar(r, phi[j]);
                let zb = z.conj();
                let den = 1.0 + (z * zb).re;
                f[(i, j)] = (z + zb) / den;
                want[(i, j)] = (C64::new(den, 0.0) - (z + zb) * zb) / (den * den);
            }
        }
        let got = ops.del(&f);
        let err = got
            .iter()
            .zip(want.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-12, "err {err:.3e}");
    }

    #[test]
    fn strip_del_annihilates_antiholomorphic_and_matches_holomorphic() {
        let ops = StripOps::new(24, 16, 2.0 * PI, 1.0);
        let u = ops.u();
        // e^{i z} with z = u + i v is holomorphic: delbar kills it, del scales by i.
        let mut f = Array2::zeros((24, 16));
        for i in 0..24 {
            for j in 0..16 {
                f[(i, j)] = C64::from_polar((-ops.v[i]).exp(), u[j]);
            }
        }
        let db = ops.delbar(&f);
        let dl = ops.del(&f);
        let db_err = db.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        let dl_err = dl
            .iter()
            .zip(f.iter())
            .map(|(a, b)| (a - C64::i() * b).norm())
            .fold(0.0f64, f64::max);
        assert!(db_err < 1e-11, "delbar leak {db_err:.3e}");
        assert!(dl_err < 1e-11, "del err {dl_err:.3e}");
    }

    #[test]
    fn sphere_weights_integrate_round_area() {
        let ops = SphereOps::new(24, 24);
        let w = ops.weights();
        let mut rho = Array2::zeros((24, 24));
        for i in 0..24 {
            let den = 1.0 + ops.r[i] * ops.r[i];
            for j in 0..24 {
                rho[(i, j)] = 4.0 / (den * den);
            }
        }
        let area = integrate(&w, &rho);
        assert!((area - 4.0 * PI).abs() < 1e-12);
    }
}
