//! Linearized multi-user precoding subproblem, solved by a log-barrier
//! Newton method over the real parametrization of `(W, chi, xi)`.
//!
//! Internally the channel is scaled by `sqrt(P_max) / sigma`, the precoder
//! by `1 / sqrt(P_max)` and the interference slack by `1 / sigma^2`, so the
//! power ball is the unit ball and the noise term equals one.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::metrics::{cross_gains, ChannelMatrix, Precoder};

/// Rotates `w_k` so that `h_k^H w_k` is real and nonnegative.
pub fn rotate_real(h_k: &DVector<Complex64>, w_k: &DVector<Complex64>) -> DVector<Complex64> {
    let ip = h_k.dotc(w_k);
    if ip.norm() == 0.0 {
        return w_k.clone();
    }
    w_k * (ip.conj() / ip.norm())
}

/// Applies [`rotate_real`] to every column against its own user's channel.
pub fn rotate_columns(h: &ChannelMatrix, w: &Precoder) -> Precoder {
    let mut out = w.clone();
    for k in 0..w.ncols() {
        let col = rotate_real(&h.column(k).into_owned(), &w.column(k).into_owned());
        out.set_column(k, &col);
    }
    out
}

/// Point around which the SINR constraints are linearized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    /// SINR slack values.
    pub chi: Vec<f64>,
    /// Interference-plus-noise slack values (W).
    pub xi: Vec<f64>,
}

/// True SINRs and interference-plus-noise powers of `w`.
pub fn linearization_point(h: &ChannelMatrix, w: &Precoder, sigma2: f64) -> Linearization {
    let g = cross_gains(h, w);
    let k = w.ncols();
    let mut chi = Vec::with_capacity(k);
    let mut xi = Vec::with_capacity(k);
    for u in 0..k {
        let interference: f64 = (0..k).filter(|&i| i != u).map(|i| g[(u, i)].norm_sqr()).sum();
        let noise = interference + sigma2;
        chi.push(g[(u, u)].norm_sqr() / noise);
        xi.push(noise);
    }
    Linearization { chi, xi }
}

/// Problem constants for one subproblem.
#[derive(Debug, Clone, Copy)]
pub struct SubproblemData<'a> {
    pub h: &'a ChannelMatrix,
    pub eta: f64,
    pub a: f64,
    pub b: f64,
    pub sigma2: f64,
    pub p_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierOptions {
    pub t0: f64,
    /// Barrier parameter growth per stage.
    pub mu: f64,
    /// Stop once `m / t` falls below this.
    pub gap_tolerance: f64,
    /// Centering stops when half the squared Newton decrement drops below this.
    pub newton_tolerance: f64,
    pub max_newton: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self {
            t0: 1.0,
            mu: 10.0,
            gap_tolerance: 1e-7,
            newton_tolerance: 1e-16,
            max_newton: 100,
        }
    }
}

/// Optimality residuals of the returned point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// `|| grad f0 - sum_j lambda_j grad g_j ||` with `lambda_j = 1 / (t (-g_j))`.
    pub stationarity: f64,
    /// Largest `lambda_j (-g_j)`.
    pub complementarity: f64,
    /// Largest positive constraint value (0 for strictly feasible points).
    pub max_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaState {
    pub w: Precoder,
    pub chi: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: f64,
    /// Subproblem objective at the returned point.
    pub objective: f64,
    pub kkt: KktReport,
    pub newton_steps: usize,
}

const XI_FLOOR: f64 = 1e-12;
const MARGIN: f64 = 1e-2;
const POLISH_STEPS: usize = 8;
// fraction of the gap tolerance at which polishing stops
const POLISH_TARGET: f64 = 1e-2;

struct Barrier {
    n: usize,
    k: usize,
    // Re(h_k^H w) = a_k . z_w, Im(h_k^H w) = b_k . z_w
    re: Vec<DVector<f64>>,
    im: Vec<DVector<f64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    eta: f64,
    a: f64,
    b: f64,
    p_max: f64,
}

impl Barrier {
    fn nz(&self) -> usize {
        2 * self.n * self.k + 2 * self.k
    }

    fn nw(&self) -> usize {
        2 * self.n
    }

    fn chi(&self, k: usize) -> usize {
        2 * self.n * self.k + k
    }

    fn xi(&self, k: usize) -> usize {
        2 * self.n * self.k + self.k + k
    }

    fn block(&self, z: &DVector<f64>, i: usize) -> DVector<f64> {
        z.rows(i * self.nw(), self.nw()).into_owned()
    }

    fn num_constraints(&self) -> usize {
        1 + 4 * self.k
    }

    fn power(&self, z: &DVector<f64>) -> f64 {
        z.rows(0, self.nw() * self.k).norm_squared()
    }

    fn objective(&self, z: &DVector<f64>) -> f64 {
        let rate: f64 = (0..self.k).map(|k| z[self.chi(k)].ln_1p() / LN_2).sum();
        self.a * rate - self.eta * (self.a * self.p_max * self.power(z) + self.b)
    }

    fn objective_grad(&self, z: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.nz());
        let c = -2.0 * self.eta * self.a * self.p_max;
        for i in 0..self.nw() * self.k {
            g[i] = c * z[i];
        }
        for k in 0..self.k {
            g[self.chi(k)] = self.a / ((1.0 + z[self.chi(k)]) * LN_2);
        }
        g
    }

    fn interference(&self, z: &DVector<f64>, k: usize) -> f64 {
        (0..self.k)
            .filter(|&i| i != k)
            .map(|i| {
                let zi = self.block(z, i);
                self.re[k].dot(&zi).powi(2) + self.im[k].dot(&zi).powi(2)
            })
            .sum()
    }

    /// Constraint values `g_j(z) <= 0`: power, interference, cuts, xi floor, chi sign.
    fn constraints(&self, z: &DVector<f64>) -> Vec<f64> {
        let mut g = Vec::with_capacity(self.num_constraints());
        g.push(self.power(z) - 1.0);
        for k in 0..self.k {
            g.push(self.interference(z, k) + 1.0 - z[self.xi(k)]);
        }
        for k in 0..self.k {
            let re = self.re[k].dot(&self.block(z, k));
            g.push(self.alpha[k] * z[self.xi(k)] + self.beta[k] * z[self.chi(k)] - re);
        }
        for k in 0..self.k {
            g.push(XI_FLOOR - z[self.xi(k)]);
        }
        for k in 0..self.k {
            g.push(-z[self.chi(k)]);
        }
        g
    }

    /// Gradients of every constraint, in the order of [`Barrier::constraints`].
    fn constraint_grads(&self, z: &DVector<f64>) -> Vec<DVector<f64>> {
        let nz = self.nz();
        let nw = self.nw();
        let mut out = Vec::with_capacity(self.num_constraints());
        let mut gp = DVector::zeros(nz);
        for i in 0..nw * self.k {
            gp[i] = 2.0 * z[i];
        }
        out.push(gp);
        for k in 0..self.k {
            let mut gi = DVector::zeros(nz);
            for i in (0..self.k).filter(|&i| i != k) {
                let zi = self.block(z, i);
                let v = 2.0 * self.re[k].dot(&zi) * &self.re[k] + 2.0 * self.im[k].dot(&zi) * &self.im[k];
                gi.rows_mut(i * nw, nw).copy_from(&v);
            }
            gi[self.xi(k)] = -1.0;
            out.push(gi);
        }
        for k in 0..self.k {
            let mut gc = DVector::zeros(nz);
            gc.rows_mut(k * nw, nw).copy_from(&(-&self.re[k]));
            gc[self.xi(k)] = self.alpha[k];
            gc[self.chi(k)] = self.beta[k];
            out.push(gc);
        }
        for k in 0..self.k {
            let mut g = DVector::zeros(nz);
            g[self.xi(k)] = -1.0;
            out.push(g);
        }
        for k in 0..self.k {
            let mut g = DVector::zeros(nz);
            g[self.chi(k)] = -1.0;
            out.push(g);
        }
        out
    }

    /// Change of `t (-f0) - sum log(-g)` along the step `dz`, evaluated
    /// without forming the (large) barrier values themselves. `None` when
    /// the step leaves the strict interior.
    fn phi_delta(&self, z: &DVector<f64>, dz: &DVector<f64>, t: f64) -> Option<f64> {
        let trial = z + dz;
        let nwk = self.nw() * self.k;
        let zw = z.rows(0, nwk);
        let dw = dz.rows(0, nwk);
        let mut df0 = -self.eta * self.a * self.p_max * (2.0 * zw.dot(&dw) + dw.norm_squared());
        for k in 0..self.k {
            let c = self.chi(k);
            df0 += self.a * (dz[c] / (1.0 + z[c])).ln_1p() / LN_2;
        }
        let mut acc = -t * df0;
        for (g0, g1) in self.constraints(z).into_iter().zip(self.constraints(&trial)) {
            if !(g1 < 0.0) {
                return None;
            }
            acc -= (g1 / g0).ln();
        }
        Some(acc)
    }

    fn grad_hess(&self, z: &DVector<f64>, t: f64) -> (DVector<f64>, DMatrix<f64>) {
        let nz = self.nz();
        let nw = self.nw();
        let mut grad = -t * self.objective_grad(z);
        let mut hess = DMatrix::zeros(nz, nz);
        let c = 2.0 * self.eta * self.a * self.p_max * t;
        for i in 0..nw * self.k {
            hess[(i, i)] += c;
        }
        for k in 0..self.k {
            let x = 1.0 + z[self.chi(k)];
            hess[(self.chi(k), self.chi(k))] += t * self.a / (x * x * LN_2);
        }
        let values = self.constraints(z);
        let grads = self.constraint_grads(z);
        for (j, (g, gv)) in values.iter().zip(&grads).enumerate() {
            let s = -g;
            grad.axpy(1.0 / s, gv, 1.0);
            hess.ger(1.0 / (s * s), gv, gv, 1.0);
            if j == 0 {
                for i in 0..nw * self.k {
                    hess[(i, i)] += 2.0 / s;
                }
            } else if j <= self.k {
                let k = j - 1;
                let q = (&self.re[k] * self.re[k].transpose() + &self.im[k] * self.im[k].transpose()) * (2.0 / s);
                for i in (0..self.k).filter(|&i| i != k) {
                    let mut view = hess.view_mut((i * nw, i * nw), (nw, nw));
                    view += &q;
                }
            }
        }
        (grad, hess)
    }

    fn kkt(&self, z: &DVector<f64>, t: f64) -> KktReport {
        let values = self.constraints(z);
        let grads = self.constraint_grads(z);
        let mut r = self.objective_grad(z);
        let mut comp: f64 = 0.0;
        let mut viol: f64 = 0.0;
        for (g, gv) in values.iter().zip(&grads) {
            let s = -g;
            viol = viol.max(*g);
            let lambda = 1.0 / (t * s);
            comp = comp.max(lambda * s);
            r.axpy(-lambda, gv, 1.0);
        }
        KktReport {
            stationarity: r.norm(),
            complementarity: comp,
            max_violation: viol.max(0.0),
        }
    }
}

fn newton_direction(grad: &DVector<f64>, hess: DMatrix<f64>) -> DVector<f64> {
    let scale = (0..hess.nrows()).map(|i| hess[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut shift = 0.0;
    loop {
        let mut h = hess.clone();
        for i in 0..h.nrows() {
            h[(i, i)] += shift;
        }
        if let Some(ch) = Cholesky::new(h) {
            return -ch.solve(grad);
        }
        shift = if shift == 0.0 { 1e-12 * scale } else { shift * 10.0 };
    }
}

/// Solves the linearized subproblem
///
/// maximize `a sum_k log2(1 + chi_k) - eta (a tr(W W^H) + b)` subject to the
/// power ball, `xi_k >= sum_{i != k} |h_k^H w_i|^2 + sigma^2`, the first-order
/// cut `Re(h_k^H w_k) >= sqrt(xi chi)` linearized at `lin`, `xi_k >= 1e-12`
/// and `chi_k >= 0`.
///
/// The barrier method starts from a strict interior point built from
/// `start`. Fails with [`Error::InfeasibleLinearization`] when the cut of some
/// user leaves no room for a positive `chi` at that start.
pub fn sca_subproblem(
    data: &SubproblemData<'_>,
    lin: &Linearization,
    start: &Precoder,
    options: &BarrierOptions,
) -> Result<ScaState> {
    let (n, k) = data.h.shape();
    if start.shape() != (n, k) || lin.chi.len() != k || lin.xi.len() != k {
        return Err(Error::Dimension("subproblem inputs disagree on N or K".into()));
    }
    if lin.chi.iter().chain(&lin.xi).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Precondition("linearization point must be strictly positive".into()));
    }
    let scale = data.p_max.sqrt() / data.sigma2.sqrt();
    let mut re = Vec::with_capacity(k);
    let mut im = Vec::with_capacity(k);
    for u in 0..k {
        let col = data.h.column(u);
        let hr = DVector::from_iterator(n, col.iter().map(|c| c.re * scale));
        let hi = DVector::from_iterator(n, col.iter().map(|c| c.im * scale));
        let mut a = DVector::zeros(2 * n);
        a.rows_mut(0, n).copy_from(&hr);
        a.rows_mut(n, n).copy_from(&hi);
        let mut b = DVector::zeros(2 * n);
        b.rows_mut(0, n).copy_from(&(-&hi));
        b.rows_mut(n, n).copy_from(&hr);
        re.push(a);
        im.push(b);
    }
    let xi_bar: Vec<f64> = lin.xi.iter().map(|x| x / data.sigma2).collect();
    let alpha: Vec<f64> = (0..k).map(|u| 0.5 * (lin.chi[u] / xi_bar[u]).sqrt()).collect();
    let beta: Vec<f64> = (0..k).map(|u| 0.5 * (xi_bar[u] / lin.chi[u]).sqrt()).collect();
    let bar = Barrier {
        n,
        k,
        re,
        im,
        alpha,
        beta,
        eta: data.eta,
        a: data.a,
        b: data.b,
        p_max: data.p_max,
    };

    let mut z = DVector::zeros(bar.nz());
    let rotated = rotate_columns(data.h, start);
    let p = rotated.norm_squared() / data.p_max;
    let shrink = (1.0 - MARGIN) / p.sqrt().max(1.0);
    for u in 0..k {
        for i in 0..n {
            let w = rotated[(i, u)] * (shrink / data.p_max.sqrt());
            z[u * 2 * n + i] = w.re;
            z[u * 2 * n + n + i] = w.im;
        }
    }
    for u in 0..k {
        let xi = (bar.interference(&z, u) + 1.0) * (1.0 + MARGIN);
        let re_u = bar.re[u].dot(&bar.block(&z, u));
        let chi = (re_u - bar.alpha[u] * xi) / bar.beta[u] * (1.0 - MARGIN);
        if !(chi > 0.0) {
            return Err(Error::InfeasibleLinearization { user: u });
        }
        z[bar.xi(u)] = xi;
        z[bar.chi(u)] = chi;
    }

    let m = bar.num_constraints() as f64;
    let mut t = options.t0;
    let mut steps = 0;
    loop {
        let mut last_dec = f64::INFINITY;
        for _ in 0..options.max_newton {
            let (grad, hess) = bar.grad_hess(&z, t);
            let dz = newton_direction(&grad, hess);
            let slope = grad.dot(&dz);
            let dec = -slope / 2.0;
            // below 1e-10 the decrement is at rounding level once it stops shrinking
            if dec <= options.newton_tolerance || (dec < 1e-10 && dec > 0.25 * last_dec) {
                break;
            }
            last_dec = dec;
            let mut s = 1.0;
            let mut moved = false;
            while s > 1e-14 {
                let step = s * &dz;
                if let Some(v) = bar.phi_delta(&z, &step, t) {
                    // inside the quadratic region the full step is taken as is:
                    // the barrier change is then below what rounding can resolve
                    if v <= 0.25 * s * slope || (s == 1.0 && dec < 1e-6) {
                        z += step;
                        moved = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            steps += 1;
            if !moved {
                break;
            }
        }
        if m / t < options.gap_tolerance {
            break;
        }
        t *= options.mu;
    }

    // polish the last centering step: the decrement test can stop while the
    // stationarity residual is still above what double precision allows
    let mut kkt = bar.kkt(&z, t);
    for _ in 0..POLISH_STEPS {
        if kkt.stationarity < POLISH_TARGET * options.gap_tolerance {
            break;
        }
        let (grad, hess) = bar.grad_hess(&z, t);
        let dz = newton_direction(&grad, hess);
        let mut s = 1.0;
        let mut accepted = None;
        while s > 1e-6 {
            let trial = &z + s * &dz;
            if bar.constraints(&trial).iter().all(|g| *g < 0.0) {
                let r = bar.kkt(&trial, t);
                if r.stationarity < kkt.stationarity {
                    accepted = Some((trial, r));
                    break;
                }
            }
            s *= 0.5;
        }
        let Some((trial, r)) = accepted else { break };
        z = trial;
        kkt = r;
        steps += 1;
    }
    let mut w = DMatrix::zeros(n, k);
    for u in 0..k {
        for i in 0..n {
            w[(i, u)] = Complex64::new(z[u * 2 * n + i], z[u * 2 * n + n + i]) * data.p_max.sqrt();
        }
    }
    Ok(ScaState {
        w,
        chi: (0..k).map(|u| z[bar.chi(u)]).collect(),
        xi: (0..k).map(|u| z[bar.xi(u)] * data.sigma2).collect(),
        eta: data.eta,
        objective: bar.objective(&z),
        kkt,
        newton_steps: steps,
    })
}
