//! Inhomogeneous broadening: deterministic quadrature over a 2D uncorrelated
//! Gaussian distribution of center detunings, with a seeded Monte Carlo
//! fallback and a semi-analytic reference evaluator for validation.
//!
//! Discretization maps Gauss–Hermite nodes onto the (δ13, δ12) Gaussians and
//! renormalizes the product weights to sum to the total center number, so
//! the result plugs straight into [`crate::model::susceptibilities`] and the
//! coupled-mode oracle. Nodes and weights are symmetrized exactly about the
//! means, which preserves the antisymmetry cancellation Re ξ_a = Re ξ_c = 0
//! for zero-mean ensembles at zero signal detunings.
//!
//! Caveat established empirically here (see `convergence_check` and the
//! reference evaluator): the response of a class has a pump-dressed
//! two-photon resonance where (δ13 − iγ13/2)(δ12 − iγ12/2) ≈ Ω_p². When the
//! pump is weak enough that this hyperbola passes through the populated
//! region (Ω_p² ≲ σ13·σ12 × node-span²), the integrand develops a ridge of
//! width ~γ that a fixed-order product rule cannot resolve, and the
//! imaginary (absorptive) parts converge very slowly. `convergence_check`
//! reports this honestly; `reference_susceptibilities` integrates the δ12
//! axis analytically and stays accurate in that regime.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::model::{
    susceptibilities, CenterClass, CompensatedComplex, OperatingPoint, Rate,
    SusceptibilityTriplet,
};
use crate::{Error, Result};

mod faddeeva;

/// A 2D uncorrelated Gaussian inhomogeneous-broadening specification.
///
/// `base` supplies the couplings, linewidths, and pump Rabi frequency shared
/// by every node; its detunings and weight are ignored. A zero width
/// collapses that axis to a single node at the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianEnsembleSpec {
    pub mean13: Rate,
    pub mean12: Rate,
    pub sigma13: Rate,
    pub sigma12: Rate,
    /// Total effective center number N_A (> 0).
    pub n_total: f64,
    pub base: CenterClass,
    pub nodes13: usize,
    pub nodes12: usize,
}

impl GaussianEnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        self.mean13.require_finite("ensemble.mean13")?;
        self.mean12.require_finite("ensemble.mean12")?;
        self.sigma13.require_nonneg("ensemble.sigma13")?;
        self.sigma12.require_nonneg("ensemble.sigma12")?;
        if !(self.n_total.is_finite() && self.n_total > 0.0) {
            return Err(Error::domain(
                "ensemble.n_total",
                format!("must be > 0, got {}", self.n_total),
            ));
        }
        if self.nodes13 == 0 || self.nodes12 == 0 {
            return Err(Error::domain("ensemble.nodes", "node counts must be ≥ 1"));
        }
        self.base.validate("ensemble.base")?;
        Ok(())
    }

    /// Effective node counts after collapsing zero-width axes.
    pub fn effective_nodes(&self) -> (usize, usize) {
        (
            if self.sigma13.get() == 0.0 { 1 } else { self.nodes13 },
            if self.sigma12.get() == 0.0 { 1 } else { self.nodes12 },
        )
    }

    pub fn with_nodes(mut self, nodes13: usize, nodes12: usize) -> Self {
        self.nodes13 = nodes13;
        self.nodes12 = nodes12;
        self
    }
}

/// Either an explicit class list or a Gaussian spec to be discretized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EnsembleSpec {
    Explicit(Vec<CenterClass>),
    Gaussian(GaussianEnsembleSpec),
}

impl EnsembleSpec {
    /// Materialize the list of center classes.
    pub fn classes(&self) -> Result<Vec<CenterClass>> {
        match self {
            EnsembleSpec::Explicit(classes) => {
                for (k, c) in classes.iter().enumerate() {
                    c.validate(&format!("ensemble.classes[{k}]"))?;
                }
                Ok(classes.clone())
            }
            EnsembleSpec::Gaussian(spec) => discretize(spec),
        }
    }

    /// Total effective center number.
    pub fn n_total(&self) -> f64 {
        match self {
            EnsembleSpec::Explicit(classes) => classes.iter().map(|c| c.weight).sum(),
            EnsembleSpec::Gaussian(spec) => spec.n_total,
        }
    }

    /// Template class carrying couplings and linewidths (first class for
    /// explicit lists, the base for Gaussian specs).
    pub fn template(&self) -> Option<CenterClass> {
        match self {
            EnsembleSpec::Explicit(classes) => classes.first().copied(),
            EnsembleSpec::Gaussian(spec) => Some(spec.base),
        }
    }
}

/// Gauss–Hermite nodes and weights for ∫ f(x) e^{−x²} dx, computed by the
/// Golub–Welsch eigendecomposition of the Jacobi matrix and then
/// symmetrized exactly about zero (pairing x_i with −x_{n−1−i}, zeroing the
/// middle node for odd n). Weights are returned normalized to sum to one,
/// i.e. as probability masses of the standard Gaussian after the x → √2·x
/// change of variables.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::domain("gauss_hermite.n", "order must be ≥ 1"));
    }
    if n == 1 {
        return Ok((vec![0.0], vec![1.0]));
    }
    let mut jacobi = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n - 1 {
        let b = (0.5 * (i as f64 + 1.0)).sqrt();
        jacobi[(i, i + 1)] = b;
        jacobi[(i + 1, i)] = b;
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        weights[n / 2] = pairs[n / 2].1;
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok((nodes, weights))
}

fn axis_nodes(mean: f64, sigma: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    if sigma == 0.0 {
        return Ok(vec![(mean, 1.0)]);
    }
    let (xs, ws) = gauss_hermite(n)?;
    let scale = std::f64::consts::SQRT_2 * sigma;
    Ok(xs
        .iter()
        .zip(&ws)
        .map(|(&x, &w)| (mean + scale * x, w))
        .collect())
}

/// Discretize a Gaussian ensemble into `nodes13 × nodes12` weighted classes
/// (fewer when a width is zero). Weights sum to `n_total` by construction.
pub fn discretize(spec: &GaussianEnsembleSpec) -> Result<Vec<CenterClass>> {
    spec.validate()?;
    let (n13, n12) = spec.effective_nodes();
    let axis13 = axis_nodes(spec.mean13.get(), spec.sigma13.get(), n13)?;
    let axis12 = axis_nodes(spec.mean12.get(), spec.sigma12.get(), n12)?;

    let mut classes = Vec::with_capacity(axis13.len() * axis12.len());
    for &(d13, w13) in &axis13 {
        for &(d12, w12) in &axis12 {
            let mut class = spec.base;
            class.delta13 = Rate::hz(d13);
            class.delta12 = Rate::hz(d12);
            class.weight = spec.n_total * w13 * w12;
            classes.push(class);
        }
    }
    Ok(classes)
}

/// One doubling step of the convergence scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceStep {
    pub nodes13: usize,
    pub nodes12: usize,
    pub xi: SusceptibilityTriplet,
    /// Relative change of (ξ_a, ξ_c, ξ_ac) vs the previous order; `None`
    /// for the first step.
    pub rel_change: Option<[f64; 3]>,
}

/// Outcome of [`convergence_check`]. `converged == false` signals that the
/// node cap was reached with the susceptibilities still moving; the history
/// carries the diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub nodes13: usize,
    pub nodes12: usize,
    pub max_rel_change: f64,
    pub history: Vec<ConvergenceStep>,
}

fn rel_change(new: Complex64, old: Complex64) -> f64 {
    let diff = (new - old).norm();
    if diff == 0.0 {
        return 0.0;
    }
    diff / new.norm().max(f64::MIN_POSITIVE)
}

/// Double the quadrature order until all three susceptibilities change by
/// less than `tolerance` (relative), up to `cap` nodes per axis.
pub fn convergence_check(
    spec: &GaussianEnsembleSpec,
    point: &OperatingPoint,
    tolerance: f64,
    cap: usize,
) -> Result<ConvergenceReport> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::domain("tolerance", "must be > 0"));
    }
    spec.validate()?;
    let grow = |n: usize, sigma: f64| -> usize {
        if sigma == 0.0 {
            1
        } else {
            (2 * n).min(cap)
        }
    };

    let (mut n13, mut n12) = spec.effective_nodes();
    n13 = n13.min(cap);
    n12 = n12.min(cap);
    let mut history = Vec::new();
    let mut xi_prev = susceptibilities(&discretize(&spec.with_nodes(n13, n12))?, point)?;
    history.push(ConvergenceStep {
        nodes13: n13,
        nodes12: n12,
        xi: xi_prev,
        rel_change: None,
    });

    loop {
        let next13 = grow(n13, spec.sigma13.get());
        let next12 = grow(n12, spec.sigma12.get());
        if (next13, next12) == (n13, n12) {
            // Nothing left to refine. A fully degenerate distribution is a
            // single class and is exact by construction; anything else ran
            // into the node cap while still moving.
            let degenerate = spec.sigma13.get() == 0.0 && spec.sigma12.get() == 0.0;
            let max_rel = history
                .last()
                .and_then(|s| s.rel_change)
                .map(|r| r.into_iter().fold(0.0, f64::max))
                .unwrap_or(0.0);
            return Ok(ConvergenceReport {
                converged: degenerate,
                nodes13: n13,
                nodes12: n12,
                max_rel_change: max_rel,
                history,
            });
        }
        let xi = susceptibilities(&discretize(&spec.with_nodes(next13, next12))?, point)?;
        let rel = [
            rel_change(xi.xi_a, xi_prev.xi_a),
            rel_change(xi.xi_c, xi_prev.xi_c),
            rel_change(xi.xi_ac, xi_prev.xi_ac),
        ];
        let max_rel = rel.iter().cloned().fold(0.0, f64::max);
        history.push(ConvergenceStep {
            nodes13: next13,
            nodes12: next12,
            xi,
            rel_change: Some(rel),
        });
        if max_rel < tolerance {
            return Ok(ConvergenceReport {
                converged: true,
                nodes13: next13,
                nodes12: next12,
                max_rel_change: max_rel,
                history,
            });
        }
        n13 = next13;
        n12 = next12;
        xi_prev = xi;
    }
}

/// Monte Carlo estimate of the susceptibilities with per-component standard
/// errors. Reproducible: ChaCha12 keyed by `seed`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub xi: SusceptibilityTriplet,
    /// Standard errors (re, im) of each component.
    pub se_xi_a: (f64, f64),
    pub se_xi_c: (f64, f64),
    pub se_xi_ac: (f64, f64),
    pub samples: u64,
    pub seed: u64,
}

struct MeanVar {
    n: f64,
    sum: CompensatedComplex,
    sum_sq_re: f64,
    sum_sq_im: f64,
}

impl MeanVar {
    fn new() -> Self {
        MeanVar {
            n: 0.0,
            sum: CompensatedComplex::default(),
            sum_sq_re: 0.0,
            sum_sq_im: 0.0,
        }
    }

    fn push(&mut self, z: Complex64) {
        self.n += 1.0;
        self.sum.add(z);
        self.sum_sq_re += z.re * z.re;
        self.sum_sq_im += z.im * z.im;
    }

    /// (mean, standard error of the mean), scaled by `scale`.
    fn finish(&self, scale: f64) -> (Complex64, (f64, f64)) {
        let mean = self.sum.value() / self.n;
        let var_re = ((self.sum_sq_re - self.n * mean.re * mean.re) / (self.n - 1.0)).max(0.0);
        let var_im = ((self.sum_sq_im - self.n * mean.im * mean.im) / (self.n - 1.0)).max(0.0);
        (
            mean * scale,
            (
                scale * (var_re / self.n).sqrt(),
                scale * (var_im / self.n).sqrt(),
            ),
        )
    }
}

/// Average the per-center response over `n_samples` Gaussian draws of the
/// detunings. Validation oracle for [`discretize`]; O(n) and noisy but free
/// of any smoothness assumption.
pub fn monte_carlo_susceptibilities(
    spec: &GaussianEnsembleSpec,
    point: &OperatingPoint,
    n_samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    spec.validate()?;
    point.validate()?;
    if n_samples < 2 {
        return Err(Error::domain("n_samples", "need at least 2 samples"));
    }
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let normal = StandardNormal;

    let omega = point.omega.get();
    let delta = point.delta.get();
    let g13 = spec.base.g13.get();
    let g12 = spec.base.g12.get();
    let om_p = spec.base.omega_p.get();
    let det13_im = -0.5 * spec.base.gamma13.get();
    let det12_im = -0.5 * spec.base.gamma12.get();

    let mut acc_a = MeanVar::new();
    let mut acc_c = MeanVar::new();
    let mut acc_ac = MeanVar::new();

    for _ in 0..n_samples {
        let x: f64 = normal.sample(&mut rng);
        let y: f64 = normal.sample(&mut rng);
        let d13 = spec.mean13.get() + spec.sigma13.get() * x;
        let d12 = spec.mean12.get() + spec.sigma12.get() * y;
        let big13 = Complex64::new(omega + delta - d13, -det13_im);
        let big12 = Complex64::new(omega - d12, -det12_im);
        let den = big13 * big12 - om_p * om_p;
        let inv = den.inv();
        acc_a.push(g13 * g13 * big12 * inv);
        acc_c.push(g12 * g12 * big13 * inv);
        acc_ac.push(g12 * g13 * om_p * inv);
    }

    let (xi_a, se_xi_a) = acc_a.finish(spec.n_total);
    let (xi_c, se_xi_c) = acc_c.finish(spec.n_total);
    let (xi_ac, se_xi_ac) = acc_ac.finish(spec.n_total);
    Ok(MonteCarloEstimate {
        xi: SusceptibilityTriplet { xi_a, xi_c, xi_ac },
        se_xi_a,
        se_xi_c,
        se_xi_ac,
        samples: n_samples,
        seed,
    })
}

/// Controls for [`reference_susceptibilities`].
#[derive(Debug, Clone, Copy)]
pub struct ReferenceOptions {
    /// Trapezoid points along the optical-detuning axis (odd).
    pub nodes13: usize,
    /// Half-width of the optical-detuning grid in units of σ13.
    pub span_sigmas: f64,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        ReferenceOptions {
            nodes13: 2_000_001,
            span_sigmas: 10.0,
        }
    }
}

/// Plasma dispersion integral I(z) = ∫ e^{−t²}/(t − z) dt = ±iπ·w(±z).
fn plasma_integral(z: Complex64) -> Complex64 {
    if z.im > 0.0 {
        Complex64::i() * std::f64::consts::PI * faddeeva::w(z)
    } else {
        -Complex64::i() * std::f64::consts::PI * faddeeva::w(-z)
    }
}

/// 1 + z·I(z)/√π without the catastrophic cancellation that the direct
/// form suffers for |z| ≫ 1 (both factors are O(1) while the sum is
/// O(z⁻²)); switches to the asymptotic series −Σ_k (2k−1)!!/(2z²)^k there.
fn one_plus_z_i_over_sqrt_pi(z: Complex64, i_z: Complex64) -> Complex64 {
    if z.norm_sqr() >= 900.0 {
        let inv_z2 = (z * z).inv();
        let mut term = 0.5 * inv_z2;
        let mut sum = term;
        for k in 2..=8u32 {
            term = term * inv_z2 * ((2 * k - 1) as f64 / 2.0);
            sum += term;
        }
        -sum
    } else {
        Complex64::new(1.0, 0.0) + z * i_z / std::f64::consts::PI.sqrt()
    }
}

/// Semi-analytic reference for the ensemble susceptibilities: the δ12
/// integral is carried out exactly (the response is rational of degree one
/// in δ12, so the Gaussian average reduces to the Faddeeva function), and
/// the δ13 axis is integrated on a dense trapezoid grid. Accurate even when
/// the two-photon ridge defeats the product quadrature; used by tests and
/// convergence diagnostics, not by the production evaluation path.
pub fn reference_susceptibilities(
    spec: &GaussianEnsembleSpec,
    point: &OperatingPoint,
    opts: ReferenceOptions,
) -> Result<SusceptibilityTriplet> {
    spec.validate()?;
    point.validate()?;
    let omega = point.omega.get();
    let delta = point.delta.get();
    let g13 = spec.base.g13.get();
    let g12 = spec.base.g12.get();
    let om_p = spec.base.omega_p.get();
    let gamma13 = spec.base.gamma13.get();
    let gamma12 = spec.base.gamma12.get();
    let om_p_sq = om_p * om_p;

    let sigma13 = spec.sigma13.get();
    let (d13s, w13s): (Vec<f64>, Vec<f64>) = if sigma13 == 0.0 {
        (vec![spec.mean13.get()], vec![1.0])
    } else {
        let n = opts.nodes13.max(3) | 1;
        let half = opts.span_sigmas * sigma13;
        let step = 2.0 * half / (n - 1) as f64;
        let mut xs = Vec::with_capacity(n);
        let mut ws = Vec::with_capacity(n);
        let mut total = 0.0;
        for i in 0..n {
            let x = -half + step * i as f64;
            // trapezoid: half weight at the (negligible) endpoints
            let edge = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            let w = edge * (-0.5 * (x / sigma13).powi(2)).exp();
            xs.push(spec.mean13.get() + x);
            ws.push(w);
            total += w;
        }
        for w in &mut ws {
            *w /= total;
        }
        (xs, ws)
    };

    let mut acc_a = CompensatedComplex::default();
    let mut acc_c = CompensatedComplex::default();
    let mut acc_ac = CompensatedComplex::default();

    let mu12 = spec.mean12.get();
    let sigma12 = spec.sigma12.get();
    let scale12 = std::f64::consts::SQRT_2 * sigma12;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    for (&d13, &w) in d13s.iter().zip(&w13s) {
        let big13 = Complex64::new(omega + delta - d13, 0.5 * gamma13);
        // The response is rational of degree one in the microwave detuning:
        // D13·D12 − Ω² = −D13·(δ12 − p) with simple pole p below, so the
        // Gaussian average over δ12 reduces to the plasma integral.
        let q = Complex64::new(omega, 0.5 * gamma12);
        let p = q - om_p_sq / big13;
        let inv13 = big13.inv();
        let (g, bracket) = if sigma12 == 0.0 {
            // ⟨(u−q)/(u−p)⟩ collapses exactly to a ratio of detunings
            ((mu12 - p).inv(), (mu12 - q) / (mu12 - p))
        } else {
            let z = (p - mu12) / scale12;
            let i_z = plasma_integral(z);
            let g = i_z / (scale12 * sqrt_pi);
            let bracket =
                one_plus_z_i_over_sqrt_pi(z, i_z) + (mu12 - q) / scale12 * i_z / sqrt_pi;
            (g, bracket)
        };
        acc_a.add(w * g13 * g13 * inv13 * bracket);
        acc_c.add(-w * g12 * g12 * g);
        acc_ac.add(-w * g12 * g13 * om_p * inv13 * g);
    }

    Ok(SusceptibilityTriplet {
        xi_a: spec.n_total * acc_a.value(),
        xi_c: spec.n_total * acc_c.value(),
        xi_ac: spec.n_total * acc_ac.value(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn t_base(omega_p: f64) -> CenterClass {
        CenterClass {
            g13: Rate::mhz(2.0),
            g12: Rate::hz(40.0),
            gamma13: Rate::mhz(1.0),
            gamma12: Rate::hz(1.0),
            delta13: Rate::ZERO,
            delta12: Rate::ZERO,
            omega_p: Rate::hz(omega_p),
            weight: 1.0,
        }
    }

    fn fig4_spec(omega_p: f64, n13: usize, n12: usize) -> GaussianEnsembleSpec {
        GaussianEnsembleSpec {
            mean13: Rate::ZERO,
            mean12: Rate::ZERO,
            sigma13: Rate::mhz(30.0),
            sigma12: Rate::khz(100.0),
            n_total: 1e6,
            base: t_base(omega_p),
            nodes13: n13,
            nodes12: n12,
        }
    }

    #[test]
    fn gauss_hermite_low_orders() {
        let (x, w) = gauss_hermite(1).unwrap();
        assert_eq!((x[0], w[0]), (0.0, 1.0));
        // n = 2: nodes ±1/√2 with equal weight
        let (x, w) = gauss_hermite(2).unwrap();
        assert_relative_eq!(x[1], std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-12);
        assert_eq!(x[0], -x[1]);
        assert_eq!(w[0], w[1]);
        // moments of the standard Gaussian through the √2 map: ⟨x²⟩ = 1, ⟨x⁴⟩ = 3
        let (x, w) = gauss_hermite(8).unwrap();
        let m2: f64 = x.iter().zip(&w).map(|(&x, &w)| w * 2.0 * x * x).sum();
        let m4: f64 = x.iter().zip(&w).map(|(&x, &w)| w * 4.0 * x.powi(4)).sum();
        assert_relative_eq!(m2, 1.0, max_relative = 1e-12);
        assert_relative_eq!(m4, 3.0, max_relative = 1e-12);
    }

    #[test]
    fn gauss_hermite_symmetry_is_exact() {
        for n in [5, 16, 33, 64] {
            let (x, w) = gauss_hermite(n).unwrap();
            for i in 0..n / 2 {
                assert_eq!(x[i], -x[n - 1 - i]);
                assert_eq!(w[i], w[n - 1 - i]);
            }
            if n % 2 == 1 {
                assert_eq!(x[n / 2], 0.0);
            }
        }
    }

    #[test]
    fn degenerate_widths_collapse_to_single_class() {
        let spec = GaussianEnsembleSpec {
            mean13: Rate::mhz(3.0),
            mean12: Rate::khz(-7.0),
            sigma13: Rate::ZERO,
            sigma12: Rate::ZERO,
            n_total: 2.5e6,
            base: t_base(4e6),
            nodes13: 32,
            nodes12: 32,
        };
        let classes = discretize(&spec).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].delta13, Rate::mhz(3.0));
        assert_eq!(classes[0].delta12, Rate::khz(-7.0));
        assert_eq!(classes[0].weight, 2.5e6);
    }

    #[test]
    fn weights_sum_to_total() {
        let spec = fig4_spec(4e6, 32, 24);
        let classes = discretize(&spec).unwrap();
        assert_eq!(classes.len(), 32 * 24);
        let total: f64 = classes.iter().map(|c| c.weight).sum();
        assert_relative_eq!(total, 1e6, max_relative = 1e-12);
    }

    #[test]
    fn zero_mean_discretization_cancels_real_parts() {
        let spec = fig4_spec(4e6, 32, 32);
        let xi = susceptibilities(&discretize(&spec).unwrap(), &OperatingPoint::origin(0.0))
            .unwrap();
        assert!(xi.xi_a.re.abs() < 1e-9 * xi.xi_a.im.abs());
        assert!(xi.xi_c.re.abs() < 1e-9 * xi.xi_c.im.abs());
    }

    #[test]
    fn convergence_degenerate_spec_is_immediate() {
        let spec = GaussianEnsembleSpec {
            sigma13: Rate::ZERO,
            sigma12: Rate::ZERO,
            ..fig4_spec(4e6, 8, 8)
        };
        let report =
            convergence_check(&spec, &OperatingPoint::origin(0.0), 1e-9, 512).unwrap();
        assert!(report.converged);
        assert_eq!((report.nodes13, report.nodes12), (1, 1));
    }

    #[test]
    fn convergence_pump_dominated_regime_is_fast() {
        // Ω_p = 40 MHz ≫ √(σ13 σ12): the two-photon ridge sits far outside
        // the populated region and the product rule converges by 16 nodes.
        let spec = fig4_spec(40e6, 8, 8);
        let report =
            convergence_check(&spec, &OperatingPoint::origin(0.0), 1e-6, 512).unwrap();
        assert!(report.converged);
        assert!(report.nodes13 <= 128, "converged at {}", report.nodes13);
    }

    #[test]
    fn convergence_weak_pump_regime_signals_failure() {
        // Ω_p = 4 MHz puts the dressed two-photon resonance inside the
        // sampled detuning range; the absorptive parts keep moving at the
        // 512-node cap and the check must say so rather than pretend.
        let spec = fig4_spec(4e6, 16, 16);
        let report =
            convergence_check(&spec, &OperatingPoint::origin(0.0), 1e-6, 512).unwrap();
        assert!(!report.converged);
        assert_eq!(report.nodes13, 512);
        assert!(report.max_rel_change > 1e-6);
    }

    #[test]
    fn faster_convergence_with_stronger_pump() {
        // Empirical comparison at two pump strengths: the pump-dominated
        // regime needs a lower order for the same tolerance.
        let point = OperatingPoint::origin(0.0);
        let strong = convergence_check(&fig4_spec(40e6, 4, 4), &point, 1e-4, 512).unwrap();
        let weak = convergence_check(&fig4_spec(1e6, 4, 4), &point, 1e-4, 512).unwrap();
        let strong_order = strong.nodes13.max(strong.nodes12);
        let weak_order = weak.nodes13.max(weak.nodes12);
        assert!(
            !weak.converged || weak_order > strong_order,
            "weak: {weak_order} (converged {}), strong: {strong_order}",
            weak.converged
        );
        assert!(strong.converged);
    }

    #[test]
    fn cross_response_suppression_by_inhomogeneity() {
        // Odd-function cancellation suppresses |ξ_ac| for weak pumps; the
        // ratio to the homogeneous value N g12 g13/Ω_p climbs monotonically
        // through the suppressed branch, overshoots one slightly where the
        // dressed resonance crosses the distribution, then settles onto the
        // homogeneous value from above as Ω_p/√(σ12 σ13) → ∞. Evaluated
        // with the semi-analytic reference: the product rule is not
        // trustworthy in the weak-pump branch.
        let point = OperatingPoint::origin(0.0);
        let opts = ReferenceOptions {
            nodes13: 400_001,
            span_sigmas: 10.0,
        };
        let ratio_at = |om_p: f64| -> f64 {
            let spec = fig4_spec(om_p, 1, 1);
            let xi = reference_susceptibilities(&spec, &point, opts).unwrap();
            xi.xi_ac.norm() / (1e6 * 40.0 * 2e6 / om_p)
        };
        let suppressed: Vec<f64> = [0.5e6, 1e6, 2e6].iter().map(|&o| ratio_at(o)).collect();
        assert!(suppressed[0] < 0.2);
        assert!(suppressed.windows(2).all(|w| w[1] > w[0]));
        let converging: Vec<f64> = [4e6, 12e6, 40e6].iter().map(|&o| ratio_at(o)).collect();
        assert!(converging
            .windows(2)
            .all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()));
        assert!((converging[2] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn reference_matches_quadrature_in_benign_regime() {
        // Narrow broadening, strong pump: both evaluators are converged and
        // must agree to ~1e-9.
        let spec = GaussianEnsembleSpec {
            sigma13: Rate::mhz(1.0),
            sigma12: Rate::khz(10.0),
            ..fig4_spec(4e6, 128, 128)
        };
        let point = OperatingPoint::origin(0.0);
        let gh = susceptibilities(&discretize(&spec).unwrap(), &point).unwrap();
        let opts = ReferenceOptions {
            nodes13: 400_001,
            span_sigmas: 10.0,
        };
        let reference = reference_susceptibilities(&spec, &point, opts).unwrap();
        assert_relative_eq!(gh.xi_a.im, reference.xi_a.im, max_relative = 1e-9);
        assert_relative_eq!(gh.xi_c.im, reference.xi_c.im, max_relative = 1e-9);
        assert_relative_eq!(gh.xi_ac.re, reference.xi_ac.re, max_relative = 1e-9);
    }

    #[test]
    fn reference_handles_degenerate_widths() {
        let spec = GaussianEnsembleSpec {
            sigma13: Rate::ZERO,
            sigma12: Rate::ZERO,
            ..fig4_spec(4e6, 1, 1)
        };
        let point = OperatingPoint::origin(0.0);
        let reference =
            reference_susceptibilities(&spec, &point, ReferenceOptions::default()).unwrap();
        let direct = susceptibilities(&discretize(&spec).unwrap(), &point).unwrap();
        assert_relative_eq!(reference.xi_ac.re, direct.xi_ac.re, max_relative = 1e-12);
        assert_relative_eq!(reference.xi_a.im, direct.xi_a.im, max_relative = 1e-12);
    }

    #[test]
    fn monte_carlo_is_seeded_and_reproducible() {
        let spec = fig4_spec(40e6, 1, 1);
        let point = OperatingPoint::origin(0.0);
        let a = monte_carlo_susceptibilities(&spec, &point, 20_000, 7).unwrap();
        let b = monte_carlo_susceptibilities(&spec, &point, 20_000, 7).unwrap();
        assert_eq!(a.xi, b.xi);
        let c = monte_carlo_susceptibilities(&spec, &point, 20_000, 8).unwrap();
        assert_ne!(a.xi, c.xi);
    }

    #[test]
    fn monte_carlo_agrees_with_reference_within_errors() {
        let spec = fig4_spec(40e6, 1, 1);
        let point = OperatingPoint::origin(0.0);
        let mc = monte_carlo_susceptibilities(&spec, &point, 200_000, 11).unwrap();
        let reference =
            reference_susceptibilities(&spec, &point, ReferenceOptions::default()).unwrap();
        let pulls = [
            (mc.xi.xi_a.im - reference.xi_a.im).abs() / mc.se_xi_a.1,
            (mc.xi.xi_c.im - reference.xi_c.im).abs() / mc.se_xi_c.1,
            (mc.xi.xi_ac.re - reference.xi_ac.re).abs() / mc.se_xi_ac.0,
        ];
        for (i, pull) in pulls.iter().enumerate() {
            assert!(*pull < 4.0, "component {i} off by {pull} standard errors");
        }
    }
}
