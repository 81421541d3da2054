//! Exploration of the response surface: grid sweeps, dispersion-contour
//! tracing with intersection finding, matched-design solving, and local
//! operating-point optimization.
//!
//! Contours: unity internal efficiency requires the optical dispersion
//! condition ω + Δ − Re ξ_a = 0 and the microwave dispersion condition
//! ω − Re ξ_c = 0 to hold simultaneously, together with the matching
//! condition C = 1. The tracer runs marching squares over a (Δ, ω) window
//! with per-edge bisection refinement, links cell segments into branch
//! polylines, and intersects optical × microwave branches.
//!
//! Along the pump-dressed two-photon line (ω + Δ − δ13)(ω − δ12) ≈ Ω_p²
//! both conditions are *almost* satisfied at once: the two contour families
//! run parallel at sub-mHz separation without crossing. Raw polyline
//! chords weave across each other there, so every segment-pair candidate is
//! polished with a damped 2D Newton iteration and accepted only if it
//! converges to a transversal crossing; near-tangent candidates are
//! rejected. This reproduces the four near-resonance crossings plus the
//! origin point for matched designs.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::model::{CenterClass, OperatingPoint, Rate};
use crate::response::BareLoss;
use crate::system::{PumpCoupling, SystemSpec};
use crate::{ensemble::EnsembleSpec, Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rectangular (Δ, ω) window in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub delta_min: f64,
    pub delta_max: f64,
    pub omega_min: f64,
    pub omega_max: f64,
}

impl Window {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_min < self.delta_max && self.omega_min < self.omega_max) {
            return Err(Error::domain("window", "empty or inverted window"));
        }
        Ok(())
    }

    pub fn delta_span(&self) -> f64 {
        self.delta_max - self.delta_min
    }

    pub fn omega_span(&self) -> f64 {
        self.omega_max - self.omega_min
    }

    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.delta_min + self.delta_max),
            0.5 * (self.omega_min + self.omega_max),
        )
    }

    fn to_unit(&self, delta: f64, omega: f64) -> (f64, f64) {
        (
            (delta - self.delta_min) / self.delta_span(),
            (omega - self.omega_min) / self.omega_span(),
        )
    }

    fn from_unit(&self, u: f64, v: f64) -> (f64, f64) {
        (
            self.delta_min + u * self.delta_span(),
            self.omega_min + v * self.omega_span(),
        )
    }

    fn contains_unit(&self, u: f64, v: f64, slack: f64) -> bool {
        (-slack..=1.0 + slack).contains(&u) && (-slack..=1.0 + slack).contains(&v)
    }
}

/// Per-cell response summary stored by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub eta_total: f64,
    pub eta_internal: f64,
    pub eta_a: f64,
    pub eta_c: f64,
    pub cooperativity: f64,
    pub n_mo: f64,
    pub n_om: f64,
}

/// One sweep cell: either a summary or the recorded per-cell error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellOutcome {
    pub summary: Option<CellSummary>,
    pub error: Option<String>,
}

/// Dense response map over a uniform (Δ, ω) grid. Cells are stored
/// row-major: index = omega_index · len(delta_axis) + delta_index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub omega_axis: Vec<f64>,
    pub delta_axis: Vec<f64>,
    pub n_pump: f64,
    pub cells: Vec<CellOutcome>,
}

impl SweepGrid {
    pub fn cell(&self, omega_idx: usize, delta_idx: usize) -> &CellOutcome {
        &self.cells[omega_idx * self.delta_axis.len() + delta_idx]
    }

    /// Grid-global maximum of total efficiency. Strict comparison keeps the
    /// first (lowest-index) cell among exact ties.
    pub fn max_eta_cell(&self) -> Option<(usize, usize, CellSummary)> {
        let mut best: Option<(usize, usize, CellSummary)> = None;
        for iw in 0..self.omega_axis.len() {
            for id in 0..self.delta_axis.len() {
                if let Some(s) = self.cell(iw, id).summary {
                    let better = match &best {
                        None => true,
                        Some((_, _, b)) => s.eta_total > b.eta_total,
                    };
                    if better {
                        best = Some((iw, id, s));
                    }
                }
            }
        }
        best
    }
}

fn uniform_axis(min: f64, max: f64, n: usize) -> Vec<f64> {
    let step = (max - min) / (n - 1) as f64;
    (0..n).map(|i| min + step * i as f64).collect()
}

fn summarize(report: &crate::response::ResponseReport) -> CellSummary {
    CellSummary {
        eta_total: report.eta_total,
        eta_internal: report.eta_internal,
        eta_a: report.eta_a,
        eta_c: report.eta_c,
        cooperativity: report.cooperativity,
        n_mo: report.n_mo,
        n_om: report.n_om,
    }
}

/// Evaluate the full response on a uniform grid. Per-cell failures are
/// recorded in the cell rather than aborting the sweep; identical inputs
/// produce bit-identical tables regardless of thread count.
pub fn sweep(
    system: &SystemSpec,
    omega_range: (Rate, Rate),
    delta_range: (Rate, Rate),
    n_omega: usize,
    n_delta: usize,
    n_pump: f64,
) -> Result<SweepGrid> {
    if n_omega < 2 || n_delta < 2 {
        return Err(Error::domain("sweep.resolution", "need ≥ 2 points per axis"));
    }
    let window = Window {
        delta_min: delta_range.0.get(),
        delta_max: delta_range.1.get(),
        omega_min: omega_range.0.get(),
        omega_max: omega_range.1.get(),
    };
    window.validate()?;
    system.validate()?;
    let classes = system.classes_at(&OperatingPoint::origin(n_pump))?;
    let omega_axis = uniform_axis(window.omega_min, window.omega_max, n_omega);
    let delta_axis = uniform_axis(window.delta_min, window.delta_max, n_delta);

    let eval_cell = |iw: usize, id: usize| -> CellOutcome {
        let point = OperatingPoint::new(
            Rate::hz(omega_axis[iw]),
            Rate::hz(delta_axis[id]),
            n_pump,
        );
        match system.respond_with_classes(&classes, &point) {
            Ok(report) => CellOutcome {
                summary: Some(summarize(&report)),
                error: None,
            },
            Err(e) => CellOutcome {
                summary: None,
                error: Some(e.to_string()),
            },
        }
    };

    #[cfg(feature = "parallel")]
    let cells: Vec<CellOutcome> = (0..n_omega * n_delta)
        .into_par_iter()
        .map(|idx| eval_cell(idx / n_delta, idx % n_delta))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let cells: Vec<CellOutcome> = (0..n_omega * n_delta)
        .map(|idx| eval_cell(idx / n_delta, idx % n_delta))
        .collect();

    Ok(SweepGrid {
        omega_axis,
        delta_axis,
        n_pump,
        cells,
    })
}

/// Contour families traced by [`trace_contours`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContourFamily {
    /// ω + Δ − Re ξ_a = 0
    Optical,
    /// ω − Re ξ_c = 0
    Microwave,
    /// C − 1 = 0
    Matching,
}

/// A traced branch: ordered vertices in (Δ, ω) Hz with the worst
/// defining-condition residual (relative to the local scale) on the branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub max_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntersectionKind {
    /// Crossing of hybridized-branch conditions away from the origin.
    NearResonanceCross,
    /// The matched crossing at ω = Δ = 0 created by the pump coupling.
    OriginPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intersection {
    pub delta: f64,
    pub omega: f64,
    pub kind: IntersectionKind,
    /// Max of the two condition residuals, relative to local scales.
    pub residual: f64,
}

/// Traced dispersion and matching contours plus classified intersections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSet {
    pub optical: Vec<Polyline>,
    pub microwave: Vec<Polyline>,
    pub matching: Vec<Polyline>,
    pub intersections: Vec<Intersection>,
}

/// Tracer controls.
#[derive(Debug, Clone, Copy)]
pub struct TracerOptions {
    /// Relative tolerance on the defining condition at returned vertices.
    pub tolerance: f64,
    /// Minimum |sin θ| between contour normals for a crossing to count as
    /// transversal; near-tangent contacts (the two-photon line) are
    /// rejected.
    pub min_transversality: f64,
    /// Duplicate-merge radius as a fraction of the window diagonal.
    pub merge_radius_frac: f64,
    pub max_newton_iterations: usize,
}

impl Default for TracerOptions {
    fn default() -> Self {
        TracerOptions {
            tolerance: 1e-6,
            min_transversality: 1e-3,
            merge_radius_frac: 1e-3,
            max_newton_iterations: 60,
        }
    }
}

struct ConditionEvaluator {
    classes: Vec<CenterClass>,
    n_pump: f64,
    kappa_a_base: f64,
    kappa_c_base: f64,
}

impl ConditionEvaluator {
    fn new(system: &SystemSpec, n_pump: f64) -> Result<Self> {
        system.validate()?;
        let classes = system.classes_at(&OperatingPoint::origin(n_pump))?;
        // Pump-dependent but (Δ, ω)-independent budget lines.
        let probe = crate::budget::assemble_budget(
            system,
            &OperatingPoint::origin(n_pump),
            &crate::model::SusceptibilityTriplet::ZERO,
        )?;
        Ok(ConditionEvaluator {
            classes,
            n_pump,
            kappa_a_base: probe.kappa_a_total,
            kappa_c_base: probe.kappa_c_total,
        })
    }

    fn xi(&self, delta: f64, omega: f64) -> crate::model::SusceptibilityTriplet {
        let point = OperatingPoint::new(Rate::hz(omega), Rate::hz(delta), self.n_pump);
        crate::model::susceptibilities(&self.classes, &point)
            .unwrap_or(crate::model::SusceptibilityTriplet::ZERO)
    }

    /// Signed condition value for a family at (Δ, ω).
    fn value(&self, family: ContourFamily, delta: f64, omega: f64) -> f64 {
        let xi = self.xi(delta, omega);
        match family {
            ContourFamily::Optical => omega + delta - xi.xi_a.re,
            ContourFamily::Microwave => omega - xi.xi_c.re,
            ContourFamily::Matching => {
                let ka = self.kappa_a_base + xi.kappa_a_center();
                let kc = self.kappa_c_base + xi.kappa_c_center();
                4.0 * xi.xi_ac.norm_sqr() / (ka * kc) - 1.0
            }
        }
    }

    /// Residual of the defining condition relative to its local scale.
    fn residual(&self, family: ContourFamily, delta: f64, omega: f64) -> f64 {
        let xi = self.xi(delta, omega);
        match family {
            ContourFamily::Optical => {
                let scale = (omega + delta).abs().max(xi.xi_a.re.abs()).max(1e-12);
                (omega + delta - xi.xi_a.re).abs() / scale
            }
            ContourFamily::Microwave => {
                let scale = omega.abs().max(xi.xi_c.re.abs()).max(1e-12);
                (omega - xi.xi_c.re).abs() / scale
            }
            ContourFamily::Matching => {
                let ka = self.kappa_a_base + xi.kappa_a_center();
                let kc = self.kappa_c_base + xi.kappa_c_center();
                (4.0 * xi.xi_ac.norm_sqr() / (ka * kc) - 1.0).abs()
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeId {
    Horizontal { ix: usize, iy: usize },
    Vertical { ix: usize, iy: usize },
}

/// Marching squares with per-edge bisection refinement and adjacency
/// linking. Grid coordinates are unit-square; physical mapping happens at
/// the window boundary.
fn trace_family(
    eval: &ConditionEvaluator,
    family: ContourFamily,
    window: &Window,
    nx: usize,
    ny: usize,
) -> Vec<Polyline> {
    let us = uniform_axis(0.0, 1.0, nx);
    let vs = uniform_axis(0.0, 1.0, ny);
    let f_at = |u: f64, v: f64| -> f64 {
        let (d, w) = window.from_unit(u, v);
        eval.value(family, d, w)
    };
    let values: Vec<f64> = {
        #[cfg(feature = "parallel")]
        {
            (0..nx * ny)
                .into_par_iter()
                .map(|idx| f_at(us[idx % nx], vs[idx / nx]))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..nx * ny)
                .map(|idx| f_at(us[idx % nx], vs[idx / nx]))
                .collect()
        }
    };
    let value = |ix: usize, iy: usize| values[iy * nx + ix];
    let positive = |ix: usize, iy: usize| value(ix, iy) > 0.0;

    // Refined crossing point on an edge, memoized.
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut edge_points: HashMap<EdgeId, usize> = HashMap::new();
    let crossing = |edge: EdgeId,
                        points: &mut Vec<(f64, f64)>,
                        edge_points: &mut HashMap<EdgeId, usize>|
     -> usize {
        if let Some(&idx) = edge_points.get(&edge) {
            return idx;
        }
        let ((u0, v0), (u1, v1), f0) = match edge {
            EdgeId::Horizontal { ix, iy } => ((us[ix], vs[iy]), (us[ix + 1], vs[iy]), value(ix, iy)),
            EdgeId::Vertical { ix, iy } => ((us[ix], vs[iy]), (us[ix], vs[iy + 1]), value(ix, iy)),
        };
        let mut lo = 0.0_f64;
        let mut hi = 1.0_f64;
        let mut flo = f0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let fm = f_at(u0 + (u1 - u0) * mid, v0 + (v1 - v0) * mid);
            if (flo > 0.0) != (fm > 0.0) {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        let t = 0.5 * (lo + hi);
        points.push((u0 + (u1 - u0) * t, v0 + (v1 - v0) * t));
        edge_points.insert(edge, points.len() - 1);
        points.len() - 1
    };

    // Collect segments as (point index, point index).
    let mut segments: Vec<(usize, usize)> = Vec::new();
    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            let corners = [
                positive(ix, iy),
                positive(ix + 1, iy),
                positive(ix + 1, iy + 1),
                positive(ix, iy + 1),
            ];
            let code = (corners[0] as u8)
                | (corners[1] as u8) << 1
                | (corners[2] as u8) << 2
                | (corners[3] as u8) << 3;
            if code == 0 || code == 0b1111 {
                continue;
            }
            let bottom = EdgeId::Horizontal { ix, iy };
            let top = EdgeId::Horizontal { ix, iy: iy + 1 };
            let left = EdgeId::Vertical { ix, iy };
            let right = EdgeId::Vertical { ix: ix + 1, iy };
            let mut push = |a: EdgeId, b: EdgeId, segments: &mut Vec<(usize, usize)>| {
                let pa = crossing(a, &mut points, &mut edge_points);
                let pb = crossing(b, &mut points, &mut edge_points);
                segments.push((pa, pb));
            };
            match code {
                0b0001 | 0b1110 => push(left, bottom, &mut segments),
                0b0010 | 0b1101 => push(bottom, right, &mut segments),
                0b0100 | 0b1011 => push(right, top, &mut segments),
                0b1000 | 0b0111 => push(top, left, &mut segments),
                0b0011 | 0b1100 => push(left, right, &mut segments),
                0b0110 | 0b1001 => push(bottom, top, &mut segments),
                0b0101 | 0b1010 => {
                    // saddle: disambiguate with the center sample
                    let uc = 0.5 * (us[ix] + us[ix + 1]);
                    let vc = 0.5 * (vs[iy] + vs[iy + 1]);
                    let center_positive = f_at(uc, vc) > 0.0;
                    let connect_first = (code == 0b0101) == center_positive;
                    if connect_first {
                        push(left, top, &mut segments);
                        push(bottom, right, &mut segments);
                    } else {
                        push(left, bottom, &mut segments);
                        push(right, top, &mut segments);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    // Chain segments into polylines by shared refined points.
    let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
    for (si, &(a, b)) in segments.iter().enumerate() {
        adjacency.entry(a).or_default().push(si);
        adjacency.entry(b).or_default().push(si);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let mut chain = std::collections::VecDeque::from([a, b]);
        for (end_point, front) in [(b, false), (a, true)] {
            let mut current = end_point;
            loop {
                let next_seg = adjacency[&current]
                    .iter()
                    .copied()
                    .find(|&si| !used[si]);
                let Some(si) = next_seg else { break };
                used[si] = true;
                let (sa, sb) = segments[si];
                let next_point = if sa == current { sb } else { sa };
                if front {
                    chain.push_front(next_point);
                } else {
                    chain.push_back(next_point);
                }
                current = next_point;
            }
        }
        let phys: Vec<(f64, f64)> = chain
            .iter()
            .map(|&pi| {
                let (u, v) = points[pi];
                window.from_unit(u, v)
            })
            .collect();
        let max_residual = phys
            .iter()
            .map(|&(d, w)| eval.residual(family, d, w))
            .fold(0.0, f64::max);
        polylines.push(Polyline {
            points: phys,
            max_residual,
        });
    }
    polylines
}

/// Proper intersection point of two unit-square segments, if any.
fn segment_intersection(
    p: (f64, f64),
    p2: (f64, f64),
    q: (f64, f64),
    q2: (f64, f64),
) -> Option<(f64, f64)> {
    let r = (p2.0 - p.0, p2.1 - p.1);
    let s = (q2.0 - q.0, q2.1 - q.1);
    let denom = r.0 * s.1 - r.1 * s.0;
    if denom == 0.0 {
        return None;
    }
    let qp = (q.0 - p.0, q.1 - p.1);
    let t = (qp.0 * s.1 - qp.1 * s.0) / denom;
    let u = (qp.0 * r.1 - qp.1 * r.0) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((p.0 + t * r.0, p.1 + t * r.1))
    } else {
        None
    }
}

/// Damped Newton polish of a candidate crossing. Returns the refined unit
/// coordinates plus |sin θ| between the two contour normals, or `None` when
/// the iteration fails to converge inside the window.
fn newton_polish(
    eval: &ConditionEvaluator,
    window: &Window,
    start: (f64, f64),
    opts: &TracerOptions,
) -> Option<((f64, f64), f64)> {
    let h = 1e-7;
    let f = |u: f64, v: f64| -> (f64, f64) {
        let (d, w) = window.from_unit(u, v);
        (
            eval.value(ContourFamily::Optical, d, w),
            eval.value(ContourFamily::Microwave, d, w),
        )
    };
    let (mut u, mut v) = start;
    let mut last_norm = f64::INFINITY;
    for _ in 0..opts.max_newton_iterations {
        let (f1, f2) = f(u, v);
        let (f1u, f2u) = f(u + h, v);
        let (f1mu, f2mu) = f(u - h, v);
        let (f1v, f2v) = f(u, v + h);
        let (f1mv, f2mv) = f(u, v - h);
        let j11 = (f1u - f1mu) / (2.0 * h);
        let j12 = (f1v - f1mv) / (2.0 * h);
        let j21 = (f2u - f2mu) / (2.0 * h);
        let j22 = (f2v - f2mv) / (2.0 * h);
        let det = j11 * j22 - j12 * j21;
        let g1 = (j11 * j11 + j12 * j12).sqrt();
        let g2 = (j21 * j21 + j22 * j22).sqrt();
        if det == 0.0 || g1 == 0.0 || g2 == 0.0 {
            return None;
        }
        // scaled residual norm for the damping test
        let norm = (f1 / g1).hypot(f2 / g2);
        let mut du = -(j22 * f1 - j12 * f2) / det;
        let mut dv = -(-j21 * f1 + j11 * f2) / det;
        // damp steps that would overshoot or run far outside the window
        let mut damping = 0;
        while damping < 10 {
            let (nu, nv) = (u + du, v + dv);
            if window.contains_unit(nu, nv, 0.05) {
                let (n1, n2) = f(nu, nv);
                let new_norm = (n1 / g1).hypot(n2 / g2);
                if new_norm <= norm || new_norm < 1e-14 {
                    break;
                }
            }
            du *= 0.5;
            dv *= 0.5;
            damping += 1;
        }
        if damping == 10 {
            return None;
        }
        u += du;
        v += dv;
        let step = du.hypot(dv);
        if step < 1e-13 {
            let sin_theta = det.abs() / (g1 * g2);
            return window.contains_unit(u, v, 1e-6).then_some(((u, v), sin_theta));
        }
        if norm > last_norm * 10.0 {
            return None; // diverging
        }
        last_norm = norm;
    }
    None
}

/// Trace optical, microwave, and matching contours over a window and find
/// the transversal optical × microwave intersections.
pub fn trace_contours(
    system: &SystemSpec,
    window: &Window,
    resolution: (usize, usize),
    n_pump: f64,
    opts: &TracerOptions,
) -> Result<ContourSet> {
    window.validate()?;
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(Error::domain("contours.resolution", "need ≥ 2 points per axis"));
    }
    if !(opts.tolerance > 0.0) {
        return Err(Error::domain("contours.tolerance", "must be > 0"));
    }
    let eval = ConditionEvaluator::new(system, n_pump)?;
    let (nx, ny) = resolution;
    let optical = trace_family(&eval, ContourFamily::Optical, window, nx, ny);
    let microwave = trace_family(&eval, ContourFamily::Microwave, window, nx, ny);
    let matching = trace_family(&eval, ContourFamily::Matching, window, nx, ny);

    // Candidate crossings from segment pairs, then Newton + transversality.
    let to_unit_poly = |poly: &Polyline| -> Vec<(f64, f64)> {
        poly.points
            .iter()
            .map(|&(d, w)| window.to_unit(d, w))
            .collect()
    };
    let optical_unit: Vec<Vec<(f64, f64)>> = optical.iter().map(to_unit_poly).collect();
    let microwave_unit: Vec<Vec<(f64, f64)>> = microwave.iter().map(to_unit_poly).collect();

    let merge_radius = opts.merge_radius_frac * std::f64::consts::SQRT_2;
    let mut found: Vec<(f64, f64, f64)> = Vec::new(); // unit coords + sin θ
    for opt_poly in &optical_unit {
        for mw_poly in &microwave_unit {
            for i in 0..opt_poly.len().saturating_sub(1) {
                for j in 0..mw_poly.len().saturating_sub(1) {
                    let Some(candidate) = segment_intersection(
                        opt_poly[i],
                        opt_poly[i + 1],
                        mw_poly[j],
                        mw_poly[j + 1],
                    ) else {
                        continue;
                    };
                    let Some(((u, v), sin_theta)) = newton_polish(&eval, window, candidate, opts)
                    else {
                        continue;
                    };
                    if sin_theta < opts.min_transversality {
                        continue;
                    }
                    if found
                        .iter()
                        .any(|&(fu, fv, _)| (fu - u).hypot(fv - v) < merge_radius)
                    {
                        continue;
                    }
                    found.push((u, v, sin_theta));
                }
            }
        }
    }

    let origin_unit = window.to_unit(0.0, 0.0);
    let mut intersections: Vec<Intersection> = found
        .into_iter()
        .map(|(u, v, _)| {
            let (delta, omega) = window.from_unit(u, v);
            let near_origin = window.contains_unit(origin_unit.0, origin_unit.1, 0.0)
                && (u - origin_unit.0).hypot(v - origin_unit.1) < merge_radius;
            let residual = eval
                .residual(ContourFamily::Optical, delta, omega)
                .max(eval.residual(ContourFamily::Microwave, delta, omega));
            Intersection {
                delta,
                omega,
                kind: if near_origin {
                    IntersectionKind::OriginPoint
                } else {
                    IntersectionKind::NearResonanceCross
                },
                residual,
            }
        })
        .collect();
    intersections.sort_by(|a, b| {
        (a.delta, a.omega)
            .partial_cmp(&(b.delta, b.omega))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    Ok(ContourSet {
        optical,
        microwave,
        matching,
        intersections,
    })
}

/// Which design parameter the matching solve treats as free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeVariable {
    OmegaP,
    NTotal,
    KappaAEx,
    KappaCEx,
}

impl std::str::FromStr for FreeVariable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega_p" => Ok(FreeVariable::OmegaP),
            "n_a" | "n_total" => Ok(FreeVariable::NTotal),
            "kappa_a_ex" => Ok(FreeVariable::KappaAEx),
            "kappa_c_ex" => Ok(FreeVariable::KappaCEx),
            other => Err(Error::Config(format!(
                "unknown design variable `{other}` (expected omega_p, n_a, kappa_a_ex, kappa_c_ex)"
            ))),
        }
    }
}

/// Matched-design solution with its exact-cooperativity cross-check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchedDesign {
    pub variable: FreeVariable,
    /// Solved value: Hz for rates, a pure number for the center total.
    pub value: f64,
    /// Exact C at the solved design (full response at ω = Δ = 0, totals
    /// including center loss). Strong-pump solutions land within a few
    /// percent of 1.
    pub exact_cooperativity: f64,
}

/// Mode losses at a given pump number, before center contributions.
fn bare_losses(system: &SystemSpec, n_pump: f64) -> Result<(BareLoss, BareLoss)> {
    let budget = crate::budget::assemble_budget(
        system,
        &OperatingPoint::origin(n_pump),
        &crate::model::SusceptibilityTriplet::ZERO,
    )?;
    Ok((budget.bare_a(), budget.bare_c()))
}

fn ensemble_template(system: &SystemSpec) -> Result<CenterClass> {
    system
        .ensemble
        .template()
        .ok_or_else(|| Error::Config("matched design requires a non-empty ensemble".into()))
}

/// Solve the C = 1 matching condition at ω = Δ = 0 for one free parameter
/// using the strong-pump form |ξ_ac| ≈ N_A g12 g13/Ω_p, then cross-validate
/// by evaluating the exact cooperativity at the returned value.
pub fn solve_matched_design(
    system: &SystemSpec,
    free: FreeVariable,
    n_pump: f64,
) -> Result<MatchedDesign> {
    system.validate()?;
    let template = ensemble_template(system)?;
    let g12 = template.g12.require_pos("ensemble.g12")?;
    let g13 = template.g13.require_pos("ensemble.g13")?;
    let (bare_a, bare_c) = bare_losses(system, n_pump)?;
    let (ka, kc) = (bare_a.kappa, bare_c.kappa);
    let n_total = system.n_total();

    let rabi = |sys: &SystemSpec| -> Result<f64> {
        match sys.pump.rabi(n_pump, sys.geometry.as_ref())? {
            Some(rate) => Ok(rate.get()),
            None => Ok(template.omega_p.get()),
        }
    };

    let (value, modified): (f64, SystemSpec) = match free {
        FreeVariable::OmegaP => {
            let omega_p =
                crate::response::matching_pump_rabi(n_total, Rate::hz(g12), Rate::hz(g13), Rate::hz(ka), Rate::hz(kc))?
                    .get();
            let mut sys = system.clone();
            sys.pump.coupling = PumpCoupling::Fixed {
                omega_p: Rate::hz(omega_p),
            };
            (omega_p, sys)
        }
        FreeVariable::NTotal => {
            let omega_p = rabi(system)?;
            if omega_p <= 0.0 {
                return Err(Error::NoSolution(
                    "matching needs a nonzero pump Rabi frequency".into(),
                ));
            }
            let n = omega_p * (ka * kc).sqrt() / (2.0 * g12 * g13);
            (n, system.clone().with_n_total(n))
        }
        FreeVariable::KappaAEx => {
            let omega_p = rabi(system)?;
            if omega_p <= 0.0 {
                return Err(Error::NoSolution(
                    "matching needs a nonzero pump Rabi frequency".into(),
                ));
            }
            let xi_ac = n_total * g12 * g13 / omega_p;
            let ka_needed = 4.0 * xi_ac * xi_ac / kc;
            let ka_in = ka - bare_a.kappa_ex;
            let ka_ex = ka_needed - ka_in;
            if ka_ex <= 0.0 {
                return Err(Error::NoSolution(format!(
                    "required total optical loss {ka_needed:.3e} Hz is below the intrinsic loss {ka_in:.3e} Hz"
                )));
            }
            let mut sys = system.clone();
            sys.cavity_a.kappa_ex = Rate::hz(ka_ex);
            (ka_ex, sys)
        }
        FreeVariable::KappaCEx => {
            let omega_p = rabi(system)?;
            if omega_p <= 0.0 {
                return Err(Error::NoSolution(
                    "matching needs a nonzero pump Rabi frequency".into(),
                ));
            }
            let xi_ac = n_total * g12 * g13 / omega_p;
            let kc_needed = 4.0 * xi_ac * xi_ac / ka;
            let kc_in = kc - bare_c.kappa_ex;
            let kc_ex = kc_needed - kc_in;
            if kc_ex <= 0.0 {
                return Err(Error::NoSolution(format!(
                    "required total microwave loss {kc_needed:.3e} Hz is below the intrinsic loss {kc_in:.3e} Hz"
                )));
            }
            let mut sys = system.clone();
            sys.cavity_c.kappa_ex = Rate::hz(kc_ex);
            (kc_ex, sys)
        }
    };

    let report = modified.respond(&OperatingPoint::origin(n_pump))?;
    Ok(MatchedDesign {
        variable: free,
        value,
        exact_cooperativity: report.cooperativity,
    })
}

/// One row of the density/pump design table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignRow {
    pub n_pump: f64,
    pub sigma13: f64,
    pub omega_p: f64,
    pub n_total: f64,
    /// Center density N_A/V_o in µm⁻³ when the geometry is known.
    pub rho_per_um3: Option<f64>,
    pub summary: Option<CellSummary>,
    pub error: Option<String>,
}

/// For each (optical IB, pump photon number) pair: re-match the center
/// total for C = 1, then evaluate the full inhomogeneous response and
/// budget at zero detunings. Failures are recorded per row.
pub fn density_pump_sweep(
    system: &SystemSpec,
    n_pump_list: &[f64],
    ib_list: &[Rate],
) -> Vec<DesignRow> {
    let mut rows = Vec::with_capacity(n_pump_list.len() * ib_list.len());
    for &sigma13 in ib_list {
        for &n_pump in n_pump_list {
            let mut sys = system.clone();
            if let EnsembleSpec::Gaussian(spec) = &mut sys.ensemble {
                spec.sigma13 = sigma13;
            }
            let outcome = (|| -> Result<(f64, f64, Option<f64>, CellSummary)> {
                let design = solve_matched_design(&sys, FreeVariable::NTotal, n_pump)?;
                let matched = sys.clone().with_n_total(design.value);
                let omega_p = matched
                    .pump
                    .rabi(n_pump, matched.geometry.as_ref())?
                    .map(|r| r.get())
                    .unwrap_or(0.0);
                let report = matched.respond(&OperatingPoint::origin(n_pump))?;
                let rho = matched.geometry.as_ref().map(|g| design.value / g.v_optical);
                Ok((design.value, omega_p, rho, summarize(&report)))
            })();
            match outcome {
                Ok((n_total, omega_p, rho, summary)) => rows.push(DesignRow {
                    n_pump,
                    sigma13: sigma13.get(),
                    omega_p,
                    n_total,
                    rho_per_um3: rho,
                    summary: Some(summary),
                    error: None,
                }),
                Err(e) => rows.push(DesignRow {
                    n_pump,
                    sigma13: sigma13.get(),
                    omega_p: 0.0,
                    n_total: 0.0,
                    rho_per_um3: None,
                    summary: None,
                    error: Some(e.to_string()),
                }),
            }
        }
    }
    rows
}

/// Optimizer result. `degenerate` marks an all-zero landscape (pump off),
/// in which case the window center is returned.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OptimumReport {
    pub omega: f64,
    pub delta: f64,
    pub eta: f64,
    pub degenerate: bool,
    /// Best coarse-grid value; the refined result is never below it.
    pub coarse_eta: f64,
}

/// Coarse-grid seed followed by deterministic Nelder–Mead refinement of the
/// total efficiency over the window. Ties between equal-η seeds resolve to
/// the lowest (ω, Δ) in lexicographic order.
pub fn optimize_operating_point(
    system: &SystemSpec,
    window: &Window,
    n_pump: f64,
    coarse: (usize, usize),
) -> Result<OptimumReport> {
    window.validate()?;
    if coarse.0 < 2 || coarse.1 < 2 {
        return Err(Error::domain("optimize.coarse", "need ≥ 2 points per axis"));
    }
    system.validate()?;
    let classes = system.classes_at(&OperatingPoint::origin(n_pump))?;
    let eta_at = |u: f64, v: f64| -> f64 {
        if !window.contains_unit(u, v, 0.0) {
            return f64::NEG_INFINITY;
        }
        let (d, w) = window.from_unit(u, v);
        let point = OperatingPoint::new(Rate::hz(w), Rate::hz(d), n_pump);
        system
            .respond_with_classes(&classes, &point)
            .map(|r| r.eta_total)
            .unwrap_or(f64::NEG_INFINITY)
    };

    // Coarse scan in ascending (ω, Δ) order; strict improvement keeps the
    // lexicographically lowest seed among exact ties.
    let (n_omega, n_delta) = coarse;
    let vs = uniform_axis(0.0, 1.0, n_omega);
    let us = uniform_axis(0.0, 1.0, n_delta);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for &v in &vs {
        for &u in &us {
            let eta = eta_at(u, v);
            if eta > best.0 {
                best = (eta, u, v);
            }
        }
    }
    let coarse_eta = best.0.max(0.0);
    if !(best.0 > 0.0) {
        let (delta, omega) = window.center();
        return Ok(OptimumReport {
            omega,
            delta,
            eta: 0.0,
            degenerate: true,
            coarse_eta: 0.0,
        });
    }

    // Nelder–Mead on −η, initial simplex one coarse cell wide.
    let h_u = 1.0 / (n_delta - 1) as f64;
    let h_v = 1.0 / (n_omega - 1) as f64;
    let mut simplex = vec![
        (best.1, best.2),
        ((best.1 + h_u).min(1.0), best.2),
        (best.1, (best.2 + h_v).min(1.0)),
    ];
    // keep vertices distinct at the window edge
    if simplex[1].0 == simplex[0].0 {
        simplex[1].0 = best.1 - h_u;
    }
    if simplex[2].1 == simplex[0].1 {
        simplex[2].1 = best.2 - h_v;
    }
    let mut values: Vec<f64> = simplex.iter().map(|&(u, v)| -eta_at(u, v)).collect();

    for _ in 0..400 {
        // order ascending by -η
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let [b, m, w] = order;
        let centroid = (
            0.5 * (simplex[b].0 + simplex[m].0),
            0.5 * (simplex[b].1 + simplex[m].1),
        );
        let worst = simplex[w];
        let reflect = (
            centroid.0 + (centroid.0 - worst.0),
            centroid.1 + (centroid.1 - worst.1),
        );
        let f_r = -eta_at(reflect.0, reflect.1);
        if f_r < values[b] {
            let expand = (
                centroid.0 + 2.0 * (centroid.0 - worst.0),
                centroid.1 + 2.0 * (centroid.1 - worst.1),
            );
            let f_e = -eta_at(expand.0, expand.1);
            if f_e < f_r {
                simplex[w] = expand;
                values[w] = f_e;
            } else {
                simplex[w] = reflect;
                values[w] = f_r;
            }
        } else if f_r < values[m] {
            simplex[w] = reflect;
            values[w] = f_r;
        } else {
            let contract = (
                centroid.0 + 0.5 * (worst.0 - centroid.0),
                centroid.1 + 0.5 * (worst.1 - centroid.1),
            );
            let f_c = -eta_at(contract.0, contract.1);
            if f_c < values[w] {
                simplex[w] = contract;
                values[w] = f_c;
            } else {
                for i in 0..3 {
                    if i != b {
                        simplex[i] = (
                            simplex[b].0 + 0.5 * (simplex[i].0 - simplex[b].0),
                            simplex[b].1 + 0.5 * (simplex[i].1 - simplex[b].1),
                        );
                        values[i] = -eta_at(simplex[i].0, simplex[i].1);
                    }
                }
            }
        }
        let diameter = (0..3)
            .flat_map(|i| ((i + 1)..3).map(move |j| (i, j)))
            .map(|(i, j)| (simplex[i].0 - simplex[j].0).hypot(simplex[i].1 - simplex[j].1))
            .fold(0.0, f64::max);
        if diameter < 1e-10 {
            break;
        }
    }

    let mut refined = (f64::NEG_INFINITY, (0.0, 0.0));
    for (i, &(u, v)) in simplex.iter().enumerate() {
        if -values[i] > refined.0 {
            refined = (-values[i], (u, v));
        }
    }
    let (eta, (u, v)) = if refined.0 >= coarse_eta {
        refined
    } else {
        (coarse_eta, (best.1, best.2))
    };
    let (delta, omega) = window.from_unit(u, v);
    Ok(OptimumReport {
        omega,
        delta,
        eta,
        degenerate: false,
        coarse_eta,
    })
}

/// Diagnostic for the strong-coupling cooperativity enhancement over the
/// detuned (weakly hybridized) regime. Two published candidate expressions
/// disagree with each other once evaluated; both are reported, neither is
/// asserted.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnhancementReport {
    /// (g12 g13 N_A/Ω_p² − 1)².
    pub squared_expression: f64,
    /// |ξ_ac(δ = 0)|²/|ξ_ac(δ_1i = 4 g_1i √N_A)|² at zero signal detunings.
    pub cooperativity_ratio_at_4g: f64,
    /// Published claim for the second quantity, quoted for comparison only.
    pub quoted_values: (f64, f64),
}

pub fn enhancement_report(system: &SystemSpec, n_pump: f64) -> Result<EnhancementReport> {
    let template = ensemble_template(system)?;
    let n_total = system.n_total();
    let g12 = template.g12.get();
    let g13 = template.g13.get();
    let omega_p = match system.pump.rabi(n_pump, system.geometry.as_ref())? {
        Some(r) => r.get(),
        None => template.omega_p.get(),
    };
    if omega_p <= 0.0 {
        return Err(Error::NoSolution("enhancement needs a nonzero pump".into()));
    }
    let squared_expression = (g12 * g13 * n_total / (omega_p * omega_p) - 1.0).powi(2);

    let xi_at = |delta13: f64, delta12: f64| -> Result<f64> {
        let mut class = template;
        class.delta13 = Rate::hz(delta13);
        class.delta12 = Rate::hz(delta12);
        class.omega_p = Rate::hz(omega_p);
        class.weight = n_total;
        let xi = crate::model::susceptibilities(&[class], &OperatingPoint::origin(n_pump))?;
        Ok(xi.xi_ac.norm())
    };
    let strong = xi_at(0.0, 0.0)?;
    let sqrt_n = n_total.sqrt();
    let weak = xi_at(4.0 * g13 * sqrt_n, 4.0 * g12 * sqrt_n)?;
    Ok(EnhancementReport {
        squared_expression,
        cooperativity_ratio_at_4g: (strong / weak).powi(2),
        quoted_values: (300.0, 400.0),
    })
}
