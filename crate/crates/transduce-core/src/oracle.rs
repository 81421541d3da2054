//! Independent validation of the closed-form response: assemble and solve
//! the steady-state linear coupled-mode system for the cavity amplitudes
//! and center polarizations under a coherent drive, and read the conversion
//! efficiency off the input–output relations.
//!
//! The mean-field equations of motion, written in the frame rotating with
//! the signal (after analytically removing the pump phase e^{−iΔt} so the
//! problem is time-independent), are ẋ = A·x + s with unknowns
//! x = (a, c, σ13,1…σ13,K, σ12,1…σ12,K):
//!
//! ```text
//! ȧ      = [i(ω+Δ) − κ_a/2]·a − i Σ_k w_k g13,k σ13,k + √κ_a^ex a_in
//! ċ      = [iω     − κ_c/2]·c − i Σ_k w_k g12,k σ12,k + √κ_c^ex c_in
//! σ̇13,k = i·D13,k σ13,k − i g13,k a − i Ω_p,k σ12,k
//! σ̇12,k = i·D12,k σ12,k − i g12,k c − i Ω_p,k σ13,k
//! D13,k = ω + Δ − Δ13,k,  D12,k = ω − Δ12,k
//! ```
//!
//! Class weights multiply the couplings only in the mode rows: all w_k
//! centers of a class share one polarization amplitude, while the mode sees
//! their collective field. Steady state is the dense solve A·x = −s; unlike
//! the closed form, the center variables are never eliminated.
//!
//! Input–output convention, used consistently here and in the response
//! module: output = input − √κ^ex·⟨mode⟩.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::model::{CenterClass, OperatingPoint, Rate};
use crate::response::BareLoss;
use crate::{Error, Result};

/// Which traveling-wave port carries the unit-amplitude coherent drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DrivePort {
    Microwave,
    Optical,
}

/// Assembled steady-state problem A·x = −s.
pub struct LinearSystem {
    pub matrix: DMatrix<Complex64>,
    pub drive: DVector<Complex64>,
    n_classes: usize,
}

impl LinearSystem {
    pub fn dim(&self) -> usize {
        2 + 2 * self.n_classes
    }
}

/// Build the dynamical matrix and drive vector for K classes.
pub fn assemble(
    classes: &[CenterClass],
    cav_a: BareLoss,
    cav_c: BareLoss,
    point: &OperatingPoint,
    port: DrivePort,
) -> Result<LinearSystem> {
    point.validate()?;
    let k = classes.len();
    let n = 2 + 2 * k;
    let omega = point.omega.get();
    let delta = point.delta.get();

    let mut m = DMatrix::<Complex64>::zeros(n, n);
    m[(0, 0)] = Complex64::new(-0.5 * cav_a.kappa, omega + delta);
    m[(1, 1)] = Complex64::new(-0.5 * cav_c.kappa, omega);

    for (idx, class) in classes.iter().enumerate() {
        class.validate(&format!("classes[{idx}]"))?;
        let i13 = 2 + idx;
        let i12 = 2 + k + idx;
        let g13 = class.g13.get();
        let g12 = class.g12.get();
        let om_p = class.omega_p.get();
        let w = class.weight;

        let d13 = Complex64::new(omega + delta, 0.0) - class.detuning13();
        let d12 = Complex64::new(omega, 0.0) - class.detuning12();
        m[(i13, i13)] = Complex64::i() * d13;
        m[(i12, i12)] = Complex64::i() * d12;

        m[(0, i13)] = Complex64::new(0.0, -w * g13);
        m[(1, i12)] = Complex64::new(0.0, -w * g12);
        m[(i13, 0)] = Complex64::new(0.0, -g13);
        m[(i12, 1)] = Complex64::new(0.0, -g12);
        m[(i13, i12)] = Complex64::new(0.0, -om_p);
        m[(i12, i13)] = Complex64::new(0.0, -om_p);
    }

    let mut s = DVector::<Complex64>::zeros(n);
    match port {
        DrivePort::Microwave => s[1] = Complex64::new(cav_c.kappa_ex.sqrt(), 0.0),
        DrivePort::Optical => s[0] = Complex64::new(cav_a.kappa_ex.sqrt(), 0.0),
    }

    Ok(LinearSystem {
        matrix: m,
        drive: s,
        n_classes: k,
    })
}

fn solve_steady_state(system: &LinearSystem) -> Result<DVector<Complex64>> {
    let cond_proxy = diagonal_ratio(&system.matrix);
    let lu = system.matrix.clone().lu();
    lu.solve(&(-&system.drive))
        .ok_or(Error::Singular { cond: cond_proxy })
}

/// Cheap conditioning proxy for diagnostics: max/min diagonal magnitude.
fn diagonal_ratio(m: &DMatrix<Complex64>) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for i in 0..m.nrows() {
        let d = m[(i, i)].norm();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Steady-state conversion efficiency |S21|² from the dense linear solve.
///
/// Drives the chosen port with unit amplitude, solves for all mode and
/// polarization amplitudes, and applies output = input − √κ^ex·⟨mode⟩ at
/// the opposite port.
pub fn steady_state_efficiency(
    classes: &[CenterClass],
    cav_a: BareLoss,
    cav_c: BareLoss,
    point: &OperatingPoint,
    port: DrivePort,
) -> Result<f64> {
    let system = assemble(classes, cav_a, cav_c, point, port)?;
    let x = solve_steady_state(&system)?;
    let out = match port {
        DrivePort::Microwave => -cav_a.kappa_ex.sqrt() * x[0],
        DrivePort::Optical => -cav_c.kappa_ex.sqrt() * x[1],
    };
    Ok(out.norm_sqr())
}

/// Eigenvalues of the dynamical matrix, via the real 2n×2n embedding
/// [[Re A, −Im A], [Im A, Re A]]. Stable systems have all real parts < 0.
pub fn eigenvalues(system: &LinearSystem) -> Vec<Complex64> {
    let n = system.matrix.nrows();
    let mut real = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = system.matrix[(i, j)];
            real[(i, j)] = z.re;
            real[(i, j + n)] = -z.im;
            real[(i + n, j)] = z.im;
            real[(i + n, j + n)] = z.re;
        }
    }
    // the embedding doubles the spectrum into conjugate pairs; keep all
    real.complex_eigenvalues().iter().copied().collect()
}

/// True if every eigenvalue of the dynamical matrix has negative real part.
pub fn is_stable(system: &LinearSystem) -> bool {
    eigenvalues(system).iter().all(|ev| ev.re < 0.0)
}

/// Result of an adaptive transient integration from vacuum under constant
/// drive. `completed == false` signals a step-control failure; the series
/// then holds the last good state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RingUp {
    pub times: Vec<f64>,
    pub a_mag: Vec<f64>,
    pub c_mag: Vec<f64>,
    pub final_a: Complex64,
    pub final_c: Complex64,
    pub completed: bool,
    pub steps_taken: u64,
}

/// Integration controls for [`transient_ring_up`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: u64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_steps: 20_000_000,
        }
    }
}

/// Adaptive Dormand–Prince (RK45) integration of ẋ = A·x + s from x(0) = 0
/// for `duration` seconds. Cross-check that time evolution relaxes to the
/// steady-state solve's fixed point.
pub fn transient_ring_up(
    classes: &[CenterClass],
    cav_a: BareLoss,
    cav_c: BareLoss,
    point: &OperatingPoint,
    port: DrivePort,
    duration: f64,
    control: StepControl,
) -> Result<RingUp> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::domain("duration", "must be > 0"));
    }
    let system = assemble(classes, cav_a, cav_c, point, port)?;
    let n = system.dim();
    let a = &system.matrix;
    let s = &system.drive;
    let deriv = |x: &DVector<Complex64>| a * x + s;

    // Dormand–Prince 5(4) coefficients
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    const A_TABLE: [[f64; 6]; 7] = [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];

    let mut x = DVector::<Complex64>::zeros(n);
    let mut t = 0.0_f64;
    // initial step from the fastest decay scale on the diagonal
    let fastest = (0..n)
        .map(|i| a[(i, i)].norm())
        .fold(0.0_f64, f64::max)
        .max(1.0 / duration);
    let mut h = (0.01 / fastest).min(duration);
    let mut times = vec![0.0];
    let mut a_mag = vec![0.0];
    let mut c_mag = vec![0.0];
    let mut steps: u64 = 0;
    let mut completed = true;
    let sample_every = 64;

    while t < duration {
        if steps >= control.max_steps {
            completed = false;
            break;
        }
        h = h.min(duration - t);
        let mut k: Vec<DVector<Complex64>> = Vec::with_capacity(7);
        for stage in 0..7 {
            let mut xs = x.clone();
            for (j, kj) in k.iter().enumerate() {
                let coef = A_TABLE[stage][j];
                if coef != 0.0 {
                    xs += kj * Complex64::new(coef * h, 0.0);
                }
            }
            let _ = C[stage];
            k.push(deriv(&xs));
        }
        let mut x5 = x.clone();
        let mut err = 0.0_f64;
        let mut scale_den = 0.0_f64;
        let mut diff = DVector::<Complex64>::zeros(n);
        for (j, kj) in k.iter().enumerate() {
            if B5[j] != 0.0 {
                x5 += kj * Complex64::new(B5[j] * h, 0.0);
            }
            let db = B5[j] - B4[j];
            if db != 0.0 {
                diff += kj * Complex64::new(db * h, 0.0);
            }
        }
        for i in 0..n {
            let sc = control.abs_tol + control.rel_tol * x5[i].norm().max(x[i].norm());
            err += (diff[i].norm() / sc).powi(2);
            scale_den += 1.0;
        }
        let err_norm = (err / scale_den).sqrt();
        steps += 1;

        if err_norm <= 1.0 {
            t += h;
            x = x5;
            if steps % sample_every == 0 || t >= duration {
                times.push(t);
                a_mag.push(x[0].norm());
                c_mag.push(x[1].norm());
            }
        }
        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if !(h.is_finite() && h > 0.0) {
            completed = false;
            break;
        }
    }

    Ok(RingUp {
        times,
        a_mag,
        c_mag,
        final_a: x[0],
        final_c: x[1],
        completed,
        steps_taken: steps,
    })
}

/// One random physical configuration for the closed-form-vs-oracle
/// agreement campaign. Rates are drawn log-uniformly over device-like
/// ranges; detunings are Gaussian around zero.
#[derive(Debug, Clone)]
pub struct RandomDraw {
    pub classes: Vec<CenterClass>,
    pub cav_a: BareLoss,
    pub cav_c: BareLoss,
    pub point: OperatingPoint,
}

/// Deterministic generator for the agreement campaign (ChaCha12, keyed).
pub fn random_draw(rng: &mut rand_chacha::ChaCha12Rng, max_classes: usize) -> RandomDraw {
    let log_uniform = |rng: &mut rand_chacha::ChaCha12Rng, lo: f64, hi: f64| -> f64 {
        10f64.powf(rng.gen_range(lo.log10()..hi.log10()))
    };
    let normal = |rng: &mut rand_chacha::ChaCha12Rng, sigma: f64| -> f64 {
        let u: f64 = rng.gen_range(1e-12..1.0);
        let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        sigma * (-2.0 * u.ln()).sqrt() * v.cos()
    };

    let k = rng.gen_range(1..=max_classes);
    let classes = (0..k)
        .map(|_| CenterClass {
            g13: Rate::hz(log_uniform(rng, 1e1, 3e6)),
            g12: Rate::hz(log_uniform(rng, 3.0, 1e4)),
            gamma13: Rate::hz(log_uniform(rng, 1.0, 1e6)),
            gamma12: Rate::hz(log_uniform(rng, 1.0, 1e4)),
            delta13: Rate::hz(normal(rng, 1e7)),
            delta12: Rate::hz(normal(rng, 1e5)),
            omega_p: Rate::hz(log_uniform(rng, 1e4, 3e7)),
            weight: log_uniform(rng, 1.0, 1e6),
        })
        .collect();
    let ka_ex = log_uniform(rng, 1e6, 3e9);
    let kc_ex = log_uniform(rng, 1e4, 3e6);
    RandomDraw {
        classes,
        cav_a: BareLoss::new(ka_ex, ka_ex * rng.gen_range(1.0..1.5)),
        cav_c: BareLoss::new(kc_ex, kc_ex * rng.gen_range(1.0..1.5)),
        point: OperatingPoint::new(
            Rate::hz(normal(rng, 1e6)),
            Rate::hz(normal(rng, 1e6)),
            0.0,
        ),
    }
}

/// Outcome of the seeded agreement campaign.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgreementReport {
    pub draws: u32,
    pub max_rel_deviation: f64,
    pub max_port_asymmetry: f64,
    pub seed: u64,
}

/// Run `draws` random configurations and compare the closed-form efficiency
/// against the steady-state solve from both drive ports.
pub fn agreement_campaign(draws: u32, max_classes: usize, seed: u64) -> Result<AgreementReport> {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let mut max_rel: f64 = 0.0;
    let mut max_asym: f64 = 0.0;
    for _ in 0..draws {
        let draw = random_draw(&mut rng, max_classes);
        let xi = crate::model::susceptibilities(&draw.classes, &draw.point)?;
        let closed = crate::response::efficiency(&xi, draw.cav_a, draw.cav_c, &draw.point)?;
        let from_mw = steady_state_efficiency(
            &draw.classes,
            draw.cav_a,
            draw.cav_c,
            &draw.point,
            DrivePort::Microwave,
        )?;
        let from_opt = steady_state_efficiency(
            &draw.classes,
            draw.cav_a,
            draw.cav_c,
            &draw.point,
            DrivePort::Optical,
        )?;
        if closed > 0.0 {
            max_rel = max_rel
                .max((from_mw - closed).abs() / closed)
                .max((from_opt - closed).abs() / closed);
        }
        if from_mw.max(from_opt) > 0.0 {
            max_asym = max_asym.max((from_mw - from_opt).abs() / from_mw.max(from_opt));
        }
    }
    Ok(AgreementReport {
        draws,
        max_rel_deviation: max_rel,
        max_port_asymmetry: max_asym,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::efficiency;
    use approx::assert_relative_eq;

    fn t_class(weight: f64, omega_p: f64) -> CenterClass {
        CenterClass {
            g13: Rate::mhz(2.0),
            g12: Rate::hz(40.0),
            gamma13: Rate::mhz(1.0),
            gamma12: Rate::hz(1.0),
            delta13: Rate::ZERO,
            delta12: Rate::ZERO,
            omega_p: Rate::hz(omega_p),
            weight,
        }
    }

    #[test]
    fn no_centers_means_no_conversion() {
        let eta = steady_state_efficiency(
            &[],
            BareLoss::overcoupled(2e9),
            BareLoss::overcoupled(0.8e6),
            &OperatingPoint::origin(0.0),
            DrivePort::Microwave,
        )
        .unwrap();
        assert_eq!(eta, 0.0);
    }

    #[test]
    fn matched_design_agrees_with_closed_form() {
        let classes = vec![t_class(1e6, 4e6)];
        let cav_a = BareLoss::overcoupled(2e9);
        let cav_c = BareLoss::overcoupled(0.8e6);
        let point = OperatingPoint::origin(0.0);
        let xi = crate::model::susceptibilities(&classes, &point).unwrap();
        let closed = efficiency(&xi, cav_a, cav_c, &point).unwrap();
        let solved =
            steady_state_efficiency(&classes, cav_a, cav_c, &point, DrivePort::Microwave).unwrap();
        assert_relative_eq!(solved, closed, max_relative = 1e-12);
        assert!(closed > 0.999);
    }

    #[test]
    fn drive_port_symmetry() {
        let classes = vec![t_class(1e6, 4e6), {
            let mut c = t_class(2e5, 4e6);
            c.delta13 = Rate::mhz(12.0);
            c.delta12 = Rate::khz(40.0);
            c
        }];
        let cav_a = BareLoss::new(2e9, 2.3e9);
        let cav_c = BareLoss::new(0.8e6, 0.95e6);
        let point = OperatingPoint::new(Rate::khz(17.0), Rate::mhz(3.0), 0.0);
        let mw =
            steady_state_efficiency(&classes, cav_a, cav_c, &point, DrivePort::Microwave).unwrap();
        let opt =
            steady_state_efficiency(&classes, cav_a, cav_c, &point, DrivePort::Optical).unwrap();
        assert_relative_eq!(mw, opt, max_relative = 1e-12);
    }

    #[test]
    fn agreement_campaign_small() {
        let report = agreement_campaign(50, 8, 0xC0FFEE).unwrap();
        assert!(
            report.max_rel_deviation < 1e-9,
            "max deviation {}",
            report.max_rel_deviation
        );
        assert!(report.max_port_asymmetry < 1e-12);
    }

    #[test]
    fn decoupled_eigenvalues_set_ring_time() {
        // With g = Ω_p = 0 the dynamical matrix is diagonal: relaxation
        // rates are exactly κ/2 and γ/2, so the slowest amplitude time
        // constant is 2/κ_slowest.
        let mut class = t_class(1e4, 0.0);
        class.g13 = Rate::ZERO;
        class.g12 = Rate::ZERO;
        let system = assemble(
            &[class],
            BareLoss::overcoupled(2e6),
            BareLoss::overcoupled(0.5e6),
            &OperatingPoint::origin(0.0),
            DrivePort::Microwave,
        )
        .unwrap();
        assert!(is_stable(&system));
        let evs = eigenvalues(&system);
        let slowest = evs
            .iter()
            .map(|e| -e.re)
            .filter(|&r| r > 0.0)
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(slowest, 0.5, max_relative = 1e-6); // γ12/2 = 0.5 Hz
    }

    #[test]
    fn stability_of_matched_design() {
        let system = assemble(
            &[t_class(1e6, 4e6)],
            BareLoss::overcoupled(2e9),
            BareLoss::overcoupled(0.8e6),
            &OperatingPoint::origin(0.0),
            DrivePort::Microwave,
        )
        .unwrap();
        assert!(is_stable(&system));
    }

    #[test]
    fn zero_drive_stays_at_vacuum() {
        let classes = vec![t_class(1e3, 1e6)];
        let mut system = assemble(
            &classes,
            BareLoss::overcoupled(1e6),
            BareLoss::overcoupled(1e6),
            &OperatingPoint::origin(0.0),
            DrivePort::Microwave,
        )
        .unwrap();
        system.drive.fill(Complex64::new(0.0, 0.0));
        let x = solve_steady_state(&system).unwrap();
        assert!(x.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn ring_up_reaches_steady_state() {
        // Stiffness is set by κ_a vs γ12; keep the spread modest so the
        // explicit integrator stays cheap, and check the terminal amplitudes
        // against the dense solve.
        let mut class = t_class(1e4, 2e5);
        class.gamma12 = Rate::hz(1e3);
        class.gamma13 = Rate::hz(5e5);
        let classes = vec![class];
        let cav_a = BareLoss::overcoupled(4e6);
        let cav_c = BareLoss::overcoupled(1e6);
        let point = OperatingPoint::origin(0.0);
        let system = assemble(&classes, cav_a, cav_c, &point, DrivePort::Microwave).unwrap();
        let x = solve_steady_state(&system).unwrap();

        let duration = 30.0 / 1e3; // ≈ 30 slowest time constants
        let ring = transient_ring_up(
            &classes,
            cav_a,
            cav_c,
            &point,
            DrivePort::Microwave,
            duration,
            StepControl {
                rel_tol: 1e-9,
                abs_tol: 1e-14,
                max_steps: 50_000_000,
            },
        )
        .unwrap();
        assert!(ring.completed);
        assert_relative_eq!(ring.final_a.norm(), x[0].norm(), max_relative = 1e-6);
        assert_relative_eq!(ring.final_c.norm(), x[1].norm(), max_relative = 1e-6);
    }
}
