//! Domain types and the ensemble linear-response susceptibilities.
//!
//! Each color center is a three-level system: two spin states |1⟩, |2⟩ split
//! by a microwave transition, and an optical excited state |3⟩. An optical
//! pump dresses the |2⟩↔|3⟩ transition with Rabi frequency Ω_p, so that a
//! microwave photon plus a pump photon convert to an optical signal photon
//! and back. In the linearized (low-excitation) regime the ensemble acts on
//! the two cavity modes through three complex susceptibilities:
//!
//! ```text
//! ξ_a  = Σ_k w_k g13,k² (ω − Δ12,k) / Dk        optical self-response
//! ξ_c  = Σ_k w_k g12,k² (ω + Δ − Δ13,k) / Dk    microwave self-response
//! ξ_ac = Σ_k w_k g12,k g13,k Ω_p,k / Dk         cross (conversion) response
//! Dk   = (ω + Δ − Δ13,k)(ω − Δ12,k) − Ω_p,k²
//! ```
//!
//! with complex detunings Δ1i,k = δ1i,k − iγ1i,k/2. Imaginary parts of
//! ξ_a, ξ_c are center-induced losses; ξ_ac drives the conversion.
//!
//! Summation over classes uses Neumaier-compensated accumulation in a fixed
//! order, so results are deterministic and symmetric class sets cancel to
//! machine precision.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An ordinary-frequency rate in Hz (couplings, linewidths, losses,
/// detunings). Loss and coupling rates are nonnegative; detunings may carry
/// either sign.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rate(pub f64);

impl Rate {
    pub const ZERO: Rate = Rate(0.0);

    pub fn hz(value: f64) -> Self {
        Rate(value)
    }

    pub fn khz(value: f64) -> Self {
        Rate(value * 1e3)
    }

    pub fn mhz(value: f64) -> Self {
        Rate(value * 1e6)
    }

    pub fn ghz(value: f64) -> Self {
        Rate(value * 1e9)
    }

    pub fn thz(value: f64) -> Self {
        Rate(value * 1e12)
    }

    /// Raw value in Hz.
    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    pub(crate) fn require_finite(self, path: &str) -> Result<f64> {
        if self.0.is_finite() {
            Ok(self.0)
        } else {
            Err(Error::domain(path, "must be finite"))
        }
    }

    pub(crate) fn require_nonneg(self, path: &str) -> Result<f64> {
        let v = self.require_finite(path)?;
        if v >= 0.0 {
            Ok(v)
        } else {
            Err(Error::domain(path, format!("must be ≥ 0, got {v}")))
        }
    }

    pub(crate) fn require_pos(self, path: &str) -> Result<f64> {
        let v = self.require_finite(path)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::domain(path, format!("must be > 0, got {v}")))
        }
    }
}

impl From<Rate> for f64 {
    fn from(r: Rate) -> f64 {
        r.0
    }
}

impl std::fmt::Display for Rate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v = self.0;
        let a = v.abs();
        if a >= 1e12 {
            write!(f, "{} THz", v / 1e12)
        } else if a >= 1e9 {
            write!(f, "{} GHz", v / 1e9)
        } else if a >= 1e6 {
            write!(f, "{} MHz", v / 1e6)
        } else if a >= 1e3 {
            write!(f, "{} kHz", v / 1e3)
        } else {
            write!(f, "{v} Hz")
        }
    }
}

/// Complex cavity-center detuning Δ = δ − iγ/2 in Hz. The imaginary part is
/// nonpositive for a physical linewidth, which keeps all response
/// denominators off the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDetuning(pub Complex64);

impl ComplexDetuning {
    #[inline]
    pub fn get(self) -> Complex64 {
        self.0
    }
}

/// Combine a real detuning δ and a decay rate γ into the complex detuning
/// δ − iγ/2 that enters every response denominator.
pub fn complex_detuning(delta: Rate, gamma: Rate) -> Result<ComplexDetuning> {
    let d = delta.require_finite("delta")?;
    let g = gamma.require_pos("gamma")?;
    Ok(ComplexDetuning(Complex64::new(d, -0.5 * g)))
}

/// One homogeneous sub-ensemble of identical centers.
///
/// `weight` is the effective number of centers in the class; it is
/// real-valued so that quadrature nodes from the ensemble module plug in
/// directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterClass {
    /// Optical |1⟩↔|3⟩ center-cavity coupling rate.
    pub g13: Rate,
    /// Microwave |1⟩↔|2⟩ center-cavity coupling rate.
    pub g12: Rate,
    /// Optical decay rate γ13 (> 0).
    pub gamma13: Rate,
    /// Microwave decay rate γ12 (> 0).
    pub gamma12: Rate,
    /// Optical detuning δ13 = ω13 − ω_a of this class from the bare optical
    /// cavity.
    pub delta13: Rate,
    /// Microwave detuning δ12 = ω12 − ω_c of this class from the bare
    /// microwave cavity.
    pub delta12: Rate,
    /// Pump Rabi frequency Ω_p for this class.
    pub omega_p: Rate,
    /// Effective number of centers in this class (≥ 0).
    pub weight: f64,
}

impl CenterClass {
    pub fn validate(&self, path: &str) -> Result<()> {
        self.g13.require_nonneg(&format!("{path}.g13"))?;
        self.g12.require_nonneg(&format!("{path}.g12"))?;
        self.gamma13.require_pos(&format!("{path}.gamma13"))?;
        self.gamma12.require_pos(&format!("{path}.gamma12"))?;
        self.delta13.require_finite(&format!("{path}.delta13"))?;
        self.delta12.require_finite(&format!("{path}.delta12"))?;
        self.omega_p.require_nonneg(&format!("{path}.omega_p"))?;
        if !(self.weight.is_finite() && self.weight >= 0.0) {
            return Err(Error::domain(
                &format!("{path}.weight"),
                format!("must be ≥ 0, got {}", self.weight),
            ));
        }
        Ok(())
    }

    /// Same class with the pump Rabi frequency replaced.
    pub fn with_pump(mut self, omega_p: Rate) -> Self {
        self.omega_p = omega_p;
        self
    }

    /// Complex optical detuning Δ13 = δ13 − iγ13/2.
    pub fn detuning13(&self) -> Complex64 {
        Complex64::new(self.delta13.get(), -0.5 * self.gamma13.get())
    }

    /// Complex microwave detuning Δ12 = δ12 − iγ12/2.
    pub fn detuning12(&self) -> Complex64 {
        Complex64::new(self.delta12.get(), -0.5 * self.gamma12.get())
    }
}

/// A bare cavity mode: absolute frequency plus its reservoir (external) and
/// intrinsic loss rates. Center- and pump-induced contributions are
/// assembled downstream into a [`crate::response::LossBudget`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityMode {
    /// Absolute bare mode frequency in Hz; used only for thermal occupation
    /// and coupling-rate formulas.
    pub omega_bare: Rate,
    /// External (reservoir) coupling rate κ^ex.
    pub kappa_ex: Rate,
    /// Intrinsic loss rate κ^in, not including center or pump-induced
    /// contributions.
    pub kappa_in: Rate,
}

impl CavityMode {
    pub fn validate(&self, path: &str) -> Result<()> {
        self.omega_bare.require_nonneg(&format!("{path}.omega_bare"))?;
        self.kappa_ex.require_nonneg(&format!("{path}.kappa_ex"))?;
        self.kappa_in.require_nonneg(&format!("{path}.kappa_in"))?;
        Ok(())
    }
}

/// Signal and pump placement: photon detunings plus intracavity pump photon
/// number.
///
/// `omega` is the microwave signal offset ω = ω_µ − ω_c from the bare
/// microwave cavity; `delta` is the pump offset Δ = ω_p − (ω_a − ω_c) from
/// the bare cavity difference frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub omega: Rate,
    pub delta: Rate,
    /// Intracavity pump photon number N_p (≥ 0).
    pub n_pump: f64,
}

impl OperatingPoint {
    pub fn new(omega: Rate, delta: Rate, n_pump: f64) -> Self {
        OperatingPoint {
            omega,
            delta,
            n_pump,
        }
    }

    /// Zero-detuning point at a given pump photon number.
    pub fn origin(n_pump: f64) -> Self {
        OperatingPoint::new(Rate::ZERO, Rate::ZERO, n_pump)
    }

    pub fn validate(&self) -> Result<()> {
        self.omega.require_finite("point.omega")?;
        self.delta.require_finite("point.delta")?;
        if !(self.n_pump.is_finite() && self.n_pump >= 0.0) {
            return Err(Error::domain(
                "point.n_pump",
                format!("must be ≥ 0, got {}", self.n_pump),
            ));
        }
        Ok(())
    }
}

/// The three ensemble susceptibilities in Hz at one operating point.
///
/// Passivity: for real (ω, Δ) and all γ > 0, Im ξ_a ≤ 0 and Im ξ_c ≤ 0
/// (centers only add loss). The center-induced loss rates are 2|Im ξ|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilityTriplet {
    pub xi_a: Complex64,
    pub xi_c: Complex64,
    pub xi_ac: Complex64,
}

impl SusceptibilityTriplet {
    pub const ZERO: SusceptibilityTriplet = SusceptibilityTriplet {
        xi_a: Complex64::new(0.0, 0.0),
        xi_c: Complex64::new(0.0, 0.0),
        xi_ac: Complex64::new(0.0, 0.0),
    };

    /// Center-induced optical loss rate 2|Im ξ_a|.
    pub fn kappa_a_center(&self) -> f64 {
        2.0 * self.xi_a.im.abs()
    }

    /// Center-induced microwave loss rate 2|Im ξ_c|.
    pub fn kappa_c_center(&self) -> f64 {
        2.0 * self.xi_c.im.abs()
    }

    /// True if either self-susceptibility has a positive imaginary part
    /// beyond rounding, which would mean the ensemble amplifies instead of
    /// absorbs. Only possible for unphysical inputs.
    pub fn violates_passivity(&self, scale: f64) -> bool {
        let tol = 1e-12 * scale.abs().max(1.0);
        self.xi_a.im > tol || self.xi_c.im > tol
    }
}

/// Neumaier-compensated complex accumulator: deterministic given a fixed
/// summation order, with error independent of the number of terms.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedComplex {
    sum_re: f64,
    sum_im: f64,
    c_re: f64,
    c_im: f64,
}

impl CompensatedComplex {
    #[inline]
    fn add_part(sum: &mut f64, c: &mut f64, x: f64) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *c += (*sum - t) + x;
        } else {
            *c += (x - t) + *sum;
        }
        *sum = t;
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        Self::add_part(&mut self.sum_re, &mut self.c_re, z.re);
        Self::add_part(&mut self.sum_im, &mut self.c_im, z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.sum_re + self.c_re, self.sum_im + self.c_im)
    }
}

/// Response denominator D = (ω + Δ − Δ13)(ω − Δ12) − Ω_p² for one class.
#[inline]
fn class_denominator(class: &CenterClass, omega: f64, delta: f64) -> (Complex64, Complex64, Complex64) {
    let d13 = Complex64::new(omega + delta, 0.0) - class.detuning13();
    let d12 = Complex64::new(omega, 0.0) - class.detuning12();
    let om = class.omega_p.get();
    (d13, d12, d13 * d12 - om * om)
}

/// Ensemble susceptibilities (ξ_a, ξ_c, ξ_ac) for an explicit list of center
/// classes at one operating point.
///
/// Exact complex arithmetic per class, compensated summation over classes;
/// an empty class list returns zeros. Classes with γ ≤ 0 are rejected.
pub fn susceptibilities(
    classes: &[CenterClass],
    point: &OperatingPoint,
) -> Result<SusceptibilityTriplet> {
    point.validate()?;
    let omega = point.omega.get();
    let delta = point.delta.get();

    let mut acc_a = CompensatedComplex::default();
    let mut acc_c = CompensatedComplex::default();
    let mut acc_ac = CompensatedComplex::default();

    for (k, class) in classes.iter().enumerate() {
        class.validate(&format!("classes[{k}]"))?;
        let w = class.weight;
        if w == 0.0 {
            continue;
        }
        let (d13, d12, den) = class_denominator(class, omega, delta);
        if den.norm_sqr() == 0.0 {
            return Err(Error::domain(
                &format!("classes[{k}]"),
                "response denominator vanished (requires γ > 0 and real ω, Δ)",
            ));
        }
        let g13 = class.g13.get();
        let g12 = class.g12.get();
        let om = class.omega_p.get();
        let inv = den.inv();
        acc_a.add(w * g13 * g13 * d12 * inv);
        acc_c.add(w * g12 * g12 * d13 * inv);
        acc_ac.add(w * g12 * g13 * om * inv);
    }

    Ok(SusceptibilityTriplet {
        xi_a: acc_a.value(),
        xi_c: acc_c.value(),
        xi_ac: acc_ac.value(),
    })
}
