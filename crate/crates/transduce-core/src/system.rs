//! Full converter description and the one-call response evaluation used by
//! sweeps, design solves, and the command-line tools.

use serde::{Deserialize, Serialize};

use crate::budget::{assemble_budget, pump_rabi_from_dipole, GeometrySpec, OpticalPumpLoss,
    SuperconductorSpec};
use crate::ensemble::EnsembleSpec;
use crate::model::{susceptibilities, CavityMode, CenterClass, OperatingPoint, Rate};
use crate::response::{
    added_noise, cooperativity, efficiency, efficiency_decomposition, thermal_occupation,
    ResponseReport,
};
use crate::{Error, Result};

/// How the pump Rabi frequency follows the intracavity photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PumpCoupling {
    /// Ω_p fixed regardless of N_p.
    Fixed { omega_p: Rate },
    /// √N_p scaling through a calibration pair (N_p^ref → Ω_p^ref).
    Calibrated { omega_p_ref: Rate, n_p_ref: f64 },
    /// Ω_p from the pump transition dipole and the mode geometry.
    FromDipole { d23: f64 },
    /// Use the per-class Ω_p values already present in the ensemble.
    PerClass,
}

/// Pump drive description. `frequency` is the absolute pump frequency,
/// used for photon energies (leakage power); the detuning Δ lives in
/// [`OperatingPoint`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSpec {
    pub frequency: Rate,
    pub coupling: PumpCoupling,
}

impl PumpSpec {
    /// Pump Rabi frequency at `n_pump` intracavity photons; `None` when the
    /// ensemble's per-class values are authoritative.
    pub fn rabi(&self, n_pump: f64, geometry: Option<&GeometrySpec>) -> Result<Option<Rate>> {
        match self.coupling {
            PumpCoupling::Fixed { omega_p } => Ok(Some(omega_p)),
            PumpCoupling::Calibrated {
                omega_p_ref,
                n_p_ref,
            } => {
                if !(n_p_ref.is_finite() && n_p_ref > 0.0) {
                    return Err(Error::domain("pump.n_p_ref", "must be > 0"));
                }
                let omega = omega_p_ref.require_nonneg("pump.omega_p_ref")?;
                Ok(Some(Rate::hz(omega * (n_pump / n_p_ref).sqrt())))
            }
            PumpCoupling::FromDipole { d23 } => {
                let geometry = geometry.ok_or_else(|| {
                    Error::Config("pump coupling from dipole requires a geometry block".into())
                })?;
                Ok(Some(pump_rabi_from_dipole(
                    d23,
                    geometry,
                    self.frequency,
                    n_pump,
                )?))
            }
            PumpCoupling::PerClass => Ok(None),
        }
    }
}

/// Everything needed to evaluate the converter at an operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub ensemble: EnsembleSpec,
    /// Optical signal mode (a).
    pub cavity_a: CavityMode,
    /// Microwave mode (c).
    pub cavity_c: CavityMode,
    pub pump: PumpSpec,
    /// Microwave bath temperature, K.
    pub bath_temperature: f64,
    #[serde(default)]
    pub optical_pump_loss: OpticalPumpLoss,
    #[serde(default)]
    pub superconductor: Option<SuperconductorSpec>,
    #[serde(default)]
    pub geometry: Option<GeometrySpec>,
}

impl SystemSpec {
    pub fn validate(&self) -> Result<()> {
        self.cavity_a.validate("cavity_a")?;
        self.cavity_c.validate("cavity_c")?;
        self.pump.frequency.require_nonneg("pump.frequency")?;
        if !(self.bath_temperature.is_finite() && self.bath_temperature > 0.0) {
            return Err(Error::domain("bath_temperature", "must be > 0"));
        }
        self.optical_pump_loss.validate()?;
        if let Some(sc) = &self.superconductor {
            sc.validate()?;
        }
        if let Some(geometry) = &self.geometry {
            geometry.validate()?;
        }
        Ok(())
    }

    /// Materialize the center classes at the pump strength of `point`.
    pub fn classes_at(&self, point: &OperatingPoint) -> Result<Vec<CenterClass>> {
        let rabi = self.pump.rabi(point.n_pump, self.geometry.as_ref())?;
        let mut classes = match (&self.ensemble, rabi) {
            (EnsembleSpec::Gaussian(spec), Some(omega_p)) => {
                let mut spec = *spec;
                spec.base.omega_p = omega_p;
                crate::ensemble::discretize(&spec)?
            }
            (EnsembleSpec::Gaussian(spec), None) => crate::ensemble::discretize(spec)?,
            (other, rabi) => {
                let mut classes = other.classes()?;
                if let Some(omega_p) = rabi {
                    for class in &mut classes {
                        class.omega_p = omega_p;
                    }
                }
                classes
            }
        };
        classes.retain(|c| c.weight > 0.0);
        Ok(classes)
    }

    /// Total effective center number.
    pub fn n_total(&self) -> f64 {
        self.ensemble.n_total()
    }

    /// Replace the ensemble total, keeping everything else.
    pub fn with_n_total(mut self, n_total: f64) -> Self {
        match &mut self.ensemble {
            EnsembleSpec::Gaussian(spec) => spec.n_total = n_total,
            EnsembleSpec::Explicit(classes) => {
                let current: f64 = classes.iter().map(|c| c.weight).sum();
                if current > 0.0 {
                    let scale = n_total / current;
                    for class in classes {
                        class.weight *= scale;
                    }
                }
            }
        }
        self
    }

    /// Thermal occupation of the microwave bath at the bare mode frequency.
    pub fn thermal_occupation(&self) -> Result<f64> {
        thermal_occupation(self.cavity_c.omega_bare, self.bath_temperature)
    }

    /// Evaluate the full response at one operating point.
    pub fn respond(&self, point: &OperatingPoint) -> Result<ResponseReport> {
        let classes = self.classes_at(point)?;
        self.respond_with_classes(&classes, point)
    }

    /// Evaluate with a pre-materialized class list (sweeps discretize once).
    pub fn respond_with_classes(
        &self,
        classes: &[CenterClass],
        point: &OperatingPoint,
    ) -> Result<ResponseReport> {
        self.validate()?;
        let xi = susceptibilities(classes, point)?;
        let budget = assemble_budget(self, point, &xi)?;

        let eta_total = efficiency(&xi, budget.bare_a(), budget.bare_c(), point)?;
        let coop = cooperativity(
            xi.xi_ac,
            Rate::hz(budget.kappa_a_total),
            Rate::hz(budget.kappa_c_total),
        )?;
        let decomposition = efficiency_decomposition(
            coop,
            Rate::hz(budget.kappa_a_ex),
            Rate::hz(budget.kappa_a_total),
            Rate::hz(budget.kappa_c_ex),
            Rate::hz(budget.kappa_c_total),
        )?;
        let n_th = self.thermal_occupation()?;
        let (n_mo, n_om) = added_noise(
            &xi,
            budget.bare_a(),
            Rate::hz(budget.kappa_c_ex),
            Rate::hz(budget.kappa_c_intrinsic()),
            point,
            n_th,
        )?;

        Ok(ResponseReport {
            xi,
            cooperativity: coop,
            eta_total,
            eta_internal: decomposition.eta_internal,
            eta_a: decomposition.eta_a,
            eta_c: decomposition.eta_c,
            n_mo,
            n_om,
            budget,
        })
    }
}
