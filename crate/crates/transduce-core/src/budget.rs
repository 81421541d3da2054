//! Coupling rates from physical dipoles and mode geometry, and the
//! pump-dependent loss budget: pump leakage into the superconductor,
//! quasiparticle-induced microwave loss, center-induced losses, and a
//! pluggable nonlinear optical loss.
//!
//! The quasiparticle chain: a fraction of the intracavity pump leaks into
//! the superconducting resonator at rate κ_b^SC (exponentially suppressed
//! with the optical–microwave separation d_om), depositing power
//! P_l = ħω_p N_p κ_b^SC that breaks Cooper pairs. The resulting density
//! n_QP sets the microwave loss
//!
//! ```text
//! κ_c^QP = ω_c (α_ki/π) (n_QP/(n₀ Δ_s)) √(2Δ_s/ħω_c) f(T)
//! ```
//!
//! The supplied steady-state n_QP model is a standard
//! generation–recombination balance with thermal background,
//! n_QP = √(n_th² + η_pb P_l/(Δ_s V_m R_rec)); it is a substitute for the
//! full film heat-flow treatment and is validated for shape/monotonicity
//! only. Its parameters are exposed so it can be calibrated against a
//! device.

use serde::{Deserialize, Serialize};

use crate::constants::{angular, photon_energy, BOLTZMANN, EPSILON_0, HBAR, MU_0};
use crate::model::{Rate, SusceptibilityTriplet};
use crate::response::LossBudget;
use crate::{Error, Result};

/// Cavity-mode geometry. Volumes in µm³, lengths in µm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    /// Optical (nonlinear-medium) mode volume V_o, µm³.
    pub v_optical: f64,
    /// Microwave inductive-line volume V_m, µm³.
    pub v_microwave: f64,
    /// Filling factors of the optical signal, pump, and microwave modes.
    pub fill_a: f64,
    pub fill_b: f64,
    pub fill_c: f64,
    /// Optical–microwave separation d_om, µm.
    pub d_om: f64,
    /// Relative permittivity of the host.
    pub eps_r: f64,
}

impl GeometrySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_optical.is_finite() && self.v_optical > 0.0) {
            return Err(Error::domain("geometry.v_optical", "must be > 0"));
        }
        if !(self.v_microwave.is_finite() && self.v_microwave > 0.0) {
            return Err(Error::domain("geometry.v_microwave", "must be > 0"));
        }
        for (name, f) in [
            ("fill_a", self.fill_a),
            ("fill_b", self.fill_b),
            ("fill_c", self.fill_c),
        ] {
            if !(f.is_finite() && (0.0..=1.0).contains(&f)) {
                return Err(Error::domain(
                    &format!("geometry.{name}"),
                    format!("filling factor must lie in [0, 1], got {f}"),
                ));
            }
        }
        if !(self.d_om.is_finite() && self.d_om >= 0.0) {
            return Err(Error::domain("geometry.d_om", "must be ≥ 0"));
        }
        if !(self.eps_r.is_finite() && self.eps_r >= 1.0) {
            return Err(Error::domain("geometry.eps_r", "must be ≥ 1"));
        }
        Ok(())
    }

    /// Composite filling factor √(F_a F_b F_c) for spatially uniform
    /// bosonic fields.
    pub fn fill_abc(&self) -> f64 {
        (self.fill_a * self.fill_b * self.fill_c).sqrt()
    }
}

/// Center dipole moments: electric dipoles in C·m, magnetic dipole in J/T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleSpec {
    /// |1⟩↔|3⟩ optical signal transition dipole.
    pub d13: f64,
    /// |2⟩↔|3⟩ pump transition dipole.
    pub d23: f64,
    /// |1⟩↔|2⟩ spin transition magnetic dipole.
    pub mu12: f64,
}

impl DipoleSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("d13", self.d13), ("d23", self.d23), ("mu12", self.mu12)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::domain(
                    &format!("dipoles.{name}"),
                    format!("must be ≥ 0, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// Quasiparticle-density models. Identified by name in configuration;
/// unknown identifiers are configuration errors at parse time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QpModel {
    /// Thermal quasiparticles only; ignores the pump.
    Thermal,
    /// Steady-state generation–recombination balance on top of the thermal
    /// background. `eta_pb` is the pair-breaking efficiency, `r_rec` the
    /// recombination constant in µm³/s, `v_m` the absorbing superconductor
    /// volume in µm³.
    SteadyState { eta_pb: f64, r_rec: f64, v_m: f64 },
}

/// Temperature factor f(T) in the quasiparticle loss formula. Approaches 1
/// for k_B T ≪ ħω_c, which is the default; the hook accepts alternatives.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TemperatureFactor {
    #[default]
    Unity,
}

impl TemperatureFactor {
    pub fn evaluate(&self, _omega_c: Rate, _temperature: f64) -> f64 {
        match self {
            TemperatureFactor::Unity => 1.0,
        }
    }
}

/// Superconducting resonator description for the quasiparticle loss chain.
/// Energies in joules, densities of states per joule per µm³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperconductorSpec {
    /// Kinetic inductance ratio α_ki ∈ [0, 1].
    pub alpha_ki: f64,
    /// Single-spin density of states at the Fermi level, 1/(J·µm³).
    pub n0: f64,
    /// Superconducting gap Δ_s, J.
    pub gap: f64,
    /// Pump loss rate into the superconductor κ_b^SC, Hz.
    pub kappa_b_sc: Rate,
    /// Film temperature, K.
    pub temperature: f64,
    pub qp_model: QpModel,
    #[serde(default)]
    pub temperature_factor: TemperatureFactor,
}

impl SuperconductorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_ki.is_finite() && (0.0..=1.0).contains(&self.alpha_ki)) {
            return Err(Error::domain("superconductor.alpha_ki", "must lie in [0, 1]"));
        }
        if !(self.n0.is_finite() && self.n0 > 0.0) {
            return Err(Error::domain("superconductor.n0", "must be > 0"));
        }
        if !(self.gap.is_finite() && self.gap > 0.0) {
            return Err(Error::domain("superconductor.gap", "must be > 0"));
        }
        self.kappa_b_sc.require_nonneg("superconductor.kappa_b_sc")?;
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::domain("superconductor.temperature", "must be ≥ 0"));
        }
        match self.qp_model {
            QpModel::Thermal => {}
            QpModel::SteadyState { eta_pb, r_rec, v_m } => {
                if !(eta_pb.is_finite() && (0.0..=1.0).contains(&eta_pb)) {
                    return Err(Error::domain("qp_model.eta_pb", "must lie in [0, 1]"));
                }
                if !(r_rec.is_finite() && r_rec > 0.0) {
                    return Err(Error::domain("qp_model.r_rec", "must be > 0"));
                }
                if !(v_m.is_finite() && v_m > 0.0) {
                    return Err(Error::domain("qp_model.v_m", "must be > 0"));
                }
            }
        }
        Ok(())
    }

    /// Thermal quasiparticle density n_th(T) = 2n₀√(2πk_BTΔ_s)·e^{−Δ_s/k_BT},
    /// in µm⁻³.
    pub fn thermal_qp_density(&self) -> f64 {
        if self.temperature == 0.0 {
            return 0.0;
        }
        let kt = BOLTZMANN * self.temperature;
        2.0 * self.n0 * (2.0 * std::f64::consts::PI * kt * self.gap).sqrt() * (-self.gap / kt).exp()
    }

    /// Quasiparticle density under pump leakage power `p_leak` (W), µm⁻³.
    pub fn qp_density(&self, p_leak: f64) -> f64 {
        let n_th = self.thermal_qp_density();
        match self.qp_model {
            QpModel::Thermal => n_th,
            QpModel::SteadyState { eta_pb, r_rec, v_m } => {
                let generation = eta_pb * p_leak / (self.gap * v_m); // µm⁻³ s⁻¹
                (n_th * n_th + generation / r_rec).sqrt()
            }
        }
    }
}

/// Exponential fit κ^SC(d_om) = κ₀·exp(−d_om/λ_ev) for the evanescent pump
/// loss into the superconductor, with the fitted d_om range recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvanescentLossFit {
    /// Rate at d_om = 0, Hz.
    pub kappa0: Rate,
    /// Evanescent decay length λ_ev, µm.
    pub lambda_ev: f64,
    /// Fitted range of d_om, µm.
    pub fitted_range: (f64, f64),
}

impl EvanescentLossFit {
    /// Default fit spanning ten decades over d_om = 0.2 … 1.4 µm, anchored
    /// so that κ^SC(1.4 µm) = 300 Hz: λ_ev = 1.2/(10·ln 10) µm.
    pub fn default_ten_decades() -> Self {
        let lambda_ev = 1.2 / (10.0 * std::f64::consts::LN_10);
        EvanescentLossFit {
            kappa0: Rate::hz(300.0 * (1.4 / lambda_ev).exp()),
            lambda_ev,
            fitted_range: (0.2, 1.4),
        }
    }
}

/// Optical and microwave center-cavity coupling rates derived from dipoles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingRates {
    pub g13: Rate,
    pub g12: Rate,
}

/// Vacuum coupling rates from calibrated dipoles and the mode geometry:
///
/// ```text
/// ħg13 = d13 √(ħω_a F_a/(ε₀ε_r V_o)),   ħg12 = µ12 √(ħω_c F_c µ₀/V_o)
/// ```
///
/// `f_optical`/`f_microwave` are absolute ordinary frequencies in Hz;
/// results come back in ordinary Hz.
pub fn coupling_from_dipole(
    dipoles: &DipoleSpec,
    geometry: &GeometrySpec,
    f_optical: Rate,
    f_microwave: Rate,
) -> Result<CouplingRates> {
    dipoles.validate()?;
    geometry.validate()?;
    let fa = f_optical.require_pos("f_optical")?;
    let fc = f_microwave.require_pos("f_microwave")?;
    let v_o = geometry.v_optical * 1e-18; // µm³ → m³
    let g13_angular = dipoles.d13 / HBAR
        * (HBAR * angular(fa) * geometry.fill_a / (EPSILON_0 * geometry.eps_r * v_o)).sqrt();
    let g12_angular =
        dipoles.mu12 / HBAR * (HBAR * angular(fc) * geometry.fill_c * MU_0 / v_o).sqrt();
    Ok(CouplingRates {
        g13: Rate::hz(g13_angular / std::f64::consts::TAU),
        g12: Rate::hz(g12_angular / std::f64::consts::TAU),
    })
}

/// Pump Rabi frequency from the pump dipole:
/// ħΩ_p = d23 √(ħω_p N_p F_b/(ε₀ε_r V_o)); scales exactly as √N_p.
pub fn pump_rabi_from_dipole(
    d23: f64,
    geometry: &GeometrySpec,
    f_pump: Rate,
    n_pump: f64,
) -> Result<Rate> {
    geometry.validate()?;
    let fp = f_pump.require_pos("f_pump")?;
    if !(d23.is_finite() && d23 >= 0.0) {
        return Err(Error::domain("dipoles.d23", "must be ≥ 0"));
    }
    if !(n_pump.is_finite() && n_pump >= 0.0) {
        return Err(Error::domain("n_pump", "must be ≥ 0"));
    }
    let v_o = geometry.v_optical * 1e-18;
    let omega_angular = d23 / HBAR
        * (HBAR * angular(fp) * n_pump * geometry.fill_b / (EPSILON_0 * geometry.eps_r * v_o))
            .sqrt();
    Ok(Rate::hz(omega_angular / std::f64::consts::TAU))
}

/// Invert the coupling formula: the d13 that produces a target g13 in the
/// given geometry.
pub fn dipole_for_coupling(
    g13_target: Rate,
    geometry: &GeometrySpec,
    f_optical: Rate,
) -> Result<f64> {
    geometry.validate()?;
    let g = g13_target.require_pos("g13")?;
    let fa = f_optical.require_pos("f_optical")?;
    let v_o = geometry.v_optical * 1e-18;
    Ok(angular(g) * HBAR
        / (HBAR * angular(fa) * geometry.fill_a / (EPSILON_0 * geometry.eps_r * v_o)).sqrt())
}

/// Pump power leaked into the superconductor: P_l = ħω_p N_p κ_b^SC, W.
/// `f_pump` is the absolute pump frequency in Hz.
pub fn pump_leakage(n_pump: f64, f_pump: Rate, kappa_b_sc: Rate) -> Result<f64> {
    if !(n_pump.is_finite() && n_pump >= 0.0) {
        return Err(Error::domain("n_pump", "must be ≥ 0"));
    }
    let fp = f_pump.require_nonneg("f_pump")?;
    let kb = kappa_b_sc.require_nonneg("kappa_b_sc")?;
    Ok(photon_energy(fp) * n_pump * kb)
}

/// Quasiparticle-induced microwave loss κ_c^QP at absolute mode frequency
/// `f_microwave`, for leaked pump power `p_leak` (W). Ordinary Hz out.
pub fn qp_loss(sc: &SuperconductorSpec, f_microwave: Rate, p_leak: f64) -> Result<Rate> {
    sc.validate()?;
    let fc = f_microwave.require_pos("f_microwave")?;
    if !(p_leak.is_finite() && p_leak >= 0.0) {
        return Err(Error::domain("p_leak", "must be ≥ 0"));
    }
    let n_qp = sc.qp_density(p_leak); // µm⁻³
    let n0_per_volume = sc.n0 * sc.gap; // µm⁻³ (states within the gap scale)
    let f_t = sc.temperature_factor.evaluate(f_microwave, sc.temperature);
    let rate = fc * (sc.alpha_ki / std::f64::consts::PI) * (n_qp / n0_per_volume)
        * (2.0 * sc.gap / (HBAR * angular(fc))).sqrt()
        * f_t;
    Ok(Rate::hz(rate))
}

/// Warning attached to an evanescent-fit evaluation outside its fitted
/// range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeWarning {
    pub d_om: f64,
    pub fitted_range: (f64, f64),
}

/// Evanescent pump loss κ^SC(d_om) = κ₀ e^{−d_om/λ_ev}; extrapolation
/// outside the fitted range is allowed but flagged.
pub fn evanescent_pump_loss(
    d_om: f64,
    fit: &EvanescentLossFit,
) -> Result<(Rate, Option<RangeWarning>)> {
    if !(d_om.is_finite() && d_om >= 0.0) {
        return Err(Error::domain("d_om", "must be ≥ 0"));
    }
    let k0 = fit.kappa0.require_nonneg("evanescent.kappa0")?;
    if !(fit.lambda_ev.is_finite() && fit.lambda_ev > 0.0) {
        return Err(Error::domain("evanescent.lambda_ev", "must be > 0"));
    }
    let rate = Rate::hz(k0 * (-d_om / fit.lambda_ev).exp());
    let warning = if d_om < fit.fitted_range.0 || d_om > fit.fitted_range.1 {
        Some(RangeWarning {
            d_om,
            fitted_range: fit.fitted_range,
        })
    } else {
        None
    };
    Ok((rate, warning))
}

/// Pump-dependent intrinsic optical loss κ_a^in(N_p) = κ_a^in + c1·N_p +
/// c2·N_p². Stands in for two-photon and free-carrier absorption; both
/// coefficients default to zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OpticalPumpLoss {
    /// Hz per pump photon.
    pub c1: f64,
    /// Hz per pump photon squared.
    pub c2: f64,
}

impl OpticalPumpLoss {
    pub fn extra_loss(&self, n_pump: f64) -> f64 {
        self.c1 * n_pump + self.c2 * n_pump * n_pump
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c1.is_finite() && self.c1 >= 0.0 && self.c2.is_finite() && self.c2 >= 0.0) {
            return Err(Error::domain("optical_pump_loss", "coefficients must be ≥ 0"));
        }
        Ok(())
    }
}

/// Strong-pump approximations to the center-induced losses at zero
/// detunings: κ_a^center ≈ N_A g13²γ12/Ω_p², κ_c^center ≈ N_A g12²γ13/Ω_p².
/// Good to 5% whenever Ω_p² > 100·γ12γ13.
pub fn strong_pump_center_losses(
    n_total: f64,
    g13: Rate,
    g12: Rate,
    gamma13: Rate,
    gamma12: Rate,
    omega_p: Rate,
) -> Result<(f64, f64)> {
    let om = omega_p.require_pos("omega_p")?;
    let om2 = om * om;
    Ok((
        n_total * g13.get().powi(2) * gamma12.get() / om2,
        n_total * g12.get().powi(2) * gamma13.get() / om2,
    ))
}

/// Assemble the itemized loss budget for a system at one operating point,
/// given the already-evaluated susceptibilities.
pub fn assemble_budget(
    system: &crate::system::SystemSpec,
    point: &crate::model::OperatingPoint,
    xi: &SusceptibilityTriplet,
) -> Result<LossBudget> {
    system.validate()?;
    point.validate()?;
    let kappa_a_in =
        system.cavity_a.kappa_in.get() + system.optical_pump_loss.extra_loss(point.n_pump);
    let kappa_c_qp = match &system.superconductor {
        None => 0.0,
        Some(sc) => {
            let p_leak = pump_leakage(point.n_pump, system.pump.frequency, sc.kappa_b_sc)?;
            qp_loss(sc, system.cavity_c.omega_bare, p_leak)?.get()
        }
    };
    let budget = LossBudget::assemble(
        system.cavity_a.kappa_ex.get(),
        kappa_a_in,
        system.cavity_c.kappa_ex.get(),
        system.cavity_c.kappa_in.get(),
        kappa_c_qp,
        xi,
    );
    budget.validate()?;
    Ok(budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn geometry() -> GeometrySpec {
        GeometrySpec {
            v_optical: 1100.0 * 1.3 * 1.2,
            v_microwave: 1000.0 * 2.0 * 0.02,
            fill_a: 0.4,
            fill_b: 0.35,
            fill_c: 0.5,
            d_om: 0.7,
            eps_r: 11.7,
        }
    }

    fn niobium(qp_model: QpModel) -> SuperconductorSpec {
        SuperconductorSpec {
            alpha_ki: 0.1,
            n0: 8.3e10 / crate::constants::ELECTRONVOLT,
            gap: 1.55e-3 * crate::constants::ELECTRONVOLT,
            kappa_b_sc: Rate::hz(300.0),
            temperature: 0.02,
            qp_model,
            temperature_factor: TemperatureFactor::Unity,
        }
    }

    #[test]
    fn pump_rabi_sqrt_scaling() {
        let g = geometry();
        let d23 = 1e-30;
        let lo = pump_rabi_from_dipole(d23, &g, Rate::thz(230.6), 50.0).unwrap();
        let hi = pump_rabi_from_dipole(d23, &g, Rate::thz(230.6), 200.0).unwrap();
        assert_relative_eq!(hi.get(), 2.0 * lo.get(), max_relative = 1e-12);
    }

    #[test]
    fn dipole_coupling_round_trip() {
        let g = geometry();
        let d13 = dipole_for_coupling(Rate::mhz(2.0), &g, Rate::thz(230.6)).unwrap();
        let back = coupling_from_dipole(
            &DipoleSpec {
                d13,
                d23: 0.0,
                mu12: 0.0,
            },
            &g,
            Rate::thz(230.6),
            Rate::ghz(5.0),
        )
        .unwrap();
        assert_relative_eq!(back.g13.get(), 2.0e6, max_relative = 1e-12);
    }

    #[test]
    fn calibrated_pump_extrapolation() {
        // (N_p = 50 → Ω_p = 4 MHz) predicts Ω_p(N_p = 50 000) = 4 MHz·√1000.
        let scaled = 4.0e6 * (50_000.0_f64 / 50.0).sqrt();
        assert_relative_eq!(scaled, 126.49e6, max_relative = 1e-4);
    }

    #[test]
    fn pump_leakage_arithmetic() {
        assert_eq!(pump_leakage(0.0, Rate::thz(230.6), Rate::hz(300.0)).unwrap(), 0.0);
        // ħω_p N_p κ: photon energy at 230.6 THz times 1e4 times 300 Hz.
        let p = pump_leakage(1e4, Rate::thz(230.6), Rate::hz(300.0)).unwrap();
        let expect = crate::constants::photon_energy(230.6e12) * 1e4 * 300.0;
        assert_relative_eq!(p, expect, max_relative = 1e-15);
        assert_relative_eq!(p, 4.584e-13, max_relative = 1e-3);
        let p2 = pump_leakage(2e4, Rate::thz(230.6), Rate::hz(300.0)).unwrap();
        assert_relative_eq!(p2, 2.0 * p, max_relative = 1e-15);
    }

    #[test]
    fn qp_loss_limits_and_linearity() {
        // No pump leakage and a frozen film: no quasiparticles, no loss.
        let mut sc = niobium(QpModel::SteadyState {
            eta_pb: 0.57,
            r_rec: 80.0,
            v_m: 40.0,
        });
        sc.temperature = 1e-4;
        let k = qp_loss(&sc, Rate::ghz(5.0), 0.0).unwrap();
        assert!(k.get() < 1e-30, "κ_c^QP = {}", k.get());

        // Linearity in n_QP: quadrupling the leaked power doubles n_QP in
        // the recombination-limited regime, hence doubles κ_c^QP.
        let k1 = qp_loss(&sc, Rate::ghz(5.0), 1e-15).unwrap();
        let k4 = qp_loss(&sc, Rate::ghz(5.0), 4e-15).unwrap();
        assert_relative_eq!(k4.get(), 2.0 * k1.get(), max_relative = 1e-9);
    }

    #[test]
    fn qp_loss_smaller_volume_is_lossier() {
        let small = niobium(QpModel::SteadyState {
            eta_pb: 0.57,
            r_rec: 80.0,
            v_m: 10.0,
        });
        let large = niobium(QpModel::SteadyState {
            eta_pb: 0.57,
            r_rec: 80.0,
            v_m: 160.0,
        });
        let p = 1e-14;
        let ks = qp_loss(&small, Rate::ghz(5.0), p).unwrap();
        let kl = qp_loss(&large, Rate::ghz(5.0), p).unwrap();
        assert!(ks.get() > kl.get());
    }

    #[test]
    fn qp_loss_monotone_in_pump() {
        let sc = niobium(QpModel::SteadyState {
            eta_pb: 0.57,
            r_rec: 80.0,
            v_m: 40.0,
        });
        let mut last = -1.0;
        for p in [0.0, 1e-16, 1e-15, 1e-14, 1e-13] {
            let k = qp_loss(&sc, Rate::ghz(5.0), p).unwrap().get();
            assert!(k >= last);
            last = k;
        }
    }

    #[test]
    fn unknown_qp_model_is_a_config_error_at_parse_time() {
        let text = r#"{"kind": "nonequilibrium_florescence"}"#;
        let parsed: std::result::Result<QpModel, _> = serde_json::from_str(text);
        assert!(parsed.is_err());
    }

    #[test]
    fn evanescent_fit_decade_span() {
        let fit = EvanescentLossFit::default_ten_decades();
        assert_relative_eq!(fit.lambda_ev, 0.052115, max_relative = 1e-4);
        let (k02, _) = evanescent_pump_loss(0.2, &fit).unwrap();
        let (k14, _) = evanescent_pump_loss(1.4, &fit).unwrap();
        assert_relative_eq!(k02.get() / k14.get(), 1e10, max_relative = 1e-9);
        assert_relative_eq!(k14.get(), 300.0, max_relative = 1e-9);

        let (k04, w04) = evanescent_pump_loss(0.4, &fit).unwrap();
        let (k08, _) = evanescent_pump_loss(0.8, &fit).unwrap();
        assert!(w04.is_none());
        assert_relative_eq!(
            k04.get() / k08.get(),
            (0.4 / fit.lambda_ev).exp(),
            max_relative = 1e-9
        );
        let (_, warn) = evanescent_pump_loss(1.7, &fit).unwrap();
        assert!(warn.is_some());
    }

    #[test]
    fn strong_pump_center_loss_values() {
        // N_A g13² γ12/Ω_p² = 0.25 MHz and N_A g12² γ13/Ω_p² = 100 Hz for
        // the strong-pump reference values; both far below the respective
        // reservoir couplings (2 GHz, 0.8 MHz).
        let (ka, kc) = strong_pump_center_losses(
            1e6,
            Rate::mhz(2.0),
            Rate::hz(40.0),
            Rate::mhz(1.0),
            Rate::hz(1.0),
            Rate::mhz(4.0),
        )
        .unwrap();
        assert_relative_eq!(ka, 0.25e6, max_relative = 1e-12);
        assert_relative_eq!(kc, 100.0, max_relative = 1e-12);
        assert!(ka < 0.01 * 2e9);
        assert!(kc < 0.01 * 0.8e6);
    }

}
