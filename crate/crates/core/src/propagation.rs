//! Deterministic path-gain models.
//!
//! All gains are linear power ratios (≤ 1 for passive paths); path loss in dB
//! is `-10 log10(gain)`. Distances are meters, angles degrees.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Speed of light. Fixed at 3e8 m/s so that half-wavelength element sizes come
/// out as round numbers (0.025 m at 6 GHz).
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Thermal noise density at room temperature, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

pub const MIN_FREQUENCY_HZ: f64 = 0.5e9;
pub const MAX_FREQUENCY_HZ: f64 = 100.0e9;

/// Lower distance bound of the urban-micro model.
pub const UMI_MIN_DISTANCE_M: f64 = 10.0;

pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Path loss in dB for a linear power gain.
pub fn loss_db(gain: f64) -> f64 {
    -to_db(gain)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    from_db(dbm) * 1e-3
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_frequency(frequency_hz: f64) -> Result<()> {
    if (MIN_FREQUENCY_HZ..=MAX_FREQUENCY_HZ).contains(&frequency_hz) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "frequency {frequency_hz} Hz outside [{MIN_FREQUENCY_HZ}, {MAX_FREQUENCY_HZ}] Hz"
        )))
    }
}

/// Radio and RIS parameters shared by every link-level model.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkModelParams {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    /// Spectral-efficiency target R in bit/s/Hz.
    pub rate_bps_per_hz: f64,
    pub ris_elements: u32,
    /// Element edge length; `None` means half a wavelength.
    pub element_size_m: Option<f64>,
    /// Unit-cell reflection magnitude.
    pub ris_amplitude: f64,
    /// Extra attenuation on a blocked direct path.
    pub blockage_db: f64,
}

impl LinkModelParams {
    /// Parameters at `frequency_hz` with defaults: 10 MHz bandwidth, 10 dB
    /// noise figure, 4 bit/s/Hz, 484 half-wavelength elements, lossless
    /// reflection, 20 dB blockage.
    pub fn new(frequency_hz: f64) -> Result<Self> {
        let p = LinkModelParams {
            frequency_hz,
            bandwidth_hz: 10e6,
            noise_figure_db: 10.0,
            rate_bps_per_hz: 4.0,
            ris_elements: 484,
            element_size_m: None,
            ris_amplitude: 1.0,
            blockage_db: 20.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_frequency(self.frequency_hz)?;
        positive("bandwidth", self.bandwidth_hz)?;
        if !self.noise_figure_db.is_finite() {
            return Err(Error::domain("noise figure must be finite"));
        }
        if !(self.rate_bps_per_hz.is_finite() && self.rate_bps_per_hz >= 0.0) {
            return Err(Error::domain(format!(
                "rate must be non-negative, got {}",
                self.rate_bps_per_hz
            )));
        }
        if self.ris_elements < 1 {
            return Err(Error::domain("an RIS needs at least one element"));
        }
        if let Some(s) = self.element_size_m {
            positive("element size", s)?;
        }
        if !(self.ris_amplitude > 0.0 && self.ris_amplitude <= 1.0) {
            return Err(Error::domain(format!(
                "RIS amplitude must lie in (0, 1], got {}",
                self.ris_amplitude
            )));
        }
        if !(self.blockage_db.is_finite() && self.blockage_db >= 0.0) {
            return Err(Error::domain(format!(
                "blockage must be non-negative, got {} dB",
                self.blockage_db
            )));
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        wavelength(self.frequency_hz)
    }

    pub fn element_size(&self) -> f64 {
        self.element_size_m.unwrap_or(self.wavelength_m() / 2.0)
    }

    /// Physical RIS area `N * s^2`.
    pub fn ris_area(&self) -> f64 {
        self.ris_elements as f64 * self.element_size().powi(2)
    }

    /// `-174 dBm/Hz + 10 log10(B) + NF`.
    pub fn noise_power_dbm(&self) -> f64 {
        THERMAL_NOISE_DBM_PER_HZ + to_db(self.bandwidth_hz) + self.noise_figure_db
    }

    pub fn noise_power_w(&self) -> f64 {
        dbm_to_watts(self.noise_power_dbm())
    }
}

/// Direct (Tx-Rx), incident (Tx-RIS) and reflected (RIS-Rx) path lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGeometry {
    pub rho_d: f64,
    pub rho_t: f64,
    pub rho_r: f64,
}

impl PathGeometry {
    pub fn new(rho_d: f64, rho_t: f64, rho_r: f64) -> Result<Self> {
        positive("rho_d", rho_d)?;
        positive("rho_t", rho_t)?;
        positive("rho_r", rho_r)?;
        Ok(PathGeometry { rho_d, rho_t, rho_r })
    }
}

/// Free-space gain `(λ / 4πd)^2`.
pub fn fspl_gain(wavelength_m: f64, d_m: f64) -> Result<f64> {
    positive("wavelength", wavelength_m)?;
    positive("distance", d_m)?;
    Ok((wavelength_m / (4.0 * PI * d_m)).powi(2))
}

/// 3GPP urban-micro street-canyon path loss in dB with the UE at 1.5 m.
pub fn umi_path_loss_db(frequency_hz: f64, d_m: f64, los: bool) -> Result<f64> {
    check_frequency(frequency_hz)?;
    if !(d_m.is_finite() && d_m >= UMI_MIN_DISTANCE_M) {
        return Err(Error::domain(format!(
            "UMi distance must be at least {UMI_MIN_DISTANCE_M} m, got {d_m}"
        )));
    }
    let f_ghz = frequency_hz / 1e9;
    let pl_los = 32.4 + 21.0 * d_m.log10() + 20.0 * f_ghz.log10();
    if los {
        Ok(pl_los)
    } else {
        let pl_nlos = 22.4 + 35.3 * d_m.log10() + 21.3 * f_ghz.log10();
        Ok(pl_los.max(pl_nlos))
    }
}

pub fn umi_path_gain(frequency_hz: f64, d_m: f64, los: bool) -> Result<f64> {
    umi_path_loss_db(frequency_hz, d_m, los).map(|pl| from_db(-pl))
}

/// Coherent two-ray (direct + ground-reflected) gain over flat ground.
///
/// `d_m` is the horizontal separation; `gamma` the ground reflection
/// coefficient applied to the reflected ray.
pub fn two_ray_gain(
    wavelength_m: f64,
    d_m: f64,
    h_tx_m: f64,
    h_rx_m: f64,
    gamma: Complex64,
) -> Result<f64> {
    positive("wavelength", wavelength_m)?;
    positive("distance", d_m)?;
    positive("tx height", h_tx_m)?;
    positive("rx height", h_rx_m)?;
    let d_los = d_m.hypot(h_tx_m - h_rx_m);
    let d_ref = d_m.hypot(h_tx_m + h_rx_m);
    // d_ref - d_los without cancellation; the common phase e^{-jk d_los} drops out of |.|^2.
    let path_diff = 4.0 * h_tx_m * h_rx_m / (d_ref + d_los);
    let k = 2.0 * PI / wavelength_m;
    let field = Complex64::new(1.0 / d_los, 0.0) + gamma * Complex64::from_polar(1.0 / d_ref, -k * path_diff);
    Ok(field.norm_sqr() * (wavelength_m / (4.0 * PI)).powi(2))
}

/// Fresnel-Kirchhoff diffraction parameter for an edge `h_m` above the
/// line of sight, `d1_m`/`d2_m` from the two terminals.
pub fn fresnel_parameter(wavelength_m: f64, d1_m: f64, d2_m: f64, h_m: f64) -> Result<f64> {
    positive("wavelength", wavelength_m)?;
    positive("d1", d1_m)?;
    positive("d2", d2_m)?;
    if !h_m.is_finite() {
        return Err(Error::domain("edge height must be finite"));
    }
    Ok(h_m * (2.0 * (d1_m + d2_m) / (wavelength_m * d1_m * d2_m)).sqrt())
}

/// Below this Fresnel parameter the edge is considered clear of the path.
pub const KNIFE_EDGE_CLEAR_V: f64 = -0.78;

/// Single knife-edge diffraction loss J(v) in dB.
pub fn knife_edge_loss_from_v(v: f64) -> f64 {
    if v <= KNIFE_EDGE_CLEAR_V {
        return 0.0;
    }
    let x = v - 0.1;
    6.9 + 20.0 * ((x * x + 1.0).sqrt() + x).log10()
}

pub fn knife_edge_loss_db(wavelength_m: f64, d1_m: f64, d2_m: f64, h_m: f64) -> Result<f64> {
    fresnel_parameter(wavelength_m, d1_m, d2_m, h_m).map(knife_edge_loss_from_v)
}

fn check_incidence(name: &str, theta_deg: f64) -> Result<()> {
    if theta_deg.is_finite() && theta_deg.abs() < 90.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must satisfy |θ| < 90°, got {theta_deg}"
        )))
    }
}

/// Gain of the reflected path through a surface of physical area `area_m2`:
/// `α^2 (A cosθi cosθr / (4π ρt ρr))^2`.
pub fn ris_gain_for_area(
    area_m2: f64,
    amplitude: f64,
    rho_t: f64,
    rho_r: f64,
    theta_i_deg: f64,
    theta_r_deg: f64,
) -> Result<f64> {
    positive("RIS area", area_m2)?;
    positive("rho_t", rho_t)?;
    positive("rho_r", rho_r)?;
    check_incidence("incidence angle", theta_i_deg)?;
    check_incidence("reflection angle", theta_r_deg)?;
    let effective = area_m2 * theta_i_deg.to_radians().cos() * theta_r_deg.to_radians().cos();
    Ok(amplitude.powi(2) * (effective / (4.0 * PI * rho_t * rho_r)).powi(2))
}

/// Product-distance gain of the Tx-RIS-Rx path.
pub fn ris_path_gain(
    params: &LinkModelParams,
    geom: &PathGeometry,
    theta_i_deg: f64,
    theta_r_deg: f64,
) -> Result<f64> {
    params.validate()?;
    ris_gain_for_area(
        params.ris_area(),
        params.ris_amplitude,
        geom.rho_t,
        geom.rho_r,
        theta_i_deg,
        theta_r_deg,
    )
}

/// Received power in dBm over the RIS path: `P_tx + G_tx - L_ris`.
pub fn link_budget_chain(
    tx_power_dbm: f64,
    tx_gain_db: f64,
    geom: &PathGeometry,
    params: &LinkModelParams,
    theta_i_deg: f64,
    theta_r_deg: f64,
) -> Result<f64> {
    let gain = ris_path_gain(params, geom, theta_i_deg, theta_r_deg)?;
    Ok(tx_power_dbm + tx_gain_db + to_db(gain))
}
