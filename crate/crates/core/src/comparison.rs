//! Minimum base-station transmit power to sustain a target spectral
//! efficiency over a direct link, a decode-and-forward relay, or an RIS.
//!
//! Geometry: BS at the origin, RIS (or relay) on the x axis at `d_bs_ris_m`,
//! UE at `(d1, lateral_offset_m)`. Channel gains come from the urban-micro
//! model: NLOS for the direct path, LOS for both hops via the RIS/relay.

use crate::error::{Error, Result};
use crate::propagation::{umi_path_gain, LinkModelParams};
use crate::table::{fmt_sig, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSetup {
    pub params: LinkModelParams,
    pub d_bs_ris_m: f64,
    pub lateral_offset_m: f64,
    pub d1_values: Vec<f64>,
    pub n_values: Vec<u32>,
}

impl ComparisonSetup {
    /// BS-RIS spacing 80 m, 10 m lateral offset, d1 from 20 m to 120 m in 1 m
    /// steps, 25- and 250-element surfaces.
    pub fn new(params: LinkModelParams) -> Self {
        ComparisonSetup {
            params,
            d_bs_ris_m: 80.0,
            lateral_offset_m: 10.0,
            d1_values: crate::step_range(20.0, 120.0, 1.0),
            n_values: vec![25, 250],
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        for (name, v) in [("d_bs_ris", self.d_bs_ris_m), ("lateral_offset", self.lateral_offset_m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `2^R - 1`, the SNR needed for R bit/s/Hz on a single link.
    pub fn snr_target(&self) -> f64 {
        2f64.powf(self.params.rate_bps_per_hz) - 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeDistances {
    pub d_bs_ue: f64,
    pub d_ris_ue: f64,
}

pub fn node_geometry(setup: &ComparisonSetup, d1: f64) -> Result<NodeDistances> {
    if !(d1.is_finite() && d1 > 0.0) {
        return Err(Error::domain(format!("d1 must be positive, got {d1}")));
    }
    Ok(NodeDistances {
        d_bs_ue: d1.hypot(setup.lateral_offset_m),
        d_ris_ue: (d1 - setup.d_bs_ris_m).hypot(setup.lateral_offset_m),
    })
}

/// Channel gains at one UE position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    /// BS-UE, NLOS.
    pub direct: f64,
    /// BS-RIS, LOS.
    pub first_hop: f64,
    /// RIS-UE, LOS.
    pub second_hop: f64,
}

pub fn link_gains(setup: &ComparisonSetup, d1: f64) -> Result<LinkGains> {
    setup.validate()?;
    let nd = node_geometry(setup, d1)?;
    let f = setup.params.frequency_hz;
    Ok(LinkGains {
        direct: umi_path_gain(f, nd.d_bs_ue, false)?,
        first_hop: umi_path_gain(f, setup.d_bs_ris_m, true)?,
        second_hop: umi_path_gain(f, nd.d_ris_ue, true)?,
    })
}

pub fn min_power_siso(setup: &ComparisonSetup, d1: f64) -> Result<f64> {
    let g = link_gains(setup, d1)?;
    Ok(setup.snr_target() * setup.params.noise_power_w() / g.direct)
}

/// Power with an ideally phased `n_elements` RIS adding coherently to the
/// direct path. `n_elements = 0` degenerates to the direct link.
pub fn min_power_ris(setup: &ComparisonSetup, d1: f64, n_elements: u32) -> Result<f64> {
    let g = link_gains(setup, d1)?;
    let amplitude = g.direct.sqrt()
        + n_elements as f64 * setup.params.ris_amplitude * (g.first_hop * g.second_hop).sqrt();
    Ok(setup.snr_target() * setup.params.noise_power_w() / amplitude.powi(2))
}

/// Transmit powers of the two relaying phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayPowers {
    /// BS power in phase one.
    pub source: f64,
    /// Relay power in phase two.
    pub relay: f64,
}

impl RelayPowers {
    /// Average over the two equal-length phases.
    pub fn average(&self) -> f64 {
        0.5 * (self.source + self.relay)
    }
}

/// Half-duplex decode-and-forward: each phase carries the full payload in
/// half the time, so both need SNR `2^(2R) - 1`. The UE combines the direct
/// signal from phase one with the relay's transmission.
pub fn relay_powers(setup: &ComparisonSetup, d1: f64) -> Result<RelayPowers> {
    let g = link_gains(setup, d1)?;
    Ok(relay_powers_for(&g, setup.params.rate_bps_per_hz, setup.params.noise_power_w()))
}

pub fn relay_powers_for(gains: &LinkGains, rate_bps_per_hz: f64, noise_w: f64) -> RelayPowers {
    let snr = 2f64.powf(2.0 * rate_bps_per_hz) - 1.0;
    let source = snr * noise_w / gains.first_hop;
    let relay = (snr * noise_w - source * gains.direct).max(0.0) / gains.second_hop;
    RelayPowers { source, relay }
}

pub fn min_power_relay(setup: &ComparisonSetup, d1: f64) -> Result<f64> {
    relay_powers(setup, d1).map(|p| p.average())
}

/// Spectral efficiency (bit/s/Hz) delivered by each scheme at a given power.
pub mod achievable {
    use super::*;

    pub fn siso(setup: &ComparisonSetup, d1: f64, p: f64) -> Result<f64> {
        let g = link_gains(setup, d1)?;
        Ok((1.0 + p * g.direct / setup.params.noise_power_w()).log2())
    }

    pub fn ris(setup: &ComparisonSetup, d1: f64, n_elements: u32, p: f64) -> Result<f64> {
        let g = link_gains(setup, d1)?;
        let amp = g.direct.sqrt()
            + n_elements as f64 * setup.params.ris_amplitude * (g.first_hop * g.second_hop).sqrt();
        Ok((1.0 + p * amp.powi(2) / setup.params.noise_power_w()).log2())
    }

    pub fn relay(setup: &ComparisonSetup, d1: f64, p: RelayPowers) -> Result<f64> {
        let g = link_gains(setup, d1)?;
        let noise = setup.params.noise_power_w();
        let hop1 = (1.0 + p.source * g.first_hop / noise).log2();
        let combined = (1.0 + (p.source * g.direct + p.relay * g.second_hop) / noise).log2();
        Ok(0.5 * hop1.min(combined))
    }
}

/// Bits delivered per joule: `R B / (P + P_overhead)`.
pub fn energy_efficiency(
    rate_bps_per_hz: f64,
    bandwidth_hz: f64,
    p_watts: f64,
    p_overhead_watts: f64,
) -> Result<f64> {
    let total = p_watts + p_overhead_watts;
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::domain(format!(
            "total consumed power must be positive, got {total} W"
        )));
    }
    Ok(rate_bps_per_hz * bandwidth_hz / total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    pub d1: f64,
    pub p_siso: f64,
    pub p_relay: f64,
    /// One entry per element count in [`PowerTable::n_values`].
    pub p_ris: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerTable {
    pub n_values: Vec<u32>,
    pub rows: Vec<PowerRow>,
}

impl PowerTable {
    /// CSV layout; with `ee_overhead_w` set, energy-efficiency columns are
    /// appended using that static overhead.
    pub fn to_table(&self, params: &LinkModelParams, ee_overhead_w: Option<f64>) -> Result<Table> {
        let mut header = vec!["d1_m".to_string(), "p_siso_w".into(), "p_relay_w".into()];
        header.extend(self.n_values.iter().map(|n| format!("p_ris_n{n}_w")));
        if ee_overhead_w.is_some() {
            header.push("ee_siso_bpj".into());
            header.push("ee_relay_bpj".into());
            header.extend(self.n_values.iter().map(|n| format!("ee_ris_n{n}_bpj")));
        }
        let mut t = Table::new(header);
        for r in &self.rows {
            let powers: Vec<f64> = [r.p_siso, r.p_relay].into_iter().chain(r.p_ris.iter().copied()).collect();
            let mut row = vec![fmt_sig(r.d1)];
            row.extend(powers.iter().map(|p| fmt_sig(*p)));
            if let Some(overhead) = ee_overhead_w {
                for p in &powers {
                    let ee = energy_efficiency(params.rate_bps_per_hz, params.bandwidth_hz, *p, overhead)?;
                    row.push(fmt_sig(ee));
                }
            }
            t.push(row);
        }
        Ok(t)
    }
}

pub fn power_sweep(setup: &ComparisonSetup) -> Result<PowerTable> {
    setup.validate()?;
    let rows = setup
        .d1_values
        .iter()
        .map(|&d1| {
            Ok(PowerRow {
                d1,
                p_siso: min_power_siso(setup, d1)?,
                p_relay: min_power_relay(setup, d1)?,
                p_ris: setup
                    .n_values
                    .iter()
                    .map(|&n| min_power_ris(setup, d1, n))
                    .collect::<Result<Vec<_>>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerTable {
        n_values: setup.n_values.clone(),
        rows,
    })
}
