//! RIS sizing: the area and element count at which the reflected path
//! matches the unobstructed direct path, and distance sweeps of path loss
//! and required size.

use crate::error::{Error, Result};
use crate::propagation::{fspl_gain, loss_db, ris_gain_for_area, LinkModelParams, PathGeometry};
use crate::table::{fmt_sig, Table};

/// How the Tx-RIS and RIS-Rx distances follow the swept distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometryMode {
    /// Tx-RIS distance held fixed; the sweep moves the receiver.
    FixedRhoT(f64),
    /// Both hops equal the swept distance.
    Symmetric,
}

/// Rule for the direct Tx-Rx distance given both hop lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhoDRule {
    /// Hops meet at a right angle at the RIS: `ρd = √(ρt² + ρr²)`.
    #[default]
    RightAngle,
    /// RIS on the Tx-Rx line: `ρd = ρt + ρr`.
    Collinear,
}

impl RhoDRule {
    pub fn rho_d(self, rho_t: f64, rho_r: f64) -> f64 {
        match self {
            RhoDRule::RightAngle => rho_t.hypot(rho_r),
            RhoDRule::Collinear => rho_t + rho_r,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensioningQuery {
    pub params: LinkModelParams,
    pub mode: GeometryMode,
    pub rho_d_rule: RhoDRule,
}

impl DimensioningQuery {
    pub fn new(params: LinkModelParams, mode: GeometryMode) -> Self {
        DimensioningQuery {
            params,
            mode,
            rho_d_rule: RhoDRule::default(),
        }
    }

    /// Path lengths at swept distance `distance`.
    pub fn geometry(&self, distance: f64) -> Result<PathGeometry> {
        let (rho_t, rho_r) = match self.mode {
            GeometryMode::FixedRhoT(rho_t) => (rho_t, distance),
            GeometryMode::Symmetric => (distance, distance),
        };
        PathGeometry::new(self.rho_d_rule.rho_d(rho_t, rho_r), rho_t, rho_r)
    }
}

fn check_distances(rho_t: f64, rho_r: f64, rho_d: f64) -> Result<()> {
    PathGeometry::new(rho_d, rho_t, rho_r).map(|_| ())
}

/// Minimum area `λ ρt ρr / ρd` for which the reflected path is as strong as
/// the free direct path.
pub fn required_area(wavelength_m: f64, rho_t: f64, rho_r: f64, rho_d: f64) -> Result<f64> {
    check_distances(rho_t, rho_r, rho_d)?;
    if !(wavelength_m.is_finite() && wavelength_m > 0.0) {
        return Err(Error::domain(format!("wavelength must be positive, got {wavelength_m}")));
    }
    Ok(wavelength_m * rho_t * rho_r / rho_d)
}

/// Edge length of the square surface of [`required_area`].
pub fn required_length(wavelength_m: f64, rho_t: f64, rho_r: f64, rho_d: f64) -> Result<f64> {
    required_area(wavelength_m, rho_t, rho_r, rho_d).map(f64::sqrt)
}

/// Half-wavelength element count `⌈4 ρt ρr / (λ ρd)⌉`.
///
/// A relative slack of 1e-9 is absorbed before the ceiling so that exact
/// integers are not pushed up by rounding noise.
pub fn required_elements(wavelength_m: f64, rho_t: f64, rho_r: f64, rho_d: f64) -> Result<u64> {
    let area = required_area(wavelength_m, rho_t, rho_r, rho_d)?;
    let exact = area / (wavelength_m / 2.0).powi(2);
    Ok((exact * (1.0 - 1e-9)).ceil().max(1.0) as u64)
}

/// Edge length `√N λ/2` of a square half-wavelength array.
pub fn ris_size_from_elements(n: u64, wavelength_m: f64) -> Result<f64> {
    let side = (n as f64).sqrt().round() as u64;
    if n == 0 || side * side != n {
        return Err(Error::domain(format!(
            "{n} elements do not form a square array"
        )));
    }
    if !(wavelength_m.is_finite() && wavelength_m > 0.0) {
        return Err(Error::domain(format!("wavelength must be positive, got {wavelength_m}")));
    }
    Ok(side as f64 * wavelength_m / 2.0)
}

/// Distance at which a half-wavelength RIS of `area` starts to lose against a
/// direct path attenuated by `blockage_db`, for equal hops meeting at a
/// right angle: `10^(b/20) √2 A / λ`.
pub fn symmetric_crossover_distance(area_m2: f64, wavelength_m: f64, blockage_db: f64) -> f64 {
    10f64.powf(blockage_db / 20.0) * std::f64::consts::SQRT_2 * area_m2 / wavelength_m
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathLossRow {
    pub distance: f64,
    pub pl_los_db: f64,
    pub pl_blocked_db: f64,
    /// One entry per requested element count.
    pub pl_ris_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathLossTable {
    pub n_values: Vec<u32>,
    pub rows: Vec<PathLossRow>,
}

impl PathLossTable {
    /// First swept distance at which the RIS with `n_values[idx]` elements has
    /// more loss than the blocked direct path.
    pub fn first_crossover(&self, idx: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.pl_ris_db[idx] > r.pl_blocked_db)
            .map(|r| r.distance)
    }

    pub fn to_table(&self) -> Table {
        let mut header = vec![
            "distance_m".to_string(),
            "pl_los_db".to_string(),
            "pl_blocked_db".to_string(),
        ];
        header.extend(self.n_values.iter().map(|n| format!("pl_ris_N{n}_db")));
        let mut t = Table::new(header);
        for r in &self.rows {
            let mut row = vec![fmt_sig(r.distance), fmt_sig(r.pl_los_db), fmt_sig(r.pl_blocked_db)];
            row.extend(r.pl_ris_db.iter().map(|v| fmt_sig(*v)));
            t.push(row);
        }
        t
    }
}

/// Broadside, lossless-reflection RIS path loss for `n` half-wavelength elements.
fn ris_loss_db(wavelength_m: f64, n: u32, geom: &PathGeometry) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("element count must be positive"));
    }
    let area = n as f64 * (wavelength_m / 2.0).powi(2);
    ris_gain_for_area(area, 1.0, geom.rho_t, geom.rho_r, 0.0, 0.0).map(loss_db)
}

/// Path loss of the free, blocked, and RIS-assisted links along a sweep.
///
/// The RIS columns use broadside incidence and unit reflection amplitude.
pub fn pathloss_curve(
    query: &DimensioningQuery,
    n_values: &[u32],
    distances: &[f64],
) -> Result<PathLossTable> {
    query.params.validate()?;
    let lambda = query.params.wavelength_m();
    let rows = distances
        .iter()
        .map(|&distance| {
            let geom = query.geometry(distance)?;
            let pl_los_db = loss_db(fspl_gain(lambda, geom.rho_d)?);
            let pl_ris_db = n_values
                .iter()
                .map(|&n| ris_loss_db(lambda, n, &geom))
                .collect::<Result<Vec<_>>>()?;
            Ok(PathLossRow {
                distance,
                pl_los_db,
                pl_blocked_db: pl_los_db + query.params.blockage_db,
                pl_ris_db,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathLossTable {
        n_values: n_values.to_vec(),
        rows,
    })
}

/// Locates the RIS/blocked-path crossover for `n` elements by bisection on
/// `[lo, hi]`. `None` if the sign does not change over the bracket.
pub fn find_crossover(query: &DimensioningQuery, n: u32, lo: f64, hi: f64) -> Result<Option<f64>> {
    let lambda = query.params.wavelength_m();
    let margin = |d: f64| -> Result<f64> {
        let geom = query.geometry(d)?;
        let blocked = loss_db(fspl_gain(lambda, geom.rho_d)?) + query.params.blockage_db;
        Ok(ris_loss_db(lambda, n, &geom)? - blocked)
    };
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (margin(a)?, margin(b)?);
    if fa > 0.0 || fb <= 0.0 {
        return Ok(None);
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if margin(mid)? > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensioningRow {
    pub distance: f64,
    pub n_req: u64,
    pub l_req: f64,
}

pub fn dimensioning_curve(query: &DimensioningQuery, distances: &[f64]) -> Result<Vec<DimensioningRow>> {
    query.params.validate()?;
    let lambda = query.params.wavelength_m();
    distances
        .iter()
        .map(|&distance| {
            let g = query.geometry(distance)?;
            Ok(DimensioningRow {
                distance,
                n_req: required_elements(lambda, g.rho_t, g.rho_r, g.rho_d)?,
                l_req: required_length(lambda, g.rho_t, g.rho_r, g.rho_d)?,
            })
        })
        .collect()
}

pub fn dimensioning_table(rows: &[DimensioningRow]) -> Table {
    let mut t = Table::new(vec!["distance_m".into(), "n_req".into(), "l_req_m".into()]);
    for r in rows {
        t.push(vec![fmt_sig(r.distance), r.n_req.to_string(), fmt_sig(r.l_req)]);
    }
    t
}
