//! RIS orientation and placement under a field-of-view constraint.
//!
//! Orientations are broadside azimuths in degrees, counter-clockwise from +x.
//! A surface at azimuth φ serves a target (the BS or a UE) when the target's
//! azimuth lies within the half-angle θmax of φ. Only azimuth is considered;
//! elevation offsets are ignored.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::{Point3, Scene, LENGTH_EPS};
use crate::table::{fmt_sig, round_sig, Table};

/// Tolerance on arc boundaries, degrees.
pub const ANGLE_EPS_DEG: f64 = 1e-9;

/// Maps any angle to `[0, 360)`.
pub fn normalize_deg(a: f64) -> f64 {
    let r = a.rem_euclid(360.0);
    // rem_euclid can return 360.0 for tiny negative inputs
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// `b - a` wrapped to `(-180, 180]`.
pub fn signed_diff_deg(a: f64, b: f64) -> f64 {
    let d = normalize_deg(b - a);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

/// Shortest angular distance between two azimuths, in `[0, 180]`.
pub fn angdist_deg(a: f64, b: f64) -> f64 {
    signed_diff_deg(a, b).abs()
}

/// Closed arc of azimuths `{φ : angdist(φ, center) ≤ half_width}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularInterval {
    center_deg: f64,
    half_width_deg: f64,
}

impl AngularInterval {
    /// `half_width_deg` must lie in `[0, 90)`; a zero width is a single
    /// azimuth, which arises when two arcs just touch.
    pub fn new(center_deg: f64, half_width_deg: f64) -> Result<Self> {
        if !center_deg.is_finite() || !(0.0..90.0).contains(&half_width_deg) {
            return Err(Error::domain(format!(
                "invalid arc: center {center_deg}°, half width {half_width_deg}°"
            )));
        }
        Ok(AngularInterval {
            center_deg: normalize_deg(center_deg),
            half_width_deg,
        })
    }

    pub fn center_deg(&self) -> f64 {
        self.center_deg
    }

    pub fn half_width_deg(&self) -> f64 {
        self.half_width_deg
    }

    /// Counter-clockwise start, in `[0, 360)`.
    pub fn start_deg(&self) -> f64 {
        normalize_deg(self.center_deg - self.half_width_deg)
    }

    pub fn end_deg(&self) -> f64 {
        normalize_deg(self.center_deg + self.half_width_deg)
    }

    /// Inclusive membership with [`ANGLE_EPS_DEG`] slack.
    pub fn contains(&self, azimuth_deg: f64) -> bool {
        angdist_deg(azimuth_deg, self.center_deg) <= self.half_width_deg + ANGLE_EPS_DEG
    }
}

/// Broadside azimuths from which a surface at `ris` sees `target` within
/// `theta_max_deg` of broadside.
pub fn target_arc(ris: &Point3, target: &Point3, theta_max_deg: f64) -> Result<AngularInterval> {
    if ris.horizontal_distance(target) <= LENGTH_EPS {
        return Err(Error::domain(
            "target is horizontally colocated with the surface; azimuth undefined",
        ));
    }
    if !(theta_max_deg > 0.0 && theta_max_deg < 90.0) {
        return Err(Error::domain(format!(
            "field-of-view half angle must lie in (0, 90), got {theta_max_deg}"
        )));
    }
    AngularInterval::new(ris.azimuth_to(target), theta_max_deg)
}

/// Common part of two arcs, each shorter than a half turn. Two such arcs
/// overlap in at most one arc, so the result is unique.
pub fn intersect_arcs(a: &AngularInterval, b: &AngularInterval) -> Option<AngularInterval> {
    // Work in a frame centred on `a`.
    let offset = signed_diff_deg(a.center_deg, b.center_deg);
    let lo = (-a.half_width_deg).max(offset - b.half_width_deg);
    let hi = a.half_width_deg.min(offset + b.half_width_deg);
    if hi < lo - ANGLE_EPS_DEG {
        return None;
    }
    let (lo, hi) = if hi < lo { (lo, lo) } else { (lo, hi) };
    Some(AngularInterval {
        center_deg: normalize_deg(a.center_deg + 0.5 * (lo + hi)),
        half_width_deg: 0.5 * (hi - lo),
    })
}

/// A candidate target for orientation search: grid index and position.
/// Callers pass only targets already known to have LOS to the surface.
pub type Target = (usize, Point3);

#[derive(Debug, Clone, PartialEq)]
pub struct Orientation {
    pub orientation_deg: f64,
    /// Grid indices served at this orientation, ascending.
    pub covered: Vec<usize>,
}

/// Whether a surface at `ris` facing `orientation_deg` serves both the BS
/// and `target` (LOS not checked here).
pub fn serves(ris: &Point3, bs: &Point3, target: &Point3, orientation_deg: f64, theta_max_deg: f64) -> bool {
    let ok = |p: &Point3| {
        target_arc(ris, p, theta_max_deg)
            .map(|arc| arc.contains(orientation_deg))
            .unwrap_or(false)
    };
    ok(bs) && ok(target)
}

fn covered_at(ris: &Point3, bs: &Point3, targets: &[Target], orientation_deg: f64, theta_max_deg: f64) -> Vec<usize> {
    let mut v: Vec<usize> = targets
        .iter()
        .filter(|(_, p)| serves(ris, bs, p, orientation_deg, theta_max_deg))
        .map(|(i, _)| *i)
        .collect();
    v.sort_unstable();
    v
}

/// Orientation inside the BS arc that serves the most `targets`.
///
/// Each target contributes the sub-interval of the BS arc from which it is
/// also in view; an endpoint sweep over those intervals finds the maximum
/// overlap in `O(K log K)`. Among optimal orientations the smallest azimuth
/// in `[0, 360)` wins; with nothing to serve the BS-facing azimuth is used.
pub fn best_orientation_for_targets(
    ris: &Point3,
    bs: &Point3,
    theta_max_deg: f64,
    targets: &[Target],
) -> Result<Orientation> {
    let bs_arc = target_arc(ris, bs, theta_max_deg)?;
    let base = bs_arc.center_deg();

    // (position in BS-arc frame, +1 start / -1 end)
    let mut events: Vec<(f64, i32)> = Vec::with_capacity(2 * targets.len());
    for (_, p) in targets {
        let Ok(arc) = target_arc(ris, p, theta_max_deg) else {
            continue;
        };
        if let Some(common) = intersect_arcs(&bs_arc, &arc) {
            let mid = signed_diff_deg(base, common.center_deg());
            events.push((mid - common.half_width_deg(), 1));
            events.push((mid + common.half_width_deg() + ANGLE_EPS_DEG, -1));
        }
    }
    // Starts before ends at equal positions: boundaries are inclusive.
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.cmp(&a.1)));

    let mut depth = 0;
    let mut best = 0;
    for &(_, delta) in &events {
        depth += delta;
        best = best.max(depth);
    }
    if best == 0 {
        return Ok(Orientation {
            orientation_deg: base,
            covered: Vec::new(),
        });
    }

    // Collect every region of maximal depth and pick its smallest azimuth.
    let mut chosen = f64::INFINITY;
    let mut depth = 0;
    let mut region_start = None;
    for &(pos, delta) in &events {
        depth += delta;
        match (delta, depth == best, region_start) {
            (1, true, _) => region_start = Some(pos),
            (-1, false, Some(start)) => {
                let end = pos - ANGLE_EPS_DEG;
                let abs_start = base + start;
                let abs_end = base + end;
                // Region crosses the 0°/360° seam: azimuth 0 is inside it.
                let seam = (abs_start / 360.0).ceil() * 360.0;
                let candidate = if seam <= abs_end { 0.0 } else { normalize_deg(abs_start) };
                chosen = chosen.min(candidate);
                region_start = None;
            }
            _ => {}
        }
    }

    let covered = covered_at(ris, bs, targets, chosen, theta_max_deg);
    Ok(Orientation {
        orientation_deg: chosen,
        covered,
    })
}

/// Grid indices without direct LOS from the BS.
fn uncovered_by_bs(scene: &Scene) -> (Vec<Point3>, Vec<bool>) {
    let grid = scene.los_grid(&scene.bs());
    grid.into_iter().unzip()
}

/// Grid samples visible from `ris`, restricted to `mask`.
fn visible_targets(scene: &Scene, ris: &Point3, points: &[Point3], mask: &[bool]) -> Vec<Target> {
    points
        .par_iter()
        .enumerate()
        .filter(|(i, p)| mask[*i] && ris.horizontal_distance(p) > LENGTH_EPS && scene.segment_los(ris, p))
        .map(|(i, p)| (i, *p))
        .collect()
}

fn candidate(scene: &Scene, index: usize) -> Result<Point3> {
    scene.candidates().get(index).copied().ok_or_else(|| {
        Error::domain(format!(
            "candidate index {index} out of range ({} candidates)",
            scene.candidates().len()
        ))
    })
}

/// Best orientation of candidate `index` over grid points without direct BS LOS.
pub fn best_orientation(scene: &Scene, index: usize) -> Result<Orientation> {
    let ris = candidate(scene, index)?;
    let (points, bs_los) = uncovered_by_bs(scene);
    let mask: Vec<bool> = bs_los.iter().map(|v| !v).collect();
    let targets = visible_targets(scene, &ris, &points, &mask);
    best_orientation_for_targets(&ris, &scene.bs(), scene.fov_half_angle_deg(), &targets)
}

/// Per-candidate coverage, with and without the orientation constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateReport {
    pub candidate_index: usize,
    /// Grid points without BS LOS that see the candidate, any orientation.
    pub raw_los_count: usize,
    pub best_orientation_deg: f64,
    pub fov_count: usize,
}

pub fn evaluate_candidates(scene: &Scene) -> Result<Vec<CandidateReport>> {
    let (points, bs_los) = uncovered_by_bs(scene);
    let mask: Vec<bool> = bs_los.iter().map(|v| !v).collect();
    scene
        .candidates()
        .iter()
        .enumerate()
        .map(|(i, ris)| {
            let targets = visible_targets(scene, ris, &points, &mask);
            let best = best_orientation_for_targets(ris, &scene.bs(), scene.fov_half_angle_deg(), &targets)?;
            Ok(CandidateReport {
                candidate_index: i,
                raw_los_count: targets.len(),
                best_orientation_deg: best.orientation_deg,
                fov_count: best.covered.len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RisPlacement {
    pub candidate_index: usize,
    pub position: Point3,
    pub orientation_deg: f64,
    /// Every grid point without BS LOS that this surface serves, ascending.
    pub covered: Vec<usize>,
    /// Points served by no earlier placement.
    pub newly_covered_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementPlan {
    pub requested: usize,
    pub placements: Vec<RisPlacement>,
}

impl PlacementPlan {
    /// True when fewer placements than requested were possible.
    pub fn truncated(&self) -> bool {
        self.placements.len() < self.requested
    }

    pub fn to_json(&self) -> String {
        let file = PlanFile {
            requested_k: self.requested,
            truncated: self.truncated(),
            placements: self
                .placements
                .iter()
                .map(|p| PlanEntry {
                    candidate_index: p.candidate_index,
                    position: p.position,
                    orientation_deg: round_sig(p.orientation_deg),
                    newly_covered_count: p.newly_covered_count,
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("plan serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub requested_k: usize,
    pub truncated: bool,
    pub placements: Vec<PlanEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanEntry {
    pub candidate_index: usize,
    pub position: Point3,
    pub orientation_deg: f64,
    pub newly_covered_count: usize,
}

/// Greedy selection of up to `k` surfaces, each maximizing the number of
/// grid points newly brought into (virtual) LOS. Ties go to the lowest
/// candidate index; a candidate is used at most once.
pub fn greedy_place(scene: &Scene, k: usize) -> Result<(PlacementPlan, CoverageGrid)> {
    if k == 0 {
        return Err(Error::domain("number of surfaces to place must be at least 1"));
    }
    if scene.candidates().is_empty() {
        return Err(Error::validation("scene has no RIS candidates"));
    }
    let bs = scene.bs();
    let theta = scene.fov_half_angle_deg();
    let (points, bs_los) = uncovered_by_bs(scene);
    let not_bs: Vec<bool> = bs_los.iter().map(|v| !v).collect();
    let visible: Vec<Vec<Target>> = scene
        .candidates()
        .iter()
        .map(|c| visible_targets(scene, c, &points, &not_bs))
        .collect();

    let mut residual = not_bs.clone();
    let mut used = vec![false; scene.candidates().len()];
    let mut placements = Vec::new();

    for _ in 0..k.min(scene.candidates().len()) {
        let best = (0..scene.candidates().len())
            .into_par_iter()
            .filter(|&c| !used[c])
            .map(|c| {
                let ris = scene.candidates()[c];
                let remaining: Vec<Target> = visible[c].iter().filter(|(i, _)| residual[*i]).copied().collect();
                best_orientation_for_targets(&ris, &bs, theta, &remaining).map(|o| (c, o))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max_by(|(ca, a), (cb, b)| a.covered.len().cmp(&b.covered.len()).then(cb.cmp(ca)))
            .expect("an unused candidate remains");

        let (c, orient) = best;
        let ris = scene.candidates()[c];
        let covered = covered_at(&ris, &bs, &visible[c], orient.orientation_deg, theta);
        for &i in &orient.covered {
            residual[i] = false;
        }
        used[c] = true;
        placements.push(RisPlacement {
            candidate_index: c,
            position: ris,
            orientation_deg: orient.orientation_deg,
            covered,
            newly_covered_count: orient.covered.len(),
        });
    }

    let plan = PlacementPlan {
        requested: k,
        placements,
    };
    let report = coverage_report(scene, &plan)?;
    Ok((plan, report.grid))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoverageLabel {
    BsLos,
    /// Served first by the placement at this plan position.
    Ris(usize),
    Uncovered,
}

impl CoverageLabel {
    pub fn name(&self) -> String {
        match self {
            CoverageLabel::BsLos => "bs_los".into(),
            CoverageLabel::Ris(k) => format!("ris_{}", k + 1),
            CoverageLabel::Uncovered => "uncovered".into(),
        }
    }

    /// PGM gray level: uncovered 0, BS 255, the k-th surface (1-based)
    /// `max(200 - 30 (k - 1), 20)`.
    pub fn gray(&self) -> u8 {
        match self {
            CoverageLabel::BsLos => 255,
            CoverageLabel::Ris(k) => 200usize.saturating_sub(30 * k).max(20) as u8,
            CoverageLabel::Uncovered => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageGrid {
    pub spec: crate::scene::GridSpec,
    pub labels: Vec<CoverageLabel>,
}

impl CoverageGrid {
    pub fn count(&self, label: CoverageLabel) -> usize {
        self.labels.iter().filter(|l| **l == label).count()
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(vec!["x".into(), "y".into(), "label".into()]);
        for (i, l) in self.labels.iter().enumerate() {
            let p = self.spec.point(i);
            t.push(vec![fmt_sig(p.x), fmt_sig(p.y), l.name()]);
        }
        t
    }

    /// Plain (P2) graymap, one pixel per sample, north up.
    pub fn to_pgm(&self) -> String {
        let (nx, ny) = (self.spec.nx(), self.spec.ny());
        let mut s = String::new();
        s.push_str("P2\n");
        s.push_str("# coverage labels: uncovered=0 bs_los=255 ris_k=max(200-30*(k-1),20)\n");
        s.push_str(&format!("{nx} {ny}\n255\n"));
        for iy in (0..ny).rev() {
            let row: Vec<String> = (0..nx)
                .map(|ix| self.labels[iy * nx + ix].gray().to_string())
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageSummary {
    pub total: usize,
    pub bs_count: usize,
    pub ris_counts: Vec<usize>,
    pub uncovered: usize,
}

impl CoverageSummary {
    pub fn fraction(&self, count: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            count as f64 / self.total as f64
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!("grid_points {}\n", self.total);
        s.push_str(&format!("bs_los {} {}\n", self.bs_count, fmt_sig(self.fraction(self.bs_count))));
        for (k, c) in self.ris_counts.iter().enumerate() {
            s.push_str(&format!("ris_{} {} {}\n", k + 1, c, fmt_sig(self.fraction(*c))));
        }
        s.push_str(&format!("uncovered {} {}\n", self.uncovered, fmt_sig(self.fraction(self.uncovered))));
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub grid: CoverageGrid,
    pub summary: CoverageSummary,
}

/// Labels every grid point from the geometry of `plan`: BS LOS first, then
/// the earliest placement that serves the point.
pub fn coverage_report(scene: &Scene, plan: &PlacementPlan) -> Result<CoverageReport> {
    let bs = scene.bs();
    let theta = scene.fov_half_angle_deg();
    let (points, bs_los) = uncovered_by_bs(scene);
    let labels: Vec<CoverageLabel> = points
        .par_iter()
        .zip(bs_los.par_iter())
        .map(|(p, &direct)| {
            if direct {
                return CoverageLabel::BsLos;
            }
            plan.placements
                .iter()
                .position(|r| {
                    r.position.horizontal_distance(p) > LENGTH_EPS
                        && serves(&r.position, &bs, p, r.orientation_deg, theta)
                        && scene.segment_los(&r.position, p)
                })
                .map_or(CoverageLabel::Uncovered, CoverageLabel::Ris)
        })
        .collect();
    let grid = CoverageGrid {
        spec: *scene.grid(),
        labels,
    };
    let summary = CoverageSummary {
        total: grid.labels.len(),
        bs_count: grid.count(CoverageLabel::BsLos),
        ris_counts: (0..plan.placements.len()).map(|k| grid.count(CoverageLabel::Ris(k))).collect(),
        uncovered: grid.count(CoverageLabel::Uncovered),
    };
    Ok(CoverageReport { grid, summary })
}

/// BS-only labelling: every point is either [`CoverageLabel::BsLos`] or
/// [`CoverageLabel::Uncovered`].
pub fn bs_coverage(scene: &Scene) -> CoverageGrid {
    let labels = scene
        .los_grid(&scene.bs())
        .into_iter()
        .map(|(_, v)| if v { CoverageLabel::BsLos } else { CoverageLabel::Uncovered })
        .collect();
    CoverageGrid {
        spec: *scene.grid(),
        labels,
    }
}

impl PartialOrd for CoverageLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CoverageLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        let rank = |l: &CoverageLabel| match l {
            CoverageLabel::BsLos => (0, 0),
            CoverageLabel::Ris(k) => (1, *k),
            CoverageLabel::Uncovered => (2, 0),
        };
        rank(self).cmp(&rank(other))
    }
}
