//! 2.5D scene model: flat ground, buildings as extruded footprint prisms, and
//! geometric line-of-sight queries between points.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Length tolerance in meters for edge-crossing and height comparisons.
pub const LENGTH_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }

    pub fn horizontal_distance(&self, other: &Point3) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Azimuth of `other` seen from `self`, in degrees in `[0, 360)`,
    /// counter-clockwise from the +x (east) axis.
    pub fn azimuth_to(&self, other: &Point3) -> f64 {
        let deg = (other.y - self.y).atan2(other.x - self.x).to_degrees();
        crate::placement::normalize_deg(deg)
    }

    pub fn translated(&self, dx: f64, dy: f64, dz: f64) -> Point3 {
        Point3::new(self.x + dx, self.y + dy, self.z + dz)
    }
}

type Xy = [f64; 2];

fn sub(a: Xy, b: Xy) -> Xy {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: Xy, b: Xy) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: Xy, b: Xy) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: Xy) -> f64 {
    a[0].hypot(a[1])
}

/// Distance from `p` to the closed segment `a`-`b`.
fn point_segment_distance(p: Xy, a: Xy, b: Xy) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return norm(sub(p, a));
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    norm(sub(p, [a[0] + t * ab[0], a[1] + t * ab[1]]))
}

/// True if closed segments `a`-`b` and `c`-`d` share at least one point
/// (within [`LENGTH_EPS`]).
fn segments_touch(a: Xy, b: Xy, c: Xy, d: Xy) -> bool {
    let r = sub(b, a);
    let s = sub(d, c);
    let denom = cross(r, s);
    if denom.abs() > LENGTH_EPS * LENGTH_EPS {
        let t = cross(sub(c, a), s) / denom;
        let u = cross(sub(c, a), r) / denom;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
            return true;
        }
    }
    point_segment_distance(a, c, d) <= LENGTH_EPS
        || point_segment_distance(b, c, d) <= LENGTH_EPS
        || point_segment_distance(c, a, b) <= LENGTH_EPS
        || point_segment_distance(d, a, b) <= LENGTH_EPS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Containment {
    Inside,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Building {
    pub footprint: Vec<[f64; 2]>,
    pub height: f64,
}

impl Building {
    pub fn new(footprint: Vec<[f64; 2]>, height: f64) -> Result<Self> {
        let b = Building { footprint, height };
        b.validate()?;
        Ok(b)
    }

    /// Axis-aligned rectangular block.
    pub fn rect(xmin: f64, ymin: f64, xmax: f64, ymax: f64, height: f64) -> Result<Self> {
        Building::new(
            vec![[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]],
            height,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.footprint.len();
        if n < 3 {
            return Err(Error::validation(format!(
                "building footprint needs at least 3 vertices, got {n}"
            )));
        }
        if !(self.height.is_finite() && self.height > 0.0) {
            return Err(Error::validation(format!(
                "building height must be positive, got {}",
                self.height
            )));
        }
        if self.footprint.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::validation("building footprint has non-finite coordinates"));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if norm(sub(self.footprint[i], self.footprint[j])) <= LENGTH_EPS {
                    return Err(Error::validation(format!(
                        "building footprint repeats vertex {i} at index {j}"
                    )));
                }
            }
        }
        let edge = |i: usize| (self.footprint[i], self.footprint[(i + 1) % n]);
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = edge(i);
                let (c, d) = edge(j);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Adjacent edges share one vertex; they must not fold back onto each other.
                    let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                    let u = sub(p, shared);
                    let v = sub(q, shared);
                    if cross(u, v).abs() <= LENGTH_EPS * norm(u).max(norm(v)) && dot(u, v) > 0.0 {
                        return Err(Error::validation("building footprint folds back on itself"));
                    }
                } else if segments_touch(a, b, c, d) {
                    return Err(Error::validation(format!(
                        "building footprint is self-intersecting (edges {i} and {j})"
                    )));
                }
            }
        }
        if self.signed_area().abs() <= LENGTH_EPS {
            return Err(Error::validation("building footprint has zero area"));
        }
        Ok(())
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.footprint.len();
        (0..n)
            .map(|i| cross(self.footprint[i], self.footprint[(i + 1) % n]))
            .sum::<f64>()
            / 2.0
    }

    fn bbox(&self) -> [f64; 4] {
        self.footprint.iter().fold(
            [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
            |acc, v| [acc[0].min(v[0]), acc[1].min(v[1]), acc[2].max(v[0]), acc[3].max(v[1])],
        )
    }

    fn edges(&self) -> impl Iterator<Item = (Xy, Xy)> + '_ {
        let n = self.footprint.len();
        (0..n).map(move |i| (self.footprint[i], self.footprint[(i + 1) % n]))
    }

    fn classify(&self, p: Xy) -> Containment {
        if self.edges().any(|(a, b)| point_segment_distance(p, a, b) <= LENGTH_EPS) {
            return Containment::Boundary;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        if inside {
            Containment::Inside
        } else {
            Containment::Outside
        }
    }

    /// Whether the footprint strictly contains the horizontal projection of `p`.
    pub fn contains_xy(&self, x: f64, y: f64) -> bool {
        self.classify([x, y]) == Containment::Inside
    }

    /// True if the open segment `p`-`q` runs through the interior of this
    /// prism over a positive length.
    pub fn blocks(&self, p: &Point3, q: &Point3) -> bool {
        let h = self.height;
        if p.z.min(q.z) >= h - LENGTH_EPS {
            return false;
        }
        let [bx0, by0, bx1, by1] = self.bbox();
        if p.x.max(q.x) < bx0 - LENGTH_EPS
            || p.x.min(q.x) > bx1 + LENGTH_EPS
            || p.y.max(q.y) < by0 - LENGTH_EPS
            || p.y.min(q.y) > by1 + LENGTH_EPS
        {
            return false;
        }

        let a = [p.x, p.y];
        let d = [q.x - p.x, q.y - p.y];
        let len = norm(d);
        if len <= LENGTH_EPS {
            // Vertical segment: blocked if it stands inside the footprint below the roof.
            return self.classify(a) == Containment::Inside;
        }

        let mut params = vec![0.0, 1.0];
        for (u, v) in self.edges() {
            let e = sub(v, u);
            let w = sub(u, a);
            let denom = cross(d, e);
            let elen = norm(e);
            if denom.abs() > 1e-12 * len * elen {
                let t = cross(w, e) / denom;
                let s = cross(w, d) / denom;
                let s_tol = LENGTH_EPS / elen;
                if t > 0.0 && t < 1.0 && s >= -s_tol && s <= 1.0 + s_tol {
                    params.push(t);
                }
            } else if cross(w, d).abs() <= LENGTH_EPS * len {
                // Collinear edge: split at its endpoints.
                for end in [u, v] {
                    let t = dot(sub(end, a), d) / (len * len);
                    if t > 0.0 && t < 1.0 {
                        params.push(t);
                    }
                }
            }
        }
        params.sort_by(f64::total_cmp);
        params.dedup();

        let z_at = |t: f64| p.z + t * (q.z - p.z);
        params.windows(2).any(|w| {
            let (t0, t1) = (w[0], w[1]);
            if (t1 - t0) * len <= LENGTH_EPS {
                return false;
            }
            let tm = 0.5 * (t0 + t1);
            if self.classify([a[0] + tm * d[0], a[1] + tm * d[1]]) != Containment::Inside {
                return false;
            }
            z_at(t0).min(z_at(t1)) < h - LENGTH_EPS
        })
    }
}

/// Regular sample grid of UE positions at a fixed height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub step: f64,
    pub ue_height: f64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let vals = [self.xmin, self.xmax, self.ymin, self.ymax, self.step, self.ue_height];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("grid has non-finite values"));
        }
        if self.step <= 0.0 {
            return Err(Error::validation(format!(
                "grid step must be positive, got {}",
                self.step
            )));
        }
        if self.xmax < self.xmin || self.ymax < self.ymin {
            return Err(Error::validation("grid bounds are inverted"));
        }
        Ok(())
    }

    fn count(lo: f64, hi: f64, step: f64) -> usize {
        ((hi - lo) / step + 1e-9).floor() as usize + 1
    }

    pub fn nx(&self) -> usize {
        Self::count(self.xmin, self.xmax, self.step)
    }

    pub fn ny(&self) -> usize {
        Self::count(self.ymin, self.ymax, self.step)
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sample `index` in row-major order (x varies fastest).
    pub fn point(&self, index: usize) -> Point3 {
        let nx = self.nx();
        let (iy, ix) = (index / nx, index % nx);
        Point3::new(
            self.xmin + ix as f64 * self.step,
            self.ymin + iy as f64 * self.step,
            self.ue_height,
        )
    }

    pub fn points(&self) -> Vec<Point3> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    buildings: Vec<Building>,
    bs: Point3,
    candidates: Vec<Point3>,
    grid: GridSpec,
    fov_half_angle_deg: f64,
}

/// On-disk scene layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    buildings: Vec<Building>,
    bs: Point3,
    candidates: Vec<Point3>,
    grid: GridSpec,
    fov_half_angle_deg: f64,
}

impl Scene {
    /// Builds a scene and checks every invariant, including that each RIS
    /// candidate has line of sight to the base station.
    pub fn new(
        buildings: Vec<Building>,
        bs: Point3,
        candidates: Vec<Point3>,
        grid: GridSpec,
        fov_half_angle_deg: f64,
    ) -> Result<Self> {
        for (i, b) in buildings.iter().enumerate() {
            b.validate()
                .map_err(|e| Error::validation(format!("building {i}: {e}")))?;
        }
        if !bs.is_finite() {
            return Err(Error::validation("bs position is not finite"));
        }
        if let Some(i) = candidates.iter().position(|c| !c.is_finite()) {
            return Err(Error::validation(format!("candidate {i} is not finite")));
        }
        grid.validate()?;
        if !(fov_half_angle_deg > 0.0 && fov_half_angle_deg < 90.0) {
            return Err(Error::validation(format!(
                "fov_half_angle_deg must lie in (0, 90), got {fov_half_angle_deg}"
            )));
        }
        let scene = Scene {
            buildings,
            bs,
            candidates,
            grid,
            fov_half_angle_deg,
        };
        for (i, c) in scene.candidates.iter().enumerate() {
            if c.horizontal_distance(&scene.bs) <= LENGTH_EPS {
                return Err(Error::validation(format!(
                    "candidate {i} is horizontally colocated with the bs"
                )));
            }
            if !scene.segment_los(c, &scene.bs) {
                return Err(Error::validation(format!(
                    "candidate {i} at ({}, {}, {}) has no line of sight to the bs",
                    c.x, c.y, c.z
                )));
            }
        }
        Ok(scene)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: SceneFile = serde_json::from_str(text)?;
        Scene::new(f.buildings, f.bs, f.candidates, f.grid, f.fov_half_angle_deg)
    }

    pub fn to_json(&self) -> String {
        let f = SceneFile {
            buildings: self.buildings.clone(),
            bs: self.bs,
            candidates: self.candidates.clone(),
            grid: self.grid,
            fov_half_angle_deg: self.fov_half_angle_deg,
        };
        serde_json::to_string_pretty(&f).expect("scene serializes")
    }

    pub fn buildings(&self) -> &[Building] {
        &self.buildings
    }

    pub fn bs(&self) -> Point3 {
        self.bs
    }

    pub fn candidates(&self) -> &[Point3] {
        &self.candidates
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn fov_half_angle_deg(&self) -> f64 {
        self.fov_half_angle_deg
    }

    /// True iff the open segment `p`-`q` avoids every building interior.
    pub fn segment_los(&self, p: &Point3, q: &Point3) -> bool {
        !self.buildings.iter().any(|b| b.blocks(p, q))
    }

    /// LOS from `source` to each grid sample, in grid order.
    pub fn los_grid(&self, source: &Point3) -> Vec<(Point3, bool)> {
        self.grid
            .points()
            .into_par_iter()
            .map(|p| (p, self.segment_los(source, &p)))
            .collect()
    }
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Scene::from_json(&text)
}
