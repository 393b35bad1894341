#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use risplan::{Building, GridSpec, Point3, Scene};

pub const FOV_DEG: f64 = 60.0;
pub const CANDIDATE_HEIGHT: f64 = 30.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_buildings(rng: &mut ChaCha8Rng, count: usize) -> Vec<Building> {
    (0..count)
        .map(|_| {
            let x = rng.gen_range(-90.0..70.0);
            let y = rng.gen_range(-90.0..70.0);
            let w = rng.gen_range(5.0..25.0);
            let h = rng.gen_range(5.0..25.0);
            Building::rect(x, y, x + w, y + h, rng.gen_range(5.0..40.0)).unwrap()
        })
        .collect()
}

/// A scene on [-100, 100]^2 with at most 10 buildings, at most 289 grid
/// points, and `n_candidates` candidates at 30 m that see the BS.
pub fn random_scene(seed: u64, n_candidates: usize) -> Scene {
    let mut rng = rng(seed);
    let n_buildings = rng.gen_range(1..=10);
    let buildings = random_buildings(&mut rng, n_buildings);
    let inside = |x: f64, y: f64| buildings.iter().any(|b| b.contains_xy(x, y));

    let bs = loop {
        let (x, y) = (rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0));
        if !inside(x, y) {
            break Point3::new(x, y, rng.gen_range(10.0..25.0));
        }
    };
    let probe = Scene::new(buildings.clone(), bs, Vec::new(), grid(&mut rng), FOV_DEG).unwrap();

    let mut candidates = Vec::new();
    while candidates.len() < n_candidates {
        let c = Point3::new(rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0), CANDIDATE_HEIGHT);
        if !inside(c.x, c.y) && c.horizontal_distance(&bs) > 5.0 && probe.segment_los(&c, &bs) {
            candidates.push(c);
        }
    }
    let theta = rng.gen_range(30.0..80.0);
    Scene::new(buildings, bs, candidates, *probe.grid(), theta).unwrap()
}

fn grid(rng: &mut ChaCha8Rng) -> GridSpec {
    // 17 x 17 at most.
    let step = [12.5, 15.0, 20.0][rng.gen_range(0..3)];
    GridSpec {
        xmin: -100.0,
        xmax: 100.0,
        ymin: -100.0,
        ymax: 100.0,
        step,
        ue_height: 1.5,
    }
}

/// Grid targets without BS LOS that `ris` sees, as `best_orientation` uses them.
pub fn visible_targets(scene: &Scene, ris: &Point3, mask: &[bool]) -> Vec<(usize, Point3)> {
    scene
        .grid()
        .points()
        .into_iter()
        .enumerate()
        .filter(|(i, p)| mask[*i] && ris.horizontal_distance(p) > 1e-9 && scene.segment_los(ris, p))
        .collect()
}

pub fn not_bs_mask(scene: &Scene) -> Vec<bool> {
    scene.los_grid(&scene.bs()).into_iter().map(|(_, v)| !v).collect()
}

/// Number of `targets` served at `phi`, by direct membership.
pub fn count_at(scene: &Scene, ris: &Point3, targets: &[(usize, Point3)], phi: f64) -> usize {
    let theta = scene.fov_half_angle_deg();
    targets
        .iter()
        .filter(|(_, p)| risplan::placement::serves(ris, &scene.bs(), p, phi, theta))
        .count()
}

/// Maximum served count over a 0.05° lattice of orientations.
pub fn brute_force_max(scene: &Scene, ris: &Point3, targets: &[(usize, Point3)]) -> usize {
    (0..7200)
        .map(|k| count_at(scene, ris, targets, k as f64 * 0.05))
        .max()
        .unwrap_or(0)
}

/// Maximum served count evaluated at every arc endpoint, which is where
/// any maximum region begins.
pub fn endpoint_max(scene: &Scene, ris: &Point3, targets: &[(usize, Point3)]) -> usize {
    let theta = scene.fov_half_angle_deg();
    let bs = scene.bs();
    let mut probes = Vec::new();
    for p in targets.iter().map(|(_, p)| *p).chain(std::iter::once(bs)) {
        let az = ris.azimuth_to(&p);
        probes.push(az - theta);
        probes.push(az + theta);
    }
    probes
        .into_iter()
        .map(|phi| count_at(scene, ris, targets, risplan::placement::normalize_deg(phi)))
        .max()
        .unwrap_or(0)
}
