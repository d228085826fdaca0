//! Independent checks of the optimizers and closed forms against brute
//! force and hand-derived values.

use rand::Rng;
use simula_core::linalg::{self, RMat};
use simula_core::oracle::{
    brute_region, eq_distributions, eq_probability, hausdorff_gap, max_outside, rng_from_seed, tetrahedral, trine,
};
use simula_core::regions::{region_of, RegionDescriptor, RegionKind};
use simula_core::sdi::{
    certify_states, depolarization_factor, max_area_centered_ellipse, max_volume_ellipse, simplex_frame,
    ObservationSet,
};
use std::f64::consts::PI;

fn centered(shape: RMat) -> RegionDescriptor {
    RegionDescriptor {
        kind: RegionKind::StateTesting,
        center: vec![0.5, 0.5],
        shape,
        apexes: vec![vec![0.0, 0.0], vec![1.0, 1.0]],
    }
}

fn ellipse_shape(theta: f64, a: f64, b: f64) -> RMat {
    let (c, s) = (theta.cos(), theta.sin());
    let r = RMat::from_row_slice(2, 2, &[c, -s, s, c]);
    &r * RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![a * a, b * b])) * r.transpose()
}

/// Dichotomy observations with a genuinely two-dimensional optimum:
/// `{|0⟩, |+⟩}` probed by a few real effects.
fn planar_state_observations() -> ObservationSet {
    let probes = [(0.9, 0.3), (0.2, 0.7), (0.55, 0.95), (0.1, 0.35)];
    ObservationSet::state_probe(probes.iter().map(|&(a, b)| vec![a, b]).collect()).unwrap()
}

#[test]
fn meas_optimum_is_locally_maximal_in_every_orientation() {
    let obs = eq_distributions(5).unwrap();
    let best = max_volume_ellipse(&obs).unwrap();
    let (origin, frame) = simplex_frame();
    let pts: Vec<[f64; 2]> = obs
        .points
        .iter()
        .map(|p| {
            let v: Vec<f64> = (0..2).map(|k| (0..3).map(|a| (p[a] - origin[a]) * frame[(a, k)]).sum()).collect();
            [v[0], v[1]]
        })
        .collect();
    let hull = simula_core::sdi::planar::halfplanes(&pts);
    let b2 = frame.transpose() * &best.shape * &frame;
    let b = linalg::sqrt_psd(&b2);
    let d: Vec<f64> = (0..2)
        .map(|k| (0..3).map(|a| (best.center[a] - origin[a]) * frame[(a, k)]).sum())
        .collect();
    let fits = |m: &RMat| {
        hull.iter().all(|h| {
            let a = nalgebra::DVector::from_vec(h.a.to_vec());
            h.a[0] * d[0] + h.a[1] * d[1] + (m * &a).norm() <= h.b + 1e-12
        })
    };
    assert!(fits(&b));
    for k in 0..360 {
        let th = PI * k as f64 / 360.0;
        let u = nalgebra::DVector::from_vec(vec![th.cos(), th.sin()]);
        let stretch = RMat::identity(2, 2) + &u * u.transpose() * 1e-3;
        assert!(!fits(&(&stretch * &b)), "stretch along {th} still fits");
    }
    assert!(fits(&(&b * (1.0 - 1e-3))));
}

#[test]
fn state_optimum_beats_every_certified_candidate() {
    let obs = planar_state_observations();
    let best = max_area_centered_ellipse(&obs).unwrap();
    assert!(!best.degenerate);
    let optimum = centered(best.shape.clone()).planar_area().unwrap();
    assert!((optimum - best.objective).abs() < 1e-12);
    assert!(certify_states(&obs, &centered(best.shape.clone()), 1e-9).unwrap().is_feasible());

    // stretching the optimum in any orientation either leaves the
    // observations' hull or does not increase the area
    let b = linalg::sqrt_psd(&best.shape);
    for k in 0..360 {
        let th = PI * k as f64 / 360.0;
        let u = nalgebra::DVector::from_vec(vec![th.cos(), th.sin()]);
        let s = RMat::identity(2, 2) + &u * u.transpose() * 1e-3;
        let m = &s * &b;
        let cand = centered(&m * m.transpose());
        let ok = certify_states(&obs, &cand, 1e-12).unwrap().is_feasible();
        assert!(!ok || cand.planar_area().unwrap() <= optimum + 1e-12, "orientation {th}");
    }

    // random search over centered ellipses
    let mut rng = rng_from_seed(99);
    for _ in 0..20_000 {
        let cand = centered(ellipse_shape(
            rng.random_range(0.0..PI),
            rng.random_range(0.0..0.5),
            rng.random_range(0.0..0.5),
        ));
        if certify_states(&obs, &cand, 0.0).unwrap().is_feasible() {
            assert!(cand.planar_area().unwrap() <= optimum + 1e-9);
        }
    }
}

#[test]
fn square_observations_give_the_inscribed_disc_by_brute_force() {
    let (o, v) = simplex_frame();
    let h = 0.12;
    let corners = [[h, h], [h, -h], [-h, -h], [-h, h]];
    let pts = corners
        .iter()
        .map(|p| (0..3).map(|a| o[a] + v[(a, 0)] * p[0] + v[(a, 1)] * p[1]).collect())
        .collect();
    let e = max_volume_ellipse(&ObservationSet::meas_probe(pts).unwrap()).unwrap();
    // brute force over axis-aligned and rotated ellipses centered at 0
    let mut best: f64 = 0.0;
    for i in 0..90 {
        let th = PI * i as f64 / 180.0;
        for j in 1..=200 {
            let a = h * 1.5 * j as f64 / 200.0;
            // largest b for which the ellipse fits in the square
            let (c, s) = (th.cos(), th.sin());
            let mut bmax = f64::INFINITY;
            for n in [[1.0, 0.0], [0.0, 1.0]] {
                let ea = (n[0] * c + n[1] * s) * a;
                let room = h * h - ea * ea;
                if room < 0.0 {
                    bmax = -1.0;
                    break;
                }
                let eb = (-n[0] * s + n[1] * c).abs();
                if eb > 1e-15 {
                    bmax = bmax.min(room.sqrt() / eb);
                }
            }
            if bmax > 0.0 {
                best = best.max(PI * a * bmax.min(10.0));
            }
        }
    }
    assert!(e.objective >= best - 1e-12);
    assert!((e.objective - PI * h * h).abs() < 1e-10);
}

#[test]
fn trine_factor_matches_the_regular_polygon_inradius() {
    for m in [3usize, 4, 5, 6, 7, 12] {
        let e = max_volume_ellipse(&eq_distributions(m).unwrap()).unwrap();
        let eps = depolarization_factor(&e).unwrap();
        assert!((eps - (PI / m as f64).cos()).abs() < 1e-9, "m = {m}: {eps}");
    }
}

#[test]
fn dichotomy_optimum_is_the_hull_of_the_observation() {
    for eps in [0.1, 0.3, 0.5, 0.9] {
        let obs = eq_probability(eps).unwrap();
        let e = max_area_centered_ellipse(&obs).unwrap();
        // vertices 0, u, q0 and u - q0 in closed form
        let q = [0.5 * (1.0 - eps), 0.5];
        let verts = [[0.0, 0.0], [1.0, 1.0], q, [1.0 - q[0], 1.0 - q[1]]];
        let region = centered(e.shape.clone());
        for k in 0..720 {
            let th = PI * k as f64 / 360.0;
            let w = [th.cos(), th.sin()];
            let h = verts
                .iter()
                .map(|v| v[0] * w[0] + v[1] * w[1])
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((region.support(&w) - h).abs() < 1e-9, "eps {eps} theta {th}");
        }
    }
}

#[test]
fn brute_force_clouds_stay_inside_and_fill_the_closed_forms() {
    let devices = [trine(1.0).unwrap(), trine(0.6).unwrap(), tetrahedral().unwrap()];
    for (i, d) in devices.iter().enumerate() {
        let r = region_of(d).unwrap();
        let cloud = brute_region(d, 20_000, i as u64).unwrap();
        assert!(max_outside(&cloud, &r) <= 1e-9);
        assert!(hausdorff_gap(&r, &cloud, 1000, 3) < 1e-2);
    }
}
