use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use srlimit_core::connection::Geometry;
use srlimit_core::curves::{
    affine_covariant_acceleration_closed, affine_curvature_closed, covariant_acceleration, curvature_from,
    curve_curvature, curve_state, e11_covariant_acceleration_closed, Curve,
};
use srlimit_core::exprdsl::Expr;

fn random_curve(group: &str, rng: &mut ChaCha8Rng) -> Curve {
    let mut c = || rng.gen_range(-0.5..0.5);
    let x1 = if group == "affine" {
        format!("1.5 + ({})*t + ({})*t^2", c(), c())
    } else {
        format!("({})*t + ({})*sin(t) + 0.7*t", c(), c())
    };
    Curve::parse(
        [&x1, &format!("({})*t + ({})*t^3 + t", c(), c()), &format!("({})*cos(t) + ({})*t^2", c(), c())],
        [-1.0, 1.0],
    )
    .unwrap()
}

#[test]
fn frame_curvature_matches_the_expanded_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for group in ["affine", "e11"] {
        let geo = Geometry::builtin(group).unwrap();
        for _ in 0..20 {
            let c = random_curve(group, &mut rng);
            let t = rng.gen_range(-0.9..0.9);
            let s = curve_state(&geo.group, &c, t).unwrap();
            for l in [1.0, 3.0, 40.0, 1e3] {
                let at = geo.at(l).unwrap();
                let table = covariant_acceleration(&at, &s);
                let closed = if group == "affine" {
                    affine_covariant_acceleration_closed(&s, l)
                } else {
                    e11_covariant_acceleration_closed(&s, l)
                };
                let scale = 1.0 + table.norm(l);
                assert!(table.sub(&closed).norm(l) < 1e-10 * scale, "{group} L={l}: {table:?} vs {closed:?}");
                let k = curve_curvature(&geo, &c, t, l).unwrap();
                let k_closed = if group == "affine" {
                    affine_curvature_closed(&s, l)
                } else {
                    curvature_from(&closed, &s.frame_velocity(), l)
                };
                assert!((k - k_closed).abs() < 1e-8 * (1.0 + k), "{group} L={l}: {k} vs {k_closed}");
            }
        }
    }
}

#[test]
fn curvature_is_invariant_under_reparametrization() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for group in ["affine", "e11"] {
        let geo = Geometry::builtin(group).unwrap();
        for _ in 0..10 {
            let c = random_curve(group, &mut rng);
            // old t = φ(t) = t + 0.2 t³ maps [-0.8, 0.8] into [-1, 1]
            let phi = Expr::parse("t + 0.2*t^3").unwrap();
            let r = c.reparametrize(&phi, [-0.8, 0.8]).unwrap();
            let s0: f64 = rng.gen_range(-0.7..0.7);
            let t0 = s0 + 0.2 * s0.powi(3);
            for l in [1.0, 16.0, 256.0] {
                let a = curve_curvature(&geo, &c, t0, l).unwrap();
                let b = curve_curvature(&geo, &r, s0, l).unwrap();
                assert!((a - b).abs() < 1e-9 * (1.0 + a), "{group} L={l}: {a} vs {b}");
            }
        }
    }
}
