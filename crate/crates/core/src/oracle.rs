//! Independent curvature oracle: the metric `g_L` pulled back to chart
//! coordinates, coordinate Christoffel symbols from jets, and the Riemann
//! tensor from central differences of those symbols. Shares no code with the
//! frame-level derivation.

use crate::error::{Error, Result};
use crate::exprdsl::Jet;
use crate::groups::{FrameVector, GroupModel, Point};

/// Coordinate metric and its first partials at `p`: `(g, dg)` with
/// `dg[e][a][b] = ∂_e g_ab`.
fn metric_with_partials(g: &GroupModel, l: f64, p: &Point) -> Result<([[f64; 3]; 3], [[[f64; 3]; 3]; 3])> {
    g.check_point(p)?;
    let x: [Jet; 3] = std::array::from_fn(|s| Jet::variable(p[s], s, 1));
    let b = g.coframe_matrix(&x)?;
    let w = [1.0, 1.0, l];
    let mut gm = [[0.0; 3]; 3];
    let mut dg = [[[0.0; 3]; 3]; 3];
    for a in 0..3 {
        for c in 0..3 {
            let mut s = Jet::constant(0.0);
            for i in 0..3 {
                s = s.add(&b[i][a].mul(&b[i][c]).scale(w[i]));
            }
            gm[a][c] = s.value();
            for (e, d) in dg.iter_mut().enumerate() {
                d[a][c] = s.d(e);
            }
        }
    }
    Ok((gm, dg))
}

fn inverse(m: &[[f64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    crate::groups::invert3(m)
}

/// `Γ^a_bc` of the coordinate metric.
pub fn christoffel(g: &GroupModel, l: f64, p: &Point) -> Result<[[[f64; 3]; 3]; 3]> {
    let (gm, dg) = metric_with_partials(g, l, p)?;
    let gi = inverse(&gm)?;
    let mut out = [[[0.0; 3]; 3]; 3];
    for (a, oa) in out.iter_mut().enumerate() {
        for b in 0..3 {
            for c in 0..3 {
                let mut s = 0.0;
                for d in 0..3 {
                    s += gi[a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]);
                }
                oa[b][c] = 0.5 * s;
            }
        }
    }
    Ok(out)
}

/// `R^a_{bcd}` with `R(∂_c, ∂_d) ∂_b = Σ_a R^a_{bcd} ∂_a`, differentiating
/// the Christoffel symbols by central differences of step `h`.
pub fn coordinate_riemann(g: &GroupModel, l: f64, p: &Point, h: f64) -> Result<[[[[f64; 3]; 3]; 3]; 3]> {
    let gam = christoffel(g, l, p)?;
    let mut dgam = [[[[0.0; 3]; 3]; 3]; 3]; // dgam[e][a][b][c] = ∂_e Γ^a_bc
    for (e, de) in dgam.iter_mut().enumerate() {
        let mut pp = *p;
        let mut pm = *p;
        pp[e] += h;
        pm[e] -= h;
        let gp = christoffel(g, l, &pp)?;
        let gmn = christoffel(g, l, &pm)?;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    de[a][b][c] = (gp[a][b][c] - gmn[a][b][c]) / (2.0 * h);
                }
            }
        }
    }
    let mut r = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let mut s = dgam[c][a][d][b] - dgam[d][a][c][b];
                    for e in 0..3 {
                        s += gam[a][c][e] * gam[e][d][b] - gam[a][d][e] * gam[e][c][b];
                    }
                    r[a][b][c][d] = s;
                }
            }
        }
    }
    Ok(r)
}

/// Sectional curvature of the plane spanned by two frame vectors, computed
/// entirely in coordinates.
pub fn sectional_curvature_fd(
    g: &GroupModel,
    l: f64,
    p: &Point,
    u: &FrameVector,
    v: &FrameVector,
    h: f64,
) -> Result<f64> {
    let uc = g.frame_to_coordinate(p, u)?;
    let vc = g.frame_to_coordinate(p, v)?;
    let (gm, _) = metric_with_partials(g, l, p)?;
    let r = coordinate_riemann(g, l, p, h)?;
    let ip = |x: &[f64; 3], y: &[f64; 3]| -> f64 {
        let mut s = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                s += gm[a][b] * x[a] * y[b];
            }
        }
        s
    };
    // R(u, v) u
    let mut ruvu = [0.0; 3];
    for (a, o) in ruvu.iter_mut().enumerate() {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    *o += r[a][b][c][d] * uc[c] * vc[d] * uc[b];
                }
            }
        }
    }
    let gram = ip(&uc, &uc) * ip(&vc, &vc) - ip(&uc, &vc).powi(2);
    if !(gram > 0.0) {
        return Err(Error::DegenerateSpan);
    }
    Ok(-ip(&ruvu, &vc) / gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::Geometry;
    use crate::groups::BUILTIN_GROUPS;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frame_tables_match_coordinate_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for name in BUILTIN_GROUPS {
            let geo = Geometry::builtin(name).unwrap();
            for l in [1.0, 2.0, 5.0] {
                let at = geo.at(l).unwrap();
                for _ in 0..5 {
                    let p = geo.group.domain().sample([rng.gen(), rng.gen(), rng.gen()]);
                    let u = FrameVector([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
                    let v = FrameVector([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
                    let k_frame = at.sectional_curvature(&u, &v).unwrap();
                    let k_fd = sectional_curvature_fd(&geo.group, l, &p, &u, &v, 1e-4).unwrap();
                    let rel = (k_frame - k_fd).abs() / k_frame.abs().max(1e-3);
                    assert!(rel < 1e-4, "{name} L={l}: {k_frame} vs {k_fd}");
                }
            }
        }
    }

    #[test]
    fn oracle_settles_the_affine_x1_x3_plane() {
        let geo = Geometry::builtin("affine").unwrap();
        let reference = geo.with_reference_curvature().unwrap();
        for l in [2.0, 5.0] {
            let k_fd = sectional_curvature_fd(&geo.group, l, &[1.3, 0.2, -0.5], &FrameVector::X1, &FrameVector::X3, 1e-4).unwrap();
            let derived = geo.at(l).unwrap().sectional_curvature(&FrameVector::X1, &FrameVector::X3).unwrap();
            let stated = reference.at(l).unwrap().sectional_curvature(&FrameVector::X1, &FrameVector::X3).unwrap();
            assert!((derived - (l / 4.0 - 1.0)).abs() < 1e-12);
            assert!((stated + 0.75 * l).abs() < 1e-12);
            assert!((k_fd - derived).abs() < 1e-5);
            assert!((k_fd - stated).abs() > 0.1);
        }
    }
}
