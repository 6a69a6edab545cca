use std::f64::consts::PI;

use gmtlab::*;

fn factorial(n: u64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[test]
fn ball_volumes_match_gamma_closed_forms() {
    // Integer d: pi^(d/2) / (d/2)! or the double-factorial form for odd d.
    for d in 0u64..=8 {
        let expected = if d % 2 == 0 {
            PI.powi(d as i32 / 2) / factorial(d / 2)
        } else {
            let m = (d - 1) / 2;
            // Gamma(m + 3/2) = (2m + 2)! sqrt(pi) / (4^(m+1) (m+1)!)
            let gamma = factorial(2 * m + 2) * PI.sqrt() / (4f64.powi(m as i32 + 1) * factorial(m + 1));
            PI.powf(d as f64 / 2.0) / gamma
        };
        let got = unit_ball_volume(d as f64).unwrap();
        assert!((got - expected).abs() <= 1e-12 * expected, "d = {d}: {got} vs {expected}");
    }
}

#[test]
fn isoperimetric_constant_matches_disk_and_ball() {
    // Equality for balls: |B|^(1/q) = c(n) * surface area.
    for n in 2..=4usize {
        let nf = n as f64;
        let w = unit_ball_volume(nf).unwrap();
        let q = nf / (nf - 1.0);
        let c = iso_constant(n).unwrap();
        assert!((w.powf(1.0 / q) - c * nf * w).abs() < 1e-12);
    }
    assert_eq!(sobolev_exponent(2).unwrap(), 2.0);
}

/// Bump weights at integer offsets, normalized, written out directly.
fn bump_weights(k: f64, h: f64, reach: i64) -> Vec<((i64, i64), f64)> {
    let mut w = Vec::new();
    for j in -reach..=reach {
        for i in -reach..=reach {
            let t = ((i * i + j * j) as f64) * h * h * k * k;
            if t < 1.0 {
                w.push(((i, j), (-1.0 / (1.0 - t)).exp()));
            }
        }
    }
    let total: f64 = w.iter().map(|(_, x)| x).sum();
    w.into_iter().map(|(o, x)| (o, x / total)).collect()
}

#[test]
fn mollify_matches_direct_sum() {
    let h = 1.0 / 32.0;
    let d = make_box(&[0.0, 0.0], &[0.5, 0.25], h).unwrap();
    let region = Region::new(d).unwrap();
    let f = GridFunction::from_fn(&region, |p| 1.0 + p[0] - 2.0 * p[1] * p[1]).unwrap().extend_by_zero();
    let k = 8.0;
    let g = mollify(&f, k).unwrap();
    let reach = (1.0 / (k * h)).ceil() as i64;
    let w = bump_weights(k, h, reach);
    let gl = g.lattice();
    for idx in gl.indices() {
        let c = gl.global(idx);
        let direct: f64 = w.iter().map(|((i, j), x)| x * f.at_global([c[0] - i, c[1] - j, 0])).sum();
        let got = g.values()[gl.flat(idx)];
        assert!((got - direct).abs() < 1e-12, "{c:?}: {got} vs {direct}");
    }
}

#[test]
fn gradient_of_linear_functions_is_exact() {
    let h = 1.0 / 16.0;
    let region = Region::new(make_box(&[0.0, 0.0], &[1.0, 1.0], h).unwrap()).unwrap();
    let x = GridFunction::from_fn(&region, |p| p[0]).unwrap();
    assert!((grad_l1(&x) - 1.0).abs() < 1e-12);
    let xy = GridFunction::from_fn(&region, |p| p[0] + p[1]).unwrap();
    assert!((grad_l1(&xy) - 2f64.sqrt()).abs() < 1e-12);
    assert!((grad_l2_squared(&xy) - 2.0).abs() < 1e-12);
}

#[test]
fn norms_of_constants() {
    let h = 1.0 / 16.0;
    let region = Region::new(make_box(&[0.0, 0.0], &[2.0, 0.5], h).unwrap()).unwrap();
    let u = GridFunction::constant(&region, 3.0).unwrap();
    assert!((lq_norm(&u, 2.0).unwrap() - 3.0).abs() < 1e-12);
    assert!((lq_norm(&u, 1.0).unwrap() - 3.0).abs() < 1e-12);
    let b = boundary_integral(&u, BoundaryWeights::Raw).unwrap();
    assert!((b.value - 3.0 * 5.0).abs() < 1e-12);
}

#[test]
fn steiner_quotients_follow_the_box_polynomial() {
    // |R + B_eps| = ab + 2(a + b) eps + pi eps^2 for an a x b rectangle.
    let h = 1.0 / 256.0;
    let (a, b) = (1.0, 0.5);
    let est = minkowski_steiner(&make_box(&[0.0, 0.0], &[a, b], h).unwrap(), &[0.2, 0.1, 0.05]).unwrap();
    for p in &est.points {
        let exact = 2.0 * (a + b) + PI * p.eps;
        assert!((p.quotient - exact).abs() < 0.02 * exact, "eps {}: {} vs {exact}", p.eps, p.quotient);
    }
    assert!((est.extrapolated.unwrap() - 3.0).abs() < 0.02 * 3.0);
}

#[test]
fn shell_mass_closed_form_in_the_plane() {
    let (r, s, height) = (0.3, 0.1, 2.0);
    let exact = height / s * PI * ((r + s) * (r + s) - r * r);
    assert!((shell_mass(r, s, height, 2).unwrap() - exact).abs() < 1e-12);
    assert!((shell_mass_limit(r, height, 2).unwrap() - height * 2.0 * PI * r).abs() < 1e-12);
}

#[test]
fn square_boundary_length() {
    let cloud = extract_boundary(&make_box(&[0.0, 0.0], &[1.0, 1.0], 1.0 / 256.0).unwrap()).unwrap();
    let est = estimate_hm(&cloud, 1.0, 0.05).unwrap();
    assert!((est.value - 4.0).abs() < 0.03 * 4.0, "{}", est.value);
}
