use std::sync::Arc;

use gmtlab::*;
use proptest::prelude::*;

fn disk(r: f64, h: f64) -> Arc<Region> {
    Region::new(make_ball(&[0.0, 0.0], r, h).unwrap()).unwrap()
}

fn random_function(region: &Arc<Region>, values: &[f64], traces: &[f64]) -> GridFunction {
    let mask = region.domain().mask();
    let v: Vec<f64> = mask.iter().enumerate().map(|(i, &m)| if m { values[i % values.len()] } else { 0.0 }).collect();
    let t: Vec<f64> = (0..region.cloud().len()).map(|i| traces[i % traces.len()]).collect();
    GridFunction::from_parts(region, v, Some(t)).unwrap()
}

/// Smooth test functions `a + b x + c y^2`, all with a Lipschitz bound.
fn smooth(region: &Arc<Region>, a: f64, b: f64, c: f64) -> GridFunction {
    GridFunction::from_fn(region, |p| a + b * p[0] + c * p[1] * p[1])
        .unwrap()
        .with_modulus(Modulus::Lipschitz(b.abs() + 2.0 * c.abs()))
        .unwrap()
}

fn global_cells(d: &GridDomain) -> Vec<[i64; 3]> {
    let l = d.lattice();
    d.cells().map(|f| l.global(l.unflat(f))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn nested_balls_have_ordered_volumes(r in 0.2f64..1.0, grow in 0.0f64..0.5) {
        let h = 1.0 / 32.0;
        let a = make_ball(&[0.0, 0.0], r, h).unwrap();
        let b = make_ball(&[0.0, 0.0], r + grow, h).unwrap();
        prop_assert!(global_cells(&a).iter().all(|&g| b.contains_global(g)));
        prop_assert!(a.volume() <= b.volume());
    }

    #[test]
    fn dilation_composes_inside_single_dilation(a in 0.05f64..0.3, b in 0.05f64..0.3) {
        let h = 1.0 / 32.0;
        let d = make_box(&[0.0, 0.0], &[0.5, 0.75], h).unwrap();
        let twice = d.dilate(a).unwrap().dilate(b).unwrap();
        let once = d.dilate(a + b).unwrap();
        prop_assert!(global_cells(&twice).iter().all(|&g| once.contains_global(g)));
        let perimeter_bound = 2.0 * (0.5 + 0.75) + 2.0 * std::f64::consts::PI * (a + b);
        prop_assert!(once.volume() - twice.volume() <= 4.0 * h * perimeter_bound);
        prop_assert!(d.dilate(a).unwrap().volume() <= once.volume());
    }

    #[test]
    fn box_boundary_weight_is_exact(i in 1usize..40, j in 1usize..40) {
        let h = 1.0 / 16.0;
        let (a, b) = (i as f64 * h, j as f64 * h);
        let cloud = extract_boundary(&make_box(&[0.0, 0.0], &[a, b], h).unwrap()).unwrap();
        prop_assert_eq!(cloud.total_weight(), 2.0 * (a + b));
    }

    #[test]
    fn partitions_are_valid_and_preserve_weight(a in 0.3f64..1.5, b in 0.3f64..1.5, delta in 0.05f64..0.5) {
        let cloud = BoundaryCloud::ellipse([0.1, -0.2], a, b, 1.0 / 512.0).unwrap();
        let p = build_partition(&cloud, 1.0, delta).unwrap();
        p.validate().unwrap();
        let total: f64 = p.cells.iter().map(|c| c.hm_est).sum();
        prop_assert!((total - cloud.total_weight()).abs() <= 1e-12 * cloud.total_weight());
    }

    #[test]
    fn estimate_is_non_increasing_in_delta(r in 0.3f64..1.5) {
        let cloud = BoundaryCloud::circle([0.0, 0.0], r, 1.0 / 1024.0).unwrap();
        let values: Vec<f64> = [0.4, 0.2, 0.1, 0.05].iter().map(|&d| estimate_hm(&cloud, 1.0, d).unwrap().value).collect();
        prop_assert!(values.windows(2).all(|w| w[1] >= w[0]), "{values:?}");
    }

    #[test]
    fn dropping_a_redundant_cover_cell_never_increases_the_sum(r in 0.3f64..1.5, pick in 0usize..1000) {
        let cloud = BoundaryCloud::circle([0.0, 0.0], r, 1.0 / 256.0).unwrap();
        let mut cover = box_covering(&cloud, 1.0, 0.2).unwrap();
        let before = cover_sum(&cover).unwrap();
        let extra = cover.cells[pick % cover.cells.len()].clone();
        cover.cells.push(extra);
        prop_assert!(cover.covers(&cloud));
        let with_extra = cover_sum(&cover).unwrap();
        cover.cells.pop();
        prop_assert!(cover.covers(&cloud));
        prop_assert!(before <= with_extra);
    }

    #[test]
    fn minimum_obeys_the_lattice_inequality(
        u in prop::collection::vec(-1.0f64..1.0, 7..31),
        v in prop::collection::vec(-1.0f64..1.0, 7..31),
        t in prop::collection::vec(-1.0f64..1.0, 5..13),
    ) {
        let region = disk(1.0, 1.0 / 16.0);
        let (u, v) = (random_function(&region, &u, &t), random_function(&region, &v, &u));
        let m = pointwise_min(&u, &v).unwrap();
        prop_assert!(grad_l1(&m) <= grad_l1(&u) + grad_l1(&v) + 1e-9);
    }

    #[test]
    fn absolute_value_does_not_increase_gradient(
        u in prop::collection::vec(-1.0f64..1.0, 7..31),
        t in prop::collection::vec(-1.0f64..1.0, 5..13),
    ) {
        let region = disk(1.0, 1.0 / 16.0);
        let u = random_function(&region, &u, &t);
        prop_assert!(grad_l1(&abs_value(&u).unwrap()) <= grad_l1(&u) + 1e-12);
    }

    #[test]
    fn mollification_conserves_mass_and_contracts_variation(
        u in prop::collection::vec(-1.0f64..1.0, 7..31),
        k in prop::sample::select(vec![4.0, 8.0, 16.0]),
    ) {
        let region = disk(0.5, 1.0 / 64.0);
        let f = random_function(&region, &u, &[0.0]).extend_by_zero();
        let g = mollify(&f, k).unwrap();
        let scale: f64 = f.values().iter().map(|x| x.abs()).sum::<f64>() * f.lattice().cell_volume();
        prop_assert!((g.mass() - f.mass()).abs() <= 1e-12 * scale);
        prop_assert!(total_variation(&g) <= total_variation(&f) + 1e-6);
    }

    #[test]
    fn truncation_is_sandwiched(a in 0.5f64..2.0, b in -0.5f64..0.5, c in 0.0f64..0.5) {
        let region = disk(1.0, 1.0 / 64.0);
        let u = smooth(&region, a, b, c);
        let partition = build_partition(&region.calibrated_cloud().unwrap(), 1.0, 0.25).unwrap();
        let s = 0.05;
        let t = truncate(&u, &partition, 0.1, s).unwrap();
        let reach = 2.0 * partition.rd_max() + s + region.h();
        let d_ext = region.domain().squared_distance_to_exterior();
        for cell in region.domain().cells() {
            let (vu, vt) = (u.values()[cell], t.function.values()[cell]);
            prop_assert!(0.0 <= vt && vt <= vu);
            if d_ext[cell].sqrt() > reach {
                prop_assert_eq!(vt, vu);
            }
        }
    }

    #[test]
    fn verdicts_are_scale_invariant(a in 0.1f64..2.0, b in -1.0f64..1.0, c in -1.0f64..1.0, lambda in 0.01f64..100.0) {
        let region = disk(1.0, 1.0 / 32.0);
        let u = smooth(&region, a, b, c);
        let v = u.scaled(lambda).unwrap();
        let pairs = [
            (check_mazya(&u, MazyaMode::Optimal).unwrap(), check_mazya(&v, MazyaMode::Optimal).unwrap()),
            (check_mazya(&u, MazyaMode::PaperFactor).unwrap(), check_mazya(&v, MazyaMode::PaperFactor).unwrap()),
            (check_mazya_l2(&u, L2Constant::Auto).unwrap(), check_mazya_l2(&v, L2Constant::Auto).unwrap()),
            (check_bv_bound(&u).unwrap(), check_bv_bound(&v).unwrap()),
            (check_sobolev(&u.extend_by_zero()).unwrap(), check_sobolev(&v.extend_by_zero()).unwrap()),
        ];
        for (x, y) in pairs {
            prop_assert_eq!(x.holds, y.holds);
            prop_assert!((x.ratio - y.ratio).abs() <= 1e-9 * x.ratio.abs().max(1e-300), "{} {} vs {}", x.inequality_id, x.ratio, y.ratio);
        }
    }

    #[test]
    fn reports_are_translation_invariant(i in -20i64..20, j in -20i64..20, b in -1.0f64..1.0) {
        let h = 1.0 / 32.0;
        let base = make_ball(&[0.0, 0.0], 1.0, h).unwrap();
        let shift = [i as f64 * h, j as f64 * h];
        let moved = base.translated([i, j, 0]);
        let (ra, rb) = (Region::new(base).unwrap(), Region::new(moved).unwrap());
        let f = |x: f64, y: f64| 1.0 + b * x + x * y;
        let u = GridFunction::from_fn(&ra, |p| f(p[0], p[1])).unwrap();
        let v = GridFunction::from_fn(&rb, |p| f(p[0] - shift[0], p[1] - shift[1])).unwrap();
        let pairs = [
            (check_mazya(&u, MazyaMode::PaperFactor).unwrap(), check_mazya(&v, MazyaMode::PaperFactor).unwrap()),
            (check_bv_bound(&u).unwrap(), check_bv_bound(&v).unwrap()),
            (check_isoperimetric(&ra).unwrap(), check_isoperimetric(&rb).unwrap()),
        ];
        for (x, y) in pairs {
            prop_assert_eq!(x.holds, y.holds);
            prop_assert!((x.lhs - y.lhs).abs() <= 1e-12 * x.lhs.abs(), "{}", x.inequality_id);
            prop_assert!((x.rhs - y.rhs).abs() <= 1e-12 * x.rhs.abs(), "{}", x.inequality_id);
        }
    }

    #[test]
    fn covering_factor_only_raises_the_bound(a in 0.0f64..2.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
        let region = disk(1.0, 1.0 / 32.0);
        let u = smooth(&region, a, b, c);
        let optimal = check_mazya(&u, MazyaMode::Optimal).unwrap();
        let covering = check_mazya(&u, MazyaMode::PaperFactor).unwrap();
        prop_assert!(covering.rhs >= optimal.rhs);
    }

    #[test]
    fn suites_round_trip_through_json(h in 0.01f64..0.1, r in 0.5f64..2.0, eps in 0.05f64..0.2) {
        let text = format!(
            r#"{{"name":"rt","entries":[{{"domain":{{"kind":"ball","params":{{"r":{r}}},"h":{h}}},
            "function":{{"expr":"1 - x","lipschitz":1}},"checks":["mazya","bv_bound"],"modes":["optimal"],
            "params":{{"eps":{eps},"s":0.01,"k_list":[4,8]}}}}]}}"#
        );
        let spec = parse_suite_str(&text).unwrap();
        prop_assert_eq!(parse_suite_str(&spec.to_json()).unwrap(), spec);
    }
}

#[test]
fn volume_error_is_first_order() {
    for j in 4..9 {
        let h = 1.0 / f64::from(1u32 << j);
        let err = (make_ball(&[0.1, 0.03], 1.0, h).unwrap().volume() - std::f64::consts::PI).abs();
        assert!(err <= 2.0 * std::f64::consts::PI * h, "h = {h}: error {err}");
    }
}

#[test]
fn mollified_variation_rises_toward_the_smooth_value() {
    let region = disk(0.5, 1.0 / 128.0);
    let u = GridFunction::from_fn(&region, |p| 1.0 - 4.0 * (p[0] * p[0] + p[1] * p[1])).unwrap();
    let f = u.extend_by_zero();
    let tv = total_variation(&f);
    let tvs: Vec<f64> = [4.0, 8.0, 16.0].iter().map(|&k| total_variation(&mollify(&f, k).unwrap())).collect();
    assert!(tvs.windows(2).all(|w| w[1] >= w[0]), "{tvs:?}");
    assert!(tvs.iter().all(|&t| t <= tv + 1e-6));
    assert!(tv <= tvs[2] * 1.01, "{tv} vs {tvs:?}");
}

#[test]
fn search_never_decreases() {
    let region = disk(1.0, 1.0 / 16.0);
    let u = GridFunction::constant(&region, 1.0).unwrap();
    for seed in 0..4 {
        let r = quotient_search(&u, 30, 0.1, seed).unwrap();
        assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
        assert!(r.within_bound);
    }
}
