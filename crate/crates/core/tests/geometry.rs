use dmlab::bilinear::{
    bilinear_norm, duality_check, multilinear_bound_check, normalized_quartic, numerical_support, quasilocality_check,
    time_rule, Bump,
};
use dmlab::bounds::Constants;
use dmlab::functionals::{TimeWeight, Window};
use dmlab::propagator::{gaussian_exact, ChirpedGaussian};
use dmlab::suite::{negative_control_fields, quasilocal_fields, separated_pair};
use dmlab::{Complex64, Error, Field, Grid, QuadratureRule, Space};

fn unit(re: f64, im: f64, grid: Grid) -> Field {
    gaussian_exact(&ChirpedGaussian::with_mass(Complex64::new(re, im), 1.0).unwrap(), 0.0, grid).unwrap()
}

fn x_grid() -> Grid {
    Grid::new(2048, 40.0).unwrap()
}

#[test]
fn quasilocal_configurations_vanish() {
    let rule = QuadratureRule::gauss_legendre(32).unwrap();
    for (space, grid) in [(Space::Position, x_grid()), (Space::Frequency, Grid::new(512, 160.0).unwrap())] {
        let [a, b, c, d] = quasilocal_fields(space, grid).unwrap();
        for which in 0..4 {
            // put the far field in every slot
            let mut f = [&b, &c, &d, &b];
            f[which] = &a;
            let v = quasilocality_check(f, 1.0, which, space, &rule).unwrap();
            assert!(v <= 1e-8, "{space} slot {which}: {v:e}");
        }
        let [a, b, c, d] = negative_control_fields(space, grid).unwrap();
        assert!(normalized_quartic([&a, &b, &c, &d], &rule).unwrap() >= 1e-3);
    }
}

/// With `f1` on `[2.5, 3.5]` and partners in `[0.4, 1]` and `[-1, -0.4]`,
/// `y2 - y3 + y4` never reaches the support of `f1`, so the quartic still
/// vanishes even though the `3s` geometry is violated. A useful control
/// needs partners that can reach it.
#[test]
fn unreachable_control_still_vanishes() {
    let rule = QuadratureRule::gauss_legendre(32).unwrap();
    let g = x_grid();
    let f1 = Bump::new(Space::Position, 2.5, 3.5).build(g).unwrap();
    let f2 = Bump::new(Space::Position, 0.4, 1.0).build(g).unwrap();
    let f3 = Bump::new(Space::Position, -1.0, -0.4).build(g).unwrap();
    let v = normalized_quartic([&f1, &f2, &f3, &f2], &rule).unwrap();
    assert!(v < 1e-8, "{v:e}");
    assert!(matches!(
        quasilocality_check([&f1, &f2, &f3, &f2], 1.0, 0, Space::Position, &rule),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn numerical_support_sits_inside_the_declared_interval() {
    let g = x_grid();
    for sharpness in [3.0, 6.0, 9.0] {
        let f = Bump::new(Space::Position, 1.0, 2.0).with_sharpness(sharpness).build(g).unwrap();
        let s = numerical_support(&f, Space::Position);
        assert_eq!(s.intervals.len(), 1);
        let (a, b) = s.intervals[0];
        assert!(a >= 1.0 - 1e-12 && b <= 2.0 + 1e-12, "{a} {b}");
    }
}

#[test]
fn duality_needs_the_reversed_window() {
    let g = Grid::new(1024, 40.0).unwrap();
    let (f1, f2) = (unit(0.8, -1.0, g), unit(1.5, 0.7, g));
    let w = Window::new(0.1, 1.0).unwrap();
    let o = duality_check(&f1, &f2, w, 16, 8).unwrap();
    assert!(o.rel_err < 1e-10, "{o:?}");

    // the same identity over the positive window misses for chirped data
    let (c1, c2) = (f1.dual_inverse().unwrap(), f2.dual_inverse().unwrap());
    let positive = Window::new(1.0 / (4.0 * w.end), 1.0 / (4.0 * w.start)).unwrap();
    let rule = time_rule(positive, TimeWeight::Unit, 16, 8).unwrap();
    let wrong = std::f64::consts::SQRT_2 * bilinear_norm(&c1, &c2, &rule).unwrap();
    assert!((wrong - o.lhs).abs() > 1e-3 * o.lhs, "{wrong} vs {}", o.lhs);
}

#[test]
fn bilinear_norm_is_symmetric() {
    let g = Grid::new(512, 40.0).unwrap();
    let rule = time_rule(Window::unit(), TimeWeight::Unit, 16, 2).unwrap();
    let (f1, f2) = (unit(1.0, -0.5, g), unit(0.7, 1.0, g).translate(1.5));
    let a = bilinear_norm(&f1, &f2, &rule).unwrap();
    let b = bilinear_norm(&f2, &f1, &rule).unwrap();
    assert!((a - b).abs() < 1e-12 * a);
}

#[test]
fn fourier_pair_at_distance_two() {
    let g = Grid::new(2048, 512.0).unwrap();
    let (f1, f2) = separated_pair(Space::Frequency, 2.0, Bump::DEFAULT_SHARPNESS, g).unwrap();
    let rule = time_rule(Window::new(-20.0, 20.0).unwrap(), TimeWeight::Unit, 16, 40).unwrap();
    let v = bilinear_norm(&f1, &f2, &rule).unwrap();
    assert!(v <= f1.norm() * f2.norm() / 4f64.sqrt() + 1e-6, "{v}");
}

#[test]
fn multilinear_bound_falls_back_to_the_global_constant() {
    let g = Grid::new(256, 40.0).unwrap();
    let rule = QuadratureRule::gauss_legendre(32).unwrap();
    let (a, b) = (unit(1.0, 0.0, g), unit(0.8, -1.5, g).scale(Complex64::new(0.0, 2.0)));
    let m = multilinear_bound_check([&a, &b, &a, &b], (0, 1), Space::Position, &rule).unwrap();
    assert_eq!(m.dist, 0.0);
    assert!((m.bound - Constants::get().p1_upper * 4.0).abs() < 1e-12);
    assert!(m.ok);
}
