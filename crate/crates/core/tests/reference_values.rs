//! Values frozen from independent computations: mpmath for the special
//! functions and cvxpy (Clarabel) for the relaxations. The scripts live in
//! `tools/oracles/`.

mod common;

use common::{cplx2, real2, real3};
use geomean_core::instance::{gen_icosahedral, gen_kantorovich, gen_monomial};
use geomean_core::oracle::{cube_max, grid_max_sphere, local_max_sphere, SYMMETRIC_RESTARTS};
use geomean_core::sdp::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use geomean_core::sos::{solve_optsos, solve_srel};
use geomean_core::special::{c_nk, expected_log_genchisq, kantorovich_bound, l_r, monomial_max, EigenvalueProfile};
use geomean_core::{solve_optsdp, Field, GraphSpec, HermitianMatrix, SeedStream};

fn assert_close(got: f64, want: f64, rel: f64, what: &str) {
    let err = (got - want).abs() / want.abs().max(1e-300);
    assert!(err <= rel, "{what}: got {got}, want {want}, relative error {err:e}");
}

#[test]
fn loss_constants_match_mpmath() {
    let table = [
        (2, 0.693_147_180_559_945_3, 0.306_852_819_440_054_7),
        (3, 0.901_387_711_331_890_3, 0.401_387_711_331_890_3),
        (4, 1.0, 0.447_038_972_213_442_7),
        (8, 1.140_186_152_773_388, 0.513_415_601_177_306_9),
        (17, 1.210_387_499_544_627_5, 0.547_515_649_172_777_1),
        (1000, 1.269_362_512_128_278_2, 0.576_715_581_568_207_9),
    ];
    for (r, real, complex) in table {
        assert_close(l_r(Field::Real, r).unwrap(), real, 1e-13, &format!("L_{r}(R)"));
        assert_close(l_r(Field::Complex, r).unwrap(), complex, 1e-13, &format!("L_{r}(C)"));
    }
}

#[test]
fn expected_log_matches_frullani_quadrature() {
    let table: [(&[f64], f64); 7] = [
        (&[3.0, 2.0, 1.0], 1.593_950_911_865_179_5),
        (&[0.5, 1.7, 2.2, 4.0], 1.959_821_054_475_580_4),
        (&[2.0, 0.5, 0.5, 0.5], 1.071_223_788_304_188_5),
        (&[0.25, 0.25, 1.5], 0.416_623_609_666_975_7),
        (&[2.0, 2.0, 1.0, 1.0], 1.650_195_612_858_685_9),
        (&[3.0, 1.0, 1.0, 0.5], 1.527_666_950_614_352_4),
        (&[1.0, 1.0, 1.0, 1.0], 1.256_117_668_431_800_5),
    ];
    for (lams, want) in table {
        let got = expected_log_genchisq(&EigenvalueProfile::new(lams).unwrap()).unwrap();
        assert_close(got, want, 1e-11, &format!("E ln Z for {lams:?}"));
    }
}

#[test]
fn hierarchy_constant_matches_mpmath() {
    let table = [
        (2, 2, 0.287_682_072_451_780_9),
        (2, 5, 0.220_037_921_314_570_5),
        (3, 4, 0.339_430_506_096_195),
        (4, 2, 0.435_739_532_045_462_1),
        (5, 10, 0.344_382_836_508_877_5),
        (6, 50, 0.186_251_738_189_600_8),
    ];
    for (n, k, want) in table {
        assert_close(c_nk(n, k).unwrap(), want, 1e-11, &format!("C({n},{k})"));
    }
}

#[test]
fn relaxation_matches_cvxpy() {
    let cases = [
        ("real2", real2(), 1.967_480_421_954),
        ("real3", real3(), 1.142_405_539_839),
        ("cplx2", cplx2(), 0.788_675_134_668),
    ];
    for (name, inst, want) in cases {
        let r = solve_optsdp(&inst, 1e-9, DEFAULT_MAX_ITER).unwrap();
        assert!(r.converged, "{name}");
        assert_close(r.value, want, 1e-8, name);
        assert!(r.upper_certificate >= want * (1.0 - 1e-10), "{name}: certificate below optimum");
    }
    // cplx2 has the closed form (3 + sqrt 3) / 6.
    assert!((0.788_675_134_668 - (3.0 + 3f64.sqrt()) / 6.0).abs() < 1e-10);
}

#[test]
fn hierarchy_levels_match_cvxpy() {
    let cases = [
        ("real2", real2(), 2, 1.967_480_421_958, 1.997_250_101_963),
        ("real2", real2(), 3, 1.967_480_421_961, 1.967_480_421_962),
        ("real3", real3(), 2, 1.142_405_539_837, 1.252_469_051_782),
        ("cplx2", cplx2(), 2, 0.788_675_134_529, 0.788_675_134_583),
        ("cplx2", cplx2(), 3, 0.793_700_525_976, 0.793_700_525_950),
    ];
    for (name, inst, k, optsos, srel) in cases {
        let a = solve_optsos(&inst, k, 1e-8, 2000).unwrap();
        let b = solve_srel(&inst, k, 1e-8, 2000).unwrap();
        assert!(a.converged && b.converged, "{name} k={k}");
        assert_close(a.value, optsos, 1e-7, &format!("{name} optsos_{k}"));
        assert_close(b.value, srel, 1e-7, &format!("{name} srel_{k}"));
    }
}

#[test]
fn level_one_srel_matches_cvxpy() {
    for (name, inst, want) in [("real2", real2(), 2.039_344_662_902), ("real3", real3(), 1.303_579_935_844)] {
        let r = solve_srel(&inst, 1, 1e-8, 2000).unwrap();
        assert_close(r.value, want, 1e-7, name);
    }
}

#[test]
fn monomial_relaxation_is_exact() {
    for beta in [vec![2u32, 1], vec![1, 1], vec![3, 1, 2], vec![1, 2, 2, 1]] {
        let r = solve_optsdp(&gen_monomial(&beta).unwrap(), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_close(r.value, monomial_max(&beta).unwrap(), 1e-5, &format!("{beta:?}"));
    }
    assert_close(monomial_max(&[2, 1]).unwrap(), 2f64.powf(2.0 / 3.0) / 3.0, 1e-15, "(2,1)");
}

#[test]
fn kantorovich_relaxation_is_exact() {
    for spectrum in [vec![4.0, 1.0], vec![9.0, 2.0, 1.0], vec![3.0, 3.0, 1.5, 0.5]] {
        let inst = gen_kantorovich(&HermitianMatrix::diagonal(&spectrum, Field::Real)).unwrap();
        let r = solve_optsdp(&inst, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let (hi, lo) = (spectrum[0], *spectrum.last().unwrap());
        assert_close(r.value, kantorovich_bound(hi, lo).unwrap().sqrt(), 1e-5, &format!("{spectrum:?}"));
    }
}

#[test]
fn icosahedral_bounds_match_reference_table() {
    let reference = [1.27454, 1.16814, 1.10292, 1.05821, 1.02534, 1.00000];
    let inst = gen_icosahedral();
    for (k, want) in (1..=6).zip(reference) {
        let r = solve_optsos(&inst, k, 1e-6, 2000).unwrap();
        assert!(r.converged, "k={k}");
        assert!((r.value - want).abs() <= 1e-3, "k={k}: {} vs {want}", r.value);
    }
}

#[test]
fn icosahedral_maximum_is_one() {
    let inst = gen_icosahedral();
    let r = local_max_sphere(&inst, SYMMETRIC_RESTARTS, &SeedStream::new(3), &[]).unwrap();
    assert!((r.best_value - 1.0).abs() < 1e-8, "{}", r.best_value);
    assert!(grid_max_sphere(&inst, 512).unwrap() >= 0.999);
    assert!(grid_max_sphere(&gen_monomial(&[1, 1]).unwrap(), 256).unwrap() >= 0.4999);
}

#[test]
fn maxcut_enumeration() {
    assert_eq!(cube_max(&GraphSpec::complete(4)).unwrap(), 2.0 / 3.0);
    // Triangular prism: maximum cut 7 of 9 edges, value 4 * 7 / 36.
    assert!((cube_max(&GraphSpec::prism(3)).unwrap() - 7.0 / 9.0).abs() < 1e-15);
}
