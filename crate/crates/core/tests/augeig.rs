use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use utm_core::augeig::{diagonalised_inverse_check, eigen_relation_residual, type_i_failure_probe, type_ii_vanishing, AugOptions};
use utm_core::contour::{build_contour, ContourOptions};
use utm_core::datum::{builtin_datum, check_compatibility, ProblemId, BUILTIN_NAMES};
use utm_core::spectral::{Sign, SpectralContext};
use utm_core::transform::TransformPair;
use utm_core::C64;

fn problem_for(name: &str) -> Option<ProblemId> {
    match &name[..3] {
        "fi_" => Some(ProblemId::FiniteIntervalKdV),
        "hl_" => Some(ProblemId::HalfLineKdV),
        _ => None,
    }
}

fn contour_points(p: ProblemId, sign: Sign, n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let opts = ContourOptions { indent_radius: Some(0.5), ..ContourOptions::default() };
    let path = build_contour(p, sign, 10.0, opts).unwrap();
    let segs: Vec<_> = path.segments().collect();
    (0..n)
        .map(|_| {
            let s = segs[rng.gen_range(0..segs.len())];
            let (a, b) = s.param_range();
            s.point(a + (b - a) * rng.gen::<f64>())
        })
        .collect()
}

#[test]
fn eigen_relation_holds_for_builtins() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in BUILTIN_NAMES {
        let Some(p) = problem_for(name) else { continue };
        let f = builtin_datum::<f64>(name).unwrap();
        if !check_compatibility(&f, p, 1e-12).unwrap().passed {
            continue;
        }
        let mut worst: f64 = 0.0;
        for sign in [Sign::Plus, Sign::Minus] {
            for z in contour_points(p, sign, 20, &mut rng) {
                worst = worst.max(eigen_relation_residual(p, &f, z, sign).unwrap().norm());
            }
        }
        eprintln!("{name}: eigen residual {worst:e}");
        assert!(worst <= 1e-9);
    }
}

#[test]
fn eigen_relation_against_kernel_quadrature() {
    // Both transforms by direct quadrature of the kernel instead of closed forms.
    let p = ProblemId::FiniteIntervalKdV;
    let f = std::sync::Arc::new(builtin_datum::<f64>("fi_poly1").unwrap());
    let sf = std::sync::Arc::new(utm_core::augeig::apply_s(f.as_ref()).unwrap());
    let pair = TransformPair::new(p, Default::default()).unwrap();
    let fam = utm_core::augeig::RemainderFamily::new(p).unwrap();
    let tr = utm_core::augeig::BoundaryTraces::of(f.as_ref(), p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for sign in [Sign::Plus, Sign::Minus] {
        for z in contour_points(p, sign, 10, &mut rng) {
            let a = pair.forward_by_kernel_quadrature(&sf, z, sign).unwrap();
            let b = pair.forward_by_kernel_quadrature(&f, z, sign).unwrap();
            worst = worst.max((a - z * z * z * b - fam.remainder(sign, z, &tr)).norm());
        }
    }
    eprintln!("fi_poly1 by kernel quadrature: {worst:e}");
    assert!(worst <= 1e-9);
    let _ = SpectralContext::new(p, f).unwrap();
}

#[test]
fn type_ii_integrals_vanish() {
    let opts = AugOptions::default();
    for (p, name, xs) in [
        (ProblemId::FiniteIntervalKdV, "fi_poly1", (1..=10).map(|k| k as f64 / 11.0).collect::<Vec<_>>()),
        (ProblemId::HalfLineKdV, "hl_exp1", (1..=10).map(|k| k as f64 * 0.5).collect()),
    ] {
        let f = builtin_datum::<f64>(name).unwrap();
        let t0 = Instant::now();
        let mut worst: f64 = 0.0;
        for &x in &xs {
            for sign in [Sign::Plus, Sign::Minus] {
                worst = worst.max(type_ii_vanishing(p, &f, sign, x, &opts).unwrap().norm());
            }
        }
        eprintln!("{name}: type II worst {worst:e} ({:?})", t0.elapsed());
        assert!(worst <= 1e-6);
    }
    let f = builtin_datum::<f64>("fi_poly3").unwrap();
    assert_eq!(type_ii_vanishing(ProblemId::FiniteIntervalKdV, &f, Sign::Plus, 0.5, &opts).unwrap().norm(), 0.0);
}

#[test]
fn detour_below_origin_picks_up_the_pole() {
    let f = builtin_datum::<f64>("hl_exp1").unwrap();
    let opts = AugOptions { below_axis: true, ..AugOptions::default() };
    let v = type_ii_vanishing(ProblemId::HalfLineKdV, &f, Sign::Minus, 0.5, &opts).unwrap();
    eprintln!("below axis: {v}");
    // residue at 0: -x f'(0) - f''(0) x^2 / 2
    assert!((v - C64::new(-0.25, 0.0)).norm() < 1e-6);
}

#[test]
fn type_i_probe() {
    let f = builtin_datum::<f64>("hl_exp1").unwrap();
    let m = type_i_failure_probe(ProblemId::HalfLineKdV, &f, Sign::Minus, 0.3, &[20.0, 40.0, 80.0, 160.0]).unwrap();
    eprintln!("hl_exp1 probe {m:?}");
    assert!(m[1..].windows(2).all(|w| w[1] >= w[0]));
    let g = builtin_datum::<f64>("fi_poly2").unwrap();
    let m = type_i_failure_probe(ProblemId::FiniteIntervalKdV, &g, Sign::Plus, 0.3, &[20.0, 40.0, 80.0, 160.0]).unwrap();
    eprintln!("fi_poly2 probe {m:?}");
    // f''(0) = 2 here, so the constant remainder leaves an O(1) truncated integral
    assert!(m.iter().all(|v| *v > 1e-3));
    let g = builtin_datum::<f64>("fi_poly3").unwrap();
    let m = type_i_failure_probe(ProblemId::FiniteIntervalKdV, &g, Sign::Plus, 0.3, &[20.0, 40.0, 80.0, 160.0]).unwrap();
    assert!(m.iter().all(|v| *v <= 1e-8));
}

#[test]
fn diagonalised_inverse() {
    for (p, name, xs) in [
        (ProblemId::FiniteIntervalKdV, "fi_poly1", vec![0.2, 0.5, 0.8]),
        (ProblemId::HalfLineKdV, "hl_exp1", vec![0.5, 0.7, 2.0]),
    ] {
        let f = builtin_datum::<f64>(name).unwrap();
        for x in xs {
            let t0 = Instant::now();
            let d = diagonalised_inverse_check(p, &f, x, Default::default()).unwrap();
            eprintln!("{name} x={x}: lhs={} rhs={} f={} gap={:e} ({:?})", d.lhs, d.rhs, f.value(x), d.gap(), t0.elapsed());
            assert!(d.gap() <= 1e-5);
        }
    }
}
