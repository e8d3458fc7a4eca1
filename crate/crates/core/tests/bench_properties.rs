use std::f64::consts::PI;

use dpso::bench::{self, Modality};
use dpso::rng::{uniform_box, RunStream};

type Objective = dyn Fn(&[f64]) -> f64;

fn in_bounds_points(name: &str, d: usize, count: u32) -> Vec<Vec<f64>> {
    let (lb, ub) = bench::bounds(name, d).unwrap();
    let stream = RunStream::new(0xB0B, d as u32);
    (0..count)
        .map(|i| uniform_box(&stream, i, &lb, &ub).unwrap())
        .collect()
}

#[test]
fn documented_examples() {
    assert_eq!(bench::evaluate("sphere", &[0.0; 10]).unwrap(), 0.0);
    assert_eq!(bench::evaluate("rosenbrock", &[1.0; 30]).unwrap(), 0.0);
    assert!(bench::evaluate("ackley", &[0.0; 10]).unwrap().abs() < 1e-12);
    // Each coordinate contributes 1 - 10 cos(2 pi) = -9; plus 10 D = 100.
    assert!((bench::evaluate("rastrigin", &[1.0; 10]).unwrap() - 10.0).abs() < 1e-9);
    let schwefel_at = bench::evaluate("schwefel", &[420.9687; 10]).unwrap();
    let oracle = 418.9829 * 10.0 - 10.0 * 420.9687 * 420.9687f64.sqrt().sin();
    assert!((schwefel_at - oracle).abs() < 1e-9);
    assert!(schwefel_at.abs() < 1e-3);
}

#[test]
fn documented_bounds() {
    assert_eq!(bench::bounds("sphere", 10).unwrap(), (vec![-5.12; 10], vec![5.12; 10]));
    assert_eq!(bench::bounds("ackley", 30).unwrap(), (vec![-32.768; 30], vec![32.768; 30]));
    assert_eq!(
        bench::bounds("xinsheyang2", 10).unwrap(),
        (vec![-2.0 * PI; 10], vec![2.0 * PI; 10])
    );
}

#[test]
fn modality_partition() {
    assert_eq!(bench::list_functions(None).len(), 36);
    assert_eq!(bench::list_functions(Some(Modality::Unimodal)).len(), 15);
    assert_eq!(bench::list_functions(Some(Modality::Multimodal)).len(), 21);
}

#[test]
fn structurally_nonnegative_functions() {
    let names = [
        "sphere",
        "sumsquares",
        "schwefel1_2",
        "schwefel2_20",
        "schwefel2_21",
        "schwefel2_22",
        "schwefel2_23",
        "chungreynolds",
        "quartic",
        "cigar",
        "rothyperellipsoid",
        "sumdiffpowers",
        "rastrigin",
        "qing",
        "alpine1",
        "exponential",
    ];
    for name in names {
        for d in [2, 10, 30] {
            for x in in_bounds_points(name, d, 1000) {
                let v = bench::evaluate(name, &x).unwrap();
                assert!(v >= 0.0 && v.is_finite(), "{name} D={d}: {v}");
            }
        }
    }
}

#[test]
fn every_function_is_finite_and_repeatable_in_bounds() {
    for name in bench::list_functions(None) {
        for x in in_bounds_points(name, 10, 100) {
            let a = bench::evaluate(name, &x).unwrap();
            let b = bench::evaluate(name, &x).unwrap();
            assert!(a.is_finite(), "{name}");
            assert_eq!(a.to_bits(), b.to_bits(), "{name}");
        }
    }
}

fn pair_sum(x: &[f64], term: impl Fn(f64, f64) -> f64) -> f64 {
    let mut total = 0.0;
    let mut i = 0;
    while i + 1 < x.len() {
        total += term(x[i], x[i + 1]);
        i += 1;
    }
    total
}

#[test]
fn pairwise_functions_match_scalar_loops() {
    let bohachevsky = |x: &[f64]| {
        pair_sum(x, |a, b| {
            a * a + 2.0 * b * b - 0.3 * (3.0 * PI * a).cos() - 0.4 * (4.0 * PI * b).cos() + 0.7
        })
    };
    let pathological = |x: &[f64]| {
        pair_sum(x, |a, b| {
            let s = (100.0 * a * a + b * b).sqrt().sin();
            0.5 + (s * s - 0.5) / (1.0 + 0.001 * (a - b).powi(4))
        })
    };
    let schaffer_f6 = |x: &[f64]| {
        pair_sum(x, |a, b| {
            let r2 = a * a + b * b;
            let s = r2.sqrt().sin();
            0.5 + (s * s - 0.5) / (1.0 + 0.001 * r2).powi(2)
        })
    };
    let stretched_v = |x: &[f64]| {
        pair_sum(x, |a, b| {
            let t = a * a + b * b;
            let s = (50.0 * t.powf(0.1)).sin();
            t.powf(0.25) * (s * s + 0.1)
        })
    };
    let cases: [(&str, &Objective); 4] = [
        ("bohachevsky", &bohachevsky),
        ("pathological", &pathological),
        ("schafferf6", &schaffer_f6),
        ("stretchedv", &stretched_v),
    ];
    for (name, oracle) in cases {
        for d in [2, 7, 30] {
            for x in in_bounds_points(name, d, 100) {
                let got = bench::evaluate(name, &x).unwrap();
                let want = oracle(&x);
                assert!(
                    (got - want).abs() <= 1e-10 * want.abs().max(1.0),
                    "{name} D={d}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn table_definitions_for_remaining_multimodal_functions() {
    let levy = |x: &[f64]| {
        let w: Vec<f64> = x.iter().map(|v| 1.0 + (v - 1.0) / 4.0).collect();
        let d = w.len();
        let mut s = (PI * w[0]).sin().powi(2);
        for wi in &w[..d - 1] {
            s += (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2));
        }
        s + (w[d - 1] - 1.0).powi(2) * (1.0 + (2.0 * PI * w[d - 1]).sin().powi(2))
    };
    let whitley = |x: &[f64]| {
        let mut s = 0.0;
        for &xi in x {
            for &xj in x {
                let y = 100.0 * (xi * xi - xj).powi(2) + (1.0 - xj).powi(2);
                s += y * y / 4000.0 - y.cos() + 1.0;
            }
        }
        s
    };
    let weierstrass = |x: &[f64]| {
        let (a, b) = (0.5f64, 3.0f64);
        let mut s = 0.0;
        for &xi in x {
            for k in 0..=20 {
                s += a.powi(k) * (2.0 * PI * b.powi(k) * (xi + 0.5)).cos();
            }
        }
        let mut c = 0.0;
        for k in 0..=20 {
            c += a.powi(k) * (PI * b.powi(k)).cos();
        }
        s - x.len() as f64 * c
    };
    let cases: [(&str, &Objective); 3] =
        [("levy", &levy), ("whitley", &whitley), ("weierstrass", &weierstrass)];
    for (name, oracle) in cases {
        for x in in_bounds_points(name, 10, 100) {
            let got = bench::evaluate(name, &x).unwrap();
            let want = oracle(&x);
            assert!(
                (got - want).abs() <= 1e-9 * want.abs().max(1.0),
                "{name}: {got} vs {want}"
            );
        }
    }
}
