//! The 36 box-constrained test functions used by the experiment protocol.
//!
//! Every function is defined for arbitrary dimension `D`, minimized over a
//! hypercube `[lower, upper]^D`, and has global minimum value 0 (Schwefel only
//! approximately, because of its truncated 418.9829 constant). Indices in the
//! formulas below are 1-based, as in the usual literature definitions.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("unknown benchmark function `{0}`")]
    UnknownFunction(String),
    #[error("`{name}` needs dimension >= {min}, got {got}")]
    DimensionTooSmall {
        name: &'static str,
        min: usize,
        got: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Unimodal,
    Multimodal,
}

impl Modality {
    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Unimodal => "unimodal",
            Modality::Multimodal => "multimodal",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "unimodal" => Ok(Modality::Unimodal),
            "multimodal" => Ok(Modality::Multimodal),
            other => Err(format!(
                "unknown modality `{other}` (expected unimodal or multimodal)"
            )),
        }
    }
}

/// A registered benchmark objective.
#[derive(Clone, Copy)]
pub struct BenchmarkSpec {
    /// Canonical identifier: lowercase ASCII, digits and underscores.
    pub name: &'static str,
    pub modality: Modality,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub f_star: f64,
    /// `f_star` is only approximate (Schwefel).
    pub f_star_approximate: bool,
    /// Smallest dimension for which the formula is meaningful.
    pub min_dimension: usize,
    func: fn(&[f64]) -> f64,
    minimizer: fn(usize) -> Vec<f64>,
}

impl fmt::Debug for BenchmarkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BenchmarkSpec")
            .field("name", &self.name)
            .field("modality", &self.modality)
            .field("lower_bound", &self.lower_bound)
            .field("upper_bound", &self.upper_bound)
            .field("f_star", &self.f_star)
            .finish_non_exhaustive()
    }
}

impl BenchmarkSpec {
    /// Evaluates without checking the dimension; the caller guarantees
    /// `x.len() >= self.min_dimension`.
    #[inline]
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        (self.func)(x)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64, BenchError> {
        self.check_dimension(x.len())?;
        Ok((self.func)(x))
    }

    pub fn check_dimension(&self, d: usize) -> Result<(), BenchError> {
        if d < self.min_dimension {
            return Err(BenchError::DimensionTooSmall {
                name: self.name,
                min: self.min_dimension,
                got: d,
            });
        }
        Ok(())
    }

    pub fn bounds(&self, d: usize) -> (Vec<f64>, Vec<f64>) {
        (vec![self.lower_bound; d], vec![self.upper_bound; d])
    }

    /// A global minimizer at dimension `d`. All 36 functions have one in
    /// closed form.
    pub fn x_star(&self, d: usize) -> Option<Vec<f64>> {
        Some((self.minimizer)(d))
    }

    /// Tolerance on `|f(x*) - f*|` that the closed-form minimizer achieves.
    pub fn optimum_tolerance(&self) -> f64 {
        if self.f_star_approximate {
            1e-3
        } else {
            1e-8
        }
    }
}

/// Looks up a function by its canonical identifier.
pub fn lookup(name: &str) -> Result<&'static BenchmarkSpec, BenchError> {
    REGISTRY
        .iter()
        .find(|b| b.name == name)
        .ok_or_else(|| BenchError::UnknownFunction(name.to_owned()))
}

pub fn evaluate(name: &str, x: &[f64]) -> Result<f64, BenchError> {
    lookup(name)?.evaluate(x)
}

pub fn bounds(name: &str, d: usize) -> Result<(Vec<f64>, Vec<f64>), BenchError> {
    Ok(lookup(name)?.bounds(d))
}

/// Canonical identifiers in alphabetical order, optionally restricted to one
/// modality.
pub fn list_functions(filter: Option<Modality>) -> Vec<&'static str> {
    let mut names: Vec<_> = REGISTRY
        .iter()
        .filter(|b| filter.map_or(true, |m| b.modality == m))
        .map(|b| b.name)
        .collect();
    names.sort_unstable();
    names
}

/// All registered functions, in table order (unimodal first).
pub fn registry() -> &'static [BenchmarkSpec] {
    &REGISTRY
}

macro_rules! bench {
    ($name:literal, $modality:ident, $lo:expr, $hi:expr, $func:expr, $xstar:expr) => {
        bench!($name, $modality, $lo, $hi, $func, $xstar, min = 1)
    };
    ($name:literal, $modality:ident, $lo:expr, $hi:expr, $func:expr, $xstar:expr, min = $min:expr) => {
        BenchmarkSpec {
            name: $name,
            modality: Modality::$modality,
            lower_bound: $lo,
            upper_bound: $hi,
            f_star: 0.0,
            f_star_approximate: false,
            min_dimension: $min,
            func: $func,
            minimizer: $xstar,
        }
    };
}

fn zeros(d: usize) -> Vec<f64> {
    vec![0.0; d]
}

fn ones(d: usize) -> Vec<f64> {
    vec![1.0; d]
}

fn minus_ones(d: usize) -> Vec<f64> {
    vec![-1.0; d]
}

static REGISTRY: [BenchmarkSpec; 36] = [
    bench!("sphere", Unimodal, -5.12, 5.12, sphere, zeros),
    bench!("rosenbrock", Unimodal, -5.0, 10.0, rosenbrock, ones, min = 2),
    bench!("sumsquares", Unimodal, -10.0, 10.0, sum_squares, zeros),
    bench!("schwefel2_22", Unimodal, -10.0, 10.0, schwefel2_22, zeros),
    bench!("schwefel1_2", Unimodal, -100.0, 100.0, schwefel1_2, zeros),
    bench!("schwefel2_21", Unimodal, -100.0, 100.0, schwefel2_21, zeros),
    bench!("schwefel2_20", Unimodal, -100.0, 100.0, schwefel2_20, zeros),
    bench!("schwefel2_23", Unimodal, -10.0, 10.0, schwefel2_23, zeros),
    bench!("dixonprice", Unimodal, -10.0, 10.0, dixon_price, dixon_price_minimizer, min = 2),
    bench!("zakharov", Unimodal, -5.0, 10.0, zakharov, zeros),
    bench!("rothyperellipsoid", Unimodal, -65.536, 65.536, rot_hyper_ellipsoid, zeros),
    bench!("sumdiffpowers", Unimodal, -1.0, 1.0, sum_diff_powers, zeros),
    bench!("chungreynolds", Unimodal, -100.0, 100.0, chung_reynolds, zeros),
    bench!("quartic", Unimodal, -1.28, 1.28, quartic, zeros),
    bench!("cigar", Unimodal, -100.0, 100.0, cigar, zeros),
    bench!("rastrigin", Multimodal, -5.12, 5.12, rastrigin, zeros),
    bench!("ackley", Multimodal, -32.768, 32.768, ackley, zeros),
    bench!("griewank", Multimodal, -600.0, 600.0, griewank, zeros),
    BenchmarkSpec {
        f_star_approximate: true,
        ..bench!("schwefel", Multimodal, -500.0, 500.0, schwefel, schwefel_minimizer)
    },
    bench!("levy", Multimodal, -10.0, 10.0, levy, ones, min = 2),
    bench!("bohachevsky", Multimodal, -100.0, 100.0, bohachevsky, zeros, min = 2),
    bench!("salomon", Multimodal, -100.0, 100.0, salomon, zeros),
    bench!("alpine1", Multimodal, -10.0, 10.0, alpine1, zeros),
    bench!("xinsheyang2", Multimodal, -2.0 * PI, 2.0 * PI, xin_she_yang2, zeros),
    bench!("qing", Multimodal, -500.0, 500.0, qing, qing_minimizer),
    bench!("pathological", Multimodal, -100.0, 100.0, pathological, zeros, min = 2),
    bench!("schafferf6", Multimodal, -100.0, 100.0, schaffer_f6, zeros, min = 2),
    bench!("wavy", Multimodal, -PI, PI, wavy, zeros),
    bench!("weierstrass", Multimodal, -0.5, 0.5, weierstrass, zeros),
    bench!("pinter", Multimodal, -10.0, 10.0, pinter, zeros, min = 2),
    bench!("stretchedv", Multimodal, -10.0, 10.0, stretched_v, zeros, min = 2),
    bench!("happycat", Multimodal, -2.0, 2.0, happy_cat, minus_ones),
    bench!("hgbat", Multimodal, -2.0, 2.0, hgbat, minus_ones),
    bench!("whitley", Multimodal, -10.24, 10.24, whitley, ones),
    bench!("exponential", Multimodal, -1.0, 1.0, exponential, zeros),
    bench!("cosinemixture", Multimodal, -1.0, 1.0, cosine_mixture, zeros),
];

/// Position of the Schwefel minimizer in every coordinate.
pub const SCHWEFEL_MINIMIZER: f64 = 420.9687;

// 1-based index of coordinate `i` as a float.
#[inline]
fn idx(i: usize) -> f64 {
    (i + 1) as f64
}

fn sum_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

// ---------------------------------------------------------------- unimodal

pub fn sphere(x: &[f64]) -> f64 {
    sum_sq(x)
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let a = w[1] - w[0] * w[0];
            let b = 1.0 - w[0];
            100.0 * a * a + b * b
        })
        .sum()
}

pub fn sum_squares(x: &[f64]) -> f64 {
    x.iter().enumerate().map(|(i, v)| idx(i) * v * v).sum()
}

pub fn schwefel2_22(x: &[f64]) -> f64 {
    let sum: f64 = x.iter().map(|v| v.abs()).sum();
    let prod: f64 = x.iter().map(|v| v.abs()).product();
    sum + prod
}

pub fn schwefel1_2(x: &[f64]) -> f64 {
    let mut prefix = 0.0;
    let mut total = 0.0;
    for v in x {
        prefix += v;
        total += prefix * prefix;
    }
    total
}

pub fn schwefel2_21(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn schwefel2_20(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn schwefel2_23(x: &[f64]) -> f64 {
    x.iter().map(|v| v.powi(10)).sum()
}

pub fn dixon_price(x: &[f64]) -> f64 {
    let head = (x[0] - 1.0).powi(2);
    let tail: f64 = x
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            // window k holds (x_{i-1}, x_i) with 1-based i = k + 2
            let t = 2.0 * w[1] * w[1] - w[0];
            (k + 2) as f64 * t * t
        })
        .sum();
    head + tail
}

/// `x_i = 2^{-(2^i - 2) / 2^i}`.
fn dixon_price_minimizer(d: usize) -> Vec<f64> {
    (1..=d)
        .map(|i| {
            let p = 2f64.powi(i as i32);
            2f64.powf(-(p - 2.0) / p)
        })
        .collect()
}

pub fn zakharov(x: &[f64]) -> f64 {
    let weighted: f64 = x.iter().enumerate().map(|(i, v)| 0.5 * idx(i) * v).sum();
    let w2 = weighted * weighted;
    sum_sq(x) + w2 + w2 * w2
}

pub fn rot_hyper_ellipsoid(x: &[f64]) -> f64 {
    let d = x.len();
    x.iter()
        .enumerate()
        .map(|(i, v)| (d - i) as f64 * v * v)
        .sum()
}

pub fn sum_diff_powers(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| v.abs().powi(i as i32 + 2))
        .sum()
}

pub fn chung_reynolds(x: &[f64]) -> f64 {
    let s = sum_sq(x);
    s * s
}

/// Noiseless quartic, `sum i * x_i^4`.
pub fn quartic(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| {
            let v2 = v * v;
            idx(i) * v2 * v2
        })
        .sum()
}

pub fn cigar(x: &[f64]) -> f64 {
    x[0] * x[0] + 1e6 * sum_sq(&x[1..])
}

// -------------------------------------------------------------- multimodal

pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

pub fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let cos_sum: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
    -20.0 * (-0.2 * (sum_sq(x) / n).sqrt()).exp() - (cos_sum / n).exp() + 20.0 + E
}

pub fn griewank(x: &[f64]) -> f64 {
    let prod: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / idx(i).sqrt()).cos())
        .product();
    1.0 + sum_sq(x) / 4000.0 - prod
}

pub fn schwefel(x: &[f64]) -> f64 {
    418.9829 * x.len() as f64 - x.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>()
}

fn schwefel_minimizer(d: usize) -> Vec<f64> {
    vec![SCHWEFEL_MINIMIZER; d]
}

pub fn levy(x: &[f64]) -> f64 {
    let w = |v: f64| 1.0 + (v - 1.0) / 4.0;
    let d = x.len();
    let w1 = w(x[0]);
    let wd = w(x[d - 1]);
    let head = (PI * w1).sin().powi(2);
    let middle: f64 = x[..d - 1]
        .iter()
        .map(|&v| {
            let wi = w(v);
            (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2))
        })
        .sum();
    let tail = (wd - 1.0).powi(2) * (1.0 + (2.0 * PI * wd).sin().powi(2));
    head + middle + tail
}

pub fn bohachevsky(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            a * a + 2.0 * b * b - 0.3 * (3.0 * PI * a).cos() - 0.4 * (4.0 * PI * b).cos() + 0.7
        })
        .sum()
}

pub fn salomon(x: &[f64]) -> f64 {
    let r = sum_sq(x).sqrt();
    1.0 - (2.0 * PI * r).cos() + 0.1 * r
}

pub fn alpine1(x: &[f64]) -> f64 {
    x.iter().map(|v| (v * v.sin() + 0.1 * v).abs()).sum()
}

pub fn xin_she_yang2(x: &[f64]) -> f64 {
    let abs_sum: f64 = x.iter().map(|v| v.abs()).sum();
    let sin_sum: f64 = x.iter().map(|v| (v * v).sin()).sum();
    abs_sum * (-sin_sum).exp()
}

pub fn qing(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| {
            let t = v * v - idx(i);
            t * t
        })
        .sum()
}

fn qing_minimizer(d: usize) -> Vec<f64> {
    (1..=d).map(|i| (i as f64).sqrt()).collect()
}

pub fn pathological(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let s = (100.0 * a * a + b * b).sqrt().sin();
            let diff2 = (a - b) * (a - b);
            0.5 + (s * s - 0.5) / (1.0 + 0.001 * diff2 * diff2)
        })
        .sum()
}

pub fn schaffer_f6(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let r2 = w[0] * w[0] + w[1] * w[1];
            let s = r2.sqrt().sin();
            let denom = 1.0 + 0.001 * r2;
            0.5 + (s * s - 0.5) / (denom * denom)
        })
        .sum()
}

pub fn wavy(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    1.0 - x
        .iter()
        .map(|v| (10.0 * v).cos() * (-v * v / 2.0).exp())
        .sum::<f64>()
        / n
}

const WEIERSTRASS_A: f64 = 0.5;
const WEIERSTRASS_B: f64 = 3.0;
const WEIERSTRASS_KMAX: usize = 20;

pub fn weierstrass(x: &[f64]) -> f64 {
    // a^k and b^k by running products: both stay exact in f64 for k <= 20.
    let mut a_k = [0.0; WEIERSTRASS_KMAX + 1];
    let mut b_k = [0.0; WEIERSTRASS_KMAX + 1];
    let (mut a, mut b) = (1.0, 1.0);
    for k in 0..=WEIERSTRASS_KMAX {
        a_k[k] = a;
        b_k[k] = b;
        a *= WEIERSTRASS_A;
        b *= WEIERSTRASS_B;
    }
    let offset: f64 = (0..=WEIERSTRASS_KMAX)
        .map(|k| a_k[k] * (PI * b_k[k]).cos())
        .sum();
    let total: f64 = x
        .iter()
        .map(|v| {
            (0..=WEIERSTRASS_KMAX)
                .map(|k| a_k[k] * (2.0 * PI * b_k[k] * (v + 0.5)).cos())
                .sum::<f64>()
        })
        .sum();
    total - x.len() as f64 * offset
}

/// Pintér's function with cyclic neighbours: `x_0 = x_D`, `x_{D+1} = x_1`.
pub fn pinter(x: &[f64]) -> f64 {
    let d = x.len();
    let mut quad = 0.0;
    let mut sin_term = 0.0;
    let mut log_term = 0.0;
    for i in 0..d {
        let prev = x[(i + d - 1) % d];
        let next = x[(i + 1) % d];
        let xi = x[i];
        let w = idx(i);
        let a = prev * xi.sin() + next.sin();
        let b = prev * prev - 2.0 * xi + 3.0 * next - xi.cos() + 1.0;
        quad += w * xi * xi;
        let sa = a.sin();
        sin_term += w * sa * sa;
        log_term += w * (1.0 + w * b * b).log10();
    }
    quad + 20.0 * sin_term + log_term
}

pub fn stretched_v(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let t = w[0] * w[0] + w[1] * w[1];
            let s = (50.0 * t.powf(0.1)).sin();
            t.powf(0.25) * (s * s + 0.1)
        })
        .sum()
}

pub fn happy_cat(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let s2 = sum_sq(x);
    let s1: f64 = x.iter().sum();
    (s2 - n).abs().powf(0.25) + (0.5 * s2 + s1) / n + 0.5
}

pub fn hgbat(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let s2 = sum_sq(x);
    let s1: f64 = x.iter().sum();
    (s2 * s2 - s1 * s1).abs().sqrt() + (0.5 * s2 + s1) / n + 0.5
}

pub fn whitley(x: &[f64]) -> f64 {
    let mut total = 0.0;
    for &xi in x {
        let xi2 = xi * xi;
        for &xj in x {
            let a = xi2 - xj;
            let b = 1.0 - xj;
            let y = 100.0 * a * a + b * b;
            total += y * y / 4000.0 - y.cos() + 1.0;
        }
    }
    total
}

pub fn exponential(x: &[f64]) -> f64 {
    1.0 - (-0.5 * sum_sq(x)).exp()
}

pub fn cosine_mixture(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| v * v + 0.1 * (1.0 - (5.0 * PI * v).cos()))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_shape() {
        assert_eq!(REGISTRY.len(), 36);
        assert_eq!(list_functions(None).len(), 36);
        assert_eq!(list_functions(Some(Modality::Unimodal)).len(), 15);
        assert_eq!(list_functions(Some(Modality::Multimodal)).len(), 21);
        let names = list_functions(None);
        assert!(names.windows(2).all(|w| w[0] < w[1]));
        for b in registry() {
            assert!(b.lower_bound < b.upper_bound, "{}", b.name);
            assert!(b
                .name
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'));
        }
    }

    #[test]
    fn documented_values() {
        assert_eq!(evaluate("sphere", &[0.0; 10]).unwrap(), 0.0);
        assert_eq!(evaluate("rosenbrock", &[1.0; 30]).unwrap(), 0.0);
        assert!(evaluate("ackley", &[0.0; 10]).unwrap().abs() <= 1e-12);
        assert!((evaluate("rastrigin", &[1.0; 10]).unwrap() - 10.0).abs() < 1e-12);
        assert!(evaluate("schwefel", &[SCHWEFEL_MINIMIZER; 10]).unwrap().abs() <= 1e-3);
    }

    #[test]
    fn documented_bounds() {
        assert_eq!(bounds("sphere", 10).unwrap(), (vec![-5.12; 10], vec![5.12; 10]));
        assert_eq!(
            bounds("ackley", 30).unwrap(),
            (vec![-32.768; 30], vec![32.768; 30])
        );
        assert_eq!(
            bounds("xinsheyang2", 10).unwrap(),
            (vec![-2.0 * PI; 10], vec![2.0 * PI; 10])
        );
    }

    #[test]
    fn errors() {
        assert_eq!(
            evaluate("nope", &[0.0; 3]),
            Err(BenchError::UnknownFunction("nope".into()))
        );
        assert!(bounds("nope", 3).is_err());
        assert!(matches!(
            evaluate("rosenbrock", &[1.0]),
            Err(BenchError::DimensionTooSmall { min: 2, got: 1, .. })
        ));
        assert!(evaluate("sphere", &[]).is_err());
    }

    #[test]
    fn closed_form_minimizers() {
        for b in registry() {
            for d in [2, 10, 30, 50] {
                let x = b.x_star(d).unwrap();
                let f = b.evaluate(&x).unwrap();
                assert!(
                    (f - b.f_star).abs() <= b.optimum_tolerance(),
                    "{} at D={d}: {f:e}",
                    b.name
                );
            }
        }
    }

    #[test]
    fn qing_minimizer_sign_is_free() {
        let x: Vec<f64> = (1..=10)
            .map(|i| if i % 2 == 0 { -(i as f64).sqrt() } else { (i as f64).sqrt() })
            .collect();
        assert!(qing(&x) < 1e-20);
    }

    #[test]
    fn pinter_wraps_around() {
        // Moving only x_D changes the A_1 and B_1 terms through the cyclic x_0.
        let mut x = vec![0.0; 4];
        let base = pinter(&x);
        x[3] = 0.5;
        let mut direct = 0.0;
        for i in 0..4 {
            let prev = x[(i + 3) % 4];
            let next = x[(i + 1) % 4];
            let w = (i + 1) as f64;
            let a: f64 = prev * x[i].sin() + next.sin();
            let b: f64 = prev * prev - 2.0 * x[i] + 3.0 * next - x[i].cos() + 1.0;
            direct += w * x[i] * x[i] + 20.0 * w * a.sin().powi(2) + w * (1.0 + w * b * b).log10();
        }
        assert_eq!(base, 0.0);
        assert!((pinter(&x) - direct).abs() < 1e-12);
    }
}
