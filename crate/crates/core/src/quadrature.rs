//! Quadrature rules: Gauss–Legendre nodes, adaptive Gauss–Kronrod (7/15),
//! logarithmic grading for endpoint singularities, and a fixed composite
//! rule on (0, π) used by the Rayleigh–Ritz assembly.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            // Tricomi initial guess, then Newton on Pₙ
            let mut x = ((i as f64 + 0.75) / (nf + 0.5) * PI).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫ₐᵇ f for one panel.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * f(mid + half * t))
            .collect();
        half * pairwise_sum(&terms)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Pairwise (cascade) summation; the result does not depend on thread
/// schedule or accumulation order beyond the slice order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-300,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration of f over [a, b].
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &AdaptiveConfig,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let mut heap = BinaryHeap::new();
    let (v, e) = gk15(&f, a, b);
    heap.push(Piece {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total_v = v;
    let mut total_e = e;
    while heap.len() < cfg.max_intervals {
        if total_e <= cfg.abs_tol.max(cfg.rel_tol * total_v.abs()) {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&f, worst.a, m);
        let (v2, e2) = gk15(&f, m, worst.b);
        total_v += v1 + v2 - worst.value;
        total_e += e1 + e2 - worst.error;
        heap.push(Piece {
            a: worst.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            a: m,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // resum in interval order for a deterministic result
    let mut pieces = heap.into_vec();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let values: Vec<f64> = pieces.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = pieces.iter().map(|p| p.error).collect();
    let value = pairwise_sum(&values);
    let error = pairwise_sum(&errors);
    if !value.is_finite() {
        return Err(Error::Numerical("non-finite integrand".into()));
    }
    let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
    if error > tol {
        return Err(Error::Quadrature {
            estimate: error,
            tol,
        });
    }
    Ok(Estimate { value, error })
}

/// ∫ₓᵇ g(t) dt for 0 < x < b with g singular at 0, via t = eᵛ.
pub fn integrate_log_graded<F: Fn(f64) -> f64>(
    g: F,
    x: f64,
    b: f64,
    cfg: &AdaptiveConfig,
) -> Result<Estimate> {
    if !(x > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!(
            "log-graded quadrature needs positive limits, got ({x}, {b})"
        )));
    }
    let sign = if x <= b { 1.0 } else { -1.0 };
    let (lo, hi) = if x <= b { (x, b) } else { (b, x) };
    let est = integrate_adaptive(
        |v: f64| {
            let t = v.exp();
            g(t) * t
        },
        lo.ln(),
        hi.ln(),
        cfg,
    )?;
    Ok(Estimate {
        value: sign * est.value,
        error: est.error,
    })
}

/// A quadrature node on (0, π), carrying the exact distance to π as well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x: f64,
    /// π − x, exact for nodes in the right endpoint zone.
    pub xr: f64,
    pub w: f64,
}

impl Node {
    /// sin x computed from the nearer endpoint.
    pub fn sin(&self) -> f64 {
        if self.x <= self.xr {
            self.x.sin()
        } else {
            self.xr.sin()
        }
    }

    pub fn cos(&self) -> f64 {
        if self.x <= self.xr {
            self.x.cos()
        } else {
            -self.xr.cos()
        }
    }

    /// Distance to the boundary of (0, π).
    pub fn dist(&self) -> f64 {
        self.x.min(self.xr)
    }
}

/// Layout of the fixed composite rule on (0, π).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RuleLayout {
    pub nodes_per_panel: usize,
    /// Panels in the bulk [x_c, π − x_c].
    pub panels: usize,
    /// Width of each logarithmic endpoint zone.
    pub x_c: f64,
}

impl Default for RuleLayout {
    fn default() -> Self {
        Self {
            nodes_per_panel: 32,
            panels: 64,
            x_c: 0.05,
        }
    }
}

/// Largest u with e^{−u} still a normal double.
const U_MAX: f64 = 708.0;

/// Composite Gauss–Legendre rule on (0, π): uniform panels in the bulk with
/// a breakpoint at π/2, and zones x = e^{−u} (mirrored at π) that reach down
/// to x ≈ 1e−307 so slowly decaying endpoint singularities are captured.
pub fn interval_rule(layout: &RuleLayout) -> Vec<Node> {
    let gl = GaussLegendre::new(layout.nodes_per_panel);
    let xc = layout.x_c;
    let mut left = Vec::new();

    // endpoint zone in u = −ln x, panel widths growing geometrically
    let u0 = -xc.ln();
    let mut edges = vec![u0];
    let mut width = 0.5;
    while *edges.last().unwrap() < U_MAX {
        let next = (edges.last().unwrap() + width).min(U_MAX);
        edges.push(next);
        width = (width * 1.5).min(32.0);
    }
    for pair in edges.windows(2).rev() {
        let (ua, ub) = (pair[0], pair[1]);
        let half = 0.5 * (ub - ua);
        let mid = 0.5 * (ua + ub);
        for (t, w) in gl.nodes.iter().zip(&gl.weights).rev() {
            let u = mid + half * t;
            let x = (-u).exp();
            left.push(Node {
                x,
                xr: PI - x,
                w: w * half * x,
            });
        }
    }

    // bulk [x_c, π/2], half the panels
    let half_panels = (layout.panels / 2).max(1);
    let h = (PI / 2.0 - xc) / half_panels as f64;
    for p in 0..half_panels {
        let a = xc + h * p as f64;
        for (t, w) in gl.nodes.iter().zip(&gl.weights) {
            let x = a + 0.5 * h * (1.0 + t);
            left.push(Node {
                x,
                xr: PI - x,
                w: w * 0.5 * h,
            });
        }
    }

    // mirror: every node reflected about π/2
    let mut all = left.clone();
    for n in left.iter().rev() {
        all.push(Node {
            x: n.xr,
            xr: n.x,
            w: n.w,
        });
    }
    all
}

/// ∫₀^π f over an [`interval_rule`]; f receives the node.
pub fn integrate_rule<F: Fn(&Node) -> f64>(rule: &[Node], f: F) -> f64 {
    let terms: Vec<f64> = rule.iter().map(|n| n.w * f(n)).collect();
    pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        // exact for degree ≤ 15
        for k in 0..16 {
            let v = gl.integrate(|x| x.powi(k), -1.0, 1.0);
            let exact = if k % 2 == 0 {
                2.0 / (k as f64 + 1.0)
            } else {
                0.0
            };
            assert!((v - exact).abs() < 1e-14, "k = {k}");
        }
        let w: f64 = GaussLegendre::new(32).weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kronrod_constants_consistent() {
        let s: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((g - 2.0).abs() < 1e-15);
        // 7-point Gauss nodes are the odd Kronrod nodes
        let gl = GaussLegendre::new(7);
        for (i, x) in [XGK[1], XGK[3], XGK[5]].iter().enumerate() {
            assert!((gl.nodes[6 - i] - x).abs() < 1e-15);
        }
    }

    #[test]
    fn adaptive_handles_smooth_and_singular() {
        let cfg = AdaptiveConfig::default();
        let e = integrate_adaptive(|x: f64| x.sin(), 0.0, PI, &cfg).unwrap();
        assert!((e.value - 2.0).abs() < 1e-13);
        let e = integrate_adaptive(|x: f64| x.sqrt(), 0.0, 1.0, &cfg).unwrap();
        assert!((e.value - 2.0 / 3.0).abs() < 1e-11);
        let tight = AdaptiveConfig {
            max_intervals: 3,
            ..cfg
        };
        assert!(matches!(
            integrate_adaptive(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &tight),
            Err(Error::Quadrature { .. })
        ));
    }

    #[test]
    fn log_graded_integrates_near_singularity() {
        let cfg = AdaptiveConfig::default();
        // ∫_{1e-8}^{1} dt/t = 8 ln 10
        let e = integrate_log_graded(|t| 1.0 / t, 1e-8, 1.0, &cfg).unwrap();
        assert!((e.value - 8.0 * 10f64.ln()).abs() < 1e-12);
        let r = integrate_log_graded(|t| 1.0 / t, 1.0, 1e-8, &cfg).unwrap();
        assert_eq!(r.value, -e.value);
    }

    #[test]
    fn interval_rule_integrates_endpoint_powers() {
        let rule = interval_rule(&RuleLayout::default());
        let total: f64 = integrate_rule(&rule, |_| 1.0);
        assert!((total - PI).abs() < 1e-13);
        let s2 = integrate_rule(&rule, |n| n.sin().powi(2));
        assert!((s2 - PI / 2.0).abs() < 1e-13);
        // ∫₀^π sin^{−0.9} x dx = √π Γ(0.05)/Γ(0.55)
        let v = integrate_rule(&rule, |n| n.sin().powf(-0.9));
        let exact = 21.353_449_332_480_04;
        assert!((v / exact - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn interval_rule_is_symmetric() {
        let rule = interval_rule(&RuleLayout::default());
        let n = rule.len();
        for i in 0..n / 2 {
            assert_eq!(rule[i].x, rule[n - 1 - i].xr);
            assert_eq!(rule[i].w, rule[n - 1 - i].w);
        }
    }
}
