//! Fundamental-domain reduction (g = 1), reduction checks (any g) and the
//! theta-null / matrix-lemma inequalities.

use rand::Rng;
use rug::{Complex, Float, Integer};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::precision::PrecisionContext;
use crate::theta::{half_characteristics, theta_null, SiegelMatrix};

/// 2g×2g integer matrix [[A, B], [C, D]].
pub type IntMatrix = Vec<Vec<Integer>>;

#[derive(Clone, Debug)]
pub struct ConditionResult {
    pub id: String,
    pub pass: bool,
    /// Signed slack; negative means violated.
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub input: SiegelMatrix,
    pub reduced: SiegelMatrix,
    pub gamma: IntMatrix,
    pub checks: Vec<ConditionResult>,
}

pub fn identity_gamma(g: usize) -> IntMatrix {
    (0..2 * g)
        .map(|i| (0..2 * g).map(|j| Integer::from((i == j) as i32)).collect())
        .collect()
}

fn int_mul(x: &IntMatrix, y: &IntMatrix) -> IntMatrix {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(Integer::new(), |acc, k| acc + Integer::from(&x[i][k] * &y[k][j])))
                .collect()
        })
        .collect()
}

/// γᵀJγ = J with J = [[0, I], [−I, 0]].
pub fn is_symplectic(gamma: &IntMatrix) -> bool {
    let n = gamma.len();
    if n % 2 == 1 {
        return false;
    }
    let g = n / 2;
    let j: IntMatrix = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    Integer::from(if c == r + g { 1 } else if r == c + g { -1 } else { 0 })
                })
                .collect()
        })
        .collect();
    let gt: IntMatrix = (0..n).map(|r| (0..n).map(|c| gamma[c][r].clone()).collect()).collect();
    int_mul(&int_mul(&gt, &j), gamma) == j
}

/// γ·τ = (Aτ + B)(Cτ + D)⁻¹.
pub fn act(gamma: &IntMatrix, tau: &SiegelMatrix) -> Result<SiegelMatrix> {
    let g = tau.g();
    let p = tau.prec();
    let block = |r0: usize, c0: usize| {
        ComplexMatrix::from_fn(g, p, |i, j| Complex::with_val(p, &gamma[r0 + i][c0 + j]))
    };
    let t = tau.as_matrix();
    let num = block(0, 0).mul(&t).add(&block(0, g));
    let den = block(g, 0).mul(&t).add(&block(g, g));
    let inv = den
        .inverse()
        .ok_or_else(|| Error::Numeric("Cτ + D is singular".into()))?;
    let r = num.mul(&inv);
    // symmetrise away rounding noise
    let e: Vec<Complex> = (0..g * g)
        .map(|k| {
            let (i, j) = (k / g, k % g);
            Complex::with_val(p, r.get(i, j) + r.get(j, i)) / 2u32
        })
        .collect();
    SiegelMatrix::new(g, e)
}

/// det(Cτ + D).
pub fn automorphy_det(gamma: &IntMatrix, tau: &SiegelMatrix) -> Complex {
    let g = tau.g();
    let p = tau.prec();
    let c = ComplexMatrix::from_fn(g, p, |i, j| Complex::with_val(p, &gamma[g + i][j]));
    let d = ComplexMatrix::from_fn(g, p, |i, j| Complex::with_val(p, &gamma[g + i][g + j]));
    c.mul(&tau.as_matrix()).add(&d).det()
}

fn sl2(a: i64, b: i64, c: i64, d: i64) -> IntMatrix {
    vec![
        vec![Integer::from(a), Integer::from(b)],
        vec![Integer::from(c), Integer::from(d)],
    ]
}

/// Standard SL₂(ℤ) reduction into |Re τ| ≤ ½, |τ| ≥ 1, with Re τ ∈ (−½, ½]
/// and Re τ ≥ 0 on the unit circle.
pub fn reduce_g1(tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<ReductionReport> {
    tau.require_genus(1)?;
    let p = ctx.prec().max(tau.prec());
    let mut t = Complex::with_val(p, tau.tau11());
    if *t.imag() <= 0 {
        return Err(Error::Domain("Im τ must be positive".into()));
    }
    let tol = Float::with_val(p, 1) >> (ctx.bits - 8);
    let mut gamma = sl2(1, 0, 0, 1);
    for _ in 0..10_000 {
        let n = Float::with_val(p, t.real().round_ref());
        if n != 0 {
            t -= &n;
            let n = n.to_integer().unwrap().to_i64().unwrap();
            gamma = int_mul(&sl2(1, -n, 0, 1), &gamma);
        }
        let norm = Float::with_val(p, t.norm_ref());
        if norm < Float::with_val(p, 1 - Float::with_val(p, &tol)) {
            t = -Complex::with_val(p, t.recip_ref());
            gamma = int_mul(&sl2(0, -1, 1, 0), &gamma);
        } else {
            break;
        }
    }
    let half = Float::with_val(p, 0.5);
    if Float::with_val(p, t.real() + &half).abs() < tol {
        t += 1u32;
        gamma = int_mul(&sl2(1, 1, 0, 1), &gamma);
    }
    let norm = Float::with_val(p, t.norm_ref());
    if Float::with_val(p, norm - 1u32).abs() < tol && *t.real() < 0 {
        t = -Complex::with_val(p, t.recip_ref());
        gamma = int_mul(&sl2(0, -1, 1, 0), &gamma);
    }
    let reduced = SiegelMatrix::scalar(t)?;
    debug_assert!(is_symplectic(&gamma));
    let checks = check_reduced(&reduced, 1);
    Ok(ReductionReport { input: tau.clone(), reduced, gamma, checks })
}

/// S2, S3 on the test set ζ ∈ {−1, 0, 1}^g, b_{i,i+1} ≥ 0, the chain
/// b_gg ≥ … ≥ b_11 ≥ √3/2, b_ii/2 ≥ |b_ij| and, for g = 1, |τ| ≥ 1.
/// Passing is necessary but not sufficient for reducedness, because S3 is
/// only sampled. Margins above −2^{−prec/2} count as on the boundary.
pub fn check_reduced(tau: &SiegelMatrix, g: usize) -> Vec<ConditionResult> {
    let mut out = Vec::new();
    if tau.g() != g {
        out.push(ConditionResult { id: "genus".into(), pass: false, margin: -1.0 });
        return out;
    }
    let p = tau.prec();
    let tol = 2f64.powi(-(p as i32) / 2);
    let mut push = |id: String, margin: f64| {
        out.push(ConditionResult { id, pass: margin >= -tol, margin });
    };
    let x = tau.re();
    let y = tau.im();
    let a = |i: usize, j: usize| x.get(i, j).to_f64();
    let b = |i: usize, j: usize| y.get(i, j).to_f64();
    for i in 0..g {
        for j in i..g {
            push(format!("S2 a[{},{}]", i + 1, j + 1), 0.5 - a(i, j).abs());
        }
    }
    let zetas: Vec<Vec<i64>> = (0..3usize.pow(g as u32))
        .map(|mut k| {
            (0..g)
                .map(|_| {
                    let d = (k % 3) as i64 - 1;
                    k /= 3;
                    d
                })
                .collect()
        })
        .collect();
    for l in 0..g {
        let mut worst = f64::INFINITY;
        for z in &zetas {
            if z[l..].iter().all(|&v| v == 0) {
                continue;
            }
            let zf: Vec<Float> = z.iter().map(|&v| Float::with_val(p, v)).collect();
            let q = y.quad(&zf);
            worst = worst.min((q - y.get(l, l)).to_f64());
        }
        push(format!("S3 l={}", l + 1), worst);
    }
    for i in 0..g.saturating_sub(1) {
        push(format!("S3 b[{},{}]>=0", i + 1, i + 2), b(i, i + 1));
    }
    for i in 0..g.saturating_sub(1) {
        push(format!("chain b[{},{}]>=b[{},{}]", i + 2, i + 2, i + 1, i + 1), b(i + 1, i + 1) - b(i, i));
    }
    let s32 = Float::with_val(p, 3).sqrt() / 2u32;
    push("b[1,1]>=sqrt3/2".into(), (Float::with_val(p, y.get(0, 0) - &s32)).to_f64());
    for i in 0..g {
        for j in 0..g {
            if i != j {
                push(format!("b[{},{}]/2>=|b[{},{}]|", i + 1, i + 1, i + 1, j + 1), b(i, i) / 2.0 - b(i, j).abs());
            }
        }
    }
    if g == 1 {
        let n = Float::with_val(p, tau.tau11().abs_ref());
        push("|tau|>=1".into(), (n - 1u32).to_f64());
    }
    out
}

pub fn all_pass(checks: &[ConditionResult]) -> bool {
    checks.iter().all(|c| c.pass)
}

#[derive(Clone, Debug)]
pub struct ThetaNullReport {
    pub max_abs: Float,
    pub min_nonzero_abs: Float,
    /// (4g)^{2g²} exp(−(π/8) tr Im τ)
    pub upper_for_min: Float,
    pub trace: Float,
    pub nonzero_count: usize,
    pub max_ok: bool,
    pub min_ok: bool,
}

/// Max and min nonzero |θ_p(0, τ)| over the 4^g half-integer characteristics.
pub fn theta_null_bounds(tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<ThetaNullReport> {
    let g = tau.g();
    let checks = check_reduced(tau, g);
    if let Some(bad) = checks.iter().find(|c| !c.pass) {
        return Err(Error::Precondition(format!(
            "τ is not reduced: {} (margin {:.3e})",
            bad.id, bad.margin
        )));
    }
    let p = ctx.prec();
    let zero = Float::with_val(p, 1) >> (ctx.bits / 2);
    let mut max = Float::with_val(p, 0);
    let mut min: Option<Float> = None;
    let mut count = 0;
    for m in half_characteristics(g) {
        if !m.is_even() {
            continue;
        }
        let v = Float::with_val(p, theta_null(&m, tau, ctx)?.abs_ref());
        if v < zero {
            continue;
        }
        count += 1;
        if v > max {
            max = v.clone();
        }
        if min.as_ref().is_none_or(|mm| v < *mm) {
            min = Some(v);
        }
    }
    let min = min.ok_or_else(|| Error::Numeric("every theta null vanished".into()))?;
    let trace = tau.im().trace();
    let base = Float::with_val(p, 4 * g as u32).pow_u(2 * (g * g) as u32);
    let upper = base * Float::with_val(p, -(ctx.pi() * &trace) / 8u32).exp();
    Ok(ThetaNullReport {
        max_ok: max >= 1,
        min_ok: min <= upper,
        max_abs: max,
        min_nonzero_abs: min,
        upper_for_min: upper,
        trace,
        nonzero_count: count,
    })
}

trait PowU {
    fn pow_u(self, e: u32) -> Float;
}

impl PowU for Float {
    fn pow_u(self, e: u32) -> Float {
        use rug::ops::Pow;
        self.pow(e)
    }
}

#[derive(Clone, Debug)]
pub struct MatrixLemmaReport {
    pub lhs: Float,
    pub rhs: Float,
    pub margin: Float,
    pub holds: bool,
}

/// (π/8) tr Im τ ≤ d·hA + 2g² log(4g).
pub fn matrix_lemma_check(tau: &SiegelMatrix, h_a: &Float, d: u32, ctx: &PrecisionContext) -> MatrixLemmaReport {
    let g = tau.g() as u32;
    let p = ctx.prec();
    let lhs = ctx.pi() * tau.im().trace() / 8u32;
    let rhs = Float::with_val(p, h_a * d) + Float::with_val(p, 4 * g).ln() * (2 * g * g);
    let margin = Float::with_val(p, &rhs - &lhs);
    MatrixLemmaReport { holds: margin >= 0, lhs, rhs, margin }
}

/// The g = 1 height proxy log max_{q,p} |θ_q(0)/θ_p(0)| over nonzero even nulls.
pub fn null_ratio_height(report: &ThetaNullReport) -> Float {
    Float::with_val(report.max_abs.prec(), &report.max_abs / &report.min_nonzero_abs).ln()
}

/// A random τ passing `check_reduced`, g ∈ {1, 2}.
pub fn sample_reduced<R: Rng>(g: usize, rng: &mut R, prec: u32) -> Result<SiegelMatrix> {
    loop {
        let t = match g {
            1 => {
                let x: f64 = rng.gen_range(-0.5..0.5);
                let y: f64 = rng.gen_range(0.8..4.0);
                SiegelMatrix::from_f64(1, &[(x, y)], prec)?
            }
            2 => {
                let b11: f64 = rng.gen_range(0.87..2.5);
                let b22: f64 = b11 + rng.gen_range(0.0..2.0);
                let b12: f64 = rng.gen_range(0.0..b11 / 2.0);
                let a: [f64; 3] = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
                SiegelMatrix::from_f64(2, &[(a[0], b11), (a[1], b12), (a[1], b12), (a[2], b22)], prec)?
            }
            _ => return Err(Error::Domain("sampling supports g = 1, 2".into())),
        };
        if all_pass(&check_reduced(&t, g)) {
            return Ok(t);
        }
    }
}
