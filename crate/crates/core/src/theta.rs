//! Theta series with characteristics, Jacobi thetas, theta norms, Δ(τ), φ(τ) and J₁₀.

use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, RealMatrix};
use crate::precision::PrecisionContext;
use crate::weierstrass::char_system;

/// Below this smallest eigenvalue of Im τ the engine refuses to sum.
pub const MIN_LAMBDA: f64 = 0.1;
const MAX_BOX_POINTS: f64 = 4.0e6;

/// Symmetric g×g complex matrix with positive-definite imaginary part.
#[derive(Clone, Debug)]
pub struct SiegelMatrix {
    g: usize,
    entries: Vec<Complex>,
}

impl SiegelMatrix {
    pub fn new(g: usize, entries: Vec<Complex>) -> Result<Self> {
        if g == 0 || entries.len() != g * g {
            return Err(Error::Domain(format!(
                "expected {} entries for g = {g}, got {}",
                g * g,
                entries.len()
            )));
        }
        let prec = entries.iter().map(|c| c.prec().0).min().unwrap();
        let tol = Float::with_val(prec, 1) >> prec.saturating_sub(8);
        for i in 0..g {
            for j in i + 1..g {
                let d = Float::with_val(prec, Complex::with_val(prec, &entries[i * g + j] - &entries[j * g + i]).abs_ref());
                let s = Float::with_val(prec, entries[i * g + j].abs_ref()).max(&Float::with_val(prec, 1));
                if d > Float::with_val(prec, &tol * &s) {
                    return Err(Error::Domain(format!("τ is not symmetric at ({i},{j})")));
                }
            }
        }
        let m = SiegelMatrix { g, entries };
        if !m.im().is_positive_definite() {
            return Err(Error::Domain("Im τ is not positive definite".into()));
        }
        Ok(m)
    }

    pub fn scalar(tau: Complex) -> Result<Self> {
        SiegelMatrix::new(1, vec![tau])
    }

    /// Entries given as (re, im) pairs in row-major order.
    pub fn from_f64(g: usize, vals: &[(f64, f64)], prec: u32) -> Result<Self> {
        SiegelMatrix::new(g, vals.iter().map(|&v| Complex::with_val(prec, v)).collect())
    }

    pub fn diag(taus: &[Complex]) -> Result<Self> {
        let g = taus.len();
        let prec = taus[0].prec().0;
        let mut e = vec![Complex::with_val(prec, 0); g * g];
        for (i, t) in taus.iter().enumerate() {
            e[i * g + i] = t.clone();
        }
        SiegelMatrix::new(g, e)
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex {
        &self.entries[i * self.g + j]
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn prec(&self) -> u32 {
        self.entries[0].prec().0
    }

    /// The g = 1 entry.
    pub fn tau11(&self) -> &Complex {
        &self.entries[0]
    }

    pub fn im(&self) -> RealMatrix {
        RealMatrix::from_fn(self.g, self.prec(), |i, j| self.get(i, j).imag().clone())
    }

    pub fn re(&self) -> RealMatrix {
        RealMatrix::from_fn(self.g, self.prec(), |i, j| self.get(i, j).real().clone())
    }

    pub fn as_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.g, self.prec(), |i, j| self.get(i, j).clone())
    }

    /// Copy at a different mantissa size.
    pub fn with_prec(&self, prec: u32) -> SiegelMatrix {
        SiegelMatrix {
            g: self.g,
            entries: self.entries.iter().map(|c| Complex::with_val(prec, c)).collect(),
        }
    }

    pub fn require_genus(&self, g: usize) -> Result<()> {
        if self.g != g {
            return Err(Error::Domain(format!("expected genus {g}, got {}", self.g)));
        }
        Ok(())
    }
}

/// Characteristic (a, b) with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThetaCharacteristic {
    pub a: Vec<Rational>,
    pub b: Vec<Rational>,
}

impl ThetaCharacteristic {
    pub fn new(a: Vec<Rational>, b: Vec<Rational>) -> Self {
        assert_eq!(a.len(), b.len(), "characteristic halves differ in length");
        ThetaCharacteristic { a, b }
    }

    pub fn zero(g: usize) -> Self {
        ThetaCharacteristic::new(vec![Rational::new(); g], vec![Rational::new(); g])
    }

    /// Half-integer characteristic from bit vectors (1 ↦ ½).
    pub fn half(a: &[u8], b: &[u8]) -> Self {
        let h = |v: &[u8]| v.iter().map(|&x| Rational::from((x as i32, 2))).collect();
        ThetaCharacteristic::new(h(a), h(b))
    }

    pub fn g(&self) -> usize {
        self.a.len()
    }

    /// e(m) = 4aᵀb mod 2, or `None` when 4aᵀb is not an integer.
    pub fn parity(&self) -> Option<u8> {
        let mut s = Rational::new();
        for (x, y) in self.a.iter().zip(&self.b) {
            s += Rational::from(x * y);
        }
        s *= 4;
        if *s.denom() != 1 {
            return None;
        }
        let r = Rational::from(s.numer().clone() % 2u32).numer().clone();
        Some(if r == 0 { 0 } else { 1 })
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Some(0)
    }

    /// Representative with every entry in [0, 1).
    pub fn reduced(&self) -> Self {
        let red = |v: &[Rational]| {
            v.iter()
                .map(|x| {
                    let f = Rational::from(x.floor_ref());
                    x - f
                })
                .collect()
        };
        ThetaCharacteristic::new(red(&self.a), red(&self.b))
    }

    pub fn add(&self, o: &Self) -> Self {
        let s = |x: &[Rational], y: &[Rational]| {
            x.iter().zip(y).map(|(p, q)| Rational::from(p + q)).collect()
        };
        ThetaCharacteristic::new(s(&self.a, &o.a), s(&self.b, &o.b))
    }
}

impl std::fmt::Display for ThetaCharacteristic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let j = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "[{};{}]", j(&self.a), j(&self.b))
    }
}

/// All 4^g characteristics with entries in {0, ½}.
pub fn half_characteristics(g: usize) -> Vec<ThetaCharacteristic> {
    (0..1usize << (2 * g))
        .map(|mask| {
            let bit = |k: usize| ((mask >> k) & 1) as u8;
            let a: Vec<u8> = (0..g).map(|i| bit(2 * g - 1 - i)).collect();
            let b: Vec<u8> = (0..g).map(|i| bit(g - 1 - i)).collect();
            ThetaCharacteristic::half(&a, &b)
        })
        .collect()
}

pub fn even_characteristics(g: usize) -> Vec<ThetaCharacteristic> {
    half_characteristics(g).into_iter().filter(|m| m.is_even()).collect()
}

/// Truncation radius R for ‖n + a − c‖∞ ≤ R: the Gaussian tail outside the
/// box, in units of exp(π cᵀ Y c), stays below 2^-(bits+guard).
pub fn truncation_radius(lambda_min: f64, g: usize, ctx: &PrecisionContext) -> Result<u32> {
    let target = ctx.ln_target();
    let tail = |r: u32| -> f64 {
        let mut terms = Vec::new();
        for k in 0.. {
            let rk = (r + k) as f64;
            let t = g as f64 * (2.0 * rk + 3.0).ln() - std::f64::consts::PI * lambda_min * rk * rk;
            terms.push(t);
            if k > 4 && t < target - 60.0 {
                break;
            }
        }
        let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
    };
    let mut r = 1;
    while tail(r) >= target {
        r += 1;
        if r > ctx.max_radius {
            return Err(Error::Resource(format!(
                "theta truncation radius exceeds {} (λ_min = {lambda_min:.3e})",
                ctx.max_radius
            )));
        }
    }
    Ok(r)
}

fn check_conditioning(tau: &SiegelMatrix) -> Result<f64> {
    let lam = tau.im().lambda_min();
    if lam < MIN_LAMBDA {
        return Err(Error::Precondition(format!(
            "λ_min(Im τ) = {lam:.4} < {MIN_LAMBDA}; Siegel-reduce τ first"
        )));
    }
    Ok(lam)
}

fn rat_float(r: &Rational, prec: u32) -> Float {
    Float::with_val(prec, r)
}

/// θ_{a,b}(z, τ) = Σ_n exp(iπ(n+a)ᵀτ(n+a) + 2iπ(n+a)ᵀ(z+b)).
pub fn theta_char(
    m: &ThetaCharacteristic,
    z: &[Complex],
    tau: &SiegelMatrix,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let g = tau.g();
    if m.g() != g || z.len() != g {
        return Err(Error::Domain("dimension mismatch between τ, z and characteristic".into()));
    }
    for zi in z {
        if !zi.real().is_finite() || !zi.imag().is_finite() {
            return Err(Error::Domain("z is not finite".into()));
        }
    }
    let lam = check_conditioning(tau)?;
    let p = ctx.prec();
    let r = truncation_radius(lam, g, ctx)? as f64;

    let y = tau.im();
    let yinv = y.inverse().ok_or_else(|| Error::Domain("Im τ is singular".into()))?;
    let imz: Vec<Float> = z.iter().map(|c| Float::with_val(p, c.imag())).collect();
    let c: Vec<f64> = yinv.mul_vec(&imz).iter().map(|x| -x.to_f64()).collect();

    let a: Vec<Float> = m.a.iter().map(|x| rat_float(x, p)).collect();
    let mut ranges = Vec::with_capacity(g);
    let mut points = 1.0;
    for i in 0..g {
        let af = a[i].to_f64();
        let lo = (c[i] - af - r).ceil() as i64;
        let hi = (c[i] - af + r).floor() as i64;
        points *= (hi - lo + 1) as f64;
        ranges.push((lo, hi));
    }
    if points > MAX_BOX_POINTS {
        return Err(Error::Resource(format!("theta box needs {points:.0} terms")));
    }

    let ipi = ctx.i_pi();
    // v_i values per coordinate
    let vals: Vec<Vec<Float>> = (0..g)
        .map(|i| (ranges[i].0..=ranges[i].1).map(|n| Float::with_val(p, &a[i] + n)).collect())
        .collect();
    // exp(iπ τ_ii v² + 2iπ v (z_i + b_i))
    let diag: Vec<Vec<Complex>> = (0..g)
        .map(|i| {
            let zb = Complex::with_val(p, &z[i] + rat_float(&m.b[i], p));
            vals[i]
                .iter()
                .map(|v| {
                    let v2 = Float::with_val(p, v.square_ref());
                    let mut e = Complex::with_val(p, tau.get(i, i) * &v2);
                    e += Complex::with_val(p, &zb * v) * 2u32;
                    e *= &ipi;
                    e.exp()
                })
                .collect()
        })
        .collect();
    // exp(2iπ τ_ij v_i v_j), i < j
    let mut off: Vec<(usize, usize, Vec<Complex>)> = Vec::new();
    for i in 0..g {
        for j in i + 1..g {
            let nj = vals[j].len();
            let mut tab = Vec::with_capacity(vals[i].len() * nj);
            for vi in &vals[i] {
                for vj in &vals[j] {
                    let vv = Float::with_val(p, vi * vj);
                    let mut e = Complex::with_val(p, tau.get(i, j) * &vv);
                    e *= &ipi;
                    e *= 2u32;
                    tab.push(e.exp());
                }
            }
            off.push((i, j, tab));
        }
    }

    let lens: Vec<usize> = vals.iter().map(|v| v.len()).collect();
    let mut idx = vec![0usize; g];
    let mut sum = Complex::with_val(p, 0);
    loop {
        let mut t = diag[0][idx[0]].clone();
        for i in 1..g {
            t *= &diag[i][idx[i]];
        }
        for (i, j, tab) in &off {
            t *= &tab[idx[*i] * lens[*j] + idx[*j]];
        }
        sum += t;
        let mut k = 0;
        loop {
            if k == g {
                return Ok(sum);
            }
            idx[k] += 1;
            if idx[k] < lens[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// θ_m(0, τ).
pub fn theta_null(m: &ThetaCharacteristic, tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<Complex> {
    let z = vec![Complex::with_val(ctx.prec(), 0); tau.g()];
    theta_char(m, &z, tau, ctx)
}

/// (θ₁, θ₂, θ₃, θ₄)(z, τ) from the bilateral nome series, nome e^{iπτ}.
/// θ₁ carries the (−i) prefactor, so θ₁ = 2Σ(−1)ⁿq^{(n+½)²}sin((2n+1)πz).
pub fn jacobi_thetas(z: &Complex, tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<[Complex; 4]> {
    tau.require_genus(1)?;
    jacobi_thetas_scalar(z, tau.tau11(), ctx)
}

pub(crate) fn jacobi_thetas_scalar(z: &Complex, tau: &Complex, ctx: &PrecisionContext) -> Result<[Complex; 4]> {
    let p = ctx.prec();
    let t = tau.imag().to_f64();
    if t < MIN_LAMBDA {
        return Err(Error::Precondition(format!("Im τ = {t:.4} < {MIN_LAMBDA}; reduce τ first")));
    }
    let y = z.imag().to_f64().abs();
    let n_max = (y / t + ((-ctx.ln_target() + 10.0) / (std::f64::consts::PI * t)).sqrt()).ceil() as i64 + 2;
    if n_max > 100_000 {
        return Err(Error::Resource(format!("Jacobi series needs {n_max} terms")));
    }
    let ipi = ctx.i_pi();
    let mut th = [
        Complex::with_val(p, 0),
        Complex::with_val(p, 0),
        Complex::with_val(p, 0),
        Complex::with_val(p, 0),
    ];
    for n in -n_max..=n_max {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        // q^{(n+½)²} e^{(2n+1)iπz}
        let h = Float::with_val(p, n) + 0.5f64;
        let mut e = Complex::with_val(p, tau * Float::with_val(p, h.square_ref()));
        e += Complex::with_val(p, z * Float::with_val(p, &h * 2u32));
        e *= &ipi;
        let half = e.exp();
        // q^{n²} e^{2niπz}
        let mut e = Complex::with_val(p, tau * (n * n));
        e += Complex::with_val(p, z * (2 * n));
        e *= &ipi;
        let whole = e.exp();
        if sign == 1 {
            th[0] += &half;
            th[3] += &whole;
        } else {
            th[0] -= &half;
            th[3] -= &whole;
        }
        th[1] += half;
        th[2] += whole;
    }
    // multiply by −i
    th[0] *= Complex::with_val(p, (0, -1));
    Ok(th)
}

/// (θ₂, θ₃, θ₄)(0, τ).
pub fn jacobi_nulls(tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<[Complex; 3]> {
    let z = Complex::with_val(ctx.prec(), 0);
    let [_, t2, t3, t4] = jacobi_thetas(&z, tau, ctx)?;
    Ok([t2, t3, t4])
}

/// Reduce z modulo ℤ^g + τℤ^g so that Im z = Y k with k ∈ (−½, ½]^g and Re z ∈ [−½, ½).
pub fn reduce_z(z: &[Complex], tau: &SiegelMatrix) -> Result<Vec<Complex>> {
    let g = tau.g();
    let p = tau.prec().max(z[0].prec().0);
    let y = tau.im();
    let yinv = y.inverse().ok_or_else(|| Error::Domain("Im τ is singular".into()))?;
    let imz: Vec<Float> = z.iter().map(|c| Float::with_val(p, c.imag())).collect();
    let k: Vec<Float> = yinv.mul_vec(&imz).into_iter().map(|x| x.round()).collect();
    let mut out: Vec<Complex> = z.iter().map(|c| Complex::with_val(p, c)).collect();
    for i in 0..g {
        for j in 0..g {
            out[i] -= Complex::with_val(p, tau.get(i, j) * &k[j]);
        }
    }
    for c in out.iter_mut() {
        let r = Float::with_val(p, c.real().round_ref());
        *c -= r;
    }
    Ok(out)
}

/// ‖θ‖(z, τ) = det(Y)^{1/4} exp(−π yᵀY⁻¹y) |θ_{0,0}(z, τ)|, evaluated after lattice reduction of z.
pub fn theta_norm(z: &[Complex], tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.prec();
    let zr = reduce_z(z, tau)?;
    let y = tau.im();
    let yinv = y.inverse().ok_or_else(|| Error::Domain("Im τ is singular".into()))?;
    let imz: Vec<Float> = zr.iter().map(|c| Float::with_val(p, c.imag())).collect();
    let q = yinv.quad(&imz);
    let th = theta_char(&ThetaCharacteristic::zero(tau.g()), &zr, tau, ctx)?;
    let det4 = Float::with_val(p, y.det().sqrt_ref()).sqrt();
    let damp = Float::with_val(p, -(q * ctx.pi())).exp();
    Ok(det4 * damp * Float::with_val(p, th.abs_ref()))
}

/// Δ(τ) = q Π (1 − qⁿ)²⁴ with q = e^{2iπτ}; the product is cut once the
/// relative tail bound 24|q|^{N+1}/((1−|q|)(1−|q|^{N+1})) is below 2^-(bits+guard).
pub fn modular_discriminant(tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<Complex> {
    tau.require_genus(1)?;
    modular_discriminant_scalar(tau.tau11(), ctx)
}

pub(crate) fn modular_discriminant_scalar(tau: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let p = ctx.prec();
    if *tau.imag() <= 0 {
        return Err(Error::Domain("Im τ must be positive".into()));
    }
    let q = Complex::with_val(p, tau * ctx.i_pi() * 2u32).exp();
    let aq = Float::with_val(p, q.abs_ref()).to_f64();
    let ln_aq = aq.ln();
    let target = ctx.ln_target();
    let mut n = 1u64;
    loop {
        let lt = (24.0f64).ln() + (n as f64 + 1.0) * ln_aq - (1.0 - aq).ln() - (1.0 - aq.powf(n as f64 + 1.0)).ln();
        if lt < target {
            break;
        }
        n += 1;
        if n > 1_000_000 {
            return Err(Error::Resource("q-product for Δ(τ) needs more than 10⁶ factors".into()));
        }
    }
    let mut prod = Complex::with_val(p, 1);
    let mut qn = q.clone();
    for _ in 0..n {
        prod *= Complex::with_val(p, 1 - &qn);
        qn *= &q;
    }
    Ok(q * prod.pow(24u32))
}

/// φ(τ) = Π_{T} θ_{m_{T∘U}}(0, τ)⁸ over the C(2g+1, g+1) characteristics of `char_system`.
pub fn phi_product(tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<Complex> {
    let g = tau.g();
    let chars = char_system(g)?;
    let mut prod = Complex::with_val(ctx.prec(), 1);
    for m in &chars {
        prod *= theta_null(m, tau, ctx)?.pow(8u32);
    }
    Ok(prod)
}

/// J₁₀(τ) = Π θ_m(0, τ)² over the ten even genus-2 characteristics.
pub fn j10(tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<Complex> {
    tau.require_genus(2)?;
    let mut prod = Complex::with_val(ctx.prec(), 1);
    for m in even_characteristics(2) {
        prod *= theta_null(&m, tau, ctx)?.square();
    }
    Ok(prod)
}
