//! Elliptic curves over ℚ: minimal models, AGM periods, the Faltings height
//! by Silverman's formula, Chowla–Selberg and the rational group law.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::local_heights::{HeightBreakdown, Place, PlaceEntry};
use crate::precision::PrecisionContext;
use crate::siegel::reduce_g1;
use crate::theta::{modular_discriminant, SiegelMatrix};
use crate::weierstrass::{finite_valuations, valuation, ModelChange, WeierstrassEquation};

/// b2, b4, b6, b8, c4, c6 of a long Weierstrass equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub b2: Rational,
    pub b4: Rational,
    pub b6: Rational,
    pub b8: Rational,
    pub c4: Rational,
    pub c6: Rational,
    pub delta: Rational,
}

impl Invariants {
    pub fn of(e: &WeierstrassEquation) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = e.ainvs()?;
        let b2 = Rational::from(a1.square_ref()) + Rational::from(&a2 * 4u32);
        let b4 = Rational::from(&a4 * 2u32) + Rational::from(&a1 * &a3);
        let b6 = Rational::from(a3.square_ref()) + Rational::from(&a6 * 4u32);
        let b8 = Rational::from(a1.square_ref()) * &a6 + Rational::from(&a2 * &a6) * 4u32
            - Rational::from(&a1 * &a3) * &a4
            + Rational::from(a3.square_ref()) * &a2
            - Rational::from(a4.square_ref());
        let c4 = Rational::from(b2.square_ref()) - Rational::from(&b4 * 24u32);
        let c6 = -Rational::from((&b2).pow(3)) + Rational::from(&b2 * &b4) * 36u32 - Rational::from(&b6 * 216u32);
        let delta = -Rational::from(b2.square_ref()) * &b8 - Rational::from((&b4).pow(3)) * 8u32
            - Rational::from(b6.square_ref()) * 27u32
            + Rational::from(&b2 * &b4) * &b6 * 9u32;
        Ok(Invariants { b2, b4, b6, b8, c4, c6, delta })
    }

    pub fn j(&self) -> Rational {
        Rational::from((&self.c4).pow(3)) / &self.delta
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    Infinity,
    Affine(Rational, Rational),
}

impl Point {
    pub fn xy(x: i64, y: i64) -> Point {
        Point::Affine(Rational::from(x), Rational::from(y))
    }
}

pub fn on_curve(e: &WeierstrassEquation, pt: &Point) -> bool {
    match pt {
        Point::Infinity => true,
        Point::Affine(x, y) => {
            let lhs = Rational::from(y.square_ref()) + e.q().eval(x) * y;
            lhs == e.p().eval(x)
        }
    }
}

pub fn neg(e: &WeierstrassEquation, pt: &Point) -> Point {
    match pt {
        Point::Infinity => Point::Infinity,
        Point::Affine(x, y) => Point::Affine(x.clone(), -(y + e.q().eval(x))),
    }
}

/// Chord-and-tangent addition on a genus-1 model.
pub fn add(e: &WeierstrassEquation, p1: &Point, p2: &Point) -> Point {
    let [a1, a2, a3, _a4, _a6] = e.ainvs().expect("genus 1");
    let (x1, y1, x2, y2) = match (p1, p2) {
        (Point::Infinity, q) | (q, Point::Infinity) => return q.clone(),
        (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
    };
    let lam;
    if x1 == x2 {
        let ysum = Rational::from(y1 + y2) + Rational::from(&a1 * x2) + &a3;
        if ysum == 0 {
            return Point::Infinity;
        }
        // tangent: (3x² + 2a2x + a4 − a1y) / (2y + a1x + a3)
        let a4 = e.p().coeff(1);
        let num = Rational::from(x1.square_ref()) * 3u32 + Rational::from(&a2 * x1) * 2u32 + a4
            - Rational::from(&a1 * y1);
        let den = Rational::from(y1 * 2u32) + Rational::from(&a1 * x1) + &a3;
        lam = num / den;
    } else {
        lam = Rational::from(y2 - y1) / Rational::from(x2 - x1);
    }
    let nu = y1 - Rational::from(&lam * x1);
    let x3 = Rational::from(lam.square_ref()) + Rational::from(&a1 * &lam) - &a2 - x1 - x2;
    let y3 = -(Rational::from(&lam + &a1) * &x3) - &nu - &a3;
    Point::Affine(x3, y3)
}

pub fn double(e: &WeierstrassEquation, p: &Point) -> Point {
    add(e, p, p)
}

pub fn sub(e: &WeierstrassEquation, p1: &Point, p2: &Point) -> Point {
    add(e, p1, &neg(e, p2))
}

/// Image of a point under the model change (x, y) = (u²x′ + s, u³y′ + t(x′)).
pub fn map_point(c: &ModelChange, pt: &Point) -> Point {
    match pt {
        Point::Infinity => Point::Infinity,
        Point::Affine(x, y) => {
            let u2 = Rational::from(c.u.square_ref());
            let xp = Rational::from(x - &c.s) / &u2;
            let yp = (y - c.t.eval(&xp)) / (u2 * &c.u);
            Point::Affine(xp, yp)
        }
    }
}

/// A ℚ-minimal model together with the changes that produced it.
#[derive(Clone, Debug)]
pub struct MinimalModel {
    pub model: WeierstrassEquation,
    pub delta_min: Integer,
    /// Applied in order, starting from the input equation.
    pub changes: Vec<ModelChange>,
}

impl MinimalModel {
    pub fn map_point(&self, pt: &Point) -> Point {
        self.changes.iter().fold(pt.clone(), |acc, c| map_point(c, &acc))
    }

    pub fn was_changed(&self) -> bool {
        !self.changes.is_empty()
    }
}

fn modinv(a: &Rational, m: &Integer) -> Result<Integer> {
    // a mod m for a rational with denominator prime to m
    let d = Integer::from(a.denom().invert_ref(m).ok_or_else(|| Error::Numeric("denominator not invertible".into()))?);
    Ok(((a.numer() * d) % m + m) % m)
}

fn try_reduce_at(e: &WeierstrassEquation, p: &Integer) -> Result<Option<ModelChange>> {
    let u = Rational::from(p.clone());
    let check = |c: ModelChange| -> Option<ModelChange> {
        e.apply(&c).ok().filter(|m| m.is_integral()).map(|_| c)
    };
    if *p <= 3 {
        let pi = p.to_u32().unwrap();
        for r in 0..pi * pi {
            for s in 0..pi {
                for t in 0..pi * pi * pi {
                    let c = ModelChange::elliptic(u.clone(), Rational::from(r), Rational::from(s), Rational::from(t));
                    if let Some(c) = check(c) {
                        return Ok(Some(c));
                    }
                }
            }
        }
        return Ok(None);
    }
    let inv = Invariants::of(e)?;
    if valuation(&inv.c4, p) < 4 || valuation(&inv.c6, p) < 6 {
        return Ok(None);
    }
    let [a1, _a2, a3, _a4, _a6] = e.ainvs()?;
    let p2 = Integer::from(p * p);
    let p3 = Integer::from(&p2 * p);
    let s = modinv(&(-Rational::from(&a1 / 2u32)), p)?;
    let r = modinv(&(-Rational::from(&inv.b2 / 12u32)), &p2)?;
    let t = modinv(&(-(&a3 + (&a1 * Rational::from(r.clone()))) / 2u32), &p3)?;
    Ok(check(ModelChange::elliptic(u, Rational::from(r), Rational::from(s), Rational::from(t))))
}

/// Integral model with |Δ| minimal among models reachable by rational changes.
pub fn minimal_model_q(e: &WeierstrassEquation) -> Result<MinimalModel> {
    if e.genus() != 1 {
        return Err(Error::Domain("minimal models are implemented for g = 1".into()));
    }
    let mut changes = Vec::new();
    let mut cur = e.clone();
    if !cur.is_integral() {
        let mut den = Integer::from(1);
        for c in cur.p().coeffs().iter().chain(cur.q().coeffs()) {
            den.lcm_mut(c.denom());
        }
        let c = ModelChange::scaling(Rational::from((Integer::from(1), den)));
        cur = cur.apply(&c)?;
        changes.push(c);
    }
    loop {
        let mut progressed = false;
        let d = cur.discriminant().numer().clone();
        for (p, k) in finite_valuations(&Rational::from(d))? {
            if k < 12 {
                continue;
            }
            if let Some(c) = try_reduce_at(&cur, &p)? {
                cur = cur.apply(&c)?;
                changes.push(c);
                progressed = true;
                break;
            }
        }
        if !progressed {
            break;
        }
    }
    let delta_min = cur.discriminant().numer().clone();
    Ok(MinimalModel { model: cur, delta_min, changes })
}

#[derive(Clone, Debug)]
pub struct EllipticPeriodData {
    pub w1: Complex,
    pub w2: Complex,
    /// Reduced, equal to w2/w1.
    pub tau: SiegelMatrix,
    pub covolume: Float,
    /// max relative error of the recovered g2, g3.
    pub lattice_error: Float,
}

fn agm(a: &Complex, b: &Complex, prec: u32) -> Result<Complex> {
    let mut a = a.clone();
    let mut b = b.clone();
    let eps = Float::with_val(prec, 1) >> (prec - 4);
    for _ in 0..10_000 {
        let diff = Float::with_val(prec, Complex::with_val(prec, &a - &b).abs_ref());
        if diff <= Float::with_val(prec, a.abs_ref()) * &eps {
            return Ok(a);
        }
        let an = Complex::with_val(prec, &a + &b) / 2u32;
        let mut bn = Complex::with_val(prec, &a * &b).sqrt();
        let dm = Float::with_val(prec, Complex::with_val(prec, &an - &bn).abs_ref());
        let dp = Float::with_val(prec, Complex::with_val(prec, &an + &bn).abs_ref());
        if dm > dp {
            bn = -bn;
        } else if dm == dp {
            let ratio = Complex::with_val(prec, &bn / &an);
            if *ratio.imag() < 0 {
                bn = -bn;
            }
        }
        a = an;
        b = bn;
    }
    Err(Error::Numeric("AGM did not converge".into()))
}

/// Roots of a monic complex polynomial (coefficients low to high) by
/// Durand–Kerner followed by Newton polishing.
pub fn complex_roots(coeffs: &[Complex], prec: u32) -> Result<Vec<Complex>> {
    let n = coeffs.len() - 1;
    let eval = |x: &Complex| {
        let mut acc = Complex::with_val(prec, 0);
        for c in coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    };
    let deriv = |x: &Complex| {
        let mut acc = Complex::with_val(prec, 0);
        for (i, c) in coeffs.iter().enumerate().skip(1).rev() {
            acc *= x;
            acc += Complex::with_val(prec, c * i as u32);
        }
        acc
    };
    let mut scale = Float::with_val(prec, 1);
    for c in coeffs {
        scale = scale.max(&Float::with_val(prec, c.abs_ref()));
    }
    let seed = Complex::with_val(prec, (0.4, 0.9));
    let mut z: Vec<Complex> = (0..n)
        .map(|k| Complex::with_val(prec, seed.clone().pow(k as u32)) * &scale)
        .collect();
    let eps = Float::with_val(prec, 1) >> (prec - 8);
    for _ in 0..2000 {
        let mut moved = Float::with_val(prec, 0);
        for i in 0..n {
            let mut den = Complex::with_val(prec, 1);
            for j in 0..n {
                if i != j {
                    den *= Complex::with_val(prec, &z[i] - &z[j]);
                }
            }
            let step = eval(&z[i]) / den;
            moved = moved.max(&Float::with_val(prec, step.abs_ref()));
            z[i] -= step;
        }
        if moved < Float::with_val(prec, &eps * &scale) {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..8 {
            let d = deriv(r);
            if d.is_zero() {
                break;
            }
            let step = eval(r) / d;
            *r -= step;
        }
    }
    Ok(z)
}

fn eisenstein(tau: &Complex, k: u32, ctx: &PrecisionContext) -> Complex {
    // E4 = 1 + 240 Σ σ3(n)qⁿ, E6 = 1 − 504 Σ σ5(n)qⁿ, via Lambert series
    let p = ctx.prec();
    let q = Complex::with_val(p, tau * ctx.i_pi() * 2u32).exp();
    let mut qn = q.clone();
    let mut s = Complex::with_val(p, 0);
    let eps = Float::with_val(p, 1) >> (p + 4);
    for n in 1u32..100_000 {
        let denom = Complex::with_val(p, 1 - &qn);
        let t = Complex::with_val(p, &qn / denom) * Float::with_val(p, n).pow(k - 1);
        let small = Float::with_val(p, t.abs_ref()) < eps;
        s += t;
        if small && n > 2 {
            break;
        }
        qn *= &q;
    }
    match k {
        4 => s * 240u32 + 1u32,
        _ => 1u32 - s * 504u32,
    }
}

/// g2, g3 of ℤw1 + ℤw2 (τ = w2/w1 should be reduced).
fn lattice_invariants(w1: &Complex, tau: &Complex, ctx: &PrecisionContext) -> (Complex, Complex) {
    let p = ctx.prec();
    let pi = ctx.pi();
    let e4 = eisenstein(tau, 4, ctx);
    let e6 = eisenstein(tau, 6, ctx);
    let g2 = Complex::with_val(p, (&pi).pow(4u32)) * 4u32 / 3u32 * e4 / Complex::with_val(p, w1.pow(4u32));
    let g3 = Complex::with_val(p, (&pi).pow(6u32)) * 8u32 / 27u32 * e6 / Complex::with_val(p, w1.pow(6u32));
    (g2, g3)
}

fn rel_err(got: &Complex, want: &Rational, p: u32) -> Float {
    let w = Complex::with_val(p, Float::with_val(p, want));
    let d = Float::with_val(p, Complex::with_val(p, got - &w).abs_ref());
    let s = Float::with_val(p, w.abs_ref()).max(&Float::with_val(p, 1));
    d / s
}

/// Period lattice of the invariant differential dx/(2y + a1x + a3).
pub fn periods_agm(e: &WeierstrassEquation, ctx: &PrecisionContext) -> Result<EllipticPeriodData> {
    let inv = Invariants::of(e)?;
    let p = ctx.prec();
    let fl = |r: &Rational| Complex::with_val(p, Float::with_val(p, r));
    // 4x³ + b2x² + 2b4x + b6, made monic
    let coeffs = vec![
        fl(&inv.b6) / 4u32,
        fl(&inv.b4) / 2u32,
        fl(&inv.b2) / 4u32,
        Complex::with_val(p, 1),
    ];
    let roots = complex_roots(&coeffs, p)?;
    let g2 = Rational::from(&inv.c4 / 12u32);
    let g3 = Rational::from(&inv.c6 / 216u32);
    let pi = ctx.pi();
    let select = Float::with_val(p, 1) >> (ctx.bits / 2);
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut best: Option<(Float, EllipticPeriodData)> = None;
    for perm in perms {
        let (e1, e2, e3) = (&roots[perm[0]], &roots[perm[1]], &roots[perm[2]]);
        let a = Complex::with_val(p, e1 - e3).sqrt();
        let b = Complex::with_val(p, e1 - e2).sqrt();
        let c = Complex::with_val(p, e2 - e3).sqrt();
        let c2 = Complex::with_val(p, e3 - e2).sqrt();
        for sb in [1i32, -1] {
            let m1 = agm(&a, &Complex::with_val(p, &b * sb), p)?;
            let w1 = Complex::with_val(p, &pi / &m1);
            let cands = [
                Complex::with_val(p, (0, &pi)) / agm(&a, &c, p)?,
                Complex::with_val(p, (0, &pi)) / agm(&a, &Complex::with_val(p, -&c), p)?,
                Complex::with_val(p, &pi) / agm(&a, &c2, p)?,
                Complex::with_val(p, &pi) / agm(&a, &Complex::with_val(p, -&c2), p)?,
            ];
            for w2 in cands {
                let Some(data) = normalise_lattice(&w1, &w2, ctx)? else { continue };
                let (lg2, lg3) = lattice_invariants(&data.w1, data.tau.tau11(), ctx);
                let err = rel_err(&lg2, &g2, p).max(&rel_err(&lg3, &g3, p));
                if err < select {
                    let data = EllipticPeriodData { lattice_error: err.clone(), ..data };
                    if best.as_ref().is_none_or(|(b, _)| err < *b) {
                        best = Some((err, data));
                    }
                }
            }
        }
        if best.is_some() {
            break;
        }
    }
    let (err, data) = best.ok_or_else(|| Error::Numeric("no AGM branch reproduces the curve's invariants".into()))?;
    if err > (Float::with_val(p, 1) >> (ctx.bits.saturating_sub(16))) {
        return Err(Error::Numeric(format!("lattice invariants only match to {}", err.to_f64())));
    }
    Ok(data)
}

fn normalise_lattice(w1: &Complex, w2: &Complex, ctx: &PrecisionContext) -> Result<Option<EllipticPeriodData>> {
    let p = ctx.prec();
    if w1.is_zero() || !w1.real().is_finite() || !w2.real().is_finite() {
        return Ok(None);
    }
    let mut w2 = w2.clone();
    let mut tau = Complex::with_val(p, &w2 / w1);
    let tiny = Float::with_val(p, 1) >> (ctx.bits / 2);
    if tau.imag().clone().abs() < tiny {
        return Ok(None);
    }
    if *tau.imag() < 0 {
        w2 = -w2;
        tau = -tau;
    }
    let red = reduce_g1(&SiegelMatrix::scalar(tau)?, ctx)?;
    let g = &red.gamma;
    let f = |x: &Integer| Float::with_val(p, x);
    let nw2 = Complex::with_val(p, &w2 * f(&g[0][0])) + Complex::with_val(p, w1 * f(&g[0][1]));
    let nw1 = Complex::with_val(p, &w2 * f(&g[1][0])) + Complex::with_val(p, w1 * f(&g[1][1]));
    let cov = Float::with_val(p, (Complex::with_val(p, nw1.conj_ref()) * &nw2).imag()).abs();
    let tau = SiegelMatrix::scalar(Complex::with_val(p, &nw2 / &nw1))?;
    Ok(Some(EllipticPeriodData {
        w1: nw1,
        w2: nw2,
        tau,
        covolume: cov,
        lattice_error: Float::with_val(p, 0),
    }))
}

/// Which finite data enters the Silverman formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FiniteModel {
    /// ord_p = max(0, −ord_p j): the value over any extension where E is semistable.
    #[default]
    Semistable,
    /// ord_p(Δ_min) of the ℚ-minimal model.
    Rational,
}

#[derive(Clone, Debug)]
pub struct FaltingsElliptic {
    pub h: Float,
    pub breakdown: HeightBreakdown,
    pub minimal: MinimalModel,
    pub periods: EllipticPeriodData,
    /// (p, ord used in the finite sum)
    pub finite_ords: Vec<(Integer, i64)>,
    pub warnings: Vec<String>,
}

/// −(1/12) log(|Δ(τ)| (2 Im τ)⁶).
pub fn alpha_arch_value(tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.prec();
    let d = Float::with_val(p, modular_discriminant(tau, ctx)?.abs_ref());
    let y2 = Float::with_val(p, tau.tau11().imag() * 2u32);
    Ok(-(d.ln() + y2.ln() * 6u32) / 12u32)
}

fn finite_ords(min: &MinimalModel, model: FiniteModel) -> Result<Vec<(Integer, i64)>> {
    let dm = Rational::from(min.delta_min.clone());
    let inv = Invariants::of(&min.model)?;
    let j = inv.j();
    let mut out = Vec::new();
    for (p, k) in finite_valuations(&dm)? {
        let ord = match model {
            FiniteModel::Rational => k as i64,
            FiniteModel::Semistable => {
                if j == 0 {
                    0
                } else {
                    (-(valuation(&j, &p) as i64)).max(0)
                }
            }
        };
        out.push((p, ord));
    }
    Ok(out)
}

/// h = (1/12)[Σ ord_p log p − log((2π)¹² |Δ(τ)| (Im τ)⁶)] + ½ log(2π²).
pub fn faltings_elliptic(e: &WeierstrassEquation, model: FiniteModel, ctx: &PrecisionContext) -> Result<FaltingsElliptic> {
    let p = ctx.prec();
    let minimal = minimal_model_q(e)?;
    let periods = periods_agm(&minimal.model, ctx)?;
    let tau = &periods.tau;
    let ords = finite_ords(&minimal, model)?;
    let mut warnings = Vec::new();
    if minimal.was_changed() {
        warnings.push(format!("input model is not minimal; using {} (Δ_min = {})", minimal.model, minimal.delta_min));
    }
    let rational = finite_ords(&minimal, FiniteModel::Rational)?;
    let semistable = finite_ords(&minimal, FiniteModel::Semistable)?;
    if rational != semistable {
        let bad: Vec<String> = rational
            .iter()
            .zip(&semistable)
            .filter(|(a, b)| a.1 != b.1)
            .map(|(a, b)| format!("p={} (ord Δ_min = {}, semistable ord = {})", a.0, a.1, b.1))
            .collect();
        let other = match model {
            FiniteModel::Semistable => "the ℚ-model value differs",
            FiniteModel::Rational => "the formula assumes semistability; the semistable value differs",
        };
        warnings.push(format!("additive reduction at {}; {other}", bad.join(", ")));
    } else {
        warnings.push("semistability not verified beyond ord_p(j) < 0 at every p | Δ_min".into());
    }

    let mut fin = Float::with_val(p, 0);
    let mut entries = Vec::new();
    for (q, k) in &ords {
        let a = Float::with_val(p, q).ln() * Float::with_val(p, *k);
        fin += &a;
        let a = a / 12u32;
        entries.push(PlaceEntry::alpha_only(Place::Finite(q.clone()), a));
    }
    let dtau = Float::with_val(p, modular_discriminant(tau, ctx)?.abs_ref());
    let y = tau.tau11().imag().clone();
    let two_pi = ctx.pi() * 2u32;
    let arch = Float::with_val(p, two_pi.ln() * 12u32) + dtau.ln() + Float::with_val(p, y.ln_ref()) * 6u32;
    let two_pi2 = Float::with_val(p, ctx.pi().square()) * 2u32;
    let h = (fin - arch) / 12u32 + two_pi2.ln() / 2u32;
    let alpha = alpha_arch_value(tau, ctx)?;
    entries.insert(0, PlaceEntry::alpha_only(Place::Infinite, alpha));
    let breakdown = HeightBreakdown::new(entries, 1);
    Ok(FaltingsElliptic { h, breakdown, minimal, periods, finite_ords: ords, warnings })
}

/// Odd quadratic character data ε(a) = (−D / a) for a = 1, …, D−1.
pub fn quadratic_character(d: u32) -> Vec<i32> {
    let disc = Integer::from(-(d as i64));
    (1..d).map(|a| disc.kronecker(&Integer::from(a))).collect()
}

/// Validate ε: zero exactly off the units, ε(D−1) = −1, multiplicative mod D.
pub fn validate_character(d: u32, eps: &[i32]) -> Result<()> {
    if eps.len() != d as usize - 1 {
        return Err(Error::Domain(format!("need {} character values, got {}", d - 1, eps.len())));
    }
    let e = |a: u32| eps[(a % d) as usize - 1];
    for a in 1..d {
        let unit = Integer::from(a).gcd(&Integer::from(d)) == 1;
        if (e(a) == 0) == unit || !(-1..=1).contains(&e(a)) {
            return Err(Error::Domain(format!("ε({a}) = {} is inconsistent with gcd({a}, {d})", e(a))));
        }
    }
    if e(d - 1) != -1 {
        return Err(Error::Domain("ε must be odd (ε(D−1) = −1)".into()));
    }
    for a in 1..d {
        for b in 1..d {
            let ab = (a * b) % d;
            if ab != 0 && e(ab) != e(a) * e(b) {
                return Err(Error::Domain(format!("ε is not multiplicative at ({a}, {b})")));
            }
        }
    }
    Ok(())
}

/// ½ log 2π − ½ log(D^{−1/2} [Π_{0<a<D} Γ(a/D)^{ε(a)}]^{w/2h}).
pub fn chowla_selberg(d: u32, w: u32, h_cl: u32, eps: &[i32], ctx: &PrecisionContext) -> Result<Float> {
    if d < 3 || w == 0 || h_cl == 0 {
        return Err(Error::Domain("need D ≥ 3, w ≥ 1, h ≥ 1".into()));
    }
    validate_character(d, eps)?;
    let p = ctx.prec();
    let mut s = Float::with_val(p, 0);
    for a in 1..d {
        let x = Float::with_val(p, a) / d;
        let lg = x.gamma().ln();
        s += lg * eps[a as usize - 1];
    }
    let inner = -Float::with_val(p, d).ln() / 2u32 + s * Float::with_val(p, w) / (2 * h_cl);
    let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
    Ok((two_pi.ln() - inner) / 2u32)
}
