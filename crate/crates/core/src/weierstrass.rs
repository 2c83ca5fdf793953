//! Hyperelliptic Weierstrass equations y² + Q(x)y = P(x) over ℚ.

use rug::{Integer, Rational};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::theta::ThetaCharacteristic;

/// Dense polynomial, coefficients low to high, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| *x == 0) {
            c.pop();
        }
        Poly(c)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| Rational::from(x)).collect())
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn x() -> Self {
        Poly::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial at −1.
    pub fn degree(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn lead(&self) -> Rational {
        self.0.last().cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rational::new(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += Rational::from(a * b);
            }
        }
        Poly::new(c)
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        Poly::new(self.0.iter().map(|c| Rational::from(c * k)).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| Rational::from(c * i as u32)).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.0.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// f(a·x + b)
    pub fn compose_linear(&self, a: &Rational, b: &Rational) -> Poly {
        let lin = Poly::new(vec![b.clone(), a.clone()]);
        let mut acc = Poly::zero();
        for c in self.0.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c.clone()));
        }
        acc
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| *c.denom() == 1)
    }
}

fn det_rational(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut det = Rational::from(1);
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| a[r][c] != 0) else {
            return Rational::new();
        };
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        let pv = a[c][c].clone();
        det *= &pv;
        for r in c + 1..n {
            if a[r][c] == 0 {
                continue;
            }
            let f = Rational::from(&a[r][c] / &pv);
            for k in c..n {
                let t = Rational::from(&f * &a[c][k]);
                a[r][k] -= t;
            }
        }
    }
    det
}

/// Res(f, g) as the Sylvester determinant.
pub fn resultant(f: &Poly, g: &Poly) -> Rational {
    let (m, n) = (f.degree(), g.degree());
    if m < 0 || n < 0 {
        return Rational::new();
    }
    let (m, n) = (m as usize, n as usize);
    let size = m + n;
    if size == 0 {
        return Rational::from(1);
    }
    let mut s = vec![vec![Rational::new(); size]; size];
    for r in 0..n {
        for (k, c) in f.0.iter().rev().enumerate() {
            s[r][r + k] = c.clone();
        }
    }
    for r in 0..m {
        for (k, c) in g.0.iter().rev().enumerate() {
            s[n + r][r + k] = c.clone();
        }
    }
    det_rational(s)
}

/// disc(f) = (−1)^{d(d−1)/2} Res(f, f′) / lc(f).
pub fn poly_discriminant(f: &Poly) -> Rational {
    let d = f.degree();
    if d < 1 {
        return Rational::new();
    }
    let r = resultant(f, &f.derivative()) / f.lead();
    if (d * (d - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// y² + Q(x)y = P(x) with P monic of degree 2g+1 and deg Q ≤ g.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassEquation {
    g: usize,
    p: Poly,
    q: Poly,
    disc: Rational,
}

impl WeierstrassEquation {
    pub fn new(g: usize, p: Poly, q: Poly) -> Result<Self> {
        if g == 0 {
            return Err(Error::Domain("genus must be at least 1".into()));
        }
        if p.degree() != 2 * g as isize + 1 || p.lead() != 1 {
            return Err(Error::Domain(format!("P must be monic of degree {}", 2 * g + 1)));
        }
        if q.degree() > g as isize {
            return Err(Error::Domain(format!("Q must have degree at most {g}")));
        }
        let disc = discriminant_of(g, &p, &q);
        if disc == 0 {
            return Err(Error::SingularModel);
        }
        Ok(WeierstrassEquation { g, p, q, disc })
    }

    /// Long Weierstrass form y² + a1xy + a3y = x³ + a2x² + a4x + a6.
    pub fn elliptic(a: [Rational; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = a;
        WeierstrassEquation::new(
            1,
            Poly::new(vec![a6, a4, a2, Rational::from(1)]),
            Poly::new(vec![a3, a1]),
        )
    }

    pub fn elliptic_ints(a: [i64; 5]) -> Result<Self> {
        WeierstrassEquation::elliptic(a.map(Rational::from))
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn p(&self) -> &Poly {
        &self.p
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    pub fn discriminant(&self) -> &Rational {
        &self.disc
    }

    /// [a1, a2, a3, a4, a6] for g = 1.
    pub fn ainvs(&self) -> Result<[Rational; 5]> {
        if self.g != 1 {
            return Err(Error::Domain("a-invariants need genus 1".into()));
        }
        Ok([self.q.coeff(1), self.p.coeff(2), self.q.coeff(0), self.p.coeff(1), self.p.coeff(0)])
    }

    pub fn is_integral(&self) -> bool {
        self.p.is_integral() && self.q.is_integral()
    }

    pub fn apply(&self, c: &ModelChange) -> Result<WeierstrassEquation> {
        apply_model_change(self, c)
    }
}

impl std::fmt::Display for WeierstrassEquation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |p: &Poly| {
            if p.is_zero() {
                return "0".to_string();
            }
            let mut parts = Vec::new();
            for (i, c) in p.coeffs().iter().enumerate().rev() {
                if *c == 0 {
                    continue;
                }
                let mono = match i {
                    0 => String::new(),
                    1 => "x".into(),
                    _ => format!("x^{i}"),
                };
                parts.push(match (i, c.to_string().as_str()) {
                    (0, s) => s.to_string(),
                    (_, "1") => mono,
                    (_, "-1") => format!("-{mono}"),
                    (_, s) => format!("{s}*{mono}"),
                });
            }
            parts.join(" + ").replace("+ -", "- ")
        };
        if self.q.is_zero() {
            write!(f, "y^2 = {}", show(&self.p))
        } else {
            write!(f, "y^2 + ({})*y = {}", show(&self.q), show(&self.p))
        }
    }
}

fn discriminant_of(g: usize, p: &Poly, q: &Poly) -> Rational {
    let f = p.add(&q.mul(q).scale(&Rational::from((1, 4))));
    poly_discriminant(&f) * Rational::from(Integer::from(1) << (4 * g as u32))
}

/// Δ_E = 2^{4g} disc(P + Q²/4).
pub fn discriminant(e: &WeierstrassEquation) -> Rational {
    e.disc.clone()
}

/// x = u²x′ + s, y = u^{2g+1}y′ + t(x′).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelChange {
    pub u: Rational,
    pub s: Rational,
    pub t: Poly,
}

impl ModelChange {
    pub fn identity() -> Self {
        ModelChange { u: Rational::from(1), s: Rational::new(), t: Poly::zero() }
    }

    pub fn scaling(u: Rational) -> Self {
        ModelChange { u, s: Rational::new(), t: Poly::zero() }
    }

    /// The classical (u, r, s, t) change x = u²x′ + r, y = u³y′ + su²x′ + t.
    pub fn elliptic(u: Rational, r: Rational, s: Rational, t: Rational) -> Self {
        let su2 = Rational::from(&s * &u) * &u;
        ModelChange { u, s: r, t: Poly::new(vec![t, su2]) }
    }
}

pub fn apply_model_change(e: &WeierstrassEquation, c: &ModelChange) -> Result<WeierstrassEquation> {
    if c.u == 0 {
        return Err(Error::MalformedChange("u must be nonzero".into()));
    }
    let g = e.g;
    if c.t.degree() > g as isize {
        return Err(Error::MalformedChange(format!("t must have degree at most {g}")));
    }
    let u2 = Rational::from(c.u.square_ref());
    let qx = e.q.compose_linear(&u2, &c.s);
    let px = e.p.compose_linear(&u2, &c.s);
    let u_odd = c.u.pow_ref_i32(2 * g as i32 + 1);
    let u_even = Rational::from(u_odd.square_ref());
    let q2 = c.t.scale(&Rational::from(2)).add(&qx).scale(&u_odd.clone().recip());
    let p2 = px.sub(&c.t.mul(&c.t)).sub(&qx.mul(&c.t)).scale(&u_even.recip());
    if q2.degree() > g as isize || p2.degree() != 2 * g as isize + 1 || p2.lead() != 1 {
        return Err(Error::MalformedChange("result is not in odd-degree Weierstrass form".into()));
    }
    let out = WeierstrassEquation::new(g, p2, q2)?;
    let w = c.u.pow_ref_i32(4 * g as i32 * (2 * g as i32 + 1));
    let expected = Rational::from(&w * &out.disc);
    assert_eq!(e.disc, expected, "transformation law violated");
    Ok(out)
}

trait PowI32 {
    fn pow_ref_i32(&self, e: i32) -> Rational;
}

impl PowI32 for Rational {
    fn pow_ref_i32(&self, e: i32) -> Rational {
        use rug::ops::Pow;
        Rational::from(self.pow(e))
    }
}

/// Lockhart's characteristic system: the C(2g+1, g+1) characteristics m_{T∘U}, reduced mod 1.
pub fn char_system(g: usize) -> Result<Vec<ThetaCharacteristic>> {
    if !(1..=3).contains(&g) {
        return Err(Error::Domain(format!("characteristic system supports 1 ≤ g ≤ 3, got {g}")));
    }
    let half = Rational::from((1, 2));
    let m = |k: usize| -> ThetaCharacteristic {
        // k is 1-based
        let i = k.div_ceil(2);
        let mut a = vec![Rational::new(); g];
        let mut b = vec![Rational::new(); g];
        if i <= g {
            a[i - 1] = half.clone();
        }
        let ones = if k % 2 == 1 { i - 1 } else { i };
        for x in b.iter_mut().take(ones.min(g)) {
            *x = half.clone();
        }
        ThetaCharacteristic::new(a, b)
    };
    let n = 2 * g + 1;
    let u: u32 = (0..n).filter(|k| k % 2 == 0).map(|k| 1 << k).sum();
    let mut out = Vec::new();
    for t in 0u32..(1 << n) {
        if t.count_ones() as usize != g + 1 {
            continue;
        }
        let s = t ^ u;
        let mut acc = ThetaCharacteristic::zero(g);
        for k in 0..n {
            if s >> k & 1 == 1 {
                acc = acc.add(&m(k + 1));
            }
        }
        out.push(acc.reduced());
    }
    Ok(out)
}

/// l = C(2g+1, g+1) and n = C(2g, g+1).
pub fn genus_counts(g: usize) -> (u64, u64) {
    (binomial(2 * g as u64 + 1, g as u64 + 1), binomial(2 * g as u64, g as u64 + 1))
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

const TRIAL_LIMIT: u32 = 10_000;
/// Factorisation budget in decimal digits of the cofactor left after trial division.
pub const FACTOR_DIGIT_BUDGET: usize = 60;

fn is_probable_prime(n: &Integer) -> bool {
    n.is_probably_prime(40) != rug::integer::IsPrime::No
}

fn pollard_brent(n: &Integer) -> Option<Integer> {
    if n.is_even() {
        return Some(Integer::from(2));
    }
    for c in 1u32..50 {
        let f = |x: &Integer| -> Integer { (Integer::from(x.square_ref()) + c) % n };
        let (mut y, m) = (Integer::from(2), 128u32);
        let (mut g, mut r, mut q) = (Integer::from(1), 1u64, Integer::from(1));
        let mut x = Integer::new();
        let mut ys = Integer::new();
        while g == 1 {
            x.clone_from(&y);
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0u64;
            while k < r && g == 1 {
                ys.clone_from(&y);
                for _ in 0..m.min((r - k) as u32) {
                    y = f(&y);
                    q = (q * Integer::from(&x - &y).abs()) % n;
                }
                g = Integer::from(q.gcd_ref(n));
                k += m as u64;
            }
            r *= 2;
            if r > 1 << 24 {
                break;
            }
        }
        if g == *n {
            loop {
                ys = f(&ys);
                g = Integer::from(Integer::from(&x - &ys).abs().gcd_ref(n));
                if g > 1 {
                    break;
                }
            }
        }
        if g != 1 && g != *n {
            return Some(g);
        }
    }
    None
}

fn factor_into(n: Integer, out: &mut Vec<Integer>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_probable_prime(&n) {
        out.push(n);
        return Ok(());
    }
    let d = pollard_brent(&n)
        .ok_or_else(|| Error::Resource(format!("could not split {n}")))?;
    let other = Integer::from(&n / &d);
    factor_into(d, out)?;
    factor_into(other, out)
}

/// Prime factorisation of a positive integer, ascending.
pub fn factor_integer(n: &Integer) -> Result<Vec<(Integer, u32)>> {
    let mut n = Integer::from(n.abs_ref());
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    let mut primes = Vec::new();
    let mut p = 2u32;
    while p <= TRIAL_LIMIT && n > 1 {
        while n.is_divisible_u(p) {
            n /= p;
            primes.push(Integer::from(p));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        let digits = n.to_string().len();
        if digits > FACTOR_DIGIT_BUDGET && !is_probable_prime(&n) {
            return Err(Error::Resource(format!(
                "cofactor with {digits} digits exceeds the factorisation budget"
            )));
        }
        factor_into(n, &mut primes)?;
    }
    primes.sort();
    let mut out: Vec<(Integer, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((r, e)) if *r == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    Ok(out)
}

/// (p, ord_p(Δ)) for every prime dividing the numerator or denominator of Δ.
pub fn finite_valuations(delta: &Rational) -> Result<Vec<(Integer, i32)>> {
    if *delta == 0 {
        return Err(Error::Domain("Δ must be nonzero".into()));
    }
    let mut out: Vec<(Integer, i32)> = factor_integer(delta.numer())?
        .into_iter()
        .map(|(p, e)| (p, e as i32))
        .collect();
    for (p, e) in factor_integer(delta.denom())? {
        out.push((p, -(e as i32)));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(x: &Rational, p: &Integer) -> i32 {
    let v = |n: &Integer| -> i32 {
        let mut n = Integer::from(n.abs_ref());
        let mut k = 0;
        while n != 0 && n.is_divisible(p) {
            n /= p;
            k += 1;
        }
        k
    };
    if *x == 0 {
        return i32::MAX;
    }
    v(x.numer()) - v(x.denom())
}

/// {"genus": g, "P": ["c0", …, "1"], "Q": ["q0", …]} with exact rational strings.
#[derive(Clone, Debug, Deserialize)]
pub struct CurveSpec {
    pub genus: usize,
    #[serde(rename = "P")]
    pub p: Vec<String>,
    #[serde(rename = "Q", default)]
    pub q: Vec<String>,
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    Rational::parse(t)
        .map(Rational::from)
        .or_else(|_| {
            Integer::parse(t).map(|i| Rational::from(Integer::from(i)))
        })
        .map_err(|_| Error::Parse(format!("not an exact rational: {s:?}")))
}

impl CurveSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("curve spec: {e}")))
    }

    pub fn to_equation(&self) -> Result<WeierstrassEquation> {
        let conv = |v: &[String]| -> Result<Poly> {
            Ok(Poly::new(v.iter().map(|c| parse_rational(c)).collect::<Result<_>>()?))
        };
        WeierstrassEquation::new(self.genus, conv(&self.p)?, conv(&self.q)?)
    }
}

pub fn parse_curve(json: &str) -> Result<WeierstrassEquation> {
    CurveSpec::from_json(json)?.to_equation()
}
