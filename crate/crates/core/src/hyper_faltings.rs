//! Faltings heights of hyperelliptic Jacobians from η-section norms.

use rand::Rng;
use rug::float::Constant;
use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::elliptic::periods_agm;
use crate::error::{Error, Result};
use crate::local_heights::{HeightBreakdown, Place, PlaceEntry};
use crate::precision::PrecisionContext;
use crate::theta::{j10, phi_product, SiegelMatrix};
use crate::weierstrass::{genus_counts, ModelChange, WeierstrassEquation};

/// Finite place data: p, ord_p(Δ_min) and the boundary intersection number e_p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitePlaceInput {
    pub p: u64,
    pub ord_delta_min: u32,
    /// Defaults to 0 with a warning when absent.
    #[serde(default)]
    pub e: Option<u32>,
    #[serde(default = "one")]
    pub d_v: u32,
}

fn one() -> u32 {
    1
}

impl FinitePlaceInput {
    pub fn new(p: u64, ord_delta_min: u32, e: u32) -> Self {
        FinitePlaceInput { p, ord_delta_min, e: Some(e), d_v: 1 }
    }

    /// f_p = (g·ord_p(Δ_min) − (8g+4)·e_p)/(8g+4), rejected when negative.
    pub fn f(&self, g: usize) -> Result<Rational> {
        let k = 8 * g as i64 + 4;
        let e = self.e.unwrap_or(0) as i64;
        let f = Rational::from((g as i64 * self.ord_delta_min as i64 - k * e, k));
        if f < 0 {
            return Err(Error::Input(format!(
                "f_{} = {f} < 0: need (8g+4)·e ≤ g·ord_p(Δ_min), got e = {e}, ord = {}",
                self.p, self.ord_delta_min
            )));
        }
        Ok(f)
    }
}

#[derive(Clone, Debug)]
pub struct ArchPlace {
    pub tau: SiegelMatrix,
    pub d_v: u32,
}

impl ArchPlace {
    pub fn real(tau: SiegelMatrix) -> Self {
        ArchPlace { tau, d_v: 1 }
    }
}

/// Genus-dependent exponents, kept exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusExponents {
    pub l: u64,
    pub n: u64,
    /// 1/(4l)
    pub phi: Rational,
    /// g/(4g+2)
    pub two_eta: Rational,
    /// 2g/(8g+4)
    pub two_height: Rational,
    /// 4 + 2/g
    pub volume: Rational,
    /// 2l/n
    pub det: Rational,
}

impl GenusExponents {
    pub fn new(g: usize) -> Self {
        let (l, n) = genus_counts(g);
        let g = g as i64;
        GenusExponents {
            l,
            n,
            phi: Rational::from((1, 4 * l as i64)),
            two_eta: Rational::from((g, 4 * g + 2)),
            two_height: Rational::from((2 * g, 8 * g + 4)),
            volume: Rational::from(4) + Rational::from((2, g)),
            det: Rational::from((2 * l as i64, n as i64)),
        }
    }
}

fn fr(r: &Rational, p: u32) -> Float {
    Float::with_val(p, r)
}

fn log_abs(c: &Complex, p: u32) -> Result<Float> {
    let a = Float::with_val(p, c.abs_ref());
    if a.is_zero() || !a.is_finite() {
        return Err(Error::Numeric("modular form vanished or overflowed at τ".into()));
    }
    Ok(a.ln())
}

fn log_det_im(tau: &SiegelMatrix) -> Result<Float> {
    let d = tau.im().det();
    if d <= 0 {
        return Err(Error::Precondition("det Im τ ≤ 0".into()));
    }
    Ok(d.ln())
}

/// log‖η‖ = (8g+4) log(2^{−g/(4g+2)} |φ(τ)|^{1/4l} det(Im τ)^{1/2}).
pub fn eta_norm_arch(tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<Float> {
    let g = tau.g();
    if g > 3 {
        return Err(Error::Domain(format!("η norms are implemented for g ≤ 3, got {g}")));
    }
    let p = ctx.prec();
    let ex = GenusExponents::new(g);
    let ln2 = Float::with_val(p, Constant::Log2);
    let inner = -(ln2 * fr(&ex.two_eta, p)) + log_abs(&phi_product(tau, ctx)?, p)? * fr(&ex.phi, p) + log_det_im(tau)? / 2u32;
    Ok(inner * (8 * g as u32 + 4))
}

/// log(2^{−2g/(8g+4)} |φ(τ)|^{1/4l} det(Im τ)^{1/2}), the archimedean factor of the height.
pub fn arch_factor_phi(tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.prec();
    let ex = GenusExponents::new(tau.g());
    let ln2 = Float::with_val(p, Constant::Log2);
    Ok(-(ln2 * fr(&ex.two_height, p)) + log_abs(&phi_product(tau, ctx)?, p)? * fr(&ex.phi, p) + log_det_im(tau)? / 2u32)
}

/// Genus 2 only: log(2^{−1/5} |J₁₀(τ)|^{1/10} det(Im τ)^{1/2}).
pub fn arch_factor_j10(tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<Float> {
    tau.require_genus(2)?;
    let p = ctx.prec();
    let ln2 = Float::with_val(p, Constant::Log2);
    Ok(-(ln2 / 5u32) + log_abs(&j10(tau, ctx)?, p)? / 10u32 + log_det_im(tau)? / 2u32)
}

#[derive(Clone, Debug)]
pub struct LockhartReport {
    /// |Δ_E| V(Λ)^{4+2/g}
    pub lhs: Float,
    /// 2^{4g} π^{8g+4} (|φ(τ)| det(Im τ)^{2l})^{1/n}
    pub rhs: Float,
    pub rel_err: Float,
    /// Relative change of the left side under the rescaling by `u`.
    pub rescaled_rel_err: Float,
    pub u: Rational,
}

/// |Δ_E| V(Λ_E)^{4+2/g} for an elliptic curve, V the covolume of its period lattice.
pub fn lockhart_lhs(e: &WeierstrassEquation, ctx: &PrecisionContext) -> Result<Float> {
    if e.genus() != 1 {
        return Err(Error::Domain("covolumes are only computed for g = 1".into()));
    }
    let p = ctx.prec();
    let per = periods_agm(e, ctx)?;
    let ex = GenusExponents::new(1);
    let ln = Float::with_val(p, Float::with_val(p, e.discriminant()).abs().ln_ref()) + per.covolume.ln() * fr(&ex.volume, p);
    Ok(ln.exp())
}

/// Right side of Lockhart's identity at the reduced period matrix of `e`.
pub fn lockhart_rhs(tau: &SiegelMatrix, ctx: &PrecisionContext) -> Result<Float> {
    let g = tau.g();
    let p = ctx.prec();
    let ex = GenusExponents::new(g);
    let inner = log_abs(&phi_product(tau, ctx)?, p)? + log_det_im(tau)? * (2 * ex.l as u32);
    let ln = Float::with_val(p, Constant::Log2) * (4 * g as u32)
        + Float::with_val(p, Constant::Pi).ln() * (8 * g as u32 + 4)
        + inner / ex.n as u32;
    Ok(ln.exp())
}

pub fn lockhart_invariant_with(e: &WeierstrassEquation, u: &Rational, ctx: &PrecisionContext) -> Result<LockhartReport> {
    let p = ctx.prec();
    let lhs = lockhart_lhs(e, ctx)?;
    let tau = periods_agm(e, ctx)?.tau;
    let rhs = lockhart_rhs(&tau, ctx)?;
    let rel = |a: &Float, b: &Float| Float::with_val(p, a - b).abs() / b;
    let scaled = e.apply(&ModelChange::scaling(u.clone()))?;
    let lhs2 = lockhart_lhs(&scaled, ctx)?;
    Ok(LockhartReport { rel_err: rel(&lhs, &rhs), rescaled_rel_err: rel(&lhs2, &lhs), lhs, rhs, u: u.clone() })
}

/// Lockhart's identity for g = 1, plus invariance under a random rescaling u ∈ {±2, ±3, 1/2, 1/3}.
pub fn lockhart_invariant<R: Rng>(e: &WeierstrassEquation, rng: &mut R, ctx: &PrecisionContext) -> Result<LockhartReport> {
    let choices = [(2, 1), (-2, 1), (3, 1), (-3, 1), (1, 2), (1, 3)];
    let (a, b) = choices[rng.gen_range(0..choices.len())];
    let r = lockhart_invariant_with(e, &Rational::from((a, b)), ctx)?;
    let tol = 1e-8;
    if r.rel_err.to_f64() > tol || r.rescaled_rel_err.to_f64() > tol {
        return Err(Error::Numeric(format!(
            "Lockhart identity off: rel err {:.3e}, rescaling drift {:.3e}",
            r.rel_err.to_f64(),
            r.rescaled_rel_err.to_f64()
        )));
    }
    Ok(r)
}

#[derive(Clone, Debug)]
pub struct JacobianFaltings {
    pub h: Float,
    pub breakdown: HeightBreakdown,
    pub f_values: Vec<(u64, Rational)>,
    /// |φ-path − J₁₀-path| over archimedean places (g = 2).
    pub j10_delta: Option<Float>,
    pub warnings: Vec<String>,
}

/// h = (1/d)(Σ d_v f_v log p − Σ_{v | ∞} d_v log(2^{−2g/(8g+4)} |φ(τ_v)|^{1/4l} det(Im τ_v)^{1/2})), d = Σ_{v | ∞} d_v.
pub fn faltings_jacobian(g: usize, finite: &[FinitePlaceInput], arch: &[ArchPlace], ctx: &PrecisionContext) -> Result<JacobianFaltings> {
    if !(1..=3).contains(&g) {
        return Err(Error::Domain(format!("genus must be 1, 2 or 3, got {g}")));
    }
    if arch.is_empty() {
        return Err(Error::Input("at least one archimedean place is required".into()));
    }
    let p = ctx.prec();
    let mut warnings = Vec::new();
    let mut entries = Vec::new();
    let mut f_values = Vec::new();
    let mut seen = Vec::new();
    for fp in finite {
        if !Integer::from(fp.p).is_probably_prime(30).eq(&rug::integer::IsPrime::Yes) {
            return Err(Error::Input(format!("{} is not prime", fp.p)));
        }
        if seen.contains(&fp.p) {
            return Err(Error::Input(format!("prime {} listed twice", fp.p)));
        }
        seen.push(fp.p);
        if fp.e.is_none() {
            warnings.push(format!("e_{} not supplied; defaulted to 0", fp.p));
        }
        let f = fp.f(g)?;
        let c = Float::with_val(p, fp.p).ln() * fr(&f, p);
        let mut entry = PlaceEntry::alpha_only(Place::Finite(Integer::from(fp.p)), c);
        entry.d_v = fp.d_v;
        entries.push(entry);
        f_values.push((fp.p, f));
    }
    let mut d = 0;
    let mut j10_delta: Option<Float> = None;
    for (k, a) in arch.iter().enumerate() {
        a.tau.require_genus(g)?;
        let phi = arch_factor_phi(&a.tau, ctx)?;
        if g == 2 {
            let alt = arch_factor_j10(&a.tau, ctx)?;
            let dv = Float::with_val(p, &phi - &alt).abs();
            let tol = Float::with_val(p, Float::i_exp(1, -(ctx.bits as i32 / 2)));
            if dv > tol {
                return Err(Error::Numeric(format!("φ and J₁₀ paths disagree by {:.3e} at place {k}", dv.to_f64())));
            }
            j10_delta = Some(match j10_delta {
                Some(m) => m.max(&dv),
                None => dv,
            });
        }
        let mut entry = PlaceEntry::alpha_only(Place::Infinite, -phi);
        entry.d_v = a.d_v;
        entries.push(entry);
        d += a.d_v;
    }
    let breakdown = HeightBreakdown::new(entries, d);
    Ok(JacobianFaltings { h: breakdown.total().clone(), breakdown, f_values, j10_delta, warnings })
}

/// 3 log 2π − ½ log(Γ(1/5)⁵ Γ(2/5)³ Γ(3/5) Γ(4/5)⁻¹).
pub fn bomemo_closed_form(ctx: &PrecisionContext) -> Float {
    let p = ctx.prec();
    let lg = |k: u32| (Float::with_val(p, k) / 5u32).gamma().ln();
    let s = lg(1) * 5u32 + lg(2) * 3u32 + lg(3) - lg(4);
    let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
    two_pi.ln() * 3u32 - s / 2u32
}

const BOMEMO_TAU: [(&str, &str); 3] = [
    ("0", "1.175570504584946258337411934121518408723"),
    ("-0.1909830056250525758977065789256600351171", "-0.5877852522924731291687059670607592043617"),
    ("-0.309016994374947424102293424673879212819", "0.9510565162951535721164393505693286749137"),
];

/// Period matrix of Jac(y² + y = x⁵) from scripts/period_matrix_oracle.py (40 digits).
pub fn bomemo_tau(ctx: &PrecisionContext) -> SiegelMatrix {
    let p = ctx.prec();
    let c = |k: usize| {
        let (re, im) = BOMEMO_TAU[k];
        Complex::with_val(p, (Float::parse(re).unwrap(), Float::parse(im).unwrap()))
    };
    SiegelMatrix::new(2, vec![c(0), c(1), c(1), c(2)]).expect("golden period matrix is valid")
}

/// y² + y = x⁵ has Δ_min = 5⁵.
pub fn bomemo_finite() -> Vec<FinitePlaceInput> {
    vec![FinitePlaceInput::new(5, 5, 0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{faltings_elliptic, FiniteModel};
    use crate::siegel::sample_reduced;
    use crate::theta::modular_discriminant;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128)
    }

    #[test]
    fn exponents_are_consistent() {
        for g in 1..=3usize {
            let ex = GenusExponents::new(g);
            let gi = g as i64;
            assert_eq!(ex.volume, Rational::from((8 * gi + 4, 2 * gi)));
            assert_eq!(Rational::from((gi, ex.n as i64)), Rational::from((8 * gi + 4, 4 * ex.l as i64)));
            assert_eq!(Rational::from((2 * ex.l as i64 * gi, ex.n as i64)), Rational::from(4 * gi + 2));
            assert_eq!(ex.two_height, Rational::from(&ex.two_eta * 1));
        }
        assert_eq!(GenusExponents::new(2).phi, Rational::from((1, 40)));
    }

    #[test]
    fn eta_norm_genus_one() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let tau = sample_reduced(1, &mut rng, c.prec()).unwrap();
            let eta = eta_norm_arch(&tau, &c).unwrap();
            let d = Float::with_val(c.prec(), modular_discriminant(&tau, &c).unwrap().abs_ref());
            let y = tau.tau11().imag().clone();
            let want = (d * 64u32).ln() + y.ln() * 6u32;
            assert!((eta - want).abs().to_f64() < 1e-30);
        }
    }

    #[test]
    fn f_must_be_nonnegative() {
        assert_eq!(FinitePlaceInput::new(5, 5, 0).f(2).unwrap(), Rational::from((1, 2)));
        assert!(matches!(FinitePlaceInput::new(5, 5, 1).f(2), Err(Error::Input(_))));
        assert_eq!(FinitePlaceInput::new(3, 3, 0).f(1).unwrap(), Rational::from((1, 4)));
        let j: FinitePlaceInput = serde_json::from_str(r#"{"p":5,"ord_delta_min":5}"#).unwrap();
        assert_eq!(j.e, None);
        assert_eq!(j.d_v, 1);
    }

    #[test]
    fn genus_one_specialisation_matches_elliptic_formula() {
        let c = ctx();
        for a in [[0, 0, 1, 0, 0], [0, 0, 1, -1, 0], [1, -1, 1, -3, 3], [0, 1, 1, -2, 0], [1, 0, 1, 4, -6]] {
            let e = WeierstrassEquation::elliptic_ints(a).unwrap();
            let fe = faltings_elliptic(&e, FiniteModel::Rational, &c).unwrap();
            let fin: Vec<FinitePlaceInput> = fe
                .finite_ords
                .iter()
                .map(|(p, k)| FinitePlaceInput::new(p.to_u64().unwrap(), *k as u32, 0))
                .collect();
            let j = faltings_jacobian(1, &fin, &[ArchPlace::real(fe.periods.tau.clone())], &c).unwrap();
            assert!((Float::with_val(c.prec(), &j.h - &fe.h)).abs().to_f64() < 1e-30, "{a:?}");
        }
    }

    #[test]
    fn lockhart_identity_and_rescaling() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = WeierstrassEquation::elliptic_ints([0, 0, 1, 0, 0]).unwrap();
        let r = lockhart_invariant(&e, &mut rng, &c).unwrap();
        assert!(r.rel_err.to_f64() < 1e-30 && r.rescaled_rel_err.to_f64() < 1e-30);
        let r3 = lockhart_invariant_with(&e, &Rational::from(3), &c).unwrap();
        assert!(r3.rescaled_rel_err.to_f64() < 1e-30);
    }

    #[test]
    fn two_paths_agree_in_genus_two() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..4 {
            let tau = sample_reduced(2, &mut rng, c.prec()).unwrap();
            let a = arch_factor_phi(&tau, &c).unwrap();
            let b = arch_factor_j10(&tau, &c).unwrap();
            assert!((a - b).abs().to_f64() < 1e-30);
        }
    }

    #[test]
    fn bomemo_values() {
        let c = ctx();
        let cf = bomemo_closed_form(&c);
        assert!((cf.to_f64() - 0.385_367_826_763_701).abs() < 1e-15);
        let j = faltings_jacobian(2, &[], &[ArchPlace::real(bomemo_tau(&c))], &c).unwrap();
        assert!((Float::with_val(c.prec(), &j.h - &cf)).abs().to_f64() < 1e-12);
        let full = faltings_jacobian(2, &bomemo_finite(), &[ArchPlace::real(bomemo_tau(&c))], &c).unwrap();
        let half_log5 = 5f64.ln() / 2.0;
        assert!((full.h.to_f64() - cf.to_f64() - half_log5).abs() < 1e-12);
    }

    #[test]
    fn place_degrees_weight_the_sum() {
        let c = ctx();
        let tau = SiegelMatrix::from_f64(1, &[(0.1, 1.3)], c.prec()).unwrap();
        let one = faltings_jacobian(1, &[], &[ArchPlace::real(tau.clone())], &c).unwrap();
        let two = faltings_jacobian(1, &[], &[ArchPlace::real(tau.clone()), ArchPlace::real(tau)], &c).unwrap();
        assert!((one.h - two.h).abs().to_f64() < 1e-35);
        assert!(faltings_jacobian(1, &[FinitePlaceInput::new(4, 1, 0)], &[], &c).is_err());
    }
}
