use arakelov_core::elliptic::{minimal_model_q, FiniteModel};
use arakelov_core::hyper_faltings::{
    arch_factor_j10, arch_factor_phi, bomemo_closed_form, bomemo_finite, bomemo_tau, faltings_jacobian, lockhart_invariant_with,
    ArchPlace,
};
use arakelov_core::local_heights::{
    alpha_arch, alpha_pointwise, autissier_integral, beta_arch, canonical_height_q, mu_arch_closed, mu_arch_series,
    two_thirds_log2, HeightBreakdown, Place, PlaceEntry,
};
use arakelov_core::siegel::{all_pass, check_reduced, matrix_lemma_check, null_ratio_height, reduce_g1, sample_reduced, theta_null_bounds};
use arakelov_core::theta::{
    j10, jacobi_thetas, modular_discriminant, phi_product, theta_char, theta_norm, ThetaCharacteristic,
};
use arakelov_core::weierstrass::{finite_valuations, parse_curve, parse_rational};
use arakelov_core::{faltings_elliptic, Error, PrecisionContext, Result, SiegelMatrix, WeierstrassEquation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde_json::{json, Map, Value};

use crate::parse;
use crate::report::{breakdown_doc, cnum, num, plain_doc};

/// Result document plus whether every check it carries passed.
pub struct Outcome {
    pub doc: Map<String, Value>,
    pub ok: bool,
}

impl Outcome {
    fn ok(doc: Map<String, Value>) -> Self {
        Outcome { doc, ok: true }
    }
}

fn tau_doc(t: &SiegelMatrix, ctx: &PrecisionContext) -> Value {
    if t.g() == 1 {
        return cnum(t.tau11(), ctx);
    }
    let g = t.g();
    Value::Array((0..g).map(|i| Value::Array((0..g).map(|j| cnum(t.get(i, j), ctx)).collect())).collect())
}

fn checks_doc(checks: &[arakelov_core::siegel::ConditionResult]) -> Value {
    Value::Array(checks.iter().map(|c| json!({"id": c.id, "pass": c.pass, "margin": format!("{:.6e}", c.margin)})).collect())
}

pub fn theta_eval(tau: &str, z: &str, ch: Option<&str>, ctx: &PrecisionContext) -> Result<Outcome> {
    let t = parse::tau_literal(tau, ctx)?;
    let zv = parse::z_literal(z, ctx)?;
    if zv.len() != t.g() {
        return Err(Error::Domain(format!("z has {} entries but τ is {}×{}", zv.len(), t.g(), t.g())));
    }
    let mut doc = plain_doc(ctx);
    doc.insert("tau".into(), tau_doc(&t, ctx));
    match ch {
        Some(s) => {
            let (a, b) = s.split_once(';').ok_or_else(|| Error::Parse(format!("characteristic {s:?} is not a;b")))?;
            let list = |x: &str| -> Result<Vec<Rational>> { x.split(',').map(parse_rational).collect() };
            let m = ThetaCharacteristic::new(list(a)?, list(b)?);
            let v = theta_char(&m, &zv, &t, ctx)?;
            doc.insert("characteristic".into(), json!(m.to_string()));
            doc.insert("value".into(), cnum(&v, ctx));
        }
        None if t.g() == 1 => {
            let th = jacobi_thetas(&zv[0], &t, ctx)?;
            let names = ["theta1", "theta2", "theta3", "theta4"];
            for (n, v) in names.iter().zip(&th) {
                doc.insert((*n).into(), cnum(v, ctx));
            }
        }
        None => {
            let v = theta_char(&ThetaCharacteristic::zero(t.g()), &zv, &t, ctx)?;
            doc.insert("characteristic".into(), json!(ThetaCharacteristic::zero(t.g()).to_string()));
            doc.insert("value".into(), cnum(&v, ctx));
        }
    }
    doc.insert("norm".into(), num(&theta_norm(&zv, &t, ctx)?, ctx));
    Ok(Outcome::ok(doc))
}

pub fn siegel_reduce(tau: &str, ctx: &PrecisionContext) -> Result<Outcome> {
    let t = parse::tau_literal(tau, ctx)?;
    let r = reduce_g1(&t, ctx)?;
    let mut doc = plain_doc(ctx);
    doc.insert("input".into(), tau_doc(&r.input, ctx));
    doc.insert("reduced".into(), tau_doc(&r.reduced, ctx));
    doc.insert("gamma".into(), json!(r.gamma.iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()));
    doc.insert("checks".into(), checks_doc(&r.checks));
    let ok = all_pass(&r.checks);
    Ok(Outcome { doc, ok })
}

pub fn siegel_check(tau: &str, ctx: &PrecisionContext) -> Result<Outcome> {
    let t = parse::tau_literal(tau, ctx)?;
    let checks = check_reduced(&t, t.g());
    let mut doc = plain_doc(ctx);
    doc.insert("tau".into(), tau_doc(&t, ctx));
    let reduced = all_pass(&checks);
    doc.insert("reduced".into(), json!(reduced));
    doc.insert("checks".into(), checks_doc(&checks));
    if reduced {
        let b = theta_null_bounds(&t, ctx)?;
        let h = null_ratio_height(&b);
        let lem = matrix_lemma_check(&t, &h, 1, ctx);
        doc.insert(
            "theta_nulls".into(),
            json!({
                "max_abs": num(&b.max_abs, ctx),
                "min_nonzero_abs": num(&b.min_nonzero_abs, ctx),
                "upper_for_min": num(&b.upper_for_min, ctx),
                "max_ok": b.max_ok,
                "min_ok": b.min_ok,
            }),
        );
        doc.insert(
            "matrix_lemma".into(),
            json!({"h_proxy": num(&h, ctx), "lhs": num(&lem.lhs, ctx), "rhs": num(&lem.rhs, ctx), "holds": lem.holds}),
        );
    } else {
        doc.insert("warnings".into(), json!(["τ fails the reduction conditions; bounds not evaluated"]));
    }
    Ok(Outcome::ok(doc))
}

pub fn curve_disc(curve: &str, ctx: &PrecisionContext) -> Result<Outcome> {
    let e = parse_curve(curve)?;
    let mut doc = Map::new();
    doc.insert("discriminant".into(), json!(e.discriminant().to_string()));
    doc.extend(plain_doc(ctx));
    doc.insert("genus".into(), json!(e.genus()));
    doc.insert("equation".into(), json!(e.to_string()));
    let fac: Vec<Value> = finite_valuations(e.discriminant())?
        .into_iter()
        .map(|(p, k)| json!({"p": p.to_string(), "ord": k}))
        .collect();
    doc.insert("factorization".into(), Value::Array(fac));
    if e.genus() == 1 {
        let m = minimal_model_q(&e)?;
        doc.insert("minimal_model".into(), json!(m.model.to_string()));
        doc.insert("delta_min".into(), json!(m.delta_min.to_string()));
    }
    Ok(Outcome::ok(doc))
}

fn elliptic(curve: &str) -> Result<WeierstrassEquation> {
    let e = parse_curve(curve)?;
    if e.genus() != 1 {
        return Err(Error::Domain(format!("expected an elliptic curve (genus 1), got genus {}", e.genus())));
    }
    Ok(e)
}

pub fn elliptic_faltings(curve: &str, model: FiniteModel, ctx: &PrecisionContext) -> Result<Outcome> {
    let e = elliptic(curve)?;
    let r = faltings_elliptic(&e, model, ctx)?;
    let mut doc = breakdown_doc(&r.breakdown, &r.h, &r.warnings, ctx);
    doc.insert("finite_model".into(), json!(model_name(model)));
    doc.insert("minimal_model".into(), json!(r.minimal.model.to_string()));
    doc.insert("delta_min".into(), json!(r.minimal.delta_min.to_string()));
    doc.insert("tau".into(), tau_doc(&r.periods.tau, ctx));
    Ok(Outcome::ok(doc))
}

pub fn model_name(m: FiniteModel) -> &'static str {
    match m {
        FiniteModel::Semistable => "semistable",
        FiniteModel::Rational => "rational",
    }
}

pub fn elliptic_height(curve: &str, pt: &str, ctx: &PrecisionContext) -> Result<Outcome> {
    let e = elliptic(curve)?;
    let p = parse::point(pt)?;
    let r = canonical_height_q(&e, &p, ctx)?;
    let mut doc = breakdown_doc(&r.breakdown, &r.h, &r.warnings, ctx);
    doc.insert("divisor".into(), json!("2(O)"));
    doc.insert("h_O".into(), num(&r.h_o, ctx));
    doc.insert("h_16".into(), num(&r.h_16, ctx));
    doc.insert("torsion".into(), json!(r.torsion));
    Ok(Outcome::ok(doc))
}

pub fn elliptic_decompose(curve: &str, z: &str, model: FiniteModel, ctx: &PrecisionContext) -> Result<Outcome> {
    let e = elliptic(curve)?;
    let r = faltings_elliptic(&e, model, ctx)?;
    let tau = &r.periods.tau;
    let (s, t) = parse::lattice_coords(z, ctx)?;
    let p = ctx.prec();
    let zc = Complex::with_val(p, tau.tau11() * &t) + &s;
    let mu = mu_arch_closed(&zc, tau, ctx)?;
    let beta = beta_arch(&zc, tau, 2, ctx)?;
    let alpha = alpha_arch(tau, ctx)?;
    let mut entries = Vec::new();
    let mut arch = PlaceEntry::alpha_only(Place::Infinite, alpha.clone());
    arch.mu = Some(mu.clone());
    arch.beta = Some(beta.clone());
    entries.push(arch);
    for en in &r.breakdown.entries {
        if en.place != Place::Infinite {
            entries.push(en.clone());
        }
    }
    let b = HeightBreakdown::new(entries, 1);
    let mut warnings = r.warnings.clone();
    let gap = Float::with_val(p, (beta - mu) * 2u32) - &alpha;
    warnings.push(format!(
        "2(β − μ) − α_∞ = {} at this z; the constant is −(2/3) log 2 with the 2^(1/2) in β",
        crate::report::fmt_float(&gap, 40)
    ));
    let mut doc = breakdown_doc(&b, b.total(), &warnings, ctx);
    doc.insert("z".into(), cnum(&zc, ctx));
    doc.insert("two_beta_minus_mu_minus_alpha".into(), num(&gap, ctx));
    doc.insert("faltings".into(), num(&r.h, ctx));
    doc.insert("finite_model".into(), json!(model_name(model)));
    Ok(Outcome::ok(doc))
}

pub fn jacobian_faltings(
    genus: Option<usize>,
    tau: Option<&str>,
    preset: Option<&str>,
    places: Option<&str>,
    ctx: &PrecisionContext,
) -> Result<Outcome> {
    let mut warnings = Vec::new();
    let (t, default_places, closed) = match (tau, preset) {
        (Some(_), Some(_)) => return Err(Error::Parse("give either --tau or --tau-preset, not both".into())),
        (Some(s), None) => (parse::tau_literal(s, ctx)?, Vec::new(), None),
        (None, Some("bomemo")) => {
            warnings.push("finite data for y^2 + y = x^5: Δ_min = 5^5 with e_5 = 0 assumed".to_string());
            (bomemo_tau(ctx), bomemo_finite(), Some(bomemo_closed_form(ctx)))
        }
        (None, Some(other)) => return Err(Error::Parse(format!("unknown τ preset {other:?} (known: bomemo)"))),
        (None, None) => return Err(Error::Parse("--tau or --tau-preset is required".into())),
    };
    let g = genus.unwrap_or(t.g());
    if g != t.g() {
        return Err(Error::Domain(format!("--genus {g} but τ is {}×{}", t.g(), t.g())));
    }
    let fin = match places {
        Some(s) => parse::finite_places(s)?,
        None => default_places,
    };
    let r = faltings_jacobian(g, &fin, &[ArchPlace::real(t.clone())], ctx)?;
    warnings.extend(r.warnings.iter().cloned());
    let mut doc = breakdown_doc(&r.breakdown, &r.h, &warnings, ctx);
    doc.insert("genus".into(), json!(g));
    doc.insert(
        "f_values".into(),
        Value::Array(r.f_values.iter().map(|(p, f)| json!({"p": p, "f": f.to_string()})).collect()),
    );
    if let Some(d) = &r.j10_delta {
        doc.insert("j10_path_delta".into(), json!(format!("{:.3e}", d.to_f64())));
    }
    if let Some(c) = closed {
        doc.insert("closed_form".into(), num(&c, ctx));
        doc.insert("difference".into(), num(&Float::with_val(ctx.prec(), &r.h - &c), ctx));
    }
    Ok(Outcome::ok(doc))
}

struct Suite {
    name: &'static str,
    samples: usize,
    max_err: f64,
    tol: f64,
}

impl Suite {
    fn new(name: &'static str, tol: f64) -> Self {
        Suite { name, samples: 0, max_err: 0.0, tol }
    }

    fn record(&mut self, err: f64) {
        self.samples += 1;
        if err.is_nan() || err > self.max_err {
            self.max_err = if err.is_nan() { f64::INFINITY } else { err };
        }
    }

    fn doc(&self) -> Value {
        json!({"name": self.name, "samples": self.samples, "max_error": format!("{:.3e}", self.max_err), "tolerance": format!("{:.1e}", self.tol), "pass": self.max_err <= self.tol})
    }
}

fn cabs(c: &Complex) -> f64 {
    Float::with_val(c.prec().0, c.abs_ref()).to_f64()
}

pub fn check_identities(seed: u64, samples: usize, ctx: &PrecisionContext) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = ctx.prec();
    let fine = 2f64.powi(-(ctx.bits as i32) + 16);
    let mut quartic = Suite::new("jacobi_quartic", fine);
    let mut phi256 = Suite::new("phi_equals_256_delta", 1e-12);
    let mut phij10 = Suite::new("phi_equals_j10_fourth", 1e-10);
    let mut period = Suite::new("theta_norm_lattice_invariance", fine);
    let mut mu = Suite::new("mu_series_vs_closed", 1e-20);
    let mut spread = Suite::new("two_beta_minus_mu_spread", 1e-9);
    let mut gap = Suite::new("two_beta_minus_mu_equals_alpha_minus_two_thirds_log2", 1e-10);
    let mut paths = Suite::new("phi_path_vs_j10_path", 1e-10);
    let mut lock = Suite::new("lockhart_identity_and_invariance", 1e-8);
    let zero = Complex::with_val(p, 0);
    for _ in 0..samples {
        let t = sample_reduced(1, &mut rng, p)?;
        let [_, t2, t3, t4] = jacobi_thetas(&zero, &t, ctx)?;
        let lhs = Complex::with_val(p, t2.clone().pow(4u32) + t4.clone().pow(4u32));
        let t34 = Complex::with_val(p, t3.pow(4u32));
        quartic.record(cabs(&Complex::with_val(p, &lhs - &t34)) / cabs(&t34));
        let q = Complex::with_val(p, phi_product(&t, ctx)? / modular_discriminant(&t, ctx)?);
        phi256.record(cabs(&Complex::with_val(p, q - 256u32)) / 256.0);

        let zr: f64 = rand::Rng::gen_range(&mut rng, -2.0..2.0);
        let zi: f64 = rand::Rng::gen_range(&mut rng, -2.0..2.0);
        let z = Complex::with_val(p, (zr, zi));
        let n0 = theta_norm(std::slice::from_ref(&z), &t, ctx)?;
        let n1 = theta_norm(&[Complex::with_val(p, &z + 1u32)], &t, ctx)?;
        let n2 = theta_norm(&[Complex::with_val(p, &z + t.tau11())], &t, ctx)?;
        let d = Float::with_val(p, &n0 - &n1).abs().max(&Float::with_val(p, &n0 - &n2).abs()) / &n0;
        period.record(d.to_f64());

        let s = mu_arch_series(&z, &t, 40, ctx)?;
        let c = mu_arch_closed(&z, &t, ctx)?;
        let excess = Float::with_val(p, &s.value - &c).abs() - &s.tail_bound;
        mu.record(excess.to_f64().max(0.0));

        let alpha = alpha_arch(&t, ctx)?;
        let mut vals = Vec::new();
        for _ in 0..5 {
            let a: f64 = rand::Rng::gen_range(&mut rng, -0.5..0.5);
            let b: f64 = rand::Rng::gen_range(&mut rng, -0.5..0.5);
            vals.push(alpha_pointwise(&Complex::with_val(p, (a, b)), &t, ctx)?);
        }
        let max = vals.iter().cloned().reduce(|a, b| a.max(&b)).unwrap();
        let min = vals.iter().cloned().reduce(|a, b| a.min(&b)).unwrap();
        spread.record(Float::with_val(p, &max - &min).to_f64());
        let want = Float::with_val(p, &alpha - two_thirds_log2(ctx));
        gap.record(Float::with_val(p, &vals[0] - &want).abs().to_f64());

        let t2m = sample_reduced(2, &mut rng, p)?;
        let phi = phi_product(&t2m, ctx)?;
        let j = j10(&t2m, ctx)?.pow(4u32);
        phij10.record(cabs(&Complex::with_val(p, &phi - &j)) / cabs(&phi));
        paths.record(Float::with_val(p, arch_factor_phi(&t2m, ctx)? - arch_factor_j10(&t2m, ctx)?).abs().to_f64());
    }
    let curves = [[0, 0, 1, 0, 0], [0, 0, 1, -1, 0], [1, -1, 1, -3, 3], [0, 1, 1, -2, 0], [1, 0, 1, 4, -6]];
    let us = [(1, 1), (-1, 1), (2, 1), (-2, 1), (3, 1), (-3, 1), (1, 2), (1, 3)];
    for k in 0..samples.clamp(1, 20) {
        let e = WeierstrassEquation::elliptic_ints(curves[k % curves.len()])?;
        let u = us[rand::Rng::gen_range(&mut rng, 0..us.len())];
        let r = lockhart_invariant_with(&e, &Rational::from(u), ctx)?;
        lock.record(r.rel_err.to_f64().max(r.rescaled_rel_err.to_f64()));
    }
    let suites = [quartic, phi256, phij10, period, mu, spread, gap, paths, lock];
    let ok = suites.iter().all(|s| s.max_err <= s.tol);
    let mut doc = plain_doc(ctx);
    doc.insert("seed".into(), json!(seed));
    doc.insert("suites".into(), Value::Array(suites.iter().map(Suite::doc).collect()));
    doc.insert("all_pass".into(), json!(ok));
    Ok(Outcome { doc, ok })
}

pub fn check_matrix_lemma(seed: u64, samples: usize, genus: Option<usize>, ctx: &PrecisionContext) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let genera: Vec<usize> = match genus {
        Some(g @ (1 | 2)) => vec![g],
        Some(g) => return Err(Error::Domain(format!("sampling supports g = 1, 2, got {g}"))),
        None => vec![1, 2],
    };
    let mut rows = Vec::new();
    let mut ok = true;
    for g in genera {
        let (mut vmax, mut vmin, mut vlem) = (0, 0, 0);
        let mut worst = f64::INFINITY;
        for _ in 0..samples {
            let t = sample_reduced(g, &mut rng, ctx.prec())?;
            let b = theta_null_bounds(&t, ctx)?;
            let h = null_ratio_height(&b);
            let lem = matrix_lemma_check(&t, &h, 1, ctx);
            vmax += !b.max_ok as usize;
            vmin += !b.min_ok as usize;
            vlem += !lem.holds as usize;
            worst = worst.min(lem.margin.to_f64());
        }
        ok &= vmax + vmin + vlem == 0;
        rows.push(json!({
            "genus": g,
            "samples": samples,
            "max_null_violations": vmax,
            "min_null_violations": vmin,
            "matrix_lemma_violations": vlem,
            "smallest_margin": format!("{worst:.6e}"),
        }));
    }
    let mut doc = plain_doc(ctx);
    doc.insert("seed".into(), json!(seed));
    doc.insert("results".into(), Value::Array(rows));
    doc.insert("warnings".into(), json!(["h(A) is the level-2 theta-null ratio proxy"]));
    doc.insert("all_pass".into(), json!(ok));
    Ok(Outcome { doc, ok })
}

pub fn check_autissier(tau: Option<&str>, seed: u64, samples: usize, grid: usize, ctx: &PrecisionContext) -> Result<Outcome> {
    let taus: Vec<SiegelMatrix> = match tau {
        Some(s) => vec![reduce_g1(&parse::tau_literal(s, ctx)?, ctx)?.reduced],
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples).map(|_| sample_reduced(1, &mut rng, ctx.prec())).collect::<Result<_>>()?
        }
    };
    let mut rows = Vec::new();
    let mut ok = true;
    for t in &taus {
        let r = autissier_integral(t, grid, ctx)?;
        let pass = r.value >= -1e-6 && r.delta < 1e-3 && r.scaling_defect < 1e-12;
        ok &= pass;
        rows.push(json!({
            "tau": tau_doc(t, ctx),
            "value": format!("{:.10}", r.value),
            "coarse": format!("{:.10}", r.coarse),
            "grid_delta": format!("{:.3e}", r.delta),
            "scaling_defect": format!("{:.3e}", r.scaling_defect),
            "perturbed": r.perturbed,
            "pass": pass,
        }));
    }
    let mut doc = plain_doc(ctx);
    doc.insert("grid".into(), json!(grid));
    doc.insert("results".into(), Value::Array(rows));
    doc.insert("all_pass".into(), json!(ok));
    Ok(Outcome { doc, ok })
}
