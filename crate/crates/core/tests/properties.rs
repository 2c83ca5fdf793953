use arakelov_core::elliptic::{add, double, faltings_elliptic, neg, periods_agm, sub, FiniteModel, Invariants, Point};
use arakelov_core::hyper_faltings::{arch_factor_j10, arch_factor_phi, lockhart_invariant_with};
use arakelov_core::local_heights::{alpha_pointwise, canonical_height_q, mu_arch_series, Place};
use arakelov_core::siegel::{act, automorphy_det, is_symplectic, reduce_g1, sample_reduced, IntMatrix};
use arakelov_core::theta::{
    jacobi_thetas, modular_discriminant, phi_product, theta_char, theta_norm, ThetaCharacteristic,
};
use arakelov_core::weierstrass::{apply_model_change, char_system, Poly};
use arakelov_core::{ModelChange, PrecisionContext, SiegelMatrix, WeierstrassEquation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

fn ctx() -> PrecisionContext {
    PrecisionContext::new(128)
}

fn tau1(x: f64, y: f64) -> SiegelMatrix {
    SiegelMatrix::from_f64(1, &[(x, y)], ctx().prec()).unwrap()
}

fn absf(c: &Complex) -> f64 {
    Float::with_val(c.prec().0, c.abs_ref()).to_f64()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tail_bound_survives_bigger_radius(x in -0.5..0.5f64, y in 0.6..3.0f64, zr in -0.5..0.5f64, zi in -1.0..1.0f64) {
        let c = ctx();
        let hi = PrecisionContext::new(256);
        let m = ThetaCharacteristic::half(&[1], &[0]);
        let t = tau1(x, y);
        let a = theta_char(&m, &[c.complex(zr, zi)], &t, &c).unwrap();
        let b = theta_char(&m, &[hi.complex(zr, zi)], &t.with_prec(hi.prec()), &hi).unwrap();
        let scale = (std::f64::consts::PI * zi * zi / y).exp();
        let d = absf(&Complex::with_val(256, &a - &b));
        prop_assert!(d <= 2f64.powi(-128) * scale.max(1.0) * 4.0, "{d:e}");
    }

    #[test]
    fn jacobi_quartic(x in -0.5..0.5f64, y in 0.5..4.0f64) {
        let c = ctx();
        let [_, t2, t3, t4] = jacobi_thetas(&c.complex(0.0, 0.0), &tau1(x, y), &c).unwrap();
        let lhs = Complex::with_val(c.prec(), t2.pow(4u32) + t4.pow(4u32));
        let d = absf(&Complex::with_val(c.prec(), lhs - t3.pow(4u32)));
        prop_assert!(d < 2f64.powi(-120));
    }

    #[test]
    fn theta_norm_is_lattice_periodic(x in -0.5..0.5f64, y in 0.6..3.0f64, zr in -2.0..2.0f64, zi in -2.0..2.0f64) {
        let c = ctx();
        let t = tau1(x, y);
        let z = c.complex(zr, zi);
        let n0 = theta_norm(std::slice::from_ref(&z), &t, &c).unwrap();
        let n1 = theta_norm(&[Complex::with_val(c.prec(), &z + 1u32)], &t, &c).unwrap();
        let n2 = theta_norm(&[Complex::with_val(c.prec(), &z + t.tau11())], &t, &c).unwrap();
        prop_assert!((Float::with_val(c.prec(), &n0 - &n1)).abs().to_f64() < 2f64.powi(-118));
        prop_assert!((Float::with_val(c.prec(), &n0 - &n2)).abs().to_f64() < 2f64.powi(-118));
    }

    #[test]
    fn phi_over_delta_is_256(x in -0.5..0.5f64, y in 0.87..3.0f64) {
        let c = ctx();
        let t = tau1(x, y);
        let q = Complex::with_val(c.prec(), phi_product(&t, &c).unwrap() / modular_discriminant(&t, &c).unwrap());
        prop_assert!(absf(&Complex::with_val(c.prec(), q - 256u32)) < 2f64.powi(-110));
    }

    #[test]
    fn reduction_is_idempotent_and_maximises_height(x in -20.0..20.0f64, y in 0.05..3.0f64, word in proptest::collection::vec(-3i64..=3, 1..8)) {
        let c = ctx();
        let r = reduce_g1(&tau1(x, y), &c).unwrap();
        let again = reduce_g1(&r.reduced, &c).unwrap();
        let g = &again.gamma;
        let pm_id = (g[0][1] == 0 && g[1][0] == 0) && (g[0][0] == g[1][1]) && (g[0][0] == 1 || g[0][0] == -1);
        prop_assert!(pm_id);
        // a word T^{k1} S T^{k2} S …
        let mut gam: IntMatrix = vec![vec![Integer::from(1), Integer::new()], vec![Integer::new(), Integer::from(1)]];
        for k in word {
            let step: IntMatrix = vec![vec![Integer::from(k), Integer::from(-1)], vec![Integer::from(1), Integer::new()]];
            gam = mul2(&step, &gam);
        }
        prop_assert!(is_symplectic(&gam));
        let moved = act(&gam, &tau1(x, y)).unwrap();
        prop_assert!(moved.tau11().imag().to_f64() <= r.reduced.tau11().imag().to_f64() + 1e-20);
    }

    #[test]
    fn det_im_law(x in -0.5..0.5f64, y in 0.6..3.0f64, a in -3i64..=3, b in -3i64..=3) {
        let c = ctx();
        let t = tau1(x, y);
        // [[1, a], [0, 1]]·S·[[1, b], [0, 1]]
        let g: IntMatrix = mul2(&mul2(&m2(1, a, 0, 1), &m2(0, -1, 1, 0)), &m2(1, b, 0, 1));
        let moved = act(&g, &t).unwrap();
        let j = automorphy_det(&g, &t);
        let want = t.tau11().imag().to_f64() / Float::with_val(c.prec(), j.norm_ref()).to_f64();
        prop_assert!((moved.tau11().imag().to_f64() - want).abs() < 1e-12 * want.max(1.0));
    }

    #[test]
    fn discriminant_transformation_law(a in proptest::collection::vec(-4i64..=4, 5), u in prop::sample::select(vec![(1i64, 1i64), (2, 1), (-1, 1), (1, 2), (3, 1), (2, 3)]), r in -3i64..=3, s in -3i64..=3, t in -3i64..=3) {
        let Ok(e) = WeierstrassEquation::elliptic_ints([a[0], a[1], a[2], a[3], a[4]]) else { return Ok(()); };
        let u = Rational::from(u);
        let ch = ModelChange::elliptic(u.clone(), Rational::from(r), Rational::from(s), Rational::from(t));
        let e2 = apply_model_change(&e, &ch).unwrap();
        let k = Rational::from((&u).pow(12i32));
        prop_assert_eq!(e.discriminant().clone(), Rational::from(e2.discriminant() * &k));
    }

    #[test]
    fn genus_two_discriminant_law(p in proptest::collection::vec(-3i64..=3, 5), u in prop::sample::select(vec![(1i64, 1i64), (2, 1), (1, 2), (-1, 1)]), s in -2i64..=2) {
        let mut pc = p.clone();
        pc.push(1);
        let Ok(e) = WeierstrassEquation::new(2, Poly::from_ints(&pc), Poly::from_ints(&[1])) else { return Ok(()); };
        let u = Rational::from(u);
        let ch = ModelChange { u: u.clone(), s: Rational::from(s), t: Poly::from_ints(&[0, 1]) };
        let e2 = apply_model_change(&e, &ch).unwrap();
        prop_assert_eq!(e.discriminant().clone(), e2.discriminant() * Rational::from((&u).pow(40i32)));
    }

    #[test]
    fn two_beta_minus_mu_is_constant(zr in -0.5..0.5f64, zi in -0.5..0.5f64) {
        let c = ctx();
        let t = tau1(0.21, 1.37);
        let a = alpha_pointwise(&c.complex(zr, zi), &t, &c).unwrap();
        let b = alpha_pointwise(&c.complex(0.11, 0.03), &t, &c).unwrap();
        prop_assert!((a - b).abs().to_f64() < 1e-25);
    }

    #[test]
    fn mu_terms_stay_in_envelope(zr in -0.5..0.5f64, zi in -0.5..0.5f64, x in -0.5..0.5f64, y in 0.87..3.0f64) {
        let c = ctx();
        let s = mu_arch_series(&c.complex(zr, zi), &tau1(x, y), 20, &c).unwrap();
        prop_assert!(s.envelope_ok);
    }

    #[test]
    fn phi_and_j10_paths_agree(seed in 0u64..1000) {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = sample_reduced(2, &mut rng, c.prec()).unwrap();
        let d = arch_factor_phi(&t, &c).unwrap() - arch_factor_j10(&t, &c).unwrap();
        prop_assert!(d.abs().to_f64() < 1e-10);
    }
}

fn m2(a: i64, b: i64, c: i64, d: i64) -> IntMatrix {
    vec![vec![Integer::from(a), Integer::from(b)], vec![Integer::from(c), Integer::from(d)]]
}

fn mul2(x: &IntMatrix, y: &IntMatrix) -> IntMatrix {
    (0..2)
        .map(|i| (0..2).map(|j| Integer::from(&x[i][0] * &y[0][j]) + Integer::from(&x[i][1] * &y[1][j])).collect())
        .collect()
}

#[test]
fn char_system_is_a_set() {
    for g in 1..=3 {
        let mut a = char_system(g).unwrap();
        let n = a.len();
        a.sort();
        a.dedup();
        assert_eq!(a.len(), n);
        assert!(a.iter().all(|m| m.is_even()));
    }
}

fn curves() -> Vec<(WeierstrassEquation, Point, Point)> {
    let e = |a: [i64; 5]| WeierstrassEquation::elliptic_ints(a).unwrap();
    vec![
        (e([0, 0, 1, -1, 0]), Point::xy(0, 0), Point::xy(1, 0)),
        (e([0, 1, 1, -2, 0]), Point::xy(-1, 1), Point::xy(0, 0)),
        (e([0, 0, 0, 0, 17]), Point::xy(-2, 3), Point::xy(-1, 4)),
        (e([0, 1, 1, 0, 0]), Point::xy(0, 0), Point::xy(0, 0)),
        (e([0, 0, 0, 0, -2]), Point::xy(3, 5), Point::xy(3, -5)),
    ]
}

#[test]
fn parallelogram_law() {
    let c = ctx();
    for (e, p, q) in curves() {
        let h = |pt: &Point| -> f64 {
            if *pt == Point::Infinity {
                0.0
            } else {
                canonical_height_q(&e, pt, &c).unwrap().h.to_f64()
            }
        };
        let lhs = h(&add(&e, &p, &q)) + h(&sub(&e, &p, &q));
        let rhs = 2.0 * h(&p) + 2.0 * h(&q);
        assert!((lhs - rhs).abs() < 1e-6, "{e}: {lhs} vs {rhs}");
        assert!((h(&neg(&e, &p)) - h(&p)).abs() < 1e-25);
        assert!((h(&double(&e, &p)) - 4.0 * h(&p)).abs() < 1e-20);
    }
}

#[test]
fn height_breakdown_is_supported_on_bad_primes_and_denominators() {
    let c = ctx();
    for (e, p, _) in curves() {
        let r = canonical_height_q(&e, &p, &c).unwrap();
        let dmin = arakelov_core::elliptic::minimal_model_q(&e).unwrap().delta_min;
        let x = match p {
            Point::Affine(x, _) => x,
            Point::Infinity => unreachable!(),
        };
        for entry in &r.breakdown.entries {
            if let Place::Finite(q) = &entry.place {
                assert!(dmin.is_divisible(q) || x.denom().is_divisible(q), "{e} at {q}");
            }
        }
    }
}

#[test]
fn faltings_alpha_sum_and_finiteness() {
    let c = ctx();
    for a in [[0, 0, 1, 0, 0], [0, 0, 1, -1, 0], [1, -1, 1, -3, 3], [0, 1, 1, -2, 0], [1, 0, 1, 4, -6]] {
        let e = WeierstrassEquation::elliptic_ints(a).unwrap();
        let r = faltings_elliptic(&e, FiniteModel::Rational, &c).unwrap();
        let sum = r.breakdown.entries.iter().fold(Float::with_val(c.prec(), 0), |s, x| s + &x.contribution);
        assert!((sum - &r.h).abs().to_f64() < 1e-30);
        let mut fin = 0.0;
        for entry in &r.breakdown.entries {
            if let Place::Finite(p) = &entry.place {
                assert!(r.minimal.delta_min.is_divisible(p));
                fin += entry.contribution.to_f64();
            }
        }
        // Σ α_p ≥ 0, under the loose d·16^g log 4^g + (d/3) log 2 envelope
        assert!(fin >= 0.0 && fin <= 16.0 * 4f64.ln() + 2f64.ln() / 3.0, "{a:?}: {fin}");
    }
}

#[test]
fn lockhart_over_model_changes() {
    let c = ctx();
    let e = WeierstrassEquation::elliptic_ints([0, 0, 1, -1, 0]).unwrap();
    for u in [(1, 1), (-1, 1), (2, 1), (-2, 1), (3, 1), (-3, 1), (1, 2), (1, 3)] {
        let r = lockhart_invariant_with(&e, &Rational::from(u), &c).unwrap();
        assert!(r.rescaled_rel_err.to_f64() < 1e-8 && r.rel_err.to_f64() < 1e-8, "{u:?}");
    }
}

#[test]
fn agm_round_trip_recovers_invariants() {
    let c = ctx();
    for a in [[0, 0, 1, 0, 0], [0, 0, 0, -1, 0], [1, -1, 1, -3, 3], [0, 0, 0, 0, -2]] {
        let e = WeierstrassEquation::elliptic_ints(a).unwrap();
        let per = periods_agm(&e, &c).unwrap();
        assert!(per.lattice_error.to_f64() < 1e-30, "{a:?}");
        let inv = Invariants::of(&e).unwrap();
        assert!(inv.delta != 0);
    }
}
