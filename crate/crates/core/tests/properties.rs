mod common;

use common::*;
use holoindex::algebra::{
    laurent_residue, residue_rational, GaussianRational as GR, LaurentSeries, Monomial, PolySeries, UniPoly,
};
use holoindex::blowup::{blow_up_point, conjugacy_holds};
use holoindex::canonical_sections::{
    action_coefficients, extract_section, verify_chart_covariance, SectionKind,
};
use holoindex::germ_analysis::{contact_profile, dicritical_test, vanishing_order, MapGerm, VanishingOrder};
use holoindex::residues::residue_cs_n2_smooth;
use proptest::prelude::*;

fn small() -> impl Strategy<Value = i64> {
    -3i64..=3
}

/// Polynomial in `n` variables with integer coefficients, total degree in
/// `lo..=hi`.
fn poly_strategy(n: usize, lo: u32, hi: u32) -> impl Strategy<Value = PolySeries> {
    let monos: Vec<Vec<u32>> = (lo..=hi)
        .flat_map(|d| exps_of_degree(n, d))
        .collect();
    let k = monos.len();
    proptest::collection::vec(small(), k).prop_map(move |cs| {
        PolySeries::from_terms(
            n,
            monos.iter().zip(cs).map(|(e, c)| (Monomial::new(e.clone()), GR::from_int(c))),
        )
    })
}

fn exps_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    (0..=d)
        .flat_map(|a| {
            exps_of_degree(n - 1, d - a).into_iter().map(move |mut rest| {
                rest.insert(0, a);
                rest
            })
        })
        .collect()
}

fn unipoly_strategy(deg: usize) -> impl Strategy<Value = UniPoly> {
    proptest::collection::vec(small(), deg + 1).prop_map(|c| UniPoly::from_ints(&c))
}

fn z(n: usize, j: usize) -> PolySeries {
    PolySeries::var(n, j)
}

/// A planar germ `(z1 + z1^nu a, z2 + z1^nu b)` fixing `{z1 = 0}` with
/// `b|_S != 0`, so the contact order is exactly `nu`. `tangential` picks
/// `a|_S == 0`.
#[derive(Clone, Debug)]
struct PlanarCase {
    nu: u32,
    a: PolySeries,
    b: PolySeries,
    germ: MapGerm,
}

fn planar_case() -> impl Strategy<Value = PlanarCase> {
    (
        1u32..=2,
        any::<bool>(),
        poly_strategy(2, 0, 2),
        poly_strategy(1, 1, 2),
        poly_strategy(2, 0, 2),
        prop_oneof![Just(1i64), Just(-1), Just(2)],
        1u32..=2,
    )
        .prop_map(|(nu, tangential, a1, a0, b1, c, k)| {
            let n = 2;
            let lift = |p: &PolySeries| p.rename_vars(2, &[1]);
            let mut a = &z(n, 0) * &a1;
            if !tangential {
                a = &a + &lift(&a0);
            }
            let b = &(&z(n, 0) * &b1) + &PolySeries::var(n, 1).pow(k).scale(&GR::from_int(c));
            let z1nu = z(n, 0).pow(nu);
            let comps = vec![&z(n, 0) + &(&z1nu * &a), &z(n, 1) + &(&z1nu * &b)];
            let germ = MapGerm::new(holoindex::germ_analysis::AdaptedChart::new(2, 1, "A").unwrap(), comps)
                .unwrap();
            PlanarCase { nu, a, b, germ }
        })
}

/// Tangent-to-identity planar germ at the origin with a random leading
/// part of degree 2 or 3.
fn point_germ_strategy() -> impl Strategy<Value = MapGerm> {
    (poly_strategy(2, 2, 2), poly_strategy(2, 2, 2), poly_strategy(2, 3, 3), poly_strategy(2, 3, 3))
        .prop_filter("not the identity", |(p, q, r, s)| {
            !(p.is_zero() && q.is_zero() && r.is_zero() && s.is_zero())
        })
        .prop_map(|(p, q, r, s)| {
            let comps = vec![&(&z(2, 0) + &p) + &r, &(&z(2, 1) + &q) + &s];
            MapGerm::new(holoindex::germ_analysis::AdaptedChart::new(2, 2, "O").unwrap(), comps).unwrap()
        })
}

fn adapted_transition() -> impl Strategy<Value = Vec<PolySeries>> {
    (
        prop_oneof![Just(1i64), Just(2), Just(-1), Just(3)],
        small(),
        small(),
        small(),
        small(),
        small(),
    )
        .prop_map(|(a0, a1, a2, b1, b2, b3)| {
            vec![
                poly(&format!("{a0}*z1 + ({a1})*z1^2 + ({a2})*z1*z2"), 2),
                poly(&format!("z2 + ({b1})*z2^2 + ({b2})*z1*z2 + ({b3})*z1^2"), 2),
            ]
        })
}

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn ring_laws_under_truncation(
        a in poly_strategy(2, 0, 4),
        b in poly_strategy(2, 0, 4),
        c in poly_strategy(2, 0, 4),
    ) {
        let (a, b, c) = (a.with_trunc(5), b.with_trunc(5), c.with_trunc(5));
        // the two sides may certify different depths; compare at the common one
        let agree = |x: PolySeries, y: PolySeries| {
            let d = x.trunc_degree().into_iter().chain(y.trunc_degree()).min().unwrap();
            x.with_trunc(d) == y.with_trunc(d)
        };
        prop_assert!(agree(&(&a + &b) + &c, &a + &(&b + &c)));
        prop_assert!(agree(&a * &(&b + &c), &(&a * &b) + &(&a * &c)));
        prop_assert!(agree(&(&a * &b) * &c, &a * &(&b * &c)));
    }

    #[test]
    fn composition_is_associative(
        f in poly_strategy(2, 0, 3),
        g in proptest::collection::vec(poly_strategy(2, 1, 2), 2),
        h in proptest::collection::vec(poly_strategy(2, 1, 2), 2),
    ) {
        let lhs = f.compose(&g).unwrap().compose(&h).unwrap();
        let gh: Vec<PolySeries> = g.iter().map(|p| p.compose(&h).unwrap()).collect();
        prop_assert_eq!(lhs, f.compose(&gh).unwrap());
    }

    #[test]
    fn exact_division_recovers_quotient(num in poly_strategy(2, 0, 3), den in poly_strategy(2, 0, 2)) {
        prop_assume!(!den.is_zero());
        prop_assert_eq!((&num * &den).divide_exact(&den).unwrap(), num);
    }

    #[test]
    fn laurent_residue_is_linear(
        p in unipoly_strategy(3),
        q in unipoly_strategy(3),
        c in small(),
        val in 1i64..4,
    ) {
        let den = LaurentSeries::new(0, val, vec![GR::from_int(1), GR::from_int(2)], 16);
        let lp = LaurentSeries::from_unipoly(0, &p, 16);
        let lq = LaurentSeries::from_unipoly(0, &q, 16);
        let c = GR::from_int(c);
        let lhs = laurent_residue(&(&lp + &lq.scale(&c)), &den).unwrap();
        let rhs = &laurent_residue(&lp, &den).unwrap() + &(&c * &laurent_residue(&lq, &den).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivatives_have_no_residue(cs in proptest::collection::vec(small(), 6), val in -4i64..0) {
        let s = LaurentSeries::new(0, val, cs.into_iter().map(GR::from_int).collect(), 8);
        prop_assert_eq!(s.derivative().residue().unwrap(), GR::from_int(0));
    }

    #[test]
    fn residues_over_all_poles_sum_to_zero(p in unipoly_strategy(1), roots in proptest::collection::btree_set(-4i64..=4, 3)) {
        // q = prod (x - r) with distinct rational roots, deg p <= deg q - 2
        let roots: Vec<GR> = roots.into_iter().map(GR::from_int).collect();
        let q = roots.iter().fold(UniPoly::one(), |acc, r| &acc * &UniPoly::linear(r));
        let total = roots
            .iter()
            .fold(GR::from_int(0), |acc, r| &acc + &residue_rational(&p, &q, r).unwrap());
        prop_assert_eq!(total, GR::from_int(0));
    }
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn ideal_members_vanish_to_the_bound(case in planar_case(), u in poly_strategy(2, 0, 2)) {
        let g = &case.germ;
        let p = contact_profile(g).unwrap();
        let h = &z(2, 0) * &u;
        prop_assume!(!h.is_zero());
        let gen = vanishing_order(&z(2, 0), g).unwrap();
        let bound = match gen {
            VanishingOrder::Finite(m) => m.min(p.nu_f + 1),
            _ => p.nu_f + 1,
        };
        prop_assert!(vanishing_order(&h, g).unwrap().exceeds(bound - 1));
    }

    #[test]
    fn contact_order_is_chart_independent(case in planar_case(), t in adapted_transition()) {
        let g = &case.germ;
        let p = contact_profile(g).unwrap();
        let hat = g.conjugate(&t, 8).unwrap();
        let q = contact_profile(&hat).unwrap();
        prop_assert_eq!(p.nu_f, case.nu);
        prop_assert_eq!(q.nu_f, p.nu_f);
        prop_assert_eq!(q.tangential, p.tangential);
    }

    #[test]
    fn lift_order_follows_dicriticality(f0 in point_germ_strategy()) {
        let t = dicritical_test(&f0).unwrap();
        let l = blow_up_point(&f0).unwrap();
        prop_assert_eq!(l.nu_upstairs + 1 == t.order, !t.dicritical);
        prop_assert_eq!(l.nu_upstairs == t.order, t.dicritical);
        for c in &l.charts {
            prop_assert!(conjugacy_holds(&f0, c).unwrap());
        }
    }

    #[test]
    fn sections_reconstruct_the_germ(case in planar_case()) {
        for kind in [SectionKind::Xf, SectionKind::HSigma] {
            let s = extract_section(&case.germ, kind).unwrap();
            prop_assert!(s.reconstructs(&case.germ).unwrap());
        }
    }

    #[test]
    fn tangential_iff_normal_part_vanishes_on_locus(case in planar_case()) {
        let p = contact_profile(&case.germ).unwrap();
        let a_on_s = case.a.set_zero(&[0]);
        prop_assert_eq!(p.tangential, a_on_s.is_zero());
        let xf = extract_section(&case.germ, SectionKind::Xf).unwrap();
        let hs = extract_section(&case.germ, SectionKind::HSigma).unwrap();
        prop_assert_eq!(xf.g_on_s == hs.g_on_s, p.tangential);
        prop_assert_eq!(xf.g_on_s[1].clone(), case.b.set_zero(&[0]));
    }

    #[test]
    fn connection_numerator_is_minus_h1(case in planar_case()) {
        let s = extract_section(&case.germ, SectionKind::Xf).unwrap();
        let m_f = action_coefficients(&s).unwrap().m_f;
        // h1 on S is the normal derivative of a
        prop_assert_eq!(m_f, -&case.a.derive(0).set_zero(&[0]));
    }

    #[test]
    fn covariance_holds(case in planar_case(), t in adapted_transition()) {
        prop_assert!(verify_chart_covariance(&case.germ, &t).unwrap());
    }

    #[test]
    fn residues_survive_normal_scaling(case in planar_case(), c in prop_oneof![Just(2i64), Just(-1), Just(3)]) {
        let kind = if case.a.set_zero(&[0]).is_zero() {
            SectionKind::Xf
        } else if case.nu > 1 {
            SectionKind::HSigma
        } else {
            return Ok(());
        };
        let c = GR::from_int(c);
        let t = vec![z(2, 0).scale(&c), z(2, 1)];
        let tinv = vec![z(2, 0).scale(&c.inv().unwrap()), z(2, 1)];
        let hat = conjugate_exact(&case.germ, &t, &tinv);
        let s0 = extract_section(&case.germ, kind).unwrap();
        let s1 = extract_section(&hat, kind).unwrap();
        let roots = s0.g_on_s[1].to_univariate(1).unwrap().gaussian_roots();
        for r in roots {
            let p = [q(0), r];
            prop_assert_eq!(
                residue_cs_n2_smooth(&s0, &p).unwrap().value,
                residue_cs_n2_smooth(&s1, &p).unwrap().value
            );
        }
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn residues_survive_chart_changes_fixing_the_point(case in planar_case(), t in adapted_transition()) {
        // transitions fix the origin; the splitting ones keep H_sigma well defined
        prop_assume!(case.a.set_zero(&[0]).is_zero() || case.nu > 1);
        let kind = if case.a.set_zero(&[0]).is_zero() { SectionKind::Xf } else { SectionKind::HSigma };
        let chart = case.germ.chart().clone();
        if kind == SectionKind::HSigma {
            prop_assume!(holoindex::germ_analysis::check_splitting_pair(&chart, &chart, &t).unwrap_or(false));
        }
        let s0 = extract_section(&case.germ, kind).unwrap();
        prop_assume!(s0.g_on_s[1].eval(&[q(0), q(0)]).unwrap() == q(0));
        let r0 = residue_cs_n2_smooth(&s0, &[q(0), q(0)]).unwrap().value;
        let hat = case.germ.conjugate(&t, 10).unwrap();
        let s1 = extract_section(&hat, kind).unwrap();
        prop_assert_eq!(residue_cs_n2_smooth(&s1, &[q(0), q(0)]).unwrap().value, r0);
    }
}
