use std::collections::BTreeMap;

use downup::derivations::{combine, multiplier_indices};
use downup::expr::parse_scalar;
use downup::oracle::{oracle_normalize_with, word_of, Letter, Strategy as Rewrite};
use downup::verify::{conformal_holds, inner_dichotomy_holds, leibniz_holds};
use downup::{
    apply_derivation, apply_inner, build_alpha_derivation, build_c_derivation, parse_gwa_element, AlphaSpec, BiPoly,
    CTypeSpec, DownUpPresentation, GwaAlgebra, GwaElement, ParamSpec, Scalar,
};
use proptest::prelude::*;

fn algebra() -> GwaAlgebra {
    let spec = ParamSpec::new(1, 2, 5).unwrap();
    DownUpPresentation::new(spec, vec![Scalar::one(), Scalar::zero(), Scalar::one()])
        .gwa_algebra()
        .unwrap()
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (prop_oneof![-3i64..=-1, 1i64..=3], -2i64..=2, any::<bool>()).prop_map(|(c, e, over)| {
        let s = Scalar::from_int(c).mul(&Scalar::z_pow(e));
        if over {
            s.div(&Scalar::z_pow(1).sub(&Scalar::from_int(2))).unwrap()
        } else {
            s
        }
    })
}

fn bipoly() -> impl Strategy<Value = BiPoly> {
    prop::collection::vec((0u32..3, 0u32..3, scalar()), 0..3).prop_map(|terms| {
        terms
            .into_iter()
            .fold(BiPoly::zero(), |acc, (i, j, c)| acc.add(&BiPoly::monomial(c, i, j)))
    })
}

fn element() -> impl Strategy<Value = GwaElement> {
    prop::collection::vec((-2i64..=2, bipoly()), 1..3).prop_map(|parts| {
        parts
            .into_iter()
            .fold(GwaElement::zero(), |acc, (w, p)| acc.add(&GwaElement::homogeneous(p, w)))
    })
}

fn nonzero_weight() -> impl Strategy<Value = i64> {
    prop_oneof![-3i64..=-1, 1i64..=3]
}

/// `c = Σ c_t h^t k^{b2 − t·b1}` over the admissible `t`.
fn multiplier(alg: &GwaAlgebra) -> impl Strategy<Value = BTreeMap<u64, Scalar>> {
    let ts = multiplier_indices(alg.spec()).elements_up_to(2);
    prop::collection::vec(scalar(), ts.len()).prop_map(move |cs| ts.iter().copied().zip(cs).collect())
}

fn multiplier_poly(spec: &ParamSpec, m: &BTreeMap<u64, Scalar>) -> BiPoly {
    let (b1, b2, d) = (spec.n1(), spec.n2(), spec.d());
    m.iter().fold(BiPoly::zero(), |acc, (&t, c)| {
        let e = (b2 - t as i64 * b1) / d;
        acc.add(&BiPoly::monomial(c.clone(), t as u32, e as u32))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(a in element(), b in element(), c in element()) {
        let alg = algebra();
        prop_assert_eq!(alg.mul(&alg.mul(&a, &b), &c), alg.mul(&a, &alg.mul(&b, &c)));
    }

    #[test]
    fn multiplication_distributes(a in element(), b in element(), c in element()) {
        let alg = algebra();
        prop_assert_eq!(alg.mul(&a, &b.add(&c)), alg.mul(&a, &b).add(&alg.mul(&a, &c)));
        prop_assert_eq!(alg.mul(&b.add(&c), &a), alg.mul(&b, &a).add(&alg.mul(&c, &a)));
    }

    #[test]
    fn product_respects_grading(p in bipoly(), q in bipoly(), m in -3i64..=3, n in -3i64..=3) {
        let alg = algebra();
        let prod = alg.mul(&GwaElement::homogeneous(p, m), &GwaElement::homogeneous(q, n));
        prop_assert!(prod.weights().iter().all(|&w| w == m + n));
    }

    #[test]
    fn sigma_is_an_automorphism_fixing_base(a in element(), b in element(), p in bipoly()) {
        let alg = algebra();
        let lhs = alg.apply_sigma_mu(&alg.mul(&a, &b));
        prop_assert_eq!(lhs, alg.mul(&alg.apply_sigma_mu(&a), &alg.apply_sigma_mu(&b)));
        let base = GwaElement::from_poly(p);
        prop_assert_eq!(alg.apply_sigma_mu(&base), base);
    }

    #[test]
    fn elements_print_and_parse_back(a in element()) {
        let alg = algebra();
        prop_assert_eq!(parse_gwa_element(&alg, &a.to_string()).unwrap(), a);
    }

    #[test]
    fn scalars_print_and_parse_back(s in scalar(), t in scalar()) {
        let v = s.add(&t);
        prop_assert_eq!(parse_scalar(&v.to_string()).unwrap(), v);
    }

    #[test]
    fn inner_derivations_are_derivations(b in element(), u in element(), v in element()) {
        let alg = algebra();
        let lhs = apply_inner(&alg, &b, &alg.mul(&u, &v));
        let rhs = alg
            .mul(&apply_inner(&alg, &b, &u), &alg.apply_sigma_mu(&v))
            .add(&alg.mul(&u, &apply_inner(&alg, &b, &v)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn alpha_type_is_inner_by_multiplier(w in nonzero_weight(), m in multiplier(&algebra()), u in element()) {
        let alg = algebra();
        let spec = alg.spec();
        let a = AlphaSpec::from_multiplier(spec, w, &m).unwrap();
        let d = build_alpha_derivation(spec, alg.g(), &a).unwrap();
        let b = GwaElement::homogeneous(multiplier_poly(spec, &m), w);
        prop_assert_eq!(apply_derivation(&alg, &d, &u), apply_inner(&alg, &b, &u));
    }

    #[test]
    fn combinations_satisfy_leibniz(
        w in nonzero_weight(),
        m in multiplier(&algebra()),
        c0 in bipoly(),
        k in scalar(),
        u in element(),
        v in element(),
    ) {
        let alg = algebra();
        let spec = alg.spec();
        let a = AlphaSpec::from_multiplier(spec, w, &m).unwrap();
        let alpha = build_alpha_derivation(spec, alg.g(), &a).unwrap();
        let c = build_c_derivation(spec, &CTypeSpec { c0 });
        let d = combine(&[(k, alpha), (Scalar::one(), c)]).unwrap();
        prop_assert!(leibniz_holds(&alg, &d, &u, &v));
    }

    #[test]
    fn conformal_solutions_check_out(f in prop::collection::vec(prop_oneof![Just(Scalar::zero()), scalar()], 0..7)) {
        let spec = ParamSpec::new(2, -3, 1).unwrap();
        prop_assert_eq!(conformal_holds(&DownUpPresentation::new(spec, f)), Ok(()));
    }

    #[test]
    fn inner_dichotomy_on_polynomials(c0 in bipoly()) {
        // n2 = n1 + d, so h·k is the only non-inner monomial in range.
        let spec = ParamSpec::new(1, 2, 3).unwrap();
        let alg = GwaAlgebra::new(spec, BiPoly::h()).unwrap();
        prop_assert_eq!(inner_dichotomy_holds(&alg, &c0), Ok(()));
    }
}

#[test]
fn rewriting_is_confluent_on_short_words() {
    let alg = algebra();
    let letters = [Letter::X, Letter::Y, Letter::H, Letter::K];
    let mut words: Vec<Vec<Letter>> = vec![vec![]];
    for len in 1..=4 {
        let longer: Vec<Vec<Letter>> = words
            .iter()
            .filter(|w| w.len() == len - 1)
            .flat_map(|w| {
                letters.iter().map(move |&l| {
                    let mut n = w.clone();
                    n.push(l);
                    n
                })
            })
            .collect();
        words.extend(longer);
    }
    assert_eq!(words.len(), 341);
    for w in &words {
        let left = oracle_normalize_with(&alg, &word_of(w), Rewrite::Leftmost, 8).unwrap();
        let right = oracle_normalize_with(&alg, &word_of(w), Rewrite::Rightmost, 8).unwrap();
        assert_eq!(left, right, "{w:?}");
    }
}

#[test]
fn inconsistent_alpha_tables_break_commutativity() {
    let alg = algebra();
    let spec = alg.spec();
    // A nonzero value on h with zero on k violates α(h)(s^w−1)k = α(k)(r^w−1)h.
    let a = AlphaSpec {
        w: 1,
        coeffs_h: BTreeMap::from([(1, Scalar::one())]),
        coeffs_k: BTreeMap::new(),
    };
    assert!(build_alpha_derivation(spec, alg.g(), &a).is_err());
}
