use bglue::geometry::evaluate;
use bglue::heisenberg::{central_witness, element_map, ActionTarget, Gen, HeisElem, Word};
use bglue::numeric::Real;
use proptest::prelude::*;

const B: usize = 128;

fn word() -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::sample::select(Gen::ALL.to_vec()), 0..12).prop_map(Word::new)
}

fn pt(v: &[f64]) -> Vec<Real> {
    v.iter().map(|x| Real::from_f64(*x, B)).collect()
}

fn dist(p: &[Real], q: &[Real]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a.to_f64() - b.to_f64()).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_evaluate_homomorphically(u in word(), v in word()) {
        let uv = u.clone().concat(&v);
        prop_assert_eq!(uv.eval(), u.eval().mul(&v.eval()));
        prop_assert!(u.clone().concat(&u.inverse()).eval().is_identity());
        prop_assert_eq!(u.reduced().eval(), u.eval());
        prop_assert!(u.reduced().len() <= u.len());
    }

    #[test]
    fn the_commutator_is_central(a in -30i64..30, b in -30i64..30, u in word()) {
        let z = Word::commutator_word(a, b).eval();
        prop_assert_eq!(&z, &HeisElem::z().pow(a * b));
        let g = u.eval();
        prop_assert_eq!(z.mul(&g), g.mul(&z));
    }

    #[test]
    fn central_witnesses_spell_powers_of_z(m in 0u64..5000) {
        let w = central_witness(m, &|_| None);
        prop_assert_eq!(w.eval(), HeisElem::z().pow(m as i64));
    }

    /// The action on the plane and on the sphere sends products to composites.
    #[test]
    fn element_maps_compose(u in word(), v in word(), x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let (g, h) = (u.eval(), v.eval());
        let gh = g.mul(&h);
        let plane = pt(&[x, y]);
        let t = ActionTarget::Plane;
        let lhs = evaluate(&element_map(&t, &gh, B).unwrap(), &plane, B).unwrap();
        let mid = evaluate(&element_map(&t, &h, B).unwrap(), &plane, B).unwrap();
        let rhs = evaluate(&element_map(&t, &g, B).unwrap(), &mid, B).unwrap();
        prop_assert!(dist(&lhs, &rhs) < 1e-25);

        let n = (1.0 + x * x + y * y).sqrt();
        let sphere = pt(&[1.0 / n, x / n, y / n]);
        let t = ActionTarget::Sphere;
        let lhs = evaluate(&element_map(&t, &gh, B).unwrap(), &sphere, B).unwrap();
        let mid = evaluate(&element_map(&t, &h, B).unwrap(), &sphere, B).unwrap();
        let rhs = evaluate(&element_map(&t, &g, B).unwrap(), &mid, B).unwrap();
        prop_assert!(dist(&lhs, &rhs) < 1e-25);
    }
}
