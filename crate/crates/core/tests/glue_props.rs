use bglue::blowup::{blow_down, blow_up_pt};
use bglue::geometry::evaluate;
use bglue::glue::{GluedAction, TaggedPoint};
use bglue::heisenberg::{Gen, Word};
use bglue::numeric::Real;
use bglue::stretch::ChiProfile;
use proptest::prelude::*;
use std::sync::OnceLock;

const B: usize = 128;

fn smoothed() -> &'static GluedAction {
    static A: OnceLock<GluedAction> = OnceLock::new();
    A.get_or_init(|| GluedAction::disk_annulus(Some(ChiProfile::default()), B).unwrap())
}

fn word() -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::sample::select(Gen::ALL.to_vec()), 1..5).prop_map(Word::new)
}

/// Interior points of the disk (piece 0) or the annulus (piece 1).
fn point() -> impl Strategy<Value = TaggedPoint> {
    (0usize..2, -3.1f64..3.1, 0.02f64..0.98).prop_map(|(piece, th, s)| TaggedPoint::from_f64(piece, &[th, s], B))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn glued_words_match_their_elements(w in word(), p in point()) {
        let d = smoothed().homomorphism_defect(&w, &[p], B).unwrap();
        prop_assert!(d < 1e-20, "{} defect {:e}", w, d);
    }

    #[test]
    fn composing_glued_maps_is_sequential_evaluation(u in word(), v in word(), p in point()) {
        let a = smoothed();
        let (f, g) = (a.element(&u.eval(), B).unwrap(), a.element(&v.eval(), B).unwrap());
        let direct = f.compose(&g).unwrap().evaluate(&p, B).unwrap();
        let stepwise = f.evaluate(&g.evaluate(&p, B).unwrap(), B).unwrap();
        prop_assert!(a.host.distance(&direct, &stepwise, B).unwrap() < 1e-20);
    }

    /// A seam point has one representative per side; the glued map must
    /// send both to the same place.
    #[test]
    fn seam_representatives_agree(g in prop::sample::select(Gen::ALL.to_vec()), u in -3.1f64..3.1) {
        let a = smoothed();
        let host = &a.host;
        let s = host.seam(0).unwrap();
        let ub = Real::from_f64(u, B);
        let ua = evaluate(&s.alpha_inv, std::slice::from_ref(&ub), B).unwrap();
        let on_b = TaggedPoint::new(s.b.piece, host.pieces[s.b.piece].boundary_point(&s.b.component, &ub, B).unwrap());
        let on_a = TaggedPoint::new(s.a.piece, host.pieces[s.a.piece].boundary_point(&s.a.component, &ua[0], B).unwrap());
        prop_assert!(host.distance(&on_a, &on_b, B).unwrap() < 1e-25);
        let f = a.generator(g);
        let p = f.evaluate(&on_a, B).unwrap();
        let q = f.evaluate(&on_b, B).unwrap();
        prop_assert!(host.distance(&p, &q, B).unwrap() < 1e-20);
    }

    #[test]
    fn blow_up_inverts_blow_down(x in -2.0f64..2.0, y in -2.0f64..2.0) {
        prop_assume!(x.hypot(y) > 1e-6);
        let p = [Real::from_f64(x, B), Real::from_f64(y, B)];
        let (theta, r) = blow_up_pt(&p, B).unwrap();
        let back = blow_down(&theta, &r, B).unwrap();
        prop_assert!((back[0].to_f64() - x).abs() < 1e-30 && (back[1].to_f64() - y).abs() < 1e-30);
    }
}
