use proptest::prelude::*;
use steiner_lab::field::{lipschitz, GridField};
use steiner_lab::steiner::{superlevel_area, symmetrize_function, truncate};

const L: f64 = 4.0;
const N: usize = 65;
const K: usize = 128;

/// Sum of one to three Gaussians centred in `[-1.5, 1.5]^2`.
fn smooth_bump() -> impl Strategy<Value = GridField> {
    prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5, 0.5f64..1.0, 0.3f64..1.0), 1..=3).prop_map(|bumps| {
        GridField::from_fn(L, N, |x, y| bumps.iter().map(|&(cx, cy, w, a)| a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (w * w)).exp()).sum())
            .unwrap()
    })
}

fn direction() -> impl Strategy<Value = [f64; 2]> {
    prop_oneof![Just([1.0, 0.0]), Just([0.0, 1.0]), (0.0f64..std::f64::consts::PI).prop_map(|a| [a.cos(), a.sin()])]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn superlevel_areas_are_preserved(u in smooth_bump(), t in 0.0f64..5.0, frac in 0.1f64..0.9) {
        let ut = symmetrize_function(&u, t, [1.0, 0.0], K).unwrap();
        let c = frac * u.max();
        let (a0, a1) = (superlevel_area(&u, c), superlevel_area(&ut.field, c));
        // half a grid cell per unit height, plus a relative slack for the level spacing
        let tol = 0.5 * u.h() * 2.0 * L + 0.005 * a0;
        prop_assert!((a0 - a1).abs() <= tol, "c={c}: {a0} vs {a1} (tol {tol})");
    }

    #[test]
    fn commutes_with_increasing_maps(u in smooth_bump(), t in 0.0f64..3.0, dir in direction()) {
        let phi = |w: f64| w * w * w + w;
        let lip_phi = 3.0 * u.max().powi(2) + 1.0;
        let a = symmetrize_function(&u, t, dir, K).unwrap();
        let b = symmetrize_function(&u.map(phi), t, dir, K).unwrap();
        let err = a.field.map(phi).max_abs_diff(&b.field);
        let tol = lip_phi * (a.max_level_gap + 2.0 * u.h() * lipschitz(&u)) + b.max_level_gap;
        prop_assert!(err <= tol, "err {err} tol {tol}");
    }

    #[test]
    fn maximum_is_not_increased(u in smooth_bump(), t in 0.0f64..5.0, dir in direction()) {
        let ut = symmetrize_function(&u, t, dir, K).unwrap();
        prop_assert!(ut.field.max() <= u.max() * (1.0 + 1e-12));
        prop_assert!(ut.field.min() >= u.min().min(0.0) - 1e-12);
    }

    #[test]
    fn truncation_sums_back(u in smooth_bump(), frac in 0.0f64..1.0) {
        let pair = truncate(&u, frac * u.max());
        let sum = pair.g_part.zip_map(&pair.h_part, |a, b| a + b).unwrap();
        prop_assert_eq!(sum.max_abs_diff(&u), 0.0);
    }
}
