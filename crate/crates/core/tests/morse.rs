use proptest::prelude::*;
use wlab::morse::{f_critical_enumerate, index_counts, kunneth_rp2, morse_table, tilde_beta};

fn separated() -> impl Strategy<Value = [f64; 3]> {
    [-4.0f64..4.0, -4.0f64..4.0, -4.0f64..4.0].prop_filter("Morse", |a| {
        (a[0] - a[1]).abs() > 0.05 && (a[1] - a[2]).abs() > 0.05 && (a[0] - a[2]).abs() > 0.05
    })
}

fn sorted_values(alpha: [f64; 3]) -> Vec<(usize, f64)> {
    let mut v: Vec<_> = f_critical_enumerate(alpha).unwrap().iter().map(|p| (p.index, p.f_value)).collect();
    v.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_pattern_and_euler_characteristic(alpha in separated()) {
        let pts = f_critical_enumerate(alpha).unwrap();
        let c = index_counts(&pts);
        prop_assert_eq!(c, [4, 8, 8, 4]);
        prop_assert_eq!(c[0] as i64 - c[1] as i64 + c[2] as i64 - c[3] as i64, 0);
        for p in &pts {
            prop_assert!(p.constraint_residuals().iter().all(|r| r.abs() < 1e-12));
            prop_assert_eq!(p.hessian.iter().filter(|h| **h < 0.0).count(), p.index);
        }
    }

    #[test]
    fn shift_invariance_and_scaling(alpha in separated(), shift in -5.0f64..5.0, lam in 0.2f64..5.0) {
        let base = sorted_values(alpha);
        let shifted = sorted_values(alpha.map(|a| a + shift));
        let scaled = sorted_values(alpha.map(|a| a * lam));
        let flipped = sorted_values(alpha.map(|a| -a));
        for k in 0..24 {
            prop_assert!((base[k].1 - shifted[k].1).abs() < 1e-10);
            prop_assert_eq!(base[k].0, shifted[k].0);
            prop_assert!((lam * base[k].1 - scaled[k].1).abs() < 1e-9 * lam.max(1.0));
            prop_assert_eq!(base[k].0, scaled[k].0);
            prop_assert!((base[k].1 + flipped[23 - k].1).abs() < 1e-10);
            prop_assert_eq!(base[k].0, 3 - flipped[23 - k].0);
        }
    }

    #[test]
    fn tilde_beta_is_kunneth_and_symmetric(b in 0u64..20) {
        let tb = tilde_beta([1, b, b, 1]);
        prop_assert_eq!(tb, kunneth_rp2([1, b, b, 1]));
        for q in 0..6 {
            prop_assert_eq!(tb[q], tb[5 - q]);
        }
        prop_assert_eq!(tb[6], 0);
    }

    #[test]
    fn bound_is_at_least_two(b in 0u64..10, c in [0u64..10, 0u64..10, 0u64..10, 0u64..10]) {
        prop_assert!(morse_table([1, b, b, 1], c).bound >= 2);
    }
}

#[test]
fn three_torus_with_minimal_counts() {
    let t = morse_table([1, 3, 3, 1], [1, 3, 3, 1]);
    assert_eq!(t.tilde_beta, [1, 4, 7, 7, 4, 1, 0]);
    assert_eq!(t.bound, 8);
}
