//! Invariants of the density profile, the odd-window barrier and lattice reduction.

use gabor_wirtinger::barrier::{delta_at_zero, h1_delta_at_zero};
use gabor_wirtinger::criterion::{certify, certify_rect, delta_g, lattice_sum, VerdictStatus};
use gabor_wirtinger::lattice::{reduce_general, Lattice2D};
use gabor_wirtinger::window::{Parity, Window};
use gabor_wirtinger::Complex64;
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn hermite_window() -> impl Strategy<Value = Window> {
    (0u32..6, 0.4f64..2.5).prop_map(|(n, b)| Window::hermite(n).dilate(b).unwrap())
}

fn odd_window() -> impl Strategy<Value = Window> {
    (prop::sample::select(vec![1u32, 3, 5]), 0.5f64..2.0)
        .prop_map(|(n, b)| Window::hermite(n).dilate(b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn real_windows_have_symmetric_profiles(w in hermite_window(), omega in 0.0f64..0.5) {
        let left = delta_g(&w, omega, TOL).unwrap();
        let right = delta_g(&w, 1.0 - omega, TOL).unwrap();
        prop_assert!((left.value - right.value).abs() <= 1e-12 * left.value);
    }

    #[test]
    fn enclosures_bracket_the_estimate(w in hermite_window(), omega in 0.0f64..=1.0) {
        let d = delta_g(&w, omega, TOL).unwrap();
        prop_assert!(d.rigorous);
        prop_assert!(d.low <= d.value && d.value <= d.high);
        prop_assert!(d.high - d.low <= 1e-9 * d.value);
    }

    #[test]
    fn profile_ignores_nonzero_scalars(
        w in hermite_window(),
        omega in 0.0f64..=1.0,
        re in 0.1f64..10.0,
        im in -10.0f64..10.0,
    ) {
        let scaled = w.scaled(Complex64::new(re, im));
        let a = delta_g(&w, omega, TOL).unwrap();
        let b = delta_g(&scaled, omega, TOL).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-12 * a.value);
    }

    #[test]
    fn tighter_tolerance_stays_inside_looser_enclosure(
        w in hermite_window(),
        omega in 0.0f64..=1.0,
        power in 0u32..=2,
    ) {
        let loose = lattice_sum(&w, omega, power, 1e-4).unwrap();
        let tight = lattice_sum(&w, omega, power, 1e-13).unwrap();
        prop_assert!(tight.terms_used >= loose.terms_used);
        prop_assert!(loose.tail_bound <= 1e-4 * loose.value);
        let slack = 1e-14 * tight.value;
        prop_assert!(tight.value >= loose.value - slack);
        prop_assert!(tight.value <= loose.value + loose.tail_bound + slack);
    }

    #[test]
    fn odd_windows_sit_at_or_below_one_half_at_the_origin(w in odd_window()) {
        let report = delta_at_zero(&w, TOL).unwrap();
        prop_assert_eq!(report.parity, Parity::Odd);
        prop_assert!(report.ghat0 <= 1e-20);
        prop_assert!(report.num0 <= report.den0);
        prop_assert!(report.delta0_high <= 0.5);
        prop_assert!(report.strict);
    }

    #[test]
    fn odd_windows_are_never_certified_at_one_half(w in odd_window(), excess in 0.0f64..0.5) {
        let verdict = certify(&w, 0.5 + excess, 101, TOL).unwrap();
        prop_assert_eq!(verdict.status, VerdictStatus::Inconclusive);
    }

    #[test]
    fn first_hermite_margin_is_negative(b in 0.05f64..20.0) {
        let row = h1_delta_at_zero(b, TOL).unwrap();
        prop_assert!(row.log10_margin.is_finite());
        prop_assert!(row.log10_margin < 0.0);
        prop_assert!(row.delta0_low <= row.delta0 && row.delta0 <= row.delta0_high);
        prop_assert!(row.delta0_high <= 0.5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rectangular_lattices_match_dilated_square_lattices(
        n in 0u32..4,
        a in 0.3f64..1.5,
        b in 0.5f64..2.0,
    ) {
        let w = Window::hermite(n);
        let rect = certify_rect(&w, a, b, 101, TOL).unwrap();
        let square = certify(&w.dilate(b).unwrap(), a * b, 101, TOL).unwrap();
        prop_assert_eq!(rect.status, square.status);
        prop_assert_eq!(rect.min_delta_g, square.min_delta_g);
    }

    #[test]
    fn reduction_preserves_covolume_and_parity(
        entries in prop::array::uniform4(-2.0f64..2.0),
        n in 0u32..3,
    ) {
        let lattice = Lattice2D::from_row_major(entries);
        prop_assume!(lattice.as_ref().map(|l| l.covolume() > 0.2).unwrap_or(false));
        let lattice = lattice.unwrap();
        let w = Window::hermite(n);
        let reduction = reduce_general(&w, &lattice).unwrap();
        prop_assert!((reduction.covolume - lattice.covolume()).abs() <= 1e-12 * lattice.covolume());
        prop_assert!(reduction.parity_preserved(w.parity()));
    }
}
