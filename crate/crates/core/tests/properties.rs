use proptest::prelude::*;

use kt_core::dispersion::{fourier_extract, grid, recentre};
use kt_core::lattice::{weight_w, weight_wn};
use kt_core::transform::{to_coeffs, to_configs};
use kt_core::{DispersionSeries, SiteSet};

fn site_set(max_n: usize) -> impl Strategy<Value = SiteSet> {
    (3..=max_n).prop_flat_map(|n| (0..1u64 << n).prop_map(move |b| SiteSet::from_index(n, b as usize)))
}

fn two_sets(max_n: usize) -> impl Strategy<Value = (SiteSet, SiteSet)> {
    (3..=max_n).prop_flat_map(|n| {
        (0..1u64 << n, 0..1u64 << n)
            .prop_map(move |(a, b)| (SiteSet::from_index(n, a as usize), SiteSet::from_index(n, b as usize)))
    })
}

proptest! {
    #[test]
    fn sym_diff_is_a_group((a, b) in two_sets(20)) {
        prop_assert_eq!(a ^ b, b ^ a);
        prop_assert_eq!((a ^ b) ^ b, a);
        prop_assert!((a ^ a).is_empty());
        prop_assert_eq!(a.sym_diff(b).unwrap(), a ^ b);
    }

    #[test]
    fn shifts_compose(x in site_set(30), s in -70i64..70, t in -70i64..70) {
        prop_assert_eq!(x.shift(s).shift(t), x.shift(s + t));
        prop_assert_eq!(x.shift(s).len(), x.len());
        prop_assert_eq!(x.shift(x.n_sites() as i64), x);
    }

    #[test]
    fn generalized_translation_is_a_cyclic_action(x in site_set(30), s in -70i64..70, t in -70i64..70) {
        let n = x.n_sites() as i64;
        prop_assert_eq!(x.gen_translate(s).gen_translate(t), x.gen_translate(s + t));
        prop_assert_eq!(x.gen_translate(n), x.complement());
        prop_assert_eq!(x.gen_translate(2 * n), x);
    }

    #[test]
    fn boundary_and_interface_counts(x in site_set(40)) {
        prop_assert_eq!(x.boundary(), x.complement().boundary());
        prop_assert_eq!(x.boundary().len() % 2, 0);
        prop_assert!(x.n_of() >= 0);
        prop_assert_eq!(x.interface_sites().len() as i32, x.n_of() + 1);
    }

    #[test]
    fn weights_bounds(x in site_set(40), t in 0i64..40) {
        let n = x.n_sites() as u32;
        let w = weight_w(x);
        prop_assert_eq!(w, weight_w(x.shift(t)));
        prop_assert!(w <= n.div_ceil(2));
        prop_assert!(weight_wn(x) >= w);
        prop_assert!(weight_wn(x) >= 1);
        prop_assert_eq!(w == 0, x.is_empty());
        // a set already touching the seam pays nothing extra
        if x.contains(1) || x.contains(x.n_sites()) {
            prop_assert_eq!(weight_wn(x), w);
        }
    }

    #[test]
    fn canonical_is_orbit_minimum(x in site_set(24), t in 0i64..24) {
        let c = x.canonical();
        prop_assert_eq!(c, x.shift(t).canonical());
        prop_assert!(c.index() <= x.index());
    }

    #[test]
    fn serde_round_trip(x in site_set(62)) {
        let text = serde_json::to_string(&x).unwrap();
        let back: SiteSet = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn walsh_hadamard_round_trip(v in prop::collection::vec(-1.0f64..1.0, 64)) {
        let back = to_coeffs(&to_configs(&v));
        for (a, b) in v.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn dispersion_grid_round_trip(n in 3usize..12, seed in prop::collection::vec(-1.0f64..1.0, 24)) {
        // even in k, as every dispersion here is
        let samples: Vec<(f64, f64)> = grid::<f64>(n)
            .into_iter()
            .enumerate()
            .map(|(j, k)| (k, seed[j.min(2 * n - j)]))
            .collect();
        let d: DispersionSeries = fourier_extract(&samples).unwrap();
        prop_assert!(d.warnings.is_empty());
        for (k, v) in &samples {
            let z = d.evaluate_complex(*k);
            prop_assert!((z.re - v).abs() < 1e-12);
            prop_assert!(z.im.abs() < 1e-9);
        }
        let again = fourier_extract(&d.evaluate_grid()).unwrap();
        for s in d.s_min..=d.s_max() {
            prop_assert!((again.coeff(s) - d.coeff(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn recentring_is_a_relabelling(n in 3usize..20, s in -200i64..200) {
        let r = recentre(s, n);
        let ni = n as i64;
        prop_assert!(r > -ni && r <= ni);
        prop_assert_eq!((r - s).rem_euclid(2 * ni), 0);
        prop_assert_eq!(recentre(r, n), r);
    }
}
