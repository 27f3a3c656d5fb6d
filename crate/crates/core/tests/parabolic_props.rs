use proptest::prelude::*;
use warplab_core::geometry::WarpingProfile;
use warplab_core::parabolic::{
    harnack_ratio, heat_solve_radial, li_yau_g_quantity, li_yau_quantity, BoundaryCondition, EuclideanKernel,
    HarnackConfig, HeatProblem, InitialData,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn euclidean_kernel_is_the_equality_case(n in 1usize..6, d in 0.0f64..3.0, t in 0.1f64..2.0, mass in 0.1f64..10.0) {
        let k = EuclideanKernel { n, mass };
        prop_assert!(li_yau_quantity(&k, d, t).unwrap().abs() <= 1e-12);
        prop_assert!(li_yau_g_quantity(&k, d, t).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn kernel_harnack_ratio_is_at_least_one(
        n in 1usize..6,
        r1 in 0.0f64..3.0,
        r2 in 0.0f64..3.0,
        t1 in 0.05f64..1.0,
        dt in 0.01f64..1.0,
        antipodal: bool,
    ) {
        let e = harnack_ratio(&EuclideanKernel { n, mass: 1.0 }, HarnackConfig { r1, t1, r2, t2: t1 + dt, antipodal }).unwrap();
        prop_assert!(e.ratio >= 1.0 - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn neumann_evolution_stays_positive_and_conserves_mass(kappa in 0.1f64..1.5, amplitude in -0.9f64..0.9, n in 2usize..4) {
        let p = HeatProblem {
            profile: WarpingProfile::sphere(kappa).unwrap(),
            n,
            radius: 1.0,
            boundary: BoundaryCondition::Neumann,
            initial: InitialData::CosineRipple { amplitude },
            t_start: 0.05,
            t_end: 0.3,
            steps: 20,
            intervals: 64,
            time_origin: None,
        };
        let f = heat_solve_radial(&p).unwrap();
        let m = f.masses();
        for j in 0..f.times().len() {
            prop_assert!(f.snapshot(j).iter().all(|&u| u > 0.0));
        }
        prop_assert!(m.iter().all(|x| (x - m[0]).abs() <= 1e-10 * m[0]));
    }
}
