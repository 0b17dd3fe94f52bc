use num_complex::Complex64;
use proptest::prelude::*;
use temporal_bell::*;

fn state_strategy() -> impl Strategy<Value = TwoLevelState64> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 0.0f64..=1.0).prop_filter_map(
        "nonzero amplitudes",
        |(a, b, c, d, scale)| {
            let n = (a * a + b * b + c * c + d * d).sqrt();
            (n > 1e-6).then(|| {
                let k = scale.sqrt() / n;
                TwoLevelState::new(Complex64::new(a * k, b * k), Complex64::new(c * k, d * k)).unwrap()
            })
        },
    )
}

fn unit_state_strategy() -> impl Strategy<Value = TwoLevelState64> {
    state_strategy().prop_filter_map("nonzero", |s| {
        let n = s.norm_sqr().sqrt();
        (n > 1e-6).then(|| TwoLevelState::new(s.amplitude(Sign::Plus) / n, s.amplitude(Sign::Minus) / n).unwrap())
    })
}

fn sign_strategy() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn evolution_preserves_norm(s in state_strategy(), omega in 0.0f64..20.0, t in 0.0f64..1e3) {
        let params = RabiParams::new(omega).unwrap();
        let out = evolve(&s, &params, t).unwrap();
        prop_assert!((out.norm_sqr() - s.norm_sqr()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn projector_is_idempotent(s in state_strategy(), sign in sign_strategy()) {
        let o = Outcome::spin(sign);
        match apply_projector(&s, o) {
            Ok((once, p)) => {
                prop_assert!(p >= 0.0);
                let (twice, p2) = apply_projector(&once, o).unwrap();
                prop_assert_eq!(once, twice);
                prop_assert!((p2 - 1.0).abs() < 1e-12);
            }
            Err(e) => prop_assert_eq!(e, Error::ZeroNorm),
        }
    }

    #[test]
    fn outcome_probabilities_are_complete(s in unit_state_strategy()) {
        let total: f64 = Sign::ALL
            .iter()
            .map(|&x| apply_projector(&s, Outcome::spin(x)).map(|r| r.1).unwrap_or(0.0))
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn effective_uncertainty_in_range(
        omega in 0.0f64..10.0,
        t_ab in 0.0f64..10.0,
        t_bc in 0.0f64..10.0,
        signs in (sign_strategy(), sign_strategy(), sign_strategy()),
    ) {
        let params = RabiParams::new(omega).unwrap();
        for kind in [UncertaintyKind::Ab, UncertaintyKind::Ac, UncertaintyKind::Bc] {
            let (a, b, c) = (Outcome::spin(signs.0), Outcome::spin(signs.1), Outcome::spin(signs.2));
            let dx = effective_uncertainty(kind, a, b, c, t_ab, t_bc, &params).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&dx), "{kind:?}: {dx}");
        }
    }
}

#[test]
fn marginal_law_on_time_grid() {
    let params = RabiParams::new(1.0).unwrap();
    let times = midpoint_times(params.period(), 64);
    let mut worst = 0.0f64;
    for &t_ab in &times {
        for &t_bc in &times {
            for (a, b) in [(Sign::Plus, Sign::Plus), (Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus)] {
                let (a, b) = (Outcome::spin(a), Outcome::spin(b));
                let sum: f64 = Sign::ALL
                    .iter()
                    .map(|&c| sequential_joint_probability(a, t_ab, b, t_bc, Outcome::spin(c), &params).unwrap())
                    .sum();
                worst = worst.max((sum - pair_probability(a, t_ab, b, &params).unwrap()).abs());
            }
        }
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn propagation_matches_closed_form_on_fine_grid() {
    let d = SpinDynamics::spin(1.0f64).unwrap();
    let times = midpoint_times(d.window(), 256);
    let mut worst = 0.0f64;
    for &t_ab in &times {
        for &t_bc in &times {
            let x = d.table(t_ab, t_bc).unwrap();
            let y = spin_closed_form(t_ab, t_bc, &d.params).unwrap();
            let pairs = x.p_ab.iter().flatten().zip(y.p_ab.iter().flatten());
            let pairs = pairs.chain(x.p_ac.iter().flatten().zip(y.p_ac.iter().flatten()));
            let pairs = pairs.chain(x.p_bc.iter().flatten().flatten().zip(y.p_bc.iter().flatten().flatten()));
            for (u, v) in pairs {
                worst = worst.max((u - v).abs());
            }
            assert!(x.invariant_defect() < 1e-12);
        }
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn single_precision_tracks_double() {
    let d64 = SpinDynamics::spin(1.0f64).unwrap();
    let d32 = SpinDynamics::spin(1.0f32).unwrap();
    for &(t_ab, t_bc) in &[(0.1, 0.2), (1.3, 2.9), (4.0, 0.5)] {
        let x = d64.table(t_ab, t_bc).unwrap();
        let y = d32.table(t_ab as f32, t_bc as f32).unwrap();
        for a in Sign::ALL {
            for b in Sign::ALL {
                assert!((x.ab(a, b) - y.ab(a, b) as f64).abs() < 1e-5);
                for c in Sign::ALL {
                    assert!((x.bc(a, b, c) - y.bc(a, b, c) as f64).abs() < 1e-5);
                }
            }
        }
    }
}
