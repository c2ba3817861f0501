mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use qpde::mesh::wall_flux_term;
use qpde::optimizer::{minimize, nelder_mead, OptimizerConfig};
use qpde::qaoa::{
    apply_cost_layer, apply_mixer_layer, expectation, run_circuit, warm_start_state, EnergyTable,
};
use qpde::qubo::{bits_from_index, ising_to_qubo, qubo_to_ising, spins_from_bits};
use qpde::{
    assemble_system, velocity, BitWeighting, MarchingSystem, Mesh, PhysicalParams, QaoaParams,
    QuboInstance, Statevector,
};

use common::*;

fn params() -> impl Strategy<Value = PhysicalParams> {
    (
        0.01f64..1.0,
        500.0f64..5000.0,
        0.5f64..2.0,
        0.005f64..0.05,
        0.1f64..5.0,
        0.5f64..5.0,
        1.0f64..200.0,
    )
        .prop_map(|(k, cp, rho, h, b, um, qflux)| PhysicalParams {
            k,
            cp,
            rho,
            h,
            b,
            um,
            qflux,
        })
}

fn qubo(max_vars: usize) -> impl Strategy<Value = QuboInstance> {
    (1..=max_vars).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(-5.0f64..5.0, n), n),
            prop::collection::vec(-5.0f64..5.0, n),
            -5.0f64..5.0,
        )
            .prop_map(|(q, l, c)| QuboInstance::new(q, l, c).unwrap())
    })
}

fn energies(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1 << n)
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interior_rows_sum_to_one_and_wall_rows_to_zero(
        p in params(), m in 2usize..8, n in 4usize..12,
        prev in prop::collection::vec(-50.0f64..50.0, 12),
    ) {
        let mesh = Mesh::new(&p, m, n).unwrap();
        let sys = assemble_system(&p, &mesh, &prev[..n]).unwrap();
        let dense = sys.matrix.to_dense();
        for (j, row) in dense.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            let target = if j == 0 || j == n - 1 { 0.0 } else { 1.0 };
            prop_assert!((sum - target).abs() <= 1e-9 * row.iter().map(|v| v.abs()).sum::<f64>());
        }
        let flux = wall_flux_term(&p, &mesh);
        prop_assert_eq!(sys.rhs[0], -flux);
        prop_assert_eq!(sys.rhs[n - 1], flux);
        prop_assert_eq!(&sys.rhs[1..n - 1], &prev[1..n - 1]);
    }

    #[test]
    fn matrix_ignores_previous_column(
        p in params(), n in 4usize..10,
        a in prop::collection::vec(-50.0f64..50.0, 10),
        b in prop::collection::vec(-50.0f64..50.0, 10),
    ) {
        let mesh = Mesh::new(&p, 3, n).unwrap();
        let sa = assemble_system(&p, &mesh, &a[..n]).unwrap();
        let sb = assemble_system(&p, &mesh, &b[..n]).unwrap();
        prop_assert_eq!(sa.matrix, sb.matrix);
    }

    #[test]
    fn velocity_is_symmetric_and_nonnegative(p in params(), t in 0.0f64..=1.0) {
        let u = velocity(&p, t * p.h).unwrap();
        let mirrored = velocity(&p, (1.0 - t) * p.h).unwrap();
        prop_assert!(u >= 0.0);
        prop_assert!((u - mirrored).abs() <= 1e-12 * p.um);
        prop_assert!(u <= 1.5 * p.um * (1.0 + 1e-12));
    }

    #[test]
    fn binarized_energy_equals_squared_residual(
        exps in prop::sample::subsequence((-2i32..=3).collect::<Vec<_>>(), 1..=3),
        a in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 3),
        b in prop::collection::vec(-10.0f64..10.0, 3),
        index in 0usize..512,
    ) {
        let w = BitWeighting::new(exps).unwrap();
        let sys = MarchingSystem::from_dense(&a, b.clone()).unwrap();
        let q = qpde::qubo::encode_qubo(&sys, &w).unwrap();
        let nvars = q.num_vars();
        let bits = bits_of(index % (1 << nvars), nvars);
        let direct = squared_residual(&a, &b, &decode_direct(&bits, &w.weights()));
        prop_assert!((q.energy(&bits) - direct).abs() <= 1e-9 * direct.max(1.0));
    }

    #[test]
    fn ising_and_qubo_agree_everywhere(q in qubo(6)) {
        let ising = qubo_to_ising(&q);
        let back = ising_to_qubo(&ising);
        let n = q.num_vars();
        for x in 0..1usize << n {
            let bits = bits_from_index(x, n);
            let e = q.energy(&bits);
            prop_assert!((ising.energy(&spins_from_bits(&bits)) - e).abs() <= 1e-9);
            prop_assert!((back.energy(&bits) - e).abs() <= 1e-9);
        }
    }

    #[test]
    fn all_zero_bits_cost_the_offset(q in qubo(6)) {
        prop_assert_eq!(q.energy(&vec![false; q.num_vars()]), q.offset());
    }

    #[test]
    fn text_round_trip_preserves_energies(q in qubo(6)) {
        let back = QuboInstance::from_text(&q.to_text()).unwrap();
        let n = q.num_vars();
        prop_assert_eq!(back.num_vars(), n);
        for x in 0..1usize << n {
            let bits = bits_from_index(x, n);
            prop_assert!((back.energy(&bits) - q.energy(&bits)).abs() <= 1e-9);
        }
    }

    #[test]
    fn circuits_preserve_the_norm(
        e in energies(4),
        angles in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..=32),
        seed in any::<u64>(),
    ) {
        let table = EnergyTable::from_energies(e).unwrap();
        let init = Statevector::from_amplitudes(random_state(&mut rng(seed), 4)).unwrap();
        let (g, b): (Vec<f64>, Vec<f64>) = angles.into_iter().unzip();
        let out = run_circuit(&table, &QaoaParams::new(g, b).unwrap(), &init);
        prop_assert!((out.norm_sqr() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn cost_layers_add_and_commute(e in energies(3), g1 in -5.0f64..5.0, g2 in -5.0f64..5.0, seed in any::<u64>()) {
        let table = EnergyTable::from_energies(e).unwrap();
        let init = Statevector::from_amplitudes(random_state(&mut rng(seed), 3)).unwrap();
        let mut ab = init.clone();
        apply_cost_layer(&mut ab, &table, g1);
        apply_cost_layer(&mut ab, &table, g2);
        let mut ba = init.clone();
        apply_cost_layer(&mut ba, &table, g2);
        apply_cost_layer(&mut ba, &table, g1);
        let mut sum = init;
        apply_cost_layer(&mut sum, &table, g1 + g2);
        prop_assert!(close(ab.amplitudes(), ba.amplitudes(), 1e-12));
        prop_assert!(close(ab.amplitudes(), sum.amplitudes(), 1e-9));
    }

    #[test]
    fn mixer_layers_add_and_match_dense(b1 in -3.0f64..3.0, b2 in -3.0f64..3.0, seed in any::<u64>()) {
        let init = random_state(&mut rng(seed), 3);
        let mut s = Statevector::from_amplitudes(init.clone()).unwrap();
        apply_mixer_layer(&mut s, b1);
        apply_mixer_layer(&mut s, b2);
        let reference = matvec(&dense_mixer(3, b1 + b2), &init);
        prop_assert!(close(s.amplitudes(), &reference, 1e-10));
        prop_assert!((norm_sqr(s.amplitudes()) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn half_clamp_warm_start_is_uniform_at_every_layer(
        relaxed in prop::collection::vec(0.0f64..=1.0, 3),
        e in energies(3),
        angles in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..=4),
    ) {
        let table = EnergyTable::from_energies(e).unwrap();
        let warm = warm_start_state(&relaxed, 0.5).unwrap();
        let uniform = Statevector::uniform(3);
        prop_assert!(close(warm.amplitudes(), uniform.amplitudes(), 1e-15));
        for l in 1..=angles.len() {
            let (g, b): (Vec<f64>, Vec<f64>) = angles[..l].iter().copied().unzip();
            let p = QaoaParams::new(g, b).unwrap();
            let a = run_circuit(&table, &p, &warm);
            let u = run_circuit(&table, &p, &uniform);
            prop_assert!(close(a.amplitudes(), u.amplitudes(), 1e-12));
        }
    }

    #[test]
    fn expectation_lies_within_the_spectrum(e in energies(4), seed in any::<u64>()) {
        let table = EnergyTable::from_energies(e).unwrap();
        let s = Statevector::from_amplitudes(random_state(&mut rng(seed), 4)).unwrap();
        let v = expectation(&s, &table);
        prop_assert!(v >= table.min() - 1e-9 && v <= table.max() + 1e-9);
    }

    #[test]
    fn basis_state_sits_at_its_energy(e in energies(3), x in 0usize..8) {
        let table = EnergyTable::from_energies(e).unwrap();
        prop_assert_eq!(expectation(&Statevector::basis(3, x), &table), table.get(x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn optimizer_is_deterministic_and_monotone(
        centre in prop::collection::vec(-2.0f64..2.0, 1..=4),
        start in prop::collection::vec(-2.0f64..2.0, 4),
        seed in any::<u64>(),
        restarts in 0usize..3,
    ) {
        let dim = centre.len();
        let f = |x: &[f64]| -> f64 {
            x.iter().zip(&centre).map(|(a, c)| (a - c).powi(2) + (3.0 * a).sin()).sum()
        };
        let config = OptimizerConfig { max_evals: 150, tol: 1e-8, restarts, seed };
        let a = nelder_mead(f, &start[..dim], &config).unwrap();
        let b = nelder_mead(f, &start[..dim], &config).unwrap();
        prop_assert_eq!(&a.evaluations.len(), &b.evaluations.len());
        for (x, y) in a.evaluations.iter().zip(&b.evaluations) {
            prop_assert_eq!(x.value.to_bits(), y.value.to_bits());
        }
        prop_assert!(a.evaluations.len() <= 150);
        let running = a.running_best();
        prop_assert!(running.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(running.last().copied(), Some(a.best_value));
        prop_assert!(a.best_value <= f(&start[..dim]));
    }

    #[test]
    fn qaoa_minimization_never_ends_above_its_start(e in energies(3), seed in any::<u64>()) {
        let table = EnergyTable::from_energies(e).unwrap();
        let init = Statevector::uniform(3);
        let start = QaoaParams::new(vec![0.1], vec![0.2]).unwrap();
        let first = expectation(&run_circuit(&table, &start, &init), &table);
        let config = OptimizerConfig { max_evals: 60, seed, ..Default::default() };
        let trace = minimize(|p| expectation(&run_circuit(&table, p, &init), &table), &start, &config).unwrap();
        prop_assert!(trace.best_value <= first);
        prop_assert_eq!(trace.evaluations[0].value, first);
    }
}
