mod common;

use proptest::prelude::*;
use rabi_core::density::DensityMatrix;
use rabi_core::linalg::{kron, max_abs_diff, CMatrix};
use rabi_core::observables::{
    min_quadrature_variance, negativity_witness, quantum_fisher_information, QfiGenerator,
};
use rabi_core::operators::{build_hamiltonian, parity_operator, partial_trace, tensor_product, Bipartition};
use rabi_core::spectrum::{critical_coupling, rabi_eigensystem, DressedOperators};
use rabi_core::{Basis, Complex64, FockCutoff, ModelParams, OperatorMatrix, Subsystem};

fn matrix(d: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d)
        .prop_map(move |v| CMatrix::from_iterator(d, d, v.into_iter().map(|(a, b)| Complex64::new(a, b))))
}

fn density(d: usize) -> impl Strategy<Value = CMatrix> {
    matrix(d).prop_map(move |g| {
        let m = &g * g.adjoint() + CMatrix::identity(d, d) * Complex64::new(1e-3, 0.0);
        let tr = m.trace();
        m / tr
    })
}

fn model() -> impl Strategy<Value = ModelParams> {
    (0.05f64..2.0, 0.05f64..5.0, 0.0f64..1.5).prop_map(|(wc, wq, g)| ModelParams::new(wc, wq, g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_is_hermitian_and_conserves_parity(p in model(), n in 1usize..12) {
        let cutoff = FockCutoff::new(n).unwrap();
        let h = build_hamiltonian(&p, cutoff);
        prop_assert!(h.hermiticity_error() < 1e-12);
        let comm = h.commutator(&parity_operator(cutoff)).unwrap();
        prop_assert!(comm.max_abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_recovers_factors(a in density(2), b in density(3)) {
        let parts = Bipartition { qubit: 2, cavity: 3 };
        let rho = DensityMatrix::new(kron(&a, &b), Basis::Bare, Some(parts)).unwrap();
        let rc = partial_trace(&rho, Subsystem::Cavity).unwrap();
        let rq = partial_trace(&rho, Subsystem::Qubit).unwrap();
        prop_assert!(max_abs_diff(rc.matrix(), &b) < 1e-12);
        prop_assert!(max_abs_diff(rq.matrix(), &a) < 1e-12);
        prop_assert!((rc.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_is_an_involution(r in density(6)) {
        let parts = Bipartition { qubit: 2, cavity: 3 };
        let rho = DensityMatrix::new(r.clone(), Basis::Bare, Some(parts)).unwrap();
        let once = rho.partial_transpose(Subsystem::Qubit).unwrap();
        let back = DensityMatrix::new(once.matrix().clone(), Basis::Bare, Some(parts));
        // The transpose need not be positive, so rebuild it by hand.
        let twice = match back {
            Ok(s) => s.partial_transpose(Subsystem::Qubit).unwrap().into_matrix(),
            Err(_) => common::partial_transpose_first(once.matrix(), 2, 3),
        };
        prop_assert!(max_abs_diff(&twice, &r) < 1e-14);
    }

    #[test]
    fn tensor_product_mixed_product_rule(a in matrix(2), b in matrix(3), c in matrix(2), d in matrix(3)) {
        let op = |m: &CMatrix| OperatorMatrix::new(m.clone(), Basis::Bare).unwrap();
        let lhs = tensor_product(&op(&a), &op(&b)).unwrap().matmul(&tensor_product(&op(&c), &op(&d)).unwrap()).unwrap();
        let rhs = tensor_product(&op(&(&a * &c)), &op(&(&b * &d))).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn product_states_have_no_negativity(a in density(2), b in density(3)) {
        let parts = Bipartition { qubit: 2, cavity: 3 };
        let rho = DensityMatrix::new(kron(&a, &b), Basis::Bare, Some(parts)).unwrap();
        prop_assert!(negativity_witness(&rho).unwrap() < 1e-12);
    }

    #[test]
    fn qfi_is_convex(a in density(4), b in density(4), w in 0.0f64..1.0) {
        let cutoff = FockCutoff::new(3).unwrap();
        let gen = QfiGenerator::quadrature_x(cutoff);
        let ra = DensityMatrix::new(a, Basis::Bare, None).unwrap();
        let rb = DensityMatrix::new(b, Basis::Bare, None).unwrap();
        let mixed = ra.mix(&rb, w).unwrap();
        let fa = quantum_fisher_information(&ra, &gen).unwrap();
        let fb = quantum_fisher_information(&rb, &gen).unwrap();
        let fm = quantum_fisher_information(&mixed, &gen).unwrap();
        prop_assert!(fm <= (1.0 - w) * fa + w * fb + 1e-9);
    }

    #[test]
    fn quadrature_minimum_is_a_lower_bound(r in density(8), theta in 0.0f64..6.3) {
        let cutoff = FockCutoff::new(3).unwrap();
        let es = rabi_eigensystem(&ModelParams::new(1.0, 0.7, 0.3).unwrap(), cutoff);
        let d = DressedOperators::new(&es, cutoff).unwrap();
        let rho = DensityMatrix::new(r, Basis::Dressed, Some(cutoff.parts())).unwrap();
        let q = min_quadrature_variance(&rho, &d).unwrap();
        prop_assert!(q.v_min <= q.at(theta) + 1e-12);
        prop_assert!((q.at(theta + std::f64::consts::PI) - q.at(theta)).abs() < 1e-12);
        prop_assert!((0.0..std::f64::consts::PI).contains(&q.theta_min));
    }

    #[test]
    fn critical_coupling_scales_linearly(wc in 0.01f64..10.0, wq in 0.01f64..10.0, s in 0.1f64..10.0) {
        let base = critical_coupling(wc, wq).unwrap();
        let scaled = critical_coupling(s * wc, s * wq).unwrap();
        prop_assert!((scaled - s * base).abs() < 1e-12 * (1.0 + scaled));
        prop_assert!((critical_coupling(wc, 1.0 / wc).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn spectrum_scales_with_all_frequencies(p in model(), s in 0.2f64..5.0) {
        let cutoff = FockCutoff::new(8).unwrap();
        let scaled = ModelParams::new(s * p.omega_c, s * p.omega_q, s * p.g).unwrap();
        let e1 = rabi_eigensystem(&p, cutoff);
        let e2 = rabi_eigensystem(&scaled, cutoff);
        for (a, b) in e1.energies().iter().zip(e2.energies()) {
            prop_assert!((s * a - b).abs() < 1e-10 * (1.0 + b.abs()));
        }
    }
}
