use num_complex::Complex64;
use poqlab::extractor::{
    check_knowledge_bound, extract, extract_coherent, extract_sampled, extract_state, ideal_swap, operator_distance,
    rigidity_deviation, swap_gadget, Circuit, ExtractConfig, Gate, OracleAccess, OracleCall, StepOrder, AUX, OUT,
};
use poqlab::games::{exact_loss, hamiltonian_game, BobQuestion, Strategy};
use poqlab::hamiltonian::XZHamiltonian;
use poqlab::params::derive;
use poqlab::qcore::{
    fidelity, trace_distance, DensityMatrix, Layout, Letter, MixedState, PauliWord, Phase, Projector, Pvm, StateVector,
};
use poqlab::strategies::{depolarized, honest_ham, honest_lwpbt, Witness};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn witness_layout(n: usize) -> Layout {
    Layout::new(&[("W", n)]).unwrap()
}

/// `n` EPR pairs with honest single-site observables (works for `n = 1`).
fn honest_pairs(n: usize) -> Strategy {
    let state = StateVector::epr_pairs("A", "B", n).unwrap();
    let mut s =
        Strategy::new(MixedState::pure(state), vec!["A".into()], vec!["B".into()]).unwrap().with_epr("A", "B").unwrap();
    for k in 0..n {
        for l in [Letter::X, Letter::Z] {
            let w = PauliWord::single(n, k, l);
            s.set_bob(BobQuestion::Pauli(w.clone()), Pvm::observable(vec!["B".into()], &w).unwrap()).unwrap();
        }
    }
    s
}

/// Columns of the gadget and of the reference swap on every basis input of
/// the provers' registers, with `|Φ+⟩` on the extractor register.
fn gadget_vs_ideal(s: &Strategy) -> f64 {
    let oracle = OracleAccess::new(s);
    let n = oracle.n().unwrap();
    let layout = s.state().layout().clone();
    let epr = StateVector::epr_pairs(OUT, AUX, n).unwrap();
    let full = layout.concat(epr.layout()).unwrap();
    let u = swap_gadget(&oracle, &full, OUT, AUX).unwrap();
    let v = ideal_swap(&full, "B", OUT).unwrap();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for j in 0..1usize << layout.num_qubits() {
        let input = StateVector::basis(layout.clone(), j).unwrap().tensor(&epr).unwrap();
        a.push(u.run_with(&input, &oracle).unwrap());
        b.push(v.run(&input).unwrap());
    }
    operator_distance(&a, &b).unwrap()
}

#[test]
fn gadget_matches_ideal_swap_for_honest_bob() {
    assert!(gadget_vs_ideal(&honest_pairs(1)) <= 1e-9);
    for n in 2..=3 {
        assert!(gadget_vs_ideal(&honest_lwpbt(n).unwrap()) <= 1e-9);
    }
}

#[test]
fn gadget_with_identity_z_observable_is_not_a_swap() {
    let mut s = honest_pairs(2);
    for k in 0..2 {
        let w = PauliWord::single(2, k, Letter::Z);
        let trivial = Pvm::new(
            vec!["B".into()],
            2,
            vec![(0, Projector::Stabilizer(vec![])), (1, Projector::Dense(nalgebra::DMatrix::zeros(4, 4)))],
        );
        s.set_bob(BobQuestion::Pauli(w), trivial).unwrap();
    }
    let d = gadget_vs_ideal(&s);
    assert!(d > 0.5, "distance {d}");
}

#[test]
fn gadget_matches_closed_form() {
    // U|ψ⟩|Φ+⟩ = 2^{-3n/2} Σ_{a,b,c} (−1)^{b·c} X^a Z^b |ψ⟩ |c, a+c⟩
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..=2 {
        let bob = StateVector::random(Layout::new(&[("B", n)]).unwrap(), &mut rng).unwrap();
        let epr = StateVector::epr_pairs(OUT, AUX, n).unwrap();
        let input = bob.tensor(&epr).unwrap();
        let layout = input.layout().clone();
        let mut c = Circuit::new();
        let e1 = layout.qubits(&[OUT]).unwrap();
        let e2 = layout.qubits(&[AUX]).unwrap();
        e1.iter().for_each(|q| c.push(Gate::Hadamard(*q)));
        for (j, q) in e1.iter().enumerate() {
            c.push(Gate::ControlledPauli {
                control: *q,
                word: PauliWord::single(n, j, Letter::Z),
                targets: layout.qubits(&["B"]).unwrap(),
            });
        }
        e1.iter().for_each(|q| c.push(Gate::Hadamard(*q)));
        for (i, q) in e1.iter().enumerate() {
            c.push(Gate::ControlledPauli {
                control: *q,
                word: PauliWord::single(n, i, Letter::X),
                targets: layout.qubits(&["B"]).unwrap(),
            });
        }
        for i in 0..n {
            c.push(Gate::Cnot { control: e2[i], target: e1[i] });
        }
        let got = c.run(&input).unwrap();

        let dim = 1usize << n;
        let mut amps = vec![Complex64::new(0.0, 0.0); got.dim()];
        let norm = (1u64 << (3 * n)) as f64;
        for a in 0..dim {
            for b in 0..dim {
                for cc in 0..dim {
                    let sign = if (b & cc).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                    let x = PauliWord::from_masks(n, a as u64, 0, Phase::PlusOne);
                    let z = PauliWord::from_masks(n, 0, b as u64, Phase::PlusOne);
                    let sites: Vec<usize> = (0..n).collect();
                    let v = bob.apply_pauli(&z, &sites).unwrap().apply_pauli(&x, &sites).unwrap();
                    for (bi, amp) in v.amplitudes().iter().enumerate() {
                        let idx = (bi << (2 * n)) | (cc << n) | (a ^ cc);
                        amps[idx] += amp * sign / norm.sqrt();
                    }
                }
            }
        }
        let expected = StateVector::from_raw(layout, amps).unwrap();
        assert!(got.distance(&expected).unwrap() < 1e-10);
    }
}

#[test]
fn ideal_swap_moves_the_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let epr = StateVector::epr_pairs(OUT, AUX, 1).unwrap();
    for trial in 0..50 {
        let psi = if trial == 0 {
            StateVector::zero(Layout::new(&[("B", 1)]).unwrap()).unwrap()
        } else {
            StateVector::random(Layout::new(&[("B", 1)]).unwrap(), &mut rng).unwrap()
        };
        let input = psi.tensor(&epr).unwrap();
        let out = ideal_swap(input.layout(), "B", OUT).unwrap().run(&input).unwrap();
        let rho = out.reduced_density(&[OUT]).unwrap();
        let target = psi.renamed("B", OUT).unwrap().to_density();
        assert!(fidelity(&rho, &target).unwrap() >= 1.0 - 1e-10);
    }
}

#[test]
fn single_ancilla_swap_identity() {
    // CX·H·CZ·H·CX equals H·CZ·H·CX when the auxiliary qubit starts in |0⟩
    let layout = Layout::new(&[("T", 1), ("X", 1)]).unwrap();
    let long = ideal_swap(&layout, "T", "X").unwrap();
    let mut short = Circuit::new();
    let x = PauliWord::from_letters(&[Letter::X]);
    let z = PauliWord::from_letters(&[Letter::Z]);
    short.push(Gate::Hadamard(1));
    short.push(Gate::ControlledPauli { control: 1, word: z, targets: vec![0] });
    short.push(Gate::Hadamard(1));
    short.push(Gate::ControlledPauli { control: 1, word: x, targets: vec![0] });
    let inputs: Vec<StateVector> = (0..2).map(|t| StateVector::basis(layout.clone(), t << 1).unwrap()).collect();
    let a: Vec<_> = inputs.iter().map(|s| long.run(s).unwrap()).collect();
    let b: Vec<_> = inputs.iter().map(|s| short.run(s).unwrap()).collect();
    assert!(operator_distance(&a, &b).unwrap() < 1e-12);
    // and the target ends up on the auxiliary wire
    for (t, out) in a.iter().enumerate() {
        assert!((out.amplitudes()[t].norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn gadget_transfers_entanglement() {
    let s = honest_pairs(1);
    let oracle = OracleAccess::new(&s);
    let prepared = oracle.prepare(&StateVector::epr_pairs(OUT, AUX, 1).unwrap()).unwrap();
    let u = swap_gadget(&oracle, prepared.layout(), OUT, AUX).unwrap();
    let out = u.run_with(&prepared.branches()[0].1, &oracle).unwrap();
    let ae = out.reduced_density(&["A", OUT]).unwrap();
    let bell = StateVector::epr_pairs("A", OUT, 1).unwrap().to_density();
    assert!(fidelity(&ae, &bell).unwrap() > 1.0 - 1e-10);
}

fn zz() -> XZHamiltonian {
    XZHamiltonian::from_strs(2, 2, &[(1.0, "ZZ")]).unwrap()
}

#[test]
fn honest_extraction_recovers_ground_state() {
    let h = zz();
    let (l0, g) = h.ground().unwrap();
    let s = honest_ham(&h, &Witness::Pure(g.clone())).unwrap();
    let oracle = OracleAccess::new(&s);
    let report = extract(&oracle, &h, &ExtractConfig::new(0.5)).unwrap();
    assert!(report.fidelity_ground.unwrap() >= 1.0 - 1e-9);
    assert!((report.energy - l0).abs() < 1e-9);
    assert!((report.total_weight() - 1.0).abs() < 1e-9);
    report.zeta.validate().unwrap();
    assert_eq!(report.q_ab.len(), 16);
    for w in report.q_ab.values() {
        assert!((w - 1.0 / 16.0).abs() < 1e-12);
    }
    // access discipline
    for call in oracle.log() {
        match call {
            OracleCall::Prepare { .. } | OracleCall::Teleport { coherent: false } => {}
            OracleCall::ControlledObservable { query, .. } => assert!(query.starts_with("bob:pauli:")),
            other => panic!("unexpected oracle call {other:?}"),
        }
    }
}

#[test]
fn plus_witness_has_zero_z_energy() {
    let h = XZHamiltonian::from_strs(2, 2, &[(0.7, "ZI"), (-0.4, "ZZ")]).unwrap();
    let plus = StateVector::plus("W", 2).unwrap();
    let s = honest_ham(&h, &Witness::Pure(plus)).unwrap();
    let report = extract(&OracleAccess::new(&s), &h, &ExtractConfig::new(0.5)).unwrap();
    assert!(report.energy.abs() < 1e-9);
}

#[test]
fn fully_depolarized_extraction_is_maximally_mixed() {
    let h = zz();
    let s = depolarized(&honest_ham(&h, &Witness::Pure(h.ground().unwrap().1)).unwrap(), 1.0).unwrap();
    let ex = extract_state(&OracleAccess::new(&s), StepOrder::SwapThenTeleport).unwrap();
    let mixed = DensityMatrix::maximally_mixed(ex.zeta.layout().clone()).unwrap();
    assert!(trace_distance(&ex.zeta, &mixed).unwrap() < 1e-8);
}

#[test]
fn random_witnesses_are_recovered() {
    let h = XZHamiltonian::from_strs(2, 2, &[(0.5, "XI"), (-1.0, "ZZ")]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let w = StateVector::random(witness_layout(2), &mut rng).unwrap();
        let s = honest_ham(&h, &Witness::Pure(w.clone())).unwrap();
        let ex = extract_state(&OracleAccess::new(&s), StepOrder::SwapThenTeleport).unwrap();
        assert!(fidelity(&ex.zeta, &w.to_density()).unwrap() >= 1.0 - 1e-9);
    }
}

#[test]
fn three_computations_of_zeta_agree() {
    let h = XZHamiltonian::from_strs(2, 2, &[(0.5, "XI"), (-1.0, "ZZ")]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let w = StateVector::random(witness_layout(2), &mut rng).unwrap();
    let s = depolarized(&honest_ham(&h, &Witness::Pure(w)).unwrap(), 0.1).unwrap();
    let oracle = OracleAccess::new(&s);
    let a = extract_state(&oracle, StepOrder::SwapThenTeleport).unwrap().zeta;
    let b = extract_state(&oracle, StepOrder::TeleportThenSwap).unwrap().zeta;
    let c = extract_coherent(&oracle).unwrap();
    assert!(trace_distance(&a, &b).unwrap() < 1e-10);
    assert!(trace_distance(&a, &c).unwrap() < 1e-9);
    assert!(oracle.log().contains(&OracleCall::Teleport { coherent: true }));
}

#[test]
fn sampled_extraction_approaches_exact() {
    let h = zz();
    let s = honest_ham(&h, &Witness::Pure(h.ground().unwrap().1)).unwrap();
    let oracle = OracleAccess::new(&s);
    let sampled = extract_sampled(&oracle, 3, 64).unwrap();
    let exact = extract_state(&oracle, StepOrder::SwapThenTeleport).unwrap().zeta;
    // the honest output is the witness on every branch
    assert!(trace_distance(&sampled, &exact).unwrap() < 1e-9);
}

#[test]
fn message_injection_is_logged_but_public() {
    let s = honest_lwpbt(2).unwrap();
    let oracle = OracleAccess::new(&s);
    let msg = StateVector::plus("M", 1).unwrap();
    let out = oracle.inject_message(&s.state().branches()[0].1, &msg).unwrap();
    assert_eq!(out.num_qubits(), 5);
    assert_eq!(oracle.log(), vec![OracleCall::InjectMessage { register: "M".into(), qubits: 1 }]);
    // a control on a prover qubit is refused
    let q = BobQuestion::Pauli(PauliWord::single(2, 0, Letter::Z));
    assert!(oracle.controlled_observable(&out, &poqlab::extractor::Query::Bob(q), 0).is_err());
}

#[test]
fn slack_identity_for_honest_ground_witness() {
    // H = (I + 0.5 ZZ)/2 has λ0 = 0.25 ≥ 0, so α = λ0
    let h = XZHamiltonian::from_strs(2, 2, &[(1.0, "II"), (0.5, "ZZ")]).unwrap();
    let (l0, g) = h.ground().unwrap();
    let s = honest_ham(&h, &Witness::Pure(g)).unwrap();
    let params = derive(2, h.gamma(), l0, 2.0).unwrap();
    for p in [poqlab::params::to_f64(&params.p_star), 0.5] {
        let report = extract(&OracleAccess::new(&s), &h, &ExtractConfig::new(p)).unwrap();
        assert!((report.alpha - l0).abs() < 1e-12);
        assert!((report.epsilon - p * (h.gamma() + l0) / 2.0).abs() < 1e-9 * p.max(1e-9));
        assert!((report.slack - (h.gamma() + l0)).abs() < 1e-8, "{}", report.slack);
        let check = check_knowledge_bound(&report, &params);
        assert!((check.slack - report.slack).abs() < 1e-12);
    }
}

#[test]
fn honest_rigidity_deviation_vanishes() {
    for n in 2..=3 {
        let r = rigidity_deviation(&honest_lwpbt(n).unwrap(), n).unwrap();
        assert!(r.max_deviation <= 1e-9);
        assert_eq!(r.deviations.len(), 3usize.pow(n as u32));
        assert!(r.constant_estimate.is_none());
    }
}

#[test]
fn depolarized_rigidity_is_finite() {
    let base = honest_lwpbt(2).unwrap();
    let r = rigidity_deviation(&depolarized(&base, 0.05).unwrap(), 2).unwrap();
    assert!(r.epsilon > 0.0);
    assert!(r.constant_estimate.unwrap().is_finite());
    let eps = exact_loss(
        &hamiltonian_game(&zz(), 0.5).unwrap(),
        &depolarized(&honest_ham(&zz(), &Witness::Pure(zz().ground().unwrap().1)).unwrap(), 0.05).unwrap(),
    )
    .unwrap();
    assert!(eps > 0.0);
}
