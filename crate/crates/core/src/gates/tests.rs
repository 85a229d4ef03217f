use super::*;
use crate::qmat::{hadamard, hs_inner, pauli_x, pauli_z, vdot, ComplexMatrix, C64};
use crate::qstate::random::*;
use crate::qstate::{partial_trace, pauli_eigenstate, trace_distance, von_neumann_entropy, PauliAxis, Sign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn yp() -> Ket {
    pauli_eigenstate(PauliAxis::Y, Sign::Plus)
}
fn ym() -> Ket {
    pauli_eigenstate(PauliAxis::Y, Sign::Minus)
}
fn xp() -> Ket {
    pauli_eigenstate(PauliAxis::X, Sign::Plus)
}
fn xm() -> Ket {
    pauli_eigenstate(PauliAxis::X, Sign::Minus)
}
fn k0() -> Ket {
    Ket::basis(2, 0)
}
fn k1() -> Ket {
    Ket::basis(2, 1)
}

fn dm(k: &Ket) -> DensityMatrix {
    density_from_ket(k, 2, 2).unwrap()
}

fn bell() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    dm(&Ket::new(vec![
        C64::new(h, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(h, 0.0),
    ])
    .unwrap())
}

/// A unitary with U ψ_i = φ_i for two pairs of kets with equal Gram matrices.
fn unitary_mapping(from: [&Ket; 2], to: [&Ket; 2]) -> ComplexMatrix {
    fn frame(v: [&Ket; 2]) -> ComplexMatrix {
        let d = v[0].dim();
        let mut cols: Vec<Vec<C64>> = vec![v[0].amplitudes().to_vec()];
        let mut candidates: Vec<Vec<C64>> = vec![v[1].amplitudes().to_vec()];
        candidates.extend((0..d).map(|k| Ket::basis(d, k).amplitudes().to_vec()));
        for mut c in candidates {
            for q in &cols {
                let p = vdot(q, &c);
                for (x, y) in c.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
            let n = crate::qmat::norm(&c);
            if n > 1e-8 && cols.len() < d {
                cols.push(c.into_iter().map(|z| z / n).collect());
            }
        }
        ComplexMatrix::from_fn(d, |i, j| cols[j][i])
    }
    let u = &frame(to) * &frame(from).dagger();
    assert!(u.unitary_deviation() < 1e-12);
    u
}

#[test]
fn apply_unitary_cases() {
    let a_in = dm(&k1().tensor(&yp()));
    let a_out = apply_unitary(&a_in, &cnot()).unwrap();
    assert!(a_out.matrix().max_abs_diff(dm(&k1().tensor(&ym())).matrix()) < 1e-12);

    let b_in = dm(&k0().tensor(&yp()));
    assert!(
        apply_unitary(&b_in, &cnot())
            .unwrap()
            .matrix()
            .max_abs_diff(b_in.matrix())
            < 1e-12
    );

    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let rho = random_mixed_state(&mut rng, 2, 2);
    assert!(
        apply_unitary(&rho, &ComplexMatrix::identity(4))
            .unwrap()
            .matrix()
            .max_abs_diff(rho.matrix())
            < 1e-15
    );
    let not_unitary = ComplexMatrix::identity(4).scale_real(1.1);
    assert!(matches!(
        apply_unitary(&rho, &not_unitary),
        Err(Error::NotUnitary { .. })
    ));
}

#[test]
fn channel_validation() {
    assert!(QuantumChannel::new(vec![]).is_err());
    assert!(matches!(
        QuantumChannel::new(vec![ComplexMatrix::identity(2).scale_real(0.5)]),
        Err(Error::NotTracePreserving { .. })
    ));
    assert!(QuantumChannel::unitary(ComplexMatrix::diagonal(&[1.0, 2.0])).is_err());
}

#[test]
fn channel_apply_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let rho = random_mixed_state(&mut rng, 2, 2);
    let u = random_unitary(&mut rng, 4);
    let via_channel = channel_apply(&rho, &QuantumChannel::unitary(u.clone()).unwrap()).unwrap();
    assert!(
        via_channel
            .matrix()
            .max_abs_diff(apply_unitary(&rho, &u).unwrap().matrix())
            < 1e-14
    );

    let dep = channel_apply(&rho, &QuantumChannel::fully_depolarizing(4)).unwrap();
    assert!(dep.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2, 2).matrix()) < 1e-14);

    // {√½𝟙, √½σ_z} ⊗ 𝟙 on Bell: the coherences cancel
    let deph = QuantumChannel::dephasing(0.5).unwrap().local(Side::A, 2);
    let out = channel_apply(&bell(), &deph).unwrap();
    let expected = ComplexMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]);
    assert!(out.matrix().max_abs_diff(&expected) < 1e-15);

    assert!(channel_apply(&rho, &QuantumChannel::identity(2)).is_err());
}

#[test]
fn dual_map_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let u = random_unitary(&mut rng, 4);
    let g = QuantumChannel::unitary(u.clone()).unwrap();
    let rho = random_mixed_state(&mut rng, 2, 2);
    let back = dual_map(&g).apply_state(&apply_unitary(&rho, &u).unwrap()).unwrap();
    assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-12);

    for _ in 0..20 {
        let g = random_channel(&mut rng, 4, 3);
        let image = dual_map(&g).apply_matrix(&ComplexMatrix::identity(4));
        assert!(image.max_abs_diff(&ComplexMatrix::identity(4)) <= 1e-9);
    }

    // dephasing dual on |+⟩⟨+|: ½(|+⟩⟨+| + |−⟩⟨−|) = 𝟙/2
    let plus = DensityMatrix::single(xp().projector()).unwrap();
    let out = dual_map(&QuantumChannel::dephasing(0.5).unwrap())
        .apply_state(&plus)
        .unwrap();
    assert!(out.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
}

#[test]
fn property1_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let inputs: Vec<DensityMatrix> = (0..5).map(|_| random_pure_state(&mut rng, 2, 2)).collect();
    let g = QuantumChannel::unitary(random_unitary(&mut rng, 4)).unwrap();
    assert!(check_property1(&g, &inputs).unwrap());

    let rho00 = dm(&Ket::basis(4, 0));
    assert!(!check_property1(&QuantumChannel::fully_depolarizing(4), &[rho00]).unwrap());

    let mixed = random_mixed_state(&mut rng, 2, 2);
    assert!(matches!(
        check_property1(&g, &[mixed]),
        Err(Error::NotPure { index: 0, .. })
    ));
}

#[test]
fn property1_agrees_with_hs_inner() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..50 {
        let rho = random_pure_state(&mut rng, 2, 2);
        let g = if rng.random_bool(0.5) {
            QuantumChannel::unitary(random_unitary(&mut rng, 4)).unwrap()
        } else {
            random_channel(&mut rng, 4, 2)
        };
        let back = dual_map(&g).apply_matrix(&g.apply_matrix(rho.matrix()));
        let inner = hs_inner(rho.matrix(), &back).unwrap();
        let passes = check_property1(&g, std::slice::from_ref(&rho)).unwrap();
        assert_eq!(passes, (inner.re - 1.0).abs() < 1e-8, "inner {inner}");
    }
}

#[test]
fn unitality_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    assert!(is_unital(
        &QuantumChannel::unitary(random_unitary(&mut rng, 4)).unwrap()
    ));
    assert!(is_unital(&QuantumChannel::dephasing(0.3).unwrap()));
    let damp = QuantumChannel::amplitude_damping(0.5).unwrap();
    assert!(!is_unital(&damp));
    let kk: ComplexMatrix = damp
        .kraus()
        .iter()
        .fold(ComplexMatrix::zeros(2), |acc, k| &acc + &(k * &k.dagger()));
    assert!(kk.max_abs_diff(&ComplexMatrix::diagonal(&[1.5, 0.5])) < 1e-15);
}

#[test]
fn entropy_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    for _ in 0..200 {
        let rho = random_mixed_state(&mut rng, 2, 2);
        let s = von_neumann_entropy(&rho);
        let u = random_unitary(&mut rng, 4);
        assert!((von_neumann_entropy(&apply_unitary(&rho, &u).unwrap()) - s).abs() <= 1e-9);
        let g = random_mixed_unitary_channel(&mut rng, 4, 3);
        assert!(is_unital(&g));
        assert!(von_neumann_entropy(&channel_apply(&rho, &g).unwrap()) >= s - 1e-9);
    }
}

#[test]
fn channels_contract_trace_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for _ in 0..200 {
        let n = rng.random_range(1..=4);
        let g = random_channel(&mut rng, 4, n);
        let rho = random_mixed_state(&mut rng, 2, 2);
        let sigma = random_pure_state(&mut rng, 2, 2);
        let before = trace_distance(&rho, &sigma).unwrap();
        let after = trace_distance(&channel_apply(&rho, &g).unwrap(), &channel_apply(&sigma, &g).unwrap()).unwrap();
        assert!(after <= before + 1e-9);
    }
}

#[test]
fn composition_matches_sequential_application() {
    let mut rng = ChaCha8Rng::seed_from_u64(48);
    let g = random_channel(&mut rng, 2, 2);
    let h = QuantumChannel::unitary(hadamard()).unwrap();
    let rho = random_mixed_state(&mut rng, 2, 1);
    let seq = channel_apply(&channel_apply(&rho, &g).unwrap(), &h).unwrap();
    let composed = channel_apply(&rho, &g.then(&h).unwrap()).unwrap();
    assert!(seq.matrix().max_abs_diff(composed.matrix()) < 1e-14);
}

#[test]
fn overlap_factorization_table_one_pairs() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let f = overlap_factorization((&k1(), &yp()), (&yp(), &xm()), &cnot()).unwrap();
    assert!((f.input_a - h).abs() < 1e-12 && (f.input_b - h).abs() < 1e-12);
    assert!((f.output_a.unwrap() - h).abs() < 1e-12 && (f.output_b.unwrap() - h).abs() < 1e-12);
    assert_eq!(f.classification, OverlapClass::Constant);
    assert!(f.product_equality);

    let f = overlap_factorization((&k1(), &yp()), (&k1(), &yp()), &cnot()).unwrap();
    assert!((f.lhs - 1.0).abs() < 1e-12 && (f.rhs - 1.0).abs() < 1e-12);
    assert_eq!(f.classification, OverlapClass::Constant);

    let f = overlap_factorization((&k1(), &yp()), (&k0(), &yp()), &cnot()).unwrap();
    assert!(f.input_a < 1e-15 && (f.input_b - 1.0).abs() < 1e-12);
    assert!(f.lhs < 1e-15 && f.rhs < 1e-15 && f.product_equality);
}

#[test]
fn overlap_factorization_detects_entangling_output() {
    let f = overlap_factorization((&xp(), &k0()), (&k0(), &k0()), &cnot()).unwrap();
    assert_eq!(f.classification, OverlapClass::NonProductOutput);
    assert!(f.product_equality);
}

#[test]
fn product_equality_holds_for_random_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(49);
    for _ in 0..100 {
        let (a1, b1, a2, b2) = (
            random_pure_ket(&mut rng, 2),
            random_pure_ket(&mut rng, 2),
            random_pure_ket(&mut rng, 2),
            random_pure_ket(&mut rng, 2),
        );
        let (ua, ub) = (random_unitary(&mut rng, 2), random_unitary(&mut rng, 2));
        let local = crate::qmat::tensor_product(&ua, &ub);
        let f = overlap_factorization((&a1, &b1), (&a2, &b2), &local).unwrap();
        assert!(f.product_equality);
        assert_eq!(f.classification, OverlapClass::Constant);
        let f = overlap_factorization((&a1, &b1), (&a2, &b2), &random_unitary(&mut rng, 4)).unwrap();
        assert!(f.product_equality);
    }
}

fn three_inputs(third: DensityMatrix) -> GateCase {
    GateCase::new(
        cnot(),
        vec![dm(&Ket::basis(4, 0)), DensityMatrix::maximally_mixed(2, 2), third],
        vec!["00".into(), "mixed".into(), "third".into()],
    )
    .unwrap()
}

#[test]
fn lemma1_cases() {
    let cc = DensityMatrix::new(ComplexMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]), 2, 2).unwrap();
    let v = lemma1_verdict(&three_inputs(cc)).unwrap();
    assert!(v.applicable && !v.locc_ruled_out);

    // ½|00⟩⟨00| + ½|++⟩⟨++| is discordant on both sides
    let pp = DensityMatrix::mixture(&[(0.5, &dm(&Ket::basis(4, 0))), (0.5, &dm(&xp().tensor(&xp())))]).unwrap();
    let v = lemma1_verdict(&three_inputs(pp)).unwrap();
    assert!(v.applicable && v.locc_ruled_out);
    match &v.witness {
        Witness::Lemma1 {
            offending_input,
            inputs,
            ..
        } => {
            assert_eq!(*offending_input, Some(2));
            assert!((inputs[0].discord_sym - 0.3904739489265785).abs() < 1e-6);
        }
        _ => panic!("wrong witness"),
    }

    // ½|0⟩⟨0|⊗|0⟩⟨0| + ½|+⟩⟨+|⊗|1⟩⟨1| is classical on B, so D2 = 0
    let qc = DensityMatrix::mixture(&[(0.5, &dm(&Ket::basis(4, 0))), (0.5, &dm(&xp().tensor(&k1())))]).unwrap();
    let v = lemma1_verdict(&three_inputs(qc)).unwrap();
    assert!(v.applicable && !v.locc_ruled_out);
    match &v.witness {
        Witness::Lemma1 { inputs, .. } => {
            assert!(!inputs[0].zero_a && inputs[0].zero_b);
            assert!((inputs[0].discord_a - 0.5).abs() < 1e-6);
        }
        _ => panic!("wrong witness"),
    }

    let case = GateCase::new(
        cnot(),
        vec![
            dm(&Ket::basis(4, 0)),
            DensityMatrix::mixture(&[(0.5, &dm(&Ket::basis(4, 0))), (0.5, &dm(&xp().tensor(&xp())))]).unwrap(),
        ],
        vec!["00".into(), "pp".into()],
    )
    .unwrap();
    let v = lemma1_verdict(&case).unwrap();
    assert!(!v.applicable && !v.locc_ruled_out);
}

#[test]
fn lemma1_accepts_any_pure_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let prod = dm(&random_product_ket(&mut rng, 2, 2));
    let case = GateCase::new(
        cnot(),
        vec![DensityMatrix::maximally_mixed(2, 2), prod],
        vec!["mixed".into(), "prod".into()],
    )
    .unwrap();
    assert!(lemma1_verdict(&case).unwrap().applicable);
}

#[test]
fn gate_case_rejects_entangled_inputs() {
    let err = GateCase::new(cnot(), vec![bell()], vec!["bell".into()]).unwrap_err();
    assert!(matches!(err, Error::InvalidState(_)));
}

#[test]
fn lemma2_identical_inputs() {
    let psi = k1().tensor(&yp());
    let v = lemma2_verdict(&psi, &psi, (2, 2), &cnot(), &default_weights()).unwrap();
    assert!(v.applicable && !v.locc_ruled_out);
    if let Witness::Lemma2 { rows, .. } = &v.witness {
        assert_eq!(rows.len(), 9);
        assert!(rows.iter().all(|r| r.discord_in < 1e-6 && r.discord_out < 1e-6));
    }
}

#[test]
fn lemma2_bilocal_gate_preserves_discord() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..3 {
        let (psi1, psi2) = (random_product_ket(&mut rng, 2, 2), random_product_ket(&mut rng, 2, 2));
        let u = crate::qmat::tensor_product(&random_unitary(&mut rng, 2), &random_unitary(&mut rng, 2));
        let v = lemma2_verdict(&psi1, &psi2, (2, 2), &u, &default_weights()).unwrap();
        assert!(!v.locc_ruled_out);
        if let Witness::Lemma2 { rows, .. } = &v.witness {
            assert!(rows.iter().all(|r| r.difference <= 2e-6));
        }
    }
}

#[test]
fn lemma2_traded_overlaps_change_discord() {
    // overlaps (0.9, 0.5) → (0.6, 0.75): same product, traded between sides
    let ket = |c: f64| Ket::new(vec![C64::new(c, 0.0), C64::new((1.0 - c * c).sqrt(), 0.0)]).unwrap();
    let psi1 = k0().tensor(&k0());
    let psi2 = ket(0.9).tensor(&ket(0.5));
    let out1 = psi1.clone();
    let out2 = ket(0.6).tensor(&ket(0.75));
    let u = unitary_mapping([&psi1, &psi2], [&out1, &out2]);
    let v = lemma2_verdict(&psi1, &psi2, (2, 2), &u, &default_weights()).unwrap();
    assert!(v.locc_ruled_out);
    match &v.witness {
        Witness::Lemma2 {
            first_witness,
            overlaps,
            rows,
        } => {
            assert_eq!(overlaps.classification, OverlapClass::Traded);
            let w = first_witness.as_ref().unwrap();
            assert!(rows.iter().filter(|r| r.exceeds).all(|r| r.weight >= w.weight));
        }
        _ => panic!("wrong witness"),
    }
}

#[test]
fn lemma2_rejects_bad_inputs() {
    let a = k1().tensor(&yp());
    let b = k0().tensor(&yp());
    assert!(matches!(
        lemma2_verdict(&a, &b, (2, 2), &cnot(), &default_weights()),
        Err(Error::OrthogonalInputs { .. })
    ));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell_ket = Ket::new(vec![
        C64::new(h, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(h, 0.0),
    ])
    .unwrap();
    assert!(matches!(
        lemma2_verdict(&a, &bell_ket, (2, 2), &cnot(), &default_weights()),
        Err(Error::NotProduct { index: 1, .. })
    ));
    let c = yp().tensor(&xm());
    assert!(lemma2_verdict(&a, &c, (2, 2), &cnot(), &[0.0, 0.5]).is_err());
}

#[test]
fn lemma2_swap_symmetry() {
    let a = k1().tensor(&yp());
    let c = yp().tensor(&xm());
    let ws = [0.2, 0.7];
    let fwd = lemma2_verdict(&a, &c, (2, 2), &cnot(), &ws).unwrap();
    let rev: Vec<f64> = ws.iter().map(|w| 1.0 - w).collect();
    let bwd = lemma2_verdict(&c, &a, (2, 2), &cnot(), &rev).unwrap();
    assert_eq!(fwd.locc_ruled_out, bwd.locc_ruled_out);
    if let (Witness::Lemma2 { rows: r1, .. }, Witness::Lemma2 { rows: r2, .. }) = (&fwd.witness, &bwd.witness) {
        for (x, y) in r1.iter().zip(r2) {
            assert!((x.discord_in - y.discord_in).abs() < 1e-6);
            assert!((x.discord_out - y.discord_out).abs() < 1e-6);
        }
    }
}

#[test]
fn local_channel_embedding() {
    let g = QuantumChannel::unitary(pauli_x()).unwrap().local(Side::B, 2);
    let rho = dm(&k0().tensor(&k0()));
    let out = channel_apply(&rho, &g).unwrap();
    assert!(
        partial_trace(&out, Side::B)
            .matrix()
            .max_abs_diff(&ComplexMatrix::diagonal(&[0.0, 1.0]))
            < 1e-15
    );
    let g = QuantumChannel::unitary(pauli_z()).unwrap().local(Side::A, 3);
    assert_eq!(g.dim(), 6);
}
