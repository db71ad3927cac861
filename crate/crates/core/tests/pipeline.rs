use std::collections::HashMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symdet::char2::square_matrix_char2;
use symdet::circuit::{examples, parse_expression, random_circuit, Circuit, CircuitClass, RandomSpec};
use symdet::formula::{sym_matrix, valiant_matrix, SizeMode};
use symdet::graph::SymbolicMatrix;
use symdet::minimize::{is_minimized, minimize};
use symdet::poly::{poly_to_formula, symbolic_det, DensePolynomial};
use symdet::verify::{identity_test, identity_test_squared, replay, Status};
use symdet::ws::{ws_nonsym_matrix, ws_sym_matrix, WsMode};
use symdet::{FieldElement, FieldSpec};

fn q() -> FieldSpec {
    FieldSpec::Rational
}

fn circuit(class: CircuitClass, seed: u64, max_gates: usize) -> Circuit {
    let spec = RandomSpec { class, max_gates, num_vars: 4, weighted: true, constants: true };
    random_circuit(&spec, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[test]
fn worked_example_through_every_construction() {
    let target = DensePolynomial::parse("x^2 + 2 x y + y^2 + 2 y z", &q()).unwrap();
    let f = examples::formula();
    let ws = examples::weakly_skew();
    let g = examples::general();
    for c in [&f, &ws, &g] {
        assert_eq!(c.expand_single(&q()).unwrap(), target);
    }
    let matrices = [
        valiant_matrix(&f).unwrap(),
        sym_matrix(&f, SizeMode::Skinny).unwrap(),
        sym_matrix(&f, SizeMode::Green).unwrap(),
        ws_sym_matrix(&ws, WsMode::Fat).unwrap(),
        ws_sym_matrix(&ws, WsMode::Green).unwrap(),
        ws_nonsym_matrix(&ws, WsMode::Fat).unwrap(),
        ws_nonsym_matrix(&f, WsMode::Green).unwrap(),
    ];
    for m in &matrices {
        assert_eq!(symbolic_det(m, &q()).unwrap(), target);
    }
    // the general circuit shares x+y between two products
    assert!(ws_sym_matrix(&g, WsMode::Fat).is_err());
}

#[test]
fn matrix_text_survives_a_round_trip() {
    let m = sym_matrix(&parse_expression("(x+y)*z - 3*y").unwrap(), SizeMode::Green).unwrap();
    let back = SymbolicMatrix::parse(&m.render(), &q()).unwrap();
    assert_eq!(back, m);
}

#[test]
fn witnesses_replay_after_a_failed_test() {
    let c = parse_expression("x*y + z").unwrap();
    let mut m = ws_sym_matrix(&c, WsMode::Fat).unwrap();
    let (i, j) = (0..m.dim())
        .flat_map(|i| (0..m.dim()).map(move |j| (i, j)))
        .find(|(i, j)| m.get(*i, *j).as_const().is_some_and(|k| !k.is_zero()))
        .unwrap();
    m.entries[i][j] = m.get(i, j).scaled(&FieldElement::integer(2)).unwrap();
    let spec = FieldSpec::default_prime();
    let v = identity_test(&c, &m, 20, &spec, 42).unwrap();
    let Status::Failed(w) = &v.status else { panic!("mutation not caught: {v:?}") };
    assert!(replay(&c, &m, false, w, &spec).unwrap());
}

#[test]
fn dense_polynomial_to_symmetric_matrix() {
    let p = DensePolynomial::parse("3 x^2 y + x z - 2 y + 1", &q()).unwrap();
    let f = poly_to_formula(&p).unwrap();
    let m = sym_matrix(&f, SizeMode::Green).unwrap();
    let v = identity_test(&f, &m, 20, &FieldSpec::default_prime(), 3).unwrap();
    assert!(v.verified());
    let point: HashMap<String, FieldElement> =
        [("x", 2), ("y", -1), ("z", 5)].iter().map(|(k, v)| (k.to_string(), FieldElement::integer(*v))).collect();
    assert_eq!(f.evaluate_single(&point, &q()).unwrap(), p.eval(&point).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_parse_round_trip(seed in any::<u64>(), ws in any::<bool>()) {
        let class = if ws { CircuitClass::WeaklySkew } else { CircuitClass::Formula };
        let c = circuit(class, seed, 8);
        let back = Circuit::parse(&c.render()).unwrap();
        prop_assert_eq!(back.expand_single(&q()).unwrap(), c.expand_single(&q()).unwrap());
    }

    #[test]
    fn minimize_is_idempotent_and_preserves_value(seed in any::<u64>()) {
        let c = circuit(CircuitClass::WeaklySkew, seed, 8);
        prop_assume!(minimize(&c).is_ok());
        let m = minimize(&c).unwrap();
        prop_assert!(is_minimized(&m));
        prop_assert!(m.skinny_size() <= c.skinny_size());
        prop_assert_eq!(m.expand_single(&q()).unwrap(), c.expand_single(&q()).unwrap());
        prop_assert_eq!(minimize(&m).unwrap(), m);
    }

    #[test]
    fn weakly_skew_constructions_verify(seed in any::<u64>()) {
        let c = circuit(CircuitClass::WeaklySkew, seed, 10);
        let spec = FieldSpec::default_prime();
        for mode in [WsMode::Fat, WsMode::Green] {
            if mode == WsMode::Green && minimize(&c).is_err() {
                continue;
            }
            prop_assert!(identity_test(&c, &ws_sym_matrix(&c, mode).unwrap(), 20, &spec, seed).unwrap().verified());
            prop_assert!(identity_test(&c, &ws_nonsym_matrix(&c, mode).unwrap(), 20, &spec, seed).unwrap().verified());
        }
    }

    #[test]
    fn char2_square_verifies(seed in any::<u64>()) {
        let spec = RandomSpec { class: CircuitClass::WeaklySkew, max_gates: 10, num_vars: 4, weighted: false, constants: false };
        let c = random_circuit(&spec, &mut ChaCha8Rng::seed_from_u64(seed));
        let d = square_matrix_char2(&c).unwrap();
        let v = identity_test_squared(&c, &d.matrix, 40, &FieldSpec::gf2_16(), seed).unwrap();
        prop_assert!(v.verified());
    }
}
