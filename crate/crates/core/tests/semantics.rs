use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kripkecon::classical::{eval_classical, ClassicalModel};
use kripkecon::collapse::{lift_classical, project_world};
use kripkecon::kripke::{
    check_heredity, eval_kripke, eval_kripke_with, Clause, Clauses, KripkeModel,
};
use kripkecon::model::Assignment;
use kripkecon::suites::{random_formula, random_model, random_signature};
use kripkecon::syntax::Formula;
use kripkecon::truthfn::{standard, Connective};

const SYMBOLS: &[&str] = &["p", "q", "r"];

fn setup(seed: u64, constant: bool, monotone: bool) -> (ChaCha8Rng, KripkeModel, Formula) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let conns: Vec<Connective> = if monotone {
        vec![standard::and(), standard::or()]
    } else {
        random_signature(&mut rng).connectives().cloned().collect()
    };
    let k = random_model(&mut rng, 4, 3, constant);
    let f = random_formula(&mut rng, &conns, SYMBOLS, false, 4);
    (rng, k, f)
}

fn assignment_at(rng: &mut ChaCha8Rng, k: &KripkeModel, w: usize, f: &Formula) -> Assignment {
    let dom = k.domain(w);
    let mut rho = Assignment::empty();
    for x in f.free_vars() {
        rho.bind(&x, dom[rng.gen_range(0..dom.len())]);
    }
    rho
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn formulas_are_hereditary(seed in any::<u64>()) {
        let (mut rng, k, f) = setup(seed, false, false);
        let w = rng.gen_range(0..k.world_count());
        let rho = assignment_at(&mut rng, &k, w, &f);
        prop_assert!(check_heredity(&k, &f, &rho).unwrap(), "{f}");
    }

    #[test]
    fn bindings_of_absent_variables_are_irrelevant(seed in any::<u64>()) {
        let (mut rng, k, f) = setup(seed, false, false);
        let w = rng.gen_range(0..k.world_count());
        let rho = assignment_at(&mut rng, &k, w, &f);
        let dom = k.domain(w);
        let extended = rho.clone().with("unused", dom[dom.len() - 1]);
        prop_assert_eq!(
            eval_kripke(&k, w, &rho, &f).unwrap(),
            eval_kripke(&k, w, &extended, &f).unwrap()
        );
    }

    #[test]
    fn one_world_models_are_classical(seed in any::<u64>()) {
        let (mut rng, k, f) = setup(seed, true, false);
        let w = rng.gen_range(0..k.world_count());
        let m: ClassicalModel = project_world(&k, w).unwrap();
        let lifted = lift_classical(&m);
        let rho = assignment_at(&mut rng, &k, w, &f);
        prop_assert_eq!(
            eval_kripke(&lifted, 0, &rho, &f).unwrap(),
            eval_classical(&m, &rho, &f).unwrap(),
            "{}", f
        );
    }

    #[test]
    fn universal_clauses_agree_on_constant_domains(seed in any::<u64>()) {
        let (mut rng, k, f) = setup(seed, true, false);
        let present = Clauses { conn: Clause::Upward, forall: Clause::Present };
        for w in 0..k.world_count() {
            let rho = assignment_at(&mut rng, &k, w, &f);
            prop_assert_eq!(
                eval_kripke_with(&k, w, &rho, &f, Clauses::STANDARD).unwrap(),
                eval_kripke_with(&k, w, &rho, &f, present).unwrap()
            );
        }
    }

    #[test]
    fn monotone_connectives_need_no_upward_clause(seed in any::<u64>()) {
        let (mut rng, k, f) = setup(seed, true, true);
        let local = Clauses { conn: Clause::Present, forall: Clause::Present };
        for w in 0..k.world_count() {
            let rho = assignment_at(&mut rng, &k, w, &f);
            prop_assert_eq!(
                eval_kripke(&k, w, &rho, &f).unwrap(),
                eval_kripke_with(&k, w, &rho, &f, local).unwrap(),
                "{}", f
            );
        }
    }
}

#[test]
fn upward_universal_differs_on_growing_domains() {
    // a1 appears only at w1, where P(a1) fails: ∀x P(x) holds at w0 under
    // the present-world reading but not under the upward one
    let k = KripkeModel::new(
        vec!["w0".into(), "w1".into()],
        &[(0, 1)],
        vec!["a0".into(), "a1".into()],
        vec![vec![0], vec![0, 1]],
        &[
            (0, "P".into(), vec![0], true),
            (1, "P".into(), vec![0], true),
            (1, "P".into(), vec![1], false),
        ],
    )
    .unwrap();
    let f = Formula::forall("x", Formula::atom("P", &["x"]));
    let rho = Assignment::empty();
    assert!(!eval_kripke(&k, 0, &rho, &f).unwrap());
    let present = Clauses {
        conn: Clause::Upward,
        forall: Clause::Present,
    };
    assert!(eval_kripke_with(&k, 0, &rho, &f, present).unwrap());
}
