use std::sync::Arc;

use super::*;
use crate::kripke::{bounded_cd_countermodel_search, CdSearchVerdict};
use crate::syntax::parse_formula;
use crate::truthfn::{standard, TruthTable};

fn table(name: &str, arity: usize, bits: &str) -> Connective {
    Arc::new(TruthTable::from_bits(name, arity, bits).unwrap())
}

fn implies_sig() -> Signature {
    Signature::from_tables([standard::implies()]).unwrap()
}

/// `(σ, ψ, φ)` values per row of a table, keyed by the point text.
fn values(t: &ValueTable) -> Vec<(String, Vec<u8>)> {
    t.rows
        .iter()
        .map(|row| {
            let point = match &row.point {
                Point::World(w) => w.clone(),
                Point::Valuation(v) => v
                    .iter()
                    .filter(|(s, _)| *s != "s")
                    .map(|(_, b)| if *b { '1' } else { '0' })
                    .collect(),
            };
            (point, row.cells.iter().map(|c| c.value as u8).collect())
        })
        .collect()
}

#[test]
fn negation_builder() {
    let f = build_negation(&standard::nand(), &Formula::prop("p")).unwrap();
    assert_eq!(f.to_string(), "nand(p, p)");
    let c3 = table("c3", 3, "10000000");
    assert_eq!(
        build_negation(&c3, &Formula::prop("p"))
            .unwrap()
            .to_string(),
        "c3(p, p, p)"
    );
    assert!(matches!(
        build_negation(&standard::bot(), &Formula::prop("p")),
        Err(Error::NullaryConnective(_))
    ));
}

#[test]
fn negation_behaves_like_negation_on_two_chains() {
    // ∥¬_c α∥_w = 1 iff ∥α∥_v = 0 for every v ⪰ w, for every hereditary α on the chain
    let c = table("n", 2, "1000");
    for vals in [[false, false], [false, true], [true, true]] {
        let k = chain_model(&[("p", vals)]);
        let neg = build_negation(&c, &Formula::prop("p")).unwrap();
        for w in 0..2 {
            let expected = k.successors(w).all(|v| !vals[v]);
            assert_eq!(
                eval_kripke(&k, w, &Assignment::empty(), &neg).unwrap(),
                expected
            );
        }
    }
}

#[test]
fn tau_for_implication() {
    let tau = build_tau(&standard::implies()).unwrap();
    assert_eq!(tau.to_string(), "implies(s, s)");
    let s = Sequent::new([], [tau]);
    assert!(decide_propositional(&s).unwrap().is_valid());
    assert_eq!(
        bounded_cd_countermodel_search(&s, 3, 2, u128::MAX).unwrap(),
        CdSearchVerdict::NoCountermodelUpTo {
            worlds: 3,
            domain: 2
        }
    );
    assert!(matches!(
        build_tau(&standard::nand()),
        Err(Error::WrongCase {
            expected: 'd',
            found: 'c',
            ..
        })
    ));
}

#[test]
fn peirce_from_implication() {
    let r = build_case_d(&standard::implies()).unwrap();
    assert_eq!(r.subcase, Subcase::One);
    assert_eq!(r.witnesses.a.to_bit_string(), "00");
    assert_eq!(r.witnesses.b.as_ref().unwrap().to_bit_string(), "10");
    let peirce = parse_formula("implies(implies(implies(p, q), p), p)", &implies_sig()).unwrap();
    assert_eq!(r.sequent, Sequent::new([], [peirce]));
    assert_eq!(r.aux("sigma_P").unwrap().to_string(), "implies(p, q)");
    assert_eq!(
        r.aux("psi_P").unwrap().to_string(),
        "implies(implies(p, q), p)"
    );
    assert_eq!(r.model_name, "K*");
    assert_eq!(r.failing_world, 0);
    assert!(r.verification.passed);

    // classical rows (p, q) → (σ, ψ, φ); τ has no slot when a = 00
    let classical = values(r.table(TableKind::Classical).unwrap());
    let expected = [
        ("00", [1, 0, 1]),
        ("01", [1, 0, 1]),
        ("10", [0, 1, 1]),
        ("11", [1, 1, 1]),
    ];
    for (point, vals) in &classical {
        let want = expected.iter().find(|(p, _)| p == point).unwrap().1;
        assert_eq!(vals, &want, "row {point}");
    }
    assert_eq!(classical.len(), 4);
    let kripke = values(r.table(TableKind::Kripke).unwrap());
    assert_eq!(
        kripke,
        [
            ("w1".to_string(), vec![0, 1, 1]),
            ("w0".to_string(), vec![0, 1, 0])
        ]
    );
}

#[test]
fn double_negation_cases() {
    for c in [standard::nand(), table("neg", 1, "10")] {
        let r = build_case_c(&c).unwrap();
        assert_eq!(r.case, Case::C);
        let nn = build_negation(&c, &build_negation(&c, &Formula::prop("p")).unwrap()).unwrap();
        assert_eq!(r.sequent, Sequent::new([nn], [Formula::prop("p")]));
        assert!(r.verification.classical_valid.passed);
        assert!(r.verification.cd_fails.passed);
        assert_eq!(r.failing_world, 0);
    }
}

fn first_case_b(subcase_one: bool) -> Connective {
    let t = TruthTable::all_of_arity(3)
        .find(|t| {
            !t.is_monotonic()
                && t.classify_case() == Case::B
                && t.eval_bits(t.monotonicity_witness().unwrap().0.invert().bits()) == subcase_one
        })
        .unwrap();
    Arc::new(t)
}

#[test]
fn case_b_subcase_one_table() {
    let c = first_case_b(true);
    let r = build_case_b(&c).unwrap();
    assert_eq!(r.subcase, Subcase::One);
    assert_eq!(r.model_name, "K+");
    let kripke = values(r.table(TableKind::Kripke).unwrap());
    assert_eq!(
        kripke,
        [
            ("w1".to_string(), vec![1, 0, 1]),
            ("w0".to_string(), vec![0, 0, 1])
        ]
    );
    let chi = r.aux("chi").unwrap();
    let phi = r.aux("phi").unwrap();
    assert_eq!(r.sequent, Sequent::new([phi.clone()], [chi.clone()]));
}

#[test]
fn case_b_subcase_two_uses_substitution() {
    let c = first_case_b(false);
    let r = build_case_b(&c).unwrap();
    assert_eq!(r.subcase, Subcase::Two);
    assert!(r.verification.passed);
    assert_eq!(r.notes.len(), 1);
    // replacing τ by r agrees with filling the τ slots with r directly
    let (a, b) = (r.witnesses.a.clone(), r.witnesses.b.clone().unwrap());
    let pp = c
        .eval(&TruthVector::relative_invert(&a, &b).unwrap())
        .unwrap();
    let layers = if pp {
        schema::CASE_D_P
    } else {
        schema::CASE_D_Q
    };
    let direct = schema::instantiate(&c, layers, &a, Some(&b), Some(&Formula::prop("r"))).unwrap();
    let phi = r.sequent.succedent.iter().next().unwrap();
    assert_eq!(phi, &direct[2].1);
    assert!(r.sequent.predicates().keys().all(|p| p != "s"));
}

#[test]
fn concrete_ternary_case_b() {
    // t(000)=0, t(111)=1, t(010)=1, t(110)=0, remaining rows 0
    let c = table("t", 3, "00100001");
    assert_eq!(c.classify_case(), Case::B);
    let r = build_case_b(&c).unwrap();
    assert!(r.verification.passed);
}

#[test]
fn case_a_for_xor() {
    let r = build_case_a(&standard::xor()).unwrap();
    assert_eq!(r.witnesses.a.to_bit_string(), "01");
    assert_eq!(r.aux("psi").unwrap().to_string(), "xor(p, r)");
    assert_eq!(r.aux("phi").unwrap().to_string(), "xor(xor(p, r), r)");
    let kripke = values(r.table(TableKind::Kripke).unwrap());
    assert_eq!(
        kripke,
        [
            ("w1".to_string(), vec![0, 1]),
            ("w0".to_string(), vec![0, 1])
        ]
    );
    let p_at_w0 = r.claims.iter().find(|c| c.name == "p").unwrap();
    assert!(!p_at_w0.value);
    assert!(r.verification.passed);
    assert_eq!(r.verification.classical_valid.rows, 4);
}

#[test]
fn separate_examples() {
    let mono = Signature::from_tables([standard::and(), standard::or()]).unwrap();
    assert_eq!(separate(&mono).unwrap(), Separation::AllMonotone);
    match separate(&implies_sig()).unwrap() {
        Separation::Separated(r) => assert_eq!((r.case, r.subcase), (Case::D, Subcase::One)),
        s => panic!("{s:?}"),
    }
    let sig = Signature::from_tables([standard::and(), standard::nand()]).unwrap();
    match separate(&sig).unwrap() {
        Separation::Separated(r) => {
            assert_eq!(r.connective.name(), "nand");
            assert_eq!(r.case, Case::C);
        }
        s => panic!("{s:?}"),
    }
    assert!(matches!(
        build_case_a(&standard::implies()),
        Err(Error::WrongCase {
            expected: 'a',
            found: 'd',
            ..
        })
    ));
}

#[test]
fn tampered_model_fails_the_cd_half() {
    let mut r = build_case_d(&standard::implies()).unwrap();
    r.countermodel.set_atom_unchecked(0, "p", &[], true);
    let v = verify_separation(&r);
    assert!(v.classical_valid.passed);
    assert!(!v.cd_fails.passed);
    assert!(!v.passed);
}

#[test]
fn all_tables_up_to_arity_two() {
    for n in 1..=2 {
        for t in TruthTable::all_of_arity(n).filter(|t| !t.is_monotonic()) {
            let c = Arc::new(t);
            let r = separate_connective(&c).unwrap_or_else(|e| panic!("{}: {e}", c.name()));
            assert!(r.verification.passed, "{}", c.name());
        }
    }
}

#[test]
fn document_and_rendering() {
    let r = build_case_d(&standard::implies()).unwrap();
    let doc = serde_json::to_value(&r).unwrap();
    assert_eq!(doc["case"], "d");
    assert_eq!(doc["subcase"], 1);
    assert_eq!(doc["failing_world"], "w0");
    assert_eq!(doc["witnesses"]["b̄^a"], "01");
    assert_eq!(doc["verification"]["passed"], true);
    let text = render_human(&r);
    assert!(text.contains("case (d), subcase 1"));
    assert!(text.contains("σ^P = implies(p, q)"));
    assert!(text.contains("∥·∥ at w0"));
}
