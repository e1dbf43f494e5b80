//! Acceptance criteria. Each prints one PASS/FAIL line with its runtime and
//! limit; a criterion that exceeds its limit fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kripkecon::classical::{decide_propositional, DEFAULT_CEILING};
use kripkecon::collapse::{exhaustive_collapse, ExhaustiveConfig};
use kripkecon::golden::{verify_paper, EXPECTED_DEVIATIONS};
use kripkecon::kripke::{
    bounded_cd_countermodel_search, model_validity, CdSearchVerdict, ModelVerdict,
};
use kripkecon::separator::{
    build_case_c, build_negation, separate, separate_connective, Separation, Subcase,
};
use kripkecon::suites::{heredity_suite, lift_suite, random_formula};
use kripkecon::syntax::{parse_sequent, Formula, Sequent};
use kripkecon::truthfn::{standard, Case, Signature, TruthTable};

const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn separation_for_small_tables() -> Outcome {
    let mut count = 0;
    for n in 1..=3 {
        for t in TruthTable::all_of_arity(n).filter(|t| !t.is_monotonic()) {
            let name = t.outputs().to_bit_string();
            let r = separate_connective(&Arc::new(t)).map_err(|e| format!("{name}: {e}"))?;
            let valid = decide_propositional(&r.sequent).map_err(|e| e.to_string())?;
            ensure(valid.is_valid(), || {
                format!("{name}: sequent not classically valid")
            })?;
            match model_validity(&r.countermodel, &r.sequent).map_err(|e| e.to_string())? {
                ModelVerdict::Failure { world, .. } if world == r.failing_world => {}
                v => return Err(format!("{name}: countermodel gives {v:?}")),
            }
            count += 1;
        }
    }
    // 2^(2^n) tables minus the Dedekind numbers 3, 6, 20 of monotone ones
    let expected = (4 - 3) + (16 - 6) + (256 - 20);
    ensure(count == expected, || {
        format!("{count} non-monotonic tables, expected {expected}")
    })?;
    Ok(format!("{count} tables separated"))
}

fn golden_tables() -> Outcome {
    let r = verify_paper().map_err(|e| e.to_string())?;
    ensure(r.mismatches.is_empty(), || r.mismatches.join("; "))?;
    let found: BTreeSet<&str> = r.deviations.iter().map(|d| d.id.as_str()).collect();
    let expected: BTreeSet<&str> = EXPECTED_DEVIATIONS.iter().map(|(id, _)| *id).collect();
    ensure(found == expected && r.passed, || {
        format!("deviations {found:?}")
    })?;
    Ok(format!(
        "{} comparisons, {} expected deviations",
        r.cells_checked,
        found.len()
    ))
}

fn peirce() -> Outcome {
    let sig = Signature::from_tables([standard::implies()]).map_err(|e| e.to_string())?;
    let Separation::Separated(r) = separate(&sig).map_err(|e| e.to_string())? else {
        return Err("implication reported monotone".into());
    };
    let expected = parse_sequent("=> implies(implies(implies(p, q), p), p)", &sig)
        .map_err(|e| e.to_string())?;
    ensure(r.sequent == expected, || format!("sequent {}", r.sequent))?;
    ensure(r.case == Case::D && r.subcase == Subcase::One, || {
        format!("case {} subcase {:?}", r.case, r.subcase)
    })?;
    let k = &r.countermodel;
    let chain = k.worlds() == ["w0", "w1"] && k.leq(0, 1) && !k.leq(1, 0);
    let atoms = !k.holds(0, "p", &[])
        && k.holds(1, "p", &[])
        && !k.holds(0, "q", &[])
        && !k.holds(1, "q", &[]);
    ensure(r.model_name == "K*" && chain && atoms, || {
        "countermodel is not K*".into()
    })?;
    match model_validity(k, &r.sequent).map_err(|e| e.to_string())? {
        ModelVerdict::Failure { world: 0, .. } => Ok("Peirce's law, refuted at w0 of K*".into()),
        v => Err(format!("{v:?}")),
    }
}

fn exhaustive() -> Outcome {
    let r = exhaustive_collapse(&ExhaustiveConfig::default()).map_err(|e| e.to_string())?;
    ensure(r.passed(), || {
        format!("{} disagreements: {:?}", r.disagreements, r.examples)
    })?;
    Ok(format!(
        "{} models, {} formula classes, {} literal formulas, {} literal checks, 0 disagreements",
        r.models, r.classes, r.literal_formulas, r.literal_checks
    ))
}

fn heredity() -> Outcome {
    let r = heredity_suite(10_000, SEED, false).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("{:?}", r.counterexample))?;
    Ok(format!(
        "{} trials, {} world pairs, 0 violations",
        r.trials, r.checks
    ))
}

fn lift() -> Outcome {
    let r = lift_suite(1_000, SEED).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("{:?}", r.counterexample))?;
    ensure(r.effective > 0, || "no classical countermodels".into())?;
    Ok(format!(
        "{} sequents, {} with classical countermodels, 0 violations",
        r.trials, r.effective
    ))
}

/// 200 distinct valid `{∧, ∨}` sequents drawn from a fixed seed.
fn corpus() -> Result<Vec<Sequent>, String> {
    let conns = [standard::and(), standard::or()];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = BTreeSet::new();
    let mut drawn = 0;
    while out.len() < 200 {
        drawn += 1;
        ensure(drawn < 1_000_000, || "corpus generation stalled".into())?;
        let mut side = |n: usize| -> Vec<Formula> {
            (0..n)
                .map(|_| random_formula(&mut rng, &conns, &["p", "q", "r"], true, 3))
                .collect()
        };
        let ante = side(1 + drawn % 3);
        let succ = side(1 + drawn % 2);
        let s = Sequent::new(ante, succ);
        if decide_propositional(&s)
            .map_err(|e| e.to_string())?
            .is_valid()
        {
            out.insert(s);
        }
    }
    Ok(out.into_iter().collect())
}

fn bounded_consistency() -> Outcome {
    let corpus = corpus()?;
    for s in &corpus {
        match bounded_cd_countermodel_search(s, 3, 1, DEFAULT_CEILING).map_err(|e| e.to_string())? {
            CdSearchVerdict::NoCountermodelUpTo { .. } => {}
            CdSearchVerdict::Countermodel { world, .. } => {
                return Err(format!("{s} refuted at world {world}"));
            }
        }
    }
    Ok(format!(
        "{} valid sequents, no countermodel at (3 worlds, domain 1)",
        corpus.len()
    ))
}

fn double_negation() -> Outcome {
    let neg = Arc::new(TruthTable::from_bits("neg", 1, "10").map_err(|e| e.to_string())?);
    for c in [neg, standard::nand()] {
        let r = build_case_c(&c).map_err(|e| e.to_string())?;
        let p = Formula::prop("p");
        let nn = build_negation(&c, &build_negation(&c, &p).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure(r.sequent == Sequent::new([nn], [p]), || {
            format!("{}: sequent {}", c.name(), r.sequent)
        })?;
        ensure(
            decide_propositional(&r.sequent)
                .map_err(|e| e.to_string())?
                .is_valid(),
            || format!("{}: not classically valid", c.name()),
        )?;
        let k = &r.countermodel;
        let chain = k.worlds() == ["w0", "w1"] && k.leq(0, 1) && !k.leq(1, 0);
        ensure(
            chain && !k.holds(0, "p", &[]) && k.holds(1, "p", &[]),
            || format!("{}: countermodel is not the 2-chain", c.name()),
        )?;
        match model_validity(k, &r.sequent).map_err(|e| e.to_string())? {
            ModelVerdict::Failure { world: 0, .. } => {}
            v => return Err(format!("{}: {v:?}", c.name())),
        }
    }
    Ok("neg and nand: valid classically, refuted at w0".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "separation of every non-monotonic table of arity <= 3",
            Duration::from_secs(60),
            separation_for_small_tables,
        ),
        (
            "published tables regenerate with exactly 3 deviations",
            Duration::from_secs(1),
            golden_tables,
        ),
        (
            "Peirce's law from implication",
            Duration::from_secs(1),
            peirce,
        ),
        (
            "exhaustive collapse for {and, or}",
            Duration::from_secs(300),
            exhaustive,
        ),
        (
            "heredity, 10^4 random trials",
            Duration::from_secs(30),
            heredity,
        ),
        (
            "one-world lift, 10^3 random sequents",
            Duration::from_secs(10),
            lift,
        ),
        (
            "valid {and, or} corpus has no CD countermodel",
            Duration::from_secs(120),
            bounded_consistency,
        ),
        (
            "double negation for neg and nand",
            Duration::from_secs(1),
            double_negation,
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= *limit => (true, d),
            Ok(d) => (false, format!("{d}; exceeded the limit")),
            Err(e) => (false, e),
        };
        failed += !ok as usize;
        println!(
            "criterion {}: {} [{:.3}s / {}s] {name}: {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
