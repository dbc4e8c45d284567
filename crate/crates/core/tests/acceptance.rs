//! One line per acceptance criterion. Runs as a plain binary so the lines
//! are printed whether or not the test harness captures output.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use strongeq::ast::{Formula, Predicate, Variable};
use strongeq::cli::{load_program, pair_problem, Expected, Manifest};
use strongeq::ht_map::{sigma_star_def, sigma_star_impl, PrimeStyle, PrimedSignature};
use strongeq::oracle::grounding::{ground_formula, universe_of_program};
use strongeq::oracle::{
    all_classical_interpretations, all_ht_interpretations, atoms_of, check_strong_equivalence_bounded,
    check_strong_equivalence_ground, classical_equiv_under_axioms, classical_satisfies, from_classical,
    ht_equivalent, ht_satisfies, propositional_alphabet, random_formula, random_rule_formula, to_classical,
    ClassicalInterpretation, GroundAtom, Value,
};
use strongeq::parser::{parse_program, parse_term};
use strongeq::prover_driver::{run_prover, Outcome, ProverSuite};
use strongeq::render::{check_tff, render_program, render_tptp, HumanRenderer};
use strongeq::simplify::{simplify, SimplifyConfig};
use strongeq::translate::{tau_b, tau_h, tau_star_program, tau_star_rule, val, FreshNameSupply};

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/programs")
}

fn corpus_pairs() -> Vec<(u32, Expected, strongeq::ast::Program, strongeq::ast::Program)> {
    let dir = corpus_dir();
    let manifest = Manifest::load(&dir).expect("manifest");
    let mut sink = std::io::sink();
    manifest
        .pairs
        .iter()
        .map(|p| {
            let a = load_program(&dir.join(&p.a), &mut sink).expect("program a");
            let b = load_program(&dir.join(&p.b), &mut sink).expect("program b");
            (p.example, p.expected, a, b)
        })
        .collect()
}

fn cli(args: &[&str]) -> (i32, String, String, Duration) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["strongeq"];
    full.extend_from_slice(args);
    let start = Instant::now();
    let code = strongeq::cli::run(full, &mut out, &mut err);
    let took = start.elapsed();
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap(), took)
}

fn trimmed(text: &str) -> String {
    text.lines().map(str::trim_end).collect::<Vec<_>>().join("\n")
}

fn propositional_signature(n: usize) -> Vec<Predicate> {
    (1..=n).map(|i| Predicate::new(format!("a{i}"), 0)).collect()
}

fn golden_translations() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let colours = dir.path().join("colours.lp");
    let choice = dir.path().join("choice.lp");
    std::fs::write(&colours, "colour(r;g;b).\n").unwrap();
    std::fs::write(&choice, "{p}.\n:- not p, q.\n").unwrap();

    let (code, out, err, t1) = cli(&["translate", colours.to_str().unwrap()]);
    let expected = "(#true -> (forall X1 ((X1 = r) -> colour(X1)) and\n           \
                    forall X2 ((X2 = g) -> colour(X2)) and\n           \
                    forall X3 ((X3 = b) -> colour(X3))))";
    if code != 0 || trimmed(&out) != expected || err != "info: output semantics: classical logic\n" {
        return Err(format!("colour pool block differs:\n{out}{err}"));
    }

    let (code, out, err, t2) = cli(&["translate", choice.to_str().unwrap()]);
    let expected = "(p -> p')\n(q -> q')\n(#true -> (p or not p'))\n(#true -> (p' or not p'))\n\
                    ((not p' and q) -> #false)\n((not p' and q') -> #false)";
    if code != 0 || trimmed(&out) != expected || err != "info: mapped to output semantics: classical logic\n" {
        return Err(format!("choice block differs:\n{out}{err}"));
    }

    let (code, out, _, t3) = cli(&["translate", choice.to_str().unwrap(), "--format", "tptp"]);
    let formula_lines = [
        "$true => (p | (~p__prime__))",
        "$true => (p__prime__ | (~p__prime__))",
        "((~p__prime__) & q) => $false",
        "((~p__prime__) & q__prime__) => $false",
    ];
    let axioms: Vec<&str> = out.lines().filter(|l| l.contains(", axiom,")).collect();
    if axioms.len() < 4 {
        return Err(format!("only {} axiom lines in\n{out}", axioms.len()));
    }
    let last_four = &axioms[axioms.len() - 4..];
    for (line, want) in last_four.iter().zip(formula_lines) {
        if code != 0 || !line.contains(&format!(", axiom, {want}).")) {
            return Err(format!("TPTP line `{line}` does not carry `{want}`"));
        }
    }
    let slowest = t1.max(t2).max(t3);
    if slowest >= Duration::from_millis(100) {
        return Err(format!("slowest golden took {slowest:?}"));
    }
    Ok(format!("3 goldens byte-equal, slowest {:.1} ms", slowest.as_secs_f64() * 1e3))
}

fn worked_examples() -> Verdict {
    let raw = HumanRenderer {
        width: 1000,
        ..HumanRenderer::raw()
    };
    let cfg = SimplifyConfig::default();
    let z = Variable::program("Z");
    let val_f = val(&parse_term("r;g;b").unwrap(), &z, &mut FreshNameSupply::new());
    let body = parse_program(":- q(1;2;3).").unwrap();
    let body_f = tau_b(&body.rules()[0].body[0], &mut FreshNameSupply::new());
    let head = parse_program("p(X;Y).").unwrap();
    let head_f = tau_h(&head.rules()[0].head, &mut FreshNameSupply::new());
    let rule = parse_program("p(X;Y) :- q(X,Y).").unwrap();
    let rule_f = tau_star_rule(&rule.rules()[0]);

    let cases: [(&str, &Formula, &str, &str); 4] = [
        (
            "val(r;g;b, Z)",
            &val_f,
            "exists I1 I2 I3 ((I1 = r) and (I2 = g) and (I3 = b) and ((Z = I1) or (Z = I2) or (Z = I3)))",
            "((Z = r) or (Z = g) or (Z = b))",
        ),
        (
            "body q(1;2;3)",
            &body_f,
            "(exists Z1 ((Z1 = 1) and q(Z1)) or exists Z2 ((Z2 = 2) and q(Z2)) or exists Z3 ((Z3 = 3) and q(Z3)))",
            "(q(1) or q(2) or q(3))",
        ),
        (
            "head p(X;Y)",
            &head_f,
            "(forall Z1 ((Z1 = X) -> p(Z1)) and forall Z2 ((Z2 = Y) -> p(Z2)))",
            "(p(X) and p(Y))",
        ),
        (
            "rule p(X;Y) :- q(X,Y)",
            &rule_f,
            "forall U1 U2 (exists Z1 Z2 ((Z1 = U1) and (Z2 = U2) and q(Z1, Z2)) -> \
             (forall Z3 ((Z3 = U1) -> p(Z3)) and forall Z4 ((Z4 = U2) -> p(Z4))))",
            "forall U1 U2 (q(U1, U2) -> (p(U1) and p(U2)))",
        ),
    ];
    for (name, f, before, after) in cases {
        let got = raw.formula(f);
        if got != before {
            return Err(format!("{name}: got {got}"));
        }
        let got = raw.formula(&simplify(f, &cfg));
        if got != after {
            return Err(format!("{name} simplified: got {got}"));
        }
    }
    Ok("4 formulas, 8 exact matches".into())
}

fn oracle_verdicts(pairs: &[(u32, Expected, strongeq::ast::Program, strongeq::ast::Program)]) -> Verdict {
    let propositional = [12, 13, 14, 16, 17, 18, 19, 20, 21, 23];
    let mut slowest = Duration::ZERO;
    for (n, expected, a, b) in pairs.iter().filter(|p| propositional.contains(&p.0)) {
        let start = Instant::now();
        let verdict = check_strong_equivalence_ground(a, b).map_err(|e| format!("example {n}: {e}"))?;
        slowest = slowest.max(start.elapsed());
        if verdict.is_equivalent() != (*expected == Expected::Equivalent) {
            return Err(format!("example {n}: oracle says {verdict:?}"));
        }
    }
    if slowest >= Duration::from_secs(1) {
        return Err(format!("slowest decision took {slowest:?}"));
    }
    let domain = [Value::Integer(1), Value::Integer(2)];
    for (n, want_refuted) in [(24, true), (15, false), (22, false)] {
        let (_, _, a, b) = pairs.iter().find(|p| p.0 == n).unwrap();
        let bounded = check_strong_equivalence_bounded(a, b, &domain).map_err(|e| format!("example {n}: {e}"))?;
        if bounded.verdict.is_equivalent() == want_refuted {
            return Err(format!("example {n}: bounded check gave {:?}", bounded.verdict));
        }
    }
    Ok(format!(
        "10 propositional pairs agree (slowest {:.1} ms); bounded check refutes 24, not 15 or 22",
        slowest.as_secs_f64() * 1e3
    ))
}

fn mapped_satisfaction() -> Verdict {
    let start = Instant::now();
    let mut checks = 0usize;
    for n in 1..=3 {
        let atoms = propositional_alphabet(n);
        let alphabet: BTreeSet<GroundAtom> = atoms.iter().cloned().collect();
        let interpretations = all_ht_interpretations(&alphabet).unwrap();
        let signature = propositional_signature(n);
        let sig = PrimedSignature::new(&signature, PrimeStyle::Tick);
        for seed in 0..1000u64 {
            let f = random_formula(&atoms, 8, seed * 7 + n as u64);
            let mapped = sigma_star_def(&f, &sig).unwrap();
            for i in &interpretations {
                let ht = ht_satisfies(i, &f).unwrap();
                let classical = classical_satisfies(&to_classical(i), &mapped).unwrap();
                if ht != classical {
                    return Err(format!("size {n}, seed {seed}, {i}: HT {ht}, classical {classical}"));
                }
                checks += 1;
            }
        }
    }
    let took = start.elapsed();
    if took >= Duration::from_secs(30) {
        return Err(format!("suite took {took:?}"));
    }
    Ok(format!("{checks} checks, 0 violations, {:.2} s", took.as_secs_f64()))
}

fn mapped_equivalence() -> Verdict {
    let mut agreed = 0usize;
    let mut equivalent = 0usize;
    for n in 1..=3 {
        let atoms = propositional_alphabet(n);
        let alphabet: BTreeSet<GroundAtom> = atoms.iter().cloned().collect();
        let signature = propositional_signature(n);
        let sig = PrimedSignature::new(&signature, PrimeStyle::Tick);
        for seed in 0..500u64 {
            // small formulas collide often enough to give equivalent pairs
            let f1 = random_formula(&atoms, 8, 2 * seed + 100_000 * n as u64);
            let f2 = random_formula(&atoms, 8, 2 * seed + 1 + 100_000 * n as u64);
            let ht = ht_equivalent(&f1, &f2, &alphabet).unwrap().is_equivalent();
            let m1 = sigma_star_def(&f1, &sig).unwrap();
            let m2 = sigma_star_def(&f2, &sig).unwrap();
            let classical = classical_equiv_under_axioms(&m1, &m2, &alphabet).unwrap().is_equivalent();
            if ht != classical {
                return Err(format!("size {n}, pair {seed}: HT {ht}, classical {classical}"));
            }
            agreed += 1;
            equivalent += ht as usize;
        }
    }
    Ok(format!("{agreed} pairs agree ({equivalent} equivalent), 0 violations"))
}

fn impl_matches_def(pairs: &[(u32, Expected, strongeq::ast::Program, strongeq::ast::Program)]) -> Verdict {
    let check = |f: &Formula, alphabet: &BTreeSet<GroundAtom>, sig: &PrimedSignature| -> Result<(), String> {
        let def = sigma_star_def(f, sig).map_err(|e| e.to_string())?;
        let imp = Formula::conjunction(sigma_star_impl(std::slice::from_ref(f), sig).map_err(|e| e.to_string())?);
        let verdict = classical_equiv_under_axioms(&def, &imp, alphabet).map_err(|e| e.to_string())?;
        match verdict.witness() {
            None => Ok(()),
            Some(w) => Err(format!("{f:?} differs at {w:?}")),
        }
    };
    let mut corpus_rules = 0usize;
    for (_, _, a, b) in pairs {
        for program in [a, b] {
            if program.signature().iter().any(|p| p.arity > 0) {
                continue;
            }
            let t = tau_star_program(program);
            let sig = PrimedSignature::new(&t.signature, PrimeStyle::Tick);
            let mut alphabet = BTreeSet::new();
            for f in &t.formulas {
                alphabet.extend(atoms_of(f).map_err(|e| e.to_string())?);
            }
            for f in &t.formulas {
                check(f, &alphabet, &sig)?;
                corpus_rules += 1;
            }
        }
    }
    let atoms = propositional_alphabet(3);
    let alphabet: BTreeSet<GroundAtom> = atoms.iter().cloned().collect();
    let signature = propositional_signature(3);
    let sig = PrimedSignature::new(&signature, PrimeStyle::Tick);
    for seed in 0..500u64 {
        check(&random_rule_formula(&atoms, seed), &alphabet, &sig)?;
    }
    Ok(format!("{corpus_rules} corpus rules + 500 random rules, 0 violations"))
}

fn interpretation_round_trip() -> Verdict {
    let mut count = 0usize;
    for n in 0..=3 {
        let alphabet: BTreeSet<GroundAtom> = propositional_alphabet(n).into_iter().collect();
        for i in all_ht_interpretations(&alphabet).unwrap() {
            let back = from_classical(&to_classical(&i)).map_err(|e| e.to_string())?;
            if back != i {
                return Err(format!("{i} came back as {back}"));
            }
            count += 1;
        }
        for c in all_classical_interpretations(&alphabet).unwrap() {
            match from_classical(&c) {
                Ok(i) => {
                    if to_classical(&i) != c {
                        return Err(format!("{c:?} came back as {:?}", to_classical(&i)));
                    }
                    count += 1;
                }
                Err(_) if !c.satisfies_axioms() => {}
                Err(e) => return Err(format!("{c:?} satisfies the axioms but was rejected: {e}")),
            }
        }
    }
    Ok(format!("{count} round trips, both directions identities"))
}

fn simplifier_soundness(pairs: &[(u32, Expected, strongeq::ast::Program, strongeq::ast::Program)]) -> Verdict {
    let cfg = SimplifyConfig::default();
    let atoms = vec![
        GroundAtom::prop("p"),
        GroundAtom::new("q", vec![Value::Integer(1)]),
        GroundAtom::new("q", vec![Value::Symbol("a".into())]),
    ];
    let alphabet: BTreeSet<GroundAtom> = atoms.iter().cloned().collect();
    let subsets: Vec<BTreeSet<GroundAtom>> = (0u32..8)
        .map(|mask| atoms.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, a)| a.clone()).collect())
        .collect();
    for seed in 0..1000u64 {
        let f = random_formula(&atoms, 8, seed);
        let g = simplify(&f, &cfg);
        for s in &subsets {
            let i = ClassicalInterpretation::unprimed(s.clone());
            if classical_satisfies(&i, &f).unwrap() != classical_satisfies(&i, &g).unwrap() {
                return Err(format!("seed {seed}: models differ at {s:?}"));
            }
        }
        if !ht_equivalent(&f, &g, &alphabet).unwrap().is_equivalent() {
            return Err(format!("seed {seed}: not equivalent in here-and-there"));
        }
    }

    // idempotence on every translated corpus program, and the same instances
    // before and after simplification
    let mut fixtures = 0usize;
    let mut grounded = 0usize;
    let domains: [&[Value]; 2] = [&[Value::Integer(1)], &[Value::Integer(1), Value::Integer(2)]];
    for (n, _, a, b) in pairs {
        for program in [a, b] {
            let t = tau_star_program(program);
            let f = Formula::conjunction(t.formulas.clone());
            let once = simplify(&f, &cfg);
            if simplify(&once, &cfg) != once {
                return Err(format!("example {n}: not idempotent"));
            }
            fixtures += 1;
            for domain in domains {
                let universe = universe_of_program(program, domain).map_err(|e| e.to_string())?;
                let g1 = ground_formula(&f, &universe).map_err(|e| format!("example {n}: {e}"))?;
                let g2 = ground_formula(&once, &universe).map_err(|e| format!("example {n}: {e}"))?;
                let mut atoms = atoms_of(&g1).map_err(|e| e.to_string())?;
                atoms.extend(atoms_of(&g2).map_err(|e| e.to_string())?);
                if atoms.len() > 14 {
                    continue;
                }
                if !ht_equivalent(&g1, &g2, &atoms).unwrap().is_equivalent() {
                    return Err(format!("example {n}: simplification changed the instances over {domain:?}"));
                }
                grounded += 1;
            }
        }
    }
    Ok(format!(
        "1000 random ground formulas keep their models; {fixtures} fixtures idempotent; {grounded} grounded fixture checks agree"
    ))
}

fn tptp_well_formed(pairs: &[(u32, Expected, strongeq::ast::Program, strongeq::ast::Program)]) -> Verdict {
    let mut problems = Vec::new();
    for (n, expected, a, b) in pairs {
        for simplify in [false, true] {
            let theory = pair_problem(a, b, simplify)?;
            let text = render_tptp(&theory).serialize();
            let summary = check_tff(&text).map_err(|e| format!("example {n}: {e}"))?;
            if summary.conjectures != 1 {
                return Err(format!("example {n}: {} conjectures", summary.conjectures));
            }
            if !simplify {
                problems.push((*n, *expected, text));
            }
        }
    }
    let suite = ProverSuite::default().with_timeout(Duration::from_secs(60));
    let installed = suite.installed();
    if installed.is_empty() {
        return Ok("48 problems pass the TFF check; no prover installed, prover runs skipped".into());
    }
    let mut notes = Vec::new();
    for prover in installed {
        for (n, expected, text) in &problems {
            let must_prove = [8, 14].contains(n);
            if !must_prove && *expected == Expected::Equivalent {
                continue;
            }
            let v = run_prover(text, prover);
            if must_prove && v.outcome != Outcome::Proved {
                return Err(format!("{} on example {n}: {}", prover.id, v.outcome));
            }
            if *expected == Expected::NotEquivalent && v.outcome == Outcome::Proved {
                return Err(format!("{} proved example {n}, which is not strongly equivalent", prover.id));
            }
        }
        notes.push(prover.id.clone());
    }
    Ok(format!("48 problems pass the TFF check; provers {} agree on 8, 14, 12, 19, 24", notes.join(", ")))
}

fn parse_round_trip() -> Verdict {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "lp"))
        .collect();
    files.sort();
    if files.len() != 48 {
        return Err(format!("expected 48 program files, found {}", files.len()));
    }
    for path in &files {
        let text = std::fs::read_to_string(path).unwrap();
        let program = parse_program(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let printed = render_program(&program);
        let again = parse_program(&printed).map_err(|e| format!("{}: reprint fails: {e}", path.display()))?;
        if again != program {
            return Err(format!("{}: reprint differs:\n{printed}", path.display()));
        }
    }
    Ok("48 files parse, print and parse back equal".into())
}

fn main() {
    let pairs = corpus_pairs();
    let criteria: Vec<Criterion> = vec![
        ("golden translations", Box::new(golden_translations)),
        ("worked-example formulas", Box::new(worked_examples)),
        ("oracle verdicts", Box::new(|| oracle_verdicts(&pairs))),
        ("HT satisfaction vs mapped classical satisfaction", Box::new(mapped_satisfaction)),
        ("HT equivalence vs classical equivalence under axioms", Box::new(mapped_equivalence)),
        ("implemented vs definitional mapping", Box::new(|| impl_matches_def(&pairs))),
        ("interpretation correspondence round trip", Box::new(interpretation_round_trip)),
        ("simplifier soundness", Box::new(|| simplifier_soundness(&pairs))),
        ("TPTP well-formedness", Box::new(|| tptp_well_formed(&pairs))),
        ("program round trip", Box::new(parse_round_trip)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
