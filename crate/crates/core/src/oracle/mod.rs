//! Brute-force semantics for propositional formulas: satisfaction in the
//! logic of here-and-there and in classical logic, the correspondence
//! between the two kinds of interpretation, and equivalence checks that
//! enumerate every interpretation.

pub mod grounding;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::ast::{Formula, Predicate, PredicateAtom, Program, Term};
use crate::ht_map::{prime, HtMapError, PrimedSignature};

/// Enumeration is refused above this many atoms.
pub const MAX_ALPHABET: usize = 20;

/// A precomputed term: the values program terms denote.
///
/// Ordered as `#inf` < integers < symbolic constants (alphabetically) <
/// tuples < `#sup`; tuples compare by arity first, then element-wise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Infimum,
    Integer(i64),
    Symbol(String),
    Tuple(Vec<Value>),
    Supremum,
}

impl Value {
    fn rank(&self) -> u8 {
        match self {
            Value::Infimum => 0,
            Value::Integer(_) => 1,
            Value::Symbol(_) => 2,
            Value::Tuple(_) => 3,
            Value::Supremum => 4,
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Value::Integer(n) => Some(*n),
            _ => None,
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            Value::Infimum => Term::Infimum,
            Value::Integer(n) => Term::Integer(*n),
            Value::Symbol(s) => Term::Symbol(s.clone()),
            Value::Tuple(elements) => Term::Tuple(elements.iter().map(Value::to_term).collect()),
            Value::Supremum => Term::Supremum,
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Integer(a), Value::Integer(b)) => a.cmp(b),
            (Value::Symbol(a), Value::Symbol(b)) => a.cmp(b),
            (Value::Tuple(a), Value::Tuple(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Infimum => write!(f, "#inf"),
            Value::Integer(n) => write!(f, "{n}"),
            Value::Symbol(s) => write!(f, "{s}"),
            Value::Tuple(elements) => {
                write!(f, "(")?;
                for (i, e) in elements.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
            Value::Supremum => write!(f, "#sup"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub arguments: Vec<Value>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, arguments: Vec<Value>) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            arguments,
        }
    }

    pub fn prop(predicate: impl Into<String>) -> Self {
        GroundAtom::new(predicate, vec![])
    }

    pub fn signature(&self) -> Predicate {
        Predicate::new(self.predicate.clone(), self.arguments.len())
    }

    pub fn to_formula(&self, primed: bool) -> Formula {
        Formula::Atom(PredicateAtom {
            predicate: self.predicate.clone(),
            primed,
            arguments: self.arguments.iter().map(Value::to_term).collect(),
        })
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.predicate)?;
        if !self.arguments.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.arguments.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("formula is not propositional: it contains a quantifier")]
    Quantified,
    #[error("formula is not propositional: it contains a comparison")]
    Comparison,
    #[error("term `{0}` is not ground")]
    NotGround(String),
    #[error("atom {0} is primed, which has no meaning in here-and-there")]
    PrimedAtom(GroundAtom),
    #[error("atom {0} does not belong to the alphabet")]
    OutsideAlphabet(GroundAtom),
    #[error("alphabet of {0} atoms exceeds the enumeration limit of {MAX_ALPHABET}")]
    AlphabetTooLarge(usize),
    #[error("interpretation violates the axiom {0} -> {0}'")]
    ViolatesAxioms(GroundAtom),
    #[error("H is not a subset of T: {0} is missing from T")]
    NotSubset(GroundAtom),
    #[error("program contains variables; use the prover path or the bounded check")]
    NotVariableFree,
    #[error("integer overflow while evaluating `{0}`")]
    Overflow(String),
    #[error("term `{0}` has too many values to enumerate")]
    TooManyValues(String),
    #[error(transparent)]
    Mapping(#[from] HtMapError),
}

/// A pair ⟨H, T⟩ with H ⊆ T.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HtInterpretation {
    here: BTreeSet<GroundAtom>,
    there: BTreeSet<GroundAtom>,
}

impl HtInterpretation {
    pub fn new(here: BTreeSet<GroundAtom>, there: BTreeSet<GroundAtom>) -> Result<Self, OracleError> {
        if let Some(atom) = here.iter().find(|a| !there.contains(*a)) {
            return Err(OracleError::NotSubset(atom.clone()));
        }
        Ok(HtInterpretation { here, there })
    }

    /// ⟨T, T⟩
    pub fn total(there: BTreeSet<GroundAtom>) -> Self {
        HtInterpretation {
            here: there.clone(),
            there,
        }
    }

    pub fn here(&self) -> &BTreeSet<GroundAtom> {
        &self.here
    }

    pub fn there(&self) -> &BTreeSet<GroundAtom> {
        &self.there
    }
}

fn fmt_set(f: &mut fmt::Formatter<'_>, set: &BTreeSet<GroundAtom>) -> fmt::Result {
    write!(f, "{{")?;
    for (i, a) in set.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{a}")?;
    }
    write!(f, "}}")
}

impl fmt::Display for HtInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        fmt_set(f, &self.here)?;
        write!(f, ", ")?;
        fmt_set(f, &self.there)?;
        write!(f, ">")
    }
}

/// A set of atoms over the signature and its primed copy.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassicalInterpretation {
    /// Unprimed atoms that are true.
    pub plain: BTreeSet<GroundAtom>,
    /// Atoms whose primed twin is true.
    pub primed: BTreeSet<GroundAtom>,
}

impl ClassicalInterpretation {
    pub fn new(plain: BTreeSet<GroundAtom>, primed: BTreeSet<GroundAtom>) -> Self {
        ClassicalInterpretation { plain, primed }
    }

    /// An interpretation without primed atoms.
    pub fn unprimed(plain: BTreeSet<GroundAtom>) -> Self {
        ClassicalInterpretation {
            plain,
            primed: BTreeSet::new(),
        }
    }

    pub fn satisfies_axioms(&self) -> bool {
        self.plain.is_subset(&self.primed)
    }
}

impl fmt::Display for ClassicalInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for a in &self.plain {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{a}")?;
        }
        for a in &self.primed {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{a}'")?;
        }
        write!(f, "}}")
    }
}

/// I = H ∪ T′
pub fn to_classical(i: &HtInterpretation) -> ClassicalInterpretation {
    ClassicalInterpretation {
        plain: i.here.clone(),
        primed: i.there.clone(),
    }
}

/// H = I ∩ 𝒫 and T = {p | p′ ∈ I}; defined only when I satisfies the axioms.
pub fn from_classical(i: &ClassicalInterpretation) -> Result<HtInterpretation, OracleError> {
    if let Some(atom) = i.plain.iter().find(|a| !i.primed.contains(*a)) {
        return Err(OracleError::ViolatesAxioms(atom.clone()));
    }
    Ok(HtInterpretation {
        here: i.plain.clone(),
        there: i.primed.clone(),
    })
}

/// Evaluates a ground term appearing as a predicate argument.
pub fn evaluate_ground_term(t: &Term) -> Result<Value, OracleError> {
    Ok(match t {
        Term::Variable(v) => return Err(OracleError::NotGround(v.name.clone())),
        Term::Integer(n) => Value::Integer(*n),
        Term::Symbol(s) => Value::Symbol(s.clone()),
        Term::Infimum => Value::Infimum,
        Term::Supremum => Value::Supremum,
        Term::Tuple(elements) => Value::Tuple(
            elements
                .iter()
                .map(evaluate_ground_term)
                .collect::<Result<_, _>>()?,
        ),
        Term::Arithmetic { op, lhs, rhs } => {
            let l = evaluate_ground_term(lhs)?;
            let r = evaluate_ground_term(rhs)?;
            match (l, r) {
                (Value::Integer(a), Value::Integer(b)) => Value::Integer(
                    op.apply(a, b)
                        .ok_or_else(|| OracleError::Overflow(format!("{a} {} {b}", op.symbol())))?,
                ),
                (l, r) => {
                    return Err(OracleError::NotGround(format!("{l} {} {r}", op.symbol())))
                }
            }
        }
    })
}

pub fn ground_atom_of(atom: &PredicateAtom) -> Result<GroundAtom, OracleError> {
    Ok(GroundAtom {
        predicate: atom.predicate.clone(),
        arguments: atom
            .arguments
            .iter()
            .map(evaluate_ground_term)
            .collect::<Result<_, _>>()?,
    })
}

/// The ground atoms of a propositional formula (primed occurrences count
/// as their unprimed atom).
pub fn atoms_of(f: &Formula) -> Result<BTreeSet<GroundAtom>, OracleError> {
    let mut out = BTreeSet::new();
    for atom in f.atoms() {
        out.insert(ground_atom_of(atom)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Compiled evaluation over bit masks

#[derive(Clone, Debug)]
enum Prop {
    True,
    False,
    Atom { index: usize, primed: bool },
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
    Implies(Box<Prop>, Box<Prop>),
}

struct Alphabet {
    atoms: Vec<GroundAtom>,
    index: BTreeMap<GroundAtom, usize>,
}

impl Alphabet {
    fn new(atoms: &BTreeSet<GroundAtom>) -> Result<Self, OracleError> {
        if atoms.len() > MAX_ALPHABET {
            return Err(OracleError::AlphabetTooLarge(atoms.len()));
        }
        let atoms: Vec<GroundAtom> = atoms.iter().cloned().collect();
        let index = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Ok(Alphabet { atoms, index })
    }

    fn mask(&self, set: &BTreeSet<GroundAtom>) -> Result<u64, OracleError> {
        let mut mask = 0;
        for atom in set {
            let i = self
                .index
                .get(atom)
                .ok_or_else(|| OracleError::OutsideAlphabet(atom.clone()))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    fn set(&self, mask: u64) -> BTreeSet<GroundAtom> {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| a.clone())
            .collect()
    }

    fn compile(&self, f: &Formula, allow_primed: bool) -> Result<Prop, OracleError> {
        Ok(match f {
            Formula::Truth => Prop::True,
            Formula::Falsity => Prop::False,
            Formula::Atom(atom) => {
                let ground = ground_atom_of(atom)?;
                if atom.primed && !allow_primed {
                    return Err(OracleError::PrimedAtom(ground));
                }
                let index = *self
                    .index
                    .get(&ground)
                    .ok_or(OracleError::OutsideAlphabet(ground))?;
                Prop::Atom {
                    index,
                    primed: atom.primed,
                }
            }
            Formula::Comparison { .. } => return Err(OracleError::Comparison),
            Formula::ForAll(..) | Formula::Exists(..) => return Err(OracleError::Quantified),
            Formula::Not(g) => Prop::Not(Box::new(self.compile(g, allow_primed)?)),
            Formula::And(gs) => Prop::And(
                gs.iter()
                    .map(|g| self.compile(g, allow_primed))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::Or(gs) => Prop::Or(
                gs.iter()
                    .map(|g| self.compile(g, allow_primed))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::Implies(a, b) => Prop::Implies(
                Box::new(self.compile(a, allow_primed)?),
                Box::new(self.compile(b, allow_primed)?),
            ),
            Formula::Iff(a, b) => {
                let a = self.compile(a, allow_primed)?;
                let b = self.compile(b, allow_primed)?;
                Prop::And(vec![
                    Prop::Implies(Box::new(a.clone()), Box::new(b.clone())),
                    Prop::Implies(Box::new(b), Box::new(a)),
                ])
            }
        })
    }
}

impl Prop {
    fn ht(&self, here: u64, there: u64) -> bool {
        match self {
            Prop::True => true,
            Prop::False => false,
            Prop::Atom { index, .. } => here & (1 << index) != 0,
            Prop::Not(g) => !g.ht(there, there),
            Prop::And(gs) => gs.iter().all(|g| g.ht(here, there)),
            Prop::Or(gs) => gs.iter().any(|g| g.ht(here, there)),
            Prop::Implies(a, b) => {
                (!a.ht(here, there) || b.ht(here, there)) && (!a.ht(there, there) || b.ht(there, there))
            }
        }
    }

    fn classical(&self, plain: u64, primed: u64) -> bool {
        match self {
            Prop::True => true,
            Prop::False => false,
            Prop::Atom { index, primed: p } => {
                let mask = if *p { primed } else { plain };
                mask & (1 << index) != 0
            }
            Prop::Not(g) => !g.classical(plain, primed),
            Prop::And(gs) => gs.iter().all(|g| g.classical(plain, primed)),
            Prop::Or(gs) => gs.iter().any(|g| g.classical(plain, primed)),
            Prop::Implies(a, b) => !a.classical(plain, primed) || b.classical(plain, primed),
        }
    }
}

fn check_propositional(f: &Formula) -> Result<(), OracleError> {
    let mut error = None;
    f.visit(&mut |g| match g {
        Formula::ForAll(..) | Formula::Exists(..) => {
            error.get_or_insert(OracleError::Quantified);
        }
        Formula::Comparison { .. } => {
            error.get_or_insert(OracleError::Comparison);
        }
        _ => {}
    });
    error.map_or(Ok(()), Err)
}

fn alphabet_for(sets: &[&BTreeSet<GroundAtom>], f: &Formula) -> Result<BTreeSet<GroundAtom>, OracleError> {
    check_propositional(f)?;
    let mut atoms = atoms_of(f)?;
    for set in sets {
        atoms.extend(set.iter().cloned());
    }
    Ok(atoms)
}

/// Satisfaction in the logic of here-and-there.
pub fn ht_satisfies(i: &HtInterpretation, f: &Formula) -> Result<bool, OracleError> {
    let alphabet = Alphabet::new(&alphabet_for(&[&i.there], f)?)?;
    let prop = alphabet.compile(f, false)?;
    Ok(prop.ht(alphabet.mask(&i.here)?, alphabet.mask(&i.there)?))
}

/// Classical satisfaction over the signature and its primed copy.
pub fn classical_satisfies(i: &ClassicalInterpretation, f: &Formula) -> Result<bool, OracleError> {
    let alphabet = Alphabet::new(&alphabet_for(&[&i.plain, &i.primed], f)?)?;
    let prop = alphabet.compile(f, true)?;
    Ok(prop.classical(alphabet.mask(&i.plain)?, alphabet.mask(&i.primed)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceVerdict<W> {
    StronglyEquivalent,
    /// The witness satisfies exactly one of the two formulas.
    NotStronglyEquivalent(W),
}

impl<W> EquivalenceVerdict<W> {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivalenceVerdict::StronglyEquivalent)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            EquivalenceVerdict::StronglyEquivalent => None,
            EquivalenceVerdict::NotStronglyEquivalent(w) => Some(w),
        }
    }
}

impl<W> fmt::Display for EquivalenceVerdict<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquivalenceVerdict::StronglyEquivalent => write!(f, "StronglyEquivalent"),
            EquivalenceVerdict::NotStronglyEquivalent(_) => write!(f, "NotStronglyEquivalent"),
        }
    }
}

/// Decodes the `code`-th assignment of three states to `n` atoms; the
/// first atom is the most significant digit.
fn ternary(mut code: u64, n: usize) -> Vec<u8> {
    let mut digits = vec![0; n];
    for digit in digits.iter_mut().rev() {
        *digit = (code % 3) as u8;
        code /= 3;
    }
    digits
}

fn masks(digits: &[u8]) -> (u64, u64) {
    let (mut low, mut high) = (0u64, 0u64);
    for (i, d) in digits.iter().enumerate() {
        if *d >= 1 {
            high |= 1 << i;
        }
        if *d == 2 {
            low |= 1 << i;
        }
    }
    (low, high)
}

fn count(n: usize) -> u64 {
    3u64.pow(n as u32)
}

/// Decides equivalence in here-and-there by checking every ⟨H, T⟩ with
/// H ⊆ T ⊆ alphabet. Each atom is either outside T (0), in T only (1), or
/// in H (2); interpretations are tried in the order of these digit strings
/// and the first disagreement is reported.
pub fn ht_equivalent(
    f1: &Formula,
    f2: &Formula,
    alphabet: &BTreeSet<GroundAtom>,
) -> Result<EquivalenceVerdict<HtInterpretation>, OracleError> {
    let alpha = Alphabet::new(alphabet)?;
    let p1 = alpha.compile(f1, false)?;
    let p2 = alpha.compile(f2, false)?;
    let n = alphabet.len();
    let found = (0..count(n)).into_par_iter().find_first(|code| {
        let (here, there) = masks(&ternary(*code, n));
        p1.ht(here, there) != p2.ht(here, there)
    });
    Ok(match found {
        None => EquivalenceVerdict::StronglyEquivalent,
        Some(code) => {
            let (here, there) = masks(&ternary(code, n));
            EquivalenceVerdict::NotStronglyEquivalent(HtInterpretation {
                here: alpha.set(here),
                there: alpha.set(there),
            })
        }
    })
}

/// Checks `f1 ↔ f2` in every classical interpretation over the alphabet and
/// its primed copy that satisfies the axioms p → p′. Each atom is either
/// false in both copies (0), true only primed (1), or true in both (2).
pub fn classical_equiv_under_axioms(
    f1: &Formula,
    f2: &Formula,
    alphabet: &BTreeSet<GroundAtom>,
) -> Result<EquivalenceVerdict<ClassicalInterpretation>, OracleError> {
    let alpha = Alphabet::new(alphabet)?;
    let p1 = alpha.compile(f1, true)?;
    let p2 = alpha.compile(f2, true)?;
    let n = alphabet.len();
    let found = (0..count(n)).into_par_iter().find_first(|code| {
        let (plain, primed) = masks(&ternary(*code, n));
        p1.classical(plain, primed) != p2.classical(plain, primed)
    });
    Ok(match found {
        None => EquivalenceVerdict::StronglyEquivalent,
        Some(code) => {
            let (plain, primed) = masks(&ternary(code, n));
            EquivalenceVerdict::NotStronglyEquivalent(ClassicalInterpretation {
                plain: alpha.set(plain),
                primed: alpha.set(primed),
            })
        }
    })
}

/// Every ⟨H, T⟩ over the alphabet, in enumeration order.
pub fn all_ht_interpretations(alphabet: &BTreeSet<GroundAtom>) -> Result<Vec<HtInterpretation>, OracleError> {
    let alpha = Alphabet::new(alphabet)?;
    let n = alphabet.len();
    Ok((0..count(n))
        .map(|code| {
            let (here, there) = masks(&ternary(code, n));
            HtInterpretation {
                here: alpha.set(here),
                there: alpha.set(there),
            }
        })
        .collect())
}

/// Every subset of the alphabet and its primed copy (4^n of them).
pub fn all_classical_interpretations(
    alphabet: &BTreeSet<GroundAtom>,
) -> Result<Vec<ClassicalInterpretation>, OracleError> {
    let alpha = Alphabet::new(alphabet)?;
    let n = alphabet.len();
    if n > MAX_ALPHABET / 2 {
        return Err(OracleError::AlphabetTooLarge(n));
    }
    let full = 1u64 << n;
    let mut out = Vec::with_capacity((full * full) as usize);
    for plain in 0..full {
        for primed in 0..full {
            out.push(ClassicalInterpretation {
                plain: alpha.set(plain),
                primed: alpha.set(primed),
            });
        }
    }
    Ok(out)
}

/// Decides strong equivalence of two variable-free programs.
pub fn check_strong_equivalence_ground(
    p1: &Program,
    p2: &Program,
) -> Result<EquivalenceVerdict<HtInterpretation>, OracleError> {
    if !p1.is_ground() || !p2.is_ground() {
        return Err(OracleError::NotVariableFree);
    }
    let f1 = grounding::ground_program_formula(p1, &[])?;
    let f2 = grounding::ground_program_formula(p2, &[])?;
    let mut alphabet = atoms_of(&f1)?;
    alphabet.extend(atoms_of(&f2)?);
    ht_equivalent(&f1, &f2, &alphabet)
}

/// Result of instantiating programs with variables over a finite domain.
/// A refutation on the instances is only evidence, not a proof, that the
/// programs are not strongly equivalent, because the instances leave out
/// the rest of the universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedVerdict {
    pub domain: Vec<Value>,
    pub verdict: EquivalenceVerdict<HtInterpretation>,
}

/// Instantiates the rule variables with `domain` and compares the
/// instantiated programs in here-and-there.
pub fn check_strong_equivalence_bounded(
    p1: &Program,
    p2: &Program,
    domain: &[Value],
) -> Result<BoundedVerdict, OracleError> {
    let f1 = grounding::ground_program_formula(p1, domain)?;
    let f2 = grounding::ground_program_formula(p2, domain)?;
    let mut alphabet = atoms_of(&f1)?;
    alphabet.extend(atoms_of(&f2)?);
    Ok(BoundedVerdict {
        domain: domain.to_vec(),
        verdict: ht_equivalent(&f1, &f2, &alphabet)?,
    })
}

/// The unsimplified mapping, in which a negation keeps the here-world
/// copy: σ(¬ψ) = ¬σ(ψ) ∧ ¬ψ′. Only used to cross-check the simplified one.
pub fn sigma_unsimplified(f: &Formula, sig: &PrimedSignature) -> Result<Formula, OracleError> {
    Ok(match f {
        Formula::Truth | Formula::Falsity | Formula::Comparison { .. } => f.clone(),
        Formula::Atom(_) => {
            prime(f, sig)?;
            f.clone()
        }
        Formula::Not(g) => Formula::And(vec![
            Formula::not(sigma_unsimplified(g, sig)?),
            Formula::not(prime(g, sig)?),
        ]),
        Formula::And(gs) => Formula::And(
            gs.iter()
                .map(|g| sigma_unsimplified(g, sig))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Or(gs) => Formula::Or(
            gs.iter()
                .map(|g| sigma_unsimplified(g, sig))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Implies(a, b) => Formula::And(vec![
            Formula::implies(sigma_unsimplified(a, sig)?, sigma_unsimplified(b, sig)?),
            Formula::implies(prime(a, sig)?, prime(b, sig)?),
        ]),
        Formula::Iff(a, b) => {
            let forward = Formula::implies((**a).clone(), (**b).clone());
            let backward = Formula::implies((**b).clone(), (**a).clone());
            sigma_unsimplified(&Formula::And(vec![forward, backward]), sig)?
        }
        Formula::ForAll(vars, body) => {
            Formula::ForAll(vars.clone(), Box::new(sigma_unsimplified(body, sig)?))
        }
        Formula::Exists(vars, body) => {
            Formula::Exists(vars.clone(), Box::new(sigma_unsimplified(body, sig)?))
        }
    })
}

/// A pseudo-random propositional formula over the given atoms whose
/// logical complexity is at most `max_lc`. The same seed gives the same
/// formula.
pub fn random_formula(alphabet: &[GroundAtom], max_lc: usize, seed: u64) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = rng.gen_range(0..=max_lc);
    generate(&mut rng, alphabet, budget)
}

fn leaf(rng: &mut ChaCha8Rng, alphabet: &[GroundAtom]) -> Formula {
    let roll = rng.gen_range(0..10);
    if alphabet.is_empty() || roll == 0 {
        Formula::Truth
    } else if roll == 1 {
        Formula::Falsity
    } else {
        alphabet[rng.gen_range(0..alphabet.len())].to_formula(false)
    }
}

fn generate(rng: &mut ChaCha8Rng, alphabet: &[GroundAtom], budget: usize) -> Formula {
    if budget == 0 {
        return leaf(rng, alphabet);
    }
    let rest = budget - 1;
    match rng.gen_range(0..4) {
        0 => Formula::not(generate(rng, alphabet, rest)),
        kind => {
            let left = rng.gen_range(0..=rest);
            let a = generate(rng, alphabet, left);
            let b = generate(rng, alphabet, rest - left);
            match kind {
                1 => Formula::And(vec![a, b]),
                2 => Formula::Or(vec![a, b]),
                _ => Formula::implies(a, b),
            }
        }
    }
}

/// A pseudo-random formula shaped like the translation of a propositional
/// rule: up to three body literals (`p`, `not p`, `not not p`) implying an
/// atom, a choice `p ∨ ¬p`, or `⊥`.
pub fn random_rule_formula(alphabet: &[GroundAtom], seed: u64) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng| alphabet[rng.gen_range(0..alphabet.len())].to_formula(false);
    let body_len = rng.gen_range(0..=3);
    let body: Vec<Formula> = (0..body_len)
        .map(|_| {
            let atom = pick(&mut rng);
            match rng.gen_range(0..3) {
                0 => atom,
                1 => Formula::not(atom),
                _ => Formula::not(Formula::not(atom)),
            }
        })
        .collect();
    let head = match rng.gen_range(0..3) {
        0 => pick(&mut rng),
        1 => {
            let atom = pick(&mut rng);
            Formula::Or(vec![atom.clone(), Formula::not(atom)])
        }
        _ => Formula::Falsity,
    };
    Formula::implies(Formula::conjunction(body), head)
}

/// The propositional atoms `a1, ..., an`.
pub fn propositional_alphabet(n: usize) -> Vec<GroundAtom> {
    (1..=n).map(|i| GroundAtom::prop(format!("a{i}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ht_map::{sigma_star_def, PrimeStyle};
    use crate::parser::parse_program;

    fn atom(name: &str) -> GroundAtom {
        GroundAtom::prop(name)
    }
    fn set(names: &[&str]) -> BTreeSet<GroundAtom> {
        names.iter().map(|n| atom(n)).collect()
    }
    fn ht(h: &[&str], t: &[&str]) -> HtInterpretation {
        HtInterpretation::new(set(h), set(t)).unwrap()
    }
    fn p() -> Formula {
        Formula::prop("p")
    }
    fn q() -> Formula {
        Formula::prop("q")
    }
    fn primed(name: &str) -> Formula {
        atom(name).to_formula(true)
    }

    #[test]
    fn here_and_there_clauses() {
        assert!(!ht_satisfies(&ht(&[], &["p"]), &Formula::not(p())).unwrap());
        assert!(ht_satisfies(&ht(&["p"], &["p"]), &p()).unwrap());
        assert!(ht_satisfies(&ht(&[], &["p"]), &Formula::implies(p(), p())).unwrap());
        assert!(!ht_satisfies(&ht(&[], &["p"]), &p()).unwrap());
        // excluded middle fails in the gap
        let lem = Formula::Or(vec![p(), Formula::not(p())]);
        assert!(!ht_satisfies(&ht(&[], &["p"]), &lem).unwrap());
        assert!(!ht_satisfies(&ht(&[], &[]), &Formula::Falsity).unwrap());
    }

    #[test]
    fn h_must_be_subset_of_t() {
        assert_eq!(
            HtInterpretation::new(set(&["p"]), set(&[])),
            Err(OracleError::NotSubset(atom("p")))
        );
    }

    #[test]
    fn ht_rejects_non_propositional_input() {
        let x = crate::ast::Variable::program("X");
        let f = Formula::forall(vec![x.clone()], Formula::atom("p", vec![Term::var(&x)]));
        assert_eq!(ht_satisfies(&ht(&[], &[]), &f), Err(OracleError::Quantified));
        let c = Formula::equal(Term::Integer(1), Term::Integer(1));
        assert_eq!(ht_satisfies(&ht(&[], &[]), &c), Err(OracleError::Comparison));
    }

    #[test]
    fn classical_clauses() {
        let i = ClassicalInterpretation::unprimed(set(&["p"]));
        assert!(classical_satisfies(&i, &Formula::Or(vec![p(), q()])).unwrap());
        let empty = ClassicalInterpretation::default();
        assert!(!classical_satisfies(&empty, &Formula::implies(Formula::Truth, Formula::Falsity)).unwrap());
        let j = ClassicalInterpretation::new(set(&[]), set(&["p"]));
        assert!(classical_satisfies(&j, &Formula::And(vec![Formula::not(p()), primed("p")])).unwrap());
    }

    #[test]
    fn classical_correspondence_examples() {
        let i = to_classical(&ht(&["p"], &["p", "q"]));
        assert_eq!(i, ClassicalInterpretation::new(set(&["p"]), set(&["p", "q"])));
        let back = from_classical(&ClassicalInterpretation::new(set(&["p"]), set(&["p"]))).unwrap();
        assert_eq!(back, ht(&["p"], &["p"]));
        let bad = ClassicalInterpretation::unprimed(set(&["p"]));
        assert_eq!(from_classical(&bad), Err(OracleError::ViolatesAxioms(atom("p"))));
    }

    #[test]
    fn example_twelve_witness_is_first_in_order() {
        let a = parse_program("p :- q. p :- not q.").unwrap();
        let b = parse_program("p.").unwrap();
        let verdict = check_strong_equivalence_ground(&a, &b).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::NotStronglyEquivalent(ht(&[], &["p", "q"])));
    }

    #[test]
    fn example_fourteen_is_equivalent() {
        let a = parse_program("p :- q. :- not p, q.").unwrap();
        let b = parse_program("p :- q.").unwrap();
        assert!(check_strong_equivalence_ground(&a, &b).unwrap().is_equivalent());
    }

    #[test]
    fn reflexivity() {
        let f = Formula::implies(Formula::not(q()), p());
        assert!(ht_equivalent(&f, &f, &set(&["p", "q"])).unwrap().is_equivalent());
        assert!(classical_equiv_under_axioms(&f, &f, &set(&["p", "q"])).unwrap().is_equivalent());
    }

    #[test]
    fn primed_atom_is_separated_from_plain_one() {
        let verdict = classical_equiv_under_axioms(&p(), &primed("p"), &set(&["p"])).unwrap();
        assert_eq!(
            verdict,
            EquivalenceVerdict::NotStronglyEquivalent(ClassicalInterpretation::new(set(&[]), set(&["p"])))
        );
    }

    #[test]
    fn cost_guard() {
        let big: BTreeSet<GroundAtom> = (0..21).map(|i| atom(&format!("a{i}"))).collect();
        assert_eq!(ht_equivalent(&p(), &p(), &big), Err(OracleError::AlphabetTooLarge(21)));
    }

    #[test]
    fn atoms_must_belong_to_alphabet() {
        assert_eq!(
            ht_equivalent(&p(), &q(), &set(&["p"])),
            Err(OracleError::OutsideAlphabet(atom("q")))
        );
    }

    #[test]
    fn random_formulas_respect_the_bound_and_seed() {
        let alphabet = propositional_alphabet(3);
        for seed in 0..10_000 {
            let f = random_formula(&alphabet, 4, seed);
            assert!(f.logical_complexity().unwrap() <= 4);
        }
        for seed in 0..100 {
            let f = random_formula(&alphabet, 0, seed);
            assert_eq!(f.logical_complexity().unwrap(), 0);
        }
        assert_eq!(random_formula(&alphabet, 8, 42), random_formula(&alphabet, 8, 42));
    }

    #[test]
    fn persistence() {
        let alphabet = propositional_alphabet(3);
        let alpha: BTreeSet<GroundAtom> = alphabet.iter().cloned().collect();
        let interpretations = all_ht_interpretations(&alpha).unwrap();
        for seed in 0..300 {
            let f = random_formula(&alphabet, 6, seed);
            for i in &interpretations {
                if ht_satisfies(i, &f).unwrap() {
                    let total = HtInterpretation::total(i.there().clone());
                    assert!(ht_satisfies(&total, &f).unwrap(), "{f:?} at {i}");
                }
            }
        }
    }

    #[test]
    fn total_interpretations_are_classical() {
        let alphabet = propositional_alphabet(3);
        let alpha: BTreeSet<GroundAtom> = alphabet.iter().cloned().collect();
        for seed in 0..300 {
            let f = random_formula(&alphabet, 6, seed);
            for t in all_ht_interpretations(&alpha).unwrap() {
                let total = HtInterpretation::total(t.there().clone());
                let classical = ClassicalInterpretation::unprimed(t.there().clone());
                assert_eq!(
                    ht_satisfies(&total, &f).unwrap(),
                    classical_satisfies(&classical, &f).unwrap()
                );
            }
        }
    }

    #[test]
    fn unsimplified_and_simplified_mappings_agree_under_axioms() {
        let alphabet = propositional_alphabet(2);
        let alpha: BTreeSet<GroundAtom> = alphabet.iter().cloned().collect();
        let sig = PrimedSignature::new(
            &alphabet.iter().map(GroundAtom::signature).collect::<Vec<_>>(),
            PrimeStyle::Tick,
        );
        for seed in 0..300 {
            let f = random_formula(&alphabet, 6, seed);
            let a = sigma_unsimplified(&f, &sig).unwrap();
            let b = sigma_star_def(&f, &sig).unwrap();
            assert!(classical_equiv_under_axioms(&a, &b, &alpha).unwrap().is_equivalent());
        }
    }
}
