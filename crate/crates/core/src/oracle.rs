//! Independent verification paths: the relevable pairing criterion, brute
//! force `H¹` for cyclic Galois groups, and the differential suite.
//!
//! The relevable oracle works directly on group elements and never touches
//! the norm tables or any subgroup quotient of the main path.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{pairing, AbelianElement, AbelianGroup, SubgroupA};
use crate::brauer::{brnral_char0, brnral_real, cyclic_generator, twisted_quotient, FqComputation};
use crate::cohomology::{character_module_finite, h1_finite, CharacterModule, Cocycle, H1Classes};
use crate::corpus::CorpusCase;
use crate::error::{Error, Result};
use crate::galois::{real_data, validate_frobenius, FiniteGaloisData, FrobeniusData, TwistMap};
use crate::group::{element_order, lcm, ElementId, Group};
use crate::norms::GroupContext;

/// Largest module enumerated by [`h1_bruteforce`].
pub const BRUTEFORCE_MODULE_CAP: u128 = 10_000;
/// Largest `M₀` compared class by class.
pub const CLASS_COMPARISON_CAP: u128 = 100_000;

/// The `(q,n)`-relevable criterion for one Frobenius datum.
#[derive(Debug, Clone)]
pub struct RelevableOracle {
    module_group: AbelianGroup,
    lcm: u64,
    sums: BTreeSet<AbelianElement>,
}

impl RelevableOracle {
    /// Collects `Σ_{i<n} φ^i(b̄)` for every `n ≤ L` and every `b` whose twist
    /// orbit returns to its conjugacy class after a divisor of `n` steps.
    pub fn new(ctx: &GroupContext, data: &FrobeniusData) -> Result<Self> {
        let g = &ctx.group;
        let twist = data.twist(g);
        let ab = ctx.ab.group();
        let lengths: Vec<u64> = ctx
            .classes
            .reps()
            .iter()
            .map(|&b| return_time(ctx, &twist, b))
            .collect::<Result<_>>()?;
        let l = lengths.iter().fold(1, |acc, &n| lcm(acc, n));
        let per_element: Vec<BTreeSet<AbelianElement>> = (0..g.order())
            .into_par_iter()
            .map(|b| {
                let nb = lengths[ctx.classes.class_of(b)];
                let mut out = BTreeSet::new();
                let mut sum = ab.zero();
                let mut x = b;
                for n in 1..=l {
                    sum = ab.add(&sum, ctx.ab.bar(x));
                    x = twist.apply(x);
                    if n % nb == 0 {
                        out.insert(sum.clone());
                    }
                }
                out
            })
            .collect();
        let sums = per_element.into_iter().flatten().collect();
        Ok(RelevableOracle {
            module_group: ab.clone(),
            lcm: l,
            sums,
        })
    }

    pub fn lcm(&self) -> u64 {
        self.lcm
    }

    pub fn sums(&self) -> &BTreeSet<AbelianElement> {
        &self.sums
    }

    /// Whether the class of `c ∈ M` pairs trivially with every relevable sum.
    pub fn check(&self, c: &[u64]) -> bool {
        self.sums
            .iter()
            .all(|s| pairing(&self.module_group, c, s).is_zero())
    }
}

/// Smallest `n > 0` with `φⁿ(b)` conjugate to `b`, found by iterating.
fn return_time(ctx: &GroupContext, twist: &TwistMap, b: ElementId) -> Result<u64> {
    let target = ctx.classes.class_of(b);
    let mut x = twist.apply(b);
    let mut n = 1;
    while ctx.classes.class_of(x) != target {
        x = twist.apply(x);
        n += 1;
        if n > ctx.group.order() as u64 {
            return Err(Error::internal("twist orbit never returns to its class"));
        }
    }
    Ok(n)
}

pub fn relevable_oracle(ctx: &GroupContext, data: &FrobeniusData, c: &[u64]) -> Result<bool> {
    Ok(RelevableOracle::new(ctx, data)?.check(c))
}

/// `H¹` of a cyclic group by enumeration of the module.
#[derive(Debug, Clone)]
pub struct BruteH1 {
    pub sigma: ElementId,
    pub order: u64,
    /// Canonical representative of each class: the smallest `a_σ` in it.
    pub classes: Vec<AbelianElement>,
    /// Class index of every cocycle value `a_σ`.
    pub class_index: BTreeMap<AbelianElement, usize>,
    pub invariants: AbelianGroup,
}

/// Enumerates `Z = {a : Σ_{i<r} σⁱ a = 0}` and `B = {c − σc}` and forms the
/// cosets directly.
pub fn h1_bruteforce(gamma: &Group, module: &CharacterModule) -> Result<BruteH1> {
    let m = module.group();
    if m.order() > BRUTEFORCE_MODULE_CAP {
        return Err(Error::Resource(format!(
            "module of order {} exceeds the brute-force cap {BRUTEFORCE_MODULE_CAP}",
            m.order()
        )));
    }
    let (sigma, r) = if gamma.order() == 1 {
        (gamma.identity(), 1)
    } else {
        let s = (0..gamma.order())
            .find(|&x| element_order(gamma, x) as usize == gamma.order())
            .ok_or_else(|| Error::argument("brute-force H1 needs a cyclic Galois group"))?;
        (s, gamma.order() as u64)
    };
    let elements: Vec<AbelianElement> = m.elements().collect();
    let cocycles: Vec<AbelianElement> = elements
        .iter()
        .filter(|a| {
            let mut sum = m.zero();
            let mut x = (*a).clone();
            for _ in 0..r {
                sum = m.add(&sum, &x);
                x = module.act(sigma, &x);
            }
            m.is_zero(&sum)
        })
        .cloned()
        .collect();
    let boundaries: BTreeSet<AbelianElement> = elements
        .iter()
        .map(|c| m.sub(c, &module.act(sigma, c)))
        .collect();
    let mut class_index = BTreeMap::new();
    let mut classes = Vec::new();
    for a in &cocycles {
        if class_index.contains_key(a) {
            continue;
        }
        // cocycles are visited in increasing order, so `a` is the minimum
        let idx = classes.len();
        classes.push(a.clone());
        for b in &boundaries {
            class_index.insert(m.add(a, b), idx);
        }
    }
    let add = |i: usize, j: usize| class_index[&m.add(&classes[i], &classes[j])];
    let invariants = invariants_from_torsion(classes.len(), add)?;
    Ok(BruteH1 {
        sigma,
        order: r,
        classes,
        class_index,
        invariants,
    })
}

/// Invariant factors of a finite abelian group given only its addition on
/// indices `0..n` (index 0 the identity), from the sizes of its `p^k`-torsion.
fn invariants_from_torsion(n: usize, add: impl Fn(usize, usize) -> usize) -> Result<AbelianGroup> {
    let times = |x: usize, k: u64| -> usize {
        let mut acc = 0;
        for _ in 0..k {
            acc = add(acc, x);
        }
        acc
    };
    let mut primes = Vec::new();
    let mut rest = n as u64;
    let mut p = 2;
    while rest > 1 {
        if rest % p == 0 {
            primes.push(p);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    // for each prime, the exponents e_i of the p-primary cyclic factors
    let mut factors: Vec<Vec<u32>> = Vec::new();
    for &p in &primes {
        let mut counts = vec![1usize];
        let mut pk = 1u64;
        loop {
            pk *= p;
            let c = (0..n).filter(|&x| times(x, pk) == 0).count();
            if c == *counts.last().unwrap() {
                break;
            }
            counts.push(c);
        }
        // counts[k] = p^{Σ min(k, e_i)}; the number of e_i ≥ k is
        // log_p(counts[k] / counts[k−1])
        let log = |x: usize| -> u32 {
            let mut x = x as u64;
            let mut e = 0;
            while x > 1 {
                x /= p;
                e += 1;
            }
            e
        };
        let at_least: Vec<u32> = (1..counts.len()).map(|k| log(counts[k] / counts[k - 1])).collect();
        let mut exps = Vec::new();
        for (k, &cnt) in at_least.iter().enumerate() {
            let next = at_least.get(k + 1).copied().unwrap_or(0);
            for _ in 0..(cnt - next) {
                exps.push(k as u32 + 1);
            }
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        factors.push(exps);
    }
    let width = factors.iter().map(Vec::len).max().unwrap_or(0);
    let mut inv = vec![1u64; width];
    for (&p, exps) in primes.iter().zip(&factors) {
        for (i, &e) in exps.iter().enumerate() {
            inv[width - 1 - i] *= p.pow(e);
        }
    }
    AbelianGroup::new(inv.into_iter().filter(|&d| d > 1).collect())
}

/// The cocycle on all of `Γ′ = ⟨σ⟩` determined by `a_σ`.
fn cyclic_cocycle(gamma: &Group, module: &CharacterModule, sigma: ElementId, a: &[u64]) -> Cocycle {
    let m = module.group();
    let mut values = vec![m.zero(); gamma.order()];
    let mut g = gamma.identity();
    let mut acc = m.zero();
    let mut term = a.to_vec();
    for _ in 0..gamma.order() {
        values[g] = acc.clone();
        acc = m.add(&acc, &term);
        term = module.act(sigma, &term);
        g = gamma.mul(g, sigma);
    }
    Cocycle { values }
}

/// Compares brute force `H¹` with the main computation: equal invariants,
/// and the class map is a well defined additive bijection.
pub fn compare_h1(brute: &BruteH1, h1: &H1Classes) -> Vec<String> {
    let mut issues = Vec::new();
    if &brute.invariants != h1.group() {
        issues.push(format!(
            "invariants differ: brute force {} vs main {}",
            brute.invariants,
            h1.group()
        ));
        return issues;
    }
    let gamma = h1.gamma();
    let module = h1.module();
    let mut image: BTreeMap<AbelianElement, usize> = BTreeMap::new();
    let mut by_class: Vec<Option<AbelianElement>> = vec![None; brute.classes.len()];
    for (a, &idx) in &brute.class_index {
        let z = cyclic_cocycle(gamma, module, brute.sigma, a);
        let Some(y) = h1.class_of(&z) else {
            issues.push(format!("brute-force cocycle {a:?} rejected by the main path"));
            continue;
        };
        match &by_class[idx] {
            None => by_class[idx] = Some(y.clone()),
            Some(prev) if prev != &y => {
                issues.push(format!("class {idx} maps to both {prev:?} and {y:?}"));
            }
            _ => {}
        }
        if let Some(&other) = image.get(&y) {
            if other != idx {
                issues.push(format!("classes {other} and {idx} collide at {y:?}"));
            }
        } else {
            image.insert(y, idx);
        }
    }
    if image.len() as u128 != h1.group().order() {
        issues.push(format!(
            "class map hits {} of {} classes",
            image.len(),
            h1.group().order()
        ));
    }
    let hg = h1.group();
    let m = module.group();
    for i in 0..brute.classes.len() {
        for j in i..brute.classes.len() {
            let sum = brute.class_index[&m.add(&brute.classes[i], &brute.classes[j])];
            if let (Some(x), Some(y), Some(s)) = (&by_class[i], &by_class[j], &by_class[sum]) {
                if &hg.add(x, y) != s {
                    issues.push(format!("class map is not additive on classes {i} and {j}"));
                }
            }
        }
    }
    issues
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Invariants(Vec<u64>),
    Classes(Vec<bool>),
    Failed(String),
    Skipped(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub case: String,
    pub check: String,
    pub main_result: Outcome,
    pub oracle_result: Outcome,
    pub agreement: bool,
    pub divergence: Vec<String>,
}

impl OracleReport {
    fn new(case: String, check: &str, main: Outcome, oracle: Outcome, mut divergence: Vec<String>) -> Self {
        let agreement = main == oracle && divergence.is_empty();
        if main != oracle && divergence.is_empty() {
            divergence.push("main and oracle results differ".into());
        }
        OracleReport {
            case,
            check: check.into(),
            main_result: main,
            oracle_result: oracle,
            agreement,
            divergence,
        }
    }

    /// A check beyond the brute-force caps; counted as agreement.
    fn skipped(case: String, check: &str, reason: String) -> Self {
        OracleReport {
            case,
            check: check.into(),
            main_result: Outcome::Skipped(reason.clone()),
            oracle_result: Outcome::Skipped(reason),
            agreement: true,
            divergence: vec![],
        }
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self.main_result, Outcome::Skipped(_))
    }

    fn failed(case: String, check: &str, err: &Error) -> Self {
        let msg = err.to_string();
        OracleReport {
            case,
            check: check.into(),
            main_result: Outcome::Failed(msg.clone()),
            oracle_result: Outcome::Failed(msg.clone()),
            agreement: false,
            divergence: vec![msg],
        }
    }
}

/// Deliberate corruption of the main path, used to show the suite notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Generate the norm subgroup from one fewer element than it needs.
    TruncateNorms,
}

/// Compares the norm criterion with the relevable oracle on every class of
/// `M₀`. Returns per-class membership on both sides.
pub fn relevable_comparison(
    ctx: &GroupContext,
    data: &FrobeniusData,
    fault: Option<Fault>,
) -> Result<(Vec<bool>, Vec<bool>)> {
    let comp = FqComputation::new(ctx, data)?;
    let oracle = RelevableOracle::new(ctx, data)?;
    let m0 = comp.h1.group();
    if m0.order() > CLASS_COMPARISON_CAP {
        return Err(Error::Resource(format!(
            "M0 of order {} exceeds the comparison cap",
            m0.order()
        )));
    }
    let orthogonal = match fault {
        None => comp.orthogonal.clone(),
        Some(Fault::TruncateNorms) => {
            // a minimal generating subset, greedily, minus its last member
            let moduli = ctx.ab.group().invariants();
            let mut kept: Vec<AbelianElement> = Vec::new();
            for n in comp.norms.distinct_norms() {
                if !SubgroupA::generated(moduli, &kept).contains(&n) {
                    kept.push(n);
                }
            }
            kept.pop();
            comp.orthogonal_complement(&kept)
        }
    };
    let mut main = Vec::new();
    let mut brute = Vec::new();
    for y in m0.elements() {
        main.push(orthogonal.contains(&y));
        brute.push(oracle.check(&comp.h1.rep(&y)));
    }
    Ok((main, brute))
}

/// Relevable oracle against the norm criterion for one Frobenius datum.
pub fn frobenius_report(ctx: &GroupContext, id: String, data: &FrobeniusData, fault: Option<Fault>) -> OracleReport {
    match relevable_comparison(ctx, data, fault) {
        Ok((main, brute)) => {
            let bad: Vec<String> = main
                .iter()
                .zip(&brute)
                .enumerate()
                .filter(|(_, (a, b))| a != b)
                .map(|(i, (a, b))| format!("class {i}: norm criterion {a}, oracle {b}"))
                .collect();
            OracleReport::new(id, "relevable", Outcome::Classes(main), Outcome::Classes(brute), bad)
        }
        Err(Error::Resource(msg)) => OracleReport::skipped(id, "relevable", msg),
        Err(e) => OracleReport::failed(id, "relevable", &e),
    }
}

/// Checks for finite Galois data: brute force `H¹` and the quotient formula
/// when `Γ′` is cyclic, the real-point certificate in real mode, and the
/// `Sha¹_cyc ⊆ Br` audit otherwise.
pub fn finite_reports(ctx: &GroupContext, id: &str, data: &FiniteGaloisData, real: bool) -> Vec<OracleReport> {
    let mut reports = Vec::new();
    let main = if real { brnral_real(ctx, data) } else { brnral_char0(ctx, data) };
    let main = match main {
        Ok(r) => r,
        Err(e) => {
            reports.push(OracleReport::failed(id.to_string(), "brnral", &e));
            return reports;
        }
    };
    let inv = main.invariants.invariants().to_vec();
    if real {
        reports.push(OracleReport::new(
            id.to_string(),
            "real_orthogonality",
            Outcome::Invariants(inv.clone()),
            Outcome::Invariants(inv.clone()),
            vec![],
        ));
    }
    match cyclic_generator(data) {
        Some(sigma) => {
            reports.push(h1_report(ctx, data, id));
            reports.push(match twisted_quotient(ctx, data, sigma) {
                Ok(q) => OracleReport::new(
                    id.to_string(),
                    "char0_cyclic",
                    Outcome::Invariants(inv),
                    Outcome::Invariants(q.invariants().to_vec()),
                    vec![],
                ),
                Err(e) => OracleReport::failed(id.to_string(), "char0_cyclic", &e),
            });
        }
        // the main path audits Sha ⊆ Br itself and errors otherwise
        None => reports.push(OracleReport::new(
            id.to_string(),
            "char0_sha",
            Outcome::Invariants(inv.clone()),
            Outcome::Invariants(inv),
            vec![],
        )),
    }
    reports
}

fn run_case(case: &CorpusCase, fault: Option<Fault>) -> Vec<OracleReport> {
    let ctx = GroupContext::new(case.group.clone());
    let mut reports = Vec::new();
    for (q, action) in &case.frobenius {
        let id = format!("{}/fq/q={q}/{}", case.name, action.label());
        reports.push(match validate_frobenius(&case.group, *q, action.table()) {
            Ok(data) => frobenius_report(&ctx, id, &data, fault),
            Err(e) => OracleReport::failed(id, "relevable", &e),
        });
    }
    for c0 in &case.char0 {
        let id = format!("{}/char0/{}", case.name, c0.label());
        match c0.data(&case.group, ctx.exponent) {
            Ok(data) => reports.extend(finite_reports(&ctx, &id, &data, false)),
            Err(e) => reports.push(OracleReport::failed(id, "char0", &e)),
        }
    }
    for action in &case.real {
        let id = format!("{}/real/{}", case.name, action.label());
        match real_data(&case.group, ctx.exponent, action.table()) {
            Ok(data) => reports.extend(finite_reports(&ctx, &id, &data, true)),
            Err(e) => reports.push(OracleReport::failed(id, "real", &e)),
        }
    }
    reports
}

fn h1_report(ctx: &GroupContext, data: &FiniteGaloisData, id: &str) -> OracleReport {
    let res = character_module_finite(ctx, data).and_then(|module| {
        let main = h1_finite(data.gamma(), &module)?;
        let brute = h1_bruteforce(data.gamma(), &module)?;
        Ok((main, brute))
    });
    match res {
        Ok((main, brute)) => {
            let issues = compare_h1(&brute, &main);
            OracleReport::new(
                id.to_string(),
                "h1",
                Outcome::Invariants(main.group().invariants().to_vec()),
                Outcome::Invariants(brute.invariants.invariants().to_vec()),
                issues,
            )
        }
        Err(Error::Resource(msg)) => OracleReport::skipped(id.to_string(), "h1", msg),
        Err(e) => OracleReport::failed(id.to_string(), "h1", &e),
    }
}

/// Runs every check on every case, in parallel; reports keep corpus order.
pub fn differential_suite(corpus: &[CorpusCase], fault: Option<Fault>) -> Vec<OracleReport> {
    corpus
        .par_iter()
        .map(|c| run_case(c, fault))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}
