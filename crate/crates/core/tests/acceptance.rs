//! Acceptance criteria 1 to 9, one PASS/FAIL line each.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use brnr::abelian::{pairing, SubgroupA};
use brnr::brauer::{
    brnral_char0, brnral_fq, brnral_real, Char0Computation, Char0Options, FqComputation,
};
use brnr::corpus::{automorphism_from_images, default_corpus, CorpusCase};
use brnr::galois::{ext_twist, prime_power, real_data, validate_frobenius, FiniteGaloisData};
use brnr::group::{
    abelian_from_invariants, element_order, gcd, inner_automorphism, DemarcheGroup, Group,
    DEFAULT_ELEMENT_CAP,
};
use brnr::norms::{norm, GroupContext};
use brnr::oracle::differential_suite;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn fq_invariants(g: &Group, q: u64) -> Result<Vec<u64>, String> {
    let ctx = GroupContext::new(g.clone());
    let data = validate_frobenius(g, q, None).map_err(err)?;
    Ok(brnral_fq(&ctx, &data).map_err(err)?.invariants.invariants().to_vec())
}

fn corpus() -> Vec<CorpusCase> {
    default_corpus(DEFAULT_ELEMENT_CAP).expect("default corpus builds")
}

fn criterion1() -> Verdict {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(err)?;
    let cases = [(3, 1, 4, vec![3], 1), (5, 1, 11, vec![5], 10), (3, 2, 19, vec![3], 60)];
    let mut notes = Vec::new();
    for (l, m, q, expect, limit) in cases {
        let start = Instant::now();
        let inv = pool.install(|| {
            let g: Group = Arc::new(DemarcheGroup::new(l, m, DEFAULT_ELEMENT_CAP).map_err(err)?);
            fq_invariants(&g, q)
        })?;
        let t = start.elapsed();
        ensure(inv == expect, format!("demarche({l},{m}) q={q}: got {inv:?}, want {expect:?}"))?;
        ensure(
            t < Duration::from_secs(limit),
            format!("demarche({l},{m}) q={q} took {t:?}, limit {limit}s"),
        )?;
        notes.push(format!("({l},{m},q={q})->{inv:?} in {:.2}s", t.as_secs_f64()));
    }
    Ok(notes.join(", "))
}

fn criterion2() -> Verdict {
    let d = DemarcheGroup::new(3, 1, DEFAULT_ELEMENT_CAP).map_err(err)?;
    let (x, y, z) = (d.x(), d.y(), d.z());
    let g: Group = Arc::new(d);
    let ctx = GroupContext::new(g.clone());
    let data = validate_frobenius(&g, 4, None).map_err(err)?;
    let comp = FqComputation::new(&ctx, &data).map_err(err)?;
    let ab = ctx.ab.group();
    ensure(ctx.ab.derived().order() == 3, "G^der is not of order 3")?;
    let der_gen = g.pow(z, 3);
    ensure(ctx.ab.derived().contains(der_gen), "z^3 does not lie in G^der")?;
    ensure(ab.invariants() == [3, 9, 9], format!("G^ab = {ab}"))?;
    ensure(comp.fixed.group().invariants() == [3, 3, 3], "fixed subgroup is not (Z/3)^3")?;
    let expected = SubgroupA::generated(
        ab.invariants(),
        &[ab.scale(3, ctx.ab.bar(x)), ab.scale(3, ctx.ab.bar(y)), ctx.ab.bar(z).clone()],
    );
    ensure(
        expected.is_subgroup_of(&comp.fixed) && comp.fixed.is_subgroup_of(&expected),
        "fixed subgroup differs from <x^3, y^3, z>",
    )?;
    let nx = norm(&ctx, &comp.twist, x).map_err(err)?;
    ensure(nx.length == 3, format!("n_x = {}", nx.length))?;
    ensure(nx.norm == ab.scale(3, ctx.ab.bar(x)), "N(x) differs from 3 x-bar")?;
    Ok(format!("G^der=Z/3, G^ab={ab}, fixed={}, n_x=3, N(x)=3x", comp.fixed.group()))
}

fn random_invariants(rng: &mut ChaCha8Rng) -> Vec<u64> {
    let k = rng.gen_range(1..=3);
    let mut d = rng.gen_range(2..=6u64);
    let mut inv = vec![d];
    for _ in 1..k {
        d *= rng.gen_range(1..=3u64);
        inv.push(d);
    }
    inv
}

fn random_automorphism(g: &Group, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    for _ in 0..200 {
        let images: Vec<usize> = g.generators().iter().map(|_| rng.gen_range(0..g.order())).collect();
        if let Ok(t) = automorphism_from_images(g, &images) {
            return Some(t);
        }
    }
    None
}

fn criterion3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let prime_powers: Vec<u64> = (2..64).filter(|&q| prime_power(q).is_some()).collect();
    let mut twisted = 0;
    for i in 0..25 {
        let inv = random_invariants(&mut rng);
        let g = abelian_from_invariants(&inv, DEFAULT_ELEMENT_CAP).map_err(err)?;
        let n = g.order() as u64;
        let choices: Vec<u64> = prime_powers.iter().copied().filter(|&q| gcd(q, n) == 1).collect();
        let q = choices[rng.gen_range(0..choices.len())];
        let action = random_automorphism(&g, &mut rng);
        twisted += usize::from(action.is_some());
        let ctx = GroupContext::new(g.clone());
        let data = validate_frobenius(&g, q, action).map_err(err)?;
        let r = brnral_fq(&ctx, &data).map_err(err)?;
        ensure(r.invariants.is_trivial(), format!("abelian case {i} {inv:?} q={q}: Br = {}", r.invariants))?;
    }
    let named = |name: &str| brnr::corpus::named_group(name, DEFAULT_ELEMENT_CAP).map_err(err);
    ensure(fq_invariants(&named("s3")?, 7)?.is_empty(), "S3 q=7 not trivial")?;
    ensure(fq_invariants(&named("heisenberg")?, 4)?.is_empty(), "Heisenberg q=4 not trivial")?;
    let f = named("frob21")?;
    let ctx = GroupContext::new(f.clone());
    let r = brnral_fq(&ctx, &validate_frobenius(&f, 2, None).map_err(err)?).map_err(err)?;
    ensure(r.invariants.is_trivial(), "Z/7xZ/3 q=2 not trivial")?;
    ensure(r.fixed_subgroup.order() == 1, "Z/7xZ/3 q=2 has a nontrivial fixed subgroup")?;
    Ok(format!("25 random abelian groups ({twisted} with random automorphisms), S3, Heisenberg, Z/7xZ/3 all trivial"))
}

fn criterion4() -> Verdict {
    let mut checked = 0;
    for case in corpus() {
        let ctx = GroupContext::new(case.group.clone());
        for (q, action) in &case.frobenius {
            let data = validate_frobenius(&case.group, *q, action.table()).map_err(err)?;
            let comp = FqComputation::new(&ctx, &data).map_err(|e| format!("{} q={q}: {e}", case.name))?;
            ensure(
                comp.h1.group().order() == comp.fixed.order(),
                format!("{} q={q}: |M0| != |fixed|", case.name),
            )?;
            ensure(
                comp.orthogonal.group() == &comp.quotient,
                format!("{} q={q}: orthogonal complement differs from quotient", case.name),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} Frobenius cases audited"))
}

fn criterion5() -> Verdict {
    let cases = corpus();
    ensure(cases.len() >= 12, "fewer than 12 corpus groups")?;
    ensure(cases.iter().all(|c| c.frobenius.len() >= 3), "a group has fewer than 3 Frobenius choices")?;
    let reports = differential_suite(&cases, None);
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| !r.agreement)
        .map(|r| format!("{} [{}]", r.case, r.check))
        .collect();
    ensure(bad.is_empty(), format!("disagreements: {}", bad.join(", ")))?;
    ensure(!reports.iter().any(|r| r.is_skipped()), "some checks were skipped")?;
    let relevable = reports.iter().filter(|r| r.check == "relevable").count();
    let h1 = reports.iter().filter(|r| r.check == "h1").count();
    Ok(format!("{} groups, {relevable} relevable comparisons, {h1} H1 comparisons, 0 disagreements", cases.len()))
}

fn criterion6() -> Verdict {
    let cases = corpus();
    let reports = differential_suite(&cases, None);
    let cyclic: Vec<_> = reports.iter().filter(|r| r.check == "char0_cyclic").collect();
    ensure(!cyclic.is_empty(), "no cyclic char0 cases")?;
    ensure(cyclic.iter().all(|r| r.agreement), "char0 differs from fixed/norms for cyclic Gamma")?;
    let mut sha_checked = 0;
    for case in &cases {
        let ctx = GroupContext::new(case.group.clone());
        for c0 in &case.char0 {
            let data = c0.data(&case.group, ctx.exponent).map_err(err)?;
            let comp = Char0Computation::new(&ctx, &data, Char0Options::default()).map_err(err)?;
            ensure(comp.sha.is_subgroup_of(&comp.accepted), format!("{}: Sha not in Br", case.name))?;
            sha_checked += 1;
        }
    }
    let d = brnr::corpus::named_group("demarche", DEFAULT_ELEMENT_CAP).map_err(err)?;
    let ctx = GroupContext::new(d.clone());
    let gamma = abelian_from_invariants(&[3], DEFAULT_ELEMENT_CAP).map_err(err)?;
    let mut cyclo = vec![None; 3];
    cyclo[gamma.generators()[0]] = Some(4);
    let data = FiniteGaloisData::new(&d, ctx.exponent, gamma, &[None, None, None], &cyclo).map_err(err)?;
    let r = brnral_char0(&ctx, &data).map_err(err)?;
    ensure(r.sha1cyc.as_ref().is_some_and(|s| s.is_trivial()), "demarche char0 Sha is nonzero")?;
    ensure(r.invariants.order() == 3, format!("demarche char0 Br = {}", r.invariants))?;
    ensure(
        r.invariants.invariants() == fq_invariants(&d, 4)?,
        "demarche char0 differs from the F_q computation",
    )?;
    Ok(format!(
        "{} cyclic cases match fixed/norms, Sha in Br on {sha_checked} cases, demarche char0 Br=Z/3 (ceil(m/2)=1), Sha=0",
        cyclic.len()
    ))
}

fn criterion7() -> Verdict {
    let mut classes = 0;
    let mut cases_seen = 0;
    for case in corpus() {
        let ctx = GroupContext::new(case.group.clone());
        for action in &case.real {
            let data = real_data(&case.group, ctx.exponent, action.table()).map_err(err)?;
            let r = brnral_real(&ctx, &data).map_err(err)?;
            let sigma = data.gamma().generators()[0];
            let twist = data.twist(&case.group, sigma);
            let ab = ctx.ab.group();
            for a in &r.surviving_classes {
                for b in (0..case.group.order()).filter(|&b| twist.apply(b) == b) {
                    ensure(
                        pairing(ab, &a[0], ctx.ab.bar(b)).is_zero(),
                        format!("{}: surviving class pairs nontrivially with a real point", case.name),
                    )?;
                }
                classes += 1;
            }
            cases_seen += 1;
        }
    }
    Ok(format!("{cases_seen} real cases, {classes} surviving generators, 0 violations"))
}

fn criterion8() -> Verdict {
    let mut groups = Vec::new();
    for case in corpus() {
        let g = &case.group;
        let abelian = g.generators().iter().all(|&a| g.generators().iter().all(|&b| g.mul(a, b) == g.mul(b, a)));
        if abelian {
            continue;
        }
        let ctx = GroupContext::new(g.clone());
        let q = case.frobenius[0].0;
        let constant = fq_invariants(g, q)?;
        for &c in g.generators() {
            let data = validate_frobenius(g, q, Some(inner_automorphism(g, c))).map_err(err)?;
            let twisted = brnral_fq(&ctx, &data).map_err(err)?;
            ensure(
                twisted.invariants.invariants() == constant,
                format!("{} q={q}: inner twist by {} changes Br", case.name, g.label(c)),
            )?;
        }
        if let Some(c) = (1..g.order()).find(|&c| element_order(g, c) == 2) {
            let gamma = abelian_from_invariants(&[2], DEFAULT_ELEMENT_CAP).map_err(err)?;
            let s = gamma.generators()[0];
            let acts = ext_twist(g, &gamma, &[c]).map_err(err)?;
            let mut cyc = vec![None; 2];
            cyc[s] = Some(-1);
            let mut twisted_acts = vec![None; 2];
            twisted_acts[s] = Some(acts[s].clone());
            let a = FiniteGaloisData::new(g, ctx.exponent, gamma.clone(), &[None, None], &cyc).map_err(err)?;
            let b = FiniteGaloisData::new(g, ctx.exponent, gamma, &twisted_acts, &cyc).map_err(err)?;
            let ra = brnral_char0(&ctx, &a).map_err(err)?;
            let rb = brnral_char0(&ctx, &b).map_err(err)?;
            ensure(ra.invariants == rb.invariants, format!("{}: ext-twisted char0 differs", case.name))?;
        }
        groups.push(case.name.clone());
    }
    ensure(groups.len() >= 5, format!("only {} groups checked", groups.len()))?;
    Ok(format!("{} groups: {}", groups.len(), groups.join(", ")))
}

fn criterion9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut runs = 0usize;
    let mut cases_seen = 0;
    for case in corpus() {
        let ctx = GroupContext::new(case.group.clone());
        let mut data = Vec::new();
        for c0 in &case.char0 {
            data.push(c0.data(&case.group, ctx.exponent).map_err(err)?);
        }
        for a in &case.real {
            data.push(real_data(&case.group, ctx.exponent, a.table()).map_err(err)?);
        }
        for d in &data {
            let comp = Char0Computation::new(&ctx, d, Char0Options::default()).map_err(err)?;
            let m = comp.module.group().clone();
            let classes = comp.h1.group().elements().take(64).collect::<Vec<_>>();
            for _ in 0..100 {
                for y in &classes {
                    let c: Vec<u64> = m.invariants().iter().map(|&k| rng.gen_range(0..k)).collect();
                    let z = comp.h1.rep(y).add(&comp.h1.coboundary(&c), &comp.module);
                    ensure(comp.h1.class_of(&z).as_ref() == Some(y), format!("{}: class changed", case.name))?;
                    ensure(
                        comp.accepts(&z) == comp.accepted().contains(y),
                        format!("{}: acceptance depends on the representative", case.name),
                    )?;
                    runs += 1;
                }
            }
            cases_seen += 1;
        }
    }
    let jobs: [&[&str]; 3] = [
        &["compute", "--group", "demarche", "--galois", r#"{"mode":"fq","q":4}"#, "--witnesses", "--oracle"],
        &["compute", "--group", "s4", "--galois",
          r#"{"mode":"char0","gamma":{"kind":"abelian","invariants":[2,2]},"cyclo":{"[1,0]":5,"[0,1]":7},"action":{"[0,1]":{"inner":[1,0,2,3]}}}"#,
          "--witnesses", "--oracle"],
        &["verify"],
    ];
    for job in jobs {
        let run = |threads: &str| {
            Command::new(env!("CARGO_BIN_EXE_brnr"))
                .args(["--threads", threads])
                .args(job)
                .output()
                .map_err(err)
        };
        let (one, eight) = (run("1")?, run("8")?);
        ensure(one.status.success() && eight.status.success(), format!("{job:?} failed"))?;
        ensure(one.stdout == eight.stdout, format!("{job:?}: output differs between 1 and 8 threads"))?;
    }
    Ok(format!("{cases_seen} char0/real cases, {runs} randomized re-runs, threads 1 vs 8 byte-identical on 3 jobs"))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("Demarche example over F_q", criterion1),
        ("Demarche intermediate witnesses", criterion2),
        ("triviality battery", criterion3),
        ("duality audit", criterion4),
        ("oracle equivalence", criterion5),
        ("char-0 consistency", criterion6),
        ("real-place orthogonality", criterion7),
        ("ext-twist invariance", criterion8),
        ("representative independence and determinism", criterion9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
