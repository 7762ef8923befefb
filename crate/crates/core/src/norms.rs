//! Abelianization, norm lengths, twisted norms and the norm subgroup.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;

use crate::abelian::{
    AbelianElement, AbelianGroup, AbelianHom, Presentation, SubgroupA,
};
use crate::error::{Error, Result};
use crate::galois::TwistMap;
use crate::group::{derived_subgroup, exponent, ConjugacyData, ElementId, Group, Subgroup};

/// `G → G^ab` with `G^ab` in invariant-factor form.
#[derive(Debug, Clone)]
pub struct Abelianization {
    ab: AbelianGroup,
    derived: Subgroup,
    coset_of: Vec<u32>,
    coset_coords: Vec<AbelianElement>,
    basis_lifts: Vec<ElementId>,
}

pub fn abelianize(g: &Group) -> Abelianization {
    let derived = derived_subgroup(g);
    let n = g.order();
    const UNSET: u32 = u32::MAX;
    let mut coset_of = vec![UNSET; n];
    let mut coset_rep = Vec::new();
    for x in 0..n {
        if coset_of[x] != UNSET {
            continue;
        }
        let idx = coset_rep.len() as u32;
        coset_rep.push(x);
        for &d in derived.members() {
            coset_of[g.mul(x, d)] = idx;
        }
    }
    let cosets = coset_rep.len();
    let gens = g.generators();
    let k = gens.len();

    // Exponent vectors along a spanning tree of the coset graph, and the
    // Schreier relations `e(c) + u_j − e(c·g_j)`.
    let mut vec_of: Vec<Option<Vec<i128>>> = vec![None; cosets];
    let root = coset_of[g.identity()] as usize;
    vec_of[root] = Some(vec![0; k]);
    let mut queue = VecDeque::from([root]);
    let mut relations = Vec::new();
    while let Some(c) = queue.pop_front() {
        let x = coset_rep[c];
        let ec = vec_of[c].clone().unwrap();
        for (j, &s) in gens.iter().enumerate() {
            let t = coset_of[g.mul(x, s)] as usize;
            let mut cand = ec.clone();
            cand[j] += 1;
            match &vec_of[t] {
                None => {
                    vec_of[t] = Some(cand);
                    queue.push_back(t);
                }
                Some(et) => {
                    let rel: Vec<i128> = cand.iter().zip(et).map(|(a, b)| a - b).collect();
                    if rel.iter().any(|&r| r != 0) {
                        relations.push(rel);
                    }
                }
            }
        }
    }
    let pres = Presentation::new(&vec![cosets as u64; k], &relations);
    let ab = AbelianGroup::new(pres.invariants().to_vec()).expect("SNF yields a divisibility chain");
    let coset_coords: Vec<AbelianElement> = vec_of
        .iter()
        .map(|v| pres.to_coords(v.as_ref().unwrap()))
        .collect();
    let basis_lifts = (0..ab.rank())
        .map(|i| {
            let word = pres.from_coords(&ab.basis(i));
            word.iter().zip(gens).fold(g.identity(), |acc, (&e, &s)| {
                g.mul(acc, g.pow(s, e.rem_euclid(cosets as i128) as u64))
            })
        })
        .collect();
    Abelianization {
        ab,
        derived,
        coset_of,
        coset_coords,
        basis_lifts,
    }
}

impl Abelianization {
    pub fn group(&self) -> &AbelianGroup {
        &self.ab
    }

    pub fn derived(&self) -> &Subgroup {
        &self.derived
    }

    pub fn bar(&self, b: ElementId) -> &AbelianElement {
        &self.coset_coords[self.coset_of[b] as usize]
    }

    /// Index of the coset `b·G^der`.
    pub fn coset(&self, b: ElementId) -> usize {
        self.coset_of[b] as usize
    }

    pub fn coset_coords(&self, c: usize) -> &AbelianElement {
        &self.coset_coords[c]
    }

    /// An element of `G` mapping to the `i`-th standard generator of `G^ab`.
    pub fn basis_lift(&self, i: usize) -> ElementId {
        self.basis_lifts[i]
    }

    /// The endomorphism of `G^ab` induced by a map of `G` compatible with
    /// the derived subgroup.
    pub fn induced(&self, t: &TwistMap) -> AbelianHom {
        let images = (0..self.ab.rank())
            .map(|i| self.bar(t.apply(self.basis_lifts[i])).clone())
            .collect();
        AbelianHom::new(self.ab.clone(), self.ab.clone(), images)
            .expect("induced map on the abelianization is well defined")
    }
}

/// Everything derived from the group alone.
#[derive(Debug, Clone)]
pub struct GroupContext {
    pub group: Group,
    pub classes: ConjugacyData,
    pub ab: Abelianization,
    pub exponent: u64,
}

impl GroupContext {
    pub fn new(group: Group) -> Self {
        let classes = ConjugacyData::compute(&group);
        let ab = abelianize(&group);
        let exponent = exponent(&group, &classes);
        GroupContext {
            group,
            classes,
            ab,
            exponent,
        }
    }
}

/// The permutation a twist induces on conjugacy classes; fails if the
/// twist does not map classes to classes.
pub fn class_permutation(ctx: &GroupContext, t: &TwistMap) -> Result<Vec<usize>> {
    let cd = &ctx.classes;
    let perm: Vec<usize> = cd.reps().iter().map(|&r| cd.class_of(t.apply(r))).collect();
    for (c, &target) in perm.iter().enumerate() {
        if cd.members(c).iter().any(|&b| cd.class_of(t.apply(b)) != target) {
            return Err(Error::internal("twist does not permute conjugacy classes"));
        }
    }
    let mut hit = vec![false; perm.len()];
    for &p in &perm {
        if std::mem::replace(&mut hit[p], true) {
            return Err(Error::internal("twist is not injective on conjugacy classes"));
        }
    }
    Ok(perm)
}

pub fn cycle_lengths(perm: &[usize]) -> Vec<u64> {
    let mut out = vec![0u64; perm.len()];
    for start in 0..perm.len() {
        if out[start] != 0 {
            continue;
        }
        let mut cycle = vec![start];
        let mut x = perm[start];
        while x != start {
            cycle.push(x);
            x = perm[x];
            if cycle.len() > perm.len() {
                break;
            }
        }
        for &c in &cycle {
            out[c] = cycle.len() as u64;
        }
    }
    out
}

/// `Σ_{i<n} φ^i(β)` in `G^ab`.
pub fn twisted_sum(phi: &AbelianHom, beta: &[u64], n: u64) -> AbelianElement {
    let a = phi.domain();
    let mut acc = a.zero();
    let mut cur = beta.to_vec();
    for _ in 0..n {
        acc = a.add(&acc, &cur);
        cur = phi.apply(&cur);
    }
    acc
}

/// Norm lengths and norms on every conjugacy class for one twist.
#[derive(Debug, Clone)]
pub struct NormTable {
    pub phi_ab: AbelianHom,
    pub class_perm: Vec<usize>,
    pub lengths: Vec<u64>,
    pub norms: Vec<AbelianElement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormRecord {
    pub element: ElementId,
    pub length: u64,
    pub norm: AbelianElement,
}

impl NormTable {
    pub fn compute(ctx: &GroupContext, t: &TwistMap) -> Result<Self> {
        let phi_ab = ctx.ab.induced(t);
        let class_perm = class_permutation(ctx, t)?;
        let lengths = cycle_lengths(&class_perm);
        let norms = ctx
            .classes
            .reps()
            .par_iter()
            .zip(lengths.par_iter())
            .map(|(&b, &n)| twisted_sum(&phi_ab, ctx.ab.bar(b), n))
            .collect();
        Ok(NormTable {
            phi_ab,
            class_perm,
            lengths,
            norms,
        })
    }

    pub fn norm_length(&self, ctx: &GroupContext, b: ElementId) -> u64 {
        self.lengths[ctx.classes.class_of(b)]
    }

    pub fn norm(&self, ctx: &GroupContext, b: ElementId) -> NormRecord {
        let c = ctx.classes.class_of(b);
        NormRecord {
            element: b,
            length: self.lengths[c],
            norm: twisted_sum(&self.phi_ab, ctx.ab.bar(b), self.lengths[c]),
        }
    }

    /// `lcm` of all norm lengths.
    pub fn lcm_lengths(&self) -> u64 {
        self.lengths.iter().fold(1, |a, &b| crate::group::lcm(a, b))
    }

    /// Distinct norms of class representatives, in class order.
    pub fn distinct_norms(&self) -> Vec<AbelianElement> {
        let mut seen = BTreeSet::new();
        self.norms
            .iter()
            .filter(|n| seen.insert((*n).clone()))
            .cloned()
            .collect()
    }

    pub fn norm_subgroup(&self) -> SubgroupA {
        SubgroupA::generated(self.phi_ab.domain().invariants(), &self.distinct_norms())
    }

    pub fn fixed_subgroup(&self) -> SubgroupA {
        crate::abelian::fixed_subgroup(&self.phi_ab)
    }
}

pub fn norm_length(ctx: &GroupContext, t: &TwistMap, b: ElementId) -> Result<u64> {
    let perm = class_permutation(ctx, t)?;
    Ok(cycle_lengths(&perm)[ctx.classes.class_of(b)])
}

pub fn norm(ctx: &GroupContext, t: &TwistMap, b: ElementId) -> Result<NormRecord> {
    Ok(NormTable::compute(ctx, t)?.norm(ctx, b))
}

pub fn norm_subgroup(ctx: &GroupContext, t: &TwistMap) -> Result<SubgroupA> {
    Ok(NormTable::compute(ctx, t)?.norm_subgroup())
}

/// `G^ab_{q,n} = { b̄ : n_b | n }`, in sorted order.
pub fn relevable_set(ctx: &GroupContext, lengths: &[u64], n: u64) -> Vec<AbelianElement> {
    let mut cosets = BTreeSet::new();
    for (c, &len) in lengths.iter().enumerate() {
        if n % len == 0 {
            for &b in ctx.classes.members(c) {
                cosets.insert(ctx.ab.coset(b));
            }
        }
    }
    let set: BTreeSet<AbelianElement> = cosets
        .into_iter()
        .map(|c| ctx.ab.coset_coords(c).clone())
        .collect();
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::validate_frobenius;
    use crate::group::{abelian_from_invariants, close_generators, DemarcheGroup, DEFAULT_ELEMENT_CAP};
    use std::sync::Arc;

    fn s3() -> Group {
        close_generators(3, &[vec![1, 0, 2], vec![1, 2, 0]], DEFAULT_ELEMENT_CAP).unwrap()
    }

    fn check_bar_is_hom(ctx: &GroupContext) {
        let g = &ctx.group;
        let a = ctx.ab.group();
        for x in 0..g.order() {
            for &s in g.generators() {
                assert_eq!(ctx.ab.bar(g.mul(x, s)), &a.add(ctx.ab.bar(x), ctx.ab.bar(s)));
            }
        }
        for i in 0..a.rank() {
            assert_eq!(ctx.ab.bar(ctx.ab.basis_lift(i)), &a.basis(i));
        }
    }

    #[test]
    fn abelianization_examples() {
        let ctx = GroupContext::new(s3());
        assert_eq!(ctx.ab.group().invariants(), &[2]);
        check_bar_is_hom(&ctx);

        let ctx = GroupContext::new(abelian_from_invariants(&[2, 4], DEFAULT_ELEMENT_CAP).unwrap());
        assert_eq!(ctx.ab.group().invariants(), &[2, 4]);
        check_bar_is_hom(&ctx);
    }

    #[test]
    fn demarche_abelianization() {
        let ctx = GroupContext::new(Arc::new(DemarcheGroup::new(3, 1, DEFAULT_ELEMENT_CAP).unwrap()));
        assert_eq!(ctx.ab.group().invariants(), &[3, 9, 9]);
        assert_eq!(ctx.ab.derived().order(), 3);
        check_bar_is_hom(&ctx);
        assert_eq!(ctx.exponent, 9);
    }

    #[test]
    fn demarche_norms() {
        let d = DemarcheGroup::new(3, 1, DEFAULT_ELEMENT_CAP).unwrap();
        let x = d.x();
        let g: Group = Arc::new(d);
        let ctx = GroupContext::new(g.clone());
        let f = validate_frobenius(&g, 4, None).unwrap();
        let t = f.twist(&g);
        let table = NormTable::compute(&ctx, &t).unwrap();
        assert_eq!(table.norm_length(&ctx, x), 3);
        let a = ctx.ab.group();
        let rec = table.norm(&ctx, x);
        assert_eq!(rec.norm, a.scale(3, ctx.ab.bar(x)));
        assert_eq!(table.norm_length(&ctx, 0), 1);
        let n = table.norm_subgroup();
        assert_eq!(n.group().invariants(), &[3, 3]);
        assert!(n.is_subgroup_of(&table.fixed_subgroup()));
    }

    #[test]
    fn s3_norm_subgroup_is_fixed_group() {
        let g = s3();
        let ctx = GroupContext::new(g.clone());
        let t = validate_frobenius(&g, 5, None).unwrap().twist(&g);
        let table = NormTable::compute(&ctx, &t).unwrap();
        assert_eq!(table.norm_subgroup().order(), 2);
        assert_eq!(table.fixed_subgroup().order(), 2);
    }

    #[test]
    fn relevable_sets_are_monotone() {
        let g: Group = Arc::new(DemarcheGroup::new(3, 1, DEFAULT_ELEMENT_CAP).unwrap());
        let ctx = GroupContext::new(g.clone());
        let t = validate_frobenius(&g, 4, None).unwrap().twist(&g);
        let table = NormTable::compute(&ctx, &t).unwrap();
        let r1 = relevable_set(&ctx, &table.lengths, 1);
        let r3 = relevable_set(&ctx, &table.lengths, 3);
        assert!(r1.len() < r3.len());
        assert!(r1.iter().all(|x| r3.contains(x)));
        assert_eq!(r3.len() as u128, ctx.ab.group().order());
    }
}
