//! The character module `M = Hom(G^ab, Q/Z)` and its first cohomology.

use std::collections::VecDeque;

use crate::abelian::{
    quotient, AbelianElement, AbelianGroup, AbelianHom, Quotient, SubgroupA,
};
use crate::error::{Error, Result};
use crate::galois::{FiniteGaloisData, FrobeniusData};
use crate::group::{ElementId, Group};
use crate::norms::GroupContext;

pub const DEFAULT_GAMMA_CAP: usize = 256;

/// The action on `M` dual to a twist `φ` of `G^ab`, characterized by
/// `pairing(σ·c, β) = pairing(c, φ(β))`.
pub fn dual_action(phi: &AbelianHom) -> AbelianHom {
    let a = phi.domain();
    let d = a.invariants();
    let r = a.rank();
    // (σc)_i = Σ_j (d_i F_ij / d_j) c_j with F_ij the j-th coordinate of φ(e_i)
    let images = (0..r)
        .map(|j| {
            (0..r)
                .map(|i| {
                    let f = phi.images()[i][j] as u128;
                    ((d[i] as u128 * f / d[j] as u128) % d[i] as u128) as u64
                })
                .collect()
        })
        .collect();
    AbelianHom::new(a.clone(), a.clone(), images).expect("dual action is well defined")
}

/// `M` with the action of each element of the acting group.
#[derive(Debug, Clone)]
pub struct CharacterModule {
    group: AbelianGroup,
    actions: Vec<AbelianHom>,
}

impl CharacterModule {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn action(&self, sigma: ElementId) -> &AbelianHom {
        &self.actions[sigma]
    }

    pub fn act(&self, sigma: ElementId, c: &[u64]) -> AbelianElement {
        self.actions[sigma].apply(c)
    }
}

/// `M` for finite Galois data, with `σ` acting as the transpose of `φ_σ`.
pub fn character_module_finite(ctx: &GroupContext, data: &FiniteGaloisData) -> Result<CharacterModule> {
    let gamma = data.gamma();
    let actions: Vec<AbelianHom> = (0..gamma.order())
        .map(|s| dual_action(&ctx.ab.induced(&data.twist(&ctx.group, s))))
        .collect();
    for s in 0..gamma.order() {
        if !actions[s].is_bijective() {
            return Err(Error::internal("Galois action on M is not by automorphisms"));
        }
        for &t in gamma.generators() {
            if actions[gamma.mul(s, t)] != actions[s].compose(&actions[t]) {
                return Err(Error::internal("Galois action on M is not a homomorphism"));
            }
        }
    }
    Ok(CharacterModule {
        group: ctx.ab.group().dual(),
        actions,
    })
}

/// `M` with the Frobenius `s` as its only stored action (index 0).
pub fn character_module_frobenius(ctx: &GroupContext, data: &FrobeniusData) -> CharacterModule {
    let phi = ctx.ab.induced(&data.twist(&ctx.group));
    CharacterModule {
        group: ctx.ab.group().dual(),
        actions: vec![dual_action(&phi)],
    }
}

/// A cocycle given by its value on every element of `Γ′`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle {
    pub values: Vec<AbelianElement>,
}

impl Cocycle {
    pub fn value(&self, g: ElementId) -> &AbelianElement {
        &self.values[g]
    }

    pub fn is_cocycle(&self, gamma: &Group, m: &CharacterModule) -> bool {
        let a = m.group();
        (0..gamma.order()).all(|g| {
            (0..gamma.order()).all(|h| {
                self.values[gamma.mul(g, h)] == a.add(&self.values[g], &m.act(g, &self.values[h]))
            })
        })
    }

    pub fn add(&self, other: &Cocycle, m: &CharacterModule) -> Cocycle {
        Cocycle {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| m.group().add(x, y))
                .collect(),
        }
    }

    /// The coboundary `g ↦ c − g·c`.
    pub fn coboundary(gamma: &Group, m: &CharacterModule, c: &[u64]) -> Cocycle {
        Cocycle {
            values: (0..gamma.order())
                .map(|g| m.group().sub(c, &m.act(g, c)))
                .collect(),
        }
    }
}

pub fn cocycle_value(a: &Cocycle, g: ElementId) -> &AbelianElement {
    a.value(g)
}

/// Whether the restriction of `a` to `⟨g⟩` is a coboundary, i.e. whether
/// `a_g ∈ (g − 1)M`.
pub fn restriction_vanishes(m: &CharacterModule, g: ElementId, a: &Cocycle) -> bool {
    let image = g_minus_one_image(m, g);
    image.contains(a.value(g))
}

fn g_minus_one_image(m: &CharacterModule, g: ElementId) -> SubgroupA {
    let a = m.group();
    m.action(g).sub(&AbelianHom::identity(a)).image()
}

/// The class of `a|⟨g⟩` in `H¹(⟨g⟩, M) = ker(N_g) / (g − 1)M`, as
/// coordinates of `a_g` in `M / (g − 1)M`.
pub fn restrict_cyclic(m: &CharacterModule, g: ElementId, a: &Cocycle) -> AbelianElement {
    let q = quotient(m.group(), &g_minus_one_image(m, g));
    q.proj(a.value(g))
}

// ---------------------------------------------------------------------------
// H¹ for a finite group

type Block = Vec<Vec<i128>>;

/// `H¹(Γ′, M)` computed from unknowns `a_s` on the generators `s` of `Γ′`.
///
/// Each `a_γ` is expressed as a linear function of the unknowns along a
/// breadth-first spanning tree of the Cayley graph; every non-tree edge adds
/// the constraint `a_{γs} = a_γ + γ·a_s`, which suffices because every
/// element is a positive word in the generators.
#[derive(Debug, Clone)]
pub struct H1Classes {
    gamma: Group,
    module: CharacterModule,
    unknown_moduli: Vec<u64>,
    paths: Vec<Vec<Block>>,
    z1: SubgroupA,
    b1: SubgroupA,
    quotient: Quotient,
}

fn action_block(h: &AbelianHom) -> Block {
    let r = h.domain().rank();
    (0..r)
        .map(|i| (0..r).map(|j| h.images()[j][i] as i128).collect())
        .collect()
}

fn block_add(a: &Block, b: &Block, d: &[u64]) -> Block {
    a.iter()
        .zip(b)
        .zip(d)
        .map(|((x, y), &m)| x.iter().zip(y).map(|(p, q)| (p + q).rem_euclid(m as i128)).collect())
        .collect()
}

impl H1Classes {
    pub fn compute(gamma: &Group, module: &CharacterModule, cap: usize) -> Result<Self> {
        if gamma.order() > cap {
            return Err(Error::Resource(format!(
                "Galois group of order {} exceeds the cap of {cap}",
                gamma.order()
            )));
        }
        let a = module.group();
        let d = a.invariants();
        let r = a.rank();
        let gens = gamma.generators().to_vec();
        let k = gens.len();
        let unknown_moduli: Vec<u64> = (0..k).flat_map(|_| d.iter().copied()).collect();
        let zero: Block = vec![vec![0; r]; r];
        let blocks: Vec<Block> = (0..gamma.order()).map(|g| action_block(module.action(g))).collect();

        let mut paths: Vec<Option<Vec<Block>>> = vec![None; gamma.order()];
        paths[gamma.identity()] = Some(vec![zero.clone(); k]);
        let mut queue = VecDeque::from([gamma.identity()]);
        let mut z1 = SubgroupA::full(&unknown_moduli);
        let mut pending = Vec::new();
        while let Some(x) = queue.pop_front() {
            for (si, &s) in gens.iter().enumerate() {
                let y = gamma.mul(x, s);
                let mut cand = paths[x].clone().unwrap();
                cand[si] = block_add(&cand[si], &blocks[x], d);
                match &paths[y] {
                    None => {
                        paths[y] = Some(cand);
                        queue.push_back(y);
                    }
                    Some(existing) => {
                        if *existing != cand {
                            pending.push((existing.clone(), cand));
                        }
                    }
                }
            }
        }
        let paths: Vec<Vec<Block>> = paths.into_iter().map(|p| p.unwrap()).collect();
        for (lhs, rhs) in pending {
            let diff: Vec<Block> = lhs
                .iter()
                .zip(&rhs)
                .map(|(x, y)| {
                    x.iter()
                        .zip(y)
                        .zip(d)
                        .map(|((p, q), &m)| p.iter().zip(q).map(|(u, v)| (u - v).rem_euclid(m as i128)).collect())
                        .collect()
                })
                .collect();
            z1 = z1.kernel_of(d, |u| apply_blocks(&diff, u, d));
        }

        let b_gens: Vec<AbelianElement> = (0..r)
            .map(|i| {
                let c = a.basis(i);
                gens.iter()
                    .flat_map(|&s| a.sub(&c, &module.act(s, &c)))
                    .collect()
            })
            .collect();
        let b1 = SubgroupA::generated(&unknown_moduli, &b_gens);
        if !b1.is_subgroup_of(&z1) {
            return Err(Error::internal("coboundaries are not cocycles"));
        }
        let quotient = z1.quotient_by(b1.basis())?;
        Ok(H1Classes {
            gamma: gamma.clone(),
            module: module.clone(),
            unknown_moduli,
            paths,
            z1,
            b1,
            quotient,
        })
    }

    pub fn group(&self) -> &AbelianGroup {
        self.quotient.group()
    }

    pub fn gamma(&self) -> &Group {
        &self.gamma
    }

    pub fn module(&self) -> &CharacterModule {
        &self.module
    }

    pub fn z1_order(&self) -> u128 {
        self.z1.order()
    }

    pub fn b1_order(&self) -> u128 {
        self.b1.order()
    }

    /// The cocycle with prescribed values on the generators of `Γ′`.
    pub fn cocycle_from_generators(&self, u: &[u64]) -> Cocycle {
        let d = self.module.group().invariants();
        Cocycle {
            values: self.paths.iter().map(|p| apply_blocks(p, u, d)).collect(),
        }
    }

    fn generator_values(&self, a: &Cocycle) -> AbelianElement {
        self.gamma
            .generators()
            .iter()
            .flat_map(|&s| a.values[s].iter().copied())
            .collect()
    }

    /// A representative depending additively on the class coordinates.
    pub fn linear_rep(&self, y: &[u64]) -> Cocycle {
        let u = self.z1.from_coords(&self.quotient.lift(y));
        self.cocycle_from_generators(&u)
    }

    /// Canonical representative: lexicographically smallest generator values
    /// over the class when the coboundary group is small.
    pub fn rep(&self, y: &[u64]) -> Cocycle {
        let u = self.z1.from_coords(&self.quotient.lift(y));
        if self.b1.order() > 4096 {
            return self.cocycle_from_generators(&u);
        }
        let best = self
            .b1
            .elements()
            .into_iter()
            .map(|b| {
                u.iter()
                    .zip(&b)
                    .zip(&self.unknown_moduli)
                    .map(|((x, y), m)| (x + y) % m)
                    .collect::<Vec<u64>>()
            })
            .min()
            .unwrap_or(u);
        self.cocycle_from_generators(&best)
    }

    /// Class coordinates of a cocycle; `None` if it fails the cocycle identity.
    pub fn class_of(&self, a: &Cocycle) -> Option<AbelianElement> {
        let u = self.generator_values(a);
        if self.cocycle_from_generators(&u) != *a {
            return None;
        }
        let z = self.z1.to_coords(&u)?;
        Some(self.quotient.proj(&z))
    }

    /// Random coboundary built from a module element.
    pub fn coboundary(&self, c: &[u64]) -> Cocycle {
        Cocycle::coboundary(&self.gamma, &self.module, c)
    }
}

fn apply_blocks(blocks: &[Block], u: &[u64], d: &[u64]) -> Vec<u64> {
    let r = d.len();
    let mut out = vec![0i128; r];
    for (s, b) in blocks.iter().enumerate() {
        for i in 0..r {
            for j in 0..r {
                out[i] += b[i][j] * u[s * r + j] as i128;
            }
        }
    }
    out.iter()
        .zip(d)
        .map(|(&x, &m)| x.rem_euclid(m as i128) as u64)
        .collect()
}

pub fn h1_finite(gamma: &Group, module: &CharacterModule) -> Result<H1Classes> {
    H1Classes::compute(gamma, module, DEFAULT_GAMMA_CAP)
}

/// `Sha¹_cyc`: classes whose restriction to every cyclic subgroup vanishes,
/// as a subgroup of `H¹` in class coordinates.
pub fn sha1_cyc(h1: &H1Classes) -> SubgroupA {
    let m = h1.module();
    let gamma = h1.gamma();
    let quotients: Vec<Quotient> = (0..gamma.order())
        .map(|g| quotient(m.group(), &g_minus_one_image(m, g)))
        .collect();
    let codomain: Vec<u64> = quotients
        .iter()
        .flat_map(|q| q.group().invariants().iter().copied())
        .collect();
    SubgroupA::full(h1.group().invariants()).kernel_of(&codomain, |y| {
        let a = h1.linear_rep(y);
        quotients
            .iter()
            .enumerate()
            .flat_map(|(g, q)| q.proj(a.value(g)))
            .collect()
    })
}

// ---------------------------------------------------------------------------
// Finite fields

/// `H¹(F_q, M) ≅ M₀ = M / (s − 1)M`, a class being represented by `a_s`.
#[derive(Debug, Clone)]
pub struct FrobeniusH1 {
    module: CharacterModule,
    n0: SubgroupA,
    quotient: Quotient,
}

pub fn h1_frobenius(module: &CharacterModule) -> FrobeniusH1 {
    let n0 = g_minus_one_image(module, 0);
    let quotient = quotient(module.group(), &n0);
    FrobeniusH1 {
        module: module.clone(),
        n0,
        quotient,
    }
}

impl FrobeniusH1 {
    pub fn group(&self) -> &AbelianGroup {
        self.quotient.group()
    }

    pub fn module(&self) -> &CharacterModule {
        &self.module
    }

    /// `N₀ = (s − 1)M`.
    pub fn n0(&self) -> &SubgroupA {
        &self.n0
    }

    pub fn quotient(&self) -> &Quotient {
        &self.quotient
    }

    /// `a_s` for a class.
    pub fn rep(&self, y: &[u64]) -> AbelianElement {
        self.quotient.lift(y)
    }

    pub fn class_of(&self, a_s: &[u64]) -> AbelianElement {
        self.quotient.proj(a_s)
    }

    /// `a_{s^n} = Σ_{i<n} s^i·a_s`.
    pub fn value_at_power(&self, a_s: &[u64], n: u64) -> AbelianElement {
        let m = self.module.group();
        let mut acc = m.zero();
        let mut cur = a_s.to_vec();
        for _ in 0..n {
            acc = m.add(&acc, &cur);
            cur = self.module.act(0, &cur);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::pairing;
    use crate::galois::validate_frobenius;
    use crate::group::{abelian_from_invariants, DemarcheGroup, DEFAULT_ELEMENT_CAP};
    use std::sync::Arc;

    fn trivial_module(ds: &[u64], gamma: &Group) -> CharacterModule {
        let a = AbelianGroup::new(ds.to_vec()).unwrap();
        CharacterModule {
            actions: vec![AbelianHom::identity(&a); gamma.order()],
            group: a,
        }
    }

    fn cyclic(n: u64) -> Group {
        abelian_from_invariants(&[n], DEFAULT_ELEMENT_CAP).unwrap()
    }

    #[test]
    fn dual_action_examples() {
        let z3 = AbelianGroup::new(vec![3]).unwrap();
        let phi = AbelianHom::new(z3.clone(), z3, vec![vec![4 % 3]]).unwrap();
        assert_eq!(dual_action(&phi).apply(&[1]), vec![1]);
        let z7 = AbelianGroup::new(vec![7]).unwrap();
        // φ(β) = 3·2⁻¹β = 5β
        let phi = AbelianHom::new(z7.clone(), z7, vec![vec![5]]).unwrap();
        assert_eq!(dual_action(&phi).apply(&[1]), vec![5]);
    }

    #[test]
    fn dual_action_satisfies_pairing_identity() {
        let a = AbelianGroup::new(vec![2, 4, 12]).unwrap();
        let phi = AbelianHom::new(
            a.clone(),
            a.clone(),
            vec![vec![1, 2, 6], vec![0, 3, 3], vec![1, 1, 5]],
        )
        .unwrap();
        let act = dual_action(&phi);
        for c in a.elements() {
            for b in a.elements() {
                assert_eq!(pairing(&a, &act.apply(&c), &b), pairing(&a, &c, &phi.apply(&b)));
            }
        }
    }

    #[test]
    fn h1_finite_examples() {
        let z2 = cyclic(2);
        let h = h1_finite(&z2, &trivial_module(&[2], &z2)).unwrap();
        assert_eq!(h.group().invariants(), &[2]);

        let triv = trivial_group();
        let h = h1_finite(&triv, &trivial_module(&[2], &triv)).unwrap();
        assert!(h.group().is_trivial());

        let z3 = cyclic(3);
        let h = h1_finite(&z3, &trivial_module(&[2], &z3)).unwrap();
        assert!(h.group().is_trivial());
    }

    fn trivial_group() -> Group {
        crate::group::close_generators(1, &[vec![0]], DEFAULT_ELEMENT_CAP).unwrap()
    }

    #[test]
    fn h1_of_klein_four_on_z2() {
        let v4 = abelian_from_invariants(&[2, 2], DEFAULT_ELEMENT_CAP).unwrap();
        let m = trivial_module(&[2], &v4);
        let h = h1_finite(&v4, &m).unwrap();
        assert_eq!(h.group().invariants(), &[2, 2]);
        assert_eq!(sha1_cyc(&h).order(), 1);
    }

    #[test]
    fn representatives_are_cocycles_and_classes_round_trip() {
        let z4 = cyclic(4);
        let a = AbelianGroup::new(vec![4]).unwrap();
        let neg = AbelianHom::new(a.clone(), a.clone(), vec![vec![3]]).unwrap();
        let actions = (0..4)
            .map(|g| if g % 2 == 0 { AbelianHom::identity(&a) } else { neg.clone() })
            .collect();
        let m = CharacterModule { group: a, actions };
        let h = h1_finite(&z4, &m).unwrap();
        for y in h.group().elements() {
            let rep = h.rep(&y);
            assert!(rep.is_cocycle(&z4, &m));
            assert_eq!(h.class_of(&rep), Some(y.clone()));
            let shifted = rep.add(&h.coboundary(&[1]), &m);
            assert_eq!(h.class_of(&shifted), Some(y));
        }
    }

    #[test]
    fn restriction_to_subgroup_of_z4() {
        let z4 = cyclic(4);
        let m = trivial_module(&[2], &z4);
        let h = h1_finite(&z4, &m).unwrap();
        assert_eq!(h.group().order(), 2);
        let gen = z4.generators()[0];
        let sq = z4.mul(gen, gen);
        for y in h.group().elements() {
            let a = h.rep(&y);
            assert_eq!(restriction_vanishes(&m, sq, &a), a.value(sq) == &vec![0]);
            assert!(restriction_vanishes(&m, sq, &a));
        }
        assert!(restriction_vanishes(&m, gen, &h.rep(&[0])));
        assert!(!restriction_vanishes(&m, gen, &h.rep(&[1])));
    }

    #[test]
    fn frobenius_model() {
        let z5 = abelian_from_invariants(&[5], DEFAULT_ELEMENT_CAP).unwrap();
        let ctx = GroupContext::new(z5.clone());
        let f = validate_frobenius(&z5, 2, None).unwrap();
        let m = character_module_frobenius(&ctx, &f);
        assert_eq!(m.act(0, &[1]), vec![2]);
        assert!(h1_frobenius(&m).group().is_trivial());

        let f = validate_frobenius(&z5, 11, None).unwrap();
        let m = character_module_frobenius(&ctx, &f);
        assert_eq!(h1_frobenius(&m).group().invariants(), &[5]);

        let g: Group = Arc::new(DemarcheGroup::new(3, 1, DEFAULT_ELEMENT_CAP).unwrap());
        let ctx = GroupContext::new(g.clone());
        let f = validate_frobenius(&g, 4, None).unwrap();
        let m = character_module_frobenius(&ctx, &f);
        assert_eq!(h1_frobenius(&m).group().order(), 27);
    }
}
