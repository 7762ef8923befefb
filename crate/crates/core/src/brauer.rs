//! `Br_nr,al` in the finite-field, local unramified, characteristic-zero and
//! real settings.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::abelian::{pairing, AbelianElement, AbelianGroup, SubgroupA};
use crate::cohomology::{
    character_module_finite, character_module_frobenius, h1_finite, h1_frobenius, sha1_cyc,
    CharacterModule, Cocycle, FrobeniusH1, H1Classes,
};
use crate::error::{Error, Result};
use crate::galois::{FiniteGaloisData, FrobeniusData, TwistMap};
use crate::group::{element_order, ElementId};
use crate::norms::{relevable_set, twisted_sum, GroupContext, NormTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fq,
    Char0,
    Real,
    LocalUnramified,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Fq => "fq",
            Mode::Char0 => "char0",
            Mode::Real => "real",
            Mode::LocalUnramified => "local_unramified",
        }
    }
}

/// Orthogonality check of one `m` in the local unramified setting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevableCertificate {
    pub m: u64,
    pub relevable: Vec<AbelianElement>,
    pub sums_checked: usize,
}

/// Orthogonality of surviving classes to the image of `G^{φ_σ}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealCertificate {
    pub fixed_points: usize,
    pub images_checked: usize,
    pub classes_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificates {
    None,
    Local(Vec<RelevableCertificate>),
    Real(RealCertificate),
}

/// Per-`σ` witnesses in characteristic zero.
#[derive(Debug, Clone)]
pub struct SigmaWitness {
    pub sigma: ElementId,
    pub fixed: SubgroupA,
    pub norms: SubgroupA,
}

#[derive(Debug, Clone)]
pub struct BrauerResult {
    pub mode: Mode,
    pub invariants: AbelianGroup,
    pub h1_invariants: AbelianGroup,
    pub fixed_subgroup: SubgroupA,
    pub norm_subgroup: SubgroupA,
    /// Generators of the surviving classes, each as its values on the
    /// generators of the Galois group (`a_s` alone in Frobenius modes).
    pub surviving_classes: Vec<Vec<AbelianElement>>,
    pub sha1cyc: Option<AbelianGroup>,
    pub per_sigma: Vec<SigmaWitness>,
    pub certificates: Certificates,
}

fn scaled_pairings(a: &AbelianGroup, c: &[u64], gens: &[AbelianElement]) -> Vec<u64> {
    let e = a.exponent();
    gens.iter()
        .map(|n| {
            let p = pairing(a, c, n);
            p.num() * (e / p.den())
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Finite fields

/// All intermediate objects of the finite-field computation.
#[derive(Debug, Clone)]
pub struct FqComputation {
    pub twist: TwistMap,
    pub norms: NormTable,
    pub fixed: SubgroupA,
    pub norm_subgroup: SubgroupA,
    pub quotient: AbelianGroup,
    pub module: CharacterModule,
    pub h1: FrobeniusH1,
    pub orthogonal: SubgroupA,
}

impl FqComputation {
    pub fn new(ctx: &GroupContext, data: &FrobeniusData) -> Result<Self> {
        let twist = data.twist(&ctx.group);
        let norms = NormTable::compute(ctx, &twist)?;
        let fixed = norms.fixed_subgroup();
        let norm_subgroup = norms.norm_subgroup();
        if !norm_subgroup.is_subgroup_of(&fixed) {
            return Err(Error::internal("norms are not fixed by the twist"));
        }
        let quotient = fixed.quotient_by(norm_subgroup.basis())?.group().clone();
        let module = character_module_frobenius(ctx, data);
        let h1 = h1_frobenius(&module);
        if h1.group().order() != fixed.order() {
            return Err(Error::internal(format!(
                "duality audit: |M0| = {} but the fixed subgroup has order {}",
                h1.group().order(),
                fixed.order()
            )));
        }
        let mut this = FqComputation {
            twist,
            norms,
            fixed,
            norm_subgroup,
            quotient,
            module,
            h1,
            orthogonal: SubgroupA::full(&[]),
        };
        this.orthogonal = this.orthogonal_complement(this.norm_subgroup.basis());
        if this.orthogonal.group() != &this.quotient {
            return Err(Error::internal(format!(
                "duality audit: orthogonal complement {} differs from quotient {}",
                this.orthogonal.group(),
                this.quotient
            )));
        }
        Ok(this)
    }

    /// Classes of `M₀` orthogonal to the given elements of `(G^ab)^φ`, in
    /// `M₀` coordinates.
    pub fn orthogonal_complement(&self, gens: &[AbelianElement]) -> SubgroupA {
        let m = self.module.group();
        let e = m.exponent();
        let codomain = vec![e; gens.len()];
        SubgroupA::full(self.h1.group().invariants())
            .kernel_of(&codomain, |y| scaled_pairings(m, &self.h1.rep(y), gens))
    }

    /// Whether the class of `a_s ∈ M` satisfies the norm criterion.
    pub fn survives(&self, a_s: &[u64]) -> bool {
        self.orthogonal.contains(&self.h1.class_of(a_s))
    }

    fn surviving_generators(&self) -> Vec<Vec<AbelianElement>> {
        self.orthogonal
            .canonical_generators()
            .iter()
            .map(|y| vec![self.h1.rep(y)])
            .collect()
    }
}

pub fn brnral_fq(ctx: &GroupContext, data: &FrobeniusData) -> Result<BrauerResult> {
    let comp = FqComputation::new(ctx, data)?;
    Ok(fq_result(Mode::Fq, &comp, Certificates::None))
}

fn fq_result(mode: Mode, comp: &FqComputation, certificates: Certificates) -> BrauerResult {
    BrauerResult {
        mode,
        invariants: comp.quotient.clone(),
        h1_invariants: comp.h1.group().clone(),
        fixed_subgroup: comp.fixed.clone(),
        norm_subgroup: comp.norm_subgroup.clone(),
        surviving_classes: comp.surviving_generators(),
        sha1cyc: None,
        per_sigma: Vec::new(),
        certificates,
    }
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Same group as [`brnral_fq`], with the orthogonality of every surviving
/// class to `Σ_{i<m} φ^i(G^ab_{q,m})` certified for each `m` dividing the
/// lcm of the norm lengths.
pub fn brnral_local_unramified(ctx: &GroupContext, data: &FrobeniusData) -> Result<BrauerResult> {
    let comp = FqComputation::new(ctx, data)?;
    let m_group = comp.module.group();
    let survivors: Vec<AbelianElement> = comp
        .orthogonal
        .canonical_generators()
        .iter()
        .map(|y| comp.h1.rep(y))
        .collect();
    let mut certs = Vec::new();
    for m in divisors(comp.norms.lcm_lengths()) {
        let relevable = relevable_set(ctx, &comp.norms.lengths, m);
        let sums: BTreeSet<AbelianElement> = relevable
            .iter()
            .map(|b| twisted_sum(&comp.norms.phi_ab, b, m))
            .collect();
        for c in &survivors {
            if sums.iter().any(|s| !pairing(m_group, c, s).is_zero()) {
                return Err(Error::internal(format!(
                    "surviving class fails orthogonality to relevable set for m = {m}"
                )));
            }
        }
        certs.push(RelevableCertificate {
            m,
            relevable,
            sums_checked: sums.len(),
        });
    }
    Ok(fq_result(Mode::LocalUnramified, &comp, Certificates::Local(certs)))
}

// ---------------------------------------------------------------------------
// Characteristic zero

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Char0Options {
    /// Check only the generators of an abelian `Γ′`.
    pub abelian_fast_path: bool,
}

/// All intermediate objects of the characteristic-zero computation.
#[derive(Debug, Clone)]
pub struct Char0Computation {
    pub module: CharacterModule,
    pub h1: H1Classes,
    /// Distinct norms of class representatives, per element of `Γ′`.
    pub norms: Vec<Vec<AbelianElement>>,
    pub tables: Vec<NormTable>,
    pub accepted: SubgroupA,
    pub sha: SubgroupA,
}

impl Char0Computation {
    pub fn new(ctx: &GroupContext, data: &FiniteGaloisData, opts: Char0Options) -> Result<Self> {
        let gamma = data.gamma();
        let module = character_module_finite(ctx, data)?;
        let h1 = h1_finite(gamma, &module)?;
        let tables: Vec<NormTable> = (0..gamma.order())
            .into_par_iter()
            .map(|s| NormTable::compute(ctx, &data.twist(&ctx.group, s)))
            .collect::<Result<_>>()?;
        let norms: Vec<Vec<AbelianElement>> = tables.iter().map(|t| t.distinct_norms()).collect();
        let bases: Vec<Vec<AbelianElement>> = tables
            .iter()
            .map(|t| t.norm_subgroup().basis().to_vec())
            .collect();
        let all: Vec<ElementId> = (0..gamma.order()).collect();
        let fast = opts.abelian_fast_path && data.is_abelian_gamma();
        let sigmas: &[ElementId] = if fast { gamma.generators() } else { &all };
        let accepted = accepted_classes(&h1, &bases, sigmas);
        if fast && cfg!(debug_assertions) {
            let full = accepted_classes(&h1, &bases, &all);
            if full.basis() != accepted.basis() {
                return Err(Error::internal("abelian fast path disagrees with the full check"));
            }
        }
        let sha = sha1_cyc(&h1);
        if !sha.is_subgroup_of(&accepted) {
            return Err(Error::internal("Sha1_cyc is not contained in the Brauer group"));
        }
        Ok(Char0Computation {
            module,
            h1,
            norms,
            tables,
            accepted,
            sha,
        })
    }

    /// The defining criterion evaluated on an arbitrary cocycle: the pairing
    /// of `a_σ` with `N_σ(b)` vanishes for every `σ` and every class.
    pub fn accepts(&self, a: &Cocycle) -> bool {
        let m = self.module.group();
        self.norms.iter().enumerate().all(|(s, ns)| {
            ns.iter().all(|n| pairing(m, a.value(s), n).is_zero())
        })
    }

    /// Accepted classes, as a subgroup of `H¹` in class coordinates.
    pub fn accepted(&self) -> &SubgroupA {
        &self.accepted
    }
}

fn accepted_classes(h1: &H1Classes, bases: &[Vec<AbelianElement>], sigmas: &[ElementId]) -> SubgroupA {
    let m = h1.module().group();
    let e = m.exponent();
    let width: usize = sigmas.iter().map(|&s| bases[s].len()).sum();
    SubgroupA::full(h1.group().invariants()).kernel_of(&vec![e; width], |y| {
        let a = h1.linear_rep(y);
        sigmas
            .iter()
            .flat_map(|&s| scaled_pairings(m, a.value(s), &bases[s]))
            .collect()
    })
}

fn char0_result(mode: Mode, ctx: &GroupContext, data: &FiniteGaloisData, comp: &Char0Computation) -> Result<BrauerResult> {
    let gamma = data.gamma();
    let invariants = comp.accepted.group().clone();
    let per_sigma: Vec<SigmaWitness> = gamma
        .generators()
        .iter()
        .map(|&s| SigmaWitness {
            sigma: s,
            fixed: comp.tables[s].fixed_subgroup(),
            norms: comp.tables[s].norm_subgroup(),
        })
        .collect();
    let (fixed_subgroup, norm_subgroup) = match per_sigma.first() {
        Some(w) => (w.fixed.clone(), w.norms.clone()),
        None => {
            let inv = ctx.ab.group().invariants();
            (SubgroupA::full(inv), SubgroupA::full(inv))
        }
    };
    let surviving_classes = comp
        .accepted
        .canonical_generators()
        .iter()
        .map(|y| {
            let a = comp.h1.rep(y);
            gamma.generators().iter().map(|&s| a.value(s).clone()).collect()
        })
        .collect();
    Ok(BrauerResult {
        mode,
        invariants,
        h1_invariants: comp.h1.group().clone(),
        fixed_subgroup,
        norm_subgroup,
        surviving_classes,
        sha1cyc: (mode == Mode::Char0).then(|| comp.sha.group().clone()),
        per_sigma,
        certificates: Certificates::None,
    })
}

pub fn brnral_char0(ctx: &GroupContext, data: &FiniteGaloisData) -> Result<BrauerResult> {
    brnral_char0_with(ctx, data, Char0Options::default())
}

pub fn brnral_char0_with(ctx: &GroupContext, data: &FiniteGaloisData, opts: Char0Options) -> Result<BrauerResult> {
    let comp = Char0Computation::new(ctx, data, opts)?;
    char0_result(Mode::Char0, ctx, data, &comp)
}

/// Characteristic-zero computation for `Γ′ = Z/2` with `q(σ) = −1`, plus a
/// certificate that every surviving class is orthogonal to the image of
/// `G^{φ_σ}` in `G^ab`.
pub fn brnral_real(ctx: &GroupContext, data: &FiniteGaloisData) -> Result<BrauerResult> {
    let gamma = data.gamma();
    if gamma.order() != 2 {
        return Err(Error::argument("real data needs a Galois group of order 2"));
    }
    let comp = Char0Computation::new(ctx, data, Char0Options::default())?;
    let mut result = char0_result(Mode::Real, ctx, data, &comp)?;
    let sigma = gamma.generators()[0];
    let twist = data.twist(&ctx.group, sigma);
    let mut fixed_points = 0;
    let mut images = BTreeSet::new();
    for b in 0..ctx.group.order() {
        if twist.apply(b) == b {
            fixed_points += 1;
            images.insert(ctx.ab.coset(b));
        }
    }
    let m = comp.module.group();
    let classes: Vec<AbelianElement> = comp
        .accepted
        .elements_or_generators(4096)
        .iter()
        .map(|y| comp.h1.rep(y).value(sigma).clone())
        .collect();
    for a in &classes {
        for &c in &images {
            if !pairing(m, a, ctx.ab.coset_coords(c)).is_zero() {
                return Err(Error::internal("surviving class is not orthogonal to the real points"));
            }
        }
    }
    result.certificates = Certificates::Real(RealCertificate {
        fixed_points,
        images_checked: images.len(),
        classes_checked: classes.len(),
    });
    Ok(result)
}

/// `F_σ / 𝒩_σ` for one element of `Γ′`.
pub fn twisted_quotient(ctx: &GroupContext, data: &FiniteGaloisData, sigma: ElementId) -> Result<AbelianGroup> {
    let table = NormTable::compute(ctx, &data.twist(&ctx.group, sigma))?;
    let fixed = table.fixed_subgroup();
    Ok(fixed.quotient_by(table.norm_subgroup().basis())?.group().clone())
}

/// A generator of `Γ′` if it is cyclic.
pub fn cyclic_generator(data: &FiniteGaloisData) -> Option<ElementId> {
    let gamma = data.gamma();
    (0..gamma.order()).find(|&g| element_order(gamma, g) as usize == gamma.order())
}
