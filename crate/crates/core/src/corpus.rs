//! Named groups and the default verification corpus.

use crate::error::{Error, Result};
use crate::group::{
    abelian_from_invariants, close_generators, demarche_group, direct_product, element_order,
    hom_from_generator_images, inner_automorphism, semidirect_product, AbelianBackend, ElementId,
    Group, DEFAULT_ELEMENT_CAP,
};
use crate::galois::FiniteGaloisData;

pub fn symmetric(n: usize, cap: usize) -> Result<Group> {
    let mut transposition: Vec<usize> = (0..n).collect();
    transposition.swap(0, 1);
    let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    close_generators(n, &[transposition, cycle], cap)
}

pub fn dihedral4(cap: usize) -> Result<Group> {
    close_generators(4, &[vec![1, 2, 3, 0], vec![2, 1, 0, 3]], cap)
}

pub fn alternating4(cap: usize) -> Result<Group> {
    close_generators(4, &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]], cap)
}

/// `Q₈` in its regular representation on `{±1, ±i, ±j, ±k}`, generated by
/// left multiplication with `i` and `j`.
pub fn quaternion(cap: usize) -> Result<Group> {
    // unit u ∈ {1,i,j,k} and sign; point index = 2·u + (sign < 0)
    const TABLE: [[(usize, bool); 4]; 4] = [
        [(0, false), (1, false), (2, false), (3, false)],
        [(1, false), (0, true), (3, false), (2, true)],
        [(2, false), (3, true), (0, true), (1, false)],
        [(3, false), (2, false), (1, true), (0, true)],
    ];
    let left = |u: usize| -> Vec<usize> {
        (0..8)
            .map(|p| {
                let (v, neg) = (p / 2, p % 2 == 1);
                let (w, s) = TABLE[u][v];
                2 * w + usize::from(s ^ neg)
            })
            .collect()
    };
    close_generators(8, &[left(1), left(2)], cap)
}

/// The Heisenberg group of order `p³` as `(Z/p × Z/p) ⋊ Z/p`.
pub fn heisenberg(p: u64, cap: usize) -> Result<Group> {
    let n = AbelianBackend::new(&[p, p], cap)?;
    let images = vec![n.element(&[1, 1]), n.element(&[0, 1])];
    let h = abelian_from_invariants(&[p], cap)?;
    semidirect_product(std::sync::Arc::new(n), h, &[images], cap)
}

/// `Z/p ⋊ Z/r` with the generator acting as multiplication by `a`.
pub fn metacyclic(p: u64, r: u64, a: u64, cap: usize) -> Result<Group> {
    let n = abelian_from_invariants(&[p], cap)?;
    let h = abelian_from_invariants(&[r], cap)?;
    semidirect_product(n, h, &[vec![a as ElementId]], cap)
}

pub fn frob21(cap: usize) -> Result<Group> {
    metacyclic(7, 3, 2, cap)
}

/// Looks up a named group.
pub fn named_group(name: &str, cap: usize) -> Result<Group> {
    match name {
        "s3" => symmetric(3, cap),
        "s4" => symmetric(4, cap),
        "d4" => dihedral4(cap),
        "q8" => quaternion(cap),
        "a4" => alternating4(cap),
        "heisenberg" | "heisenberg3" => heisenberg(3, cap),
        "heisenberg5" => heisenberg(5, cap),
        "demarche" => demarche_group(3, 1, cap),
        "frob21" => frob21(cap),
        "frob20" => metacyclic(5, 4, 2, cap),
        "z8z4" => metacyclic(8, 4, 3, cap),
        "s3xz2" => direct_product(symmetric(3, cap)?, abelian_from_invariants(&[2], cap)?, cap),
        _ => Err(Error::argument(format!("unknown named group '{name}'"))),
    }
}

pub const NAMED_GROUPS: &[&str] = &[
    "s3", "s4", "d4", "q8", "a4", "heisenberg", "heisenberg5", "demarche", "frob21", "frob20",
    "z8z4", "s3xz2",
];

/// An automorphism given by generator images, extended and verified.
pub fn automorphism_from_images(g: &Group, images: &[ElementId]) -> Result<Vec<ElementId>> {
    let table = hom_from_generator_images(g, g, images)?;
    if !crate::group::is_bijection(&table) {
        return Err(Error::argument("generator images do not define an automorphism"));
    }
    Ok(table)
}

/// Inversion, an automorphism of abelian groups.
pub fn inversion(g: &Group) -> Vec<ElementId> {
    (0..g.order()).map(|x| g.inv(x)).collect()
}

/// The Frobenius action in a corpus case.
#[derive(Debug, Clone)]
pub enum Action {
    Trivial,
    Table(String, Vec<ElementId>),
}

impl Action {
    pub fn label(&self) -> &str {
        match self {
            Action::Trivial => "trivial",
            Action::Table(l, _) => l,
        }
    }

    pub fn table(&self) -> Option<Vec<ElementId>> {
        match self {
            Action::Trivial => None,
            Action::Table(_, t) => Some(t.clone()),
        }
    }
}

/// Characteristic-zero data with `Γ′ = ⊕ Z/dᵢ`; generator `i` acts through
/// `action[i]` with cyclotomic value `cyclo[i]`.
#[derive(Debug, Clone)]
pub struct Char0Case {
    pub gamma: Vec<u64>,
    pub cyclo: Vec<i64>,
    pub action: Vec<Action>,
}

impl Char0Case {
    pub fn cyclic(order: u64, cyclo: i64, action: Action) -> Self {
        if order == 1 {
            return Char0Case { gamma: vec![], cyclo: vec![], action: vec![] };
        }
        Char0Case { gamma: vec![order], cyclo: vec![cyclo], action: vec![action] }
    }

    pub fn is_cyclic(&self) -> bool {
        self.gamma.len() <= 1
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .gamma
            .iter()
            .zip(&self.cyclo)
            .zip(&self.action)
            .map(|((d, u), a)| format!("Z/{d}:{u}:{}", a.label()))
            .collect();
        if parts.is_empty() {
            "trivial".into()
        } else {
            parts.join(",")
        }
    }

    pub fn data(&self, g: &Group, exponent: u64) -> Result<FiniteGaloisData> {
        let gamma = abelian_from_invariants(&self.gamma, DEFAULT_ELEMENT_CAP)?;
        let mut actions = vec![None; gamma.order()];
        let mut cyclo = vec![None; gamma.order()];
        for (i, &s) in gamma.generators().iter().enumerate() {
            actions[s] = self.action[i].table();
            cyclo[s] = Some(self.cyclo[i]);
        }
        FiniteGaloisData::new(g, exponent, gamma, &actions, &cyclo)
    }
}

#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub name: String,
    pub group: Group,
    pub frobenius: Vec<(u64, Action)>,
    pub char0: Vec<Char0Case>,
    pub real: Vec<Action>,
}

fn mult_order(u: u64, n: u64) -> u64 {
    if n <= 1 {
        return 1;
    }
    let mut x = u % n;
    let mut k = 1;
    while x != 1 {
        x = x * u % n;
        k += 1;
    }
    k
}

/// An element `c ≠ 1` with `c^r = 1`, smallest id first.
fn element_killed_by(g: &Group, r: u64) -> Option<ElementId> {
    (1..g.order()).find(|&c| r % element_order(g, c) == 0)
}

fn build_case(name: &str, group: Group, qs: &[u64], extra: Vec<(u64, Action)>) -> CorpusCase {
    let mut frobenius: Vec<(u64, Action)> = qs.iter().map(|&q| (q, Action::Trivial)).collect();
    frobenius.extend(extra);
    let n = {
        let cd = crate::group::ConjugacyData::compute(&group);
        crate::group::exponent(&group, &cd)
    };
    let mut char0 = Vec::new();
    let mut real = vec![Action::Trivial];
    let abelian = group
        .generators()
        .iter()
        .all(|&a| group.generators().iter().all(|&b| group.mul(a, b) == group.mul(b, a)));
    if abelian {
        real.push(Action::Table("inversion".into(), inversion(&group)));
    } else if let Some(c) = element_killed_by(&group, 2) {
        real.push(Action::Table(format!("inner({})", group.label(c)), inner_automorphism(&group, c)));
    }
    // units of maximal multiplicative order, and −1
    let units: Vec<u64> = (2..n.max(2)).filter(|&u| crate::group::gcd(u, n) == 1).collect();
    let best = units.iter().copied().max_by_key(|&u| (mult_order(u, n), std::cmp::Reverse(u)));
    let mut cyclos: Vec<i64> = vec![-1];
    if let Some(u) = best {
        if (u as i64) != n as i64 - 1 {
            cyclos.push(u as i64);
        }
    }
    for &u in &cyclos {
        let r = mult_order(u.rem_euclid(n as i64) as u64, n).max(1);
        char0.push(Char0Case::cyclic(r, u, Action::Trivial));
        if let Some(c) = element_killed_by(&group, r) {
            if !abelian {
                let act = Action::Table(format!("inner({})", group.label(c)), inner_automorphism(&group, c));
                char0.push(Char0Case::cyclic(r, u, act));
            }
        }
        if abelian && r % 2 == 0 {
            char0.push(Char0Case::cyclic(r, u, Action::Table("inversion".into(), inversion(&group))));
        }
    }
    // a Klein four Galois group when the exponent admits two independent
    // square roots of unity
    let roots: Vec<u64> = units.iter().copied().filter(|&u| u * u % n == 1).collect();
    if roots.len() >= 3 {
        let second = if abelian {
            Action::Table("inversion".into(), inversion(&group))
        } else if let Some(c) = element_killed_by(&group, 2) {
            Action::Table(format!("inner({})", group.label(c)), inner_automorphism(&group, c))
        } else {
            Action::Trivial
        };
        char0.push(Char0Case {
            gamma: vec![2, 2],
            cyclo: vec![roots[0] as i64, roots[1] as i64],
            action: vec![Action::Trivial, second],
        });
    }
    CorpusCase {
        name: name.to_string(),
        group,
        frobenius,
        char0,
        real,
    }
}

/// The default corpus: fourteen groups, each with several Frobenius choices
/// and cyclic characteristic-zero and real data.
pub fn default_corpus(cap: usize) -> Result<Vec<CorpusCase>> {
    let mut cases = Vec::new();
    let inner0 = |g: &Group| -> Action {
        let c = g.generators()[0];
        Action::Table(format!("inner({})", g.label(c)), inner_automorphism(g, c))
    };

    let g = symmetric(3, cap)?;
    cases.push(build_case("s3", g.clone(), &[5, 7, 11, 25], vec![(5, inner0(&g))]));
    let g = dihedral4(cap)?;
    cases.push(build_case("d4", g.clone(), &[3, 5, 7, 9], vec![(3, inner0(&g))]));
    let g = quaternion(cap)?;
    let gens = g.generators().to_vec();
    let k = g.mul(gens[0], gens[1]);
    let rotate = automorphism_from_images(&g, &[gens[1], k])?;
    cases.push(build_case(
        "q8",
        g.clone(),
        &[3, 5, 7],
        vec![(3, Action::Table("i->j->k".into(), rotate.clone())), (5, Action::Table("i->j->k".into(), rotate))],
    ));
    let g = alternating4(cap)?;
    cases.push(build_case("a4", g.clone(), &[5, 7, 11, 13], vec![(5, inner0(&g))]));
    let g = symmetric(4, cap)?;
    cases.push(build_case("s4", g.clone(), &[5, 7, 25], vec![(7, inner0(&g))]));
    let g = heisenberg(3, cap)?;
    cases.push(build_case("heisenberg3", g.clone(), &[2, 4, 5, 7], vec![(2, inner0(&g))]));
    let g = heisenberg(5, cap)?;
    cases.push(build_case("heisenberg5", g, &[2, 3, 4, 11], vec![]));
    let g = demarche_group(3, 1, cap)?;
    let mut demarche = build_case("demarche(3,1)", g.clone(), &[2, 4, 7, 13, 16], vec![(4, inner0(&g))]);
    demarche.char0.push(Char0Case::cyclic(3, 4, Action::Trivial));
    cases.push(demarche);
    let g = frob21(cap)?;
    cases.push(build_case("frob21", g.clone(), &[2, 4, 5, 8], vec![(2, inner0(&g))]));
    let g = metacyclic(5, 4, 2, cap)?;
    cases.push(build_case("frob20", g.clone(), &[3, 7, 9, 11], vec![(3, inner0(&g))]));
    // real points do not see the nontrivial class here
    let g = metacyclic(8, 4, 3, cap)?;
    cases.push(build_case("Z8:Z4", g.clone(), &[3, 5, 7, 9], vec![(3, inner0(&g))]));
    let g = abelian_from_invariants(&[2, 4], cap)?;
    cases.push(build_case(
        "Z2xZ4",
        g.clone(),
        &[3, 5, 9],
        vec![(3, Action::Table("inversion".into(), inversion(&g)))],
    ));
    let g = abelian_from_invariants(&[3, 9], cap)?;
    cases.push(build_case(
        "Z3xZ9",
        g.clone(),
        &[2, 4, 7, 19],
        vec![(2, Action::Table("inversion".into(), inversion(&g)))],
    ));
    let g = abelian_from_invariants(&[2, 2, 2], cap)?;
    cases.push(build_case("Z2^3", g, &[3, 5, 7], vec![]));
    let g = direct_product(symmetric(3, cap)?, abelian_from_invariants(&[2], cap)?, cap)?;
    cases.push(build_case("s3xZ2", g.clone(), &[5, 7, 11], vec![(5, inner0(&g))]));
    Ok(cases)
}
