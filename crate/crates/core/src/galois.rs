//! Validated Galois data and the twist maps `φ_σ(b) = σ⁻¹(b^{q(σ)})`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::group::{
    check_automorphism, find_inner, gcd, hom_from_generator_images, inner_automorphism,
    invert_table, abelian_from_invariants, ElementId, Group, DEFAULT_ELEMENT_CAP,
};

/// Returns `(p, r)` with `q = p^r`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let (mut rest, mut r) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        r += 1;
    }
    (rest == 1).then_some((p, r))
}

fn permutation_order(table: &[ElementId]) -> u64 {
    let mut seen = vec![false; table.len()];
    let mut acc = 1u64;
    for start in 0..table.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = table[x];
            len += 1;
        }
        acc = crate::group::lcm(acc, len);
    }
    acc
}

/// Frobenius data: a prime power `q` and the automorphism `s` of `G` giving
/// the action of the `q`-Frobenius.
#[derive(Debug, Clone)]
pub struct FrobeniusData {
    q: u64,
    p: u64,
    s: Vec<ElementId>,
    s_inv: Vec<ElementId>,
    s_order: u64,
}

/// `s = None` means the trivial action.
pub fn validate_frobenius(g: &Group, q: u64, s: Option<Vec<ElementId>>) -> Result<FrobeniusData> {
    let (p, _) = prime_power(q)
        .ok_or_else(|| Error::argument(format!("q = {q} is not a prime power")))?;
    if g.order() as u64 % p == 0 {
        return Err(Error::Domain(format!(
            "characteristic divides group order ({p} divides {})",
            g.order()
        )));
    }
    let s = s.unwrap_or_else(|| (0..g.order()).collect());
    check_automorphism(g, &s)?;
    let s_inv = invert_table(&s);
    let s_order = permutation_order(&s);
    Ok(FrobeniusData {
        q,
        p,
        s,
        s_inv,
        s_order,
    })
}

impl FrobeniusData {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> &[ElementId] {
        &self.s
    }

    pub fn s_inv(&self) -> &[ElementId] {
        &self.s_inv
    }

    pub fn s_order(&self) -> u64 {
        self.s_order
    }

    pub fn is_trivial_action(&self) -> bool {
        self.s.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `φ_q(b) = s⁻¹(b^q)`.
    pub fn twist(&self, g: &Group) -> TwistMap {
        TwistMap::new(g, &self.s_inv, self.q)
    }

    /// Smallest `m ≥ 1` such that `s^m` is an inner automorphism.
    pub fn ext_kernel_index(&self, g: &Group) -> u64 {
        let mut power = self.s.clone();
        for m in 1..=self.s_order {
            if find_inner(g, &power).is_some() {
                return m;
            }
            power = power.iter().map(|&x| self.s[x]).collect();
        }
        self.s_order
    }
}

/// Finite Galois data: `Γ′` acting on `G` by automorphisms with a cyclotomic
/// character `Γ′ → (Z/n)^*`, `n = exp(G)`.
#[derive(Debug, Clone)]
pub struct FiniteGaloisData {
    gamma: Group,
    action: Vec<Vec<ElementId>>,
    action_inv: Vec<Vec<ElementId>>,
    cyclo: Vec<u64>,
    n: u64,
}

/// Extends per-generator data along `Γ′` by breadth-first search, checking
/// consistency on every edge and against any further supplied entries.
fn extend_along<T: Clone + PartialEq>(
    gamma: &Group,
    given: &[Option<T>],
    identity: T,
    compose: impl Fn(&T, &T) -> T,
    what: &str,
) -> Result<Vec<T>> {
    let gens = gamma.generators();
    let gen_vals: Vec<T> = gens
        .iter()
        .map(|&s| {
            given[s]
                .clone()
                .or_else(|| (s == gamma.identity()).then(|| identity.clone()))
                .ok_or_else(|| Error::argument(format!("{what} missing for generator {s} of the Galois group")))
        })
        .collect::<Result<_>>()?;
    let mut vals: Vec<Option<T>> = vec![None; gamma.order()];
    vals[gamma.identity()] = Some(identity);
    let mut queue = VecDeque::from([gamma.identity()]);
    while let Some(x) = queue.pop_front() {
        for (&s, v) in gens.iter().zip(&gen_vals) {
            let y = gamma.mul(x, s);
            let cand = compose(vals[x].as_ref().unwrap(), v);
            match &vals[y] {
                None => {
                    vals[y] = Some(cand);
                    queue.push_back(y);
                }
                Some(existing) if *existing != cand => {
                    return Err(Error::argument(format!("{what} is not a homomorphism on the Galois group")));
                }
                Some(_) => {}
            }
        }
    }
    let vals: Vec<T> = vals
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::internal("Galois group generators do not generate")))
        .collect::<Result<_>>()?;
    for (x, g) in given.iter().enumerate() {
        if let Some(g) = g {
            if *g != vals[x] {
                return Err(Error::argument(format!(
                    "{what} at element {x} is inconsistent with the generator values"
                )));
            }
        }
    }
    Ok(vals)
}

impl FiniteGaloisData {
    /// `action[γ]` and `cyclo[γ]` may be given for any subset of `Γ′`
    /// containing its generators; the rest is generated and every supplied
    /// entry is verified. `None` actions are trivial.
    pub fn new(
        g: &Group,
        exponent: u64,
        gamma: Group,
        action: &[Option<Vec<ElementId>>],
        cyclo: &[Option<i64>],
    ) -> Result<Self> {
        if action.len() != gamma.order() || cyclo.len() != gamma.order() {
            return Err(Error::internal("Galois data indexed by the wrong group"));
        }
        if gamma.order() > 256 {
            return Err(Error::Resource(format!(
                "Galois group of order {} exceeds the cap of 256",
                gamma.order()
            )));
        }
        let n = exponent.max(1);
        for a in action.iter().flatten() {
            check_automorphism(g, a)?;
        }
        let cyc: Vec<Option<u64>> = cyclo
            .iter()
            .map(|c| c.map(|c| (c as i128).rem_euclid(n as i128) as u64))
            .collect();
        for c in cyc.iter().flatten() {
            if gcd(*c, n) != 1 && n > 1 {
                return Err(Error::argument(format!("cyclotomic value {c} is not a unit mod {n}")));
            }
        }
        let identity: Vec<ElementId> = (0..g.order()).collect();
        let trivial_given: Vec<Option<Vec<ElementId>>> = action
            .iter()
            .enumerate()
            .map(|(i, a)| {
                a.clone()
                    .or_else(|| gamma.generators().contains(&i).then(|| identity.clone()))
            })
            .collect();
        // action(γs) = action(γ) ∘ action(s)
        let action = extend_along(
            &gamma,
            &trivial_given,
            identity,
            |a, b| b.iter().map(|&x| a[x]).collect(),
            "Galois action",
        )?;
        let cyclo = extend_along(&gamma, &cyc, 1 % n, |a, b| a * b % n, "cyclotomic character")?;
        let action_inv = action.iter().map(|a| invert_table(a)).collect();
        Ok(FiniteGaloisData {
            gamma,
            action,
            action_inv,
            cyclo,
            n,
        })
    }

    pub fn gamma(&self) -> &Group {
        &self.gamma
    }

    pub fn action(&self, sigma: ElementId) -> &[ElementId] {
        &self.action[sigma]
    }

    pub fn action_inv(&self, sigma: ElementId) -> &[ElementId] {
        &self.action_inv[sigma]
    }

    /// `q(σ)` reduced mod `n = exp(G)`.
    pub fn cyclo(&self, sigma: ElementId) -> u64 {
        self.cyclo[sigma]
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn is_abelian_gamma(&self) -> bool {
        let gens = self.gamma.generators();
        gens.iter()
            .all(|&a| gens.iter().all(|&b| self.gamma.mul(a, b) == self.gamma.mul(b, a)))
    }

    pub fn twist(&self, g: &Group, sigma: ElementId) -> TwistMap {
        TwistMap::new(g, &self.action_inv[sigma], self.cyclo[sigma])
    }
}

/// Real data: `Γ′ = Z/2` with `q(σ) = −1` and an involutive action.
pub fn real_data(g: &Group, exponent: u64, action: Option<Vec<ElementId>>) -> Result<FiniteGaloisData> {
    if let Some(a) = &action {
        if a.len() != g.order() {
            return Err(Error::argument("real action has the wrong length"));
        }
        if (0..g.order()).any(|x| a.get(a[x]).copied() != Some(x)) {
            return Err(Error::argument("real action is not an involution"));
        }
    }
    let gamma = abelian_from_invariants(&[2], DEFAULT_ELEMENT_CAP)?;
    let sigma = gamma.generators()[0];
    let mut acts = vec![None; 2];
    acts[sigma] = action;
    let mut cyclo = vec![None; 2];
    cyclo[sigma] = Some(-1);
    FiniteGaloisData::new(g, exponent, gamma, &acts, &cyclo)
}

/// Actions through inner automorphisms: `σ ↦ conjugation by h(σ)` for the
/// homomorphism `h: Γ′ → G` determined by the generator images.
pub fn ext_twist(g: &Group, gamma: &Group, images: &[ElementId]) -> Result<Vec<Vec<ElementId>>> {
    let h = hom_from_generator_images(gamma, g, images)?;
    Ok(h.iter().map(|&c| inner_automorphism(g, c)).collect())
}

/// A tabulated twist map `b ↦ a(b^e)` for an automorphism table `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistMap {
    table: Vec<ElementId>,
}

impl TwistMap {
    pub fn new(g: &Group, aut_inv: &[ElementId], e: u64) -> Self {
        let table = (0..g.order()).map(|b| aut_inv[g.pow(b, e)]).collect();
        TwistMap { table }
    }

    pub fn from_table(table: Vec<ElementId>) -> Self {
        TwistMap { table }
    }

    pub fn apply(&self, b: ElementId) -> ElementId {
        self.table[b]
    }

    pub fn table(&self) -> &[ElementId] {
        &self.table
    }

    pub fn is_bijective(&self) -> bool {
        crate::group::is_bijection(&self.table)
    }

    pub fn iterate(&self, b: ElementId, k: u64) -> ElementId {
        (0..k).fold(b, |x, _| self.table[x])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TwistMap) -> TwistMap {
        TwistMap {
            table: other.table.iter().map(|&x| self.table[x]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{close_generators, demarche_group, semidirect_product};

    fn s3() -> Group {
        close_generators(3, &[vec![1, 0, 2], vec![1, 2, 0]], DEFAULT_ELEMENT_CAP).unwrap()
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(4), Some((2, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn frobenius_validation() {
        let g = s3();
        assert!(validate_frobenius(&g, 7, None).is_ok());
        let err = validate_frobenius(&g, 3, None).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("characteristic divides group order")));
        assert!(matches!(validate_frobenius(&g, 10, None).unwrap_err(), Error::Argument(_)));
        let d = demarche_group(3, 1, DEFAULT_ELEMENT_CAP).unwrap();
        assert!(validate_frobenius(&d, 4, None).is_ok());
    }

    #[test]
    fn frobenius_rejects_non_automorphism() {
        let g = s3();
        let ord = |x| crate::group::element_order(&g, x);
        let t = (1..6).find(|&x| ord(x) == 2).unwrap();
        let c = (1..6).find(|&x| ord(x) == 3).unwrap();
        let mut s: Vec<usize> = (0..6).collect();
        s.swap(t, c);
        assert!(matches!(validate_frobenius(&g, 7, Some(s)).unwrap_err(), Error::Argument(_)));
    }

    #[test]
    fn constant_twist_is_power_map() {
        let d = demarche_group(3, 1, DEFAULT_ELEMENT_CAP).unwrap();
        let f = validate_frobenius(&d, 4, None).unwrap();
        let t = f.twist(&d);
        for b in (0..d.order()).step_by(17) {
            assert_eq!(t.apply(b), d.pow(b, 4));
        }
        assert!(t.is_bijective());
    }

    #[test]
    fn real_twists() {
        let g = s3();
        let r = real_data(&g, 6, None).unwrap();
        let t = r.twist(&g, 1);
        for b in 0..6 {
            assert_eq!(t.apply(b), g.inv(b));
        }
        let z3 = abelian_from_invariants(&[3], DEFAULT_ELEMENT_CAP).unwrap();
        let inv: Vec<usize> = (0..3).map(|b| z3.inv(b)).collect();
        let r = real_data(&z3, 3, Some(inv)).unwrap();
        let t = r.twist(&z3, 1);
        for b in 0..3 {
            assert_eq!(t.apply(b), b);
        }
        let bad = vec![1, 2, 0];
        assert!(real_data(&z3, 3, Some(bad)).is_err());
    }

    #[test]
    fn twists_compose_contravariantly() {
        let n = abelian_from_invariants(&[7], DEFAULT_ELEMENT_CAP).unwrap();
        let h = abelian_from_invariants(&[3], DEFAULT_ELEMENT_CAP).unwrap();
        let g = semidirect_product(n, h, &[vec![2]], DEFAULT_ELEMENT_CAP).unwrap();
        let gamma = abelian_from_invariants(&[6], DEFAULT_ELEMENT_CAP).unwrap();
        let gen = gamma.generators()[0];
        let images = ext_twist(&g, &gamma, &[g.generators()[1]]).unwrap();
        let mut acts = vec![None; 6];
        acts[gen] = Some(images[gen].clone());
        let mut cyc = vec![None; 6];
        cyc[gen] = Some(5);
        let data = FiniteGaloisData::new(&g, 21, gamma.clone(), &acts, &cyc).unwrap();
        for s in 0..6 {
            for t in 0..6 {
                let st = gamma.mul(s, t);
                let lhs = data.twist(&g, st);
                let rhs = data.twist(&g, t).compose(&data.twist(&g, s));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn finite_data_rejects_non_homomorphic_cyclo() {
        let g = s3();
        let gamma = abelian_from_invariants(&[2], DEFAULT_ELEMENT_CAP).unwrap();
        let mut cyc = vec![None; 2];
        cyc[1] = Some(5);
        assert!(FiniteGaloisData::new(&g, 6, gamma.clone(), &[None, None], &cyc).is_ok());
        // 5 has order 2 mod 6, but a supplied value at the identity must be 1
        let cyc = vec![Some(5), Some(5)];
        assert!(FiniteGaloisData::new(&g, 6, gamma, &[None, None], &cyc).is_err());
    }

    #[test]
    fn ext_kernel_index_of_inner_action() {
        let g = s3();
        let s = inner_automorphism(&g, 1);
        let f = validate_frobenius(&g, 5, Some(s)).unwrap();
        assert_eq!(f.ext_kernel_index(&g), 1);
    }
}
