//! Finite groups behind a uniform backend interface.
//!
//! Every backend fixes a canonical enumeration `0..order` of its elements with
//! the identity at index 0. Permutation closures enumerate in breadth-first
//! discovery order; structured families (Demarche groups, abelian groups,
//! products) enumerate their normal forms lexicographically and multiply
//! without materializing a Cayley table.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde_json::Value;

use crate::error::{Error, Result};

/// Index of an element in its group's canonical enumeration.
pub type ElementId = usize;

/// Default bound on the number of elements any constructor may materialize.
pub const DEFAULT_ELEMENT_CAP: usize = 2_000_000;

/// Cayley tables are precomputed for permutation groups up to this order.
const TABLE_LIMIT: usize = 2048;

pub trait GroupBackend: Send + Sync + fmt::Debug {
    fn order(&self) -> usize;
    fn mul(&self, a: ElementId, b: ElementId) -> ElementId;
    fn inv(&self, a: ElementId) -> ElementId;
    fn generators(&self) -> &[ElementId];

    fn identity(&self) -> ElementId {
        0
    }

    fn label(&self, a: ElementId) -> String {
        format!("g{a}")
    }

    /// Reads an element from its backend-native array form.
    fn element_from_array(&self, _items: &[Value]) -> Option<ElementId> {
        None
    }

    fn pow(&self, a: ElementId, mut e: u64) -> ElementId {
        let mut base = a;
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    /// `a b a⁻¹`.
    fn conj(&self, a: ElementId, b: ElementId) -> ElementId {
        self.mul(self.mul(a, b), self.inv(a))
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    fn commutator(&self, a: ElementId, b: ElementId) -> ElementId {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }
}

/// Shared handle to a group backend.
pub type Group = Arc<dyn GroupBackend>;

/// Resolves a JSON element reference: an integer id, a label as printed by
/// [`GroupBackend::label`], or the backend's native array form.
pub fn element_from_json(g: &dyn GroupBackend, v: &Value) -> Result<ElementId> {
    let found = match v {
        Value::Number(n) => n.as_u64().map(|x| x as usize).filter(|&x| x < g.order()),
        Value::String(s) => (0..g.order()).find(|&a| g.label(a) == *s),
        Value::Array(items) => g.element_from_array(items),
        _ => None,
    };
    found.ok_or_else(|| Error::argument(format!("{v} does not name a group element")))
}

fn int_items(items: &[Value]) -> Option<Vec<i64>> {
    items.iter().map(Value::as_i64).collect()
}

fn check_cap(order: u128, cap: usize, what: &str) -> Result<()> {
    if order > cap as u128 {
        return Err(Error::Resource(format!(
            "{what} has {order} elements, above the cap of {cap}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Permutation groups

#[derive(Debug)]
pub struct PermutationGroup {
    degree: usize,
    perms: Vec<u16>,
    index: HashMap<Vec<u16>, u32>,
    inverse: Vec<u32>,
    table: Option<Vec<u32>>,
    generators: Vec<ElementId>,
}

impl PermutationGroup {
    /// Closes a set of permutations of `{0..degree}` under composition.
    /// Elements are numbered in breadth-first order from the identity.
    pub fn close(degree: usize, generator_images: &[Vec<usize>], cap: usize) -> Result<Self> {
        if degree == 0 || degree > u16::MAX as usize {
            return Err(Error::argument(format!("unsupported permutation degree {degree}")));
        }
        let mut gens: Vec<Vec<u16>> = Vec::with_capacity(generator_images.len());
        for (i, img) in generator_images.iter().enumerate() {
            if img.len() != degree {
                return Err(Error::argument(format!(
                    "generator {i} has {} images, expected {degree}",
                    img.len()
                )));
            }
            let mut seen = vec![false; degree];
            for &x in img {
                if x >= degree || seen[x] {
                    return Err(Error::argument(format!("generator {i} is not a bijection")));
                }
                seen[x] = true;
            }
            gens.push(img.iter().map(|&x| x as u16).collect());
        }

        let identity: Vec<u16> = (0..degree as u16).collect();
        let mut perms = identity.clone();
        let mut index = HashMap::new();
        index.insert(identity, 0u32);
        let mut order = 1usize;
        let mut head = 0usize;
        let mut buf = vec![0u16; degree];
        while head < order {
            for g in &gens {
                let x = &perms[head * degree..(head + 1) * degree];
                for i in 0..degree {
                    buf[i] = x[g[i] as usize];
                }
                if !index.contains_key(&buf) {
                    if order >= cap {
                        return Err(Error::Resource(format!(
                            "permutation closure exceeds the cap of {cap} elements"
                        )));
                    }
                    index.insert(buf.clone(), order as u32);
                    perms.extend_from_slice(&buf);
                    order += 1;
                }
            }
            head += 1;
        }

        let mut inverse = vec![0u32; order];
        for a in 0..order {
            let x = &perms[a * degree..(a + 1) * degree];
            for i in 0..degree {
                buf[x[i] as usize] = i as u16;
            }
            inverse[a] = index[&buf];
        }

        let generators = gens.iter().map(|g| index[g] as ElementId).collect();
        let mut group = PermutationGroup {
            degree,
            perms,
            index,
            inverse,
            table: None,
            generators,
        };
        if order <= TABLE_LIMIT {
            let mut table = vec![0u32; order * order];
            for a in 0..order {
                for b in 0..order {
                    table[a * order + b] = group.compose(a, b) as u32;
                }
            }
            group.table = Some(table);
        }
        Ok(group)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Image array of an element.
    pub fn permutation(&self, a: ElementId) -> &[u16] {
        &self.perms[a * self.degree..(a + 1) * self.degree]
    }

    /// Looks up the element with the given image array.
    pub fn element_of(&self, images: &[usize]) -> Option<ElementId> {
        let key: Vec<u16> = images.iter().map(|&x| x as u16).collect();
        self.index.get(&key).map(|&i| i as ElementId)
    }

    fn compose(&self, a: ElementId, b: ElementId) -> ElementId {
        let pa = self.permutation(a);
        let pb = self.permutation(b);
        let c: Vec<u16> = pb.iter().map(|&i| pa[i as usize]).collect();
        self.index[&c] as ElementId
    }
}

impl GroupBackend for PermutationGroup {
    fn element_from_array(&self, items: &[Value]) -> Option<ElementId> {
        let images: Vec<usize> = int_items(items)?
            .into_iter()
            .map(|x| usize::try_from(x).ok())
            .collect::<Option<_>>()?;
        self.element_of(&images)
    }

    fn order(&self) -> usize {
        self.inverse.len()
    }

    /// `a ∘ b`: apply `b` first.
    fn mul(&self, a: ElementId, b: ElementId) -> ElementId {
        match &self.table {
            Some(t) => t[a * self.order() + b] as ElementId,
            None => self.compose(a, b),
        }
    }

    fn inv(&self, a: ElementId) -> ElementId {
        self.inverse[a] as ElementId
    }

    fn generators(&self) -> &[ElementId] {
        &self.generators
    }

    fn label(&self, a: ElementId) -> String {
        let p = self.permutation(a);
        let mut seen = vec![false; self.degree];
        let mut out = String::new();
        for start in 0..self.degree {
            if seen[start] || p[start] as usize == start {
                continue;
            }
            out.push('(');
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&i.to_string());
                first = false;
                i = p[i] as usize;
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Demarche groups

/// `⟨x, y, z | x^N = y^N = z^N = 1, [x,y] = z^{-ℓ^m}, z central⟩` with
/// `N = ℓ^{2m}`, stored through the normal form `x^r y^s z^t`.
#[derive(Debug)]
pub struct DemarcheGroup {
    l: u64,
    m: u32,
    modulus: u64,
    shift: u64,
    generators: Vec<ElementId>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl DemarcheGroup {
    pub fn new(l: u64, m: u32, cap: usize) -> Result<Self> {
        if l % 2 == 0 || !is_prime(l) {
            return Err(Error::argument(format!("l = {l} must be an odd prime")));
        }
        if m == 0 {
            return Err(Error::argument("m must be positive"));
        }
        let order = (l as u128).checked_pow(6 * m).unwrap_or(u128::MAX);
        check_cap(order, cap, "Demarche group")?;
        let modulus = l.pow(2 * m);
        let shift = l.pow(m);
        let generators = vec![modulus as usize * modulus as usize, modulus as usize, 1];
        Ok(DemarcheGroup {
            l,
            m,
            modulus,
            shift,
            generators,
        })
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Element with normal form `x^r y^s z^t`.
    pub fn element(&self, r: u64, s: u64, t: u64) -> ElementId {
        let n = self.modulus;
        (((r % n) * n + (s % n)) * n + (t % n)) as ElementId
    }

    /// Exponents `(r, s, t)` of the normal form.
    pub fn exponents(&self, a: ElementId) -> (u64, u64, u64) {
        let n = self.modulus;
        let a = a as u64;
        (a / (n * n), (a / n) % n, a % n)
    }

    pub fn x(&self) -> ElementId {
        self.generators[0]
    }

    pub fn y(&self) -> ElementId {
        self.generators[1]
    }

    pub fn z(&self) -> ElementId {
        self.generators[2]
    }
}

impl GroupBackend for DemarcheGroup {
    fn element_from_array(&self, items: &[Value]) -> Option<ElementId> {
        let e = int_items(items)?;
        if e.len() != 3 {
            return None;
        }
        let r = |x: i64| x.rem_euclid(self.modulus as i64) as u64;
        Some(self.element(r(e[0]), r(e[1]), r(e[2])))
    }

    fn order(&self) -> usize {
        (self.modulus * self.modulus * self.modulus) as usize
    }

    // y^s x^r = x^r y^s z^{r s ℓ^m}
    fn mul(&self, a: ElementId, b: ElementId) -> ElementId {
        let n = self.modulus;
        let (r1, s1, t1) = self.exponents(a);
        let (r2, s2, t2) = self.exponents(b);
        let twist = ((s1 * r2) % n) * self.shift % n;
        self.element((r1 + r2) % n, (s1 + s2) % n, (t1 + t2 + twist) % n)
    }

    fn inv(&self, a: ElementId) -> ElementId {
        let n = self.modulus;
        let (r, s, t) = self.exponents(a);
        let twist = ((s * r) % n) * self.shift % n;
        self.element((n - r) % n, (n - s) % n, (n - t + twist) % n)
    }

    fn generators(&self) -> &[ElementId] {
        &self.generators
    }

    fn label(&self, a: ElementId) -> String {
        let (r, s, t) = self.exponents(a);
        format!("x^{r} y^{s} z^{t}")
    }
}

// ---------------------------------------------------------------------------
// Abelian groups

/// `Z/d₁ × … × Z/d_r`, elements numbered in mixed radix with the first
/// coordinate most significant.
#[derive(Debug)]
pub struct AbelianBackend {
    moduli: Vec<u64>,
    order: usize,
    generators: Vec<ElementId>,
}

impl AbelianBackend {
    pub fn new(moduli: &[u64], cap: usize) -> Result<Self> {
        if moduli.iter().any(|&d| d < 2) {
            return Err(Error::argument("abelian invariants must be at least 2"));
        }
        let order = moduli.iter().fold(1u128, |acc, &d| acc.saturating_mul(d as u128));
        check_cap(order, cap, "abelian group")?;
        let mut this = AbelianBackend {
            moduli: moduli.to_vec(),
            order: order as usize,
            generators: Vec::new(),
        };
        this.generators = (0..moduli.len())
            .map(|i| {
                let mut c = vec![0; moduli.len()];
                c[i] = 1;
                this.element(&c)
            })
            .collect();
        Ok(this)
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn element(&self, coords: &[u64]) -> ElementId {
        coords
            .iter()
            .zip(&self.moduli)
            .fold(0u64, |acc, (&c, &d)| acc * d + c % d) as ElementId
    }

    pub fn coords(&self, mut a: ElementId) -> Vec<u64> {
        let mut out = vec![0; self.moduli.len()];
        for i in (0..self.moduli.len()).rev() {
            let d = self.moduli[i] as usize;
            out[i] = (a % d) as u64;
            a /= d;
        }
        out
    }
}

impl GroupBackend for AbelianBackend {
    fn element_from_array(&self, items: &[Value]) -> Option<ElementId> {
        let c = int_items(items)?;
        if c.len() != self.moduli.len() {
            return None;
        }
        let coords: Vec<u64> = c
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &d)| x.rem_euclid(d as i64) as u64)
            .collect();
        Some(self.element(&coords))
    }

    fn order(&self) -> usize {
        self.order
    }

    fn mul(&self, a: ElementId, b: ElementId) -> ElementId {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let sum: Vec<u64> = ca
            .iter()
            .zip(&cb)
            .zip(&self.moduli)
            .map(|((x, y), d)| (x + y) % d)
            .collect();
        self.element(&sum)
    }

    fn inv(&self, a: ElementId) -> ElementId {
        let neg: Vec<u64> = self
            .coords(a)
            .iter()
            .zip(&self.moduli)
            .map(|(x, d)| (d - x) % d)
            .collect();
        self.element(&neg)
    }

    fn generators(&self) -> &[ElementId] {
        &self.generators
    }

    fn label(&self, a: ElementId) -> String {
        let c: Vec<String> = self.coords(a).iter().map(|x| x.to_string()).collect();
        format!("({})", c.join(","))
    }
}

// ---------------------------------------------------------------------------
// Products

#[derive(Debug)]
pub struct DirectProduct {
    left: Group,
    right: Group,
    generators: Vec<ElementId>,
}

impl DirectProduct {
    pub fn new(left: Group, right: Group, cap: usize) -> Result<Self> {
        check_cap(
            left.order() as u128 * right.order() as u128,
            cap,
            "direct product",
        )?;
        let nr = right.order();
        let mut generators: Vec<ElementId> =
            left.generators().iter().map(|&g| g * nr).collect();
        generators.extend(right.generators().iter().copied());
        Ok(DirectProduct {
            left,
            right,
            generators,
        })
    }

    pub fn pair(&self, a: ElementId, b: ElementId) -> ElementId {
        a * self.right.order() + b
    }

    pub fn split(&self, x: ElementId) -> (ElementId, ElementId) {
        (x / self.right.order(), x % self.right.order())
    }
}

impl GroupBackend for DirectProduct {
    fn element_from_array(&self, items: &[Value]) -> Option<ElementId> {
        let [a, b] = items else { return None };
        let a = element_from_json(self.left.as_ref(), a).ok()?;
        let b = element_from_json(self.right.as_ref(), b).ok()?;
        Some(self.pair(a, b))
    }

    fn order(&self) -> usize {
        self.left.order() * self.right.order()
    }

    fn mul(&self, a: ElementId, b: ElementId) -> ElementId {
        let (a1, a2) = self.split(a);
        let (b1, b2) = self.split(b);
        self.pair(self.left.mul(a1, b1), self.right.mul(a2, b2))
    }

    fn inv(&self, a: ElementId) -> ElementId {
        let (a1, a2) = self.split(a);
        self.pair(self.left.inv(a1), self.right.inv(a2))
    }

    fn generators(&self) -> &[ElementId] {
        &self.generators
    }

    fn label(&self, a: ElementId) -> String {
        let (a1, a2) = self.split(a);
        format!("({}, {})", self.left.label(a1), self.right.label(a2))
    }
}

/// `N ⋊ H` with `(n₁,h₁)(n₂,h₂) = (n₁·α_{h₁}(n₂), h₁h₂)`.
#[derive(Debug)]
pub struct SemidirectProduct {
    normal: Group,
    acting: Group,
    automorphisms: Vec<Vec<ElementId>>,
    generators: Vec<ElementId>,
}

impl SemidirectProduct {
    /// `action[j]` lists the images of the generators of `normal` under the
    /// `j`-th generator of `acting`.
    pub fn new(normal: Group, acting: Group, action: &[Vec<ElementId>], cap: usize) -> Result<Self> {
        check_cap(
            normal.order() as u128 * acting.order() as u128,
            cap,
            "semidirect product",
        )?;
        if action.len() != acting.generators().len() {
            return Err(Error::argument(format!(
                "semidirect action lists {} automorphisms but the acting group has {} generators",
                action.len(),
                acting.generators().len()
            )));
        }
        let mut gen_auts = Vec::with_capacity(action.len());
        for imgs in action {
            let table = hom_from_generator_images(&normal, &normal, imgs)?;
            if !is_bijection(&table) {
                return Err(Error::argument("semidirect action is not by automorphisms"));
            }
            gen_auts.push(table);
        }

        let n = normal.order();
        let mut automorphisms: Vec<Option<Vec<ElementId>>> = vec![None; acting.order()];
        automorphisms[acting.identity()] = Some((0..n).collect());
        let mut queue = VecDeque::from([acting.identity()]);
        while let Some(h) = queue.pop_front() {
            for (j, &g) in acting.generators().iter().enumerate() {
                let target = acting.mul(h, g);
                let cur = automorphisms[h].as_ref().unwrap();
                let cand: Vec<ElementId> = (0..n).map(|x| cur[gen_auts[j][x]]).collect();
                match &automorphisms[target] {
                    None => {
                        automorphisms[target] = Some(cand);
                        queue.push_back(target);
                    }
                    Some(existing) if *existing != cand => {
                        return Err(Error::argument(
                            "semidirect action is not a homomorphism into Aut(N)",
                        ));
                    }
                    Some(_) => {}
                }
            }
        }
        let automorphisms: Vec<Vec<ElementId>> = automorphisms
            .into_iter()
            .map(|a| a.ok_or_else(|| Error::internal("acting generators do not generate")))
            .collect::<Result<_>>()?;

        let nh = acting.order();
        let mut generators: Vec<ElementId> =
            normal.generators().iter().map(|&g| g * nh).collect();
        generators.extend(acting.generators().iter().copied());
        Ok(SemidirectProduct {
            normal,
            acting,
            automorphisms,
            generators,
        })
    }

    pub fn pair(&self, n: ElementId, h: ElementId) -> ElementId {
        n * self.acting.order() + h
    }

    pub fn split(&self, x: ElementId) -> (ElementId, ElementId) {
        (x / self.acting.order(), x % self.acting.order())
    }
}

impl GroupBackend for SemidirectProduct {
    fn element_from_array(&self, items: &[Value]) -> Option<ElementId> {
        let [n, h] = items else { return None };
        let n = element_from_json(self.normal.as_ref(), n).ok()?;
        let h = element_from_json(self.acting.as_ref(), h).ok()?;
        Some(self.pair(n, h))
    }

    fn order(&self) -> usize {
        self.normal.order() * self.acting.order()
    }

    fn mul(&self, a: ElementId, b: ElementId) -> ElementId {
        let (n1, h1) = self.split(a);
        let (n2, h2) = self.split(b);
        let n = self.normal.mul(n1, self.automorphisms[h1][n2]);
        self.pair(n, self.acting.mul(h1, h2))
    }

    fn inv(&self, a: ElementId) -> ElementId {
        let (n, h) = self.split(a);
        let hi = self.acting.inv(h);
        self.pair(self.automorphisms[hi][self.normal.inv(n)], hi)
    }

    fn generators(&self) -> &[ElementId] {
        &self.generators
    }

    fn label(&self, a: ElementId) -> String {
        let (n, h) = self.split(a);
        format!("({}, {})", self.normal.label(n), self.acting.label(h))
    }
}

// ---------------------------------------------------------------------------
// Constructors returning shared handles

pub fn close_generators(degree: usize, generator_images: &[Vec<usize>], cap: usize) -> Result<Group> {
    Ok(Arc::new(PermutationGroup::close(degree, generator_images, cap)?))
}

pub fn demarche_group(l: u64, m: u32, cap: usize) -> Result<Group> {
    Ok(Arc::new(DemarcheGroup::new(l, m, cap)?))
}

pub fn abelian_from_invariants(ds: &[u64], cap: usize) -> Result<Group> {
    Ok(Arc::new(AbelianBackend::new(ds, cap)?))
}

pub fn direct_product(a: Group, b: Group, cap: usize) -> Result<Group> {
    Ok(Arc::new(DirectProduct::new(a, b, cap)?))
}

pub fn semidirect_product(
    normal: Group,
    acting: Group,
    action: &[Vec<ElementId>],
    cap: usize,
) -> Result<Group> {
    Ok(Arc::new(SemidirectProduct::new(normal, acting, action, cap)?))
}

// ---------------------------------------------------------------------------
// Homomorphisms and automorphisms

pub fn is_bijection(table: &[ElementId]) -> bool {
    let mut seen = vec![false; table.len()];
    for &x in table {
        if x >= table.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Extends generator images to a full homomorphism table, verifying
/// `f(x·g) = f(x)·f(g)` for every element `x` and generator `g`; since every
/// element is a positive word in the generators this proves `f` is a
/// homomorphism.
pub fn hom_from_generator_images(
    domain: &Group,
    codomain: &Group,
    images: &[ElementId],
) -> Result<Vec<ElementId>> {
    let gens = domain.generators();
    if images.len() != gens.len() {
        return Err(Error::argument(format!(
            "expected {} generator images, got {}",
            gens.len(),
            images.len()
        )));
    }
    if let Some(&bad) = images.iter().find(|&&x| x >= codomain.order()) {
        return Err(Error::argument(format!("element id {bad} out of range")));
    }
    const UNSET: usize = usize::MAX;
    let mut table = vec![UNSET; domain.order()];
    table[domain.identity()] = codomain.identity();
    let mut queue = VecDeque::from([domain.identity()]);
    while let Some(x) = queue.pop_front() {
        for (g, &img) in gens.iter().zip(images) {
            let y = domain.mul(x, *g);
            let cand = codomain.mul(table[x], img);
            if table[y] == UNSET {
                table[y] = cand;
                queue.push_back(y);
            } else if table[y] != cand {
                return Err(Error::argument("generator images do not define a homomorphism"));
            }
        }
    }
    if table.iter().any(|&x| x == UNSET) {
        return Err(Error::internal("generators do not generate the group"));
    }
    Ok(table)
}

/// Checks that `table` is an automorphism of `g`: a bijection fixing the
/// identity with `f(x·s) = f(x)·f(s)` for all elements `x` and generators `s`.
pub fn check_automorphism(g: &Group, table: &[ElementId]) -> Result<()> {
    if table.len() != g.order() || !is_bijection(table) {
        return Err(Error::argument("action is not a bijection of the group"));
    }
    if table[g.identity()] != g.identity() {
        return Err(Error::argument("action does not fix the identity"));
    }
    for x in 0..g.order() {
        for &s in g.generators() {
            if table[g.mul(x, s)] != g.mul(table[x], table[s]) {
                return Err(Error::argument("action is not a group automorphism"));
            }
        }
    }
    Ok(())
}

pub fn invert_table(table: &[ElementId]) -> Vec<ElementId> {
    let mut inv = vec![0; table.len()];
    for (i, &x) in table.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// Conjugation by `c`: `b ↦ c b c⁻¹`.
pub fn inner_automorphism(g: &Group, c: ElementId) -> Vec<ElementId> {
    let ci = g.inv(c);
    (0..g.order()).map(|b| g.mul(g.mul(c, b), ci)).collect()
}

/// Returns some `c` with `table(b) = c b c⁻¹` for all `b`, if one exists.
pub fn find_inner(g: &Group, table: &[ElementId]) -> Option<ElementId> {
    (0..g.order()).find(|&c| {
        g.generators()
            .iter()
            .all(|&s| table[s] == g.conj(c, s))
    })
}

/// Order of an element.
pub fn element_order(g: &Group, a: ElementId) -> u64 {
    let mut x = a;
    let mut k = 1;
    while x != g.identity() {
        x = g.mul(x, a);
        k += 1;
    }
    k
}

// ---------------------------------------------------------------------------
// Conjugacy classes

#[derive(Debug, Clone)]
pub struct ConjugacyData {
    class_of: Vec<u32>,
    reps: Vec<ElementId>,
    members: Vec<Vec<ElementId>>,
}

impl ConjugacyData {
    /// Orbits of the conjugation action generated by conjugation with the
    /// group generators; the representative of each class is its smallest id.
    pub fn compute(g: &Group) -> Self {
        const UNSET: u32 = u32::MAX;
        let n = g.order();
        let gens: Vec<(ElementId, ElementId)> =
            g.generators().iter().map(|&s| (s, g.inv(s))).collect();
        let mut class_of = vec![UNSET; n];
        let mut reps = Vec::new();
        let mut members = Vec::new();
        for start in 0..n {
            if class_of[start] != UNSET {
                continue;
            }
            let idx = reps.len() as u32;
            reps.push(start);
            class_of[start] = idx;
            let mut orbit = vec![start];
            let mut head = 0;
            while head < orbit.len() {
                let x = orbit[head];
                head += 1;
                for &(s, si) in &gens {
                    let y = g.mul(g.mul(s, x), si);
                    if class_of[y] == UNSET {
                        class_of[y] = idx;
                        orbit.push(y);
                    }
                }
            }
            orbit.sort_unstable();
            members.push(orbit);
        }
        ConjugacyData {
            class_of,
            reps,
            members,
        }
    }

    pub fn class_of(&self, b: ElementId) -> usize {
        self.class_of[b] as usize
    }

    pub fn reps(&self) -> &[ElementId] {
        &self.reps
    }

    pub fn members(&self, class: usize) -> &[ElementId] {
        &self.members[class]
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Exponent of the group, computed on class representatives.
pub fn exponent(g: &Group, classes: &ConjugacyData) -> u64 {
    classes
        .reps()
        .iter()
        .fold(1u64, |acc, &b| lcm(acc, element_order(g, b)))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

// ---------------------------------------------------------------------------
// Subgroups

#[derive(Debug, Clone)]
pub struct Subgroup {
    members: Vec<ElementId>,
    mask: Vec<bool>,
    generators: Vec<ElementId>,
}

impl Subgroup {
    /// Closure of `gens` under multiplication.
    pub fn generated(g: &Group, gens: &[ElementId]) -> Self {
        let mut mask = vec![false; g.order()];
        mask[g.identity()] = true;
        let mut members = vec![g.identity()];
        let gens: Vec<ElementId> = gens.to_vec();
        let mut head = 0;
        while head < members.len() {
            let x = members[head];
            head += 1;
            for &s in &gens {
                let y = g.mul(x, s);
                if !mask[y] {
                    mask[y] = true;
                    members.push(y);
                }
            }
        }
        members.sort_unstable();
        Subgroup {
            members,
            mask,
            generators: gens,
        }
    }

    /// Smallest normal subgroup containing `gens`.
    pub fn normal_closure(g: &Group, gens: &[ElementId]) -> Self {
        let mut gens: Vec<ElementId> = gens.iter().copied().filter(|&x| x != g.identity()).collect();
        loop {
            let sub = Subgroup::generated(g, &gens);
            let extra = gens.iter().find_map(|&h| {
                g.generators()
                    .iter()
                    .map(|&s| g.conj(s, h))
                    .find(|&c| !sub.contains(c))
            });
            match extra {
                Some(c) => gens.push(c),
                None => return sub,
            }
        }
    }

    pub fn contains(&self, x: ElementId) -> bool {
        self.mask[x]
    }

    pub fn members(&self) -> &[ElementId] {
        &self.members
    }

    pub fn generators(&self) -> &[ElementId] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }
}

/// The commutator subgroup, as the normal closure of the commutators of the
/// generators.
pub fn derived_subgroup(g: &Group) -> Subgroup {
    let gens = g.generators();
    let mut comms = Vec::new();
    for (i, &a) in gens.iter().enumerate() {
        for &b in &gens[i + 1..] {
            let c = g.commutator(a, b);
            if c != g.identity() && !comms.contains(&c) {
                comms.push(c);
            }
        }
    }
    Subgroup::normal_closure(g, &comms)
}

/// Elements commuting with every generator.
pub fn center(g: &Group) -> Vec<ElementId> {
    (0..g.order())
        .filter(|&z| g.generators().iter().all(|&s| g.mul(s, z) == g.mul(z, s)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> Group {
        close_generators(3, &[vec![1, 0, 2], vec![1, 2, 0]], DEFAULT_ELEMENT_CAP).unwrap()
    }

    #[test]
    fn symmetric_group_closure() {
        let g = s3();
        assert_eq!(g.order(), 6);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.label(0), "()");
    }

    #[test]
    fn klein_four_is_elementary() {
        let g = close_generators(4, &[vec![1, 0, 3, 2], vec![2, 3, 0, 1]], DEFAULT_ELEMENT_CAP)
            .unwrap();
        assert_eq!(g.order(), 4);
        for a in 0..4 {
            assert_eq!(g.inv(a), a);
        }
    }

    #[test]
    fn affine_group_of_order_21() {
        let cycle: Vec<usize> = (0..7).map(|x| (x + 1) % 7).collect();
        let dbl: Vec<usize> = (0..7).map(|x| (2 * x) % 7).collect();
        let g = close_generators(7, &[cycle, dbl], DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(g.order(), 21);
    }

    #[test]
    fn closure_respects_cap() {
        let err = close_generators(5, &[vec![1, 0, 2, 3, 4], vec![1, 2, 3, 4, 0]], 50).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn rejects_non_bijection() {
        let err = close_generators(3, &[vec![0, 0, 1]], DEFAULT_ELEMENT_CAP).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
    }

    #[test]
    fn demarche_orders_and_arguments() {
        assert_eq!(demarche_group(3, 1, DEFAULT_ELEMENT_CAP).unwrap().order(), 729);
        assert_eq!(demarche_group(5, 1, DEFAULT_ELEMENT_CAP).unwrap().order(), 15625);
        assert!(matches!(
            demarche_group(2, 1, DEFAULT_ELEMENT_CAP).unwrap_err(),
            Error::Argument(_)
        ));
        assert!(matches!(
            demarche_group(9, 1, DEFAULT_ELEMENT_CAP).unwrap_err(),
            Error::Argument(_)
        ));
        assert!(matches!(
            demarche_group(3, 3, DEFAULT_ELEMENT_CAP).unwrap_err(),
            Error::Resource(_)
        ));
    }

    #[test]
    fn demarche_relations() {
        let d = DemarcheGroup::new(3, 1, DEFAULT_ELEMENT_CAP).unwrap();
        let g: Group = Arc::new(DemarcheGroup::new(3, 1, DEFAULT_ELEMENT_CAP).unwrap());
        let (x, y, z) = (d.x(), d.y(), d.z());
        // [x,y] = z^{-3}
        assert_eq!(g.commutator(x, y), d.element(0, 0, 9 - 3));
        assert_eq!(g.commutator(x, z), 0);
        assert_eq!(g.commutator(y, z), 0);
        let zc = center(&g);
        assert_eq!(zc.len(), 81);
        for &c in &zc {
            let (r, s, _) = d.exponents(c);
            assert_eq!((r % 3, s % 3), (0, 0));
        }
    }

    #[test]
    fn class_equation_of_s3() {
        let g = s3();
        let cd = ConjugacyData::compute(&g);
        let mut sizes: Vec<usize> = (0..cd.len()).map(|c| cd.members(c).len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);
        for (c, &r) in cd.reps().iter().enumerate() {
            assert_eq!(cd.members(c)[0], r);
        }
    }

    #[test]
    fn abelian_groups_have_singleton_classes() {
        let g = abelian_from_invariants(&[2, 4], DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(ConjugacyData::compute(&g).len(), 8);
        assert_eq!(derived_subgroup(&g).order(), 1);
    }

    #[test]
    fn derived_subgroup_of_s3_is_a3() {
        let g = s3();
        let d = derived_subgroup(&g);
        assert_eq!(d.order(), 3);
    }

    #[test]
    fn frobenius_group_as_semidirect_product() {
        let n = abelian_from_invariants(&[7], DEFAULT_ELEMENT_CAP).unwrap();
        let h = abelian_from_invariants(&[3], DEFAULT_ELEMENT_CAP).unwrap();
        let g = semidirect_product(n, h, &[vec![2]], DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(g.order(), 21);
        assert_ne!(g.mul(g.generators()[0], g.generators()[1]), g.mul(g.generators()[1], g.generators()[0]));
    }

    #[test]
    fn semidirect_rejects_non_homomorphic_action() {
        let n = abelian_from_invariants(&[7], DEFAULT_ELEMENT_CAP).unwrap();
        let h = abelian_from_invariants(&[2], DEFAULT_ELEMENT_CAP).unwrap();
        // x ↦ 2x has order 3, not compatible with Z/2
        let err = semidirect_product(n, h, &[vec![2]], DEFAULT_ELEMENT_CAP).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
    }

    #[test]
    fn direct_product_order() {
        let g = direct_product(s3(), abelian_from_invariants(&[2], DEFAULT_ELEMENT_CAP).unwrap(), DEFAULT_ELEMENT_CAP)
            .unwrap();
        assert_eq!(g.order(), 12);
    }

    #[test]
    fn inner_automorphisms_are_found() {
        let g = s3();
        let t = inner_automorphism(&g, 1);
        check_automorphism(&g, &t).unwrap();
        let c = find_inner(&g, &t).unwrap();
        assert_eq!(inner_automorphism(&g, c), t);
    }
}
