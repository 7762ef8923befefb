//! Finite abelian groups in invariant-factor form.
//!
//! Every computation runs in an ambient group `Z^n / diag(m)` with arbitrary
//! column moduli. Subgroups are reduced to Howell form (an echelon form over
//! `Z/m` that is closed under the "saturation" multiples of its rows), which
//! makes membership and kernel extraction exact. Isomorphism types come from
//! the Smith normal form of the square Howell matrix.

use std::fmt;

use crate::error::{Error, Result};

pub type Mat = Vec<Vec<i128>>;

/// Coordinates `(a₁,…,a_r)` with `0 ≤ aᵢ < dᵢ`.
pub type AbelianElement = Vec<u64>;

pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / crate::group::gcd(a, b) * b
}

// ---------------------------------------------------------------------------
// Howell form

/// Echelon basis of a subgroup of `Z^n / diag(m)`.
///
/// `rows[j]` has zeros before column `j` and pivot `rows[j][j]` dividing
/// `m_j`; a pivot equal to `m_j` means the column carries nothing. For every
/// row, `(m_j / p_j)·rows[j]` lies in the span of the later rows, so greedy
/// reduction decides membership exactly.
#[derive(Debug, Clone)]
pub struct Howell {
    moduli: Vec<i128>,
    rows: Mat,
}

impl Howell {
    pub fn new(moduli: &[u64]) -> Self {
        let n = moduli.len();
        let moduli: Vec<i128> = moduli.iter().map(|&m| m as i128).collect();
        let rows = (0..n)
            .map(|j| {
                let mut r = vec![0; n];
                r[j] = moduli[j];
                r
            })
            .collect();
        Howell { moduli, rows }
    }

    pub fn width(&self) -> usize {
        self.moduli.len()
    }

    fn normalize(&self, v: &mut [i128], from: usize) {
        for k in from..v.len() {
            v[k] = v[k].rem_euclid(self.moduli[k]);
        }
    }

    pub fn insert(&mut self, v: &[i128]) {
        let n = self.width();
        let mut stack = vec![v.to_vec()];
        while let Some(mut v) = stack.pop() {
            self.normalize(&mut v, 0);
            for j in 0..n {
                if v[j] == 0 {
                    continue;
                }
                let pj = self.rows[j][j];
                if v[j] % pj == 0 {
                    let f = v[j] / pj;
                    for k in j..n {
                        v[k] -= f * self.rows[j][k];
                    }
                    self.normalize(&mut v, j);
                    continue;
                }
                let (g, x, y) = xgcd(pj, v[j]);
                let p = &self.rows[j];
                let mut newp: Vec<i128> = (0..n).map(|k| x * p[k] + y * v[k]).collect();
                let (a, b) = (v[j] / g, pj / g);
                let mut w: Vec<i128> = (0..n).map(|k| a * p[k] - b * v[k]).collect();
                self.normalize(&mut newp, j + 1);
                newp[j] = g;
                self.normalize(&mut w, j);
                let mult = self.moduli[j] / g;
                let mut sat: Vec<i128> = newp.iter().map(|&e| e * mult).collect();
                sat[j] = 0;
                self.rows[j] = newp;
                stack.push(sat);
                v = w;
            }
        }
    }

    /// Greedy reduction over columns `lo..hi`; `Err(j)` reports the first
    /// column whose entry is not a multiple of the pivot.
    pub fn reduce(&self, v: &mut [i128], lo: usize, hi: usize) -> std::result::Result<(), usize> {
        let n = self.width();
        self.normalize(v, lo);
        for j in lo..hi {
            if v[j] == 0 {
                continue;
            }
            let pj = self.rows[j][j];
            if v[j] % pj != 0 {
                return Err(j);
            }
            let f = v[j] / pj;
            for k in j..n {
                v[k] -= f * self.rows[j][k];
            }
            self.normalize(v, j);
        }
        Ok(())
    }

    pub fn contains(&self, v: &[i128]) -> bool {
        let mut v = v.to_vec();
        let n = self.width();
        self.reduce(&mut v, 0, n).is_ok()
    }

    /// Rows with a genuine pivot in column `j ≥ from`.
    pub fn rows_from(&self, from: usize) -> impl Iterator<Item = &Vec<i128>> {
        (from..self.width())
            .filter(|&j| self.rows[j][j] != self.moduli[j])
            .map(|j| &self.rows[j])
    }

    /// The square upper-triangular matrix whose integer row span is the
    /// subgroup plus `diag(m)·Z^n`.
    pub fn square(&self) -> &Mat {
        &self.rows
    }

    /// Index of the subgroup in the ambient group.
    pub fn index(&self) -> u128 {
        (0..self.width())
            .map(|j| (self.rows[j][j]) as u128)
            .product()
    }
}

// ---------------------------------------------------------------------------
// Smith normal form

#[derive(Debug, Clone)]
pub struct Snf {
    pub u: Mat,
    pub d: Mat,
    pub v: Mat,
    pub v_inv: Mat,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.d.len().min(self.d.first().map_or(0, |r| r.len())))
            .map(|i| self.d[i][i])
            .collect()
    }
}

pub fn identity_matrix(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free elimination (Bareiss).
pub fn determinant(m: &Mat) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a = m.clone();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// `U·M·V = D` with `D` diagonal, nonnegative, `dᵢ | dᵢ₊₁`, and `U`, `V`
/// unimodular.
pub fn smith_normal_form(m: &Mat) -> Snf {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a = m.clone();
    let mut u = identity_matrix(rows);
    let mut v = identity_matrix(cols);
    let mut vinv = identity_matrix(cols);

    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j] != 0
                        && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            a.swap(t, pi);
            u.swap(t, pi);
            for r in a.iter_mut() {
                r.swap(t, pj);
            }
            for r in v.iter_mut() {
                r.swap(t, pj);
            }
            vinv.swap(t, pj);

            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    for j in 0..cols {
                        a[i][j] -= q * a[t][j];
                    }
                    for j in 0..rows {
                        u[i][j] -= q * u[t][j];
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    for i in 0..rows {
                        a[i][j] -= q * a[i][t];
                    }
                    for i in 0..cols {
                        v[i][j] -= q * v[i][t];
                    }
                    for k in 0..cols {
                        vinv[t][k] += q * vinv[j][k];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in 0..cols {
                        a[t][j] += a[i][j];
                    }
                    for j in 0..rows {
                        u[t][j] += u[i][j];
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for j in 0..cols {
                a[t][j] = -a[t][j];
            }
            for j in 0..rows {
                u[t][j] = -u[t][j];
            }
        }
    }
    Snf {
        u,
        d: a,
        v,
        v_inv: vinv,
    }
}

// ---------------------------------------------------------------------------
// Presentations Z^n / R

/// A finite quotient `Z^n / R`, identified with `⊕ Z/dᵢ` (nontrivial factors
/// only) through the column transform of a Smith normal form.
#[derive(Debug, Clone)]
pub struct Presentation {
    v: Mat,
    v_inv: Mat,
    keep: Vec<usize>,
    invariants: Vec<u64>,
}

impl Presentation {
    /// `Z^n / (diag(moduli) + span(relations))`.
    pub fn new(moduli: &[u64], relations: &[Vec<i128>]) -> Self {
        let mut h = Howell::new(moduli);
        for r in relations {
            h.insert(r);
        }
        Self::from_square(h.square())
    }

    fn from_square(m: &Mat) -> Self {
        let snf = smith_normal_form(m);
        let diag = snf.diagonal();
        let keep: Vec<usize> = (0..diag.len()).filter(|&i| diag[i] != 1).collect();
        let invariants = keep.iter().map(|&i| diag[i] as u64).collect();
        Presentation {
            v: snf.v,
            v_inv: snf.v_inv,
            keep,
            invariants,
        }
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn to_coords(&self, x: &[i128]) -> Vec<u64> {
        self.keep
            .iter()
            .zip(&self.invariants)
            .map(|(&j, &d)| {
                let s: i128 = x.iter().zip(&self.v).map(|(xi, row)| xi * row[j]).sum();
                s.rem_euclid(d as i128) as u64
            })
            .collect()
    }

    /// A preimage in `Z^n` (not reduced).
    pub fn from_coords(&self, c: &[u64]) -> Vec<i128> {
        let n = self.v_inv.len();
        (0..n)
            .map(|k| {
                self.keep
                    .iter()
                    .zip(c)
                    .map(|(&j, &cj)| cj as i128 * self.v_inv[j][k])
                    .sum()
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Abelian groups and elements

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianGroup {
    invariants: Vec<u64>,
}

impl AbelianGroup {
    /// Requires `d₁ | d₂ | …` with every `dᵢ ≥ 2`.
    pub fn new(invariants: Vec<u64>) -> Result<Self> {
        if invariants.iter().any(|&d| d < 2) {
            return Err(Error::argument("invariant factors must be at least 2"));
        }
        if invariants.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::argument(format!(
                "invariants {invariants:?} do not form a divisibility chain"
            )));
        }
        Ok(AbelianGroup { invariants })
    }

    pub fn trivial() -> Self {
        AbelianGroup {
            invariants: Vec::new(),
        }
    }

    /// Invariant-factor form of `⊕ Z/mᵢ` for arbitrary moduli.
    pub fn from_moduli(moduli: &[u64]) -> Self {
        AbelianGroup {
            invariants: Presentation::new(moduli, &[]).invariants().to_vec(),
        }
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn rank(&self) -> usize {
        self.invariants.len()
    }

    pub fn order(&self) -> u128 {
        self.invariants.iter().map(|&d| d as u128).product()
    }

    pub fn exponent(&self) -> u64 {
        self.invariants.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    pub fn zero(&self) -> AbelianElement {
        vec![0; self.rank()]
    }

    pub fn basis(&self, i: usize) -> AbelianElement {
        let mut e = self.zero();
        e[i] = 1 % self.invariants[i];
        e
    }

    pub fn reduce(&self, x: &[i128]) -> AbelianElement {
        x.iter()
            .zip(&self.invariants)
            .map(|(&a, &d)| a.rem_euclid(d as i128) as u64)
            .collect()
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> AbelianElement {
        a.iter()
            .zip(b)
            .zip(&self.invariants)
            .map(|((x, y), d)| (x + y) % d)
            .collect()
    }

    pub fn neg(&self, a: &[u64]) -> AbelianElement {
        a.iter()
            .zip(&self.invariants)
            .map(|(x, d)| (d - x % d) % d)
            .collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> AbelianElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, k: i128, a: &[u64]) -> AbelianElement {
        a.iter()
            .zip(&self.invariants)
            .map(|(&x, &d)| (k.rem_euclid(d as i128) * x as i128).rem_euclid(d as i128) as u64)
            .collect()
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// Order of an element.
    pub fn element_order(&self, a: &[u64]) -> u64 {
        a.iter()
            .zip(&self.invariants)
            .fold(1, |acc, (&x, &d)| lcm_u64(acc, d / crate::group::gcd(x, d)))
    }

    /// All elements in lexicographic order; intended for small groups.
    pub fn elements(&self) -> impl Iterator<Item = AbelianElement> + '_ {
        let total = self.order();
        (0..total).map(move |mut k| {
            let mut out = self.zero();
            for i in (0..self.rank()).rev() {
                let d = self.invariants[i] as u128;
                out[i] = (k % d) as u64;
                k /= d;
            }
            out
        })
    }

    /// The character group `Hom(A, Q/Z)`, with the same invariants.
    pub fn dual(&self) -> AbelianGroup {
        self.clone()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariants.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.invariants.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

pub fn dual_group(a: &AbelianGroup) -> AbelianGroup {
    a.dual()
}

pub fn to_i128(x: &[u64]) -> Vec<i128> {
    x.iter().map(|&a| a as i128).collect()
}

// ---------------------------------------------------------------------------
// Q/Z

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QmodZ {
    num: u64,
    den: u64,
}

impl QmodZ {
    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let n = num.rem_euclid(den as i128) as u64;
        let g = crate::group::gcd(n, den);
        if n == 0 {
            QmodZ { num: 0, den: 1 }
        } else {
            QmodZ {
                num: n / g,
                den: den / g,
            }
        }
    }

    pub fn zero() -> Self {
        QmodZ { num: 0, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn add(&self, other: &QmodZ) -> QmodZ {
        let den = lcm_u64(self.den, other.den);
        let n = self.num as i128 * (den / self.den) as i128 + other.num as i128 * (den / other.den) as i128;
        QmodZ::new(n, den)
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `Σ cᵢ aᵢ / dᵢ mod 1`.
pub fn pairing(a: &AbelianGroup, c: &[u64], x: &[u64]) -> QmodZ {
    let e = a.exponent();
    let n: i128 = c
        .iter()
        .zip(x)
        .zip(a.invariants())
        .map(|((&ci, &xi), &d)| {
            let prod = (ci as i128 * xi as i128).rem_euclid(d as i128);
            prod * (e / d) as i128
        })
        .sum();
    QmodZ::new(n, e)
}

// ---------------------------------------------------------------------------
// Homomorphisms

/// A homomorphism given by the images of the standard generators of the
/// domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianHom {
    domain: AbelianGroup,
    codomain: AbelianGroup,
    images: Vec<AbelianElement>,
}

impl AbelianHom {
    pub fn new(
        domain: AbelianGroup,
        codomain: AbelianGroup,
        images: Vec<AbelianElement>,
    ) -> Result<Self> {
        if images.len() != domain.rank() {
            return Err(Error::argument("homomorphism needs one image per generator"));
        }
        for (img, &d) in images.iter().zip(domain.invariants()) {
            if img.len() != codomain.rank() {
                return Err(Error::argument("image has the wrong length"));
            }
            let img = codomain.reduce(&to_i128(img));
            if !codomain.is_zero(&codomain.scale(d as i128, &img)) {
                return Err(Error::argument(
                    "image is not annihilated by the order of its generator",
                ));
            }
        }
        let images = images
            .iter()
            .map(|img| codomain.reduce(&to_i128(img)))
            .collect();
        Ok(AbelianHom {
            domain,
            codomain,
            images,
        })
    }

    pub fn identity(a: &AbelianGroup) -> Self {
        let images = (0..a.rank()).map(|i| a.basis(i)).collect();
        AbelianHom {
            domain: a.clone(),
            codomain: a.clone(),
            images,
        }
    }

    pub fn domain(&self) -> &AbelianGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &AbelianGroup {
        &self.codomain
    }

    /// Row `i` is the image of the `i`-th generator.
    pub fn images(&self) -> &[AbelianElement] {
        &self.images
    }

    pub fn apply(&self, x: &[u64]) -> AbelianElement {
        let mut acc = vec![0i128; self.codomain.rank()];
        for (xi, img) in x.iter().zip(&self.images) {
            for (a, &b) in acc.iter_mut().zip(img) {
                *a += *xi as i128 * b as i128;
            }
        }
        self.codomain.reduce(&acc)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AbelianHom) -> AbelianHom {
        AbelianHom {
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            images: other.images.iter().map(|y| self.apply(y)).collect(),
        }
    }

    pub fn sub(&self, other: &AbelianHom) -> AbelianHom {
        AbelianHom {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            images: self
                .images
                .iter()
                .zip(&other.images)
                .map(|(a, b)| self.codomain.sub(a, b))
                .collect(),
        }
    }

    pub fn is_bijective(&self) -> bool {
        self.domain.order() == self.codomain.order() && self.kernel().order() == 1
    }

    pub fn kernel(&self) -> SubgroupA {
        let gens = kernel_generators(
            self.domain.invariants(),
            self.codomain.invariants(),
            &self.images,
        );
        SubgroupA::generated(self.domain.invariants(), &gens)
    }

    pub fn image(&self) -> SubgroupA {
        SubgroupA::generated(self.codomain.invariants(), &self.images)
    }
}

/// Generators of the kernel of `x ↦ Σ xᵢ·imagesᵢ` from `⊕ Z/domainᵢ` to
/// `⊕ Z/codomainⱼ`, by Howell reduction of `[f(eᵢ) | eᵢ]`.
pub fn kernel_generators(
    domain: &[u64],
    codomain: &[u64],
    images: &[AbelianElement],
) -> Vec<AbelianElement> {
    let r = codomain.len();
    let moduli: Vec<u64> = codomain.iter().chain(domain).copied().collect();
    let mut h = Howell::new(&moduli);
    for (i, img) in images.iter().enumerate() {
        let mut v = to_i128(img);
        v.extend((0..domain.len()).map(|k| i128::from(k == i)));
        h.insert(&v);
    }
    h.rows_from(r)
        .map(|row| row[r..].iter().map(|&x| x as u64).collect())
        .collect()
}

pub fn fixed_subgroup(f: &AbelianHom) -> SubgroupA {
    f.sub(&AbelianHom::identity(f.domain())).kernel()
}

// ---------------------------------------------------------------------------
// Subgroups

/// A subgroup of `⊕ Z/mᵢ` with an exact membership solver and an
/// identification with its own invariant-factor form.
#[derive(Debug, Clone)]
pub struct SubgroupA {
    moduli: Vec<u64>,
    generators: Vec<AbelianElement>,
    basis: Vec<AbelianElement>,
    solver: Howell,
    exponent: u64,
    structure: Presentation,
    group: AbelianGroup,
}

impl SubgroupA {
    pub fn generated(moduli: &[u64], gens: &[AbelianElement]) -> Self {
        let mut h = Howell::new(moduli);
        for g in gens {
            h.insert(&to_i128(g));
        }
        let basis: Vec<AbelianElement> = h
            .rows_from(0)
            .map(|r| r.iter().map(|&x| x as u64).collect())
            .collect();
        let exponent = moduli.iter().fold(1, |a, &m| lcm_u64(a, m));
        let r = moduli.len();
        let b = basis.len();
        let mut ext = moduli.to_vec();
        ext.extend(std::iter::repeat(exponent).take(b));
        let mut solver = Howell::new(&ext);
        for (i, v) in basis.iter().enumerate() {
            let mut row = to_i128(v);
            row.extend((0..b).map(|k| i128::from(k == i)));
            solver.insert(&row);
        }
        let relations: Vec<Vec<i128>> = solver.rows_from(r).map(|row| row[r..].to_vec()).collect();
        let structure = Presentation::new(&vec![exponent; b], &relations);
        let group = AbelianGroup {
            invariants: structure.invariants().to_vec(),
        };
        SubgroupA {
            moduli: moduli.to_vec(),
            generators: gens.to_vec(),
            basis,
            solver,
            exponent,
            structure,
            group,
        }
    }

    pub fn full(moduli: &[u64]) -> Self {
        let gens: Vec<AbelianElement> = (0..moduli.len())
            .map(|i| {
                let mut e = vec![0; moduli.len()];
                e[i] = 1 % moduli[i];
                e
            })
            .collect();
        Self::generated(moduli, &gens)
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn generators(&self) -> &[AbelianElement] {
        &self.generators
    }

    /// Canonical generating set (nonzero Howell rows).
    pub fn basis(&self) -> &[AbelianElement] {
        &self.basis
    }

    /// Isomorphism type.
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn order(&self) -> u128 {
        self.group.order()
    }

    /// Coefficients `c` with `x = Σ cᵢ·basisᵢ`, if `x` is a member.
    pub fn solve(&self, x: &[u64]) -> Option<Vec<i128>> {
        let r = self.moduli.len();
        let mut v = to_i128(x);
        v.extend(std::iter::repeat(0).take(self.basis.len()));
        self.solver.reduce(&mut v, 0, r).ok()?;
        let e = self.exponent as i128;
        Some(v[r..].iter().map(|&c| (-c).rem_euclid(e)).collect())
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.solve(x).is_some()
    }

    /// Coordinates of a member in the invariant-factor form of the subgroup.
    pub fn to_coords(&self, x: &[u64]) -> Option<AbelianElement> {
        self.solve(x).map(|c| self.structure.to_coords(&c))
    }

    /// The member with the given invariant-factor coordinates.
    pub fn from_coords(&self, c: &[u64]) -> AbelianElement {
        let coeffs = self.structure.from_coords(c);
        self.combine(&coeffs)
    }

    fn combine(&self, coeffs: &[i128]) -> AbelianElement {
        let mut acc = vec![0i128; self.moduli.len()];
        for (c, v) in coeffs.iter().zip(&self.basis) {
            for ((a, &b), &m) in acc.iter_mut().zip(v).zip(&self.moduli) {
                let m = m as i128;
                *a = (*a + c.rem_euclid(m) * b as i128).rem_euclid(m);
            }
        }
        acc.iter().map(|&a| a as u64).collect()
    }

    pub fn is_subgroup_of(&self, other: &SubgroupA) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// Generators of the subgroup in the invariant-factor coordinates of the
    /// subgroup itself, one per invariant factor.
    pub fn canonical_generators(&self) -> Vec<AbelianElement> {
        (0..self.group.rank())
            .map(|i| self.from_coords(&self.group.basis(i)))
            .collect()
    }

    /// `{x ∈ self : f(x) = 0}` for a map `f` that is additive on `self`,
    /// with values in `⊕ Z/codomainⱼ`.
    pub fn kernel_of(&self, codomain: &[u64], f: impl Fn(&[u64]) -> Vec<u64>) -> SubgroupA {
        let gens = self.canonical_generators();
        let images: Vec<AbelianElement> = gens.iter().map(|g| f(g)).collect();
        if images.iter().all(|v| v.iter().all(|&x| x == 0)) {
            return self.clone();
        }
        let coords = kernel_generators(self.group.invariants(), codomain, &images);
        let members: Vec<AbelianElement> = coords.iter().map(|c| self.from_coords(c)).collect();
        SubgroupA::generated(&self.moduli, &members)
    }

    /// All members when there are at most `limit`, otherwise the canonical
    /// generators; enough for checking a linear condition.
    pub fn elements_or_generators(&self, limit: u128) -> Vec<AbelianElement> {
        if self.order() <= limit {
            self.elements()
        } else {
            self.canonical_generators()
        }
    }

    /// Enumerates members; intended for small subgroups.
    pub fn elements(&self) -> Vec<AbelianElement> {
        self.group.elements().map(|c| self.from_coords(&c)).collect()
    }

    /// `self / ⟨gens⟩`, where every element of `gens` must lie in `self`.
    pub fn quotient_by(&self, gens: &[AbelianElement]) -> Result<Quotient> {
        let coords = gens
            .iter()
            .map(|g| {
                self.to_coords(g).ok_or_else(|| {
                    Error::argument("subgroup generator is not contained in the ambient subgroup")
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let inner = SubgroupA::generated(self.group.invariants(), &coords);
        Ok(quotient(&self.group, &inner))
    }
}

/// `A / H` with projection and a section.
#[derive(Debug, Clone)]
pub struct Quotient {
    ambient: AbelianGroup,
    group: AbelianGroup,
    presentation: Presentation,
}

impl Quotient {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn ambient(&self) -> &AbelianGroup {
        &self.ambient
    }

    pub fn proj(&self, x: &[u64]) -> AbelianElement {
        self.presentation.to_coords(&to_i128(x))
    }

    pub fn lift(&self, y: &[u64]) -> AbelianElement {
        self.ambient.reduce(&self.presentation.from_coords(y))
    }

    pub fn proj_hom(&self) -> AbelianHom {
        let images = (0..self.ambient.rank())
            .map(|i| self.proj(&self.ambient.basis(i)))
            .collect();
        AbelianHom {
            domain: self.ambient.clone(),
            codomain: self.group.clone(),
            images,
        }
    }
}

/// `A / H`; `H` must be a subgroup of `A`.
pub fn quotient(a: &AbelianGroup, h: &SubgroupA) -> Quotient {
    debug_assert_eq!(h.moduli(), a.invariants());
    let relations: Vec<Vec<i128>> = h.basis().iter().map(|b| to_i128(b)).collect();
    let presentation = Presentation::new(a.invariants(), &relations);
    Quotient {
        ambient: a.clone(),
        group: AbelianGroup {
            invariants: presentation.invariants().to_vec(),
        },
        presentation,
    }
}

/// Checked form of [`quotient`] for subgroups given by arbitrary elements.
pub fn quotient_by_elements(a: &AbelianGroup, gens: &[AbelianElement]) -> Result<Quotient> {
    for g in gens {
        if g.len() != a.rank() || g.iter().zip(a.invariants()).any(|(&x, &d)| x >= d) {
            return Err(Error::argument("subgroup element does not belong to the group"));
        }
    }
    Ok(quotient(a, &SubgroupA::generated(a.invariants(), gens)))
}

pub fn subgroup_generated(a: &AbelianGroup, gens: &[AbelianElement]) -> SubgroupA {
    SubgroupA::generated(a.invariants(), gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(ds: &[u64]) -> AbelianGroup {
        AbelianGroup::new(ds.to_vec()).unwrap()
    }

    fn check_snf(m: &Mat) -> Snf {
        let s = smith_normal_form(m);
        assert_eq!(mat_mul(&mat_mul(&s.u, m), &s.v), s.d);
        assert_eq!(determinant(&s.u).abs(), 1);
        assert_eq!(determinant(&s.v).abs(), 1);
        assert_eq!(mat_mul(&s.v, &s.v_inv), identity_matrix(s.v.len()));
        let d = s.diagonal();
        for w in d.windows(2) {
            if w[0] != 0 {
                assert_eq!(w[1] % w[0], 0);
            } else {
                assert_eq!(w[1], 0);
            }
        }
        s
    }

    #[test]
    fn snf_examples() {
        assert_eq!(check_snf(&vec![vec![1, 0], vec![0, 1]]).diagonal(), vec![1, 1]);
        assert_eq!(check_snf(&vec![vec![2, 4], vec![6, 8]]).diagonal(), vec![2, 4]);
        assert_eq!(check_snf(&vec![vec![0, 0], vec![0, 0]]).diagonal(), vec![0, 0]);
        assert_eq!(check_snf(&vec![vec![2, 0], vec![0, 3]]).diagonal(), vec![1, 6]);
        check_snf(&vec![vec![4, 6, 2], vec![10, 0, 8]]);
    }

    #[test]
    fn from_moduli_normalizes() {
        assert_eq!(AbelianGroup::from_moduli(&[2, 3]).invariants(), &[6]);
        assert_eq!(AbelianGroup::from_moduli(&[4, 2, 1]).invariants(), &[2, 4]);
        assert!(AbelianGroup::from_moduli(&[1]).is_trivial());
    }

    #[test]
    fn rejects_broken_chain() {
        assert!(AbelianGroup::new(vec![4, 6]).is_err());
        assert!(AbelianGroup::new(vec![1]).is_err());
    }

    #[test]
    fn quotient_examples() {
        let a = grp(&[3, 3]);
        let q = quotient_by_elements(&a, &[vec![1, 0]]).unwrap();
        assert_eq!(q.group().invariants(), &[3]);

        let a = grp(&[3, 3, 3]);
        let q = quotient_by_elements(&a, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert_eq!(q.group().invariants(), &[3]);
        assert!(q.group().order() * 9 == a.order());

        let q = quotient_by_elements(&a, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert!(q.group().is_trivial());

        assert!(quotient_by_elements(&a, &[vec![5, 0, 0]]).is_err());
    }

    #[test]
    fn quotient_projection_and_lift() {
        let a = grp(&[2, 4, 8]);
        let h = subgroup_generated(&a, &[vec![1, 2, 4], vec![0, 2, 6]]);
        let q = quotient(&a, &h);
        assert_eq!(q.group().order() * h.order(), a.order());
        for g in h.basis() {
            assert!(q.group().is_zero(&q.proj(g)));
        }
        for y in q.group().elements() {
            assert_eq!(q.proj(&q.lift(&y)), y);
        }
        for x in a.elements() {
            let back = q.lift(&q.proj(&x));
            assert!(h.contains(&a.sub(&x, &back)));
        }
    }

    #[test]
    fn subgroup_membership_matches_enumeration() {
        let a = grp(&[2, 4, 8]);
        let gens = vec![vec![1, 2, 4], vec![0, 3, 6]];
        let h = subgroup_generated(&a, &gens);
        let mut members = std::collections::BTreeSet::new();
        members.insert(a.zero());
        loop {
            let before = members.len();
            let current: Vec<_> = members.iter().cloned().collect();
            for x in &current {
                for g in &gens {
                    members.insert(a.add(x, g));
                }
            }
            if members.len() == before {
                break;
            }
        }
        assert_eq!(h.order(), members.len() as u128);
        for x in a.elements() {
            assert_eq!(h.contains(&x), members.contains(&x));
        }
        for x in &members {
            let c = h.to_coords(x).unwrap();
            assert_eq!(&h.from_coords(&c), x);
        }
    }

    #[test]
    fn fixed_subgroup_examples() {
        let a = grp(&[3, 9]);
        assert_eq!(fixed_subgroup(&AbelianHom::identity(&a)).order(), 27);

        let z5 = grp(&[5]);
        let f = AbelianHom::new(z5.clone(), z5, vec![vec![2]]).unwrap();
        assert_eq!(fixed_subgroup(&f).order(), 1);

        // x ↦ 4x on Z/9 × Z/9 × Z/3 fixes the 3-torsion
        let a = grp(&[3, 9, 9]);
        let f = AbelianHom::new(a.clone(), a.clone(), (0..3).map(|i| a.scale(4, &a.basis(i))).collect()).unwrap();
        assert_eq!(fixed_subgroup(&f).group().invariants(), &[3, 3, 3]);
    }

    #[test]
    fn hom_rejects_ill_defined_images() {
        let z2 = grp(&[2]);
        let z3 = grp(&[3]);
        assert!(AbelianHom::new(z2, z3, vec![vec![1]]).is_err());
    }

    #[test]
    fn pairing_examples() {
        let z3 = grp(&[3]);
        assert_eq!(pairing(&z3, &[1], &[1]).to_string(), "1/3");
        assert!(pairing(&z3, &[2], &[0]).is_zero());
        let a = grp(&[2, 4]);
        assert!(pairing(&a, &[1, 1], &[1, 2]).is_zero());
        assert_eq!(pairing(&a, &[1, 1], &[1, 1]).to_string(), "3/4");
    }

    #[test]
    fn pairing_is_nondegenerate() {
        let a = grp(&[2, 6, 12]);
        for x in a.elements().filter(|x| !a.is_zero(x)) {
            assert!(a.elements().any(|c| !pairing(&a, &c, &x).is_zero()));
        }
    }

    #[test]
    fn qmodz_arithmetic() {
        let a = QmodZ::new(1, 3);
        let b = QmodZ::new(2, 3);
        assert!(a.add(&b).is_zero());
        assert_eq!(QmodZ::new(-1, 4).to_string(), "3/4");
        assert_eq!(QmodZ::new(2, 4), QmodZ::new(1, 2));
    }

    #[test]
    fn kernel_matches_enumeration() {
        let a = grp(&[4, 12]);
        let b = grp(&[6]);
        let f = AbelianHom::new(a.clone(), b.clone(), vec![vec![3], vec![2]]).unwrap();
        let k = f.kernel();
        let brute = a.elements().filter(|x| b.is_zero(&f.apply(x))).count();
        assert_eq!(k.order(), brute as u128);
        for x in a.elements() {
            assert_eq!(k.contains(&x), b.is_zero(&f.apply(&x)));
        }
    }

    #[test]
    fn subgroup_quotient_by() {
        let a = grp(&[9, 9]);
        let f = subgroup_generated(&a, &[vec![3, 0], vec![0, 3]]);
        let q = f.quotient_by(&[vec![3, 3]]).unwrap();
        assert_eq!(q.group().invariants(), &[3]);
        assert!(f.quotient_by(&[vec![1, 0]]).is_err());
    }
}
