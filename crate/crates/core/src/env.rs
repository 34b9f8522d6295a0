//! The restricted enveloping algebra u(L) on its PBW basis.
//!
//! A PBW monomial `x_0^{a_0} ⋯ x_{n-1}^{a_{n-1}}` with every `a_i < p` is
//! stored as the mixed-radix index `Σ a_i p^i`. Products are straightened by
//! right-multiplying one generator at a time: a generator `x_j` is moved left
//! past larger generators using `x_k x_j = x_j x_k + [x_k, x_j]`, and a power
//! `x_j^p` is replaced by `x_j^{[p]}`. The (monomial, generator) products are
//! memoized per algebra.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::field::PrimeField;
use crate::liealg::Structure;
use crate::linalg::{LinalgError, Subspace};

/// Default bound on `dim u(L) = p^n` for operations that coordinatize u(L).
pub const DEFAULT_AMBIENT_CAP: usize = 2187;

static NEXT_ENVELOPE_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("elements belong to different enveloping algebras")]
    ParentMismatch,
    #[error("dim u(L) = {dim} exceeds the ambient cap {cap}")]
    AmbientTooLarge { dim: u128, cap: usize },
    #[error("monomial exponent vector {0:?} is not a PBW monomial")]
    InvalidMonomial(Vec<u8>),
    #[error("coefficient vector has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An exponent vector `a` with `0 ≤ a_i < p`, read in basis order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PbwMonomial {
    exponents: Vec<u8>,
}

impl PbwMonomial {
    pub fn exponents(&self) -> &[u8] {
        &self.exponents
    }

    pub fn degree(&self) -> usize {
        self.exponents.iter().map(|&a| a as usize).sum()
    }
}

/// A finite F_p-linear combination of PBW monomials with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EnvElement {
    parent: u64,
    field: PrimeField,
    terms: BTreeMap<u64, u8>,
}

impl fmt::Debug for EnvElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl EnvElement {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as (monomial index, coefficient) pairs in increasing index order.
    pub fn indexed_terms(&self) -> impl Iterator<Item = (u64, u8)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn coefficient(&self, index: u64) -> u8 {
        self.terms.get(&index).copied().unwrap_or(0)
    }

    fn same_parent(&self, other: &EnvElement) -> bool {
        self.parent == other.parent
    }

    fn add_term(&mut self, m: u64, c: u8) {
        if c == 0 {
            return;
        }
        let f = self.field;
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = f.add(*e.get(), c);
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, other: &EnvElement) -> EnvElement {
        assert!(self.same_parent(other), "adding elements of different algebras");
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn sub(&self, other: &EnvElement) -> EnvElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, a: u8) -> EnvElement {
        let f = self.field;
        let a = a % f.p();
        let terms = if a == 0 {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(&m, &c)| (m, f.mul(a, c))).collect()
        };
        EnvElement {
            parent: self.parent,
            field: f,
            terms,
        }
    }

    pub fn neg(&self) -> EnvElement {
        self.scale(self.field.p() - 1)
    }
}

/// Symmetric and skew-symmetric parts of u(L) under the principal involution,
/// as subspaces of the monomial-coordinatized ambient F_p^{p^n}.
#[derive(Debug, Clone)]
pub struct InvolutionDecomposition {
    pub plus: Subspace,
    pub minus: Subspace,
}

type Sparse = Arc<[(u64, u8)]>;

/// Accumulates a sparse linear combination with coefficients mod p.
struct Acc {
    field: PrimeField,
    terms: HashMap<u64, u8>,
}

impl Acc {
    fn new(field: PrimeField) -> Self {
        Self {
            field,
            terms: HashMap::new(),
        }
    }

    fn add(&mut self, m: u64, c: u8) {
        if c == 0 {
            return;
        }
        let f = self.field;
        let slot = self.terms.entry(m).or_insert(0);
        *slot = f.add(*slot, c);
    }

    fn add_scaled(&mut self, terms: &[(u64, u8)], a: u8) {
        let f = self.field;
        for &(m, c) in terms {
            self.add(m, f.mul(a, c));
        }
    }

    fn into_sparse(self) -> Sparse {
        let mut v: Vec<(u64, u8)> = self.terms.into_iter().filter(|&(_, c)| c != 0).collect();
        v.sort_unstable_by_key(|&(m, _)| m);
        v.into()
    }

    fn into_map(self) -> BTreeMap<u64, u8> {
        self.terms.into_iter().filter(|&(_, c)| c != 0).collect()
    }
}

/// The restricted enveloping algebra of a validated restricted Lie algebra.
pub struct Enveloping {
    id: u64,
    structure: Arc<Structure>,
    /// `radix[i] = p^i`
    radix: Vec<u64>,
    dim: u128,
    memo: RwLock<HashMap<(u64, u32), Sparse>>,
}

impl fmt::Debug for Enveloping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Enveloping")
            .field("p", &self.structure.field.p())
            .field("n", &self.structure.n)
            .field("dim", &self.dim)
            .finish()
    }
}

impl Enveloping {
    pub(crate) fn new(structure: Arc<Structure>) -> Self {
        let p = structure.field.p() as u128;
        let n = structure.n;
        let mut dim: u128 = 1;
        let mut radix = Vec::with_capacity(n);
        for _ in 0..n {
            radix.push(dim.min(u64::MAX as u128) as u64);
            dim = dim.saturating_mul(p);
        }
        assert!(
            dim <= u64::MAX as u128,
            "p^n = {dim} does not fit the monomial index"
        );
        Self {
            id: NEXT_ENVELOPE_ID.fetch_add(1, Ordering::Relaxed),
            structure,
            radix,
            dim,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.structure.field
    }

    /// Dimension of the Lie algebra `L`.
    pub fn rank(&self) -> usize {
        self.structure.n
    }

    /// `dim u(L) = p^n`.
    pub fn dim(&self) -> u128 {
        self.dim
    }

    pub fn names(&self) -> &[String] {
        &self.structure.names
    }

    /// `dim u(L)` as a vector length, if it does not exceed `cap`.
    pub fn ambient_dim(&self, cap: usize) -> Result<usize, EnvError> {
        if self.dim > cap as u128 {
            return Err(EnvError::AmbientTooLarge { dim: self.dim, cap });
        }
        Ok(self.dim as usize)
    }

    /// Number of memoized (monomial, generator) products.
    pub fn memo_len(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }

    // ----- monomials -----

    pub fn monomial_index(&self, m: &PbwMonomial) -> u64 {
        m.exponents
            .iter()
            .zip(&self.radix)
            .map(|(&a, &r)| a as u64 * r)
            .sum()
    }

    pub fn monomial_at(&self, index: u64) -> PbwMonomial {
        let p = self.field().p() as u64;
        let mut rest = index;
        let exponents = (0..self.rank())
            .map(|_| {
                let a = (rest % p) as u8;
                rest /= p;
                a
            })
            .collect();
        PbwMonomial { exponents }
    }

    pub fn pbw_monomial(&self, exponents: &[u8]) -> Result<PbwMonomial, EnvError> {
        if exponents.len() != self.rank() || exponents.iter().any(|&a| a >= self.field().p()) {
            return Err(EnvError::InvalidMonomial(exponents.to_vec()));
        }
        Ok(PbwMonomial {
            exponents: exponents.to_vec(),
        })
    }

    fn exponent(&self, index: u64, i: usize) -> u8 {
        ((index / self.radix[i]) % self.field().p() as u64) as u8
    }

    fn top_generator(&self, index: u64) -> Option<usize> {
        (0..self.rank()).rev().find(|&i| self.exponent(index, i) > 0)
    }

    pub fn monomial_degree(&self, index: u64) -> usize {
        (0..self.rank()).map(|i| self.exponent(index, i) as usize).sum()
    }

    // ----- element constructors -----

    fn element(&self, terms: BTreeMap<u64, u8>) -> EnvElement {
        EnvElement {
            parent: self.id,
            field: self.field(),
            terms,
        }
    }

    pub fn zero(&self) -> EnvElement {
        self.element(BTreeMap::new())
    }

    pub fn one(&self) -> EnvElement {
        self.element(BTreeMap::from([(0, 1)]))
    }

    pub fn monomial(&self, exponents: &[u8]) -> Result<EnvElement, EnvError> {
        let m = self.pbw_monomial(exponents)?;
        Ok(self.element(BTreeMap::from([(self.monomial_index(&m), 1)])))
    }

    pub fn monomial_element(&self, index: u64) -> EnvElement {
        self.element(BTreeMap::from([(index, 1)]))
    }

    pub fn generator(&self, i: usize) -> EnvElement {
        self.monomial_element(self.radix[i])
    }

    /// `L ⊆ u(L)`: the degree-one element with the given coordinates.
    pub fn embed(&self, x: &[u8]) -> Result<EnvElement, EnvError> {
        if x.len() != self.rank() {
            return Err(EnvError::DimensionMismatch {
                expected: self.rank(),
                found: x.len(),
            });
        }
        let p = self.field().p();
        let terms = x
            .iter()
            .enumerate()
            .filter(|(_, &c)| c % p != 0)
            .map(|(i, &c)| (self.radix[i], c % p))
            .collect();
        Ok(self.element(terms))
    }

    /// Builds an element from (exponent vector, coefficient) pairs; coefficients
    /// are reduced mod p.
    pub fn from_terms(&self, terms: &[(&[u8], i64)]) -> Result<EnvElement, EnvError> {
        let mut out = self.zero();
        for &(exps, c) in terms {
            let m = self.pbw_monomial(exps)?;
            out.add_term(self.monomial_index(&m), self.field().reduce(c));
        }
        Ok(out)
    }

    /// Inverse of [`Enveloping::embed`] on elements of degree at most one.
    /// Returns `None` if a term of another degree is present.
    pub fn extract_linear(&self, a: &EnvElement) -> Option<Vec<u8>> {
        let mut x = vec![0u8; self.rank()];
        for (m, c) in a.indexed_terms() {
            let i = self.radix.iter().position(|&r| r == m)?;
            x[i] = c;
        }
        Some(x)
    }

    fn check(&self, a: &EnvElement) -> Result<(), EnvError> {
        if a.parent != self.id {
            return Err(EnvError::ParentMismatch);
        }
        Ok(())
    }

    // ----- straightening -----

    /// `m · x_j` in PBW normal form.
    pub(crate) fn rmul(&self, m: u64, j: usize) -> Sparse {
        if let Some(r) = self.memo.read().expect("memo lock").get(&(m, j as u32)) {
            return r.clone();
        }
        let r = self.compute_rmul(m, j);
        self.memo
            .write()
            .expect("memo lock")
            .entry((m, j as u32))
            .or_insert(r)
            .clone()
    }

    fn compute_rmul(&self, m: u64, j: usize) -> Sparse {
        let s = &*self.structure;
        let f = s.field;
        let p = f.p();
        match self.top_generator(m) {
            Some(k) if k > j => {
                // m = m0 x_k, so m x_j = (m0 x_j) x_k + m0 [x_k, x_j]
                let m0 = m - self.radix[k];
                let mut acc = Acc::new(f);
                for &(t, c) in self.rmul(m0, j).iter() {
                    acc.add_scaled(&self.rmul(t, k), c);
                }
                for (l, &c) in s.bracket_basis(k, j).iter().enumerate() {
                    if c != 0 {
                        acc.add_scaled(&self.rmul(m0, l), c);
                    }
                }
                acc.into_sparse()
            }
            _ => {
                if self.exponent(m, j) + 1 < p {
                    return Arc::from(vec![(m + self.radix[j], 1)]);
                }
                // x_j^p = x_j^{[p]}
                let base = m - (p as u64 - 1) * self.radix[j];
                let mut acc = Acc::new(f);
                for (l, &c) in s.pmap[j].iter().enumerate() {
                    if c != 0 {
                        acc.add_scaled(&self.rmul(base, l), c);
                    }
                }
                acc.into_sparse()
            }
        }
    }

    fn generator_sequence(&self, index: u64) -> Vec<usize> {
        let mut seq = Vec::new();
        for i in 0..self.rank() {
            for _ in 0..self.exponent(index, i) {
                seq.push(i);
            }
        }
        seq
    }

    /// `a · m` for a sparse `a` and a monomial index `m`.
    fn mul_by_monomial(&self, a: &[(u64, u8)], m: u64) -> Sparse {
        let mut cur: Sparse = Arc::from(a.to_vec());
        for g in self.generator_sequence(m) {
            let mut acc = Acc::new(self.field());
            for &(t, c) in cur.iter() {
                acc.add_scaled(&self.rmul(t, g), c);
            }
            cur = acc.into_sparse();
        }
        cur
    }

    /// Product of two PBW monomials given by index.
    pub fn monomial_product(&self, a: u64, b: u64) -> Vec<(u64, u8)> {
        self.mul_by_monomial(&[(a, 1)], b).to_vec()
    }

    fn mul_unchecked(&self, a: &EnvElement, b: &EnvElement) -> EnvElement {
        let left: Vec<(u64, u8)> = a.indexed_terms().collect();
        let mut acc = Acc::new(self.field());
        if !left.is_empty() {
            for (m, c) in b.indexed_terms() {
                acc.add_scaled(&self.mul_by_monomial(&left, m), c);
            }
        }
        self.element(acc.into_map())
    }

    pub fn multiply(&self, a: &EnvElement, b: &EnvElement) -> Result<EnvElement, EnvError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn power(&self, a: &EnvElement, e: u64) -> Result<EnvElement, EnvError> {
        self.check(a)?;
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul_unchecked(&acc, a);
        }
        Ok(acc)
    }

    /// The commutator `ab - ba`.
    pub fn lie_bracket(&self, a: &EnvElement, b: &EnvElement) -> Result<EnvElement, EnvError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b).sub(&self.mul_unchecked(b, a)))
    }

    /// `[a, _r b] = [[a, _{r-1} b], b]`, with `[a, _0 b] = a`.
    pub fn engel_power(&self, a: &EnvElement, b: &EnvElement, r: usize) -> Result<EnvElement, EnvError> {
        self.check(a)?;
        self.check(b)?;
        let mut cur = a.clone();
        for _ in 0..r {
            if cur.is_zero() {
                break;
            }
            cur = self.mul_unchecked(&cur, b).sub(&self.mul_unchecked(b, &cur));
        }
        Ok(cur)
    }

    // ----- involution -----

    /// Image of a single monomial under the principal involution.
    pub(crate) fn involution_monomial(&self, m: u64) -> Sparse {
        let mut cur: Sparse = Arc::from(vec![(0u64, 1u8)]);
        for i in (0..self.rank()).rev() {
            for _ in 0..self.exponent(m, i) {
                let mut acc = Acc::new(self.field());
                for &(t, c) in cur.iter() {
                    acc.add_scaled(&self.rmul(t, i), c);
                }
                cur = acc.into_sparse();
            }
        }
        if self.monomial_degree(m) % 2 == 1 {
            let f = self.field();
            cur = cur.iter().map(|&(t, c)| (t, f.neg(c))).collect();
        }
        cur
    }

    /// The principal involution: the antiautomorphism with `x ↦ -x` on `L`.
    pub fn involution(&self, a: &EnvElement) -> Result<EnvElement, EnvError> {
        self.check(a)?;
        let mut acc = Acc::new(self.field());
        for (m, c) in a.indexed_terms() {
            acc.add_scaled(&self.involution_monomial(m), c);
        }
        Ok(self.element(acc.into_map()))
    }

    // ----- dense coordinates -----

    /// Coordinates of `a` in F_p^{p^n}, indexed by monomial index.
    pub fn to_dense(&self, a: &EnvElement, cap: usize) -> Result<Vec<u8>, EnvError> {
        self.check(a)?;
        let d = self.ambient_dim(cap)?;
        let mut v = vec![0u8; d];
        for (m, c) in a.indexed_terms() {
            v[m as usize] = c;
        }
        Ok(v)
    }

    pub fn from_dense(&self, v: &[u8]) -> EnvElement {
        let terms = v
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(m, &c)| (m as u64, c))
            .collect();
        self.element(terms)
    }

    /// `u(L)^+` and `u(L)^-` as subspaces of F_p^{p^n}.
    pub fn symmetric_decomposition(&self, cap: usize) -> Result<InvolutionDecomposition, EnvError> {
        let d = self.ambient_dim(cap)?;
        let f = self.field();
        let mut plus = Vec::with_capacity(d);
        let mut minus = Vec::with_capacity(d);
        for m in 0..d as u64 {
            let t = self.involution_monomial(m);
            let mut sp = vec![0u8; d];
            let mut sm = vec![0u8; d];
            for &(i, c) in t.iter() {
                sp[i as usize] = c;
                sm[i as usize] = f.neg(c);
            }
            sp[m as usize] = f.add(sp[m as usize], 1);
            sm[m as usize] = f.add(sm[m as usize], 1);
            plus.push(sp);
            minus.push(sm);
        }
        Ok(InvolutionDecomposition {
            plus: Subspace::span(f, d, &plus)?,
            minus: Subspace::span(f, d, &minus)?,
        })
    }

    /// Matrix of left multiplication by generator `i` on the PBW basis:
    /// entry `[r][c]` is the coefficient of monomial `r` in `x_i · m_c`.
    pub fn left_multiplication_matrix(&self, i: usize, cap: usize) -> Result<Vec<Vec<u8>>, EnvError> {
        let d = self.ambient_dim(cap)?;
        let g = self.generator(i);
        let mut m = vec![vec![0u8; d]; d];
        for c in 0..d as u64 {
            let prod = self.mul_unchecked(&g, &self.monomial_element(c));
            for (r, v) in prod.indexed_terms() {
                m[r as usize][c as usize] = v;
            }
        }
        Ok(m)
    }

    // ----- display -----

    pub fn format_monomial(&self, index: u64) -> String {
        let names = self.names();
        let parts: Vec<String> = (0..self.rank())
            .filter_map(|i| match self.exponent(index, i) {
                0 => None,
                1 => Some(names[i].clone()),
                a => Some(format!("{}^{}", names[i], a)),
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Renders an element with signed coefficients, highest degree first.
    pub fn format(&self, a: &EnvElement) -> String {
        if a.is_zero() {
            return "0".to_string();
        }
        let f = self.field();
        let mut terms: Vec<(u64, u8)> = a.indexed_terms().collect();
        terms.sort_by_key(|&(m, _)| (std::cmp::Reverse(self.monomial_degree(m)), std::cmp::Reverse(m)));
        let mut out = String::new();
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let s = f.signed(c);
            let mono = self.format_monomial(m);
            let mag = s.unsigned_abs();
            let body = match (mag, mono.as_str()) {
                (1, "1") => "1".to_string(),
                (1, _) => mono,
                (_, "1") => mag.to_string(),
                _ => format!("{mag}*{mono}"),
            };
            if k == 0 {
                if s < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if s < 0 { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::catalog;

    #[test]
    fn embed_one_and_squares() {
        let alg = catalog::heisenberg_nil(3).unwrap();
        let env = alg.enveloping();
        assert!(env.embed(&[0, 0, 0]).unwrap().is_zero());
        let x = env.generator(0);
        let xx = env.multiply(&x, &x).unwrap();
        assert_eq!(xx, env.monomial(&[2, 0, 0]).unwrap());
        let a = env.from_terms(&[(&[1, 1, 0], 2), (&[0, 0, 2], 1)]).unwrap();
        assert_eq!(env.multiply(&env.one(), &a).unwrap(), a);
        assert_eq!(env.multiply(&a, &env.one()).unwrap(), a);
    }

    #[test]
    fn heisenberg_yx_straightens() {
        let alg = catalog::heisenberg_nil(3).unwrap();
        let env = alg.enveloping();
        let yx = env.multiply(&env.generator(1), &env.generator(0)).unwrap();
        let expected = env.from_terms(&[(&[1, 1, 0], 1), (&[0, 0, 1], -1)]).unwrap();
        assert_eq!(yx, expected);
        assert_eq!(env.format(&yx), "x*y - z");
    }

    #[test]
    fn cubes_reduce_through_pmap() {
        let alg = catalog::heisenberg_toral(3).unwrap();
        let env = alg.enveloping();
        let z = env.generator(2);
        assert_eq!(env.power(&z, 3).unwrap(), z);
        let x = env.generator(0);
        assert!(env.power(&x, 3).unwrap().is_zero());
    }

    #[test]
    fn involution_on_generators_and_products() {
        let alg = catalog::heisenberg_nil(3).unwrap();
        let env = alg.enveloping();
        let x = env.generator(0);
        assert_eq!(env.involution(&x).unwrap(), x.neg());
        let xy = env.monomial(&[1, 1, 0]).unwrap();
        let expected = env.from_terms(&[(&[1, 1, 0], 1), (&[0, 0, 1], -1)]).unwrap();
        assert_eq!(env.involution(&xy).unwrap(), expected);
    }

    #[test]
    fn parent_mismatch_is_reported() {
        let a = catalog::heisenberg_nil(3).unwrap();
        let b = catalog::heisenberg_nil(3).unwrap();
        let x = a.enveloping().generator(0);
        let y = b.enveloping().generator(1);
        assert_eq!(
            a.enveloping().multiply(&x, &y),
            Err(super::EnvError::ParentMismatch)
        );
    }

    #[test]
    fn abelian_line_decomposition() {
        let alg = catalog::abelian(3, 1).unwrap();
        let env = alg.enveloping();
        let dec = env.symmetric_decomposition(super::DEFAULT_AMBIENT_CAP).unwrap();
        // monomial order 1, x, x^2
        assert_eq!(dec.plus.basis(), &[vec![1, 0, 0], vec![0, 0, 1]]);
        assert_eq!(dec.minus.basis(), &[vec![0, 1, 0]]);
    }

    #[test]
    fn ambient_cap_is_enforced() {
        let alg = catalog::abelian(3, 8).unwrap();
        let err = alg.enveloping().symmetric_decomposition(2187).unwrap_err();
        assert_eq!(err, super::EnvError::AmbientTooLarge { dim: 6561, cap: 2187 });
    }
}
