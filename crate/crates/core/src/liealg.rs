//! Finite-dimensional restricted Lie algebras given by structure constants and
//! a p-map table on a basis.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::env::Enveloping;
use crate::field::{FieldError, PrimeField};
use crate::linalg::{kernel, Echelon, Matrix, Subspace};

/// Default number of elements `is_p_nilpotent_subspace` may enumerate.
pub const DEFAULT_PNIL_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("NotOddPrime({0}): the characteristic must be an odd prime")]
    NotOddPrime(i64),
    #[error("modulus {0} is larger than the supported bound")]
    PrimeTooLarge(i64),
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    #[error("bracket entry ({i}, {j}) must satisfy i < j < dim")]
    BracketIndex { i: usize, j: usize },
    #[error("JacobiViolation({i},{j},{k}): Jacobi sum is nonzero for basis triple ({i}, {j}, {k})")]
    JacobiViolation { i: usize, j: usize, k: usize },
    #[error("RestrictednessViolation({i}): ad(x_{i}^[p]) differs from (ad x_{i})^p")]
    RestrictednessViolation { i: usize },
    #[error("u(L) of dimension p^n = {p}^{n} is too large to index")]
    EnvelopeTooLarge { p: u8, n: usize },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

impl From<FieldError> for AlgebraError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::NotOddPrime(p) => AlgebraError::NotOddPrime(p),
            FieldError::PrimeTooLarge(p) => AlgebraError::PrimeTooLarge(p),
        }
    }
}

/// An unvalidated restricted Lie algebra: basis labels, brackets
/// `[x_i, x_j] = Σ_k c_k x_k` for `i < j`, and the p-map on the basis.
/// Coefficients are arbitrary integers, reduced mod p on validation.
/// Omitted bracket pairs are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraSpec {
    pub p: i64,
    pub names: Vec<String>,
    pub brackets: BTreeMap<(usize, usize), Vec<i64>>,
    pub pmap: Vec<Vec<i64>>,
}

impl AlgebraSpec {
    /// Spec of the given dimension with zero bracket and zero p-map.
    pub fn new(p: i64, names: &[&str]) -> Self {
        let n = names.len();
        Self {
            p,
            names: names.iter().map(|s| s.to_string()).collect(),
            brackets: BTreeMap::new(),
            pmap: vec![vec![0; n]; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn with_bracket(mut self, i: usize, j: usize, c: &[i64]) -> Self {
        self.brackets.insert((i, j), c.to_vec());
        self
    }

    pub fn with_pmap(mut self, i: usize, c: &[i64]) -> Self {
        self.pmap[i] = c.to_vec();
        self
    }
}

/// Structure data shared between an [`Algebra`] and its enveloping algebra.
#[derive(Debug)]
pub(crate) struct Structure {
    pub(crate) field: PrimeField,
    pub(crate) n: usize,
    pub(crate) names: Vec<String>,
    /// `consts[(i * n + j) * n + k]` is the coefficient of `x_k` in `[x_i, x_j]`
    consts: Vec<u8>,
    pub(crate) pmap: Vec<Vec<u8>>,
}

impl Structure {
    pub(crate) fn bracket_basis(&self, i: usize, j: usize) -> &[u8] {
        let start = (i * self.n + j) * self.n;
        &self.consts[start..start + self.n]
    }

    fn bracket(&self, x: &[u8], y: &[u8]) -> Vec<u8> {
        let f = self.field;
        let n = self.n;
        let mut out = vec![0u8; n];
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b == 0 || i == j {
                    continue;
                }
                let ab = f.mul(a, b);
                for (o, &c) in out.iter_mut().zip(self.bracket_basis(i, j)) {
                    *o = f.mul_add(ab, c, *o);
                }
            }
        }
        out
    }

    fn ad_matrix(&self, x: &[u8]) -> Matrix {
        let n = self.n;
        let mut m = Matrix::zeros(self.field, n, n);
        for j in 0..n {
            let mut e = vec![0u8; n];
            e[j] = 1;
            for (k, v) in self.bracket(x, &e).into_iter().enumerate() {
                m.set(k, j, v);
            }
        }
        m
    }
}

/// Terms of a descending series of subspaces of `L`.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesReport {
    pub terms: Vec<Subspace>,
    /// Index of the first term equal to its successor (or of the zero term).
    pub stabilized_at: usize,
    pub terminated_zero: bool,
}

impl SeriesReport {
    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(Subspace::dim).collect()
    }
}

/// Outcome of iterating the p-map on a single element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementPNilpotence {
    /// `x^{[p]^index} = 0` with `index ≥ 1` minimal.
    Nilpotent { index: usize },
    /// The orbit enters a nonzero cycle after `preperiod` steps.
    Periodic { preperiod: usize, period: usize },
}

impl ElementPNilpotence {
    pub fn is_nilpotent(&self) -> bool {
        matches!(self, ElementPNilpotence::Nilpotent { .. })
    }
}

/// Outcome of deciding whether a subspace of `L` is p-nilpotent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SubspacePNilpotence {
    /// Every element was tested; `index` is the minimal uniform exponent.
    Exhaustive { index: usize, elements: u64 },
    /// The restricted closure is a nilpotent Lie algebra and every basis
    /// element is p-nilpotent, so every element is; `index_bound` is an upper
    /// bound for the uniform exponent.
    NilpotentClosure { index_bound: usize, basis_indices: Vec<usize> },
    Fails { witness: Vec<u8>, orbit: ElementPNilpotence },
    /// `v` is a restricted subalgebra that is not nilpotent as a Lie algebra.
    /// A p-nilpotent subalgebra acts by nilpotent `ad` and is nilpotent by
    /// Engel's theorem, so this rules p-nilpotence out.
    NotNilpotent { lower_central_dims: Vec<usize> },
    Inconclusive { basis_indices: Vec<usize> },
}

impl SubspacePNilpotence {
    /// `Some(true|false)` when decided.
    pub fn holds(&self) -> Option<bool> {
        match self {
            SubspacePNilpotence::Exhaustive { .. } | SubspacePNilpotence::NilpotentClosure { .. } => Some(true),
            SubspacePNilpotence::Fails { .. } | SubspacePNilpotence::NotNilpotent { .. } => Some(false),
            SubspacePNilpotence::Inconclusive { .. } => None,
        }
    }
}

/// A restricted Lie algebra whose Jacobi identity and restrictedness have been
/// checked. Holds the enveloping algebra engine used for p-maps of general
/// elements.
pub struct Algebra {
    structure: Arc<Structure>,
    engine: OnceLock<Enveloping>,
}

impl std::fmt::Debug for Algebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Algebra")
            .field("p", &self.structure.field.p())
            .field("names", &self.structure.names)
            .finish()
    }
}

fn reduce_vec(field: PrimeField, v: &[i64]) -> Vec<u8> {
    v.iter().map(|&c| field.reduce(c)).collect()
}

/// Checks the axioms of a restricted Lie algebra and returns the validated algebra.
pub fn validate(spec: &AlgebraSpec) -> Result<Algebra, AlgebraError> {
    let field = PrimeField::new(spec.p)?;
    let n = spec.dim();
    if n == 0 {
        return Err(AlgebraError::DimensionMismatch("dimension must be at least 1".into()));
    }
    if (field.p() as f64).powi(n as i32) >= u64::MAX as f64 {
        return Err(AlgebraError::EnvelopeTooLarge { p: field.p(), n });
    }
    if spec.pmap.len() != n {
        return Err(AlgebraError::DimensionMismatch(format!(
            "pmap has {} rows, expected {n}",
            spec.pmap.len()
        )));
    }
    let mut consts = vec![0u8; n * n * n];
    for (&(i, j), c) in &spec.brackets {
        if i >= j || j >= n {
            return Err(AlgebraError::BracketIndex { i, j });
        }
        if c.len() != n {
            return Err(AlgebraError::DimensionMismatch(format!(
                "bracket ({i}, {j}) has {} coefficients, expected {n}",
                c.len()
            )));
        }
        let c = reduce_vec(field, c);
        for k in 0..n {
            consts[(i * n + j) * n + k] = c[k];
            consts[(j * n + i) * n + k] = field.neg(c[k]);
        }
    }
    let mut pmap = Vec::with_capacity(n);
    for (i, row) in spec.pmap.iter().enumerate() {
        if row.len() != n {
            return Err(AlgebraError::DimensionMismatch(format!(
                "pmap row {i} has {} coefficients, expected {n}",
                row.len()
            )));
        }
        pmap.push(reduce_vec(field, row));
    }
    let structure = Structure {
        field,
        n,
        names: spec.names.clone(),
        consts,
        pmap,
    };

    let basis = |i: usize| {
        let mut e = vec![0u8; n];
        e[i] = 1;
        e
    };
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (ei, ej, ek) = (basis(i), basis(j), basis(k));
                let a = structure.bracket(&structure.bracket(&ei, &ej), &ek);
                let b = structure.bracket(&structure.bracket(&ej, &ek), &ei);
                let c = structure.bracket(&structure.bracket(&ek, &ei), &ej);
                if (0..n).any(|t| field.add(field.add(a[t], b[t]), c[t]) != 0) {
                    return Err(AlgebraError::JacobiViolation { i, j, k });
                }
            }
        }
    }
    for i in 0..n {
        let lhs = structure.ad_matrix(&structure.pmap[i]);
        let rhs = structure.ad_matrix(&basis(i)).pow(field.p() as u64);
        if lhs != rhs {
            return Err(AlgebraError::RestrictednessViolation { i });
        }
    }
    Ok(Algebra {
        structure: Arc::new(structure),
        engine: OnceLock::new(),
    })
}

impl Algebra {
    pub fn field(&self) -> PrimeField {
        self.structure.field
    }

    pub fn dim(&self) -> usize {
        self.structure.n
    }

    pub fn names(&self) -> &[String] {
        &self.structure.names
    }

    /// The restricted enveloping algebra, built on first use and shared.
    pub fn enveloping(&self) -> &Enveloping {
        self.engine
            .get_or_init(|| Enveloping::new(Arc::clone(&self.structure)))
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u8> {
        let mut e = vec![0u8; self.dim()];
        e[i] = 1;
        e
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &[u8] {
        self.structure.bracket_basis(i, j)
    }

    /// p-map table row for basis element `i`.
    pub fn pmap_basis(&self, i: usize) -> &[u8] {
        &self.structure.pmap[i]
    }

    /// Back to an [`AlgebraSpec`] with residues as coefficients.
    pub fn to_spec(&self) -> AlgebraSpec {
        let n = self.dim();
        let mut brackets = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let c = self.bracket_basis(i, j);
                if c.iter().any(|&v| v != 0) {
                    brackets.insert((i, j), c.iter().map(|&v| v as i64).collect());
                }
            }
        }
        AlgebraSpec {
            p: self.field().p() as i64,
            names: self.names().to_vec(),
            brackets,
            pmap: self
                .structure
                .pmap
                .iter()
                .map(|r| r.iter().map(|&v| v as i64).collect())
                .collect(),
        }
    }

    pub fn bracket(&self, x: &[u8], y: &[u8]) -> Vec<u8> {
        self.structure.bracket(x, y)
    }

    /// Matrix of `ad x`; column `j` is `[x, e_j]`.
    pub fn ad_matrix(&self, x: &[u8]) -> Matrix {
        self.structure.ad_matrix(x)
    }

    fn full(&self) -> Subspace {
        Subspace::full(self.field(), self.dim())
    }

    /// `span{[a, b] : a ∈ A, b ∈ B}` over basis pairs.
    fn bracket_span(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut ech = Echelon::new(self.field(), self.dim());
        for u in a.basis() {
            for v in b.basis() {
                ech.insert(&self.bracket(u, v));
            }
        }
        ech.into_subspace()
    }

    fn series(&self, start: Subspace, step: impl Fn(&Subspace) -> Subspace) -> SeriesReport {
        let cap = 2 * self.dim() + 2;
        let mut terms = vec![start];
        for _ in 0..cap {
            let last = terms.last().expect("series has a first term");
            if last.is_zero() {
                break;
            }
            let next = step(last);
            let repeat = &next == last;
            terms.push(next);
            if repeat {
                break;
            }
        }
        let last = terms.last().expect("series has a first term");
        let terminated_zero = last.is_zero();
        let stabilized_at = if terminated_zero || terms.len() == 1 {
            terms.len() - 1
        } else {
            terms.len() - 2
        };
        SeriesReport {
            terms,
            stabilized_at,
            terminated_zero,
        }
    }

    /// `γ_1 = L`, `γ_{k+1} = [γ_k, L]`.
    pub fn lower_central_series(&self) -> SeriesReport {
        let full = self.full();
        self.series(full.clone(), |g| self.bracket_span(g, &full))
    }

    /// `δ_0 = L`, `δ_{k+1} = [δ_k, δ_k]`.
    pub fn derived_series(&self) -> SeriesReport {
        self.series(self.full(), |d| self.bracket_span(d, d))
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().terminated_zero
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().terminated_zero
    }

    /// `L' = [L, L]`.
    pub fn derived_subalgebra(&self) -> Subspace {
        let full = self.full();
        self.bracket_span(&full, &full)
    }

    /// `Z(L)`: the common kernel of `ad e_i` over all basis elements.
    pub fn center(&self) -> Subspace {
        let n = self.dim();
        let mut rows = Vec::with_capacity(n * n);
        for i in 0..n {
            rows.extend(self.ad_matrix(&self.basis_vector(i)).rows().iter().cloned());
        }
        kernel(&Matrix::from_rows(self.field(), n, rows).expect("ad rows have length n"))
    }

    /// `x^{[p]}`, computed as the p-th power of `x` inside u(L).
    pub fn element_pmap(&self, x: &[u8]) -> Result<Vec<u8>, AlgebraError> {
        if x.len() != self.dim() {
            return Err(AlgebraError::DimensionMismatch(format!(
                "vector has length {}, expected {}",
                x.len(),
                self.dim()
            )));
        }
        let env = self.enveloping();
        let ex = env.embed(x).expect("length checked");
        let power = env
            .power(&ex, self.field().p() as u64)
            .expect("element belongs to this envelope");
        env.extract_linear(&power).ok_or_else(|| {
            AlgebraError::InternalInconsistency(format!(
                "p-th power {} does not lie in L",
                env.format(&power)
            ))
        })
    }

    /// The smallest restricted subalgebra containing `generators`.
    pub fn restricted_closure(&self, generators: &[Vec<u8>]) -> Result<Subspace, AlgebraError> {
        let mut ech = Echelon::new(self.field(), self.dim());
        for g in generators {
            if g.len() != self.dim() {
                return Err(AlgebraError::DimensionMismatch(format!(
                    "generator has length {}, expected {}",
                    g.len(),
                    self.dim()
                )));
            }
            ech.insert(g);
        }
        loop {
            let before = ech.rank();
            let current = ech.to_subspace();
            let basis = current.basis();
            for (a, u) in basis.iter().enumerate() {
                for v in &basis[a + 1..] {
                    ech.insert(&self.bracket(u, v));
                }
                ech.insert(&self.element_pmap(u)?);
            }
            if ech.rank() == before {
                return Ok(ech.into_subspace());
            }
        }
    }

    /// Iterates the p-map from `x` until it reaches zero or cycles.
    pub fn is_p_nilpotent_element(&self, x: &[u8]) -> Result<ElementPNilpotence, AlgebraError> {
        let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
        let mut cur = x.to_vec();
        let mut step = 0;
        loop {
            if cur.iter().all(|&c| c == 0) {
                return Ok(ElementPNilpotence::Nilpotent { index: step.max(1) });
            }
            if let Some(&first) = seen.get(&cur) {
                return Ok(ElementPNilpotence::Periodic {
                    preperiod: first,
                    period: step - first,
                });
            }
            seen.insert(cur.clone(), step);
            cur = self.element_pmap(&cur)?;
            step += 1;
        }
    }

    /// Decides p-nilpotence of the subspace `v`.
    ///
    /// Enumerates all `p^{dim v}` elements when that is at most `budget`.
    /// Otherwise tests the basis and, if the restricted closure of `v` is a
    /// nilpotent Lie algebra, certifies the answer through the fact that the
    /// p-nilpotent elements of a nilpotent restricted Lie algebra form a
    /// subspace. A closed but non-nilpotent `v` is reported as failing.
    pub fn is_p_nilpotent_subspace(&self, v: &Subspace, budget: u64) -> Result<SubspacePNilpotence, AlgebraError> {
        if v.ambient_dim() != self.dim() {
            return Err(AlgebraError::DimensionMismatch(format!(
                "subspace ambient {} differs from dim L = {}",
                v.ambient_dim(),
                self.dim()
            )));
        }
        let mut basis_indices = Vec::with_capacity(v.dim());
        for b in v.basis() {
            match self.is_p_nilpotent_element(b)? {
                ElementPNilpotence::Nilpotent { index } => basis_indices.push(index),
                orbit => {
                    return Ok(SubspacePNilpotence::Fails {
                        witness: b.clone(),
                        orbit,
                    })
                }
            }
        }
        let p = self.field().p() as u64;
        let count = (0..v.dim()).try_fold(1u64, |acc, _| acc.checked_mul(p).filter(|&c| c <= budget));
        if let Some(total) = count {
            let mut index = 1;
            let mut coeffs = vec![0u8; v.dim()];
            for _ in 0..total {
                let x = v.combine(&coeffs);
                match self.is_p_nilpotent_element(&x)? {
                    ElementPNilpotence::Nilpotent { index: m } => index = index.max(m),
                    orbit => return Ok(SubspacePNilpotence::Fails { witness: x, orbit }),
                }
                for c in coeffs.iter_mut() {
                    *c += 1;
                    if (*c as u64) < p {
                        break;
                    }
                    *c = 0;
                }
            }
            return Ok(SubspacePNilpotence::Exhaustive { index, elements: total });
        }
        let closure = self.restricted_closure(v.basis())?;
        if self.is_nilpotent_subalgebra(&closure) {
            return Ok(SubspacePNilpotence::NilpotentClosure {
                index_bound: closure.dim().max(1),
                basis_indices,
            });
        }
        if closure == *v {
            let mut dims = vec![v.dim()];
            let mut cur = v.clone();
            loop {
                let next = self.bracket_span(&cur, v);
                dims.push(next.dim());
                if next == cur {
                    break;
                }
                cur = next;
            }
            return Ok(SubspacePNilpotence::NotNilpotent { lower_central_dims: dims });
        }
        Ok(SubspacePNilpotence::Inconclusive { basis_indices })
    }

    /// Whether a subalgebra `h` is nilpotent as a Lie algebra in its own right.
    pub fn is_nilpotent_subalgebra(&self, h: &Subspace) -> bool {
        let mut cur = h.clone();
        for _ in 0..=h.dim() + 1 {
            if cur.is_zero() {
                return true;
            }
            let next = self.bracket_span(&cur, h);
            if next == cur {
                return false;
            }
            cur = next;
        }
        cur.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    #[test]
    fn heisenberg_validates_and_brackets() {
        let alg = catalog::heisenberg_nil(3).unwrap();
        assert_eq!(alg.bracket(&[1, 0, 0], &[0, 1, 0]), vec![0, 0, 1]);
        // [x + y, x - y] = -2[x, y] = z over F_3
        assert_eq!(alg.bracket(&[1, 1, 0], &[1, 2, 0]), vec![0, 0, 1]);
        assert_eq!(alg.bracket(&[2, 1, 1], &[2, 1, 1]), vec![0, 0, 0]);
    }

    #[test]
    fn pmap_on_central_element_must_match_ad() {
        let spec = catalog::heisenberg_nil(3).unwrap().to_spec().with_pmap(2, &[1, 0, 0]);
        assert_eq!(validate(&spec).unwrap_err(), AlgebraError::RestrictednessViolation { i: 2 });
    }

    #[test]
    fn so3_type_bracket_is_checked_directly() {
        // [x,y]=z, [x,z]=y, [y,z]=x over F_3; Jacobi sum for (x,y,z) is
        // [[x,y],z] + [[y,z],x] + [[z,x],y] = 0 + [x,x] + [-y,y] = 0,
        // while restrictedness fails on x: ad x swaps y and z so (ad x)^3 = ad x ≠ 0.
        let spec = AlgebraSpec::new(3, &["x", "y", "z"])
            .with_bracket(0, 1, &[0, 0, 1])
            .with_bracket(0, 2, &[0, 1, 0])
            .with_bracket(1, 2, &[1, 0, 0]);
        assert_eq!(validate(&spec).unwrap_err(), AlgebraError::RestrictednessViolation { i: 0 });
    }

    #[test]
    fn jacobi_violation_names_triple() {
        let spec = AlgebraSpec::new(3, &["x", "y", "z"])
            .with_bracket(0, 1, &[0, 0, 1])
            .with_bracket(0, 2, &[1, 0, 0])
            .with_bracket(1, 2, &[0, 1, 0]);
        assert_eq!(
            validate(&spec).unwrap_err(),
            AlgebraError::JacobiViolation { i: 0, j: 1, k: 2 }
        );
    }

    #[test]
    fn rejects_even_characteristic_and_bad_shapes() {
        let spec = AlgebraSpec::new(2, &["x"]);
        assert_eq!(validate(&spec).unwrap_err(), AlgebraError::NotOddPrime(2));
        let spec = AlgebraSpec::new(3, &["x", "y"]).with_bracket(1, 0, &[1, 0]);
        assert_eq!(validate(&spec).unwrap_err(), AlgebraError::BracketIndex { i: 1, j: 0 });
        let spec = AlgebraSpec::new(3, &["x", "y"]).with_bracket(0, 1, &[1]);
        assert!(matches!(validate(&spec), Err(AlgebraError::DimensionMismatch(_))));
    }

    #[test]
    fn ad_matrices() {
        let ab = catalog::abelian(5, 3).unwrap();
        assert!(ab.ad_matrix(&[1, 2, 3]).is_zero());

        let h = catalog::heisenberg_nil(3).unwrap();
        let adx = h.ad_matrix(&[1, 0, 0]);
        let mut expected = Matrix::zeros(f3(), 3, 3);
        expected.set(2, 1, 1);
        assert_eq!(adx, expected);

        // [x, y] = x: ad y sends x to -x
        let t = catalog::twodim(3).unwrap();
        let ady = t.ad_matrix(&[0, 1]);
        assert_eq!(ady.column(0), vec![2, 0]);
        assert_eq!(ady.column(1), vec![0, 0]);
    }

    #[test]
    fn series_of_standard_examples() {
        let h = catalog::heisenberg_nil(3).unwrap();
        let lcs = h.lower_central_series();
        assert_eq!(lcs.dims(), vec![3, 1, 0]);
        assert!(lcs.terminated_zero);
        assert_eq!(lcs.stabilized_at, 2);

        let s = catalog::sl2(3).unwrap();
        let lcs = s.lower_central_series();
        assert_eq!(lcs.dims(), vec![3, 3]);
        assert!(!lcs.terminated_zero);

        let t = catalog::twodim(3).unwrap();
        let lcs = t.lower_central_series();
        assert_eq!(lcs.dims(), vec![2, 1, 1]);
        assert_eq!(lcs.stabilized_at, 1);
        assert!(!lcs.terminated_zero);
        let ds = t.derived_series();
        assert_eq!(ds.dims(), vec![2, 1, 0]);
        assert!(ds.terminated_zero);
    }

    #[test]
    fn centers() {
        let h = catalog::heisenberg_nil(3).unwrap();
        assert_eq!(h.center(), Subspace::span(f3(), 3, &[vec![0, 0, 1]]).unwrap());
        assert!(catalog::abelian(3, 2).unwrap().center().is_full());
        assert!(catalog::sl2(3).unwrap().center().is_zero());
    }

    #[test]
    fn pmap_of_basis_matches_table() {
        let s = catalog::sl2(5).unwrap();
        for i in 0..3 {
            assert_eq!(s.element_pmap(&s.basis_vector(i)).unwrap(), s.pmap_basis(i));
        }
    }

    #[test]
    fn pmap_is_p_semilinear() {
        let s = catalog::sl2(3).unwrap();
        let f = s.field();
        let x = vec![1, 2, 1];
        let px = s.element_pmap(&x).unwrap();
        for a in 1..3u8 {
            let ax: Vec<u8> = x.iter().map(|&c| f.mul(a, c)).collect();
            let ap = f.pow(a, 3);
            let expected: Vec<u8> = px.iter().map(|&c| f.mul(ap, c)).collect();
            assert_eq!(s.element_pmap(&ax).unwrap(), expected);
        }
    }

    #[test]
    fn restricted_closures() {
        let h = catalog::heisenberg_nil(3).unwrap();
        assert_eq!(h.restricted_closure(&[vec![0, 0, 1]]).unwrap().dim(), 1);
        let t = catalog::twodim(3).unwrap();
        let c = t.restricted_closure(&[vec![1, 0]]).unwrap();
        assert_eq!(c, Subspace::span(f3(), 2, &[vec![1, 0]]).unwrap());
        let s = catalog::sl2(3).unwrap();
        assert!(s.restricted_closure(&[vec![1, 0, 0], vec![0, 1, 0]]).unwrap().is_full());
    }

    #[test]
    fn element_p_nilpotence() {
        let h = catalog::heisenberg_nil(3).unwrap();
        assert_eq!(
            h.is_p_nilpotent_element(&[0, 0, 1]).unwrap(),
            ElementPNilpotence::Nilpotent { index: 1 }
        );
        let t = catalog::twodim(3).unwrap();
        assert_eq!(
            t.is_p_nilpotent_element(&[0, 1]).unwrap(),
            ElementPNilpotence::Periodic { preperiod: 0, period: 1 }
        );
        let ht = catalog::heisenberg_toral(3).unwrap();
        assert_eq!(
            ht.is_p_nilpotent_element(&[1, 0, 0]).unwrap(),
            ElementPNilpotence::Nilpotent { index: 1 }
        );
    }

    #[test]
    fn subspace_p_nilpotence() {
        let h = catalog::heisenberg_nil(3).unwrap();
        let z = Subspace::span(f3(), 3, &[vec![0, 0, 1]]).unwrap();
        assert_eq!(
            h.is_p_nilpotent_subspace(&z, DEFAULT_PNIL_BUDGET).unwrap(),
            SubspacePNilpotence::Exhaustive { index: 1, elements: 3 }
        );
        let ht = catalog::heisenberg_toral(3).unwrap();
        let verdict = ht.is_p_nilpotent_subspace(&z, DEFAULT_PNIL_BUDGET).unwrap();
        assert!(matches!(verdict, SubspacePNilpotence::Fails { ref witness, .. } if witness == &vec![0, 0, 1]));

        let s = catalog::sl2(3).unwrap();
        let verdict = s.is_p_nilpotent_subspace(&s.derived_subalgebra(), DEFAULT_PNIL_BUDGET).unwrap();
        assert!(matches!(verdict, SubspacePNilpotence::Fails { ref witness, .. } if witness == &vec![0, 0, 1]));
    }

    #[test]
    fn subspace_p_nilpotence_beyond_budget_uses_closure() {
        let u = catalog::upper_nil(3, 4).unwrap();
        let full = Subspace::full(u.field(), u.dim());
        let verdict = u.is_p_nilpotent_subspace(&full, 10).unwrap();
        assert!(matches!(verdict, SubspacePNilpotence::NilpotentClosure { index_bound: 6, .. }));
        let exhaustive = u.is_p_nilpotent_subspace(&full, DEFAULT_PNIL_BUDGET).unwrap();
        assert!(matches!(exhaustive, SubspacePNilpotence::Exhaustive { elements: 729, .. }));

        // sl2 at p = 3 with a tiny budget: h is caught on the basis pass
        let s = catalog::sl2(3).unwrap();
        let verdict = s.is_p_nilpotent_subspace(&Subspace::full(f3(), 3), 1).unwrap();
        assert_eq!(verdict.holds(), Some(false));
    }
}
