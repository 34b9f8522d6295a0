//! Built-in example algebras and a seeded generator of nilpotent restricted
//! algebras inside strictly upper-triangular matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::PrimeField;
use crate::identities::{structural_predicates, Prediction};
use crate::liealg::{validate, Algebra, AlgebraError, AlgebraSpec};
use crate::linalg::Echelon;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog id '{0}'")]
    UnknownId(String),
    #[error("EvenCharacteristic: p = {0} is even")]
    EvenCharacteristic(i64),
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("ClosureTooLarge: no generator kept the restricted closure within {cap} dimensions")]
    ClosureTooLarge { cap: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The ids listed by `catalog list` and used by `crosscheck --all-catalog`.
pub const DEFAULT_IDS: &[&str] = &[
    "abelian(3,2)",
    "heisenberg_nil(3)",
    "heisenberg_toral(3)",
    "twodim(3)",
    "sl2(3)",
    "upper_nil(3,4)",
];

/// A catalog algebra with its predicted identity status.
pub struct CatalogEntry {
    pub id: String,
    pub spec: AlgebraSpec,
    pub algebra: Algebra,
    pub expected: Prediction,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("id", &self.id)
            .field("expected", &self.expected)
            .finish()
    }
}

fn check_p(p: i64) -> Result<(), CatalogError> {
    if p % 2 == 0 {
        return Err(CatalogError::EvenCharacteristic(p));
    }
    Ok(())
}

fn build(spec: AlgebraSpec) -> Result<Algebra, CatalogError> {
    check_p(spec.p)?;
    Ok(validate(&spec)?)
}

pub fn abelian_spec(p: i64, n: usize) -> AlgebraSpec {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    AlgebraSpec::new(p, &refs)
}

/// `[x, y] = z` with every basis p-power zero.
pub fn heisenberg_nil_spec(p: i64) -> AlgebraSpec {
    AlgebraSpec::new(p, &["x", "y", "z"]).with_bracket(0, 1, &[0, 0, 1])
}

/// `[x, y] = z` with `z^{[p]} = z`.
pub fn heisenberg_toral_spec(p: i64) -> AlgebraSpec {
    heisenberg_nil_spec(p).with_pmap(2, &[0, 0, 1])
}

/// `[x, y] = x`, `x^{[p]} = 0`, `y^{[p]} = y`.
pub fn twodim_spec(p: i64) -> AlgebraSpec {
    AlgebraSpec::new(p, &["x", "y"])
        .with_bracket(0, 1, &[1, 0])
        .with_pmap(1, &[0, 1])
}

/// Basis `e, f, h` with `[e,f] = h`, `[h,e] = 2e`, `[h,f] = -2f`,
/// `e^{[p]} = f^{[p]} = 0`, `h^{[p]} = h`.
pub fn sl2_spec(p: i64) -> AlgebraSpec {
    AlgebraSpec::new(p, &["e", "f", "h"])
        .with_bracket(0, 1, &[0, 0, 1])
        .with_bracket(0, 2, &[-2, 0, 0])
        .with_bracket(1, 2, &[0, 2, 0])
        .with_pmap(2, &[0, 0, 1])
}

/// Matrix units `E_ij` (`i < j`) of an `n × n` matrix, listed by superdiagonal.
fn upper_positions(n: usize) -> Vec<(usize, usize)> {
    let mut pos = Vec::new();
    for level in 1..n {
        for i in 0..n - level {
            pos.push((i, i + level));
        }
    }
    pos
}

/// Strictly upper-triangular `n × n` matrices with the commutator bracket
/// and the matrix p-th power.
pub fn upper_nil_spec(p: i64, n: usize) -> Result<AlgebraSpec, CatalogError> {
    if n < 2 {
        return Err(CatalogError::BadParameter(format!("upper_nil needs n >= 2, got {n}")));
    }
    check_p(p)?;
    let field = PrimeField::new(p).map_err(AlgebraError::from)?;
    let pos = upper_positions(n);
    let gens: Vec<Vec<u8>> = pos
        .iter()
        .map(|&(i, j)| {
            let mut m = vec![0u8; n * n];
            m[i * n + j] = 1;
            m
        })
        .collect();
    let names: Vec<String> = pos.iter().map(|&(i, j)| format!("e{}{}", i + 1, j + 1)).collect();
    let coords = |m: &[u8]| -> Vec<i64> { pos.iter().map(|&(i, j)| m[i * n + j] as i64).collect() };
    Ok(matrix_spec(field, n, &gens, names, coords))
}

fn mat_mul(field: PrimeField, n: usize, a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = field.mul_add(x, b[k * n + j], out[i * n + j]);
            }
        }
    }
    out
}

fn commutator(field: PrimeField, n: usize, a: &[u8], b: &[u8]) -> Vec<u8> {
    let ab = mat_mul(field, n, a, b);
    let ba = mat_mul(field, n, b, a);
    ab.iter().zip(&ba).map(|(&x, &y)| field.sub(x, y)).collect()
}

fn mat_pow(field: PrimeField, n: usize, a: &[u8], e: u32) -> Vec<u8> {
    let mut acc: Vec<u8> = (0..n * n).map(|k| u8::from(k / n == k % n)).collect();
    for _ in 0..e {
        acc = mat_mul(field, n, &acc, a);
    }
    acc
}

/// Structure constants of the matrix algebra spanned by `basis`, which must be
/// closed under commutator and p-th power; `coords` expresses a matrix in it.
fn matrix_spec(
    field: PrimeField,
    n: usize,
    basis: &[Vec<u8>],
    names: Vec<String>,
    coords: impl Fn(&[u8]) -> Vec<i64>,
) -> AlgebraSpec {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut spec = AlgebraSpec::new(field.p() as i64, &refs);
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let c = coords(&commutator(field, n, &basis[i], &basis[j]));
            if c.iter().any(|&v| v != 0) {
                spec.brackets.insert((i, j), c);
            }
        }
        spec.pmap[i] = coords(&mat_pow(field, n, &basis[i], field.p() as u32));
    }
    spec
}

/// Restricted closure of a set of matrices: commutators of basis pairs and
/// p-th powers of basis elements, until stable.
fn matrix_closure(field: PrimeField, n: usize, gens: &[Vec<u8>], cap: usize) -> Option<Echelon> {
    let mut ech = Echelon::new(field, n * n);
    for g in gens {
        ech.insert(g);
    }
    loop {
        if ech.rank() > cap {
            return None;
        }
        let before = ech.rank();
        let basis = ech.to_subspace().basis().to_vec();
        for (a, u) in basis.iter().enumerate() {
            for v in &basis[a + 1..] {
                ech.insert(&commutator(field, n, u, v));
            }
            ech.insert(&mat_pow(field, n, u, field.p() as u32));
            if ech.rank() > cap {
                return None;
            }
        }
        if ech.rank() == before {
            return Some(ech);
        }
    }
}

pub fn abelian(p: i64, n: usize) -> Result<Algebra, CatalogError> {
    if n == 0 {
        return Err(CatalogError::BadParameter("abelian needs n >= 1".into()));
    }
    build(abelian_spec(p, n))
}

pub fn heisenberg_nil(p: i64) -> Result<Algebra, CatalogError> {
    build(heisenberg_nil_spec(p))
}

pub fn heisenberg_toral(p: i64) -> Result<Algebra, CatalogError> {
    build(heisenberg_toral_spec(p))
}

pub fn twodim(p: i64) -> Result<Algebra, CatalogError> {
    build(twodim_spec(p))
}

pub fn sl2(p: i64) -> Result<Algebra, CatalogError> {
    build(sl2_spec(p))
}

pub fn upper_nil(p: i64, n: usize) -> Result<Algebra, CatalogError> {
    build(upper_nil_spec(p, n)?)
}

/// Random nilpotent restricted subalgebra of strictly upper-triangular
/// `n_matrix × n_matrix` matrices with closure dimension at most `dim`.
///
/// Sparse random matrices are added one at a time; a candidate whose
/// restricted closure would exceed `dim` is discarded. Generation stops when
/// the closure reaches `dim` or after 64 consecutive rejections.
pub fn random_nilpotent_spec(p: i64, n_matrix: usize, dim: usize, seed: u64) -> Result<AlgebraSpec, CatalogError> {
    if !(3..=5).contains(&n_matrix) {
        return Err(CatalogError::BadParameter(format!(
            "matrix size must be 3..=5, got {n_matrix}"
        )));
    }
    let ambient = n_matrix * (n_matrix - 1) / 2;
    if dim == 0 || dim > ambient {
        return Err(CatalogError::BadParameter(format!(
            "closure dimension must be 1..={ambient}, got {dim}"
        )));
    }
    check_p(p)?;
    let field = PrimeField::new(p).map_err(AlgebraError::from)?;
    let n = n_matrix;
    let pos = upper_positions(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gens: Vec<Vec<u8>> = Vec::new();
    let mut closure: Option<Echelon> = None;
    let mut rejections = 0;
    while rejections < 64 && closure.as_ref().map_or(0, Echelon::rank) < dim {
        let mut m = vec![0u8; n * n];
        let entries = rng.gen_range(1..=2);
        for _ in 0..entries {
            let (i, j) = pos[rng.gen_range(0..pos.len())];
            m[i * n + j] = rng.gen_range(1..field.p());
        }
        gens.push(m);
        match matrix_closure(field, n, &gens, dim) {
            Some(c) if closure.as_ref().map_or(0, Echelon::rank) < c.rank() => {
                closure = Some(c);
                rejections = 0;
            }
            _ => {
                gens.pop();
                rejections += 1;
            }
        }
    }
    let closure = closure.ok_or(CatalogError::ClosureTooLarge { cap: dim })?.into_subspace();
    let basis = closure.basis().to_vec();
    let names = (1..=basis.len()).map(|i| format!("g{i}")).collect();
    let coords = |m: &[u8]| -> Vec<i64> {
        closure
            .coordinates(m)
            .expect("closure is closed under bracket and p-th power")
            .into_iter()
            .map(i64::from)
            .collect()
    };
    Ok(matrix_spec(field, n, &basis, names, coords))
}

fn entry(id: String, spec: AlgebraSpec) -> Result<CatalogEntry, CatalogError> {
    let algebra = build(spec.clone())?;
    let expected = structural_predicates(&algebra)?.prediction();
    Ok(CatalogEntry {
        id,
        spec,
        algebra,
        expected,
    })
}

pub fn random_nilpotent(p: i64, n_matrix: usize, dim: usize, seed: u64) -> Result<CatalogEntry, CatalogError> {
    let spec = random_nilpotent_spec(p, n_matrix, dim, seed)?;
    entry(format!("random_nilpotent({p},{n_matrix},{dim},{seed})"), spec)
}

fn parse_args(id: &str) -> Option<(&str, Vec<i64>)> {
    let open = id.find('(')?;
    let name = id[..open].trim();
    let inner = id[open + 1..].strip_suffix(')')?;
    let args = inner
        .split(',')
        .map(|s| s.trim().parse::<i64>().ok())
        .collect::<Option<Vec<_>>>()?;
    Some((name, args))
}

fn arg_usize(v: i64) -> Result<usize, CatalogError> {
    usize::try_from(v).map_err(|_| CatalogError::BadParameter(format!("negative argument {v}")))
}

/// Spec for a catalog id such as `heisenberg_nil(3)` or `upper_nil(3,4)`.
pub fn builtin_spec(id: &str) -> Result<AlgebraSpec, CatalogError> {
    let unknown = || CatalogError::UnknownId(id.to_string());
    let (name, args) = parse_args(id).ok_or_else(unknown)?;
    let spec = match (name, args.as_slice()) {
        ("abelian", &[p, n]) => {
            let n = arg_usize(n)?;
            if n == 0 {
                return Err(CatalogError::BadParameter("abelian needs n >= 1".into()));
            }
            abelian_spec(p, n)
        }
        ("heisenberg_nil", &[p]) => heisenberg_nil_spec(p),
        ("heisenberg_toral", &[p]) => heisenberg_toral_spec(p),
        ("twodim", &[p]) => twodim_spec(p),
        ("sl2", &[p]) => sl2_spec(p),
        ("upper_nil", &[p, n]) => upper_nil_spec(p, arg_usize(n)?)?,
        ("random_nilpotent", &[p, nm, d, seed]) => {
            random_nilpotent_spec(p, arg_usize(nm)?, arg_usize(d)?, seed as u64)?
        }
        _ => return Err(unknown()),
    };
    check_p(spec.p)?;
    Ok(spec)
}

pub fn builtin(id: &str) -> Result<CatalogEntry, CatalogError> {
    let spec = builtin_spec(id)?;
    entry(id.replace(' ', ""), spec)
}

/// Summary line for `catalog list`.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogListing {
    pub id: String,
    pub dim: usize,
    pub envelope_dim: u128,
    pub expected: Prediction,
}

pub fn listing() -> Result<Vec<CatalogListing>, CatalogError> {
    DEFAULT_IDS
        .iter()
        .map(|id| {
            let e = builtin(id)?;
            Ok(CatalogListing {
                id: e.id.clone(),
                dim: e.algebra.dim(),
                envelope_dim: e.algebra.enveloping().dim(),
                expected: e.expected,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for id in DEFAULT_IDS {
            builtin(id).unwrap();
        }
        for p in [5, 7] {
            sl2(p).unwrap();
            heisenberg_toral(p).unwrap();
            upper_nil(p, 3).unwrap();
        }
    }

    #[test]
    fn expected_rows() {
        let e = builtin("twodim(3)").unwrap().expected;
        assert_eq!((e.lie_solvable, e.lie_nilpotent, e.bounded_engel), (true, false, false));
        let e = builtin("heisenberg_toral(3)").unwrap().expected;
        assert_eq!((e.lie_solvable, e.lie_nilpotent, e.bounded_engel), (false, false, false));
        let e = builtin("upper_nil(3,4)").unwrap();
        assert_eq!(e.algebra.dim(), 6);
        let e = e.expected;
        assert_eq!((e.lie_solvable, e.lie_nilpotent, e.bounded_engel), (true, true, true));
    }

    #[test]
    fn unknown_ids_and_even_characteristic() {
        assert!(matches!(builtin("nope(3)"), Err(CatalogError::UnknownId(_))));
        assert!(matches!(builtin("sl2"), Err(CatalogError::UnknownId(_))));
        assert!(matches!(builtin("sl2(3,4)"), Err(CatalogError::UnknownId(_))));
        assert_eq!(builtin("sl2(2)").unwrap_err(), CatalogError::EvenCharacteristic(2));
        assert!(matches!(
            builtin("sl2(9)"),
            Err(CatalogError::Algebra(AlgebraError::NotOddPrime(9)))
        ));
    }

    #[test]
    fn random_nilpotent_is_deterministic_and_valid() {
        for seed in 0..10 {
            let a = random_nilpotent_spec(3, 3, 3, seed).unwrap();
            let b = random_nilpotent_spec(3, 3, 3, seed).unwrap();
            assert_eq!(a, b);
            let e = random_nilpotent(3, 4, 4, seed).unwrap();
            assert!(e.algebra.dim() <= 4);
            let s = structural_predicates(&e.algebra).unwrap();
            assert!(s.l_nilpotent);
            assert_eq!(s.lderived_p_nilpotent.holds(), Some(true));
        }
        assert!(matches!(
            random_nilpotent(3, 6, 2, 0),
            Err(CatalogError::BadParameter(_))
        ));
        assert!(matches!(
            random_nilpotent(3, 3, 4, 0),
            Err(CatalogError::BadParameter(_))
        ));
    }
}
