//! Decision procedures for Lie nilpotency, Lie solvability and bounded Engel
//! identities on subspaces of u(L), and the comparison of those verdicts with
//! the structural conditions on `L` that characterize them.
//!
//! Subspaces of u(L) live in the ambient F_p^{p^n} whose coordinates are PBW
//! monomial indices. Nilpotency and solvability brackets are multilinear, so
//! the chains below work with spans of brackets of basis vectors.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::env::{EnvElement, EnvError, Enveloping, DEFAULT_AMBIENT_CAP};
use crate::field::PrimeField;
use crate::liealg::{Algebra, AlgebraError, SubspacePNilpotence, DEFAULT_PNIL_BUDGET};
use crate::linalg::{Echelon, Subspace};

/// Hard cap on the number of distinct states a chain may visit.
pub const MAX_CHAIN_STATES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("AmbientTooLarge: dim u(L) = {dim} exceeds the ambient cap {cap}")]
    AmbientTooLarge { dim: u128, cap: usize },
    #[error("subspace ambient {found} does not match dim u(L) = {expected}")]
    AmbientMismatch { expected: usize, found: usize },
    #[error("chain exceeded {MAX_CHAIN_STATES} states without repeating")]
    ChainTooLong,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Env(EnvError),
}

impl From<EnvError> for IdentityError {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::AmbientTooLarge { dim, cap } => IdentityError::AmbientTooLarge { dim, cap },
            other => IdentityError::Env(other),
        }
    }
}

/// Tunables for the identity decisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckConfig {
    pub ambient_cap: usize,
    pub engel_samples: usize,
    pub engel_exhaustive_limit: u64,
    pub seed: u64,
    pub pnil_budget: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            ambient_cap: DEFAULT_AMBIENT_CAP,
            engel_samples: 200,
            engel_exhaustive_limit: 100_000,
            seed: 0,
            pnil_budget: DEFAULT_PNIL_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    LieNilpotent,
    LieSolvable,
    BoundedEngel,
}

impl Identity {
    pub fn name(self) -> &'static str {
        match self {
            Identity::LieNilpotent => "lie_nilpotent",
            Identity::LieSolvable => "lie_solvable",
            Identity::BoundedEngel => "bounded_engel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    Holds,
    Fails,
    Inconclusive,
}

impl Truth {
    pub fn decided(self) -> Option<bool> {
        match self {
            Truth::Holds => Some(true),
            Truth::Fails => Some(false),
            Truth::Inconclusive => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    Nilpotency,
    Solvability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ChainStatus {
    /// The term with this chain index is zero (and no earlier one is).
    ReachedZero { step: usize },
    /// The term at `first_repeat_index` recurs after `period` further steps.
    Cycle { first_repeat_index: usize, period: usize },
}

/// History of a nilpotency chain `W_1 = V, W_{k+1} = [W_k, V]` or a
/// solvability chain `D_0 = V, D_{k+1} = [D_k, D_k]`.
#[derive(Debug, Clone)]
pub struct IdentityChainState {
    pub kind: ChainKind,
    pub history: Vec<Subspace>,
    pub status: ChainStatus,
}

impl IdentityChainState {
    /// Chain index of `history[0]`.
    pub fn first_index(&self) -> usize {
        match self.kind {
            ChainKind::Nilpotency => 1,
            ChainKind::Solvability => 0,
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.history.iter().map(Subspace::dim).collect()
    }

    pub fn term(&self, index: usize) -> &Subspace {
        &self.history[index - self.first_index()]
    }
}

/// An element of u(L) rendered for reports: display string plus PBW terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementRecord {
    pub display: String,
    /// (exponent vector, coefficient) pairs
    pub terms: Vec<(Vec<u8>, u8)>,
}

impl ElementRecord {
    fn new(env: &Enveloping, a: &EnvElement) -> Self {
        Self {
            display: env.format(a),
            terms: a
                .indexed_terms()
                .map(|(m, c)| (env.monomial_at(m).exponents().to_vec(), c))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    ReachedZero {
        step: usize,
        dims: Vec<usize>,
    },
    Cycle {
        first_repeat_index: usize,
        period: usize,
        dims: Vec<usize>,
    },
    EngelExhaustive {
        elements_tested: u64,
    },
    EngelViaNilpotency {
        nilpotency_step: usize,
    },
    /// `[s, _D y] ≠ 0` where `D = dim u(L)`.
    EngelWitness {
        s: ElementRecord,
        y: ElementRecord,
        #[serde(skip)]
        elements: Option<Box<(EnvElement, EnvElement)>>,
    },
    EngelSampled {
        basis_elements: usize,
        random_samples: usize,
        seed: u64,
        best_bound: usize,
    },
}

/// Outcome of one identity decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityVerdict {
    pub identity: Identity,
    pub holds: Truth,
    pub bound: Option<usize>,
    pub certificate: Certificate,
}

impl IdentityVerdict {
    /// The witness pair `(s, y)` of a failed Engel check.
    pub fn engel_witness(&self) -> Option<(&EnvElement, &EnvElement)> {
        match &self.certificate {
            Certificate::EngelWitness {
                elements: Some(pair), ..
            } => Some((&pair.0, &pair.1)),
            _ => None,
        }
    }
}

type SparseVec = Vec<(u32, u8)>;

fn to_sparse(v: &[u8]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i as u32, c))
        .collect()
}

/// u(L) coordinatized by monomial index, with the full table of monomial
/// products. All dense vector work on u(L) goes through this.
pub struct EnvAmbient<'a> {
    env: &'a Enveloping,
    field: PrimeField,
    d: usize,
    /// products of monomials `i · j` live at `offsets[i*d+j]..offsets[i*d+j+1]`
    offsets: Vec<usize>,
    idx: Vec<u32>,
    coef: Vec<u8>,
}

impl<'a> EnvAmbient<'a> {
    pub fn new(env: &'a Enveloping, cap: usize) -> Result<Self, IdentityError> {
        let d = env.ambient_dim(cap)?;
        let n = env.rank();
        // right multiplication by generators, fetched once
        let rmul: Vec<Vec<(u32, u8)>> = (0..d as u64)
            .flat_map(|m| (0..n).map(move |g| (m, g)))
            .map(|(m, g)| env.rmul(m, g).iter().map(|&(t, c)| (t as u32, c)).collect())
            .collect();
        let field = env.field();
        let p = field.p() as u32;
        let mut offsets = Vec::with_capacity(d * d + 1);
        let mut idx = Vec::new();
        let mut coef = Vec::new();
        offsets.push(0);
        let mut acc = vec![0u32; d];
        let mut touched: Vec<u32> = Vec::new();
        for i in 0..d {
            let row_start = offsets.len() - 1;
            for j in 0..d {
                if j == 0 {
                    idx.push(i as u32);
                    coef.push(1);
                    offsets.push(idx.len());
                    continue;
                }
                // j = j' x_g with g the last generator present in j
                let g = (0..n)
                    .rev()
                    .find(|&g| env.monomial_at(j as u64).exponents()[g] > 0)
                    .expect("j > 0 has a generator");
                let jp = j - (field.p() as usize).pow(g as u32);
                let (s, e) = (offsets[row_start + jp], offsets[row_start + jp + 1]);
                for k in s..e {
                    let (t, c) = (idx[k] as usize, coef[k] as u32);
                    for &(u, v) in &rmul[t * n + g] {
                        if acc[u as usize] == 0 {
                            touched.push(u);
                        }
                        acc[u as usize] = (acc[u as usize] + c * v as u32) % p + p;
                    }
                }
                touched.sort_unstable();
                for &u in &touched {
                    let v = acc[u as usize] % p;
                    if v != 0 {
                        idx.push(u);
                        coef.push(v as u8);
                    }
                    acc[u as usize] = 0;
                }
                touched.clear();
                offsets.push(idx.len());
            }
        }
        Ok(Self {
            env,
            field,
            d,
            offsets,
            idx,
            coef,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn env(&self) -> &Enveloping {
        self.env
    }

    /// Total number of stored product terms.
    pub fn table_terms(&self) -> usize {
        self.idx.len()
    }

    fn product(&self, i: u32, j: u32) -> (&[u32], &[u8]) {
        let k = i as usize * self.d + j as usize;
        let (s, e) = (self.offsets[k], self.offsets[k + 1]);
        (&self.idx[s..e], &self.coef[s..e])
    }

    /// `[u, v]` for sparse coordinate vectors, returned dense.
    fn bracket_sparse(&self, u: &[(u32, u8)], v: &[(u32, u8)], acc: &mut Vec<u32>) -> Vec<u8> {
        let p = self.field.p() as u32;
        acc.clear();
        acc.resize(self.d, 0);
        let per_term = (p - 1) * (p - 1);
        let budget = (u32::MAX - p) / per_term;
        let mut pending = 0u32;
        for &(i, a) in u {
            for &(j, b) in v {
                if i == j {
                    continue;
                }
                let c = (a as u32 * b as u32) % p;
                let nc = p - c;
                let (ti, tc) = self.product(i, j);
                for (&t, &x) in ti.iter().zip(tc) {
                    acc[t as usize] += c * x as u32;
                }
                let (ti, tc) = self.product(j, i);
                for (&t, &x) in ti.iter().zip(tc) {
                    acc[t as usize] += nc * x as u32;
                }
                pending += 2;
                if pending + 2 > budget {
                    acc.iter_mut().for_each(|a| *a %= p);
                    pending = 0;
                }
            }
        }
        acc.iter().map(|&a| (a % p) as u8).collect()
    }

    /// `[u, v]` for dense coordinate vectors.
    pub fn bracket(&self, u: &[u8], v: &[u8]) -> Vec<u8> {
        let mut acc = Vec::new();
        self.bracket_sparse(&to_sparse(u), &to_sparse(v), &mut acc)
    }

    pub fn to_dense(&self, a: &EnvElement) -> Result<Vec<u8>, IdentityError> {
        Ok(self.env.to_dense(a, self.d)?)
    }

    pub fn element(&self, v: &[u8]) -> EnvElement {
        self.env.from_dense(v)
    }

    fn check(&self, v: &Subspace) -> Result<(), IdentityError> {
        if v.ambient_dim() != self.d {
            return Err(IdentityError::AmbientMismatch {
                expected: self.d,
                found: v.ambient_dim(),
            });
        }
        Ok(())
    }

    /// `span{[w, v] : w ∈ ws, v ∈ vs}` with the vectors that raised the rank.
    fn bracket_span(&self, ws: &[SparseVec], vs: &[SparseVec], skip_symmetric: bool) -> (Subspace, Vec<SparseVec>) {
        let mut ech = Echelon::new(self.field, self.d);
        let mut reps = Vec::new();
        let mut acc = Vec::new();
        'outer: for (a, w) in ws.iter().enumerate() {
            let start = if skip_symmetric { a + 1 } else { 0 };
            for v in &vs[start.min(vs.len())..] {
                let mut x = self.bracket_sparse(w, v, &mut acc);
                let rep = to_sparse(&x);
                if rep.is_empty() {
                    continue;
                }
                if ech.insert_owned(&mut x) {
                    reps.push(rep);
                    if ech.is_full() {
                        break 'outer;
                    }
                }
            }
        }
        (ech.into_subspace(), reps)
    }

    fn run_chain(
        &self,
        kind: ChainKind,
        v: &Subspace,
    ) -> Result<IdentityChainState, IdentityError> {
        self.check(v)?;
        let v_reps: Vec<SparseVec> = v.basis().iter().map(|b| to_sparse(b)).collect();
        let first = match kind {
            ChainKind::Nilpotency => 1,
            ChainKind::Solvability => 0,
        };
        let mut history = vec![v.clone()];
        let mut seen: HashMap<Subspace, usize> = HashMap::from([(v.clone(), first)]);
        let mut reps = v_reps.clone();
        loop {
            let index = first + history.len() - 1;
            if history.last().expect("nonempty").is_zero() {
                return Ok(IdentityChainState {
                    kind,
                    history,
                    status: ChainStatus::ReachedZero { step: index },
                });
            }
            if history.len() >= MAX_CHAIN_STATES {
                return Err(IdentityError::ChainTooLong);
            }
            let (next, next_reps) = match kind {
                ChainKind::Nilpotency => self.bracket_span(&reps, &v_reps, false),
                ChainKind::Solvability => self.bracket_span(&reps, &reps, true),
            };
            if let Some(&earlier) = seen.get(&next) {
                return Ok(IdentityChainState {
                    kind,
                    history,
                    status: ChainStatus::Cycle {
                        first_repeat_index: earlier,
                        period: index + 1 - earlier,
                    },
                });
            }
            seen.insert(next.clone(), index + 1);
            history.push(next);
            reps = next_reps;
        }
    }

    /// One step of a chain applied to an arbitrary state.
    pub fn chain_step(&self, kind: ChainKind, state: &Subspace, v: &Subspace) -> Subspace {
        let reps: Vec<SparseVec> = state.basis().iter().map(|b| to_sparse(b)).collect();
        match kind {
            ChainKind::Nilpotency => {
                let vs: Vec<SparseVec> = v.basis().iter().map(|b| to_sparse(b)).collect();
                self.bracket_span(&reps, &vs, false).0
            }
            ChainKind::Solvability => self.bracket_span(&reps, &reps, true).0,
        }
    }

    /// Lie nilpotency of `v`: `W_1 = v`, `W_{k+1} = [W_k, v]`.
    pub fn nilpotency_chain(&self, v: &Subspace) -> Result<(IdentityChainState, IdentityVerdict), IdentityError> {
        let state = self.run_chain(ChainKind::Nilpotency, v)?;
        let verdict = chain_verdict(Identity::LieNilpotent, &state);
        Ok((state, verdict))
    }

    /// Lie solvability of `v`: `D_0 = v`, `D_{k+1} = [D_k, D_k]`.
    pub fn solvability_chain(&self, v: &Subspace) -> Result<(IdentityChainState, IdentityVerdict), IdentityError> {
        let state = self.run_chain(ChainKind::Solvability, v)?;
        let verdict = chain_verdict(Identity::LieSolvable, &state);
        Ok((state, verdict))
    }

    /// Re-derives a cycle certificate from scratch: the recorded state is
    /// nonzero and returns to itself after `period` steps.
    pub fn verify_cycle(&self, state: &IdentityChainState, v: &Subspace) -> bool {
        let ChainStatus::Cycle {
            first_repeat_index,
            period,
        } = state.status
        else {
            return false;
        };
        let start = state.term(first_repeat_index).clone();
        if start.is_zero() {
            return false;
        }
        let mut cur = start.clone();
        for _ in 0..period {
            cur = self.chain_step(state.kind, &cur, v);
        }
        cur == start
    }

    /// Sparse columns of `x ↦ [x, y]` on the monomial basis.
    fn ad_right(&self, y: &[u8]) -> Vec<SparseVec> {
        let ys = to_sparse(y);
        let mut acc = Vec::new();
        (0..self.d as u32)
            .map(|i| to_sparse(&self.bracket_sparse(&[(i, 1)], &ys, &mut acc)))
            .collect()
    }

    fn apply(&self, op: &[SparseVec], x: &[(u32, u8)], acc: &mut Vec<u32>) -> Vec<u8> {
        let p = self.field.p() as u32;
        acc.clear();
        acc.resize(self.d, 0);
        let budget = (u32::MAX - p) / ((p - 1) * (p - 1));
        let mut pending = 0;
        for &(i, a) in x {
            for &(t, c) in &op[i as usize] {
                acc[t as usize] += a as u32 * c as u32;
            }
            pending += 1;
            if pending + 1 > budget {
                acc.iter_mut().for_each(|a| *a %= p);
                pending = 0;
            }
        }
        acc.iter().map(|&a| (a % p) as u8).collect()
    }

    /// Smallest `m` with `[x, _m y] = 0` for all `x ∈ v`, or `None` when some
    /// `x ∈ v` is not killed by any power of `ad y`.
    fn engel_degree(&self, v_reps: &[SparseVec], op: &[SparseVec]) -> Option<usize> {
        let mut reps: Vec<SparseVec> = v_reps.to_vec();
        let mut seen: Vec<Subspace> = Vec::new();
        let mut acc = Vec::new();
        for m in 0..=self.d {
            if reps.is_empty() {
                return Some(m);
            }
            let mut ech = Echelon::new(self.field, self.d);
            let mut next = Vec::new();
            for r in &reps {
                let mut x = self.apply(op, r, &mut acc);
                let rep = to_sparse(&x);
                if !rep.is_empty() && ech.insert_owned(&mut x) {
                    next.push(rep);
                }
            }
            let s = ech.into_subspace();
            if !s.is_zero() {
                if seen.contains(&s) {
                    return None;
                }
                seen.push(s);
            }
            reps = next;
        }
        None
    }

    fn engel_witness(&self, v_reps: &[SparseVec], op: &[SparseVec]) -> Option<SparseVec> {
        let mut acc = Vec::new();
        v_reps
            .iter()
            .find(|s| {
                let mut cur = (*s).clone();
                for _ in 0..self.d {
                    cur = to_sparse(&self.apply(op, &cur, &mut acc));
                    if cur.is_empty() {
                        return false;
                    }
                }
                true
            })
            .cloned()
    }

    fn sparse_element(&self, v: &[(u32, u8)]) -> EnvElement {
        let mut dense = vec![0u8; self.d];
        for &(i, c) in v {
            dense[i as usize] = c;
        }
        self.element(&dense)
    }

    /// Bounded Engel status of `v`.
    ///
    /// For fixed `y`, `v` satisfies `[x, _m y] = 0` for some `m` iff `v` lies in
    /// the kernel of `(ad y)^D`, which is decided exactly. All `y ∈ v` are tested
    /// when `|v| ≤ engel_exhaustive_limit`; otherwise a nilpotency class `n`
    /// (from `nilpotency_step`) gives the bound `n - 1`, and failing that the
    /// basis of `v` and then `engel_samples` seeded random `y` are tried.
    pub fn engel_check(
        &self,
        v: &Subspace,
        config: &CheckConfig,
        nilpotency_step: Option<usize>,
    ) -> Result<IdentityVerdict, IdentityError> {
        self.check(v)?;
        let v_reps: Vec<SparseVec> = v.basis().iter().map(|b| to_sparse(b)).collect();
        let p = self.field.p() as u64;
        let count = (0..v.dim()).try_fold(1u64, |acc, _| {
            acc.checked_mul(p).filter(|&c| c <= config.engel_exhaustive_limit)
        });
        let fail = |y: &[u8], op: &[SparseVec]| -> IdentityVerdict {
            let s = self
                .engel_witness(&v_reps, op)
                .expect("a failing y has a basis witness");
            let s = self.sparse_element(&s);
            let y = self.element(y);
            IdentityVerdict {
                identity: Identity::BoundedEngel,
                holds: Truth::Fails,
                bound: None,
                certificate: Certificate::EngelWitness {
                    s: ElementRecord::new(self.env, &s),
                    y: ElementRecord::new(self.env, &y),
                    elements: Some(Box::new((s, y))),
                },
            }
        };

        if let Some(total) = count {
            let mut coeffs = vec![0u8; v.dim()];
            let mut bound = 0;
            for _ in 0..total {
                let y = v.combine(&coeffs);
                let op = self.ad_right(&y);
                match self.engel_degree(&v_reps, &op) {
                    Some(m) => bound = bound.max(m),
                    None => return Ok(fail(&y, &op)),
                }
                for c in coeffs.iter_mut() {
                    *c += 1;
                    if (*c as u64) < p {
                        break;
                    }
                    *c = 0;
                }
            }
            return Ok(IdentityVerdict {
                identity: Identity::BoundedEngel,
                holds: Truth::Holds,
                bound: Some(bound),
                certificate: Certificate::EngelExhaustive {
                    elements_tested: total,
                },
            });
        }

        if let Some(n) = nilpotency_step {
            return Ok(IdentityVerdict {
                identity: Identity::BoundedEngel,
                holds: Truth::Holds,
                bound: Some(n.saturating_sub(1)),
                certificate: Certificate::EngelViaNilpotency { nilpotency_step: n },
            });
        }

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut best = 0;
        let basis = v.basis().iter().cloned();
        let random = (0..config.engel_samples).map(|_| {
            let coeffs: Vec<u8> = (0..v.dim()).map(|_| rng.gen_range(0..self.field.p())).collect();
            v.combine(&coeffs)
        });
        for y in basis.chain(random) {
            let op = self.ad_right(&y);
            match self.engel_degree(&v_reps, &op) {
                Some(m) => best = best.max(m),
                None => return Ok(fail(&y, &op)),
            }
        }
        Ok(IdentityVerdict {
            identity: Identity::BoundedEngel,
            holds: Truth::Inconclusive,
            bound: Some(best),
            certificate: Certificate::EngelSampled {
                basis_elements: v.dim(),
                random_samples: config.engel_samples,
                seed: config.seed,
                best_bound: best,
            },
        })
    }

    /// Checks an Engel witness in isolation: `[s, _D y] ≠ 0` with `D = dim u(L)`.
    pub fn verify_engel_witness(&self, s: &EnvElement, y: &EnvElement) -> Result<bool, IdentityError> {
        Ok(!self.env.engel_power(s, y, self.d)?.is_zero())
    }

    /// `u(L)^+` as a subspace of the ambient.
    pub fn symmetric_subspace(&self) -> Result<Subspace, IdentityError> {
        Ok(self.env.symmetric_decomposition(self.d)?.plus)
    }
}

fn chain_verdict(identity: Identity, state: &IdentityChainState) -> IdentityVerdict {
    match state.status {
        ChainStatus::ReachedZero { step } => IdentityVerdict {
            identity,
            holds: Truth::Holds,
            bound: Some(step),
            certificate: Certificate::ReachedZero {
                step,
                dims: state.dims(),
            },
        },
        ChainStatus::Cycle {
            first_repeat_index,
            period,
        } => IdentityVerdict {
            identity,
            holds: Truth::Fails,
            bound: None,
            certificate: Certificate::Cycle {
                first_repeat_index,
                period,
                dims: state.dims(),
            },
        },
    }
}

/// Conditions on `L` that characterize the identities on u(L).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralPredicates {
    pub l_nilpotent: bool,
    pub lower_central_dims: Vec<usize>,
    pub lderived_dim: usize,
    pub lderived_closure_dim: usize,
    pub lderived_p_nilpotent: SubspacePNilpotence,
    /// In finite dimension the ideal `I = L` always satisfies the
    /// finiteness requirement of the Engel characterization.
    pub ideal_condition: &'static str,
}

/// Identity status predicted from the structural conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub lie_nilpotent: bool,
    pub lie_solvable: bool,
    pub bounded_engel: bool,
}

impl Prediction {
    pub fn get(&self, identity: Identity) -> bool {
        match identity {
            Identity::LieNilpotent => self.lie_nilpotent,
            Identity::LieSolvable => self.lie_solvable,
            Identity::BoundedEngel => self.bounded_engel,
        }
    }
}

impl StructuralPredicates {
    /// `L'` p-nilpotent ⇔ solvable; additionally `L` nilpotent ⇔ nilpotent
    /// and bounded Engel.
    pub fn prediction(&self) -> Prediction {
        let pnil = self.lderived_p_nilpotent.holds() == Some(true);
        Prediction {
            lie_nilpotent: self.l_nilpotent && pnil,
            lie_solvable: pnil,
            bounded_engel: self.l_nilpotent && pnil,
        }
    }
}

pub fn structural_predicates(alg: &Algebra) -> Result<StructuralPredicates, AlgebraError> {
    let lcs = alg.lower_central_series();
    let derived = alg.derived_subalgebra();
    let closure = alg.restricted_closure(derived.basis())?;
    let lderived_p_nilpotent = alg.is_p_nilpotent_subspace(&closure, DEFAULT_PNIL_BUDGET)?;
    Ok(StructuralPredicates {
        l_nilpotent: lcs.terminated_zero,
        lower_central_dims: lcs.dims(),
        lderived_dim: derived.dim(),
        lderived_closure_dim: closure.dim(),
        lderived_p_nilpotent,
        ideal_condition: "vacuous in finite dimension (I = L)",
    })
}

/// Verdicts for one subspace of u(L).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComputedVerdicts {
    pub subspace_dim: usize,
    pub lie_nilpotent: IdentityVerdict,
    pub lie_solvable: IdentityVerdict,
    pub bounded_engel: IdentityVerdict,
}

impl ComputedVerdicts {
    pub fn get(&self, identity: Identity) -> &IdentityVerdict {
        match identity {
            Identity::LieNilpotent => &self.lie_nilpotent,
            Identity::LieSolvable => &self.lie_solvable,
            Identity::BoundedEngel => &self.bounded_engel,
        }
    }
}

/// Structural predictions against computed identity verdicts on `u(L)^+`
/// and `u(L)`.
#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckReport {
    pub algebra: String,
    pub p: u8,
    pub dim: usize,
    pub envelope_dim: usize,
    pub structural: StructuralPredicates,
    pub predicted: Prediction,
    pub computed_plus: ComputedVerdicts,
    pub computed_full: ComputedVerdicts,
    pub agreement: bool,
    /// Entries left undecided, as `"<subspace>.<identity>"`.
    pub inconclusive: Vec<String>,
    /// Decided entries that contradict the prediction.
    pub disagreements: Vec<String>,
}

pub const IDENTITIES: [Identity; 3] = [Identity::LieNilpotent, Identity::LieSolvable, Identity::BoundedEngel];

/// Runs all three identity decisions on `v`.
pub fn compute_verdicts(
    amb: &EnvAmbient<'_>,
    v: &Subspace,
    config: &CheckConfig,
) -> Result<ComputedVerdicts, IdentityError> {
    let (_, nil) = amb.nilpotency_chain(v)?;
    let (_, sol) = amb.solvability_chain(v)?;
    let step = match nil.certificate {
        Certificate::ReachedZero { step, .. } => Some(step),
        _ => None,
    };
    let engel = amb.engel_check(v, config, step)?;
    Ok(ComputedVerdicts {
        subspace_dim: v.dim(),
        lie_nilpotent: nil,
        lie_solvable: sol,
        bounded_engel: engel,
    })
}

pub fn cross_check(id: &str, alg: &Algebra, config: &CheckConfig) -> Result<CrossCheckReport, IdentityError> {
    let structural = structural_predicates(alg)?;
    let predicted = structural.prediction();
    let amb = EnvAmbient::new(alg.enveloping(), config.ambient_cap)?;
    let plus = amb.symmetric_subspace()?;
    let full = Subspace::full(alg.field(), amb.dim());
    let computed_plus = compute_verdicts(&amb, &plus, config)?;
    let computed_full = compute_verdicts(&amb, &full, config)?;
    let mut inconclusive = Vec::new();
    let mut disagreements = Vec::new();
    for (label, verdicts) in [("plus", &computed_plus), ("full", &computed_full)] {
        for identity in IDENTITIES {
            let key = format!("{label}.{}", identity.name());
            match verdicts.get(identity).holds.decided() {
                None => inconclusive.push(key),
                Some(v) if v != predicted.get(identity) => disagreements.push(key),
                Some(_) => {}
            }
        }
    }
    Ok(CrossCheckReport {
        algebra: id.to_string(),
        p: alg.field().p(),
        dim: alg.dim(),
        envelope_dim: amb.dim(),
        structural,
        predicted,
        computed_plus,
        computed_full,
        agreement: inconclusive.is_empty() && disagreements.is_empty(),
        inconclusive,
        disagreements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    #[test]
    fn abelian_full_algebra() {
        let alg = catalog::abelian(3, 2).unwrap();
        let amb = EnvAmbient::new(alg.enveloping(), 2187).unwrap();
        let full = Subspace::full(alg.field(), amb.dim());
        let (_, nil) = amb.nilpotency_chain(&full).unwrap();
        assert_eq!((nil.holds, nil.bound), (Truth::Holds, Some(2)));
        let (_, sol) = amb.solvability_chain(&full).unwrap();
        assert_eq!((sol.holds, sol.bound), (Truth::Holds, Some(1)));
        let engel = amb.engel_check(&full, &cfg(), None).unwrap();
        assert_eq!((engel.holds, engel.bound), (Truth::Holds, Some(1)));
    }

    #[test]
    fn zero_subspace_edge_case() {
        let alg = catalog::heisenberg_nil(3).unwrap();
        let amb = EnvAmbient::new(alg.enveloping(), 2187).unwrap();
        let zero = Subspace::zero(alg.field(), amb.dim());
        assert_eq!(amb.nilpotency_chain(&zero).unwrap().1.bound, Some(1));
        assert_eq!(amb.solvability_chain(&zero).unwrap().1.bound, Some(0));
        assert_eq!(amb.engel_check(&zero, &cfg(), None).unwrap().bound, Some(0));
    }

    #[test]
    fn ambient_mismatch_is_rejected() {
        let alg = catalog::heisenberg_nil(3).unwrap();
        let amb = EnvAmbient::new(alg.enveloping(), 2187).unwrap();
        let wrong = Subspace::zero(alg.field(), 5);
        assert!(matches!(
            amb.nilpotency_chain(&wrong),
            Err(IdentityError::AmbientMismatch { expected: 27, found: 5 })
        ));
    }

    #[test]
    fn ambient_cap_is_reported() {
        let alg = catalog::abelian(3, 3).unwrap();
        assert!(matches!(
            EnvAmbient::new(alg.enveloping(), 26),
            Err(IdentityError::AmbientTooLarge { dim: 27, cap: 26 })
        ));
    }

    #[test]
    fn structural_rows() {
        let s = structural_predicates(&catalog::heisenberg_nil(3).unwrap()).unwrap();
        assert_eq!((s.l_nilpotent, s.lderived_p_nilpotent.holds(), s.lderived_dim), (true, Some(true), 1));
        let s = structural_predicates(&catalog::heisenberg_toral(3).unwrap()).unwrap();
        assert_eq!((s.l_nilpotent, s.lderived_p_nilpotent.holds(), s.lderived_dim), (true, Some(false), 1));
        let s = structural_predicates(&catalog::twodim(3).unwrap()).unwrap();
        assert_eq!((s.l_nilpotent, s.lderived_p_nilpotent.holds(), s.lderived_dim), (false, Some(true), 1));
    }
}
