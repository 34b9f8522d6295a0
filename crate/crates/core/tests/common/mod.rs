//! Shared test helpers: a word-rewriting model of u(L) that does not share
//! code with the straightening engine, and random element generators.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use ulie::{Algebra, EnvElement, Enveloping};

/// Linear combination of words in the generators, coefficients mod p.
pub type WordPoly = BTreeMap<Vec<usize>, u64>;

/// Rewrites a polynomial in words into PBW normal form by applying
/// `x_a x_b -> x_b x_a + [x_a, x_b]` at the rightmost descent and
/// `x_i^p -> x_i^[p]` on sorted words. Every rewrite lowers
/// (length, inversion count), so words are processed from the top of that
/// order with equal words merged.
pub fn normal_form(alg: &Algebra, poly: WordPoly) -> BTreeMap<Vec<u8>, u64> {
    let p = alg.field().p() as u64;
    let n = alg.dim();
    let key = |w: Vec<usize>| {
        let inv = (0..w.len())
            .flat_map(|i| (i + 1..w.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| w[i] > w[j])
            .count();
        (w.len(), inv, w)
    };
    let mut work: BTreeMap<(usize, usize, Vec<usize>), u64> = BTreeMap::new();
    let push = |work: &mut BTreeMap<(usize, usize, Vec<usize>), u64>, w: Vec<usize>, c: u64| {
        let e = work.entry(key(w)).or_insert(0);
        *e = (*e + c) % p;
    };
    for (w, c) in poly {
        push(&mut work, w, c % p);
    }
    let mut done: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    while let Some(((_, _, w), c)) = work.pop_last() {
        if c == 0 {
            continue;
        }
        if let Some(k) = (0..w.len().saturating_sub(1)).rfind(|&k| w[k] > w[k + 1]) {
            let (a, b) = (w[k], w[k + 1]);
            let mut swapped = w.clone();
            swapped.swap(k, k + 1);
            push(&mut work, swapped, c);
            // [x_a, x_b] with a > b is minus the stored [x_b, x_a]
            let br = alg.bracket_basis(b, a);
            for (t, &coef) in br.iter().enumerate() {
                if coef != 0 {
                    let mut nw = w[..k].to_vec();
                    nw.push(t);
                    nw.extend_from_slice(&w[k + 2..]);
                    push(&mut work, nw, c * (p - coef as u64) % p);
                }
            }
            continue;
        }
        let pl = p as usize;
        let run = (0..w.len()).find(|&k| k + pl <= w.len() && w[k..k + pl].iter().all(|&g| g == w[k]));
        if let Some(k) = run {
            let pm = alg.pmap_basis(w[k]);
            for (t, &coef) in pm.iter().enumerate() {
                if coef != 0 {
                    let mut nw = w[..k].to_vec();
                    nw.push(t);
                    nw.extend_from_slice(&w[k + pl..]);
                    push(&mut work, nw, c * coef as u64 % p);
                }
            }
            continue;
        }
        done.insert(w, c);
    }
    done.into_iter()
        .map(|(w, c)| {
            let mut exps = vec![0u8; n];
            for g in w {
                exps[g] += 1;
            }
            (exps, c)
        })
        .collect()
}

/// The sorted word of an exponent vector.
pub fn word(exps: &[u8]) -> Vec<usize> {
    exps.iter()
        .enumerate()
        .flat_map(|(g, &a)| std::iter::repeat_n(g, a as usize))
        .collect()
}

/// Product of two PBW monomials computed by the rewriter.
pub fn naive_product(alg: &Algebra, a: &[u8], b: &[u8]) -> BTreeMap<Vec<u8>, u64> {
    let mut w = word(a);
    w.extend(word(b));
    normal_form(alg, BTreeMap::from([(w, 1)]))
}

/// Terms of an element keyed by exponent vector.
pub fn terms(env: &Enveloping, a: &EnvElement) -> BTreeMap<Vec<u8>, u64> {
    a.indexed_terms()
        .map(|(m, c)| (env.monomial_at(m).exponents().to_vec(), c as u64))
        .collect()
}

pub fn random_monomial<R: Rng>(rng: &mut R, p: u8, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..p)).collect()
}

/// Random element of u(L) with up to `max_terms` terms.
pub fn random_element<R: Rng>(rng: &mut R, env: &Enveloping, max_terms: usize) -> EnvElement {
    let p = env.field().p();
    let n = env.rank();
    let k = rng.gen_range(0..=max_terms);
    let owned: Vec<(Vec<u8>, i64)> = (0..k)
        .map(|_| (random_monomial(rng, p, n), rng.gen_range(1..p) as i64))
        .collect();
    let refs: Vec<(&[u8], i64)> = owned.iter().map(|(m, c)| (m.as_slice(), *c)).collect();
    env.from_terms(&refs).expect("valid monomials")
}

pub fn random_vector<R: Rng>(rng: &mut R, p: u8, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..p)).collect()
}

/// Catalog ids used by the property and oracle suites (all with p^n ≤ 729).
pub const SMALL_IDS: &[&str] = &[
    "abelian(3,2)",
    "heisenberg_nil(3)",
    "heisenberg_toral(3)",
    "twodim(3)",
    "sl2(3)",
    "upper_nil(3,4)",
    "heisenberg_nil(5)",
    "sl2(5)",
    "twodim(7)",
];
