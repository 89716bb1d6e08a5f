//! Counting covers as transposition factorizations `g_b ⋯ g_1 σ_d = (σ_e)^τ`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{
    centralizer_order, compose, conjugate, enumerate_transpositions, sigma_from_composition,
    Composition, Permutation,
};

/// Cap on the estimated number of elementary group operations a count may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkBound(pub u128);

impl Default for WorkBound {
    fn default() -> Self {
        WorkBound(1_000_000_000)
    }
}

impl WorkBound {
    pub fn check(self, estimated: u128) -> Result<()> {
        if estimated > self.0 {
            return Err(Error::WorkBoundExceeded {
                estimated,
                bound: self.0,
            });
        }
        Ok(())
    }
}

/// Which counting route to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    BruteForce,
    #[default]
    Fast,
}

/// Subscripts of `n_{b; d_1..d_k; e_1..e_l}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct CountKey {
    pub b: usize,
    pub d: Composition,
    pub e: Composition,
}

impl CountKey {
    pub fn new(b: usize, d: Composition, e: Composition) -> Self {
        Self { b, d, e }
    }

    pub fn is_balanced(&self) -> bool {
        self.d.total() == self.e.total()
    }
}

impl fmt::Display for CountKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n[b={}; d={}; e={}]", self.b, self.d, self.e)
    }
}

/// One counted cover: transpositions `g_1, ..., g_b` and the relabeling `τ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FactorizationTuple {
    pub transpositions: Vec<Permutation>,
    pub tau: Permutation,
}

impl FactorizationTuple {
    pub fn degree(&self) -> usize {
        self.tau.degree()
    }

    /// The intermediate monodromies `σ_d, g_1σ_d, ..., g_b⋯g_1σ_d`.
    pub fn levels(&self, d: &Composition) -> Result<Vec<Permutation>> {
        let mut current = sigma_from_composition(d);
        let mut levels = vec![current.clone()];
        for g in &self.transpositions {
            if !g.is_transposition() {
                return Err(Error::InvalidPermutation(format!("{g} is not a transposition")));
            }
            current = compose(g, &current)?;
            levels.push(current.clone());
        }
        Ok(levels)
    }

    /// Whether `g_b⋯g_1 σ_d = (σ_e)^τ` holds.
    pub fn satisfies(&self, d: &Composition, e: &Composition) -> Result<bool> {
        let top = self.levels(d)?.pop().expect("level 0 always present");
        Ok(top == conjugate(&sigma_from_composition(e), &self.tau)?)
    }
}

fn binomial2(d: usize) -> u128 {
    (d as u128) * (d as u128).saturating_sub(1) / 2
}

fn factorial(d: usize) -> u128 {
    (1..=d as u128).fold(1u128, |acc, x| acc.saturating_mul(x))
}

/// `(d(d-1)/2)^b · d!`, saturating.
pub fn bruteforce_cost(b: usize, d: usize) -> u128 {
    let per_level = binomial2(d);
    let tuples = (0..b).fold(1u128, |acc, _| acc.saturating_mul(per_level));
    tuples.saturating_mul(factorial(d))
}

/// `b · d(d-1)/2 · d!`: the dynamic program touches at most every permutation once per level.
pub fn fast_cost(b: usize, d: usize) -> u128 {
    (b as u128)
        .saturating_mul(binomial2(d))
        .saturating_mul(factorial(d))
}

/// Visits every transposition tuple in lexicographic order together with its product
/// `g_b ⋯ g_1 · start`.
fn walk_tuples<F>(start: &Permutation, transpositions: &[Permutation], b: usize, visit: &mut F)
where
    F: FnMut(&[usize], &Permutation),
{
    fn rec<F: FnMut(&[usize], &Permutation)>(
        current: &Permutation,
        transpositions: &[Permutation],
        remaining: usize,
        prefix: &mut Vec<usize>,
        visit: &mut F,
    ) {
        if remaining == 0 {
            visit(prefix, current);
            return;
        }
        for (i, g) in transpositions.iter().enumerate() {
            prefix.push(i);
            rec(&g.after(current), transpositions, remaining - 1, prefix, visit);
            prefix.pop();
        }
    }
    rec(start, transpositions, b, &mut Vec::with_capacity(b), visit);
}

/// Number of transposition tuples per product permutation, by exhaustive walk.
fn product_histogram(key: &CountKey) -> HashMap<Permutation, u64> {
    let start = sigma_from_composition(&key.d);
    let transpositions = enumerate_transpositions(key.d.total());
    if key.b == 0 {
        return HashMap::from([(start, 1)]);
    }
    transpositions
        .par_iter()
        .map(|g| {
            let mut local = HashMap::new();
            walk_tuples(&g.after(&start), &transpositions, key.b - 1, &mut |_, p| {
                *local.entry(p.clone()).or_insert(0u64) += 1;
            });
            local
        })
        .reduce(HashMap::new, |mut acc, part| {
            for (p, c) in part {
                *acc.entry(p).or_insert(0) += c;
            }
            acc
        })
}

/// `n_{b;d;e}` by checking every transposition tuple against every `τ ∈ S_d`.
///
/// The tuples are tallied by product first, then each `τ` looks up how many tuples
/// land on `(σ_e)^τ`; every (tuple, τ) pair is still accounted for individually.
pub fn count_covers_bruteforce(key: &CountKey, bound: WorkBound) -> Result<BigUint> {
    if !key.is_balanced() {
        return Ok(BigUint::zero());
    }
    let d = key.d.total();
    bound.check(bruteforce_cost(key.b, d))?;
    if key.b > 0 && d < 2 {
        return Ok(BigUint::zero());
    }
    let histogram = product_histogram(key);
    let sigma_e = sigma_from_composition(&key.e);
    let total: u128 = Permutation::all(d)
        .par_bridge()
        .map(|tau| {
            let target = sigma_e.relabeled_by(&tau);
            histogram.get(&target).copied().unwrap_or(0) as u128
        })
        .sum();
    Ok(BigUint::from(total))
}

/// Distribution of `g_b ⋯ g_1 σ_d` over `S_d`, one level at a time.
fn product_distribution(key: &CountKey) -> HashMap<Permutation, BigUint> {
    let transpositions = enumerate_transpositions(key.d.total());
    let mut dist = HashMap::from([(sigma_from_composition(&key.d), BigUint::from(1u32))]);
    for _ in 0..key.b {
        let mut next: HashMap<Permutation, BigUint> = HashMap::with_capacity(dist.len() * 2);
        for (p, count) in &dist {
            for g in &transpositions {
                *next.entry(g.after(p)).or_default() += count;
            }
        }
        dist = next;
    }
    dist
}

/// `n_{b;d;e}` as `|Z(σ_e)| · #{tuples whose product has the cycle type of e}`.
///
/// For fixed transpositions the solutions `τ` form a coset of the centralizer of
/// `σ_e`, so only the cycle type of the product matters.
pub fn count_covers_fast(key: &CountKey, bound: WorkBound) -> Result<BigUint> {
    if !key.is_balanced() {
        return Ok(BigUint::zero());
    }
    let d = key.d.total();
    bound.check(fast_cost(key.b, d))?;
    if key.b > 0 && d < 2 {
        return Ok(BigUint::zero());
    }
    let wanted = key.e.sorted_parts();
    let tuples: BigUint = product_distribution(key)
        .into_iter()
        .filter(|(p, _)| p.cycle_type() == wanted)
        .map(|(_, c)| c)
        .sum();
    Ok(tuples * centralizer_order(&key.e))
}

pub fn count_covers(key: &CountKey, method: Method, bound: WorkBound) -> Result<BigUint> {
    match method {
        Method::BruteForce => count_covers_bruteforce(key, bound),
        Method::Fast => count_covers_fast(key, bound),
    }
}

/// Every factorization tuple counted by `n_{b;d;e}`, ordered by transposition indices
/// and then by the image list of `τ`.
pub fn enumerate_factorizations(key: &CountKey, bound: WorkBound) -> Result<Vec<FactorizationTuple>> {
    if !key.is_balanced() {
        return Ok(Vec::new());
    }
    let d = key.d.total();
    bound.check(bruteforce_cost(key.b, d))?;
    if key.b > 0 && d < 2 {
        return Ok(Vec::new());
    }
    let sigma_e = sigma_from_composition(&key.e);
    let mut taus_by_target: HashMap<Permutation, Vec<Permutation>> = HashMap::new();
    for tau in Permutation::all(d) {
        taus_by_target
            .entry(sigma_e.relabeled_by(&tau))
            .or_default()
            .push(tau);
    }
    let transpositions = enumerate_transpositions(d);
    let mut out = Vec::new();
    walk_tuples(
        &sigma_from_composition(&key.d),
        &transpositions,
        key.b,
        &mut |indices, product| {
            if let Some(taus) = taus_by_target.get(product) {
                let gs: Vec<Permutation> = indices.iter().map(|&i| transpositions[i].clone()).collect();
                for tau in taus {
                    out.push(FactorizationTuple {
                        transpositions: gs.clone(),
                        tau: tau.clone(),
                    });
                }
            }
        },
    );
    Ok(out)
}

/// Exact coefficients of `F_{b,k,l}` up to a total degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoefficientTable {
    entries: BTreeMap<CountKey, BigUint>,
}

impl CoefficientTable {
    /// Coefficient for `key`; keys absent from the table (including unbalanced ones) are 0.
    pub fn get(&self, key: &CountKey) -> BigUint {
        self.entries.get(key).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> &BTreeMap<CountKey, BigUint> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Every balanced key with `d` of length `k`, `e` of length `l` and total at most `d_max`.
pub fn balanced_keys(b: usize, k: usize, l: usize, d_max: usize) -> Vec<CountKey> {
    let mut keys = Vec::new();
    for total in 1..=d_max {
        for d in Composition::all(total, k) {
            for e in Composition::all(total, l) {
                keys.push(CountKey::new(b, d.clone(), e));
            }
        }
    }
    keys
}

pub fn build_table(
    b: usize,
    k: usize,
    l: usize,
    d_max: usize,
    method: Method,
    bound: WorkBound,
) -> Result<CoefficientTable> {
    let keys = balanced_keys(b, k, l, d_max);
    let values: Vec<BigUint> = keys
        .par_iter()
        .map(|key| count_covers(key, method, bound))
        .collect::<Result<_>>()?;
    Ok(CoefficientTable {
        entries: keys.into_iter().zip(values).collect(),
    })
}
