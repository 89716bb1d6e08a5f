//! The boson graph sum for `F_{b,k,l}` and the fermionic product formula for
//! `F_{b,1,1}(q; 1)`, each checked coefficient-wise against cover counts.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covers::{balanced_keys, count_covers_bruteforce, count_covers_fast, CountKey, WorkBound};
use crate::error::{Error, Result};
use crate::graph::{enumerate_graphs, FeynmanGraph, GraphClassVariant};
use crate::integrals::f_gamma_coefficient;
use crate::perm::Composition;

/// `Σ_Γ I_Γ / #Aut(Γ)` over `graphs`, required to be a nonnegative integer.
pub fn graph_sum(graphs: &[FeynmanGraph], d: &Composition, e: &Composition) -> Result<BigUint> {
    let mut total = BigRational::zero();
    for g in graphs {
        total += f_gamma_coefficient(g, d, e)?;
    }
    if !total.is_integer() || total.is_negative() {
        return Err(Error::NonIntegral(total.to_string()));
    }
    Ok(total
        .to_integer()
        .to_biguint()
        .expect("checked nonnegative"))
}

/// The boson sum over `G_{b,k,l}` at degrees `(d, e)`.
pub fn boson_sum(b: usize, k: usize, l: usize, d: &Composition, e: &Composition) -> Result<BigUint> {
    boson_sum_with(b, k, l, d, e, GraphClassVariant::Standard)
}

pub fn boson_sum_with(
    b: usize,
    k: usize,
    l: usize,
    d: &Composition,
    e: &Composition,
    variant: GraphClassVariant,
) -> Result<BigUint> {
    if d.len() != k || e.len() != l {
        return Err(Error::InvalidArgument(format!("degrees {d}, {e} do not have lengths {k}, {l}")));
    }
    graph_sum(&enumerate_graphs(b, k, l, variant), d, e)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BosonRow {
    pub key: CountKey,
    #[serde(with = "crate::decimal")]
    pub oracle: BigUint,
    #[serde(with = "crate::decimal")]
    pub graph_sum: BigUint,
    #[serde(rename = "match")]
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BosonReport {
    pub b_max: usize,
    pub k_max: usize,
    pub l_max: usize,
    pub d_max: usize,
    pub rows: Vec<BosonRow>,
    pub mismatches: Vec<CountKey>,
}

impl BosonReport {
    pub fn all_match(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// Re-derives every match flag and the mismatch list from the stored numbers.
    pub fn is_consistent(&self) -> bool {
        let flags_ok = self
            .rows
            .iter()
            .all(|r| r.matched == (r.oracle == r.graph_sum));
        let listed: Vec<&CountKey> = self.rows.iter().filter(|r| !r.matched).map(|r| &r.key).collect();
        flags_ok && listed == self.mismatches.iter().collect::<Vec<_>>()
    }
}

/// Compares the boson sum with the brute-force cover count for every balanced key
/// with `b ≤ b_max`, `1 ≤ k ≤ k_max`, `1 ≤ l ≤ l_max` and total degree `≤ d_max`.
pub fn verify_boson(
    b_max: usize,
    k_max: usize,
    l_max: usize,
    d_max: usize,
    bound: WorkBound,
) -> Result<BosonReport> {
    let mut graphs: HashMap<(usize, usize, usize), Vec<FeynmanGraph>> = HashMap::new();
    let mut keys = Vec::new();
    for b in 0..=b_max {
        for k in 1..=k_max {
            for l in 1..=l_max {
                graphs.insert((b, k, l), enumerate_graphs(b, k, l, GraphClassVariant::Standard));
                keys.extend(balanced_keys(b, k, l, d_max));
            }
        }
    }
    keys.sort();
    let rows = keys
        .into_par_iter()
        .map(|key| {
            let oracle = count_covers_bruteforce(&key, bound)?;
            let gs = &graphs[&(key.b, key.d.len(), key.e.len())];
            let sum = graph_sum(gs, &key.d, &key.e)?;
            Ok(BosonRow {
                matched: oracle == sum,
                key,
                oracle,
                graph_sum: sum,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mismatches = rows.iter().filter(|r| !r.matched).map(|r| r.key.clone()).collect();
    Ok(BosonReport {
        b_max,
        k_max,
        l_max,
        d_max,
        rows,
        mismatches,
    })
}

/// Coefficient of `q^d λ^b / b!` in `(Σ_p q^p e^{λp²/2})(Σ_p q^p e^{-λp²/2})`, `p ∈ ℤ≥0 + 1/2`:
/// `Σ_{p+p'=d} ((p² - p'²)/2)^b`, with `0^0 = 1`.
pub fn fermion_coefficient(b: usize, d: usize) -> Result<BigInt> {
    if d == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    let two = BigInt::from(2);
    let mut total = BigRational::zero();
    // p = j + 1/2, p' = d - p; (p² - p'²)/2 = (p - p')·d/2 = (2j + 1 - d)·d/2.
    for j in 0..d {
        let diff = BigInt::from(2 * j as i64 + 1 - d as i64);
        let base = BigRational::new(diff * BigInt::from(d), two.clone());
        total += num_traits::pow(base, b);
    }
    if !total.is_integer() {
        return Err(Error::NonIntegral(total.to_string()));
    }
    Ok(total.to_integer())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FermionRow {
    pub b: usize,
    pub d: usize,
    /// `n_{b;(d);(d)}`.
    #[serde(with = "crate::decimal")]
    pub lhs: BigUint,
    #[serde(with = "crate::decimal")]
    pub rhs: BigInt,
    #[serde(rename = "match")]
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FermionReport {
    pub b_max: usize,
    pub d_max: usize,
    pub rows: Vec<FermionRow>,
}

impl FermionReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matched)
    }

    pub fn is_consistent(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.matched == (BigInt::from(r.lhs.clone()) == r.rhs))
    }
}

/// Compares `n_{b;(d);(d)}` with [`fermion_coefficient`] for every `b ≤ b_max`, `1 ≤ d ≤ d_max`.
pub fn verify_fermion(b_max: usize, d_max: usize, bound: WorkBound) -> Result<FermionReport> {
    let pairs: Vec<(usize, usize)> = (0..=b_max)
        .flat_map(|b| (1..=d_max).map(move |d| (b, d)))
        .collect();
    let rows = pairs
        .into_par_iter()
        .map(|(b, d)| {
            let part = Composition::new(vec![d])?;
            let lhs = count_covers_fast(&CountKey::new(b, part.clone(), part), bound)?;
            let rhs = fermion_coefficient(b, d)?;
            Ok(FermionRow {
                b,
                d,
                matched: BigInt::from(lhs.clone()) == rhs,
                lhs,
                rhs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FermionReport { b_max, d_max, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(parts: &[usize]) -> Composition {
        Composition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn boson_examples() {
        assert_eq!(boson_sum(0, 1, 1, &comp(&[5]), &comp(&[5])).unwrap(), BigUint::from(5u32));
        assert_eq!(boson_sum(2, 1, 1, &comp(&[2]), &comp(&[2])).unwrap(), BigUint::from(2u32));
        for n in 1..=5 {
            assert!(boson_sum(1, 1, 1, &comp(&[n]), &comp(&[n])).unwrap().is_zero());
        }
        assert!(boson_sum(1, 2, 1, &comp(&[2]), &comp(&[2])).is_err());
    }

    #[test]
    fn verify_boson_examples() {
        let bound = WorkBound::default();
        for (b, k, l, d) in [(4, 1, 1, 5), (0, 2, 2, 4), (3, 2, 2, 4)] {
            let report = verify_boson(b, k, l, d, bound).unwrap();
            assert!(report.all_match(), "{:?}", report.mismatches);
            assert!(report.is_consistent());
            assert!(!report.rows.is_empty());
        }
    }

    #[test]
    fn extended_graphs_change_nothing() {
        for b in 0..=3 {
            for k in 1..=2 {
                for l in 1..=2 {
                    for key in balanced_keys(b, k, l, 5) {
                        assert_eq!(
                            boson_sum_with(b, k, l, &key.d, &key.e, GraphClassVariant::Standard).unwrap(),
                            boson_sum_with(b, k, l, &key.d, &key.e, GraphClassVariant::Extended).unwrap(),
                            "{key}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fermion_examples() {
        assert_eq!(fermion_coefficient(0, 3).unwrap(), BigInt::from(3));
        assert_eq!(fermion_coefficient(2, 2).unwrap(), BigInt::from(2));
        for b in [1, 3, 5] {
            for d in 1..=6 {
                assert!(fermion_coefficient(b, d).unwrap().is_zero());
            }
        }
        assert!(fermion_coefficient(2, 0).is_err());
    }

    #[test]
    fn fermion_finite_sum_by_half_integers() {
        // Direct enumeration of half-integer pairs with exact rationals.
        for b in 0..=4 {
            for d in 1..=6 {
                let mut sum = BigRational::zero();
                for twice_p in (1..2 * d).step_by(2) {
                    let p = BigRational::new(BigInt::from(twice_p), BigInt::from(2));
                    let q = BigRational::from_integer(BigInt::from(d)) - &p;
                    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
                    sum += num_traits::pow((&p * &p - &q * &q) * half, b);
                }
                assert_eq!(sum, BigRational::from_integer(fermion_coefficient(b, d).unwrap()));
            }
        }
    }

    #[test]
    fn verify_fermion_examples() {
        let bound = WorkBound::default();
        let r = verify_fermion(4, 6, bound).unwrap();
        assert!(r.all_match() && r.is_consistent());
        let r = verify_fermion(0, 8, bound).unwrap();
        assert!(r.rows.iter().all(|row| row.lhs == BigUint::from(row.d) && row.matched));
    }

    #[test]
    fn reports_round_trip_through_json() {
        let bound = WorkBound::default();
        let boson = verify_boson(2, 2, 1, 3, bound).unwrap();
        let text = serde_json::to_string(&boson).unwrap();
        assert!(text.contains(r#""key":{"b":0,"d":[1],"e":[1]},"oracle":"1","graph_sum":"1","match":true"#));
        let back: BosonReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, boson);
        assert!(back.is_consistent());

        let fermion = verify_fermion(2, 3, bound).unwrap();
        let back: FermionReport = serde_json::from_str(&serde_json::to_string(&fermion).unwrap()).unwrap();
        assert_eq!(back, fermion);
    }

    #[test]
    fn tampered_report_is_inconsistent() {
        let mut report = verify_boson(2, 1, 1, 3, WorkBound::default()).unwrap();
        report.rows[2].graph_sum += 1u32;
        assert!(!report.is_consistent());
    }
}
