//! Permutations of `{1, ..., d}`, cycle decompositions and boundary compositions.
//!
//! Points are 1-based in every public signature. Internally images are
//! stored 0-based.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of the symmetric group `S_d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        assert!(degree >= 1, "permutation degree must be positive");
        Self {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from its 1-based image list: `images[i - 1]` is the image of `i`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let d = images.len();
        if d == 0 {
            return Err(Error::InvalidPermutation("degree must be positive".into()));
        }
        let mut seen = vec![false; d];
        let mut zero_based = Vec::with_capacity(d);
        for &v in images {
            if v == 0 || v > d || seen[v - 1] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection of 1..={d}"
                )));
            }
            seen[v - 1] = true;
            zero_based.push(v - 1);
        }
        Ok(Self { images: zero_based })
    }

    /// Builds a permutation of degree `degree` from disjoint cycles written with 1-based points.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidPermutation("degree must be positive".into()));
        }
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for &p in cycle.iter() {
                if p == 0 || p > degree || used[p - 1] {
                    return Err(Error::InvalidPermutation(format!(
                        "cycles {cycles:?} are not disjoint cycles on 1..={degree}"
                    )));
                }
                used[p - 1] = true;
            }
            for (i, &p) in cycle.iter().enumerate() {
                images[p - 1] = cycle[(i + 1) % cycle.len()] - 1;
            }
        }
        Ok(Self { images })
    }

    /// The transposition `(a b)` in `S_degree`.
    pub fn transposition(degree: usize, a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::InvalidPermutation(format!("({a} {b}) is not a transposition")));
        }
        Self::from_cycles(degree, &[&[a, b]])
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-based point `point`.
    pub fn image(&self, point: usize) -> usize {
        self.images[point - 1] + 1
    }

    /// 1-based image list.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn is_transposition(&self) -> bool {
        self.images.iter().enumerate().filter(|&(i, &v)| i != v).count() == 2
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ right`, degrees assumed equal.
    pub(crate) fn after(&self, right: &Self) -> Self {
        debug_assert_eq!(self.degree(), right.degree());
        Self {
            images: right.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    /// `relabel ∘ self ∘ relabel⁻¹`, degrees assumed equal.
    pub(crate) fn relabeled_by(&self, relabel: &Self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            images[relabel.images[i]] = relabel.images[v];
        }
        Self { images }
    }

    /// Cycle lengths sorted in decreasing order, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let d = self.images.len();
        let mut seen = vec![false; d];
        let mut lengths = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    /// Iterates over all `d!` permutations of `S_d` in lexicographic order of image lists.
    pub fn all(degree: usize) -> impl Iterator<Item = Permutation> {
        (0..degree)
            .permutations(degree)
            .map(|images| Permutation { images })
    }

    pub(crate) fn from_zero_based(images: Vec<usize>) -> Self {
        Self { images }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]({})", self.degree(), self)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("id");
        }
        for cycle in cycle_decomposition(self).cycles() {
            if cycle.len() > 1 {
                write!(f, "{cycle}")?;
            }
        }
        Ok(())
    }
}

/// Composition of permutations: `compose(a, b)(i) = a(b(i))`.
pub fn compose(a: &Permutation, b: &Permutation) -> Result<Permutation> {
    check_degrees(a, b)?;
    Ok(a.after(b))
}

/// Conjugation `σ^τ` as the map `τ ∘ σ ∘ τ⁻¹`, i.e. `σ` with its points renamed by `τ`.
pub fn conjugate(sigma: &Permutation, tau: &Permutation) -> Result<Permutation> {
    check_degrees(sigma, tau)?;
    Ok(sigma.relabeled_by(tau))
}

fn check_degrees(a: &Permutation, b: &Permutation) -> Result<()> {
    if a.degree() != b.degree() {
        return Err(Error::DegreeMismatch {
            left: a.degree(),
            right: b.degree(),
        });
    }
    Ok(())
}

/// A single cyclic component, 1-based, rotated so that its smallest point comes first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Cycle(Vec<usize>);

impl Cycle {
    /// Normalizes the rotation of `points`. Points must be distinct.
    pub fn new(points: Vec<usize>) -> Self {
        assert!(!points.is_empty(), "empty cycle");
        let pos = points
            .iter()
            .position_min()
            .expect("non-empty cycle");
        let mut points = points;
        points.rotate_left(pos);
        Cycle(points)
    }

    pub fn points(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, point: usize) -> bool {
        self.0.contains(&point)
    }

    /// The cycle acting on its support and fixing every other point of `{1..degree}`.
    pub fn to_permutation(&self, degree: usize) -> Result<Permutation> {
        Permutation::from_cycles(degree, &[&self.0])
    }

    /// The cycle with every point renamed by `relabel`.
    pub fn relabeled_by(&self, relabel: &Permutation) -> Cycle {
        Cycle::new(self.0.iter().map(|&p| relabel.image(p)).collect())
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(" "))
    }
}

/// All cyclic components of a permutation, fixed points included as 1-cycles,
/// sorted by smallest point.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycleDecomposition {
    degree: usize,
    cycles: Vec<Cycle>,
}

impl CycleDecomposition {
    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(Cycle::len).collect()
    }

    pub fn to_permutation(&self) -> Permutation {
        let cycles: Vec<&[usize]> = self.cycles.iter().map(|c| c.points()).collect();
        Permutation::from_cycles(self.degree, &cycles).expect("cycles of a decomposition are disjoint")
    }
}

pub fn cycle_decomposition(sigma: &Permutation) -> CycleDecomposition {
    let d = sigma.degree();
    let mut seen = vec![false; d];
    let mut cycles = Vec::new();
    for start in 0..d {
        if seen[start] {
            continue;
        }
        let mut points = Vec::new();
        let mut p = start;
        while !seen[p] {
            seen[p] = true;
            points.push(p + 1);
            p = sigma.images[p];
        }
        cycles.push(Cycle(points));
    }
    CycleDecomposition { degree: d, cycles }
}

/// An ordered tuple of positive integers: the winding degrees of boundary circles.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidComposition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidComposition(format!("{parts:?} has a zero part")));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Partial sums `d̃_0 = 0, d̃_1, ..., d̃_k`.
    pub fn partial_sums(&self) -> Vec<usize> {
        std::iter::once(0)
            .chain(self.parts.iter().scan(0, |acc, &p| {
                *acc += p;
                Some(*acc)
            }))
            .collect()
    }

    /// Parts sorted in decreasing order, comparable with [`Permutation::cycle_type`].
    pub fn sorted_parts(&self) -> Vec<usize> {
        let mut parts = self.parts.clone();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    }

    /// The consecutive block cycles `(d̃_{i-1}+1 ... d̃_i)`, one per part, in order.
    pub fn blocks(&self) -> Vec<Cycle> {
        self.partial_sums()
            .windows(2)
            .map(|w| Cycle((w[0] + 1..=w[1]).collect()))
            .collect()
    }

    /// All compositions of `total` into exactly `len` parts, in lexicographic order.
    pub fn all(total: usize, len: usize) -> Vec<Composition> {
        fn rec(remaining: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Composition>) {
            if slots == 0 {
                if remaining == 0 {
                    out.push(Composition { parts: prefix.clone() });
                }
                return;
            }
            if remaining < slots {
                return;
            }
            for first in 1..=remaining - (slots - 1) {
                prefix.push(first);
                rec(remaining - first, slots - 1, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if len >= 1 {
            rec(total, len, &mut Vec::with_capacity(len), &mut out);
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Composition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Composition::new(parts)
    }
}

impl From<Composition> for Vec<usize> {
    fn from(c: Composition) -> Self {
        c.parts
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.parts.iter().join(","))
    }
}

/// `σ_{d_1,...,d_k}`: the product of the consecutive block cycles of `c`.
pub fn sigma_from_composition(c: &Composition) -> Permutation {
    let mut images = Vec::with_capacity(c.total());
    for w in c.partial_sums().windows(2) {
        let (lo, hi) = (w[0], w[1]);
        images.extend(lo + 1..hi);
        images.push(lo);
    }
    Permutation::from_zero_based(images)
}

/// Order of the centralizer of `σ_c` in `S_d`: `∏_j j^{m_j} m_j!` where `m_j`
/// counts the parts equal to `j`.
pub fn centralizer_order(c: &Composition) -> BigUint {
    let mut order = BigUint::one();
    for (part, group) in &c.sorted_parts().into_iter().chunk_by(|&p| p) {
        let multiplicity = group.count();
        for m in 1..=multiplicity {
            order *= BigUint::from(part) * BigUint::from(m);
        }
    }
    order
}

/// All transpositions `(a b)`, `a < b`, of `S_d` in lexicographic order of `(a, b)`.
pub fn enumerate_transpositions(degree: usize) -> Vec<Permutation> {
    (1..=degree)
        .tuple_combinations()
        .map(|(a, b)| Permutation::transposition(degree, a, b).expect("a < b"))
        .collect()
}
