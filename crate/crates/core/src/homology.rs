//! Integer homology of finite posets via their order complexes.
//!
//! The order complex of a poset has the strict chains as simplices.  Its
//! boundary matrices are reduced to Smith normal form with minimal-pivot
//! elimination; arithmetic runs in `i128` with overflow checks and falls
//! back to arbitrary precision when a reduction outgrows the word size.
//! Homology is reported reduced: the empty chain augments degree zero.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::{Error, Result};

/// A finite strict partial order on `{0, .., n-1}`.
#[derive(Clone, Debug)]
pub struct FinitePoset {
    less: Vec<Vec<bool>>,
}

impl FinitePoset {
    /// Build from a strict comparison, checking irreflexivity, antisymmetry
    /// and transitivity exhaustively.
    pub fn new(n: usize, less: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let table: Vec<Vec<bool>> =
            (0..n).map(|i| (0..n).map(|j| less(i, j)).collect()).collect();
        for i in 0..n {
            if table[i][i] {
                return Err(Error::Invariant(format!("order is not irreflexive at {i}")));
            }
            for j in 0..n {
                if table[i][j] && table[j][i] {
                    return Err(Error::Invariant(format!("order is not antisymmetric at {i},{j}")));
                }
                for k in 0..n {
                    if table[i][j] && table[j][k] && !table[i][k] {
                        return Err(Error::Invariant(format!(
                            "order is not transitive at {i},{j},{k}"
                        )));
                    }
                }
            }
        }
        Ok(FinitePoset { less: table })
    }

    pub fn len(&self) -> usize {
        self.less.len()
    }

    pub fn is_empty(&self) -> bool {
        self.less.is_empty()
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.less[i][j]
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        i == j || self.less[i][j]
    }

    /// Strict chains, grouped by dimension (a chain of `k+1` elements is a
    /// `k`-simplex), each dimension sorted lexicographically.
    pub fn chains(&self) -> Vec<Vec<Vec<usize>>> {
        let n = self.len();
        let mut by_dim: Vec<Vec<Vec<usize>>> = vec![(0..n).map(|i| vec![i]).collect()];
        loop {
            let last = by_dim.last().unwrap();
            let mut next = Vec::new();
            for chain in last {
                let top = *chain.last().unwrap();
                for j in 0..n {
                    if self.less[top][j] {
                        let mut longer = chain.clone();
                        longer.push(j);
                        next.push(longer);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            by_dim.push(next);
        }
        by_dim
    }

    /// Boundary matrices of the order complex, augmented in degree zero.
    pub fn order_complex(&self) -> ChainComplex {
        let chains = self.chains();
        let mut boundaries = Vec::with_capacity(chains.len());
        // augmentation: every vertex maps to the single empty chain
        boundaries.push(IntMatrix::from_rows(vec![vec![1i128; chains[0].len()]]));
        for k in 1..chains.len() {
            let lower = &chains[k - 1];
            let index: std::collections::HashMap<&[usize], usize> =
                lower.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
            let mut m = IntMatrix::zero(lower.len(), chains[k].len());
            for (col, chain) in chains[k].iter().enumerate() {
                for drop in 0..chain.len() {
                    let mut face: Vec<usize> = chain.clone();
                    face.remove(drop);
                    let row = index[face.as_slice()];
                    let sign = if drop % 2 == 0 { 1 } else { -1 };
                    m.add_entry(row, col, sign);
                }
            }
            boundaries.push(m);
        }
        ChainComplex::new(boundaries).expect("order complex boundaries square to zero")
    }
}

/// Dense integer matrix.
#[derive(Clone)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<i128>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, r: usize, c: usize) -> i128 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i128) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_entry(&mut self, r: usize, c: usize, v: i128) {
        self.data[r * self.cols + c] += v;
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)
    }
}

/// A chain complex given by boundary matrices; `boundaries[k]` maps degree
/// `k` chains down, with the degree-0 boundary the augmentation row.
pub struct ChainComplex {
    pub boundaries: Vec<IntMatrix>,
}

impl ChainComplex {
    pub fn new(boundaries: Vec<IntMatrix>) -> Result<Self> {
        for k in 1..boundaries.len() {
            let hi = &boundaries[k];
            let lo = &boundaries[k - 1];
            if lo.cols != hi.rows {
                return Err(Error::StructuralMismatch(format!(
                    "boundary shapes disagree between degrees {} and {k}",
                    k - 1
                )));
            }
            for c in 0..hi.cols {
                for r in 0..lo.rows {
                    let mut acc: i128 = 0;
                    for m in 0..hi.rows {
                        acc = acc
                            .checked_add(
                                lo.get(r, m)
                                    .checked_mul(hi.get(m, c))
                                    .ok_or_else(|| Error::Invariant("boundary product overflow".into()))?,
                            )
                            .ok_or_else(|| Error::Invariant("boundary product overflow".into()))?;
                    }
                    if acc != 0 {
                        return Err(Error::Invariant(format!(
                            "boundaries do not square to zero in degree {k}"
                        )));
                    }
                }
            }
        }
        Ok(ChainComplex { boundaries })
    }

    pub fn dimension(&self, k: usize) -> usize {
        self.boundaries.get(k).map_or(0, |m| m.cols)
    }

    pub fn top_degree(&self) -> usize {
        self.boundaries.len().saturating_sub(1)
    }

    pub fn euler_characteristic(&self) -> i64 {
        let mut chi = 0i64;
        for k in 0..self.boundaries.len() {
            let d = self.dimension(k) as i64;
            chi += if k % 2 == 0 { d } else { -d };
        }
        chi
    }
}

/// One homology group: free rank plus invariant torsion factors (> 1, each
/// dividing the next).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Diagonal of a Smith normal form in `i128`; `None` on overflow.
fn snf_diagonal_i128(m: &IntMatrix) -> Option<Vec<i128>> {
    let mut a: Vec<Vec<i128>> =
        (0..m.rows).map(|r| (0..m.cols).map(|c| m.get(r, c)).collect()).collect();
    let rows = m.rows;
    let cols = m.cols;
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // minimal nonzero entry in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if a[r][c] != 0
                    && pivot.is_none_or(|(pr, pc)| a[r][c].abs() < a[pr][pc].abs())
                {
                    pivot = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        let mut clean = true;
        for r in t + 1..rows {
            if a[r][t] != 0 {
                let q = a[r][t].div_euclid(a[t][t]);
                for c in t..cols {
                    let sub = q.checked_mul(a[t][c])?;
                    a[r][c] = a[r][c].checked_sub(sub)?;
                }
                if a[r][t] != 0 {
                    clean = false;
                }
            }
        }
        for c in t + 1..cols {
            if a[t][c] != 0 {
                let q = a[t][c].div_euclid(a[t][t]);
                for r in t..rows {
                    let sub = q.checked_mul(a[r][t])?;
                    a[r][c] = a[r][c].checked_sub(sub)?;
                }
                if a[t][c] != 0 {
                    clean = false;
                }
            }
        }
        if clean {
            diag.push(a[t][t].abs());
            t += 1;
        }
        // otherwise a smaller remainder appeared; repeat with the same t
    }
    Some(diag)
}

/// Arbitrary-precision fallback for the same reduction.
fn snf_diagonal_big(m: &IntMatrix) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|r| (0..m.cols).map(|c| BigInt::from(m.get(r, c))).collect())
        .collect();
    let rows = m.rows;
    let cols = m.cols;
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut pivot: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if !a[r][c].is_zero() {
                    let better = match pivot {
                        None => true,
                        Some((pr, pc)) => a[r][c].abs() < a[pr][pc].abs(),
                    };
                    if better {
                        pivot = Some((r, c));
                    }
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        let mut clean = true;
        for r in t + 1..rows {
            if !a[r][t].is_zero() {
                let q = div_floor_big(&a[r][t], &a[t][t]);
                for c in t..cols {
                    let sub = &q * &a[t][c];
                    a[r][c] = &a[r][c] - sub;
                }
                if !a[r][t].is_zero() {
                    clean = false;
                }
            }
        }
        for c in t + 1..cols {
            if !a[t][c].is_zero() {
                let q = div_floor_big(&a[t][c], &a[t][t]);
                for r in t..rows {
                    let sub = &q * &a[r][t];
                    a[r][c] = &a[r][c] - sub;
                }
                if !a[t][c].is_zero() {
                    clean = false;
                }
            }
        }
        if clean {
            diag.push(a[t][t].abs());
            t += 1;
        }
    }
    diag
}

fn div_floor_big(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = (a / b, a % b);
    if r.is_zero() || (r.sign() == b.sign()) {
        q
    } else {
        q - 1
    }
}

/// Invariant factors: the SNF diagonal normalized so each divides the next.
pub fn smith_invariants(m: &IntMatrix) -> Vec<u64> {
    let mut diag: Vec<BigInt> = match snf_diagonal_i128(m) {
        Some(d) => d.into_iter().map(BigInt::from).collect(),
        None => snf_diagonal_big(m),
    };
    // enforce divisibility: diag(a, b) is equivalent to diag(gcd, lcm)
    let n = diag.len();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in i + 1..n {
                if !(&diag[j] % &diag[i]).is_zero() {
                    let g = gcd_big(diag[i].clone(), diag[j].clone());
                    let l = (&diag[i] * &diag[j]) / &g;
                    diag[i] = g;
                    diag[j] = l;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    diag.sort();
    diag.into_iter()
        .map(|d| u64::try_from(d).expect("torsion factor exceeds u64"))
        .collect()
}

fn gcd_big(mut a: BigInt, mut b: BigInt) -> BigInt {
    while !b.is_zero() {
        let r = &a % &b;
        a = std::mem::replace(&mut b, r);
    }
    a.abs()
}

/// Reduced homology groups of the complex, degrees `0 ..= top`.
pub fn reduced_homology(complex: &ChainComplex) -> Vec<HomologyGroup> {
    let top = complex.top_degree();
    let invariants: Vec<Vec<u64>> =
        complex.boundaries.iter().map(smith_invariants).collect();
    let ranks: Vec<usize> = invariants.iter().map(Vec::len).collect();
    let mut out = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let dim = complex.dimension(k);
        let rank_down = ranks[k];
        let rank_up = if k + 1 <= top { ranks[k + 1] } else { 0 };
        let rank = dim - rank_down - rank_up;
        let torsion: Vec<u64> = if k + 1 <= top {
            invariants[k + 1].iter().copied().filter(|&d| d > 1).collect()
        } else {
            Vec::new()
        };
        out.push(HomologyGroup { rank, torsion });
    }
    // cross-check against the Euler characteristic: the augmentation shifts
    // the alternating sum of Betti numbers by one
    let chi_from_betti: i64 = out
        .iter()
        .enumerate()
        .map(|(k, h)| if k % 2 == 0 { h.rank as i64 } else { -(h.rank as i64) })
        .sum();
    let chi = complex.euler_characteristic();
    assert_eq!(
        chi,
        chi_from_betti + 1,
        "Euler characteristic disagrees with Betti numbers"
    );
    out
}

/// Reduced homology of a poset's order complex; empty when the poset is.
pub fn poset_homology(poset: &FinitePoset) -> Vec<HomologyGroup> {
    if poset.is_empty() {
        return Vec::new();
    }
    reduced_homology(&poset.order_complex())
}

pub fn is_acyclic(poset: &FinitePoset) -> bool {
    !poset.is_empty() && poset_homology(poset).iter().all(HomologyGroup::is_trivial)
}

/// Direction of a comparison retraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RetractionSide {
    /// `r(x)` is always above `x`.
    Above,
    /// `r(x)` is always below `x`.
    Below,
}

/// Certify `r` as a monotone retraction of the poset onto the subset that
/// moves every element to one side.  Such a retraction is a comparison map
/// with the inclusion, so it certifies a homotopy equivalence.
pub fn certify_retraction(
    poset: &FinitePoset,
    subset: &[usize],
    r: &[usize],
    side: RetractionSide,
) -> Result<()> {
    let n = poset.len();
    if r.len() != n {
        return Err(Error::StructuralMismatch("retraction must be defined everywhere".into()));
    }
    let in_subset = {
        let mut marks = vec![false; n];
        for &s in subset {
            marks[s] = true;
        }
        marks
    };
    for x in 0..n {
        if !in_subset[r[x]] {
            return Err(Error::Invariant(format!("retraction leaves the subset at {x}")));
        }
        let ok_side = match side {
            RetractionSide::Above => poset.le(x, r[x]),
            RetractionSide::Below => poset.le(r[x], x),
        };
        if !ok_side {
            return Err(Error::Invariant(format!(
                "retraction does not stay on the {side:?} side at {x}"
            )));
        }
    }
    for &s in subset {
        if r[s] != s {
            return Err(Error::Invariant(format!("retraction moves the subset point {s}")));
        }
    }
    for x in 0..n {
        for y in 0..n {
            if poset.lt(x, y) && !poset.le(r[x], r[y]) {
                return Err(Error::Invariant(format!("retraction is not monotone at {x},{y}")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_have_a_connected_component_worth_of_reduced_h0() {
        let p = FinitePoset::new(2, |_, _| false).unwrap();
        let h = poset_homology(&p);
        assert_eq!(h[0], HomologyGroup { rank: 1, torsion: vec![] });
    }

    #[test]
    fn triangle_boundary_face_poset_is_a_circle() {
        // vertices 0,1,2 and edges 3 = {0,1}, 4 = {1,2}, 5 = {0,2}
        let contains = |e: usize, v: usize| match e {
            3 => v == 0 || v == 1,
            4 => v == 1 || v == 2,
            5 => v == 0 || v == 2,
            _ => false,
        };
        let p = FinitePoset::new(6, |i, j| i < 3 && j >= 3 && contains(j, i)).unwrap();
        let h = poset_homology(&p);
        assert!(h[0].is_trivial());
        assert_eq!(h[1], HomologyGroup { rank: 1, torsion: vec![] });
    }

    #[test]
    fn full_triangle_face_poset_is_contractible() {
        // add the top face 6 above everything
        let contains = |e: usize, v: usize| match e {
            3 => v == 0 || v == 1,
            4 => v == 1 || v == 2,
            5 => v == 0 || v == 2,
            _ => false,
        };
        let p = FinitePoset::new(7, |i, j| {
            (i < 3 && j >= 3 && j < 6 && contains(j, i)) || (j == 6 && i < 6)
        })
        .unwrap();
        assert!(is_acyclic(&p));
    }

    #[test]
    fn chain_poset_is_contractible() {
        let p = FinitePoset::new(4, |i, j| i < j).unwrap();
        assert!(is_acyclic(&p));
    }

    #[test]
    fn snf_of_a_small_matrix() {
        let m = IntMatrix::from_rows(vec![vec![2, 4], vec![6, 8]]);
        assert_eq!(smith_invariants(&m), vec![2, 4]);
        let m = IntMatrix::from_rows(vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(smith_invariants(&m), vec![1, 6]);
    }

    #[test]
    fn boundary_squares_are_rejected() {
        let d1 = IntMatrix::from_rows(vec![vec![1, 1]]);
        let d2 = IntMatrix::from_rows(vec![vec![1], vec![1]]);
        assert!(ChainComplex::new(vec![d1, d2]).is_err());
    }

    #[test]
    fn projective_plane_torsion() {
        // minimal triangulation of the projective plane: 6 vertices,
        // 15 edges, 10 faces; H_1 = Z/2 shows up in reduced degree 1
        let faces: [[usize; 3]; 10] = [
            [0, 1, 2],
            [0, 2, 3],
            [0, 3, 4],
            [0, 4, 5],
            [0, 1, 5],
            [1, 2, 4],
            [2, 4, 5],
            [2, 3, 5],
            [1, 3, 5],
            [1, 3, 4],
        ];
        let mut edges = std::collections::BTreeSet::new();
        for f in &faces {
            edges.insert([f[0], f[1]]);
            edges.insert([f[1], f[2]]);
            edges.insert([f[0], f[2]]);
        }
        let edges: Vec<[usize; 2]> = edges.into_iter().collect();
        assert_eq!(edges.len(), 15);
        // face poset: vertices < edges < faces by containment
        let n = 6 + 15 + 10;
        let p = FinitePoset::new(n, |i, j| {
            let contains_v = |e: &[usize], v: usize| e.contains(&v);
            if i < 6 && (6..21).contains(&j) {
                contains_v(&edges[j - 6], i)
            } else if i < 6 && j >= 21 {
                contains_v(&faces[j - 21], i)
            } else if (6..21).contains(&i) && j >= 21 {
                edges[i - 6].iter().all(|&v| faces[j - 21].contains(&v))
            } else {
                false
            }
        })
        .unwrap();
        let h = poset_homology(&p);
        assert!(h[0].is_trivial());
        assert_eq!(h[1], HomologyGroup { rank: 0, torsion: vec![2] });
        assert!(h[2].is_trivial());
    }
}
