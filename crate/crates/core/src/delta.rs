//! The simplex category: weakly monotone maps between finite ordinals
//! `[m] = {0, ..., m}`, plus face-closed subobjects of representables and the
//! cover predicate used by the locality arguments downstream.
//!
//! A map is written by its value list, so `"0122"` is the map `[3] -> [2]`
//! sending `0,1,2,3` to `0,1,2,2`.  A map is *sequential* when consecutive
//! values climb by at most one; every surjection is sequential.

use std::collections::BTreeSet;
use std::fmt;

use crate::{Error, Result};

/// A weakly monotone map `[src_rank] -> [dst_rank]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonotoneMap {
    pub src_rank: usize,
    pub dst_rank: usize,
    values: Vec<usize>,
}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d[{}]", self.digits())
    }
}

impl MonotoneMap {
    pub fn new(src_rank: usize, dst_rank: usize, values: Vec<usize>) -> Result<Self> {
        if values.len() != src_rank + 1 {
            return Err(Error::RankMismatch(format!(
                "expected {} values for source rank {}, got {}",
                src_rank + 1,
                src_rank,
                values.len()
            )));
        }
        if values.iter().any(|&v| v > dst_rank) {
            return Err(Error::RankMismatch(format!(
                "value out of range for target rank {dst_rank}"
            )));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::StructuralMismatch("values are not monotone".into()));
        }
        Ok(MonotoneMap { src_rank, dst_rank, values })
    }

    pub fn identity(rank: usize) -> Self {
        MonotoneMap { src_rank: rank, dst_rank: rank, values: (0..=rank).collect() }
    }

    /// The vertex `v` as a map `[0] -> [rank]`.
    pub fn vertex(v: usize, rank: usize) -> Self {
        assert!(v <= rank);
        MonotoneMap { src_rank: 0, dst_rank: rank, values: vec![v] }
    }

    /// The edge `(a, b)` as a map `[1] -> [rank]`; degenerate when `a == b`.
    pub fn edge(a: usize, b: usize, rank: usize) -> Self {
        assert!(a <= b && b <= rank);
        MonotoneMap { src_rank: 1, dst_rank: rank, values: vec![a, b] }
    }

    /// The constant map `[src_rank] -> [dst_rank]` at `v`.
    pub fn constant(src_rank: usize, v: usize, dst_rank: usize) -> Self {
        assert!(v <= dst_rank);
        MonotoneMap { src_rank, dst_rank, values: vec![v; src_rank + 1] }
    }

    pub fn value(&self, i: usize) -> usize {
        self.values[i]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn is_identity(&self) -> bool {
        self.src_rank == self.dst_rank && self.values.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// The edge spanned by the endpoints of the map.
    pub fn long_edge(&self) -> MonotoneMap {
        MonotoneMap::edge(self.values[0], self.values[self.src_rank], self.dst_rank)
    }

    /// Surjection-followed-by-injection factorization through the image.
    pub fn image_factorization(&self) -> (MonotoneMap, MonotoneMap) {
        let mut image: Vec<usize> = self.values.clone();
        image.dedup();
        let r = image.len() - 1;
        let surj_values = self
            .values
            .iter()
            .map(|v| image.iter().position(|w| w == v).unwrap())
            .collect();
        let surj = MonotoneMap { src_rank: self.src_rank, dst_rank: r, values: surj_values };
        let inj = MonotoneMap { src_rank: r, dst_rank: self.dst_rank, values: image };
        (surj, inj)
    }

    /// Value list as a digit string, e.g. `"0122"`.  Ranks stay below ten in
    /// every window this kernel builds, which keeps the encoding unambiguous.
    pub fn digits(&self) -> String {
        assert!(self.dst_rank <= 9, "digit encoding needs ranks below ten");
        self.values.iter().map(|v| char::from(b'0' + *v as u8)).collect()
    }

    /// Parse a digit string against the given target rank.
    pub fn from_digits(s: &str, dst_rank: usize) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parse { pos: 0, msg: "empty map".into() });
        }
        let mut values = Vec::with_capacity(s.len());
        for (pos, c) in s.char_indices() {
            let d = c
                .to_digit(10)
                .ok_or_else(|| Error::Parse { pos, msg: format!("expected digit, got {c:?}") })?;
            values.push(d as usize);
        }
        MonotoneMap::new(s.len() - 1, dst_rank, values)
    }
}

/// Classification flags for a monotone map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MapClass {
    pub injective: bool,
    pub surjective: bool,
    pub sequential: bool,
}

/// Injectivity, surjectivity and sequentiality of a map.
pub fn classify(f: &MonotoneMap) -> MapClass {
    let v = f.values();
    let injective = v.windows(2).all(|w| w[0] < w[1]);
    let surjective = {
        let mut hit = vec![false; f.dst_rank + 1];
        for &x in v {
            hit[x] = true;
        }
        hit.into_iter().all(|b| b)
    };
    let sequential = v.windows(2).all(|w| w[0] + 1 >= w[1]);
    MapClass { injective, surjective, sequential }
}

/// Composite `g . f` for `f: [m] -> [n]` and `g: [n] -> [p]`.
pub fn compose_delta(g: &MonotoneMap, f: &MonotoneMap) -> Result<MonotoneMap> {
    if f.dst_rank != g.src_rank {
        return Err(Error::RankMismatch(format!(
            "cannot compose [{}]->[{}] after [{}]->[{}]",
            g.src_rank, g.dst_rank, f.src_rank, f.dst_rank
        )));
    }
    Ok(MonotoneMap {
        src_rank: f.src_rank,
        dst_rank: g.dst_rank,
        values: f.values().iter().map(|&i| g.value(i)).collect(),
    })
}

/// All monotone maps `[m] -> [n]` in lexicographic order on value lists.
pub fn enumerate_delta(m: usize, n: usize) -> Vec<MonotoneMap> {
    let mut out = Vec::new();
    let mut current = vec![0usize; m + 1];
    loop {
        out.push(MonotoneMap { src_rank: m, dst_rank: n, values: current.clone() });
        // next monotone tuple in lex order
        let mut i = m + 1;
        while i > 0 {
            i -= 1;
            if current[i] < n {
                let v = current[i] + 1;
                for slot in current.iter_mut().skip(i) {
                    *slot = v;
                }
                break;
            }
            if i == 0 {
                return out;
            }
        }
    }
}

/// All injective monotone maps `[r] -> [m]`, i.e. `(r+1)`-subsets of `[m]`.
pub fn enumerate_injective(r: usize, m: usize) -> Vec<MonotoneMap> {
    enumerate_delta(r, m).into_iter().filter(|f| classify(f).injective).collect()
}

/// All interval inclusions `[p] -> [m]` (injective and sequential), every `p`.
pub fn interval_inclusions(m: usize) -> Vec<MonotoneMap> {
    let mut out = Vec::new();
    for p in 0..=m {
        for a in 0..=(m - p) {
            out.push(MonotoneMap {
                src_rank: p,
                dst_rank: m,
                values: (a..=a + p).collect(),
            });
        }
    }
    out
}

/// A face-closed set of injective maps into `[m]`: a subobject of the
/// representable presheaf on `[m]`, identified by its nondegenerate faces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplicialSubset {
    ambient_rank: usize,
    faces: BTreeSet<MonotoneMap>,
}

impl SimplicialSubset {
    /// Close the generators under precomposition with injective maps.
    pub fn from_generators(ambient_rank: usize, generators: &[MonotoneMap]) -> Result<Self> {
        let mut faces = BTreeSet::new();
        for g in generators {
            if g.dst_rank != ambient_rank {
                return Err(Error::RankMismatch(format!(
                    "generator targets [{}], ambient is [{}]",
                    g.dst_rank, ambient_rank
                )));
            }
            let g = if classify(g).injective { g.clone() } else { g.image_factorization().1 };
            // every sub-subset of the image is a face
            let image: Vec<usize> = g.values().to_vec();
            for mask in 1u32..(1 << image.len()) {
                let sub: Vec<usize> =
                    (0..image.len()).filter(|i| mask & (1 << i) != 0).map(|i| image[i]).collect();
                faces.insert(MonotoneMap {
                    src_rank: sub.len() - 1,
                    dst_rank: ambient_rank,
                    values: sub,
                });
            }
        }
        Ok(SimplicialSubset { ambient_rank, faces })
    }

    /// The full representable on `[m]`.
    pub fn full(m: usize) -> Self {
        SimplicialSubset::from_generators(m, &[MonotoneMap::identity(m)]).unwrap()
    }

    /// The spine: vertices together with the consecutive edges `(i-1, i)`.
    pub fn spine(m: usize) -> Self {
        let mut gens: Vec<MonotoneMap> = (1..=m).map(|i| MonotoneMap::edge(i - 1, i, m)).collect();
        gens.push(MonotoneMap::vertex(0, m));
        SimplicialSubset::from_generators(m, &gens).unwrap()
    }

    /// The boundary: every proper face of `[m]`.
    pub fn boundary(m: usize) -> Self {
        let gens: Vec<MonotoneMap> = enumerate_injective(m.saturating_sub(1), m);
        SimplicialSubset::from_generators(m, &gens).unwrap()
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    /// Nondegenerate faces, sorted.
    pub fn faces(&self) -> impl Iterator<Item = &MonotoneMap> {
        self.faces.iter()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Membership of an arbitrary monotone map, via its image factorization.
    pub fn contains(&self, f: &MonotoneMap) -> bool {
        assert_eq!(f.dst_rank, self.ambient_rank);
        let inj = if classify(f).injective { f.clone() } else { f.image_factorization().1 };
        self.faces.contains(&inj)
    }

    /// All monotone maps `[q] -> [m]` that land in the subset.
    pub fn elements_at(&self, q: usize) -> Vec<MonotoneMap> {
        enumerate_delta(q, self.ambient_rank).into_iter().filter(|f| self.contains(f)).collect()
    }

    pub fn is_full(&self) -> bool {
        self.contains(&MonotoneMap::identity(self.ambient_rank))
    }

    /// Cover predicate.  (i) every sequential `[1] -> [m]` lands in the
    /// subset; (ii) whenever the long edge of a monotone `g: [n] -> [m]` is in
    /// the subset, so is `g`.  Maps with `n > m` factor through their images,
    /// so checking `n <= m` decides every instance of (ii).
    pub fn is_cover(&self) -> bool {
        let m = self.ambient_rank;
        for a in 0..=m {
            if !self.contains(&MonotoneMap::vertex(a, m)) {
                return false;
            }
            if a > 0 && !self.contains(&MonotoneMap::edge(a - 1, a, m)) {
                return false;
            }
        }
        for n in 0..=m {
            for g in enumerate_delta(n, m) {
                if self.contains(&g.long_edge()) && !self.contains(&g) {
                    return false;
                }
            }
        }
        true
    }

    /// Pullback along a sequential map `d: [p] -> [m]`: the faces `c` of `[p]`
    /// with `d . c` in the subset.
    pub fn pullback_cover(&self, d: &MonotoneMap) -> Result<SimplicialSubset> {
        if d.dst_rank != self.ambient_rank {
            return Err(Error::RankMismatch("pullback map targets the wrong ordinal".into()));
        }
        if !classify(d).sequential {
            return Err(Error::StructuralMismatch(
                "pullback of a cover is only taken along sequential maps".into(),
            ));
        }
        let p = d.src_rank;
        let faces = enumerate_injective_all(p)
            .into_iter()
            .filter(|c| self.contains(&compose_delta(d, c).unwrap()))
            .collect();
        Ok(SimplicialSubset { ambient_rank: p, faces })
    }
}

/// All injective monotone maps into `[p]`, all ranks.
fn enumerate_injective_all(p: usize) -> Vec<MonotoneMap> {
    (0..=p).flat_map(|r| enumerate_injective(r, p)).collect()
}

/// Pullback of `M x N` along a jointly monic pair `(d1, d2)` out of `[p]`:
/// the faces `c` of `[p]` with `d1 . c` in `M` and `d2 . c` in `N`.
pub fn product_pullback_cover(
    d1: &MonotoneMap,
    d2: &MonotoneMap,
    m_sub: &SimplicialSubset,
    n_sub: &SimplicialSubset,
) -> Result<SimplicialSubset> {
    if d1.src_rank != d2.src_rank {
        return Err(Error::RankMismatch("the pair must share a source ordinal".into()));
    }
    if d1.dst_rank != m_sub.ambient_rank() || d2.dst_rank != n_sub.ambient_rank() {
        return Err(Error::RankMismatch("pair targets do not match the subsets".into()));
    }
    let p = d1.src_rank;
    let faces = enumerate_injective_all(p)
        .into_iter()
        .filter(|c| {
            m_sub.contains(&compose_delta(d1, c).unwrap())
                && n_sub.contains(&compose_delta(d2, c).unwrap())
        })
        .collect();
    Ok(SimplicialSubset { ambient_rank: p, faces })
}

/// Every face-closed subset of the representable on `[m]` (small `m` only:
/// the face lattice has `2^m - 1`… nondegenerate faces, and this walks all
/// subsets of that set).
pub fn all_face_closed(m: usize) -> Vec<SimplicialSubset> {
    let faces = enumerate_injective_all(m);
    let n = faces.len();
    assert!(n <= 20, "face-closed enumeration is exponential; keep m small");
    // face j of entry i: precompute closure relations
    let mut sub_of = vec![Vec::new(); n];
    for (i, f) in faces.iter().enumerate() {
        for (j, g) in faces.iter().enumerate() {
            if i != j && is_subface(g, f) {
                sub_of[i].push(j);
            }
        }
    }
    let mut out = Vec::new();
    'outer: for mask in 0u32..(1 << n) {
        for i in 0..n {
            if mask & (1 << i) != 0 {
                for &j in &sub_of[i] {
                    if mask & (1 << j) == 0 {
                        continue 'outer;
                    }
                }
            }
        }
        let set: BTreeSet<MonotoneMap> =
            (0..n).filter(|i| mask & (1 << i) != 0).map(|i| faces[i].clone()).collect();
        out.push(SimplicialSubset { ambient_rank: m, faces: set });
    }
    out
}

fn is_subface(g: &MonotoneMap, f: &MonotoneMap) -> bool {
    g.values().iter().all(|v| f.values().contains(v))
}

/// Every cover of the representable on `[m]` (exhaustive; small `m`).
pub fn all_covers(m: usize) -> Vec<SimplicialSubset> {
    all_face_closed(m).into_iter().filter(|k| k.is_cover()).collect()
}

/// All sequential maps `[p] -> [m]`.
pub fn enumerate_sequential(p: usize, m: usize) -> Vec<MonotoneMap> {
    enumerate_delta(p, m).into_iter().filter(|f| classify(f).sequential).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composes_by_value_chasing() {
        let d01 = MonotoneMap::from_digits("01", 1).unwrap();
        let d02 = MonotoneMap::from_digits("02", 2).unwrap();
        let c = compose_delta(&d02, &d01).unwrap();
        assert_eq!(c.digits(), "02");
        assert!(compose_delta(&d01, &d02).is_err());
    }

    #[test]
    fn enumerates_in_lex_order() {
        let maps = enumerate_delta(1, 1);
        let digits: Vec<String> = maps.iter().map(|f| f.digits()).collect();
        assert_eq!(digits, ["00", "01", "11"]);
        assert_eq!(enumerate_delta(2, 1).len(), 4);
        for n in 0..5 {
            assert_eq!(enumerate_delta(0, n).len(), n + 1);
        }
    }

    #[test]
    fn classifies_surjections_as_sequential() {
        let f = MonotoneMap::from_digits("0011", 1).unwrap();
        let c = classify(&f);
        assert!(!c.injective && c.surjective && c.sequential);
        let d02 = MonotoneMap::from_digits("02", 2).unwrap();
        assert!(!classify(&d02).sequential);
        assert!(classify(&MonotoneMap::identity(2)).sequential);
        // every surjection is sequential
        for f in enumerate_delta(3, 2) {
            let c = classify(&f);
            if c.surjective {
                assert!(c.sequential, "surjection {} must be sequential", f.digits());
            }
        }
    }

    #[test]
    fn spine_has_vertices_and_consecutive_edges() {
        let s = SimplicialSubset::spine(2);
        let faces: Vec<String> = s.faces().map(|f| f.digits()).collect();
        assert_eq!(faces, ["0", "1", "2", "01", "12"]);
        assert!(s.contains(&MonotoneMap::from_digits("00", 2).unwrap()));
        assert!(!s.contains(&MonotoneMap::from_digits("02", 2).unwrap()));
    }

    #[test]
    fn membership_counts_at_rank_two() {
        // the spine admits 7 of the 10 monotone self-maps of [2]; the
        // boundary admits all but the identity
        assert_eq!(SimplicialSubset::spine(2).elements_at(2).len(), 7);
        assert_eq!(SimplicialSubset::boundary(2).elements_at(2).len(), 9);
        assert_eq!(enumerate_delta(2, 2).len(), 10);
    }

    #[test]
    fn cover_predicate() {
        assert!(SimplicialSubset::full(2).is_cover());
        assert!(SimplicialSubset::spine(2).is_cover());
        assert!(SimplicialSubset::spine(3).is_cover());
        // the boundary contains the edge 02 but not the filler: rejected
        assert!(!SimplicialSubset::boundary(2).is_cover());
    }

    #[test]
    fn covers_of_small_ordinals() {
        assert_eq!(all_covers(1).len(), 1);
        assert_eq!(all_covers(2).len(), 2);
        assert_eq!(all_covers(3).len(), 5);
    }

    #[test]
    fn pullback_of_spine_along_edge_is_full() {
        let k = SimplicialSubset::spine(2);
        let d01 = MonotoneMap::from_digits("01", 2).unwrap();
        let pulled = k.pullback_cover(&d01).unwrap();
        assert_eq!(pulled, SimplicialSubset::full(1));
        assert!(pulled.is_cover());
        let d02 = MonotoneMap::from_digits("02", 2).unwrap();
        assert!(k.pullback_cover(&d02).is_err());
    }

    #[test]
    fn product_pullback_along_identity_pair() {
        let m = SimplicialSubset::spine(1);
        let n = SimplicialSubset::spine(1);
        let id = MonotoneMap::identity(1);
        let pulled = product_pullback_cover(&id, &id, &m, &n).unwrap();
        assert_eq!(pulled, SimplicialSubset::full(1));
    }

    #[test]
    fn image_factorization_splits_surjection_injection() {
        let f = MonotoneMap::from_digits("0022", 3).unwrap();
        let (s, i) = f.image_factorization();
        assert_eq!(s.digits(), "0011");
        assert_eq!(i.digits(), "02");
        assert_eq!(compose_delta(&i, &s).unwrap(), f);
    }

    #[test]
    fn interval_inclusions_are_injective_sequential() {
        let ints = interval_inclusions(3);
        assert_eq!(ints.len(), 4 + 3 + 2 + 1);
        for d in &ints {
            let c = classify(d);
            assert!(c.injective && c.sequential);
        }
    }
}
