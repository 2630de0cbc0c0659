//! Lattice paths between ordinals and the locality of the product
//! decomposition.
//!
//! A monotone lattice path from (0,0) to (m,n) with unit right, up, and
//! diagonal steps is the same thing as a jointly monic pair of surjections
//! `[p] -> [m]`, `[p] -> [n]`; the i-th visited grid point is the pair of
//! values at i.  These paths form a poset under refinement, counted by the
//! Delannoy numbers.  This module builds that poset with its categorical
//! order witness, the interval poset of a cover, and the comparison square
//! that glues a product of restricted `V` values out of path-indexed pieces.
//! Contractibility of the path posets is certified twice: by explicit
//! monotone retraction chains and by integral homology of order complexes.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::delta::{
    compose_delta, enumerate_delta, interval_inclusions, product_pullback_cover, MonotoneMap,
    SimplicialSubset,
};
use crate::homology::{certify_retraction, is_acyclic, FinitePoset, RetractionSide};
use crate::intertwine::{
    induced_from_colimit, v_act, v_factor_tables, v_tabulate, VArgs, VElement, VPresheaf,
};
use crate::presheaf::{colimit, product, DiagramArrow, FinPresheaf, PresheafMap};
use crate::window::Window;
use crate::{Error, Result};

/// A lattice path from (0,0) to (m,n), stored as the jointly monic pair of
/// surjections listing the visited grid points in order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QObject {
    pub d1: MonotoneMap,
    pub d2: MonotoneMap,
    points: u64,
}

impl std::fmt::Debug for QObject {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "q[{}]", self.step_word())
    }
}

fn point_bit(x: usize, y: usize, n: usize) -> u64 {
    1u64 << (x * (n + 1) + y)
}

impl QObject {
    /// Build from the list of visited points, validating the step shape.
    pub fn from_points(m: usize, n: usize, pts: &[(usize, usize)]) -> Result<QObject> {
        if (m + 1) * (n + 1) > 64 {
            return Err(Error::StructuralMismatch("grid too large for a path mask".into()));
        }
        if pts.first() != Some(&(0, 0)) || pts.last() != Some(&(m, n)) {
            return Err(Error::StructuralMismatch("path must run from (0,0) to (m,n)".into()));
        }
        for w in pts.windows(2) {
            let dx = w[1].0 as i64 - w[0].0 as i64;
            let dy = w[1].1 as i64 - w[0].1 as i64;
            if !matches!((dx, dy), (1, 0) | (0, 1) | (1, 1)) {
                return Err(Error::StructuralMismatch("steps must be unit R, U, or D".into()));
            }
        }
        let p = pts.len() - 1;
        let d1 = MonotoneMap::new(p, m, pts.iter().map(|&(x, _)| x).collect())?;
        let d2 = MonotoneMap::new(p, n, pts.iter().map(|&(_, y)| y).collect())?;
        let mut points = 0u64;
        for &(x, y) in pts {
            points |= point_bit(x, y, n);
        }
        Ok(QObject { d1, d2, points })
    }

    /// Number of steps; the path visits this plus one points.
    pub fn steps(&self) -> usize {
        self.d1.src_rank
    }

    pub fn m(&self) -> usize {
        self.d1.dst_rank
    }

    pub fn n(&self) -> usize {
        self.d2.dst_rank
    }

    pub fn point(&self, i: usize) -> (usize, usize) {
        (self.d1.value(i), self.d2.value(i))
    }

    pub fn points_mask(&self) -> u64 {
        self.points
    }

    pub fn contains_point(&self, x: usize, y: usize) -> bool {
        self.points & point_bit(x, y, self.n()) != 0
    }

    /// The step word in letters R, U, D.
    pub fn step_word(&self) -> String {
        let mut w = String::new();
        for i in 0..self.steps() {
            let dx = self.d1.value(i + 1) - self.d1.value(i);
            let dy = self.d2.value(i + 1) - self.d2.value(i);
            w.push(match (dx, dy) {
                (1, 0) => 'R',
                (0, 1) => 'U',
                _ => 'D',
            });
        }
        w
    }
}

/// All paths from (0,0) to (m,n), in depth-first order trying R, U, D.
pub fn enumerate_q(m: usize, n: usize) -> Result<Vec<QObject>> {
    let mut out = Vec::new();
    let mut pts: Vec<(usize, usize)> = vec![(0, 0)];
    fn walk(
        m: usize,
        n: usize,
        pts: &mut Vec<(usize, usize)>,
        out: &mut Vec<QObject>,
    ) -> Result<()> {
        let &(x, y) = pts.last().expect("the walk starts at the origin");
        if (x, y) == (m, n) {
            out.push(QObject::from_points(m, n, pts)?);
            return Ok(());
        }
        let mut step = |nx: usize, ny: usize| -> Result<()> {
            pts.push((nx, ny));
            walk(m, n, pts, out)?;
            pts.pop();
            Ok(())
        };
        if x < m {
            step(x + 1, y)?;
        }
        if y < n {
            step(x, y + 1)?;
        }
        if x < m && y < n {
            step(x + 1, y + 1)?;
        }
        Ok(())
    }
    walk(m, n, &mut pts, &mut out)?;
    Ok(out)
}

/// Delannoy numbers by the standard three-term recurrence.
pub fn delannoy(m: usize, n: usize) -> u64 {
    let mut table = vec![vec![0u64; n + 1]; m + 1];
    for x in 0..=m {
        for y in 0..=n {
            table[x][y] = if x == 0 || y == 0 {
                1
            } else {
                table[x - 1][y] + table[x][y - 1] + table[x - 1][y - 1]
            };
        }
    }
    table[m][n]
}

/// The refinement witness: the unique monotone map reindexing `a` into `b`
/// so that both coordinate triangles commute.  It exists exactly when every
/// point of `a` lies on `b`, and is unique because the points of `b` are
/// distinct, so positions are forced.
pub fn q_witness(a: &QObject, b: &QObject) -> Option<MonotoneMap> {
    let mut values = Vec::with_capacity(a.steps() + 1);
    for i in 0..=a.steps() {
        let target = a.point(i);
        let pos = (0..=b.steps()).find(|&j| b.point(j) == target)?;
        values.push(pos);
    }
    let gamma = MonotoneMap::new(a.steps(), b.steps(), values)
        .expect("positions along a path are strictly increasing");
    let t1 = compose_delta(&b.d1, &gamma).expect("ranks agree by construction");
    let t2 = compose_delta(&b.d2, &gamma).expect("ranks agree by construction");
    assert!(t1 == a.d1 && t2 == a.d2, "witness triangles must commute");
    Some(gamma)
}

/// The poset of all paths from (0,0) to (m,n), ordered by existence of a
/// refinement witness.
pub struct QPoset {
    pub m: usize,
    pub n: usize,
    pub objects: Vec<QObject>,
    pub poset: FinitePoset,
    mask_index: HashMap<u64, usize>,
}

impl QPoset {
    pub fn index_of_mask(&self, mask: u64) -> Result<usize> {
        self.mask_index
            .get(&mask)
            .copied()
            .ok_or_else(|| Error::Invariant("no path visits exactly that point set".into()))
    }
}

pub fn q_poset(m: usize, n: usize) -> Result<QPoset> {
    let objects = enumerate_q(m, n)?;
    let poset =
        FinitePoset::new(objects.len(), |i, j| i != j && q_witness(&objects[i], &objects[j]).is_some())?;
    let mask_index = objects.iter().enumerate().map(|(i, q)| (q.points, i)).collect();
    Ok(QPoset { m, n, objects, poset, mask_index })
}

/// The point mask of a jointly weakly monotone pair of simplex maps.
pub fn alpha_mask(a1: &MonotoneMap, a2: &MonotoneMap, n: usize) -> Result<u64> {
    if a1.src_rank != a2.src_rank {
        return Err(Error::RankMismatch("the two halves must share a source".into()));
    }
    let mut mask = 0u64;
    for i in 0..=a1.src_rank {
        mask |= point_bit(a1.value(i), a2.value(i), n);
    }
    Ok(mask)
}

/// Indices of the paths whose point set contains the given mask.
pub fn q_alpha_indices(qp: &QPoset, mask: u64) -> Vec<usize> {
    (0..qp.objects.len()).filter(|&i| mask & !qp.objects[i].points == 0).collect()
}

/// Whether the induced subposet on the given indices is nonempty and
/// connected as a zigzag of comparabilities.
pub fn nonempty_connected(poset: &FinitePoset, keep: &[usize]) -> bool {
    if keep.is_empty() {
        return false;
    }
    let mut parent: Vec<usize> = (0..keep.len()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..keep.len() {
        for j in i + 1..keep.len() {
            if poset.le(keep[i], keep[j]) || poset.le(keep[j], keep[i]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let root = find(&mut parent, 0);
    (0..keep.len()).all(|i| find(&mut parent, i) == root)
}

/// The induced subposet on a list of indices.
pub fn subposet(poset: &FinitePoset, keep: &[usize]) -> Result<FinitePoset> {
    FinitePoset::new(keep.len(), |i, j| poset.lt(keep[i], keep[j]))
}

/// The shape of the paths-through-fixed-points poset: one Delannoy factor
/// per gap between consecutive required points.
pub struct AlphaProductReport {
    pub factor_shapes: Vec<(usize, usize)>,
    pub size: usize,
    pub bijective: bool,
    pub order_iso: bool,
}

/// Check that the subposet of paths through all points of `(a1, a2)` is the
/// product of the Delannoy posets of the gaps between consecutive required
/// points, as an order isomorphism.  Repeated points are collapsed first.
pub fn check_alpha_product(
    qp: &QPoset,
    a1: &MonotoneMap,
    a2: &MonotoneMap,
) -> Result<AlphaProductReport> {
    if a1.dst_rank != qp.m || a2.dst_rank != qp.n || a1.src_rank != a2.src_rank {
        return Err(Error::RankMismatch("constraint maps must match the grid".into()));
    }
    let mut joints: Vec<(usize, usize)> = vec![(0, 0)];
    for i in 0..=a1.src_rank {
        let pt = (a1.value(i), a2.value(i));
        if *joints.last().expect("joints start nonempty") != pt {
            joints.push(pt);
        }
    }
    if *joints.last().expect("joints stay nonempty") != (qp.m, qp.n) {
        joints.push((qp.m, qp.n));
    }
    let mut factor_shapes = Vec::new();
    let mut factors: Vec<Vec<QObject>> = Vec::new();
    for w in joints.windows(2) {
        let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
        factor_shapes.push((dx, dy));
        factors.push(enumerate_q(dx, dy)?);
    }
    let keep = q_alpha_indices(qp, alpha_mask(a1, a2, qp.n)?);
    let sub = subposet(&qp.poset, &keep)?;
    let local: HashMap<usize, usize> = keep.iter().enumerate().map(|(l, &g)| (g, l)).collect();

    // assemble each tuple of gap paths into one global path
    let sizes: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let count: usize = sizes.iter().product();
    let mut assembled: Vec<usize> = Vec::with_capacity(count);
    let mut tuples: Vec<Vec<usize>> = Vec::with_capacity(count);
    for flat in 0..count {
        let mut rest = flat;
        let mut choice = vec![0usize; sizes.len()];
        for j in (0..sizes.len()).rev() {
            choice[j] = rest % sizes[j];
            rest /= sizes[j];
        }
        let mut pts = vec![(0usize, 0usize)];
        for (j, &c) in choice.iter().enumerate() {
            let seg = &factors[j][c];
            for s in 1..=seg.steps() {
                let (sx, sy) = seg.point(s);
                pts.push((joints[j].0 + sx, joints[j].1 + sy));
            }
        }
        let path = QObject::from_points(qp.m, qp.n, &pts)?;
        let global = qp.index_of_mask(path.points_mask())?;
        let l = *local
            .get(&global)
            .ok_or_else(|| Error::Invariant("assembled path misses a required point".into()))?;
        assembled.push(l);
        tuples.push(choice);
    }
    let mut hit = vec![false; keep.len()];
    let mut bijective = count == keep.len();
    for &l in &assembled {
        if hit[l] {
            bijective = false;
        }
        hit[l] = true;
    }
    bijective = bijective && hit.iter().all(|&h| h);

    let mut order_iso = bijective;
    'pairs: for s in 0..count {
        for t in 0..count {
            let comp = (0..sizes.len()).all(|j| {
                let ps = &factors[j][tuples[s][j]];
                let pt = &factors[j][tuples[t][j]];
                ps.points_mask() & !pt.points_mask() == 0
            });
            if comp != sub.le(assembled[s], assembled[t]) {
                order_iso = false;
                break 'pairs;
            }
        }
    }
    Ok(AlphaProductReport { factor_shapes, size: count, bijective, order_iso })
}

/// One stage of the contracting chain: the sizes of the poset before and
/// after forbidding the next top-row point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetractionStage {
    pub k: usize,
    pub x_size: usize,
    pub y_size: usize,
}

pub struct RetractionChainReport {
    pub stages: Vec<RetractionStage>,
    pub x_final_size: usize,
    pub x_final_acyclic: bool,
    pub lower_delannoy: u64,
}

/// Contract the full path poset by certified monotone retractions: stage k
/// first straightens the diagonal step into (k,n) (moving up in the order),
/// then deletes the visit to (k,n) (moving down), landing in the poset of
/// paths that avoid (i,n) for i <= k.  The terminal stage is checked acyclic
/// by homology.  The report also carries the Delannoy count one row down,
/// which the final stage is generally not isomorphic to.
pub fn retraction_chain(m: usize, n: usize) -> Result<RetractionChainReport> {
    if n == 0 {
        return Err(Error::StructuralMismatch(
            "the chain forbids top-row points, so the grid needs a positive height".into(),
        ));
    }
    let qp = q_poset(m, n)?;
    let forbid = |k: usize| -> u64 {
        let mut mask = 0u64;
        for i in 0..k {
            mask |= point_bit(i, n, n);
        }
        mask
    };
    let x_keep = |k: usize| -> Vec<usize> {
        (0..qp.objects.len()).filter(|&i| qp.objects[i].points & forbid(k) == 0).collect()
    };
    let has_diag_into = |q: &QObject, k: usize| -> bool {
        k >= 1
            && (0..q.steps()).any(|i| q.point(i) == (k - 1, n - 1) && q.point(i + 1) == (k, n))
    };
    let reindex = |pts: Vec<(usize, usize)>| -> Result<usize> {
        let path = QObject::from_points(m, n, &pts)?;
        qp.index_of_mask(path.points_mask())
    };
    let mut stages = Vec::new();
    for k in 0..m {
        let xk = x_keep(k);
        let x_poset = subposet(&qp.poset, &xk)?;
        let x_local: HashMap<usize, usize> = xk.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let y_local: Vec<usize> = (0..xk.len())
            .filter(|&l| !has_diag_into(&qp.objects[xk[l]], k))
            .collect();
        let mut r = Vec::with_capacity(xk.len());
        for &g in &xk {
            let q = &qp.objects[g];
            if has_diag_into(q, k) {
                let mut pts: Vec<(usize, usize)> = (0..=q.steps()).map(|i| q.point(i)).collect();
                let at = (0..q.steps())
                    .find(|&i| q.point(i) == (k - 1, n - 1) && q.point(i + 1) == (k, n))
                    .expect("the diagonal step was just detected");
                pts.insert(at + 1, (k, n - 1));
                r.push(x_local[&reindex(pts)?]);
            } else {
                r.push(x_local[&g]);
            }
        }
        certify_retraction(&x_poset, &y_local, &r, RetractionSide::Above)?;

        let yk: Vec<usize> = y_local.iter().map(|&l| xk[l]).collect();
        let y_poset = subposet(&qp.poset, &yk)?;
        let y_index: HashMap<usize, usize> = yk.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let x_next: Vec<usize> = (0..yk.len())
            .filter(|&l| !qp.objects[yk[l]].contains_point(k, n))
            .collect();
        let mut r1 = Vec::with_capacity(yk.len());
        for &g in &yk {
            let q = &qp.objects[g];
            if q.contains_point(k, n) {
                let pts: Vec<(usize, usize)> =
                    (0..=q.steps()).map(|i| q.point(i)).filter(|&pt| pt != (k, n)).collect();
                r1.push(y_index[&reindex(pts)?]);
            } else {
                r1.push(y_index[&g]);
            }
        }
        certify_retraction(&y_poset, &x_next, &r1, RetractionSide::Below)?;
        stages.push(RetractionStage { k, x_size: xk.len(), y_size: yk.len() });
    }
    let x_final = x_keep(m);
    let x_final_poset = subposet(&qp.poset, &x_final)?;
    Ok(RetractionChainReport {
        stages,
        x_final_size: x_final.len(),
        x_final_acyclic: is_acyclic(&x_final_poset),
        lower_delannoy: delannoy(m, n - 1),
    })
}

/// The poset of interval inclusions whose image face lies in a face-closed
/// subset, ordered by containment of intervals.
pub struct PKPoset {
    pub intervals: Vec<MonotoneMap>,
    pub poset: FinitePoset,
}

pub fn build_p_k(k: &SimplicialSubset) -> Result<PKPoset> {
    let intervals: Vec<MonotoneMap> = interval_inclusions(k.ambient_rank())
        .into_iter()
        .filter(|d| k.contains(d))
        .collect();
    let poset = FinitePoset::new(intervals.len(), |i, j| {
        let (di, dj) = (&intervals[i], &intervals[j]);
        i != j
            && dj.value(0) <= di.value(0)
            && di.value(di.src_rank) <= dj.value(dj.src_rank)
    })?;
    Ok(PKPoset { intervals, poset })
}

/// Both gluing identities over the interval poset of a cover.
pub struct PkReport {
    /// The spine-restricted pieces glue to the spine-restricted total value.
    pub spine_ok: bool,
    /// The unrestricted pieces glue to the value restricted to the cover.
    pub cover_ok: bool,
}

fn interval_embedding(inner: &MonotoneMap, outer: &MonotoneMap) -> Result<MonotoneMap> {
    let off = inner.value(0) - outer.value(0);
    MonotoneMap::new(inner.src_rank, outer.src_rank, (off..=off + inner.src_rank).collect())
}

fn glue_intervals(
    window: &Arc<Window>,
    args: &VArgs,
    pk: &PKPoset,
    node_restrict: &dyn Fn(&MonotoneMap) -> Result<Option<SimplicialSubset>>,
    target_restrict: &SimplicialSubset,
) -> Result<bool> {
    let objs = window.len();
    let mut nodes = Vec::with_capacity(pk.intervals.len());
    for d in &pk.intervals {
        let restrict = node_restrict(d)?;
        let piece = v_tabulate(window, &args.slice(d.value(0), d.src_rank), restrict.as_ref())?;
        nodes.push(piece);
    }
    let node_refs: Vec<&FinPresheaf> = nodes.iter().map(|p| &p.presheaf).collect();
    let mut arrows = Vec::new();
    for i in 0..pk.intervals.len() {
        for j in 0..pk.intervals.len() {
            if !pk.poset.lt(i, j) {
                continue;
            }
            let iota = interval_embedding(&pk.intervals[i], &pk.intervals[j])?;
            let mut maps = Vec::with_capacity(objs);
            for o in 0..objs {
                maps.push(
                    nodes[i].elements[o]
                        .iter()
                        .map(|x| {
                            let y = VElement {
                                delta: compose_delta(&iota, &x.delta)?,
                                factors: x.factors.clone(),
                            };
                            nodes[j].element_index(o, &y)
                        })
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            arrows.push(DiagramArrow { src: i, dst: j, map: PresheafMap { maps } });
        }
    }
    let (colim, cocone) = colimit(&node_refs, &arrows)?;
    let target = v_tabulate(window, args, Some(target_restrict))?;
    let mut legs = Vec::with_capacity(pk.intervals.len());
    for (ni, d) in pk.intervals.iter().enumerate() {
        let mut maps = Vec::with_capacity(objs);
        for o in 0..objs {
            maps.push(
                nodes[ni].elements[o]
                    .iter()
                    .map(|x| {
                        let y = VElement {
                            delta: compose_delta(d, &x.delta)?,
                            factors: x.factors.clone(),
                        };
                        target.element_index(o, &y)
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        legs.push(PresheafMap { maps });
    }
    let induced = induced_from_colimit(&colim, &cocone, &node_refs, &target.presheaf, &legs)?;
    Ok(induced.is_bijective(&colim, &target.presheaf))
}

/// Glue interval pieces over the cover poset in both regimes: pieces cut to
/// their spines against the spine of the whole ordinal, and full pieces
/// against the cover itself.
pub fn p_k_identities(
    window: &Arc<Window>,
    args: &VArgs,
    k: &SimplicialSubset,
) -> Result<PkReport> {
    let m = args.len();
    if k.ambient_rank() != m {
        return Err(Error::RankMismatch("cover must live on the argument ordinal".into()));
    }
    let pk = build_p_k(k)?;
    let spine = SimplicialSubset::spine(m);
    let spine_ok = glue_intervals(
        window,
        args,
        &pk,
        &|d| Ok(Some(SimplicialSubset::spine(m).pullback_cover(d)?)),
        &spine,
    )?;
    let cover_ok = glue_intervals(window, args, &pk, &|_| Ok(None), k)?;
    Ok(PkReport { spine_ok, cover_ok })
}

/// An element of a path-indexed piece of the comparison square: a simplex
/// map into the path ordinal together with the two projected factor tables.
/// The two `VElement` halves carry the composites with the path coordinates
/// as their simplex maps.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QVElement {
    pub gamma: MonotoneMap,
    pub a_elem: VElement,
    pub b_elem: VElement,
}

impl QVElement {
    pub fn label(&self) -> String {
        format!("g{}|{}|{}", self.gamma.digits(), self.a_elem.label(), self.b_elem.label())
    }
}

/// A tabulated path-indexed piece.
pub struct QNodePresheaf {
    pub presheaf: FinPresheaf,
    pub elements: Vec<Vec<QVElement>>,
    index: Vec<HashMap<QVElement, usize>>,
}

impl QNodePresheaf {
    pub fn element_index(&self, obj: usize, x: &QVElement) -> Result<usize> {
        self.index[obj].get(x).copied().ok_or_else(|| {
            Error::Invariant(format!("element {x:?} missing from the tabulated piece"))
        })
    }
}

/// Tabulate the piece of the comparison square attached to one path: maps
/// into the path ordinal, optionally restricted to a face-closed subset,
/// with the factor tables of both projected simplex maps.
pub fn q_node_tabulate(
    window: &Arc<Window>,
    q: &QObject,
    a_args: &VArgs,
    b_args: &VArgs,
    restrict: Option<&SimplicialSubset>,
) -> Result<QNodePresheaf> {
    let p = q.steps();
    if let Some(k) = restrict {
        if k.ambient_rank() != p {
            return Err(Error::RankMismatch("restriction must live on the path ordinal".into()));
        }
    }
    let objs = window.len();
    let mut elements: Vec<Vec<QVElement>> = Vec::with_capacity(objs);
    for t in window.objects() {
        let mut elems = Vec::new();
        for gamma in enumerate_delta(t.width(), p) {
            if let Some(k) = restrict {
                if !k.contains(&gamma) {
                    continue;
                }
            }
            let alpha1 = compose_delta(&q.d1, &gamma)?;
            let alpha2 = compose_delta(&q.d2, &gamma)?;
            for af in v_factor_tables(a_args, t, &alpha1)? {
                for bf in v_factor_tables(b_args, t, &alpha2)? {
                    elems.push(QVElement {
                        gamma: gamma.clone(),
                        a_elem: VElement { delta: alpha1.clone(), factors: af.clone() },
                        b_elem: VElement { delta: alpha2.clone(), factors: bf },
                    });
                }
            }
        }
        elements.push(elems);
    }
    let index: Vec<HashMap<QVElement, usize>> = elements
        .iter()
        .map(|elems| elems.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect())
        .collect();
    let sets: Vec<Vec<String>> =
        elements.iter().map(|elems| elems.iter().map(QVElement::label).collect()).collect();
    let mut actions = vec![vec![Vec::new(); objs]; objs];
    // When every argument is a singleton at every child object the factor
    // data is constant, elements are exactly the surviving simplex maps, and
    // the action is composition of those maps alone.
    let singleton = match a_args.child_window().or_else(|| b_args.child_window()) {
        Some(cw) => (0..cw.len()).all(|o| {
            (1..=a_args.len()).all(|j| a_args.arg(j).size(o) == 1)
                && (1..=b_args.len()).all(|j| b_args.arg(j).size(o) == 1)
        }),
        None => true,
    };
    if singleton {
        let gamma_rank: Vec<HashMap<Vec<usize>, usize>> = elements
            .iter()
            .map(|elems| {
                elems.iter().enumerate().map(|(i, x)| (x.gamma.values().to_vec(), i)).collect()
            })
            .collect();
        let mut scratch = Vec::new();
        for a in 0..objs {
            for b in 0..objs {
                for f in window.hom(a, b) {
                    let table = elements[b]
                        .iter()
                        .map(|x| {
                            scratch.clear();
                            scratch.extend(f.delta.values().iter().map(|&i| x.gamma.value(i)));
                            gamma_rank[a].get(scratch.as_slice()).copied().ok_or_else(|| {
                                Error::Invariant(
                                    "piece action left the subset; restriction not face closed"
                                        .into(),
                                )
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    actions[a][b].push(table);
                }
            }
        }
    } else {
        for a in 0..objs {
            for b in 0..objs {
                for f in window.hom(a, b) {
                    let table = elements[b]
                        .iter()
                        .map(|x| {
                            let y = QVElement {
                                gamma: compose_delta(&x.gamma, &f.delta)?,
                                a_elem: v_act(a_args, f, &x.a_elem)?,
                                b_elem: v_act(b_args, f, &x.b_elem)?,
                            };
                            index[a].get(&y).copied().ok_or_else(|| {
                                Error::Invariant(
                                    "piece action left the subset; restriction not face closed"
                                        .into(),
                                )
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    actions[a][b].push(table);
                }
            }
        }
    }
    let presheaf = FinPresheaf::new(Arc::clone(window), sets, actions, false)?;
    Ok(QNodePresheaf { presheaf, elements, index })
}

/// The verdict on the comparison square for one pair of covers.
#[derive(Debug, Clone, Copy)]
pub struct MainSquareReport {
    pub path_count: usize,
    /// The unrestricted pieces glue to the product of the full values.
    pub bottom_bijective: bool,
    /// The cover-restricted pieces glue to the product of the restricted
    /// values.
    pub top_bijective: bool,
    /// The two gluings commute with the inclusions.
    pub square_commutes: bool,
    /// The connectivity reduction predicts the bottom gluing.
    pub alpha_bottom: bool,
    /// The connectivity reduction predicts the top gluing.
    pub alpha_top: bool,
    pub routes_agree: bool,
}

fn pair_indices(
    prod: &FinPresheaf,
    p1: &PresheafMap,
    p2: &PresheafMap,
) -> Vec<HashMap<(usize, usize), usize>> {
    (0..prod.window().len())
        .map(|o| (0..prod.size(o)).map(|z| ((p1.apply(o, z), p2.apply(o, z)), z)).collect())
        .collect()
}

fn square_legs(
    window: &Arc<Window>,
    nodes: &[QNodePresheaf],
    va: &VPresheaf,
    vb: &VPresheaf,
    pair: &[HashMap<(usize, usize), usize>],
) -> Result<Vec<PresheafMap>> {
    let objs = window.len();
    let mut legs = Vec::with_capacity(nodes.len());
    for node in nodes {
        let mut maps = Vec::with_capacity(objs);
        for o in 0..objs {
            maps.push(
                node.elements[o]
                    .iter()
                    .map(|x| {
                        let ai = va.element_index(o, &x.a_elem)?;
                        let bi = vb.element_index(o, &x.b_elem)?;
                        pair[o].get(&(ai, bi)).copied().ok_or_else(|| {
                            Error::Invariant("pair missing from the tabulated product".into())
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        legs.push(PresheafMap { maps });
    }
    Ok(legs)
}

/// The connectivity reduction: the gluing over the path poset is objectwise
/// bijective exactly when, for every pair of simplex maps out of a width in
/// the window, the paths through all their points form a nonempty connected
/// subposet.  Point sets are deduplicated before checking.
fn alpha_flags(
    qp: &QPoset,
    window: &Arc<Window>,
    pairs: &[(&SimplicialSubset, &SimplicialSubset)],
) -> Result<(bool, Vec<bool>)> {
    let widths: BTreeSet<usize> = window.objects().iter().map(|t| t.width()).collect();
    let mut cache: HashMap<u64, bool> = HashMap::new();
    let mut bottom = true;
    let mut top = vec![true; pairs.len()];
    for qw in widths {
        for a1 in enumerate_delta(qw, qp.m) {
            for a2 in enumerate_delta(qw, qp.n) {
                let mask = alpha_mask(&a1, &a2, qp.n)?;
                let good = *cache.entry(mask).or_insert_with(|| {
                    nonempty_connected(&qp.poset, &q_alpha_indices(qp, mask))
                });
                if !good {
                    bottom = false;
                    for (i, &(mk, nk)) in pairs.iter().enumerate() {
                        if mk.contains(&a1) && nk.contains(&a2) {
                            top[i] = false;
                        }
                    }
                }
            }
        }
    }
    Ok((bottom, top))
}

/// Build and verify comparison squares for a family of cover pairs over one
/// argument family: the bottom gluing onto the full product, the top gluing
/// onto the product of cover-restricted values, commutation with the
/// inclusions, and agreement with the independent connectivity reduction.
/// The cover-independent bottom row is tabulated once and shared.
pub fn check_main_square_suite(
    window: &Arc<Window>,
    a_args: &VArgs,
    b_args: &VArgs,
    pairs: &[(&SimplicialSubset, &SimplicialSubset)],
) -> Result<Vec<MainSquareReport>> {
    let m = a_args.len();
    let n = b_args.len();
    for &(m_cover, n_cover) in pairs {
        if m_cover.ambient_rank() != m || n_cover.ambient_rank() != n {
            return Err(Error::RankMismatch("covers must live on the argument ordinals".into()));
        }
    }
    let qp = q_poset(m, n)?;

    let va_full = v_tabulate(window, a_args, None)?;
    let vb_full = v_tabulate(window, b_args, None)?;
    let (prod_full, pa_full, pb_full) = product(&va_full.presheaf, &vb_full.presheaf)?;
    let pair_full = pair_indices(&prod_full, &pa_full, &pb_full);

    let mut bottom_nodes = Vec::with_capacity(qp.objects.len());
    for q in &qp.objects {
        bottom_nodes.push(q_node_tabulate(window, q, a_args, b_args, None)?);
    }
    let objs = window.len();
    let arrows_for = |nodes: &[QNodePresheaf]| -> Result<Vec<DiagramArrow>> {
        let mut arrows = Vec::new();
        for i in 0..qp.objects.len() {
            for j in 0..qp.objects.len() {
                if !qp.poset.lt(i, j) {
                    continue;
                }
                // skip composites: identifications are generated by the
                // covering relations of the path poset
                if (0..qp.objects.len()).any(|k| qp.poset.lt(i, k) && qp.poset.lt(k, j)) {
                    continue;
                }
                let w = q_witness(&qp.objects[i], &qp.objects[j])
                    .ok_or_else(|| Error::Invariant("order without witness".into()))?;
                let mut maps = Vec::with_capacity(objs);
                for o in 0..objs {
                    maps.push(
                        nodes[i].elements[o]
                            .iter()
                            .map(|x| {
                                let y = QVElement {
                                    gamma: compose_delta(&w, &x.gamma)?,
                                    a_elem: x.a_elem.clone(),
                                    b_elem: x.b_elem.clone(),
                                };
                                nodes[j].element_index(o, &y)
                            })
                            .collect::<Result<Vec<_>>>()?,
                    );
                }
                arrows.push(DiagramArrow { src: i, dst: j, map: PresheafMap { maps } });
            }
        }
        Ok(arrows)
    };

    let bottom_refs: Vec<&FinPresheaf> = bottom_nodes.iter().map(|x| &x.presheaf).collect();
    let (bottom_colim, bottom_cocone) = colimit(&bottom_refs, &arrows_for(&bottom_nodes)?)?;
    let bottom_legs = square_legs(window, &bottom_nodes, &va_full, &vb_full, &pair_full)?;
    let f = induced_from_colimit(
        &bottom_colim,
        &bottom_cocone,
        &bottom_refs,
        &prod_full,
        &bottom_legs,
    )?;
    let bottom_bijective = f.is_bijective(&bottom_colim, &prod_full);
    let (alpha_bottom, alpha_tops) = alpha_flags(&qp, window, pairs)?;

    let mut reports = Vec::with_capacity(pairs.len());
    for (pi, &(m_cover, n_cover)) in pairs.iter().enumerate() {
        let va_m = v_tabulate(window, a_args, Some(m_cover))?;
        let vb_n = v_tabulate(window, b_args, Some(n_cover))?;
        let (prod_top, pa_top, pb_top) = product(&va_m.presheaf, &vb_n.presheaf)?;
        let pair_top = pair_indices(&prod_top, &pa_top, &pb_top);
        let mut top_nodes = Vec::with_capacity(qp.objects.len());
        for q in &qp.objects {
            let kq = product_pullback_cover(&q.d1, &q.d2, m_cover, n_cover)?;
            top_nodes.push(q_node_tabulate(window, q, a_args, b_args, Some(&kq))?);
        }
        let top_refs: Vec<&FinPresheaf> = top_nodes.iter().map(|x| &x.presheaf).collect();
        let (top_colim, top_cocone) = colimit(&top_refs, &arrows_for(&top_nodes)?)?;
        let top_legs = square_legs(window, &top_nodes, &va_m, &vb_n, &pair_top)?;
        let f_top =
            induced_from_colimit(&top_colim, &top_cocone, &top_refs, &prod_top, &top_legs)?;

        // g: include the restricted product into the full one
        let mut g_maps = Vec::with_capacity(objs);
        for o in 0..objs {
            g_maps.push(
                (0..prod_top.size(o))
                    .map(|z| {
                        let ai =
                            va_full.element_index(o, &va_m.elements[o][pa_top.apply(o, z)])?;
                        let bi =
                            vb_full.element_index(o, &vb_n.elements[o][pb_top.apply(o, z)])?;
                        pair_full[o].get(&(ai, bi)).copied().ok_or_else(|| {
                            Error::Invariant("pair missing from the tabulated product".into())
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let g = PresheafMap::new(&prod_top, &prod_full, g_maps)?;

        // g': include each restricted piece into the full one, then glue
        let mut incl_legs = Vec::with_capacity(qp.objects.len());
        for (qi, node) in top_nodes.iter().enumerate() {
            let mut maps = Vec::with_capacity(objs);
            for o in 0..objs {
                maps.push(
                    node.elements[o]
                        .iter()
                        .map(|x| {
                            let full_idx = bottom_nodes[qi].element_index(o, x)?;
                            Ok(bottom_cocone[qi].apply(o, full_idx))
                        })
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            incl_legs.push(PresheafMap { maps });
        }
        let g_prime =
            induced_from_colimit(&top_colim, &top_cocone, &top_refs, &bottom_colim, &incl_legs)?;

        let top_bijective = f_top.is_bijective(&top_colim, &prod_top);
        let square_commutes = f.after(&g_prime) == g.after(&f_top);
        let alpha_top = alpha_tops[pi];
        reports.push(MainSquareReport {
            path_count: qp.objects.len(),
            bottom_bijective,
            top_bijective,
            square_commutes,
            alpha_bottom,
            alpha_top,
            routes_agree: alpha_bottom == bottom_bijective && alpha_top == top_bijective,
        });
    }
    Ok(reports)
}

/// Build and verify the comparison square for one pair of covers.
pub fn check_main_square(
    window: &Arc<Window>,
    a_args: &VArgs,
    b_args: &VArgs,
    m_cover: &SimplicialSubset,
    n_cover: &SimplicialSubset,
) -> Result<MainSquareReport> {
    let mut reports = check_main_square_suite(window, a_args, b_args, &[(m_cover, n_cover)])?;
    Ok(reports.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta::all_covers;
    use crate::presheaf::{random_presheaf, FinPresheaf};
    use crate::theta::ThetaObject;
    use crate::window::Window;

    fn words(objects: &[QObject], keep: &[usize]) -> BTreeSet<String> {
        keep.iter().map(|&i| objects[i].step_word()).collect()
    }

    #[test]
    fn delannoy_counts_pin_enumeration() {
        assert_eq!(delannoy(1, 1), 3);
        assert_eq!(delannoy(2, 2), 13);
        assert_eq!(delannoy(3, 3), 63);
        assert_eq!(delannoy(4, 4), 321);
        assert_eq!(delannoy(6, 6), 8989);
        for m in 0..=3 {
            for n in 0..=3 {
                assert_eq!(enumerate_q(m, n).unwrap().len() as u64, delannoy(m, n));
            }
        }
        assert_eq!(enumerate_q(4, 4).unwrap().len(), 321);
        for m in 0..=4 {
            assert_eq!(enumerate_q(m, 0).unwrap().len(), 1);
        }
    }

    #[test]
    fn witness_agrees_with_point_inclusion() {
        let objects = enumerate_q(2, 2).unwrap();
        for a in &objects {
            for b in &objects {
                let included = a.points_mask() & !b.points_mask() == 0;
                assert_eq!(q_witness(a, b).is_some(), included);
            }
        }
    }

    #[test]
    fn poset_1_1_is_the_pushout_shape() {
        let qp = q_poset(1, 1).unwrap();
        assert_eq!(qp.objects.len(), 3);
        let idx = |w: &str| {
            qp.objects
                .iter()
                .position(|q| q.step_word() == w)
                .expect("all three step words occur")
        };
        let (r_u, u_r, diag) = (idx("RU"), idx("UR"), idx("D"));
        assert!(qp.poset.lt(diag, r_u));
        assert!(qp.poset.lt(diag, u_r));
        assert!(!qp.poset.le(r_u, u_r) && !qp.poset.le(u_r, r_u));
    }

    #[test]
    fn alpha_product_splits_at_required_points() {
        let qp = q_poset(2, 2).unwrap();
        let mid1 = MonotoneMap::new(0, 2, vec![1]).unwrap();
        let mid2 = MonotoneMap::new(0, 2, vec![1]).unwrap();
        let report = check_alpha_product(&qp, &mid1, &mid2).unwrap();
        assert_eq!(report.factor_shapes, vec![(1, 1), (1, 1)]);
        assert_eq!(report.size, 9);
        assert!(report.bijective && report.order_iso);

        let origin1 = MonotoneMap::new(0, 2, vec![0]).unwrap();
        let origin2 = MonotoneMap::new(0, 2, vec![0]).unwrap();
        let report = check_alpha_product(&qp, &origin1, &origin2).unwrap();
        assert_eq!(report.factor_shapes, vec![(2, 2)]);
        assert_eq!(report.size, 13);
        assert!(report.bijective && report.order_iso);

        // a repeated point collapses to the single-point case
        let rep1 = MonotoneMap::new(1, 2, vec![1, 1]).unwrap();
        let rep2 = MonotoneMap::new(1, 2, vec![1, 1]).unwrap();
        let report = check_alpha_product(&qp, &rep1, &rep2).unwrap();
        assert_eq!(report.factor_shapes, vec![(1, 1), (1, 1)]);
        assert_eq!(report.size, 9);
        assert!(report.bijective && report.order_iso);
    }

    #[test]
    fn retraction_chain_2_1_matches_the_worked_example() {
        let report = retraction_chain(2, 1).unwrap();
        assert_eq!(
            report.stages,
            vec![
                RetractionStage { k: 0, x_size: 5, y_size: 5 },
                RetractionStage { k: 1, x_size: 4, y_size: 3 },
            ]
        );
        assert_eq!(report.x_final_size, 2);
        assert!(report.x_final_acyclic);

        // pin the intermediate posets by their step words
        let qp = q_poset(2, 1).unwrap();
        let avoid_first: Vec<usize> = (0..qp.objects.len())
            .filter(|&i| !qp.objects[i].contains_point(0, 1))
            .collect();
        assert_eq!(
            words(&qp.objects, &avoid_first),
            ["RRU", "RUR", "RD", "DR"].iter().map(|s| s.to_string()).collect()
        );
        let y1: Vec<usize> = avoid_first
            .iter()
            .copied()
            .filter(|&i| {
                let q = &qp.objects[i];
                !(0..q.steps()).any(|s| q.point(s) == (0, 0) && q.point(s + 1) == (1, 1))
            })
            .collect();
        assert_eq!(
            words(&qp.objects, &y1),
            ["RRU", "RUR", "RD"].iter().map(|s| s.to_string()).collect()
        );
        let x2: Vec<usize> = avoid_first
            .iter()
            .copied()
            .filter(|&i| !qp.objects[i].contains_point(1, 1))
            .collect();
        assert_eq!(
            words(&qp.objects, &x2),
            ["RRU", "RD"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn final_stage_is_not_the_lower_grid() {
        let report = retraction_chain(1, 1).unwrap();
        assert_eq!(report.x_final_size, 2);
        assert_eq!(report.lower_delannoy, 1);
        assert!(report.x_final_acyclic);
    }

    #[test]
    fn retraction_chains_certify_on_small_grids() {
        for (m, n) in [(2, 2), (3, 1), (3, 2)] {
            let report = retraction_chain(m, n).unwrap();
            assert!(report.x_final_acyclic, "final stage of ({m},{n}) must be acyclic");
        }
    }

    #[test]
    fn interval_poset_respects_the_cover() {
        let k = SimplicialSubset::spine(3);
        let pk = build_p_k(&k).unwrap();
        // four vertices and three unit edges
        assert_eq!(pk.intervals.len(), 7);
        let full = SimplicialSubset::full(3);
        let pk = build_p_k(&full).unwrap();
        assert_eq!(pk.intervals.len(), 10);
    }

    #[test]
    fn p_k_identities_hold_for_the_covers_of_2() {
        let window = Window::new(2, 3);
        let child = Window::new(1, 2);
        let a1 = random_presheaf(&child, 11).unwrap();
        let a2 = random_presheaf(&child, 12).unwrap();
        let args = VArgs::new(vec![&a1, &a2]).unwrap();
        for k in all_covers(2) {
            let report = p_k_identities(&window, &args, &k).unwrap();
            assert!(report.spine_ok && report.cover_ok);
        }
    }

    #[test]
    fn cover_gluing_target_differs_from_the_spine() {
        // the cover generated by the front triangle and the back edge
        let k = SimplicialSubset::from_generators(
            3,
            &[
                MonotoneMap::new(2, 3, vec![0, 1, 2]).unwrap(),
                MonotoneMap::new(1, 3, vec![2, 3]).unwrap(),
            ],
        )
        .unwrap();
        assert!(k.is_cover());
        let window = Window::new(2, 3);
        let child = Window::new(1, 2);
        let terminal = ThetaObject::terminal(1);
        let t = FinPresheaf::yoneda(&child, &terminal).unwrap();
        let args = VArgs::new(vec![&t, &t, &t]).unwrap();
        let restricted = v_tabulate(&window, &args, Some(&k)).unwrap();
        let spined =
            v_tabulate(&window, &args, Some(&SimplicialSubset::spine(3))).unwrap();
        let wide = window.index_of(&ThetaObject::parse("[3]", 2).unwrap()).unwrap();
        assert!(restricted.presheaf.size(wide) > spined.presheaf.size(wide));
        let report = p_k_identities(&window, &args, &k).unwrap();
        assert!(report.spine_ok && report.cover_ok);
    }

    #[test]
    fn main_square_recovers_the_product_pushout() {
        let window = Window::new(2, 3);
        let child = Window::new(1, 2);
        let terminal = ThetaObject::terminal(1);
        let t = FinPresheaf::yoneda(&child, &terminal).unwrap();
        let a = VArgs::new(vec![&t]).unwrap();
        let b = VArgs::new(vec![&t]).unwrap();
        let full = SimplicialSubset::full(1);
        let report = check_main_square(&window, &a, &b, &full, &full).unwrap();
        assert_eq!(report.path_count, 3);
        assert!(report.bottom_bijective && report.top_bijective);
        assert!(report.square_commutes && report.routes_agree);
        assert!(report.alpha_bottom && report.alpha_top);
    }

    #[test]
    fn main_square_with_a_spine_cover() {
        let window = Window::new(2, 3);
        let child = Window::new(1, 2);
        let x = random_presheaf(&child, 5).unwrap();
        let y = random_presheaf(&child, 6).unwrap();
        let z = random_presheaf(&child, 7).unwrap();
        let a = VArgs::new(vec![&x, &y]).unwrap();
        let b = VArgs::new(vec![&z]).unwrap();
        let report = check_main_square(
            &window,
            &a,
            &b,
            &SimplicialSubset::spine(2),
            &SimplicialSubset::full(1),
        )
        .unwrap();
        assert_eq!(report.path_count, 5);
        assert!(report.bottom_bijective && report.top_bijective);
        assert!(report.square_commutes && report.routes_agree);
    }
}
