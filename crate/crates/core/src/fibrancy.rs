//! Fibrancy checkers for discrete presheaves: the Segal comparisons, the
//! homotopy category and levelwise completeness, groupoid locality, and
//! truncation by boundary fibers.  Equivalence of cells is computed twice,
//! once by the mapping-object recursion and once from composition tables,
//! and the two readings are reported side by side.

use std::collections::HashMap;

use crate::cells::{
    build_cell_tower, cell_collapse, cell_object, source_inclusion, target_inclusion,
};
use crate::delta::MonotoneMap;
use crate::intertwine::mapping_presheaf;
use crate::ncat::FiniteCategory;
use crate::presheaf::{nat_hom, FinPresheaf};
use crate::theta::{canonical_theta, ThetaMorphism, ThetaObject};
use crate::window::Window;
use crate::{Error, Result};

/// One Segal comparison: the object it lives at, the sizes of the two
/// sides, and whether the canonical map between them is a bijection.
#[derive(Debug, Clone)]
pub struct SegalObjectCheck {
    pub object: usize,
    pub lhs: usize,
    pub rhs: usize,
    pub bijective: bool,
}

#[derive(Debug, Clone)]
pub struct DiscreteSegalReport {
    pub passes: bool,
    pub checks: Vec<SegalObjectCheck>,
}

/// Strip the maximal suspension prefix: the number of width-one layers and
/// the first object below them.
fn peel_suspensions(theta: &ThetaObject) -> (usize, ThetaObject) {
    let mut depth = 0;
    let mut cur = theta.clone();
    while cur.width() == 1 {
        let child = cur.children()[0].clone();
        cur = child;
        depth += 1;
    }
    (depth, cur)
}

/// The Segal condition objectwise: at every window object whose shape is a
/// suspended width-m tree with m at least two, elements must biject with
/// chains of elements at the suspended edge shapes, matched at the shared
/// suspended vertices.
pub fn check_segal_discrete(x: &FinPresheaf) -> Result<DiscreteSegalReport> {
    let window = x.window();
    let mut checks = Vec::new();
    for (obj, theta) in window.objects().iter().enumerate() {
        let (depth, inner) = peel_suspensions(theta);
        let m = inner.width();
        if m < 2 {
            continue;
        }
        let inner_children = inner.children();
        // legs into the full shape and endpoint maps of each edge shape
        let mut leg_loc = Vec::with_capacity(m);
        let mut end_loc = Vec::with_capacity(m);
        let mut edge_obj = Vec::with_capacity(m);
        for i in 1..=m {
            let c = &inner_children[i - 1];
            let edge = ThetaObject::new(inner.level(), vec![c.clone()])?;
            let leg = canonical_theta(&edge, &inner, &MonotoneMap::edge(i - 1, i, m))?
                .suspend_by(depth);
            let a = canonical_theta(
                &ThetaObject::terminal(inner.level()),
                &edge,
                &MonotoneMap::vertex(0, 1),
            )?
            .suspend_by(depth);
            let b = canonical_theta(
                &ThetaObject::terminal(inner.level()),
                &edge,
                &MonotoneMap::vertex(1, 1),
            )?
            .suspend_by(depth);
            let (la, _, li) = window.locate(&leg)?;
            let (aa, _, ai) = window.locate(&a)?;
            let (_, _, bi) = window.locate(&b)?;
            edge_obj.push(window.index_of(&edge.suspend_by(depth))?);
            leg_loc.push((la, li));
            end_loc.push((aa, ai, bi));
        }
        // left side: distinct restriction tuples
        let mut seen = std::collections::HashSet::new();
        let mut distinct = true;
        for w in 0..x.size(obj) {
            let key: Vec<usize> =
                leg_loc.iter().map(|&(a, i)| x.act_idx(a, obj, i, w)).collect();
            if !seen.insert(key) {
                distinct = false;
            }
        }
        // right side: chains counted by a pass over the shared vertices
        let (va, _, _) = end_loc[0];
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for e in 0..x.size(edge_obj[0]) {
            let t = x.act_idx(va, edge_obj[0], end_loc[0].2, e);
            *counts.entry(t).or_insert(0) += 1;
        }
        for i in 1..m {
            let (ea, ai, bi) = end_loc[i];
            let mut next: HashMap<usize, usize> = HashMap::new();
            for e in 0..x.size(edge_obj[i]) {
                let s = x.act_idx(ea, edge_obj[i], ai, e);
                if let Some(&c) = counts.get(&s) {
                    if c > 0 {
                        let t = x.act_idx(ea, edge_obj[i], bi, e);
                        *next.entry(t).or_insert(0) += c;
                    }
                }
            }
            counts = next;
        }
        let rhs: usize = counts.values().sum();
        let lhs = x.size(obj);
        checks.push(SegalObjectCheck {
            object: obj,
            lhs,
            rhs,
            bijective: distinct && lhs == rhs,
        });
    }
    Ok(DiscreteSegalReport { passes: checks.iter().all(|c| c.bijective), checks })
}

/// Composition data for the k-cells of a discrete presheaf: boundaries,
/// identities, and the partial composition along the (k-1)-boundary read
/// off through the two-cell pasting shape.
#[derive(Debug)]
pub struct CellComposition {
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    pub ids: Vec<usize>,
    /// `table[g][f]` composes g after f; present exactly for composable
    /// pairs.
    pub table: Vec<Vec<Option<usize>>>,
}

/// Build the k-cell composition of `x` through the suspended two-simplex.
/// Fails when the pasting shape misses the window or when its elements do
/// not biject with composable pairs.
pub fn cell_composition(x: &FinPresheaf, k: usize) -> Result<CellComposition> {
    let window = x.window();
    let n = window.level();
    if k == 0 || k > n {
        return Err(Error::StructuralMismatch(format!(
            "cells compose at dimensions 1..={n}, not {k}"
        )));
    }
    let ck = cell_object(n, k)?;
    let ck1 = cell_object(n, k - 1)?;
    let ik = window.index_of(&ck)?;
    let ik1 = window.index_of(&ck1)?;
    let nk = x.size(ik);
    let src_m = source_inclusion(n, k)?;
    let tgt_m = target_inclusion(n, k)?;
    let src: Vec<usize> = (0..nk).map(|e| x.act(&src_m, e)).collect::<Result<_>>()?;
    let tgt: Vec<usize> = (0..nk).map(|e| x.act(&tgt_m, e)).collect::<Result<_>>()?;
    let collapse = cell_collapse(n, k)?;
    let ids: Vec<usize> =
        (0..x.size(ik1)).map(|e| x.act(&collapse, e)).collect::<Result<_>>()?;
    // the pasting shape: two k-cells glued along a (k-1)-cell
    let t_inner = ThetaObject::terminal(n - k);
    let pair = ThetaObject::new(n - k + 1, vec![t_inner.clone(), t_inner.clone()])?;
    let edge = ThetaObject::new(n - k + 1, vec![t_inner])?;
    let shape = pair.suspend_by(k - 1);
    let shape_idx = window.index_of(&shape).map_err(|_| {
        Error::WindowExhausted(format!("the pasting shape {shape} for dimension {k}"))
    })?;
    let first = canonical_theta(&edge, &pair, &MonotoneMap::edge(0, 1, 2))?.suspend_by(k - 1);
    let second = canonical_theta(&edge, &pair, &MonotoneMap::edge(1, 2, 2))?.suspend_by(k - 1);
    let long = canonical_theta(&edge, &pair, &MonotoneMap::edge(0, 2, 2))?.suspend_by(k - 1);
    let (fa, _, fi) = window.locate(&first)?;
    let (_, _, si) = window.locate(&second)?;
    let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
    for w in 0..x.size(shape_idx) {
        let key = (x.act_idx(fa, shape_idx, fi, w), x.act_idx(fa, shape_idx, si, w));
        if lookup.insert(key, w).is_some() {
            return Err(Error::Invariant(format!(
                "the pasting shape at dimension {k} fails Segal uniqueness"
            )));
        }
    }
    let mut table = vec![vec![None; nk]; nk];
    for g in 0..nk {
        for f in 0..nk {
            if src[g] != tgt[f] {
                continue;
            }
            let w = *lookup.get(&(f, g)).ok_or_else(|| {
                Error::Invariant(format!(
                    "no pasting element for the composable pair ({g}, {f}) at dimension {k}"
                ))
            })?;
            table[g][f] = Some(x.act(&long, w)?);
        }
    }
    Ok(CellComposition { src, tgt, ids, table })
}

impl CellComposition {
    /// Cells with a strict two-sided inverse.
    pub fn iso_flags(&self) -> Vec<bool> {
        let nk = self.src.len();
        (0..nk)
            .map(|g| {
                let (s, t) = (self.src[g], self.tgt[g]);
                (0..nk).any(|h| {
                    self.src[h] == t
                        && self.tgt[h] == s
                        && self.table[h][g] == Some(self.ids[s])
                        && self.table[g][h] == Some(self.ids[t])
                })
            })
            .collect()
    }
}

/// The homotopy category of a discrete presheaf: objects are the points,
/// arrows are the edges at the suspended terminal, and composition goes
/// through the two-simplex pasting.
pub fn homotopy_category(x: &FinPresheaf) -> Result<FiniteCategory> {
    let window = x.window();
    let n = window.level();
    let comp = cell_composition(x, 1)?;
    let term = window.terminal_index();
    let edge_idx = window.index_of(&cell_object(n, 1)?)?;
    FiniteCategory::new(
        x.set(term).to_vec(),
        x.set(edge_idx).to_vec(),
        comp.src,
        comp.tgt,
        comp.ids,
        comp.table,
    )
}

/// Is the k-cell `e` an equivalence?  Dimension 1 reads invertibility in
/// the homotopy category; higher dimensions pass to the mapping object
/// between the endpoints of `e` and recurse one level down.
pub fn is_k_equivalence(x: &FinPresheaf, k: usize, e: usize) -> Result<bool> {
    let window = x.window();
    let n = window.level();
    if k == 0 || k > n {
        return Err(Error::StructuralMismatch(format!(
            "equivalence is asked at dimensions 1..={n}, not {k}"
        )));
    }
    if k == 1 {
        let h = homotopy_category(x)?;
        return Ok(h.isomorphisms().contains(&e));
    }
    let (w, rank) = descend_to_mapping(x, k, e)?;
    is_k_equivalence(&w, k - 1, rank)
}

/// The mapping object between the endpoints of the k-cell `e`, together
/// with the index of `e` inside it.  The membership filter repeats the one
/// in the mapping-object construction, so ranks line up by construction.
fn descend_to_mapping(x: &FinPresheaf, k: usize, e: usize) -> Result<(FinPresheaf, usize)> {
    let window = x.window();
    let n = window.level();
    let term = window.terminal_index();
    let ck = cell_object(n, k)?;
    let ik = window.index_of(&ck)?;
    let v0 = canonical_theta(&ThetaObject::terminal(n), &ck, &MonotoneMap::vertex(0, 1))?;
    let v1 = canonical_theta(&ThetaObject::terminal(n), &ck, &MonotoneMap::vertex(1, 1))?;
    let (_, _, f0) = window.locate(&v0)?;
    let (_, _, f1) = window.locate(&v1)?;
    let a = x.act_idx(term, ik, f0, e);
    let b = x.act_idx(term, ik, f1, e);
    let child_window = Window::new(n - 1, window.max_size() - 1);
    let w = mapping_presheaf(x, &child_window, a, b)?;
    let rank = (0..e)
        .filter(|&p| x.act_idx(term, ik, f0, p) == a && x.act_idx(term, ik, f1, p) == b)
        .count();
    Ok((w, rank))
}

/// Equivalence flags for all k-cells by the mapping recursion.
pub fn equivalence_flags_by_recursion(x: &FinPresheaf, k: usize) -> Result<Vec<bool>> {
    let window = x.window();
    let n = window.level();
    let ik = window.index_of(&cell_object(n, k)?)?;
    if k == 1 {
        let h = homotopy_category(x)?;
        let iso: std::collections::HashSet<usize> = h.isomorphisms().into_iter().collect();
        return Ok((0..x.size(ik)).map(|e| iso.contains(&e)).collect());
    }
    // group cells by endpoints so each mapping object is built once
    let mut cache: HashMap<(usize, usize), (FinPresheaf, Vec<bool>)> = HashMap::new();
    let term = window.terminal_index();
    let ck = cell_object(n, k)?;
    let v0 = canonical_theta(&ThetaObject::terminal(n), &ck, &MonotoneMap::vertex(0, 1))?;
    let v1 = canonical_theta(&ThetaObject::terminal(n), &ck, &MonotoneMap::vertex(1, 1))?;
    let (_, _, f0) = window.locate(&v0)?;
    let (_, _, f1) = window.locate(&v1)?;
    let child_window = Window::new(n - 1, window.max_size() - 1);
    let mut flags = Vec::with_capacity(x.size(ik));
    let mut rank_state: HashMap<(usize, usize), usize> = HashMap::new();
    for e in 0..x.size(ik) {
        let a = x.act_idx(term, ik, f0, e);
        let b = x.act_idx(term, ik, f1, e);
        if !cache.contains_key(&(a, b)) {
            let w = mapping_presheaf(x, &child_window, a, b)?;
            let inner = equivalence_flags_by_recursion(&w, k - 1)?;
            cache.insert((a, b), (w, inner));
        }
        let rank = *rank_state
            .entry((a, b))
            .and_modify(|r| *r += 1)
            .or_insert(0);
        flags.push(cache[&(a, b)].1[rank]);
    }
    Ok(flags)
}

#[derive(Debug, Clone)]
pub struct CompletenessLevel {
    pub level: usize,
    pub lower_cells: usize,
    pub equivalences_by_recursion: usize,
    pub equivalences_by_tables: usize,
    pub routes_agree: bool,
    pub passes: bool,
}

#[derive(Debug, Clone)]
pub struct DiscreteCompletenessReport {
    pub passes: bool,
    pub levels: Vec<CompletenessLevel>,
}

/// Completeness at every dimension: the identity degeneracy from the
/// (k-1)-cells must land bijectively on the k-equivalences.  Equivalences
/// are computed by both routes; a level passes only when the routes agree.
pub fn check_complete_discrete(x: &FinPresheaf) -> Result<DiscreteCompletenessReport> {
    let window = x.window();
    let n = window.level();
    let mut levels = Vec::with_capacity(n);
    for k in 1..=n {
        let ik1 = window.index_of(&cell_object(n, k - 1)?)?;
        let comp = cell_composition(x, k)?;
        let by_tables = comp.iso_flags();
        let by_recursion = equivalence_flags_by_recursion(x, k)?;
        let routes_agree = by_tables == by_recursion;
        let lower = x.size(ik1);
        // degenerate cells, with injectivity of the degeneracy
        let mut image = std::collections::HashSet::new();
        let mut injective = true;
        for &i in &comp.ids {
            if !image.insert(i) {
                injective = false;
            }
        }
        let equiv_set: std::collections::HashSet<usize> = by_recursion
            .iter()
            .enumerate()
            .filter_map(|(e, &f)| if f { Some(e) } else { None })
            .collect();
        let passes = routes_agree && injective && image == equiv_set;
        levels.push(CompletenessLevel {
            level: k,
            lower_cells: lower,
            equivalences_by_recursion: equiv_set.len(),
            equivalences_by_tables: by_tables.iter().filter(|&&b| b).count(),
            routes_agree,
            passes,
        });
    }
    Ok(DiscreteCompletenessReport { passes: levels.iter().all(|l| l.passes), levels })
}

/// Per-level pass flags of the completeness check, indexed by k-1.
pub fn completeness_levels(x: &FinPresheaf) -> Result<Vec<bool>> {
    Ok(check_complete_discrete(x)?.levels.into_iter().map(|l| l.passes).collect())
}

/// The three level-one completeness countings on a level-one window:
/// objects, invertible edges, mutually inverse pairs, and natural maps out
/// of the walking-equivalence presheaf.
#[derive(Debug, Clone)]
pub struct WalkingEquivalenceCounts {
    pub objects: usize,
    pub equivalence_edges: usize,
    pub iso_pairs: usize,
    pub walking_maps: usize,
}

pub fn walking_equivalence_counts(x: &FinPresheaf) -> Result<WalkingEquivalenceCounts> {
    let window = x.window();
    if window.level() != 1 {
        return Err(Error::LevelMismatch(
            "the walking-equivalence countings live on level-one windows".into(),
        ));
    }
    let h = homotopy_category(x)?;
    let z = crate::cells::z_presheaf(window)?;
    let maps = nat_hom(&z, x)?;
    Ok(WalkingEquivalenceCounts {
        objects: x.size(window.terminal_index()),
        equivalence_edges: h.isomorphisms().len(),
        iso_pairs: h.iso_pairs().len(),
        walking_maps: maps.len(),
    })
}

#[derive(Debug, Clone)]
pub struct DiscreteGroupoidReport {
    pub equivalences_by_recursion: bool,
    pub equivalences_by_tables: bool,
    pub constant: bool,
}

/// Groupoid locality and the constancy condition: every cell of every
/// positive dimension is an equivalence, and the map from the points to
/// the value at each object is bijective.
pub fn check_groupoid_discrete(x: &FinPresheaf) -> Result<DiscreteGroupoidReport> {
    let window = x.window();
    let n = window.level();
    let mut by_rec = true;
    let mut by_tab = true;
    for k in 1..=n {
        by_rec &= equivalence_flags_by_recursion(x, k)?.iter().all(|&b| b);
        by_tab &= cell_composition(x, k)?.iso_flags().iter().all(|&b| b);
    }
    let term = window.terminal_index();
    let points = x.size(term);
    let mut constant = true;
    for (obj, theta) in window.objects().iter().enumerate() {
        let bang = ThetaMorphism::to_terminal(theta);
        let mut seen = std::collections::HashSet::new();
        let mut table = Vec::with_capacity(points);
        for p in 0..points {
            let img = x.act(&bang, p)?;
            seen.insert(img);
            table.push(img);
        }
        if seen.len() != points || x.size(obj) != points {
            constant = false;
        }
    }
    Ok(DiscreteGroupoidReport {
        equivalences_by_recursion: by_rec,
        equivalences_by_tables: by_tab,
        constant,
    })
}

/// The boundary fibration of the cell tower: sizes of the iterated sphere
/// values and the restriction of each cell to its sphere, built purely
/// from source and target actions.
fn boundary_fibration(x: &FinPresheaf, up_to: usize) -> Result<(Vec<usize>, Vec<Vec<usize>>)> {
    let window = x.window();
    let n = window.level();
    if up_to > n {
        return Err(Error::StructuralMismatch(format!(
            "no cells above dimension {n}"
        )));
    }
    let mut sizes = vec![1usize];
    let i0 = window.index_of(&cell_object(n, 0)?)?;
    let mut r: Vec<Vec<usize>> = vec![vec![0; x.size(i0)]];
    for k in 1..=up_to {
        let ik = window.index_of(&cell_object(n, k)?)?;
        let src_m = source_inclusion(n, k)?;
        let tgt_m = target_inclusion(n, k)?;
        let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
        let lower = r[k - 1].len();
        for u in 0..lower {
            for v in 0..lower {
                if r[k - 1][u] == r[k - 1][v] {
                    let idx = pairs.len();
                    pairs.insert((u, v), idx);
                }
            }
        }
        let mut row = Vec::with_capacity(x.size(ik));
        for e in 0..x.size(ik) {
            let key = (x.act(&src_m, e)?, x.act(&tgt_m, e)?);
            row.push(*pairs.get(&key).ok_or_else(|| {
                Error::Invariant(format!("cell {e} at dimension {k} has a non-globular boundary"))
            })?);
        }
        sizes.push(pairs.len());
        r.push(row);
    }
    Ok((sizes, r))
}

/// Moduli sizes at dimension k: the cells, and the sphere value computed
/// two ways, by natural maps out of the glued boundary and by the pair
/// recursion over lower cells.
#[derive(Debug, Clone)]
pub struct ModuliReport {
    pub level: usize,
    pub cells: usize,
    pub boundary_by_colimit: usize,
    pub boundary_by_fibers: usize,
    pub routes_agree: bool,
}

pub fn moduli(x: &FinPresheaf, k: usize) -> Result<ModuliReport> {
    let window = x.window();
    let n = window.level();
    if k > n {
        return Err(Error::StructuralMismatch(format!("no moduli above dimension {n}")));
    }
    let ik = window.index_of(&cell_object(n, k)?)?;
    let tower = build_cell_tower(window, k)?;
    let by_colimit = nat_hom(&tower.boundaries[k], x)?.len();
    let (sizes, _) = boundary_fibration(x, k)?;
    Ok(ModuliReport {
        level: k,
        cells: x.size(ik),
        boundary_by_colimit: by_colimit,
        boundary_by_fibers: sizes[k],
        routes_agree: by_colimit == sizes[k],
    })
}

#[derive(Debug, Clone)]
pub struct TruncationReport {
    pub k: i64,
    pub cells: usize,
    pub boundary: usize,
    pub max_fiber: usize,
    pub empty_fibers: usize,
    pub passes: bool,
    pub note: Option<String>,
}

/// Truncation at the top dimension: the fibers of the restriction from
/// top cells to their boundary sphere.  k = -2 demands singleton fibers,
/// k = -1 demands at most one point each, and nonnegative k holds with an
/// advisory note since no finite check can refute it.
pub fn check_truncation_discrete(x: &FinPresheaf, k: i64) -> Result<TruncationReport> {
    if k < -2 {
        return Err(Error::StructuralMismatch(format!(
            "truncation level {k} is not defined"
        )));
    }
    let window = x.window();
    let n = window.level();
    let ik = window.index_of(&cell_object(n, n)?)?;
    let (sizes, r) = boundary_fibration(x, n)?;
    let boundary = sizes[n];
    let mut fiber = vec![0usize; boundary];
    for &b in &r[n] {
        fiber[b] += 1;
    }
    let max_fiber = fiber.iter().copied().max().unwrap_or(0);
    let empty_fibers = fiber.iter().filter(|&&c| c == 0).count();
    let (passes, note) = match k {
        -2 => (max_fiber <= 1 && empty_fibers == 0, None),
        -1 => (max_fiber <= 1, None),
        _ => (
            true,
            Some(format!(
                "truncation at level {k} imposes no condition refutable at a finite window"
            )),
        ),
    };
    Ok(TruncationReport {
        k,
        cells: x.size(ik),
        boundary,
        max_fiber,
        empty_fibers,
        passes,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncat::{
        chain_ncat, chaotic_groupoid_ncat, cyclic_group_ncat, dnerve, random_category,
        suspension_ncat, tau, walking_idempotent_ncat,
    };
    use crate::presheaf::FinPresheaf;

    fn obj(s: &str, level: usize) -> ThetaObject {
        ThetaObject::parse(s, level).unwrap()
    }

    #[test]
    fn representables_pass_segal_and_spine_fails_with_frozen_witnesses() {
        let window = Window::new(1, 4);
        let f2 = FinPresheaf::yoneda(&window, &obj("[2]", 1)).unwrap();
        let rep = check_segal_discrete(&f2).unwrap();
        assert!(rep.passes);
        let two = window.index_of(&obj("[2]", 1)).unwrap();
        let full = rep.checks.iter().find(|c| c.object == two).unwrap();
        assert_eq!((full.lhs, full.rhs), (10, 10));

        // spine and boundary controls, tabulated as subpresheaves of F[2]
        let spine = crate::intertwine::simplicial_subset_presheaf(
            &window,
            &crate::delta::SimplicialSubset::spine(2),
        )
        .unwrap();
        let srep = check_segal_discrete(&spine).unwrap();
        assert!(!srep.passes);
        let sfail = srep.checks.iter().find(|c| c.object == two).unwrap();
        assert_eq!((sfail.lhs, sfail.rhs), (7, 8));

        let boundary = crate::intertwine::simplicial_subset_presheaf(
            &window,
            &crate::delta::SimplicialSubset::boundary(2),
        )
        .unwrap();
        let brep = check_segal_discrete(&boundary).unwrap();
        assert!(!brep.passes);
        let bfail = brep.checks.iter().find(|c| c.object == two).unwrap();
        assert_eq!((bfail.lhs, bfail.rhs), (9, 10));
    }

    #[test]
    fn nerves_pass_segal_at_both_levels() {
        let w1 = Window::new(1, 4);
        for seed in [1u64, 5, 9] {
            let cat = random_category(seed).unwrap().to_ncat().unwrap();
            let nerve = dnerve(&cat, &w1).unwrap();
            assert!(check_segal_discrete(&nerve).unwrap().passes, "seed {seed}");
        }
        let w2 = Window::new(2, 4);
        let two_cat = tau(&obj("[1]([1](.))", 2)).unwrap().cat;
        let nerve = dnerve(&two_cat, &w2).unwrap();
        assert!(check_segal_discrete(&nerve).unwrap().passes);
        let susp = suspension_ncat(&cyclic_group_ncat(2).unwrap()).unwrap();
        assert!(check_segal_discrete(&dnerve(&susp, &w2).unwrap()).unwrap().passes);
    }

    #[test]
    fn homotopy_category_recovers_the_nerved_category() {
        let window = Window::new(1, 4);
        let cat = random_category(3).unwrap();
        let nerve = dnerve(&cat.to_ncat().unwrap(), &window).unwrap();
        let h = homotopy_category(&nerve).unwrap();
        assert_eq!(h.objects.len(), cat.objects.len());
        assert_eq!(h.arrows.len(), cat.arrows.len());
        assert_eq!(h.isomorphisms().len(), cat.isomorphisms().len());
    }

    #[test]
    fn chaotic_groupoid_fails_completeness_with_two_versus_four() {
        let window = Window::new(1, 4);
        let nerve = dnerve(&chaotic_groupoid_ncat(2).unwrap(), &window).unwrap();
        let report = check_complete_discrete(&nerve).unwrap();
        assert!(!report.passes);
        let level = &report.levels[0];
        assert_eq!(level.lower_cells, 2);
        assert_eq!(level.equivalences_by_recursion, 4);
        assert!(level.routes_agree);
        let counts = walking_equivalence_counts(&nerve).unwrap();
        assert_eq!(counts.objects, 2);
        assert_eq!(counts.equivalence_edges, 4);
        assert_eq!(counts.iso_pairs, 4);
        assert_eq!(counts.walking_maps, 4);
    }

    #[test]
    fn poset_nerves_are_complete() {
        let window = Window::new(1, 4);
        let nerve = dnerve(&chain_ncat(1).unwrap(), &window).unwrap();
        let report = check_complete_discrete(&nerve).unwrap();
        assert!(report.passes);
        assert_eq!(report.levels[0].lower_cells, 2);
        assert_eq!(report.levels[0].equivalences_by_recursion, 2);
        let counts = walking_equivalence_counts(&nerve).unwrap();
        assert_eq!(counts.objects, 2);
        assert_eq!(counts.walking_maps, 2);
        let idem = dnerve(&walking_idempotent_ncat().unwrap(), &window).unwrap();
        assert!(check_complete_discrete(&idem).unwrap().passes);
    }

    #[test]
    fn suspended_group_fails_completeness_at_the_second_level_only() {
        let window = Window::new(2, 4);
        let susp = suspension_ncat(&cyclic_group_ncat(2).unwrap()).unwrap();
        let nerve = dnerve(&susp, &window).unwrap();
        let report = check_complete_discrete(&nerve).unwrap();
        assert!(report.levels[0].passes, "level 1 should pass");
        assert!(!report.levels[1].passes, "level 2 should fail");
        for level in &report.levels {
            assert!(level.routes_agree);
        }
    }

    #[test]
    fn groupoid_condition_versus_constancy() {
        let window = Window::new(1, 4);
        let chaotic = dnerve(&chaotic_groupoid_ncat(2).unwrap(), &window).unwrap();
        let grep = check_groupoid_discrete(&chaotic).unwrap();
        assert!(grep.equivalences_by_recursion);
        assert!(grep.equivalences_by_tables);
        assert!(!grep.constant);
        let point = dnerve(&chain_ncat(0).unwrap(), &window).unwrap();
        let prep = check_groupoid_discrete(&point).unwrap();
        assert!(prep.constant);
        let poset = dnerve(&chain_ncat(1).unwrap(), &window).unwrap();
        assert!(!check_groupoid_discrete(&poset).unwrap().equivalences_by_tables);
    }

    #[test]
    fn moduli_routes_agree_on_nerves_and_representables() {
        let window = Window::new(1, 4);
        let nerve = dnerve(&chain_ncat(2).unwrap(), &window).unwrap();
        for k in 0..=1 {
            let m = moduli(&nerve, k).unwrap();
            assert!(m.routes_agree, "dimension {k}: {m:?}");
        }
        let w2 = Window::new(2, 4);
        let yon = FinPresheaf::yoneda(&w2, &obj("[1]([1](.))", 2)).unwrap();
        for k in 0..=2 {
            let m = moduli(&yon, k).unwrap();
            assert!(m.routes_agree, "dimension {k}: {m:?}");
        }
    }

    #[test]
    fn truncation_counts_boundary_fibers() {
        let window = Window::new(1, 4);
        let poset = dnerve(&chain_ncat(1).unwrap(), &window).unwrap();
        // arrows are determined by their endpoints in a poset
        assert!(check_truncation_discrete(&poset, -1).unwrap().passes);
        // but not every endpoint pair carries an arrow
        assert!(!check_truncation_discrete(&poset, -2).unwrap().passes);
        assert!(check_truncation_discrete(&poset, 0).unwrap().passes);
        let chaotic = dnerve(&chaotic_groupoid_ncat(2).unwrap(), &window).unwrap();
        assert!(check_truncation_discrete(&chaotic, -2).unwrap().passes);
        assert!(check_truncation_discrete(&poset, -3).is_err());
    }

    #[test]
    fn rigidity_matches_fibrancy_on_a_sample() {
        let w1 = Window::new(1, 4);
        for (name, cat) in [
            ("chain", chain_ncat(2).unwrap()),
            ("chaotic", chaotic_groupoid_ncat(2).unwrap()),
            ("group", cyclic_group_ncat(3).unwrap()),
            ("idempotent", walking_idempotent_ncat().unwrap()),
        ] {
            let report = crate::ncat::check_rigid_iff_complete(&cat, &w1).unwrap();
            assert!(report.agrees, "{name}: {report:?}");
        }
        let w2 = Window::new(2, 4);
        let susp = suspension_ncat(&cyclic_group_ncat(2).unwrap()).unwrap();
        let report = crate::ncat::check_rigid_iff_complete(&susp, &w2).unwrap();
        assert!(report.agrees, "suspended group: {report:?}");
        assert!(!report.rigid);
    }
}
