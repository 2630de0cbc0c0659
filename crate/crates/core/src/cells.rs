//! Globular cells, their boundary spheres, and the classifier objects.
//!
//! The k-cell at a level is the representable of the k-fold suspension of
//! the point.  Its boundary is computed two independent ways and checked
//! equal: as the subpresheaf of maps that are not split epimorphisms, and
//! as two copies of the next cell down glued along their common boundary.
//! The same file carries the level-change functors along the width
//! projection, the invertibility classifier obtained by collapsing the two
//! long edges of the 3-simplex, the two-point chaotic classifier, and the
//! check that a unary intertwining application shifts the whole cell
//! diagram up by one.

use std::collections::HashMap;
use std::sync::Arc;

use crate::delta::MonotoneMap;
use crate::intertwine::{check_nu, v_tabulate, VArgs};
use crate::presheaf::{colimit, coproduct, DiagramArrow, FinPresheaf, PresheafMap};
use crate::theta::{
    canonical_theta, compose_theta, enumerate_hom, ThetaMorphism, ThetaObject,
};
use crate::window::Window;
use crate::{Error, Result};

/// The k-fold suspension of the point at the given level.
pub fn cell_object(level: usize, k: usize) -> Result<ThetaObject> {
    if k > level {
        return Err(Error::LevelMismatch(format!(
            "a {k}-cell needs at least {k} levels, found {level}"
        )));
    }
    Ok(ThetaObject::terminal(level - k).suspend_by(k))
}

fn vertex_inclusion(level: usize, k: usize, v: usize) -> Result<ThetaMorphism> {
    let inner_src = ThetaObject::terminal(level - k + 1);
    let inner_dst = ThetaObject::terminal(level - k).suspend();
    let m = canonical_theta(&inner_src, &inner_dst, &MonotoneMap::vertex(v, 1))?;
    Ok(m.suspend_by(k - 1))
}

/// The inclusion of the (k-1)-cell as the source of the k-cell.
pub fn source_inclusion(level: usize, k: usize) -> Result<ThetaMorphism> {
    vertex_inclusion(level, k, 0)
}

/// The inclusion of the (k-1)-cell as the target of the k-cell.
pub fn target_inclusion(level: usize, k: usize) -> Result<ThetaMorphism> {
    vertex_inclusion(level, k, 1)
}

/// The collapse of the k-cell onto the (k-1)-cell, retracting both vertex
/// inclusions.
pub fn cell_collapse(level: usize, k: usize) -> Result<ThetaMorphism> {
    let inner_src = ThetaObject::terminal(level - k).suspend();
    Ok(ThetaMorphism::to_terminal(&inner_src).suspend_by(k - 1))
}

/// Whether some section splits `f` from the right.
pub fn is_split_epi(f: &ThetaMorphism) -> Result<bool> {
    for s in enumerate_hom(&f.dst, &f.src) {
        if compose_theta(f, &s)?.is_identity() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The map of representables induced by postcomposition with a morphism,
/// with its endpoints.
pub fn yoneda_push(
    window: &Arc<Window>,
    u: &ThetaMorphism,
) -> Result<(FinPresheaf, FinPresheaf, PresheafMap)> {
    let dom = FinPresheaf::yoneda(window, &u.src)?;
    let cod = FinPresheaf::yoneda(window, &u.dst)?;
    let src_i = window.index_of(&u.src)?;
    let dst_i = window.index_of(&u.dst)?;
    let mut maps = Vec::with_capacity(window.len());
    for o in 0..window.len() {
        let row = window
            .hom(o, src_i)
            .iter()
            .map(|g| {
                let ug = compose_theta(u, g)?;
                window.hom(o, dst_i).iter().position(|h| h == &ug).ok_or_else(|| {
                    Error::Invariant("composite fell outside the tabulated hom set".into())
                })
            })
            .collect::<Result<Vec<_>>>()?;
        maps.push(row);
    }
    let map = PresheafMap::new(&dom, &cod, maps)?;
    Ok((dom, cod, map))
}

/// The cells of a window up to a chosen dimension, with their boundaries,
/// boundary inclusions, and structural morphisms.  Boundaries are verified
/// against the glued-sphere construction during the build.
pub struct CellTower {
    pub window: Arc<Window>,
    pub max_k: usize,
    /// `cells[k]` is the representable of the k-cell.
    pub cells: Vec<FinPresheaf>,
    /// `boundaries[k]` is the subpresheaf of non split epimorphisms.
    pub boundaries: Vec<FinPresheaf>,
    /// `inclusions[k]` embeds `boundaries[k]` into `cells[k]`.
    pub inclusions: Vec<PresheafMap>,
    /// `sources[k-1]` is the source inclusion into the k-cell, `k >= 1`.
    pub sources: Vec<ThetaMorphism>,
    pub targets: Vec<ThetaMorphism>,
    pub collapses: Vec<ThetaMorphism>,
}

pub fn build_cell_tower(window: &Arc<Window>, max_k: usize) -> Result<CellTower> {
    let level = window.level();
    if max_k > level {
        return Err(Error::LevelMismatch(format!(
            "a {max_k}-cell needs at least {max_k} levels, found {level}"
        )));
    }
    if max_k > window.max_size() {
        return Err(Error::WindowExhausted(format!(
            "a {max_k}-cell has size {max_k}, beyond the bound {}",
            window.max_size()
        )));
    }
    let objs = window.len();
    let mut cells = vec![FinPresheaf::yoneda(window, &cell_object(level, 0)?)?];
    let mut boundaries = vec![FinPresheaf::empty(window)];
    let mut inclusions =
        vec![PresheafMap::new(&boundaries[0], &cells[0], vec![Vec::new(); objs])?];
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    let mut collapses = Vec::new();
    for k in 1..=max_k {
        let t = cell_object(level, k)?;
        let cell = FinPresheaf::yoneda(window, &t)?;
        let s_k = source_inclusion(level, k)?;
        let t_k = target_inclusion(level, k)?;
        let i_k = cell_collapse(level, k)?;
        if !compose_theta(&i_k, &s_k)?.is_identity() || !compose_theta(&i_k, &t_k)?.is_identity()
        {
            return Err(Error::Invariant("collapse must retract both vertex inclusions".into()));
        }
        if k >= 2 {
            for lower in [&sources[k - 2], &targets[k - 2]] {
                if compose_theta(&s_k, lower)? != compose_theta(&t_k, lower)? {
                    return Err(Error::Invariant(
                        "vertex inclusions must agree on the lower boundary".into(),
                    ));
                }
            }
        }

        let star = window.index_of(&t)?;
        let mut non_split: Vec<Vec<bool>> = Vec::with_capacity(objs);
        for o in 0..objs {
            let row = window
                .hom(o, star)
                .iter()
                .map(|f| Ok(!is_split_epi(f)?))
                .collect::<Result<Vec<bool>>>()?;
            non_split.push(row);
        }
        let (mut bd, incl) = cell.subpresheaf(&|o, e| non_split[o][e], false)?;

        // glue two copies of the cell below along its boundary and compare
        let prev_incl = inclusions[k - 1].clone();
        let nodes: Vec<&FinPresheaf> = vec![&boundaries[k - 1], &cells[k - 1], &cells[k - 1]];
        let arrows = vec![
            DiagramArrow { src: 0, dst: 1, map: prev_incl.clone() },
            DiagramArrow { src: 0, dst: 2, map: prev_incl.clone() },
        ];
        let (sphere, cocone) = colimit(&nodes, &arrows)?;
        let bd_back: Vec<HashMap<usize, usize>> = (0..objs)
            .map(|o| incl.maps[o].iter().enumerate().map(|(s, &c)| (c, s)).collect())
            .collect();
        let prev_star = window.index_of(&cell_object(level, k - 1)?)?;
        let push_into_bd = |u: &ThetaMorphism| -> Result<PresheafMap> {
            let mut maps = Vec::with_capacity(objs);
            for o in 0..objs {
                let row = window
                    .hom(o, prev_star)
                    .iter()
                    .map(|g| {
                        let ug = compose_theta(u, g)?;
                        let ci = window
                            .hom(o, star)
                            .iter()
                            .position(|h| h == &ug)
                            .ok_or_else(|| {
                                Error::Invariant("composite fell outside the hom set".into())
                            })?;
                        bd_back[o].get(&ci).copied().ok_or_else(|| {
                            Error::Invariant(
                                "a composite through a lower cell split the boundary".into(),
                            )
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                maps.push(row);
            }
            Ok(PresheafMap { maps })
        };
        let leg_s = push_into_bd(&s_k)?;
        let leg_t = push_into_bd(&t_k)?;
        let leg_bd = leg_s.after(&prev_incl);
        let comparison =
            induced(&sphere, &cocone, &nodes, &bd, &[leg_bd, leg_s, leg_t])?;
        if !comparison.is_bijective(&sphere, &bd) {
            return Err(Error::Invariant(
                "the glued sphere does not match the non split locus".into(),
            ));
        }
        // the gluing surjects, so every boundary element factors through a
        // vertex inclusion and the boundary is a union of representables
        bd.set_presented(true);

        cells.push(cell);
        boundaries.push(bd);
        inclusions.push(incl);
        sources.push(s_k);
        targets.push(t_k);
        collapses.push(i_k);
    }
    Ok(CellTower {
        window: Arc::clone(window),
        max_k,
        cells,
        boundaries,
        inclusions,
        sources,
        targets,
        collapses,
    })
}

fn induced(
    colim: &FinPresheaf,
    cocone: &[PresheafMap],
    nodes: &[&FinPresheaf],
    target: &FinPresheaf,
    legs: &[PresheafMap],
) -> Result<PresheafMap> {
    crate::intertwine::induced_from_colimit(colim, cocone, nodes, target, legs)
}

/// Spread a level 1 presheaf across a higher window, constant in the child
/// directions: the value at an object is the value at its width.
pub fn t_sharp(y: &FinPresheaf, window: &Arc<Window>) -> Result<FinPresheaf> {
    if y.window().level() != 1 {
        return Err(Error::LevelMismatch("the spread starts from level 1".into()));
    }
    let objs = window.len();
    let mut width_obj = Vec::with_capacity(objs);
    for t in window.objects() {
        width_obj.push(ThetaObject::parse(&format!("[{}]", t.width()), 1)?);
    }
    let sets: Vec<Vec<String>> = width_obj
        .iter()
        .map(|w| Ok(y.at(w)?.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let mut actions = vec![vec![Vec::new(); objs]; objs];
    for a in 0..objs {
        for b in 0..objs {
            for f in window.hom(a, b) {
                let step = canonical_theta(&width_obj[a], &width_obj[b], &f.delta)?;
                let table = (0..sets[b].len())
                    .map(|x| y.act(&step, x))
                    .collect::<Result<Vec<_>>>()?;
                actions[a][b].push(table);
            }
        }
    }
    FinPresheaf::new(Arc::clone(window), sets, actions, false)
}

/// Restrict a higher presheaf along the section that pads a width with
/// terminal children.
pub fn t_star(x: &FinPresheaf, delta_window: &Arc<Window>) -> Result<FinPresheaf> {
    if delta_window.level() != 1 {
        return Err(Error::LevelMismatch("the restriction lands at level 1".into()));
    }
    let level = x.window().level();
    let objs = delta_window.len();
    let mut spread_obj = Vec::with_capacity(objs);
    for t in delta_window.objects() {
        let children = vec![ThetaObject::terminal(level - 1); t.width()];
        spread_obj.push(ThetaObject::new(level, children)?);
    }
    let sets: Vec<Vec<String>> = spread_obj
        .iter()
        .map(|w| Ok(x.at(w)?.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let mut actions = vec![vec![Vec::new(); objs]; objs];
    for a in 0..objs {
        for b in 0..objs {
            for f in delta_window.hom(a, b) {
                let step = canonical_theta(&spread_obj[a], &spread_obj[b], &f.delta)?;
                let table = (0..sets[b].len())
                    .map(|e| x.act(&step, e))
                    .collect::<Result<Vec<_>>>()?;
                actions[a][b].push(table);
            }
        }
    }
    FinPresheaf::new(Arc::clone(delta_window), sets, actions, false)
}

/// The invertibility classifier: the 3-simplex with the two long edges
/// collapsed to points.  Needs a level 1 window containing the 3-simplex.
pub fn z_presheaf(window: &Arc<Window>) -> Result<FinPresheaf> {
    if window.level() != 1 {
        return Err(Error::LevelMismatch("the classifier lives at level 1".into()));
    }
    let f3 = FinPresheaf::yoneda(window, &ThetaObject::parse("[3]", 1)?)?;
    let f1 = FinPresheaf::yoneda(window, &ThetaObject::parse("[1]", 1)?)?;
    let f0 = FinPresheaf::yoneda(window, &ThetaObject::parse("[0]", 1)?)?;
    let (f11, in1, in2) = coproduct(&f1, &f1)?;
    let (f00, out1, out2) = coproduct(&f0, &f0)?;
    let one = ThetaObject::parse("[1]", 1)?;
    let three = ThetaObject::parse("[3]", 1)?;
    let zero = ThetaObject::parse("[0]", 1)?;
    let edge02 = canonical_theta(&one, &three, &MonotoneMap::edge(0, 2, 3))?;
    let edge13 = canonical_theta(&one, &three, &MonotoneMap::edge(1, 3, 3))?;
    let crush = canonical_theta(&one, &zero, &MonotoneMap::constant(1, 0, 0))?;
    let (_, _, push02) = yoneda_push(window, &edge02)?;
    let (_, _, push13) = yoneda_push(window, &edge13)?;
    let (_, _, push00) = yoneda_push(window, &crush)?;
    let objs = window.len();
    let mut edges_maps = vec![Vec::new(); objs];
    let mut crush_maps = vec![Vec::new(); objs];
    for o in 0..objs {
        edges_maps[o] = vec![0usize; f11.size(o)];
        crush_maps[o] = vec![0usize; f11.size(o)];
        for i in 0..f1.size(o) {
            edges_maps[o][in1.apply(o, i)] = push02.apply(o, i);
            edges_maps[o][in2.apply(o, i)] = push13.apply(o, i);
            crush_maps[o][in1.apply(o, i)] = out1.apply(o, push00.apply(o, i));
            crush_maps[o][in2.apply(o, i)] = out2.apply(o, push00.apply(o, i));
        }
    }
    let nodes: Vec<&FinPresheaf> = vec![&f3, &f11, &f00];
    let arrows = vec![
        DiagramArrow { src: 1, dst: 0, map: PresheafMap { maps: edges_maps } },
        DiagramArrow { src: 1, dst: 2, map: PresheafMap { maps: crush_maps } },
    ];
    let (z, _) = colimit(&nodes, &arrows)?;
    Ok(z)
}

/// The two-point chaotic classifier at level 1: functions into a two
/// element set, acting by precomposition.  Not tabulated from generators,
/// so it is never used as the source of a mapping space.
pub fn e_presheaf(window: &Arc<Window>) -> Result<FinPresheaf> {
    if window.level() != 1 {
        return Err(Error::LevelMismatch("the classifier lives at level 1".into()));
    }
    let objs = window.len();
    let widths: Vec<usize> = window.objects().iter().map(|t| t.width()).collect();
    let sets: Vec<Vec<String>> = widths
        .iter()
        .map(|&q| {
            (0..1usize << (q + 1))
                .map(|bits| {
                    let s: String =
                        (0..=q).map(|i| if bits >> i & 1 == 1 { '1' } else { '0' }).collect();
                    format!("e{s}")
                })
                .collect()
        })
        .collect();
    let mut actions = vec![vec![Vec::new(); objs]; objs];
    for a in 0..objs {
        for b in 0..objs {
            for f in window.hom(a, b) {
                let table = (0..1usize << (widths[b] + 1))
                    .map(|bits| {
                        let mut out = 0usize;
                        for i in 0..=widths[a] {
                            if bits >> f.delta.value(i) & 1 == 1 {
                                out |= 1 << i;
                            }
                        }
                        out
                    })
                    .collect();
                actions[a][b].push(table);
            }
        }
    }
    FinPresheaf::new(Arc::clone(window), sets, actions, false)
}

/// Check that one unary intertwining application carries the k-cell diagram
/// of the child window to the (k+1)-cell diagram of the window: the cell
/// representable comparison and an explicit bijection of boundaries.
pub fn check_v_cell_shift(
    window: &Arc<Window>,
    child_window: &Arc<Window>,
    k: usize,
) -> Result<bool> {
    let level = window.level();
    let cell_ok = check_nu(window, child_window, &cell_object(level, k + 1)?)?;

    let child_tower = build_cell_tower(child_window, k)?;
    let tower = build_cell_tower(window, k + 1)?;
    let bd_child = &child_tower.boundaries[k];
    let args = VArgs::new(vec![bd_child])?;
    let v_bd = v_tabulate(window, &args, None)?;
    let target_bd = &tower.boundaries[k + 1];
    let incl = &tower.inclusions[k + 1];
    let star = window.index_of(&cell_object(level, k + 1)?)?;
    let child_star = child_window.index_of(&cell_object(level - 1, k)?)?;
    let objs = window.len();
    let back: Vec<HashMap<usize, usize>> = (0..objs)
        .map(|o| incl.maps[o].iter().enumerate().map(|(s, &c)| (c, s)).collect())
        .collect();
    let mut maps = Vec::with_capacity(objs);
    for (o, t) in window.objects().iter().enumerate() {
        let row = v_bd.elements[o]
            .iter()
            .map(|x| {
                let mut components = Vec::with_capacity(t.width());
                for i in 1..=t.width() {
                    let mut row = Vec::new();
                    for slot in &x.factors[i - 1] {
                        let cell_elem = child_tower.inclusions[k].apply(
                            child_window.index_of(&t.children()[i - 1])?,
                            *slot,
                        );
                        let g = child_window
                            .hom(child_window.index_of(&t.children()[i - 1])?, child_star)
                            [cell_elem]
                            .clone();
                        row.push(g);
                    }
                    components.push(row);
                }
                let u = ThetaMorphism::from_parts(
                    t.clone(),
                    cell_object(level, k + 1)?,
                    x.delta.clone(),
                    components,
                )?;
                let ci = window
                    .hom(o, star)
                    .iter()
                    .position(|h| h == &u)
                    .ok_or_else(|| Error::Invariant("assembled map missing from hom".into()))?;
                back[o].get(&ci).copied().ok_or_else(|| {
                    Error::Invariant("assembled map is not a boundary element".into())
                })
            })
            .collect::<Result<Vec<_>>>()?;
        maps.push(row);
    }
    let cmp = PresheafMap::new(&v_bd.presheaf, target_bd, maps)?;
    Ok(cell_ok && cmp.is_bijective(&v_bd.presheaf, target_bd))
}
