//! The intertwining functor `V`.
//!
//! Given presheaves `A_1, ..., A_m` on a level, `V[m](A_1..A_m)` is the
//! presheaf one level up whose value at `[q](c_1..c_q)` is the sum over
//! monotone `delta: [q] -> [m]` of the products `A_j(c_i)` for `j` in the
//! interval `(delta(i-1), delta(i)]`.  Elements are pairs of a simplex map
//! and a factor table, and the contravariant action is the same interval
//! chase as wreath composition, with the factor presheaves acting on the
//! table entries.
//!
//! On representable arguments `V` returns a representable: the evaluation of
//! `V[m](F t_1, .., F t_m)` at `theta` is literally the hom set
//! `theta -> [m](t_1..t_m)` read as (simplex map, components).  That
//! comparison, the sum and product decompositions, and the mapping-object
//! identification are all built here as explicit natural maps, then checked
//! for bijectivity objectwise.

use std::collections::HashMap;
use std::sync::Arc;

use crate::delta::{compose_delta, enumerate_delta, MonotoneMap, SimplicialSubset};
use crate::presheaf::{colimit, product, DiagramArrow, FinPresheaf, PresheafMap};
use crate::theta::{canonical_theta, ThetaMorphism, ThetaObject};
use crate::window::Window;
use crate::{Error, Result};

/// An element of `V[m](A_1..A_m)` at some `[q](c_1..c_q)`: a simplex map
/// `[q] -> [m]` plus one factor element per interval slot, stored like
/// morphism components: `factors[i-1][j - delta(i-1) - 1]` lies in `A_j(c_i)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VElement {
    pub delta: MonotoneMap,
    pub factors: Vec<Vec<usize>>,
}

impl VElement {
    pub fn label(&self) -> String {
        let flat: Vec<String> =
            self.factors.iter().flatten().map(|x| x.to_string()).collect();
        format!("v{}|{}", self.delta.digits(), flat.join(","))
    }
}

/// The argument list of a `V[m]` application; all on one child window.
pub struct VArgs<'a> {
    args: Vec<&'a FinPresheaf>,
}

impl<'a> VArgs<'a> {
    pub fn new(args: Vec<&'a FinPresheaf>) -> Result<Self> {
        if let Some(first) = args.first() {
            for a in &args[1..] {
                if !Arc::ptr_eq(a.window(), first.window()) {
                    return Err(Error::StructuralMismatch(
                        "V arguments must share one child window".into(),
                    ));
                }
            }
        }
        Ok(VArgs { args })
    }

    pub fn len(&self) -> usize {
        self.args.len()
    }

    pub fn is_empty(&self) -> bool {
        self.args.is_empty()
    }

    pub fn arg(&self, j: usize) -> &FinPresheaf {
        self.args[j - 1]
    }

    pub fn child_window(&self) -> Option<&Arc<Window>> {
        self.args.first().map(|a| a.window())
    }

    /// The columns `a+1 ..= a+p`, for restriction to an interval.
    pub fn slice(&self, a: usize, p: usize) -> VArgs<'a> {
        VArgs { args: self.args[a..a + p].to_vec() }
    }
}

/// All factor tables over one fixed simplex map, row-major with the last
/// slot fastest.  Empty when some slot has no elements to draw from.
pub fn v_factor_tables(
    args: &VArgs,
    theta: &ThetaObject,
    delta: &MonotoneMap,
) -> Result<Vec<Vec<Vec<usize>>>> {
    let q = theta.width();
    let mut slot_sizes = Vec::new();
    for i in 1..=q {
        let ci = &theta.children()[i - 1];
        for j in delta.value(i - 1) + 1..=delta.value(i) {
            let cw = args.child_window().expect("nonempty interval needs arguments");
            let ci_idx = cw.index_of(ci)?;
            slot_sizes.push(args.arg(j).size(ci_idx));
        }
    }
    if slot_sizes.iter().any(|&s| s == 0) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut counter = vec![0usize; slot_sizes.len()];
    loop {
        let mut factors: Vec<Vec<usize>> = vec![Vec::new(); q];
        let mut slot = 0;
        for i in 1..=q {
            for _ in delta.value(i - 1) + 1..=delta.value(i) {
                factors[i - 1].push(counter[slot]);
                slot += 1;
            }
        }
        out.push(factors);
        let mut s = slot_sizes.len();
        loop {
            if s == 0 {
                break;
            }
            s -= 1;
            counter[s] += 1;
            if counter[s] < slot_sizes[s] {
                break;
            }
            counter[s] = 0;
            if s == 0 {
                s = usize::MAX;
                break;
            }
        }
        if s == usize::MAX || slot_sizes.is_empty() {
            break;
        }
    }
    Ok(out)
}

/// All elements of `V[m](args)` at `theta`, simplex map outermost in
/// lexicographic order, factor slots row-major with the last one fastest.
pub fn v_elements(args: &VArgs, theta: &ThetaObject) -> Result<Vec<VElement>> {
    let q = theta.width();
    let m = args.len();
    let mut out = Vec::new();
    for delta in enumerate_delta(q, m) {
        for factors in v_factor_tables(args, theta, &delta)? {
            out.push(VElement { delta: delta.clone(), factors });
        }
    }
    Ok(out)
}

/// Contravariant action: precompose the simplex map and let the factor
/// presheaves act through the component morphisms of `f`.
pub fn v_act(args: &VArgs, f: &ThetaMorphism, x: &VElement) -> Result<VElement> {
    let delta = compose_delta(&x.delta, &f.delta)?;
    let r = f.src.width();
    let mut factors = Vec::with_capacity(r);
    for p in 1..=r {
        let lo = f.delta.value(p - 1);
        let hi = f.delta.value(p);
        let out_lo = x.delta.value(lo);
        let out_hi = x.delta.value(hi);
        let mut row = Vec::with_capacity(out_hi - out_lo);
        for j in out_lo + 1..=out_hi {
            let i = (lo + 1..=hi)
                .find(|&i| x.delta.value(i - 1) < j && j <= x.delta.value(i))
                .expect("interval arithmetic guarantees a unique middle index");
            let g = &f.components[p - 1][i - lo - 1];
            let a = x.factors[i - 1][j - x.delta.value(i - 1) - 1];
            row.push(args.arg(j).act(g, a)?);
        }
        factors.push(row);
    }
    Ok(VElement { delta, factors })
}

/// A tabulated `V` value: the presheaf plus the element structure per object.
pub struct VPresheaf {
    pub presheaf: FinPresheaf,
    pub elements: Vec<Vec<VElement>>,
    index: Vec<HashMap<VElement, usize>>,
}

impl VPresheaf {
    pub fn element_index(&self, obj: usize, x: &VElement) -> Result<usize> {
        self.index[obj].get(x).copied().ok_or_else(|| {
            Error::Invariant(format!("element {x:?} missing from the tabulated V value"))
        })
    }
}

/// Tabulate `V[m](args)` on a window one level above the arguments,
/// optionally restricted to the elements whose simplex map lies in a
/// face-closed subset of the target ordinal.
pub fn v_tabulate(
    window: &Arc<Window>,
    args: &VArgs,
    restrict: Option<&SimplicialSubset>,
) -> Result<VPresheaf> {
    if let Some(cw) = args.child_window() {
        if cw.level() + 1 != window.level() {
            return Err(Error::LevelMismatch(
                "V arguments must live one level below the target window".into(),
            ));
        }
    }
    if let Some(k) = restrict {
        if k.ambient_rank() != args.len() {
            return Err(Error::RankMismatch(
                "restriction subset must live on the argument ordinal".into(),
            ));
        }
    }
    let n = window.len();
    let mut elements = Vec::with_capacity(n);
    for t in window.objects() {
        let mut elems = v_elements(args, t)?;
        if let Some(k) = restrict {
            elems.retain(|x| k.contains(&x.delta));
        }
        elements.push(elems);
    }
    let index: Vec<HashMap<VElement, usize>> = elements
        .iter()
        .map(|elems| elems.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect())
        .collect();
    let sets: Vec<Vec<String>> =
        elements.iter().map(|elems| elems.iter().map(VElement::label).collect()).collect();
    let mut actions = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for b in 0..n {
            for f in window.hom(a, b) {
                let table = elements[b]
                    .iter()
                    .map(|x| {
                        let y = v_act(args, f, x)?;
                        index[a].get(&y).copied().ok_or_else(|| {
                            Error::Invariant(
                                "action left the tabulated subset; restriction not a subfunctor"
                                    .into(),
                            )
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                actions[a][b].push(table);
            }
        }
    }
    // V of presented arguments is presented through one argument at a time;
    // the generators stay inside the window only for unary applications,
    // whose representables `[1](t)` grow size by one.
    let presented = restrict.is_none()
        && args.len() <= 1
        && args.args.iter().all(|a| a.is_presented());
    let presheaf = FinPresheaf::new(Arc::clone(window), sets, actions, presented)?;
    Ok(VPresheaf { presheaf, elements, index })
}

/// An outer map of `V` applications: a simplex map on the argument ordinals
/// together with presheaf maps in the interval pattern, applied to elements
/// by the wreath composition chase.
pub struct VOuterMap {
    pub epsilon: MonotoneMap,
    pub comps: Vec<Vec<PresheafMap>>,
}

/// Tabulate the presheaf map induced by an outer map between two tabulated
/// `V` values on the same window.
pub fn v_outer_presheaf_map(
    outer: &VOuterMap,
    src_args: &VArgs,
    src: &VPresheaf,
    dst: &VPresheaf,
) -> Result<PresheafMap> {
    let window = src.presheaf.window();
    let n = window.len();
    let mut maps = Vec::with_capacity(n);
    for (o, t) in window.objects().iter().enumerate() {
        let row = src.elements[o]
            .iter()
            .map(|x| {
                let y = apply_outer(outer, src_args, t, x)?;
                dst.element_index(o, &y)
            })
            .collect::<Result<Vec<_>>>()?;
        maps.push(row);
    }
    PresheafMap::new(&src.presheaf, &dst.presheaf, maps)
}

/// Element-level application of an outer map at a fixed object.
pub fn apply_outer(
    outer: &VOuterMap,
    src_args: &VArgs,
    theta: &ThetaObject,
    x: &VElement,
) -> Result<VElement> {
    let delta = compose_delta(&outer.epsilon, &x.delta)?;
    let q = theta.width();
    let cw = src_args
        .child_window()
        .ok_or_else(|| Error::StructuralMismatch("outer map needs arguments".into()))?;
    let mut factors = Vec::with_capacity(q);
    for i in 1..=q {
        let ci = cw.index_of(&theta.children()[i - 1])?;
        let lo = x.delta.value(i - 1);
        let hi = x.delta.value(i);
        let out_lo = outer.epsilon.value(lo);
        let out_hi = outer.epsilon.value(hi);
        let mut row = Vec::with_capacity(out_hi - out_lo);
        for k in out_lo + 1..=out_hi {
            let j = (lo + 1..=hi)
                .find(|&j| outer.epsilon.value(j - 1) < k && k <= outer.epsilon.value(j))
                .expect("interval arithmetic guarantees a unique middle index");
            let phi = &outer.comps[j - 1][k - outer.epsilon.value(j - 1) - 1];
            let a = x.factors[i - 1][j - lo - 1];
            row.push(phi.apply(ci, a));
        }
        factors.push(row);
    }
    Ok(VElement { delta, factors })
}

/// The comparison between a representable and `V` of the representables of
/// the children: the hom set at each object, reread as (simplex map,
/// component indices).  Returns the natural bijection.
pub fn nu_comparison(
    window: &Arc<Window>,
    child_window: &Arc<Window>,
    theta_star: &ThetaObject,
) -> Result<(PresheafMap, FinPresheaf, VPresheaf)> {
    let yon = FinPresheaf::yoneda(window, theta_star)?;
    let child_yonedas = theta_star
        .children()
        .iter()
        .map(|t| FinPresheaf::yoneda(child_window, t))
        .collect::<Result<Vec<_>>>()?;
    let args = VArgs::new(child_yonedas.iter().collect())?;
    let v = v_tabulate(window, &args, None)?;
    let star = window.index_of(theta_star)?;
    let n = window.len();
    let mut maps = Vec::with_capacity(n);
    for (b, t) in window.objects().iter().enumerate() {
        let row = window
            .hom(b, star)
            .iter()
            .map(|h| {
                let mut factors = Vec::with_capacity(t.width());
                for (i, row) in h.components.iter().enumerate() {
                    let ci = &t.children()[i];
                    let mut slots = Vec::with_capacity(row.len());
                    for (s, f) in row.iter().enumerate() {
                        let j = h.delta.value(i) + 1 + s;
                        let tj = &theta_star.children()[j - 1];
                        let hom = child_window.hom_of(ci, tj)?;
                        let fi = hom.iter().position(|g| g == f).ok_or_else(|| {
                            Error::Invariant("component missing from child hom set".into())
                        })?;
                        slots.push(fi);
                    }
                    factors.push(slots);
                }
                v.element_index(b, &VElement { delta: h.delta.clone(), factors })
            })
            .collect::<Result<Vec<_>>>()?;
        maps.push(row);
    }
    let map = PresheafMap::new(&yon, &v.presheaf, maps)?;
    Ok((map, yon, v))
}

/// Check `F(theta*) = V(width)(F children)` as a natural bijection.
pub fn check_nu(
    window: &Arc<Window>,
    child_window: &Arc<Window>,
    theta_star: &ThetaObject,
) -> Result<bool> {
    let (map, yon, v) = nu_comparison(window, child_window, theta_star)?;
    Ok(map.is_bijective(&yon, &v.presheaf))
}

/// Index of the class a simplex map falls into when `[m+1+n]` is split as
/// `m` argument columns, one empty column, `n` argument columns: class 0
/// means entirely in the right block, class `q+1` entirely in the left,
/// class `p` in `1..=q` means the map crosses between the blocks at `p`.
pub fn g_partition_class(delta: &MonotoneMap, m: usize) -> usize {
    let q = delta.src_rank;
    if delta.value(0) >= m + 1 {
        return 0;
    }
    if delta.value(q) <= m {
        return q + 1;
    }
    for p in 1..=q {
        if delta.value(p - 1) <= m && delta.value(p) >= m + 1 {
            return p;
        }
    }
    unreachable!("a monotone map crosses a threshold exactly once")
}

/// Every `[q] -> [m+1+n]` falls in exactly one class.
pub fn g_partition_ok(q: usize, m: usize, n: usize) -> bool {
    for delta in enumerate_delta(q, m + 1 + n) {
        let mut hits = 0;
        if delta.value(0) >= m + 1 {
            hits += 1;
        }
        if delta.value(q) <= m {
            hits += 1;
        }
        for p in 1..=q {
            if delta.value(p - 1) <= m && delta.value(p) >= m + 1 {
                hits += 1;
            }
        }
        if hits != 1 {
            return false;
        }
    }
    true
}

#[derive(Debug)]
pub struct CoproductReport {
    /// The canonical map out of the sum is a natural bijection.
    pub bijective: bool,
    /// The threshold classes partition every simplex map that occurs.
    pub partition_ok: bool,
    /// Every crossing class contributes an empty summand.
    pub crossing_empty: bool,
}

/// Check `V[m](A) + V[n](B) = V[m+1+n](A.., empty, B..)`: the inserted empty
/// column kills exactly the simplex maps that cross it, and the remaining
/// elements are the two blocks.
pub fn check_coproduct_decomposition(
    window: &Arc<Window>,
    a_args: &VArgs,
    b_args: &VArgs,
) -> Result<CoproductReport> {
    let m = a_args.len();
    let n = b_args.len();
    let va = v_tabulate(window, a_args, None)?;
    let vb = v_tabulate(window, b_args, None)?;
    let cw = a_args
        .child_window()
        .or_else(|| b_args.child_window())
        .ok_or_else(|| Error::StructuralMismatch("decomposition needs arguments".into()))?;
    let empty = FinPresheaf::empty(cw);
    let mut all_args: Vec<&FinPresheaf> = Vec::with_capacity(m + 1 + n);
    for j in 1..=m {
        all_args.push(a_args.arg(j));
    }
    all_args.push(&empty);
    for j in 1..=n {
        all_args.push(b_args.arg(j));
    }
    let merged_args = VArgs::new(all_args)?;
    let merged = v_tabulate(window, &merged_args, None)?;

    let (sum, ia, ib) = crate::presheaf::coproduct(&va.presheaf, &vb.presheaf)?;
    // canonical legs into the merged value: left block keeps columns, right
    // block shifts by m+1
    let mut maps: Vec<Vec<usize>> = vec![Vec::new(); window.len()];
    for (o, _) in window.objects().iter().enumerate() {
        let mut table = vec![usize::MAX; sum.size(o)];
        for (xi, x) in va.elements[o].iter().enumerate() {
            let delta = MonotoneMap::new(
                x.delta.src_rank,
                m + 1 + n,
                x.delta.values().to_vec(),
            )?;
            let y = VElement { delta, factors: x.factors.clone() };
            table[ia.apply(o, xi)] = merged.element_index(o, &y)?;
        }
        for (xi, x) in vb.elements[o].iter().enumerate() {
            let delta = MonotoneMap::new(
                x.delta.src_rank,
                m + 1 + n,
                x.delta.values().iter().map(|v| v + m + 1).collect(),
            )?;
            let y = VElement { delta, factors: x.factors.clone() };
            table[ib.apply(o, xi)] = merged.element_index(o, &y)?;
        }
        if table.iter().any(|&v| v == usize::MAX) {
            return Err(Error::Invariant("sum element missed by both injections".into()));
        }
        maps[o] = table;
    }
    let canonical = PresheafMap::new(&sum, &merged.presheaf, maps)?;
    let bijective = canonical.is_bijective(&sum, &merged.presheaf);

    let mut partition_ok = true;
    let mut crossing_empty = true;
    for (o, t) in window.objects().iter().enumerate() {
        let q = t.width();
        partition_ok &= g_partition_ok(q, m, n);
        for x in &merged.elements[o] {
            let class = g_partition_class(&x.delta, m);
            if class >= 1 && class <= q {
                crossing_empty = false;
            }
        }
    }
    Ok(CoproductReport { bijective, partition_ok, crossing_empty })
}

#[derive(Debug)]
pub struct ProductReport {
    /// The induced map from the glued sum to the product is a bijection.
    pub bijective: bool,
    /// The two composites out of the middle object agree.
    pub cocone_commutes: bool,
    /// Element counts at a probe object, `(left, middle, right, glued, product)`.
    pub probe: Option<(usize, usize, usize, usize, usize)>,
}

/// Check that gluing `V[2](A,B)` and `V[2](B,A)` along `V[1](A x B)` gives
/// `V[1](A) x V[1](B)`, with the span and cone maps induced by the doubling
/// map `[1] -> [2]` and the two collapse maps `[2] -> [1]`.
pub fn check_product_decomposition(
    window: &Arc<Window>,
    a: &FinPresheaf,
    b: &FinPresheaf,
    probe: Option<&ThetaObject>,
) -> Result<ProductReport> {
    let (ab, pa, pb) = product(a, b)?;
    let args_ab = VArgs::new(vec![&ab])?;
    let args_a_b = VArgs::new(vec![a, b])?;
    let args_b_a = VArgs::new(vec![b, a])?;
    let args_a = VArgs::new(vec![a])?;
    let args_b = VArgs::new(vec![b])?;
    let v_mid = v_tabulate(window, &args_ab, None)?;
    let v_left = v_tabulate(window, &args_a_b, None)?;
    let v_right = v_tabulate(window, &args_b_a, None)?;
    let v_a = v_tabulate(window, &args_a, None)?;
    let v_b = v_tabulate(window, &args_b, None)?;

    let d02 = MonotoneMap::from_digits("02", 2)?;
    let d011 = MonotoneMap::from_digits("011", 1)?;
    let d001 = MonotoneMap::from_digits("001", 1)?;
    let id_a = PresheafMap::identity(a);
    let id_b = PresheafMap::identity(b);

    // span legs out of the middle
    let to_left = VOuterMap { epsilon: d02.clone(), comps: vec![vec![pa.clone(), pb.clone()]] };
    let to_right = VOuterMap { epsilon: d02, comps: vec![vec![pb.clone(), pa.clone()]] };
    let span_left = v_outer_presheaf_map(&to_left, &args_ab, &v_mid, &v_left)?;
    let span_right = v_outer_presheaf_map(&to_right, &args_ab, &v_mid, &v_right)?;

    // cone legs into V[1](A) and V[1](B)
    let keep_a_of_left = VOuterMap { epsilon: d011.clone(), comps: vec![vec![id_a.clone()], vec![]] };
    let keep_b_of_left = VOuterMap { epsilon: d001.clone(), comps: vec![vec![], vec![id_b.clone()]] };
    let keep_a_of_right = VOuterMap { epsilon: d001, comps: vec![vec![], vec![id_a]] };
    let keep_b_of_right = VOuterMap { epsilon: d011, comps: vec![vec![id_b], vec![]] };
    let la_left = v_outer_presheaf_map(&keep_a_of_left, &args_a_b, &v_left, &v_a)?;
    let lb_left = v_outer_presheaf_map(&keep_b_of_left, &args_a_b, &v_left, &v_b)?;
    let la_right = v_outer_presheaf_map(&keep_a_of_right, &args_b_a, &v_right, &v_a)?;
    let lb_right = v_outer_presheaf_map(&keep_b_of_right, &args_b_a, &v_right, &v_b)?;

    let (target, ta, tb) = product(&v_a.presheaf, &v_b.presheaf)?;
    let pair = |xa: &PresheafMap, xb: &PresheafMap, dom: &FinPresheaf| -> Result<PresheafMap> {
        let n = window.len();
        let mut maps = Vec::with_capacity(n);
        for o in 0..n {
            let row = (0..dom.size(o))
                .map(|x| {
                    let i = xa.apply(o, x);
                    let j = xb.apply(o, x);
                    (0..target.size(o))
                        .find(|&z| ta.apply(o, z) == i && tb.apply(o, z) == j)
                        .ok_or_else(|| Error::Invariant("pairing missed the product".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            maps.push(row);
        }
        PresheafMap::new(dom, &target, maps)
    };
    let leg_left = pair(&la_left, &lb_left, &v_left.presheaf)?;
    let leg_right = pair(&la_right, &lb_right, &v_right.presheaf)?;

    let via_left = leg_left.after(&span_left);
    let via_right = leg_right.after(&span_right);
    let cocone_commutes = via_left == via_right;

    let arrows = vec![
        DiagramArrow { src: 0, dst: 1, map: span_left },
        DiagramArrow { src: 0, dst: 2, map: span_right },
    ];
    let nodes = [&v_mid.presheaf, &v_left.presheaf, &v_right.presheaf];
    let (glued, cocone) = colimit(&nodes, &arrows)?;
    let legs = [via_left, leg_left, leg_right];
    let induced = induced_from_colimit(&glued, &cocone, &nodes, &target, &legs)?;
    let bijective = induced.is_bijective(&glued, &target);

    let probe = match probe {
        Some(t) => {
            let o = window.index_of(t)?;
            Some((
                v_left.presheaf.size(o),
                v_mid.presheaf.size(o),
                v_right.presheaf.size(o),
                glued.size(o),
                target.size(o),
            ))
        }
        None => None,
    };
    Ok(ProductReport { bijective, cocone_commutes, probe })
}

/// The map out of a colimit induced by compatible legs, verified against
/// every node element rather than trusted from representatives.
pub fn induced_from_colimit(
    colim: &FinPresheaf,
    cocone: &[PresheafMap],
    nodes: &[&FinPresheaf],
    target: &FinPresheaf,
    legs: &[PresheafMap],
) -> Result<PresheafMap> {
    let n = colim.window().len();
    let mut maps: Vec<Vec<Option<usize>>> = (0..n).map(|o| vec![None; colim.size(o)]).collect();
    for (ni, node) in nodes.iter().enumerate() {
        for o in 0..n {
            for x in 0..node.size(o) {
                let class = cocone[ni].apply(o, x);
                let value = legs[ni].apply(o, x);
                match maps[o][class] {
                    None => maps[o][class] = Some(value),
                    Some(v) if v == value => {}
                    Some(_) => {
                        return Err(Error::Invariant(
                            "legs do not factor through the colimit".into(),
                        ))
                    }
                }
            }
        }
    }
    let maps = maps
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| v.ok_or_else(|| Error::Invariant("colimit class missed by legs".into())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PresheafMap::new(colim, target, maps)
}

/// A face-closed subset of a level-1 representable, tabulated as a presheaf.
pub fn simplicial_subset_presheaf(
    window: &Arc<Window>,
    k: &SimplicialSubset,
) -> Result<FinPresheaf> {
    if window.level() != 1 {
        return Err(Error::LevelMismatch("subset presheaves are tabulated at level 1".into()));
    }
    let m = k.ambient_rank();
    let target = ThetaObject::parse(&format!("[{m}]"), 1)?;
    let yon = FinPresheaf::yoneda(window, &target)?;
    let ti = window.index_of(&target)?;
    let keep = |o: usize, e: usize| {
        let _ = o;
        true && k.contains(&window.hom(o, ti)[e].delta)
    };
    let (mut sub, _) = yon.subpresheaf(&keep, false)?;
    // a face-closed subset is the union of the representables of its faces,
    // all of which fit in any window containing the ambient ordinal
    sub.set_presented(true);
    Ok(sub)
}

/// The mapping object of `x` between two points: at each child `c`, the
/// elements of `x` at `[1](c)` whose two vertices are the given points.
/// Tabulated on the child window; actions go through suspended morphisms.
pub fn mapping_presheaf(
    x: &FinPresheaf,
    child_window: &Arc<Window>,
    x0: usize,
    x1: usize,
) -> Result<FinPresheaf> {
    let window = x.window();
    if child_window.level() + 1 != window.level() {
        return Err(Error::LevelMismatch("mapping object lives one level down".into()));
    }
    let term = window.terminal_index();
    let n = child_window.len();
    let mut member: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut sets = Vec::with_capacity(n);
    for c in child_window.objects() {
        let susp = c.suspend();
        let si = window.index_of(&susp)?;
        let v0 = canonical_theta(&ThetaObject::terminal(window.level()), &susp, &MonotoneMap::vertex(0, 1))?;
        let v1 = canonical_theta(&ThetaObject::terminal(window.level()), &susp, &MonotoneMap::vertex(1, 1))?;
        let (_, _, f0) = window.locate(&v0)?;
        let (_, _, f1) = window.locate(&v1)?;
        let elems: Vec<usize> = (0..x.size(si))
            .filter(|&e| {
                x.act_idx(term, si, f0, e) == x0 && x.act_idx(term, si, f1, e) == x1
            })
            .collect();
        sets.push(elems.iter().map(|&e| x.set(si)[e].clone()).collect::<Vec<_>>());
        member.push(elems);
    }
    let back: Vec<HashMap<usize, usize>> = member
        .iter()
        .map(|elems| elems.iter().enumerate().map(|(i, &e)| (e, i)).collect())
        .collect();
    let mut actions = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for b in 0..n {
            for g in child_window.hom(a, b) {
                let sg = g.suspend();
                let table = member[b]
                    .iter()
                    .map(|&e| {
                        let img = x.act(&sg, e)?;
                        back[a].get(&img).copied().ok_or_else(|| {
                            Error::Invariant("mapping object is not action-closed".into())
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                actions[a][b].push(table);
            }
        }
    }
    FinPresheaf::new(Arc::clone(child_window), sets, actions, false)
}

#[derive(Debug)]
pub struct MappingSpaceReport {
    pub maps_into_mapping_object: usize,
    pub pointed_maps_from_v: usize,
    pub canonical_bijection: bool,
}

/// The mapping-object identification: natural maps `A -> M_x(x0, x1)` agree
/// with natural maps `V[1](A) -> x` sending the two vertex elements to the
/// points.  The canonical assignment pushes an element `a` over `c` to the
/// image of the identity-indexed element `(01, a)` at `[1](c)`.
pub fn check_mapping_space_identification(
    x: &FinPresheaf,
    a: &FinPresheaf,
    x0: usize,
    x1: usize,
) -> Result<MappingSpaceReport> {
    let window = x.window();
    let child_window = a.window();
    let m = mapping_presheaf(x, child_window, x0, x1)?;
    let into_m = crate::presheaf::nat_hom(a, &m)?;

    let args = VArgs::new(vec![a])?;
    let v = v_tabulate(window, &args, None)?;
    let from_v = crate::presheaf::nat_hom(&v.presheaf, x)?;
    let term = window.terminal_index();
    let vertex = |c: usize| -> Result<usize> {
        v.element_index(
            term,
            &VElement { delta: MonotoneMap::vertex(c, 1), factors: Vec::new() },
        )
    };
    let v0 = vertex(0)?;
    let v1 = vertex(1)?;
    let pointed: Vec<&PresheafMap> = from_v
        .iter()
        .filter(|phi| phi.apply(term, v0) == x0 && phi.apply(term, v1) == x1)
        .collect();

    // canonical map: eta over c sends a to phi at [1](c) of (01, a); check
    // the assignment eta -> phi is a bijection onto the pointed maps
    let mut hits = vec![false; pointed.len()];
    let mut canonical_bijection = true;
    for eta in &into_m {
        // build the candidate phi values on every object and find it
        let mut found = None;
        'candidates: for (pi, phi) in pointed.iter().enumerate() {
            for (c_idx, c) in child_window.objects().iter().enumerate() {
                let susp = c.suspend();
                let si = window.index_of(&susp)?;
                let e01 = v.element_index(
                    si,
                    &VElement { delta: MonotoneMap::identity(1), factors: vec![vec![0]] },
                )?;
                let _ = e01;
                for ai in 0..a.size(c_idx) {
                    let elem = VElement { delta: MonotoneMap::identity(1), factors: vec![vec![ai]] };
                    let ei = v.element_index(si, &elem)?;
                    // eta's value indexes into the mapping object, whose
                    // elements are x-elements at the suspension
                    let m_elem = eta.apply(c_idx, ai);
                    let x_elem = member_of_mapping(x, child_window, x0, x1, c_idx, m_elem)?;
                    if phi.apply(si, ei) != x_elem {
                        continue 'candidates;
                    }
                }
            }
            found = Some(pi);
            break;
        }
        match found {
            Some(pi) if !hits[pi] => hits[pi] = true,
            _ => canonical_bijection = false,
        }
    }
    canonical_bijection &= hits.iter().all(|&h| h) && into_m.len() == pointed.len();
    Ok(MappingSpaceReport {
        maps_into_mapping_object: into_m.len(),
        pointed_maps_from_v: pointed.len(),
        canonical_bijection,
    })
}

/// Resolve the `k`-th element of the mapping object at child `c` back to the
/// underlying element of `x` at the suspension.
fn member_of_mapping(
    x: &FinPresheaf,
    child_window: &Arc<Window>,
    x0: usize,
    x1: usize,
    c_idx: usize,
    k: usize,
) -> Result<usize> {
    let window = x.window();
    let c = child_window.object(c_idx);
    let susp = c.suspend();
    let si = window.index_of(&susp)?;
    let term = window.terminal_index();
    let v0 = canonical_theta(&ThetaObject::terminal(window.level()), &susp, &MonotoneMap::vertex(0, 1))?;
    let v1 = canonical_theta(&ThetaObject::terminal(window.level()), &susp, &MonotoneMap::vertex(1, 1))?;
    let (_, _, f0) = window.locate(&v0)?;
    let (_, _, f1) = window.locate(&v1)?;
    (0..x.size(si))
        .filter(|&e| x.act_idx(term, si, f0, e) == x0 && x.act_idx(term, si, f1, e) == x1)
        .nth(k)
        .ok_or_else(|| Error::Invariant("mapping-object index out of range".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::coproduct;

    fn setup() -> (Arc<Window>, Arc<Window>) {
        (Window::new(2, 4), Window::new(1, 3))
    }

    #[test]
    fn nu_holds_on_the_level_two_window() {
        let (w, cw) = setup();
        for t in w.objects() {
            assert!(check_nu(&w, &cw, t).unwrap(), "nu fails at {t}");
        }
    }

    #[test]
    fn unary_v_of_a_representable_is_the_suspension() {
        let (w, cw) = setup();
        let t = ThetaObject::parse("[2]", 1).unwrap();
        let a = FinPresheaf::yoneda(&cw, &t).unwrap();
        let args = VArgs::new(vec![&a]).unwrap();
        let v = v_tabulate(&w, &args, None).unwrap();
        let yon = FinPresheaf::yoneda(&w, &t.suspend()).unwrap();
        for o in 0..w.len() {
            assert_eq!(v.presheaf.size(o), yon.size(o));
        }
        assert!(v.presheaf.is_presented());
    }

    #[test]
    fn empty_argument_kills_crossing_summands() {
        let (w, cw) = setup();
        let t = ThetaObject::parse("[0]", 1).unwrap();
        let a = FinPresheaf::yoneda(&cw, &t).unwrap();
        let a_args = VArgs::new(vec![&a]).unwrap();
        let b_args = VArgs::new(vec![&a]).unwrap();
        let report = check_coproduct_decomposition(&w, &a_args, &b_args).unwrap();
        assert!(report.bijective && report.partition_ok && report.crossing_empty);
    }

    #[test]
    fn coproduct_decomposition_with_empty_blocks() {
        let (w, cw) = setup();
        let t = ThetaObject::parse("[1]", 1).unwrap();
        let a = FinPresheaf::yoneda(&cw, &t).unwrap();
        let a_args = VArgs::new(vec![&a]).unwrap();
        let none = VArgs::new(vec![]).unwrap();
        let report = check_coproduct_decomposition(&w, &a_args, &none).unwrap();
        assert!(report.bijective && report.partition_ok && report.crossing_empty);
    }

    #[test]
    fn product_decomposition_probe_counts() {
        let (w, cw) = setup();
        let t0 = ThetaObject::parse("[0]", 1).unwrap();
        let a = FinPresheaf::yoneda(&cw, &t0).unwrap();
        let probe = ThetaObject::parse("[1]([0])", 2).unwrap();
        let report = check_product_decomposition(&w, &a, &a, Some(&probe)).unwrap();
        assert!(report.bijective && report.cocone_commutes);
        assert_eq!(report.probe, Some((6, 3, 6, 9, 9)));
    }

    #[test]
    fn sum_of_tabulations_matches_elementwise_sum() {
        let (w, cw) = setup();
        let t = ThetaObject::parse("[1]", 1).unwrap();
        let a = FinPresheaf::yoneda(&cw, &t).unwrap();
        let args = VArgs::new(vec![&a]).unwrap();
        let v = v_tabulate(&w, &args, None).unwrap();
        let (sum, _, _) = coproduct(&v.presheaf, &v.presheaf).unwrap();
        for o in 0..w.len() {
            assert_eq!(sum.size(o), 2 * v.presheaf.size(o));
        }
    }

    #[test]
    fn spine_restriction_is_a_subfunctor() {
        let (w, cw) = setup();
        let t = ThetaObject::parse("[1]", 1).unwrap();
        let a = FinPresheaf::yoneda(&cw, &t).unwrap();
        let b = FinPresheaf::yoneda(&cw, &t).unwrap();
        let args = VArgs::new(vec![&a, &b]).unwrap();
        let spine = SimplicialSubset::spine(2);
        let vk = v_tabulate(&w, &args, Some(&spine)).unwrap();
        let full = v_tabulate(&w, &args, None).unwrap();
        for o in 0..w.len() {
            assert!(vk.presheaf.size(o) <= full.presheaf.size(o));
        }
    }

    #[test]
    fn level_one_subset_presheaf_counts() {
        let w1 = Window::new(1, 3);
        let spine2 = simplicial_subset_presheaf(&w1, &SimplicialSubset::spine(2)).unwrap();
        let two = ThetaObject::parse("[2]", 1).unwrap();
        assert_eq!(spine2.at(&two).unwrap().len(), 7);
        let bound2 = simplicial_subset_presheaf(&w1, &SimplicialSubset::boundary(2)).unwrap();
        assert_eq!(bound2.at(&two).unwrap().len(), 9);
        assert!(spine2.is_presented());
    }

    #[test]
    fn mapping_object_of_a_representable() {
        let (w, cw) = setup();
        // x = F([1]([1])): elements of x at [1](c) are morphisms
        // [1](c) -> [1]([1]); between the two endpoint vertices sit the maps
        // that hit the inner edge
        let t = ThetaObject::parse("[1]([1])", 2).unwrap();
        let x = FinPresheaf::yoneda(&w, &t).unwrap();
        // vertices of x: x at [0] has 2 elements (the two vertices)
        let term = w.terminal_index();
        assert_eq!(x.size(term), 2);
        let m = mapping_presheaf(&x, &cw, 0, 1).unwrap();
        // at child [1]: morphisms [1]([1]) -> [1]([1]) from vertex 0 to 1:
        // those with simplex part 01, one per endomorphism of [1]: 3
        let c = ThetaObject::parse("[1]", 1).unwrap();
        assert_eq!(m.at(&c).unwrap().len(), 3);
    }

    #[test]
    fn mapping_space_identification_for_a_representable_argument() {
        let (w, cw) = setup();
        let t = ThetaObject::parse("[1]([1])", 2).unwrap();
        let x = FinPresheaf::yoneda(&w, &t).unwrap();
        let a = FinPresheaf::yoneda(&cw, &ThetaObject::parse("[1]", 1).unwrap()).unwrap();
        let report = check_mapping_space_identification(&x, &a, 0, 1).unwrap();
        assert!(report.canonical_bijection);
        assert_eq!(report.maps_into_mapping_object, report.pointed_maps_from_v);
    }
}
