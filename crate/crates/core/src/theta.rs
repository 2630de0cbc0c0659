//! Iterated wreath products of the simplex category.
//!
//! An object of level `n` is a planar tree of height at most `n`, written
//! `[m](c_1, ..., c_m)` where the `c_i` are the subtrees over the root; the
//! only level-0 object is `.` and `[0]` is the terminal object of every
//! positive level.  The *size* of an object is its edge count.
//!
//! A morphism `[m](c_1..c_m) -> [n](d_1..d_j)` is a monotone map
//! `delta: [m] -> [n]` together with component morphisms `f_ij: c_i -> d_j`
//! for every `i` and every `j` in the interval `(delta(i-1), delta(i)]`.
//! Composition pairs each target index with the unique interval that
//! contains it and composes componentwise.

use std::collections::HashMap;
use std::fmt;

use serde_json::Value;

use crate::delta::{classify, compose_delta, enumerate_delta, MonotoneMap};
use crate::{Error, Result};

/// A planar tree of height at most `level`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThetaObject {
    level: usize,
    children: Vec<ThetaObject>,
}

impl fmt::Debug for ThetaObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ThetaObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            return write!(f, ".");
        }
        write!(f, "[{}]", self.children.len())?;
        if !self.children.is_empty() {
            write!(f, "(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl ThetaObject {
    pub fn new(level: usize, children: Vec<ThetaObject>) -> Result<Self> {
        if level == 0 && !children.is_empty() {
            return Err(Error::LevelMismatch("level-0 objects have no children".into()));
        }
        for c in &children {
            if c.level + 1 != level {
                return Err(Error::LevelMismatch(format!(
                    "child {c} has level {}, expected {}",
                    c.level,
                    level.wrapping_sub(1)
                )));
            }
        }
        Ok(ThetaObject { level, children })
    }

    /// The terminal object of the given level: `.` at level 0, else `[0]`.
    pub fn terminal(level: usize) -> Self {
        ThetaObject { level, children: Vec::new() }
    }

    pub fn is_terminal(&self) -> bool {
        self.children.is_empty()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn children(&self) -> &[ThetaObject] {
        &self.children
    }

    /// Number of children of the root, the `m` of `[m](...)`.
    pub fn width(&self) -> usize {
        self.children.len()
    }

    /// Edge count of the tree.
    pub fn size(&self) -> usize {
        self.children.len() + self.children.iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// Suspension: the tree `[1](self)` one level up.
    pub fn suspend(&self) -> Self {
        ThetaObject { level: self.level + 1, children: vec![self.clone()] }
    }

    pub fn suspend_by(&self, k: usize) -> Self {
        let mut t = self.clone();
        for _ in 0..k {
            t = t.suspend();
        }
        t
    }

    /// The same tree viewed at a (weakly) higher ambient level.
    pub fn at_level(&self, level: usize) -> Result<Self> {
        if self.height() > level {
            return Err(Error::LevelMismatch(format!(
                "tree of height {} does not fit in level {level}",
                self.height()
            )));
        }
        let children = self
            .children
            .iter()
            .map(|c| c.at_level(level - 1))
            .collect::<Result<Vec<_>>>()?;
        Ok(ThetaObject { level, children })
    }

    /// Parse the display grammar at a fixed level.  `[m]` with no child list
    /// abbreviates `m` terminal children.
    pub fn parse(s: &str, level: usize) -> Result<Self> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let obj = parse_object(bytes, &mut pos, level)?;
        if pos != bytes.len() {
            return Err(Error::Parse { pos, msg: "trailing input".into() });
        }
        Ok(obj)
    }
}

fn parse_object(s: &[u8], pos: &mut usize, level: usize) -> Result<ThetaObject> {
    let err = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.into() };
    if *pos >= s.len() {
        return Err(err(*pos, "unexpected end of input"));
    }
    if s[*pos] == b'.' {
        if level != 0 {
            return Err(err(*pos, "`.` only denotes the level-0 object"));
        }
        *pos += 1;
        return Ok(ThetaObject::terminal(0));
    }
    if level == 0 {
        return Err(err(*pos, "expected `.` at level 0"));
    }
    if s[*pos] != b'[' {
        return Err(err(*pos, "expected `[`"));
    }
    *pos += 1;
    let start = *pos;
    while *pos < s.len() && s[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return Err(err(*pos, "expected a width"));
    }
    let m: usize = std::str::from_utf8(&s[start..*pos])
        .unwrap()
        .parse()
        .map_err(|_| err(start, "width out of range"))?;
    if *pos >= s.len() || s[*pos] != b']' {
        return Err(err(*pos, "expected `]`"));
    }
    *pos += 1;
    let mut children = Vec::with_capacity(m);
    if *pos < s.len() && s[*pos] == b'(' {
        *pos += 1;
        for i in 0..m {
            if i > 0 {
                if *pos >= s.len() || s[*pos] != b',' {
                    return Err(err(*pos, "expected `,`"));
                }
                *pos += 1;
            }
            children.push(parse_object(s, pos, level - 1)?);
        }
        if *pos >= s.len() || s[*pos] != b')' {
            return Err(err(*pos, "expected `)`"));
        }
        *pos += 1;
    } else {
        children = vec![ThetaObject::terminal(level - 1); m];
    }
    ThetaObject::new(level, children)
}

/// A wreath-product morphism: a simplex map plus componentwise tree maps.
///
/// `components[i-1]` lists `f_ij` for `j` running over the interval
/// `(delta(i-1), delta(i)]` in order.  Build values through [`ThetaMorphism::from_parts`],
/// [`identity`], [`compose_theta`] or an enumeration; the fields are public
/// for pattern matching, not for unchecked construction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThetaMorphism {
    pub src: ThetaObject,
    pub dst: ThetaObject,
    pub delta: MonotoneMap,
    pub components: Vec<Vec<ThetaMorphism>>,
}

impl fmt::Debug for ThetaMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.delta.digits())?;
        for row in &self.components {
            for g in row {
                write!(f, ";{g:?}")?;
            }
        }
        write!(f, ")")
    }
}

impl ThetaMorphism {
    /// Validated constructor: checks ranks, interval shapes and endpoints.
    pub fn from_parts(
        src: ThetaObject,
        dst: ThetaObject,
        delta: MonotoneMap,
        components: Vec<Vec<ThetaMorphism>>,
    ) -> Result<Self> {
        if src.level() != dst.level() {
            return Err(Error::LevelMismatch(format!(
                "morphism endpoints live at levels {} and {}",
                src.level(),
                dst.level()
            )));
        }
        if delta.src_rank != src.width() || delta.dst_rank != dst.width() {
            return Err(Error::RankMismatch(format!(
                "delta [{}]->[{}] does not match widths {} and {}",
                delta.src_rank,
                delta.dst_rank,
                src.width(),
                dst.width()
            )));
        }
        if components.len() != src.width() {
            return Err(Error::StructuralMismatch(format!(
                "expected {} component rows, got {}",
                src.width(),
                components.len()
            )));
        }
        for i in 1..=src.width() {
            let lo = delta.value(i - 1);
            let hi = delta.value(i);
            let row = &components[i - 1];
            if row.len() != hi - lo {
                return Err(Error::StructuralMismatch(format!(
                    "row {i} has {} entries, interval ({lo},{hi}] needs {}",
                    row.len(),
                    hi - lo
                )));
            }
            for (t, f) in row.iter().enumerate() {
                let j = lo + 1 + t;
                if f.src != src.children[i - 1] || f.dst != dst.children[j - 1] {
                    return Err(Error::StructuralMismatch(format!(
                        "component ({i},{j}) must map {} to {}",
                        src.children[i - 1],
                        dst.children[j - 1]
                    )));
                }
            }
        }
        Ok(ThetaMorphism { src, dst, delta, components })
    }

    pub fn identity(obj: &ThetaObject) -> Self {
        let m = obj.width();
        ThetaMorphism {
            src: obj.clone(),
            dst: obj.clone(),
            delta: MonotoneMap::identity(m),
            components: obj.children.iter().map(|c| vec![ThetaMorphism::identity(c)]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.dst
            && self.delta.is_identity()
            && self.components.iter().all(|row| row.iter().all(|f| f.is_identity()))
    }

    /// The unique morphism to the terminal object of the source's level.
    pub fn to_terminal(src: &ThetaObject) -> Self {
        let m = src.width();
        ThetaMorphism {
            src: src.clone(),
            dst: ThetaObject::terminal(src.level()),
            delta: MonotoneMap::constant(m, 0, 0),
            components: vec![Vec::new(); m],
        }
    }

    /// Suspension: the morphism `[1](f): [1](src) -> [1](dst)`.
    pub fn suspend(&self) -> Self {
        ThetaMorphism {
            src: self.src.suspend(),
            dst: self.dst.suspend(),
            delta: MonotoneMap::identity(1),
            components: vec![vec![self.clone()]],
        }
    }

    pub fn suspend_by(&self, k: usize) -> Self {
        let mut f = self.clone();
        for _ in 0..k {
            f = f.suspend();
        }
        f
    }

    /// The same morphism with both endpoints re-leveled.
    pub fn at_level(&self, level: usize) -> Result<Self> {
        let src = self.src.at_level(level)?;
        let dst = self.dst.at_level(level)?;
        let components = self
            .components
            .iter()
            .map(|row| row.iter().map(|f| f.at_level(level - 1)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ThetaMorphism { src, dst, delta: self.delta.clone(), components })
    }

    /// Encode as `{"delta": "...", "components": [[..]]}`, recursively.
    pub fn to_json(&self) -> Value {
        let components: Vec<Value> = self
            .components
            .iter()
            .map(|row| Value::Array(row.iter().map(|f| f.to_json()).collect()))
            .collect();
        serde_json::json!({
            "delta": self.delta.digits(),
            "components": components,
        })
    }

    /// Parse the JSON encoding against known endpoints.
    pub fn from_json(v: &Value, src: &ThetaObject, dst: &ThetaObject) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse { pos: 0, msg: "morphism must be an object".into() })?;
        let delta_s = obj
            .get("delta")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse { pos: 0, msg: "missing `delta` string".into() })?;
        let delta = MonotoneMap::from_digits(delta_s, dst.width())?;
        if delta.src_rank != src.width() {
            return Err(Error::RankMismatch("delta does not match the source width".into()));
        }
        let rows = obj
            .get("components")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse { pos: 0, msg: "missing `components` array".into() })?;
        if rows.len() != src.width() {
            return Err(Error::StructuralMismatch("wrong number of component rows".into()));
        }
        let mut components = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Parse { pos: 0, msg: "component row must be an array".into() })?;
            let lo = delta.value(i);
            let mut out_row = Vec::with_capacity(row.len());
            for (t, entry) in row.iter().enumerate() {
                let j = lo + 1 + t;
                if j > dst.width() {
                    return Err(Error::StructuralMismatch("component row overruns interval".into()));
                }
                out_row.push(ThetaMorphism::from_json(
                    entry,
                    &src.children()[i],
                    &dst.children()[j - 1],
                )?);
            }
            components.push(out_row);
        }
        ThetaMorphism::from_parts(src.clone(), dst.clone(), delta, components)
    }
}

/// Composite `g . f`, defined when `f.dst == g.src`.
pub fn compose_theta(g: &ThetaMorphism, f: &ThetaMorphism) -> Result<ThetaMorphism> {
    if f.dst != g.src {
        return Err(Error::StructuralMismatch(format!(
            "cannot compose: middle objects {} and {} differ",
            f.dst, g.src
        )));
    }
    let delta = compose_delta(&g.delta, &f.delta)?;
    let m = f.src.width();
    let mut components = Vec::with_capacity(m);
    for i in 1..=m {
        let lo = f.delta.value(i - 1);
        let hi = f.delta.value(i);
        let out_lo = g.delta.value(lo);
        let out_hi = g.delta.value(hi);
        let mut row = Vec::with_capacity(out_hi - out_lo);
        for k in out_lo + 1..=out_hi {
            // the unique j with lo < j <= hi and g.delta(j-1) < k <= g.delta(j)
            let j = (lo + 1..=hi)
                .find(|&j| g.delta.value(j - 1) < k && k <= g.delta.value(j))
                .expect("interval arithmetic guarantees a unique middle index");
            let gf = compose_theta(
                &g.components[j - 1][k - g.delta.value(j - 1) - 1],
                &f.components[i - 1][j - lo - 1],
            )?;
            row.push(gf);
        }
        components.push(row);
    }
    Ok(ThetaMorphism { src: f.src.clone(), dst: g.dst.clone(), delta, components })
}

/// All morphisms `src -> dst`, in a deterministic order: the simplex map
/// runs lexicographically, then components vary with the last factor fastest.
pub fn enumerate_hom(src: &ThetaObject, dst: &ThetaObject) -> Vec<ThetaMorphism> {
    assert_eq!(src.level(), dst.level(), "hom sets need a common level");
    let m = src.width();
    let n = dst.width();
    let mut out = Vec::new();
    for delta in enumerate_delta(m, n) {
        // factor hom sets in row-major (i, j) order
        let mut factor_homs: Vec<Vec<ThetaMorphism>> = Vec::new();
        let mut shape: Vec<(usize, usize)> = Vec::new();
        for i in 1..=m {
            for j in delta.value(i - 1) + 1..=delta.value(i) {
                factor_homs.push(enumerate_hom(&src.children()[i - 1], &dst.children()[j - 1]));
                shape.push((i, j));
            }
        }
        if factor_homs.iter().any(|h| h.is_empty()) {
            continue;
        }
        let mut counter = vec![0usize; factor_homs.len()];
        loop {
            let mut components: Vec<Vec<ThetaMorphism>> = vec![Vec::new(); m];
            for (slot, &(i, _)) in shape.iter().enumerate() {
                components[i - 1].push(factor_homs[slot][counter[slot]].clone());
            }
            out.push(ThetaMorphism {
                src: src.clone(),
                dst: dst.clone(),
                delta: delta.clone(),
                components,
            });
            // advance the mixed-radix counter, last slot fastest
            let mut slot = factor_homs.len();
            loop {
                if slot == 0 {
                    break;
                }
                slot -= 1;
                counter[slot] += 1;
                if counter[slot] < factor_homs[slot].len() {
                    break;
                }
                counter[slot] = 0;
                if slot == 0 {
                    slot = usize::MAX;
                    break;
                }
            }
            if slot == usize::MAX || factor_homs.is_empty() {
                break;
            }
        }
    }
    out
}

/// `|hom(src, dst)|` by the product formula, without materializing.
pub fn hom_count(src: &ThetaObject, dst: &ThetaObject) -> u64 {
    fn go(src: &ThetaObject, dst: &ThetaObject, memo: &mut HashMap<(ThetaObject, ThetaObject), u64>) -> u64 {
        if let Some(&c) = memo.get(&(src.clone(), dst.clone())) {
            return c;
        }
        let m = src.width();
        let mut total = 0u64;
        for delta in enumerate_delta(m, dst.width()) {
            let mut prod = 1u64;
            'factors: for i in 1..=m {
                for j in delta.value(i - 1) + 1..=delta.value(i) {
                    prod = prod
                        .checked_mul(go(&src.children()[i - 1], &dst.children()[j - 1], memo))
                        .expect("hom count overflow");
                    if prod == 0 {
                        break 'factors;
                    }
                }
            }
            total = total.checked_add(prod).expect("hom count overflow");
        }
        memo.insert((src.clone(), dst.clone()), total);
        total
    }
    go(src, dst, &mut HashMap::new())
}

/// The morphism determined by a simplex map alone, when one is forced: each
/// component must be an identity (equal children) or the unique map to a
/// terminal child.  Intervals with two or more targets are accepted only
/// when every target child in them is terminal.
pub fn canonical_theta(
    src: &ThetaObject,
    dst: &ThetaObject,
    delta: &MonotoneMap,
) -> Result<ThetaMorphism> {
    let m = src.width();
    if src.level() != dst.level() {
        return Err(Error::LevelMismatch("endpoints live at different levels".into()));
    }
    if delta.src_rank != m || delta.dst_rank != dst.width() {
        return Err(Error::RankMismatch("simplex map does not match the widths".into()));
    }
    let mut components = Vec::with_capacity(m);
    for i in 1..=m {
        let lo = delta.value(i - 1);
        let hi = delta.value(i);
        let mut row = Vec::with_capacity(hi - lo);
        for j in lo + 1..=hi {
            let s = &src.children()[i - 1];
            let d = &dst.children()[j - 1];
            if hi - lo >= 2 && !d.is_terminal() {
                return Err(Error::StructuralMismatch(format!(
                    "interval ({lo},{hi}] hits non-terminal child {d}; no forced component"
                )));
            }
            if d.is_terminal() {
                row.push(ThetaMorphism::to_terminal(s));
            } else if s == d {
                row.push(ThetaMorphism::identity(s));
            } else {
                return Err(Error::StructuralMismatch(format!(
                    "no forced component {s} -> {d}"
                )));
            }
        }
        components.push(row);
    }
    Ok(ThetaMorphism {
        src: src.clone(),
        dst: dst.clone(),
        delta: delta.clone(),
        components,
    })
}

/// All objects of the level with size at most `max_size`, sorted by size
/// then by display string.
pub fn all_objects(level: usize, max_size: usize) -> Vec<ThetaObject> {
    fn child_lists(level: usize, count: usize, budget: usize) -> Vec<Vec<ThetaObject>> {
        if count == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for first in all_objects(level, budget) {
            for rest in child_lists(level, count - 1, budget - first.size()) {
                let mut list = Vec::with_capacity(count);
                list.push(first.clone());
                list.extend(rest);
                out.push(list);
            }
        }
        out
    }
    let mut out = Vec::new();
    if level == 0 {
        out.push(ThetaObject::terminal(0));
    } else {
        for m in 0..=max_size {
            for children in child_lists(level - 1, m, max_size - m) {
                out.push(ThetaObject { level, children });
            }
        }
    }
    out.sort_by_key(|t| (t.size(), t.to_string()));
    out.dedup();
    out
}

/// Whether a simplex map is sequential, lifted to the wreath context.
pub fn delta_of(f: &ThetaMorphism) -> &MonotoneMap {
    &f.delta
}

pub fn is_sequential_morphism(f: &ThetaMorphism) -> bool {
    classify(&f.delta).sequential
}
