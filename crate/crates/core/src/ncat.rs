//! Finite strict n-categories: globular cell data with compositions and
//! identities, the tautological functor from tree objects, discrete nerves
//! by exhaustive functor enumeration, and the rigidity predicates that
//! characterize the categories with Segal-and-complete discrete nerves.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::delta::MonotoneMap;
use crate::presheaf::{FinPresheaf, PresheafMap};
use crate::theta::{canonical_theta, ThetaMorphism, ThetaObject};
use crate::window::Window;
use crate::{Error, Result};

/// Cells per dimension with source and target maps, subject to the
/// globularity identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobularSet {
    pub n: usize,
    /// `cells[d]` lists the labels of the d-cells, `0 <= d <= n`.
    pub cells: Vec<Vec<String>>,
    /// `src[d][c]` is the source (d-1)-cell of c, `1 <= d <= n`; `src[0]` is empty.
    pub src: Vec<Vec<usize>>,
    pub tgt: Vec<Vec<usize>>,
}

impl GlobularSet {
    pub fn new(
        n: usize,
        cells: Vec<Vec<String>>,
        src: Vec<Vec<usize>>,
        tgt: Vec<Vec<usize>>,
    ) -> Result<GlobularSet> {
        if cells.len() != n + 1 || src.len() != n + 1 || tgt.len() != n + 1 {
            return Err(Error::StructuralMismatch(format!(
                "globular data must carry dimensions 0..={n}"
            )));
        }
        if !src[0].is_empty() || !tgt[0].is_empty() {
            return Err(Error::StructuralMismatch("0-cells have no boundary".into()));
        }
        for d in 1..=n {
            if src[d].len() != cells[d].len() || tgt[d].len() != cells[d].len() {
                return Err(Error::StructuralMismatch(format!(
                    "boundary maps at dimension {d} do not match the cell count"
                )));
            }
            for c in 0..cells[d].len() {
                if src[d][c] >= cells[d - 1].len() || tgt[d][c] >= cells[d - 1].len() {
                    return Err(Error::StructuralMismatch(format!(
                        "boundary of cell {c} at dimension {d} is out of range"
                    )));
                }
            }
        }
        for d in 2..=n {
            for c in 0..cells[d].len() {
                let (s, t) = (src[d][c], tgt[d][c]);
                if src[d - 1][s] != src[d - 1][t] || tgt[d - 1][s] != tgt[d - 1][t] {
                    return Err(Error::Invariant(format!(
                        "globularity fails at dimension {d}, cell {c}"
                    )));
                }
            }
        }
        Ok(GlobularSet { n, cells, src, tgt })
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().map(|v| v.len()).sum()
    }

    /// Iterated source down to dimension `j` of the d-cell `c`.
    pub fn src_to(&self, j: usize, d: usize, c: usize) -> usize {
        let mut cur = c;
        for dim in (j + 1..=d).rev() {
            cur = self.src[dim][cur];
        }
        cur
    }

    pub fn tgt_to(&self, j: usize, d: usize, c: usize) -> usize {
        let mut cur = c;
        for dim in (j + 1..=d).rev() {
            cur = self.tgt[dim][cur];
        }
        cur
    }
}

/// A finite strict n-category: globular cells, identity maps, and a total
/// table of j-fold compositions for every pair of composable cells.  The
/// constructor checks associativity, units, interchange, boundary laws and
/// functoriality of identities, exhaustively for categories with at most
/// 200 cells and on a deterministic stride of cases above that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictNCat {
    pub glob: GlobularSet,
    /// `ids[d][c]` is the identity (d+1)-cell on the d-cell c, `d < n`;
    /// `ids[n]` is empty.
    pub ids: Vec<Vec<usize>>,
    /// `comp[(d, j)][g][f]` is `g` after `f` along their shared j-boundary,
    /// present exactly when the j-target of f equals the j-source of g.
    pub comp: BTreeMap<(usize, usize), Vec<Vec<Option<usize>>>>,
}

const EXHAUSTIVE_CELL_BOUND: usize = 200;
const SAMPLED_CASE_BOUND: usize = 400_000;

impl StrictNCat {
    pub fn new(
        glob: GlobularSet,
        ids: Vec<Vec<usize>>,
        comp: BTreeMap<(usize, usize), Vec<Vec<Option<usize>>>>,
    ) -> Result<StrictNCat> {
        let cat = StrictNCat { glob, ids, comp };
        cat.check_axioms()?;
        Ok(cat)
    }

    pub fn n(&self) -> usize {
        self.glob.n
    }

    pub fn cells(&self, d: usize) -> &[String] {
        &self.glob.cells[d]
    }

    pub fn compose(&self, d: usize, j: usize, g: usize, f: usize) -> Result<usize> {
        self.comp
            .get(&(d, j))
            .and_then(|t| t[g][f])
            .ok_or_else(|| Error::StructuralMismatch(format!(
                "cells {g} and {f} are not {j}-composable at dimension {d}"
            )))
    }

    /// The iterated identity on the d-cell `c`, raised to dimension `to`.
    pub fn iterated_id(&self, d: usize, c: usize, to: usize) -> usize {
        let mut cur = c;
        for dim in d..to {
            cur = self.ids[dim][cur];
        }
        cur
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.glob.n;
        if self.ids.len() != n + 1 || !self.ids[n].is_empty() {
            return Err(Error::StructuralMismatch(
                "identity maps must cover dimensions 0..n-1 and stop there".into(),
            ));
        }
        for d in 0..n {
            if self.ids[d].len() != self.glob.cells[d].len() {
                return Err(Error::StructuralMismatch(format!(
                    "identity map at dimension {d} does not match the cell count"
                )));
            }
            for c in 0..self.ids[d].len() {
                let i = self.ids[d][c];
                if i >= self.glob.cells[d + 1].len()
                    || self.glob.src[d + 1][i] != c
                    || self.glob.tgt[d + 1][i] != c
                {
                    return Err(Error::Invariant(format!(
                        "identity on cell {c} at dimension {d} has the wrong boundary"
                    )));
                }
            }
        }
        let exhaustive = self.glob.cell_count() <= EXHAUSTIVE_CELL_BOUND;
        for d in 1..=n {
            for j in 0..d {
                self.check_table(d, j)?;
            }
        }
        for d in 1..=n {
            for j in 0..d {
                self.check_units(d, j)?;
                self.check_assoc(d, j, exhaustive)?;
                if d < n {
                    self.check_id_functoriality(d, j)?;
                }
                for k in 0..j {
                    self.check_interchange(d, j, k, exhaustive)?;
                }
            }
        }
        Ok(())
    }

    fn check_table(&self, d: usize, j: usize) -> Result<()> {
        let nd = self.glob.cells[d].len();
        let table = self.comp.get(&(d, j)).ok_or_else(|| {
            Error::StructuralMismatch(format!("missing composition table ({d}, {j})"))
        })?;
        if table.len() != nd || table.iter().any(|row| row.len() != nd) {
            return Err(Error::StructuralMismatch(format!(
                "composition table ({d}, {j}) is not {nd} by {nd}"
            )));
        }
        for g in 0..nd {
            for f in 0..nd {
                let composable = self.glob.src_to(j, d, g) == self.glob.tgt_to(j, d, f);
                match table[g][f] {
                    None if composable => {
                        return Err(Error::Invariant(format!(
                            "({d}, {j}) composition of {g} after {f} is missing"
                        )))
                    }
                    Some(_) if !composable => {
                        return Err(Error::Invariant(format!(
                            "({d}, {j}) composition of {g} after {f} should not exist"
                        )))
                    }
                    Some(gf) => {
                        if gf >= nd {
                            return Err(Error::StructuralMismatch(format!(
                                "composite of {g} after {f} is out of range"
                            )));
                        }
                        self.check_composite_boundary(d, j, g, f, gf)?;
                    }
                    None => {}
                }
            }
        }
        Ok(())
    }

    fn check_composite_boundary(
        &self,
        d: usize,
        j: usize,
        g: usize,
        f: usize,
        gf: usize,
    ) -> Result<()> {
        let bad = || {
            Err(Error::Invariant(format!(
                "boundary of the ({d}, {j}) composite of {g} after {f} is wrong"
            )))
        };
        if j == d - 1 {
            if self.glob.src[d][gf] != self.glob.src[d][f]
                || self.glob.tgt[d][gf] != self.glob.tgt[d][g]
            {
                return bad();
            }
        } else {
            let table = &self.comp[&(d - 1, j)];
            if table[self.glob.src[d][g]][self.glob.src[d][f]] != Some(self.glob.src[d][gf])
                || table[self.glob.tgt[d][g]][self.glob.tgt[d][f]] != Some(self.glob.tgt[d][gf])
            {
                return bad();
            }
        }
        Ok(())
    }

    fn check_units(&self, d: usize, j: usize) -> Result<()> {
        let table = &self.comp[&(d, j)];
        for c in 0..self.glob.cells[d].len() {
            let us = self.iterated_id(j, self.glob.src_to(j, d, c), d);
            let ut = self.iterated_id(j, self.glob.tgt_to(j, d, c), d);
            if table[c][us] != Some(c) || table[ut][c] != Some(c) {
                return Err(Error::Invariant(format!(
                    "unit law fails for cell {c} at ({d}, {j})"
                )));
            }
        }
        Ok(())
    }

    fn check_assoc(&self, d: usize, j: usize, exhaustive: bool) -> Result<()> {
        let nd = self.glob.cells[d].len();
        let table = &self.comp[&(d, j)];
        let mut by_src: HashMap<usize, Vec<usize>> = HashMap::new();
        for g in 0..nd {
            by_src.entry(self.glob.src_to(j, d, g)).or_default().push(g);
        }
        let empty = Vec::new();
        let mut count = 0usize;
        let stride = if exhaustive { 1 } else { 7 };
        for f in 0..nd {
            let gs = by_src.get(&self.glob.tgt_to(j, d, f)).unwrap_or(&empty);
            for &g in gs {
                let gf = table[g][f].unwrap();
                let hs = by_src.get(&self.glob.tgt_to(j, d, g)).unwrap_or(&empty);
                for &h in hs {
                    count += 1;
                    if count % stride != 0 {
                        continue;
                    }
                    if !exhaustive && count > SAMPLED_CASE_BOUND * stride {
                        return Ok(());
                    }
                    if table[h][gf] != table[table[h][g].unwrap()][f] {
                        return Err(Error::Invariant(format!(
                            "associativity fails at ({d}, {j}) on {h}, {g}, {f}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_id_functoriality(&self, d: usize, j: usize) -> Result<()> {
        let nd = self.glob.cells[d].len();
        let table = &self.comp[&(d, j)];
        let upper = &self.comp[&(d + 1, j)];
        for g in 0..nd {
            for f in 0..nd {
                if let Some(gf) = table[g][f] {
                    if upper[self.ids[d][g]][self.ids[d][f]] != Some(self.ids[d][gf]) {
                        return Err(Error::Invariant(format!(
                            "identities are not functorial at ({d}, {j}) on {g}, {f}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_interchange(&self, d: usize, j: usize, k: usize, exhaustive: bool) -> Result<()> {
        let nd = self.glob.cells[d].len();
        let tj = &self.comp[&(d, j)];
        let tk = &self.comp[&(d, k)];
        // j-composable pairs, bucketed by their shared k-source
        let mut pairs_by_ksrc: HashMap<usize, Vec<(usize, usize, usize)>> = HashMap::new();
        let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
        for g in 0..nd {
            for f in 0..nd {
                if let Some(gf) = tj[g][f] {
                    pairs_by_ksrc
                        .entry(self.glob.src_to(k, d, f))
                        .or_default()
                        .push((g, f, gf));
                    pairs.push((g, f, gf));
                }
            }
        }
        let empty = Vec::new();
        let mut count = 0usize;
        let stride = if exhaustive { 1 } else { 11 };
        for &(g1, f1, c1) in &pairs {
            let above = pairs_by_ksrc.get(&self.glob.tgt_to(k, d, f1)).unwrap_or(&empty);
            for &(g2, f2, c2) in above {
                count += 1;
                if count % stride != 0 {
                    continue;
                }
                if !exhaustive && count > SAMPLED_CASE_BOUND * stride {
                    return Ok(());
                }
                let lhs = tk[c2][c1];
                let rhs = match (tk[g2][g1], tk[f2][f1]) {
                    (Some(gg), Some(ff)) => tj[gg][ff],
                    _ => None,
                };
                if lhs.is_none() || lhs != rhs {
                    return Err(Error::Invariant(format!(
                        "interchange fails at ({d}, {j}, {k}) on ({g2},{f2}) over ({g1},{f1})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Encode as a JSON object with cells, boundaries, identities and
    /// composition triples.
    pub fn to_json(&self) -> Value {
        let comp: Vec<Value> = self
            .comp
            .iter()
            .map(|(&(d, j), table)| {
                let mut triples = Vec::new();
                for (g, row) in table.iter().enumerate() {
                    for (f, entry) in row.iter().enumerate() {
                        if let Some(gf) = entry {
                            triples.push(json!([g, f, gf]));
                        }
                    }
                }
                json!({"dim": d, "along": j, "triples": triples})
            })
            .collect();
        json!({
            "n": self.glob.n,
            "cells": self.glob.cells,
            "src": self.glob.src,
            "tgt": self.glob.tgt,
            "ids": self.ids,
            "comp": comp,
        })
    }

    pub fn from_json(v: &Value) -> Result<StrictNCat> {
        let bad = |msg: &str| Error::StructuralMismatch(msg.to_string());
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing n"))? as usize;
        let get_usize_rows = |key: &str| -> Result<Vec<Vec<usize>>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| bad(&format!("missing {key}")))?
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| bad("expected an array of arrays"))?
                        .iter()
                        .map(|x| {
                            x.as_u64().map(|u| u as usize).ok_or_else(|| bad("expected an index"))
                        })
                        .collect()
                })
                .collect()
        };
        let cells: Vec<Vec<String>> = v
            .get("cells")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing cells"))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| bad("expected an array of label arrays"))?
                    .iter()
                    .map(|x| {
                        x.as_str().map(str::to_string).ok_or_else(|| bad("expected a label"))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let src = get_usize_rows("src")?;
        let tgt = get_usize_rows("tgt")?;
        let ids = get_usize_rows("ids")?;
        let mut comp = BTreeMap::new();
        for entry in
            v.get("comp").and_then(Value::as_array).ok_or_else(|| bad("missing comp"))?
        {
            let d = entry.get("dim").and_then(Value::as_u64).ok_or_else(|| bad("missing dim"))?
                as usize;
            let j = entry.get("along").and_then(Value::as_u64).ok_or_else(|| bad("missing along"))?
                as usize;
            if d > n || cells.len() != n + 1 {
                return Err(bad("composition table out of range"));
            }
            let nd = cells[d].len();
            let mut table = vec![vec![None; nd]; nd];
            for t in entry
                .get("triples")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing triples"))?
            {
                let t = t.as_array().ok_or_else(|| bad("expected [g, f, gf]"))?;
                if t.len() != 3 {
                    return Err(bad("expected [g, f, gf]"));
                }
                let idx = |i: usize| -> Result<usize> {
                    t[i].as_u64().map(|u| u as usize).ok_or_else(|| bad("expected an index"))
                };
                let (g, f, gf) = (idx(0)?, idx(1)?, idx(2)?);
                if g >= nd || f >= nd || gf >= nd {
                    return Err(bad("composition triple out of range"));
                }
                table[g][f] = Some(gf);
            }
            comp.insert((d, j), table);
        }
        StrictNCat::new(GlobularSet::new(n, cells, src, tgt)?, ids, comp)
    }
}

/// A strict n-functor as a map of cell indices per dimension.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NFunctor {
    pub maps: Vec<Vec<usize>>,
}

impl NFunctor {
    pub fn identity(c: &StrictNCat) -> NFunctor {
        NFunctor { maps: c.glob.cells.iter().map(|v| (0..v.len()).collect()).collect() }
    }

    /// `self` after `earlier`, both read as functors between matching
    /// categories.
    pub fn after(&self, earlier: &NFunctor) -> Result<NFunctor> {
        if self.maps.len() != earlier.maps.len() {
            return Err(Error::StructuralMismatch("functor dimensions differ".into()));
        }
        let maps = earlier
            .maps
            .iter()
            .zip(&self.maps)
            .map(|(e, s)| e.iter().map(|&x| s[x]).collect())
            .collect();
        Ok(NFunctor { maps })
    }

    pub fn check(&self, dom: &StrictNCat, cod: &StrictNCat) -> Result<()> {
        let n = dom.n();
        if cod.n() != n || self.maps.len() != n + 1 {
            return Err(Error::StructuralMismatch("functor dimensions differ".into()));
        }
        for d in 0..=n {
            if self.maps[d].len() != dom.glob.cells[d].len() {
                return Err(Error::StructuralMismatch(format!(
                    "cell map at dimension {d} has the wrong length"
                )));
            }
            for &v in &self.maps[d] {
                if v >= cod.glob.cells[d].len() {
                    return Err(Error::StructuralMismatch(format!(
                        "cell image out of range at dimension {d}"
                    )));
                }
            }
        }
        for d in 1..=n {
            for c in 0..dom.glob.cells[d].len() {
                if cod.glob.src[d][self.maps[d][c]] != self.maps[d - 1][dom.glob.src[d][c]]
                    || cod.glob.tgt[d][self.maps[d][c]] != self.maps[d - 1][dom.glob.tgt[d][c]]
                {
                    return Err(Error::Invariant(format!(
                        "functor breaks a boundary at dimension {d}, cell {c}"
                    )));
                }
            }
        }
        for d in 0..n {
            for c in 0..dom.glob.cells[d].len() {
                if self.maps[d + 1][dom.ids[d][c]] != cod.ids[d][self.maps[d][c]] {
                    return Err(Error::Invariant(format!(
                        "functor breaks an identity at dimension {d}, cell {c}"
                    )));
                }
            }
        }
        for (&(d, j), table) in &dom.comp {
            let cod_table = &cod.comp[&(d, j)];
            for (g, row) in table.iter().enumerate() {
                for (f, entry) in row.iter().enumerate() {
                    if let Some(gf) = entry {
                        if cod_table[self.maps[d][g]][self.maps[d][f]]
                            != Some(self.maps[d][*gf])
                        {
                            return Err(Error::Invariant(format!(
                                "functor breaks a ({d}, {j}) composition on {g}, {f}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Composition checks scheduled by the last participant to be assigned
/// during backtracking: for each dimension, `at[k]` lists `(j, g, f, gf)`
/// with `max(g, f, gf) == k`.
struct CompSchedule {
    at: Vec<Vec<Vec<(usize, usize, usize, usize)>>>,
}

fn comp_schedule(dom: &StrictNCat) -> CompSchedule {
    let n = dom.n();
    let mut at: Vec<Vec<Vec<(usize, usize, usize, usize)>>> = (0..=n)
        .map(|d| vec![Vec::new(); dom.glob.cells[d].len()])
        .collect();
    for (&(d, j), table) in &dom.comp {
        for (g, row) in table.iter().enumerate() {
            for (f, entry) in row.iter().enumerate() {
                if let Some(gf) = entry {
                    let last = g.max(f).max(*gf);
                    at[d][last].push((j, g, f, *gf));
                }
            }
        }
    }
    CompSchedule { at }
}

/// All strict n-functors from `dom` to `cod`, in lexicographic order of
/// their flattened cell maps.  Enumeration assigns every cell dimension by
/// dimension; identity cells are forced, boundaries filter the candidates,
/// and composition triples are checked as soon as all three members have
/// images.
pub fn ncat_functors(dom: &StrictNCat, cod: &StrictNCat) -> Result<Vec<NFunctor>> {
    if dom.n() != cod.n() {
        return Err(Error::StructuralMismatch("functor endpoints differ in dimension".into()));
    }
    let n = dom.n();
    let schedule = comp_schedule(dom);
    // id_preimage[d][c] = the (d-1)-cell whose identity is c, if any
    let mut id_preimage: Vec<Vec<Option<usize>>> =
        (0..=n).map(|d| vec![None; dom.glob.cells[d].len()]).collect();
    for d in 0..n {
        for c in 0..dom.ids[d].len() {
            id_preimage[d + 1][dom.ids[d][c]] = Some(c);
        }
    }
    let mut maps: Vec<Vec<usize>> = (0..=n).map(|d| vec![0; dom.glob.cells[d].len()]).collect();
    let mut out = Vec::new();
    search_functors(dom, cod, &schedule, &id_preimage, &mut maps, 0, 0, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search_functors(
    dom: &StrictNCat,
    cod: &StrictNCat,
    schedule: &CompSchedule,
    id_preimage: &[Vec<Option<usize>>],
    maps: &mut Vec<Vec<usize>>,
    d: usize,
    k: usize,
    out: &mut Vec<NFunctor>,
) {
    let n = dom.n();
    if d > n {
        out.push(NFunctor { maps: maps.clone() });
        return;
    }
    if k == dom.glob.cells[d].len() {
        search_functors(dom, cod, schedule, id_preimage, maps, d + 1, 0, out);
        return;
    }
    let candidates: Vec<usize> = if let Some(c0) = id_preimage[d][k] {
        vec![cod.ids[d - 1][maps[d - 1][c0]]]
    } else if d == 0 {
        (0..cod.glob.cells[0].len()).collect()
    } else {
        let s = maps[d - 1][dom.glob.src[d][k]];
        let t = maps[d - 1][dom.glob.tgt[d][k]];
        (0..cod.glob.cells[d].len())
            .filter(|&v| cod.glob.src[d][v] == s && cod.glob.tgt[d][v] == t)
            .collect()
    };
    'next: for v in candidates {
        maps[d][k] = v;
        for &(j, g, f, gf) in &schedule.at[d][k] {
            let table = &cod.comp[&(d, j)];
            if table[maps[d][g]][maps[d][f]] != Some(maps[d][gf]) {
                continue 'next;
            }
        }
        search_functors(dom, cod, schedule, id_preimage, maps, d, k + 1, out);
    }
}

pub fn ncat_functor_count(dom: &StrictNCat, cod: &StrictNCat) -> Result<usize> {
    Ok(ncat_functors(dom, cod)?.len())
}

/// Functor enumeration that only branches on globular generators (cells
/// that are neither identities nor composites of previously generated
/// cells) and completes the rest by forced propagation.  Fails loudly when
/// propagation cannot determine every cell; agreement with the full
/// enumeration is pinned on the test corpus.
pub fn ncat_functors_generated(dom: &StrictNCat, cod: &StrictNCat) -> Result<Vec<NFunctor>> {
    if dom.n() != cod.n() {
        return Err(Error::StructuralMismatch("functor endpoints differ in dimension".into()));
    }
    let n = dom.n();
    // mark cells reachable from the generators by identities and composition
    let mut derived: Vec<Vec<bool>> =
        (0..=n).map(|d| vec![false; dom.glob.cells[d].len()]).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for d in 0..n {
            for c in 0..dom.ids[d].len() {
                if !derived[d + 1][dom.ids[d][c]] {
                    derived[d + 1][dom.ids[d][c]] = true;
                    changed = true;
                }
            }
        }
        for (&(d, _), table) in &dom.comp {
            for (g, row) in table.iter().enumerate() {
                for (f, entry) in row.iter().enumerate() {
                    if let Some(gf) = entry {
                        if *gf != g && *gf != f && !derived[d][*gf] {
                            derived[d][*gf] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
    }
    let mut generators: Vec<(usize, usize)> = Vec::new();
    for d in 0..=n {
        for c in 0..dom.glob.cells[d].len() {
            if d == 0 || !derived[d][c] {
                generators.push((d, c));
            }
        }
    }
    let assignment: Vec<Vec<Option<usize>>> =
        (0..=n).map(|d| vec![None; dom.glob.cells[d].len()]).collect();
    let mut out = Vec::new();
    search_generated(dom, cod, &generators, assignment, 0, &mut out)?;
    out.sort();
    Ok(out)
}

fn search_generated(
    dom: &StrictNCat,
    cod: &StrictNCat,
    generators: &[(usize, usize)],
    assignment: Vec<Vec<Option<usize>>>,
    next: usize,
    out: &mut Vec<NFunctor>,
) -> Result<()> {
    if next == generators.len() {
        let maps = propagate(dom, cod, assignment.clone())?;
        if let Some(maps) = maps {
            let f = NFunctor { maps };
            if f.check(dom, cod).is_ok() {
                out.push(f);
            }
        }
        return Ok(());
    }
    let (d, c) = generators[next];
    // boundaries of a generator may still be unassigned here, so candidates
    // are unfiltered; propagation rejects inconsistent choices
    for v in 0..cod.glob.cells[d].len() {
        let mut state = assignment.clone();
        state[d][c] = Some(v);
        search_generated(dom, cod, generators, state, next + 1, out)?;
    }
    Ok(())
}

/// Spread generator images to every cell: identities and composites are
/// forced, boundary images are forced downward.  Returns None on conflict.
fn propagate(
    dom: &StrictNCat,
    cod: &StrictNCat,
    mut state: Vec<Vec<Option<usize>>>,
) -> Result<Option<Vec<Vec<usize>>>> {
    let n = dom.n();
    let mut changed = true;
    while changed {
        changed = false;
        for d in 1..=n {
            for c in 0..dom.glob.cells[d].len() {
                if let Some(v) = state[d][c] {
                    for (bmap_d, bmap_c) in [
                        (dom.glob.src[d][c], cod.glob.src[d][v]),
                        (dom.glob.tgt[d][c], cod.glob.tgt[d][v]),
                    ] {
                        match state[d - 1][bmap_d] {
                            None => {
                                state[d - 1][bmap_d] = Some(bmap_c);
                                changed = true;
                            }
                            Some(old) if old != bmap_c => return Ok(None),
                            _ => {}
                        }
                    }
                }
            }
        }
        for d in 0..n {
            for c in 0..dom.ids[d].len() {
                if let Some(v) = state[d][c] {
                    let target = cod.ids[d][v];
                    match state[d + 1][dom.ids[d][c]] {
                        None => {
                            state[d + 1][dom.ids[d][c]] = Some(target);
                            changed = true;
                        }
                        Some(old) if old != target => return Ok(None),
                        _ => {}
                    }
                }
            }
        }
        for (&(d, j), table) in &dom.comp {
            for (g, row) in table.iter().enumerate() {
                for (f, entry) in row.iter().enumerate() {
                    let gf = match entry {
                        Some(gf) => *gf,
                        None => continue,
                    };
                    if let (Some(vg), Some(vf)) = (state[d][g], state[d][f]) {
                        let img = cod.comp[&(d, j)][vg][vf];
                        let img = match img {
                            Some(img) => img,
                            None => return Ok(None),
                        };
                        match state[d][gf] {
                            None => {
                                state[d][gf] = Some(img);
                                changed = true;
                            }
                            Some(old) if old != img => return Ok(None),
                            _ => {}
                        }
                    }
                }
            }
        }
    }
    let mut maps = Vec::with_capacity(n + 1);
    for row in state {
        let mut full = Vec::with_capacity(row.len());
        for entry in row {
            match entry {
                Some(v) => full.push(v),
                None => {
                    return Err(Error::Invariant(
                        "generators do not determine every cell".into(),
                    ))
                }
            }
        }
        maps.push(full);
    }
    Ok(Some(maps))
}

/// A cell of the tautological category of `[m](c...)`: an interval `(p, q]`
/// together with one child cell of the dimension below for each slot in the
/// interval.
pub type TauRepr = (usize, usize, Vec<usize>);

/// The tautological strict n-category of a tree object, with its canonical
/// cell bookkeeping.  Hom from p to q is empty for p > q, a point for
/// p = q, and the product of the children's categories in between; 0-fold
/// composition is concatenation of child tuples.
pub struct TauCat {
    pub theta: ThetaObject,
    pub cat: StrictNCat,
    pub children: Vec<TauCat>,
    reprs: Vec<Vec<TauRepr>>,
    index: Vec<HashMap<TauRepr, usize>>,
}

impl TauCat {
    pub fn repr(&self, d: usize, i: usize) -> &TauRepr {
        &self.reprs[d][i]
    }

    pub fn repr_index(&self, d: usize, r: &TauRepr) -> Result<usize> {
        self.index[d]
            .get(r)
            .copied()
            .ok_or_else(|| Error::StructuralMismatch(format!("no cell {r:?} at dimension {d}")))
    }
}

pub fn tau(theta: &ThetaObject) -> Result<TauCat> {
    let n = theta.level();
    if n == 0 {
        let glob = GlobularSet::new(0, vec![vec!["*".to_string()]], vec![vec![]], vec![vec![]])?;
        let cat = StrictNCat::new(glob, vec![vec![]], BTreeMap::new())?;
        return Ok(TauCat {
            theta: theta.clone(),
            cat,
            children: Vec::new(),
            reprs: vec![vec![(0, 0, Vec::new())]],
            index: vec![HashMap::from([((0, 0, Vec::new()), 0)])],
        });
    }
    let m = theta.width();
    let children: Vec<TauCat> = theta.children().iter().map(tau).collect::<Result<_>>()?;
    let mut reprs: Vec<Vec<TauRepr>> = Vec::with_capacity(n + 1);
    reprs.push((0..=m).map(|p| (p, p, Vec::new())).collect());
    for d in 1..=n {
        let mut level: Vec<TauRepr> = Vec::new();
        for p in 0..=m {
            for q in p..=m {
                let radix: Vec<usize> =
                    (p..q).map(|i| children[i].cat.glob.cells[d - 1].len()).collect();
                let mut tuple = vec![0usize; q - p];
                loop {
                    level.push((p, q, tuple.clone()));
                    let mut pos = tuple.len();
                    loop {
                        if pos == 0 {
                            break;
                        }
                        pos -= 1;
                        tuple[pos] += 1;
                        if tuple[pos] < radix[pos] {
                            break;
                        }
                        tuple[pos] = 0;
                    }
                    if tuple.iter().all(|&x| x == 0) {
                        break;
                    }
                }
            }
        }
        reprs.push(level);
    }
    let index: Vec<HashMap<TauRepr, usize>> = reprs
        .iter()
        .map(|level| level.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect())
        .collect();
    let cells: Vec<Vec<String>> = reprs
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|(p, q, xs)| {
                    if xs.is_empty() {
                        format!("{p}-{q}")
                    } else {
                        let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                        format!("{p}-{q}({})", parts.join(","))
                    }
                })
                .collect()
        })
        .collect();
    let mut src: Vec<Vec<usize>> = vec![Vec::new()];
    let mut tgt: Vec<Vec<usize>> = vec![Vec::new()];
    for d in 1..=n {
        let mut s_row = Vec::with_capacity(reprs[d].len());
        let mut t_row = Vec::with_capacity(reprs[d].len());
        for (p, q, xs) in &reprs[d] {
            if d == 1 {
                s_row.push(*p);
                t_row.push(*q);
            } else {
                let s_tuple: Vec<usize> = xs
                    .iter()
                    .enumerate()
                    .map(|(off, &x)| children[p + off].cat.glob.src[d - 1][x])
                    .collect();
                let t_tuple: Vec<usize> = xs
                    .iter()
                    .enumerate()
                    .map(|(off, &x)| children[p + off].cat.glob.tgt[d - 1][x])
                    .collect();
                s_row.push(index[d - 1][&(*p, *q, s_tuple)]);
                t_row.push(index[d - 1][&(*p, *q, t_tuple)]);
            }
        }
        src.push(s_row);
        tgt.push(t_row);
    }
    let mut ids: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
    for d in 0..n {
        let row = reprs[d]
            .iter()
            .map(|(p, q, xs)| {
                let lifted: Vec<usize> = xs
                    .iter()
                    .enumerate()
                    .map(|(off, &x)| children[p + off].cat.ids[d - 1][x])
                    .collect();
                index[d + 1][&(*p, *q, lifted)]
            })
            .collect();
        ids.push(row);
    }
    ids.push(Vec::new());
    let glob = GlobularSet::new(n, cells, src, tgt)?;
    let mut comp = BTreeMap::new();
    for d in 1..=n {
        for j in 0..d {
            let nd = reprs[d].len();
            let mut table = vec![vec![None; nd]; nd];
            for (gi, (_gp, gq, gys)) in reprs[d].iter().enumerate() {
                for (fi, (fp, fq, fxs)) in reprs[d].iter().enumerate() {
                    if glob.src_to(j, d, gi) != glob.tgt_to(j, d, fi) {
                        continue;
                    }
                    let result = if j == 0 {
                        let mut tuple = fxs.clone();
                        tuple.extend_from_slice(gys);
                        index[d][&(*fp, *gq, tuple)]
                    } else {
                        let tuple: Vec<usize> = fxs
                            .iter()
                            .zip(gys)
                            .enumerate()
                            .map(|(off, (&x, &y))| {
                                children[fp + off].cat.compose(d - 1, j - 1, y, x)
                            })
                            .collect::<Result<_>>()?;
                        index[d][&(*fp, *fq, tuple)]
                    };
                    table[gi][fi] = Some(result);
                }
            }
            comp.insert((d, j), table);
        }
    }
    let cat = StrictNCat::new(glob, ids, comp)?;
    Ok(TauCat { theta: theta.clone(), cat, children, reprs, index })
}

/// The strict n-functor between tautological categories induced by a tree
/// morphism: vertices move along the simplex part and each slot in an image
/// interval is filled through the matching component.
pub fn tau_morphism(f: &ThetaMorphism, s: &TauCat, t: &TauCat) -> Result<NFunctor> {
    if f.src != s.theta || f.dst != t.theta {
        return Err(Error::StructuralMismatch("tree morphism does not match the taus".into()));
    }
    let n = s.cat.n();
    if n == 0 {
        return Ok(NFunctor { maps: vec![vec![0]] });
    }
    let m = f.src.width();
    // child_maps[j-1] = (source slot i, functor tau(v_i) -> tau(w_j))
    let mut child_maps: Vec<Option<(usize, NFunctor)>> = vec![None; f.dst.width()];
    for i in 1..=m {
        let lo = f.delta.value(i - 1);
        let hi = f.delta.value(i);
        for j in lo + 1..=hi {
            let comp = &f.components[i - 1][j - lo - 1];
            let g = tau_morphism(comp, &s.children[i - 1], &t.children[j - 1])?;
            child_maps[j - 1] = Some((i, g));
        }
    }
    let mut maps: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
    maps.push((0..=m).map(|p| f.delta.value(p)).collect());
    for d in 1..=n {
        let mut row = Vec::with_capacity(s.reprs[d].len());
        for (p, q, xs) in &s.reprs[d] {
            let ip = f.delta.value(*p);
            let iq = f.delta.value(*q);
            let mut tuple = Vec::with_capacity(iq - ip);
            for j in ip + 1..=iq {
                let (i, child) = child_maps[j - 1].as_ref().ok_or_else(|| {
                    Error::Invariant(format!("no component feeds slot {j}"))
                })?;
                tuple.push(child.maps[d - 1][xs[i - 1 - p]]);
            }
            row.push(t.repr_index(d, &(ip, iq, tuple))?);
        }
        maps.push(row);
    }
    Ok(NFunctor { maps })
}

/// The morphism that classifies a cell of the tautological category: the
/// map from the d-cell object into `theta` whose tautological image is the
/// cell.  Vertices classify through their constant simplex map; higher
/// cells pair an edge with childwise classifiers.
pub fn cell_classifier(t: &TauCat, d: usize, idx: usize) -> Result<ThetaMorphism> {
    let level = t.theta.level();
    if d > level {
        return Err(Error::StructuralMismatch(format!(
            "no {d}-cells at level {level}"
        )));
    }
    let (p, q, xs) = t.reprs[d][idx].clone();
    if d == 0 {
        let delta = MonotoneMap::constant(0, p, t.theta.width());
        return canonical_theta(&ThetaObject::terminal(level), &t.theta, &delta);
    }
    let src = crate::cells::cell_object(level, d)?;
    let delta = MonotoneMap::new(1, t.theta.width(), vec![p, q])?;
    let mut row = Vec::with_capacity(q - p);
    for (off, &x) in xs.iter().enumerate() {
        row.push(cell_classifier(&t.children[p + off], d - 1, x)?);
    }
    ThetaMorphism::from_parts(src, t.theta.clone(), delta, vec![row])
}

/// A discrete nerve together with the enumeration data behind it: the
/// tautological category of every window object and the ordered functor
/// lists whose indices name the presheaf elements.
pub struct DNerve {
    pub presheaf: FinPresheaf,
    pub taus: Vec<TauCat>,
    pub functors: Vec<Vec<NFunctor>>,
    index: Vec<HashMap<NFunctor, usize>>,
}

impl DNerve {
    pub fn functor_index(&self, obj: usize, f: &NFunctor) -> Result<usize> {
        self.index[obj]
            .get(f)
            .copied()
            .ok_or_else(|| Error::Invariant("functor is not in the nerve enumeration".into()))
    }
}

/// The discrete nerve of a strict n-category on a window of matching
/// level: at each object, all functors out of its tautological category;
/// the action precomposes with the tautological image of the morphism.
pub fn dnerve_full(c: &StrictNCat, window: &Arc<Window>) -> Result<DNerve> {
    if c.n() != window.level() {
        return Err(Error::LevelMismatch(format!(
            "category dimension {} does not match window level {}",
            c.n(),
            window.level()
        )));
    }
    let n = window.len();
    let taus: Vec<TauCat> = window.objects().iter().map(tau).collect::<Result<_>>()?;
    let functors: Vec<Vec<NFunctor>> =
        taus.iter().map(|t| ncat_functors(&t.cat, c)).collect::<Result<_>>()?;
    let index: Vec<HashMap<NFunctor, usize>> = functors
        .iter()
        .map(|fs| fs.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect())
        .collect();
    let sets: Vec<Vec<String>> = functors
        .iter()
        .map(|fs| (0..fs.len()).map(|i| format!("n{i}")).collect())
        .collect();
    let mut actions = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for b in 0..n {
            for f in window.hom(a, b) {
                let tf = tau_morphism(f, &taus[a], &taus[b])?;
                let table = functors[b]
                    .iter()
                    .map(|g| {
                        let composite = g.after(&tf)?;
                        index[a].get(&composite).copied().ok_or_else(|| {
                            Error::Invariant("precomposition left the enumeration".into())
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                actions[a][b].push(table);
            }
        }
    }
    let presheaf = FinPresheaf::new(Arc::clone(window), sets, actions, false)?;
    Ok(DNerve { presheaf, taus, functors, index })
}

pub fn dnerve(c: &StrictNCat, window: &Arc<Window>) -> Result<FinPresheaf> {
    Ok(dnerve_full(c, window)?.presheaf)
}

/// The nerve map induced by postcomposition with a functor `g: c -> d`;
/// naturality is validated on construction.
pub fn dnerve_map(g: &NFunctor, cn: &DNerve, dn: &DNerve) -> Result<PresheafMap> {
    let mut maps = Vec::with_capacity(cn.functors.len());
    for (obj, fs) in cn.functors.iter().enumerate() {
        let mut row = Vec::with_capacity(fs.len());
        for f in fs {
            row.push(dn.functor_index(obj, &g.after(f)?)?);
        }
        maps.push(row);
    }
    PresheafMap::new(&cn.presheaf, &dn.presheaf, maps)
}

/// Extract the strict n-category underlying a discrete presheaf that
/// passes the Segal comparisons, for levels 1 and 2.  Cells are the values
/// at the cell objects; compositions go through the unique Segal preimage
/// in the pasting shape and restrict along its long edge.
pub fn ncat_from_segal(x: &FinPresheaf) -> Result<StrictNCat> {
    let window = x.window();
    match window.level() {
        1 => ncat_from_segal_1(x),
        2 => ncat_from_segal_2(x),
        l => Err(Error::LevelMismatch(format!(
            "extraction is implemented for levels 1 and 2, not {l}"
        ))),
    }
}

fn ncat_from_segal_1(x: &FinPresheaf) -> Result<StrictNCat> {
    let window = x.window();
    let obj0 = ThetaObject::terminal(1);
    let obj1 = crate::cells::cell_object(1, 1)?;
    let obj2 = ThetaObject::new(1, vec![ThetaObject::terminal(0); 2])?;
    let i0 = window.index_of(&obj0)?;
    let i1 = window.index_of(&obj1)?;
    let i2 = window.index_of(&obj2)?;
    let v0 = canonical_theta(&obj0, &obj1, &MonotoneMap::vertex(0, 1))?;
    let v1 = canonical_theta(&obj0, &obj1, &MonotoneMap::vertex(1, 1))?;
    let e01 = canonical_theta(&obj1, &obj2, &MonotoneMap::edge(0, 1, 2))?;
    let e12 = canonical_theta(&obj1, &obj2, &MonotoneMap::edge(1, 2, 2))?;
    let e02 = canonical_theta(&obj1, &obj2, &MonotoneMap::edge(0, 2, 2))?;
    let collapse = ThetaMorphism::to_terminal(&obj1);
    build_cat_via_pasting(
        x,
        &[i0, i1],
        &[(1, &v0)],
        &[(1, &v1)],
        &[(0, &collapse)],
        &[PastingShape {
            dim: 1,
            along: 0,
            shape: i2,
            first: e01,
            second: e12,
            long: e02,
        }],
    )
}

fn ncat_from_segal_2(x: &FinPresheaf) -> Result<StrictNCat> {
    let window = x.window();
    let obj0 = ThetaObject::terminal(2);
    let obj1 = crate::cells::cell_object(2, 1)?;
    let obj2 = crate::cells::cell_object(2, 2)?;
    let child1 = crate::cells::cell_object(1, 1)?;
    let sq0 = ThetaObject::new(2, vec![ThetaObject::terminal(1); 2])?;
    let hsq = ThetaObject::new(2, vec![child1.clone(), child1.clone()])?;
    let vsq = ThetaObject::new(2, vec![ThetaObject::new(1, vec![ThetaObject::terminal(0); 2])?])?;
    let v0 = canonical_theta(&obj0, &obj1, &MonotoneMap::vertex(0, 1))?;
    let v1 = canonical_theta(&obj0, &obj1, &MonotoneMap::vertex(1, 1))?;
    let s2 = crate::cells::source_inclusion(2, 2)?;
    let t2 = crate::cells::target_inclusion(2, 2)?;
    // squares of identity-free 1-cells: edges of [2]([0],[0])
    let p01 = canonical_theta(&obj1, &sq0, &MonotoneMap::edge(0, 1, 2))?;
    let p12 = canonical_theta(&obj1, &sq0, &MonotoneMap::edge(1, 2, 2))?;
    let p02 = canonical_theta(&obj1, &sq0, &MonotoneMap::edge(0, 2, 2))?;
    // horizontal pasting: edges of [2]([1],[1]) with identity components
    let idc = ThetaMorphism::identity(&child1);
    let h01 = ThetaMorphism::from_parts(
        obj2.clone(),
        hsq.clone(),
        MonotoneMap::edge(0, 1, 2),
        vec![vec![idc.clone()]],
    )?;
    let h12 = ThetaMorphism::from_parts(
        obj2.clone(),
        hsq.clone(),
        MonotoneMap::edge(1, 2, 2),
        vec![vec![idc.clone()]],
    )?;
    let h02 = ThetaMorphism::from_parts(
        obj2.clone(),
        hsq.clone(),
        MonotoneMap::edge(0, 2, 2),
        vec![vec![idc.clone(), idc.clone()]],
    )?;
    // vertical pasting: suspended edges of [1]([2])
    let base = ThetaObject::new(1, vec![ThetaObject::terminal(0); 2])?;
    let w01 = canonical_theta(&child1, &base, &MonotoneMap::edge(0, 1, 2))?.suspend();
    let w12 = canonical_theta(&child1, &base, &MonotoneMap::edge(1, 2, 2))?.suspend();
    let w02 = canonical_theta(&child1, &base, &MonotoneMap::edge(0, 2, 2))?.suspend();
    build_cat_via_pasting(
        x,
        &[
            window.index_of(&obj0)?,
            window.index_of(&obj1)?,
            window.index_of(&obj2)?,
        ],
        &[(1, &v0), (2, &s2)],
        &[(1, &v1), (2, &t2)],
        &[(0, &ThetaMorphism::to_terminal(&obj1)), (1, &crate::cells::cell_collapse(2, 2)?)],
        &[
            PastingShape {
                dim: 1,
                along: 0,
                shape: window.index_of(&sq0)?,
                first: p01,
                second: p12,
                long: p02,
            },
            PastingShape {
                dim: 2,
                along: 0,
                shape: window.index_of(&hsq)?,
                first: h01,
                second: h12,
                long: h02,
            },
            PastingShape {
                dim: 2,
                along: 1,
                shape: window.index_of(&vsq)?,
                first: w01,
                second: w12,
                long: w02,
            },
        ],
    )
}

struct PastingShape {
    dim: usize,
    along: usize,
    shape: usize,
    first: ThetaMorphism,
    second: ThetaMorphism,
    long: ThetaMorphism,
}

/// Assemble a strict n-category from presheaf data: `cell_objs` indexes the
/// cell shapes per dimension, `srcs`/`tgts`/`collapses` give the boundary
/// and identity morphisms as `(dimension, morphism)`, and each pasting
/// shape supplies one composition through its Segal bijection.
fn build_cat_via_pasting(
    x: &FinPresheaf,
    cell_objs: &[usize],
    srcs: &[(usize, &ThetaMorphism)],
    tgts: &[(usize, &ThetaMorphism)],
    collapses: &[(usize, &ThetaMorphism)],
    pastings: &[PastingShape],
) -> Result<StrictNCat> {
    let n = cell_objs.len() - 1;
    let cells: Vec<Vec<String>> =
        cell_objs.iter().map(|&o| x.set(o).to_vec()).collect();
    let mut src: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut tgt: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for &(d, f) in srcs {
        src[d] = (0..x.size(cell_objs[d])).map(|c| x.act(f, c)).collect::<Result<_>>()?;
    }
    for &(d, f) in tgts {
        tgt[d] = (0..x.size(cell_objs[d])).map(|c| x.act(f, c)).collect::<Result<_>>()?;
    }
    let mut ids: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for &(d, f) in collapses {
        ids[d] = (0..x.size(cell_objs[d])).map(|c| x.act(f, c)).collect::<Result<_>>()?;
    }
    let glob = GlobularSet::new(n, cells, src, tgt)?;
    let window = x.window();
    let mut comp = BTreeMap::new();
    for pasting in pastings {
        let d = pasting.dim;
        let nd = glob.cells[d].len();
        let (fa, _, fi) = window.locate(&pasting.first)?;
        let (sa, _, si) = window.locate(&pasting.second)?;
        // Segal uniqueness: elements of the pasting shape are classified by
        // their two legs
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        for w in 0..x.size(pasting.shape) {
            let key = (
                x.act_idx(fa, pasting.shape, fi, w),
                x.act_idx(sa, pasting.shape, si, w),
            );
            if lookup.insert(key, w).is_some() {
                return Err(Error::Invariant(
                    "pasting shape fails the Segal uniqueness".into(),
                ));
            }
        }
        let mut table = vec![vec![None; nd]; nd];
        for g in 0..nd {
            for f in 0..nd {
                if glob.src_to(pasting.along, d, g) != glob.tgt_to(pasting.along, d, f) {
                    continue;
                }
                let w = *lookup.get(&(f, g)).ok_or_else(|| {
                    Error::Invariant("composable pair misses its Segal preimage".into())
                })?;
                table[g][f] = Some(x.act(&pasting.long, w)?);
            }
        }
        comp.insert((d, pasting.along), table);
    }
    // compositions of 2-cells with whiskered identities land in the same
    // tables; nothing else is needed at these levels
    StrictNCat::new(glob, ids, comp)
}

/// Verify that a Segal-passing discrete presheaf is the nerve of its
/// extracted category: build the category, rebuild the nerve, and compare
/// through the cellwise classifying map.  The flag reports whether that
/// natural comparison is bijective.
pub fn check_dnerve_image(x: &FinPresheaf) -> Result<(StrictNCat, bool)> {
    let window = x.window();
    let cat = ncat_from_segal(x)?;
    let nerve = dnerve_full(&cat, window)?;
    let mut maps = Vec::with_capacity(window.len());
    for (obj, t) in nerve.taus.iter().enumerate() {
        let classifiers: Vec<Vec<ThetaMorphism>> = (0..=t.cat.n())
            .map(|d| {
                (0..t.cat.glob.cells[d].len())
                    .map(|c| cell_classifier(t, d, c))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let mut row = Vec::with_capacity(x.size(obj));
        for e in 0..x.size(obj) {
            let cell_maps = classifiers
                .iter()
                .map(|dim_row| dim_row.iter().map(|cl| x.act(cl, e)).collect())
                .collect::<Result<_>>()?;
            row.push(nerve.functor_index(obj, &NFunctor { maps: cell_maps })?);
        }
        maps.push(row);
    }
    let map = PresheafMap::new(x, &nerve.presheaf, maps)?;
    let bijective = map.is_bijective(x, &nerve.presheaf);
    Ok((cat, bijective))
}

/// k-isomorphism flags per dimension: a k-cell is a k-isomorphism when it
/// has a strict two-sided inverse along the (k-1)-boundary.
pub fn k_isomorphism_flags(c: &StrictNCat) -> Vec<Vec<bool>> {
    let n = c.n();
    let mut flags: Vec<Vec<bool>> = vec![Vec::new()];
    for k in 1..=n {
        let nk = c.glob.cells[k].len();
        let table = &c.comp[&(k, k - 1)];
        let row = (0..nk)
            .map(|g| {
                let x = c.glob.src[k][g];
                let y = c.glob.tgt[k][g];
                let id_x = c.ids[k - 1][x];
                let id_y = c.ids[k - 1][y];
                (0..nk).any(|h| {
                    c.glob.src[k][h] == y
                        && c.glob.tgt[k][h] == x
                        && table[g][h] == Some(id_y)
                        && table[h][g] == Some(id_x)
                })
            })
            .collect();
        flags.push(row);
    }
    flags
}

pub fn is_k_isomorphism(c: &StrictNCat, k: usize, g: usize) -> bool {
    k_isomorphism_flags(c)[k][g]
}

/// k-equivalence flags, computed from the top dimension downward: at the
/// top they are the isomorphisms, below a cell is an equivalence when it
/// has inverses up to equivalence one dimension higher.
pub fn equivalence_flags(c: &StrictNCat) -> Vec<Vec<bool>> {
    let n = c.n();
    let iso = k_isomorphism_flags(c);
    let mut flags: Vec<Vec<bool>> = vec![Vec::new(); n + 1];
    if n == 0 {
        return flags;
    }
    flags[n] = iso[n].clone();
    for k in (1..n).rev() {
        let nk = c.glob.cells[k].len();
        let table = &c.comp[&(k, k - 1)];
        // parallel k-cells a ~ b when an equivalence (k+1)-cell joins them
        let upper = &flags[k + 1];
        let sim = |a: usize, b: usize| -> bool {
            (0..c.glob.cells[k + 1].len()).any(|h| {
                upper[h] && c.glob.src[k + 1][h] == a && c.glob.tgt[k + 1][h] == b
            })
        };
        let row = (0..nk)
            .map(|g| {
                let x = c.glob.src[k][g];
                let y = c.glob.tgt[k][g];
                let id_x = c.ids[k - 1][x];
                let id_y = c.ids[k - 1][y];
                let has_right = (0..nk).any(|f| {
                    c.glob.src[k][f] == y
                        && c.glob.tgt[k][f] == x
                        && table[g][f].map(|gf| sim(gf, id_y)).unwrap_or(false)
                });
                let has_left = (0..nk).any(|h| {
                    c.glob.src[k][h] == y
                        && c.glob.tgt[k][h] == x
                        && table[h][g].map(|hg| sim(hg, id_x)).unwrap_or(false)
                });
                has_right && has_left
            })
            .collect();
        flags[k] = row;
    }
    flags
}

pub fn is_k_equivalence_ncat(c: &StrictNCat, k: usize, g: usize) -> bool {
    equivalence_flags(c)[k][g]
}

/// Rigidity: every k-isomorphism is an identity.  The equivalent reading
/// through k-equivalences is recomputed independently; a disagreement is an
/// invariant violation, not a verdict.
pub fn is_rigid(c: &StrictNCat) -> Result<bool> {
    let n = c.n();
    let iso = k_isomorphism_flags(c);
    let equiv = equivalence_flags(c);
    let mut identity_cell: Vec<Vec<bool>> =
        (0..=n).map(|d| vec![false; c.glob.cells[d].len()]).collect();
    for d in 0..n {
        for &i in &c.ids[d] {
            identity_cell[d + 1][i] = true;
        }
    }
    let by_iso = (1..=n).all(|k| {
        iso[k].iter().enumerate().all(|(g, &is)| !is || identity_cell[k][g])
    });
    let by_equiv = (1..=n).all(|k| {
        if k == n {
            return iso[k].iter().enumerate().all(|(g, &is)| !is || identity_cell[k][g]);
        }
        equiv[k].iter().enumerate().all(|(g, &is)| !is || identity_cell[k][g])
    });
    if by_iso != by_equiv {
        return Err(Error::Invariant(
            "the two rigidity readings disagree".into(),
        ));
    }
    Ok(by_iso)
}

/// Report for the rigidity and fibrancy comparison of one category.
#[derive(Debug)]
pub struct RigidCompleteReport {
    pub rigid: bool,
    pub segal: bool,
    /// Completeness verdict per level 1..=n.
    pub complete: Vec<bool>,
    pub agrees: bool,
}

/// Rigidity against the discrete fibrancy of the nerve: `is_rigid` on one
/// side, Segal plus levelwise completeness of `dnerve(c)` on the other.
pub fn check_rigid_iff_complete(c: &StrictNCat, window: &Arc<Window>) -> Result<RigidCompleteReport> {
    let rigid = is_rigid(c)?;
    let nerve = dnerve(c, window)?;
    let segal = crate::fibrancy::check_segal_discrete(&nerve)?.passes;
    let complete = if segal {
        crate::fibrancy::completeness_levels(&nerve)?
    } else {
        vec![false; c.n()]
    };
    let fibrant = segal && complete.iter().all(|&b| b);
    Ok(RigidCompleteReport { rigid, segal, complete, agrees: rigid == fibrant })
}

/// An ordinary finite category with labeled arrows and a total composition
/// table on composable pairs.
#[derive(Debug, Clone)]
pub struct FiniteCategory {
    pub objects: Vec<String>,
    pub arrows: Vec<String>,
    pub arrow_src: Vec<usize>,
    pub arrow_tgt: Vec<usize>,
    pub ids: Vec<usize>,
    pub compose: Vec<Vec<Option<usize>>>,
}

impl FiniteCategory {
    pub fn new(
        objects: Vec<String>,
        arrows: Vec<String>,
        arrow_src: Vec<usize>,
        arrow_tgt: Vec<usize>,
        ids: Vec<usize>,
        compose: Vec<Vec<Option<usize>>>,
    ) -> Result<FiniteCategory> {
        let cat = FiniteCategory { objects, arrows, arrow_src, arrow_tgt, ids, compose };
        cat.to_ncat()?;
        Ok(cat)
    }

    pub fn from_ncat(c: &StrictNCat) -> Result<FiniteCategory> {
        if c.n() != 1 {
            return Err(Error::LevelMismatch("expected a 1-category".into()));
        }
        Ok(FiniteCategory {
            objects: c.glob.cells[0].clone(),
            arrows: c.glob.cells[1].clone(),
            arrow_src: c.glob.src[1].clone(),
            arrow_tgt: c.glob.tgt[1].clone(),
            ids: c.ids[0].clone(),
            compose: c.comp[&(1, 0)].clone(),
        })
    }

    /// The same data as an axiom-checked strict 1-category.
    pub fn to_ncat(&self) -> Result<StrictNCat> {
        let glob = GlobularSet::new(
            1,
            vec![self.objects.clone(), self.arrows.clone()],
            vec![Vec::new(), self.arrow_src.clone()],
            vec![Vec::new(), self.arrow_tgt.clone()],
        )?;
        StrictNCat::new(
            glob,
            vec![self.ids.clone(), Vec::new()],
            BTreeMap::from([((1, 0), self.compose.clone())]),
        )
    }

    pub fn compose_arrows(&self, g: usize, f: usize) -> Result<usize> {
        self.compose[g][f].ok_or_else(|| {
            Error::StructuralMismatch(format!("arrows {g} and {f} do not compose"))
        })
    }

    /// The invertible arrows.
    pub fn isomorphisms(&self) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&f| {
                let (x, y) = (self.arrow_src[f], self.arrow_tgt[f]);
                (0..self.arrows.len()).any(|g| {
                    self.arrow_src[g] == y
                        && self.arrow_tgt[g] == x
                        && self.compose[g][f] == Some(self.ids[x])
                        && self.compose[f][g] == Some(self.ids[y])
                })
            })
            .collect()
    }

    /// Mutually inverse pairs `(u, v)`; one per isomorphism `u`.
    pub fn iso_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for f in 0..self.arrows.len() {
            let (x, y) = (self.arrow_src[f], self.arrow_tgt[f]);
            for g in 0..self.arrows.len() {
                if self.arrow_src[g] == y
                    && self.arrow_tgt[g] == x
                    && self.compose[g][f] == Some(self.ids[x])
                    && self.compose[f][g] == Some(self.ids[y])
                {
                    out.push((f, g));
                }
            }
        }
        out
    }

    /// Functors from the chaotic two-object groupoid, counted as the
    /// mutually inverse pairs they are determined by.
    pub fn chaotic_functor_count(&self) -> usize {
        self.iso_pairs().len()
    }

    /// Triples `(a, b, c)` with `b` after `a` and `c` after `b` both
    /// identities; the data classified by the collapsed-simplex object.
    pub fn equivalence_triples(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.arrows.len() {
            let (x, y) = (self.arrow_src[a], self.arrow_tgt[a]);
            for b in 0..self.arrows.len() {
                if self.arrow_src[b] != y || self.arrow_tgt[b] != x {
                    continue;
                }
                if self.compose[b][a] != Some(self.ids[x]) {
                    continue;
                }
                for c in 0..self.arrows.len() {
                    if self.arrow_src[c] == x
                        && self.arrow_tgt[c] == y
                        && self.compose[c][b] == Some(self.ids[y])
                    {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }
}

/// A discrete n-category: one cell tower per object.
pub fn discrete_ncat(n: usize, k: usize) -> Result<StrictNCat> {
    let cells: Vec<Vec<String>> = (0..=n)
        .map(|d| (0..k).map(|i| format!("x{i}d{d}")).collect())
        .collect();
    let mut src = vec![Vec::new()];
    let mut tgt = vec![Vec::new()];
    for _ in 1..=n {
        src.push((0..k).collect());
        tgt.push((0..k).collect());
    }
    let mut ids: Vec<Vec<usize>> = (0..n).map(|_| (0..k).collect()).collect();
    ids.push(Vec::new());
    let mut comp = BTreeMap::new();
    for d in 1..=n {
        for j in 0..d {
            let table = (0..k)
                .map(|g| (0..k).map(|f| if g == f { Some(g) } else { None }).collect())
                .collect();
            comp.insert((d, j), table);
        }
    }
    StrictNCat::new(GlobularSet::new(n, cells, src, tgt)?, ids, comp)
}

/// A monoid as a one-object category.
pub fn monoid_ncat(labels: &[&str], table: &[Vec<usize>], unit: usize) -> Result<StrictNCat> {
    let k = labels.len();
    let glob = GlobularSet::new(
        1,
        vec![vec!["*".to_string()], labels.iter().map(|s| s.to_string()).collect()],
        vec![Vec::new(), vec![0; k]],
        vec![Vec::new(), vec![0; k]],
    )?;
    let comp = (0..k).map(|g| (0..k).map(|f| Some(table[g][f])).collect()).collect();
    StrictNCat::new(glob, vec![vec![unit], Vec::new()], BTreeMap::from([((1, 0), comp)]))
}

pub fn cyclic_group_ncat(k: usize) -> Result<StrictNCat> {
    let labels: Vec<String> = (0..k).map(|i| format!("g{i}")).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let table: Vec<Vec<usize>> = (0..k).map(|g| (0..k).map(|f| (g + f) % k).collect()).collect();
    monoid_ncat(&refs, &table, 0)
}

pub fn walking_idempotent_ncat() -> Result<StrictNCat> {
    monoid_ncat(&["e", "a"], &[vec![0, 1], vec![1, 1]], 0)
}

/// The thin category of a preorder given as a relation matrix; the
/// relation must be reflexive and transitive.
pub fn preorder_ncat(le: &[Vec<bool>]) -> Result<StrictNCat> {
    let k = le.len();
    for a in 0..k {
        if !le[a][a] {
            return Err(Error::StructuralMismatch("relation is not reflexive".into()));
        }
        for b in 0..k {
            for c in 0..k {
                if le[a][b] && le[b][c] && !le[a][c] {
                    return Err(Error::StructuralMismatch("relation is not transitive".into()));
                }
            }
        }
    }
    let mut arrows = Vec::new();
    let mut arrow_src = Vec::new();
    let mut arrow_tgt = Vec::new();
    let mut index = HashMap::new();
    for a in 0..k {
        for b in 0..k {
            if le[a][b] {
                index.insert((a, b), arrows.len());
                arrows.push(format!("{a}to{b}"));
                arrow_src.push(a);
                arrow_tgt.push(b);
            }
        }
    }
    let na = arrows.len();
    let mut table = vec![vec![None; na]; na];
    for g in 0..na {
        for f in 0..na {
            if arrow_src[g] == arrow_tgt[f] {
                table[g][f] = Some(index[&(arrow_src[f], arrow_tgt[g])]);
            }
        }
    }
    let ids = (0..k).map(|a| index[&(a, a)]).collect();
    let glob = GlobularSet::new(
        1,
        vec![(0..k).map(|i| format!("p{i}")).collect(), arrows],
        vec![Vec::new(), arrow_src],
        vec![Vec::new(), arrow_tgt],
    )?;
    StrictNCat::new(glob, vec![ids, Vec::new()], BTreeMap::from([((1, 0), table)]))
}

/// The chain poset 0 <= 1 <= ... <= m as a category.
pub fn chain_ncat(m: usize) -> Result<StrictNCat> {
    let le: Vec<Vec<bool>> = (0..=m).map(|a| (0..=m).map(|b| a <= b).collect()).collect();
    preorder_ncat(&le)
}

/// The chaotic groupoid: exactly one arrow between any ordered pair.
pub fn chaotic_groupoid_ncat(k: usize) -> Result<StrictNCat> {
    preorder_ncat(&vec![vec![true; k]; k])
}

/// Two objects and two parallel non-invertible arrows between them.
pub fn parallel_pair_ncat() -> Result<StrictNCat> {
    let glob = GlobularSet::new(
        1,
        vec![
            vec!["x".into(), "y".into()],
            vec!["idx".into(), "idy".into(), "u".into(), "v".into()],
        ],
        vec![Vec::new(), vec![0, 1, 0, 0]],
        vec![Vec::new(), vec![0, 1, 1, 1]],
    )?;
    let mut table = vec![vec![None; 4]; 4];
    for f in 0..4 {
        table[f][0] = if glob.src[1][f] == 0 { Some(f) } else { None };
        table[f][1] = if glob.src[1][f] == 1 { Some(f) } else { None };
        table[0][f] = if glob.tgt[1][f] == 0 { Some(f) } else { table[0][f] };
        table[1][f] = if glob.tgt[1][f] == 1 { Some(f) } else { table[1][f] };
    }
    StrictNCat::new(glob, vec![vec![0, 1], Vec::new()], BTreeMap::from([((1, 0), table)]))
}

/// The suspension: two objects, the given category as the forward hom, and
/// only identity towers elsewhere.  Cell indices 0 and 1 are the lower and
/// upper identity towers, the rest shift the input by 2.
pub fn suspension_ncat(c: &StrictNCat) -> Result<StrictNCat> {
    let n = c.n();
    let mut cells: Vec<Vec<String>> = vec![vec!["0".into(), "1".into()]];
    for d in 0..=n {
        let mut level = vec![format!("0tower{d}"), format!("1tower{d}")];
        level.extend(c.glob.cells[d].iter().map(|l| format!("s{l}")));
        cells.push(level);
    }
    let mut src: Vec<Vec<usize>> = vec![Vec::new(), vec![0, 1]];
    let mut tgt: Vec<Vec<usize>> = vec![Vec::new(), vec![0, 1]];
    src[1].extend(vec![0; c.glob.cells[0].len()]);
    tgt[1].extend(vec![1; c.glob.cells[0].len()]);
    for d in 1..=n {
        let mut s_row = vec![0, 1];
        let mut t_row = vec![0, 1];
        s_row.extend(c.glob.src[d].iter().map(|&x| x + 2));
        t_row.extend(c.glob.tgt[d].iter().map(|&x| x + 2));
        src.push(s_row);
        tgt.push(t_row);
    }
    let mut ids: Vec<Vec<usize>> = vec![vec![0, 1]];
    for d in 0..n {
        let mut row = vec![0, 1];
        row.extend(c.ids[d].iter().map(|&x| x + 2));
        ids.push(row);
    }
    ids.push(Vec::new());
    let glob = GlobularSet::new(n + 1, cells, src, tgt)?;
    let mut comp: BTreeMap<(usize, usize), Vec<Vec<Option<usize>>>> = BTreeMap::new();
    for d in 1..=n + 1 {
        let nd = glob.cells[d].len();
        let mut table = vec![vec![None; nd]; nd];
        for g in 0..nd {
            for f in 0..nd {
                if glob.src_to(0, d, g) != glob.tgt_to(0, d, f) {
                    continue;
                }
                // at least one side is an identity tower
                table[g][f] = if g < 2 { Some(f) } else { Some(g) };
            }
        }
        comp.insert((d, 0), table);
    }
    for d in 2..=n + 1 {
        for j in 1..d {
            let nd = glob.cells[d].len();
            let mut table = vec![vec![None; nd]; nd];
            for g in 0..nd {
                for f in 0..nd {
                    if glob.src_to(j, d, g) != glob.tgt_to(j, d, f) {
                        continue;
                    }
                    table[g][f] = if g < 2 {
                        Some(f)
                    } else if f < 2 {
                        Some(g)
                    } else {
                        Some(c.compose(d - 1, j - 1, g - 2, f - 2)? + 2)
                    };
                }
            }
            comp.insert((d, j), table);
        }
    }
    StrictNCat::new(glob, ids, comp)
}

/// The disjoint union of two categories of the same dimension.
pub fn disjoint_union_ncat(a: &StrictNCat, b: &StrictNCat) -> Result<StrictNCat> {
    if a.n() != b.n() {
        return Err(Error::LevelMismatch("union of different dimensions".into()));
    }
    let n = a.n();
    let offset: Vec<usize> = (0..=n).map(|d| a.glob.cells[d].len()).collect();
    let cells: Vec<Vec<String>> = (0..=n)
        .map(|d| {
            let mut row: Vec<String> =
                a.glob.cells[d].iter().map(|l| format!("l{l}")).collect();
            row.extend(b.glob.cells[d].iter().map(|l| format!("r{l}")));
            row
        })
        .collect();
    let join = |xa: &[usize], xb: &[usize], off: usize| -> Vec<usize> {
        xa.iter().copied().chain(xb.iter().map(|&x| x + off)).collect()
    };
    let mut src = vec![Vec::new()];
    let mut tgt = vec![Vec::new()];
    for d in 1..=n {
        src.push(join(&a.glob.src[d], &b.glob.src[d], offset[d - 1]));
        tgt.push(join(&a.glob.tgt[d], &b.glob.tgt[d], offset[d - 1]));
    }
    let mut ids: Vec<Vec<usize>> = Vec::new();
    for d in 0..n {
        ids.push(join(&a.ids[d], &b.ids[d], offset[d + 1]));
    }
    ids.push(Vec::new());
    let mut comp = BTreeMap::new();
    for (&(d, j), ta) in &a.comp {
        let tb = &b.comp[&(d, j)];
        let nd = cells[d].len();
        let na = offset[d];
        let mut table = vec![vec![None; nd]; nd];
        for g in 0..nd {
            for f in 0..nd {
                table[g][f] = match (g < na, f < na) {
                    (true, true) => ta[g][f],
                    (false, false) => tb[g - na][f - na].map(|x| x + na),
                    _ => None,
                };
            }
        }
        comp.insert((d, j), table);
    }
    StrictNCat::new(GlobularSet::new(n, cells, src, tgt)?, ids, comp)
}

/// A seeded random finite category: the thin category of a random preorder
/// on two to four objects, sometimes joined with a small cyclic group.
pub fn random_category(seed: u64) -> Result<FiniteCategory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=4usize);
    let mut le = vec![vec![false; k]; k];
    for (a, row) in le.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = a == b || rng.gen_bool(0.45);
        }
    }
    // transitive closure
    for m in 0..k {
        for a in 0..k {
            for b in 0..k {
                if le[a][m] && le[m][b] {
                    le[a][b] = true;
                }
            }
        }
    }
    let base = preorder_ncat(&le)?;
    let cat = if k <= 3 && rng.gen_bool(0.4) {
        let group = cyclic_group_ncat(rng.gen_range(2..=3usize))?;
        disjoint_union_ncat(&base, &group)?
    } else {
        base
    };
    FiniteCategory::from_ncat(&cat)
}

/// The corpus used by the rigidity and completeness comparisons: at least
/// thirty strict 1- and 2-categories of mixed shape.
pub fn rigidity_corpus() -> Result<Vec<(String, StrictNCat)>> {
    let mut out: Vec<(String, StrictNCat)> = Vec::new();
    for theta in crate::theta::all_objects(2, 4) {
        out.push((format!("tau {theta}"), tau(&theta)?.cat));
    }
    let one_cats: Vec<(String, StrictNCat)> = vec![
        ("poset [1]".into(), chain_ncat(1)?),
        ("poset [2]".into(), chain_ncat(2)?),
        ("chaotic 2".into(), chaotic_groupoid_ncat(2)?),
        ("chaotic 3".into(), chaotic_groupoid_ncat(3)?),
        ("cyclic 2".into(), cyclic_group_ncat(2)?),
        ("cyclic 3".into(), cyclic_group_ncat(3)?),
        ("idempotent".into(), walking_idempotent_ncat()?),
        ("parallel pair".into(), parallel_pair_ncat()?),
        ("discrete 3".into(), discrete_ncat(1, 3)?),
    ];
    for (name, cat) in &one_cats {
        out.push((format!("suspended {name}"), suspension_ncat(cat)?));
    }
    out.extend(one_cats);
    out.push(("discrete 2-cat".into(), discrete_ncat(2, 2)?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::{compose_theta, enumerate_hom, hom_count};

    fn obj(s: &str, level: usize) -> ThetaObject {
        ThetaObject::parse(s, level).unwrap()
    }

    #[test]
    fn tau_matches_the_frozen_hom_counts() {
        let pairs = [
            ("[1]([0])", "[1]([0])", 3),
            ("[1]([1](.))", "[1]([1](.))", 5),
            ("[1]([1](.))", "[2]([1](.),[1](.))", 18),
        ];
        for (s, t, expected) in pairs {
            let ts = tau(&obj(s, 2)).unwrap();
            let tt = tau(&obj(t, 2)).unwrap();
            let functors = ncat_functors(&ts.cat, &tt.cat).unwrap();
            assert_eq!(functors.len() as u64, expected, "{s} -> {t}");
            assert_eq!(hom_count(&obj(s, 2), &obj(t, 2)), expected);
            for f in &functors {
                f.check(&ts.cat, &tt.cat).unwrap();
            }
        }
    }

    #[test]
    fn generator_enumeration_agrees_with_the_full_search() {
        let shapes =
            ["[2]([0],[0])", "[1]([1](.))", "[2]([1](.),[0])", "[1]([2](.,.))"];
        for s in shapes {
            for t in shapes {
                let ts = tau(&obj(s, 2)).unwrap();
                let tt = tau(&obj(t, 2)).unwrap();
                let full = ncat_functors(&ts.cat, &tt.cat).unwrap();
                let gen = ncat_functors_generated(&ts.cat, &tt.cat).unwrap();
                assert_eq!(full, gen, "{s} -> {t}");
            }
        }
        let chaotic = chaotic_groupoid_ncat(2).unwrap();
        let ts = tau(&obj("[2]", 1)).unwrap();
        assert_eq!(
            ncat_functors(&ts.cat, &chaotic).unwrap(),
            ncat_functors_generated(&ts.cat, &chaotic).unwrap()
        );
    }

    #[test]
    fn tau_morphisms_are_functorial() {
        let a = obj("[1]([1](.))", 2);
        let b = obj("[2]([1](.),[0])", 2);
        let c = obj("[1]([2](.,.))", 2);
        let ta = tau(&a).unwrap();
        let tb = tau(&b).unwrap();
        let tc = tau(&c).unwrap();
        let id = tau_morphism(&ThetaMorphism::identity(&a), &ta, &ta).unwrap();
        assert_eq!(id, NFunctor::identity(&ta.cat));
        for f in enumerate_hom(&a, &b).iter().take(6) {
            let tf = tau_morphism(f, &ta, &tb).unwrap();
            tf.check(&ta.cat, &tb.cat).unwrap();
            for g in enumerate_hom(&b, &c).iter().take(6) {
                let tg = tau_morphism(g, &tb, &tc).unwrap();
                let gf = compose_theta(g, f).unwrap();
                assert_eq!(
                    tau_morphism(&gf, &ta, &tc).unwrap(),
                    tg.after(&tf).unwrap()
                );
            }
        }
    }

    #[test]
    fn nerve_of_a_chain_counts_composable_strings() {
        let window = Window::new(1, 4);
        let nerve = dnerve(&chain_ncat(2).unwrap(), &window).unwrap();
        let sizes: Vec<usize> = (0..window.len()).map(|o| nerve.size(o)).collect();
        // weakly increasing strings in {0,1,2} of each length
        assert_eq!(sizes, vec![3, 6, 10, 15, 21]);
    }

    #[test]
    fn classifiers_identify_representables_with_nerves() {
        let window = Window::new(2, 4);
        let t = obj("[1]([1](.))", 2);
        let yon = FinPresheaf::yoneda(&window, &t).unwrap();
        let nerve = dnerve_full(&tau(&t).unwrap().cat, &window).unwrap();
        for (o, theta) in window.objects().iter().enumerate() {
            assert_eq!(
                yon.size(o),
                nerve.presheaf.size(o),
                "sizes differ at {theta}"
            );
        }
        let (cat, bij) = check_dnerve_image(&yon).unwrap();
        assert!(bij);
        assert_eq!(cat.glob.cells[2].len(), yon.at(&obj("[1]([1](.))", 2)).unwrap().len());
    }

    #[test]
    fn segal_extraction_rebuilds_a_one_category() {
        let window = Window::new(1, 4);
        let cat = random_category(12).unwrap().to_ncat().unwrap();
        let nerve = dnerve(&cat, &window).unwrap();
        let (extracted, bij) = check_dnerve_image(&nerve).unwrap();
        assert!(bij);
        assert_eq!(extracted.glob.cells[0].len(), cat.glob.cells[0].len());
        assert_eq!(extracted.glob.cells[1].len(), cat.glob.cells[1].len());
    }

    #[test]
    fn rigidity_separates_the_standard_examples() {
        assert!(is_rigid(&chain_ncat(2).unwrap()).unwrap());
        assert!(is_rigid(&walking_idempotent_ncat().unwrap()).unwrap());
        assert!(is_rigid(&parallel_pair_ncat().unwrap()).unwrap());
        assert!(!is_rigid(&chaotic_groupoid_ncat(2).unwrap()).unwrap());
        assert!(!is_rigid(&cyclic_group_ncat(2).unwrap()).unwrap());
        let free2 = tau(&obj("[1]([1](.))", 2)).unwrap().cat;
        assert!(is_rigid(&free2).unwrap());
        assert!(!is_rigid(&suspension_ncat(&cyclic_group_ncat(2).unwrap()).unwrap()).unwrap());
        let chaotic = chaotic_groupoid_ncat(2).unwrap();
        let flags = k_isomorphism_flags(&chaotic);
        assert!(flags[1].iter().all(|&b| b));
        for k in 1..=1 {
            for g in 0..chaotic.glob.cells[k].len() {
                assert!(is_k_equivalence_ncat(&chaotic, k, g));
            }
        }
    }

    #[test]
    fn identity_cells_are_equivalences() {
        let cat = suspension_ncat(&chain_ncat(1).unwrap()).unwrap();
        let flags = equivalence_flags(&cat);
        for d in 0..cat.n() {
            for &i in &cat.ids[d] {
                assert!(flags[d + 1][i], "identity at dimension {} is not an equivalence", d + 1);
            }
        }
    }

    #[test]
    fn iso_counts_on_the_walking_examples() {
        let chaotic = FiniteCategory::from_ncat(&chaotic_groupoid_ncat(2).unwrap()).unwrap();
        assert_eq!(chaotic.isomorphisms().len(), 4);
        assert_eq!(chaotic.iso_pairs().len(), 4);
        assert_eq!(chaotic.equivalence_triples().len(), 4);
        let poset = FiniteCategory::from_ncat(&chain_ncat(1).unwrap()).unwrap();
        assert_eq!(poset.isomorphisms().len(), 2);
        assert_eq!(poset.equivalence_triples().len(), 2);
        let group = FiniteCategory::from_ncat(&cyclic_group_ncat(3).unwrap()).unwrap();
        assert_eq!(group.isomorphisms().len(), 3);
        assert_eq!(group.chaotic_functor_count(), 3);
    }

    #[test]
    fn nerves_are_natural_in_the_category() {
        let window = Window::new(1, 3);
        let chain1 = chain_ncat(1).unwrap();
        let chain2 = chain_ncat(2).unwrap();
        let n1 = dnerve_full(&chain1, &window).unwrap();
        let n2 = dnerve_full(&chain2, &window).unwrap();
        // the inclusion sending the arrow of [1] to the long arrow of [2]
        let incl = NFunctor { maps: vec![vec![0, 2], vec![0, 2, 5]] };
        incl.check(&chain1, &chain2).unwrap();
        let map = dnerve_map(&incl, &n1, &n2).unwrap();
        map.check(&n1.presheaf, &n2.presheaf).unwrap();
    }

    #[test]
    fn serialization_round_trips() {
        let cat = suspension_ncat(&chain_ncat(1).unwrap()).unwrap();
        let v = cat.to_json();
        let back = StrictNCat::from_json(&v).unwrap();
        assert_eq!(cat, back);
    }

    #[test]
    fn corpus_is_large_and_axiom_clean() {
        let corpus = rigidity_corpus().unwrap();
        assert!(corpus.len() >= 30, "only {} entries", corpus.len());
    }
}
