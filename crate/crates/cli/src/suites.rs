//! Verification suites: named cases fanned out in parallel, reassembled in
//! declaration order so the report is deterministic.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::Value;

use theta_core::delta::{
    all_covers, enumerate_sequential, product_pullback_cover, MonotoneMap, SimplicialSubset,
};
use theta_core::fibrancy::{
    check_complete_discrete, check_groupoid_discrete, check_segal_discrete,
};
use theta_core::homology::is_acyclic;
use theta_core::intertwine::{
    check_coproduct_decomposition, check_product_decomposition, g_partition_ok,
    simplicial_subset_presheaf, VArgs,
};
use theta_core::ncat::{dnerve, ncat_functor_count, rigidity_corpus, tau};
use theta_core::presheaf::{random_presheaf, FinPresheaf};
use theta_core::qpaths::{
    check_alpha_product, delannoy, enumerate_q, p_k_identities, q_poset, retraction_chain,
};
use theta_core::theta::{compose_theta, ThetaMorphism, ThetaObject};
use theta_core::window::Window;
use theta_core::{Error, Result};

use crate::SuiteName;

/// Suite configuration: window bounds, seeds, and case counts, overridable
/// from a JSON manifest.
pub struct Manifest {
    pub level2_size: usize,
    pub level3_size: usize,
    pub presheaf_seed: u64,
    pub cover_seed: u64,
    pub alpha_seed: u64,
    pub product_pairs: usize,
    pub cover_samples: usize,
    pub alpha_cases: usize,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            level2_size: 3,
            level3_size: 2,
            presheaf_seed: 1000,
            cover_seed: 77,
            alpha_seed: 50,
            product_pairs: 5,
            cover_samples: 10,
            alpha_cases: 10,
        }
    }
}

impl Manifest {
    pub fn from_file(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path)?;
        let v: Value = serde_json::from_str(&text)?;
        let mut m = Manifest::default();
        let read_usize = |v: &Value, group: &str, key: &str| -> Option<usize> {
            v.get(group)?.get(key)?.as_u64().map(|x| x as usize)
        };
        let read_seed = |v: &Value, key: &str| -> Option<u64> { v.get("seeds")?.get(key)?.as_u64() };
        if let Some(x) = read_usize(&v, "windows", "level2") {
            m.level2_size = x;
        }
        if let Some(x) = read_usize(&v, "windows", "level3") {
            m.level3_size = x;
        }
        if let Some(x) = read_seed(&v, "presheaves") {
            m.presheaf_seed = x;
        }
        if let Some(x) = read_seed(&v, "covers") {
            m.cover_seed = x;
        }
        if let Some(x) = read_seed(&v, "alphas") {
            m.alpha_seed = x;
        }
        if let Some(x) = read_usize(&v, "counts", "product_pairs") {
            m.product_pairs = x;
        }
        if let Some(x) = read_usize(&v, "counts", "cover_samples") {
            m.cover_samples = x;
        }
        if let Some(x) = read_usize(&v, "counts", "alpha_cases") {
            m.alpha_cases = x;
        }
        Ok(m)
    }
}

type CaseFn = Box<dyn Fn() -> std::result::Result<(), String> + Send + Sync>;

pub struct SuiteResult {
    pub suite: &'static str,
    pub cases: usize,
    pub passes: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.passes == self.cases
    }

    pub fn render(&self) -> String {
        let mut out = format!("suite {}: {} cases, {} passed", self.suite, self.cases, self.passes);
        for f in &self.failures {
            out.push_str("\n  FAIL ");
            out.push_str(f);
        }
        out
    }
}

pub fn run(which: SuiteName, cfg: &Manifest) -> Result<Vec<SuiteResult>> {
    let names: Vec<SuiteName> = match which {
        SuiteName::All => vec![
            SuiteName::Axioms,
            SuiteName::Decompositions,
            SuiteName::Covers,
            SuiteName::Qpaths,
            SuiteName::Rigidity,
        ],
        other => vec![other],
    };
    names
        .into_iter()
        .map(|n| {
            let (label, cases): (&'static str, Vec<(String, CaseFn)>) = match n {
                SuiteName::Axioms => ("axioms", axioms_cases(cfg)?),
                SuiteName::Decompositions => ("decompositions", decomposition_cases(cfg)?),
                SuiteName::Covers => ("covers", cover_cases(cfg)),
                SuiteName::Qpaths => ("qpaths", qpath_cases(cfg)?),
                SuiteName::Rigidity => ("rigidity", rigidity_cases()?),
                SuiteName::All => unreachable!("expanded above"),
            };
            Ok(run_suite(label, cases))
        })
        .collect()
}

fn run_suite(suite: &'static str, cases: Vec<(String, CaseFn)>) -> SuiteResult {
    let started = Instant::now();
    let total = cases.len();
    let outcomes: Vec<(String, std::result::Result<(), String>)> =
        cases.into_par_iter().map(|(name, f)| (name, f())).collect();
    let mut passes = 0usize;
    let mut failures = Vec::new();
    for (name, outcome) in outcomes {
        match outcome {
            Ok(()) => passes += 1,
            Err(w) => failures.push(format!("{name}: {w}")),
        }
    }
    eprintln!("suite {suite} finished in {:?}", started.elapsed());
    SuiteResult { suite, cases: total, passes, failures }
}

/// A seeded random presheaf with total size in `(0, cap]`, scanning seeds
/// upward; the landing seed is part of any failure witness.
fn capped_random(
    window: &std::sync::Arc<Window>,
    seed: u64,
    cap: usize,
) -> Result<(u64, FinPresheaf)> {
    let mut s = seed;
    loop {
        let x = random_presheaf(window, s)?;
        if x.total_elements() > 0 && x.total_elements() <= cap {
            return Ok((s, x));
        }
        s += 1;
    }
}

fn axioms_cases(cfg: &Manifest) -> Result<Vec<(String, CaseFn)>> {
    let mut cases: Vec<(String, CaseFn)> = Vec::new();
    for (lvl, sz) in [(2usize, cfg.level2_size), (3, cfg.level3_size)] {
        let w = Window::new(lvl, sz);
        for a in 0..w.len() {
            for b in 0..w.len() {
                let w = w.clone();
                let name = format!("hom level {lvl}: {} -> {}", w.object(a), w.object(b));
                cases.push((
                    name,
                    Box::new(move || {
                        let by_hom = w.hom(a, b).len();
                        let ta = tau(w.object(a)).map_err(|e| e.to_string())?;
                        let tb = tau(w.object(b)).map_err(|e| e.to_string())?;
                        let by_functors =
                            ncat_functor_count(&ta.cat, &tb.cat).map_err(|e| e.to_string())?;
                        if by_hom == by_functors {
                            Ok(())
                        } else {
                            Err(format!(
                                "{by_hom} vs {by_functors} | replay: theta hom --level {lvl} --src \"{}\" --dst \"{}\" --count",
                                w.object(a),
                                w.object(b)
                            ))
                        }
                    }),
                ));
            }
        }
    }
    let sz = cfg.level2_size;
    cases.push((
        format!("associativity and units, level 2 size {sz}"),
        Box::new(move || associativity_and_units(sz)),
    ));
    Ok(cases)
}

fn associativity_and_units(max_size: usize) -> std::result::Result<(), String> {
    let w = Window::new(2, max_size);
    let n = w.len();
    let mut table = vec![vec![vec![Vec::<Vec<usize>>::new(); n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let fs = w.hom(a, b);
                let gs = w.hom(b, c);
                let mut t2 = vec![vec![0usize; gs.len()]; fs.len()];
                for (fi, f) in fs.iter().enumerate() {
                    for (gi, g) in gs.iter().enumerate() {
                        let gf = compose_theta(g, f).map_err(|e| e.to_string())?;
                        t2[fi][gi] = w.locate(&gf).map_err(|e| e.to_string())?.2;
                    }
                }
                table[a][b][c] = t2;
            }
        }
    }
    let mut ids = Vec::with_capacity(n);
    for a in 0..n {
        ids.push(w.locate(&ThetaMorphism::identity(w.object(a))).map_err(|e| e.to_string())?.2);
    }
    for a in 0..n {
        for b in 0..n {
            for fi in 0..w.hom(a, b).len() {
                if table[a][a][b][ids[a]][fi] != fi || table[a][b][b][fi][ids[b]] != fi {
                    return Err(format!("unit broken at pair ({a},{b}), morphism {fi}"));
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for fi in 0..w.hom(a, b).len() {
                        for gi in 0..w.hom(b, c).len() {
                            let gf = table[a][b][c][fi][gi];
                            for hi in 0..w.hom(c, d).len() {
                                if table[a][c][d][gf][hi]
                                    != table[a][b][d][fi][table[b][c][d][gi][hi]]
                                {
                                    return Err(format!(
                                        "associativity broken at ({a},{b},{c},{d}) indices ({fi},{gi},{hi})"
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn decomposition_cases(cfg: &Manifest) -> Result<Vec<(String, CaseFn)>> {
    let w = Window::new(2, cfg.level2_size);
    let cw = Window::new(1, 3);
    let mut cases: Vec<(String, CaseFn)> = Vec::new();

    for i in 0..cfg.product_pairs as u64 {
        let w = w.clone();
        let cw = cw.clone();
        let base = cfg.presheaf_seed;
        cases.push((
            format!("product decomposition pair {i}"),
            Box::new(move || {
                let (sa, a) = capped_random(&cw, base + i, 40).map_err(|e| e.to_string())?;
                let (sb, b) = capped_random(&cw, base + 1000 + i, 40).map_err(|e| e.to_string())?;
                let rep = check_product_decomposition(&w, &a, &b, None).map_err(|e| e.to_string())?;
                if rep.bijective && rep.cocone_commutes {
                    Ok(())
                } else {
                    Err(format!(
                        "glued sum differs from the product | replay: {{\"window\":[1,3],\"seeds\":[{sa},{sb}],\"cap\":40}}"
                    ))
                }
            }),
        ));
    }

    {
        let w = w.clone();
        let cw = cw.clone();
        cases.push((
            "product probe 6+6-3 = 9 = 3x3".into(),
            Box::new(move || {
                let f0 = FinPresheaf::yoneda(&cw, &ThetaObject::terminal(1))
                    .map_err(|e| e.to_string())?;
                let at = ThetaObject::parse("[1]([0])", 2).map_err(|e| e.to_string())?;
                let rep = check_product_decomposition(&w, &f0, &f0, Some(&at))
                    .map_err(|e| e.to_string())?;
                match rep.probe {
                    Some((6, 3, 6, 9, 9)) if rep.bijective => Ok(()),
                    other => Err(format!("probe counts {other:?}")),
                }
            }),
        ));
    }

    cases.push((
        "simplex map partition q,m,n <= 3".into(),
        Box::new(|| {
            for q in 0..=3usize {
                for m in 0..=3usize {
                    for n in 0..=3usize {
                        if !g_partition_ok(q, m, n) {
                            return Err(format!("partition broken at ({q},{m},{n})"));
                        }
                    }
                }
            }
            Ok(())
        }),
    ));

    for (m, n) in [(1usize, 1usize), (2, 1), (1, 2), (2, 2)] {
        let w = w.clone();
        let cw = cw.clone();
        let base = cfg.presheaf_seed;
        cases.push((
            format!("coproduct decomposition ({m},{n})"),
            Box::new(move || {
                let mut xs = Vec::new();
                for j in 0..m {
                    xs.push(
                        capped_random(&cw, base + 2000 + 10 * m as u64 + j as u64, 20)
                            .map_err(|e| e.to_string())?
                            .1,
                    );
                }
                let mut ys = Vec::new();
                for j in 0..n {
                    ys.push(
                        capped_random(&cw, base + 3000 + 10 * n as u64 + j as u64, 20)
                            .map_err(|e| e.to_string())?
                            .1,
                    );
                }
                let a = VArgs::new(xs.iter().collect()).map_err(|e| e.to_string())?;
                let b = VArgs::new(ys.iter().collect()).map_err(|e| e.to_string())?;
                let rep = check_coproduct_decomposition(&w, &a, &b).map_err(|e| e.to_string())?;
                if rep.bijective && rep.partition_ok && rep.crossing_empty {
                    Ok(())
                } else {
                    Err("decomposition flags down".into())
                }
            }),
        ));
    }
    Ok(cases)
}

fn cover_cases(cfg: &Manifest) -> Vec<(String, CaseFn)> {
    let mut cases: Vec<(String, CaseFn)> = Vec::new();
    for m in 1..=3usize {
        cases.push((
            format!("closure properties, rank {m}"),
            Box::new(move || {
                for k in all_covers(m) {
                    if !k.is_cover() {
                        return Err(format!("enumerated non-cover at rank {m}"));
                    }
                    for p in 1..=3usize {
                        for d in enumerate_sequential(p, m) {
                            if !k.pullback_cover(&d).map_err(|e| e.to_string())?.is_cover() {
                                return Err(format!("pullback broke a rank-{m} cover"));
                            }
                        }
                    }
                    for n in 1..=3usize {
                        for l in all_covers(n) {
                            for d1 in enumerate_sequential(1, m) {
                                for d2 in enumerate_sequential(1, n) {
                                    let pp = product_pullback_cover(&d1, &d2, &k, &l)
                                        .map_err(|e| e.to_string())?;
                                    if !pp.is_cover() {
                                        return Err(format!(
                                            "product pullback broke at ({m},{n})"
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
                Ok(())
            }),
        ));
    }
    cases.push((
        "the 2-boundary is rejected".into(),
        Box::new(|| {
            if SimplicialSubset::boundary(2).is_cover() {
                Err("the boundary slipped through".into())
            } else {
                Ok(())
            }
        }),
    ));
    for i in 0..cfg.cover_samples as u64 {
        let seed = cfg.cover_seed.wrapping_add(i);
        cases.push((
            format!("sampled rank-4 cover {i}"),
            Box::new(move || {
                let k = sampled_cover(seed).map_err(|e| e.to_string())?;
                if !k.is_cover() {
                    return Err(format!("closure failed | replay seed {seed}"));
                }
                for p in 1..=3usize {
                    for d in enumerate_sequential(p, 4) {
                        if !k.pullback_cover(&d).map_err(|e| e.to_string())?.is_cover() {
                            return Err(format!("pullback failed | replay seed {seed}"));
                        }
                    }
                }
                Ok(())
            }),
        ));
    }
    cases
}

/// Deterministic rank-4 cover: the spine, a few faces chosen by the seed,
/// then interval saturation of every present long edge.
fn sampled_cover(seed: u64) -> Result<SimplicialSubset> {
    let mut gens: Vec<MonotoneMap> = (0..4).map(|i| MonotoneMap::edge(i, i + 1, 4)).collect();
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) as usize
    };
    for _ in 0..1 + next() % 3 {
        let mut vals: Vec<usize> = (0..=4usize).filter(|_| next() % 2 == 0).collect();
        if vals.len() < 2 {
            vals = vec![0, 1 + next() % 4];
        }
        gens.push(MonotoneMap::new(vals.len() - 1, 4, vals)?);
    }
    let k0 = SimplicialSubset::from_generators(4, &gens)?;
    let mut closed = gens;
    for a in 0..4usize {
        for b in a + 1..=4usize {
            if k0.contains(&MonotoneMap::edge(a, b, 4)) {
                closed.push(MonotoneMap::new(b - a, 4, (a..=b).collect())?);
            }
        }
    }
    SimplicialSubset::from_generators(4, &closed)
}

fn qpath_cases(cfg: &Manifest) -> Result<Vec<(String, CaseFn)>> {
    let mut cases: Vec<(String, CaseFn)> = Vec::new();
    cases.push((
        "path counts m,n <= 4".into(),
        Box::new(|| {
            for m in 0..=4usize {
                for n in 0..=4usize {
                    let counted = enumerate_q(m, n).map_err(|e| e.to_string())?.len() as u64;
                    if counted != delannoy(m, n) {
                        return Err(format!("count {counted} at ({m},{n})"));
                    }
                }
            }
            Ok(())
        }),
    ));
    cases.push((
        "order complexes acyclic for m+n <= 5".into(),
        Box::new(|| {
            for m in 0..=5usize {
                for n in 0..=5 - m {
                    let qp = q_poset(m, n).map_err(|e| e.to_string())?;
                    if !is_acyclic(&qp.poset) {
                        return Err(format!("homology at ({m},{n})"));
                    }
                }
            }
            Ok(())
        }),
    ));
    for m in 1..=3usize {
        for n in 1..=3usize {
            cases.push((
                format!("retraction chain ({m},{n})"),
                Box::new(move || {
                    let rep = retraction_chain(m, n).map_err(|e| e.to_string())?;
                    if rep.x_final_acyclic {
                        Ok(())
                    } else {
                        Err("final stage is not acyclic".into())
                    }
                }),
            ));
        }
    }
    for i in 0..cfg.alpha_cases as u64 {
        let seed = cfg.alpha_seed.wrapping_add(i);
        cases.push((
            format!("constrained product {i}"),
            Box::new(move || {
                let mut state =
                    seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let mut next = || {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 33) as usize
                };
                let m = 1 + next() % 3;
                let n = 1 + next() % 3;
                let r = next() % 3;
                let mut v1: Vec<usize> = (0..=r).map(|_| next() % (m + 1)).collect();
                let mut v2: Vec<usize> = (0..=r).map(|_| next() % (n + 1)).collect();
                v1.sort_unstable();
                v2.sort_unstable();
                let a1 = MonotoneMap::new(r, m, v1).map_err(|e| e.to_string())?;
                let a2 = MonotoneMap::new(r, n, v2).map_err(|e| e.to_string())?;
                let qp = q_poset(m, n).map_err(|e| e.to_string())?;
                let rep = check_alpha_product(&qp, &a1, &a2).map_err(|e| e.to_string())?;
                if rep.bijective && rep.order_iso {
                    Ok(())
                } else {
                    Err(format!("subposet is not the product | replay seed {seed}"))
                }
            }),
        ));
    }
    let w = Window::new(2, 3);
    let cw = Window::new(1, 3);
    for m in 1..=2usize {
        for (ci, k) in all_covers(m).into_iter().enumerate() {
            let w = w.clone();
            let cw = cw.clone();
            cases.push((
                format!("cover colimit identities rank {m} cover {ci}"),
                Box::new(move || {
                    let y1 = FinPresheaf::yoneda(
                        &cw,
                        &ThetaObject::parse("[1]", 1).map_err(|e| e.to_string())?,
                    )
                    .map_err(|e| e.to_string())?;
                    let args = VArgs::new(vec![&y1; m].to_vec()).map_err(|e| e.to_string())?;
                    let rep = p_k_identities(&w, &args, &k).map_err(|e| e.to_string())?;
                    if rep.spine_ok && rep.cover_ok {
                        Ok(())
                    } else {
                        Err("colimit identity failed".into())
                    }
                }),
            ));
        }
    }
    Ok(cases)
}

fn rigidity_cases() -> Result<Vec<(String, CaseFn)>> {
    let corpus = rigidity_corpus()?;
    if corpus.len() < 30 {
        return Err(Error::Invariant(format!("corpus holds only {} entries", corpus.len())));
    }
    let mut cases: Vec<(String, CaseFn)> = Vec::new();
    for (name, c) in corpus {
        let label = name.clone();
        let c2 = c.clone();
        cases.push((
            format!("rigid vs complete: {name}"),
            Box::new(move || {
                let w = Window::new(c2.glob.n, 4);
                let rep =
                    theta_core::ncat::check_rigid_iff_complete(&c2, &w).map_err(|e| e.to_string())?;
                if rep.agrees {
                    Ok(())
                } else {
                    Err(format!("verdicts split (rigid {})", rep.rigid))
                }
            }),
        ));
        cases.push((
            format!("groupoid characterization: {label}"),
            Box::new(move || {
                let w = Window::new(c.glob.n, 4);
                let nerve = dnerve(&c, &w).map_err(|e| e.to_string())?;
                let seg = check_segal_discrete(&nerve).map_err(|e| e.to_string())?;
                let comp = check_complete_discrete(&nerve).map_err(|e| e.to_string())?;
                let g = check_groupoid_discrete(&nerve).map_err(|e| e.to_string())?;
                if g.equivalences_by_recursion != g.equivalences_by_tables {
                    return Err("equivalence routes split".into());
                }
                let passing = seg.passes && comp.passes && g.equivalences_by_recursion;
                if passing == g.constant {
                    Ok(())
                } else {
                    Err(format!("passing {passing} but constant {}", g.constant))
                }
            }),
        ));
    }
    cases.push((
        "spine control fails 7 vs 8".into(),
        Box::new(|| segal_control(SimplicialSubset::spine(2), (7, 8))),
    ));
    cases.push((
        "boundary control fails 9 vs 10".into(),
        Box::new(|| segal_control(SimplicialSubset::boundary(2), (9, 10))),
    ));
    Ok(cases)
}

fn segal_control(
    subset: SimplicialSubset,
    expect: (usize, usize),
) -> std::result::Result<(), String> {
    let w1 = Window::new(1, 3);
    let x = simplicial_subset_presheaf(&w1, &subset).map_err(|e| e.to_string())?;
    let rep = check_segal_discrete(&x).map_err(|e| e.to_string())?;
    if rep.passes {
        return Err("the control unexpectedly passed".into());
    }
    let two = ThetaObject::parse("[2]", 1).map_err(|e| e.to_string())?;
    let at = w1.index_of(&two).map_err(|e| e.to_string())?;
    let c = rep.checks.iter().find(|c| c.object == at).ok_or("no check at [2]")?;
    if (c.lhs, c.rhs) == expect {
        Ok(())
    } else {
        Err(format!("witness ({}, {}) at [2]", c.lhs, c.rhs))
    }
}
