//! Acceptance suite: one test per numbered criterion, each ending in a
//! single printed pass line with the figures it verified.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use theta_core::cells::{build_cell_tower, cell_object, check_v_cell_shift, t_sharp, t_star, z_presheaf};
use theta_core::delta::{
    all_covers, enumerate_sequential, product_pullback_cover, MonotoneMap, SimplicialSubset,
};
use theta_core::fibrancy::{
    check_complete_discrete, check_groupoid_discrete, check_segal_discrete,
};
use theta_core::homology::is_acyclic;
use theta_core::intertwine::{
    check_coproduct_decomposition, check_mapping_space_identification, check_nu,
    check_product_decomposition, g_partition_ok, simplicial_subset_presheaf, VArgs,
};
use theta_core::ncat::{
    chain_ncat, chaotic_groupoid_ncat, check_rigid_iff_complete, dnerve, dnerve_full,
    ncat_functor_count, ncat_functors, random_category, rigidity_corpus, tau, tau_morphism,
};
use theta_core::presheaf::{nat_hom, random_presheaf, FinPresheaf, PresheafMap};
use theta_core::qpaths::{
    check_alpha_product, check_main_square_suite, delannoy, enumerate_q, p_k_identities, q_poset,
    retraction_chain,
};
use theta_core::theta::{compose_theta, ThetaMorphism, ThetaObject};
use theta_core::window::Window;

use std::sync::Arc;

/// A seeded random presheaf whose total element count lands in `(0, cap]`,
/// found by walking the seed forward.
fn capped_random(window: &Arc<Window>, seed: u64, cap: usize) -> FinPresheaf {
    let mut s = seed;
    loop {
        let x = random_presheaf(window, s).expect("random presheaf");
        if x.total_elements() > 0 && x.total_elements() <= cap {
            return x;
        }
        s += 1;
    }
}

fn obj2(s: &str) -> ThetaObject {
    ThetaObject::parse(s, 2).expect("level-2 object literal")
}

#[test]
fn criterion_01_hom_counts_equal_functor_counts() {
    let mut pairs = 0usize;
    for (lvl, sz) in [(2usize, 4usize), (3, 3)] {
        let w = Window::new(lvl, sz);
        for a in 0..w.len() {
            let ta = tau(w.object(a)).expect("tau at source");
            for b in 0..w.len() {
                let tb = tau(w.object(b)).expect("tau at target");
                let by_hom = w.hom(a, b).len();
                let by_functors = ncat_functor_count(&ta.cat, &tb.cat).expect("functor count");
                assert_eq!(
                    by_hom,
                    by_functors,
                    "hom and functor counts split at level {lvl}: {} -> {}",
                    w.object(a),
                    w.object(b)
                );
                pairs += 1;
            }
        }
    }
    let w = Window::new(2, 4);
    let count = |s: &str, t: &str| {
        let a = w.index_of(&obj2(s)).expect("source in window");
        let b = w.index_of(&obj2(t)).expect("target in window");
        w.hom(a, b).len()
    };
    assert_eq!(count("[1]([0])", "[1]([0])"), 3);
    assert_eq!(count("[1]([1])", "[1]([1])"), 5);
    assert_eq!(count("[1]([1])", "[2]([1],[1])"), 18);
    println!("criterion 01: PASS - hom counts match functor counts on {pairs} ordered pairs, pinned 3/5/18");
}

#[test]
fn criterion_02_associativity_and_units_exhaustive() {
    let w = Window::new(2, 3);
    let n = w.len();
    // composition index tables, then the triple sweep is pure lookups
    let mut table = vec![vec![vec![Vec::<Vec<usize>>::new(); n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let fs = w.hom(a, b);
                let gs = w.hom(b, c);
                let mut t2 = vec![vec![0usize; gs.len()]; fs.len()];
                for (fi, f) in fs.iter().enumerate() {
                    for (gi, g) in gs.iter().enumerate() {
                        let gf = compose_theta(g, f).expect("composable pair");
                        t2[fi][gi] = w.locate(&gf).expect("composite in window").2;
                    }
                }
                table[a][b][c] = t2;
            }
        }
    }
    let mut ids = Vec::with_capacity(n);
    for a in 0..n {
        let (sa, sb, i) = w.locate(&ThetaMorphism::identity(w.object(a))).expect("identity");
        assert_eq!((sa, sb), (a, a));
        ids.push(i);
    }
    let mut units = 0usize;
    for a in 0..n {
        for b in 0..n {
            for fi in 0..w.hom(a, b).len() {
                assert_eq!(table[a][a][b][ids[a]][fi], fi, "left unit at ({a},{b},{fi})");
                assert_eq!(table[a][b][b][fi][ids[b]], fi, "right unit at ({a},{b},{fi})");
                units += 1;
            }
        }
    }
    let mut triples = 0u64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let nf = w.hom(a, b).len();
                    let ng = w.hom(b, c).len();
                    let nh = w.hom(c, d).len();
                    for fi in 0..nf {
                        for gi in 0..ng {
                            let gf = table[a][b][c][fi][gi];
                            for hi in 0..nh {
                                let lhs = table[a][c][d][gf][hi];
                                let rhs = table[a][b][d][fi][table[b][c][d][gi][hi]];
                                assert_eq!(lhs, rhs, "associativity at ({a},{b},{c},{d})");
                                triples += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    println!("criterion 02: PASS - {triples} composable triples associative, units on {units} morphisms");
}

#[test]
fn criterion_03_product_decomposition() {
    let w = Window::new(2, 4);
    let cw = Window::new(1, 3);
    for i in 0..20u64 {
        let a = capped_random(&cw, 1000 + i, 40);
        let b = capped_random(&cw, 2000 + i, 40);
        let rep = check_product_decomposition(&w, &a, &b, None).expect("decomposition");
        assert!(rep.bijective, "pair {i}: glued sum is not the product");
        assert!(rep.cocone_commutes, "pair {i}: cone legs disagree");
    }
    let f0 = FinPresheaf::yoneda(&cw, &ThetaObject::terminal(1)).expect("point");
    let probe_at = obj2("[1]([0])");
    let rep = check_product_decomposition(&w, &f0, &f0, Some(&probe_at)).expect("probe run");
    assert!(rep.bijective && rep.cocone_commutes);
    let (l, m, r, glued, prod) = rep.probe.expect("probe counts");
    assert_eq!((l, m, r, glued, prod), (6, 3, 6, 9, 9));
    assert_eq!(l + r - m, glued);
    println!("criterion 03: PASS - 20 random pairs glue to the product, probe instance 6+6-3 = 9 = 3x3");
}

#[test]
fn criterion_04_coproduct_decomposition_and_partition() {
    for q in 0..=3usize {
        for m in 0..=3usize {
            for n in 0..=3usize {
                assert!(g_partition_ok(q, m, n), "partition failed at ({q},{m},{n})");
            }
        }
    }
    let w = Window::new(2, 4);
    let cw = Window::new(1, 3);
    for m in 0..=3usize {
        for n in 0..=3usize {
            if m == 0 && n == 0 {
                continue;
            }
            let xs: Vec<FinPresheaf> =
                (0..m).map(|j| capped_random(&cw, 3000 + 10 * m as u64 + j as u64, 20)).collect();
            let ys: Vec<FinPresheaf> =
                (0..n).map(|j| capped_random(&cw, 4000 + 10 * n as u64 + j as u64, 20)).collect();
            let a = VArgs::new(xs.iter().collect()).expect("left args");
            let b = VArgs::new(ys.iter().collect()).expect("right args");
            let rep = check_coproduct_decomposition(&w, &a, &b).expect("decomposition");
            assert!(rep.bijective, "({m},{n}): sum is not the middle value");
            assert!(rep.partition_ok, "({m},{n}): class partition broken");
            assert!(rep.crossing_empty, "({m},{n}): crossing classes inhabited");
        }
    }
    println!("criterion 04: PASS - partition for q,m,n <= 3 and coproduct decomposition on 15 shapes");
}

#[test]
fn criterion_05_cover_closure() {
    for m in 1..=4usize {
        assert!(SimplicialSubset::full(m).is_cover(), "full subset at {m}");
        assert!(SimplicialSubset::spine(m).is_cover(), "spine at {m}");
    }
    assert!(!SimplicialSubset::boundary(2).is_cover(), "the 2-boundary must be rejected");

    let mut exhaustive = 0usize;
    for m in 1..=3usize {
        let covers = all_covers(m);
        assert_eq!(covers.len(), [1, 2, 5][m - 1], "cover count at {m}");
        for k in &covers {
            assert!(k.is_cover());
            for p in 1..=3usize {
                for d in enumerate_sequential(p, m) {
                    assert!(k.pullback_cover(&d).expect("pullback").is_cover());
                }
            }
            exhaustive += 1;
        }
        for n in 1..=3usize {
            for k in &covers {
                for l in &all_covers(n) {
                    for p in 1..=2usize {
                        for d1 in enumerate_sequential(p, m) {
                            for d2 in enumerate_sequential(p, n) {
                                let pp = product_pullback_cover(&d1, &d2, k, l).expect("pair pullback");
                                assert!(pp.is_cover(), "product pullback at ({m},{n})");
                            }
                        }
                    }
                }
            }
        }
    }

    // sampled rank-4 covers: spine plus random faces, saturated so that a
    // present long edge brings its whole interval
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let two_covers = all_covers(2);
    for case in 0..100usize {
        let mut gens: Vec<MonotoneMap> = (0..4).map(|i| MonotoneMap::edge(i, i + 1, 4)).collect();
        for _ in 0..rng.gen_range(1..=3usize) {
            let mut vals: Vec<usize> = (0..=4usize).filter(|_| rng.gen_bool(0.5)).collect();
            if vals.len() < 2 {
                vals = vec![0, rng.gen_range(1..=4usize)];
            }
            gens.push(MonotoneMap::new(vals.len() - 1, 4, vals).expect("face generator"));
        }
        let k0 = SimplicialSubset::from_generators(4, &gens).expect("raw subset");
        let mut closed = gens.clone();
        for a in 0..4usize {
            for b in a + 1..=4usize {
                if k0.contains(&MonotoneMap::edge(a, b, 4)) {
                    closed.push(MonotoneMap::new(b - a, 4, (a..=b).collect()).expect("interval"));
                }
            }
        }
        let k = SimplicialSubset::from_generators(4, &closed).expect("saturated subset");
        assert!(k.is_cover(), "sampled case {case} failed closure");
        for p in 1..=3usize {
            for d in enumerate_sequential(p, 4) {
                assert!(k.pullback_cover(&d).expect("pullback").is_cover());
            }
        }
        for l in &two_covers {
            for d1 in enumerate_sequential(1, 4) {
                for d2 in enumerate_sequential(1, 2) {
                    assert!(product_pullback_cover(&d1, &d2, &k, l).expect("pair").is_cover());
                }
            }
        }
    }
    println!(
        "criterion 05: PASS - closure properties on {exhaustive} exhaustive covers, 100 sampled rank-4 cases, 2-boundary rejected"
    );
}

#[test]
fn criterion_06_q_combinatorics() {
    // independent recurrence for the path counts
    let mut rec = [[0u64; 7]; 7];
    for i in 0..=6usize {
        for j in 0..=6usize {
            rec[i][j] = if i == 0 || j == 0 {
                1
            } else {
                rec[i - 1][j] + rec[i][j - 1] + rec[i - 1][j - 1]
            };
        }
    }
    for m in 0..=6usize {
        for n in 0..=6usize {
            let counted = enumerate_q(m, n).expect("enumeration").len() as u64;
            assert_eq!(counted, rec[m][n], "count at ({m},{n})");
            assert_eq!(counted, delannoy(m, n), "closed form at ({m},{n})");
        }
    }
    for (m, n, v) in [(1, 1, 3u64), (2, 2, 13), (3, 3, 63), (4, 4, 321), (6, 6, 8989)] {
        assert_eq!(delannoy(m, n), v);
    }

    for m in 0..=6usize {
        for n in 0..=6 - m {
            let qp = q_poset(m, n).expect("poset");
            assert!(is_acyclic(&qp.poset), "nerve of the path poset at ({m},{n})");
        }
    }

    for m in 0..=4usize {
        assert_eq!(enumerate_q(m, 0).expect("bottom row").len(), 1);
        for n in 1..=4usize {
            let rep = retraction_chain(m, n).expect("certified chain");
            assert_eq!(rep.stages.len(), m, "stage count at ({m},{n})");
            if m > 0 {
                assert_eq!(rep.stages[0].x_size as u64, delannoy(m, n));
            }
            assert!(rep.x_final_acyclic, "final stage at ({m},{n})");
            assert_eq!(rep.lower_delannoy, delannoy(m, n - 1));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for i in 0..50usize {
        let m = rng.gen_range(1..=4usize);
        let n = rng.gen_range(1..=4usize);
        let r = rng.gen_range(0..=3usize);
        let mut v1: Vec<usize> = (0..=r).map(|_| rng.gen_range(0..=m)).collect();
        let mut v2: Vec<usize> = (0..=r).map(|_| rng.gen_range(0..=n)).collect();
        v1.sort_unstable();
        v2.sort_unstable();
        let a1 = MonotoneMap::new(r, m, v1).expect("first constraint");
        let a2 = MonotoneMap::new(r, n, v2).expect("second constraint");
        let qp = q_poset(m, n).expect("poset");
        let rep = check_alpha_product(&qp, &a1, &a2).expect("constrained subposet");
        assert!(rep.bijective && rep.order_iso, "constraint case {i} at ({m},{n})");
    }
    println!(
        "criterion 06: PASS - counts for m,n <= 6, acyclicity for m+n <= 6, 20 certified chains, 50 constrained products"
    );
}

#[test]
fn criterion_07_main_square_colimits() {
    let w = Window::new(2, 4);
    let child = Window::new(1, 3);
    let f0 = FinPresheaf::yoneda(&child, &ThetaObject::terminal(1)).expect("point");
    let mut squares = 0usize;
    for m in 1..=3usize {
        for n in 1..=3usize {
            let a_args = VArgs::new(vec![&f0; m].to_vec()).expect("left args");
            let b_args = VArgs::new(vec![&f0; n].to_vec()).expect("right args");
            let msp = SimplicialSubset::spine(m);
            let mfu = SimplicialSubset::full(m);
            let nsp = SimplicialSubset::spine(n);
            let nfu = SimplicialSubset::full(n);
            let pairs: Vec<(&SimplicialSubset, &SimplicialSubset)> =
                vec![(&msp, &nsp), (&msp, &nfu), (&mfu, &nsp), (&mfu, &nfu)];
            let reports = check_main_square_suite(&w, &a_args, &b_args, &pairs).expect("suite");
            assert_eq!(reports[0].path_count as u64, delannoy(m, n));
            for r in &reports {
                assert!(r.bottom_bijective, "({m},{n}): bottom row");
                assert!(r.top_bijective, "({m},{n}): top row");
                assert!(r.square_commutes, "({m},{n}): comparison square");
                assert!(r.alpha_bottom && r.alpha_top, "({m},{n}): per-path pieces");
                assert!(r.routes_agree, "({m},{n})");
                squares += 1;
            }
        }
    }
    // non-singleton inputs on the smaller grids
    for (m, n, sa, sb) in [(1usize, 1usize, 600u64, 700u64), (2, 1, 610, 710), (1, 2, 620, 720)] {
        let a1 = capped_random(&child, sa, 12);
        let b1 = capped_random(&child, sb, 12);
        let a_args = VArgs::new(vec![&a1; m].to_vec()).expect("left args");
        let b_args = VArgs::new(vec![&b1; n].to_vec()).expect("right args");
        let msp = SimplicialSubset::spine(m);
        let mfu = SimplicialSubset::full(m);
        let nsp = SimplicialSubset::spine(n);
        let nfu = SimplicialSubset::full(n);
        let pairs: Vec<(&SimplicialSubset, &SimplicialSubset)> =
            vec![(&msp, &nsp), (&msp, &nfu), (&mfu, &nsp), (&mfu, &nfu)];
        let reports = check_main_square_suite(&w, &a_args, &b_args, &pairs).expect("suite");
        for r in &reports {
            assert!(
                r.bottom_bijective && r.top_bijective && r.square_commutes && r.routes_agree,
                "random inputs at ({m},{n})"
            );
            squares += 1;
        }
    }
    println!("criterion 07: PASS - {squares} comparison squares collapse to the two products");
}

#[test]
fn criterion_08_pk_colimit_identities() {
    let w = Window::new(2, 4);
    let cw = Window::new(1, 3);
    let y0 = FinPresheaf::yoneda(&cw, &ThetaObject::terminal(1)).expect("point");
    let y1 = FinPresheaf::yoneda(&cw, &ThetaObject::parse("[1]", 1).expect("[1]")).expect("segment");
    let y2 = FinPresheaf::yoneda(&cw, &ThetaObject::parse("[2]", 1).expect("[2]")).expect("triangle");
    let pool = [&y0, &y1, &y2];
    let mut cases = 0usize;
    for m in 1..=3usize {
        for k in all_covers(m) {
            let args: Vec<&FinPresheaf> = (0..m).map(|j| pool[j % 3]).collect();
            let va = VArgs::new(args).expect("representable args");
            let rep = p_k_identities(&w, &va, &k).expect("identities");
            assert!(rep.spine_ok, "spine route at rank {m}");
            assert!(rep.cover_ok, "cover route at rank {m}");
            cases += 1;
        }
    }
    println!("criterion 08: PASS - colimit identities for all {cases} covers of rank <= 3 on representables");
}

#[test]
fn criterion_09_representables_are_nerves() {
    let w = Window::new(2, 4);
    let mut checked = 0usize;
    for ti in 0..w.len() {
        let tc = tau(w.object(ti)).expect("tau");
        let nerve = dnerve_full(&tc.cat, &w).expect("nerve");
        let yon = FinPresheaf::yoneda(&w, w.object(ti)).expect("representable");
        let maps: Vec<Vec<usize>> = (0..w.len())
            .map(|o| {
                w.hom(o, ti)
                    .iter()
                    .map(|f| {
                        let nf = tau_morphism(f, &nerve.taus[o], &nerve.taus[ti])
                            .expect("functor of a morphism");
                        nerve.functor_index(o, &nf).expect("functor enumerated")
                    })
                    .collect()
            })
            .collect();
        let iso = PresheafMap::new(&yon, &nerve.presheaf, maps).expect("natural map");
        assert!(iso.is_bijective(&yon, &nerve.presheaf), "object {}", w.object(ti));
        checked += 1;
    }
    println!("criterion 09: PASS - {checked} representables naturally isomorphic to nerves");
}

#[test]
fn criterion_10_rigid_iff_complete() {
    let corpus = rigidity_corpus().expect("corpus");
    assert!(corpus.len() >= 30, "corpus too small: {}", corpus.len());
    for (name, c) in &corpus {
        let wn = Window::new(c.glob.n, 4);
        let rep = check_rigid_iff_complete(c, &wn).expect(name);
        assert!(rep.agrees, "verdicts split on {name}");
    }

    let w1 = Window::new(1, 4);
    let chaotic = chaotic_groupoid_ncat(2).expect("chaotic pair");
    let nerve = dnerve(&chaotic, &w1).expect("nerve");
    let comp = check_complete_discrete(&nerve).expect("completeness");
    assert!(!comp.passes);
    let lvl = comp.levels.iter().find(|l| l.level == 1).expect("level 1");
    assert_eq!((lvl.lower_cells, lvl.equivalences_by_recursion), (2, 4));
    assert_eq!(lvl.equivalences_by_recursion, lvl.equivalences_by_tables);

    let seg = chain_ncat(1).expect("one arrow");
    let nerve = dnerve(&seg, &w1).expect("nerve");
    let comp = check_complete_discrete(&nerve).expect("completeness");
    assert!(comp.passes);
    let lvl = comp.levels.iter().find(|l| l.level == 1).expect("level 1");
    assert_eq!((lvl.lower_cells, lvl.equivalences_by_recursion), (2, 2));
    println!(
        "criterion 10: PASS - {} corpus entries agree, chaotic pair fails 2 != 4, the arrow passes 2 = 2",
        corpus.len()
    );
}

#[test]
fn criterion_11_z_maps_count_isomorphisms() {
    let w1 = Window::new(1, 3);
    let z2 = chaotic_groupoid_ncat(2).expect("walking isomorphism");
    let zp = z_presheaf(&w1).expect("z presheaf");
    for seed in 0..20u64 {
        let c = random_category(seed).expect("random category");
        assert!(c.objects.len() <= 4);
        let nc = c.to_ncat().expect("as a strict category");
        let nerve = dnerve(&nc, &w1).expect("nerve");
        let maps = nat_hom(&zp, &nerve).expect("maps out of z").len();
        let isos = c.isomorphisms().len();
        let functors = ncat_functors(&z2, &nc).expect("functors").len();
        assert_eq!(maps, isos, "seed {seed}: maps vs isomorphisms");
        assert_eq!(maps, functors, "seed {seed}: maps vs functors");
    }
    println!("criterion 11: PASS - map, isomorphism, and functor counts agree on 20 categories");
}

#[test]
fn criterion_12_segal_controls() {
    let corpus = rigidity_corpus().expect("corpus");
    for (name, c) in &corpus {
        let wn = Window::new(c.glob.n, 4);
        let nerve = dnerve(c, &wn).expect(name);
        assert!(check_segal_discrete(&nerve).expect(name).passes, "nerve of {name}");
    }

    let w1 = Window::new(1, 3);
    let two = ThetaObject::parse("[2]", 1).expect("[2]");
    let at_two = w1.index_of(&two).expect("[2] in window");

    let spine = simplicial_subset_presheaf(&w1, &SimplicialSubset::spine(2)).expect("spine");
    let rep = check_segal_discrete(&spine).expect("spine verdict");
    assert!(!rep.passes, "the spine must fail");
    let c = rep.checks.iter().find(|c| c.object == at_two).expect("check at [2]");
    assert!(!c.bijective);
    assert_eq!((c.lhs, c.rhs), (7, 8), "spine witness at [2]");

    let boundary = simplicial_subset_presheaf(&w1, &SimplicialSubset::boundary(2)).expect("boundary");
    let rep = check_segal_discrete(&boundary).expect("boundary verdict");
    assert!(!rep.passes, "the boundary must fail");
    let c = rep.checks.iter().find(|c| c.object == at_two).expect("check at [2]");
    assert!(!c.bijective);
    assert_eq!((c.lhs, c.rhs), (9, 10), "boundary witness at [2]");

    println!(
        "criterion 12: PASS - all corpus nerves pass, spine fails 7 vs 8 at [2], boundary fails 9 vs 10"
    );
}

#[test]
fn criterion_13_groupoid_passing_means_constant() {
    let corpus = rigidity_corpus().expect("corpus");
    let mut both_true = 0usize;
    let mut both_false = 0usize;
    for (name, c) in &corpus {
        let wn = Window::new(c.glob.n, 4);
        let nerve = dnerve(c, &wn).expect(name);
        let seg = check_segal_discrete(&nerve).expect(name);
        let comp = check_complete_discrete(&nerve).expect(name);
        let g = check_groupoid_discrete(&nerve).expect(name);
        assert_eq!(
            g.equivalences_by_recursion, g.equivalences_by_tables,
            "equivalence routes split on {name}"
        );
        let passing = seg.passes && comp.passes && g.equivalences_by_recursion;
        assert_eq!(passing, g.constant, "characterization fails on {name}");
        if passing {
            both_true += 1;
        } else {
            both_false += 1;
        }
    }
    assert!(both_true > 0, "no constant entries exercised");
    assert!(both_false > 0, "no non-constant entries exercised");
    println!(
        "criterion 13: PASS - verdicts coincide on {} entries ({both_true} constant, {both_false} not)",
        both_true + both_false
    );
}

#[test]
fn criterion_14_spread_cells_and_mapping_spaces() {
    let w23 = Window::new(2, 3);
    let dw = Window::new(1, 3);
    // the spread takes each object to the value at its width and acts
    // through the underlying simplex map alone
    for seed in 0..4u64 {
        let y = capped_random(&dw, 8000 + seed, 15);
        let ts = t_sharp(&y, &w23).expect("spread");
        for a in 0..w23.len() {
            let wa_obj = ThetaObject::parse(&format!("[{}]", w23.object(a).width()), 1).expect("width");
            let wa = dw.index_of(&wa_obj).expect("width in window");
            assert_eq!(ts.size(a), y.size(wa), "size at {}", w23.object(a));
            for b in 0..w23.len() {
                let wb_obj =
                    ThetaObject::parse(&format!("[{}]", w23.object(b).width()), 1).expect("width");
                let wb = dw.index_of(&wb_obj).expect("width in window");
                for (fi, f) in w23.hom(a, b).iter().enumerate() {
                    let di = dw
                        .hom(wa, wb)
                        .iter()
                        .position(|g| g.delta == f.delta)
                        .expect("underlying simplex map");
                    for x in 0..ts.size(b) {
                        assert_eq!(ts.act_idx(a, b, fi, x), y.act_idx(wa, wb, di, x));
                    }
                }
            }
        }
        let back = t_star(&ts, &dw).expect("restriction");
        let fwd = PresheafMap::new(&y, &back, PresheafMap::identity(&y).maps).expect("unit");
        assert!(fwd.is_bijective(&y, &back), "seed {seed}: the round trip moved elements");
        let bwd = PresheafMap::new(&back, &y, PresheafMap::identity(&back).maps).expect("counit");
        assert!(bwd.is_bijective(&back, &y));
    }

    // evaluation at a suspension is the intertwiner of the children
    let w24 = Window::new(2, 4);
    let child = Window::new(1, 3);
    let mut nus = 0usize;
    for i in 0..w24.len() {
        let th = w24.object(i);
        if th.width() == 0 {
            continue;
        }
        assert!(check_nu(&w24, &child, th).expect("comparison"), "object {th}");
        nus += 1;
    }

    // cell representables, their boundaries, and the shift against cells
    let tower = build_cell_tower(&w24, 2).expect("tower");
    assert_eq!(tower.cells.len(), 3);
    assert_eq!(cell_object(2, 2).expect("2-cell"), obj2("[1]([1])"));
    let disc = w24.index_of(&obj2("[1]([0])")).expect("[1]([0])");
    for o in 0..w24.len() {
        assert_eq!(tower.cells[0].size(o), 1, "0-cell is the point");
        assert_eq!(tower.boundaries[1].size(o), 2, "1-boundary is the vertex pair");
    }
    assert_eq!(tower.boundaries[2].size(disc), 4);
    assert!(check_v_cell_shift(&w23, &Window::new(1, 2), 0).expect("shift at 0"));
    assert!(check_v_cell_shift(&w23, &Window::new(1, 2), 1).expect("shift at 1"));

    // mapping spaces between two vertices against pointed maps out of the
    // one-argument intertwiner
    let x = FinPresheaf::yoneda(&w23, &obj2("[1]([1])")).expect("2-cell representable");
    let a1 = FinPresheaf::yoneda(&Window::new(1, 2), &ThetaObject::parse("[1]", 1).expect("[1]"))
        .expect("segment");
    let rep = check_mapping_space_identification(&x, &a1, 0, 1).expect("identification");
    assert!(rep.maps_into_mapping_object == rep.pointed_maps_from_v && rep.canonical_bijection);
    let free2 = tau(&obj2("[2]([1],[0])")).expect("tau").cat;
    let xn = dnerve(&free2, &w23).expect("nerve");
    let rep = check_mapping_space_identification(&xn, &a1, 0, 1).expect("identification");
    assert!(rep.maps_into_mapping_object == rep.pointed_maps_from_v && rep.canonical_bijection);

    println!(
        "criterion 14: PASS - spread formula on 4 presheaves, {nus} suspension comparisons, tower pins, 2 mapping-space identifications"
    );
}
