use proptest::prelude::*;
use rand::Rng;
use relbetti::collections::*;
use relbetti::homalg::{betti, cokernel, is_exact, kernel, nat_basis, FreeModule, NatTransformation};
use relbetti::poset::Poset;
use relbetti::random::{random_module, random_poset, random_upper_semilattice, random_upset, rng, DetRng};
use relbetti::relative::*;
use relbetti::{BettiDiagram, Field, Matrix, PersistenceModule};
use std::collections::BTreeSet;
use std::sync::Arc;

const DMAX: usize = 8;
const MAX: usize = 10_000;

fn gf(p: u64) -> Field {
    Field::new(p).unwrap()
}

fn is_identity(t: &NatTransformation) -> bool {
    let f = t.source.field();
    t.components().iter().all(|c| c.rows() == c.cols() && *c == Matrix::identity(f, c.rows()))
}

/// Indicator objects on upsets that shrink along `J`, so inclusions run `P(b) -> P(a)`.
fn random_upset_collection(r: &mut DetRng, i: &Arc<Poset>, j: &Arc<Poset>, f: Field) -> CollectionFunctor {
    let mut sups = Vec::with_capacity(j.len());
    for b in 0..j.len() {
        let mut u = random_upset(r, i);
        for a in j.down(b).ones().filter(|&a| a != b) {
            u.intersect_with(&sups[a]);
        }
        sups.push(u);
    }
    CollectionFunctor::from_supports(i.clone(), j.clone(), f, &sups, "random").unwrap()
}

fn small_semilattice(r: &mut DetRng) -> Arc<Poset> {
    Arc::new(random_upper_semilattice(r, 3, 5))
}

/// A builder that is thin over a semilattice, chosen at random.
fn random_thin_collection(r: &mut DetRng, i: &Arc<Poset>, f: Field) -> CollectionFunctor {
    match r.gen_range(0..4) {
        0 => lower_hooks(i.clone(), f).unwrap(),
        1 => lower_hooks_inf(i.clone(), f).unwrap(),
        2 => single_source_omega0(i.clone(), f, MAX).unwrap(),
        _ => all_subfunctors(i.clone(), f, MAX).unwrap(),
    }
}

fn restrict_nonzero(p: &CollectionFunctor, b: &BettiDiagram) -> BettiDiagram {
    let mut out = BettiDiagram::new();
    for (d, a, m) in b.iter() {
        if !p.is_zero_obj(a) {
            out.set(d, a, m);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn adjunction_dimensions_agree(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 5])) {
        let mut r = rng(seed);
        let i = small_semilattice(&mut r);
        let f = gf(p);
        let coll = random_thin_collection(&mut r, &i, f);
        let m = Arc::new(random_module(&mut r, &i, f, 2, 2).unwrap());
        let g = Arc::new(random_module(&mut r, coll.j_poset(), f, 2, 2).unwrap());
        let lg = l_functor(&coll, &g).unwrap();
        let rm = r_functor(&coll, &m).unwrap();
        prop_assert_eq!(nat_basis(&lg.module, &m).unwrap().dim(), nat_basis(&g, &rm.module).unwrap().dim());
    }

    #[test]
    fn triangle_identities(seed in any::<u64>()) {
        let mut r = rng(seed);
        let i = small_semilattice(&mut r);
        let f = gf(3);
        let j = Arc::new(random_poset(&mut r, 4, 0.4));
        let coll = if r.gen_bool(0.5) { random_upset_collection(&mut r, &i, &j, f) } else { random_thin_collection(&mut r, &i, f) };
        // εL ∘ Lη = id on L F
        let g = Arc::new(random_module(&mut r, coll.j_poset(), f, 2, 2).unwrap());
        let lg = l_functor(&coll, &g).unwrap();
        let rlg = r_functor(&coll, &lg.module).unwrap();
        let eta = unit(&coll, &g, &lg, &rlg);
        eta.check_naturality().unwrap();
        let lrlg = l_functor(&coll, &rlg.module).unwrap();
        let l_eta = l_morphism(&coll, &lg, &lrlg, &eta);
        let eps = counit(&coll, &lg.module, &rlg, &lrlg);
        eps.check_naturality().unwrap();
        prop_assert!(is_identity(&eps.compose(&l_eta).unwrap()));
        // Rε ∘ ηR = id on R M
        let m = Arc::new(random_module(&mut r, &i, f, 2, 2).unwrap());
        let rm = r_functor(&coll, &m).unwrap();
        let lrm = l_functor(&coll, &rm.module).unwrap();
        let eps_m = counit(&coll, &m, &rm, &lrm);
        let rlrm = r_functor(&coll, &lrm.module).unwrap();
        let eta_r = unit(&coll, &rm.module, &lrm, &rlrm);
        let r_eps = r_morphism(&rlrm, &rm, &eps_m);
        prop_assert!(is_identity(&r_eps.compose(&eta_r).unwrap()));
    }

    #[test]
    fn relative_free_modules_have_their_own_betti(seed in any::<u64>()) {
        let mut r = rng(seed);
        let i = small_semilattice(&mut r);
        let f = gf(2);
        let coll = random_thin_collection(&mut r, &i, f);
        let nz = coll.nonzero_elements();
        prop_assume!(!nz.is_empty());
        let mut want = BettiDiagram::new();
        let mut parts = Vec::new();
        for _ in 0..r.gen_range(1..=3) {
            let a = nz[r.gen_range(0..nz.len())];
            want.add(0, a, 1);
            parts.push(coll.obj(a).clone());
        }
        let refs: Vec<&PersistenceModule> = parts.iter().map(|m| &**m).collect();
        let sum = Arc::new(PersistenceModule::direct_sum(i.clone(), f, &refs).unwrap());
        let rs = r_functor(&coll, &sum).unwrap();
        let h0 = rs.module.h0();
        for a in 0..coll.j_poset().len() {
            prop_assert_eq!(h0[a], want.get(0, a));
        }
        prop_assert_eq!(relative_betti(&coll, &sum, DMAX).unwrap(), want);
    }

    #[test]
    fn koszul_matches_oracle_when_hypothesis_holds(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 5])) {
        let mut r = rng(seed);
        let i = small_semilattice(&mut r);
        let f = gf(p);
        let coll = random_thin_collection(&mut r, &i, f);
        prop_assume!(coll.degeneracy_report().unwrap().holds);
        let m = Arc::new(random_module(&mut r, &i, f, 2, 2).unwrap());
        let oracle = relative_minimal_resolution(&coll, &m, DMAX).unwrap();
        prop_assert!(oracle.complete && oracle.p_exact);
        let (k, verified) = relative_betti_koszul_all(&coll, &m, DMAX, false).unwrap();
        prop_assert!(verified);
        prop_assert_eq!(k, oracle.betti());
    }

    #[test]
    fn disagreements_lie_in_kernel_supports(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = gf(2);
        let (i, coll) = if r.gen_bool(0.5) {
            let i = Arc::new(Poset::grid(r.gen_range(1..=2), 2));
            (i.clone(), rectangles_naive(i, f).unwrap())
        } else {
            let i = small_semilattice(&mut r);
            let j = Arc::new(random_upper_semilattice(&mut r, 3, 5));
            (i.clone(), random_upset_collection(&mut r, &i, &j, f))
        };
        prop_assume!(coll.thin_report().holds);
        let j = coll.j_poset().clone();
        let mut locus = BTreeSet::new();
        for b in 0..j.len() {
            let rpb = r_functor(&coll, coll.obj(b)).unwrap();
            let eta = unit_at(&coll, b, &rpb).unwrap();
            let z = kernel(&eta).unwrap();
            let want: Vec<usize> = coll.ker_unit_support(b).ones().collect();
            let got: Vec<usize> = z.source.support().ones().collect();
            prop_assert_eq!(got, want);
            locus.extend(betti(&z.source, DMAX).unwrap().iter().map(|(_, a, _)| a));
        }
        let m = Arc::new(random_module(&mut r, &i, f, 2, 2).unwrap());
        let oracle = relative_minimal_resolution(&coll, &m, DMAX).unwrap();
        prop_assume!(oracle.complete);
        let (k, _) = relative_betti_koszul_all(&coll, &m, DMAX, true).unwrap();
        let ob = oracle.betti();
        for a in coll.nonzero_elements() {
            if (0..=DMAX).any(|d| ob.get(d, a) != k.get(d, a)) {
                prop_assert!(locus.contains(&a), "disagreement at {}", j.name(a));
            }
        }
    }

    #[test]
    fn flat_collections_resolve_like_r(seed in any::<u64>()) {
        let mut r = rng(seed);
        let i = small_semilattice(&mut r);
        let f = gf(2);
        let coll = all_subfunctors(i.clone(), f, MAX).unwrap();
        prop_assert!(coll.flat_report().holds);
        let m = Arc::new(random_module(&mut r, &i, f, 2, 2).unwrap());
        let rm = r_functor(&coll, &m).unwrap();
        let standard = restrict_nonzero(&coll, &betti(&rm.module, DMAX).unwrap());
        prop_assert_eq!(relative_betti(&coll, &m, DMAX).unwrap(), standard);
    }

    #[test]
    fn lower_hooks_inf_sequences_are_rank_additive(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 5])) {
        let mut r = rng(seed);
        let i = small_semilattice(&mut r);
        let f = gf(p);
        let coll = lower_hooks_inf(i.clone(), f).unwrap();
        let l = Arc::new(random_module(&mut r, &i, f, 2, 2).unwrap());
        let cover = relative_minimal_cover(&coll, &l).unwrap();
        let z = kernel(&cover.map).unwrap();
        let zero = Arc::new(PersistenceModule::zero(i.clone(), f));
        let seq = vec![
            NatTransformation::zero(zero.clone(), z.source.clone()),
            z.clone(),
            cover.map.clone(),
            NatTransformation::zero(l.clone(), zero),
        ];
        prop_assert!(is_exact(&seq));
        prop_assert!(is_p_exact(&coll, &seq).unwrap());
        let (k, fm) = (&z.source, &cover.free.module);
        for v in 0..i.len() {
            for w in i.up(v).ones() {
                let lhs = fm.map(v, w).unwrap().rank();
                prop_assert_eq!(lhs, k.map(v, w).unwrap().rank() + l.map(v, w).unwrap().rank());
            }
        }
    }

    #[test]
    fn thin_and_flat_fast_paths_match_reference(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (ni, nj) = (r.gen_range(2..=5), r.gen_range(2..=6));
        let i = Arc::new(random_poset(&mut r, ni, 0.4));
        let f = gf(2);
        let j = Arc::new(random_poset(&mut r, nj, 0.4));
        let coll = if r.gen_bool(0.7) {
            random_upset_collection(&mut r, &i, &j, f)
        } else {
            spreads_omega(i.clone(), f, MAX).unwrap()
        };
        prop_assert_eq!(coll.thin_report(), coll.thin_report_reference());
        prop_assert_eq!(coll.flat_report(), coll.flat_report_reference());
    }
}

/// A random module forced to vanish at an element near the top of the poset.
fn torsion_module(r: &mut DetRng, i: &Arc<Poset>, f: Field) -> Arc<PersistenceModule> {
    let m = Arc::new(random_module(r, i, f, 3, 4).unwrap());
    let x = i.len() - 1 - r.gen_range(0..3.min(i.len()));
    let d = m.dim(x);
    let src = FreeModule::new(i.clone(), f, vec![x; d]);
    let imgs: Vec<Vec<u32>> = (0..d).map(|k| (0..d).map(|t| (t == k) as u32).collect()).collect();
    let g = src.hom_from_images(&m, &imgs).unwrap();
    cokernel(&g).unwrap().target
}

#[test]
fn lower_hooks_on_planar_grids_have_relative_dimension_at_most_two() {
    let i = Arc::new(Poset::grid(3, 2));
    let f = gf(2);
    let coll = lower_hooks(i.clone(), f).unwrap();
    let mut r = rng(7);
    let mut deepest = 0;
    for _ in 0..100 {
        let m = if r.gen_bool(0.5) { torsion_module(&mut r, &i, f) } else { Arc::new(random_module(&mut r, &i, f, 3, 6).unwrap()) };
        let pd = relative_projective_dimension(&coll, &m, 4).unwrap();
        assert!(pd <= 2, "relative projective dimension {pd}");
        deepest = deepest.max(pd);
    }
    assert!(deepest >= 1);
}
