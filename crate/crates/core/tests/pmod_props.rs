use proptest::prelude::*;
use rand::Rng;
use relbetti::poset::Poset;
use relbetti::random::{random_module, random_poset, random_upper_semilattice, random_upset, rng};
use relbetti::{Error, Field, Matrix, PersistenceModule};
use std::sync::Arc;

fn gf(p: u64) -> Field {
    Field::new(p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn radical_is_stable_under_cover_maps(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 5])) {
        let mut r = rng(seed);
        let i = Arc::new(random_poset(&mut r, 7, 0.35));
        let m = Arc::new(random_module(&mut r, &i, gf(p), 3, 3).unwrap());
        let rad = m.radical();
        for &(a, b) in i.covers() {
            let img = m.cover_map(a, b).unwrap().mul(&rad.basis[a]).unwrap();
            let both = Matrix::hstack(m.field(), m.dim(b), &[&rad.basis[b], &img]).unwrap();
            prop_assert_eq!(both.rank(), rad.basis[b].rank());
        }
        // generators: h0 counts what the radical misses
        let h0 = m.h0();
        for a in 0..i.len() {
            prop_assert_eq!(h0[a], m.dim(a) - rad.basis[a].rank());
        }
    }

    #[test]
    fn h0_is_additive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let i = Arc::new(random_poset(&mut r, 6, 0.4));
        let f = gf(3);
        let a = Arc::new(random_module(&mut r, &i, f, 3, 2).unwrap());
        let b = Arc::new(random_module(&mut r, &i, f, 3, 2).unwrap());
        let s = Arc::new(PersistenceModule::direct_sum(i.clone(), f, &[&a, &b]).unwrap());
        s.validate().unwrap();
        let (ha, hb, hs) = (a.h0(), b.h0(), s.h0());
        for x in 0..i.len() {
            prop_assert_eq!(hs[x], ha[x] + hb[x]);
        }
    }

    #[test]
    fn upset_modules_are_filtrations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let i = Arc::new(random_poset(&mut r, 7, 0.3));
        let u = random_upset(&mut r, &i);
        let k = PersistenceModule::from_upset(i.clone(), Field::gf2(), &u).unwrap();
        prop_assert!(k.is_filtration());
        prop_assert!(k.dims().iter().all(|&d| d <= 1));
        let again = PersistenceModule::indicator(i.clone(), Field::gf2(), &k.support());
        prop_assert_eq!(again.dims(), k.dims());
        prop_assert_eq!(again.cover_maps(), k.cover_maps());
    }

    #[test]
    fn spreads_are_spreads(seed in any::<u64>()) {
        let mut r = rng(seed);
        let i = Arc::new(random_upper_semilattice(&mut r, 4, 8));
        let n = i.len();
        let lo = r.gen_range(0..n);
        let ups: Vec<usize> = i.up(lo).ones().collect();
        let hi = ups[r.gen_range(0..ups.len())];
        let mut upper = vec![hi];
        if let Some(&h2) = ups.iter().find(|&&h| h != hi && !i.comparable(h, hi)) {
            upper.push(h2);
        }
        let m = PersistenceModule::spread(i.clone(), Field::gf2(), &[lo], &upper).unwrap();
        prop_assert!(m.is_spread());
        let supp = m.support();
        let rebuilt = PersistenceModule::spread(i.clone(), Field::gf2(), &i.min_elements(&supp), &i.max_elements(&supp)).unwrap();
        prop_assert_eq!(rebuilt.dims(), m.dims());
    }
}

#[test]
fn m0_structure() {
    let m = Arc::new(PersistenceModule::m0_demo());
    let i = m.poset_arc().clone();
    m.validate().unwrap();
    assert!(m.is_spread());
    assert_eq!(m.total_dim(), 14);
    let rad = m.radical().dims();
    let origin = i.index_of("0,0").unwrap();
    for a in 0..i.len() {
        let expected = if a == origin { 0 } else { m.dim(a) };
        assert_eq!(rad[a], expected);
    }
    let h0 = m.h0();
    assert_eq!(h0.iter().sum::<usize>(), 1);
    assert_eq!(h0[origin], 1);
}

#[test]
fn noncommuting_square_is_rejected() {
    let i = Arc::new(Poset::grid(1, 2));
    let f = Field::gf2();
    let maps = vec![Matrix::identity(f, 1); i.covers().len()];
    let ok = PersistenceModule::new(i.clone(), f, vec![1; 4], maps.clone()).unwrap();
    ok.validate().unwrap();
    let mut bad = maps;
    bad[0] = Matrix::zeros(f, 1, 1);
    let m = PersistenceModule::new(i, f, vec![1; 4], bad).unwrap();
    assert!(matches!(m.validate(), Err(Error::FunctorialityViolation(..))));
}

#[test]
fn shape_errors() {
    let i = Arc::new(Poset::grid(1, 1));
    let f = Field::gf2();
    let r = PersistenceModule::new(i, f, vec![1, 2], vec![Matrix::zeros(f, 1, 1)]);
    assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
}

#[test]
fn invalid_spread() {
    let i = Arc::new(Poset::grid(2, 1));
    let r = PersistenceModule::spread(i.clone(), Field::gf2(), &[2], &[0]);
    assert!(matches!(r, Err(Error::InvalidSpread)));
}
