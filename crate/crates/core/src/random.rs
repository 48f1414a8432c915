//! Seeded generators for posets and modules used by tests and `demo random`.

use crate::error::Result;
use crate::fieldlin::{Field, Matrix};
use crate::homalg::{cokernel, FreeModule};
use crate::pmod::PersistenceModule;
use crate::poset::{Poset, Upset};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::sync::Arc;

pub type DetRng = ChaCha8Rng;

pub fn rng(seed: u64) -> DetRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random partial order on `n` elements named `x0, x1, ...`.
///
/// Each pair `i < j` is related with probability `p` before taking the transitive closure.
pub fn random_poset(rng: &mut impl Rng, n: usize, p: f64) -> Poset {
    let mut rel = vec![vec![false; n]; n];
    for i in 0..n {
        rel[i][i] = true;
        for j in i + 1..n {
            rel[i][j] = rng.gen_bool(p);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if rel[i][k] && rel[k][j] {
                    rel[i][j] = true;
                }
            }
        }
    }
    let names = (0..n).map(|i| format!("x{i}")).collect();
    Poset::from_order(names, |a, b| rel[a][b]).expect("closure of an acyclic relation")
}

/// A random union-closed family of nonempty subsets of a small set, ordered by inclusion.
///
/// Joins are unions, so the result is an upper semilattice with `min_len..=max_len` elements.
pub fn random_upper_semilattice(rng: &mut impl Rng, min_len: usize, max_len: usize) -> Poset {
    assert!(1 <= min_len && min_len <= max_len && min_len <= 15);
    loop {
        let k = rng.gen_range(3..=4u32);
        let seeds = rng.gen_range(2..=5usize);
        let mut fam: BTreeSet<u32> = (0..seeds).map(|_| rng.gen_range(1..(1u32 << k))).collect();
        loop {
            let v: Vec<u32> = fam.iter().copied().collect();
            let before = fam.len();
            for &a in &v {
                for &b in &v {
                    fam.insert(a | b);
                }
            }
            if fam.len() == before {
                break;
            }
        }
        if fam.len() > max_len || fam.len() < min_len {
            continue;
        }
        let sets: Vec<u32> = fam.into_iter().collect();
        let names = sets
            .iter()
            .map(|&s| (0..k).filter(|&i| s >> i & 1 == 1).map(|i| char::from(b'a' + i as u8)).collect::<String>())
            .collect();
        return Poset::from_order(names, |a, b| sets[a] & !sets[b] == 0).expect("inclusion order");
    }
}

/// A random upset (possibly empty or everything).
pub fn random_upset(rng: &mut impl Rng, p: &Poset) -> Upset {
    let k = rng.gen_range(0..=p.len().min(3));
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.shuffle(rng);
    p.upset_of(&idx[..k])
}

/// A random finitely presented module: the cokernel of a random map between free modules
/// with `1..=max_gens` generators and `0..=max_rels` relations.
///
/// Dimensions are at most `max_gens`.
pub fn random_module(
    rng: &mut impl Rng,
    poset: &Arc<Poset>,
    field: Field,
    max_gens: usize,
    max_rels: usize,
) -> Result<PersistenceModule> {
    let n = poset.len();
    let gens: Vec<usize> = (0..rng.gen_range(1..=max_gens.max(1))).map(|_| rng.gen_range(0..n)).collect();
    let f0 = FreeModule::new(poset.clone(), field, gens);
    // relations sit above some generator, otherwise they would be vacuous
    let rels: Vec<usize> = (0..rng.gen_range(0..=max_rels))
        .map(|_| {
            let g = f0.generators()[rng.gen_range(0..f0.rank())];
            let ups: Vec<usize> = poset.up(g).ones().collect();
            ups[rng.gen_range(0..ups.len())]
        })
        .collect();
    let f1 = FreeModule::new(poset.clone(), field, rels.clone());
    let q = field.characteristic();
    let images: Vec<Vec<u32>> =
        rels.iter().map(|&r| (0..f0.module().dim(r)).map(|_| rng.gen_range(0..q)).collect()).collect();
    let d = f1.hom_from_images(f0.module(), &images)?;
    let pr = cokernel(&d)?;
    Ok(Arc::try_unwrap(pr.target).unwrap_or_else(|a| (*a).clone()))
}

/// A module on the chain `0 < ... < n-1` with random dimensions and cover matrices.
///
/// On a chain every choice of cover matrices is functorial.
pub fn random_chain_module(rng: &mut impl Rng, n: usize, field: Field, max_dim: usize) -> PersistenceModule {
    let p = Arc::new(Poset::grid(n.saturating_sub(1), 1));
    let dims: Vec<usize> = (0..p.len()).map(|_| rng.gen_range(0..=max_dim)).collect();
    let q = field.characteristic();
    let maps = p
        .covers()
        .iter()
        .map(|&(a, b)| {
            let entries: Vec<u32> = (0..dims[a] * dims[b]).map(|_| rng.gen_range(0..q)).collect();
            Matrix::from_fn(field, dims[b], dims[a], |i, j| entries[i * dims[a] + j])
        })
        .collect();
    PersistenceModule::new(p, field, dims, maps).expect("shapes match")
}
