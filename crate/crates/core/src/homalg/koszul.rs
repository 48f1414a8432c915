use super::resolution::{FreeModule, Resolution};
use crate::error::{Error, Result};
use crate::fieldlin::{ChainComplex, Matrix};
use crate::pmod::{BettiDiagram, PersistenceModule};
use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

/// The Koszul complex of a module at an element.
///
/// Degree 0 is `F(a)`; degree `d >= 1` sums `F(∧S)` over `d`-subsets `S` of the
/// parents of `a` that have a lower bound.
#[derive(Debug, Clone)]
pub struct KoszulComplex {
    pub at: usize,
    /// Parents of `at`, in the order used for signs.
    pub order: Vec<usize>,
    /// `cells[d]` lists `(positions into order, meet)`; `cells[0]` is the empty subset at `at`.
    pub cells: Vec<Vec<(Vec<usize>, usize)>>,
    pub complex: ChainComplex,
}

impl KoszulComplex {
    pub fn homology(&self) -> Vec<usize> {
        self.complex.homology_dims()
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
            return out;
        };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Koszul complex at `a` with parents in ascending index order.
pub fn koszul(f: &PersistenceModule, a: usize) -> Result<KoszulComplex> {
    let order = f.poset().parents(a).to_vec();
    koszul_with_order(f, a, &order)
}

/// Koszul complex at `a` with the parents listed in `order`.
pub fn koszul_with_order(f: &PersistenceModule, a: usize, order: &[usize]) -> Result<KoszulComplex> {
    let p = f.poset();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != p.parents(a) {
        return Err(Error::Invalid(format!("order is not a permutation of the parents of {}", p.name(a))));
    }
    let k = order.len();
    let mut cells: Vec<Vec<(Vec<usize>, usize)>> = vec![vec![(Vec::new(), a)]];
    let mut lookup: Vec<HashMap<Vec<usize>, usize>> = vec![HashMap::from([(Vec::new(), 0)])];
    for d in 1..=k {
        let mut level = Vec::new();
        let mut idx = HashMap::new();
        for s in combinations(k, d) {
            let elems: Vec<usize> = s.iter().map(|&i| order[i]).collect();
            let mut lb = p.full_set();
            for &e in &elems {
                lb.intersect_with(p.down(e));
            }
            if lb.is_clear() {
                continue;
            }
            let m = p.meet(&elems).ok_or_else(|| {
                let (x, y) = first_meetless_pair(p, &elems);
                Error::MeetHypothesisFailed(p.name(x).into(), p.name(y).into())
            })?;
            idx.insert(s.clone(), level.len());
            level.push((s, m));
        }
        if level.is_empty() {
            break;
        }
        cells.push(level);
        lookup.push(idx);
    }
    let fld = f.field();
    let block_dims: Vec<Vec<usize>> = cells.iter().map(|lv| lv.iter().map(|&(_, m)| f.dim(m)).collect()).collect();
    let dims: Vec<usize> = block_dims.iter().map(|b| b.iter().sum()).collect();
    let offsets: Vec<Vec<usize>> = block_dims
        .iter()
        .map(|b| {
            b.iter()
                .scan(0, |acc, &x| {
                    let o = *acc;
                    *acc += x;
                    Some(o)
                })
                .collect()
        })
        .collect();
    let mut boundaries = Vec::new();
    for d in 1..cells.len() {
        let mut m = Matrix::zeros(fld, dims[d - 1], dims[d]);
        for (ci, (s, ms)) in cells[d].iter().enumerate() {
            for i in 0..s.len() {
                let mut t = s.clone();
                t.remove(i);
                let ti = lookup[d - 1][&t];
                let mt = cells[d - 1][ti].1;
                let block = f.map_unchecked(*ms, mt).scale(fld.sign(i));
                m.add_block(offsets[d - 1][ti], offsets[d][ci], &block);
            }
        }
        boundaries.push(m);
    }
    let complex = ChainComplex::new(dims, boundaries)?;
    Ok(KoszulComplex { at: a, order: order.to_vec(), cells, complex })
}

fn first_meetless_pair(p: &crate::poset::Poset, elems: &[usize]) -> (usize, usize) {
    for (i, &x) in elems.iter().enumerate() {
        for &y in &elems[i + 1..] {
            if p.meet(&[x, y]).is_none() {
                return (x, y);
            }
        }
    }
    (elems[0], *elems.last().expect("nonempty"))
}

/// Homology of the Koszul complex at `a` in degrees `0..=dmax`.
pub fn betti_koszul(f: &PersistenceModule, a: usize, dmax: usize) -> Result<Vec<usize>> {
    let mut h = koszul(f, a)?.homology();
    h.resize(dmax + 1, 0);
    h.truncate(dmax + 1);
    Ok(h)
}

/// Koszul homology at every element, as a Betti diagram.
pub fn betti_koszul_all(f: &PersistenceModule, dmax: usize) -> Result<BettiDiagram> {
    let mut b = BettiDiagram::new();
    for a in 0..f.poset().len() {
        for (d, &h) in betti_koszul(f, a, dmax)?.iter().enumerate() {
            b.set(d, a, h);
        }
    }
    Ok(b)
}

/// Scalars `λ_x` on the support with `F(x≤y) λ_x = λ_y` (in the standard bases).
///
/// Fails unless `F` is isomorphic to a subfunctor of the constant module.
pub fn normalized_basis(f: &PersistenceModule) -> Result<Vec<u32>> {
    if f.dims().iter().any(|&d| d > 1) || !f.is_filtration() {
        return Err(Error::NotSubfunctor);
    }
    let p = f.poset();
    let fld = f.field();
    let mut lam = vec![0u32; p.len()];
    let mut queue = VecDeque::new();
    for start in 0..p.len() {
        if f.dim(start) == 0 || lam[start] != 0 {
            continue;
        }
        lam[start] = 1;
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            for &y in p.children(x) {
                if f.dim(y) == 1 && lam[y] == 0 {
                    lam[y] = fld.mul(f.cover_map(x, y).expect("cover").get(0, 0), lam[x]);
                    queue.push_back(y);
                }
            }
            for &w in p.parents(x) {
                if f.dim(w) == 1 && lam[w] == 0 {
                    let c = f.cover_map(w, x).expect("cover").get(0, 0);
                    lam[w] = fld.mul(lam[x], fld.inv(c));
                    queue.push_back(w);
                }
            }
        }
    }
    for (i, &(x, y)) in p.covers().iter().enumerate() {
        if f.dim(x) == 1 && fld.mul(f.cover_maps()[i].get(0, 0), lam[x]) != lam[y] {
            return Err(Error::NotSubfunctor);
        }
    }
    Ok(lam)
}

/// A (generally non-minimal) free resolution of a subfunctor of the constant module,
/// indexed by subsets of its minimal support elements and their joins.
pub fn global_koszul(f: &Arc<PersistenceModule>) -> Result<Resolution> {
    let lam = normalized_basis(f)?;
    let p = f.poset();
    let gens = p.min_elements(&f.support());
    let k = gens.len();
    let mut levels: Vec<Vec<(Vec<usize>, usize)>> = Vec::new();
    let mut lookup: Vec<HashMap<Vec<usize>, usize>> = Vec::new();
    for size in 1..=k {
        let mut level = Vec::new();
        let mut idx = HashMap::new();
        for s in combinations(k, size) {
            let elems: Vec<usize> = s.iter().map(|&i| gens[i]).collect();
            let j = p.join(&elems).ok_or_else(|| {
                let (x, y) = (elems[0], elems[elems.len() - 1]);
                Error::NotSemilattice(p.name(x).into(), p.name(y).into())
            })?;
            idx.insert(s.clone(), level.len());
            level.push((s, j));
        }
        levels.push(level);
        lookup.push(idx);
    }
    let fld = f.field();
    let terms: Vec<FreeModule> = levels
        .iter()
        .map(|lv| FreeModule::new(f.poset_arc().clone(), fld, lv.iter().map(|&(_, j)| j).collect()))
        .collect();
    let mut diffs = Vec::new();
    if let Some(t0) = terms.first() {
        let images: Vec<Vec<u32>> = gens.iter().map(|&g| vec![lam[g]]).collect();
        diffs.push(t0.hom_from_images(f, &images)?);
    }
    for d in 1..terms.len() {
        let target = terms[d - 1].module();
        let images: Vec<Vec<u32>> = levels[d]
            .iter()
            .map(|(s, js)| {
                // position of each lower cell among those whose join lies below js
                let below: Vec<usize> =
                    levels[d - 1].iter().enumerate().filter(|(_, (_, jt))| p.leq(*jt, *js)).map(|(i, _)| i).collect();
                let mut v = vec![0u32; below.len()];
                for i in 0..s.len() {
                    let mut t = s.clone();
                    t.remove(i);
                    let ti = lookup[d - 1][&t];
                    let pos = below.binary_search(&ti).expect("face join lies below");
                    v[pos] = fld.add(v[pos], fld.sign(i));
                }
                v
            })
            .collect();
        diffs.push(terms[d].hom_from_images(target, &images)?);
    }
    Ok(Resolution { target: f.clone(), terms, differentials: diffs, minimal: false, complete: true })
}

/// Consecutive differentials compose to zero.
pub fn differentials_square_to_zero(r: &Resolution) -> bool {
    r.differentials.windows(2).all(|w| w[0].compose(&w[1]).map(|c| c.is_zero()).unwrap_or(false))
}
