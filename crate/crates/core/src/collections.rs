//! Builders for the standard collections of spread-like modules.
//!
//! Every builder returns a [`CollectionFunctor`] whose parameter poset `J` is computed from
//! its order relation, so cover relations are derived rather than hand-written.

use crate::error::{Error, Result};
use crate::fieldlin::Field;
use crate::homalg::{nat_basis, NatTransformation};
use crate::pmod::PersistenceModule;
use crate::poset::{GridShape, Poset, Upset};
use crate::relative::CollectionFunctor;
use fixedbitset::FixedBitSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// The built-in collection families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinKind {
    Singleton,
    AllSubfunctors,
    Translated,
    SpreadsOmega,
    SingleSourceOmega0,
    LowerHooks,
    LowerHooksInf,
    RectanglesNaive,
    RectanglesGrid,
}

impl BuiltinKind {
    pub const ALL: [BuiltinKind; 9] = [
        BuiltinKind::Singleton,
        BuiltinKind::AllSubfunctors,
        BuiltinKind::Translated,
        BuiltinKind::SpreadsOmega,
        BuiltinKind::SingleSourceOmega0,
        BuiltinKind::LowerHooks,
        BuiltinKind::LowerHooksInf,
        BuiltinKind::RectanglesNaive,
        BuiltinKind::RectanglesGrid,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinKind::Singleton => "singleton",
            BuiltinKind::AllSubfunctors => "all_subfunctors",
            BuiltinKind::Translated => "translated",
            BuiltinKind::SpreadsOmega => "spreads_omega",
            BuiltinKind::SingleSourceOmega0 => "single_source_omega0",
            BuiltinKind::LowerHooks => "lower_hooks",
            BuiltinKind::LowerHooksInf => "lower_hooks_inf",
            BuiltinKind::RectanglesNaive => "rectangles_naive",
            BuiltinKind::RectanglesGrid => "rectangles_grid",
        }
    }
}

impl fmt::Display for BuiltinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown collection {s:?}")))
    }
}

/// Name of the pair element `(v, w)`.
pub fn pair_name(v: &str, w: &str) -> String {
    format!("{v}|{w}")
}

/// Token used for the added top element in [`lower_hooks_inf`].
pub const INF: &str = "inf";

/// The one-point parameter poset with object `p0`.
pub fn singleton(p0: Arc<PersistenceModule>) -> CollectionFunctor {
    let j = Arc::new(Poset::from_cover_indices(vec!["P0".to_string()], &[]).expect("one point"));
    let i = p0.poset_arc().clone();
    let f = p0.field();
    CollectionFunctor::new_unchecked(i, j, f, vec![p0], Vec::new(), BuiltinKind::Singleton.name())
}

/// All subfunctors `K_U` of the constant module, parameterized by antichains.
///
/// The zero subfunctor is left out when `I` has a unique maximal element: it is then not
/// needed for joins, and keeping it would break flatness. Otherwise it is the top of `J`.
pub fn all_subfunctors(i: Arc<Poset>, field: Field, max: usize) -> Result<CollectionFunctor> {
    let (j, chains) = i.antichain_poset(max)?;
    let unique_max = i.max_elements(&i.full_set()).len() == 1;
    let keep: Vec<usize> = (0..j.len()).filter(|&a| !(unique_max && chains[a].is_empty())).collect();
    let names: Vec<String> = keep.iter().map(|&a| j.name(a).to_string()).collect();
    let ups: Vec<Upset> = keep.iter().map(|&a| i.upset_of(&chains[a])).collect();
    let jp = Arc::new(Poset::from_order(names, |a, b| ups[b].is_subset(&ups[a]))?);
    let supports = reorder(&jp, &keep.iter().map(|&a| j.name(a).to_string()).collect::<Vec<_>>(), ups);
    CollectionFunctor::from_supports(i, jp, field, &supports, BuiltinKind::AllSubfunctors.name())
}

/// Put per-element data in the index order of `j`, given the names the data was built for.
fn reorder<T: Clone>(j: &Poset, names: &[String], data: Vec<T>) -> Vec<T> {
    let mut out: Vec<Option<T>> = vec![None; j.len()];
    for (n, d) in names.iter().zip(data) {
        out[j.index_of(n).expect("known name")] = Some(d);
    }
    out.into_iter().map(|d| d.expect("every element")).collect()
}

/// Build `J` from named elements and an order, then attach supports.
fn from_named(
    i: Arc<Poset>,
    field: Field,
    names: Vec<String>,
    supports: Vec<FixedBitSet>,
    leq: impl Fn(usize, usize) -> bool,
    kind: BuiltinKind,
) -> Result<CollectionFunctor> {
    let j = Arc::new(Poset::from_order(names.clone(), leq)?);
    let supports = reorder(&j, &names, supports);
    CollectionFunctor::from_supports(i, j, field, &supports, kind.name())
}

fn require_grid(i: &Poset) -> Result<GridShape> {
    i.grid_shape().ok_or_else(|| Error::Invalid("collection requires a grid poset".into()))
}

/// Translates `K(T+v,-)` of a fixed antichain `T` in a grid, for `v` with `T+v` inside the grid.
pub fn translated(i: Arc<Poset>, field: Field, t: &[usize]) -> Result<CollectionFunctor> {
    let g = require_grid(&i)?;
    let t = i.antichain(t)?;
    if t.is_empty() {
        return Err(Error::Invalid("translation antichain is empty".into()));
    }
    let tc: Vec<Vec<usize>> = t.iter().map(|&x| g.coords(x)).collect();
    let bound: Vec<usize> = (0..g.r).map(|k| g.n - tc.iter().map(|c| c[k]).max().expect("nonempty")).collect();
    let mut vs = Vec::new();
    for v in 0..i.len() {
        let c = g.coords(v);
        if c.iter().zip(&bound).all(|(x, b)| x <= b) {
            vs.push(c);
        }
    }
    let names: Vec<String> = vs.iter().map(|c| GridShape::name(c)).collect();
    let supports: Vec<FixedBitSet> = vs
        .iter()
        .map(|v| {
            let gens: Vec<usize> = tc
                .iter()
                .map(|c| g.index(&c.iter().zip(v).map(|(a, b)| a + b).collect::<Vec<_>>()).expect("inside grid"))
                .collect();
            i.upset_of(&gens)
        })
        .collect();
    let leq = |a: usize, b: usize| vs[a].iter().zip(&vs[b]).all(|(x, y)| x <= y);
    from_named(i.clone(), field, names, supports, leq, BuiltinKind::Translated)
}

/// Spread modules `coker(K_G ⊆ K_F)` for nested upsets `G ⊆ F`, in the product order.
pub fn spreads_omega(i: Arc<Poset>, field: Field, max: usize) -> Result<CollectionFunctor> {
    let ups = i.enumerate_upsets(max)?;
    let mut pairs = Vec::new();
    for f in 0..ups.len() {
        for g in 0..ups.len() {
            if ups[g].is_subset(&ups[f]) {
                if pairs.len() >= max {
                    return Err(Error::SizeBoundExceeded(max));
                }
                pairs.push((f, g));
            }
        }
    }
    let names = pairs.iter().map(|&(f, g)| pair_name(&i.set_name(&ups[f]), &i.set_name(&ups[g]))).collect();
    let supports = pairs
        .iter()
        .map(|&(f, g)| {
            let mut s = ups[f].clone();
            s.difference_with(&ups[g]);
            s
        })
        .collect();
    let leq = |a: usize, b: usize| {
        let ((f, g), (f2, g2)) = (pairs[a], pairs[b]);
        ups[f2].is_subset(&ups[f]) && ups[g2].is_subset(&ups[g])
    };
    from_named(i.clone(), field, names, supports, leq, BuiltinKind::SpreadsOmega)
}

/// Single-source spreads `coker(K_U ⊆ K(v,-))` for upsets `U ⊆ up(v)`.
pub fn single_source_omega0(i: Arc<Poset>, field: Field, max: usize) -> Result<CollectionFunctor> {
    i.require_upper_semilattice()?;
    let ups = i.enumerate_upsets(max)?;
    let mut elems = Vec::new();
    for v in 0..i.len() {
        for (k, u) in ups.iter().enumerate() {
            if u.is_subset(i.up(v)) {
                if elems.len() >= max {
                    return Err(Error::SizeBoundExceeded(max));
                }
                elems.push((v, k));
            }
        }
    }
    let names = elems.iter().map(|&(v, k)| pair_name(i.name(v), &i.set_name(&ups[k]))).collect();
    let supports = elems
        .iter()
        .map(|&(v, k)| {
            let mut s = i.up(v).clone();
            s.difference_with(&ups[k]);
            s
        })
        .collect();
    let leq = |a: usize, b: usize| {
        let ((v, u), (v2, u2)) = (elems[a], elems[b]);
        i.leq(v, v2) && ups[u2].is_subset(&ups[u])
    };
    from_named(i.clone(), field, names, supports, leq, BuiltinKind::SingleSourceOmega0)
}

/// Pairs `v ≤ w` of `I` in the product order.
fn comparable_pairs(i: &Poset) -> Vec<(usize, usize)> {
    (0..i.len()).flat_map(|v| i.up(v).ones().map(move |w| (v, w))).collect()
}

fn pair_collection(
    i: Arc<Poset>,
    field: Field,
    kind: BuiltinKind,
    support: impl Fn(usize, usize) -> FixedBitSet,
) -> Result<CollectionFunctor> {
    let pairs = comparable_pairs(&i);
    let names = pairs.iter().map(|&(v, w)| pair_name(i.name(v), i.name(w))).collect();
    let supports = pairs.iter().map(|&(v, w)| support(v, w)).collect();
    let leq = |a: usize, b: usize| {
        let ((v, w), (v2, w2)) = (pairs[a], pairs[b]);
        i.leq(v, v2) && i.leq(w, w2)
    };
    from_named(i.clone(), field, names, supports, leq, kind)
}

/// Lower hooks `coker(K(w,-) ⊆ K(v,-))` for `v ≤ w`.
pub fn lower_hooks(i: Arc<Poset>, field: Field) -> Result<CollectionFunctor> {
    i.require_upper_semilattice()?;
    let ic = i.clone();
    pair_collection(i, field, BuiltinKind::LowerHooks, move |v, w| {
        let mut s = ic.up(v).clone();
        s.difference_with(ic.up(w));
        s
    })
}

/// Lower hooks with an added top `inf`: `(v, inf) ↦ K(v,-)` and `(inf, inf) ↦ 0`.
pub fn lower_hooks_inf(i: Arc<Poset>, field: Field) -> Result<CollectionFunctor> {
    i.require_upper_semilattice()?;
    let n = i.len();
    // element n stands for inf
    let le = |a: usize, b: usize| b == n || (a < n && i.leq(a, b));
    let mut pairs = Vec::new();
    for v in 0..=n {
        for w in 0..=n {
            if le(v, w) {
                pairs.push((v, w));
            }
        }
    }
    let name = |x: usize| if x == n { INF.to_string() } else { i.name(x).to_string() };
    let names = pairs.iter().map(|&(v, w)| pair_name(&name(v), &name(w))).collect();
    let supports = pairs
        .iter()
        .map(|&(v, w)| {
            if v == n {
                i.empty_set()
            } else {
                let mut s = i.up(v).clone();
                if w < n {
                    s.difference_with(i.up(w));
                }
                s
            }
        })
        .collect();
    let leq = |a: usize, b: usize| {
        let ((v, w), (v2, w2)) = (pairs[a], pairs[b]);
        le(v, v2) && le(w, w2)
    };
    from_named(i.clone(), field, names, supports, leq, BuiltinKind::LowerHooksInf)
}

/// Intervals `K_[v,w]` for `v ≤ w`, parameterized like lower hooks.
pub fn rectangles_naive(i: Arc<Poset>, field: Field) -> Result<CollectionFunctor> {
    i.require_upper_semilattice()?;
    let ic = i.clone();
    pair_collection(i, field, BuiltinKind::RectanglesNaive, move |v, w| {
        let mut s = ic.up(v).clone();
        s.intersect_with(ic.down(w));
        s
    })
}

/// Rectangles `coker(⊕_k K(v + (w-v)_k, -) -> K(v,-))` on the grid `{0..n}^r`.
///
/// The object at `(v, w)` is supported on `{x : v ≤ x, x_k < w_k for all k}` and vanishes
/// exactly when some `v_k = w_k`.
pub fn rectangles_grid(n: usize, r: usize, field: Field) -> Result<CollectionFunctor> {
    let i = Arc::new(Poset::grid(n, r));
    let g = require_grid(&i)?;
    let ic = i.clone();
    pair_collection(i, field, BuiltinKind::RectanglesGrid, move |v, w| {
        let (cv, cw) = (g.coords(v), g.coords(w));
        let mut s = ic.up(v).clone();
        for k in 0..r {
            let mut c = cv.clone();
            c[k] = cw[k];
            s.difference_with(ic.up(g.index(&c).expect("inside grid")));
        }
        s
    })
}

/// Build a collection from explicit objects and arrows; arrows are checked for naturality.
pub fn explicit(
    i: Arc<Poset>,
    j: Arc<Poset>,
    field: Field,
    objs: Vec<Arc<PersistenceModule>>,
    arrows: Vec<NatTransformation>,
) -> Result<CollectionFunctor> {
    CollectionFunctor::new(i, j, field, objs, arrows, "explicit")
}

/// The unique arrow `P(b) -> P(a)` when `Nat(P(b), P(a))` is one-dimensional.
pub fn canonical_arrow(pb: &Arc<PersistenceModule>, pa: &Arc<PersistenceModule>) -> Result<NatTransformation> {
    let s = nat_basis(pb, pa)?;
    match s.dim() {
        1 => Ok(s.element(0)),
        d => Err(Error::Invalid(format!("expected a one-dimensional space of maps, found dimension {d}"))),
    }
}
