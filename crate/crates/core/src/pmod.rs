//! Persistence modules: functors from a finite poset to finite-dimensional vector spaces.

use crate::error::{Error, Result};
use crate::fieldlin::{Field, Matrix};
use crate::poset::{Poset, Upset};
use fixedbitset::FixedBitSet;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

/// A functor `P -> vec_K` given by a space per element and a matrix per cover relation.
///
/// The matrix for a cover `a ≺ b` has shape `dim(b) x dim(a)`.
#[derive(Debug)]
pub struct PersistenceModule {
    poset: Arc<Poset>,
    field: Field,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
    cache: RwLock<HashMap<(usize, usize), Matrix>>,
}

impl Clone for PersistenceModule {
    fn clone(&self) -> Self {
        PersistenceModule {
            poset: self.poset.clone(),
            field: self.field,
            dims: self.dims.clone(),
            maps: self.maps.clone(),
            cache: RwLock::new(HashMap::new()),
        }
    }
}

impl PartialEq for PersistenceModule {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.dims == other.dims && self.maps == other.maps && *self.poset == *other.poset
    }
}

impl PersistenceModule {
    /// Build from dimensions and cover matrices (indexed like [`Poset::covers`]).
    ///
    /// Only shapes are checked here; see [`PersistenceModule::validate`].
    pub fn new(poset: Arc<Poset>, field: Field, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<PersistenceModule> {
        if dims.len() != poset.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} dimensions", poset.len()),
                found: dims.len().to_string(),
            });
        }
        if maps.len() != poset.covers().len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} cover maps", poset.covers().len()),
                found: maps.len().to_string(),
            });
        }
        for (i, &(a, b)) in poset.covers().iter().enumerate() {
            let m = &maps[i];
            if m.field() != field {
                return Err(Error::FieldMismatch(field.characteristic(), m.field().characteristic()));
            }
            if m.shape() != (dims[b], dims[a]) {
                return Err(Error::DimensionMismatch {
                    expected: format!("{}x{} on {} < {}", dims[b], dims[a], poset.name(a), poset.name(b)),
                    found: format!("{}x{}", m.rows(), m.cols()),
                });
            }
        }
        Ok(PersistenceModule::new_unchecked(poset, field, dims, maps))
    }

    pub(crate) fn new_unchecked(poset: Arc<Poset>, field: Field, dims: Vec<usize>, maps: Vec<Matrix>) -> PersistenceModule {
        PersistenceModule { poset, field, dims, maps, cache: RwLock::new(HashMap::new()) }
    }

    pub fn zero(poset: Arc<Poset>, field: Field) -> PersistenceModule {
        let maps = poset.covers().iter().map(|_| Matrix::zeros(field, 0, 0)).collect();
        PersistenceModule::new_unchecked(poset.clone(), field, vec![0; poset.len()], maps)
    }

    /// The module that is `K` on `support` with identity maps inside it.
    ///
    /// This is a functor whenever `support` is convex, e.g. for spreads.
    pub fn indicator(poset: Arc<Poset>, field: Field, support: &FixedBitSet) -> PersistenceModule {
        let dims: Vec<usize> = (0..poset.len()).map(|a| support.contains(a) as usize).collect();
        let maps = poset
            .covers()
            .iter()
            .map(|&(a, b)| {
                if dims[a] == 1 && dims[b] == 1 {
                    Matrix::identity(field, 1)
                } else {
                    Matrix::zeros(field, dims[b], dims[a])
                }
            })
            .collect();
        PersistenceModule::new_unchecked(poset, field, dims, maps)
    }

    /// The free module `K(a,-)` supported on the upset of `a`.
    pub fn free(poset: Arc<Poset>, field: Field, a: usize) -> PersistenceModule {
        let up = poset.up(a).clone();
        PersistenceModule::indicator(poset, field, &up)
    }

    /// `K_U` for an upset `U`.
    pub fn from_upset(poset: Arc<Poset>, field: Field, u: &Upset) -> Result<PersistenceModule> {
        if !poset.is_upset(u) {
            return Err(Error::Invalid("set is not an upset".into()));
        }
        Ok(PersistenceModule::indicator(poset, field, u))
    }

    /// `K(S,-)`, the upset generated by the antichain `S`.
    pub fn from_antichain(poset: Arc<Poset>, field: Field, s: &[usize]) -> Result<PersistenceModule> {
        let s = poset.antichain(s)?;
        let u = poset.upset_of(&s);
        Ok(PersistenceModule::indicator(poset, field, &u))
    }

    pub fn constant(poset: Arc<Poset>, field: Field) -> PersistenceModule {
        let all = poset.full_set();
        PersistenceModule::indicator(poset, field, &all)
    }

    /// The spread `K_[S,T]` supported on `up(S) ∩ down(T)`.
    pub fn spread(poset: Arc<Poset>, field: Field, lower: &[usize], upper: &[usize]) -> Result<PersistenceModule> {
        let s = poset.antichain(lower)?;
        let t = poset.antichain(upper)?;
        let up = poset.upset_of(&s);
        let down = poset.downset_of(&t);
        if !s.iter().all(|&x| down.contains(x)) || !t.iter().all(|&x| up.contains(x)) {
            return Err(Error::InvalidSpread);
        }
        let mut supp = up;
        supp.intersect_with(&down);
        Ok(PersistenceModule::indicator(poset, field, &supp))
    }

    /// Direct sum, with summand bases concatenated in order.
    pub fn direct_sum(poset: Arc<Poset>, field: Field, parts: &[&PersistenceModule]) -> Result<PersistenceModule> {
        for m in parts {
            if m.field != field {
                return Err(Error::FieldMismatch(field.characteristic(), m.field.characteristic()));
            }
            if *m.poset != *poset {
                return Err(Error::Invalid("summands live on different posets".into()));
            }
        }
        let dims: Vec<usize> = (0..poset.len()).map(|a| parts.iter().map(|m| m.dims[a]).sum()).collect();
        let maps = poset
            .covers()
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let mut out = Matrix::zeros(field, dims[b], dims[a]);
                let (mut r, mut c) = (0, 0);
                for m in parts {
                    out.set_block(r, c, &m.maps[i]);
                    r += m.dims[b];
                    c += m.dims[a];
                }
                out
            })
            .collect();
        Ok(PersistenceModule::new_unchecked(poset, field, dims, maps))
    }

    /// The running example on the grid `{0..5}^2`: `K(00,-)` modulo the upset of `{04, 32, 40}`.
    pub fn m0_demo() -> PersistenceModule {
        let poset = Arc::new(Poset::grid(5, 2));
        let mut supp = poset.empty_set();
        for a in 0..poset.len() {
            let c = poset.coords(a).expect("grid");
            let (x, y) = (c[0], c[1]);
            if (x <= 2 && y <= 3) || (x == 3 && y <= 1) {
                supp.insert(a);
            }
        }
        PersistenceModule::indicator(poset, Field::gf2(), &supp)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn poset_arc(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self, a: usize) -> usize {
        self.dims[a]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn support(&self) -> FixedBitSet {
        let mut s = self.poset.empty_set();
        for (a, &d) in self.dims.iter().enumerate() {
            if d > 0 {
                s.insert(a);
            }
        }
        s
    }

    /// Matrices on cover relations, indexed like [`Poset::covers`].
    pub fn cover_maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn cover_map(&self, a: usize, b: usize) -> Option<&Matrix> {
        self.poset.cover_index(a, b).map(|i| &self.maps[i])
    }

    /// The structure map `F(a ≤ b)`, composed along a fixed chain of covers.
    pub fn map(&self, a: usize, b: usize) -> Result<Matrix> {
        if !self.poset.leq(a, b) {
            return Err(Error::NotComparable(self.poset.name(a).into(), self.poset.name(b).into()));
        }
        Ok(self.map_unchecked(a, b))
    }

    /// As [`PersistenceModule::map`]; panics unless `a ≤ b`.
    pub(crate) fn map_unchecked(&self, a: usize, b: usize) -> Matrix {
        if a == b {
            return Matrix::identity(self.field, self.dims[a]);
        }
        if let Some(i) = self.poset.cover_index(a, b) {
            return self.maps[i].clone();
        }
        if let Some(m) = self.cache.read().expect("cache lock").get(&(a, b)) {
            return m.clone();
        }
        let p = *self
            .poset
            .parents(b)
            .iter()
            .find(|&&p| self.poset.leq(a, p))
            .expect("a lies below some parent of b");
        let m = self.maps[self.poset.cover_index(p, b).expect("cover")].dot(&self.map_unchecked(a, p));
        self.cache.write().expect("cache lock").insert((a, b), m.clone());
        m
    }

    /// Check that composites do not depend on the chosen chain of covers.
    pub fn validate(&self) -> Result<()> {
        let p = &*self.poset;
        for a in 0..p.len() {
            for b in p.up(a).ones() {
                let fab = self.map_unchecked(a, b);
                for &c in p.children(b) {
                    let lhs = self.map_unchecked(a, c);
                    let rhs = self.maps[p.cover_index(b, c).expect("cover")].dot(&fab);
                    if lhs != rhs {
                        return Err(Error::FunctorialityViolation(p.name(a).into(), p.name(b).into(), p.name(c).into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// The radical: at `a`, the sum of images of all `F(b ≤ a)` with `b < a`.
    pub fn radical(self: &Arc<Self>) -> Submodule {
        let basis = (0..self.poset.len())
            .map(|a| {
                let parts: Vec<Matrix> =
                    self.poset.parents(a).iter().map(|&p| self.cover_map(p, a).expect("cover").clone()).collect();
                let refs: Vec<&Matrix> = parts.iter().collect();
                let span = Matrix::hstack(self.field, self.dims[a], &refs).expect("shapes");
                span.select_cols(&span.image_pivots())
            })
            .collect();
        Submodule { ambient: self.clone(), basis }
    }

    /// Dimensions of `F / rad F`, the number of minimal generators at each element.
    pub fn h0(&self) -> Vec<usize> {
        (0..self.poset.len())
            .map(|a| {
                let parts: Vec<&Matrix> =
                    self.poset.parents(a).iter().map(|&p| self.cover_map(p, a).expect("cover")).collect();
                let span = Matrix::hstack(self.field, self.dims[a], &parts).expect("shapes");
                self.dims[a] - span.rank()
            })
            .collect()
    }

    /// All structure maps are injective.
    pub fn is_filtration(&self) -> bool {
        self.poset.covers().iter().enumerate().all(|(i, &(a, _))| self.maps[i].rank() == self.dims[a])
    }

    /// Pointwise dimension at most one and every structure map of maximal rank.
    pub fn is_spread(&self) -> bool {
        if self.dims.iter().any(|&d| d > 1) {
            return false;
        }
        let p = &*self.poset;
        (0..p.len()).all(|a| p.up(a).ones().all(|b| self.map_unchecked(a, b).rank() == self.dims[a].min(self.dims[b])))
    }

    /// Dimension vector as a map from element names.
    pub fn named_dims(&self) -> BTreeMap<String, usize> {
        (0..self.poset.len()).map(|a| (self.poset.name(a).to_string(), self.dims[a])).collect()
    }
}

/// A pointwise subspace of a module that is closed under the structure maps.
///
/// `basis[a]` holds linearly independent spanning columns of the subspace at `a`.
#[derive(Debug, Clone)]
pub struct Submodule {
    pub ambient: Arc<PersistenceModule>,
    pub basis: Vec<Matrix>,
}

impl Submodule {
    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(|b| b.cols()).collect()
    }

    /// The submodule as a module in its own right, in the chosen bases.
    pub fn to_module(&self) -> Result<PersistenceModule> {
        let amb = &self.ambient;
        let p = amb.poset_arc().clone();
        let maps = p
            .covers()
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let img = amb.maps[i].dot(&self.basis[a]);
                self.basis[b].solve(&img).map_err(|_| Error::Invalid("subspace is not closed under structure maps".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PersistenceModule::new_unchecked(p, amb.field, self.dims(), maps))
    }
}

/// Betti multiplicities `β^d(a)`, keyed by degree then element index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BettiDiagram {
    entries: BTreeMap<(usize, usize), usize>,
}

impl BettiDiagram {
    pub fn new() -> BettiDiagram {
        BettiDiagram::default()
    }

    /// Set a multiplicity; zero removes the entry.
    pub fn set(&mut self, d: usize, a: usize, mult: usize) {
        if mult == 0 {
            self.entries.remove(&(d, a));
        } else {
            self.entries.insert((d, a), mult);
        }
    }

    pub fn add(&mut self, d: usize, a: usize, mult: usize) {
        let v = self.get(d, a) + mult;
        self.set(d, a, v);
    }

    pub fn get(&self, d: usize, a: usize) -> usize {
        self.entries.get(&(d, a)).copied().unwrap_or(0)
    }

    /// Elements with nonzero multiplicity in degree `d`, ascending.
    pub fn support(&self, d: usize) -> Vec<usize> {
        self.entries.range((d, 0)..(d + 1, 0)).map(|(&(_, a), _)| a).collect()
    }

    pub fn total(&self, d: usize) -> usize {
        self.entries.range((d, 0)..(d + 1, 0)).map(|(_, &m)| m).sum()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.entries.keys().map(|&(d, _)| d).max()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(d, a, mult)` triples in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.entries.iter().map(|(&(d, a), &m)| (d, a, m))
    }

    /// Drop degrees above `dmax`.
    pub fn truncate(&mut self, dmax: usize) {
        self.entries.retain(|&(d, _), _| d <= dmax);
    }
}
