use crate::error::{Error, Result};
use crate::fieldlin::{Matrix, Quotient};
use crate::pmod::{PersistenceModule, Submodule};
use std::sync::Arc;

/// A natural transformation `source -> target`, one matrix per element.
#[derive(Debug, Clone)]
pub struct NatTransformation {
    pub source: Arc<PersistenceModule>,
    pub target: Arc<PersistenceModule>,
    comps: Vec<Matrix>,
}

impl NatTransformation {
    /// Build and check shapes and naturality.
    pub fn new(source: Arc<PersistenceModule>, target: Arc<PersistenceModule>, comps: Vec<Matrix>) -> Result<Self> {
        if source.poset() != target.poset() {
            return Err(Error::Invalid("source and target live on different posets".into()));
        }
        if source.field() != target.field() {
            return Err(Error::FieldMismatch(source.field().characteristic(), target.field().characteristic()));
        }
        if comps.len() != source.poset().len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} components", source.poset().len()),
                found: comps.len().to_string(),
            });
        }
        for (a, c) in comps.iter().enumerate() {
            if c.shape() != (target.dim(a), source.dim(a)) || c.field() != source.field() {
                return Err(Error::DimensionMismatch {
                    expected: format!("{}x{} at {}", target.dim(a), source.dim(a), source.poset().name(a)),
                    found: format!("{}x{}", c.rows(), c.cols()),
                });
            }
        }
        let n = NatTransformation { source, target, comps };
        n.check_naturality()?;
        Ok(n)
    }

    pub(crate) fn new_unchecked(source: Arc<PersistenceModule>, target: Arc<PersistenceModule>, comps: Vec<Matrix>) -> Self {
        NatTransformation { source, target, comps }
    }

    pub fn zero(source: Arc<PersistenceModule>, target: Arc<PersistenceModule>) -> Self {
        let f = source.field();
        let comps = (0..source.poset().len()).map(|a| Matrix::zeros(f, target.dim(a), source.dim(a))).collect();
        NatTransformation { source, target, comps }
    }

    pub fn identity(m: Arc<PersistenceModule>) -> Self {
        let f = m.field();
        let comps = (0..m.poset().len()).map(|a| Matrix::identity(f, m.dim(a))).collect();
        NatTransformation { source: m.clone(), target: m, comps }
    }

    /// The inclusion of a submodule, together with the submodule as a module.
    pub fn inclusion(sub: &Submodule) -> Result<Self> {
        let m = Arc::new(sub.to_module()?);
        Ok(NatTransformation { source: m, target: sub.ambient.clone(), comps: sub.basis.clone() })
    }

    pub fn component(&self, a: usize) -> &Matrix {
        &self.comps[a]
    }

    pub fn components(&self) -> &[Matrix] {
        &self.comps
    }

    pub fn check_naturality(&self) -> Result<()> {
        let p = self.source.poset();
        for (i, &(a, b)) in p.covers().iter().enumerate() {
            let lhs = self.target.cover_maps()[i].dot(&self.comps[a]);
            let rhs = self.comps[b].dot(&self.source.cover_maps()[i]);
            if lhs != rhs {
                return Err(Error::NaturalityViolation(p.name(a).into(), p.name(b).into()));
            }
        }
        Ok(())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &NatTransformation) -> Result<Self> {
        if !Arc::ptr_eq(&inner.target, &self.source) && *inner.target != *self.source {
            return Err(Error::Invalid("composition of non-composable transformations".into()));
        }
        let comps = self.comps.iter().zip(&inner.comps).map(|(a, b)| a.dot(b)).collect();
        Ok(NatTransformation { source: inner.source.clone(), target: self.target.clone(), comps })
    }

    pub fn add(&self, other: &NatTransformation) -> Result<Self> {
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect::<Result<Vec<_>>>()?;
        Ok(NatTransformation { source: self.source.clone(), target: self.target.clone(), comps })
    }

    pub fn scale(&self, c: u32) -> Self {
        let comps = self.comps.iter().map(|m| m.scale(c)).collect();
        NatTransformation { source: self.source.clone(), target: self.target.clone(), comps }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn is_mono(&self) -> bool {
        self.comps.iter().all(|c| c.rank() == c.cols())
    }

    pub fn is_epi(&self) -> bool {
        self.comps.iter().all(|c| c.rank() == c.rows())
    }

    /// Components flattened row-major, element by element.
    pub fn flatten(&self) -> Vec<u32> {
        self.comps.iter().flat_map(|c| c.data().iter().copied()).collect()
    }
}

/// A basis of the space `Nat(F, G)`.
#[derive(Debug, Clone)]
pub struct NatSpace {
    pub source: Arc<PersistenceModule>,
    pub target: Arc<PersistenceModule>,
    offsets: Vec<usize>,
    /// Columns are flattened basis transformations.
    basis: Matrix,
    /// Positions where the basis restricts to the identity.
    free: Vec<usize>,
    /// `(element, row, col)` of each free position.
    free_loc: Vec<(usize, usize, usize)>,
}

impl NatSpace {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    fn unflatten(&self, v: &[u32]) -> NatTransformation {
        let f = self.source.field();
        let comps = (0..self.source.poset().len())
            .map(|x| {
                let (r, c) = (self.target.dim(x), self.source.dim(x));
                let o = self.offsets[x];
                Matrix::from_fn(f, r, c, |i, j| v[o + i * c + j])
            })
            .collect();
        NatTransformation::new_unchecked(self.source.clone(), self.target.clone(), comps)
    }

    /// The `i`-th basis element.
    pub fn element(&self, i: usize) -> NatTransformation {
        self.unflatten(&self.basis.col(i))
    }

    pub fn elements(&self) -> Vec<NatTransformation> {
        (0..self.dim()).map(|i| self.element(i)).collect()
    }

    /// The linear combination with the given coordinates.
    pub fn from_coords(&self, coords: &[u32]) -> NatTransformation {
        let v = self.basis.dot(&Matrix::column(self.source.field(), coords)).col(0);
        self.unflatten(&v)
    }

    /// Coordinates of a transformation known to lie in this space.
    pub fn coords(&self, phi: &NatTransformation) -> Vec<u32> {
        self.coords_flat(&phi.flatten())
    }

    pub(crate) fn coords_flat(&self, flat: &[u32]) -> Vec<u32> {
        self.free.iter().map(|&i| flat[i]).collect()
    }

    /// Coordinates of `phi ∘ pre` for `pre: H -> F`, without building the composite.
    pub(crate) fn coords_of_precomposite(&self, phi: &NatTransformation, pre: &NatTransformation) -> Vec<u32> {
        let f = self.source.field();
        self.free_loc
            .iter()
            .map(|&(x, i, j)| {
                let (pm, qm) = (phi.component(x), pre.component(x));
                (0..pm.cols()).fold(0u32, |acc, k| f.add(acc, f.mul(pm.get(i, k), qm.get(k, j))))
            })
            .collect()
    }
}

impl NatSpace {
    /// Coordinates of `post ∘ phi` for `post: G -> H`, in a space `Nat(F, H)`.
    pub(crate) fn coords_of_postcomposite(&self, post: &NatTransformation, phi: &NatTransformation) -> Vec<u32> {
        let f = self.source.field();
        self.free_loc
            .iter()
            .map(|&(x, i, j)| {
                let (hm, pm) = (post.component(x), phi.component(x));
                (0..hm.cols()).fold(0u32, |acc, k| f.add(acc, f.mul(hm.get(i, k), pm.get(k, j))))
            })
            .collect()
    }
}

/// A basis of `Nat(F, G)` from the naturality equations `G(x≺y) φ_x = φ_y F(x≺y)`.
pub fn nat_basis(source: &Arc<PersistenceModule>, target: &Arc<PersistenceModule>) -> Result<NatSpace> {
    if source.poset() != target.poset() {
        return Err(Error::Invalid("source and target live on different posets".into()));
    }
    if source.field() != target.field() {
        return Err(Error::FieldMismatch(source.field().characteristic(), target.field().characteristic()));
    }
    let f = source.field();
    let p = source.poset();
    let mut offsets = Vec::with_capacity(p.len());
    let mut total = 0;
    for x in 0..p.len() {
        offsets.push(total);
        total += target.dim(x) * source.dim(x);
    }
    let nrows: usize = p.covers().iter().map(|&(x, y)| target.dim(y) * source.dim(x)).sum();
    let mut eq = Matrix::zeros(f, nrows, total);
    let mut row = 0;
    for (ci, &(x, y)) in p.covers().iter().enumerate() {
        let g = &target.cover_maps()[ci];
        let fm = &source.cover_maps()[ci];
        let (dfx, dgx, dfy) = (source.dim(x), target.dim(x), source.dim(y));
        for i in 0..target.dim(y) {
            for j in 0..dfx {
                // sum_k G[i][k] φx[k][j] - sum_k φy[i][k] F[k][j]
                for k in 0..dgx {
                    let v = g.get(i, k);
                    if v != 0 {
                        let col = offsets[x] + k * dfx + j;
                        eq.set(row, col, f.add(eq.get(row, col), v));
                    }
                }
                for k in 0..dfy {
                    let v = fm.get(k, j);
                    if v != 0 {
                        let col = offsets[y] + i * dfy + k;
                        eq.set(row, col, f.sub(eq.get(row, col), v));
                    }
                }
                row += 1;
            }
        }
    }
    let (basis, free) = eq.kernel_with_free();
    let mut owner = Vec::with_capacity(total);
    for x in 0..p.len() {
        let c = source.dim(x);
        for t in 0..target.dim(x) * c {
            owner.push((x, t / c, t % c));
        }
    }
    let free_loc = free.iter().map(|&i| owner[i]).collect();
    Ok(NatSpace { source: source.clone(), target: target.clone(), offsets, basis, free, free_loc })
}

/// Kernel of `f` with its inclusion into the source.
pub fn kernel(f: &NatTransformation) -> Result<NatTransformation> {
    let basis = f.components().iter().map(|c| c.kernel_basis()).collect();
    NatTransformation::inclusion(&Submodule { ambient: f.source.clone(), basis })
}

/// Cokernel of `f` with its projection from the target.
pub fn cokernel(f: &NatTransformation) -> Result<NatTransformation> {
    let t = &f.target;
    let p = t.poset_arc().clone();
    let quots: Vec<Quotient> = f.components().iter().map(Quotient::new).collect();
    let maps = p
        .covers()
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| quots[y].proj.dot(&t.cover_maps()[i]).dot(&quots[x].lift))
        .collect();
    let dims = quots.iter().map(|q| q.dim()).collect();
    let m = Arc::new(PersistenceModule::new_unchecked(p, t.field(), dims, maps));
    let comps = quots.into_iter().map(|q| q.proj).collect();
    Ok(NatTransformation::new_unchecked(t.clone(), m, comps))
}

/// Pointwise exactness of `A_0 -> A_1 -> ... -> A_k` at every interior term.
pub fn is_exact(seq: &[NatTransformation]) -> bool {
    seq.windows(2).all(|w| {
        let (f, g) = (&w[0], &w[1]);
        (0..f.source.poset().len()).all(|x| {
            let (fx, gx) = (f.component(x), g.component(x));
            gx.dot(fx).is_zero() && fx.rank() + gx.rank() == f.target.dim(x)
        })
    })
}
