//! Relative homological algebra with respect to a collection `P: J^op -> Fun(I, vect)`.
//!
//! The right adjoint `R = Nat(P(-), -)` turns modules over `I` into modules over `J`, and
//! the left adjoint `L` goes back. Relative Betti diagrams are read off from `R`.

use crate::error::{Error, Result};
use crate::fieldlin::{Field, Matrix, Quotient};
use crate::homalg::{self, is_exact, kernel, minimal_cover, nat_basis, NatSpace, NatTransformation};
use crate::pmod::{BettiDiagram, PersistenceModule};
use crate::poset::Poset;
use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use std::sync::{Arc, OnceLock};

/// Outcome of a structural check, with an offending pair `(a, b)` of `J` when it fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatusReport {
    pub holds: bool,
    pub witness: Option<(usize, usize)>,
}

impl StatusReport {
    fn from_witness(w: Option<(usize, usize)>) -> StatusReport {
        StatusReport { holds: w.is_none(), witness: w }
    }
}

/// How an object is generated, used to shortcut `Nat` computations.
#[derive(Debug, Clone)]
enum ObjShape {
    Zero,
    /// One generator `gen` at `at`; `zero_min` are the minimal `y >= at` where the object vanishes.
    Cyclic { at: usize, gen: Vec<u32>, zero_min: Vec<usize> },
    General,
}

/// A functor `P: J^op -> Fun(I, vect)`: objects `P(a)` and, for each cover `a ≺ b` of `J`,
/// an arrow `P(b) -> P(a)`.
#[derive(Debug)]
pub struct CollectionFunctor {
    i: Arc<Poset>,
    j: Arc<Poset>,
    field: Field,
    objs: Vec<Arc<PersistenceModule>>,
    arrows: Vec<NatTransformation>,
    label: String,
    shapes: OnceLock<Vec<ObjShape>>,
    thin: OnceLock<StatusReport>,
    flat: OnceLock<StatusReport>,
    degeneracy: OnceLock<Result<StatusReport>>,
}

impl CollectionFunctor {
    /// Build and check that every arrow is a natural transformation `P(b) -> P(a)`.
    pub fn new(
        i: Arc<Poset>,
        j: Arc<Poset>,
        field: Field,
        objs: Vec<Arc<PersistenceModule>>,
        arrows: Vec<NatTransformation>,
        label: impl Into<String>,
    ) -> Result<CollectionFunctor> {
        if objs.len() != j.len() || arrows.len() != j.covers().len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} objects and {} arrows", j.len(), j.covers().len()),
                found: format!("{} objects and {} arrows", objs.len(), arrows.len()),
            });
        }
        for m in &objs {
            if *m.poset() != *i || m.field() != field {
                return Err(Error::Invalid("object does not live on the indexing poset".into()));
            }
        }
        for (k, &(a, b)) in j.covers().iter().enumerate() {
            let f = &arrows[k];
            if *f.source != *objs[b] || *f.target != *objs[a] {
                return Err(Error::Invalid(format!("arrow for {} < {} has wrong ends", j.name(a), j.name(b))));
            }
            f.check_naturality()?;
        }
        Ok(CollectionFunctor::new_unchecked(i, j, field, objs, arrows, label))
    }

    pub(crate) fn new_unchecked(
        i: Arc<Poset>,
        j: Arc<Poset>,
        field: Field,
        objs: Vec<Arc<PersistenceModule>>,
        arrows: Vec<NatTransformation>,
        label: impl Into<String>,
    ) -> CollectionFunctor {
        CollectionFunctor {
            i,
            j,
            field,
            objs,
            arrows,
            label: label.into(),
            shapes: OnceLock::new(),
            thin: OnceLock::new(),
            flat: OnceLock::new(),
            degeneracy: OnceLock::new(),
        }
    }

    /// A collection where each object is `K` on a convex support and each arrow is the
    /// identity on the intersection of supports.
    pub fn from_supports(
        i: Arc<Poset>,
        j: Arc<Poset>,
        field: Field,
        supports: &[FixedBitSet],
        label: impl Into<String>,
    ) -> Result<CollectionFunctor> {
        let objs: Vec<Arc<PersistenceModule>> =
            supports.iter().map(|s| Arc::new(PersistenceModule::indicator(i.clone(), field, s))).collect();
        let arrows = j
            .covers()
            .iter()
            .map(|&(a, b)| {
                let comps = (0..i.len())
                    .map(|x| {
                        let (ra, cb) = (objs[a].dim(x), objs[b].dim(x));
                        if ra == 1 && cb == 1 {
                            Matrix::identity(field, 1)
                        } else {
                            Matrix::zeros(field, ra, cb)
                        }
                    })
                    .collect();
                NatTransformation::new(objs[b].clone(), objs[a].clone(), comps)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CollectionFunctor::new_unchecked(i, j, field, objs, arrows, label))
    }

    pub fn i_poset(&self) -> &Arc<Poset> {
        &self.i
    }

    pub fn j_poset(&self) -> &Arc<Poset> {
        &self.j
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn obj(&self, a: usize) -> &Arc<PersistenceModule> {
        &self.objs[a]
    }

    pub fn objs(&self) -> &[Arc<PersistenceModule>] {
        &self.objs
    }

    /// Arrows indexed like the covers of `J`.
    pub fn arrows(&self) -> &[NatTransformation] {
        &self.arrows
    }

    pub fn is_zero_obj(&self, a: usize) -> bool {
        self.objs[a].is_zero()
    }

    /// Elements of `J` with a nonzero object.
    pub fn nonzero_elements(&self) -> Vec<usize> {
        (0..self.j.len()).filter(|&a| !self.is_zero_obj(a)).collect()
    }

    /// The arrow `P(a ≼ b): P(b) -> P(a)`, composed along a fixed chain of covers.
    pub fn composite(&self, a: usize, b: usize) -> Result<NatTransformation> {
        if !self.j.leq(a, b) {
            return Err(Error::NotComparable(self.j.name(a).into(), self.j.name(b).into()));
        }
        let mut chain = vec![b];
        let mut cur = b;
        while cur != a {
            cur = self.chain_parent(a, cur);
            chain.push(cur);
        }
        let mut acc = NatTransformation::identity(self.objs[b].clone());
        for w in chain.windows(2) {
            acc = self.arrow(w[1], w[0]).compose(&acc)?;
        }
        Ok(acc)
    }

    fn chain_parent(&self, a: usize, b: usize) -> usize {
        *self.j.parents(b).iter().find(|&&p| self.j.leq(a, p)).expect("a lies below a parent of b")
    }

    fn arrow(&self, a: usize, b: usize) -> &NatTransformation {
        &self.arrows[self.j.cover_index(a, b).expect("cover")]
    }

    /// All composites `P(a ≼ b)` for `b ≥ a`, indexed by `b`.
    fn composites_from(&self, a: usize) -> Vec<Option<NatTransformation>> {
        let mut out: Vec<Option<NatTransformation>> = vec![None; self.j.len()];
        out[a] = Some(NatTransformation::identity(self.objs[a].clone()));
        for b in self.j.up(a).ones() {
            if b == a {
                continue;
            }
            let p = self.chain_parent(a, b);
            let prev = out[p].as_ref().expect("parent precedes");
            out[b] = Some(prev.compose(self.arrow(p, b)).expect("composable"));
        }
        out
    }

    /// Check contravariant functoriality: composites do not depend on the chain.
    pub fn validate(&self) -> Result<()> {
        for f in &self.arrows {
            f.check_naturality()?;
        }
        let j = &*self.j;
        (0..j.len()).into_par_iter().try_for_each(|a| {
            let comps = self.composites_from(a);
            for b in j.up(a).ones() {
                let ab = comps[b].as_ref().expect("computed");
                for &c in j.children(b) {
                    let lhs = comps[c].as_ref().expect("computed");
                    let rhs = ab.compose(self.arrow(b, c))?;
                    if lhs.components() != rhs.components() {
                        return Err(Error::FunctorialityViolation(j.name(a).into(), j.name(b).into(), j.name(c).into()));
                    }
                }
            }
            Ok(())
        })
    }

    fn shapes(&self) -> &[ObjShape] {
        self.shapes.get_or_init(|| {
            self.objs
                .par_iter()
                .map(|m| {
                    if m.is_zero() {
                        return ObjShape::Zero;
                    }
                    let (free, cover) = minimal_cover(m).expect("cover");
                    if free.rank() != 1 {
                        return ObjShape::General;
                    }
                    let at = free.generators()[0];
                    let gen = cover.component(at).col(0);
                    let i = m.poset();
                    let mut zero = i.up(at).clone();
                    zero.difference_with(&m.support());
                    ObjShape::Cyclic { at, gen, zero_min: i.min_elements(&zero) }
                })
                .collect()
        })
    }

    fn all_cyclic(&self) -> bool {
        self.shapes().iter().all(|s| !matches!(s, ObjShape::General))
    }

    /// `dim Nat(P(b), P(a))`.
    pub fn nat_dim(&self, b: usize, a: usize) -> usize {
        let (pb, pa) = (&self.objs[b], &self.objs[a]);
        match &self.shapes()[b] {
            ObjShape::Zero => 0,
            _ if pa.is_zero() => 0,
            ObjShape::Cyclic { at, zero_min, .. } => {
                let d = pa.dim(*at);
                if d == 0 {
                    return 0;
                }
                let parts: Vec<Matrix> = zero_min.iter().map(|&y| pa.map_unchecked(*at, y)).collect();
                let refs: Vec<&Matrix> = parts.iter().collect();
                let stacked = Matrix::vstack(self.field, d, &refs).expect("shapes");
                d - stacked.rank()
            }
            ObjShape::General => nat_basis(pb, pa).expect("same poset").dim(),
        }
    }

    /// Elements `b ≥ a` with `P(a ≼ b) != 0`.
    pub fn composite_nonzero_from(&self, a: usize) -> FixedBitSet {
        let j = &*self.j;
        let mut out = j.empty_set();
        if self.is_zero_obj(a) {
            return out;
        }
        if !self.all_cyclic() {
            for (b, c) in self.composites_from(a).into_iter().enumerate() {
                if c.is_some_and(|c| !c.is_zero()) {
                    out.insert(b);
                }
            }
            return out;
        }
        // For cyclic objects a transformation is determined by the image of the generator,
        // so track c(a,b) = P(a ≼ b)(gen_b) ∈ P(a)(at_b) along the chain.
        let shapes = self.shapes();
        let pa = &self.objs[a];
        let mut val: Vec<Option<Vec<u32>>> = vec![None; j.len()];
        if let ObjShape::Cyclic { gen, .. } = &shapes[a] {
            val[a] = Some(gen.clone());
            out.insert(a);
        }
        for b in j.up(a).ones() {
            if b == a {
                continue;
            }
            let ObjShape::Cyclic { at: xb, gen: gb, .. } = &shapes[b] else {
                continue;
            };
            let p = self.chain_parent(a, b);
            let (Some(cp), ObjShape::Cyclic { at: xp, gen: gp, .. }) = (&val[p], &shapes[p]) else {
                continue;
            };
            // arrow(p≺b)(gen_b) = λ · P(p)(xp ≤ xb) gen_p
            let w = self.arrow(p, b).component(*xb).dot(&Matrix::column(self.field, gb)).col(0);
            if w.iter().all(|&x| x == 0) {
                continue;
            }
            let pp = &self.objs[p];
            let u = pp.map_unchecked(*xp, *xb).dot(&Matrix::column(self.field, gp)).col(0);
            let k = u.iter().position(|&x| x != 0).expect("cyclic object spans");
            let lambda = self.field.mul(w[k], self.field.inv(u[k]));
            let c = pa.map_unchecked(*xp, *xb).dot(&Matrix::column(self.field, cp)).scale(lambda).col(0);
            if c.iter().any(|&x| x != 0) {
                out.insert(b);
                val[b] = Some(c);
            }
        }
        out
    }

    /// Support of `ker η_a`: elements `b ≥ a` where `P(a ≼ b)` vanishes.
    pub fn ker_unit_support(&self, a: usize) -> FixedBitSet {
        let mut s = self.j.up(a).clone();
        s.difference_with(&self.composite_nonzero_from(a));
        s
    }

    fn check_pairs(&self, flat: bool, reference: bool) -> Option<(usize, usize)> {
        let j = &*self.j;
        (0..j.len()).into_par_iter().find_map_first(|a| {
            if self.is_zero_obj(a) {
                return None;
            }
            let nonzero = if reference {
                let mut s = j.empty_set();
                for (b, c) in self.composites_from(a).into_iter().enumerate() {
                    if c.is_some_and(|c| !c.is_zero()) {
                        s.insert(b);
                    }
                }
                s
            } else {
                self.composite_nonzero_from(a)
            };
            let pa_supp = self.objs[a].support();
            (0..j.len()).find_map(|b| {
                let dim = if self.is_zero_obj(b) || self.objs[b].support().is_disjoint(&pa_supp) {
                    0
                } else if reference {
                    nat_basis(&self.objs[b], &self.objs[a]).expect("same poset").dim()
                } else {
                    self.nat_dim(b, a)
                };
                let ok = if !j.leq(a, b) {
                    dim == 0
                } else if flat {
                    dim == 1 && nonzero.contains(b)
                } else {
                    dim == 0 || (dim == 1 && nonzero.contains(b))
                };
                (!ok).then_some((a, b))
            })
        })
    }

    /// Thinness via the exhaustive `Nat` characterization.
    pub fn thin_report(&self) -> StatusReport {
        *self.thin.get_or_init(|| StatusReport::from_witness(self.check_pairs(false, false)))
    }

    /// Flatness via the exhaustive `Nat` characterization.
    pub fn flat_report(&self) -> StatusReport {
        *self.flat.get_or_init(|| StatusReport::from_witness(self.check_pairs(true, false)))
    }

    /// Thinness computed with plain `Nat` bases and full composites, without shortcuts.
    pub fn thin_report_reference(&self) -> StatusReport {
        StatusReport::from_witness(self.check_pairs(false, true))
    }

    /// Flatness computed without shortcuts.
    pub fn flat_report_reference(&self) -> StatusReport {
        StatusReport::from_witness(self.check_pairs(true, true))
    }

    pub fn require_thin(&self) -> Result<()> {
        match self.thin_report().witness {
            Some((a, b)) => Err(Error::NotThin(self.j.name(a).into(), self.j.name(b).into())),
            None => Ok(()),
        }
    }

    /// For each `a`, the join closure of the minimal elements of `ker η_a` must consist of
    /// elements with zero object.
    pub fn degeneracy_report(&self) -> Result<StatusReport> {
        self.degeneracy
            .get_or_init(|| {
                self.require_thin()?;
                self.j.require_upper_semilattice()?;
                let j = &*self.j;
                let w = (0..j.len())
                    .into_par_iter()
                    .map(|a| -> Result<Option<(usize, usize)>> {
                        let mins = j.min_elements(&self.ker_unit_support(a));
                        let closure = j.sublattice_closure(&mins)?;
                        Ok(closure.into_iter().find(|&b| !self.is_zero_obj(b)).map(|b| (a, b)))
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .flatten()
                    .next();
                Ok(StatusReport::from_witness(w))
            })
            .clone()
    }
}

/// `R M`: the module `a ↦ Nat(P(a), M)` over `J`, with the chosen bases.
#[derive(Debug, Clone)]
pub struct RImage {
    pub module: Arc<PersistenceModule>,
    pub spaces: Vec<NatSpace>,
}

/// Apply the right adjoint `R = Nat(P(-), -)` to a module over `I`.
pub fn r_functor(p: &CollectionFunctor, m: &Arc<PersistenceModule>) -> Result<RImage> {
    if *m.poset() != **p.i_poset() || m.field() != p.field {
        return Err(Error::Invalid("module does not live on the indexing poset".into()));
    }
    let spaces: Vec<NatSpace> = p.objs.par_iter().map(|o| nat_basis(o, m)).collect::<Result<Vec<_>>>()?;
    let elems: Vec<Vec<NatTransformation>> = spaces.par_iter().map(|s| s.elements()).collect();
    let j = p.j_poset();
    let maps = j
        .covers()
        .par_iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let mut t = Matrix::zeros(p.field, spaces[b].dim(), spaces[a].dim());
            for (i, phi) in elems[a].iter().enumerate() {
                let c = spaces[b].coords_of_precomposite(phi, &p.arrows[k]);
                for (r, v) in c.into_iter().enumerate() {
                    t.set(r, i, v);
                }
            }
            t
        })
        .collect();
    let dims = spaces.iter().map(|s| s.dim()).collect();
    let module = Arc::new(PersistenceModule::new_unchecked(j.clone(), p.field, dims, maps));
    Ok(RImage { module, spaces })
}

/// `R h: R M -> R N` for `h: M -> N`.
pub fn r_morphism(src: &RImage, tgt: &RImage, h: &NatTransformation) -> NatTransformation {
    let f = h.source.field();
    let comps = src
        .spaces
        .par_iter()
        .zip(&tgt.spaces)
        .map(|(s, t)| {
            let mut m = Matrix::zeros(f, t.dim(), s.dim());
            for (i, phi) in s.elements().iter().enumerate() {
                for (r, v) in t.coords_of_postcomposite(h, phi).into_iter().enumerate() {
                    m.set(r, i, v);
                }
            }
            m
        })
        .collect();
    NatTransformation::new_unchecked(src.module.clone(), tgt.module.clone(), comps)
}

/// `L F`: a pointwise coequalizer of `⊕_a P(a) ⊗ F(a)` over the covers of `J`.
#[derive(Debug, Clone)]
pub struct LImage {
    pub module: Arc<PersistenceModule>,
    /// Per element of `I`: offset of the block `P(a)(x) ⊗ F(a)` for each `a` in `J`.
    offsets: Vec<Vec<usize>>,
    quots: Vec<Quotient>,
}

/// Apply the left adjoint `L` to a module over `J`.
pub fn l_functor(p: &CollectionFunctor, f: &Arc<PersistenceModule>) -> Result<LImage> {
    let (i, j) = (p.i_poset(), p.j_poset());
    if *f.poset() != **j || f.field() != p.field {
        return Err(Error::Invalid("module does not live on the parameter poset".into()));
    }
    let fld = p.field;
    let per_x: Vec<(Vec<usize>, Quotient)> = (0..i.len())
        .into_par_iter()
        .map(|x| {
            let mut offs = Vec::with_capacity(j.len());
            let mut total = 0;
            for a in 0..j.len() {
                offs.push(total);
                total += p.objs[a].dim(x) * f.dim(a);
            }
            let ncols: usize = j.covers().iter().map(|&(a, b)| p.objs[b].dim(x) * f.dim(a)).sum();
            let mut rel = Matrix::zeros(fld, total, ncols);
            let mut c0 = 0;
            for (k, &(a, b)) in j.covers().iter().enumerate() {
                let (pbx, fa) = (p.objs[b].dim(x), f.dim(a));
                if pbx * fa == 0 {
                    continue;
                }
                let arrow = p.arrows[k].component(x);
                let left = arrow.kron(&Matrix::identity(fld, fa)).expect("field");
                rel.set_block(offs[a], c0, &left);
                let right = Matrix::identity(fld, pbx).kron(&f.cover_maps()[k]).expect("field").scale(fld.neg(1));
                rel.add_block(offs[b], c0, &right);
                c0 += pbx * fa;
            }
            (offs, Quotient::new(&rel))
        })
        .collect();
    let (offsets, quots): (Vec<_>, Vec<_>) = per_x.into_iter().unzip();
    let maps = i
        .covers()
        .iter()
        .enumerate()
        .map(|(k, &(x, y))| {
            let (vx, vy) = (quots[x].proj.cols(), quots[y].proj.cols());
            let mut t = Matrix::zeros(fld, vy, vx);
            for a in 0..j.len() {
                let blk = p.objs[a].cover_maps()[k].kron(&Matrix::identity(fld, f.dim(a))).expect("field");
                t.set_block(offsets[y][a], offsets[x][a], &blk);
            }
            quots[y].proj.dot(&t).dot(&quots[x].lift)
        })
        .collect();
    let dims = quots.iter().map(|q| q.dim()).collect();
    let module = Arc::new(PersistenceModule::new_unchecked(i.clone(), fld, dims, maps));
    Ok(LImage { module, offsets, quots })
}

/// `L g: L F -> L G` for `g: F -> G`.
pub fn l_morphism(p: &CollectionFunctor, src: &LImage, tgt: &LImage, g: &NatTransformation) -> NatTransformation {
    let fld = p.field;
    let i = p.i_poset();
    let j = p.j_poset();
    let comps = (0..i.len())
        .map(|x| {
            let mut t = Matrix::zeros(fld, tgt.quots[x].proj.cols(), src.quots[x].proj.cols());
            for a in 0..j.len() {
                let blk = Matrix::identity(fld, p.objs[a].dim(x)).kron(g.component(a)).expect("field");
                t.set_block(tgt.offsets[x][a], src.offsets[x][a], &blk);
            }
            tgt.quots[x].proj.dot(&t).dot(&src.quots[x].lift)
        })
        .collect();
    NatTransformation::new_unchecked(src.module.clone(), tgt.module.clone(), comps)
}

/// The unit `F -> R L F`.
pub fn unit(p: &CollectionFunctor, f: &Arc<PersistenceModule>, lf: &LImage, rlf: &RImage) -> NatTransformation {
    let fld = p.field;
    let i = p.i_poset();
    let comps = (0..p.j_poset().len())
        .map(|a| {
            let space = &rlf.spaces[a];
            let mut m = Matrix::zeros(fld, space.dim(), f.dim(a));
            for v in 0..f.dim(a) {
                // w ∈ P(a)(x) ↦ [w ⊗ e_v]_a
                let ev = Matrix::from_fn(fld, f.dim(a), 1, |r, _| (r == v) as u32);
                let comps = (0..i.len())
                    .map(|x| {
                        let d = p.objs[a].dim(x);
                        let mut emb = Matrix::zeros(fld, lf.quots[x].proj.cols(), d);
                        emb.set_block(lf.offsets[x][a], 0, &Matrix::identity(fld, d).kron(&ev).expect("field"));
                        lf.quots[x].proj.dot(&emb)
                    })
                    .collect();
                let phi = NatTransformation::new_unchecked(p.objs[a].clone(), lf.module.clone(), comps);
                for (r, c) in space.coords(&phi).into_iter().enumerate() {
                    m.set(r, v, c);
                }
            }
            m
        })
        .collect();
    NatTransformation::new_unchecked(f.clone(), rlf.module.clone(), comps)
}

/// The counit `L R M -> M`.
pub fn counit(p: &CollectionFunctor, m: &Arc<PersistenceModule>, rm: &RImage, lrm: &LImage) -> NatTransformation {
    let fld = p.field;
    let i = p.i_poset();
    let elems: Vec<Vec<NatTransformation>> = rm.spaces.iter().map(|s| s.elements()).collect();
    let comps = (0..i.len())
        .map(|x| {
            let mut e = Matrix::zeros(fld, m.dim(x), lrm.quots[x].proj.cols());
            for a in 0..p.j_poset().len() {
                let d = p.objs[a].dim(x);
                let k = elems[a].len();
                for w in 0..d {
                    for (jdx, phi) in elems[a].iter().enumerate() {
                        let col = lrm.offsets[x][a] + w * k + jdx;
                        for r in 0..m.dim(x) {
                            e.set(r, col, phi.component(x).get(r, w));
                        }
                    }
                }
            }
            e.dot(&lrm.quots[x].lift)
        })
        .collect();
    NatTransformation::new_unchecked(lrm.module.clone(), m.clone(), comps)
}

/// The unit `η_a: K(a,-) -> R P(a)` over `J`, sending `1` at `b` to `P(a ≼ b)`.
pub fn unit_at(p: &CollectionFunctor, a: usize, rpa: &RImage) -> Result<NatTransformation> {
    let j = p.j_poset();
    let fld = p.field;
    let k = Arc::new(PersistenceModule::free(j.clone(), fld, a));
    let comps = (0..j.len())
        .map(|b| {
            let mut m = Matrix::zeros(fld, rpa.spaces[b].dim(), k.dim(b));
            if j.leq(a, b) {
                let c = rpa.spaces[b].coords(&p.composite(a, b)?);
                for (r, v) in c.into_iter().enumerate() {
                    m.set(r, 0, v);
                }
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NatTransformation::new_unchecked(k, rpa.module.clone(), comps))
}

/// `P`-exactness: `R` of the sequence is pointwise exact.
pub fn is_p_exact(p: &CollectionFunctor, seq: &[NatTransformation]) -> Result<bool> {
    if seq.is_empty() {
        return Ok(true);
    }
    let mut mods = vec![seq[0].source.clone()];
    mods.extend(seq.iter().map(|f| f.target.clone()));
    let rs = mods.iter().map(|m| r_functor(p, m)).collect::<Result<Vec<_>>>()?;
    let rseq: Vec<NatTransformation> = seq.iter().enumerate().map(|(k, f)| r_morphism(&rs[k], &rs[k + 1], f)).collect();
    Ok(is_exact(&rseq))
}

/// A direct sum `⊕_k P(summands[k])`.
#[derive(Debug, Clone)]
pub struct PFreeModule {
    pub summands: Vec<usize>,
    pub module: Arc<PersistenceModule>,
}

impl PFreeModule {
    fn new(p: &CollectionFunctor, summands: Vec<usize>) -> Result<PFreeModule> {
        let parts: Vec<&PersistenceModule> = summands.iter().map(|&a| &*p.objs[a]).collect();
        let module = Arc::new(PersistenceModule::direct_sum(p.i_poset().clone(), p.field, &parts)?);
        Ok(PFreeModule { summands, module })
    }

    pub fn rank(&self) -> usize {
        self.summands.len()
    }
}

/// A minimal `P`-cover `⊕ P(a) -> M`.
#[derive(Debug, Clone)]
pub struct RelativeCover {
    pub free: PFreeModule,
    pub map: NatTransformation,
}

/// The adjoint of a minimal cover of `R M`, realized on `⊕ P(a)`.
pub fn relative_minimal_cover(p: &CollectionFunctor, m: &Arc<PersistenceModule>) -> Result<RelativeCover> {
    p.require_thin()?;
    let rm = r_functor(p, m)?;
    relative_cover_from(p, m, &rm)
}

fn relative_cover_from(p: &CollectionFunctor, m: &Arc<PersistenceModule>, rm: &RImage) -> Result<RelativeCover> {
    let (c0, f) = minimal_cover(&rm.module)?;
    let gens = c0.generators().to_vec();
    let phis: Vec<NatTransformation> =
        gens.iter().enumerate().map(|(g, &a)| rm.spaces[a].from_coords(&f.component(a).col(position_at(p.j_poset(), &gens, g)))).collect();
    let free = PFreeModule::new(p, gens)?;
    let i = p.i_poset();
    let comps = (0..i.len())
        .map(|x| {
            let blocks: Vec<&Matrix> = phis.iter().map(|phi| phi.component(x)).collect();
            Matrix::hstack(p.field, m.dim(x), &blocks)
        })
        .collect::<Result<Vec<_>>>()?;
    let map = NatTransformation::new_unchecked(free.module.clone(), m.clone(), comps);
    Ok(RelativeCover { free, map })
}

/// Column of generator `g` in a free module's basis at its own element.
fn position_at(j: &Poset, gens: &[usize], g: usize) -> usize {
    gens[..g].iter().filter(|&&h| j.leq(h, gens[g])).count()
}

/// A minimal `P`-resolution `... -> C_1 -> C_0 -> M`.
#[derive(Debug, Clone)]
pub struct RelativeResolution {
    pub target: Arc<PersistenceModule>,
    pub terms: Vec<PFreeModule>,
    /// `differentials[0]` is `C_0 -> M`; `differentials[d]` maps `C_d -> C_{d-1}`.
    pub differentials: Vec<NatTransformation>,
    pub complete: bool,
    /// Whether `R` of the augmented resolution is exact.
    pub p_exact: bool,
}

impl RelativeResolution {
    /// Multiplicities of each `P(a)` in each degree.
    pub fn betti(&self) -> BettiDiagram {
        let mut b = BettiDiagram::new();
        for (d, t) in self.terms.iter().enumerate() {
            for &a in &t.summands {
                b.add(d, a, 1);
            }
        }
        b
    }

    /// Index of the last nonzero term (0 when there are none).
    pub fn length(&self) -> usize {
        self.terms.iter().rposition(|t| t.rank() > 0).unwrap_or(0)
    }
}

/// The reference computation of relative Betti diagrams: iterate minimal `P`-covers on
/// kernels taken over `I`, stopping once `R` of the kernel vanishes.
pub fn relative_minimal_resolution(
    p: &CollectionFunctor,
    m: &Arc<PersistenceModule>,
    dmax: usize,
) -> Result<RelativeResolution> {
    p.require_thin()?;
    let mut terms = Vec::new();
    let mut diffs: Vec<NatTransformation> = Vec::new();
    let mut current = m.clone();
    let mut incl: Option<NatTransformation> = None;
    let mut complete = false;
    let mut rcur = r_functor(p, &current)?;
    for _ in 0..=dmax {
        if rcur.module.is_zero() {
            complete = true;
            break;
        }
        let cover = relative_cover_from(p, &current, &rcur)?;
        let diff = match &incl {
            Some(i) => i.compose(&cover.map)?,
            None => cover.map.clone(),
        };
        let z = kernel(&cover.map)?;
        terms.push(cover.free);
        diffs.push(diff);
        current = z.source.clone();
        incl = Some(z);
        rcur = r_functor(p, &current)?;
    }
    if !complete && rcur.module.is_zero() {
        complete = true;
    }
    let p_exact = {
        let zero = Arc::new(PersistenceModule::zero(m.poset_arc().clone(), m.field()));
        let mut seq = Vec::new();
        if let Some(z) = &incl {
            seq.push(z.clone());
        }
        seq.extend(diffs.iter().rev().cloned());
        seq.push(NatTransformation::zero(m.clone(), zero));
        if terms.is_empty() {
            r_functor(p, m)?.module.is_zero()
        } else {
            is_p_exact(p, &seq)?
        }
    };
    Ok(RelativeResolution { target: m.clone(), terms, differentials: diffs, complete, p_exact })
}

/// Length of the minimal `P`-resolution, if it ends by `dmax`.
pub fn relative_projective_dimension(p: &CollectionFunctor, m: &Arc<PersistenceModule>, dmax: usize) -> Result<usize> {
    let r = relative_minimal_resolution(p, m, dmax)?;
    if !r.complete {
        return Err(Error::DmaxReached(dmax));
    }
    Ok(r.length())
}

/// Relative Betti numbers at `a` from Koszul homology of `R M`.
///
/// Requires thinness, a semilattice `J`, and (unless `force`) the degeneracy hypothesis.
pub fn relative_betti_koszul(
    p: &CollectionFunctor,
    m: &Arc<PersistenceModule>,
    a: usize,
    dmax: usize,
    force: bool,
) -> Result<Vec<usize>> {
    if p.is_zero_obj(a) {
        return Err(Error::ZeroObject(p.j_poset().name(a).into()));
    }
    check_koszul_preconditions(p, force)?;
    let rm = r_functor(p, m)?;
    homalg::betti_koszul(&rm.module, a, dmax)
}

/// Relative Betti diagram from Koszul homology at every `a` with `P(a) != 0`.
///
/// Returns the diagram and whether the degeneracy hypothesis was verified.
pub fn relative_betti_koszul_all(
    p: &CollectionFunctor,
    m: &Arc<PersistenceModule>,
    dmax: usize,
    force: bool,
) -> Result<(BettiDiagram, bool)> {
    let verified = check_koszul_preconditions(p, force)?;
    let rm = r_functor(p, m)?;
    let nz = p.nonzero_elements();
    let rows = nz
        .par_iter()
        .map(|&a| homalg::betti_koszul(&rm.module, a, dmax).map(|h| (a, h)))
        .collect::<Result<Vec<_>>>()?;
    let mut b = BettiDiagram::new();
    for (a, h) in rows {
        for (d, v) in h.into_iter().enumerate() {
            b.set(d, a, v);
        }
    }
    Ok((b, verified))
}

fn check_koszul_preconditions(p: &CollectionFunctor, force: bool) -> Result<bool> {
    p.require_thin()?;
    p.j_poset().require_upper_semilattice()?;
    let rep = p.degeneracy_report()?;
    match rep.witness {
        Some((a, b)) if !force => {
            Err(Error::HypothesisNotVerified(p.j_poset().name(a).into(), p.j_poset().name(b).into()))
        }
        _ => Ok(rep.holds),
    }
}

/// Relative Betti diagram from the reference resolution.
pub fn relative_betti(p: &CollectionFunctor, m: &Arc<PersistenceModule>, dmax: usize) -> Result<BettiDiagram> {
    Ok(relative_minimal_resolution(p, m, dmax)?.betti())
}
