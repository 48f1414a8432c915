use super::nat::{is_exact, kernel, NatTransformation};
use crate::error::{Error, Result};
use crate::fieldlin::{Field, Matrix, Quotient};
use crate::pmod::{BettiDiagram, PersistenceModule};
use crate::poset::Poset;
use std::sync::Arc;

/// The free module `⊕_g K(gens[g], -)`.
///
/// At each element the basis lists the generators lying below it, in generator order.
#[derive(Debug, Clone)]
pub struct FreeModule {
    gens: Vec<usize>,
    module: Arc<PersistenceModule>,
}

impl FreeModule {
    pub fn new(poset: Arc<Poset>, field: Field, gens: Vec<usize>) -> FreeModule {
        let n = poset.len();
        let dims: Vec<usize> = (0..n).map(|y| gens.iter().filter(|&&g| poset.leq(g, y)).count()).collect();
        let maps = poset
            .covers()
            .iter()
            .map(|&(y, z)| {
                let mut m = Matrix::zeros(field, dims[z], dims[y]);
                let (mut r, mut c) = (0, 0);
                for &g in &gens {
                    let in_z = poset.leq(g, z);
                    if poset.leq(g, y) {
                        m.set(r, c, 1);
                        c += 1;
                    }
                    if in_z {
                        r += 1;
                    }
                }
                m
            })
            .collect();
        let module = Arc::new(PersistenceModule::new_unchecked(poset, field, dims, maps));
        FreeModule { gens, module }
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn module(&self) -> &Arc<PersistenceModule> {
        &self.module
    }

    /// Multiplicity of each element among the generators.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.module.poset().len()];
        for &g in &self.gens {
            m[g] += 1;
        }
        m
    }

    /// The map to `target` sending generator `g` to `images[g] ∈ target(gens[g])`.
    pub fn hom_from_images(&self, target: &Arc<PersistenceModule>, images: &[Vec<u32>]) -> Result<NatTransformation> {
        if images.len() != self.gens.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} images", self.gens.len()),
                found: images.len().to_string(),
            });
        }
        for (g, v) in images.iter().enumerate() {
            if v.len() != target.dim(self.gens[g]) {
                return Err(Error::DimensionMismatch {
                    expected: format!("vector of length {}", target.dim(self.gens[g])),
                    found: v.len().to_string(),
                });
            }
        }
        let f = target.field();
        let p = self.module.poset();
        let cols: Vec<Matrix> = images.iter().map(|v| Matrix::column(f, v)).collect();
        let comps = (0..p.len())
            .map(|y| {
                let mut m = Matrix::zeros(f, target.dim(y), self.module.dim(y));
                let mut c = 0;
                for (g, &a) in self.gens.iter().enumerate() {
                    if p.leq(a, y) {
                        m.set_block(0, c, &target.map_unchecked(a, y).dot(&cols[g]));
                        c += 1;
                    }
                }
                m
            })
            .collect();
        Ok(NatTransformation::new_unchecked(self.module.clone(), target.clone(), comps))
    }
}

/// A free resolution `... -> C_1 -> C_0 -> F -> 0`.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub target: Arc<PersistenceModule>,
    pub terms: Vec<FreeModule>,
    /// `differentials[0]` is the augmentation `C_0 -> F`; `differentials[d]` maps `C_d -> C_{d-1}`.
    pub differentials: Vec<NatTransformation>,
    pub minimal: bool,
    /// False when the computation stopped at the degree bound with a nonzero kernel left.
    pub complete: bool,
}

impl Resolution {
    pub fn betti(&self) -> BettiDiagram {
        let mut b = BettiDiagram::new();
        for (d, t) in self.terms.iter().enumerate() {
            for &g in t.generators() {
                b.add(d, g, 1);
            }
        }
        b
    }

    /// Index of the last nonzero term.
    pub fn length(&self) -> usize {
        self.terms.iter().rposition(|t| t.rank() > 0).unwrap_or(0)
    }

    /// Pointwise exactness of `0 -> C_k -> ... -> C_0 -> F -> 0`.
    pub fn is_exact(&self) -> bool {
        let mut seq: Vec<NatTransformation> = Vec::new();
        if let Some(last) = self.terms.last() {
            let zero = Arc::new(PersistenceModule::zero(self.target.poset_arc().clone(), self.target.field()));
            if self.complete {
                seq.push(NatTransformation::zero(zero.clone(), last.module().clone()));
            }
            seq.extend(self.differentials.iter().rev().cloned());
            seq.push(NatTransformation::zero(self.target.clone(), zero));
        } else {
            return self.target.is_zero();
        }
        is_exact(&seq)
    }
}

/// A projective cover `⊕ K(a,-) -> F` with generators at complement pivots of the radical.
pub fn minimal_cover(f: &Arc<PersistenceModule>) -> Result<(FreeModule, NatTransformation)> {
    let p = f.poset();
    let mut gens = Vec::new();
    let mut images = Vec::new();
    for x in 0..p.len() {
        let parts: Vec<&Matrix> = p.parents(x).iter().map(|&q| f.cover_map(q, x).expect("cover")).collect();
        let span = Matrix::hstack(f.field(), f.dim(x), &parts)?;
        for &q in &Quotient::new(&span).basis {
            let mut v = vec![0; f.dim(x)];
            v[q] = 1;
            gens.push(x);
            images.push(v);
        }
    }
    let free = FreeModule::new(f.poset_arc().clone(), f.field(), gens);
    let map = free.hom_from_images(f, &images)?;
    Ok((free, map))
}

/// Minimal free resolution computed by iterated kernels of minimal covers.
pub fn minimal_resolution(f: &Arc<PersistenceModule>, dmax: usize) -> Result<Resolution> {
    let mut terms = Vec::new();
    let mut diffs: Vec<NatTransformation> = Vec::new();
    let mut current = f.clone();
    let mut incl: Option<NatTransformation> = None;
    let mut complete = false;
    for d in 0..=dmax {
        if current.is_zero() {
            complete = true;
            break;
        }
        let (free, cover) = minimal_cover(&current)?;
        let diff = match &incl {
            Some(i) => i.compose(&cover)?,
            None => cover.clone(),
        };
        let z = kernel(&cover)?;
        terms.push(free);
        diffs.push(diff);
        current = z.source.clone();
        incl = Some(z);
        if d == dmax && current.is_zero() {
            complete = true;
        }
    }
    Ok(Resolution { target: f.clone(), terms, differentials: diffs, minimal: true, complete })
}

/// Betti diagram from the minimal resolution, up to degree `dmax`.
pub fn betti(f: &Arc<PersistenceModule>, dmax: usize) -> Result<BettiDiagram> {
    Ok(minimal_resolution(f, dmax)?.betti())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m0_resolution() {
        let m = Arc::new(PersistenceModule::m0_demo());
        let r = minimal_resolution(&m, 5).unwrap();
        assert!(r.complete);
        assert!(r.is_exact());
        let b = r.betti();
        let p = m.poset();
        let names = |d: usize| b.support(d).iter().map(|&a| p.name(a).to_string()).collect::<Vec<_>>();
        assert_eq!(names(0), vec!["0,0"]);
        assert_eq!(names(1), vec!["0,4", "3,2", "4,0"]);
        assert_eq!(names(2), vec!["3,4", "4,2"]);
        assert_eq!(b.max_degree(), Some(2));
    }

    #[test]
    fn truncated_resolution_flagged() {
        let m = Arc::new(PersistenceModule::m0_demo());
        let r = minimal_resolution(&m, 1).unwrap();
        assert!(!r.complete);
        assert_eq!(r.terms.len(), 2);
    }
}
