//! Finite posets given by their Hasse diagram.

use crate::error::{Error, Result};
use fixedbitset::FixedBitSet;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

/// Default bound on the number of antichains or upsets enumerated.
pub const DEFAULT_MAX_ANTICHAINS: usize = 100_000;

/// Environment variable overriding [`DEFAULT_MAX_ANTICHAINS`].
pub const MAX_ANTICHAINS_ENV: &str = "RELBETTI_MAX_ANTICHAINS";

/// The enumeration bound, read from the environment when set.
pub fn default_max_antichains() -> usize {
    std::env::var(MAX_ANTICHAINS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ANTICHAINS)
}

/// A sorted list of pairwise incomparable element indices.
pub type Antichain = Vec<usize>;

/// An upward closed set of element indices.
pub type Upset = FixedBitSet;

/// Shape of the grid poset `{0..=n}^r` with the product order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridShape {
    pub n: usize,
    pub r: usize,
}

impl GridShape {
    pub fn len(&self) -> usize {
        (self.n + 1).pow(self.r as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinates of the element with the given index (first coordinate most significant).
    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut c = vec![0; self.r];
        for i in (0..self.r).rev() {
            c[i] = idx % (self.n + 1);
            idx /= self.n + 1;
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> Option<usize> {
        if coords.len() != self.r || coords.iter().any(|&x| x > self.n) {
            return None;
        }
        Some(coords.iter().fold(0, |acc, &x| acc * (self.n + 1) + x))
    }

    pub fn name(coords: &[usize]) -> String {
        coords.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// A finite poset. Element indices form a linear extension of the order.
#[derive(Debug, Clone)]
pub struct Poset {
    names: Vec<String>,
    index: HashMap<String, usize>,
    covers: Vec<(usize, usize)>,
    cover_index: HashMap<(usize, usize), usize>,
    lower: Vec<Vec<usize>>,
    upper: Vec<Vec<usize>>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    grid: Option<GridShape>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || self.names == other.names && self.covers == other.covers
    }
}

impl Eq for Poset {}

impl Poset {
    /// Build from element names and cover relations `(a, b)` meaning `a ≺ b`.
    ///
    /// Elements are reindexed along a linear extension; the input order is kept when it
    /// already is one.
    pub fn from_covers<S: AsRef<str>>(names: &[S], covers: &[(S, S)]) -> Result<Poset> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::DuplicateElement(n.clone()));
            }
        }
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| Error::UnknownElement(s.to_string()));
        let mut idx_covers = Vec::with_capacity(covers.len());
        for (a, b) in covers {
            idx_covers.push((lookup(a.as_ref())?, lookup(b.as_ref())?));
        }
        Poset::from_cover_indices(names, &idx_covers)
    }

    /// Like [`Poset::from_covers`] with covers given by position in `names`.
    pub fn from_cover_indices(names: Vec<String>, covers: &[(usize, usize)]) -> Result<Poset> {
        let n = names.len();
        let mut seen = HashMap::new();
        for n_ in &names {
            if seen.insert(n_.as_str(), ()).is_some() {
                return Err(Error::DuplicateElement(n_.clone()));
            }
        }
        let mut succ = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        let mut dedup = std::collections::HashSet::new();
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(Error::UnknownElement(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(Error::CyclicCovers(names[a].clone(), names[b].clone()));
            }
            if !dedup.insert((a, b)) {
                return Err(Error::RedundantCover(names[a].clone(), names[b].clone()));
            }
            succ[a].push(b);
            indeg[b] += 1;
        }
        // Kahn's algorithm, smallest original index first.
        let mut heap: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(a)) = heap.pop() {
            order.push(a);
            for &b in &succ[a] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    heap.push(Reverse(b));
                }
            }
        }
        if order.len() < n {
            let (a, b) = covers.iter().copied().find(|&(a, b)| indeg[a] > 0 && indeg[b] > 0).unwrap_or(covers[0]);
            return Err(Error::CyclicCovers(names[a].clone(), names[b].clone()));
        }
        let mut pos = vec![0; n];
        for (i, &a) in order.iter().enumerate() {
            pos[a] = i;
        }
        let new_names: Vec<String> = order.iter().map(|&a| names[a].clone()).collect();
        let new_covers: Vec<(usize, usize)> = covers.iter().map(|&(a, b)| (pos[a], pos[b])).collect();
        let p = Poset::assemble(new_names, new_covers, None);
        p.check_redundant()?;
        Ok(p)
    }

    /// Build from an order relation `leq` on `names`, computing the Hasse diagram.
    ///
    /// Fails with [`Error::NotPartialOrder`] if `leq` is not reflexive, antisymmetric and
    /// transitive.
    pub fn from_order(names: Vec<String>, leq: impl Fn(usize, usize) -> bool) -> Result<Poset> {
        let n = names.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for a in 0..n {
            for b in 0..n {
                if leq(a, b) {
                    up[a].insert(b);
                }
            }
            if !up[a].contains(a) {
                return Err(Error::NotPartialOrder(format!("{} is not below itself", names[a])));
            }
        }
        for a in 0..n {
            for b in up[a].ones() {
                if b != a && up[b].contains(a) {
                    return Err(Error::NotPartialOrder(format!("{} and {} are mutually below", names[a], names[b])));
                }
            }
        }
        // Keep the given order if it is a linear extension, else sort by down-set size.
        let identity_ok = (0..n).all(|a| up[a].ones().all(|b| b >= a));
        let order: Vec<usize> = if identity_ok {
            (0..n).collect()
        } else {
            let mut downc = vec![0usize; n];
            for u in &up {
                for b in u.ones() {
                    downc[b] += 1;
                }
            }
            let mut o: Vec<usize> = (0..n).collect();
            o.sort_by_key(|&a| downc[a]);
            o
        };
        let mut pos = vec![0; n];
        for (i, &a) in order.iter().enumerate() {
            pos[a] = i;
        }
        let mut nup = vec![FixedBitSet::with_capacity(n); n];
        for a in 0..n {
            for b in up[a].ones() {
                nup[pos[a]].insert(pos[b]);
            }
        }
        let names: Vec<String> = order.iter().map(|&a| names[a].clone()).collect();
        // Transitive reduction: scan strict up-sets in index order.
        let mut covers = Vec::new();
        let mut dominated = FixedBitSet::with_capacity(n);
        for a in 0..n {
            dominated.clear();
            for b in nup[a].ones() {
                if b == a || dominated.contains(b) {
                    continue;
                }
                covers.push((a, b));
                dominated.union_with(&nup[b]);
            }
        }
        let p = Poset::assemble(names, covers, None);
        if p.up != nup {
            return Err(Error::NotPartialOrder("relation is not transitive".into()));
        }
        Ok(p)
    }

    /// The grid `{0..=n}^r` with the product order; elements are named `"x1,...,xr"`.
    pub fn grid(n: usize, r: usize) -> Poset {
        let shape = GridShape { n, r };
        let len = shape.len();
        let mut names = Vec::with_capacity(len);
        let mut covers = Vec::new();
        for idx in 0..len {
            let c = shape.coords(idx);
            names.push(GridShape::name(&c));
            for i in 0..r {
                if c[i] < n {
                    let mut d = c.clone();
                    d[i] += 1;
                    covers.push((idx, shape.index(&d).expect("in range")));
                }
            }
        }
        Poset::assemble(names, covers, Some(shape))
    }

    /// Build the derived tables. `covers` must be a Hasse diagram along a linear extension.
    fn assemble(names: Vec<String>, mut covers: Vec<(usize, usize)>, grid: Option<GridShape>) -> Poset {
        let n = names.len();
        covers.sort_unstable();
        let cover_index = covers.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut lower = vec![Vec::new(); n];
        let mut upper = vec![Vec::new(); n];
        for &(a, b) in &covers {
            upper[a].push(b);
            lower[b].push(a);
        }
        for l in lower.iter_mut() {
            l.sort_unstable();
        }
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for a in (0..n).rev() {
            let mut s = FixedBitSet::with_capacity(n);
            s.insert(a);
            for &b in &upper[a] {
                s.union_with(&up[b]);
            }
            up[a] = s;
        }
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for a in 0..n {
            for b in up[a].ones() {
                down[b].insert(a);
            }
        }
        let index = names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Poset { names, index, covers, cover_index, lower, upper, up, down, grid }
    }

    fn check_redundant(&self) -> Result<()> {
        for &(a, b) in &self.covers {
            if self.upper[a].iter().any(|&c| c != b && self.up[c].contains(b)) {
                return Err(Error::RedundantCover(self.names[a].clone(), self.names[b].clone()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn grid_shape(&self) -> Option<GridShape> {
        self.grid
    }

    /// Grid coordinates of an element, if this is a grid poset.
    pub fn coords(&self, a: usize) -> Option<Vec<usize>> {
        self.grid.map(|g| g.coords(a))
    }

    pub fn grid_index(&self, coords: &[usize]) -> Option<usize> {
        self.grid.and_then(|g| g.index(coords))
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    #[inline]
    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Cover relations `(a, b)` with `a ≺ b`, sorted.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn cover_index(&self, a: usize, b: usize) -> Option<usize> {
        self.cover_index.get(&(a, b)).copied()
    }

    /// Elements covered by `a`, ascending.
    pub fn parents(&self, a: usize) -> &[usize] {
        &self.lower[a]
    }

    /// Elements covering `a`.
    pub fn children(&self, a: usize) -> &[usize] {
        &self.upper[a]
    }

    pub fn up(&self, a: usize) -> &FixedBitSet {
        &self.up[a]
    }

    pub fn down(&self, a: usize) -> &FixedBitSet {
        &self.down[a]
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.len())
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    /// Least upper bound of `s`, if it exists.
    pub fn join(&self, s: &[usize]) -> Option<usize> {
        let mut ub = self.full_set();
        for &x in s {
            ub.intersect_with(&self.up[x]);
        }
        let cand = ub.minimum()?;
        ub.is_subset(&self.up[cand]).then_some(cand)
    }

    /// Greatest lower bound of `s`, if it exists.
    pub fn meet(&self, s: &[usize]) -> Option<usize> {
        let mut lb = self.full_set();
        for &x in s {
            lb.intersect_with(&self.down[x]);
        }
        let cand = lb.maximum()?;
        lb.is_subset(&self.down[cand]).then_some(cand)
    }

    /// A pair without a join, if any.
    pub fn semilattice_witness(&self) -> Option<(usize, usize)> {
        if self.is_empty() {
            return None;
        }
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                if self.join(&[a, b]).is_none() {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_upper_semilattice(&self) -> bool {
        self.semilattice_witness().is_none()
    }

    pub fn require_upper_semilattice(&self) -> Result<()> {
        match self.semilattice_witness() {
            Some((a, b)) => Err(Error::NotSemilattice(self.names[a].clone(), self.names[b].clone())),
            None => Ok(()),
        }
    }

    /// Minimal elements of a set.
    pub fn min_elements(&self, s: &FixedBitSet) -> Antichain {
        s.ones().filter(|&a| self.down[a].intersection(s).all(|b| b == a)).collect()
    }

    /// Maximal elements of a set.
    pub fn max_elements(&self, s: &FixedBitSet) -> Antichain {
        s.ones().filter(|&a| self.up[a].intersection(s).all(|b| b == a)).collect()
    }

    pub fn upset_of(&self, elems: &[usize]) -> Upset {
        let mut s = self.empty_set();
        for &a in elems {
            s.union_with(&self.up[a]);
        }
        s
    }

    pub fn downset_of(&self, elems: &[usize]) -> FixedBitSet {
        let mut s = self.empty_set();
        for &a in elems {
            s.union_with(&self.down[a]);
        }
        s
    }

    pub fn is_upset(&self, s: &FixedBitSet) -> bool {
        s.ones().all(|a| self.up[a].is_subset(s))
    }

    pub fn is_antichain(&self, s: &[usize]) -> bool {
        s.iter().enumerate().all(|(i, &a)| s[i + 1..].iter().all(|&b| !self.comparable(a, b)))
    }

    /// Check that `s` is an antichain and return it sorted.
    pub fn antichain(&self, s: &[usize]) -> Result<Antichain> {
        let mut v = s.to_vec();
        v.sort_unstable();
        v.dedup();
        for (i, &a) in v.iter().enumerate() {
            if let Some(&b) = v[i + 1..].iter().find(|&&b| self.comparable(a, b)) {
                return Err(Error::NotAnAntichain(self.names[a].clone(), self.names[b].clone()));
            }
        }
        Ok(v)
    }

    /// Closure of `s` under pairwise joins.
    pub fn sublattice_closure(&self, s: &[usize]) -> Result<Vec<usize>> {
        let mut have = self.empty_set();
        let mut list: Vec<usize> = Vec::new();
        for &a in s {
            if !have.put(a) {
                list.push(a);
            }
        }
        let mut i = 0;
        while i < list.len() {
            for j in 0..i {
                let (a, b) = (list[i], list[j]);
                let c = self
                    .join(&[a, b])
                    .ok_or_else(|| Error::NotSemilattice(self.names[a].clone(), self.names[b].clone()))?;
                if !have.put(c) {
                    list.push(c);
                }
            }
            i += 1;
        }
        list.sort_unstable();
        Ok(list)
    }

    /// All antichains, in lexicographic order of their sorted index lists.
    pub fn enumerate_antichains(&self, max: usize) -> Result<Vec<Antichain>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        let blocked = self.empty_set();
        self.antichain_rec(0, &mut cur, &blocked, max, &mut out)?;
        Ok(out)
    }

    fn antichain_rec(
        &self,
        start: usize,
        cur: &mut Vec<usize>,
        blocked: &FixedBitSet,
        max: usize,
        out: &mut Vec<Antichain>,
    ) -> Result<()> {
        if out.len() >= max {
            return Err(Error::SizeBoundExceeded(max));
        }
        out.push(cur.clone());
        for a in start..self.len() {
            if blocked.contains(a) {
                continue;
            }
            let mut nb = blocked.clone();
            nb.union_with(&self.up[a]);
            nb.union_with(&self.down[a]);
            cur.push(a);
            self.antichain_rec(a + 1, cur, &nb, max, out)?;
            cur.pop();
        }
        Ok(())
    }

    /// All upsets, as upsets of the antichains from [`Poset::enumerate_antichains`].
    pub fn enumerate_upsets(&self, max: usize) -> Result<Vec<Upset>> {
        Ok(self.enumerate_antichains(max)?.iter().map(|s| self.upset_of(s)).collect())
    }

    /// The poset of antichains with `S ≼ T` iff every element of `T` lies above some element of `S`.
    pub fn antichain_poset(&self, max: usize) -> Result<(Poset, Vec<Antichain>)> {
        let chains = self.enumerate_antichains(max)?;
        let ups: Vec<Upset> = chains.iter().map(|s| self.upset_of(s)).collect();
        let names = chains.iter().map(|s| self.antichain_name(s)).collect();
        let j = Poset::from_order(names, |a, b| ups[b].is_subset(&ups[a]))?;
        let chains = j.names().iter().map(|n| self.parse_antichain_name(n)).collect::<Result<Vec<_>>>()?;
        Ok((j, chains))
    }

    /// Name of an antichain: `{a;b;c}` with element names in index order.
    pub fn antichain_name(&self, s: &[usize]) -> String {
        format!("{{{}}}", s.iter().map(|&a| self.names[a].as_str()).collect::<Vec<_>>().join(";"))
    }

    pub fn parse_antichain_name(&self, s: &str) -> Result<Antichain> {
        let inner = s
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::UnknownElement(s.to_string()))?;
        if inner.is_empty() {
            return Ok(Vec::new());
        }
        let elems = inner.split(';').map(|t| self.index_of(t)).collect::<Result<Vec<_>>>()?;
        self.antichain(&elems)
    }

    /// Name of a set of elements, given by its minimal elements.
    pub fn set_name(&self, s: &FixedBitSet) -> String {
        self.antichain_name(&self.min_elements(s))
    }
}
