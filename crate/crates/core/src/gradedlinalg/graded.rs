use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::matrix::{hermitian_form, Matrix};
use super::solve::inverse;
use crate::error::{Error, Result};
use crate::exactnum::{Rational, Scalar};

/// Basis label: doubled H-eigenvalue, Cartan eigenvalues, parity and ordinal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightLabel {
    pub delta2: i64,
    pub cartan: Vec<Scalar>,
    pub parity: u8,
    pub index: usize,
}

impl WeightLabel {
    pub fn new(delta2: i64, cartan: Vec<Scalar>, parity: u8, index: usize) -> Self {
        WeightLabel { delta2, cartan, parity, index }
    }

    fn order_key(&self) -> (&[Scalar], usize) {
        (&self.cartan, self.index)
    }
}

/// Homogeneous vector living in one component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HVec {
    pub delta2: i64,
    pub v: Vec<Scalar>,
}

impl HVec {
    pub fn zero(delta2: i64, dim: usize) -> Self {
        HVec { delta2, v: vec![Scalar::zero(); dim] }
    }

    pub fn basis(delta2: i64, dim: usize, i: usize) -> Self {
        let mut h = HVec::zero(delta2, dim);
        h.v[i] = Scalar::one();
        h
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, s: &Scalar) -> HVec {
        HVec { delta2: self.delta2, v: self.v.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, o: &HVec) -> HVec {
        assert_eq!(self.delta2, o.delta2, "adding vectors of different degree");
        HVec { delta2: self.delta2, v: self.v.iter().zip(&o.v).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &HVec) -> HVec {
        assert_eq!(self.delta2, o.delta2, "subtracting vectors of different degree");
        HVec { delta2: self.delta2, v: self.v.iter().zip(&o.v).map(|(a, b)| a - b).collect() }
    }
}

/// Half-integer graded space truncated at `cutoff2 / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSpace {
    pub components: BTreeMap<i64, Vec<WeightLabel>>,
    pub cutoff2: i64,
    pub gram: BTreeMap<i64, Matrix>,
}

impl GradedSpace {
    /// Structural validation only; positivity of the gram is a separate check.
    pub fn new(components: BTreeMap<i64, Vec<WeightLabel>>, cutoff2: i64, gram: BTreeMap<i64, Matrix>) -> Result<Self> {
        if cutoff2 < 0 {
            return Err(Error::InvalidSpace("negative cutoff".into()));
        }
        for (&d2, labels) in &components {
            if d2 < 0 {
                return Err(Error::InvalidSpace(format!("negative grading 2Δ={d2}")));
            }
            if d2 > cutoff2 {
                return Err(Error::InvalidSpace(format!("component 2Δ={d2} above cutoff {cutoff2}")));
            }
            if let Some(l) = labels.iter().find(|l| l.delta2 != d2) {
                return Err(Error::InvalidSpace(format!("label with 2Δ={} stored under 2Δ={d2}", l.delta2)));
            }
            if labels.windows(2).any(|w| w[0].order_key() >= w[1].order_key()) {
                return Err(Error::InvalidSpace(format!("basis of 2Δ={d2} not in canonical order")));
            }
            let n = labels.len();
            let g = gram.get(&d2).ok_or_else(|| Error::InvalidSpace(format!("missing gram for 2Δ={d2}")))?;
            if g.rows != n || g.cols != n {
                return Err(Error::InvalidSpace(format!("gram of 2Δ={d2} has wrong shape")));
            }
            if !g.is_hermitian() {
                return Err(Error::InvalidSpace(format!("gram of 2Δ={d2} is not Hermitian")));
            }
        }
        if let Some(k) = gram.keys().find(|k| !components.contains_key(k)) {
            return Err(Error::InvalidSpace(format!("gram for absent component 2Δ={k}")));
        }
        Ok(GradedSpace { components, cutoff2, gram })
    }

    pub fn dim(&self, delta2: i64) -> usize {
        self.components.get(&delta2).map_or(0, Vec::len)
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.components.keys().copied().collect()
    }

    pub fn in_cutoff(&self, delta2: i64) -> bool {
        (0..=self.cutoff2).contains(&delta2)
    }

    pub fn labels(&self, delta2: i64) -> &[WeightLabel] {
        self.components.get(&delta2).map_or(&[], |v| v.as_slice())
    }

    pub fn gram_of(&self, delta2: i64) -> Matrix {
        self.gram.get(&delta2).cloned().unwrap_or_else(|| Matrix::zeros(0, 0))
    }

    pub fn total_dim(&self) -> usize {
        self.components.values().map(Vec::len).sum()
    }

    /// First component whose gram is not positive definite, with a witness vector.
    pub fn gram_failure(&self) -> Option<(i64, Vec<Scalar>)> {
        self.gram.iter().find_map(|(&d2, g)| positive_definite(g).err().map(|w| (d2, w)))
    }

    pub fn inner(&self, delta2: i64, u: &[Scalar], v: &[Scalar]) -> Scalar {
        hermitian_form(&self.gram_of(delta2), u, v)
    }
}

/// Positive definiteness of a Hermitian matrix via G = L·D·L^H.
/// On failure returns `v` with `<v|G|v> <= 0`, `v != 0`.
pub fn positive_definite(g: &Matrix) -> std::result::Result<(), Vec<Scalar>> {
    let n = g.rows;
    let mut l = Matrix::identity(n);
    let mut d: Vec<Scalar> = Vec::with_capacity(n);
    for k in 0..n {
        for i in k..n {
            // L[i][k] * d[k] = G[i][k] - sum_{j<k} L[i][j] d[j] conj(L[k][j])
            let mut s = g.get(i, k).clone();
            for j in 0..k {
                let t = &(l.get(i, j) * &d[j]) * &l.get(k, j).conj();
                s -= &t;
            }
            if i == k {
                d.push(s);
            } else {
                let v = s.checked_div(&d[k]).expect("pivot checked positive");
                l.set(i, k, v);
            }
            if i == k {
                let dk = &d[k];
                let positive = dk.is_real() && dk.re > Rational::from_integer(0.into());
                if !positive {
                    // solve L^H v = e_k
                    let mut v = vec![Scalar::zero(); n];
                    v[k] = Scalar::one();
                    for j in (0..k).rev() {
                        let mut s = Scalar::zero();
                        for m in j + 1..=k {
                            s += &(&l.get(m, j).conj() * &v[m]);
                        }
                        v[j] = -s;
                    }
                    return Err(v);
                }
            }
        }
    }
    Ok(())
}

/// Block map of fixed degree; `blocks[s]` maps V_s into V_{s+degree2}.
/// `dims` and `cutoff2` record the shape of the underlying space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMap {
    pub degree2: i64,
    pub parity: u8,
    pub blocks: BTreeMap<i64, Matrix>,
    pub truncated: BTreeSet<i64>,
    pub dims: BTreeMap<i64, usize>,
    pub cutoff2: i64,
}

fn dims_of(space: &GradedSpace) -> BTreeMap<i64, usize> {
    space.components.iter().map(|(k, v)| (*k, v.len())).collect()
}

impl BlockMap {
    /// Builds blocks for every component; `f(s)` is called only when the target is in cutoff.
    pub fn from_fn(space: &GradedSpace, degree2: i64, parity: u8, mut f: impl FnMut(i64) -> Matrix) -> Self {
        let mut blocks = BTreeMap::new();
        let mut truncated = BTreeSet::new();
        for s in space.degrees() {
            let t = s + degree2;
            if t > space.cutoff2 {
                truncated.insert(s);
                continue;
            }
            let m = if t < 0 || space.dim(t) == 0 { Matrix::zeros(space.dim(t), space.dim(s)) } else { f(s) };
            assert!(m.rows == space.dim(t) && m.cols == space.dim(s), "block shape mismatch at 2Δ={s}");
            blocks.insert(s, m);
        }
        BlockMap { degree2, parity, blocks, truncated, dims: dims_of(space), cutoff2: space.cutoff2 }
    }

    pub fn zero(space: &GradedSpace, degree2: i64, parity: u8) -> Self {
        BlockMap::from_fn(space, degree2, parity, |s| Matrix::zeros(space.dim(s + degree2), space.dim(s)))
    }

    pub fn identity(space: &GradedSpace) -> Self {
        BlockMap::from_fn(space, 0, 0, |s| Matrix::identity(space.dim(s)))
    }

    pub fn dim(&self, d2: i64) -> usize {
        self.dims.get(&d2).copied().unwrap_or(0)
    }

    /// Checks every block against the space's component dimensions and the truncation metadata.
    pub fn check_shape(&self, space: &GradedSpace) -> Result<()> {
        if self.dims != dims_of(space) || self.cutoff2 != space.cutoff2 {
            return Err(Error::Structural("map built on a different space".into()));
        }
        for s in space.degrees() {
            let t = s + self.degree2;
            match self.blocks.get(&s) {
                Some(m) => {
                    if m.cols != space.dim(s) || m.rows != space.dim(t) {
                        return Err(Error::Structural(format!(
                            "block at 2Δ={s} is {}x{}, expected {}x{}",
                            m.rows,
                            m.cols,
                            space.dim(t),
                            space.dim(s)
                        )));
                    }
                    if t > space.cutoff2 {
                        return Err(Error::Structural(format!("block at 2Δ={s} targets beyond cutoff")));
                    }
                }
                None if t > space.cutoff2 && self.truncated.contains(&s) => {}
                None => return Err(Error::Structural(format!("missing block at 2Δ={s}"))),
            }
        }
        Ok(())
    }

    pub fn block(&self, s: i64) -> Option<&Matrix> {
        self.blocks.get(&s)
    }

    pub fn is_truncated_at(&self, s: i64) -> bool {
        self.truncated.contains(&s)
    }

    /// Applies to a homogeneous vector; truncated sources are inconclusive.
    pub fn apply(&self, v: &HVec) -> Result<HVec> {
        let t = v.delta2 + self.degree2;
        if self.truncated.contains(&v.delta2) || (t > self.cutoff2 && !v.v.is_empty()) {
            return Err(Error::Inconclusive(format!("block at 2Δ={} targets beyond cutoff", v.delta2)));
        }
        match self.blocks.get(&v.delta2) {
            Some(m) => {
                if m.cols != v.v.len() {
                    return Err(Error::Structural(format!(
                        "vector of length {} for block {}x{}",
                        v.v.len(),
                        m.rows,
                        m.cols
                    )));
                }
                Ok(HVec { delta2: t, v: m.apply(&v.v) })
            }
            None if v.v.is_empty() => Ok(HVec::zero(t, self.dim(t))),
            None => Err(Error::Structural(format!("no block at 2Δ={}", v.delta2))),
        }
    }

    fn combine(&self, o: &BlockMap, f: impl Fn(&Matrix, &Matrix) -> Result<Matrix>) -> Result<BlockMap> {
        if self.degree2 != o.degree2 {
            return Err(Error::Structural("adding maps of different degree".into()));
        }
        if self.dims != o.dims {
            return Err(Error::Structural("adding maps on different spaces".into()));
        }
        let mut truncated: BTreeSet<i64> = self.truncated.union(&o.truncated).copied().collect();
        let mut blocks = BTreeMap::new();
        for (s, a) in &self.blocks {
            match o.blocks.get(s) {
                Some(b) => {
                    blocks.insert(*s, f(a, b)?);
                }
                None => {
                    truncated.insert(*s);
                }
            }
        }
        for s in o.blocks.keys() {
            if !self.blocks.contains_key(s) {
                truncated.insert(*s);
            }
        }
        Ok(BlockMap {
            degree2: self.degree2,
            parity: self.parity,
            blocks,
            truncated,
            dims: self.dims.clone(),
            cutoff2: self.cutoff2.min(o.cutoff2),
        })
    }

    pub fn add(&self, o: &BlockMap) -> Result<BlockMap> {
        self.combine(o, |a, b| a.checked_add(b))
    }

    pub fn sub(&self, o: &BlockMap) -> Result<BlockMap> {
        self.combine(o, |a, b| a.checked_add(&b.neg()))
    }

    pub fn scale(&self, s: &Scalar) -> BlockMap {
        let mut out = self.clone();
        for m in out.blocks.values_mut() {
            *m = m.scale(s);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(Matrix::is_zero)
    }

    /// First block where two maps differ on their common defined region.
    pub fn first_difference(&self, o: &BlockMap) -> Option<(i64, usize, usize)> {
        for (s, a) in &self.blocks {
            if let Some(b) = o.blocks.get(s) {
                if let Some((i, j)) = a.first_difference(b) {
                    return Some((*s, i, j));
                }
            }
        }
        None
    }

    /// Sources defined in both maps.
    pub fn common_sources(&self, o: &BlockMap) -> Vec<i64> {
        self.blocks.keys().filter(|s| o.blocks.contains_key(s)).copied().collect()
    }
}

/// Composite `f ∘ g`.
pub fn compose(f: &BlockMap, g: &BlockMap) -> Result<BlockMap> {
    if f.dims != g.dims {
        return Err(Error::Structural("composing maps on different spaces".into()));
    }
    let degree2 = f.degree2 + g.degree2;
    let cutoff2 = f.cutoff2.min(g.cutoff2);
    let mut blocks = BTreeMap::new();
    let mut truncated = BTreeSet::new();
    for (&s, &ds) in &g.dims {
        let t = s + g.degree2;
        let u = t + f.degree2;
        let Some(gb) = g.blocks.get(&s) else {
            truncated.insert(s);
            continue;
        };
        if u > cutoff2 {
            truncated.insert(s);
            continue;
        }
        if gb.rows == 0 {
            blocks.insert(s, Matrix::zeros(if u < 0 { 0 } else { f.dim(u) }, ds));
            continue;
        }
        let Some(fb) = f.blocks.get(&t) else {
            truncated.insert(s);
            continue;
        };
        if fb.cols != gb.rows {
            return Err(Error::Structural(format!(
                "dimension mismatch at 2Δ={t}: {}x{} after {}x{}",
                fb.rows, fb.cols, gb.rows, gb.cols
            )));
        }
        blocks.insert(s, fb.checked_mul(gb)?);
    }
    Ok(BlockMap { degree2, parity: f.parity ^ g.parity, blocks, truncated, dims: g.dims.clone(), cutoff2 })
}

/// Supercommutator `f∘g − (−1)^{p_f p_g} g∘f`.
pub fn supercommutator(f: &BlockMap, g: &BlockMap) -> Result<BlockMap> {
    let fg = compose(f, g)?;
    let gf = compose(g, f)?;
    if f.parity & g.parity == 1 {
        fg.add(&gf)
    } else {
        fg.sub(&gf)
    }
}

/// Hermitian adjoint with respect to the gram: `A_t = G_s^{-1} f_s^H G_t`.
pub fn adjoint(f: &BlockMap, space: &GradedSpace) -> Result<BlockMap> {
    if let Some((d2, _)) = space.gram_failure() {
        return Err(Error::InvalidSpace(format!("gram of 2Δ={d2} is not positive definite")));
    }
    let mut inv: BTreeMap<i64, Matrix> = BTreeMap::new();
    for (&d2, g) in &space.gram {
        inv.insert(d2, inverse(g).ok_or_else(|| Error::InvalidSpace(format!("singular gram at 2Δ={d2}")))?);
    }
    let degree2 = -f.degree2;
    let mut blocks = BTreeMap::new();
    let mut truncated = BTreeSet::new();
    for t in space.degrees() {
        let s = t + degree2;
        if s > space.cutoff2 {
            truncated.insert(t);
            continue;
        }
        if s < 0 || space.dim(s) == 0 {
            blocks.insert(t, Matrix::zeros(space.dim(s), space.dim(t)));
            continue;
        }
        let fb = f.blocks.get(&s).ok_or_else(|| {
            if f.truncated.contains(&s) {
                Error::Precondition(format!("map truncated at 2Δ={s}"))
            } else {
                Error::Structural(format!("map has no block at 2Δ={s}"))
            }
        })?;
        let gt = space.gram_of(t);
        let a = inv[&s].checked_mul(&fb.adjoint())?.checked_mul(&gt)?;
        blocks.insert(t, a);
    }
    Ok(BlockMap { degree2, parity: f.parity, blocks, truncated, dims: dims_of(space), cutoff2: space.cutoff2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_space() -> GradedSpace {
        let mut comps = BTreeMap::new();
        let mut gram = BTreeMap::new();
        for (d2, n) in [(0i64, 1usize), (2, 2), (4, 2)] {
            comps.insert(d2, (0..n).map(|i| WeightLabel::new(d2, vec![], 0, i)).collect());
            let mut g = Matrix::identity(n);
            if n == 2 {
                g.set(0, 0, Scalar::from_int(2));
                g.set(0, 1, Scalar::i());
                g.set(1, 0, -Scalar::i());
            }
            gram.insert(d2, g);
        }
        GradedSpace::new(comps, 4, gram).unwrap()
    }

    #[test]
    fn identity_composes_trivially() {
        let sp = toy_space();
        let g = BlockMap::from_fn(&sp, 2, 0, |s| {
            let (r, c) = (sp.dim(s + 2), sp.dim(s));
            Matrix::from_rows(
                (0..r).map(|i| (0..c).map(|j| Scalar::from_int((i + 2 * j + 1) as i64)).collect()).collect(),
            )
        });
        assert_eq!(compose(&BlockMap::identity(&sp), &g).unwrap(), g);
    }

    #[test]
    fn adjoint_of_identity() {
        let sp = toy_space();
        let id = BlockMap::identity(&sp);
        assert_eq!(adjoint(&id, &sp).unwrap(), id);
    }

    #[test]
    fn negative_gram_gives_witness() {
        let g = Matrix::from_int_rows(&[&[1, 2], &[2, 1]]);
        let w = positive_definite(&g).unwrap_err();
        let n = hermitian_form(&g, &w, &w);
        assert!(n.re <= Rational::from_integer(0.into()));
        assert!(positive_definite(&Matrix::identity(3)).is_ok());
    }

    #[test]
    fn degree_of_lowering_after_raising() {
        let sp = toy_space();
        let up = BlockMap::zero(&sp, 2, 0);
        let down = BlockMap::zero(&sp, -2, 0);
        let c = compose(&down, &up).unwrap();
        assert_eq!(c.degree2, 0);
        assert!(c.truncated.contains(&4));
    }
}
