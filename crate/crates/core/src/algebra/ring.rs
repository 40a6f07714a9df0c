use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::field::{FieldDesc, FieldElem};
use super::linalg::Matrix;
use super::Scalars;
use crate::{Error, Result};

/// `R = F_{q^m}[z]/(z^k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseRing {
    field: FieldDesc,
    k: usize,
}

/// Element `Σ_j a_j z^j` of a [`BaseRing`], stored as `k` field elements. The
/// derived order compares `a_0` first, which is the lexicographic order on
/// the `F_p` coordinates (z-degree major, field basis minor).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RingElem(Vec<FieldElem>);

impl RingElem {
    pub fn parts(&self) -> &[FieldElem] {
        &self.0
    }
}

pub fn make_ring(p: u32, d: usize, m: usize, k: usize, modulus: Option<Vec<u32>>) -> Result<Arc<BaseRing>> {
    BaseRing::new(p, d, m, k, modulus).map(Arc::new)
}

impl BaseRing {
    pub fn new(p: u32, d: usize, m: usize, k: usize, modulus: Option<Vec<u32>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        Ok(Self { field: FieldDesc::new(p, d, m, modulus)?, k })
    }

    pub fn from_field(field: FieldDesc, k: usize) -> Self {
        Self { field, k }
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> u32 {
        self.field.characteristic()
    }

    pub fn q(&self) -> u128 {
        self.field.q()
    }

    pub fn is_field(&self) -> bool {
        self.k == 1
    }

    pub fn dim_fp(&self) -> usize {
        self.field.degree() * self.k
    }

    pub fn dim_fq(&self) -> usize {
        self.field.m() * self.k
    }

    pub fn from_parts(&self, parts: Vec<FieldElem>) -> Result<RingElem> {
        if parts.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, found: parts.len() });
        }
        Ok(RingElem(parts))
    }

    pub fn embed_field(&self, a: &FieldElem) -> RingElem {
        let mut parts = vec![self.field.zero(); self.k];
        parts[0] = a.clone();
        RingElem(parts)
    }

    pub fn from_int(&self, c: i64) -> RingElem {
        self.embed_field(&self.field.from_int(c))
    }

    /// `z`, or zero when `k = 1`.
    pub fn zeta(&self) -> RingElem {
        self.zeta_pow(1)
    }

    pub fn zeta_pow(&self, j: usize) -> RingElem {
        let mut parts = vec![self.field.zero(); self.k];
        if j < self.k {
            parts[j] = self.field.one();
        }
        RingElem(parts)
    }

    /// The field generator `x` as a ring element.
    pub fn generator(&self) -> RingElem {
        self.embed_field(&self.field.generator())
    }

    pub fn coords(&self, a: &RingElem) -> Vec<u32> {
        a.0.iter().flat_map(|f| f.coords().iter().copied()).collect()
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<RingElem> {
        let n = self.field.degree();
        if coords.len() != n * self.k {
            return Err(Error::DimensionMismatch { expected: n * self.k, found: coords.len() });
        }
        coords.chunks(n).map(|c| self.field.from_coords(c)).collect::<Result<Vec<_>>>().map(RingElem)
    }

    pub fn from_index(&self, mut idx: u128) -> RingElem {
        let size = self.field.order();
        RingElem(
            (0..self.k)
                .map(|_| {
                    let f = self.field.from_index(idx % size);
                    idx /= size;
                    f
                })
                .collect(),
        )
    }

    /// All elements, sorted. Only for small rings.
    pub fn elements(&self) -> Vec<RingElem> {
        let total = self.field.order().pow(self.k as u32);
        let mut all: Vec<RingElem> = (0..total).map(|i| self.from_index(i)).collect();
        all.sort();
        all
    }

    /// Residue in `F_{q^m}` (the constant part in `z`).
    pub fn residue(&self, a: &RingElem) -> FieldElem {
        a.0[0].clone()
    }

    /// Lowest `j` with nonzero `z^j` coefficient; `None` for zero.
    pub fn valuation(&self, a: &RingElem) -> Option<usize> {
        a.0.iter().position(|f| !self.field.is_zero(f))
    }

    pub fn scale_field(&self, c: &FieldElem, a: &RingElem) -> RingElem {
        RingElem(a.0.iter().map(|x| self.field.mul(c, x)).collect())
    }

    /// `a ↦ a^q`, which sends `Σ a_j z^j` to `Σ a_j^q z^{jq}`.
    pub fn frobenius_q(&self, a: &RingElem) -> RingElem {
        let q = self.q() as usize;
        let mut parts = vec![self.field.zero(); self.k];
        for (j, c) in a.0.iter().enumerate() {
            if j * q < self.k {
                parts[j * q] = self.field.frobenius_q(c);
            } else {
                break;
            }
        }
        RingElem(parts)
    }

    /// `a^(q^i)`.
    pub fn frobenius_q_pow(&self, a: &RingElem, i: usize) -> RingElem {
        let mut cur = a.clone();
        for _ in 0..i {
            cur = self.frobenius_q(&cur);
        }
        cur
    }

    /// `x ∈ F_q ⊂ R`.
    pub fn is_fq(&self, a: &RingElem) -> bool {
        a.0[1..].iter().all(|c| self.field.is_zero(c)) && self.field.is_in_fq(&a.0[0])
    }

    pub fn fq_elements(&self) -> Vec<RingElem> {
        self.field.fq_elements().iter().map(|c| self.embed_field(c)).collect()
    }

    /// The `q`-th root when it exists: over a field always, otherwise only
    /// for elements of `F_{q^m}`.
    pub fn qth_root(&self, a: &RingElem) -> Option<RingElem> {
        if a.0[1..].iter().any(|c| !self.field.is_zero(c)) {
            return None;
        }
        Some(self.embed_field(&self.field.qth_root(&a.0[0])))
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> RingElem {
        RingElem((0..self.k).map(|_| self.field.random(rng)).collect())
    }

    pub fn random_unit<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> RingElem {
        loop {
            let a = self.random(rng);
            if self.is_unit(&a) {
                return a;
            }
        }
    }

    /// `R^N → F^{Nk}`: each coordinate contributes its `k` field parts.
    pub fn expand_vector(&self, v: &[RingElem]) -> Vec<FieldElem> {
        v.iter().flat_map(|x| x.0.iter().cloned()).collect()
    }

    pub fn collapse_vector(&self, v: &[FieldElem]) -> Vec<RingElem> {
        v.chunks(self.k).map(|c| RingElem(c.to_vec())).collect()
    }

    /// An `R`-matrix as the matrix of the same map over the field `F`.
    pub fn expand_matrix(&self, m: &Matrix<RingElem>) -> Matrix<FieldElem> {
        let k = self.k;
        Matrix::from_fn(m.rows() * k, m.cols() * k, |row, col| {
            let (i, a) = (row / k, row % k);
            let (j, b) = (col / k, col % k);
            if a >= b {
                m.get(i, j).0[a - b].clone()
            } else {
                self.field.zero()
            }
        })
    }

    pub fn residue_matrix(&self, m: &Matrix<RingElem>) -> Matrix<FieldElem> {
        m.map(|x| x.0[0].clone())
    }

    /// Entrywise `q`-Frobenius.
    pub fn frobenius_matrix(&self, m: &Matrix<RingElem>) -> Matrix<RingElem> {
        m.map(|x| self.frobenius_q(x))
    }

    /// Extends the field part by degree `s`: `F_{q^{ms}}[z]/(z^k)`.
    pub fn extend(self: &Arc<Self>, s: usize) -> Result<RingExtension> {
        if s == 0 {
            return Err(Error::InvalidParameter("extension degree must be positive".into()));
        }
        if s == 1 {
            return Ok(RingExtension {
                base: self.clone(),
                target: self.clone(),
                s,
                gen_image: self.field.generator(),
            });
        }
        let target_field = FieldDesc::new(self.p(), self.field.d(), self.field.m() * s, None)?;
        let gen_image = embedding_image(&self.field, &target_field)?;
        Ok(RingExtension {
            base: self.clone(),
            target: Arc::new(BaseRing::from_field(target_field, self.k)),
            s,
            gen_image,
        })
    }
}

type EmbeddingKey = (u32, Vec<u32>, Vec<u32>);

fn embedding_cache() -> &'static Mutex<HashMap<EmbeddingKey, FieldElem>> {
    static CACHE: OnceLock<Mutex<HashMap<EmbeddingKey, FieldElem>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Image of the generator of `small` in `big`: the least root of the modulus.
fn embedding_image(small: &FieldDesc, big: &FieldDesc) -> Result<FieldElem> {
    let key = (small.characteristic(), small.modulus().to_vec(), big.modulus().to_vec());
    if let Some(g) = embedding_cache().lock().unwrap().get(&key) {
        return Ok(g.clone());
    }
    let f: Vec<FieldElem> = small.modulus().iter().map(|&c| big.from_int(c as i64)).collect();
    let g = big
        .roots(&f)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Inconsistent("field does not embed".into()))?;
    embedding_cache().lock().unwrap().insert(key, g.clone());
    Ok(g)
}

/// `R → R ⊗ F_{q^{ms}}`, acting on the field part only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingExtension {
    pub base: Arc<BaseRing>,
    pub target: Arc<BaseRing>,
    pub s: usize,
    gen_image: FieldElem,
}

impl RingExtension {
    pub fn embed_field(&self, a: &FieldElem) -> FieldElem {
        if Arc::ptr_eq(&self.base, &self.target) {
            return a.clone();
        }
        let big = self.target.field();
        let mut acc = big.zero();
        for c in a.coords().iter().rev() {
            acc = big.add(&big.mul(&acc, &self.gen_image), &big.from_int(*c as i64));
        }
        acc
    }

    pub fn embed(&self, a: &RingElem) -> RingElem {
        RingElem(a.0.iter().map(|c| self.embed_field(c)).collect())
    }
}

impl Scalars for BaseRing {
    type Elem = RingElem;

    fn zero(&self) -> RingElem {
        RingElem(vec![self.field.zero(); self.k])
    }

    fn one(&self) -> RingElem {
        self.from_int(1)
    }

    fn is_zero(&self, a: &RingElem) -> bool {
        a.0.iter().all(|c| self.field.is_zero(c))
    }

    fn is_unit(&self, a: &RingElem) -> bool {
        !self.field.is_zero(&a.0[0])
    }

    fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem(a.0.iter().zip(&b.0).map(|(x, y)| self.field.add(x, y)).collect())
    }

    fn sub(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem(a.0.iter().zip(&b.0).map(|(x, y)| self.field.sub(x, y)).collect())
    }

    fn neg(&self, a: &RingElem) -> RingElem {
        RingElem(a.0.iter().map(|x| self.field.neg(x)).collect())
    }

    fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let f = &self.field;
        let mut parts = vec![f.zero(); self.k];
        for (i, x) in a.0.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.0.iter().enumerate().take(self.k - i) {
                if !f.is_zero(y) {
                    parts[i + j] = f.add(&parts[i + j], &f.mul(x, y));
                }
            }
        }
        RingElem(parts)
    }

    /// Inverse by the geometric series in the nilpotent part.
    fn inv(&self, a: &RingElem) -> Option<RingElem> {
        let c_inv = self.field.inv(&a.0[0])?;
        let u = self.scale_field(&c_inv, a);
        // u = 1 + n with n nilpotent
        let n = self.sub(&u, &self.one());
        let minus_n = self.neg(&n);
        let mut term = self.one();
        let mut sum = self.one();
        for _ in 1..self.k {
            term = self.mul(&term, &minus_n);
            sum = self.add(&sum, &term);
        }
        Some(self.scale_field(&c_inv, &sum))
    }
}
