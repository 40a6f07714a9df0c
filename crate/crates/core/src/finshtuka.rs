//! `p^n`-torsion finite shtukas as semilinear matrix data, the `Dr_q`
//! presentation of their group schemes, and naive `Γ₀(p^n)` flags.
//!
//! Conventions: a shtuka of rank `N` over `R` has basis `b_1..b_N`; column `j`
//! of `phi` lists the coordinates of `φ(b_j)` and column `j` of `pi` those of
//! `ϖ·b_j`. So `φ(v) = Φ·σ(v)` and `ϖ·v = Π·v` on coordinate vectors.

use std::sync::Arc;

use crate::algebra::linalg::{nullspace, rank, Matrix, Subspace};
use crate::algebra::{BaseRing, FieldElem, RingElem, Scalars};
use crate::drinfeld::DrinfeldModule;
use crate::skewpoly::{residue_ring, right_divide, SkewPoly};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionShtuka {
    ring: Arc<BaseRing>,
    n: usize,
    phi: Matrix<RingElem>,
    pi: Matrix<RingElem>,
}

impl TorsionShtuka {
    /// Validates `Π^n = 0` and `φ(ϖ b_j) = ϖ φ(b_j)` on basis vectors.
    pub fn new(ring: &Arc<BaseRing>, n: usize, phi: Matrix<RingElem>, pi: Matrix<RingElem>) -> Result<Self> {
        let big_n = phi.rows();
        for m in [&phi, &pi] {
            if m.rows() != big_n || m.cols() != big_n {
                return Err(Error::DimensionMismatch { expected: big_n, found: m.cols().max(m.rows()) });
            }
        }
        let f = Self { ring: ring.clone(), n, phi, pi };
        f.check_invariants().map_err(Error::InvalidParameter)?;
        Ok(f)
    }

    pub fn zero(ring: &Arc<BaseRing>, n: usize) -> Self {
        Self { ring: ring.clone(), n, phi: Matrix::zeros(ring.as_ref(), 0, 0), pi: Matrix::zeros(ring.as_ref(), 0, 0) }
    }

    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let r = self.ring.as_ref();
        if !self.pi.pow(r, self.n as u32).map_err(|e| e.to_string())?.is_zero(r) {
            return Err(format!("ϖ^{} does not act by zero", self.n));
        }
        for j in 0..self.rank() {
            let lhs = self.apply_phi(&self.pi.column(j));
            let rhs = self.apply_pi(&self.phi.column(j));
            if lhs != rhs {
                return Err(format!("φ(ϖ·b_{}) ≠ ϖ·φ(b_{})", j + 1, j + 1));
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &Arc<BaseRing> {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rank as an `R`-module.
    pub fn rank(&self) -> usize {
        self.phi.rows()
    }

    pub fn phi(&self) -> &Matrix<RingElem> {
        &self.phi
    }

    pub fn pi(&self) -> &Matrix<RingElem> {
        &self.pi
    }

    pub fn apply_phi(&self, v: &[RingElem]) -> Vec<RingElem> {
        let sv: Vec<RingElem> = v.iter().map(|x| self.ring.frobenius_q(x)).collect();
        self.phi.apply(self.ring.as_ref(), &sv).expect("dimension")
    }

    pub fn apply_pi(&self, v: &[RingElem]) -> Vec<RingElem> {
        self.pi.apply(self.ring.as_ref(), v).expect("dimension")
    }

    /// Matrix of `φ^e`: `Φ·σ(Φ)·…·σ^{e-1}(Φ)`.
    pub fn phi_iterate(&self, e: usize) -> Matrix<RingElem> {
        let r = self.ring.as_ref();
        let mut acc = Matrix::identity(r, self.rank());
        let mut twist = self.phi.clone();
        for _ in 0..e {
            acc = acc.mul(r, &twist).expect("square");
            twist = r.frobenius_matrix(&twist);
        }
        acc
    }

    /// `φ` is an isomorphism.
    pub fn is_etale(&self) -> bool {
        let f = self.ring.field();
        self.ring.residue_matrix(&self.phi).inverse(f).is_some()
    }

    /// `φ` is nilpotent on the special fibre.
    pub fn is_radicial(&self) -> bool {
        let f = self.ring.field();
        self.ring.residue_matrix(&self.phi_iterate(self.rank())).is_zero(f)
    }
}

/// The coordinate algebra `R[Y_1..Y_N]/(Y_j^q − Σ_i a_ij Y_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSchemeAlgebra {
    ring: Arc<BaseRing>,
    a: Matrix<RingElem>,
}

pub fn dr_q(f: &TorsionShtuka) -> GroupSchemeAlgebra {
    GroupSchemeAlgebra { ring: f.ring.clone(), a: f.phi.clone() }
}

impl GroupSchemeAlgebra {
    pub fn ring(&self) -> &Arc<BaseRing> {
        &self.ring
    }

    pub fn n_vars(&self) -> usize {
        self.a.rows()
    }

    /// `(a_ij)`; relation `j` reads `Y_j^q = Σ_i a_ij Y_i`.
    pub fn relations(&self) -> &Matrix<RingElem> {
        &self.a
    }

    /// Dimension over `F_q` of the coordinate algebra: `q^N · dim_{F_q} R`.
    pub fn fq_dimension(&self) -> u128 {
        self.ring.q().pow(self.n_vars() as u32) * self.ring.dim_fq() as u128
    }

    /// Rank over `R` of the coordinate algebra (free on `Y^e`, `0 ≤ e_j < q`).
    pub fn rank(&self) -> u128 {
        self.ring.q().pow(self.n_vars() as u32)
    }

    pub fn is_etale(&self) -> bool {
        self.ring.residue_matrix(&self.a).inverse(self.ring.field()).is_some()
    }

    /// Reduced points over `F_{q^{ms}}`: solutions of the relations with the
    /// coefficients reduced modulo `z`.
    pub fn points(&self, s: usize) -> Result<(Arc<BaseRing>, Vec<Vec<RingElem>>)> {
        let ext = residue_ring(&self.ring).extend(s)?;
        let big = ext.target.field().clone();
        let nk = big.degree();
        let nv = self.n_vars();
        let a = self.ring.residue_matrix(&self.a).map(|c| ext.embed_field(c));
        let dim = nk * nv;
        let unit = |idx: usize| {
            let mut v = vec![big.zero(); nv];
            let mut e = vec![0u32; nk];
            e[idx % nk] = 1;
            v[idx / nk] = big.from_coords(&e).unwrap();
            v
        };
        let columns: Vec<Vec<u32>> = (0..dim)
            .map(|c| {
                let y = unit(c);
                (0..nv)
                    .flat_map(|j| {
                        let mut val = big.frobenius_q(&y[j]);
                        for (i, yi) in y.iter().enumerate() {
                            val = big.sub(&val, &big.mul(a.get(i, j), yi));
                        }
                        val.coords().to_vec()
                    })
                    .collect()
            })
            .collect();
        let fp = *big.prime_field();
        let basis = nullspace(&fp, &Matrix::from_columns(&columns, dim)?);
        let p = fp.characteristic() as u128;
        let total = p.pow(basis.len() as u32);
        let mut pts = Vec::with_capacity(total as usize);
        for idx in 0..total {
            let mut v = vec![0u32; dim];
            let mut t = idx;
            for b in &basis {
                let c = (t % p) as u32;
                t /= p;
                if c != 0 {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x = fp.add(x, &fp.mul(&c, y));
                    }
                }
            }
            let y: Vec<RingElem> = v
                .chunks(nk)
                .map(|c| ext.target.embed_field(&big.from_coords(c).unwrap()))
                .collect();
            pts.push(y);
        }
        pts.sort();
        Ok((ext.target.clone(), pts))
    }

    pub fn point_count(&self, s: usize) -> Result<u128> {
        Ok(self.points(s)?.1.len() as u128)
    }

    /// Reduced points over an algebraic closure: `q^{rank of φ^N}`.
    pub fn geometric_count(&self) -> u128 {
        let f = TorsionShtuka { ring: self.ring.clone(), n: 1, phi: self.a.clone(), pi: self.a.clone() };
        let it = self.ring.residue_matrix(&f.phi_iterate(self.n_vars()));
        self.ring.q().pow(rank(self.ring.field(), &it) as u32)
    }

    /// Smallest `s ≤ s_max` at which the point count reaches the geometric
    /// count, with that count.
    pub fn stabilized_point_count(&self, s_max: usize) -> Result<(usize, u128)> {
        let expected = self.geometric_count();
        let mut found = 0;
        for s in 1..=s_max {
            found = self.point_count(s)?;
            if found == expected {
                return Ok((s, found));
            }
        }
        Err(Error::BoundTooSmall { s_max, found, expected })
    }
}

fn reduce_mod(x: &SkewPoly, psi: &SkewPoly, len: usize) -> Result<Vec<RingElem>> {
    let (_, rem) = right_divide(x, psi)?;
    Ok((0..len).map(|i| rem.coeff(i)).collect())
}

/// The shtuka `R{τ}/R{τ}ψ` of the kernel of `ψ`, with `φ` = left
/// multiplication by `τ` and `ϖ` = right multiplication by `e_T`.
pub fn shtuka_of_kernel(e: &DrinfeldModule, psi: &SkewPoly, n: usize) -> Result<TorsionShtuka> {
    let ring = e.ring();
    let big_n = psi.degree().ok_or(Error::NonUnitLeadingCoeff)?;
    let mut phi_cols = Vec::with_capacity(big_n);
    let mut pi_cols = Vec::with_capacity(big_n);
    for j in 0..big_n {
        phi_cols.push(reduce_mod(&SkewPoly::tau_pow(ring, j + 1), psi, big_n)?);
        pi_cols.push(reduce_mod(&SkewPoly::tau_pow(ring, j).mul(e.e_t())?, psi, big_n)?);
    }
    TorsionShtuka::new(ring, n, Matrix::from_columns(&phi_cols, big_n)?, Matrix::from_columns(&pi_cols, big_n)?)
}

/// `E|_{D_n}`: the shtuka of `E[p^n]` with basis `τ^0, …, τ^{nr-1}`.
pub fn restrict_drinfeld(e: &DrinfeldModule, n: usize) -> Result<TorsionShtuka> {
    shtuka_of_kernel(e, &e.action_t_pow(n), n)
}

/// A flag of quotients `L_r ↠ L_{r-1} ↠ … ↠ L_1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveFlag {
    ring: Arc<BaseRing>,
    n: usize,
    /// `L_1, …, L_r`.
    layers: Vec<TorsionShtuka>,
    /// `maps[i-1]: L_{i+1} → L_i`.
    maps: Vec<Matrix<RingElem>>,
}

/// Outcome of [`check_naive_flag`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagVerdict {
    pub valid: bool,
    pub diagnostic: Option<String>,
}

/// Which candidate vector the adapted-basis search prefers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisPick {
    First,
    Last,
}

impl NaiveFlag {
    pub fn new(ring: &Arc<BaseRing>, n: usize, layers: Vec<TorsionShtuka>, maps: Vec<Matrix<RingElem>>) -> Result<Self> {
        if layers.is_empty() || maps.len() + 1 != layers.len() {
            return Err(Error::InvalidFlag(format!("{} layers need {} maps", layers.len(), layers.len().saturating_sub(1))));
        }
        Ok(Self { ring: ring.clone(), n, layers, maps })
    }

    /// The constant model `(R[ϖ]/ϖ^n)^r ↠ … ↠ R[ϖ]/ϖ^n` with `φ` fixing the
    /// standard basis; coordinate `l·n + j` is `ϖ^j e_l`.
    pub fn etale_model(ring: &Arc<BaseRing>, n: usize, r: usize) -> Self {
        let rr = ring.as_ref();
        let layer = |i: usize| {
            let dim = i * n;
            let pi = Matrix::from_fn(dim, dim, |row, col| {
                if col % n + 1 < n && row == col + 1 {
                    rr.one()
                } else {
                    rr.zero()
                }
            });
            TorsionShtuka { ring: ring.clone(), n, phi: Matrix::identity(rr, dim), pi }
        };
        let layers = (1..=r).map(layer).collect();
        let maps = (1..r)
            .map(|i| Matrix::from_fn(i * n, (i + 1) * n, |row, col| if row == col { rr.one() } else { rr.zero() }))
            .collect();
        Self { ring: ring.clone(), n, layers, maps }
    }

    /// Flag of the kernels of `ψ_1 | ψ_2 | … | ψ_r` (right divisibility), the
    /// last one cutting out `E[p^n]`.
    pub fn from_kernel_chain(e: &DrinfeldModule, n: usize, psis: &[SkewPoly]) -> Result<Self> {
        let layers = psis.iter().map(|psi| shtuka_of_kernel(e, psi, n)).collect::<Result<Vec<_>>>()?;
        let mut maps = Vec::new();
        for i in 1..psis.len() {
            let small = psis[i - 1].degree().unwrap_or(0);
            let big = psis[i].degree().unwrap_or(0);
            let cols = (0..big)
                .map(|j| reduce_mod(&SkewPoly::tau_pow(e.ring(), j), &psis[i - 1], small))
                .collect::<Result<Vec<_>>>()?;
            maps.push(Matrix::from_columns(&cols, small)?);
        }
        Self::new(e.ring(), n, layers, maps)
    }

    pub fn ring(&self) -> &Arc<BaseRing> {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.layers.len()
    }

    /// `L_i` for `1 ≤ i ≤ r`.
    pub fn layer(&self, i: usize) -> &TorsionShtuka {
        &self.layers[i - 1]
    }

    /// `L_{i+1} → L_i`.
    pub fn map(&self, i: usize) -> &Matrix<RingElem> {
        &self.maps[i - 1]
    }

    fn check(&self) -> std::result::Result<(), String> {
        let r = self.ring.as_ref();
        let f = r.field();
        for (idx, layer) in self.layers.iter().enumerate() {
            let i = idx + 1;
            layer.check_invariants().map_err(|e| format!("layer {i}: {e}"))?;
            if layer.rank() != self.n * i {
                return Err(format!("layer {i}: R-rank {} instead of {}", layer.rank(), self.n * i));
            }
            let fibre = layer.rank() - rank(f, &r.residue_matrix(layer.pi()));
            if fibre != i {
                return Err(format!(
                    "layer {i}: not free of rank {i} over R[ϖ]/(ϖ^{}) (fibre dimension {fibre})",
                    self.n
                ));
            }
        }
        for (idx, m) in self.maps.iter().enumerate() {
            let i = idx + 1;
            let (lo, hi) = (&self.layers[idx], &self.layers[idx + 1]);
            if m.rows() != lo.rank() || m.cols() != hi.rank() {
                return Err(format!("map L_{} → L_{i}: wrong shape", i + 1));
            }
            if rank(f, &r.residue_matrix(m)) != lo.rank() {
                return Err(format!("map L_{} → L_{i}: not surjective", i + 1));
            }
            let mp = m.mul(r, hi.pi()).map_err(|e| e.to_string())?;
            let pm = lo.pi().mul(r, m).map_err(|e| e.to_string())?;
            if mp != pm {
                return Err(format!("map L_{} → L_{i}: not ϖ-linear", i + 1));
            }
            let mphi = m.mul(r, hi.phi()).map_err(|e| e.to_string())?;
            let phim = lo.phi().mul(r, &r.frobenius_matrix(m)).map_err(|e| e.to_string())?;
            if mphi != phim {
                return Err(format!("map L_{} → L_{i}: φ does not descend", i + 1));
            }
        }
        Ok(())
    }

    /// Composite `L_{r-1} → L_i`.
    fn composite_from_top(&self, i: usize) -> Matrix<RingElem> {
        let r = self.ring.as_ref();
        let top = self.r() - 1;
        let mut acc = Matrix::identity(r, self.layer(top).rank());
        for j in (i..top).rev() {
            acc = self.map(j).mul(r, &acc).expect("shapes");
        }
        acc
    }

    /// A basis `e_1, …, e_{r-1}` of `L_{r-1}` over `R[ϖ]/ϖ^n` with
    /// `e_j ∈ ker(L_{r-1} → L_{j-1})` and `e_1..e_i` mapping to a basis of `L_i`.
    pub fn adapted_basis(&self, pick: BasisPick) -> Result<Vec<Vec<RingElem>>> {
        let rr = self.ring.as_ref();
        let f = rr.field();
        let k = rr.k();
        let top = self.r() - 1;
        if top == 0 {
            return Ok(Vec::new());
        }
        let dim = self.layer(top).rank() * k;
        let mut basis: Vec<Vec<RingElem>> = Vec::new();
        for i in 1..=top {
            let kernel: Vec<Vec<FieldElem>> = if i == 1 {
                Subspace::full(f, dim).basis().to_vec()
            } else {
                let m = rr.expand_matrix(&self.composite_from_top(i - 1));
                Subspace::spanned_by(f, dim, &nullspace(f, &m))?.basis().to_vec()
            };
            let to_layer = self.composite_from_top(i);
            let target = self.layer(i);
            let tdim = target.rank() * k;
            // m·L_i + images of e_1..e_{i-1}
            let mut w: Vec<Vec<FieldElem>> = Vec::new();
            for c in 0..target.rank() {
                for a in 0..k {
                    let mut e = vec![rr.zero(); target.rank()];
                    e[c] = rr.zeta_pow(a);
                    w.push(rr.expand_vector(&target.apply_pi(&e)));
                    e[c] = rr.zeta_pow(a + 1);
                    w.push(rr.expand_vector(&e));
                }
            }
            for b in &basis {
                w.push(rr.expand_vector(&to_layer.apply(rr, b)?));
            }
            let w = Subspace::spanned_by(f, tdim, &w)?;
            let mut candidates = kernel;
            if pick == BasisPick::Last {
                candidates.reverse();
            }
            let chosen = candidates
                .into_iter()
                .map(|v| rr.collapse_vector(&v))
                .find(|v| {
                    let img = rr.expand_vector(&to_layer.apply(rr, v).unwrap());
                    !w.contains(f, &img)
                })
                .ok_or_else(|| Error::NotAdapted(format!("no generator for layer {i}")))?;
            basis.push(chosen);
        }
        Ok(basis)
    }

    /// Columns `ϖ^j e_i` (index `(i-1)·n + j`) of the adapted basis.
    fn change_of_basis(&self, pick: BasisPick) -> Result<Matrix<RingElem>> {
        let rr = self.ring.as_ref();
        let top = self.r() - 1;
        let layer = self.layer(top);
        if layer.rank() != self.n * top {
            return Err(Error::NotAdapted(format!("L_{top} has R-rank {}", layer.rank())));
        }
        let mut cols = Vec::new();
        for e in self.adapted_basis(pick)? {
            let mut v = e;
            for _ in 0..self.n {
                cols.push(v.clone());
                v = layer.apply_pi(&v);
            }
        }
        let c = Matrix::from_columns(&cols, layer.rank())?;
        if c.inverse(rr).is_none() {
            return Err(Error::NotAdapted("adapted vectors do not form a basis".into()));
        }
        Ok(c)
    }

    fn kept_indices(&self, m: &[usize]) -> Result<Vec<usize>> {
        let top = self.r() - 1;
        if m.len() != top {
            return Err(Error::DimensionMismatch { expected: top, found: m.len() });
        }
        if m.windows(2).any(|w| w[0] < w[1]) || m.first().is_some_and(|&x| x > self.n) {
            return Err(Error::InvalidParameter(format!("need n ≥ m_1 ≥ … ≥ m_{top} ≥ 0")));
        }
        Ok((0..top).flat_map(|i| (0..m[i]).map(move |j| i * self.n + j)).collect())
    }

    /// `U = ⟨ϖ^j e_i : j ≥ m_i⟩ ⊆ L_{r-1}` as a subspace over the residue field
    /// part `F` (canonical form, so two adapted bases can be compared).
    pub fn sub_quotient_kernel(&self, m: &[usize], pick: BasisPick) -> Result<Subspace<FieldElem>> {
        let rr = self.ring.as_ref();
        let kept = self.kept_indices(m)?;
        let top = self.r() - 1;
        let dim = self.layer(top).rank();
        let c = self.change_of_basis(pick)?;
        let mut gens = Vec::new();
        for col in (0..dim).filter(|c| !kept.contains(c)) {
            let v = c.column(col);
            for a in 0..rr.k() {
                let za: Vec<RingElem> = v.iter().map(|x| rr.mul(&rr.zeta_pow(a), x)).collect();
                gens.push(rr.expand_vector(&za));
            }
        }
        Subspace::spanned_by(rr.field(), dim * rr.k(), &gens)
    }

    /// `L_m = ⊕ R[ϖ]/(ϖ^{m_i}) e_i` with its induced `φ` and `ϖ`.
    pub fn sub_quotient_l_m(&self, m: &[usize], pick: BasisPick) -> Result<TorsionShtuka> {
        let rr = self.ring.as_ref();
        let kept = self.kept_indices(m)?;
        if self.r() == 1 {
            return Ok(TorsionShtuka::zero(&self.ring, self.n));
        }
        let layer = self.layer(self.r() - 1);
        let c = self.change_of_basis(pick)?;
        let cinv = c.inverse(rr).unwrap();
        let phi = cinv.mul(rr, &layer.phi().mul(rr, &rr.frobenius_matrix(&c))?)?;
        let pi = cinv.mul(rr, &layer.pi().mul(rr, &c)?)?;
        let dim = layer.rank();
        for mat in [&phi, &pi] {
            for col in (0..dim).filter(|c| !kept.contains(c)) {
                if kept.iter().any(|&row| !rr.is_zero(mat.get(row, col))) {
                    return Err(Error::Inconsistent("sub-quotient is not φ-stable".into()));
                }
            }
        }
        let restrict = |mat: &Matrix<RingElem>| Matrix::from_fn(kept.len(), kept.len(), |i, j| mat.get(kept[i], kept[j]).clone());
        TorsionShtuka::new(&self.ring, self.n, restrict(&phi), restrict(&pi))
    }
}

pub fn check_naive_flag(flag: &NaiveFlag) -> FlagVerdict {
    match flag.check() {
        Ok(()) => FlagVerdict { valid: true, diagnostic: None },
        Err(d) => FlagVerdict { valid: false, diagnostic: Some(d) },
    }
}

/// [`NaiveFlag::sub_quotient_l_m`] with the default basis choice.
pub fn sub_quotient_l_m(flag: &NaiveFlag, m: &[usize]) -> Result<TorsionShtuka> {
    flag.sub_quotient_l_m(m, BasisPick::First)
}
