//! The twisted polynomial ring `R{τ}` with `τc = c^q τ`, its dictionary with
//! additive polynomials `Σ c_i t^{q^i}`, skew division, and kernel points.

use std::fmt;
use std::sync::Arc;

use crate::algebra::linalg::{nullspace, Matrix};
use crate::algebra::{same_ring, upoly, BaseRing, FieldElem, Poly, RingElem, RingExtension, Scalars};
use crate::{Error, Result};

/// Default bound on the extension degree searched by [`kernel_points`].
pub const DEFAULT_S_MAX: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewPoly {
    ring: Arc<BaseRing>,
    coeffs: Vec<RingElem>,
}

impl SkewPoly {
    pub fn new(ring: &Arc<BaseRing>, mut coeffs: Vec<RingElem>) -> Self {
        upoly::trim(ring.as_ref(), &mut coeffs);
        Self { ring: ring.clone(), coeffs }
    }

    pub fn zero(ring: &Arc<BaseRing>) -> Self {
        Self::new(ring, Vec::new())
    }

    pub fn one(ring: &Arc<BaseRing>) -> Self {
        Self::constant(ring, ring.one())
    }

    pub fn constant(ring: &Arc<BaseRing>, c: RingElem) -> Self {
        Self::new(ring, vec![c])
    }

    /// `c τ^i`.
    pub fn monomial(ring: &Arc<BaseRing>, c: RingElem, i: usize) -> Self {
        let mut coeffs = vec![ring.zero(); i + 1];
        coeffs[i] = c;
        Self::new(ring, coeffs)
    }

    pub fn tau_pow(ring: &Arc<BaseRing>, i: usize) -> Self {
        Self::monomial(ring, ring.one(), i)
    }

    pub fn ring(&self) -> &Arc<BaseRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[RingElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> RingElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn degree(&self) -> Option<usize> {
        upoly::degree(&self.coeffs)
    }

    pub fn leading(&self) -> Option<&RingElem> {
        self.coeffs.last()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest index with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !self.ring.is_zero(c))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { ring: self.ring.clone(), coeffs: upoly::add(self.ring.as_ref(), &self.coeffs, &other.coeffs) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { ring: self.ring.clone(), coeffs: upoly::sub(self.ring.as_ref(), &self.coeffs, &other.coeffs) })
    }

    pub fn neg(&self) -> Self {
        Self { ring: self.ring.clone(), coeffs: upoly::neg(self.ring.as_ref(), &self.coeffs) }
    }

    /// `c · self`.
    pub fn scale_left(&self, c: &RingElem) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|x| self.ring.mul(c, x)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let r = self.ring.as_ref();
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.ring));
        }
        let mut out = vec![r.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        let mut twisted = other.coeffs.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                twisted = twisted.iter().map(|b| r.frobenius_q(b)).collect();
            }
            if r.is_zero(a) {
                continue;
            }
            for (j, b) in twisted.iter().enumerate() {
                if !r.is_zero(b) {
                    out[i + j] = r.add(&out[i + j], &r.mul(a, b));
                }
            }
        }
        Ok(Self::new(&self.ring, out))
    }

    /// `Σ c_i t^{q^i}`.
    pub fn to_additive(&self) -> Poly {
        let r = self.ring.as_ref();
        let q = r.q() as usize;
        let Some(deg) = self.degree() else {
            return Poly::zero(&self.ring);
        };
        let mut dense = vec![r.zero(); q.pow(deg as u32) + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            dense[q.pow(i as u32)] = c.clone();
        }
        Poly::new(&self.ring, dense)
    }

    pub fn from_additive(f: &Poly) -> Result<Self> {
        if !f.is_additive() {
            return Err(Error::NotAdditive);
        }
        let q = f.ring().q() as usize;
        let mut coeffs = Vec::new();
        let mut e = 1usize;
        while e < f.coeffs().len() {
            coeffs.push(f.coeff(e));
            e *= q;
        }
        Ok(Self::new(f.ring(), coeffs))
    }

    /// `Σ c_i x^{q^i}`.
    pub fn eval_additive(&self, x: &RingElem) -> RingElem {
        let r = self.ring.as_ref();
        let mut acc = r.zero();
        let mut pow = x.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                pow = r.frobenius_q(&pow);
            }
            acc = r.add(&acc, &r.mul(c, &pow));
        }
        acc
    }

    /// Applies `σ` (the `q`-Frobenius) to every coefficient.
    pub fn frobenius_twist(&self) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|c| self.ring.frobenius_q(c)).collect())
    }

    pub fn base_change(&self, ext: &RingExtension) -> Result<Self> {
        if !same_ring(&self.ring, &ext.base) {
            return Err(Error::RingMismatch);
        }
        Ok(Self::new(&ext.target, self.coeffs.iter().map(|c| ext.embed(c)).collect()))
    }

    pub fn with_ring(&self, ring: &Arc<BaseRing>) -> Result<Self> {
        if !same_ring(&self.ring, ring) {
            return Err(Error::RingMismatch);
        }
        Ok(Self { ring: ring.clone(), coeffs: self.coeffs.clone() })
    }
}

pub fn skew_mul(a: &SkewPoly, b: &SkewPoly) -> Result<SkewPoly> {
    a.mul(b)
}

/// `a = quotient · b + remainder` with `deg remainder < deg b`.
pub fn right_divide(a: &SkewPoly, b: &SkewPoly) -> Result<(SkewPoly, SkewPoly)> {
    a.check(b)?;
    let r = a.ring.as_ref();
    let lead = b.leading().ok_or(Error::NonUnitLeadingCoeff)?;
    if !r.is_unit(lead) {
        return Err(Error::NonUnitLeadingCoeff);
    }
    let db = b.coeffs.len() - 1;
    let mut rem = a.coeffs.clone();
    let mut quot = vec![r.zero(); rem.len().saturating_sub(db)];
    // lead(b)^{q^i} inverted, built incrementally
    let mut lead_twists = vec![r.inv(lead).unwrap()];
    while rem.len() > db {
        let top = rem.len() - 1;
        let i = top - db;
        while lead_twists.len() <= i {
            let next = r.frobenius_q(lead_twists.last().unwrap());
            lead_twists.push(next);
        }
        let c = r.mul(&rem[top], &lead_twists[i]);
        if !r.is_zero(&c) {
            let term = SkewPoly::monomial(&a.ring, c.clone(), i).mul(b)?;
            for (j, t) in term.coeffs.iter().enumerate() {
                rem[j] = r.sub(&rem[j], t);
            }
            quot[i] = c;
        }
        rem.pop();
        upoly::trim(r, &mut rem);
    }
    Ok((SkewPoly::new(&a.ring, quot), SkewPoly::new(&a.ring, rem)))
}

/// `a = b · quotient + remainder` with `deg remainder < deg b`.
///
/// Each step extracts a `q^{deg b}`-th root. Over a field that root is unique;
/// with nilpotents it is not, so the division is refused.
pub fn left_divide(a: &SkewPoly, b: &SkewPoly) -> Result<(SkewPoly, SkewPoly)> {
    a.check(b)?;
    let r = a.ring.as_ref();
    let lead = b.leading().ok_or(Error::NonUnitLeadingCoeff)?;
    let lead_inv = r.inv(lead).ok_or(Error::NonUnitLeadingCoeff)?;
    let db = b.coeffs.len() - 1;
    if db == 0 {
        return Ok((a.scale_left(&lead_inv), SkewPoly::zero(&a.ring)));
    }
    let mut rem = a.clone();
    let mut quot = SkewPoly::zero(&a.ring);
    while rem.coeffs.len() > db {
        if !r.is_field() {
            return Err(Error::NoQthRoot);
        }
        let top = rem.coeffs.len() - 1;
        let i = top - db;
        let mut c = r.mul(&lead_inv, &rem.coeffs[top]);
        for _ in 0..db {
            c = r.qth_root(&c).ok_or(Error::NoQthRoot)?;
        }
        let term = SkewPoly::monomial(&a.ring, c, i);
        rem = rem.sub(&b.mul(&term)?)?;
        quot = quot.add(&term)?;
    }
    Ok((quot, rem))
}

/// Reduced points of the kernel of an additive polynomial, with coordinates
/// in the residue field `F_{q^{ms}}` of `R ⊗ F_{q^s}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    pub s: usize,
    /// The reduced ring `F_{q^{ms}}` the points live in.
    pub ring: Arc<BaseRing>,
    /// Sorted lexicographically.
    pub points: Vec<RingElem>,
    /// Extension from the residue field of the source ring.
    pub extension: RingExtension,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: &RingElem) -> bool {
        self.points.binary_search(x).is_ok()
    }
}

/// Residue field of `R` as a ring with `k = 1`.
pub fn residue_ring(ring: &Arc<BaseRing>) -> Arc<BaseRing> {
    if ring.is_field() {
        ring.clone()
    } else {
        Arc::new(BaseRing::from_field(ring.field().clone(), 1))
    }
}

fn residue_coeffs(a: &SkewPoly) -> Vec<FieldElem> {
    a.coeffs.iter().map(|c| a.ring.residue(c)).collect()
}

/// Number of reduced points over an algebraic closure: `q^{D-h}` for the
/// residue polynomial with top index `D` and lowest nonzero index `h`.
pub fn geometric_kernel_size(a: &SkewPoly) -> Result<u128> {
    let f = a.ring.field();
    let res = residue_coeffs(a);
    let h = res.iter().position(|c| !f.is_zero(c));
    let top = res.iter().rposition(|c| !f.is_zero(c));
    match (h, top) {
        (Some(h), Some(top)) => Ok(a.ring.q().pow((top - h) as u32)),
        _ => Err(Error::InvalidParameter("residue of the polynomial vanishes".into())),
    }
}

/// Reduced kernel points over the residue field extended by degree `s`.
pub fn kernel_points_at(a: &SkewPoly, s: usize) -> Result<PointSet> {
    geometric_kernel_size(a)?;
    let res_ring = residue_ring(&a.ring);
    let ext = res_ring.extend(s)?;
    let big = ext.target.field().clone();
    let coeffs: Vec<FieldElem> = residue_coeffs(a).iter().map(|c| ext.embed_field(c)).collect();
    let n = big.degree();
    let columns: Vec<Vec<u32>> = (0..n)
        .map(|j| {
            let mut e = vec![0u32; n];
            e[j] = 1;
            let x = big.from_coords(&e).unwrap();
            let mut acc = big.zero();
            let mut pow = x;
            for (i, c) in coeffs.iter().enumerate() {
                if i > 0 {
                    pow = big.frobenius_q(&pow);
                }
                acc = big.add(&acc, &big.mul(c, &pow));
            }
            acc.coords().to_vec()
        })
        .collect();
    let fp = *big.prime_field();
    let m = Matrix::from_columns(&columns, n)?;
    let basis = nullspace(&fp, &m);
    let p = fp.characteristic() as u128;
    let total = p.pow(basis.len() as u32);
    let mut points = Vec::with_capacity(total as usize);
    for idx in 0..total {
        let mut v = vec![0u32; n];
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
        points.push(ext.target.embed_field(&big.from_coords(&v)?));
    }
    points.sort();
    Ok(PointSet { s, ring: ext.target.clone(), points, extension: ext })
}

/// Number of reduced points over `F_{q^{ms}}` without enumerating them.
pub fn reduced_point_count(a: &SkewPoly, s: usize) -> Result<u128> {
    // the count is p^(nullity); enumeration is cheap at desk sizes
    Ok(kernel_points_at(a, s)?.len() as u128)
}

/// Reduced kernel points over the smallest extension `s ≤ s_max` at which
/// the count reaches the geometric count.
pub fn kernel_points(a: &SkewPoly, s_max: usize) -> Result<PointSet> {
    let expected = geometric_kernel_size(a)?;
    let mut found = 0;
    for s in 1..=s_max {
        let pts = kernel_points_at(a, s)?;
        found = pts.len() as u128;
        if found == expected {
            return Ok(pts);
        }
    }
    Err(Error::BoundTooSmall { s_max, found, expected })
}

/// Smallest `s ≤ s_max` over which the kernel splits completely.
pub fn splitting_degree(a: &SkewPoly, s_max: usize) -> Result<usize> {
    kernel_points(a, s_max).map(|p| p.s)
}

impl fmt::Display for SkewPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs.iter().map(|c| self.ring.coords(c)).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_ring;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sp(r: &Arc<BaseRing>, c: Vec<RingElem>) -> SkewPoly {
        SkewPoly::new(r, c)
    }

    /// `z + z τ + τ^2` over `F_q[z]/(z^2)`.
    fn counterexample_et(q: u32) -> SkewPoly {
        let r = make_ring(q, 1, 1, 2, None).unwrap();
        sp(&r, vec![r.zeta(), r.zeta(), r.one()])
    }

    #[test]
    fn tau_times_constant() {
        let r = make_ring(3, 1, 2, 1, None).unwrap();
        let c = r.generator();
        let tau = SkewPoly::tau_pow(&r, 1);
        let prod = tau.mul(&SkewPoly::constant(&r, c.clone())).unwrap();
        assert_eq!(prod, SkewPoly::monomial(&r, r.frobenius_q(&c), 1));
    }

    #[test]
    fn counterexample_square() {
        for q in [2, 3, 5] {
            let e = counterexample_et(q);
            let r = e.ring().clone();
            let sq = e.mul(&e).unwrap();
            let expected = sp(&r, vec![r.zero(), r.zero(), r.zeta(), r.zeta(), r.one()]);
            assert_eq!(sq, expected);
            let (quot, rem) = right_divide(&sq, &e).unwrap();
            assert_eq!(quot, e);
            assert!(rem.is_zero());
        }
    }

    #[test]
    fn additive_form_of_counterexample() {
        let e = counterexample_et(3);
        let r = e.ring().clone();
        let f = e.to_additive();
        assert_eq!(f.degree(), Some(9));
        assert_eq!(f.coeff(9), r.one());
        assert_eq!(f.coeff(3), r.zeta());
        assert_eq!(f.coeff(1), r.zeta());
        assert!(f.is_additive());
        assert_eq!(SkewPoly::from_additive(&f).unwrap(), e);
        assert_eq!(SkewPoly::one(&r).to_additive(), Poly::monomial(&r, r.one(), 1));
    }

    #[test]
    fn carlitz_additive_form() {
        let r = make_ring(2, 1, 2, 1, None).unwrap();
        let theta = r.generator();
        let e = sp(&r, vec![theta.clone(), r.one()]);
        let f = e.to_additive();
        assert_eq!(f, Poly::new(&r, vec![r.zero(), theta, r.one()]));
    }

    #[test]
    fn from_additive_rejects_non_additive() {
        let r = make_ring(3, 1, 1, 1, None).unwrap();
        let f = Poly::new(&r, vec![r.zero(), r.zero(), r.one()]);
        assert_eq!(SkewPoly::from_additive(&f), Err(Error::NotAdditive));
    }

    #[test]
    fn simple_divisions() {
        let r = make_ring(3, 1, 1, 2, None).unwrap();
        let t1 = SkewPoly::tau_pow(&r, 1);
        let t2 = SkewPoly::tau_pow(&r, 2);
        let (q, rem) = right_divide(&t2, &t1).unwrap();
        assert_eq!((q, rem.is_zero()), (t1.clone(), true));
        let (q, rem) = right_divide(&t2, &t2).unwrap();
        assert_eq!((q, rem.is_zero()), (SkewPoly::one(&r), true));
        let z = SkewPoly::constant(&r, r.zeta());
        assert_eq!(right_divide(&t2, &z), Err(Error::NonUnitLeadingCoeff));
        let (q, rem) = left_divide(&t1, &t2).unwrap();
        assert!(q.is_zero());
        assert_eq!(rem, t1);
        // k > 1 refuses when a root is needed
        let a = sp(&r, vec![r.zeta(), r.zero(), r.one()]);
        assert_eq!(left_divide(&a, &t1), Err(Error::NoQthRoot));
    }

    #[test]
    fn left_division_over_f9() {
        let r = make_ring(3, 1, 2, 1, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let b = sp(&r, vec![r.random(&mut rng), r.random(&mut rng), r.random_unit(&mut rng)]);
            let x = sp(&r, vec![r.random(&mut rng), r.random(&mut rng)]);
            let a = b.mul(&x).unwrap();
            let (q, rem) = left_divide(&a, &b).unwrap();
            assert_eq!(q, x);
            assert!(rem.is_zero());
        }
    }

    #[test]
    fn artin_schreier_kernel() {
        for (p, d) in [(2u32, 1usize), (3, 1), (2, 2)] {
            let r = make_ring(p, d, 1, 1, None).unwrap();
            let a = sp(&r, vec![r.from_int(-1), r.one()]);
            let pts = kernel_points(&a, DEFAULT_S_MAX).unwrap();
            assert_eq!(pts.s, 1);
            assert_eq!(pts.points, r.fq_elements());
        }
    }

    #[test]
    fn purely_inseparable_kernel() {
        let r = make_ring(3, 1, 1, 1, None).unwrap();
        let pts = kernel_points(&SkewPoly::tau_pow(&r, 2), DEFAULT_S_MAX).unwrap();
        assert_eq!(pts.points, vec![r.zero()]);
    }

    #[test]
    fn tau_plus_tau_squared() {
        for q in [2u32, 3] {
            let r = make_ring(q, 1, 1, 1, None).unwrap();
            let a = sp(&r, vec![r.zero(), r.one(), r.one()]);
            let pts = kernel_points(&a, DEFAULT_S_MAX).unwrap();
            assert_eq!(pts.len() as u32, q);
            // the same set as the roots of t^q + t, found by brute force in F_{q^2}
            let ext = r.extend(2).unwrap();
            let big = ext.target.clone();
            let b = sp(&r, vec![r.one(), r.one()]).base_change(&ext).unwrap();
            let brute: Vec<RingElem> =
                big.elements().into_iter().filter(|x| big.is_zero(&b.eval_additive(x))).collect();
            let over_big: Vec<RingElem> = kernel_points_at(&a, 2).unwrap().points;
            assert_eq!(over_big, brute);
        }
    }

    #[test]
    fn bound_too_small_reports_partial() {
        // t^4 + x t over F_2: roots need an extension of degree > 1
        let r = make_ring(2, 1, 1, 1, None).unwrap();
        let a = sp(&r, vec![r.one(), r.zero(), r.one()]);
        match kernel_points(&a, 1) {
            Err(Error::BoundTooSmall { s_max: 1, found, expected: 4 }) => assert!(found < 4),
            other => panic!("{other:?}"),
        }
    }

    fn small_ring() -> impl Strategy<Value = Arc<BaseRing>> {
        prop_oneof![
            Just((2u32, 1usize, 2usize, 1usize)),
            Just((3, 1, 1, 2)),
            Just((2, 2, 1, 2)),
            Just((3, 1, 2, 1)),
        ]
        .prop_map(|(p, d, m, k)| make_ring(p, d, m, k, None).unwrap())
    }

    fn random_skew(r: &Arc<BaseRing>, rng: &mut ChaCha8Rng, deg: usize, unit_lead: bool) -> SkewPoly {
        let mut c: Vec<RingElem> = (0..deg).map(|_| r.random(rng)).collect();
        c.push(if unit_lead { r.random_unit(rng) } else { r.random(rng) });
        sp(r, c)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn twisted_commutation(r in small_ring(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = r.random(&mut rng);
            let tau = SkewPoly::tau_pow(&r, 1);
            let lhs = tau.mul(&SkewPoly::constant(&r, c.clone())).unwrap();
            let rhs = SkewPoly::constant(&r, r.frobenius_q(&c)).mul(&tau).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn composition_identity(r in small_ring(), seed in any::<u64>(), da in 0usize..3, db in 0usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_skew(&r, &mut rng, da, false);
            let b = random_skew(&r, &mut rng, db, false);
            let ab = a.mul(&b).unwrap();
            // compose additive polynomials via Horner on polynomials
            let fa = a.to_additive();
            let fb = b.to_additive();
            let mut comp = Poly::zero(&r);
            for c in fa.coeffs().iter().rev() {
                comp = comp.mul(&fb).unwrap().add(&Poly::new(&r, vec![c.clone()])).unwrap();
            }
            prop_assert_eq!(ab.to_additive(), comp);
            prop_assert!(ab.degree().unwrap_or(0) <= da + db);
            let unit_lead = |x: &SkewPoly| x.leading().is_some_and(|c| r.is_unit(c));
            if a.degree() == Some(da) && b.degree() == Some(db) && unit_lead(&a) && unit_lead(&b) {
                prop_assert_eq!(ab.degree(), Some(da + db));
            }
        }

        #[test]
        fn right_division_reconstructs(r in small_ring(), seed in any::<u64>(), da in 0usize..5, db in 0usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_skew(&r, &mut rng, da, false);
            let b = random_skew(&r, &mut rng, db, true);
            let (q, rem) = right_divide(&a, &b).unwrap();
            prop_assert!(rem.degree().is_none_or(|d| d < db));
            prop_assert_eq!(q.mul(&b).unwrap().add(&rem).unwrap(), a);
        }

        #[test]
        fn kernel_is_fq_subspace(seed in any::<u64>(), q in prop_oneof![Just(2u32), Just(3)], deg in 1usize..3) {
            let r = make_ring(q, 1, 1, 1, None).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_skew(&r, &mut rng, deg, true);
            let pts = kernel_points(&a, 24).unwrap();
            let rr = pts.ring.clone();
            for x in &pts.points {
                for y in &pts.points {
                    prop_assert!(pts.contains(&rr.add(x, y)));
                }
                for c in rr.fq_elements() {
                    prop_assert!(pts.contains(&rr.mul(&c, x)));
                }
            }
        }
    }
}
