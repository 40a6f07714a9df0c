//! Drinfeld modules for `A = F_q[T]` at the prime `p = (T)`.

use std::sync::Arc;

use crate::algebra::{BaseRing, Poly, RingElem, RingExtension, Scalars};
use crate::skewpoly::{kernel_points, right_divide, PointSet, SkewPoly};
use crate::{Error, Result};

/// A Drinfeld module given by `e_T ∈ R{τ}` of degree `r` with unit leading
/// coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrinfeldModule {
    e_t: SkewPoly,
}

/// `ψ: E → E'` with `ψ · e_T = e'_T · ψ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isogeny {
    pub source: DrinfeldModule,
    pub target: DrinfeldModule,
    pub psi: SkewPoly,
}

impl Isogeny {
    pub fn verify(&self) -> bool {
        let lhs = self.psi.mul(self.source.e_t());
        let rhs = self.target.e_t().mul(&self.psi);
        matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b)
    }

    /// The monic additive polynomial cutting out the kernel.
    pub fn kernel_divisor(&self) -> Result<Poly> {
        self.psi.to_additive().make_monic()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Isogeny) -> Result<Isogeny> {
        if other.source != self.target {
            return Err(Error::RingMismatch);
        }
        Ok(Isogeny { source: self.source.clone(), target: other.target.clone(), psi: other.psi.mul(&self.psi)? })
    }
}

impl DrinfeldModule {
    pub fn new(e_t: SkewPoly) -> Result<Self> {
        match e_t.degree() {
            None | Some(0) => Err(Error::InvalidParameter("e_T must have positive τ-degree".into())),
            Some(_) => {
                if e_t.ring().is_unit(e_t.leading().unwrap()) {
                    Ok(Self { e_t })
                } else {
                    Err(Error::NonUnitLeadingCoeff)
                }
            }
        }
    }

    /// The Carlitz module `e_T = θ + τ`.
    pub fn carlitz(ring: &Arc<BaseRing>, theta: RingElem) -> Self {
        Self { e_t: SkewPoly::new(ring, vec![theta, ring.one()]) }
    }

    /// Random module of rank `r`; `gamma` fixes the constant term.
    pub fn random<G: rand::Rng + ?Sized>(
        ring: &Arc<BaseRing>,
        r: usize,
        gamma: Option<RingElem>,
        rng: &mut G,
    ) -> Self {
        let mut coeffs: Vec<RingElem> = (0..r).map(|_| ring.random(rng)).collect();
        if let Some(g) = gamma {
            coeffs[0] = g;
        }
        coeffs.push(ring.random_unit(rng));
        Self { e_t: SkewPoly::new(ring, coeffs) }
    }

    pub fn ring(&self) -> &Arc<BaseRing> {
        self.e_t.ring()
    }

    pub fn e_t(&self) -> &SkewPoly {
        &self.e_t
    }

    pub fn rank(&self) -> usize {
        self.e_t.degree().unwrap()
    }

    /// Image of `T` under the characteristic map.
    pub fn gamma(&self) -> RingElem {
        self.e_t.coeff(0)
    }

    /// The characteristic section factors through `V(T)`.
    pub fn is_char_p(&self) -> bool {
        let r = self.ring();
        r.field().is_zero(&r.residue(&self.gamma()))
    }

    pub fn is_away_from_zero(&self) -> bool {
        self.ring().is_unit(&self.gamma())
    }

    /// `e_a` for `a = Σ a_j T^j ∈ F_q[T]`.
    pub fn action(&self, a: &[RingElem]) -> Result<SkewPoly> {
        let r = self.ring();
        if a.iter().any(|c| !r.is_fq(c)) {
            return Err(Error::NotFqCoefficient);
        }
        let mut acc = SkewPoly::zero(r);
        for c in a.iter().rev() {
            acc = acc.mul(&self.e_t)?.add(&SkewPoly::constant(r, c.clone()))?;
        }
        Ok(acc)
    }

    /// `e_{T^n}`.
    pub fn action_t_pow(&self, n: usize) -> SkewPoly {
        let mut acc = SkewPoly::one(self.ring());
        for _ in 0..n {
            acc = acc.mul(&self.e_t).expect("same ring");
        }
        acc
    }

    /// `e_{T^n}` scaled by the inverse of its leading coefficient, so that its
    /// additive polynomial is monic.
    pub fn torsion_skew(&self, n: usize) -> SkewPoly {
        let e = self.action_t_pow(n);
        let r = self.ring();
        let inv = r.inv(e.leading().unwrap()).expect("unit leading coefficient");
        e.scale_left(&inv)
    }

    /// The monic additive polynomial `f_n` cutting out `E[p^n]`.
    pub fn torsion_divisor(&self, n: usize) -> Poly {
        self.torsion_skew(n).to_additive()
    }

    /// Lowest nonzero index in `e_T` over a field in characteristic `p`,
    /// zero away from it.
    pub fn height(&self) -> Result<usize> {
        let r = self.ring();
        if !r.is_field() {
            return Err(Error::NotAField);
        }
        if !r.is_zero(&self.gamma()) {
            return Ok(0);
        }
        Ok(self.e_t.order().unwrap())
    }

    pub fn torsion_points(&self, n: usize, s_max: usize) -> Result<TorsionPoints> {
        let set = kernel_points(&self.action_t_pow(n), s_max)?;
        let reduced = SkewPoly::new(
            &set.ring,
            self.e_t.coeffs().iter().map(|c| set.extension.embed_field(&self.ring().residue(c))).map(|c| set.ring.embed_field(&c)).collect(),
        );
        Ok(TorsionPoints { n, set, e_t: reduced })
    }

    /// Quotient by the subgroup scheme cut out by the monic additive `g`.
    pub fn try_quotient(&self, g: &Poly) -> Result<(DrinfeldModule, Isogeny)> {
        if !g.is_monic() {
            return Err(Error::NotMonic);
        }
        let psi = SkewPoly::from_additive(&g.with_ring(self.ring())?)?;
        self.quotient_by_skew(&psi)
    }

    /// Quotient by the kernel of `ψ` (unit leading coefficient).
    pub fn quotient_by_skew(&self, psi: &SkewPoly) -> Result<(DrinfeldModule, Isogeny)> {
        let h = psi.mul(&self.e_t)?;
        let (e2, rem) = right_divide(&h, psi)?;
        if let Some(d) = rem.degree() {
            return Err(Error::KernelNotStable { remainder_degree: d });
        }
        let target = DrinfeldModule::new(e2)?;
        let iso = Isogeny { source: self.clone(), target: target.clone(), psi: psi.clone() };
        Ok((target, iso))
    }

    pub fn base_change(&self, ext: &RingExtension) -> Result<Self> {
        Ok(Self { e_t: self.e_t.base_change(ext)? })
    }

    /// Whether the kernel of the monic additive `g` is stable under `e_T`.
    pub fn is_stable(&self, g: &Poly) -> Result<bool> {
        match self.try_quotient(g) {
            Ok(_) => Ok(true),
            Err(Error::KernelNotStable { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

/// Reduced `p^n`-torsion points with the action of `F_q[T]`.
#[derive(Debug, Clone)]
pub struct TorsionPoints {
    pub n: usize,
    pub set: PointSet,
    /// `e_T` reduced and moved to the ring of the points.
    pub e_t: SkewPoly,
}

impl TorsionPoints {
    pub fn points(&self) -> &[RingElem] {
        &self.set.points
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    /// `a · x = e_a(x)` for `a = Σ a_j T^j ∈ F_q[T]`.
    pub fn act(&self, a: &[RingElem], x: &RingElem) -> RingElem {
        let r = self.set.ring.as_ref();
        let mut acc = r.zero();
        for c in a.iter().rev() {
            acc = r.add(&self.e_t.eval_additive(&acc), &r.mul(c, x));
        }
        acc
    }

    /// Points killed by `T^j`.
    pub fn killed_by(&self, j: usize) -> Vec<RingElem> {
        let mut a = vec![self.set.ring.zero(); j];
        a.push(self.set.ring.one());
        self.points().iter().filter(|x| self.set.ring.is_zero(&self.act(&a, x))).cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_ring;
    use crate::skewpoly::DEFAULT_S_MAX;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn module(r: &Arc<BaseRing>, c: Vec<RingElem>) -> DrinfeldModule {
        DrinfeldModule::new(SkewPoly::new(r, c)).unwrap()
    }

    fn counterexample(q: u32) -> DrinfeldModule {
        let r = make_ring(q, 1, 1, 2, None).unwrap();
        module(&r, vec![r.zeta(), r.zeta(), r.one()])
    }

    #[test]
    fn carlitz_square() {
        let r = make_ring(3, 1, 2, 1, None).unwrap();
        let theta = r.generator();
        let e = DrinfeldModule::carlitz(&r, theta.clone());
        let t2 = e.action(&[r.zero(), r.zero(), r.one()]).unwrap();
        let expected = SkewPoly::new(
            &r,
            vec![r.mul(&theta, &theta), r.add(&r.frobenius_q(&theta), &theta), r.one()],
        );
        assert_eq!(t2, expected);
        assert_eq!(e.action(&[r.one()]).unwrap(), SkewPoly::one(&r));
        assert_eq!(e.torsion_divisor(1), Poly::new(&r, vec![r.zero(), theta, r.zero(), r.one()]));
    }

    #[test]
    fn counterexample_torsion() {
        for q in [2u32, 3] {
            let e = counterexample(q);
            let r = e.ring().clone();
            let qq = q as usize;
            let f1 = e.torsion_divisor(1);
            let mut c = vec![r.zero(); qq * qq + 1];
            c[qq * qq] = r.one();
            c[qq] = r.zeta();
            c[1] = r.zeta();
            assert_eq!(f1, Poly::new(&r, c));
            let f2 = e.torsion_divisor(2);
            let mut c = vec![r.zero(); qq.pow(4) + 1];
            c[qq.pow(4)] = r.one();
            c[qq.pow(3)] = r.zeta();
            c[qq.pow(2)] = r.zeta();
            assert_eq!(f2, Poly::new(&r, c));
            assert!(f2.rem(&f1).unwrap().is_zero());
        }
    }

    #[test]
    fn heights() {
        let r = make_ring(3, 1, 1, 1, None).unwrap();
        assert_eq!(DrinfeldModule::carlitz(&r, r.one()).height(), Ok(0));
        assert_eq!(module(&r, vec![r.zero(), r.one(), r.one()]).height(), Ok(1));
        assert_eq!(module(&r, vec![r.zero(), r.zero(), r.one()]).height(), Ok(2));
        assert_eq!(counterexample(3).height(), Err(Error::NotAField));
    }

    #[test]
    fn torsion_point_examples() {
        let r = make_ring(3, 1, 1, 1, None).unwrap();
        let ss = module(&r, vec![r.zero(), r.zero(), r.one()]);
        assert_eq!(ss.torsion_points(1, DEFAULT_S_MAX).unwrap().points(), &[r.zero()]);
        let ord = module(&r, vec![r.zero(), r.one(), r.one()]);
        assert_eq!(ord.torsion_points(1, DEFAULT_S_MAX).unwrap().len(), 3);
        let c = DrinfeldModule::carlitz(&r, r.one());
        let pts = c.torsion_points(1, DEFAULT_S_MAX).unwrap();
        assert_eq!(pts.len(), 3);
        for x in pts.points() {
            assert!(pts.set.ring.is_zero(&pts.act(&[r.zero(), r.one()], x)));
        }
    }

    #[test]
    fn quotient_examples() {
        let r = make_ring(3, 1, 1, 1, None).unwrap();
        let ss = module(&r, vec![r.zero(), r.zero(), r.one()]);
        let (e1, iso) = ss.try_quotient(&Poly::monomial(&r, r.one(), 1)).unwrap();
        assert_eq!(e1, ss);
        assert!(iso.verify());
        let (e2, iso) = ss.try_quotient(&Poly::monomial(&r, r.one(), 3)).unwrap();
        assert_eq!(e2.e_t(), &SkewPoly::tau_pow(&r, 2));
        assert_eq!(iso.psi, SkewPoly::tau_pow(&r, 1));
        let not_monic = Poly::monomial(&r, r.from_int(2), 3);
        assert_eq!(ss.try_quotient(&not_monic).unwrap_err(), Error::NotMonic);
        let not_additive = Poly::monomial(&r, r.one(), 2);
        assert_eq!(ss.try_quotient(&not_additive).unwrap_err(), Error::NotAdditive);
    }

    #[test]
    fn quotient_by_full_torsion_is_conjugate() {
        let r = make_ring(2, 1, 2, 2, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=2 {
            let e = DrinfeldModule::random(&r, 2, None, &mut rng);
            let (e2, iso) = e.try_quotient(&e.torsion_divisor(n)).unwrap();
            assert!(iso.verify());
            // psi = u^{-1} e_{T^n}, so e'_T = u^{-1} e_T u
            let u = e.action_t_pow(n).leading().unwrap().clone();
            let uinv = SkewPoly::constant(&r, r.inv(&u).unwrap());
            let conj = uinv.mul(e.e_t()).unwrap().mul(&SkewPoly::constant(&r, u)).unwrap();
            assert_eq!(e2.e_t(), &conj);
        }
    }

    #[test]
    fn unstable_kernel_detected() {
        let r = make_ring(3, 1, 2, 1, None).unwrap();
        let e = DrinfeldModule::carlitz(&r, r.generator());
        // F_3 ⊂ F_9 is not stable under e_T = x + τ
        let g = Poly::new(&r, vec![r.zero(), r.from_int(-1), r.zero(), r.one()]);
        assert!(matches!(e.try_quotient(&g), Err(Error::KernelNotStable { .. })));
        assert_eq!(e.is_stable(&g), Ok(false));
        // Frobenius kernels are always stable
        let ce = counterexample(3);
        let rc = ce.ring().clone();
        assert_eq!(ce.is_stable(&Poly::monomial(&rc, rc.one(), 3)), Ok(true));
    }

    fn fq_poly(r: &Arc<BaseRing>, rng: &mut ChaCha8Rng, deg: usize) -> Vec<RingElem> {
        let fq = r.fq_elements();
        (0..=deg).map(|_| fq[rng.gen_range(0..fq.len())].clone()).collect()
    }

    use rand::Rng;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn action_is_ring_homomorphism(seed in any::<u64>(), da in 0usize..=3, db in 0usize..=3) {
            let r = make_ring(2, 1, 2, 2, None).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = DrinfeldModule::random(&r, 2, None, &mut rng);
            let a = fq_poly(&r, &mut rng, da);
            let b = fq_poly(&r, &mut rng, db);
            let prod = Poly::new(&r, a.clone()).mul(&Poly::new(&r, b.clone())).unwrap();
            let sum = Poly::new(&r, a.clone()).add(&Poly::new(&r, b.clone())).unwrap();
            let ea = e.action(&a).unwrap();
            let eb = e.action(&b).unwrap();
            prop_assert_eq!(e.action(prod.coeffs()).unwrap(), ea.mul(&eb).unwrap());
            prop_assert_eq!(e.action(sum.coeffs()).unwrap(), ea.add(&eb).unwrap());
            if let Some(d) = Poly::new(&r, a.clone()).degree() {
                prop_assert_eq!(ea.degree(), Some(2 * d));
            }
        }

        #[test]
        fn torsion_divisors_nest(seed in any::<u64>(), q in prop_oneof![Just(2u32), Just(3)], k in 1usize..=2) {
            let r = make_ring(q, 1, 1, k, None).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = DrinfeldModule::random(&r, 2, None, &mut rng);
            for n in 1..=3usize {
                let fn_ = e.torsion_divisor(n);
                prop_assert_eq!(fn_.degree(), Some((q as usize).pow(2 * n as u32)));
                prop_assert!(fn_.is_monic() && fn_.is_additive());
                for m in 1..=n {
                    prop_assert!(fn_.rem(&e.torsion_divisor(m)).unwrap().is_zero());
                }
            }
        }

        #[test]
        fn quotient_factorization(seed in any::<u64>()) {
            // supersingular-type modules over F_4[z]/(z^2): the chain t | t^q | t^{q^2}
            // may or may not be stable; whenever both quotients exist they factor.
            let r = make_ring(2, 2, 1, 2, None).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = DrinfeldModule::random(&r, 2, Some(r.zero()), &mut rng);
            let f1 = e.torsion_skew(1);
            let candidates = [SkewPoly::tau_pow(&r, 1), f1.clone()];
            for g1 in &candidates {
                let Ok((e1, iso1)) = e.quotient_by_skew(g1) else { continue };
                prop_assert!(iso1.verify());
                prop_assert_eq!(e1.rank(), 2);
                let g2 = e.torsion_skew(2);
                let (e2, _) = e.quotient_by_skew(&g2).unwrap();
                let (chi, rem) = right_divide(&g2, g1).unwrap();
                prop_assert!(rem.is_zero());
                let (e2b, iso) = e1.quotient_by_skew(&chi).unwrap();
                prop_assert!(iso.verify());
                prop_assert_eq!(e2b, e2);
            }
        }
    }
}
