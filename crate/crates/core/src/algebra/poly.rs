use std::sync::Arc;

use super::ring::{BaseRing, RingElem, RingExtension};
use super::{upoly, Scalars};
use crate::{Error, Result};

pub(crate) fn same_ring(a: &Arc<BaseRing>, b: &Arc<BaseRing>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Dense polynomial in `R[t]`, low degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    ring: Arc<BaseRing>,
    coeffs: Vec<RingElem>,
}

impl Poly {
    pub fn new(ring: &Arc<BaseRing>, mut coeffs: Vec<RingElem>) -> Self {
        upoly::trim(ring.as_ref(), &mut coeffs);
        Self { ring: ring.clone(), coeffs }
    }

    pub fn zero(ring: &Arc<BaseRing>) -> Self {
        Self::new(ring, Vec::new())
    }

    pub fn one(ring: &Arc<BaseRing>) -> Self {
        Self::new(ring, vec![ring.one()])
    }

    /// `c·t^e`.
    pub fn monomial(ring: &Arc<BaseRing>, c: RingElem, e: usize) -> Self {
        let mut coeffs = vec![ring.zero(); e + 1];
        coeffs[e] = c;
        Self::new(ring, coeffs)
    }

    /// The divisor `t - a` of a point.
    pub fn linear(ring: &Arc<BaseRing>, a: &RingElem) -> Self {
        Self::new(ring, vec![ring.neg(a), ring.one()])
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

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&RingElem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| self.ring.is_one(c))
    }

    /// Only monomials `t^{q^i}` occur.
    pub fn is_additive(&self) -> bool {
        let q = self.ring.q() as usize;
        self.coeffs.iter().enumerate().all(|(e, c)| self.ring.is_zero(c) || is_power_of(e, q))
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

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { ring: self.ring.clone(), coeffs: upoly::mul(self.ring.as_ref(), &self.coeffs, &other.coeffs) })
    }

    pub fn scale(&self, c: &RingElem) -> Self {
        Self { ring: self.ring.clone(), coeffs: upoly::scale(self.ring.as_ref(), c, &self.coeffs) }
    }

    /// Division with remainder by a polynomial with unit leading coefficient.
    pub fn divrem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.check(divisor)?;
        let (q, r) = upoly::divrem(self.ring.as_ref(), &self.coeffs, &divisor.coeffs)
            .ok_or(Error::NonUnitLeadingCoeff)?;
        Ok((Self { ring: self.ring.clone(), coeffs: q }, Self { ring: self.ring.clone(), coeffs: r }))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        self.divrem(divisor).map(|(_, r)| r)
    }

    /// Normalizes by the inverse of a unit leading coefficient.
    pub fn make_monic(&self) -> Result<Self> {
        let lead = self.leading().ok_or(Error::NonUnitLeadingCoeff)?;
        let inv = self.ring.inv(lead).ok_or(Error::NonUnitLeadingCoeff)?;
        Ok(self.scale(&inv))
    }

    pub fn eval(&self, x: &RingElem) -> RingElem {
        upoly::eval(self.ring.as_ref(), &self.coeffs, x)
    }

    pub fn base_change(&self, ext: &RingExtension) -> Result<Self> {
        if !same_ring(&self.ring, &ext.base) {
            return Err(Error::RingMismatch);
        }
        Ok(Self::new(&ext.target, self.coeffs.iter().map(|c| ext.embed(c)).collect()))
    }

    /// Reinterprets the coefficients over an equal ring handle.
    pub fn with_ring(&self, ring: &Arc<BaseRing>) -> Result<Self> {
        if !same_ring(&self.ring, ring) {
            return Err(Error::RingMismatch);
        }
        Ok(Self { ring: ring.clone(), coeffs: self.coeffs.clone() })
    }

    /// Product of the linear factors `t - a`.
    pub fn from_roots(ring: &Arc<BaseRing>, roots: &[RingElem]) -> Self {
        // balanced product tree keeps the multiplications cheap
        fn go(r: &BaseRing, roots: &[RingElem]) -> Vec<RingElem> {
            match roots.len() {
                0 => vec![r.one()],
                1 => vec![r.neg(&roots[0]), r.one()],
                n => {
                    let (a, b) = roots.split_at(n / 2);
                    upoly::mul(r, &go(r, a), &go(r, b))
                }
            }
        }
        Self::new(ring, go(ring.as_ref(), roots))
    }
}

pub(crate) fn is_power_of(mut e: usize, q: usize) -> bool {
    if e == 0 {
        return false;
    }
    while e.is_multiple_of(q) {
        e /= q;
    }
    e == 1
}
