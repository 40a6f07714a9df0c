//! Finite fields `F_{p^N}`, local rings `F_{q^m}[z]/(z^k)`, and the linear
//! algebra that everything else is built on.

mod field;
pub mod linalg;
mod poly;
mod prime;
mod ring;
pub mod upoly;

pub use field::{FieldDesc, FieldElem};
pub use linalg::{span_closure, FiniteModule, LinearMap, Matrix, Subspace};
pub use poly::Poly;
pub(crate) use poly::same_ring;
pub use prime::{is_prime, PrimeField};
pub use ring::{make_ring, BaseRing, RingElem, RingExtension};

use std::fmt::Debug;

/// A commutative ring of scalars with explicit context, in the style of
/// `ring.mul(&a, &b)`.
///
/// `inv` returns `None` for non-units. Linear-algebra routines only call it on
/// pivots, so they work over fields and, with unit pivots, over local rings.
pub trait Scalars {
    type Elem: Clone + PartialEq + Eq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.inv(a).is_some()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u128) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}
