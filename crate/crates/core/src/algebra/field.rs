use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::rngs::StdRng;
use rand::SeedableRng;

use super::prime::PrimeField;
use super::{upoly, Scalars};
use crate::{Error, Result};

/// Element of `F_{p^N}` as coordinates on the power basis `1, x, …, x^{N-1}`.
/// The derived order is lexicographic on coordinates and is the canonical
/// order used for every tie-break in the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem(Vec<u32>);

impl FieldElem {
    pub fn coords(&self) -> &[u32] {
        &self.0
    }
}

/// The field `F_{q^m} = F_p[x]/(modulus)` with `q = p^d`.
#[derive(Debug, Clone)]
pub struct FieldDesc {
    p: u32,
    d: usize,
    m: usize,
    modulus: Vec<u32>,
    fp: PrimeField,
    // x^(N+j) mod modulus for j < N-1
    reductions: Vec<Vec<u32>>,
    // images of x^i under x -> x^p
    frob_p: Vec<Vec<u32>>,
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.d == other.d && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldDesc {}

fn moduli_cache() -> &'static Mutex<HashMap<(u32, usize), Vec<u32>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, usize), Vec<u32>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `x^(p^j) mod f` for `j = 0..=n`.
fn frobenius_orbit_of_x(fp: &PrimeField, f: &[u32], n: usize) -> Vec<Vec<u32>> {
    let p = fp.characteristic() as u128;
    let mut cur = upoly::rem(fp, &[0, 1], f).unwrap();
    let mut out = vec![cur.clone()];
    for _ in 0..n {
        cur = upoly::powmod(fp, &cur, p, f);
        out.push(cur.clone());
    }
    out
}

/// Rabin's irreducibility test for a monic polynomial over `F_p`.
pub(crate) fn is_irreducible(fp: &PrimeField, f: &[u32]) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let orbit = frobenius_orbit_of_x(fp, f, n);
    let x = upoly::rem(fp, &[0, 1], f).unwrap();
    if orbit[n] != x {
        return false;
    }
    prime_divisors(n).into_iter().all(|l| {
        let h = upoly::sub(fp, &orbit[n / l], &x);
        upoly::gcd(fp, &h, f) == vec![1]
    })
}

/// Smallest monic irreducible polynomial of degree `n` over `F_p`, ordering
/// candidates by the integer `Σ c_i p^i` of their lower coefficients.
pub(crate) fn canonical_modulus(p: u32, n: usize) -> Result<Vec<u32>> {
    if let Some(f) = moduli_cache().lock().unwrap().get(&(p, n)) {
        return Ok(f.clone());
    }
    let fp = PrimeField::new(p)?;
    let mut lower = vec![0u32; n];
    loop {
        let mut f = lower.clone();
        f.push(1);
        if (n == 1 || f[0] != 0) && is_irreducible(&fp, &f) {
            moduli_cache().lock().unwrap().insert((p, n), f.clone());
            return Ok(f);
        }
        let mut i = 0;
        loop {
            if i == n {
                return Err(Error::Inconsistent(format!("no irreducible of degree {n}")));
            }
            lower[i] += 1;
            if lower[i] < p {
                break;
            }
            lower[i] = 0;
            i += 1;
        }
    }
}

impl FieldDesc {
    /// `F_{q^m}` with `q = p^d`. Without a modulus the canonical one is used.
    pub fn new(p: u32, d: usize, m: usize, modulus: Option<Vec<u32>>) -> Result<Self> {
        let fp = PrimeField::new(p)?;
        if d == 0 || m == 0 {
            return Err(Error::InvalidParameter("d and m must be positive".into()));
        }
        let n = d * m;
        if (n as f64) * (p as f64).log2() > 120.0 {
            return Err(Error::ExtensionTooLarge { p, degree: n });
        }
        let modulus = match modulus {
            Some(f) => {
                if f.len() != n + 1 || f[n] != 1 || f.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidParameter(format!(
                        "modulus must be monic of degree {n} with coefficients below {p}"
                    )));
                }
                if !is_irreducible(&fp, &f) {
                    return Err(Error::ReducibleModulus { p });
                }
                f
            }
            None => canonical_modulus(p, n)?,
        };
        let mut reductions = Vec::new();
        let mut cur: Vec<u32> = modulus[..n].iter().map(|c| fp.neg(c)).collect();
        for _ in 0..n.saturating_sub(1) {
            reductions.push(cur.clone());
            // multiply by x and reduce
            let top = cur[n - 1];
            let mut next = vec![0u32; n];
            next[1..n].copy_from_slice(&cur[..n - 1]);
            for i in 0..n {
                next[i] = fp.sub(&next[i], &fp.mul(&top, &modulus[i]));
            }
            cur = next;
        }
        let mut field = Self { p, d, m, modulus, fp, reductions, frob_p: Vec::new() };
        let frob_p = (0..n)
            .map(|i| {
                let mut e = vec![0u32; n];
                e[i] = 1;
                field.pow(&FieldElem(e), p as u128).0
            })
            .collect();
        field.frob_p = frob_p;
        Ok(field)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> usize {
        self.d * self.m
    }

    pub fn q(&self) -> u128 {
        (self.p as u128).pow(self.d as u32)
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.degree() as u32)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn prime_field(&self) -> &PrimeField {
        &self.fp
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<FieldElem> {
        if coords.len() != self.degree() {
            return Err(Error::DimensionMismatch { expected: self.degree(), found: coords.len() });
        }
        Ok(FieldElem(coords.iter().map(|&c| c % self.p).collect()))
    }

    pub fn from_int(&self, c: i64) -> FieldElem {
        let mut v = vec![0u32; self.degree()];
        v[0] = c.rem_euclid(self.p as i64) as u32;
        FieldElem(v)
    }

    /// The class of `x`, a generator of the field over `F_p`.
    pub fn generator(&self) -> FieldElem {
        let mut v = vec![0u32; self.degree()];
        if self.degree() > 1 {
            v[1] = 1;
            FieldElem(v)
        } else {
            FieldElem(vec![self.fp.neg(&self.modulus[0])])
        }
    }

    /// Element with integer encoding `Σ c_i p^i`.
    pub fn from_index(&self, mut idx: u128) -> FieldElem {
        let mut v = vec![0u32; self.degree()];
        for c in v.iter_mut() {
            *c = (idx % self.p as u128) as u32;
            idx /= self.p as u128;
        }
        FieldElem(v)
    }

    /// All elements in lexicographic order. Only sensible for small fields.
    pub fn elements(&self) -> Vec<FieldElem> {
        let mut all: Vec<FieldElem> = (0..self.order()).map(|i| self.from_index(i)).collect();
        all.sort();
        all
    }

    pub fn frobenius_p(&self, a: &FieldElem) -> FieldElem {
        let n = self.degree();
        let mut out = vec![0u32; n];
        for (i, &c) in a.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(&self.frob_p[i]) {
                *o = self.fp.add(o, &self.fp.mul(&c, &b));
            }
        }
        FieldElem(out)
    }

    /// `a^(p^e)`.
    pub fn frobenius_p_pow(&self, a: &FieldElem, e: usize) -> FieldElem {
        let mut cur = a.clone();
        for _ in 0..e % self.degree() {
            cur = self.frobenius_p(&cur);
        }
        cur
    }

    pub fn frobenius_q(&self, a: &FieldElem) -> FieldElem {
        self.frobenius_p_pow(a, self.d)
    }

    /// The unique `q`-th root.
    pub fn qth_root(&self, a: &FieldElem) -> FieldElem {
        self.frobenius_p_pow(a, self.degree() - self.d)
    }

    /// Matrix over `F_p` (columns = images of basis vectors) of `a ↦ a^q`.
    pub fn frobenius_q_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.degree();
        (0..n)
            .map(|i| {
                let mut e = vec![0u32; n];
                e[i] = 1;
                self.frobenius_q(&FieldElem(e)).0
            })
            .collect()
    }

    /// The subfield `F_q`, sorted.
    pub fn fq_elements(&self) -> Vec<FieldElem> {
        use super::linalg::{nullspace, Matrix};
        let n = self.degree();
        let cols = self.frobenius_q_matrix();
        let m = Matrix::from_fn(n, n, |i, j| {
            let v = cols[j][i];
            if i == j {
                self.fp.sub(&v, &1)
            } else {
                v
            }
        });
        let basis = nullspace(&self.fp, &m);
        let mut out = Vec::new();
        let total = (self.p as u128).pow(basis.len() as u32);
        for idx in 0..total {
            let mut v = vec![0u32; n];
            let mut t = idx;
            for b in &basis {
                let c = (t % self.p as u128) as u32;
                t /= self.p as u128;
                for (x, y) in v.iter_mut().zip(b) {
                    *x = self.fp.add(x, &self.fp.mul(&c, y));
                }
            }
            out.push(FieldElem(v));
        }
        out.sort();
        out
    }

    pub fn is_in_fq(&self, a: &FieldElem) -> bool {
        self.frobenius_q(a) == *a
    }

    /// Image of an `F_p`-polynomial evaluated at `g`.
    pub fn eval_prime_poly(&self, f: &[u32], g: &FieldElem) -> FieldElem {
        let coeffs: Vec<FieldElem> = f.iter().map(|&c| self.from_int(c as i64)).collect();
        upoly::eval(self, &coeffs, g)
    }

    /// All roots in this field of a polynomial with coefficients here, sorted.
    pub fn roots(&self, f: &[FieldElem]) -> Vec<FieldElem> {
        let mut f = f.to_vec();
        upoly::trim(self, &mut f);
        if f.len() <= 1 {
            return Vec::new();
        }
        let f = upoly::monic(self, &f).unwrap();
        // gcd with x^(p^N) - x
        let x = vec![self.zero(), self.one()];
        let mut xp = upoly::rem(self, &x, &f).unwrap();
        for _ in 0..self.degree() {
            xp = upoly::powmod(self, &xp, self.p as u128, &f);
        }
        let g = upoly::gcd(self, &upoly::sub(self, &xp, &x), &f);
        let mut out = Vec::new();
        self.split_linear(g, &mut out, &mut 1);
        out.sort();
        out
    }

    fn split_linear(&self, g: Vec<FieldElem>, out: &mut Vec<FieldElem>, counter: &mut u128) {
        match g.len() {
            0 | 1 => {}
            2 => out.push(self.neg(&g[0])),
            _ => loop {
                let a = self.random(&mut StdRng::seed_from_u64(*counter as u64));
                *counter += 1;
                let h = if self.p == 2 {
                    // trace of a·x
                    let base = upoly::rem(self, &[self.zero(), a], &g).unwrap();
                    let mut acc = base.clone();
                    let mut cur = base;
                    for _ in 1..self.degree() {
                        cur = upoly::mulmod(self, &cur, &cur, &g);
                        acc = upoly::add(self, &acc, &cur);
                    }
                    acc
                } else {
                    let e = (self.order() - 1) / 2;
                    let t = upoly::powmod(self, &[a, self.one()], e, &g);
                    upoly::sub(self, &t, &[self.one()])
                };
                let d = upoly::gcd(self, &h, &g);
                if d.len() > 1 && d.len() < g.len() {
                    let (rest, _) = upoly::divrem(self, &g, &d).unwrap();
                    self.split_linear(d, out, counter);
                    self.split_linear(rest, out, counter);
                    return;
                }
            },
        }
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem((0..self.degree()).map(|_| rng.gen_range(0..self.p)).collect())
    }
}

impl Scalars for FieldDesc {
    type Elem = FieldElem;

    fn zero(&self) -> FieldElem {
        FieldElem(vec![0; self.degree()])
    }

    fn one(&self) -> FieldElem {
        self.from_int(1)
    }

    fn is_zero(&self, a: &FieldElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    fn is_unit(&self, a: &FieldElem) -> bool {
        !self.is_zero(a)
    }

    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().zip(&b.0).map(|(x, y)| self.fp.add(x, y)).collect())
    }

    fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().zip(&b.0).map(|(x, y)| self.fp.sub(x, y)).collect())
    }

    fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().map(|x| self.fp.neg(x)).collect())
    }

    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let n = self.degree();
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        let mut out: Vec<u64> = prod[..n].to_vec();
        for (j, &c) in prod[n..].iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(&self.reductions[j]) {
                *o = (*o + c * r as u64) % p;
            }
        }
        FieldElem(out.into_iter().map(|c| c as u32).collect())
    }

    fn inv(&self, a: &FieldElem) -> Option<FieldElem> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.order() - 2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_has_the_only_irreducible_quadratic() {
        let f = FieldDesc::new(2, 2, 1, None).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let fp = PrimeField::new(2).unwrap();
        let irreducible: Vec<Vec<u32>> = (0..4u32)
            .map(|i| vec![i & 1, (i >> 1) & 1, 1])
            .filter(|g| is_irreducible(&fp, g))
            .collect();
        assert_eq!(irreducible, vec![vec![1, 1, 1]]);
    }

    #[test]
    fn rabin_agrees_with_root_free_small_degrees() {
        // Degree 2 and 3 polynomials are irreducible iff they have no root.
        for p in [2u32, 3, 5] {
            let fp = PrimeField::new(p).unwrap();
            for n in 2..=3usize {
                for idx in 0..(p as usize).pow(n as u32) {
                    let mut f: Vec<u32> = (0..n).map(|i| (idx / (p as usize).pow(i as u32)) as u32 % p).collect();
                    f.push(1);
                    let rootless = (0..p).all(|x| upoly::eval(&fp, &f, &x) != 0);
                    assert_eq!(is_irreducible(&fp, &f), rootless, "{f:?}");
                }
            }
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert_eq!(
            FieldDesc::new(2, 2, 1, Some(vec![1, 0, 1])).unwrap_err(),
            Error::ReducibleModulus { p: 2 }
        );
        assert!(FieldDesc::new(4, 1, 1, None).is_err());
    }

    #[test]
    fn frobenius_on_f9_has_order_two_off_f3() {
        let f = FieldDesc::new(3, 1, 2, None).unwrap();
        let fq = f.fq_elements();
        assert_eq!(fq.len(), 3);
        for a in f.elements() {
            let b = f.frobenius_q(&a);
            assert_eq!(b, f.pow(&a, 3));
            assert_eq!(f.frobenius_q(&b), a);
            assert_eq!(b == a, fq.contains(&a));
        }
        let g = f.generator();
        assert_ne!(f.frobenius_q(&g), g);
    }

    #[test]
    fn inverses_in_f16() {
        let f = FieldDesc::new(2, 2, 2, None).unwrap();
        for a in f.elements().into_iter().skip(1) {
            assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
        }
    }

    #[test]
    fn qth_root_inverts_frobenius() {
        let f = FieldDesc::new(2, 2, 3, None).unwrap();
        let a = f.from_index(37);
        assert_eq!(f.frobenius_q(&f.qth_root(&a)), a);
    }

    #[test]
    fn roots_of_split_polynomial() {
        let f = FieldDesc::new(3, 1, 2, None).unwrap();
        // t^9 - t splits completely
        let mut poly = vec![f.zero(); 10];
        poly[1] = f.from_int(-1);
        poly[9] = f.one();
        assert_eq!(f.roots(&poly), f.elements());
        let f2 = FieldDesc::new(2, 1, 4, None).unwrap();
        let mut poly = vec![f2.zero(); 17];
        poly[1] = f2.one();
        poly[16] = f2.one();
        assert_eq!(f2.roots(&poly).len(), 16);
    }
}
