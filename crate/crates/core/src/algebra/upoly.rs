//! Dense univariate polynomials over any [`Scalars`], stored low degree first
//! with no trailing zeros.

use super::Scalars;

pub fn trim<S: Scalars>(s: &S, v: &mut Vec<S::Elem>) {
    while v.last().is_some_and(|c| s.is_zero(c)) {
        v.pop();
    }
}

pub fn degree<E>(a: &[E]) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn add<S: Scalars>(s: &S, a: &[S::Elem], b: &[S::Elem]) -> Vec<S::Elem> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => s.add(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        });
    }
    trim(s, &mut out);
    out
}

pub fn neg<S: Scalars>(s: &S, a: &[S::Elem]) -> Vec<S::Elem> {
    a.iter().map(|c| s.neg(c)).collect()
}

pub fn sub<S: Scalars>(s: &S, a: &[S::Elem], b: &[S::Elem]) -> Vec<S::Elem> {
    add(s, a, &neg(s, b))
}

pub fn scale<S: Scalars>(s: &S, c: &S::Elem, a: &[S::Elem]) -> Vec<S::Elem> {
    let mut out: Vec<_> = a.iter().map(|x| s.mul(c, x)).collect();
    trim(s, &mut out);
    out
}

pub fn mul<S: Scalars>(s: &S, a: &[S::Elem], b: &[S::Elem]) -> Vec<S::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![s.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if s.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = s.add(&out[i + j], &s.mul(x, y));
        }
    }
    trim(s, &mut out);
    out
}

/// Division with remainder. Returns `None` when `b` is zero or its leading
/// coefficient is not invertible.
pub fn divrem<S: Scalars>(
    s: &S,
    a: &[S::Elem],
    b: &[S::Elem],
) -> Option<(Vec<S::Elem>, Vec<S::Elem>)> {
    let lead_inv = s.inv(b.last()?)?;
    let db = b.len() - 1;
    let mut r = a.to_vec();
    trim(s, &mut r);
    if r.len() < b.len() {
        return Some((Vec::new(), r));
    }
    let mut q = vec![s.zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = s.mul(&r[i + db], &lead_inv);
        if s.is_zero(&c) {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] = s.sub(&r[i + j], &s.mul(&c, bj));
        }
        q[i] = c;
    }
    r.truncate(db);
    trim(s, &mut r);
    trim(s, &mut q);
    Some((q, r))
}

pub fn rem<S: Scalars>(s: &S, a: &[S::Elem], b: &[S::Elem]) -> Option<Vec<S::Elem>> {
    divrem(s, a, b).map(|(_, r)| r)
}

pub fn monic<S: Scalars>(s: &S, a: &[S::Elem]) -> Option<Vec<S::Elem>> {
    let inv = s.inv(a.last()?)?;
    Some(scale(s, &inv, a))
}

/// Monic gcd over a field.
pub fn gcd<S: Scalars>(s: &S, a: &[S::Elem], b: &[S::Elem]) -> Vec<S::Elem> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(s, &mut x);
    trim(s, &mut y);
    while !y.is_empty() {
        let r = rem(s, &x, &y).expect("gcd needs a field");
        x = y;
        y = r;
    }
    monic(s, &x).unwrap_or_default()
}

pub fn mulmod<S: Scalars>(
    s: &S,
    a: &[S::Elem],
    b: &[S::Elem],
    m: &[S::Elem],
) -> Vec<S::Elem> {
    rem(s, &mul(s, a, b), m).expect("modulus must have a unit leading coefficient")
}

pub fn powmod<S: Scalars>(s: &S, a: &[S::Elem], mut e: u128, m: &[S::Elem]) -> Vec<S::Elem> {
    let mut base = rem(s, a, m).expect("modulus must have a unit leading coefficient");
    let mut acc = rem(s, &[s.one()], m).unwrap();
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(s, &acc, &base, m);
        }
        e >>= 1;
        if e > 0 {
            base = mulmod(s, &base, &base, m);
        }
    }
    acc
}

pub fn eval<S: Scalars>(s: &S, a: &[S::Elem], x: &S::Elem) -> S::Elem {
    let mut acc = s.zero();
    for c in a.iter().rev() {
        acc = s.add(&s.mul(&acc, x), c);
    }
    acc
}

pub fn derivative<S: Scalars>(s: &S, a: &[S::Elem]) -> Vec<S::Elem> {
    let mut out = Vec::with_capacity(a.len().saturating_sub(1));
    for (i, c) in a.iter().enumerate().skip(1) {
        let mut acc = s.zero();
        for _ in 0..i {
            acc = s.add(&acc, c);
        }
        out.push(acc);
    }
    trim(s, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PrimeField;

    #[test]
    fn divrem_reconstructs() {
        let f = PrimeField::new(5).unwrap();
        let a = vec![1, 2, 3, 4, 1];
        let b = vec![2, 0, 3];
        let (q, r) = divrem(&f, &a, &b).unwrap();
        assert!(r.len() < b.len());
        assert_eq!(add(&f, &mul(&f, &q, &b), &r), a);
    }

    #[test]
    fn gcd_of_products() {
        let f = PrimeField::new(3).unwrap();
        let g = vec![1, 1];
        let a = mul(&f, &g, &[1, 0, 1]);
        let b = mul(&f, &g, &[1, 2]);
        assert_eq!(gcd(&f, &a, &b), vec![1, 1]);
    }

    #[test]
    fn derivative_in_char_p() {
        let f = PrimeField::new(2).unwrap();
        assert_eq!(derivative(&f, &[1, 1, 1]), vec![1]);
        assert!(derivative(&f, &[0, 0, 1]).is_empty());
    }
}
