//! Canonical text forms of ring elements and polynomials, readable back by
//! the expression parser.

use drinlevel::algebra::{BaseRing, Poly, RingElem, Scalars};
use drinlevel::skewpoly::SkewPoly;

fn monomial(var: &str, e: usize) -> String {
    match e {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{e}"),
    }
}

/// `Σ c_ij x^i z^j`, highest `z`-power first, then highest `x`-power.
pub fn element(a: &RingElem) -> String {
    let mut terms = Vec::new();
    for (j, part) in a.parts().iter().enumerate().rev() {
        for (i, &c) in part.coords().iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mut pieces = Vec::new();
            if c != 1 || (i == 0 && j == 0) {
                pieces.push(c.to_string());
            }
            if i > 0 {
                pieces.push(monomial("x", i));
            }
            if j > 0 {
                pieces.push(monomial("z", j));
            }
            terms.push(pieces.join("*"));
        }
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn coefficient_times(ring: &BaseRing, c: &RingElem, var: String) -> String {
    if var.is_empty() {
        return element(c);
    }
    if ring.is_one(c) {
        return var;
    }
    let s = element(c);
    if s.contains(" + ") {
        format!("({s})*{var}")
    } else {
        format!("{s}*{var}")
    }
}

/// Descending powers of `t`.
pub fn poly(p: &Poly) -> String {
    let ring = p.ring().as_ref();
    let terms: Vec<String> = p
        .coeffs()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !ring.is_zero(c))
        .map(|(e, c)| coefficient_times(ring, c, monomial("t", e)))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Ascending powers `t<j>` of `τ`, coefficients on the left.
pub fn skew(s: &SkewPoly) -> String {
    let ring = s.ring().as_ref();
    let terms: Vec<String> = s
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !ring.is_zero(c))
        .map(|(j, c)| coefficient_times(ring, c, if j == 0 { String::new() } else { format!("t{j}") }))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Display form with `ζ` and juxtaposition, e.g. `ζt`.
pub fn pretty(plain: &str) -> String {
    plain.replace('z', "ζ").replace('*', "")
}

pub fn csv<T: ToString>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
