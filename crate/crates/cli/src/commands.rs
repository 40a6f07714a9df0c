//! The subcommands. Each produces one [`Report`].

use std::sync::Arc;

use drinlevel::algebra::{make_ring, BaseRing, Poly, Scalars};
use drinlevel::building::{enumerate_facets, enumerate_vertices, newton_of_drinfeld};
use drinlevel::drinfeld::DrinfeldModule;
use drinlevel::level::{
    canonical_submodule, gamma0_layers, generated_subscheme, generator_scheme, is_cyclic, is_m_structure, is_subscheme,
    level_map, Divisor, Gamma0Flag, MShape, MStructure,
};
use drinlevel::skewpoly::SkewPoly;

use crate::expr::{self, Mode};
use crate::render;
use crate::report::Report;
use crate::session::{Diagnostic, Kind, Object, Session};

pub const COMMANDS: &[&str] = &[
    "torsion",
    "points",
    "check-mstructure",
    "cyclic",
    "gamma0",
    "quotient",
    "canonical",
    "levelmap",
    "building",
    "newton",
    "repro",
];

const DEFAULT_SMAX: usize = 12;

/// Kind of the named object a command takes as its first argument.
pub fn object_argument(cmd: &str) -> Option<&'static str> {
    match cmd {
        "torsion" | "points" | "cyclic" | "quotient" | "newton" => Some("drinfeld"),
        "check-mstructure" => Some("mstructure"),
        "gamma0" | "canonical" | "levelmap" => Some("gamma0"),
        _ => None,
    }
}

fn usage(message: impl Into<String>) -> Diagnostic {
    Diagnostic::new(Kind::Usage, message)
}

fn arity(words: &[String], min: usize, max: usize, form: &str) -> Result<(), Diagnostic> {
    let n = words.len() - 1;
    if n < min || n > max {
        return Err(usage(format!("usage: {form}")));
    }
    Ok(())
}

fn int(s: &str) -> Result<usize, Diagnostic> {
    s.parse().map_err(|_| usage(format!("expected a non-negative integer, found `{s}`")))
}

fn ints(s: &str) -> Result<Vec<usize>, Diagnostic> {
    s.split(',').map(|x| int(x.trim())).collect()
}

fn lookup<'a>(session: &'a Session, name: &str, kind: &str) -> Result<&'a Object, Diagnostic> {
    match session.get(name) {
        None => Err(Diagnostic::new(Kind::UnknownName, format!("`{name}` is not declared"))),
        Some(o) if o.kind_name() != kind => {
            Err(Diagnostic::new(Kind::TypeMismatch, format!("`{name}` is a {}, expected a {kind}", o.kind_name())))
        }
        Some(o) => Ok(o),
    }
}

fn module<'a>(session: &'a Session, name: &str) -> Result<&'a DrinfeldModule, Diagnostic> {
    match lookup(session, name, "drinfeld")? {
        Object::Drinfeld(e) => Ok(e),
        _ => unreachable!(),
    }
}

fn flag<'a>(session: &'a Session, name: &str) -> Result<&'a Gamma0Flag, Diagnostic> {
    match lookup(session, name, "gamma0")? {
        Object::Gamma0 { flag, .. } => Ok(flag),
        _ => unreachable!(),
    }
}

/// A declared divisor name, or an inline polynomial in `t`.
fn divisor_arg(session: &Session, ring: &Arc<BaseRing>, text: &str) -> Result<Divisor, Diagnostic> {
    if let Some(o) = session.get(text) {
        return match o {
            Object::Divisor(d) => Ok(d.clone()),
            other => Err(Diagnostic::new(
                Kind::TypeMismatch,
                format!("`{text}` is a {}, expected a divisor", other.kind_name()),
            )),
        };
    }
    let coeffs = expr::parse(ring, text, Mode::Poly)
        .map_err(|e| Diagnostic::new(Kind::Syntax, format!("in `{text}` at offset {}: {}", e.offset, e.message)))?;
    Ok(Divisor::new(Poly::new(ring, coeffs))?)
}

fn pow(q: u128, e: usize) -> u128 {
    q.pow(e as u32)
}

pub fn run(session: &Session, words: &[String]) -> Result<Report, Diagnostic> {
    let Some(cmd) = words.first() else {
        return Err(usage("no command given"));
    };
    let mut rep = Report::new(words);
    match cmd.as_str() {
        "torsion" => {
            arity(words, 2, 2, "torsion <module> <n>")?;
            let e = module(session, &words[1])?;
            let n = int(&words[2])?;
            let f = e.torsion_divisor(n);
            rep.push("module", render::skew(e.e_t()));
            rep.push("divisor", render::poly(&f));
            rep.push("degree", f.degree().unwrap_or(0));
            rep.push("check", "f_n is the additive polynomial of e_(T^n); degree q^(rn)");
        }
        "points" => {
            arity(words, 2, 3, "points <module> <n> [smax]")?;
            let e = module(session, &words[1])?;
            let n = int(&words[2])?;
            let s_max = words.get(3).map(|s| int(s)).transpose()?.unwrap_or(DEFAULT_SMAX);
            let tp = e.torsion_points(n, s_max)?;
            let mut pts = tp.points().to_vec();
            pts.sort();
            rep.push("extension degree", tp.set.s);
            rep.push("field size", tp.set.ring.field().order());
            rep.push("count", pts.len());
            for x in &pts {
                rep.push("point", render::element(x));
            }
            rep.push("check", "reduced points of f_n over the residue field, stabilised under field extension");
        }
        "check-mstructure" => {
            arity(words, 1, 1, "check-mstructure <mstructure>")?;
            let Object::MStructure { structure, .. } = lookup(session, &words[1], "mstructure")? else { unreachable!() };
            let f1 = structure.module().torsion_divisor(1);
            let remainder = structure.obstruction()?;
            rep.push("shape", render::csv(structure.shape().exponents()));
            rep.push("points", structure.gens().iter().map(render::element).collect::<Vec<_>>().join(", "));
            rep.push("divisor", render::poly(structure.divisor_of(None)?.poly()));
            rep.push("divisor on M[p]", render::poly(structure.p_torsion_divisor().poly()));
            rep.push("f_1", render::poly(&f1));
            rep.push("remainder", render::poly(&remainder));
            let holds = is_m_structure(structure);
            if holds {
                if let Ok(h) = generated_subscheme(structure) {
                    rep.push("generated subscheme", render::poly(h.poly()));
                }
            }
            rep.push("check", "the divisor of ι restricted to M[p] is a subscheme of E[p]");
            rep.holds = Some(holds);
        }
        "cyclic" => {
            if words.len() < 4 {
                return Err(usage("usage: cyclic <module> <divisor or polynomial> <n>"));
            }
            let e = module(session, &words[1])?;
            let n = int(words.last().unwrap())?;
            let g = divisor_arg(session, e.ring(), &words[2..words.len() - 1].join(" "))?;
            let q = e.ring().q();
            let scheme = generator_scheme(e, &g, n)?;
            let expected = if n == 0 { 1 } else { pow(q, n - 1) * (q - 1) };
            rep.push("divisor", render::poly(g.poly()));
            rep.push("ambient dimension", scheme.ambient_dim());
            rep.push("rank", scheme.rank().map_or("not free".to_string(), |r| r.to_string()));
            rep.push("expected rank", expected);
            rep.push("check", "the scheme of generators is free of rank q^(n-1)(q-1)");
            rep.holds = Some(is_cyclic(e, &g, n)?);
        }
        "gamma0" => {
            arity(words, 1, 1, "gamma0 <flag>")?;
            let f = flag(session, &words[1])?;
            rep.push("n", f.n());
            rep.push("rank", f.rank());
            let layers = gamma0_layers(f)?;
            for l in &layers {
                let rank = l.rank.map_or("not free".to_string(), |r| r.to_string());
                let verdict = if l.cyclic { "cyclic" } else { "not cyclic" };
                rep.push("layer", format!("{}: rank {rank}, expected {}, {verdict}", l.layer, l.expected));
            }
            rep.push("check", "every layer H_i/H_(i-1) is p^n-cyclic");
            rep.holds = Some(layers.iter().all(|l| l.cyclic));
        }
        "quotient" => {
            if words.len() < 4 {
                return Err(usage("usage: quotient <module> <divisor or polynomial> <n>"));
            }
            let e = module(session, &words[1])?;
            let n = int(words.last().unwrap())?;
            let g = divisor_arg(session, e.ring(), &words[2..words.len() - 1].join(" "))?;
            let (target, iso) = e.try_quotient(g.poly())?;
            let fnn = Divisor::new(e.torsion_divisor(n))?;
            let inside = is_subscheme(&g, &fnn)?;
            rep.push("kernel", render::poly(g.poly()));
            rep.push("isogeny", render::skew(&iso.psi));
            rep.push("target", render::skew(target.e_t()));
            rep.push("target torsion", render::poly(&target.torsion_divisor(n)));
            rep.push("kernel inside E[p^n]", inside);
            rep.push("check", "ψ e_T = e'_T ψ and the kernel divides f_n");
            rep.holds = Some(iso.verify() && inside);
        }
        "canonical" => {
            arity(words, 2, 2, "canonical <flag> <m1,...,m_(r-1)>")?;
            let f = flag(session, &words[1])?;
            let m = ints(&words[2])?;
            let h = canonical_submodule(f, &m)?;
            rep.push("divisor", render::poly(h.poly()));
            rep.push("degree", h.degree());
            rep.push("check", "H_m is the image of p^(-m_1)/O ⊕ … ⊕ p^(-m_(r-1))/O under the witness");
        }
        "levelmap" => {
            arity(words, 4, 4, "levelmap <flag> <m1,...> <ñ> <τ1,...>")?;
            let f = flag(session, &words[1])?;
            let m = ints(&words[2])?;
            let n_tilde = int(&words[3])?;
            let tau = ints(&words[4])?;
            let (e_m, out) = level_map(f, &m, n_tilde, &tau)?;
            rep.push("target", render::skew(e_m.e_t()));
            rep.push("n", out.n());
            for d in out.divisors() {
                rep.push("flag", render::poly(d.poly()));
            }
            if let Some(w) = out.witness() {
                rep.push("witness", w.iter().map(render::element).collect::<Vec<_>>().join(", "));
            }
            rep.push("check", "E/H_m carries the image flag and it passes the Γ₀(p^ñ) test");
            rep.holds = Some(gamma0_layers(&out)?.iter().all(|l| l.cyclic));
        }
        "building" => {
            arity(words, 2, 2, "building <r> <n>")?;
            let r = int(&words[1])?;
            let n = int(&words[2])?;
            if r == 0 {
                return Err(usage("r must be positive"));
            }
            let vertices = enumerate_vertices(r, n);
            rep.push("vertices", vertices.len());
            for v in &vertices {
                rep.push("vertex", v);
            }
            let facets = enumerate_facets(r, n);
            rep.push("facets", facets.len());
            for f in &facets {
                let s = f.to_string();
                rep.push("facet", s.strip_prefix("facet: ").unwrap_or(&s));
            }
        }
        "newton" => {
            arity(words, 1, 1, "newton <module>")?;
            let e = module(session, &words[1])?;
            let nu = newton_of_drinfeld(e)?;
            rep.push("rank", e.rank());
            rep.push("height", e.height()?);
            rep.push("newton point", nu);
            rep.push("check", "slopes 1/h with multiplicity h, then 0");
        }
        "repro" => {
            arity(words, 2, 2, "repro counterexample <q>")?;
            if words[1] != "counterexample" {
                return Err(usage(format!("unknown reproduction `{}`", words[1])));
            }
            let q = int(&words[2])?;
            counterexample(&mut rep, q)?;
        }
        other => return Err(usage(format!("unknown command `{other}`; expected one of {}", COMMANDS.join(", ")))),
    }
    Ok(rep)
}

/// `q = p^d` with `p` prime.
fn prime_power(q: usize) -> Option<(u32, usize)> {
    let p = (2..=q).find(|p| q.is_multiple_of(*p))?;
    let mut rest = q;
    let mut d = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        d += 1;
    }
    (rest == 1).then_some((p as u32, d))
}

/// The zero map on `p^{-2}/O_0` for `e_T = ζ + ζτ + τ²` over `F_q[ζ]/(ζ²)`:
/// its image divisor is `t^{q²}`, but on `M[p]` it gives `t^q`, which does
/// not divide `f_1`.
fn counterexample(rep: &mut Report, q: usize) -> Result<(), Diagnostic> {
    let (p, d) = prime_power(q).ok_or_else(|| usage(format!("{q} is not a prime power")))?;
    let ring = make_ring(p, d, 1, 2, None)?;
    let z = ring.zeta();
    let e = DrinfeldModule::new(SkewPoly::new(&ring, vec![z.clone(), z.clone(), ring.one()]))?;
    let iota = MStructure::zero(MShape::new(vec![2])?, e.clone());
    let remainder = iota.obstruction()?;
    rep.push("ring", format!("F_{q}[z]/(z^2)"));
    rep.push("module", render::skew(e.e_t()));
    rep.push("torsion 1", render::poly(&e.torsion_divisor(1)));
    rep.push("torsion 2", render::poly(&e.torsion_divisor(2)));
    rep.push("divisor of ι", render::poly(iota.divisor_of(None)?.poly()));
    rep.push("divisor of ι on M[p]", render::poly(iota.p_torsion_divisor().poly()));
    rep.push("check", "remainder of f_1 modulo the divisor of ι on M[p]");
    let shown = render::pretty(&render::poly(&remainder));
    let verdict = if is_m_structure(&iota) {
        "ι=0 is a 𝔭^{−2}/O_0-structure".to_string()
    } else {
        format!("ι=0 is NOT a 𝔭^{{−2}}/O_0-structure; obstruction remainder = {shown}")
    };
    rep.push("verdict", verdict);
    let expected = Poly::monomial(&ring, z, 1);
    rep.holds = Some(!is_m_structure(&iota) && remainder == expected);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn object_arguments_cover_named_commands() {
        for c in COMMANDS {
            let named = object_argument(c).is_some();
            assert_eq!(named, !matches!(*c, "building" | "repro"), "{c}");
        }
    }
}
