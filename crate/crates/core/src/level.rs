//! Cartier divisors in `A¹_R`, Drinfeld M-structures, generator schemes and
//! the cyclicity criterion, `Γ₀(p^n)` flags, canonical submodules and level
//! maps.

use std::sync::Arc;

use crate::algebra::linalg::{solve, span_closure, FiniteModule, FnMap, LinearMap, Matrix, Subspace};
use crate::algebra::{upoly, BaseRing, FieldElem, Poly, RingElem, RingExtension, Scalars};
use crate::building::validate_subsimplex;
use crate::drinfeld::{DrinfeldModule, Isogeny};
use crate::finshtuka::NaiveFlag;
use crate::skewpoly::{kernel_points_at, right_divide, SkewPoly};
use crate::{Error, Result};

/// An effective Cartier divisor in `A¹_R`: a monic polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divisor {
    poly: Poly,
}

impl Divisor {
    pub fn new(poly: Poly) -> Result<Self> {
        if !poly.is_monic() {
            return Err(Error::NotMonic);
        }
        Ok(Self { poly })
    }

    /// The divisor `t` of the zero section.
    pub fn zero_section(ring: &Arc<BaseRing>) -> Self {
        Self { poly: Poly::monomial(ring, ring.one(), 1) }
    }

    /// `[P] = (t - P)`.
    pub fn point(ring: &Arc<BaseRing>, p: &RingElem) -> Self {
        Self { poly: Poly::linear(ring, p) }
    }

    /// `Σ [P]` over the given points, with multiplicity.
    pub fn of_points(ring: &Arc<BaseRing>, points: &[RingElem]) -> Self {
        Self { poly: Poly::from_roots(ring, points) }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn ring(&self) -> &Arc<BaseRing> {
        self.poly.ring()
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap()
    }

    pub fn is_additive(&self) -> bool {
        self.poly.is_additive()
    }

    /// Sum of divisors: the product.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        Ok(Self { poly: self.poly.mul(&other.poly)? })
    }

    /// The skew polynomial of an additive divisor.
    pub fn to_skew(&self) -> Result<SkewPoly> {
        SkewPoly::from_additive(&self.poly)
    }

    pub fn from_skew(psi: &SkewPoly) -> Result<Self> {
        Self::new(psi.to_additive().make_monic()?)
    }

    pub fn base_change(&self, ext: &RingExtension) -> Result<Self> {
        Ok(Self { poly: self.poly.base_change(ext)? })
    }
}

/// Remainder of `big` divided by `small`; zero exactly when `small ⊆ big`.
pub fn subscheme_remainder(small: &Divisor, big: &Divisor) -> Result<Poly> {
    big.poly.rem(&small.poly)
}

/// `small` is a closed subscheme of `big`.
pub fn is_subscheme(small: &Divisor, big: &Divisor) -> Result<bool> {
    Ok(subscheme_remainder(small, big)?.is_zero())
}

/// `M = p^{-n_1}/O ⊕ … ⊕ p^{-n_m}/O` with `n_1 ≥ … ≥ n_m ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MShape(Vec<usize>);

impl MShape {
    pub fn new(exponents: Vec<usize>) -> Result<Self> {
        if exponents.windows(2).any(|w| w[0] < w[1]) || exponents.contains(&0) {
            return Err(Error::InvalidParameter("shape must be non-increasing and positive".into()));
        }
        Ok(Self(exponents))
    }

    pub fn exponents(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `log_q |M|`.
    pub fn log_order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max_exponent(&self) -> usize {
        self.0.first().copied().unwrap_or(0)
    }
}

/// An `O_0`-linear map `ι: M → E[p^n]`, given by `P_i = ι(ϖ^{-n_i} e_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MStructure {
    shape: MShape,
    e: DrinfeldModule,
    gens: Vec<RingElem>,
}

/// `e_a(x)` for `a = Σ a_j T^j` given by its `F_q` coefficients.
fn act(e: &DrinfeldModule, a: &[RingElem], x: &RingElem) -> RingElem {
    let r = e.ring().as_ref();
    let mut acc = r.zero();
    for c in a.iter().rev() {
        acc = r.add(&e.e_t().eval_additive(&acc), &r.mul(c, x));
    }
    acc
}

/// `e_{T^j}(x)`.
fn act_t_pow(e: &DrinfeldModule, j: usize, x: &RingElem) -> RingElem {
    let mut cur = x.clone();
    for _ in 0..j {
        cur = e.e_t().eval_additive(&cur);
    }
    cur
}

/// All `Σ_j c_j gens[j]` with `c_j ∈ F_q`, in a fixed enumeration order.
fn fq_span_multiset(ring: &BaseRing, gens: &[RingElem]) -> Vec<RingElem> {
    let fq = ring.fq_elements();
    let mut out = vec![ring.zero()];
    for g in gens {
        let scaled: Vec<RingElem> = fq.iter().map(|c| ring.mul(c, g)).collect();
        out = out.iter().flat_map(|x| scaled.iter().map(move |y| ring.add(x, y))).collect();
    }
    out
}

impl MStructure {
    /// Checks that each `P_i` is killed by `e_{T^{n_i}}`.
    pub fn new(shape: MShape, e: DrinfeldModule, gens: Vec<RingElem>) -> Result<Self> {
        if gens.len() != shape.len() {
            return Err(Error::DimensionMismatch { expected: shape.len(), found: gens.len() });
        }
        let r = e.ring().clone();
        for (i, (p, &n_i)) in gens.iter().zip(shape.exponents()).enumerate() {
            if !r.is_zero(&act_t_pow(&e, n_i, p)) {
                return Err(Error::InvalidParameter(format!("P_{} is not killed by e_(T^{n_i})", i + 1)));
            }
        }
        Ok(Self { shape, e, gens })
    }

    pub fn zero(shape: MShape, e: DrinfeldModule) -> Self {
        let gens = vec![e.ring().zero(); shape.len()];
        Self { shape, e, gens }
    }

    pub fn shape(&self) -> &MShape {
        &self.shape
    }

    pub fn module(&self) -> &DrinfeldModule {
        &self.e
    }

    pub fn gens(&self) -> &[RingElem] {
        &self.gens
    }

    fn check_cap(&self, cap: &[usize]) -> Result<()> {
        if cap.len() != self.shape.len() {
            return Err(Error::DimensionMismatch { expected: self.shape.len(), found: cap.len() });
        }
        if cap.iter().zip(self.shape.exponents()).any(|(c, n)| c > n) {
            return Err(Error::InvalidParameter("sub-shape exceeds the shape".into()));
        }
        Ok(())
    }

    /// Images `ι(α)` for all `α` in `M' = ⊕ p^{-cap_i}/O ⊆ M`, with multiplicity.
    pub fn image_multiset(&self, cap: Option<&[usize]>) -> Result<Vec<RingElem>> {
        let cap: Vec<usize> = match cap {
            Some(c) => {
                self.check_cap(c)?;
                c.to_vec()
            }
            None => self.shape.exponents().to_vec(),
        };
        let r = self.e.ring().as_ref();
        // F_q-generators of M': e_{T^j}(Q_i) for Q_i = e_{T^{n_i - cap_i}}(P_i), j < cap_i
        let mut gens = Vec::new();
        for ((p, &n_i), &c_i) in self.gens.iter().zip(self.shape.exponents()).zip(&cap) {
            let mut cur = act_t_pow(&self.e, n_i - c_i, p);
            for _ in 0..c_i {
                gens.push(cur.clone());
                cur = self.e.e_t().eval_additive(&cur);
            }
        }
        Ok(fq_span_multiset(r, &gens))
    }

    /// `Σ_{α ∈ M'} [ι(α)]`.
    pub fn divisor_of(&self, cap: Option<&[usize]>) -> Result<Divisor> {
        let pts = self.image_multiset(cap)?;
        Ok(Divisor::of_points(self.e.ring(), &pts))
    }

    /// Divisor of `ι|_{M[p]}`.
    pub fn p_torsion_divisor(&self) -> Divisor {
        let cap = vec![1; self.shape.len()];
        self.divisor_of(Some(&cap)).expect("valid cap")
    }

    /// Remainder of `f_1` modulo the divisor of `ι|_{M[p]}`.
    pub fn obstruction(&self) -> Result<Poly> {
        let f1 = Divisor::new(self.e.torsion_divisor(1))?;
        subscheme_remainder(&self.p_torsion_divisor(), &f1)
    }

    pub fn base_change(&self, ext: &RingExtension) -> Result<Self> {
        Ok(Self {
            shape: self.shape.clone(),
            e: self.e.base_change(ext)?,
            gens: self.gens.iter().map(|g| ext.embed(g)).collect(),
        })
    }
}

pub fn divisor_of(iota: &MStructure, cap: Option<&[usize]>) -> Result<Divisor> {
    iota.divisor_of(cap)
}

/// The divisor of `ι|_{M[p]}` is a subscheme of `E[p]`.
pub fn is_m_structure(iota: &MStructure) -> bool {
    iota.obstruction().is_ok_and(|r| r.is_zero())
}

/// The subscheme `H = Σ_{α ∈ M} [ι(α)]`, verified to be an additive,
/// `e`-stable subscheme of `E[p^{n_1}]`.
pub fn generated_subscheme(iota: &MStructure) -> Result<Divisor> {
    if iota.shape.is_empty() {
        return Ok(Divisor::zero_section(iota.e.ring()));
    }
    if !is_m_structure(iota) {
        return Err(Error::NotMStructure);
    }
    let g = iota.divisor_of(None)?;
    let fn1 = Divisor::new(iota.e.torsion_divisor(iota.shape.max_exponent()))?;
    if !is_subscheme(&g, &fn1)? {
        return Err(Error::NotSubscheme);
    }
    if !g.is_additive() {
        return Err(Error::NotAdditiveDivisor);
    }
    iota.e.try_quotient(g.poly())?;
    Ok(g)
}

/// `R[Q]/(m(Q))` for monic `m`, elements as full-length coefficient vectors.
#[derive(Debug, Clone)]
struct TruncatedAlgebra {
    ring: Arc<BaseRing>,
    modulus: Vec<RingElem>,
}

impl TruncatedAlgebra {
    fn deg(&self) -> usize {
        self.modulus.len() - 1
    }

    fn pad(&self, mut v: Vec<RingElem>) -> Vec<RingElem> {
        v.resize(self.deg(), self.ring.zero());
        v
    }

    fn constant(&self, c: &RingElem) -> Vec<RingElem> {
        let mut v = vec![self.ring.zero(); self.deg()];
        if self.deg() > 0 {
            v[0] = c.clone();
        }
        v
    }

    fn generator(&self) -> Vec<RingElem> {
        self.pad(upoly::rem(self.ring.as_ref(), &[self.ring.zero(), self.ring.one()], &self.modulus).unwrap())
    }

    fn dim(&self) -> usize {
        self.deg() * self.ring.k()
    }

    fn to_f(&self, a: &[RingElem]) -> Vec<FieldElem> {
        self.ring.expand_vector(a)
    }

    fn from_f(&self, v: &[FieldElem]) -> Vec<RingElem> {
        self.ring.collapse_vector(v)
    }

    /// `Σ c_i x^{q^i}`.
    fn eval_additive(&self, psi: &SkewPoly, x: &[RingElem]) -> Vec<RingElem> {
        let q = self.ring.q();
        let mut acc = self.zero();
        let mut pow = x.to_vec();
        for (i, c) in psi.coeffs().iter().enumerate() {
            if i > 0 {
                pow = self.pow(&pow, q);
            }
            acc = self.add(&acc, &self.mul(&self.constant(c), &pow));
        }
        acc
    }
}

impl Scalars for TruncatedAlgebra {
    type Elem = Vec<RingElem>;

    fn zero(&self) -> Self::Elem {
        vec![self.ring.zero(); self.deg()]
    }

    fn one(&self) -> Self::Elem {
        self.constant(&self.ring.one())
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|c| self.ring.is_zero(c))
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.ring.add(x, y)).collect()
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.ring.sub(x, y)).collect()
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.ring.neg(x)).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let r = self.ring.as_ref();
        let prod = upoly::mul(r, a, b);
        self.pad(upoly::rem(r, &prod, &self.modulus).unwrap())
    }

    /// Inverse by solving `a·x = 1` over the field part.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if *a == self.one() {
            return Some(self.one());
        }
        let f = self.ring.field();
        let n = self.dim();
        let cols: Vec<Vec<FieldElem>> = (0..n)
            .map(|j| {
                let mut e = vec![f.zero(); n];
                e[j] = f.one();
                self.to_f(&self.mul(a, &self.from_f(&e)))
            })
            .collect();
        let m = Matrix::from_columns(&cols, n).ok()?;
        solve(f, &m, &self.to_f(&self.one())).map(|x| self.from_f(&x))
    }
}

/// `B = R[Q]/(g(Q), I)`: the scheme of generators of a subgroup cut out by
/// `g`, presented over the field part `F` of `R`.
#[derive(Debug, Clone)]
pub struct GeneratorScheme {
    ring: Arc<BaseRing>,
    n: usize,
    g: Divisor,
    ambient_dim: usize,
    ideal: Subspace<FieldElem>,
    module: FiniteModule<FieldElem>,
}

impl GeneratorScheme {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn divisor(&self) -> &Divisor {
        &self.g
    }

    /// Dimension of the ambient `R[Q]/(g)` over `F`.
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn ideal(&self) -> &Subspace<FieldElem> {
        &self.ideal
    }

    /// Dimension of `B` over `F = F_{q^m}`.
    pub fn f_dimension(&self) -> usize {
        self.module.dim()
    }

    pub fn fq_dimension(&self) -> usize {
        self.module.dim() * self.ring.field().m()
    }

    /// The `R`-rank when `B` is free.
    pub fn rank(&self) -> Option<usize> {
        self.module.free_rank(self.ring.field())
    }

    pub fn check_free_of_rank(&self, r: usize) -> bool {
        self.module.check_free_of_rank(self.ring.field(), r)
    }
}

/// Checks that `g` is a monic additive divisor of `f_n` with stable kernel.
fn check_subgroup(e: &DrinfeldModule, g: &Divisor, n: usize) -> Result<()> {
    let fnn = Divisor::new(e.torsion_divisor(n))?;
    if !is_subscheme(g, &fnn)? {
        return Err(Error::NotSubscheme);
    }
    if !g.is_additive() {
        return Err(Error::NotAdditive);
    }
    e.try_quotient(g.poly())?;
    Ok(())
}

/// The scheme of `p^{-n}/O`-generators of the subgroup `ker g`.
///
/// The ambient algebra is `R[Q]/(g(Q))`, a quotient of `R[Q]/(f_n(Q))`; the
/// relations force `g(Q) = 0`, so both ambients give the same `B`.
pub fn generator_scheme(e: &DrinfeldModule, g: &Divisor, n: usize) -> Result<GeneratorScheme> {
    let g = Divisor::new(g.poly().with_ring(e.ring())?)?;
    check_subgroup(e, &g, n.max(1))?;
    let ring = e.ring().clone();
    let rr = ring.as_ref();
    let f = rr.field();
    let alg = TruncatedAlgebra { ring: ring.clone(), modulus: g.poly().coeffs().to_vec() };
    let dim = alg.dim();
    let mut seeds: Vec<Vec<FieldElem>> = Vec::new();
    if n == 0 {
        // generators of the zero module: only the zero section
        seeds.push(alg.to_f(&alg.generator()));
    } else {
        let q_gen = alg.generator();
        let mut e_pows = vec![q_gen];
        for _ in 1..n {
            let next = alg.eval_additive(e.e_t(), e_pows.last().unwrap());
            e_pows.push(next);
        }
        let fq = rr.fq_elements();
        let scaled: Vec<Vec<Vec<RingElem>>> =
            e_pows.iter().map(|x| fq.iter().map(|c| alg.mul(&alg.constant(c), x)).collect()).collect();
        let alg_ref = &alg;
        let mut roots = vec![alg.zero()];
        for choices in &scaled {
            roots = roots.iter().flat_map(|x| choices.iter().map(move |y| alg_ref.add(x, y))).collect();
        }
        let prod = product_of_linear(&alg, &roots);
        let g_const: Vec<Vec<RingElem>> = g.poly().coeffs().iter().map(|c| alg.constant(c)).collect();
        for c in upoly::sub(&alg, &prod, &g_const) {
            seeds.push(alg.to_f(&c));
        }
        let top = &scaled[n - 1];
        let divisor = product_of_linear(&alg, top);
        let f1: Vec<Vec<RingElem>> = e.torsion_divisor(1).coeffs().iter().map(|c| alg.constant(c)).collect();
        let rem = upoly::rem(&alg, &f1, &divisor).expect("monic");
        for c in rem {
            seeds.push(alg.to_f(&c));
        }
    }
    let mul_q = FnMap {
        dim,
        f: |v: &[FieldElem]| alg.to_f(&alg.mul(&alg.from_f(v), &alg.generator())),
    };
    let zeta = alg.constant(&rr.zeta());
    let mul_z = FnMap { dim, f: |v: &[FieldElem]| alg.to_f(&alg.mul(&alg.from_f(v), &zeta)) };
    let maps: [&dyn LinearMap<_>; 2] = [&mul_q, &mul_z];
    let ideal = span_closure(f, dim, &seeds, &maps)?;
    // z acting on B = A/I in the coordinates of the non-pivot unit vectors
    let free: Vec<usize> = (0..dim).filter(|c| !ideal.pivots().contains(c)).collect();
    let cols: Vec<Vec<FieldElem>> = free
        .iter()
        .map(|&c| {
            let mut e_c = vec![f.zero(); dim];
            e_c[c] = f.one();
            ideal.quotient_coords(f, &(mul_z.f)(&e_c))
        })
        .collect();
    let zeta_b = Matrix::from_columns(&cols, free.len())?;
    let module = FiniteModule::new(rr.k(), zeta_b)?;
    Ok(GeneratorScheme { ring: ring.clone(), n, g, ambient_dim: dim, ideal, module })
}

fn product_of_linear(alg: &TruncatedAlgebra, roots: &[Vec<RingElem>]) -> Vec<Vec<RingElem>> {
    match roots.len() {
        0 => vec![alg.one()],
        1 => vec![alg.neg(&roots[0]), alg.one()],
        len => {
            let (a, b) = roots.split_at(len / 2);
            upoly::mul(alg, &product_of_linear(alg, a), &product_of_linear(alg, b))
        }
    }
}

/// `ker g` is `p^n`-cyclic: its generator scheme is free of rank `q^{n-1}(q-1)`.
pub fn is_cyclic(e: &DrinfeldModule, g: &Divisor, n: usize) -> Result<bool> {
    if n == 0 {
        return Ok(g.degree() == 1);
    }
    let q = e.ring().q() as usize;
    let expected = q.pow(n as u32 - 1) * (q - 1);
    Ok(generator_scheme(e, g, n)?.check_free_of_rank(expected))
}

/// Exhaustive search for a reduced point `x` of `ker g` over `F_{q^{ms}}`,
/// `s ≤ s_max`, whose multiples `e_a(x)`, `a ∈ F_q[T]/T^n`, cut out `g`.
/// Requires `R` to be a field.
pub fn search_generator(e: &DrinfeldModule, g: &Divisor, n: usize, s_max: usize) -> Result<Option<(usize, RingElem)>> {
    if !e.ring().is_field() {
        return Err(Error::NotAField);
    }
    let psi = g.to_skew()?;
    for s in 1..=s_max {
        let pts = kernel_points_at(&psi, s)?;
        let ext = &pts.extension;
        let e_ext = e.base_change(ext)?;
        let g_ext = g.base_change(ext)?;
        for x in &pts.points {
            let iota = MStructure { shape: MShape(vec![n]), e: e_ext.clone(), gens: vec![x.clone()] };
            if iota.divisor_of(None)? == g_ext {
                return Ok(Some((s, x.clone())));
            }
        }
    }
    Ok(None)
}

/// Output of [`build_cyclic_generator`].
#[derive(Debug, Clone)]
pub struct CyclicGenerator {
    pub extension: RingExtension,
    /// `β_0, …, β_{n-1}`.
    pub betas: Vec<RingElem>,
    /// `ι: ϖ^{-n} ↦ β_{n-1}` over the extension.
    pub structure: MStructure,
    pub divisor: Divisor,
}

/// `α^{[i]} = α σ(α) ⋯ σ^{i-1}(α)` in `R[ϖ]/ϖ^n`, as coefficient vectors.
fn alpha_iterates(ring: &BaseRing, alpha: &[RingElem], count: usize) -> Vec<Vec<RingElem>> {
    let n = alpha.len();
    let mul = |a: &[RingElem], b: &[RingElem]| {
        let mut out = vec![ring.zero(); n];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate().take(n - i) {
                out[i + j] = ring.add(&out[i + j], &ring.mul(x, y));
            }
        }
        out
    };
    let mut one = vec![ring.zero(); n];
    one[0] = ring.one();
    let mut out = vec![one];
    let mut twist = alpha.to_vec();
    for _ in 1..count {
        let next = mul(out.last().unwrap(), &twist);
        out.push(next);
        twist = twist.iter().map(|c| ring.frobenius_q(c)).collect();
    }
    out
}

/// A Drinfeld module `e_T = Σ g_i τ^i` of rank `r` whose torsion shtuka
/// surjects onto `L_α = R[ϖ]/ϖ^n` (φ(1) = α) with `1 ↦ 1`, that is
/// `Σ g_i α^{[i]} = ϖ`. The top coefficient is `top`.
pub fn module_for_line(ring: &Arc<BaseRing>, alpha: &[RingElem], r: usize, top: &RingElem) -> Result<DrinfeldModule> {
    let rr = ring.as_ref();
    let f = rr.field();
    let n = alpha.len();
    if n == 0 || r == 0 {
        return Err(Error::InvalidParameter("need n ≥ 1 and r ≥ 1".into()));
    }
    let iters = alpha_iterates(rr, alpha, r + 1);
    let k = rr.k();
    // unknowns g_0..g_{r-1} over F; equations: coefficients of ϖ^0..ϖ^{n-1}
    let mut target = vec![rr.zero(); n];
    if n > 1 {
        target[1] = rr.one();
    }
    let rhs: Vec<RingElem> = (0..n).map(|j| rr.sub(&target[j], &rr.mul(top, &iters[r][j]))).collect();
    let cols: Vec<Vec<FieldElem>> = (0..r * k)
        .map(|u| {
            let (i, a) = (u / k, u % k);
            let g = rr.zeta_pow(a);
            let img: Vec<RingElem> = (0..n).map(|j| rr.mul(&g, &iters[i][j])).collect();
            rr.expand_vector(&img)
        })
        .collect();
    let m = Matrix::from_columns(&cols, n * k)?;
    let sol = solve(f, &m, &rr.expand_vector(&rhs)).ok_or(Error::NoWitness)?;
    let mut g = rr.collapse_vector(&sol);
    g.push(top.clone());
    DrinfeldModule::new(SkewPoly::new(ring, g))
}

/// Lexicographically least solution of `t^q - a t = c` in `R`, optionally
/// restricted to units.
fn solve_semilinear(ring: &BaseRing, a: &RingElem, c: &RingElem, want_unit: bool) -> Option<RingElem> {
    let fp = *ring.field().prime_field();
    let dim = ring.dim_fp();
    let map = |x: &RingElem| ring.sub(&ring.frobenius_q(x), &ring.mul(a, x));
    let cols: Vec<Vec<u32>> = (0..dim)
        .map(|j| {
            let mut e = vec![0u32; dim];
            e[j] = 1;
            ring.coords(&map(&ring.from_coords(&e).unwrap()))
        })
        .collect();
    let m = Matrix::from_columns(&cols, dim).ok()?;
    if !want_unit {
        let x = solve(&fp, &m, &ring.coords(c))?;
        return ring.from_coords(&x).ok();
    }
    let kernel = crate::algebra::linalg::nullspace(&fp, &m);
    let p = fp.characteristic() as u128;
    let mut best: Option<RingElem> = None;
    for idx in 0..p.pow(kernel.len() as u32) {
        let mut v = vec![0u32; dim];
        let mut t = idx;
        for b in &kernel {
            let coef = (t % p) as u32;
            t /= p;
            for (x, y) in v.iter_mut().zip(b) {
                *x = fp.add(x, &fp.mul(&coef, y));
            }
        }
        let x = ring.from_coords(&v).ok()?;
        if ring.is_unit(&x) && best.as_ref().is_none_or(|b| x < *b) {
            best = Some(x);
        }
    }
    best
}

/// The generator recursion: `β_0^{q-1} = α_0` (or `β_0 = 0` when `α_0 = 0`),
/// `β_j^q − α_0 β_j = α_1 β_{j-1} + … + α_j β_0`, over the least field
/// extension `s ≤ s_max` where every step is solvable. Roots are the
/// lexicographically least unit for `β_0` and the reduced-echelon particular
/// solution afterwards.
pub fn cyclic_recursion(ring: &Arc<BaseRing>, alpha: &[RingElem], s_max: usize) -> Result<(RingExtension, Vec<RingElem>)> {
    let n = alpha.len();
    if n == 0 {
        return Err(Error::InvalidParameter("α must be non-empty".into()));
    }
    'extend: for s in 1..=s_max {
        let ext = ring.extend(s)?;
        let big = ext.target.as_ref();
        let a: Vec<RingElem> = alpha.iter().map(|x| ext.embed(x)).collect();
        let mut betas: Vec<RingElem> = Vec::new();
        let beta0 = if big.is_zero(&a[0]) {
            big.zero()
        } else {
            match solve_semilinear(big, &a[0], &big.zero(), true) {
                Some(b) => b,
                None => continue 'extend,
            }
        };
        betas.push(beta0);
        for j in 1..n {
            let mut c = big.zero();
            for l in 1..=j {
                c = big.add(&c, &big.mul(&a[l], &betas[j - l]));
            }
            match solve_semilinear(big, &a[0], &c, false) {
                Some(b) => betas.push(b),
                None => continue 'extend,
            }
        }
        return Ok((ext, betas));
    }
    Err(Error::ExtensionBoundExceeded { bound: s_max })
}

/// Runs [`cyclic_recursion`] for a line `L_α` that is a quotient of
/// `E|_{D_n}` with `1 ↦ 1` and returns the generator `ι: ϖ^{-n} ↦ β_{n-1}`,
/// verified to satisfy `e_{T^j}(β_{n-1}) = β_{n-1-j}` and the M-structure
/// condition.
pub fn build_cyclic_generator(e: &DrinfeldModule, alpha: &[RingElem], s_max: usize) -> Result<CyclicGenerator> {
    let n = alpha.len();
    let ring = e.ring();
    if n == 0 {
        return Err(Error::InvalidParameter("α must be non-empty".into()));
    }
    let iters = alpha_iterates(ring, alpha, e.rank() + 1);
    let mut image = vec![ring.zero(); n];
    for (i, g) in e.e_t().coeffs().iter().enumerate() {
        for j in 0..n {
            image[j] = ring.add(&image[j], &ring.mul(g, &iters[i][j]));
        }
    }
    let mut varpi = vec![ring.zero(); n];
    if n > 1 {
        varpi[1] = ring.one();
    }
    if image != varpi {
        return Err(Error::InvalidParameter("L_α is not a quotient of E|_{D_n} with 1 ↦ 1".into()));
    }
    let (ext, betas) = cyclic_recursion(ring, alpha, s_max)?;
    let e_ext = e.base_change(&ext)?;
    let x = betas[n - 1].clone();
    for j in 0..n {
        if act_t_pow(&e_ext, j, &x) != betas[n - 1 - j] {
            return Err(Error::Inconsistent(format!("e_(T^{j}) of the generator is not β_{}", n - 1 - j)));
        }
    }
    let structure = MStructure::new(MShape::new(vec![n])?, e_ext, vec![x])?;
    if !is_m_structure(&structure) {
        return Err(Error::Inconsistent("constructed generator is not an M-structure".into()));
    }
    let divisor = structure.divisor_of(None)?;
    Ok(CyclicGenerator { extension: ext, betas, structure, divisor })
}

/// A `Γ₀(p^n)` flag `g_1 | … | g_{r-1} | f_n` of additive divisors with stable
/// kernels, optionally with a generator witness `P_1, …, P_{r-1}` of shape
/// `(n, …, n)` whose first `i` points generate `g_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gamma0Flag {
    e: DrinfeldModule,
    n: usize,
    flag: Vec<Divisor>,
    witness: Option<Vec<RingElem>>,
}

impl Gamma0Flag {
    pub fn new(e: DrinfeldModule, n: usize, flag: Vec<Divisor>, witness: Option<Vec<RingElem>>) -> Result<Self> {
        let r = e.rank();
        if flag.len() + 1 != r {
            return Err(Error::InvalidFlag(format!("rank {r} needs {} divisors", r - 1)));
        }
        let q = e.ring().q() as usize;
        let flag: Vec<Divisor> =
            flag.into_iter().map(|d| Divisor::new(d.poly().with_ring(e.ring())?)).collect::<Result<_>>()?;
        let fnn = Divisor::new(e.torsion_divisor(n))?;
        let mut chain = flag.clone();
        chain.push(fnn);
        for (i, g) in flag.iter().enumerate() {
            if g.degree() != q.pow((n * (i + 1)) as u32) {
                return Err(Error::InvalidFlag(format!("g_{} has degree {}", i + 1, g.degree())));
            }
            if !is_subscheme(g, &chain[i + 1])? {
                return Err(Error::NotDivisible);
            }
            if !g.is_additive() {
                return Err(Error::NotAdditive);
            }
            e.try_quotient(g.poly())?;
        }
        let out = Self { e, n, flag, witness };
        if let Some(w) = &out.witness {
            if w.len() + 1 != r {
                return Err(Error::InvalidFlag("witness needs r - 1 points".into()));
            }
            if n == 0 {
                if !w.iter().all(|x| out.e.ring().is_zero(x)) {
                    return Err(Error::InvalidFlag("level 0 witness must vanish".into()));
                }
                return Ok(out);
            }
            let iota = out.witness_structure()?.unwrap();
            for i in 1..r {
                let cap: Vec<usize> = (0..r - 1).map(|j| if j < i { n } else { 0 }).collect();
                if iota.divisor_of(Some(&cap))? != out.flag[i - 1] {
                    return Err(Error::InvalidFlag(format!("witness does not generate g_{i}")));
                }
            }
        }
        Ok(out)
    }

    /// The flag generated by `P_1, …, P_{r-1}`: `g_i` is the divisor of the
    /// first `i` points at shape `(n, …, n)`.
    pub fn from_witness(e: DrinfeldModule, n: usize, witness: Vec<RingElem>) -> Result<Self> {
        let r = e.rank();
        if witness.len() + 1 != r {
            return Err(Error::InvalidFlag("witness needs r - 1 points".into()));
        }
        if n == 0 {
            let flag = vec![Divisor::zero_section(e.ring()); r - 1];
            return Self::new(e, 0, flag, Some(witness));
        }
        let iota = MStructure::new(MShape::new(vec![n; r - 1])?, e.clone(), witness.clone())?;
        let flag = (1..r)
            .map(|i| {
                let cap: Vec<usize> = (0..r - 1).map(|j| if j < i { n } else { 0 }).collect();
                iota.divisor_of(Some(&cap))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(e, n, flag, Some(witness))
    }

    pub fn module(&self) -> &DrinfeldModule {
        &self.e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.e.rank()
    }

    /// `g_1, …, g_{r-1}`.
    pub fn divisors(&self) -> &[Divisor] {
        &self.flag
    }

    pub fn witness(&self) -> Option<&[RingElem]> {
        self.witness.as_deref()
    }

    /// `g_0 = t, g_1, …, g_{r-1}, g_r = f_n`.
    pub fn full_chain(&self) -> Vec<Divisor> {
        let mut out = vec![Divisor::zero_section(self.e.ring())];
        out.extend(self.flag.iter().cloned());
        out.push(Divisor::new(self.e.torsion_divisor(self.n)).unwrap());
        out
    }

    pub fn witness_structure(&self) -> Result<Option<MStructure>> {
        match &self.witness {
            None => Ok(None),
            Some(w) if self.n == 0 => Ok(Some(MStructure::zero(MShape(Vec::new()), self.e.clone())).filter(|_| w.len() + 1 == self.rank())),
            Some(w) => Ok(Some(MStructure::new(MShape::new(vec![self.n; w.len()])?, self.e.clone(), w.clone())?)),
        }
    }

    /// The isogenies `E_{i-1} → E_i` of the layers, `E_0 = E`.
    pub fn layer_isogenies(&self) -> Result<Vec<Isogeny>> {
        let chain = self.full_chain();
        let mut out = Vec::new();
        let mut cur = self.e.clone();
        let mut prev = chain[0].to_skew()?;
        for g in &chain[1..] {
            let psi = g.to_skew()?;
            let (h, rem) = right_divide(&psi, &prev)?;
            if !rem.is_zero() {
                return Err(Error::NotDivisible);
            }
            let (next, iso) = cur.quotient_by_skew(&h)?;
            out.push(iso);
            cur = next;
            prev = psi;
        }
        Ok(out)
    }

    /// The composite of the layer isogenies equals `e_{T^n}` up to a unit.
    pub fn composite_matches_torsion(&self) -> Result<bool> {
        let mut comp = SkewPoly::one(self.e.ring());
        for iso in self.layer_isogenies()? {
            comp = iso.psi.mul(&comp)?;
        }
        let full = self.e.action_t_pow(self.n);
        let r = self.e.ring();
        let Some(lead) = comp.leading() else { return Ok(false) };
        let u = r.mul(full.leading().unwrap(), &r.inv(lead).ok_or(Error::NonUnitLeadingCoeff)?);
        Ok(comp.scale_left(&u) == full)
    }

    pub fn base_change(&self, ext: &RingExtension) -> Result<Self> {
        Ok(Self {
            e: self.e.base_change(ext)?,
            n: self.n,
            flag: self.flag.iter().map(|d| d.base_change(ext)).collect::<Result<_>>()?,
            witness: self.witness.as_ref().map(|w| w.iter().map(|x| ext.embed(x)).collect()),
        })
    }
}

/// Per-layer outcome of [`check_gamma0`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerVerdict {
    pub layer: usize,
    pub rank: Option<usize>,
    pub expected: usize,
    pub cyclic: bool,
}

/// Pushes each `g_i` through the quotient by `g_{i-1}` and tests the layer
/// for cyclicity.
pub fn gamma0_layers(flag: &Gamma0Flag) -> Result<Vec<LayerVerdict>> {
    let q = flag.e.ring().q() as usize;
    let n = flag.n;
    let expected = if n == 0 { 1 } else { q.pow(n as u32 - 1) * (q - 1) };
    let chain = flag.full_chain();
    let mut out = Vec::new();
    for i in 1..chain.len() {
        if n == 0 {
            out.push(LayerVerdict { layer: i, rank: Some(1), expected, cyclic: true });
            continue;
        }
        let (e_prev, iso) = flag.e.try_quotient(chain[i - 1].poly())?;
        let (h, rem) = right_divide(&chain[i].to_skew()?, &iso.psi)?;
        if !rem.is_zero() {
            return Err(Error::NotDivisible);
        }
        let layer = Divisor::from_skew(&h)?;
        let scheme = generator_scheme(&e_prev, &layer, n)?;
        let rank = scheme.rank();
        out.push(LayerVerdict { layer: i, rank, expected, cyclic: scheme.check_free_of_rank(expected) });
    }
    Ok(out)
}

/// Every layer `H_i/H_{i-1}` is `p^n`-cyclic. The generator-scheme rank is
/// invariant under extending the field part, so no extension is needed and
/// `_s_max` is accepted for interface compatibility.
pub fn check_gamma0(flag: &Gamma0Flag, _s_max: usize) -> Result<bool> {
    Ok(gamma0_layers(flag)?.iter().all(|l| l.cyclic))
}

fn check_vertex(m: &[usize], n: usize, r: usize) -> Result<()> {
    if m.len() + 1 != r {
        return Err(Error::DimensionMismatch { expected: r - 1, found: m.len() });
    }
    if m.windows(2).any(|w| w[0] < w[1]) || m.first().is_some_and(|&x| x > n) {
        return Err(Error::InvalidParameter(format!("need {n} ≥ m_1 ≥ … ≥ m_{} ≥ 0", r - 1)));
    }
    Ok(())
}

/// `H_m = ι(p^{-m_1}/O ⊕ … ⊕ p^{-m_{r-1}}/O)`.
pub fn canonical_submodule(flag: &Gamma0Flag, m: &[usize]) -> Result<Divisor> {
    check_vertex(m, flag.n, flag.rank())?;
    let iota = flag.witness_structure()?.ok_or(Error::NoWitness)?;
    if m.iter().all(|&x| x == 0) {
        return Ok(Divisor::zero_section(flag.e.ring()));
    }
    iota.divisor_of(Some(m))
}

/// `ñ` placed in the entries `τ(1), …, τ(i)` (one-based permutation).
pub fn shifted_index(m: &[usize], n_tilde: usize, tau: &[usize], i: usize) -> Vec<usize> {
    let mut out = m.to_vec();
    for &t in &tau[..i] {
        out[t - 1] += n_tilde;
    }
    out
}

/// The level map `F_{m,ñ,τ}`: the quotient `E_m = E/H_m` with the `Γ₀(p^ñ)`
/// flag of the images of `H_{m + ñ_τ^{(i)}}`.
pub fn level_map(flag: &Gamma0Flag, m: &[usize], n_tilde: usize, tau: &[usize]) -> Result<(DrinfeldModule, Gamma0Flag)> {
    let r = flag.rank();
    let n = flag.n;
    if !validate_subsimplex(m, n_tilde, tau, r, n) {
        return Err(Error::InvalidSubsimplex);
    }
    let h_m = canonical_submodule(flag, m)?;
    let (e_m, iso) = flag.e.try_quotient(h_m.poly())?;
    let mut divisors = Vec::new();
    for i in 1..r {
        let idx = shifted_index(m, n_tilde, tau, i);
        let h = canonical_submodule(flag, &idx)?;
        let (chi, rem) = right_divide(&h.to_skew()?, &iso.psi)?;
        if !rem.is_zero() {
            return Err(Error::NotDivisible);
        }
        divisors.push(Divisor::from_skew(&chi)?);
    }
    let w = flag.witness().ok_or(Error::NoWitness)?;
    let witness: Vec<RingElem> = (0..r - 1)
        .map(|j| {
            let t = tau[j] - 1;
            let point = act_t_pow(&flag.e, n - m[t] - n_tilde, &w[t]);
            iso.psi.eval_additive(&point)
        })
        .collect();
    let out = Gamma0Flag::new(e_m.clone(), n_tilde, divisors, Some(witness))?;
    if !check_gamma0(&out, 0)? {
        return Err(Error::Inconsistent("level map output fails the Γ₀ check".into()));
    }
    Ok((e_m, out))
}

/// The naive flag `M(H_r) ↠ … ↠ M(H_1)` of torsion shtukas of the flag.
pub fn naive_flag_of(flag: &Gamma0Flag) -> Result<NaiveFlag> {
    let chain = flag.full_chain();
    let psis = chain[1..].iter().map(|d| d.to_skew()).collect::<Result<Vec<_>>>()?;
    NaiveFlag::from_kernel_chain(&flag.e, flag.n, &psis)
}

/// At `n = 1` every `Γ₀(p)` flag comes from a naive one.
pub fn parahoric_roundtrip(flag: &Gamma0Flag) -> Result<NaiveFlag> {
    if flag.n != 1 {
        return Err(Error::InvalidParameter("parahoric comparison needs n = 1".into()));
    }
    naive_flag_of(flag)
}

/// Image of `ker h` under the isogeny `ψ`: the right quotient of `h` by `ψ`.
pub fn pushforward(h: &Divisor, psi: &SkewPoly) -> Result<Divisor> {
    let (chi, rem) = right_divide(&h.to_skew()?, psi)?;
    if !rem.is_zero() {
        return Err(Error::NotDivisible);
    }
    Divisor::from_skew(&chi)
}

/// An `O_0/p^n`-basis `P_1, …, P_r` of `E[p^n]` over the splitting field of
/// `f_n`, for `E` over a field with `γ` a unit. Points are chosen greedily in
/// lexicographic order.
pub fn split_torsion_basis(e: &DrinfeldModule, n: usize, s_max: usize) -> Result<(RingExtension, Vec<RingElem>)> {
    if !e.ring().is_field() {
        return Err(Error::NotAField);
    }
    if !e.is_away_from_zero() || n == 0 {
        return Err(Error::InvalidParameter("needs γ a unit and n ≥ 1".into()));
    }
    let tp = e.torsion_points(n, s_max)?;
    let ext = tp.set.extension.clone();
    let e_ext = e.base_change(&ext)?;
    let big = ext.target.as_ref();
    let mut basis: Vec<RingElem> = Vec::new();
    let mut socle: Vec<RingElem> = Vec::new();
    for x in tp.points() {
        let bottom = act_t_pow(&e_ext, n - 1, x);
        if fq_span_multiset(big, &socle).contains(&bottom) {
            continue;
        }
        socle.push(bottom);
        basis.push(x.clone());
        if basis.len() == e.rank() {
            return Ok((ext, basis));
        }
    }
    Err(Error::Inconsistent("torsion is not free over O_0/p^n".into()))
}

/// `e_a` on a ring element for `a ∈ F_q[T]` given by coefficients.
pub fn act_on_point(e: &DrinfeldModule, a: &[RingElem], x: &RingElem) -> RingElem {
    act(e, a, x)
}

/// `e_{T^j}(x)`.
pub fn act_t_pow_on_point(e: &DrinfeldModule, j: usize, x: &RingElem) -> RingElem {
    act_t_pow(e, j, x)
}
