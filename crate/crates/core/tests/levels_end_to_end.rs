use drinlevel::algebra::{make_ring, Poly, Scalars};
use drinlevel::drinfeld::DrinfeldModule;
use drinlevel::finshtuka::check_naive_flag;
use drinlevel::level::{
    build_cyclic_generator, check_gamma0, generator_scheme, is_cyclic, module_for_line, naive_flag_of,
    search_generator, split_torsion_basis, Divisor, Gamma0Flag,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn carlitz_torsion_is_cyclic_at_every_level() {
    let r = make_ring(2, 1, 1, 1, None).unwrap();
    let e = DrinfeldModule::carlitz(&r, r.one());
    for n in 1..=3 {
        let g = Divisor::new(e.torsion_divisor(n)).unwrap();
        assert!(is_cyclic(&e, &g, n).unwrap(), "n = {n}");
        assert!(search_generator(&e, &g, n, 12).unwrap().is_some(), "n = {n}");
    }
}

#[test]
fn generator_scheme_of_nonreduced_subgroup() {
    // τ² over F_3[z]/(z^2): the kernel of τ is cyclic of level 1
    let r = make_ring(3, 1, 1, 2, None).unwrap();
    let e = DrinfeldModule::new(drinlevel::skewpoly::SkewPoly::new(&r, vec![r.zero(), r.zeta(), r.one()])).unwrap();
    let g = Divisor::new(Poly::monomial(&r, r.one(), 3)).unwrap();
    let b = generator_scheme(&e, &g, 1).unwrap();
    assert_eq!(b.rank(), Some(2));
}

#[test]
fn constructed_generators_give_gamma0_flags() {
    let r = make_ring(2, 1, 1, 1, None).unwrap();
    let alpha = vec![r.zero(), r.one()];
    let e = module_for_line(&r, &alpha, 2, &r.one()).unwrap();
    let out = build_cyclic_generator(&e, &alpha, 8).unwrap();
    let e_ext = out.structure.module().clone();
    let flag = Gamma0Flag::new(e_ext, 2, vec![out.divisor.clone()], None).unwrap();
    assert!(flag.composite_matches_torsion().unwrap());
    assert!(is_cyclic(flag.module(), &out.divisor, 2).unwrap());
    assert!(check_gamma0(&flag, 8).unwrap());
}

#[test]
fn naive_flags_of_split_gamma0_flags() {
    let r = make_ring(3, 1, 1, 1, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let e = DrinfeldModule::random(&r, 2, Some(r.one()), &mut rng);
    for n in 1..=2 {
        let (ext, basis) = split_torsion_basis(&e, n, 24).unwrap();
        let e_ext = e.base_change(&ext).unwrap();
        let flag = Gamma0Flag::from_witness(e_ext, n, basis[..1].to_vec()).unwrap();
        assert!(check_gamma0(&flag, 0).unwrap());
        let naive = naive_flag_of(&flag).unwrap();
        assert!(check_naive_flag(&naive).valid, "n = {n}");
    }
}
