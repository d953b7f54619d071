//! Acceptance suite: one test per criterion, each printing a pass line.
//! Exact checks use rational arithmetic end to end; the numerical criterion
//! pins its tolerances explicitly.

use std::f64::consts::PI;
use std::path::PathBuf;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sft_core::boundary::{claim_check, geometric_coefficient, GluedProfile};
use sft_core::czindex::{
    conley_zehnder, solve_symplectic_path, spectral_gap, CzConfig, SymmetricLoop,
};
use sft_core::dataset::{parse_gradings, Dataset};
use sft_core::detline::{
    round_trip_scalar, stabilization_ratio, stabilize, stabilize_with, subspace_iso,
    swap_disjoint_check,
};
use sft_core::linalg::{cokernel_basis, Mat};
use sft_core::sign::{Sign, Z2};
use sft_core::signs::Convention;
use sft_core::tuples::{fredholm_index, virtual_dimension, CRTupleShape};
use sft_core::weyl::{Generator, Prefactor};
use sft_core::Rat;

fn data(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(file)
}

fn rat(v: i64) -> Rat {
    <Rat as num_traits::FromPrimitive>::from_i64(v).unwrap()
}

/// The four grading vectors compatible with both records of the worked
/// dataset being rigid.
const ADMISSIBLE: [[i64; 4]; 4] = [[1, 1, 1, 1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1]];

fn worked_dataset(d: [i64; 4]) -> Dataset {
    let gradings: Vec<Z2> = d.iter().map(|&g| Z2::new(g)).collect();
    Dataset::load_with_gradings(&data("egh-figure4.json"), Some(&gradings)).expect("dataset")
}

#[test]
fn criterion_1_worked_example_reproduction() {
    for d in ADMISSIBLE {
        let ds = worked_dataset(d);
        let alg = ds.algebra();
        let h2 = alg.h_square::<Rat>(&ds.curves, Prefactor::None).unwrap();

        // Expected element, assembled from the displayed monomials with the
        // displayed sign exponents, a = 2, b = 3, ab = 6.
        let ab = rat(6);
        let sgn = |e: i64| Sign::from_parity(e).to_scalar::<Rat>();
        let mut expected = alg.monomial::<Rat>(
            &[Generator::q(1), Generator::p(3), Generator::p(2), Generator::p(1)],
            sgn(d[1] + d[1] * d[2] + d[1] * d[3] + d[2] * d[3]) * ab.clone(),
            -1,
            vec![],
        );
        expected = expected.add(&alg.monomial::<Rat>(
            &[Generator::q(0), Generator::p(3), Generator::p(2), Generator::p(0)],
            sgn(d[0] + d[0] * d[1] + d[0] * d[3] + d[2] * d[3]) * ab.clone(),
            -1,
            vec![],
        ));
        expected = expected.add(&alg.monomial::<Rat>(
            &[Generator::p(3), Generator::p(2)],
            sgn(d[2] * d[3]) * ab.clone(),
            0,
            vec![],
        ));
        assert_eq!(h2, expected, "gradings {d:?}");

        // Every coefficient on a multiple of q1 q2 p4 p3 p2 p1 vanishes.
        for key in h2.terms.keys() {
            assert!(
                !(key.q_word == vec![0, 1] && key.p_word == vec![0, 1, 2, 3]),
                "six-generator monomial survived at {d:?}"
            );
        }
    }

    // Displayed values at the two gradings the criterion spells out.
    let check = |d: [i64; 4], expected: [i64; 3]| {
        let ds = worked_dataset(d);
        let alg = ds.algebra();
        let h2 = alg.h_square::<Rat>(&ds.curves, Prefactor::None).unwrap();
        let keys = [
            (vec![1u16], vec![1u16, 2, 3], -1), // q2 p4 p3 p2 h^-1
            (vec![0], vec![0, 2, 3], -1),       // q1 p4 p3 p1 h^-1
            (vec![], vec![2, 3], 0),            // p4 p3
        ];
        for ((q, p, hbar), want) in keys.into_iter().zip(expected) {
            let key = sft_core::weyl::MonomialKey { q_word: q, p_word: p, hbar, homology: vec![] };
            assert_eq!(alg.printed_coefficient(&h2, &key), rat(want), "gradings {d:?}");
        }
    };
    check([1, 1, 1, 1], [6, 6, -6]);
    check([1, 0, 0, 0], [6, -6, 6]);

    println!("ACCEPTANCE 1 (worked example reproduction): PASS");
}

#[test]
fn criterion_2_claim_identity_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_817);
    let mut profiles = 0usize;
    for i in 0..100 {
        let ds = Dataset::random(&mut rng, 5, 6);
        let report = claim_check::<Rat>(&ds, Convention::Ht, false).unwrap();
        assert!(report.ok, "dataset {i} failed the claim identity");
        for entry in &report.entries {
            assert_eq!(entry.algebraic, -entry.geometric.clone(), "dataset {i}");
        }
        profiles += report.entries.len();
    }
    assert!(profiles >= 100, "sweep too vacuous: only {profiles} profiles");
    println!("ACCEPTANCE 2 (claim identity sweep, {profiles} profiles): PASS");
}

#[test]
fn criterion_3_boundary_count_of_displayed_stratum() {
    // The displayed one-dimensional stratum with ends (g2 g3 g4; g2): its
    // boundary count equals (-1)^{d2 + d2 d3 + d2 d4 + d3 d4 + 1} ab for
    // every admissible grading vector.
    for d in ADMISSIBLE {
        let ds = worked_dataset(d);
        let profile = GluedProfile { genus: 0, pos: vec![1, 2, 3], neg: vec![1], homology: vec![] };
        let got: Rat = geometric_coefficient(&ds, &profile, Convention::Ht, false).unwrap();
        let exponent = d[1] + d[1] * d[2] + d[1] * d[3] + d[2] * d[3] + 1;
        assert_eq!(got, Sign::from_parity(exponent).to_scalar::<Rat>() * rat(6), "gradings {d:?}");
    }
    println!("ACCEPTANCE 3 (displayed boundary count): PASS");
}

#[test]
fn criterion_4_determinant_line_lemmas() {
    let mut rng = ChaCha8Rng::seed_from_u64(424_242);
    let random_matrix = |rng: &mut ChaCha8Rng, rows: usize, cols: usize| -> Mat<Rat> {
        Mat::from_rows(
            (0..rows).map(|_| (0..cols).map(|_| rat(rng.gen_range(-3..=3))).collect()).collect(),
        )
        .unwrap()
    };
    let mut swap_checked = 0;
    let mut subspace_checked = 0;
    let mut stab_checked = 0;
    while swap_checked < 200 || subspace_checked < 200 || stab_checked < 200 {
        // Disjoint-union swap law by explicit wedge computation.
        if swap_checked < 200 {
            let (r1, c1) = (rng.gen_range(0..=5), rng.gen_range(0..=5));
            let l = random_matrix(&mut rng, r1, c1);
            let (r2, c2) = (rng.gen_range(0..=5), rng.gen_range(0..=5));
            let l2 = random_matrix(&mut rng, r2, c2);
            assert!(swap_disjoint_check(&l, &l2).unwrap());
            swap_checked += 1;
        }

        // Orientation independence of the target-subspace choice.
        if subspace_checked < 200 {
            let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
            let m = random_matrix(&mut rng, r, c);
            let coker = cokernel_basis(&m);
            let mut picked = Vec::new();
            for _ in 0..60 {
                let count = coker.len() + rng.gen_range(0..=1);
                if count > r {
                    continue;
                }
                let f: Vec<Vec<Rat>> = (0..count)
                    .map(|_| (0..r).map(|_| rat(rng.gen_range(-2..=2))).collect())
                    .collect();
                if subspace_iso(&m, &f).is_ok() {
                    picked.push(f);
                    if picked.len() == 2 {
                        break;
                    }
                }
            }
            if picked.len() == 2 {
                let a = round_trip_scalar(&m, &picked[0]).unwrap();
                let b = round_trip_scalar(&m, &picked[1]).unwrap();
                assert!(a.is_positive() && b.is_positive(), "subspace choice flipped orientation");
                subspace_checked += 1;
            }
        }

        // Stabilization independence of all basis choices.
        if stab_checked < 200 {
            let rows = rng.gen_range(1..=4);
            let cols_phi = rng.gen_range(1..=5);
            let phi = random_matrix(&mut rng, rows, cols_phi);
            let cols_psi = rng.gen_range(1..=4);
            let psi = random_matrix(&mut rng, rows, cols_psi);
            if phi.hcat(&psi).rank() == rows {
                let a = stabilize(&phi, &psi).unwrap();
                let b = stabilize_with(&phi, &psi, &mut rng).unwrap();
                let ratio = stabilization_ratio(&phi, &psi, &b, &a).unwrap();
                assert!(ratio.is_positive(), "stabilization choices flipped orientation");
                stab_checked += 1;
            }
        }
    }
    println!("ACCEPTANCE 4 (determinant-line lemmas, 200 instances each): PASS");
}

#[test]
fn criterion_5_index_formulas() {
    // Trivial tuple: one matched end on each side, any integer index.
    for n in 2..=4u32 {
        for mu in [-4i64, 0, 3, 11] {
            let g = Z2::new(mu + i64::from(n) - 1);
            let t = CRTupleShape::new(vec![g], vec![g], 0, 0, n);
            assert_eq!(fredholm_index(&t, &[mu], &[mu]).unwrap(), 2);
        }
    }
    // Parity identities on random consistent inputs.
    let mut rng = ChaCha8Rng::seed_from_u64(55_555);
    for _ in 0..100 {
        let n = rng.gen_range(2..=5u32);
        let kp = rng.gen_range(0..=3usize);
        let km = rng.gen_range(0..=3usize);
        let mu_pos: Vec<i64> = (0..kp).map(|_| rng.gen_range(-6..=6)).collect();
        let mu_neg: Vec<i64> = (0..km).map(|_| rng.gen_range(-6..=6)).collect();
        let grade = |mu: i64| Z2::new(mu + i64::from(n) - 1);
        let t = CRTupleShape::new(
            mu_pos.iter().map(|&m| grade(m)).collect(),
            mu_neg.iter().map(|&m| grade(m)).collect(),
            rng.gen_range(0..=2),
            rng.gen_range(-3..=3),
            n,
        );
        let ind = fredholm_index(&t, &mu_pos, &mu_neg).unwrap();
        assert_eq!(Z2::new(ind), t.ind_total());
        let vd = virtual_dimension(&t, &mu_pos, &mu_neg).unwrap();
        assert_eq!(Z2::new(vd), t.ind_total());
    }
    println!("ACCEPTANCE 5 (index formulas): PASS");
}

#[test]
fn criterion_6_cz_and_spectral_numerics() {
    let mu_expected = |a: f64| -> i64 {
        if a > 0.0 {
            2 * (a / (2.0 * PI)).floor() as i64 + 1
        } else {
            2 * (a / (2.0 * PI)).ceil() as i64 - 1
        }
    };
    let dist_to_lattice = |a: f64| -> f64 {
        let t = a / (2.0 * PI);
        (t - t.round()).abs() * 2.0 * PI
    };
    let cases = [PI / 2.0, PI, 3.0 * PI / 2.0, 5.0, 3.0 * PI + 0.1, -PI / 2.0];

    let base = CzConfig { steps: 256, modes: 48, ..CzConfig::default() };
    let doubled = CzConfig { steps: 512, modes: 96, ..CzConfig::default() };
    for a in cases {
        let lp: SymmetricLoop<f64> = SymmetricLoop::scalar(2, a).unwrap();

        // Symplecticity of the integrated path at N = 256.
        let path = solve_symplectic_path(&lp, base.steps, base.substeps).unwrap();
        let defect = path.symplecticity_defect();
        assert!(defect < 1e-8, "a = {a}: defect {defect}");

        // Crossing index against the closed form.
        let mu = conley_zehnder(&lp, &base).unwrap();
        assert_eq!(mu, mu_expected(a), "a = {a}");

        // Spectral gap against the lattice-distance oracle.
        let lambda = spectral_gap(&lp, &base).unwrap();
        assert!(
            (lambda - dist_to_lattice(a)).abs() < 1e-6,
            "a = {a}: lambda {lambda} vs {}",
            dist_to_lattice(a)
        );

        // Stability under resolution doubling.
        let mu2 = conley_zehnder(&lp, &doubled).unwrap();
        assert_eq!(mu2, mu, "a = {a}: index moved under refinement");
        let lambda2 = spectral_gap(&lp, &doubled).unwrap();
        assert!((lambda2 - lambda).abs() < 1e-8, "a = {a}: gap moved under refinement");
    }
    println!("ACCEPTANCE 6 (crossing index and spectral gap): PASS");
}

#[test]
fn criterion_7_algebra_laws() {
    use sft_core::tuples::OrbitLabel;
    use sft_core::weyl::WeylAlgebra;

    let orbits = vec![
        OrbitLabel { id: "a".into(), grading: Z2::ONE, mu_cz: None, multiplicity: 1, sort_key: 0 },
        OrbitLabel { id: "b".into(), grading: Z2::ZERO, mu_cz: None, multiplicity: 2, sort_key: 1 },
        OrbitLabel { id: "c".into(), grading: Z2::ONE, mu_cz: None, multiplicity: 3, sort_key: 2 },
    ];
    let alg = WeylAlgebra::new(&orbits, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(777);

    // Associativity.
    for _ in 0..100 {
        let f = alg.random_element::<Rat, _>(&mut rng, 3, 4);
        let g = alg.random_element::<Rat, _>(&mut rng, 3, 4);
        let h = alg.random_element::<Rat, _>(&mut rng, 3, 4);
        assert_eq!(alg.mul(&alg.mul(&f, &g), &h), alg.mul(&f, &alg.mul(&g, &h)));
    }
    // Graded Jacobi identity for an odd hamiltonian.
    for _ in 0..100 {
        let h = alg.random_homogeneous::<Rat, _>(&mut rng, Z2::ONE, 3, 4);
        let parity = if rng.gen_bool(0.5) { Z2::ONE } else { Z2::ZERO };
        let f = alg.random_homogeneous::<Rat, _>(&mut rng, parity, 3, 4);
        let lhs = alg
            .super_commutator(&h, &alg.super_commutator(&h, &f).unwrap())
            .unwrap()
            .scale(&rat(2));
        let rhs = alg.super_commutator(&alg.super_commutator(&h, &h).unwrap(), &f).unwrap();
        assert_eq!(lhs, rhs);
    }
    // Contraction-free squares of odd elements vanish.
    for _ in 0..100 {
        let f = alg.random_homogeneous::<Rat, _>(&mut rng, Z2::ONE, 4, 4);
        assert!(alg.mul_free(&f, &f).is_zero());
    }
    // Normal-ordering confluence under randomized strategies.
    for _ in 0..100 {
        let len = rng.gen_range(0..=8);
        let word: Vec<Generator> = (0..len)
            .map(|_| {
                let orbit = rng.gen_range(0..3);
                if rng.gen_bool(0.5) {
                    Generator::q(orbit)
                } else {
                    Generator::p(orbit)
                }
            })
            .collect();
        let reference = alg.monomial::<Rat>(&word, rat(1), 0, vec![0]);
        for _ in 0..4 {
            let got = alg.monomial_with_strategy::<Rat, _>(&word, rat(1), 0, vec![0], &mut rng);
            assert_eq!(got, reference);
        }
    }
    // Capping sign changes are algebra automorphisms intertwining the
    // commutator differential.
    for _ in 0..100 {
        let eps = [
            if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus },
            if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus },
            if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus },
        ];
        let f = alg.random_element::<Rat, _>(&mut rng, 3, 4);
        let g = alg.random_element::<Rat, _>(&mut rng, 3, 4);
        assert_eq!(
            alg.capping_change(&eps, &alg.mul(&f, &g)),
            alg.mul(&alg.capping_change(&eps, &f), &alg.capping_change(&eps, &g))
        );
        let h = alg.random_homogeneous::<Rat, _>(&mut rng, Z2::ONE, 3, 4);
        let parity = if rng.gen_bool(0.5) { Z2::ONE } else { Z2::ZERO };
        let x = alg.random_homogeneous::<Rat, _>(&mut rng, parity, 3, 4);
        assert_eq!(
            alg.capping_change(&eps, &alg.super_commutator(&h, &x).unwrap()),
            alg.super_commutator(&alg.capping_change(&eps, &h), &alg.capping_change(&eps, &x))
                .unwrap()
        );
    }
    println!("ACCEPTANCE 7 (algebra laws, 100 instances each): PASS");
}

#[test]
fn criterion_8_squared_differential_restriction() {
    let ds = Dataset::load(&data("chain-cancel.json")).unwrap();
    assert!(ds.geometry_consistent, "shipped dataset carries the flag");
    let alg = ds.algebra();

    // The claim identity holds, and for this geometry-consistent dataset the
    // squared generating function vanishes outright.
    let report = claim_check::<Rat>(&ds, Convention::Ht, false).unwrap();
    assert!(report.ok);
    let h2 = alg.h_square::<Rat>(&ds.curves, Prefactor::None).unwrap();
    assert!(h2.is_zero(), "squared generating function: {}", alg.render(&h2));

    // In particular the genus-zero, p-linear sector vanishes.
    let sector: Vec<_> =
        h2.terms.keys().filter(|k| k.hbar == -1 && k.p_word.len() == 1).collect();
    assert!(sector.is_empty());

    // The induced differential on generators squares to zero.
    for r in 0..alg.orbit_count() {
        let d = alg.contact_d::<Rat>(&ds.curves, r, false);
        let dd = alg.contact_d_apply(&ds.curves, &d, false).unwrap();
        assert!(dd.is_zero(), "generator {}", alg.ids[r]);
    }

    // With H·H = 0, the commutator differential squares to zero on random
    // inputs as well.
    let h = alg.hamiltonian::<Rat>(&ds.curves, Prefactor::None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..50 {
        let f = alg.random_element::<Rat, _>(&mut rng, 3, 4);
        let ddf = alg.differential(&h, &alg.differential(&h, &f).unwrap()).unwrap();
        assert!(ddf.is_zero());
    }

    // Sanity: the differential itself is the expected chain.
    let dx = alg.contact_d::<Rat>(&ds.curves, 0, false);
    assert_eq!(dx.terms.len(), 2);

    println!("ACCEPTANCE 8 (squared differential restriction): PASS");
}

/// Grading override sanity shared by criteria 1 and 3: the admissible list is
/// exactly the set of vectors keeping both records rigid.
#[test]
fn admissible_grading_vectors_are_exhaustive() {
    let mut admissible = Vec::new();
    for bits in 0..16u32 {
        let d: Vec<i64> = (0..4).map(|i| i64::from((bits >> i) & 1)).collect();
        let gradings: Vec<Z2> = d.iter().map(|&g| Z2::new(g)).collect();
        if Dataset::load_with_gradings(&data("egh-figure4.json"), Some(&gradings)).is_ok() {
            admissible.push([d[0], d[1], d[2], d[3]]);
        }
    }
    assert_eq!(admissible.len(), 4);
    for d in ADMISSIBLE {
        assert!(admissible.contains(&d));
    }
    // Convenience for the CLI: the same vectors parse through the flag syntax.
    assert!(parse_gradings("1,1,1,1").is_ok());
}
