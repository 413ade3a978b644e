//! Randomized invariants. Every suite runs from a fixed seed.

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use num_rational::BigRational;
use qwalk::constructions::{oriented_to_hermitian, OrientedGraph};
use qwalk::family::FamilySpec;
use qwalk::linalg::{spectral_decomposition, transition_matrix, ComplexMatrix, HermitianMatrix, C64};
use qwalk::number::{
    charpoly_mod2, rat, relation_lattice, square_free_part, Surd,
};
use qwalk::transfer::{
    align_exact_spectrum, certify_pgst, certify_pst, check_periodicity, strong_cospectrality,
    TransferConfig, VerdictKind,
};

fn config(cases: u32, seed: u64) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

prop_compose! {
    fn hermitian(max_n: usize)(n in 1..=max_n)
        (diag in prop::collection::vec(-3.0..3.0f64, n),
         off in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n * (n - 1) / 2),
         n in Just(n)) -> HermitianMatrix {
        let mut m = ComplexMatrix::zeros(n);
        let mut k = 0;
        for a in 0..n {
            m[(a, a)] = C64::new(diag[a], 0.0);
            for b in a + 1..n {
                let z = C64::new(off[k].0, off[k].1);
                m[(a, b)] = z;
                m[(b, a)] = z.conj();
                k += 1;
            }
        }
        HermitianMatrix::new(m).unwrap()
    }
}

prop_compose! {
    /// Each pair gets an arc one way, the other way, or none.
    fn oriented(max_n: usize)(n in 2..=max_n)
        (dirs in prop::collection::vec(0..3u8, n * (n - 1) / 2), n in Just(n)) -> HermitianMatrix {
        let mut arcs = Vec::new();
        let mut k = 0;
        for a in 0..n {
            for b in a + 1..n {
                match dirs[k] {
                    0 => arcs.push((a, b)),
                    1 => arcs.push((b, a)),
                    _ => {}
                }
                k += 1;
            }
        }
        oriented_to_hermitian(&OrientedGraph::new(n, arcs).unwrap())
    }
}

prop_compose! {
    fn surd()(r in -20i64..=20, den in 1i64..=6,
              terms in prop::collection::vec((prop::sample::select(vec![2u64, 3, 5, 6, 12, 18]), -6i64..=6, 1i64..=4), 0..4))
              -> Surd {
        terms.into_iter().fold(Surd::ratio(r, den), |acc, (d, p, q)| &acc + &Surd::sqrt_scaled(rat(p, q), d))
    }
}

fn max_defect(dec: &qwalk::linalg::SpectralDecomposition, h: &HermitianMatrix) -> (f64, f64) {
    (dec.projector_defect(), dec.reconstruct().max_abs_diff(h.matrix()))
}

proptest! {
    #![proptest_config(config(96, 11))]

    #[test]
    fn projectors_resolve_the_identity(h in hermitian(7)) {
        let dec = spectral_decomposition(&h, 1e-8).unwrap();
        let (proj, recon) = max_defect(&dec, &h);
        prop_assert!(proj <= 1e-9, "projector defect {proj}");
        prop_assert!(recon <= 1e-8, "reconstruction defect {recon}");
        for e in dec.projectors() {
            prop_assert!(e.hermitian_defect() <= 1e-9);
        }
    }

    #[test]
    fn walks_are_unitary_groups(h in hermitian(6), t in -10.0..10.0f64, s in -10.0..10.0f64) {
        let dec = spectral_decomposition(&h, 1e-8).unwrap();
        let n = h.dim();
        let ut = transition_matrix(&dec, t);
        let us = transition_matrix(&dec, s);
        prop_assert!(ut.matmul(&ut.adjoint()).max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-9);
        prop_assert!(transition_matrix(&dec, t + s).max_abs_diff(&ut.matmul(&us)) <= 1e-9);
        prop_assert!(transition_matrix(&dec, -t).max_abs_diff(&ut.adjoint()) <= 1e-9);
        prop_assert!(transition_matrix(&dec, 0.0).max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(config(128, 12))]

    #[test]
    fn oriented_trace_identity_and_symmetry(h in oriented(9)) {
        let n = h.dim();
        let s = spectral_decomposition(&h, 1e-8).unwrap().eigenvalue_multiset();
        let lhs: f64 = s.iter().flat_map(|a| s.iter().map(move |b| (a - b) * (a - b))).sum();
        let edges = (0..n).flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| a < b && h.matrix()[(a, b)].norm() > 0.5)
            .count();
        // 2n·Tr(H²) = 4n·edges
        let rhs = 4.0 * (n * edges) as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0), "{lhs} vs {rhs}");
        for r in 0..n {
            prop_assert!((s[r] + s[n - 1 - r]).abs() <= 1e-8);
        }
        // iH is real skew-symmetric
        for a in 0..n {
            for b in 0..n {
                let x = C64::new(0.0, 1.0) * h.matrix()[(a, b)];
                prop_assert!(x.im.abs() < 1e-15);
                prop_assert!((x.re + (C64::new(0.0, 1.0) * h.matrix()[(b, a)]).re).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn surds_track_floats(a in surd(), b in surd(), p in -9i64..=9, q in 1i64..=9) {
        let (fa, fb) = (a.to_f64(), b.to_f64());
        prop_assert!(((&a + &b).to_f64() - (fa + fb)).abs() <= 1e-10);
        prop_assert!(((&a - &b).to_f64() - (fa - fb)).abs() <= 1e-10);
        prop_assert!((a.scale(&rat(p, q)).to_f64() - fa * p as f64 / q as f64).abs() <= 1e-10);
        prop_assert_eq!((&a - &b).is_zero(), (fa - fb).abs() < 1e-12);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn square_free_is_invariant_under_squares(n in 1u64..100_000, k in 1u64..300) {
        let (s, r) = square_free_part(n);
        prop_assert_eq!(s * r * r, n);
        let (s2, r2) = square_free_part(n * k * k);
        prop_assert_eq!(s2, s);
        prop_assert_eq!(r2, r * k);
    }

    #[test]
    fn charpoly_mod2_multiplies_over_blocks(
        a in prop::collection::vec(any::<bool>(), 10),
        b in prop::collection::vec(any::<bool>(), 6),
    ) {
        fn sym(bits: &[bool], n: usize) -> Vec<Vec<i64>> {
            let mut m = vec![vec![0; n]; n];
            let mut k = 0;
            for x in 0..n {
                for y in x + 1..n {
                    m[x][y] = bits[k] as i64;
                    m[y][x] = bits[k] as i64;
                    k += 1;
                }
            }
            m
        }
        let (ma, mb) = (sym(&a, 5), sym(&b, 4));
        let mut block = vec![vec![0; 9]; 9];
        for x in 0..5 {
            for y in 0..5 {
                block[x][y] = ma[x][y];
            }
        }
        for x in 0..4 {
            for y in 0..4 {
                block[5 + x][5 + y] = mb[x][y];
            }
        }
        prop_assert_eq!(charpoly_mod2(&block), charpoly_mod2(&ma).mul(&charpoly_mod2(&mb)));
    }
}

proptest! {
    #![proptest_config(config(48, 13))]

    /// Brute force over `‖l‖∞ ≤ 10` finds no relation outside the lattice.
    #[test]
    fn relation_lattice_is_complete(
        coords in prop::collection::vec(prop::collection::vec(-5i64..=5, 3), 1..=4),
    ) {
        let basis = [Surd::integer(1), Surd::sqrt(3), Surd::pi()];
        let values: Vec<Surd> = coords.iter().map(|row| {
            row.iter().zip(&basis).fold(Surd::zero(), |acc, (&k, b)| &acc + &b.scale(&rat(k, 1)))
        }).collect();
        let d = values.len();
        let lattice = relation_lattice(&values);
        let is_rel = |l: &[i64]| (0..3).all(|b| (0..d).map(|r| l[r] * coords[r][b]).sum::<i64>() == 0);
        for g in lattice.generators() {
            prop_assert!(is_rel(g));
        }
        let mut l = vec![-10i64; d];
        'outer: loop {
            if is_rel(&l) {
                prop_assert!(lattice.contains(&l), "{l:?} missing");
            }
            let mut i = d;
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                if l[i] < 10 {
                    l[i] += 1;
                    break;
                }
                l[i] = -10;
            }
        }
    }

    /// Supports in `Z√Δ` are periodic, with return at `2π/√Δ`.
    #[test]
    fn root_lattice_spectra_are_periodic(
        h in hermitian(5),
        ks in prop::collection::vec(-4i64..=4, 5),
        delta in prop::sample::select(vec![1u64, 2, 3, 5, 7]),
        a in 0usize..5,
    ) {
        let base = spectral_decomposition(&h, 1e-8).unwrap();
        let n = h.dim();
        let mut m = ComplexMatrix::zeros(n);
        for (e, k) in base.projectors().iter().zip(&ks) {
            m.add_scaled(C64::new(*k as f64 * (delta as f64).sqrt(), 0.0), e);
        }
        let hm = HermitianMatrix::with_tolerance(m, 1e-9).unwrap();
        let dec = spectral_decomposition(&hm, 1e-8).unwrap();
        let exact: Vec<Surd> = dec.eigenvalues().iter()
            .map(|x| Surd::sqrt_scaled(rat((x / (delta as f64).sqrt()).round() as i64, 1), delta))
            .collect();
        prop_assert!(align_exact_spectrum(&dec, &exact, 1e-7).is_ok());
        prop_assert!(check_periodicity(&exact).periodic);
        let a = a % n;
        let t = std::f64::consts::TAU / (delta as f64).sqrt();
        prop_assert!(dec.amplitude(a, a, t).norm() >= 1.0 - 1e-6);
    }

    #[test]
    fn pgst_verdicts_are_symmetric(
        values in prop::collection::vec(surd(), 2..=5),
        turns in prop::collection::vec((0i64..12, 1i64..=12), 5),
    ) {
        let d = values.len();
        let fwd: Vec<BigRational> = turns[..d].iter().map(|&(p, q)| rat(p, q)).collect();
        let back: Vec<BigRational> = fwd.iter().map(|u| -u).collect();
        let v1 = certify_pgst(&values, &fwd);
        let v2 = certify_pgst(&values, &back);
        prop_assert_eq!(v1.kind, v2.kind);
        if v1.is(VerdictKind::PgstCertified) {
            let parse = |v: &qwalk::transfer::TransferVerdict| {
                qwalk::number::surd::parse_rational(v.witness.as_ref().unwrap().delta_turns.as_ref().unwrap()).unwrap()
            };
            prop_assert!((parse(&v1) + parse(&v2)).is_integer());
        }
    }

    #[test]
    fn rational_spectra_with_trivial_quarrels_certify(
        vals in prop::collection::vec((-20i64..=20, 1i64..=5), 1..=6),
        common in (0i64..7, 1i64..=7),
    ) {
        let values: Vec<Surd> = vals.iter().map(|&(p, q)| Surd::ratio(p, q)).collect();
        let zero = vec![rat(0, 1); values.len()];
        prop_assert!(certify_pgst(&values, &zero).is(VerdictKind::PgstCertified));
        let u = rat(common.0, common.1);
        let same = vec![u.clone(); values.len()];
        let v = certify_pgst(&values, &same);
        prop_assert!(v.is(VerdictKind::PgstCertified));
        let delta = qwalk::number::surd::parse_rational(v.witness.unwrap().delta_turns.as_ref().unwrap()).unwrap();
        prop_assert!((delta + u).is_integer());
    }
}

/// PST implies strong cospectrality, and the phase rebuilds the column of
/// `U(τ)`.
#[test]
fn certified_pst_rebuilds_the_transition_column() {
    let cfg = TransferConfig::default();
    for name in ["oriented-k3", "c4-tensor:0", "hypercube:0", "upst-circulant", "upst-circulant:5"] {
        let fam = name.parse::<FamilySpec>().unwrap().build().unwrap();
        let dec = spectral_decomposition(&fam.matrix, 1e-8).unwrap();
        let exact = align_exact_spectrum(&dec, fam.exact.as_ref().unwrap(), 1e-7).unwrap();
        let n = fam.matrix.dim();
        let mut certified = 0;
        for a in 0..n {
            for b in (0..n).filter(|&b| b != a) {
                let Ok(q) = strong_cospectrality(&dec, a, b, &cfg) else {
                    continue;
                };
                let v = certify_pst(&dec, &q, Some(&exact), &cfg).unwrap();
                if !v.is(VerdictKind::PstCertified) {
                    continue;
                }
                certified += 1;
                let tau = v.time.unwrap();
                let alpha = v.phase.unwrap().to_complex();
                let u = transition_matrix(&dec, tau);
                for i in 0..n {
                    let want = if i == b { alpha } else { C64::new(0.0, 0.0) };
                    assert!((u[(i, a)] - want).norm() <= 1e-7, "{name} {a}->{b} row {i}");
                }
            }
        }
        assert!(certified > 0, "{name}");
    }
}
