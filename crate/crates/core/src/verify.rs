//! The reproduction battery: nine criteria covering the constructions,
//! certification paths and search results, each with its tolerances and a
//! runtime budget. Shared by the acceptance tests and `qwalk verify-paper`.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constructions::{
    c4_signed_shift, c4_tensor_construction, c4_tensor_spectrum, hypercube_spectrum,
    one_way_family_4, one_way_family_8, oriented_hypercube, oriented_k3, oriented_to_hermitian,
    predicted_reconstruction, rooted_looped_path_product, rooted_star_product, star_exact_spectrum,
    upst_circulant, OrientedGraph,
};
use crate::linalg::{
    kron, spectral_decomposition, transition_matrix, ComplexMatrix, HermitianMatrix,
    SpectralDecomposition, C64, DEFAULT_CLUSTER_TOL,
};
use crate::number::{rat, relation_lattice, Surd};
use crate::star::{classify_star_m, star_support_surds};
use crate::transfer::{
    align_exact_spectrum, certify_pgst, certify_pgst_looped_path, certify_pst, check_periodicity,
    eigenvalue_support, fidelity_peak, reduce_turns, strong_cospectrality, TransferConfig,
    VerdictKind,
};
use crate::upst::{
    admissible_degrees, charpoly_rule_out, exhaustive_rule_out, regular_graphs, search_upst,
    spectrum_candidates, NamedGraph, UpstVerdict,
};

pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

/// One check inside a criterion.
#[derive(Clone, Debug)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    /// Evidence-only lines are printed but never fail the criterion.
    pub reported_only: bool,
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub seconds: f64,
    pub time_limit: Option<f64>,
}

impl CriterionReport {
    pub fn within_time(&self) -> bool {
        self.time_limit.is_none_or(|l| self.seconds < l)
    }

    pub fn passed(&self) -> bool {
        self.within_time() && self.checks.iter().all(|c| c.reported_only || c.passed)
    }

    /// `criterion N: PASS|FAIL  title  (elapsed / budget)`
    pub fn line(&self) -> String {
        let limit = self
            .time_limit
            .map(|l| format!(" / {l} s"))
            .unwrap_or_default();
        format!(
            "criterion {}: {}  {}  ({:.2} s{})",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.seconds,
            limit
        )
    }

    /// The summary line followed by one indented line per check.
    pub fn details(&self) -> String {
        let mut out = self.line();
        for c in &self.checks {
            let tag = match (c.reported_only, c.passed) {
                (true, _) => "info",
                (false, true) => "ok",
                (false, false) => "FAILED",
            };
            out.push_str(&format!("\n    [{tag}] {}", c.label));
        }
        if !self.within_time() {
            out.push_str("\n    [FAILED] runtime budget exceeded");
        }
        out
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn check(&mut self, passed: bool, label: impl Into<String>) -> bool {
        self.0.push(Check {
            label: label.into(),
            passed,
            reported_only: false,
        });
        passed
    }

    fn report(&mut self, label: impl Into<String>) {
        self.0.push(Check {
            label: label.into(),
            passed: true,
            reported_only: true,
        });
    }

    fn error(&mut self, what: &str, e: impl std::fmt::Display) {
        self.check(false, format!("{what}: {e}"));
    }
}

fn decompose(h: &HermitianMatrix) -> SpectralDecomposition {
    spectral_decomposition(h, DEFAULT_CLUSTER_TOL).expect("eigensolver on a finite Hermitian matrix")
}

fn k3_exact() -> Vec<Surd> {
    vec![-Surd::sqrt(3), Surd::zero(), Surd::sqrt(3)]
}

pub fn run(id: u8) -> CriterionReport {
    let start = Instant::now();
    let mut c = Checks::default();
    let (title, limit) = match id {
        1 => (criterion_1(&mut c), Some(1.0)),
        2 => (criterion_2(&mut c), Some(5.0)),
        3 => (criterion_3(&mut c), Some(30.0)),
        4 => (criterion_4(&mut c), Some(5.0)),
        5 => (criterion_5(&mut c), Some(60.0)),
        6 => (criterion_6(&mut c), None),
        7 => (criterion_7(&mut c), Some(10.0)),
        8 => (criterion_8(&mut c), Some(60.0)),
        9 => (criterion_9(&mut c), None),
        _ => panic!("no criterion {id}"),
    };
    CriterionReport {
        id,
        title,
        checks: c.0,
        seconds: start.elapsed().as_secs_f64(),
        time_limit: limit,
    }
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|&id| run(id)).collect()
}

fn criterion_1(c: &mut Checks) -> &'static str {
    let title = "oriented K3 admits universal PST";
    let h = oriented_to_hermitian(&oriented_k3());
    let dec = decompose(&h);
    let cfg = TransferConfig::default();
    let exact = match align_exact_spectrum(&dec, &k3_exact(), cfg.exact_match_tol) {
        Ok(e) => e,
        Err(e) => {
            c.error("exact spectrum", e);
            return title;
        }
    };
    for a in 0..3 {
        for b in (0..3).filter(|&b| b != a) {
            let v = strong_cospectrality(&dec, a, b, &cfg)
                .map_err(|e| e.to_string())
                .and_then(|q| certify_pst(&dec, &q, Some(&exact), &cfg).map_err(|e| e.to_string()));
            match v {
                Ok(v) => {
                    let f = v.fidelity.unwrap_or(0.0);
                    c.check(
                        v.is(VerdictKind::PstCertified) && f >= 1.0 - 1e-8,
                        format!(
                            "{a} -> {b}: {:?} at τ = {:.10}, fidelity {f:.12}",
                            v.kind,
                            v.time.unwrap_or(f64::NAN)
                        ),
                    );
                }
                Err(e) => c.error(&format!("{a} -> {b}"), e),
            }
        }
    }
    let t = TAU / (3.0 * 3f64.sqrt());
    c.check(
        (dec.amplitude(1, 0, t).norm() - 1.0).abs() <= 1e-8,
        format!("|U(2π/(3√3))_{{1,0}}| = {:.12}", dec.amplitude(1, 0, t).norm()),
    );
    title
}

fn criterion_2(c: &mut Checks) -> &'static str {
    let title = "C4-tensor family: PST inside every 4-block at π/4, π/2, 3π/4";
    let cfg = TransferConfig::default();
    for m in [0u32, 1] {
        let name = if m == 0 { "oriented K2" } else { "oriented 3-cube" };
        let hx = oriented_to_hermitian(&oriented_hypercube(m).expect("small cube"));
        let hy = match c4_tensor_construction(&hx) {
            Ok(h) => h,
            Err(e) => {
                c.error(name, e);
                continue;
            }
        };
        let dec = decompose(&hy);
        let blocks = hx.dim();
        let shift = kron(&ComplexMatrix::identity(blocks), &c4_signed_shift()).expect("small");
        let u = transition_matrix(&dec, PI / 4.0);
        let defect = u.max_abs_diff(&shift);
        c.check(
            defect <= 1e-9,
            format!("{name}: ‖e^{{-i(π/4)H_Y}} - I⊗S‖_max = {defect:.2e}"),
        );
        let mut worst = f64::INFINITY;
        for (k, target) in [(1.0, 3), (2.0, 2), (3.0, 1)] {
            let u = transition_matrix(&dec, k * PI / 4.0);
            for h in 0..blocks {
                worst = worst.min(u[(4 * h + target, 4 * h)].norm());
            }
        }
        c.check(
            worst >= 1.0 - 1e-8,
            format!("{name}: min fidelity over {blocks} blocks and 3 times = {worst:.12}"),
        );
        // the exact engine finds the same first time
        let exact = align_exact_spectrum(&dec, &c4_tensor_spectrum(&hypercube_spectrum(m)), 1e-7);
        let v = exact.map_err(|e| e.to_string()).and_then(|ex| {
            let q = strong_cospectrality(&dec, 0, 3, &cfg).map_err(|e| e.to_string())?;
            certify_pst(&dec, &q, Some(&ex), &cfg).map_err(|e| e.to_string())
        });
        match v {
            Ok(v) => {
                let t = v.time.unwrap_or(f64::NAN);
                c.check(
                    v.is(VerdictKind::PstCertified) && (t - PI / 4.0).abs() <= 1e-9,
                    format!("{name}: exact certificate 0 -> 3 at τ = {t:.12} (π/4 = {:.12})", PI / 4.0),
                );
            }
            Err(e) => c.error(name, e),
        }
    }
    title
}

fn criterion_3(c: &mut Checks) -> &'static str {
    let title = "one-way PST for λ = √2 with only pretty good transfer back";
    let lambda = Surd::sqrt(2);
    let fam = match one_way_family_4(&lambda) {
        Ok(f) => f,
        Err(e) => {
            c.error("construction", e);
            return title;
        }
    };
    c.check(fam.defect <= 1e-10, format!("P·D·P⁻¹ vs closed form: {:.2e}", fam.defect));
    let dec = decompose(&fam.matrix);
    // the displayed matrix sends vertex 0 to vertex 2
    let amp = dec.amplitude(2, 0, 1.0);
    let phase = amp / amp.norm();
    c.check(
        amp.norm() >= 1.0 - 1e-10,
        format!("|U(1)_{{2,0}}| = {:.14}", amp.norm()),
    );
    c.check(
        (phase - C64::new(1.0, 0.0)).norm() <= 1e-8,
        format!("phase = {:.12} {:+.12}i", phase.re, phase.im),
    );
    let back = dec.amplitude(0, 2, 1.0).norm();
    c.check(back < 1.0 - 1e-8, format!("reverse |U(1)_{{0,2}}| = {back:.12}"));
    let per = check_periodicity(&fam.spectrum);
    let witness_ok = per.witness.as_ref().is_some_and(|w| {
        w.numerator_value == lambda && w.denominator_value == Surd::pi()
    });
    let witness = per
        .witness
        .as_ref()
        .map(|w| format!("({}) / ({})", w.numerator_value, w.denominator_value))
        .unwrap_or_default();
    c.check(
        !per.periodic && witness_ok,
        format!("{{0, π, λ, λ+π}} not periodic, witness {witness}"),
    );
    let sweep = fidelity_peak(&dec, 2, 0, 5000.0, 1_000_001);
    c.check(
        sweep.best_fidelity >= 0.99,
        format!(
            "sweep 2 -> 0 over [0, 5000]: max {:.6} at t = {:.6}",
            sweep.best_fidelity, sweep.best_time
        ),
    );
    title
}

fn criterion_4(c: &mut Checks) -> &'static str {
    let title = "eight-vertex example: PST 0 -> 1, 2, 3 at t = 1, 2, 3 without periodicity";
    let fam = match one_way_family_8(&Surd::sqrt(2)) {
        Ok(f) => f,
        Err(e) => {
            c.error("construction", e);
            return title;
        }
    };
    let dec = decompose(&fam.matrix);
    for (t, b) in [(1.0, 1), (2.0, 2), (3.0, 3)] {
        let f = dec.amplitude(b, 0, t).norm();
        c.check(f >= 1.0 - 1e-8, format!("|U({t})_{{{b},0}}| = {f:.12}"));
    }
    let exact = match align_exact_spectrum(&dec, &fam.spectrum, 1e-7) {
        Ok(e) => e,
        Err(e) => {
            c.error("exact spectrum", e);
            return title;
        }
    };
    let mut full = 0;
    let mut aperiodic = 0;
    for v in 0..8 {
        let sup = eigenvalue_support(&dec, v, 1e-9).expect("vertex in range");
        if sup.indices.len() == 8 {
            full += 1;
        }
        let vals: Vec<Surd> = sup.indices.iter().map(|&r| exact[r].clone()).collect();
        if !check_periodicity(&vals).periodic {
            aperiodic += 1;
        }
    }
    c.check(full == 8, format!("{full}/8 vertices have full eigenvalue support"));
    c.check(aperiodic == 8, format!("ratio condition fails at {aperiodic}/8 vertices"));
    title
}

fn criterion_5(c: &mut Checks) -> &'static str {
    let title = "no oriented graph beyond K2 and K3 admits universal PST";
    for (n, want) in [(4usize, 80usize), (5, 1056)] {
        match exhaustive_rule_out(n) {
            Ok(reports) => {
                let survivors = reports.iter().filter(|r| r.verdict == UpstVerdict::Survives).count();
                c.check(
                    reports.len() == want && survivors == 0,
                    format!("n = {n}: {} orientations, {survivors} survivors", reports.len()),
                );
            }
            Err(e) => c.error(&format!("n = {n}"), e),
        }
    }
    let mut rows = Vec::new();
    for n in 6..=11 {
        for k in admissible_degrees(n) {
            let cands = spectrum_candidates(n, k);
            if !cands.is_empty() {
                rows.push((n, k, cands));
            }
        }
    }
    let expected: Vec<(usize, usize, Vec<i64>, NamedGraph)> = vec![
        (7, 4, (-3..=3).collect(), NamedGraph::complement_of_cycles(&[7])),
        (7, 6, vec![-4, -2, -1, 0, 1, 2, 4], NamedGraph::complete(7)),
        (11, 10, (-5..=5).collect(), NamedGraph::complete(11)),
    ];
    let found: Vec<(usize, usize, Vec<Vec<i64>>)> = rows.clone();
    let table_ok = found.len() == expected.len()
        && found
            .iter()
            .zip(&expected)
            .all(|((n, k, cs), (en, ek, es, _))| n == en && k == ek && cs == &vec![es.clone()]);
    let shown: Vec<String> = found
        .iter()
        .map(|(n, k, cs)| format!("({n}, {k}): {cs:?}"))
        .collect();
    c.check(table_ok, format!("trace-equation table for 6 ≤ n ≤ 11: {}", shown.join(", ")));
    for (n, k, spec, g) in &expected {
        c.check(
            charpoly_rule_out(g, spec),
            format!("({n}, {k}, {}): mod-2 characteristic polynomial rules out {spec:?}", g.name),
        );
    }
    // other 4-regular graphs on seven vertices are not in the table
    for g in regular_graphs(7, 4) {
        if g.name != "complement(C7)" {
            c.report(format!(
                "{} (also 4-regular on 7 vertices): mod-2 test {}",
                g.name,
                if charpoly_rule_out(&g, &expected[0].2) {
                    "rules it out"
                } else {
                    "is inconclusive; handled by orientation enumeration below"
                }
            ));
        }
    }
    let mut open = Vec::new();
    for n in 4..=12 {
        match search_upst(n) {
            Ok(reports) => open.extend(
                reports
                    .into_iter()
                    .filter(|r| r.verdict == UpstVerdict::Survives)
                    .map(|r| format!("n = {n} {}", r.underlying)),
            ),
            Err(e) => open.push(format!("n = {n}: {e}")),
        }
    }
    c.check(
        open.is_empty(),
        format!("full case analysis for 4 ≤ n ≤ 12 leaves {} cases open {open:?}", open.len()),
    );
    title
}

fn sorted_multiset(parts: &[(f64, usize)]) -> Vec<f64> {
    let mut v: Vec<f64> = parts
        .iter()
        .flat_map(|&(x, k)| std::iter::repeat_n(x, k))
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

fn criterion_6(c: &mut Checks) -> &'static str {
    let title = "star-product spectra and projectors over oriented K3";
    let hx = oriented_to_hermitian(&oriented_k3());
    for m in [1usize, 2, 3, 6, 27] {
        let star = match rooted_star_product(&hx, m) {
            Ok(s) => s,
            Err(e) => {
                c.error(&format!("m = {m}"), e);
                continue;
            }
        };
        let dec = decompose(&star.matrix);
        let predicted: Vec<(f64, usize)> = star
            .predicted
            .iter()
            .map(|p| (p.eigenvalue, p.multiplicity))
            .collect();
        let pred = sorted_multiset(&predicted);
        let got = dec.eigenvalue_multiset();
        let dist = if pred.len() == got.len() {
            pred.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        let zeros = dec
            .eigenvalues()
            .iter()
            .position(|x| x.abs() < 1e-8)
            .map_or(0, |r| dec.multiplicities()[r]);
        let zeros_ok = zeros == (m - 1) * 3;
        let recon = predicted_reconstruction(&star.predicted).max_abs_diff(star.matrix.matrix());
        c.check(
            dist <= 1e-8 && zeros_ok && recon <= 1e-8,
            format!(
                "m = {m}: spectrum distance {dist:.2e}, zero multiplicity {zeros} (want {}), ‖ΣλF - H_Y‖ = {recon:.2e}",
                (m - 1) * 3
            ),
        );
        if let Some(exact) = star_exact_spectrum(&k3_exact(), m) {
            let ok = align_exact_spectrum(&dec, &exact, 1e-8).is_ok();
            c.check(ok, format!("m = {m}: closed-form λ± match the eigensolver"));
        }
    }
    title
}

fn criterion_7(c: &mut Checks) -> &'static str {
    let title = "classification of the triangle with pendant stars";
    let mut disagree = Vec::new();
    for m in 1..=200u64 {
        let sup = star_support_surds(m);
        let generic = certify_pgst(&sup.values, &sup.turns);
        let closed = classify_star_m(m);
        let generic_pgst = match generic.kind {
            VerdictKind::PgstCertified => true,
            VerdictKind::AbsentCertified => false,
            _ => !closed.pgst,
        };
        if generic_pgst != closed.pgst {
            disagree.push(m);
        }
    }
    c.check(
        disagree.is_empty(),
        format!("closed form vs Kronecker engine for 1 ≤ m ≤ 200: disagreements {disagree:?}"),
    );
    for (m, want) in [(1u64, true), (3, false), (6, true), (12, false), (27, true)] {
        let v = classify_star_m(m);
        c.check(
            v.pgst == want,
            format!("m = {m}: case {}, pgst {}", v.case.as_str(), v.pgst),
        );
    }

    // the exact support agrees with the numeric product, for every pair
    let hx = oriented_to_hermitian(&oriented_k3());
    let cfg = TransferConfig::default();
    for m in [1usize, 3, 6] {
        let star = rooted_star_product(&hx, m).expect("small product");
        let dec = decompose(&star.matrix);
        let exact = star_exact_spectrum(&k3_exact(), m)
            .and_then(|e| align_exact_spectrum(&dec, &e, 1e-8).ok());
        let Some(exact) = exact else {
            c.check(false, format!("m = {m}: exact spectrum does not align"));
            continue;
        };
        let sup = star_support_surds(m as u64);
        let mut kinds = Vec::new();
        let mut matches = true;
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            let q = match strong_cospectrality(&dec, star.index(a, 0), star.index(b, 0), &cfg) {
                Ok(q) => q,
                Err(e) => {
                    c.error(&format!("m = {m} ({a}, {b})"), e);
                    matches = false;
                    continue;
                }
            };
            let vals: Vec<Surd> = q.support().iter().map(|&r| exact[r].clone()).collect();
            let Some(turns) = q.exact_turns() else {
                matches = false;
                continue;
            };
            let mut pairs: Vec<(String, String)> =
                vals.iter().zip(&turns).map(|(v, u)| (v.to_string(), u.to_string())).collect();
            let mut want: Vec<(String, String)> = sup
                .values
                .iter()
                .zip(&sup.turns)
                .map(|(v, u)| (v.to_string(), reduce_turns(u).to_string()))
                .collect();
            pairs.sort();
            want.sort();
            matches &= pairs == want;
            kinds.push(certify_pgst(&vals, &turns).kind);
        }
        let symmetric = kinds.len() == 3 && kinds.iter().all(|k| *k == kinds[0]);
        c.check(
            matches && symmetric,
            format!("m = {m}: numeric support and quarrels of (a,b), (b,c), (c,a) match the closed form, verdicts {kinds:?}"),
        );
    }
    title
}

/// Fidelity evidence over a long window for a few star products; printed by
/// the acceptance run, never asserted.
pub fn star_numeric_corroboration(ms: &[usize], t_max: f64, steps: usize) -> Vec<String> {
    let hx = oriented_to_hermitian(&oriented_k3());
    ms.iter()
        .map(|&m| {
            let star = rooted_star_product(&hx, m).expect("small product");
            let dec = decompose(&star.matrix);
            let s = fidelity_peak(&dec, star.index(0, 0), star.index(1, 0), t_max, steps);
            let v = classify_star_m(m as u64);
            let flag = if v.pgst == (s.best_fidelity >= 0.9) {
                "consistent with the 0.9 threshold"
            } else {
                "not consistent with the 0.9 threshold"
            };
            format!(
                "m = {m} (pgst {}): max fidelity {:.6} at t = {:.4} over [0, {t_max}], {flag}",
                v.pgst, s.best_fidelity, s.best_time
            )
        })
        .collect()
}

fn criterion_8(c: &mut Checks) -> &'static str {
    let title = "looped-path product over the n = 3 circulant has multiple PGST";
    let circ = upst_circulant(3, &rat(0, 1), &rat(1, 1), 1, &[0, 0, 0]).expect("valid circulant");
    let gamma = Surd::symbol("gamma", PI);
    let cfg = TransferConfig::default();
    for m in [2usize, 3] {
        let prod = match rooted_looped_path_product(&circ.matrix, m, gamma.to_f64()) {
            Ok(p) => p,
            Err(e) => {
                c.error(&format!("m = {m}"), e);
                continue;
            }
        };
        let dec = decompose(&prod.matrix);
        let n = prod.n;
        let gap = dec.min_gap().unwrap_or(f64::INFINITY);
        c.check(
            dec.num_distinct() == m * n && gap > 1e-8,
            format!("m = {m}: {} distinct eigenvalues of {}, min gap {gap:.3e}", dec.num_distinct(), m * n),
        );
        let residual = prod
            .predicted_eigenpairs()
            .iter()
            .map(|p| {
                let hv = prod.matrix.matrix().matvec(&p.vector);
                hv.iter()
                    .zip(&p.vector)
                    .map(|(x, v)| (x - v * p.eigenvalue).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        c.check(residual <= 1e-8, format!("m = {m}: eigen-equation residual {residual:.2e}"));

        let mut quarrels_ok = true;
        let mut certified = 0;
        let mut pairs = 0;
        for pos in 0..m {
            for a in 0..n {
                for b in (0..n).filter(|&b| b != a) {
                    pairs += 1;
                    let q = match strong_cospectrality(&dec, prod.index(a, pos), prod.index(b, pos), &cfg) {
                        Ok(q) => q,
                        Err(e) => {
                            c.error(&format!("m = {m} level {pos} ({a}, {b})"), e);
                            quarrels_ok = false;
                            continue;
                        }
                    };
                    let mut support = Vec::new();
                    for qr in &q.quarrels {
                        let (j, _) = prod.label(qr.eigenvalue);
                        let want = reduce_turns(&rat((j * (b + n - a)) as i64, n as i64));
                        quarrels_ok &= qr.turns.as_ref() == Some(&want);
                        support.push((j, want));
                    }
                    quarrels_ok &= q.quarrels.len() == m * n;
                    let v = certify_pgst_looped_path(&circ.eigenvalues, &gamma, &support);
                    if v.is(VerdictKind::PgstCertified) {
                        certified += 1;
                    }
                }
            }
        }
        c.check(quarrels_ok, format!("m = {m}: quarrels equal 2πj(b-a)/3 on all {pairs} level pairs"));
        c.check(
            certified == pairs,
            format!("m = {m}: PGST certified on {certified}/{pairs} level pairs (γ tagged transcendental)"),
        );
        for pos in 0..m {
            let s = fidelity_peak(&dec, prod.index(0, pos), prod.index(1, pos), 1e4, 2_000_001);
            c.check(
                s.best_fidelity >= 0.9,
                format!(
                    "m = {m} level {pos}: sweep (x0) -> (x1) over [0, 10⁴] max {:.6} at t = {:.4}",
                    s.best_fidelity, s.best_time
                ),
            );
        }
    }
    title
}

const PROPERTY_SEED: u64 = 0x5eed_2024;
const PROPERTY_CASES: usize = 64;

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for a in 0..n {
        m[(a, a)] = C64::new(rng.gen_range(-3.0..3.0), 0.0);
        for b in a + 1..n {
            let z = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            m[(a, b)] = z;
            m[(b, a)] = z.conj();
        }
    }
    HermitianMatrix::new(m).expect("Hermitian by construction")
}

fn random_oriented(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let mut arcs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            match rng.gen_range(0..3) {
                0 => arcs.push((a, b)),
                1 => arcs.push((b, a)),
                _ => {}
            }
        }
    }
    oriented_to_hermitian(&OrientedGraph::new(n, arcs).expect("simple"))
}

/// A repeated eigenvalue now and then, so clustering is exercised.
fn random_degenerate(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let u = decompose(&random_hermitian(rng, n));
    let mut m = ComplexMatrix::zeros(n);
    for e in u.projectors() {
        let theta = rng.gen_range(-2..=2) as f64;
        m.add_scaled(C64::new(theta, 0.0), e);
    }
    HermitianMatrix::with_tolerance(m, 1e-9).expect("Hermitian by construction")
}

fn criterion_9(c: &mut Checks) -> &'static str {
    let title = "property suites under seeded random inputs";
    let mut rng = ChaCha8Rng::seed_from_u64(PROPERTY_SEED);

    let mut proj = 0.0f64;
    let mut recon = 0.0f64;
    let mut unitary = 0.0f64;
    let mut group = 0.0f64;
    for i in 0..PROPERTY_CASES {
        let n = rng.gen_range(1..=7);
        let h = if i % 4 == 3 {
            random_degenerate(&mut rng, n)
        } else {
            random_hermitian(&mut rng, n)
        };
        let dec = decompose(&h);
        proj = proj.max(dec.projector_defect());
        recon = recon.max(dec.reconstruct().max_abs_diff(h.matrix()));
        let t = rng.gen_range(-10.0..10.0);
        let s = rng.gen_range(-10.0..10.0);
        let ut = transition_matrix(&dec, t);
        let us = transition_matrix(&dec, s);
        unitary = unitary.max(ut.matmul(&ut.adjoint()).max_abs_diff(&ComplexMatrix::identity(n)));
        group = group.max(transition_matrix(&dec, t + s).max_abs_diff(&ut.matmul(&us)));
    }
    c.check(proj <= 1e-9, format!("projector algebra: max defect {proj:.2e}"));
    c.check(recon <= 1e-8, format!("reconstruction Σθ_rE_r = H: max defect {recon:.2e}"));
    c.check(unitary <= 1e-9, format!("unitarity: max ‖UU* - I‖ {unitary:.2e}"));
    c.check(group <= 1e-9, format!("group law U(t+s) = U(t)U(s): max defect {group:.2e}"));

    let mut trace_rel = 0.0f64;
    let mut symmetry = 0.0f64;
    for _ in 0..PROPERTY_CASES {
        let n = rng.gen_range(2..=8);
        let h = random_oriented(&mut rng, n);
        let s = decompose(&h).eigenvalue_multiset();
        let lhs: f64 = s.iter().flat_map(|a| s.iter().map(move |b| (a - b) * (a - b))).sum();
        let tr2 = h.matrix().matmul(h.matrix()).trace().re;
        let rhs = 2.0 * n as f64 * tr2;
        if rhs > 0.0 {
            trace_rel = trace_rel.max((lhs - rhs).abs() / rhs);
        } else {
            trace_rel = trace_rel.max(lhs.abs());
        }
        for r in 0..n {
            symmetry = symmetry.max((s[r] + s[n - 1 - r]).abs());
        }
    }
    c.check(trace_rel <= 1e-9, format!("trace identity Σ(θ_r-θ_s)² = 2n·Tr(H²): max relative defect {trace_rel:.2e}"));
    c.check(symmetry <= 1e-8, format!("oriented spectra symmetric: max |θ_r + θ_(n+1-r)| {symmetry:.2e}"));

    let mut surd_err = 0.0f64;
    for _ in 0..PROPERTY_CASES * 4 {
        let a = random_surd(&mut rng);
        let b = random_surd(&mut rng);
        let q = rat(rng.gen_range(-9..=9), rng.gen_range(1..=9));
        let (fa, fb, fq) = (a.to_f64(), b.to_f64(), q.to_f64().unwrap_or(0.0));
        surd_err = surd_err
            .max(((&a + &b).to_f64() - (fa + fb)).abs())
            .max(((&a - &b).to_f64() - (fa - fb)).abs())
            .max((a.scale(&q).to_f64() - fa * fq).abs());
        if (&a - &b).is_zero() != ((fa - fb).abs() < 1e-12) {
            surd_err = f64::INFINITY;
        }
    }
    c.check(surd_err <= 1e-10, format!("surd arithmetic vs floats: max error {surd_err:.2e}"));

    let mut lattice_failures = 0;
    let cases = 12;
    for _ in 0..cases {
        if !lattice_case(&mut rng) {
            lattice_failures += 1;
        }
    }
    c.check(
        lattice_failures == 0,
        format!("relation lattice vs brute force ‖l‖∞ ≤ 10: {lattice_failures}/{cases} cases differ"),
    );
    title
}

fn random_surd(rng: &mut ChaCha8Rng) -> Surd {
    let mut s = Surd::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=6));
    for d in [2u64, 3, 5, 12] {
        if rng.gen_bool(0.5) {
            s = &s + &Surd::sqrt_scaled(rat(rng.gen_range(-5..=5), rng.gen_range(1..=4)), d);
        }
    }
    s
}

/// `d ≤ 4` values with integer coordinates `≤ 5` over `{1, √2, √3, π}`;
/// brute force over `‖l‖∞ ≤ 10` must agree with lattice membership.
fn lattice_case(rng: &mut ChaCha8Rng) -> bool {
    let d = rng.gen_range(1..=4);
    let basis = [Surd::integer(1), Surd::sqrt(2), Surd::sqrt(3), Surd::pi()];
    let used = rng.gen_range(1..=3);
    let coords: Vec<Vec<i64>> = (0..d)
        .map(|_| (0..used).map(|_| rng.gen_range(-5..=5)).collect())
        .collect();
    let values: Vec<Surd> = coords
        .iter()
        .map(|row| {
            row.iter()
                .zip(&basis)
                .fold(Surd::zero(), |acc, (&k, b)| &acc + &b.scale(&rat(k, 1)))
        })
        .collect();
    let lattice = relation_lattice(&values);
    let is_rel = |l: &[i64]| {
        (0..used).all(|b| (0..d).map(|r| l[r] * coords[r][b]).sum::<i64>() == 0)
    };
    if !lattice.generators().iter().all(|g| is_rel(g)) {
        return false;
    }
    let bound = 10i64;
    let mut l = vec![-bound; d];
    // generators are relations, so only completeness is left to check
    loop {
        if is_rel(&l) && !lattice.contains(&l) {
            return false;
        }
        let mut i = d;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if l[i] < bound {
                l[i] += 1;
                break;
            }
            l[i] = -bound;
        }
    }
}
