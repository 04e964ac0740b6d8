//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Run with `cargo test -p multiholo-cli --test acceptance --
//! --nocapture` to see the lines.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use multiholo::forms::{
    circle_commutator_definitional, circle_mul, classify_antisym, BilinearForm, SigmaEndo,
};
use multiholo::group::{GroupSpec, MulTable};
use multiholo::linalg::{count_invertible_brute_force, enumerate_gl, gl_order, FpMatrix};
use multiholo::oracle::{build_holomorph, cross_check_correspondence, OracleContext};
use multiholo::tg::{
    build_isomorphism_with, circle_presentation_check, criterion_holds, solve_t_for_a,
    sym_isomorphism, theta_d, CriterionSolution, IsoWitness, ReducedBasis, ResElement,
    VerifyContext,
};
use multiholo::{Error, Sampling};
use multiholo_cli::cmd_analyze;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(p: u64, n: usize, d_rows: &[Vec<i64>]) -> GroupSpec {
    let m = n * (n - 1) / 2;
    let d = if d_rows.is_empty() {
        FpMatrix::zero(p, n, m)
    } else {
        FpMatrix::from_rows(p, d_rows).unwrap()
    };
    GroupSpec::new(p, n, d).unwrap()
}

fn spec_34_full_rank() -> GroupSpec {
    let rows: Vec<Vec<i64>> = (0..4)
        .map(|i| (0..6).map(|j| i64::from(j == i)).collect())
        .collect();
    spec(3, 4, &rows)
}

fn report(criterion: u32, name: &str, detail: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE {criterion} ({name}): PASS — {detail} [{:.2?} of {:.0?} budget]",
        elapsed, budget
    );
    assert!(
        elapsed < budget,
        "criterion {criterion} exceeded its runtime budget: {elapsed:.2?} > {budget:.0?}"
    );
}

/// Criterion 1: exact T(G)-subgroup order at (n, p) = (4, 3).
#[test]
fn criterion_1_order_reproduction() {
    let start = Instant::now();
    // brute-force cross-check of the GL factors for k <= 2
    for k in [1usize, 2] {
        assert_eq!(
            gl_order(k, 3),
            BigUint::from(count_invertible_brute_force(k, 3).unwrap())
        );
    }
    assert_eq!(gl_order(4, 3), BigUint::from(24_261_120u64));
    assert_eq!(gl_order(2, 3), BigUint::from(48u32));

    let sym_expected = BigUint::from(3u32).pow(60).to_string();
    let res_expected =
        (BigUint::from(3u32).pow(8) * 24_261_120u64 * BigUint::from(48u32)).to_string();
    let tg_expected =
        (BigUint::from(3u32).pow(68) * 24_261_120u64 * BigUint::from(48u32)).to_string();

    // any full-rank D must reproduce the same orders
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut specs = vec![spec_34_full_rank()];
    loop {
        let d = FpMatrix::random(3, 4, 6, &mut rng);
        if d.rank() == 4 {
            specs.push(GroupSpec::new(3, 4, d).unwrap());
            break;
        }
    }
    for s in &specs {
        let report = cmd_analyze(s, 5_000).unwrap();
        assert_eq!(report.sym_part_order, sym_expected);
        assert_eq!(report.res_group_order.as_deref(), Some(res_expected.as_str()));
        assert_eq!(report.tg_order.as_deref(), Some(tg_expected.as_str()));
        // GL_4(F_3) cannot be exhausted here, so the claim stays conditional
        assert_eq!(report.tg_order_status.as_deref(), Some("conditional-subgroup"));
        assert!(report.omega1_in_derived);
    }
    report(
        1,
        "T(G) subgroup order reproduction",
        &format!("sym = 3^60, res = 3^8·24261120·48, tg = {tg_expected}"),
        start,
        Duration::from_secs(1),
    );
}

/// Criterion 2: the form/subgroup correspondence on three oracle specs.
#[test]
fn criterion_2_correspondence_oracle() {
    for (label, s) in [
        ("(3,2,D=0)", spec(3, 2, &[])),
        ("(3,2,D=[[1],[0]])", spec(3, 2, &[vec![1], vec![0]])),
        ("(5,2,D=0)", spec(5, 2, &[])),
    ] {
        let start = Instant::now();
        let cross = cross_check_correspondence(&s).unwrap();
        assert!(cross.ok(), "{label}: {:?}", cross.failures);
        assert_eq!(cross.equivariant_forms, cross.valid_subgroups, "{label}");
        // where the holomorph fits the materialization cap, construct it
        // explicitly and recheck normality against the full element list
        let ctx = OracleContext::build(&s, false).unwrap();
        if let Ok(hol) = build_holomorph(&ctx) {
            assert_eq!(hol.order() as u128, s.order_u128().unwrap() * ctx.aut.order() as u128);
            let total = BilinearForm::tensor_count(&s).unwrap();
            for idx in 0..total {
                let form = BilinearForm::from_index(&s, idx);
                let equivariant = ctx
                    .induced_pairs
                    .iter()
                    .all(|(b, beta)| multiholo::forms::equivariant_under(&form, b, beta));
                if !equivariant {
                    continue;
                }
                let sub = multiholo::oracle::subgroup_from_form(&ctx, &form);
                for h in hol.elements() {
                    let h_inv = h.inverse();
                    for n in &sub.perms {
                        let conj = h_inv.compose(n).compose(h);
                        assert!(
                            sub.perms.binary_search(&conj).is_ok(),
                            "{label}: subgroup not normal under a holomorph element"
                        );
                    }
                }
            }
        }
        report(
            2,
            "correspondence oracle",
            &format!(
                "{label}: {} forms, {} equivariant = {} distinct normal regular subgroups",
                cross.forms_scanned, cross.equivariant_forms, cross.valid_subgroups
            ),
            start,
            Duration::from_secs(60),
        );
    }
}

/// Criterion 3: theta_d verifies exhaustively and conjugates rho onto N.
#[test]
fn criterion_3_theta_d() {
    let start = Instant::now();
    let mut witnesses = 0u64;
    for s in [
        spec(3, 2, &[]),
        spec(3, 2, &[vec![1], vec![0]]),
        spec(5, 2, &[]),
    ] {
        let ctx = OracleContext::build(&s, false).unwrap();
        let half = (s.p() - 1) / 2;
        for c in 0..s.p() {
            if c == half {
                // excluded value: 2c + 1 = 0
                assert_eq!(
                    theta_d(&s, c as i64, Sampling::Exhaustive).err(),
                    Some(Error::HalfExcluded)
                );
                continue;
            }
            let w = theta_d(&s, c as i64, Sampling::Exhaustive).unwrap();
            assert!(w.verified && w.exhaustive, "p={} c={c}", s.p());
            let order = s.order_u128().unwrap() as u64;
            assert_eq!(w.pairs_checked, order * order);
            assert!(
                multiholo::oracle::conjugation_check(&ctx, &w).unwrap(),
                "conjugation failed at p={} c={c}",
                s.p()
            );
            witnesses += 1;
        }
    }
    report(
        3,
        "theta_d power-map isomorphisms",
        &format!("{witnesses} witnesses verified over all |G|^2 pairs, all conjugate rho to N"),
        start,
        Duration::from_secs(60),
    );
}

/// Deterministic mixed-rank D samples for one (p, n).
fn sample_ds(p: u64, n: usize, ranks: &[usize], seed: u64) -> Vec<FpMatrix> {
    let m = n * (n - 1) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<FpMatrix> = Vec::new();
    for &target in ranks {
        loop {
            let d = if target == 0 {
                FpMatrix::zero(p, n, m)
            } else {
                FpMatrix::random(p, n, m, &mut rng)
            };
            if d.rank() == target && !out.contains(&d) {
                out.push(d);
                break;
            }
        }
    }
    out
}

/// Exhaustive (A, T) scan vs solve_t_for_a on one spec, verifying every
/// solution's constructed isomorphism exhaustively. Returns
/// (solutions, witnesses).
fn criterion_scan(s: &GroupSpec) -> (u64, u64) {
    let p = s.p();
    let n = s.n();
    let m = s.m();
    // all invertible T with their D·T^{-1} keys
    let mut t_by_key: HashMap<Vec<u64>, Vec<FpMatrix>> = HashMap::new();
    enumerate_gl(m, p, 100_000_000, |t| {
        let key = s.d().mul(&t.inverse().unwrap()).unwrap().entries().to_vec();
        t_by_key.entry(key).or_default().push(t.clone());
    })
    .unwrap();

    let ctx = VerifyContext::new(s).unwrap();
    let mut solutions = 0u64;
    let mut witnesses = 0u64;
    enumerate_gl(n, p, 100_000_000, |a| {
        let key = a
            .inverse()
            .unwrap()
            .mul(s.d())
            .unwrap()
            .mul(&s.wedge_matrix(a))
            .unwrap()
            .entries()
            .to_vec();
        let mut scanned: Vec<FpMatrix> = t_by_key.get(&key).cloned().unwrap_or_default();
        scanned.sort_by(|x, y| x.entries().cmp(y.entries()));
        // the solver must reproduce the scan exactly
        let solved = solve_t_for_a(s, a).unwrap();
        let mut from_solver = solved.enumerate_invertible_t(1_000_000).unwrap();
        from_solver.sort_by(|x, y| x.entries().cmp(y.entries()));
        assert_eq!(scanned, from_solver, "solution sets differ for some A");
        for t in &scanned {
            assert!(solved.contains_t(t));
            assert!(criterion_holds(s, a, t).unwrap());
            let sol = CriterionSolution::new(s, a.clone(), t.clone()).unwrap();
            let w = build_isomorphism_with(s, &sol, Sampling::Exhaustive, Some(&ctx)).unwrap();
            assert!(w.verified && w.exhaustive);
            witnesses += 1;
        }
        solutions += scanned.len() as u64;
    })
    .unwrap();
    (solutions, witnesses)
}

/// Criterion 4: criterion completeness at desk scale.
#[test]
fn criterion_4_criterion_completeness() {
    let start = Instant::now();
    let mut total_solutions = 0u64;
    let mut total_witnesses = 0u64;
    // (3,2) and (5,2): D is 2x1, ranks 0 and 1 both reachable
    for (p, seed) in [(3u64, 11u64), (5, 13)] {
        let ds = sample_ds(p, 2, &[1, 1, 1, 1, 0], seed);
        for d in ds {
            let s = GroupSpec::new(p, 2, d).unwrap();
            let (sols, wits) = criterion_scan(&s);
            total_solutions += sols;
            total_witnesses += wits;
        }
    }
    // (3,3): full and deficient ranks; rank <= 1 is left to the 2x1 specs,
    // where the scan is exhaustive over the same phenomenon
    let ds = sample_ds(3, 3, &[3, 3, 3, 2, 2], 17);
    let results: Vec<(u64, u64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = ds
            .iter()
            .map(|d| {
                let d = d.clone();
                scope.spawn(move || {
                    let s = GroupSpec::new(3, 3, d).unwrap();
                    criterion_scan(&s)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for (sols, wits) in results {
        total_solutions += sols;
        total_witnesses += wits;
    }
    assert_eq!(total_solutions, total_witnesses);
    assert!(total_solutions > 0);
    report(
        4,
        "criterion completeness at desk scale",
        &format!(
            "15 specs scanned; {total_solutions} (A,T) solutions matched the solver exactly; all {total_witnesses} witnesses verified exhaustively"
        ),
        start,
        Duration::from_secs(600),
    );
}

/// Criterion 5: the full-rank (Q, A, M) parametrization at (3, 4).
#[test]
fn criterion_5_full_rank_parametrization() {
    let start = Instant::now();
    let s = spec_34_full_rank();
    let basis = ReducedBasis::compute(&s).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let id = ResElement::identity(&s).unwrap();
    for _ in 0..1000 {
        // embeddings satisfy the criterion
        let r = ResElement::random(&s, &mut rng).unwrap();
        let (a, t) = r.to_criterion_pair(&basis).unwrap();
        assert!(criterion_holds(&s, &a, &t).unwrap());
        // the semidirect law is the block-matrix product
        let r2 = ResElement::random(&s, &mut rng).unwrap();
        let prod = r.mul(&r2).unwrap();
        assert_eq!(
            prod.block_matrix(),
            r.block_matrix().mul(&r2.block_matrix()).unwrap()
        );
        // group axioms
        let r3 = ResElement::random(&s, &mut rng).unwrap();
        assert_eq!(
            r.mul(&r2).unwrap().mul(&r3).unwrap(),
            r.mul(&r2.mul(&r3).unwrap()).unwrap()
        );
        assert_eq!(r.mul(&id).unwrap(), r);
        assert_eq!(id.mul(&r).unwrap(), r);
        assert_eq!(r.mul(&r.inverse().unwrap()).unwrap(), id);
    }
    report(
        5,
        "full-rank parametrization",
        "1000 random (Q,A,M): criterion embeddings, block-matrix law, group axioms",
        start,
        Duration::from_secs(30),
    );
}

/// Criterion 6: composition law and the semidirect structure at (3,2,D=0).
#[test]
fn criterion_6_composition_law() {
    let start = Instant::now();
    let s = spec(3, 2, &[]);
    let els = s.enumerate_elements(2_000).unwrap();

    // every symmetric form (3^3 of them) plus every valid power form
    let mut witnesses: Vec<IsoWitness> = Vec::new();
    for d in 0..3i64 {
        for e in 0..3i64 {
            for f in 0..3i64 {
                let tensor = vec![
                    vec![vec![d], vec![e]],
                    vec![vec![e], vec![f]],
                ];
                let sym = BilinearForm::from_tensor(&s, &tensor).unwrap();
                let w = sym_isomorphism(&s, &sym, Sampling::Exhaustive).unwrap();
                assert!(w.verified);
                // ker(res): symmetric witnesses restrict trivially
                assert!(w.res_c.is_identity() && w.res_z.is_identity());
                witnesses.push(w);
            }
        }
    }
    let sym_count = witnesses.len();
    for c in [0i64, 2] {
        let w = theta_d(&s, c, Sampling::Exhaustive).unwrap();
        assert!(w.verified);
        witnesses.push(w);
    }

    // all ordered pairs: theta1 then theta2 is an isomorphism for
    // delta1^{res(theta2)} + delta2, checked on every pair of elements
    let mut composites = 0u64;
    for w1 in &witnesses {
        for w2 in &witnesses {
            let combined = w1.delta.transform(&w2.res_c, &w2.res_z).unwrap().add(&w2.delta);
            for x in &els {
                for y in &els {
                    let lhs = w2.apply(&w1.apply(&s.multiply(x, y)));
                    let rhs =
                        circle_mul(&combined, &w2.apply(&w1.apply(x)), &w2.apply(&w1.apply(y)));
                    assert_eq!(lhs, rhs, "composite failed");
                }
            }
            composites += 1;
        }
    }

    // symmetric witnesses compose abelianly: the combined form is the sum
    // in either order and res stays trivial
    for w1 in &witnesses[..sym_count] {
        for w2 in &witnesses[..sym_count] {
            let ab = w1.delta.transform(&w2.res_c, &w2.res_z).unwrap().add(&w2.delta);
            let ba = w2.delta.transform(&w1.res_c, &w1.res_z).unwrap().add(&w1.delta);
            assert_eq!(ab, ba);
            assert_eq!(ab, w1.delta.add(&w2.delta));
        }
    }
    report(
        6,
        "composition law and semidirect structure",
        &format!(
            "{} witnesses ({} symmetric), {composites} composites verified over all 729 pairs",
            witnesses.len(),
            sym_count
        ),
        start,
        Duration::from_secs(120),
    );
}

/// Direct classification of the circle group of an anti-symmetric form,
/// computed with the group operation alone.
fn direct_classify(
    s: &GroupSpec,
    mt: &MulTable,
    form: &BilinearForm,
) -> (bool, bool, bool) {
    let size = mt.size;
    let pm = mt.pm;
    let pn = size / pm;
    // circle product through the tables
    let coset = |a_idx: usize| {
        let p = s.p() as usize;
        let mut v = vec![0u64; s.n()];
        let mut x = a_idx;
        for slot in (0..s.n()).rev() {
            v[slot] = (x % p) as u64;
            x /= p;
        }
        v
    };
    let cosets: Vec<Vec<u64>> = (0..pn).map(coset).collect();
    let mut dt = vec![0u32; pn * pn];
    for u in 0..pn {
        for v in 0..pn {
            dt[u * pn + v] = s.central_index(&form.evaluate(&cosets[u], &cosets[v])) as u32;
        }
    }
    let circ = |i: usize, j: usize| -> usize {
        mt.add_central(mt.mul(i, j), dt[(i / pm) * pn + (j / pm)] as usize)
    };
    // abelian: all ordered pairs commute (early exit on a witness)
    let mut abelian = true;
    'outer: for i in 0..size {
        for j in 0..size {
            if circ(i, j) != circ(j, i) {
                abelian = false;
                break 'outer;
            }
        }
    }
    // circle commutators over coset representatives; spot-check that
    // central shifts do not change them
    let rep = |u: usize| s.element_at(u * pm);
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut central_cosets = Vec::new();
    for u in 0..pn {
        let mut all_trivial = true;
        for v in 0..pn {
            let comm = circle_commutator_definitional(form, &rep(u), &rep(v));
            assert!(comm.a.iter().all(|&x| x == 0));
            if comm.c.iter().any(|&x| x != 0) {
                all_trivial = false;
            }
            if u < v {
                rows.push(comm.c.iter().map(|&x| x as i64).collect());
            }
        }
        if all_trivial {
            central_cosets.push(u);
        }
    }
    let span = FpMatrix::from_rows(s.p(), &rows).unwrap();
    let derived_full = span.rank() == s.m();
    let center_equal = central_cosets == vec![0];
    // invariance of the commutator under central shifts, sampled
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..4 {
        let u = rng.gen_range(0..pn);
        let v = rng.gen_range(0..pn);
        let c1 = rng.gen_range(0..pm);
        let c2 = rng.gen_range(0..pm);
        let shifted = circle_commutator_definitional(
            form,
            &s.element_at(u * pm + c1),
            &s.element_at(v * pm + c2),
        );
        assert_eq!(shifted, circle_commutator_definitional(form, &rep(u), &rep(v)));
    }
    (abelian, derived_full, center_equal)
}

/// Criterion 7: classification flags agree with direct computation for
/// every anti-symmetric form at (3,2) and (3,3).
#[test]
fn criterion_7_classification() {
    let start = Instant::now();
    let mut checked = 0u64;
    let specs = vec![
        spec(3, 2, &[]),
        spec(3, 2, &[vec![1], vec![0]]),
        spec(3, 3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]),
    ];
    for s in &specs {
        let mt = MulTable::build(s, 2_000).unwrap();
        let m = s.m();
        let sigma_count = (s.p() as u128).pow((m * m) as u32);
        for idx in 0..sigma_count {
            // decode sigma from the index
            let mut entries = vec![0i64; m * m];
            let mut x = idx;
            for slot in entries.iter_mut() {
                *slot = (x % s.p() as u128) as i64;
                x /= s.p() as u128;
            }
            let sigma = SigmaEndo::new(s, FpMatrix::new(s.p(), m, m, &entries).unwrap()).unwrap();
            let form = sigma.form();
            assert!(form.is_antisymmetric());
            let flags = classify_antisym(&form).unwrap();
            let (abelian, derived_full, center_equal) = direct_classify(s, &mt, &form);
            assert_eq!(flags.abelian, abelian, "abelian flag at sigma {idx}");
            assert_eq!(flags.derived_full, derived_full, "derived flag at sigma {idx}");
            assert_eq!(flags.center_equal, center_equal, "center flag at sigma {idx}");
            checked += 1;
        }
    }
    report(
        7,
        "circle-group classification",
        &format!("{checked} anti-symmetric forms, three flags each, zero disagreements"),
        start,
        Duration::from_secs(300),
    );
}

/// Criterion 8: the circle presentation D° = D·T^{-1} holds by direct
/// ∘-evaluation for random invertible T.
#[test]
fn criterion_8_circle_presentation() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut checked = 0u64;
    for s in [spec(3, 2, &[vec![1], vec![0]]), spec_34_full_rank()] {
        for _ in 0..50 {
            let t = FpMatrix::random_invertible(s.p(), s.m(), &mut rng);
            assert!(
                circle_presentation_check(&s, &t).unwrap(),
                "relations failed for a random T at n = {}",
                s.n()
            );
            checked += 1;
        }
    }
    report(
        8,
        "circle-group presentation",
        &format!("{checked} random invertible T, all n relations hold by ∘-evaluation"),
        start,
        Duration::from_secs(60),
    );
}

/// Criterion 9: collection arithmetic — associativity and the class-two
/// power identity.
#[test]
fn criterion_9_arithmetic_core() {
    let start = Instant::now();
    let mut checks = 0u64;
    // |G| = 729 sits on the exhaustive-associativity boundary; walk all
    // 729^3 triples through the multiplication table
    {
        let s = spec(3, 3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let mt = MulTable::build(&s, 2_000).unwrap();
        for x in 0..mt.size {
            for y in 0..mt.size {
                let xy = mt.mul(x, y);
                for z in 0..mt.size {
                    assert_eq!(mt.mul(xy, z), mt.mul(x, mt.mul(y, z)));
                }
            }
        }
        checks += (mt.size as u64).pow(3);
    }
    for s in [spec(3, 2, &[vec![1], vec![0]]), spec(5, 2, &[vec![2], vec![4]])] {
        let els = s.enumerate_elements(2_000).unwrap();
        for x in &els {
            for y in &els {
                for z in &els {
                    assert_eq!(
                        s.multiply(&s.multiply(x, y), z),
                        s.multiply(x, &s.multiply(y, z))
                    );
                }
                for d in 0..=(2 * s.p() as i64) {
                    let lhs = s.power(&s.multiply(x, y), d);
                    let rhs = s.multiply(
                        &s.multiply(&s.power(x, d), &s.power(y, d)),
                        &s.power(&s.commutator(y, x), d * (d - 1) / 2),
                    );
                    assert_eq!(lhs, rhs, "power identity failed at d = {d}");
                }
                checks += els.len() as u64 + 2 * s.p() + 1;
            }
        }
    }
    // 10^5 random samples at (3,4)
    let s = spec_34_full_rank();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100_000 {
        let x = multiholo::forms::random_element(&s, &mut rng);
        let y = multiholo::forms::random_element(&s, &mut rng);
        let z = multiholo::forms::random_element(&s, &mut rng);
        assert_eq!(
            s.multiply(&s.multiply(&x, &y), &z),
            s.multiply(&x, &s.multiply(&y, &z))
        );
        let d = rng.gen_range(0..=(2 * s.p() as i64));
        let lhs = s.power(&s.multiply(&x, &y), d);
        let rhs = s.multiply(
            &s.multiply(&s.power(&x, d), &s.power(&y, d)),
            &s.power(&s.commutator(&y, &x), d * (d - 1) / 2),
        );
        assert_eq!(lhs, rhs);
        checks += 2;
    }
    report(
        9,
        "arithmetic core",
        &format!("{checks} collection checks, exhaustive at (3,2) and (5,2), 10^5 random at (3,4)"),
        start,
        Duration::from_secs(120),
    );
}
