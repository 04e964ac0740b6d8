//! Seeded, reproducible property suites over every module, runnable from
//! the CLI (`selftest`) and reused by the test harness.

use std::time::Instant;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::forms::{
    antisym_to_sigma, brace_compatibility_check, circle_commutator,
    circle_commutator_definitional, circle_inverse, circle_mul, gamma_of, random_element,
    BilinearForm, SigmaEndo,
};
use crate::group::{GroupSpec, ORACLE_BOUND};
use crate::linalg::{count_invertible_brute_force, gl_order, reduce_to_i0, solve_affine, FpMatrix};
use crate::tg::{
    build_isomorphism, criterion_holds, theta_d, CriterionSolution, ReducedBasis, ResElement,
    TgElement,
};
use crate::{Error, Result, Sampling};

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub pairs: usize,
    pub exhaustive_small: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: 0xC0FFEE, pairs: 10_000, exhaustive_small: false }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

fn run_suite(name: &str, f: impl FnOnce() -> Result<String>) -> SuiteResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(detail) => (true, detail),
        Err(e) => (false, e.to_string()),
    };
    SuiteResult { name: name.to_string(), passed, detail, millis: start.elapsed().as_millis() }
}

fn fail(msg: impl Into<String>) -> Error {
    Error::VerificationFailed(msg.into())
}

fn spec(p: u64, n: usize, d_rows: &[Vec<i64>]) -> GroupSpec {
    let m = n * (n - 1) / 2;
    let d = if d_rows.is_empty() {
        FpMatrix::zero(p, n, m)
    } else {
        FpMatrix::from_rows(p, d_rows).unwrap()
    };
    GroupSpec::new(p, n, d).expect("valid spec")
}

fn spec_34() -> GroupSpec {
    let rows: Vec<Vec<i64>> = (0..4)
        .map(|i| (0..6).map(|j| i64::from(j == i)).collect())
        .collect();
    spec(3, 4, &rows)
}

/// Runs every suite and returns one result per suite.
pub fn run_all(cfg: &SuiteConfig) -> Vec<SuiteResult> {
    vec![
        run_suite("linalg", || linalg_suite(cfg)),
        run_suite("group-arithmetic", || group_suite(cfg)),
        run_suite("bilinear-forms", || forms_suite(cfg)),
        run_suite("circle-groups", || circle_suite(cfg)),
        run_suite("tg-structure", || tg_suite(cfg)),
        run_suite("holomorph-oracle", || oracle_suite(cfg)),
    ]
}

fn linalg_suite(cfg: &SuiteConfig) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = 0usize;
    for p in [3u64, 5, 7] {
        for _ in 0..40 {
            let a = FpMatrix::random_invertible(p, 3, &mut rng);
            if !a.mul(&a.inverse()?)?.is_identity() {
                return Err(fail("X · X^{-1} != I"));
            }
            let b = FpMatrix::random(p, 3, 5, &mut rng);
            if b.rank() != b.transpose().rank() {
                return Err(fail("rank(X) != rank(X^T)"));
            }
            checks += 2;
        }
    }
    // solve_affine substitution on random consistent systems
    for _ in 0..60 {
        let d = FpMatrix::random(3, 3, 4, &mut rng);
        let x = FpMatrix::random(3, 4, 2, &mut rng);
        let r = d.mul(&x)?;
        let sol = solve_affine(&d, &r)?;
        if d.mul(&sol.particular)? != r || !sol.contains(&x) {
            return Err(fail("solve_affine substitution failed"));
        }
        checks += 1;
    }
    // reduce_to_i0 exactness on random full-rank matrices
    let mut done = 0;
    while done < 40 {
        let d = FpMatrix::random(3, 3, 5, &mut rng);
        if d.rank() != 3 {
            continue;
        }
        let (u, v) = reduce_to_i0(&d)?;
        let prod = u.mul(&d)?.mul(&v)?;
        for i in 0..3 {
            for j in 0..5 {
                if prod.get(i, j) != u64::from(i == j) {
                    return Err(fail("U·D·V != [I|0]"));
                }
            }
        }
        done += 1;
        checks += 1;
    }
    // gl_order against brute force
    for (k, p) in [(1, 3), (2, 3), (1, 5)] {
        if gl_order(k, p) != BigUint::from(count_invertible_brute_force(k, p)?) {
            return Err(fail("gl_order disagrees with brute force"));
        }
        checks += 1;
    }
    Ok(format!("{checks} checks"))
}

fn group_suite(cfg: &SuiteConfig) -> Result<String> {
    let mut checks = 0usize;
    let small = [spec(3, 2, &[]), spec(3, 2, &[vec![1], vec![0]]), spec(5, 2, &[vec![2], vec![3]])];
    for s in &small {
        let els = s.enumerate_elements(ORACLE_BOUND)?;
        // identity/inverse axioms, commutator cross-check, p-th power map
        for e in &els {
            if s.multiply(e, &s.inverse(e)) != s.identity() {
                return Err(fail("inverse law failed"));
            }
            let cube = s.power(e, s.p() as i64);
            if cube.a.iter().any(|&x| x != 0) || cube.c != s.pth_power_map(&e.a) {
                return Err(fail("x^p != pi(x)"));
            }
        }
        for x in &els {
            for y in &els {
                if s.commutator(x, y) != s.commutator_definitional(x, y) {
                    return Err(fail("wedge commutator != definitional"));
                }
                checks += 1;
            }
        }
        // associativity: exhaustive for |G| = 27, sampled for 125
        if els.len() <= 27 || cfg.exhaustive_small {
            for x in &els {
                for y in &els {
                    for z in &els {
                        if s.multiply(&s.multiply(x, y), z) != s.multiply(x, &s.multiply(y, z)) {
                            return Err(fail("associativity failed"));
                        }
                    }
                }
            }
            checks += els.len().pow(3);
        }
    }
    // random triples and the class-two power identity at (3,4)
    let s = spec_34();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 1);
    for _ in 0..cfg.pairs {
        let x = random_element(&s, &mut rng);
        let y = random_element(&s, &mut rng);
        let z = random_element(&s, &mut rng);
        if s.multiply(&s.multiply(&x, &y), &z) != s.multiply(&x, &s.multiply(&y, &z)) {
            return Err(fail("associativity failed at (3,4)"));
        }
        let d = (cfg.seed % 7) as i64;
        let lhs = s.power(&s.multiply(&x, &y), d);
        let rhs = s.multiply(
            &s.multiply(&s.power(&x, d), &s.power(&y, d)),
            &s.power(&s.commutator(&y, &x), d * (d - 1) / 2),
        );
        if lhs != rhs {
            return Err(fail("(xy)^d identity failed at (3,4)"));
        }
        checks += 2;
    }
    Ok(format!("{checks} checks"))
}

fn forms_suite(cfg: &SuiteConfig) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 2);
    let mut checks = 0usize;
    for s in [spec(3, 2, &[]), spec(3, 3, &[]), spec(5, 2, &[vec![1], vec![0]])] {
        // split-recombine is the identity; parts have the right symmetry
        for _ in 0..1000 {
            let f = BilinearForm::random(&s, &mut rng);
            let (sym, anti) = f.sym_antisym_split();
            if !sym.is_symmetric() || !anti.is_antisymmetric() || sym.add(&anti) != f {
                return Err(fail("sym/antisym split failed"));
            }
            checks += 1;
        }
        // sigma round trip
        for _ in 0..100 {
            let se = SigmaEndo::new(&s, FpMatrix::random(s.p(), s.m(), s.m(), &mut rng))?;
            if antisym_to_sigma(&se.form())?.sigma() != se.sigma() {
                return Err(fail("sigma round trip failed"));
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} checks"))
}

fn circle_suite(cfg: &SuiteConfig) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 3);
    let mut checks = 0usize;
    let s = spec(3, 2, &[vec![1], vec![0]]);
    let els = s.enumerate_elements(ORACLE_BOUND)?;
    for _ in 0..5 {
        let f = BilinearForm::random(&s, &mut rng);
        // group laws, exhaustively
        for x in &els {
            let inv = circle_inverse(&f, x);
            if circle_mul(&f, x, &inv) != s.identity() || circle_mul(&f, x, &s.identity()) != *x {
                return Err(fail("circle identity/inverse law failed"));
            }
            for y in &els {
                if circle_commutator(&f, x, y) != circle_commutator_definitional(&f, x, y) {
                    return Err(fail("circle commutator closed form failed"));
                }
                for z in &els {
                    let lhs = circle_mul(&f, &circle_mul(&f, x, y), z);
                    let rhs = circle_mul(&f, x, &circle_mul(&f, y, z));
                    if lhs != rhs {
                        return Err(fail("circle associativity failed"));
                    }
                    checks += 1;
                }
            }
        }
        if !brace_compatibility_check(&f, Sampling::Exhaustive)? {
            return Err(fail("brace identity failed"));
        }
        // gamma is an anti-homomorphism
        for x in &els {
            for y in &els {
                let gxy = gamma_of(&f, &s.multiply(x, y));
                let gx = gamma_of(&f, x);
                let gy = gamma_of(&f, y);
                for e in els.iter().step_by(5) {
                    if gxy.apply(e) != gx.apply(&gy.apply(e)) {
                        return Err(fail("gamma anti-homomorphism failed"));
                    }
                    checks += 1;
                }
            }
        }
    }
    // sigma-form circle commutators are wedge · (1 + 2σ), sampled at (3,4)
    let s = spec_34();
    for _ in 0..20 {
        let se = SigmaEndo::new(&s, FpMatrix::random(3, 6, 6, &mut rng))?;
        let f = se.form();
        for _ in 0..cfg.pairs / 100 {
            let x = random_element(&s, &mut rng);
            let y = random_element(&s, &mut rng);
            let expect = s.central(&crate::linalg::vec_mat(&s.wedge(&x.a, &y.a), se.tau())?);
            if circle_commutator(&f, &x, &y) != expect {
                return Err(fail("sigma circle commutator != wedge · tau"));
            }
            checks += 1;
        }
    }
    // circle group laws on sampled triples at (3,4), where exhaustion is out
    for _ in 0..5 {
        let f = BilinearForm::random(&s, &mut rng);
        for _ in 0..cfg.pairs / 10 {
            let x = random_element(&s, &mut rng);
            let y = random_element(&s, &mut rng);
            let z = random_element(&s, &mut rng);
            let lhs = circle_mul(&f, &circle_mul(&f, &x, &y), &z);
            let rhs = circle_mul(&f, &x, &circle_mul(&f, &y, &z));
            if lhs != rhs {
                return Err(fail("circle associativity failed at (3,4)"));
            }
            if circle_mul(&f, &x, &circle_inverse(&f, &x)) != s.identity()
                || circle_mul(&f, &x, &s.identity()) != x
            {
                return Err(fail("circle identity/inverse law failed at (3,4)"));
            }
            checks += 2;
        }
    }
    Ok(format!("{checks} checks"))
}

fn tg_suite(cfg: &SuiteConfig) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 4);
    let mut checks = 0usize;
    let s = spec_34();
    let basis = ReducedBasis::compute(&s)?;
    let id = ResElement::identity(&s)?;
    for _ in 0..1000 {
        let r1 = ResElement::random(&s, &mut rng)?;
        let r2 = ResElement::random(&s, &mut rng)?;
        let r3 = ResElement::random(&s, &mut rng)?;
        if r1.mul(&r2)?.mul(&r3)? != r1.mul(&r2.mul(&r3)?)? {
            return Err(fail("res semidirect associativity failed"));
        }
        if r1.mul(&id)? != r1 || id.mul(&r1)? != r1 || r1.mul(&r1.inverse()?)? != id {
            return Err(fail("res identity/inverse failed"));
        }
        if r1.mul(&r2)?.block_matrix() != r1.block_matrix().mul(&r2.block_matrix())? {
            return Err(fail("block matrix homomorphism failed"));
        }
        checks += 3;
    }
    for _ in 0..200 {
        let r = ResElement::random(&s, &mut rng)?;
        let (a, t) = r.to_criterion_pair(&basis)?;
        if !criterion_holds(&s, &a, &t)? {
            return Err(fail("embedded (A,T) violates the criterion"));
        }
        checks += 1;
    }
    // witnesses verify and have the right res at (3,2)
    let s32 = spec(3, 2, &[vec![1], vec![0]]);
    for c in [0i64, 2] {
        let w = theta_d(&s32, c, Sampling::Exhaustive)?;
        if !w.verified {
            return Err(fail(format!("theta_d({c}) did not verify")));
        }
        checks += 1;
    }
    let mut rng2 = ChaCha8Rng::seed_from_u64(cfg.seed ^ 5);
    for _ in 0..10 {
        let raw = BilinearForm::random(&s32, &mut rng2);
        let (sym, _) = raw.sym_antisym_split();
        let w = crate::tg::sym_isomorphism(&s32, &sym, Sampling::Exhaustive)?;
        if !w.verified || !w.res_c.is_identity() || !w.res_z.is_identity() {
            return Err(fail("symmetric witness not trivial on res"));
        }
        checks += 1;
    }
    // composition coherence at (3,2): theta1 then theta2 verifies for
    // delta1^{res(theta2)} + delta2
    let w1 = theta_d(&s32, 2, Sampling::Exhaustive)?;
    let raw = BilinearForm::random(&s32, &mut rng2);
    let (sym, _) = raw.sym_antisym_split();
    let w2 = crate::tg::sym_isomorphism(&s32, &sym, Sampling::Exhaustive)?;
    for (f1, f2) in [(&w1, &w2), (&w2, &w1)] {
        let combined = f1.delta.transform(&f2.res_c, &f2.res_z)?.add(&f2.delta);
        let els = s32.enumerate_elements(ORACLE_BOUND)?;
        for x in &els {
            for y in &els {
                let lhs = f2.apply(&f1.apply(&s32.multiply(x, y)));
                let rhs = circle_mul(&combined, &f2.apply(&f1.apply(x)), &f2.apply(&f1.apply(y)));
                if lhs != rhs {
                    return Err(fail("composition coherence failed"));
                }
                checks += 1;
            }
        }
    }
    // build_isomorphism on a scalar solution at (5,2)
    let s52 = spec(5, 2, &[vec![1], vec![2]]);
    let sol = CriterionSolution::new(&s52, FpMatrix::scalar(5, 2, 2), FpMatrix::scalar(5, 1, 3))?;
    let w = build_isomorphism(&s52, &sol, Sampling::Exhaustive)?;
    if !w.verified {
        return Err(fail("scalar criterion witness failed"));
    }
    checks += 1;
    // TgElement composition: symmetric parts form an abelian normal part
    let t1 = TgElement::from_witness(&w2);
    let t2 = TgElement::identity(&s32);
    if t1.compose(&t2)? != t1 {
        return Err(fail("TgElement identity law failed"));
    }
    let _ = cfg;
    Ok(format!("{checks} checks"))
}

fn oracle_suite(_cfg: &SuiteConfig) -> Result<String> {
    let mut checks = 0usize;
    let s = spec(3, 2, &[]);
    let ctx = crate::oracle::OracleContext::build(&s, false)?;
    if ctx.aut.order() != 432 {
        return Err(fail(format!("|Aut| = {}, expected 432", ctx.aut.order())));
    }
    let hol = crate::oracle::build_holomorph(&ctx)?;
    if hol.order() != 27 * 432 {
        return Err(fail("holomorph order wrong"));
    }
    checks += 2;
    for c in 0..3 {
        let report =
            crate::oracle::subgroup_from_form(&ctx, &BilinearForm::power_form(&s, c));
        if !report.all_ok() {
            return Err(fail(format!("power form {c} subgroup flags failed")));
        }
        checks += 1;
    }
    let tampered =
        crate::oracle::TamperedForm::tampering(&BilinearForm::power_form(&s, 1));
    if crate::oracle::subgroup_from_form(&ctx, &tampered).all_ok() {
        return Err(fail("tampered form was not rejected"));
    }
    checks += 1;
    for c in [0i64, 2] {
        let w = theta_d(&s, c, Sampling::Exhaustive)?;
        if !crate::oracle::conjugation_check(&ctx, &w)? {
            return Err(fail(format!("conjugation check failed for theta_d({c})")));
        }
        checks += 1;
    }
    Ok(format!("{checks} checks"))
}
