//! Command implementations and report types for the `multiholo` binary.
//!
//! Exit-code contract: 0 success, 1 property or assertion failure, 2 input
//! error, 3 mathematical precondition violation, 4 resource bound.

use std::time::Instant;

use multiholo::forms::{circle_mul, BilinearForm, SigmaEndo};
use multiholo::linalg::FpMatrix;
use multiholo::oracle::{
    build_holomorph, cross_check_correspondence, subgroup_from_form, OracleContext, TamperedForm,
};
use multiholo::selftest::{run_all, SuiteConfig};
use multiholo::tg::{
    build_isomorphism, circle_presentation_check, circle_presentation_matrix,
    induced_aut_stabilizer, res_group_order, sym_isomorphism, sym_part_order, tg_order,
    CriterionSolution, IsoWitness, OrderTag, StabilizerOutcome,
};
use multiholo::{Error, GroupSpec, Sampling};
use serde::{Deserialize, Serialize};

/// The string every report carries so downstream tools cannot misread the
/// column order of D.
pub const PAIR_ORDER_CONVENTION: &str =
    "commutator coordinates indexed by pairs (j,k), 1 <= j < k <= n, in lexicographic order (1,2),(1,3),...,(1,n),(2,3),...,(n-1,n); matrices act on row vectors from the right";

#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit_code = match &e {
            Error::InvalidSpec { .. } | Error::DimensionMismatch(_) | Error::ModulusMismatch { .. } => 2,
            Error::BoundExceeded { .. } => 4,
            Error::VerificationFailed(_) => 1,
            Error::SingularMatrix
            | Error::Infeasible
            | Error::NotFullRank
            | Error::NotAntiSymmetric
            | Error::NotSymmetric
            | Error::TauSingular
            | Error::SingularT
            | Error::SingularInput
            | Error::HalfExcluded
            | Error::CriterionFails => 3,
        };
        CliError { exit_code, message: e.to_string() }
    }
}

pub fn input_error(message: impl Into<String>) -> CliError {
    CliError { exit_code: 2, message: message.into() }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn load_spec(path: &str) -> CliResult<GroupSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read spec file `{path}`: {e}")))?;
    GroupSpec::from_json(&text).map_err(CliError::from)
}

fn matrix_rows(m: &FpMatrix) -> Vec<Vec<u64>> {
    m.rows_vec()
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct StabilizerReport {
    /// "trivial" (certified {I}), "nontrivial", or "unknown".
    pub kind: String,
    pub order: Option<u64>,
    pub sampled: Option<u64>,
    pub nontrivial_examples: Vec<Vec<Vec<u64>>>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub spec: serde_json::Value,
    pub m: usize,
    pub pair_order: String,
    pub rank_d: usize,
    pub omega1_in_derived: bool,
    pub sym_part_order: String,
    /// `None` when D is not of full rank.
    pub res_group_order: Option<String>,
    pub tg_order: Option<String>,
    /// "unconditional" or "conditional-subgroup"; absent with the order.
    pub tg_order_status: Option<String>,
    pub stabilizer: StabilizerReport,
    pub elapsed_ms: u128,
}

pub fn cmd_analyze(spec: &GroupSpec, budget: u64) -> CliResult<AnalysisReport> {
    let start = Instant::now();
    let stab = induced_aut_stabilizer(spec, budget);
    let certified = stab.certified_trivial();
    let stabilizer = match &stab {
        StabilizerOutcome::Exhaustive { stabilizer } => StabilizerReport {
            kind: if stabilizer.len() == 1 { "trivial" } else { "nontrivial" }.into(),
            order: Some(stabilizer.len() as u64),
            sampled: None,
            nontrivial_examples: stabilizer
                .iter()
                .filter(|a| !a.is_identity())
                .take(3)
                .map(matrix_rows)
                .collect(),
        },
        StabilizerOutcome::Unknown { sampled, nontrivial_found } => StabilizerReport {
            kind: "unknown".into(),
            order: None,
            sampled: Some(*sampled),
            nontrivial_examples: nontrivial_found.iter().take(3).map(matrix_rows).collect(),
        },
    };
    let (res_order, tg, status) = match res_group_order(spec) {
        Ok(res) => {
            let (order, tag) = tg_order(spec, certified).map_err(CliError::from)?;
            let status = match tag {
                OrderTag::Unconditional => "unconditional",
                OrderTag::ConditionalSubgroup => "conditional-subgroup",
            };
            (Some(res.to_string()), Some(order.to_string()), Some(status.to_string()))
        }
        Err(Error::NotFullRank) => (None, None, None),
        Err(e) => return Err(e.into()),
    };
    Ok(AnalysisReport {
        spec: spec.to_json(),
        m: spec.m(),
        pair_order: PAIR_ORDER_CONVENTION.into(),
        rank_d: spec.d().rank(),
        omega1_in_derived: spec.omega1_in_derived(),
        sym_part_order: sym_part_order(spec).to_string(),
        res_group_order: res_order,
        tg_order: tg,
        tg_order_status: status,
        stabilizer,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

// ---------------------------------------------------------------------------
// verify

/// CLI form literal: `{"kind":"power","c":..}`, `{"kind":"sigma","S":[[..]]}`
/// or `{"kind":"tensor","T":[[[..]]]}`.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "kind")]
pub enum FormLiteral {
    #[serde(rename = "power")]
    Power { c: i64 },
    #[serde(rename = "sigma")]
    Sigma { #[serde(rename = "S")] s: Vec<Vec<i64>> },
    #[serde(rename = "tensor")]
    Tensor { #[serde(rename = "T")] t: Vec<Vec<Vec<i64>>> },
}

impl FormLiteral {
    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| input_error(format!("bad form literal: {e}")))
    }

    pub fn to_form(&self, spec: &GroupSpec) -> CliResult<BilinearForm> {
        match self {
            FormLiteral::Power { c } => Ok(BilinearForm::power_form(spec, *c)),
            FormLiteral::Sigma { s } => {
                let s = FpMatrix::from_rows(spec.p(), s).map_err(CliError::from)?;
                Ok(SigmaEndo::new(spec, s).map_err(CliError::from)?.form())
            }
            FormLiteral::Tensor { t } => BilinearForm::from_tensor(spec, t).map_err(CliError::from),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct VerifyReport {
    pub kind: String,
    pub verified: bool,
    pub exhaustive: bool,
    pub pairs_checked: u64,
    pub res_c: Vec<Vec<u64>>,
    pub res_z: Vec<Vec<u64>>,
    /// Presentation exponents `D° = D·T^{-1}` of the circle group.
    pub d_circle: Option<Vec<Vec<u64>>>,
    pub circle_relations_hold: Option<bool>,
    pub pair_order: String,
}

pub enum VerifyInput {
    PowerC(i64),
    Form(FormLiteral),
    Criterion { a: Vec<Vec<i64>>, t: Vec<Vec<i64>> },
}

fn report_from_witness(
    spec: &GroupSpec,
    kind: &str,
    witness: &IsoWitness,
    tau: Option<&FpMatrix>,
) -> CliResult<VerifyReport> {
    let (d_circle, relations) = match tau {
        Some(t) => (
            Some(matrix_rows(&circle_presentation_matrix(spec, t).map_err(CliError::from)?)),
            Some(circle_presentation_check(spec, t).map_err(CliError::from)?),
        ),
        None => (None, None),
    };
    Ok(VerifyReport {
        kind: kind.into(),
        verified: witness.verified,
        exhaustive: witness.exhaustive,
        pairs_checked: witness.pairs_checked,
        res_c: matrix_rows(&witness.res_c),
        res_z: matrix_rows(&witness.res_z),
        d_circle,
        circle_relations_hold: relations,
        pair_order: PAIR_ORDER_CONVENTION.into(),
    })
}

/// Direct pair check for composite maps the core witnesses do not cover.
fn verify_map_against(
    spec: &GroupSpec,
    delta: &BilinearForm,
    apply: impl Fn(&multiholo::GroupElement) -> multiholo::GroupElement,
    sampling: Sampling,
) -> CliResult<(bool, u64, bool)> {
    match sampling {
        Sampling::Exhaustive => {
            let els = spec.enumerate_elements(2_000).map_err(CliError::from)?;
            let mut pairs = 0u64;
            for x in &els {
                for y in &els {
                    pairs += 1;
                    let lhs = apply(&spec.multiply(x, y));
                    let rhs = circle_mul(delta, &apply(x), &apply(y));
                    if lhs != rhs {
                        return Ok((false, pairs, true));
                    }
                }
            }
            Ok((true, pairs, true))
        }
        Sampling::Random { pairs, seed } => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for k in 0..pairs {
                let x = multiholo::forms::random_element(spec, &mut rng);
                let y = multiholo::forms::random_element(spec, &mut rng);
                let lhs = apply(&spec.multiply(&x, &y));
                let rhs = circle_mul(delta, &apply(&x), &apply(&y));
                if lhs != rhs {
                    return Ok((false, k as u64 + 1, false));
                }
            }
            Ok((true, pairs as u64, false))
        }
    }
}

/// Witness constructor for an anti-symmetric form: power forms go through
/// the power map, anything else through the criterion with `A = I` (which
/// is the only lift the CLI will attempt without an explicit `(A, T)`).
fn antisym_witness(
    spec: &GroupSpec,
    anti: &BilinearForm,
    sampling: Sampling,
) -> CliResult<(IsoWitness, FpMatrix, String)> {
    let sigma = multiholo::forms::antisym_to_sigma(anti).map_err(CliError::from)?;
    // scalar sigma: use the power-map witness
    let c = sigma.sigma().get(0, 0);
    if sigma.sigma() == &FpMatrix::scalar(spec.p(), spec.m(), c as i64) {
        let w = multiholo::tg::theta_d(spec, c as i64, sampling).map_err(CliError::from)?;
        return Ok((w, sigma.tau().clone(), "theta_d".into()));
    }
    let identity = FpMatrix::identity(spec.p(), spec.n());
    let sol = CriterionSolution::new(spec, identity, sigma.tau().clone()).map_err(|e| match e {
        Error::CriterionFails => CliError {
            exit_code: 3,
            message: "A = I does not lift this sigma; pass an explicit (A, T) via --criterion"
                .into(),
        },
        other => other.into(),
    })?;
    let w = build_isomorphism(spec, &sol, sampling).map_err(CliError::from)?;
    Ok((w, sigma.tau().clone(), "criterion".into()))
}

pub fn cmd_verify(spec: &GroupSpec, input: &VerifyInput, sampling: Sampling) -> CliResult<VerifyReport> {
    match input {
        VerifyInput::PowerC(c) => {
            let w = multiholo::tg::theta_d(spec, *c, sampling).map_err(CliError::from)?;
            let tau = FpMatrix::scalar(spec.p(), spec.m(), 2 * *c + 1);
            report_from_witness(spec, "theta_d", &w, Some(&tau))
        }
        VerifyInput::Criterion { a, t } => {
            let a = FpMatrix::from_rows(spec.p(), a).map_err(CliError::from)?;
            let t = FpMatrix::from_rows(spec.p(), t).map_err(CliError::from)?;
            let sol = CriterionSolution::new(spec, a, t.clone()).map_err(CliError::from)?;
            let w = build_isomorphism(spec, &sol, sampling).map_err(CliError::from)?;
            report_from_witness(spec, "criterion", &w, Some(&t))
        }
        VerifyInput::Form(literal) => {
            let form = literal.to_form(spec)?;
            let (sym, anti) = form.sym_antisym_split();
            if anti.is_zero() {
                let w = sym_isomorphism(spec, &sym, sampling).map_err(CliError::from)?;
                return report_from_witness(spec, "sym_isomorphism", &w, None);
            }
            if sym.is_zero() {
                let (w, tau, kind) = antisym_witness(spec, &anti, sampling)?;
                return report_from_witness(spec, &kind, &w, Some(&tau));
            }
            // mixed form: compose a symmetric slice with the anti-symmetric
            // witness and verify the composite against the full form
            let (w2, tau, _) = antisym_witness(spec, &anti, sampling)?;
            let res_c_inv = w2.res_c.inverse().map_err(CliError::from)?;
            let res_z_inv = w2.res_z.inverse().map_err(CliError::from)?;
            let delta1 = sym.transform(&res_c_inv, &res_z_inv).map_err(CliError::from)?;
            let w1 = sym_isomorphism(spec, &delta1, sampling).map_err(CliError::from)?;
            let apply = |x: &multiholo::GroupElement| w2.apply(&w1.apply(x));
            let (verified, pairs_checked, exhaustive) =
                verify_map_against(spec, &form, apply, sampling)?;
            Ok(VerifyReport {
                kind: "composite".into(),
                verified: verified && w1.verified && w2.verified,
                exhaustive,
                pairs_checked,
                res_c: matrix_rows(&w2.res_c),
                res_z: matrix_rows(&w2.res_z),
                d_circle: Some(matrix_rows(
                    &circle_presentation_matrix(spec, &tau).map_err(CliError::from)?,
                )),
                circle_relations_hold: Some(
                    circle_presentation_check(spec, &tau).map_err(CliError::from)?,
                ),
                pair_order: PAIR_ORDER_CONVENTION.into(),
            })
        }
    }
}

// ---------------------------------------------------------------------------
// oracle

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct OracleReport {
    pub forms_scanned: u64,
    pub equivariant_forms: u64,
    pub valid_subgroups: u64,
    pub bijection_confirmed: bool,
    pub failures: Vec<String>,
    pub theta_d_checks: Vec<(i64, bool)>,
    pub symmetric_conjugation_checks: u64,
    pub symmetric_conjugations_ok: bool,
    pub holomorph_order: Option<u64>,
    pub corruption_detected: Option<bool>,
    pub corruption_detail: Option<String>,
}

impl OracleReport {
    pub fn all_ok(&self) -> bool {
        self.bijection_confirmed
            && self.failures.is_empty()
            && self.theta_d_checks.iter().all(|(_, ok)| *ok)
            && self.symmetric_conjugations_ok
    }
}

pub fn cmd_oracle(spec: &GroupSpec, corrupt_form: bool, seed: u64) -> CliResult<OracleReport> {
    let cross = cross_check_correspondence(spec).map_err(CliError::from)?;
    let ctx = OracleContext::build(spec, false).map_err(CliError::from)?;
    let holomorph_order = build_holomorph(&ctx).ok().map(|h| h.order() as u64);

    // theta_d witnesses conjugate rho onto the power-form subgroups
    let mut theta_d_checks = Vec::new();
    let half = (spec.p() - 1) / 2;
    for c in 0..spec.p() {
        if c == half {
            continue;
        }
        let w = multiholo::tg::theta_d(spec, c as i64, Sampling::Exhaustive)
            .map_err(CliError::from)?;
        let ok = w.verified
            && multiholo::oracle::conjugation_check(&ctx, &w).map_err(CliError::from)?;
        theta_d_checks.push((c as i64, ok));
    }

    // a few random symmetric witnesses (identity on res) also conjugate
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut symmetric_conjugations_ok = true;
    let sym_checks = 5u64;
    for _ in 0..sym_checks {
        let raw = BilinearForm::random(spec, &mut rng);
        let (sym, _) = raw.sym_antisym_split();
        let w = sym_isomorphism(spec, &sym, Sampling::Exhaustive).map_err(CliError::from)?;
        if !w.verified
            || !multiholo::oracle::conjugation_check(&ctx, &w).map_err(CliError::from)?
        {
            symmetric_conjugations_ok = false;
        }
    }

    let (corruption_detected, corruption_detail) = if corrupt_form {
        let tampered = TamperedForm::tampering(&BilinearForm::power_form(spec, 1));
        let report = subgroup_from_form(&ctx, &tampered);
        let detail = format!(
            "tampered power form: subgroup={} regular={} normal={} gamma={}",
            report.is_subgroup, report.is_regular, report.is_normal_in_hol, report.gamma_valid
        );
        (Some(!report.all_ok()), Some(detail))
    } else {
        (None, None)
    };

    Ok(OracleReport {
        forms_scanned: cross.forms_scanned as u64,
        equivariant_forms: cross.equivariant_forms,
        valid_subgroups: cross.valid_subgroups,
        bijection_confirmed: cross.ok(),
        failures: cross.failures,
        theta_d_checks,
        symmetric_conjugation_checks: sym_checks,
        symmetric_conjugations_ok,
        holomorph_order,
        corruption_detected,
        corruption_detail,
    })
}

// ---------------------------------------------------------------------------
// selftest

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SelftestReport {
    pub seed: u64,
    pub pairs: usize,
    pub exhaustive_small: bool,
    pub suites: Vec<SuiteLine>,
    pub all_passed: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SuiteLine {
    pub name: String,
    pub passed: bool,
    pub millis: u128,
    pub detail: String,
}

pub fn cmd_selftest(seed: u64, pairs: usize, exhaustive_small: bool) -> SelftestReport {
    let cfg = SuiteConfig { seed, pairs, exhaustive_small };
    let results = run_all(&cfg);
    let all_passed = results.iter().all(|r| r.passed);
    SelftestReport {
        seed,
        pairs,
        exhaustive_small,
        suites: results
            .into_iter()
            .map(|r| SuiteLine { name: r.name, passed: r.passed, millis: r.millis, detail: r.detail })
            .collect(),
        all_passed,
    }
}
