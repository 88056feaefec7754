//! Experiment orchestration: build a network, solve it under one or more
//! schemes, verify, and bundle the results. Presets package the workbench's
//! standard desk checks as reproducible report bundles.
//!
//! Bundles contain no timestamps: re-running the same configuration writes
//! byte-identical JSON.

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use netgap_core::algebra::FieldCtx;
use netgap_core::coding::{
    decode_receiver, lift_network_code, scalar_solve_combination,
    scalar_solve_tilde, simulate, solve, transfer_code, verify_solution,
    verify_solution_sampled, verify_star_vector_streaming, Message,
    PairStreamMode, SchemeSpec, SchemeTag,
};
use netgap_core::network::{FamilyKind, Network};
use netgap_core::rankmetric::{lift_element, CompanionCode};
use netgap_core::subspace::triple_span_search;

use crate::bounds::{max_middle_nodes_scalar, star_rank_one_alternative, BoundFamily};
use crate::gap::{gap_report, GapRequest};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: String,
    #[serde(default)]
    pub h: Option<usize>,
    pub r: usize,
    #[serde(default)]
    pub s: Option<usize>,
    #[serde(default)]
    pub ell: Option<usize>,
    #[serde(default)]
    pub extra_links: usize,
}

impl FamilySpec {
    pub fn build(&self) -> Result<Network> {
        let net = match self.kind.as_str() {
            "combination" => {
                let h = self.h.context("combination needs --h")?;
                let s = self.s.unwrap_or(h);
                Network::combination(h, self.r, s)?
            }
            "star" => Network::star(self.ell.context("star needs --ell")?, self.r)?,
            "plus" => Network::plus(self.ell.context("plus needs --ell")?, self.r)?,
            "tilde" => Network::tilde(self.r)?,
            other => bail!("unknown family {other:?}"),
        };
        let net = if self.extra_links > 0 {
            net.add_direct_links(self.extra_links)
        } else {
            net
        };
        Ok(match (self.kind.as_str(), self.h) {
            ("star" | "plus" | "tilde", Some(h)) => net.with_message_count(h),
            _ => net,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: FamilySpec,
    pub schemes: Vec<SchemeTag>,
    pub seed: u64,
    pub sample_cap: usize,
    pub exhaustive: bool,
    #[serde(default)]
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub family: String,
    pub h: usize,
    pub nodes: usize,
    pub edges: usize,
    pub receivers: usize,
}

impl NetworkSummary {
    pub fn of(net: &Network) -> NetworkSummary {
        NetworkSummary {
            family: format!("{:?}", net.family().kind).to_lowercase(),
            h: net.h(),
            nodes: net.node_count(),
            edges: net.edges().len(),
            receivers: net.receivers().len(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeOutcome {
    pub scheme: SchemeTag,
    pub solved: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refusal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receivers_checked: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receivers_total: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_pass: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentBundle {
    pub config: ExperimentConfig,
    pub network: NetworkSummary,
    pub schemes: Vec<SchemeOutcome>,
    pub pass: bool,
}

fn scheme_spec(tag: &SchemeTag) -> SchemeSpec {
    match *tag {
        SchemeTag::Scalar(qs) => SchemeSpec::Scalar { qs },
        SchemeTag::Vector { q, t } => SchemeSpec::Vector { q, t },
    }
}

/// Runs one experiment: generate, solve per scheme, verify, bundle.
/// Deterministic under a fixed config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentBundle> {
    if config.schemes.is_empty() {
        bail!("config lists no schemes");
    }
    let net = config.family.build()?;
    let mut outcomes = Vec::new();
    let mut pass = true;
    for tag in &config.schemes {
        match solve(&net, &scheme_spec(tag)) {
            Ok(code) => {
                let report = if config.exhaustive || net.receivers().len() <= config.sample_cap
                {
                    verify_solution(&net, &code, config.workers)?
                } else {
                    verify_solution_sampled(
                        &net,
                        &code,
                        config.sample_cap,
                        config.seed,
                        config.workers,
                    )?
                };
                pass &= report.all_pass();
                outcomes.push(SchemeOutcome {
                    scheme: *tag,
                    solved: true,
                    refusal: None,
                    receivers_checked: Some(report.receivers_checked),
                    receivers_total: Some(report.receivers_total),
                    all_pass: Some(report.all_pass()),
                });
            }
            Err(e) => {
                pass = false;
                outcomes.push(SchemeOutcome {
                    scheme: *tag,
                    solved: false,
                    refusal: Some(e.to_string()),
                    receivers_checked: None,
                    receivers_total: None,
                    all_pass: None,
                });
            }
        }
    }
    Ok(ExperimentBundle {
        config: config.clone(),
        network: NetworkSummary::of(&net),
        schemes: outcomes,
        pass,
    })
}

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresetStep {
    pub description: String,
    pub detail: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresetOutcome {
    pub name: String,
    pub steps: Vec<PresetStep>,
    pub pass: bool,
}

impl PresetOutcome {
    fn new(name: &str) -> PresetOutcome {
        PresetOutcome {
            name: name.to_string(),
            steps: Vec::new(),
            pass: true,
        }
    }

    fn step(&mut self, description: &str, detail: String, pass: bool) {
        self.steps.push(PresetStep {
            description: description.to_string(),
            detail,
            pass,
        });
        self.pass &= pass;
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("preset {}\n", self.name);
        for s in &self.steps {
            out.push_str(&format!(
                "  [{}] {:<52} {}\n",
                if s.pass { "pass" } else { "FAIL" },
                s.description,
                s.detail
            ));
        }
        out.push_str(&format!(
            "  => {}\n",
            if self.pass { "all steps pass" } else { "FAILURES" }
        ));
        out
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "combination-blocks",
    "lifting-equivalence",
    "star-scalar-exactness",
    "star-vector",
    "gap-star",
    "tilde-43",
    "transforms",
];

pub fn run_preset(name: &str, workers: usize, exhaustive: bool) -> Result<PresetOutcome> {
    match name {
        "combination-blocks" => preset_combination_blocks(workers),
        "lifting-equivalence" => preset_lifting_equivalence(workers),
        "star-scalar-exactness" => preset_star_scalar(workers),
        "star-vector" => preset_star_vector(workers, exhaustive),
        "gap-star" => preset_gap_star(workers, exhaustive),
        "tilde-43" => preset_tilde(workers),
        "transforms" => preset_transforms(workers),
        other => bail!(
            "unknown preset {other:?}; available: {}",
            PRESET_NAMES.join(", ")
        ),
    }
}

/// Companion-block solution on the 10-receiver combination instance, with
/// message round trips and the one-extra-node variant for three messages.
fn preset_combination_blocks(workers: usize) -> Result<PresetOutcome> {
    let mut out = PresetOutcome::new("combination-blocks");
    let f2 = FieldCtx::prime(2)?;

    let net = Network::combination(3, 5, 3)?;
    let code = netgap_core::coding::vector_solve_combination(&net, &f2, 2)?;
    let report = verify_solution(&net, &code, workers)?;
    out.step(
        "combination(3,5,3), vector q=2 t=2",
        format!("{}/{} receivers at rank 6", report.passed, report.receivers_total),
        report.all_pass(),
    );

    let field = code.scheme().field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut roundtrips = 0;
    for _ in 0..100 {
        let msg = Message::random(&field, 6, &mut rng);
        let obs = simulate(&net, &code, &msg)?;
        if (0..net.receivers().len())
            .all(|r| decode_receiver(&net, &code, r, &obs[r]).map_or(false, |d| d == msg))
        {
            roundtrips += 1;
        }
    }
    out.step(
        "100 random-message round trips",
        format!("{roundtrips}/100 exact recoveries at all receivers"),
        roundtrips == 100,
    );

    let ext_net = Network::combination(3, 4, 3)?;
    let ext_code = netgap_core::coding::vector_solve_combination(&ext_net, &f2, 1)?;
    let ext_report = verify_solution(&ext_net, &ext_code, workers)?;
    out.step(
        "combination(3,4,3) one-extra-node variant, q=2 t=1",
        format!("{}/{} receivers at rank 3", ext_report.passed, ext_report.receivers_total),
        ext_report.all_pass(),
    );
    Ok(out)
}

/// The scalar extended-RS solution over the degree-2 extension lifts to
/// exactly the native companion-block solution.
fn preset_lifting_equivalence(workers: usize) -> Result<PresetOutcome> {
    let mut out = PresetOutcome::new("lifting-equivalence");
    let f2 = FieldCtx::prime(2)?;
    let d2 = CompanionCode::new(&f2, 2)?;
    let ext = FieldCtx::with_modulus(2, 2, d2.polynomial())?;

    let mut table_ok = true;
    for a in ext.elements() {
        for b in ext.elements() {
            let la = lift_element(a, &ext, &d2)?;
            let lb = lift_element(b, &ext, &d2)?;
            table_ok &= la.add(&lb) == lift_element(ext.add(a, b), &ext, &d2)?;
            table_ok &= la.mul(&lb) == lift_element(ext.mul(a, b), &ext, &d2)?;
        }
    }
    out.step(
        "lift is a field isomorphism (16 sums, 16 products)",
        "exhaustive table comparison".into(),
        table_ok,
    );

    let net = Network::combination(3, 5, 3)?;
    let scalar = scalar_solve_combination(&net, &ext)?;
    let scalar_report = verify_solution(&net, &scalar, workers)?;
    out.step(
        "scalar extended-RS [5,3] over the extension",
        format!("{}/{} receivers", scalar_report.passed, scalar_report.receivers_total),
        scalar_report.all_pass(),
    );

    let lifted = lift_network_code(&scalar, &d2)?;
    let native = netgap_core::coding::vector_solve_combination(&net, &f2, 2)?;
    let same_edges =
        (0..net.edges().len()).all(|e| lifted.edge_matrix(e) == native.edge_matrix(e));
    let lifted_report = verify_solution(&net, &lifted, workers)?;
    let native_report = verify_solution(&net, &native, workers)?;
    out.step(
        "lifted scalar equals native vector solution",
        format!(
            "edge-for-edge equal: {same_edges}; pass sets {}/{} vs {}/{}",
            lifted_report.passed,
            lifted_report.receivers_total,
            native_report.passed,
            native_report.receivers_total
        ),
        same_edges && lifted_report.pass_set() == native_report.pass_set(),
    );
    Ok(out)
}

/// Subspace-block scalar solution at the exact supply bound, the refusal
/// one past it, and the strictly worse rank-one alternative. Both runs go
/// through the generic experiment engine.
fn preset_star_scalar(workers: usize) -> Result<PresetOutcome> {
    let mut out = PresetOutcome::new("star-scalar-exactness");

    let bound = max_middle_nodes_scalar(&BoundFamily::Star { ell: 2 }, 2)?;
    out.step(
        "block supply over F_2",
        format!("(q^2+1)(q^2+q+1) = {bound}"),
        bound == 35u32.into(),
    );

    let star_config = |r: usize| ExperimentConfig {
        family: FamilySpec {
            kind: "star".into(),
            h: None,
            r,
            s: None,
            ell: Some(2),
            extra_links: 0,
        },
        schemes: vec![SchemeTag::Scalar(2)],
        seed: 0,
        sample_cap: usize::MAX,
        exhaustive: true,
        workers,
    };

    let at_bound = run_experiment(&star_config(35))?;
    out.step(
        "star(2,35) scalar solution",
        format!(
            "{}/{} receivers at rank 4",
            at_bound.schemes[0].receivers_checked.unwrap_or(0),
            at_bound.network.receivers
        ),
        at_bound.pass,
    );

    let past_bound = run_experiment(&star_config(36))?;
    let refused = !past_bound.schemes[0].solved;
    out.step(
        "star(2,36) is refused",
        past_bound.schemes[0]
            .refusal
            .clone()
            .unwrap_or_else(|| "unexpectedly solved".into()),
        refused,
    );

    let alt = star_rank_one_alternative(2)?;
    out.step(
        "rank-one alternative caps lower",
        format!("1 + 7 = {alt} blocks"),
        alt == 8u32.into(),
    );
    Ok(out)
}

/// Identity-plus-Gabidulin vector solutions on the pair networks.
fn preset_star_vector(workers: usize, exhaustive: bool) -> Result<PresetOutcome> {
    let mut out = PresetOutcome::new("star-vector");
    let f2 = FieldCtx::prime(2)?;

    let net = Network::star(2, 16)?;
    let code = netgap_core::coding::vector_solve_star_or_plus(&net, &f2, 1)?;
    let report = verify_solution(&net, &code, workers)?;
    out.step(
        "star(2,16) vector q=2 t=1 (full code)",
        format!("{}/{} receivers at rank 4", report.passed, report.receivers_total),
        report.all_pass(),
    );

    let net = Network::star(2, 100)?;
    let code = netgap_core::coding::vector_solve_star_or_plus(&net, &f2, 2)?;
    let report = verify_solution(&net, &code, workers)?;
    out.step(
        "star(2,100) vector q=2 t=2 (codewords 0..99)",
        format!("{}/{} receivers at rank 8", report.passed, report.receivers_total),
        report.all_pass(),
    );

    if exhaustive {
        let report = verify_star_vector_streaming(
            FamilyKind::Star,
            &f2,
            2,
            2,
            4096,
            PairStreamMode::Exhaustive,
            workers,
        )?;
        out.step(
            "star(2,4096) exhaustive streaming check",
            format!(
                "{}/{} receivers at rank 8",
                report.passed, report.receivers_total
            ),
            report.all_pass(),
        );
    }
    Ok(out)
}

/// Field-size gap at the full vector supply of the pair network.
fn preset_gap_star(workers: usize, exhaustive: bool) -> Result<PresetOutcome> {
    let mut out = PresetOutcome::new("gap-star");
    let report = gap_report(&GapRequest {
        family: BoundFamily::Star { ell: 2 },
        q: 2,
        t: 2,
        r: None,
        sample_cap: 1000,
        seed: 17,
        exhaustive,
        workers,
    })?;
    out.step(
        "star(2,4096): min scalar field",
        format!("q_s = {} (vector alphabet {})", report.scalar_min_field, report.vector_field),
        report.scalar_min_field == 8,
    );
    out.step(
        "gap ratio and exponent",
        format!(
            "ratio {} = q^{}; leading term {:?}, residual {:?}",
            report.gap_ratio, report.gap_exponent, report.leading_term, report.residual
        ),
        report.gap_ratio == 4.0 && report.gap_exponent == 2.0,
    );
    out.step(
        "vector instance verified",
        report.verification.mode.clone(),
        report.verification.all_pass,
    );
    Ok(out)
}

/// The three-message variant: scalar cap at 42 over the order-4 field and a
/// 43-node vector solution from the searched triple-span code.
fn preset_tilde(workers: usize) -> Result<PresetOutcome> {
    let mut out = PresetOutcome::new("tilde-43");
    let f2 = FieldCtx::prime(2)?;
    let f4 = FieldCtx::new(2, 2)?;

    let bound = max_middle_nodes_scalar(&BoundFamily::Tilde, 4)?;
    out.step(
        "scalar bound at q_s = 4",
        format!("2(q_s^2 + q_s + 1) = {bound}"),
        bound == 42u32.into(),
    );

    let refused = scalar_solve_tilde(&Network::tilde(43)?, &f4).is_err();
    out.step("tilde(43) scalar over F_4 refused", "supply exhausted".into(), refused);

    let code = triple_span_search(&f2, 6, 2, 4, 43)?;
    let verified = code.verify_property().is_ok();
    out.step(
        "triple-span search (6,2) target 43",
        format!("found {} codewords, exhaustively triple-verified", code.len()),
        code.len() >= 43 && verified,
    );

    let net = Network::tilde(43)?;
    let vec_code = netgap_core::coding::vector_solve_tilde(&net, &f2, 2)?;
    let report = verify_solution(&net, &vec_code, workers)?;
    out.step(
        "tilde(43) vector q=2 t=2",
        format!("{}/{} receivers at rank 6", report.passed, report.receivers_total),
        report.all_pass(),
    );
    Ok(out)
}

/// Min-cut normalization and parallel-edge removal preserve solvability.
fn preset_transforms(workers: usize) -> Result<PresetOutcome> {
    let mut out = PresetOutcome::new("transforms");
    let f2 = FieldCtx::prime(2)?;
    let net = Network::star(2, 5)?;

    let cuts_before: Vec<usize> = (0..net.receivers().len())
        .map(|i| net.min_cut(i).unwrap())
        .collect();
    out.step(
        "star(2,5) receiver min-cuts",
        format!("{cuts_before:?}"),
        cuts_before.iter().all(|&c| c == 5),
    );

    let code = netgap_core::coding::vector_solve_star_or_plus(&net, &f2, 1)?;
    let base = verify_solution(&net, &code, workers)?;
    out.step(
        "base vector solution",
        format!("{}/{}", base.passed, base.receivers_total),
        base.all_pass(),
    );

    let norm = net.normalize_min_cut();
    let cuts_after: Vec<usize> = (0..norm.network.receivers().len())
        .map(|i| norm.network.min_cut(i).unwrap())
        .collect();
    out.step(
        "after min-cut normalization",
        format!("{cuts_after:?}"),
        cuts_after.iter().all(|&c| c == 4),
    );
    let code_n = transfer_code(&norm, &code)?;
    let rep_n = verify_solution(&norm.network, &code_n, workers)?;
    out.step(
        "code carried across normalization",
        format!("{}/{}", rep_n.passed, rep_n.receivers_total),
        rep_n.all_pass(),
    );

    let simple = net.remove_parallel_edges();
    let cuts_preserved = (0..net.receivers().len())
        .all(|i| simple.network.min_cut(i).unwrap() == net.min_cut(i).unwrap());
    out.step(
        "parallel edges removed",
        format!(
            "simple: {}; min-cuts preserved: {cuts_preserved}",
            simple.network.is_simple()
        ),
        simple.network.is_simple() && cuts_preserved,
    );
    let code_s = transfer_code(&simple, &code)?;
    let rep_s = verify_solution(&simple.network, &code_s, workers)?;
    out.step(
        "code carried across deparallelization",
        format!("{}/{}", rep_s.passed, rep_s.receivers_total),
        rep_s.all_pass(),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiment_rejects_empty_schemes() {
        let config = ExperimentConfig {
            family: FamilySpec {
                kind: "tilde".into(),
                h: None,
                r: 5,
                s: None,
                ell: None,
                extra_links: 0,
            },
            schemes: vec![],
            seed: 0,
            sample_cap: 100,
            exhaustive: false,
            workers: 0,
        };
        assert!(run_experiment(&config).is_err());
    }

    #[test]
    fn experiment_bundle_is_deterministic() {
        let config = ExperimentConfig {
            family: FamilySpec {
                kind: "combination".into(),
                h: Some(3),
                r: 5,
                s: Some(3),
                ell: None,
                extra_links: 0,
            },
            schemes: vec![SchemeTag::Vector { q: 2, t: 2 }, SchemeTag::Scalar(4)],
            seed: 9,
            sample_cap: 1000,
            exhaustive: false,
            workers: 0,
        };
        let a = serde_json::to_string_pretty(&run_experiment(&config).unwrap()).unwrap();
        let b = serde_json::to_string_pretty(&run_experiment(&config).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"pass\": true"));
    }

    #[test]
    fn experiment_records_refusals() {
        let config = ExperimentConfig {
            family: FamilySpec {
                kind: "star".into(),
                h: None,
                r: 36,
                s: None,
                ell: Some(2),
                extra_links: 0,
            },
            schemes: vec![SchemeTag::Scalar(2)],
            seed: 0,
            sample_cap: 100,
            exhaustive: false,
            workers: 0,
        };
        let bundle = run_experiment(&config).unwrap();
        assert!(!bundle.pass);
        assert!(!bundle.schemes[0].solved);
        assert!(bundle.schemes[0].refusal.is_some());
    }

    #[test]
    fn presets_small_ones_pass() {
        for name in ["combination-blocks", "lifting-equivalence", "transforms"] {
            let out = run_preset(name, 0, false).unwrap();
            assert!(out.pass, "{name} failed: {:#?}", out.steps);
        }
    }
}
