//! The `gen`, `cluster`, and `eval` subcommands.

use std::fs;
use std::path::PathBuf;

use ordhac::clustering::{
    classical_hc, exact_opt, hc_plus, nfold_approximation, sample_rng, ClusteringResult,
    ClusteringResultRecord, SampleSeed,
};
use ordhac::dendrogram::{MergeHistory, PartialDendrogram};
use ordhac::dissimilarity::{
    pnorm_distance, LinkageKind, OrderedDissimilaritySpace, TieTolerance,
};
use ordhac::datagen::{planted_copies, random_space};
use ordhac::metrics::{best_cut_by_ari, loops, normalized_fits, oari, MetricsRecord};
use ordhac::partition::LabeledPartition;
use ordhac::poset::base_space_projection;
use serde::{Deserialize, Serialize};

use crate::bundle::{read_bundle, read_file, write_bundle, write_file, Meta};
use crate::{ClusterArgs, EvalArgs, Fail, GenArgs};

/// Shape of `result.json`: the records produced by one `cluster` run plus
/// enough provenance to score them later.
#[derive(Debug, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub instance_id: String,
    pub method: String,
    pub linkage: String,
    /// Fit of every drawn sample, in stream order (randomized method only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_fits: Option<Vec<f64>>,
    pub results: Vec<ClusteringResultRecord>,
}

pub fn parse_linkage(s: &str) -> Result<LinkageKind, Fail> {
    s.parse::<LinkageKind>()
        .map_err(|_| Fail::Validation(format!("unknown linkage {s:?} (expected single, average, or complete)")))
}

pub fn parse_linkage_list(s: &str) -> Result<Vec<LinkageKind>, Fail> {
    let kinds: Vec<LinkageKind> = s
        .split(',')
        .map(|part| parse_linkage(part.trim()))
        .collect::<Result<_, _>>()?;
    if kinds.is_empty() {
        return Err(Fail::Validation("at least one linkage is required".into()));
    }
    Ok(kinds)
}

pub fn tie_tolerance(abs: Option<f64>, rel: Option<f64>) -> Result<TieTolerance<f64>, Fail> {
    match (abs, rel) {
        (Some(_), Some(_)) => Err(Fail::Validation(
            "--tie-abs and --tie-rel are mutually exclusive".into(),
        )),
        (Some(a), None) if a.is_finite() && a >= 0.0 => Ok(TieTolerance::Absolute(a)),
        (None, Some(r)) if r.is_finite() && r >= 0.0 => Ok(TieTolerance::Relative(r)),
        (None, None) => Ok(TieTolerance::Exact),
        _ => Err(Fail::Validation(
            "tie tolerances must be finite and nonnegative".into(),
        )),
    }
}

pub fn check_probability(value: f64, name: &str) -> Result<(), Fail> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Fail::Validation(format!("{name} must lie in [0, 1], got {value}")))
    }
}

pub fn check_positive(value: f64, name: &str) -> Result<(), Fail> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Fail::Validation(format!("{name} must be positive and finite, got {value}")))
    }
}

pub fn check_nonnegative(value: f64, name: &str) -> Result<(), Fail> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Fail::Validation(format!(
            "{name} must be nonnegative and finite, got {value}"
        )))
    }
}

pub fn run_gen(a: GenArgs) -> Result<(), Fail> {
    if let Some(base_dir) = &a.base {
        check_nonnegative(a.alpha, "--alpha")?;
        check_nonnegative(a.sigma, "--sigma")?;
        let base = read_bundle(base_dir)?;
        let n0 = base.space.len();
        if n0 < 2 {
            return Err(Fail::Validation(format!(
                "base instance has {n0} elements; need at least 2"
            )));
        }
        let copies = a.copies.unwrap_or_else(|| 200usize.div_ceil(n0).max(2));
        if copies < 2 {
            return Err(Fail::Validation(format!("--copies must be at least 2, got {copies}")));
        }
        let mut rng = sample_rng(a.seed, 0);
        let instance = planted_copies(&base.space, copies, a.alpha, a.sigma, &mut rng)
            .map_err(|e| Fail::Validation(e.to_string()))?;
        let id = format!(
            "planted-{}-x{}-a{}-s{}-seed{}",
            base.meta.instance_id, copies, a.alpha, a.sigma, a.seed
        );
        let meta = Meta {
            instance_id: id.clone(),
            n: instance.space.len(),
            seed: a.seed,
            kind: "planted".into(),
            link_probability: None,
            ties_per_level: None,
            copies: Some(copies),
            alpha: Some(a.alpha),
            sigma: Some(a.sigma),
            base_id: Some(base.meta.instance_id.clone()),
        };
        write_bundle(&a.out, &instance.space, Some(&instance.planted), &meta)?;
        println!(
            "wrote planted instance {id}: {} elements ({} copies of {}), {} planted blocks -> {}",
            instance.space.len(),
            copies,
            n0,
            instance.planted.block_count(),
            a.out.display()
        );
    } else {
        if a.n < 1 {
            return Err(Fail::Validation("--n must be at least 1".into()));
        }
        if a.t < 1 {
            return Err(Fail::Validation("--t must be at least 1".into()));
        }
        check_probability(a.p, "--p")?;
        let mut rng = sample_rng(a.seed, 0);
        let space: OrderedDissimilaritySpace<f64> = random_space(a.n, a.p, a.t, &mut rng)
            .map_err(|e| Fail::Validation(e.to_string()))?;
        let id = format!("random-n{}-p{}-t{}-seed{}", a.n, a.p, a.t, a.seed);
        let meta = Meta {
            instance_id: id.clone(),
            n: a.n,
            seed: a.seed,
            kind: "random".into(),
            link_probability: Some(a.p),
            ties_per_level: Some(a.t),
            copies: None,
            alpha: None,
            sigma: None,
            base_id: None,
        };
        write_bundle(&a.out, &space, None, &meta)?;
        println!(
            "wrote random instance {id}: {} elements, {} order edges -> {}",
            a.n,
            space.order().edges().len(),
            a.out.display()
        );
    }
    Ok(())
}

/// Builds a scored result for a deterministic (non-sampled) complete run.
fn scored_result(
    history: MergeHistory<f64>,
    space: &OrderedDissimilaritySpace<f64>,
    kind: LinkageKind,
    epsilon: f64,
    p: u32,
    seed: u64,
) -> Result<ClusteringResult<f64>, Fail> {
    let dendrogram = PartialDendrogram::from_merge_history(history)
        .map_err(|e| Fail::Validation(e.to_string()))?;
    let u = dendrogram
        .complete_ultrametric(epsilon)
        .map_err(|e| Fail::Validation(e.to_string()))?;
    let fit =
        pnorm_distance(&u, space.dist(), p).map_err(|e| Fail::Validation(e.to_string()))?;
    Ok(ClusteringResult {
        dendrogram,
        fit,
        epsilon,
        p,
        linkage: kind,
        seed: Some(SampleSeed { master_seed: seed, sample_index: 0 }),
    })
}

pub fn run_cluster(a: ClusterArgs) -> Result<(), Fail> {
    let kind = parse_linkage(&a.linkage)?;
    let tol = tie_tolerance(a.tie_abs, a.tie_rel)?;
    check_positive(a.epsilon, "--epsilon")?;
    if a.pnorm < 1 {
        return Err(Fail::Validation("--pnorm must be at least 1".into()));
    }
    let bundle = read_bundle(&a.instance)?;
    let space = &bundle.space;
    let out_dir = a.out.clone().unwrap_or_else(|| a.instance.clone());
    fs::create_dir_all(&out_dir)?;

    let mut sample_fits = None;
    let results: Vec<ClusteringResult<f64>> = match a.method.as_str() {
        "ordered" => {
            if a.samples < 1 {
                return Err(Fail::Validation("--samples must be at least 1".into()));
            }
            let outcome =
                nfold_approximation(space, kind, a.samples, a.epsilon, a.pnorm, tol, a.seed)?;
            sample_fits = Some(outcome.fits.clone());
            vec![outcome.best]
        }
        "classical" => {
            let mut rng = sample_rng(a.seed, 0);
            let history = classical_hc(space.dist(), kind, tol, &mut rng);
            vec![scored_result(history, space, kind, a.epsilon, a.pnorm, a.seed)?]
        }
        "plus" => {
            if !a.max.is_finite() {
                return Err(Fail::Validation("--max must be finite".into()));
            }
            let mut rng = sample_rng(a.seed, 0);
            let history = hc_plus(space, kind, a.max, tol, &mut rng)?;
            vec![scored_result(history, space, kind, a.epsilon, a.pnorm, a.seed)?]
        }
        "exact" => {
            if a.budget < 1 {
                return Err(Fail::Validation("--budget must be at least 1".into()));
            }
            exact_opt(space, kind, a.epsilon, a.pnorm, tol, a.budget)?
        }
        other => {
            return Err(Fail::Validation(format!(
                "unknown method {other:?} (expected ordered, classical, plus, or exact)"
            )))
        }
    };
    if results.is_empty() {
        return Err(Fail::Validation("clustering produced no results".into()));
    }

    let records: Vec<ClusteringResultRecord> = results.iter().map(|r| r.to_record()).collect();
    let envelope = ResultEnvelope {
        instance_id: bundle.meta.instance_id.clone(),
        method: a.method.clone(),
        linkage: kind.to_string(),
        sample_fits,
        results: records,
    };
    let result_path = out_dir.join("result.json");
    let json = serde_json::to_string_pretty(&envelope)
        .map_err(|e| Fail::Validation(format!("cannot encode results: {e}")))?;
    write_file(&result_path, &(json + "\n"))?;
    let merges_path = out_dir.join("merges.json");
    let merges_json = serde_json::to_string_pretty(&envelope.results[0].merges)
        .map_err(|e| Fail::Validation(format!("cannot encode merges: {e}")))?;
    write_file(&merges_path, &(merges_json + "\n"))?;

    println!(
        "clustered {} with method={} linkage={}: {} result(s)",
        envelope.instance_id,
        envelope.method,
        envelope.linkage,
        results.len()
    );
    for (idx, result) in results.iter().enumerate() {
        println!(
            "  result {idx}: fit={} blocks={} merges={} complete={}",
            result.fit,
            result.dendrogram.final_block_count(),
            result.dendrogram.history().merges().len(),
            result.dendrogram.is_complete()
        );
    }
    println!("wrote {} and {}", result_path.display(), merges_path.display());
    Ok(())
}

/// Accepts the envelope written by `cluster`, a bare array of result
/// records, or a single record.
fn parse_results(raw: &str) -> Result<(String, Vec<ClusteringResultRecord>), Fail> {
    if let Ok(envelope) = serde_json::from_str::<ResultEnvelope>(raw) {
        return Ok((envelope.method, envelope.results));
    }
    if let Ok(records) = serde_json::from_str::<Vec<ClusteringResultRecord>>(raw) {
        return Ok(("unknown".into(), records));
    }
    match serde_json::from_str::<ClusteringResultRecord>(raw) {
        Ok(record) => Ok(("unknown".into(), vec![record])),
        Err(e) => Err(Fail::Validation(format!("cannot parse results file: {e}"))),
    }
}

pub fn run_eval(a: EvalArgs) -> Result<(), Fail> {
    let bundle = read_bundle(&a.instance)?;
    let results_path: PathBuf = a
        .results
        .clone()
        .unwrap_or_else(|| a.instance.join("result.json"));
    let raw = read_file(&results_path)?;
    let (method, records) = parse_results(&raw)?;
    if records.is_empty() {
        return Err(Fail::Validation("results file contains no results".into()));
    }
    let order = bundle.space.order();
    let planted_projection = match &bundle.planted {
        Some(planted) => Some(
            base_space_projection(order, planted)
                .map_err(|e| Fail::Validation(e.to_string()))?,
        ),
        None => None,
    };
    let fits: Vec<f64> = records.iter().map(|r| r.fit).collect();
    let norm_fits = normalized_fits(&fits, None);

    let mut metrics = Vec::with_capacity(records.len());
    for (idx, record) in records.iter().enumerate() {
        if record.n != bundle.space.len() {
            return Err(Fail::Validation(format!(
                "result {idx} was computed on {} elements but the instance has {}",
                record.n,
                bundle.space.len()
            )));
        }
        let result = ClusteringResult::<f64>::from_record(record)?;
        let u = result
            .dendrogram
            .complete_ultrametric(result.epsilon)
            .map_err(|e| Fail::Validation(e.to_string()))?;
        let fit = pnorm_distance(&u, bundle.space.dist(), result.p)
            .map_err(|e| Fail::Validation(e.to_string()))?;
        if (fit - record.fit).abs() > 1e-9 * fit.abs().max(1.0) {
            return Err(Fail::Validation(format!(
                "result {idx}: stored fit {} does not match the fit {fit} recomputed on this \
                 instance; the results file does not correspond to this bundle",
                record.fit
            )));
        }
        let (cut, ari_value): (LabeledPartition, Option<f64>) = match &bundle.planted {
            Some(planted) => {
                let (cut, score) = best_cut_by_ari(&result.dendrogram, planted)
                    .map_err(|e| Fail::Validation(e.to_string()))?;
                (cut, Some(score))
            }
            None => (result.dendrogram.theta_infinity(), None),
        };
        let oari_value = match &planted_projection {
            Some(reference) => {
                let cut_projection = base_space_projection(order, &cut)
                    .map_err(|e| Fail::Validation(e.to_string()))?;
                Some(
                    oari(&cut_projection, reference)
                        .map_err(|e| Fail::Validation(e.to_string()))?
                        .mean,
                )
            }
            None => None,
        };
        let loops_value =
            loops(order, &cut).map_err(|e| Fail::Validation(e.to_string()))?;
        metrics.push(MetricsRecord {
            instance_id: bundle.meta.instance_id.clone(),
            method: method.clone(),
            linkage: record.linkage.to_string(),
            alpha: bundle.meta.alpha,
            ari: ari_value,
            oari: oari_value,
            loops: loops_value,
            fit,
            norm_fit: Some(norm_fits[idx]),
        });
    }

    let out_path: PathBuf = a
        .out
        .clone()
        .unwrap_or_else(|| a.instance.join("metrics.json"));
    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let json = serde_json::to_string_pretty(&metrics)
        .map_err(|e| Fail::Validation(format!("cannot encode metrics: {e}")))?;
    write_file(&out_path, &(json + "\n"))?;

    for (idx, m) in metrics.iter().enumerate() {
        let mut line = format!(
            "record {idx} [{}/{}]: loops={} fit={}",
            m.method, m.linkage, m.loops, m.fit
        );
        if let Some(v) = m.ari {
            line.push_str(&format!(" ari={v}"));
        }
        if let Some(v) = m.oari {
            line.push_str(&format!(" oari={v}"));
        }
        if let Some(v) = m.norm_fit {
            line.push_str(&format!(" norm_fit={v}"));
        }
        println!("{line}");
    }
    println!("wrote {}", out_path.display());
    Ok(())
}
