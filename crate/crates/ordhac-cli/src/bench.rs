//! The `bench` subcommands: sample-count convergence of the randomized
//! approximation, and the planted-copy comparison of the ordered method
//! against the classical and saturated baselines.

use std::fs;
use std::path::Path;

use ordhac::clustering::{
    classical_hc, exact_opt, hc_plus, nfold_approximation, ordered_agglomerate, sample_rng,
    ClusteringError,
};
use ordhac::datagen::{planted_copies, random_space};
use ordhac::dendrogram::PartialDendrogram;
use ordhac::dissimilarity::{
    pnorm_distance, DissimilarityMatrix, LinkageKind, OrderedDissimilaritySpace, TieTolerance,
};
use ordhac::metrics::{ari, best_cut_by_ari, diff_variance, loops, normalized_fits, oari};
use ordhac::partition::LabeledPartition;
use ordhac::poset::base_space_projection;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bundle::read_bundle;
use crate::commands::{
    check_nonnegative, check_positive, check_probability, parse_linkage_list,
};
use crate::svg::{render_grid, Panel, Series};
use crate::{CompareArgs, ConvergenceArgs, Fail};

// Every random draw comes from a ChaCha8 generator keyed by the master seed
// XORed with a purpose tag and a cell index, so results are reproducible and
// independent of thread count or evaluation order.
const TAG_SPACE: u64 = 1;
const TAG_POOL: u64 = 2;
const TAG_BOOT: u64 = 3;
const TAG_BASE: u64 = 4;
const TAG_NOISE: u64 = 5;
const TAG_ORDERED: u64 = 6;
const TAG_CLASSICAL: u64 = 7;
const TAG_PLUS: u64 = 8;

fn derived_seed(master: u64, tag: u64, cell: u64) -> u64 {
    master ^ (tag << 56) ^ cell
}

fn val<E: std::fmt::Display>(e: E) -> Fail {
    Fail::Validation(e.to_string())
}

pub fn parse_usize_list(s: &str, name: &str) -> Result<Vec<usize>, Fail> {
    let values: Vec<usize> = s
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Fail::Validation(format!("{name}: bad count {part:?}")))
        })
        .collect::<Result<_, _>>()?;
    if values.is_empty() || values.iter().any(|&v| v == 0) {
        return Err(Fail::Validation(format!("{name}: counts must be positive")));
    }
    Ok(values)
}

/// Parses `start:stop:step` (inclusive stop) or a comma-separated list.
pub fn parse_alpha_grid(s: &str) -> Result<Vec<f64>, Fail> {
    let bad = |msg: &str| Fail::Validation(format!("--alpha {s:?}: {msg}"));
    let values: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad("bad number")))
            .collect::<Result<_, _>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0) {
            return Err(bad("step must be positive and all values finite"));
        }
        if stop < start {
            return Err(bad("stop must not be below start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| ((start + k as f64 * step) * 1e10).round() / 1e10)
            .collect()
    } else {
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad("bad number")))
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(bad("grid is empty"));
    }
    for &v in &values {
        check_nonnegative(v, "--alpha")?;
    }
    Ok(values)
}

fn write_text(path: &Path, content: &str) -> Result<(), Fail> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| Fail::Io(format!("{}: {e}", parent.display())))?;
        }
    }
    fs::write(path, content).map_err(|e| Fail::Io(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// bench convergence
// ---------------------------------------------------------------------------

struct ConvRow {
    instance: String,
    seed: u64,
    linkage: LinkageKind,
    reference: &'static str,
    n_samples: usize,
    e_ari: f64,
    e_oari: f64,
    e_norm_fit: f64,
    e_opt_fit: f64,
}

struct PoolSample {
    fit: f64,
    u: DissimilarityMatrix<f64>,
    theta: PartialDendrogram<f64>,
}

pub fn run_convergence(a: &ConvergenceArgs) -> Result<(), Fail> {
    if a.n < 2 {
        return Err(Fail::Validation("--n must be at least 2".into()));
    }
    check_probability(a.p, "--p")?;
    if a.t < 1 {
        return Err(Fail::Validation("--t must be at least 1".into()));
    }
    for (value, name) in [
        (a.spaces, "--spaces"),
        (a.pool, "--pool"),
        (a.draws, "--draws"),
        (a.budget, "--budget"),
    ] {
        if value < 1 {
            return Err(Fail::Validation(format!("{name} must be at least 1")));
        }
    }
    check_positive(a.epsilon, "--epsilon")?;
    if a.pnorm < 1 {
        return Err(Fail::Validation("--pnorm must be at least 1".into()));
    }
    let linkages = parse_linkage_list(&a.linkage)?;
    let grid = parse_usize_list(&a.grid, "--grid")?;

    let mut rows: Vec<ConvRow> = Vec::new();
    for j in 0..a.spaces {
        let mut space_rng = sample_rng(derived_seed(a.seed, TAG_SPACE, j as u64), 0);
        let space: OrderedDissimilaritySpace<f64> =
            random_space(a.n, a.p, a.t, &mut space_rng).map_err(val)?;
        let instance = format!("conv-n{}-p{}-t{}-space{}", a.n, a.p, a.t, j);
        for (i, &kind) in linkages.iter().enumerate() {
            let cell = (i * a.spaces + j) as u64;
            // The reference solution is the exhaustive optimum when the
            // search fits the budget; otherwise the best pool sample.
            let exact_ref = match exact_opt(&space, kind, a.epsilon, a.pnorm, TieTolerance::Exact, a.budget)
            {
                Ok(results) => {
                    let best = results.into_iter().next().expect("search yields a result");
                    let u = best
                        .dendrogram
                        .complete_ultrametric(a.epsilon)
                        .map_err(val)?;
                    Some((best.dendrogram, best.fit, u))
                }
                Err(ClusteringError::SearchBudgetExceeded { .. }) => None,
                Err(e) => return Err(val(e)),
            };

            let pool_master = derived_seed(a.seed, TAG_POOL, cell);
            let pool: Vec<PoolSample> = (0..a.pool)
                .into_par_iter()
                .map(|k| -> Result<PoolSample, Fail> {
                    let mut rng = sample_rng(pool_master, k as u64);
                    let theta = ordered_agglomerate(&space, kind, TieTolerance::Exact, &mut rng);
                    let u = theta.complete_ultrametric(a.epsilon).map_err(val)?;
                    let fit = pnorm_distance(&u, space.dist(), a.pnorm).map_err(val)?;
                    Ok(PoolSample { fit, u, theta })
                })
                .collect::<Result<Vec<_>, Fail>>()?;

            let (ref_theta, ref_fit, ref_u, reference) = match &exact_ref {
                Some((theta, fit, u)) => (theta, *fit, u, "exact"),
                None => {
                    let best = (0..pool.len())
                        .min_by(|&x, &y| {
                            pool[x]
                                .fit
                                .partial_cmp(&pool[y].fit)
                                .unwrap_or(std::cmp::Ordering::Equal)
                                .then(x.cmp(&y))
                        })
                        .expect("pool is nonempty");
                    (&pool[best].theta, pool[best].fit, &pool[best].u, "pool")
                }
            };
            let ref_partition = ref_theta.theta_infinity();
            let ref_projection =
                base_space_projection(space.order(), &ref_partition).map_err(val)?;

            let fits: Vec<f64> = pool.iter().map(|s| s.fit).collect();
            let norm_fits = normalized_fits(&fits, Some(ref_fit));
            let mut aris = Vec::with_capacity(pool.len());
            let mut oaris = Vec::with_capacity(pool.len());
            let mut opt_dists = Vec::with_capacity(pool.len());
            for sample in &pool {
                let partition = sample.theta.theta_infinity();
                aris.push(ari(&partition, &ref_partition).map_err(val)?);
                let projection =
                    base_space_projection(space.order(), &partition).map_err(val)?;
                oaris.push(oari(&projection, &ref_projection).map_err(val)?.mean);
                opt_dists.push(pnorm_distance(&sample.u, ref_u, a.pnorm).map_err(val)?);
            }
            let opt_max = opt_dists.iter().cloned().fold(0.0_f64, f64::max);
            let opt_norms: Vec<f64> = opt_dists
                .iter()
                .map(|&d| if opt_max > 0.0 { 1.0 - d / opt_max } else { 1.0 })
                .collect();

            // Bootstrap the pool into the expected quality of the best of
            // `n_samples` runs, drawing with replacement.
            let mut boot = sample_rng(derived_seed(a.seed, TAG_BOOT, cell), 0);
            for &n_samples in &grid {
                let mut sums = [0.0_f64; 4];
                for _ in 0..a.draws {
                    let mut best: Option<usize> = None;
                    for _ in 0..n_samples {
                        let pick = boot.random_range(0..pool.len());
                        best = Some(match best {
                            None => pick,
                            Some(cur) => {
                                if (fits[pick], pick) < (fits[cur], cur) {
                                    pick
                                } else {
                                    cur
                                }
                            }
                        });
                    }
                    let chosen = best.expect("at least one draw");
                    sums[0] += aris[chosen];
                    sums[1] += oaris[chosen];
                    sums[2] += norm_fits[chosen];
                    sums[3] += opt_norms[chosen];
                }
                let scale = a.draws as f64;
                rows.push(ConvRow {
                    instance: instance.clone(),
                    seed: a.seed,
                    linkage: kind,
                    reference,
                    n_samples,
                    e_ari: sums[0] / scale,
                    e_oari: sums[1] / scale,
                    e_norm_fit: sums[2] / scale,
                    e_opt_fit: sums[3] / scale,
                });
            }
        }
    }

    fs::create_dir_all(&a.out)?;
    let mut csv = String::from(
        "instance,seed,linkage,reference,n_samples,e_ari,e_oari,e_norm_fit,e_opt_fit\n",
    );
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.instance,
            r.seed,
            r.linkage,
            r.reference,
            r.n_samples,
            r.e_ari,
            r.e_oari,
            r.e_norm_fit,
            r.e_opt_fit
        ));
    }
    let csv_path = a.out.join("bench.csv");
    write_text(&csv_path, &csv)?;
    let meta = serde_json::json!({
        "command": "bench convergence",
        "n": a.n, "p": a.p, "t": a.t,
        "spaces": a.spaces, "pool": a.pool, "draws": a.draws,
        "grid": grid,
        "linkages": linkages.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
        "epsilon": a.epsilon, "pnorm": a.pnorm,
        "seed": a.seed, "budget": a.budget,
        "bootstrap": "with-replacement",
    });
    write_text(
        &a.out.join("bench_meta.json"),
        &(serde_json::to_string_pretty(&meta).map_err(val)? + "\n"),
    )?;
    println!("wrote {} ({} rows)", csv_path.display(), rows.len());

    if a.svg {
        let measures: [(&str, fn(&ConvRow) -> f64); 4] = [
            ("E[ARI]", |r| r.e_ari),
            ("E[oARI]", |r| r.e_oari),
            ("E[norm fit]", |r| r.e_norm_fit),
            ("E[opt fit]", |r| r.e_opt_fit),
        ];
        let palette = crate::svg::PALETTE;
        let panels: Vec<Panel> = linkages
            .iter()
            .map(|&kind| {
                let series = measures
                    .iter()
                    .enumerate()
                    .map(|(mi, (label, extract))| {
                        let points: Vec<(f64, f64)> = grid
                            .iter()
                            .map(|&nn| {
                                let matching: Vec<f64> = rows
                                    .iter()
                                    .filter(|r| r.linkage == kind && r.n_samples == nn)
                                    .map(extract)
                                    .collect();
                                let mean =
                                    matching.iter().sum::<f64>() / matching.len().max(1) as f64;
                                (nn as f64, mean)
                            })
                            .collect();
                        Series {
                            label: (*label).to_string(),
                            color: palette[mi % palette.len()],
                            points,
                            band: None,
                        }
                    })
                    .collect();
                Panel {
                    title: format!("{kind} linkage"),
                    x_label: "samples".into(),
                    y_label: "mean over spaces".into(),
                    series,
                }
            })
            .collect();
        let svg_path = a.out.join("bench.svg");
        write_text(&svg_path, &render_grid(&panels, panels.len().max(1)))?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bench compare
// ---------------------------------------------------------------------------

const METHODS: [&str; 3] = ["classical", "plus", "ordered"];

struct CmpRun {
    alpha: f64,
    linkage: LinkageKind,
    method: &'static str,
    instance: String,
    seed: u64,
    ari: f64,
    oari: f64,
    loops: f64,
}

/// ari/oari/loops of the best cut of `theta` against the planted partition.
fn planted_scores(
    space: &OrderedDissimilaritySpace<f64>,
    planted: &LabeledPartition,
    planted_projection: &ordhac::poset::BoolRelation,
    theta: &PartialDendrogram<f64>,
) -> Result<(f64, f64, f64), Fail> {
    let (cut, ari_value) = best_cut_by_ari(theta, planted).map_err(val)?;
    let projection = base_space_projection(space.order(), &cut).map_err(val)?;
    let oari_value = oari(&projection, planted_projection).map_err(val)?.mean;
    let loops_value = loops(space.order(), &cut).map_err(val)?;
    Ok((ari_value, oari_value, loops_value))
}

/// Random base component for generated planted instances: distances are
/// rescaled below one so the cross-copy offsets dominate within-copy levels
/// and the default saturation height 1.0 exceeds every comparable distance.
fn random_base(
    n: usize,
    p: f64,
    t: usize,
    rng: &mut ChaCha8Rng,
) -> Result<OrderedDissimilaritySpace<f64>, Fail> {
    let space: OrderedDissimilaritySpace<f64> = random_space(n, p, t, rng).map_err(val)?;
    let values = space.dist().condensed();
    let max = values.iter().cloned().fold(0.0_f64, f64::max);
    if max <= 0.0 {
        return Err(Fail::Validation("degenerate base: all distances are zero".into()));
    }
    let scale = max * 1.02;
    let scaled: Vec<f64> = values.iter().map(|v| v / scale).collect();
    let dist = DissimilarityMatrix::from_condensed(space.len(), scaled).map_err(val)?;
    OrderedDissimilaritySpace::new(space.order().clone(), dist).map_err(val)
}

pub fn run_compare(a: &CompareArgs) -> Result<(), Fail> {
    let alphas = parse_alpha_grid(&a.alpha)?;
    let linkages = parse_linkage_list(&a.linkage)?;
    if a.instances < 1 {
        return Err(Fail::Validation("--instances must be at least 1".into()));
    }
    if a.samples < 1 {
        return Err(Fail::Validation("--samples must be at least 1".into()));
    }
    check_positive(a.epsilon, "--epsilon")?;
    if a.pnorm < 1 {
        return Err(Fail::Validation("--pnorm must be at least 1".into()));
    }
    check_nonnegative(a.sigma, "--sigma")?;
    if !a.max.is_finite() {
        return Err(Fail::Validation("--max must be finite".into()));
    }

    // Base spaces: one shared base from a bundle, or one generated base per
    // instance index (shared across the alpha grid for paired curves).
    let bases: Vec<(String, OrderedDissimilaritySpace<f64>)> = match &a.base {
        Some(dir) => {
            let bundle = read_bundle(dir)?;
            if bundle.space.len() < 2 {
                return Err(Fail::Validation("base instance needs at least 2 elements".into()));
            }
            vec![(bundle.meta.instance_id, bundle.space)]
        }
        None => {
            if a.base_n < 2 {
                return Err(Fail::Validation("--base-n must be at least 2".into()));
            }
            check_probability(a.base_p, "--base-p")?;
            if a.base_t < 1 {
                return Err(Fail::Validation("--base-t must be at least 1".into()));
            }
            (0..a.instances)
                .map(|r| {
                    let mut rng = sample_rng(derived_seed(a.seed, TAG_BASE, r as u64), 0);
                    Ok((
                        format!("base{r}"),
                        random_base(a.base_n, a.base_p, a.base_t, &mut rng)?,
                    ))
                })
                .collect::<Result<Vec<_>, Fail>>()?
        }
    };
    let n0 = bases[0].1.len();
    let copies = a.copies.unwrap_or_else(|| 200usize.div_ceil(n0).max(2));
    if copies < 2 {
        return Err(Fail::Validation("--copies must be at least 2".into()));
    }

    let tol = TieTolerance::Exact;
    let mut runs: Vec<CmpRun> = Vec::new();
    for (ai, &alpha) in alphas.iter().enumerate() {
        for r in 0..a.instances {
            let (base_id, base) = &bases[r % bases.len()];
            let noise_cell = (ai * a.instances + r) as u64;
            let mut noise_rng = sample_rng(derived_seed(a.seed, TAG_NOISE, noise_cell), 0);
            let instance =
                planted_copies(base, copies, alpha, a.sigma, &mut noise_rng).map_err(val)?;
            let instance_id = format!("cmp-a{alpha}-{base_id}-r{r}");
            let planted_projection =
                base_space_projection(instance.space.order(), &instance.planted).map_err(val)?;
            for (li, &kind) in linkages.iter().enumerate() {
                let cell = (noise_cell as usize * linkages.len() + li) as u64;

                let classical_seed = derived_seed(a.seed, TAG_CLASSICAL, cell);
                let history = classical_hc(
                    instance.space.dist(),
                    kind,
                    tol,
                    &mut sample_rng(classical_seed, 0),
                );
                let classical_theta =
                    PartialDendrogram::from_merge_history(history).map_err(val)?;

                let plus_seed = derived_seed(a.seed, TAG_PLUS, cell);
                let plus_history =
                    hc_plus(&instance.space, kind, a.max, tol, &mut sample_rng(plus_seed, 0))?;
                let plus_theta =
                    PartialDendrogram::from_merge_history(plus_history).map_err(val)?;

                let ordered_seed = derived_seed(a.seed, TAG_ORDERED, cell);
                let outcome = nfold_approximation(
                    &instance.space,
                    kind,
                    a.samples,
                    a.epsilon,
                    a.pnorm,
                    tol,
                    ordered_seed,
                )?;

                for (method, theta, method_seed) in [
                    ("classical", &classical_theta, classical_seed),
                    ("plus", &plus_theta, plus_seed),
                    ("ordered", &outcome.best.dendrogram, ordered_seed),
                ] {
                    let (ari_value, oari_value, loops_value) = planted_scores(
                        &instance.space,
                        &instance.planted,
                        &planted_projection,
                        theta,
                    )?;
                    runs.push(CmpRun {
                        alpha,
                        linkage: kind,
                        method,
                        instance: instance_id.clone(),
                        seed: method_seed,
                        ari: ari_value,
                        oari: oari_value,
                        loops: loops_value,
                    });
                }
            }
        }
    }

    fs::create_dir_all(&a.out)?;
    let mut run_csv =
        String::from("instance,seed,alpha,linkage,method,ari,oari,loops\n");
    for r in &runs {
        run_csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.instance, r.seed, r.alpha, r.linkage, r.method, r.ari, r.oari, r.loops
        ));
    }
    let runs_path = a.out.join("bench_runs.csv");
    write_text(&runs_path, &run_csv)?;

    // Aggregate: means per (alpha, linkage, method); uncertainty bands use
    // the paired differences convention — ordered and plus carry the spread
    // of (ordered - plus), classical carries the spread of
    // (classical - ordered). With fewer than two instances the spread is 0.
    struct SummaryRow {
        alpha: f64,
        linkage: LinkageKind,
        method: &'static str,
        mean: [f64; 3],
        std: [f64; 3],
    }
    let collect = |alpha: f64, kind: LinkageKind, method: &str, pick: usize| -> Vec<f64> {
        runs.iter()
            .filter(|r| r.alpha == alpha && r.linkage == kind && r.method == method)
            .map(|r| [r.ari, r.oari, r.loops][pick])
            .collect()
    };
    let paired_std = |x: &[f64], y: &[f64]| -> f64 {
        if x.len() < 2 {
            return 0.0;
        }
        match diff_variance(x, y) {
            Ok((_, std)) if std.is_finite() => std,
            _ => 0.0,
        }
    };
    let mut summary: Vec<SummaryRow> = Vec::new();
    for &alpha in &alphas {
        for &kind in &linkages {
            let mut mean = [[0.0_f64; 3]; 3];
            let mut std = [[0.0_f64; 3]; 3];
            for metric in 0..3 {
                let by_method: Vec<Vec<f64>> = METHODS
                    .iter()
                    .map(|m| collect(alpha, kind, m, metric))
                    .collect();
                let (cl, pl, ord) = (&by_method[0], &by_method[1], &by_method[2]);
                for (mi, values) in by_method.iter().enumerate() {
                    mean[mi][metric] =
                        values.iter().sum::<f64>() / values.len().max(1) as f64;
                }
                std[0][metric] = paired_std(cl, ord);
                std[1][metric] = paired_std(pl, ord);
                std[2][metric] = paired_std(ord, pl);
            }
            for (mi, &method) in METHODS.iter().enumerate() {
                summary.push(SummaryRow {
                    alpha,
                    linkage: kind,
                    method,
                    mean: mean[mi],
                    std: std[mi],
                });
            }
        }
    }

    let mut csv = String::from(
        "instance,seed,alpha,linkage,method,instances,mean_ari,std_ari,mean_oari,std_oari,mean_loops,std_loops\n",
    );
    for s in &summary {
        csv.push_str(&format!(
            "cmp-a{}-all,{},{},{},{},{},{},{},{},{},{},{}\n",
            s.alpha,
            a.seed,
            s.alpha,
            s.linkage,
            s.method,
            a.instances,
            s.mean[0],
            s.std[0],
            s.mean[1],
            s.std[1],
            s.mean[2],
            s.std[2]
        ));
    }
    let csv_path = a.out.join("bench.csv");
    write_text(&csv_path, &csv)?;
    let meta = serde_json::json!({
        "command": "bench compare",
        "alphas": alphas,
        "instances": a.instances,
        "copies": copies,
        "sigma": a.sigma,
        "samples": a.samples,
        "epsilon": a.epsilon,
        "pnorm": a.pnorm,
        "saturation": a.max,
        "linkages": linkages.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
        "base": a.base.as_ref().map(|p| p.display().to_string()),
        "base_n": a.base_n, "base_p": a.base_p, "base_t": a.base_t,
        "seed": a.seed,
        "bands": "paired differences: ordered/plus vs each other, classical vs ordered",
    });
    write_text(
        &a.out.join("bench_meta.json"),
        &(serde_json::to_string_pretty(&meta).map_err(val)? + "\n"),
    )?;
    println!(
        "wrote {} ({} groups) and {} ({} runs)",
        csv_path.display(),
        summary.len(),
        runs_path.display(),
        runs.len()
    );

    if a.svg {
        let metric_names = ["ARI", "oARI", "loops"];
        let colors = ["#1f77b4", "#d62728", "#2ca02c"];
        let mut panels = Vec::new();
        for (metric, name) in metric_names.iter().enumerate() {
            for &kind in &linkages {
                let series = METHODS
                    .iter()
                    .enumerate()
                    .map(|(mi, method)| {
                        let mut points = Vec::new();
                        let mut band = Vec::new();
                        for s in &summary {
                            if s.linkage == kind && s.method == *method {
                                points.push((s.alpha, s.mean[metric]));
                                band.push((
                                    s.alpha,
                                    s.mean[metric] - s.std[metric],
                                    s.mean[metric] + s.std[metric],
                                ));
                            }
                        }
                        Series {
                            label: (*method).to_string(),
                            color: colors[mi],
                            points,
                            band: Some(band),
                        }
                    })
                    .collect();
                panels.push(Panel {
                    title: format!("{name} — {kind}"),
                    x_label: "alpha".into(),
                    y_label: (*name).to_string(),
                    series,
                });
            }
        }
        let svg_path = a.out.join("bench.svg");
        write_text(&svg_path, &render_grid(&panels, linkages.len()))?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}
