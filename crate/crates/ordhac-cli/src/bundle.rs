//! Instance bundles on disk: a directory holding `order.csv` (edge list),
//! `dist.csv` (square matrix, condensed also accepted on read),
//! `planted.csv` (optional block assignment), and `meta.json`.

use std::fs;
use std::path::Path;

use ordhac::dissimilarity::{DissimilarityMatrix, OrderedDissimilaritySpace};
use ordhac::partition::LabeledPartition;
use ordhac::poset::transitive_closure;
use serde::{Deserialize, Serialize};

use crate::Fail;

/// Reads a file, naming it in the error message.
pub fn read_file(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Io(format!("{}: {e}", path.display())))
}

/// Writes a file, naming it in the error message.
pub fn write_file(path: &Path, content: &str) -> Result<(), Fail> {
    fs::write(path, content).map_err(|e| Fail::Io(format!("{}: {e}", path.display())))
}

/// Instance metadata, written next to the data files for replayability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Meta {
    pub instance_id: String,
    pub n: usize,
    pub seed: u64,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link_probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ties_per_level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub copies: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_id: Option<String>,
}

/// A fully loaded instance bundle.
pub struct Bundle {
    pub space: OrderedDissimilaritySpace<f64>,
    pub planted: Option<LabeledPartition>,
    pub meta: Meta,
}

pub fn write_bundle(
    dir: &Path,
    space: &OrderedDissimilaritySpace<f64>,
    planted: Option<&LabeledPartition>,
    meta: &Meta,
) -> Result<(), Fail> {
    fs::create_dir_all(dir).map_err(|e| Fail::Io(format!("{}: {e}", dir.display())))?;
    let mut order_lines = String::new();
    for (a, b) in space.order().edges() {
        order_lines.push_str(&format!("{a},{b}\n"));
    }
    write_file(&dir.join("order.csv"), &order_lines)?;
    let mut dist_lines = String::new();
    for row in space.dist().square_rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        dist_lines.push_str(&fields.join(","));
        dist_lines.push('\n');
    }
    write_file(&dir.join("dist.csv"), &dist_lines)?;
    if let Some(partition) = planted {
        let mut lines = String::new();
        for x in 0..partition.len() {
            lines.push_str(&format!("{}\n", partition.block_of(x)));
        }
        write_file(&dir.join("planted.csv"), &lines)?;
    }
    let json = serde_json::to_string_pretty(meta)
        .map_err(|e| Fail::Validation(format!("cannot encode metadata: {e}")))?;
    write_file(&dir.join("meta.json"), &(json + "\n"))?;
    Ok(())
}

pub fn read_bundle(dir: &Path) -> Result<Bundle, Fail> {
    let meta_raw = read_file(&dir.join("meta.json"))?;
    let meta: Meta = serde_json::from_str(&meta_raw)
        .map_err(|e| Fail::Validation(format!("malformed meta.json: {e}")))?;
    let dist = read_dist(&read_file(&dir.join("dist.csv"))?)?;
    let n = dist.len();
    if n != meta.n {
        return Err(Fail::Validation(format!(
            "dist.csv has {n} elements but meta.json declares {}",
            meta.n
        )));
    }
    let order_raw = read_file(&dir.join("order.csv"))?;
    let mut edges = Vec::new();
    for (line_no, line) in order_raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or_else(|| {
            Fail::Validation(format!("order.csv line {}: expected \"a,b\"", line_no + 1))
        })?;
        let a: usize = a.trim().parse().map_err(|_| {
            Fail::Validation(format!("order.csv line {}: bad index", line_no + 1))
        })?;
        let b: usize = b.trim().parse().map_err(|_| {
            Fail::Validation(format!("order.csv line {}: bad index", line_no + 1))
        })?;
        edges.push((a, b));
    }
    let order = transitive_closure(n, &edges)
        .map_err(|e| Fail::Validation(format!("order.csv is not a strict order: {e}")))?;
    let space = OrderedDissimilaritySpace::new(order, dist)
        .map_err(|e| Fail::Validation(format!("inconsistent bundle: {e}")))?;
    let planted_path = dir.join("planted.csv");
    let planted = if planted_path.exists() {
        let raw = read_file(&planted_path)?;
        let labels: Vec<usize> = raw
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.trim()
                    .parse()
                    .map_err(|_| Fail::Validation("planted.csv: bad block id".into()))
            })
            .collect::<Result<_, _>>()?;
        Some(
            LabeledPartition::from_assignment(&labels)
                .map_err(|e| Fail::Validation(format!("planted.csv: {e}")))?,
        )
    } else {
        None
    };
    Ok(Bundle { space, planted, meta })
}

/// Parse `dist.csv`: an n-line square matrix, or a single condensed line of
/// the strict upper triangle in row order.
fn read_dist(raw: &str) -> Result<DissimilarityMatrix<f64>, Fail> {
    let rows: Vec<Vec<f64>> = raw
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            line.split(',')
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|_| Fail::Validation(format!("dist.csv: bad number {f:?}")))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    match rows.len() {
        0 => Err(Fail::Validation("dist.csv is empty".into())),
        1 if rows[0].len() > 1 => {
            let condensed = rows.into_iter().next().unwrap();
            let pairs = condensed.len();
            // Solve n(n-1)/2 = pairs.
            let n = (1 + (1.0 + 8.0 * pairs as f64).sqrt() as usize) / 2;
            if n * (n - 1) / 2 != pairs {
                return Err(Fail::Validation(format!(
                    "dist.csv: {pairs} values do not form a condensed matrix"
                )));
            }
            DissimilarityMatrix::from_condensed(n, condensed)
                .map_err(|e| Fail::Validation(format!("dist.csv: {e}")))
        }
        _ => DissimilarityMatrix::from_rows(&rows)
            .map_err(|e| Fail::Validation(format!("dist.csv: {e}"))),
    }
}
