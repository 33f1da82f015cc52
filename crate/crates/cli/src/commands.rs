use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use structrates_core::diagnostics::{margin_profile_for_problem, ProfileReport};
use structrates_core::estimators::{
    knn_weights, krr_fit, predict_surrogate, read_points_csv, Metric, SampleSet,
};
use structrates_core::loss::{decode, frontier_distance, margin_gap, FiniteLoss, SignedMeasure};
use structrates_core::synthetic::{rate_experiment, rate_experiment_with_workers, sig17};
use structrates_core::RateExperimentConfig;

use crate::config::{self, PredictConfig, PredictEstimator, ProfileConfig, Sampling, SimplexConfig};
use crate::error::CliError;

pub struct Common<'a> {
    pub config: &'a Path,
    pub out: &'a Path,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

type Result<T> = std::result::Result<T, CliError>;

fn create(out: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = out.join(name);
    let file = File::create(&path).map_err(CliError::io(format!("cannot create {}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(structrates_core::Error::from)?;
    let path = out.join(name);
    fs::write(&path, text + "\n").map_err(CliError::io(format!("cannot write {}", path.display())))
}

fn prepare_out(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(CliError::io(format!("cannot create output directory {}", out.display())))
}

pub fn rate_experiment_cmd(args: &Common, tolerance: f64) -> Result<()> {
    let mut config: RateExperimentConfig = config::load(args.config)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    config.validate()?;
    prepare_out(args.out)?;
    let report = match args.workers {
        Some(w) => rate_experiment_with_workers(&config, w)?,
        None => rate_experiment(&config)?,
    };
    write_json(args.out, "report.json", &report)?;
    report.write_long_csv(create(args.out, "rates_long.csv")?)?;
    report.write_summary_csv(create(args.out, "rates_summary.csv")?)?;

    println!("{:>8} {:>12} {:>12} {:>12} {:>6}", "n", "param", "mean", "stderr", "zeros");
    for s in &report.per_n {
        println!(
            "{:>8} {:>12.5e} {:>12.5e} {:>12.5e} {:>6}",
            s.n, s.hyperparameter, s.mean_excess_risk, s.stderr, s.zero_count
        );
    }
    if let Some(note) = &report.regime_note {
        println!("note: {note}");
    }
    let verdict = match (report.fitted_slope, report.theoretical_slope) {
        (Some(f), Some(t)) if (f - t).abs() <= tolerance => format!(" [PASS, tolerance {tolerance}]"),
        (Some(_), Some(_)) => format!(" [FAIL, tolerance {tolerance}]"),
        _ => String::new(),
    };
    println!("{}{verdict}", report.summary_line());
    Ok(())
}

#[derive(Serialize)]
struct ProfileOutput<'a> {
    config: &'a ProfileConfig,
    true_alpha: Option<f64>,
    #[serde(flatten)]
    report: ProfileReport,
}

pub fn margin_profile_cmd(args: &Common) -> Result<()> {
    let mut config: ProfileConfig = config::load(args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let problem = &config.problem;
    let points = match config.sampling {
        Sampling::Grid => problem.eval_grid(config.points),
        Sampling::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let support = problem.support();
            let total: f64 = support.iter().map(|(a, b)| b - a).sum();
            (0..config.points)
                .map(|_| {
                    let mut u = rng.random::<f64>() * total;
                    for &(a, b) in support {
                        if u < b - a {
                            return a + u;
                        }
                        u -= b - a;
                    }
                    support[support.len() - 1].1
                })
                .collect()
        }
    };
    let profile = margin_profile_for_problem(problem, &points, config.thresholds.as_deref())?;
    let report = ProfileReport::build(&profile, config.fit_window)?;
    prepare_out(args.out)?;
    profile.write_csv(create(args.out, "profile.csv")?)?;

    let truth = problem.margin_exponent();
    match (report.alpha_hat, truth) {
        (Some(a), Some(t)) => {
            let ok = (a - t).abs() <= config.tolerance;
            println!(
                "alpha_hat {a:.4} vs true {t:.4} [{}, tolerance {}]",
                if ok { "PASS" } else { "FAIL" },
                config.tolerance
            );
        }
        (Some(a), None) => println!("alpha_hat {a:.4}"),
        (None, _) => println!("alpha_hat undefined: {}", report.note.as_deref().unwrap_or("degenerate profile")),
    }
    match report.no_density_t0 {
        Some(t0) => println!("no-density margin: P(d < {t0:.4}) = 0"),
        None => println!("no-density margin: none (mass below the first threshold)"),
    }
    write_json(args.out, "profile.json", &ProfileOutput { config: &config, true_alpha: truth, report })
}

/// Barycentric points `i / resolution` of the simplex over `dim` labels.
fn barycentric_grid(dim: usize, resolution: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for i in (0..=left).rev() {
            prefix.push(i);
            rec(dim, left - i, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, resolution, &mut Vec::new(), &mut out);
    out
}

#[derive(Serialize)]
struct SimplexOutput<'a> {
    config: &'a SimplexConfig,
    z_labels: &'a [String],
    y_labels: &'a [String],
    points: usize,
    region_counts: Vec<usize>,
    on_frontier: usize,
}

pub fn simplex_inspect_cmd(args: &Common) -> Result<()> {
    let config: SimplexConfig = config::load(args.config)?;
    let loss = match &config.loss {
        Some(p) => FiniteLoss::load(config::resolve(args.config, p))?,
        None => FiniteLoss::three_class(),
    };
    if config.resolution == 0 {
        return Err(structrates_core::Error::Contract("resolution must be at least 1".into()).into());
    }
    if loss.n_z() < 2 {
        return Err(structrates_core::Error::Contract("simplex-inspect needs at least two prediction labels".into()).into());
    }
    prepare_out(args.out)?;
    let mut w = csv::Writer::from_writer(create(args.out, "regions.csv")?);
    let mut header: Vec<String> = loss.y_labels().iter().map(|y| format!("mu_{y}")).collect();
    header.extend(["decode".into(), "frontier_distance".into(), "margin_gap".into()]);
    w.write_record(&header).map_err(structrates_core::Error::from)?;

    let mut counts = vec![0usize; loss.n_z()];
    let mut on_frontier = 0;
    let grid = barycentric_grid(loss.n_y(), config.resolution);
    println!("{:<24} {:>8} {:>10} {:>10}", "mu", "decode", "distance", "gap");
    for point in &grid {
        let mu = SignedMeasure::new(point.iter().map(|&i| i as f64 / config.resolution as f64).collect());
        let z = decode(&loss, &mu)?;
        let d = frontier_distance(&loss, &mu)?;
        let gap = margin_gap(&loss, &mu)?;
        counts[z] += 1;
        if d == 0.0 {
            on_frontier += 1;
        }
        let mut rec: Vec<String> = mu.weights().iter().map(|&v| sig17(v)).collect();
        rec.extend([loss.z_labels()[z].clone(), sig17(d), sig17(gap)]);
        w.write_record(&rec).map_err(structrates_core::Error::from)?;
        let coords: Vec<String> = mu.weights().iter().map(|v| format!("{v:.2}")).collect();
        println!("{:<24} {:>8} {:>10.4} {:>10.4}", coords.join(" "), loss.z_labels()[z], d, gap);
    }
    w.flush().map_err(CliError::io("cannot write regions.csv"))?;
    let summary: Vec<String> =
        loss.z_labels().iter().zip(&counts).map(|(z, c)| format!("{z}: {c}")).collect();
    println!("{} points; regions {}; {on_frontier} on the frontier", grid.len(), summary.join(", "));
    write_json(
        args.out,
        "report.json",
        &SimplexOutput {
            config: &config,
            z_labels: loss.z_labels(),
            y_labels: loss.y_labels(),
            points: grid.len(),
            region_counts: counts,
            on_frontier,
        },
    )
}

pub fn predict_cmd(args: &Common) -> Result<()> {
    let config: PredictConfig = config::load(args.config)?;
    let loss = FiniteLoss::load(config::resolve(args.config, &config.loss))?;
    let data = SampleSet::load_csv(config::resolve(args.config, &config.train), &loss)?;
    let queries_path = config::resolve(args.config, &config.queries);
    let file = File::open(&queries_path).map_err(CliError::io(format!("cannot open {}", queries_path.display())))?;
    let queries = read_points_csv(file)?;

    let surrogates: Vec<SignedMeasure> = match config.estimator {
        PredictEstimator::Knn { k } => queries
            .iter()
            .map(|q| predict_surrogate(&knn_weights(q, &data, k, Metric::Euclidean)?, &data, &loss))
            .collect::<structrates_core::Result<_>>()?,
        PredictEstimator::Krr { kernel, lambda } => {
            kernel.validate()?;
            let coef = krr_fit(&data, &kernel, lambda)?.coefficients(&data, loss.n_y())?;
            queries.iter().map(|q| coef.predict(q, &data, &kernel)).collect::<structrates_core::Result<_>>()?
        }
    };

    prepare_out(args.out)?;
    let mut w = csv::Writer::from_writer(create(args.out, "predictions.csv")?);
    let mut header = vec!["index".to_owned(), "label".to_owned()];
    header.extend(loss.y_labels().iter().map(|y| format!("g_{y}")));
    w.write_record(&header).map_err(structrates_core::Error::from)?;
    let mut counts = vec![0usize; loss.n_z()];
    for (i, g) in surrogates.iter().enumerate() {
        let z = decode(&loss, g)?;
        counts[z] += 1;
        let mut rec = vec![i.to_string(), loss.z_labels()[z].clone()];
        rec.extend(g.weights().iter().map(|&v| sig17(v)));
        w.write_record(&rec).map_err(structrates_core::Error::from)?;
    }
    w.flush().map_err(CliError::io("cannot write predictions.csv"))?;
    let summary: Vec<String> =
        loss.z_labels().iter().zip(&counts).map(|(z, c)| format!("{z}: {c}")).collect();
    println!("{} queries predicted from {} samples; {}", queries.len(), data.len(), summary.join(", "));
    write_json(args.out, "report.json", &serde_json::json!({ "config": config, "queries": queries.len(), "label_counts": counts }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barycentric_grid_size() {
        // C(r + d - 1, d - 1)
        assert_eq!(barycentric_grid(3, 10).len(), 66);
        assert_eq!(barycentric_grid(2, 4), vec![vec![4, 0], vec![3, 1], vec![2, 2], vec![1, 3], vec![0, 4]]);
        assert!(barycentric_grid(4, 3).iter().all(|p| p.iter().sum::<usize>() == 3));
    }
}
