use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{Experiment, ExperimentConfig};
use super::equidist::{discrepancy, kendall_tau, label_ranges, DiscrepancyReport};
use super::family::family_generate;
use crate::characters::CharacterGroup;
use crate::charsum::{b_profile, chang_ratio, compute_thresholds, CHANG_CSV_HEADER};
use crate::error::{Error, Result};
use crate::lfunc::checkers::{deuring_heilbronn_check, density_count_check, zero_free_region_check};
use crate::lfunc::classify::classify;
use crate::lfunc::zeros::ScanOptions;
use crate::sieve::SmoothTable;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EQUIDIST_HEADER: &str = "q,x,y,u,v,phi_q,psi_q,delta_numerator,delta,argmax_class,y_label,k0,sqrt_u,half_log_q";
pub const CLASS_COUNTS_HEADER: &str = "q,x,y,a,count";
pub const TREND_HEADER: &str = "q,y,points,kendall_tau";

/// Files of one bundle, in write order.
pub const BUNDLE_FILES: [&str; 6] =
    ["equidist.csv", "class_counts.csv", "trend.csv", "classification.jsonl", "checkers.jsonl", "charsum.csv"];

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    /// One message per failed experiment task; also recorded in the affected file.
    pub failures: Vec<String>,
    /// Exit code of the first failure, 0 when none.
    pub exit_code: i32,
}

struct Bundle {
    files: Vec<(&'static str, String)>,
    failures: Vec<(String, i32)>,
}

impl Bundle {
    fn new(echo: &str) -> Self {
        let headers = [Some(EQUIDIST_HEADER), Some(CLASS_COUNTS_HEADER), Some(TREND_HEADER), None, None, Some(CHANG_CSV_HEADER)];
        let files = BUNDLE_FILES
            .iter()
            .zip(headers)
            .map(|(name, header)| {
                let mut s = format!("# config: {echo}\n# version: smoothprog {VERSION}\n");
                if let Some(h) = header {
                    s.push_str(h);
                    s.push('\n');
                }
                (*name, s)
            })
            .collect();
        Bundle { files, failures: Vec::new() }
    }

    fn file(&mut self, name: &str) -> &mut String {
        &mut self.files.iter_mut().find(|f| f.0 == name).expect("bundle file").1
    }

    fn fail(&mut self, name: &str, context: String, err: Error) {
        let msg = format!("{context}: {err}");
        writeln!(self.file(name), "# error: {msg}").unwrap();
        self.failures.push((msg, err.exit_code()));
    }
}

fn equidist_row(r: &DiscrepancyReport, a: f64, d: f64) -> String {
    let l = label_ranges(r.x, r.y, r.q, a, d);
    format!(
        "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{},{:.16e},{},{},{},{:.16e},{:.16e}",
        r.q,
        r.x,
        r.y,
        r.u,
        r.v,
        r.phi_q,
        r.psi_q,
        r.delta_numerator,
        r.delta,
        r.argmax_class,
        r.y_label.as_str(),
        l.k0,
        l.sqrt_u,
        l.half_log_q
    )
}

fn run_equidist(config: &ExperimentConfig, family: &[u64], bundle: &mut Bundle) -> Result<()> {
    if family.is_empty() || config.x.is_empty() {
        return Ok(());
    }
    let x_max = config.x.iter().cloned().fold(1.0, f64::max).floor() as u64;
    let table = SmoothTable::build(x_max)?;
    let tasks: Vec<(u64, f64)> = family.iter().flat_map(|&q| config.x.iter().map(move |&x| (q, x))).collect();
    let results: Vec<Result<DiscrepancyReport>> =
        tasks.par_iter().map(|&(q, x)| discrepancy(&table, x, config.y.y(q), q)).collect();
    let mut per_q: Vec<(u64, f64, Vec<f64>, Vec<f64>)> = Vec::new();
    for (&(q, x), result) in tasks.iter().zip(results) {
        let y = config.y.y(q);
        match result {
            Ok(r) => {
                writeln!(bundle.file("equidist.csv"), "{}", equidist_row(&r, config.a, config.d)).unwrap();
                let counts = bundle.file("class_counts.csv");
                for &(a, c) in &r.counts {
                    writeln!(counts, "{},{:.16e},{:.16e},{},{}", q, x, y, a, c).unwrap();
                }
                match per_q.last_mut() {
                    Some(entry) if entry.0 == q => {
                        entry.2.push(x.ln());
                        entry.3.push(r.delta);
                    }
                    _ => per_q.push((q, y, vec![x.ln()], vec![r.delta])),
                }
            }
            Err(e) => bundle.fail("equidist.csv", format!("equidist q={q} x={x:e}"), e),
        }
    }
    for (q, y, lx, d) in per_q {
        writeln!(bundle.file("trend.csv"), "{},{:.16e},{},{:.16e}", q, y, lx.len(), kendall_tau(&lx, &d)).unwrap();
    }
    Ok(())
}

fn run_zero_experiments(config: &ExperimentConfig, moduli: &[u64], which: Experiment, bundle: &mut Bundle) {
    let opts = ScanOptions::default();
    let k = &config.constants;
    for &q in moduli {
        match which {
            Experiment::Classify => match classify(q, config.a, config.d, config.t_max, &opts) {
                Ok(c) => writeln!(bundle.file("classification.jsonl"), "{}", serde_json::to_string(&c).unwrap()).unwrap(),
                Err(e) => bundle.fail("classification.jsonl", format!("classify q={q}"), e),
            },
            Experiment::Checkers => {
                let reports = [
                    zero_free_region_check(q, k.c1, config.t_max, &opts),
                    deuring_heilbronn_check(q, k.eps, k.c2, config.t_max, &opts),
                    classify(q, config.a, config.d, config.t_max, &opts).map(|c| density_count_check(&c, k.big_c1, k.big_c2)),
                ];
                for r in reports {
                    match r {
                        Ok(r) => writeln!(bundle.file("checkers.jsonl"), "{}", r.to_json_line()).unwrap(),
                        Err(e) => bundle.fail("checkers.jsonl", format!("checkers q={q}"), e),
                    }
                }
            }
            _ => unreachable!(),
        }
    }
}

fn run_charsum(config: &ExperimentConfig, bundle: &mut Bundle) -> Result<()> {
    let Some(cs) = &config.charsum else { return Ok(()) };
    let k = &config.constants;
    let params = compute_thresholds(cs.q, k.nu, k.tau, k.c3, k.e0)?.with_c4(k.c4);
    writeln!(bundle.file("charsum.csv"), "# thresholds: {}", serde_json::to_string(&params)?).unwrap();
    let grid: Vec<f64> = cs.n.iter().map(|&n| n as f64).collect();
    let profile = b_profile(&grid, params.eta, params.xi)?;
    writeln!(bundle.file("charsum.csv"), "# b_profile: {}", serde_json::to_string(&profile)?).unwrap();
    let primitive: Vec<_> = CharacterGroup::new(cs.q).characters().into_iter().filter(|c| c.is_primitive()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut picks = sample(&mut rng, primitive.len(), cs.characters.min(primitive.len())).into_vec();
    picks.sort_unstable();
    let tasks: Vec<(usize, u64)> = picks.iter().flat_map(|&i| cs.n.iter().map(move |&n| (i, n))).collect();
    let rows: Vec<_> = tasks.par_iter().map(|&(i, n)| chang_ratio(&primitive[i], n, 2 * n, cs.t, &params)).collect();
    for (&(i, n), row) in tasks.iter().zip(rows) {
        match row {
            Ok(r) => writeln!(bundle.file("charsum.csv"), "{}", r.csv_row()).unwrap(),
            Err(e) => bundle.fail("charsum.csv", format!("charsum {} N={n}", primitive[i].label()), e),
        }
    }
    Ok(())
}

/// Runs the selected experiments and writes the bundle into `dir`.
pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<RunOutcome> {
    config.validate()?;
    let family = family_generate(&config.family)?;
    let moduli = config.zero_moduli.clone().unwrap_or_else(|| family.clone());
    let mut bundle = Bundle::new(&config.echo());
    for &experiment in &config.experiments {
        let outcome = match experiment {
            Experiment::Equidist => run_equidist(config, &family, &mut bundle).map_err(|e| ("equidist.csv", e)),
            Experiment::Classify | Experiment::Checkers => {
                run_zero_experiments(config, &moduli, experiment, &mut bundle);
                Ok(())
            }
            Experiment::Charsum => run_charsum(config, &mut bundle).map_err(|e| ("charsum.csv", e)),
        };
        if let Err((file, e)) = outcome {
            bundle.fail(file, format!("{experiment:?}"), e);
        }
    }
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for (name, content) in &bundle.files {
        let path = dir.join(name);
        fs::write(&path, content)?;
        files.push(path);
    }
    let exit_code = bundle.failures.first().map_or(0, |f| f.1);
    Ok(RunOutcome { files, failures: bundle.failures.into_iter().map(|f| f.0).collect(), exit_code })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(extra: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{"x":[1e3,1e4,1e5],"y":{{"rule":"fixed","value":100}},"family":{{"kind":"explicit","moduli":[4,9]}},
                "A":6.6,"D":10,"T_max":20{extra}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn empty_experiment_list_writes_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&config(""), dir.path()).unwrap();
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.files.len(), BUNDLE_FILES.len());
        for f in &out.files {
            let text = fs::read_to_string(f).unwrap();
            assert!(text.starts_with("# config: {"));
            assert!(text.lines().count() <= 3);
        }
    }

    #[test]
    fn rerun_is_byte_identical() {
        let c = config(r#","experiments":["equidist","classify","charsum"],"zero_moduli":[5],
                          "charsum":{"q":243,"n":[10,100],"characters":3}"#);
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run(&c, a.path()).unwrap();
        let out = run(&c, b.path()).unwrap();
        assert_eq!(out.exit_code, 0, "{:?}", out.failures);
        for name in BUNDLE_FILES {
            let x = fs::read(a.path().join(name)).unwrap();
            assert_eq!(x, fs::read(b.path().join(name)).unwrap(), "{name}");
        }
        let eq = fs::read_to_string(a.path().join("equidist.csv")).unwrap();
        assert_eq!(eq.lines().count(), 3 + 6);
        assert_eq!(fs::read_to_string(a.path().join("charsum.csv")).unwrap().lines().filter(|l| !l.starts_with('#')).count(), 1 + 6);
    }

    #[test]
    fn failures_are_recorded() {
        let mut c = config(r#","experiments":["equidist"]"#);
        c.x = vec![4e9];
        let dir = tempfile::tempdir().unwrap();
        let out = run(&c, dir.path()).unwrap();
        assert_eq!(out.exit_code, 4);
        assert_eq!(out.failures.len(), 1);
        let text = fs::read_to_string(dir.path().join("equidist.csv")).unwrap();
        assert!(text.lines().last().unwrap().starts_with("# error: "));
    }
}
