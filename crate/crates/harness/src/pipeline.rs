//! One complete experiment run: generate stimuli, learn them without labels,
//! snapshot the hidden layer, fine-tune with labels, snapshot again, and
//! measure the distance changes.
//!
//! The unsupervised snapshot is taken strictly before the first supervised
//! update, and the phase-end weights are persisted so that ordering is
//! externally checkable: re-encoding the stimuli with the saved
//! `.unsup.weights` file must reproduce the snapshot bit for bit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use catperc::autoencoder::{train_autoencoder, Autoencoder, ReconstructionReport};
use catperc::classifier::{train_classifier, Classifier, ClassifierReport};
use catperc::linalg::Matrix;
use catperc::metrics::{separation_compression, CpReport, Phase, RepresentationSnapshot};
use catperc::snapshot::{write_autoencoder, write_classifier};
use catperc::stimuli::{generate_grid_dataset, generate_vector_dataset, Dataset};
use catperc::Probe;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{RunConfig, StimulusConfig};
use crate::error::{HarnessError, Result, Stage, StageExt};

/// SplitMix64-style derivation of independent sub-seeds from a master seed.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ 0x9E3779B97F4A7C15u64.wrapping_mul(stream.wrapping_add(1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Filesystem-friendly identifier of a run.
pub fn run_id(cfg: &RunConfig) -> String {
    match &cfg.stimulus {
        StimulusConfig::Vector(s) => format!(
            "v-n{}-k{}-a{}-s{}",
            s.n_dims, s.n_covariant, s.covariant_salience, cfg.seed
        ),
        StimulusConfig::Grid(s) => format!(
            "g-n{}-k{}-s{}",
            s.n_microfeatures, s.n_covariant, cfg.seed
        ),
    }
}

/// Outcome of one pipeline run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub run_id: String,
    pub config: RunConfig,
    pub unsup_report: ReconstructionReport,
    pub sup_report: ClassifierReport,
    /// Separation/compression measured on the hidden pre-activation.
    pub report_pre: CpReport<f64>,
    /// The same measures on the post-activation probe.
    pub report_post: CpReport<f64>,
    /// Phase snapshots at the configured probe.
    pub unsup_snapshot: RepresentationSnapshot<f64>,
    pub sup_snapshot: RepresentationSnapshot<f64>,
    pub reached_criterion: bool,
    pub wall_time: Duration,
}

impl RunRecord {
    /// The report at the configured probe point.
    pub fn report(&self) -> &CpReport<f64> {
        match self.config.probe {
            Probe::PreActivation => &self.report_pre,
            Probe::PostActivation => &self.report_post,
        }
    }

    pub fn report_at(&self, probe: Probe) -> &CpReport<f64> {
        match probe {
            Probe::PreActivation => &self.report_pre,
            Probe::PostActivation => &self.report_post,
        }
    }
}

/// Fixed column order of result CSV rows.
pub const CSV_HEADER: &str = "run_id,n,k,a,b,seed,probe,d_within_a_u,d_within_b_u,d_within_a_s,d_within_b_s,d_between_u,d_between_s,sp_w,sp_b,pairs_a,pairs_b,pairs_ab,final_accuracy,epochs_to_criterion";

/// One CSV data row for the given probe.
pub fn csv_row(record: &RunRecord, probe: Probe) -> String {
    let cfg = &record.config;
    let r = record.report_at(probe);
    let epochs = match record.sup_report.epochs_to_criterion() {
        Some(e) => e.to_string(),
        None => "-".to_string(),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        record.run_id,
        cfg.stimulus.n(),
        cfg.stimulus.k(),
        cfg.stimulus.salience(),
        cfg.stimulus.magnitude(),
        cfg.seed,
        probe.name(),
        r.d_within_a_u,
        r.d_within_b_u,
        r.d_within_a_s,
        r.d_within_b_s,
        r.d_between_u,
        r.d_between_s,
        r.sp_w,
        r.sp_b,
        r.pairs_a,
        r.pairs_b,
        r.pairs_ab,
        record.sup_report.final_accuracy,
        epochs,
    )
}

/// Network inputs for a dataset. Grid pixels are stored as {0,1}; the
/// networks train on a symmetric alphabet, so they are remapped to -1/+1
/// (which also makes sign-flip corruption meaningful). Vector stimuli pass
/// through unchanged.
pub fn training_inputs(dataset: &Dataset<f64>, stimulus: &StimulusConfig) -> Matrix<f64> {
    match stimulus {
        StimulusConfig::Vector(_) => dataset.samples.clone(),
        StimulusConfig::Grid(_) => {
            let mut m = dataset.samples.clone();
            for v in m.as_mut_slice() {
                *v = 2.0 * *v - 1.0;
            }
            m
        }
    }
}

fn snapshot_pair<F>(
    inputs: &Matrix<f64>,
    labels: &[catperc::Category],
    phase: Phase,
    mut hidden_of: F,
) -> std::result::Result<(RepresentationSnapshot<f64>, RepresentationSnapshot<f64>), catperc::Error>
where
    F: FnMut(&[f64]) -> std::result::Result<(Vec<f64>, Vec<f64>), catperc::Error>,
{
    let mut pre_rows = Vec::with_capacity(inputs.n_rows());
    let mut post_rows = Vec::with_capacity(inputs.n_rows());
    for row in inputs.rows_iter() {
        let (pre, post) = hidden_of(row)?;
        pre_rows.push(pre);
        post_rows.push(post);
    }
    let pre = RepresentationSnapshot::new(
        Matrix::from_rows(&pre_rows)?,
        labels.to_vec(),
        phase,
        Probe::PreActivation,
    )?;
    let post = RepresentationSnapshot::new(
        Matrix::from_rows(&post_rows)?,
        labels.to_vec(),
        phase,
        Probe::PostActivation,
    )?;
    Ok((pre, post))
}

/// Runs the full two-phase pipeline. When `out_dir` is given, phase-end
/// weights and training traces are persisted under the run id.
pub fn run_pipeline(cfg: &RunConfig, out_dir: Option<&Path>) -> Result<RunRecord> {
    cfg.validate()?;
    let started = Instant::now();
    let id = run_id(cfg);

    // Stage 1: stimuli.
    let dataset_seed = mix_seed(cfg.seed, 1);
    let dataset: Dataset<f64> = match &cfg.stimulus {
        StimulusConfig::Vector(s) => {
            generate_vector_dataset(s, cfg.per_category, dataset_seed).stage(Stage::Dataset)?
        }
        StimulusConfig::Grid(s) => {
            generate_grid_dataset(s, cfg.per_category, dataset_seed).stage(Stage::Dataset)?
        }
    };
    let inputs = training_inputs(&dataset, &cfg.stimulus);
    let train_data = Dataset {
        samples: inputs.clone(),
        labels: dataset.labels.clone(),
        spec: dataset.spec.clone(),
        seed: dataset.seed,
    };

    // Stage 2: unsupervised phase.
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, 3));
    let mut ae = Autoencoder::new_random(inputs.n_cols(), cfg.hidden_dim, &mut rng);
    let unsup_cfg = catperc::nn::TrainConfig {
        seed: mix_seed(cfg.seed, 4),
        ..cfg.unsup_cfg
    };
    let unsup_report =
        train_autoencoder(&mut ae, &train_data, &unsup_cfg).stage(Stage::UnsupervisedTraining)?;

    // Stage 3: snapshot before any supervised update can touch the weights.
    let (unsup_pre, unsup_post) =
        snapshot_pair(&inputs, &dataset.labels, Phase::Unsupervised, |x| ae.encode(x))
            .stage(Stage::UnsupervisedSnapshot)?;
    if let Some(dir) = out_dir {
        persist_autoencoder(dir, &id, &ae, &unsup_report)?;
    }

    // Stage 4: supervised phase.
    let mut clf = Classifier::from_autoencoder(&ae, mix_seed(cfg.seed, 5));
    clf.provenance = format!("{id}.unsup.weights");
    let sup_cfg = catperc::nn::TrainConfig {
        seed: mix_seed(cfg.seed, 6),
        ..cfg.sup_cfg
    };
    let sup_report =
        train_classifier(&mut clf, &train_data, &sup_cfg).stage(Stage::SupervisedTraining)?;

    // Stage 5: snapshot and measure.
    let (sup_pre, sup_post) =
        snapshot_pair(&inputs, &dataset.labels, Phase::Supervised, |x| {
            let trace = clf.hidden.forward(x)?;
            Ok((trace.pre_activation, trace.output))
        })
        .stage(Stage::SupervisedSnapshot)?;

    let report_pre = separation_compression(&unsup_pre, &sup_pre).stage(Stage::Metrics)?;
    let report_post = separation_compression(&unsup_post, &sup_post).stage(Stage::Metrics)?;

    let (unsup_snapshot, sup_snapshot) = match cfg.probe {
        Probe::PreActivation => (unsup_pre, sup_pre),
        Probe::PostActivation => (unsup_post, sup_post),
    };

    let record = RunRecord {
        run_id: id.clone(),
        config: cfg.clone(),
        reached_criterion: sup_report.reached_criterion,
        unsup_report,
        sup_report,
        report_pre,
        report_post,
        unsup_snapshot,
        sup_snapshot,
        wall_time: started.elapsed(),
    };
    if let Some(dir) = out_dir {
        persist_classifier(dir, &id, &clf, &record)?;
    }
    Ok(record)
}

fn persist_autoencoder(
    dir: &Path,
    id: &str,
    ae: &Autoencoder<f64>,
    report: &ReconstructionReport,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(File::create(dir.join(format!("{id}.unsup.weights")))?);
    write_autoencoder(&mut w, ae).map_err(stage_output)?;
    let mut c = BufWriter::new(File::create(dir.join(format!("{id}.unsup.csv")))?);
    writeln!(c, "epoch,reconstruction_error")?;
    for (epoch, err) in report.epoch_errors.iter().enumerate() {
        writeln!(c, "{},{}", epoch + 1, err)?;
    }
    Ok(())
}

fn persist_classifier(
    dir: &Path,
    id: &str,
    clf: &Classifier<f64>,
    record: &RunRecord,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(File::create(dir.join(format!("{id}.sup.weights")))?);
    write_classifier(&mut w, clf).map_err(stage_output)?;
    let mut c = BufWriter::new(File::create(dir.join(format!("{id}.sup.csv")))?);
    writeln!(c, "epoch,loss,accuracy")?;
    for (epoch, (loss, acc)) in record
        .sup_report
        .epoch_loss
        .iter()
        .zip(&record.sup_report.epoch_accuracy)
        .enumerate()
    {
        writeln!(c, "{},{},{}", epoch + 1, loss, acc)?;
    }
    // Per-run measurement report carries both probe rows.
    let mut r = BufWriter::new(File::create(dir.join(format!("{id}.report.csv")))?);
    writeln!(r, "{CSV_HEADER}")?;
    writeln!(r, "{}", csv_row(record, Probe::PreActivation))?;
    writeln!(r, "{}", csv_row(record, Probe::PostActivation))?;
    Ok(())
}

fn stage_output(e: catperc::Error) -> HarnessError {
    HarnessError::Pipeline {
        stage: Stage::Output,
        source: e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{KvConfig, SweepConfig};

    fn quick_sweep() -> SweepConfig {
        let mut kv = KvConfig::defaults();
        kv.set("per_category", "20");
        kv.set("unsup_epochs", "30");
        kv.set("sup_epochs", "50");
        SweepConfig::from_kv(&kv).unwrap()
    }

    #[test]
    fn mix_seed_streams_are_distinct_and_deterministic() {
        assert_eq!(mix_seed(42, 1), mix_seed(42, 1));
        assert_ne!(mix_seed(42, 1), mix_seed(42, 2));
        assert_ne!(mix_seed(42, 1), mix_seed(43, 1));
    }

    #[test]
    fn zero_supervised_epochs_leave_the_measures_at_exactly_zero() {
        let sweep = quick_sweep();
        let mut cfg = sweep.build_run(10, 2, 5).unwrap();
        cfg.sup_cfg.max_epochs = 0;
        let record = run_pipeline(&cfg, None).unwrap();
        assert_eq!(record.report_pre.sp_w, 0.0);
        assert_eq!(record.report_pre.sp_b, 0.0);
        assert_eq!(record.report_post.sp_w, 0.0);
        assert_eq!(record.report_post.sp_b, 0.0);
        assert!(!record.reached_criterion);
    }

    #[test]
    fn identical_configs_reproduce_identical_records() {
        let sweep = quick_sweep();
        let cfg = sweep.build_run(10, 3, 7).unwrap();
        let r1 = run_pipeline(&cfg, None).unwrap();
        let r2 = run_pipeline(&cfg, None).unwrap();
        assert_eq!(r1.report_pre, r2.report_pre);
        assert_eq!(r1.report_post, r2.report_post);
        assert_eq!(r1.unsup_snapshot, r2.unsup_snapshot);
        assert_eq!(r1.sup_snapshot, r2.sup_snapshot);
        assert_eq!(r1.sup_report, r2.sup_report);
        assert_eq!(csv_row(&r1, Probe::PreActivation), csv_row(&r2, Probe::PreActivation));
    }

    #[test]
    fn persisted_unsupervised_weights_reproduce_the_snapshot_exactly() {
        let sweep = quick_sweep();
        let cfg = sweep.build_run(12, 4, 11).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let record = run_pipeline(&cfg, Some(dir.path())).unwrap();

        let path = dir.path().join(format!("{}.unsup.weights", record.run_id));
        let file = std::io::BufReader::new(File::open(path).unwrap());
        let ae = catperc::snapshot::read_autoencoder::<f64, _>(file).unwrap();

        let dataset =
            generate_vector_dataset(
                match &cfg.stimulus {
                    StimulusConfig::Vector(s) => s,
                    _ => unreachable!(),
                },
                cfg.per_category,
                mix_seed(cfg.seed, 1),
            )
            .unwrap();
        for (row, snap_row) in dataset
            .samples
            .rows_iter()
            .zip(record.unsup_snapshot.vectors.rows_iter())
        {
            let (a_h, _) = ae.encode(row).unwrap();
            assert_eq!(a_h.as_slice(), snap_row);
        }
    }

    #[test]
    fn grid_runs_execute_end_to_end() {
        let mut kv = KvConfig::defaults();
        kv.set("scenario", "grid");
        kv.set("per_category", "15");
        kv.set("unsup_epochs", "20");
        kv.set("sup_epochs", "40");
        let sweep = SweepConfig::from_kv(&kv).unwrap();
        let cfg = sweep.build_run(4, 2, 3).unwrap();
        let record = run_pipeline(&cfg, None).unwrap();
        assert_eq!(record.unsup_snapshot.vectors.n_rows(), 30);
        // Training inputs are the +-1 remap of binary pixels.
        let dataset: Dataset<f64> = generate_grid_dataset(
            match &cfg.stimulus {
                StimulusConfig::Grid(s) => s,
                _ => unreachable!(),
            },
            cfg.per_category,
            mix_seed(cfg.seed, 1),
        )
        .unwrap();
        let inputs = training_inputs(&dataset, &cfg.stimulus);
        assert!(inputs.as_slice().iter().all(|&v| v == 1.0 || v == -1.0));
    }
}
