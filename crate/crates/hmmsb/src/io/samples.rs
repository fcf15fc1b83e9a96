//! Retained-sample files: one JSON object per line.
//!
//! The first line is a self-describing header (actor count, depth,
//! hyperparameters, seed, chain settings, manifest); each following line is
//! one retained sample with comma-joined per-actor paths and run-length
//! encoded donor/receiver level matrices. Round-trips are lossless.

use super::{write_atomic, Manifest};
use crate::error::{HmmsbError, Result};
use crate::gibbs::{ChainConfig, RetainedSample, ScanOrder};
use crate::hyper::Hyperparams;
use crate::levels::LevelAssignments;
use crate::path::{Label, Level, PathAssignment};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplesHeader {
    pub format: String,
    pub n_actors: usize,
    pub depth: usize,
    pub hyper: Hyperparams,
    pub seed: u64,
    pub burn_in: u64,
    pub lag: u64,
    pub n_samples: u64,
    pub scan: ScanOrder,
    pub manifest: Manifest,
}

impl SamplesHeader {
    pub fn new(
        n_actors: usize,
        hyper: &Hyperparams,
        seed: u64,
        config: &ChainConfig,
        manifest: Manifest,
    ) -> Self {
        SamplesHeader {
            format: "hmmsb-samples-v1".into(),
            n_actors,
            depth: hyper.max_depth,
            hyper: hyper.clone(),
            seed,
            burn_in: config.burn_in,
            lag: config.lag,
            n_samples: config.n_samples,
            scan: config.scan,
            manifest,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SampleRecord {
    iteration: u64,
    paths: Vec<String>,
    donor_rle: Vec<(Level, u32)>,
    receiver_rle: Vec<(Level, u32)>,
    log_likelihood: f64,
}

fn rle_encode(seq: &[Level]) -> Vec<(Level, u32)> {
    let mut out: Vec<(Level, u32)> = Vec::new();
    for &v in seq {
        match out.last_mut() {
            Some((last, run)) if *last == v => *run += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

fn rle_decode(runs: &[(Level, u32)]) -> Vec<Level> {
    let mut out = Vec::new();
    for &(v, run) in runs {
        out.extend(std::iter::repeat_n(v, run as usize));
    }
    out
}

fn encode_record(sample: &RetainedSample) -> SampleRecord {
    let paths = sample
        .paths
        .iter()
        .map(|p| p.iter().map(u16::to_string).collect::<Vec<_>>().join(","))
        .collect();
    SampleRecord {
        iteration: sample.iteration,
        paths,
        donor_rle: rle_encode(&sample.levels.donor_sequence()),
        receiver_rle: rle_encode(&sample.levels.receiver_sequence()),
        log_likelihood: sample.log_likelihood,
    }
}

fn decode_record(
    path: &Path,
    line_no: usize,
    record: SampleRecord,
    header: &SamplesHeader,
) -> Result<RetainedSample> {
    let bad = |message: String| HmmsbError::malformed(path, line_no, message);
    if record.paths.len() != header.n_actors {
        return Err(bad(format!(
            "expected {} paths, found {}",
            header.n_actors,
            record.paths.len()
        )));
    }
    let mut paths: Vec<Vec<Label>> = Vec::with_capacity(record.paths.len());
    for joined in &record.paths {
        let labels: std::result::Result<Vec<Label>, _> =
            joined.split(',').map(|f| f.trim().parse::<Label>()).collect();
        let labels = labels.map_err(|_| bad(format!("invalid path {joined:?}")))?;
        if labels.len() != header.depth {
            return Err(bad(format!("path {joined:?} does not have depth {}", header.depth)));
        }
        paths.push(labels);
    }
    let paths = PathAssignment::from_paths(paths, header.depth)
        .map_err(|e| bad(format!("invalid path assignment: {e}")))?;
    let donor = rle_decode(&record.donor_rle);
    let receiver = rle_decode(&record.receiver_rle);
    if donor
        .iter()
        .chain(&receiver)
        .any(|&z| z == 0 || z as usize > header.depth)
    {
        return Err(bad("level outside [1, depth]".into()));
    }
    let levels = LevelAssignments::from_sequences(header.n_actors, &donor, &receiver)
        .ok_or_else(|| bad("run-length encoded levels have the wrong total length".into()))?;
    Ok(RetainedSample {
        iteration: record.iteration,
        paths,
        levels,
        log_likelihood: record.log_likelihood,
    })
}

pub fn write_samples(
    path: &Path,
    header: &SamplesHeader,
    samples: &[RetainedSample],
) -> Result<()> {
    let mut out = serde_json::to_string(header).expect("header serializes");
    out.push('\n');
    for sample in samples {
        out.push_str(&serde_json::to_string(&encode_record(sample)).expect("record serializes"));
        out.push('\n');
    }
    write_atomic(path, &out)
}

pub fn read_samples(path: &Path) -> Result<(SamplesHeader, Vec<RetainedSample>)> {
    let text = fs::read_to_string(path).map_err(|e| HmmsbError::io(path, e))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or_else(|| HmmsbError::MalformedFile {
        path: path.into(),
        message: "empty samples file".into(),
    })?;
    let header: SamplesHeader = serde_json::from_str(first)
        .map_err(|e| HmmsbError::malformed(path, 1, format!("invalid header: {e}")))?;
    if header.format != "hmmsb-samples-v1" {
        return Err(HmmsbError::malformed(
            path,
            1,
            format!("unsupported format {:?}", header.format),
        ));
    }
    header
        .hyper
        .validate()
        .map_err(|e| HmmsbError::malformed(path, 1, format!("invalid hyperparameters: {e}")))?;
    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let record: SampleRecord = serde_json::from_str(line)
            .map_err(|e| HmmsbError::malformed(path, line_no, format!("invalid record: {e}")))?;
        samples.push(decode_record(path, line_no, record, &header)?);
    }
    Ok((header, samples))
}
