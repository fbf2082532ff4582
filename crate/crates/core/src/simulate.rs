//! Parallel, reproducible replica generation.

use rayon::prelude::*;

use crate::counting::{HostGraph, MotifCounter};
use crate::ensemble::{EnsembleSpec, SeedStream};
use crate::error::Result;
use crate::stats::ReplicaRecord;

/// Replicas handled by one parallel task.
pub const BATCH_SIZE: u64 = 256;

/// Draw `replicas` graphs from `spec` and count every motif in each.
///
/// Replica `r` always uses stream `r` of `master_seed`; batches are merged in
/// replica order, so the output does not depend on the thread count.
pub fn run_replicas(
    spec: &EnsembleSpec,
    counters: &[MotifCounter],
    replicas: u64,
    master_seed: u64,
) -> Result<Vec<ReplicaRecord>> {
    spec.validate()?;
    let batches = replicas.div_ceil(BATCH_SIZE);
    let chunks: Vec<Vec<ReplicaRecord>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let end = ((b + 1) * BATCH_SIZE).min(replicas);
            (b * BATCH_SIZE..end)
                .map(|r| replica(spec, counters, master_seed, r))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// A single replica, reproducible in isolation.
pub fn replica(spec: &EnsembleSpec, counters: &[MotifCounter], master_seed: u64, index: u64) -> Result<ReplicaRecord> {
    let sample = spec.sample(&SeedStream::new(master_seed, index))?;
    let host = HostGraph::new(&sample);
    Ok(ReplicaRecord {
        replica_index: index,
        counts: counters.iter().map(|c| c.count(&host)).collect(),
        edges: sample.edge_count(),
    })
}
