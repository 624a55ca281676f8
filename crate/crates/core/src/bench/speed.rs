//! Parsing-speed protocol: a warm-up parse, then `runs` timed full passes
//! over a pre-loaded corpus on a single pinned CPU core.

use std::hint::black_box;

use serde::{Deserialize, Serialize};

use super::clock::Clock;
use crate::conllu::Sentence;
use crate::error::{Error, Result};

pub const DEFAULT_RUNS: usize = 5;
pub const DEFAULT_BATCH_SIZE: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedReport {
    pub sents_per_sec_mean: f64,
    /// Sample standard deviation over runs; 0 for a single run.
    pub sents_per_sec_std: f64,
    pub runs: usize,
    pub batch_size: usize,
    pub thread_pinning: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpeedConfig {
    pub runs: usize,
    pub batch_size: usize,
    /// Try to pin the calling thread to one CPU for the duration.
    pub pin: bool,
}

impl Default for SpeedConfig {
    fn default() -> Self {
        SpeedConfig {
            runs: DEFAULT_RUNS,
            batch_size: DEFAULT_BATCH_SIZE,
            pin: true,
        }
    }
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Time `parse_batch` over `corpus`. Only the parse calls are timed.
pub fn measure_speed<F, T>(
    mut parse_batch: F,
    corpus: &[Sentence],
    config: SpeedConfig,
    clock: &dyn Clock,
) -> Result<SpeedReport>
where
    F: FnMut(&[Sentence]) -> T,
{
    if corpus.is_empty() {
        return Err(Error::invalid("speed measurement needs a non-empty corpus"));
    }
    if config.runs == 0 || config.batch_size == 0 {
        return Err(Error::invalid("runs and batch_size must be at least 1"));
    }

    let pin = if config.pin { CpuPin::acquire() } else { None };

    let pass = |parse_batch: &mut F| {
        for batch in corpus.chunks(config.batch_size) {
            black_box(parse_batch(black_box(batch)));
        }
    };

    pass(&mut parse_batch);

    let mut rates = Vec::with_capacity(config.runs);
    for _ in 0..config.runs {
        let start = clock.now();
        pass(&mut parse_batch);
        let secs = (clock.now() - start).as_secs_f64();
        rates.push(if secs > 0.0 {
            corpus.len() as f64 / secs
        } else {
            f64::INFINITY
        });
    }

    let thread_pinning = pin.is_some();
    drop(pin);

    let (mean, std) = mean_std(&rates);
    Ok(SpeedReport {
        sents_per_sec_mean: mean,
        sents_per_sec_std: std,
        runs: config.runs,
        batch_size: config.batch_size,
        thread_pinning,
    })
}

/// Unweighted mean of per-treebank mean speeds. The std is the mean of the
/// per-treebank stds; a single report is returned unchanged.
pub fn macro_average(reports: &[SpeedReport]) -> Result<SpeedReport> {
    if reports.is_empty() {
        return Err(Error::invalid("macro average of no reports"));
    }
    if reports.len() == 1 {
        return Ok(reports[0].clone());
    }
    // Sorted sums make the result independent of treebank order.
    let sorted_mean = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v.iter().sum::<f64>() / v.len() as f64
    };
    Ok(SpeedReport {
        sents_per_sec_mean: sorted_mean(reports.iter().map(|r| r.sents_per_sec_mean).collect()),
        sents_per_sec_std: sorted_mean(reports.iter().map(|r| r.sents_per_sec_std).collect()),
        runs: reports.iter().map(|r| r.runs).min().unwrap(),
        batch_size: reports.iter().map(|r| r.batch_size).max().unwrap(),
        thread_pinning: reports.iter().all(|r| r.thread_pinning),
    })
}

/// Restores the previous CPU affinity when dropped.
struct CpuPin {
    #[cfg(target_os = "linux")]
    previous: libc::cpu_set_t,
}

impl CpuPin {
    #[cfg(target_os = "linux")]
    fn acquire() -> Option<CpuPin> {
        // SAFETY: cpu_set_t is plain data; the libc calls only read and
        // write the sets passed to them for the calling thread (pid 0).
        unsafe {
            let size = std::mem::size_of::<libc::cpu_set_t>();
            let mut previous: libc::cpu_set_t = std::mem::zeroed();
            if libc::sched_getaffinity(0, size, &mut previous) != 0 {
                return None;
            }
            let current = libc::sched_getcpu();
            let target = if current >= 0 && libc::CPU_ISSET(current as usize, &previous) {
                current as usize
            } else {
                (0..libc::CPU_SETSIZE as usize).find(|&c| libc::CPU_ISSET(c, &previous))?
            };
            let mut one: libc::cpu_set_t = std::mem::zeroed();
            libc::CPU_SET(target, &mut one);
            if libc::sched_setaffinity(0, size, &one) != 0 {
                return None;
            }
            Some(CpuPin { previous })
        }
    }

    #[cfg(not(target_os = "linux"))]
    fn acquire() -> Option<CpuPin> {
        None
    }
}

#[cfg(target_os = "linux")]
impl Drop for CpuPin {
    fn drop(&mut self) {
        // SAFETY: restores the affinity mask saved in `acquire`.
        unsafe {
            libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &self.previous);
        }
    }
}
