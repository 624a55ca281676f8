//! Energy metering around a task.
//!
//! Hardware readings come from cumulative microjoule counters (the Linux
//! powercap interface exposes one per CPU package under
//! `/sys/class/powercap/intel-rapl:N/energy_uj`). Counters are sampled at
//! the start and end of the task and whenever the task calls
//! [`Probe::sample`] after at least one sampling interval has passed, which
//! keeps wraparound detectable on long tasks. A background power baseline
//! is subtracted from every interval; negative net power counts as zero.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::clock::Clock;
use crate::error::{Error, Result};

pub const DEFAULT_POWERCAP_ROOT: &str = "/sys/class/powercap";

pub trait EnergyCounter {
    /// Current cumulative reading in microjoules.
    fn read_microjoules(&mut self) -> Result<u64>;

    /// Value after which the counter wraps to zero, when known.
    fn max_microjoules(&self) -> Option<u64>;
}

/// One powercap zone.
#[derive(Clone, Debug)]
pub struct RaplCounter {
    energy_path: PathBuf,
    max: Option<u64>,
}

impl RaplCounter {
    pub fn open(zone_dir: &Path) -> Result<Self> {
        let energy_path = zone_dir.join("energy_uj");
        read_u64(&energy_path)?;
        let max = read_u64(&zone_dir.join("max_energy_range_uj")).ok();
        Ok(RaplCounter { energy_path, max })
    }

    /// Package-level zones (`intel-rapl:N`) below `root`, sorted by name.
    pub fn discover(root: &Path) -> Result<Vec<Self>> {
        let mut zones: Vec<PathBuf> = fs::read_dir(root)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .and_then(|n| n.strip_prefix("intel-rapl:"))
                    .is_some_and(|rest| !rest.contains(':'))
            })
            .collect();
        zones.sort();
        if zones.is_empty() {
            return Err(Error::Counter(format!(
                "no package energy zones under {}",
                root.display()
            )));
        }
        zones.iter().map(|z| RaplCounter::open(z)).collect()
    }
}

fn read_u64(path: &Path) -> Result<u64> {
    let text = fs::read_to_string(path).map_err(|e| Error::Counter(format!("{}: {e}", path.display())))?;
    text.trim()
        .parse()
        .map_err(|_| Error::Counter(format!("{}: not an integer", path.display())))
}

impl EnergyCounter for RaplCounter {
    fn read_microjoules(&mut self) -> Result<u64> {
        read_u64(&self.energy_path)
    }

    fn max_microjoules(&self) -> Option<u64> {
        self.max
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergySource {
    HardwareCounter,
    ConstantPowerModel,
}

impl EnergySource {
    pub fn as_str(self) -> &'static str {
        match self {
            EnergySource::HardwareCounter => "hardware_counter",
            EnergySource::ConstantPowerModel => "constant_power_model",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReading {
    pub joules: f64,
    pub duration_s: f64,
    pub source: EnergySource,
    pub samples: usize,
    /// A counter read failed during the task; `joules` covers the task up
    /// to the last good sample.
    #[serde(default)]
    pub partial: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Baseline {
    None,
    FixedWatts(f64),
    /// Measure idle power over this window before the task starts.
    Measure(Duration),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeterConfig {
    pub baseline: Baseline,
    pub sample_interval: Duration,
}

impl Default for MeterConfig {
    fn default() -> Self {
        MeterConfig {
            baseline: Baseline::Measure(Duration::from_secs(5)),
            sample_interval: Duration::from_millis(100),
        }
    }
}

pub enum Meter<'a> {
    Counters(Vec<Box<dyn EnergyCounter + 'a>>),
    ConstantPower { watts: f64 },
}

impl<'a> Meter<'a> {
    pub fn counters<C: EnergyCounter + 'a>(counters: Vec<C>) -> Self {
        Meter::Counters(
            counters
                .into_iter()
                .map(|c| Box::new(c) as Box<dyn EnergyCounter + 'a>)
                .collect(),
        )
    }
}

/// Microjoules between two readings, assuming at most one wrap.
fn counter_delta(prev: u64, cur: u64, max: Option<u64>) -> u64 {
    if cur >= prev {
        cur - prev
    } else {
        match max {
            Some(max) if max >= prev => max - prev + cur,
            _ => cur,
        }
    }
}

/// Handle given to a metered task.
pub struct Probe<'m, 'a> {
    counters: Option<&'m mut Vec<Box<dyn EnergyCounter + 'a>>>,
    clock: &'m dyn Clock,
    interval: Duration,
    baseline_watts: f64,
    last: Vec<u64>,
    last_time: Duration,
    joules: f64,
    samples: usize,
    failed: bool,
}

impl Probe<'_, '_> {
    /// Take a sample if a full sampling interval has passed.
    pub fn sample(&mut self) {
        if self.counters.is_some() && self.clock.now() - self.last_time >= self.interval {
            self.take_sample();
        }
    }

    fn take_sample(&mut self) {
        let Some(counters) = self.counters.as_mut() else {
            return;
        };
        if self.failed {
            return;
        }
        let now = self.clock.now();
        let mut readings = Vec::with_capacity(counters.len());
        for c in counters.iter_mut() {
            match c.read_microjoules() {
                Ok(v) => readings.push(v),
                Err(_) => {
                    self.failed = true;
                    return;
                }
            }
        }
        let micro: u64 = readings
            .iter()
            .zip(&self.last)
            .zip(counters.iter())
            .map(|((&cur, &prev), c)| counter_delta(prev, cur, c.max_microjoules()))
            .sum();
        let dt = (now - self.last_time).as_secs_f64();
        let net = micro as f64 / 1e6 - self.baseline_watts * dt;
        self.joules += net.max(0.0);
        self.last = readings;
        self.last_time = now;
        self.samples += 1;
    }
}

fn read_all(counters: &mut [Box<dyn EnergyCounter + '_>]) -> Result<Vec<u64>> {
    counters.iter_mut().map(|c| c.read_microjoules()).collect()
}

/// Run `task` and report the energy it used.
pub fn meter_energy<R>(
    meter: &mut Meter<'_>,
    config: &MeterConfig,
    clock: &dyn Clock,
    task: impl FnOnce(&mut Probe<'_, '_>) -> R,
) -> Result<(R, EnergyReading)> {
    match meter {
        Meter::ConstantPower { watts } => {
            let watts = *watts;
            if !(watts >= 0.0 && watts.is_finite()) {
                return Err(Error::invalid(format!(
                    "rated power must be a non-negative number, got {watts}"
                )));
            }
            let start = clock.now();
            let mut probe = Probe {
                counters: None,
                clock,
                interval: config.sample_interval,
                baseline_watts: 0.0,
                last: Vec::new(),
                last_time: start,
                joules: 0.0,
                samples: 0,
                failed: false,
            };
            let out = task(&mut probe);
            let duration = (clock.now() - start).as_secs_f64();
            Ok((
                out,
                EnergyReading {
                    joules: watts * duration,
                    duration_s: duration,
                    source: EnergySource::ConstantPowerModel,
                    samples: 0,
                    partial: false,
                },
            ))
        }
        Meter::Counters(counters) => {
            if counters.is_empty() {
                return Err(Error::Counter("no energy counters configured".into()));
            }
            let baseline_watts = match config.baseline {
                Baseline::None => 0.0,
                Baseline::FixedWatts(w) => w,
                Baseline::Measure(window) => {
                    let t0 = clock.now();
                    let before = read_all(counters)?;
                    clock.sleep(window);
                    let after = read_all(counters)?;
                    let secs = (clock.now() - t0).as_secs_f64();
                    let micro: u64 = before
                        .iter()
                        .zip(&after)
                        .zip(counters.iter())
                        .map(|((&b, &a), c)| counter_delta(b, a, c.max_microjoules()))
                        .sum();
                    if secs > 0.0 {
                        micro as f64 / 1e6 / secs
                    } else {
                        0.0
                    }
                }
            };

            let start = clock.now();
            let first = read_all(counters)?;
            let mut probe = Probe {
                counters: Some(counters),
                clock,
                interval: config.sample_interval,
                baseline_watts,
                last: first,
                last_time: start,
                joules: 0.0,
                samples: 1,
                failed: false,
            };
            let out = task(&mut probe);
            probe.take_sample();
            let duration = (clock.now() - start).as_secs_f64();
            let joules = if duration == 0.0 { 0.0 } else { probe.joules };
            Ok((
                out,
                EnergyReading {
                    joules,
                    duration_s: duration,
                    source: EnergySource::HardwareCounter,
                    samples: probe.samples,
                    partial: probe.failed,
                },
            ))
        }
    }
}
