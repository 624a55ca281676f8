//! Speed, energy and Pareto-front measurement.

pub mod clock;
pub mod energy;
pub mod pareto;
pub mod report;
pub mod speed;

pub use clock::{Clock, FakeClock, MonotonicClock};
pub use energy::{
    meter_energy, Baseline, EnergyCounter, EnergyReading, EnergySource, Meter, MeterConfig, Probe, RaplCounter,
    DEFAULT_POWERCAP_ROOT,
};
pub use pareto::{pareto_front, Orientation, ParetoPoint};
pub use report::{build_report, emit_report, read_report, records_csv, FrontSet, Fronts, Report, RunRecord};
pub use speed::{macro_average, mean_std, measure_speed, SpeedConfig, SpeedReport};
