//! Fault scenarios and synthetic measurements: equivalent terminal
//! injections, the noiseless forward model, bounded noise and gross outliers.

use std::io::{Read, Write};

use nalgebra::DVector;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{realify_vector, Line, Network, SensingMatrix};
use crate::C64;

/// How relative measurement noise is applied.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// Each real-stacked component is scaled by `1 + u`, `u ~ U[-p, p]`.
    #[default]
    Component,
    /// Each phasor's magnitude is scaled by `1 + u₁` and its angle shifted by
    /// `u₂` radians, with `u₁, u₂ ~ U[-p, p]`.
    Phasor,
}

fn default_fault_current() -> C64 {
    C64::from_polar(1000.0, (-80.0f64).to_radians())
}

fn default_outlier_scale() -> f64 {
    1.0
}

/// A fault at per-unit distance `x` from the from-bus of `line_id`, plus the
/// measurement corruption to apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultScenario {
    pub line_id: String,
    pub x: f64,
    /// Fault current phasor in amperes. Defaults to 1000 A at -80°.
    #[serde(with = "crate::serde_complex", default = "default_fault_current")]
    pub fault_current: C64,
    #[serde(default)]
    pub noise_rel: f64,
    #[serde(default)]
    pub noise_model: NoiseModel,
    #[serde(default)]
    pub outlier_fraction: f64,
    /// Outlier magnitude as a multiple of the clean signal's largest entry.
    #[serde(default = "default_outlier_scale")]
    pub outlier_scale: f64,
    #[serde(default)]
    pub seed: u64,
}

impl FaultScenario {
    /// Noiseless, outlier-free scenario with the default fault current.
    pub fn new(line_id: impl Into<String>, x: f64) -> Self {
        FaultScenario {
            line_id: line_id.into(),
            x,
            fault_current: default_fault_current(),
            noise_rel: 0.0,
            noise_model: NoiseModel::Component,
            outlier_fraction: 0.0,
            outlier_scale: default_outlier_scale(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let element = format!("scenario on line `{}`", self.line_id);
        if !(self.x > 0.0 && self.x < 1.0) {
            return Err(Error::invalid(
                element,
                format!("x = {} must lie in (0, 1)", self.x),
            ));
        }
        if !(self.fault_current.re.is_finite() && self.fault_current.im.is_finite()) {
            return Err(Error::invalid(element, "fault current must be finite"));
        }
        if !(self.noise_rel.is_finite() && self.noise_rel >= 0.0) {
            return Err(Error::invalid(element, "noise_rel must be non-negative"));
        }
        if !(self.outlier_fraction >= 0.0 && self.outlier_fraction < 1.0) {
            return Err(Error::invalid(
                element,
                "outlier_fraction must lie in [0, 1)",
            ));
        }
        if !(self.outlier_scale.is_finite() && self.outlier_scale >= 0.0) {
            return Err(Error::invalid(
                element,
                "outlier_scale must be non-negative",
            ));
        }
        Ok(())
    }
}

/// Sparse complex injection vector with its two-entry support.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectionVector {
    pub theta: Vec<C64>,
    /// Internal indices (from-bus, to-bus) of the faulted line.
    pub support: (usize, usize),
}

impl InjectionVector {
    /// Real-stacked form, length 2N.
    pub fn realified(&self) -> DVector<f64> {
        realify_vector(&self.theta)
    }
}

/// Clean, noisy and outlier-corrupted real-stacked measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub y_clean: Vec<f64>,
    pub y_noisy: Vec<f64>,
    pub y_corrupted: Vec<f64>,
    /// Corrupted positions, ascending.
    pub outlier_indices: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct MeasurementRow {
    index: usize,
    y_clean: f64,
    y_noisy: f64,
    y_corrupted: f64,
    is_outlier: bool,
}

impl MeasurementSet {
    pub fn len(&self) -> usize {
        self.y_clean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_clean.is_empty()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut outliers = self.outlier_indices.iter().peekable();
        for k in 0..self.len() {
            let is_outlier = outliers.next_if_eq(&&k).is_some();
            out.serialize(MeasurementRow {
                index: k,
                y_clean: self.y_clean[k],
                y_noisy: self.y_noisy[k],
                y_corrupted: self.y_corrupted[k],
                is_outlier,
            })?;
        }
        out.flush().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut set = MeasurementSet {
            y_clean: Vec::new(),
            y_noisy: Vec::new(),
            y_corrupted: Vec::new(),
            outlier_indices: Vec::new(),
        };
        for (k, row) in csv::Reader::from_reader(reader).deserialize().enumerate() {
            let row: MeasurementRow = row?;
            if row.index != k {
                return Err(Error::Parse(format!(
                    "measurement rows must be numbered 0, 1, ...; row {k} has index {}",
                    row.index
                )));
            }
            set.y_clean.push(row.y_clean);
            set.y_noisy.push(row.y_noisy);
            set.y_corrupted.push(row.y_corrupted);
            if row.is_outlier {
                set.outlier_indices.push(k);
            }
        }
        if set.len() % 2 != 0 {
            return Err(Error::Dimension(format!(
                "measurement vector must have even length (2M), got {}",
                set.len()
            )));
        }
        Ok(set)
    }
}

/// Terminal injections `(ΔI_from, ΔI_to)` equivalent to a fault current at
/// per-unit distance `x` from the from-bus. `x` may be 0 or 1 here.
pub fn equivalent_injections(line: &Line, x: f64, fault_current: C64) -> Result<(C64, C64)> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(
            format!("line `{}`", line.id),
            format!("distance {x} outside [0, 1]"),
        ));
    }
    let gd = line.gamma_length();
    let sinh = gd.sinh();
    let from = (gd * (1.0 - x)).sinh() / sinh * fault_current;
    let to = (gd * x).sinh() / sinh * fault_current;
    for v in [from, to] {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(format!(
                "equivalent injections on line `{}`",
                line.id
            )));
        }
    }
    Ok((from, to))
}

pub fn scenario_to_injection(scenario: &FaultScenario, net: &Network) -> Result<InjectionVector> {
    scenario.validate()?;
    let line = net.line(&scenario.line_id)?;
    let (from, to) = equivalent_injections(line, scenario.x, scenario.fault_current)?;
    let (i, j) = net.terminals(line);
    let mut theta = vec![C64::new(0.0, 0.0); net.bus_count()];
    theta[i] = from;
    theta[j] = to;
    Ok(InjectionVector {
        theta,
        support: (i, j),
    })
}

/// Noiseless complex measurements `B̄·θ̄`, one per monitored line.
pub fn forward_measurements(
    sensing: &SensingMatrix,
    injection: &InjectionVector,
) -> Result<Vec<C64>> {
    if injection.theta.len() != sensing.bus_count() {
        return Err(Error::Dimension(format!(
            "injection vector has {} entries, sensing matrix has {} columns",
            injection.theta.len(),
            sensing.bus_count()
        )));
    }
    let theta = DVector::from_column_slice(&injection.theta);
    Ok((&sensing.complex * theta).as_slice().to_vec())
}

/// Component-wise multiplicative noise `y_k (1 + u_k)`, `u_k ~ U[-p, p]`.
pub fn add_noise<R: Rng>(y: &[f64], noise_rel: f64, rng: &mut R) -> Vec<f64> {
    if noise_rel == 0.0 {
        return y.to_vec();
    }
    y.iter()
        .map(|&v| v * (1.0 + rng.random_range(-noise_rel..=noise_rel)))
        .collect()
}

/// Phasor noise on a real-stacked vector: magnitude scaled by `1 + u₁`,
/// angle shifted by `u₂` radians.
pub fn add_phasor_noise<R: Rng>(y: &[f64], noise_rel: f64, rng: &mut R) -> Vec<f64> {
    if noise_rel == 0.0 {
        return y.to_vec();
    }
    let m = y.len() / 2;
    let mut out = y.to_vec();
    for k in 0..m {
        let gain = 1.0 + rng.random_range(-noise_rel..=noise_rel);
        let shift = rng.random_range(-noise_rel..=noise_rel);
        let v = C64::new(y[k], y[m + k]) * C64::from_polar(gain, shift);
        out[k] = v.re;
        out[m + k] = v.im;
    }
    out
}

/// Adds gross errors at `round(fraction · len)` distinct positions. Each error
/// has magnitude `U[0.5, 1] · scale · clean_max` and a random sign.
/// Returns the corrupted vector and the ascending corrupted positions.
pub fn inject_outliers<R: Rng>(
    y: &[f64],
    fraction: f64,
    scale: f64,
    clean_max: f64,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<usize>)> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::invalid(
            "outliers",
            format!("fraction {fraction} outside [0, 1)"),
        ));
    }
    let count = (fraction * y.len() as f64).round() as usize;
    let mut positions = index::sample(rng, y.len(), count).into_vec();
    positions.sort_unstable();
    let mut out = y.to_vec();
    for &k in &positions {
        let magnitude = rng.random_range(0.5..=1.0) * scale * clean_max;
        out[k] += if rng.random_bool(0.5) {
            magnitude
        } else {
            -magnitude
        };
    }
    Ok((out, positions))
}

/// Scenario → injection → forward model → real stacking → noise → outliers.
/// All randomness comes from a ChaCha8 stream seeded with `scenario.seed`.
pub fn generate_case(
    scenario: &FaultScenario,
    net: &Network,
    sensing: &SensingMatrix,
) -> Result<(MeasurementSet, InjectionVector)> {
    let injection = scenario_to_injection(scenario, net)?;
    let y_clean: Vec<f64> = realify_vector(&forward_measurements(sensing, &injection)?)
        .as_slice()
        .to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let y_noisy = match scenario.noise_model {
        NoiseModel::Component => add_noise(&y_clean, scenario.noise_rel, &mut rng),
        NoiseModel::Phasor => add_phasor_noise(&y_clean, scenario.noise_rel, &mut rng),
    };
    let clean_max = y_clean.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let (y_corrupted, outlier_indices) = inject_outliers(
        &y_noisy,
        scenario.outlier_fraction,
        scenario.outlier_scale,
        clean_max,
        &mut rng,
    )?;
    Ok((
        MeasurementSet {
            y_clean,
            y_noisy,
            y_corrupted,
            outlier_indices,
        },
        injection,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn line() -> Line {
        Line {
            id: "t".into(),
            from_bus: 1,
            to_bus: 2,
            surge_impedance: C64::new(390.0, -20.0),
            propagation_constant: C64::new(5e-5, 1.05e-3),
            length_km: 250.0,
        }
    }

    #[test]
    fn endpoints_put_everything_on_one_terminal() {
        let f = C64::new(3.0, -4.0);
        assert_eq!(
            equivalent_injections(&line(), 0.0, f).unwrap(),
            (f, C64::new(0.0, 0.0))
        );
        let (a, b) = equivalent_injections(&line(), 1.0, f).unwrap();
        assert_eq!(a, C64::new(0.0, 0.0));
        assert!((b - f).norm() < 1e-15 * f.norm());
    }

    #[test]
    fn midpoint_is_symmetric() {
        let l = line();
        let (a, b) = equivalent_injections(&l, 0.5, C64::new(1.0, 0.0)).unwrap();
        let expect = (l.gamma_length() * 0.5).sinh() / l.gamma_length().sinh();
        assert!((a - b).norm() < 1e-15);
        assert!((a - expect).norm() < 1e-15);
    }

    #[test]
    fn injection_has_two_nonzeros_at_terminals() {
        let bench = fixtures::six_bus().unwrap();
        for l in bench.network.lines() {
            let mut scn = FaultScenario::new(l.id.clone(), 0.5);
            scn.fault_current = C64::new(1.0, 0.0);
            let inj = scenario_to_injection(&scn, &bench.network).unwrap();
            let nonzero: Vec<usize> = (0..inj.theta.len())
                .filter(|&k| inj.theta[k].norm() > 0.0)
                .collect();
            let (i, j) = bench.network.terminals(l);
            let mut expect = vec![i, j];
            expect.sort();
            assert_eq!(nonzero, expect);
            assert!((inj.theta[i] - inj.theta[j]).norm() < 1e-15);
        }
    }

    #[test]
    fn scenario_validation() {
        let net = fixtures::six_bus().unwrap().network;
        for x in [0.0, 1.0, -0.2, f64::NAN] {
            assert!(scenario_to_injection(&FaultScenario::new("L1-2", x), &net).is_err());
        }
        assert!(matches!(
            scenario_to_injection(&FaultScenario::new("nope", 0.5), &net),
            Err(Error::UnknownLine(_))
        ));
        let mut scn = FaultScenario::new("L1-2", 0.5);
        scn.outlier_fraction = 1.0;
        assert!(scn.validate().is_err());
    }

    #[test]
    fn forward_model_shapes() {
        let bench = fixtures::six_bus().unwrap();
        let n = bench.network.bus_count();
        let zero = InjectionVector {
            theta: vec![C64::new(0.0, 0.0); n],
            support: (0, 1),
        };
        assert!(forward_measurements(&bench.sensing, &zero)
            .unwrap()
            .iter()
            .all(|v| v.norm() == 0.0));
        for k in 0..n {
            let mut theta = vec![C64::new(0.0, 0.0); n];
            theta[k] = C64::new(1.0, 0.0);
            let y = forward_measurements(
                &bench.sensing,
                &InjectionVector {
                    theta,
                    support: (k, k),
                },
            )
            .unwrap();
            for (m, v) in y.iter().enumerate() {
                assert_eq!(*v, bench.sensing.complex[(m, k)]);
            }
        }
        let short = InjectionVector {
            theta: vec![C64::new(0.0, 0.0); n - 1],
            support: (0, 1),
        };
        assert!(matches!(
            forward_measurements(&bench.sensing, &short),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn noise_respects_its_bound_and_seed() {
        let y: Vec<f64> = (0..40).map(|k| (k as f64 - 17.5) * 3.1).collect();
        assert_eq!(add_noise(&y, 0.0, &mut ChaCha8Rng::seed_from_u64(1)), y);
        let a = add_noise(&y, 0.01, &mut ChaCha8Rng::seed_from_u64(9));
        let b = add_noise(&y, 0.01, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        for (n, c) in a.iter().zip(&y) {
            assert!((n - c).abs() <= 0.01 * c.abs());
        }
    }

    #[test]
    fn outlier_count_is_exact() {
        let y = vec![1.0; 24];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (z, idx) = inject_outliers(&y, 0.2, 1.0, 1.0, &mut rng).unwrap();
        assert_eq!(idx.len(), 5);
        for k in 0..24 {
            if idx.contains(&k) {
                assert!((z[k] - 1.0).abs() >= 0.5 && (z[k] - 1.0).abs() <= 1.0);
            } else {
                assert_eq!(z[k], y[k]);
            }
        }
        let (z, idx) = inject_outliers(&y, 0.0, 1.0, 1.0, &mut rng).unwrap();
        assert_eq!((z, idx), (y, vec![]));
    }

    #[test]
    fn noiseless_case_is_the_plain_forward_product() {
        let bench = fixtures::six_bus().unwrap();
        let scn = FaultScenario::new("L3-6", 0.3);
        let (meas, inj) = generate_case(&scn, &bench.network, &bench.sensing).unwrap();
        let direct = &bench.sensing.real * inj.realified();
        assert_eq!(meas.y_clean, meas.y_corrupted);
        assert_eq!(meas.y_clean, meas.y_noisy);
        for (a, b) in meas.y_clean.iter().zip(direct.iter()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn csv_round_trip() {
        let bench = fixtures::six_bus().unwrap();
        let mut scn = FaultScenario::new("L4-5", 0.7);
        scn.noise_rel = 0.01;
        scn.outlier_fraction = 0.2;
        scn.seed = 11;
        let (meas, _) = generate_case(&scn, &bench.network, &bench.sensing).unwrap();
        assert_eq!(meas.outlier_indices.len(), 2);
        let mut buf = Vec::new();
        meas.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("index,y_clean,y_noisy,y_corrupted,is_outlier\n"));
        assert_eq!(MeasurementSet::read_csv(buf.as_slice()).unwrap(), meas);
    }

    #[test]
    fn phasor_noise_bounds_magnitude() {
        let y = vec![3.0, -1.0, 4.0, 2.0];
        let z = add_phasor_noise(&y, 0.02, &mut ChaCha8Rng::seed_from_u64(5));
        for k in 0..2 {
            let before = C64::new(y[k], y[k + 2]);
            let after = C64::new(z[k], z[k + 2]);
            assert!((after.norm() / before.norm() - 1.0).abs() <= 0.02 + 1e-15);
            assert!((after / before).arg().abs() <= 0.02 + 1e-15);
        }
    }
}
