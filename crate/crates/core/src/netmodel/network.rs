use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::admittance::{build_ybus, build_zbus};
use crate::error::{Error, Result};
use crate::C64;

/// A bus with its shunt admittance to ground (generator/source equivalent or
/// constant-impedance load), in siemens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bus {
    pub id: i64,
    #[serde(with = "crate::serde_complex")]
    pub shunt_admittance: C64,
}

/// A distributed-parameter transmission line.
///
/// `from_bus` is the measurement terminal: when the line is monitored, the
/// sensor reports the superimposed current leaving `from_bus` into the line.
/// Per-unit fault distances are measured from `from_bus` as well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Line {
    pub id: String,
    #[serde(rename = "from")]
    pub from_bus: i64,
    #[serde(rename = "to")]
    pub to_bus: i64,
    /// Surge (characteristic) impedance, ohms.
    #[serde(rename = "z", with = "crate::serde_complex")]
    pub surge_impedance: C64,
    /// Propagation constant, per km.
    #[serde(rename = "gamma", with = "crate::serde_complex")]
    pub propagation_constant: C64,
    pub length_km: f64,
}

impl Line {
    /// Electrical length γ·d (dimensionless).
    pub fn gamma_length(&self) -> C64 {
        self.propagation_constant * self.length_km
    }

    /// Series admittance 1/(z·sinh γd) of the exact equivalent-π.
    pub fn series_admittance(&self) -> C64 {
        (self.surge_impedance * self.gamma_length().sinh()).inv()
    }

    /// Shunt admittance tanh(γd/2)/z at each terminal of the exact equivalent-π.
    pub fn terminal_shunt_admittance(&self) -> C64 {
        (self.gamma_length() * 0.5).tanh() / self.surge_impedance
    }

    fn validate(&self) -> Result<()> {
        let element = format!("line `{}`", self.id);
        let finite = |c: C64| c.re.is_finite() && c.im.is_finite();
        if !finite(self.surge_impedance)
            || !finite(self.propagation_constant)
            || !self.length_km.is_finite()
        {
            return Err(Error::invalid(element, "parameters must be finite"));
        }
        if self.length_km <= 0.0 {
            return Err(Error::invalid(element, "length must be positive"));
        }
        if self.surge_impedance.norm() == 0.0 {
            return Err(Error::invalid(element, "surge impedance must be nonzero"));
        }
        if self.propagation_constant.re < 0.0 {
            return Err(Error::invalid(
                element,
                "propagation constant must have a non-negative real part",
            ));
        }
        if self.from_bus == self.to_bus {
            return Err(Error::invalid(element, "line terminals must differ"));
        }
        let sinh = self.gamma_length().sinh();
        if !finite(sinh) || sinh.norm() <= 1e-12 {
            return Err(Error::invalid(
                element,
                format!("|sinh(gamma*d)| = {:.3e} is degenerate", sinh.norm()),
            ));
        }
        Ok(())
    }
}

/// A validated network. Construct with [`load_network`] or [`Network::new`].
#[derive(Debug, Clone)]
pub struct Network {
    buses: Vec<Bus>,
    lines: Vec<Line>,
    bus_index: HashMap<i64, usize>,
    line_index: HashMap<String, usize>,
    condition: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDocument {
    buses: Vec<Bus>,
    lines: Vec<Line>,
}

/// Parses and validates a network JSON document.
pub fn load_network(document: &str) -> Result<Network> {
    let doc: NetworkDocument = serde_json::from_str(document)?;
    Network::new(doc.buses, doc.lines)
}

impl Network {
    /// Validates buses and lines and checks that the bus admittance matrix is
    /// invertible. Buses are reordered by ascending id.
    pub fn new(mut buses: Vec<Bus>, lines: Vec<Line>) -> Result<Self> {
        if buses.is_empty() {
            return Err(Error::invalid("network", "at least one bus is required"));
        }
        buses.sort_by_key(|b| b.id);
        let mut bus_index = HashMap::with_capacity(buses.len());
        for (k, bus) in buses.iter().enumerate() {
            let y = bus.shunt_admittance;
            if !(y.re.is_finite() && y.im.is_finite()) {
                return Err(Error::invalid(
                    format!("bus {}", bus.id),
                    "shunt admittance must be finite",
                ));
            }
            if bus_index.insert(bus.id, k).is_some() {
                return Err(Error::invalid(
                    format!("bus {}", bus.id),
                    "duplicate bus id",
                ));
            }
        }

        let mut line_index = HashMap::with_capacity(lines.len());
        for (k, line) in lines.iter().enumerate() {
            line.validate()?;
            for terminal in [line.from_bus, line.to_bus] {
                if !bus_index.contains_key(&terminal) {
                    return Err(Error::invalid(
                        format!("line `{}`", line.id),
                        format!("references unknown bus {terminal}"),
                    ));
                }
            }
            if line_index.insert(line.id.clone(), k).is_some() {
                return Err(Error::invalid(
                    format!("line `{}`", line.id),
                    "duplicate line id",
                ));
            }
        }

        if buses.iter().all(|b| b.shunt_admittance.norm() == 0.0) {
            return Err(Error::invalid(
                "network",
                "at least one bus needs a nonzero shunt admittance (source equivalent)",
            ));
        }

        let mut net = Network {
            buses,
            lines,
            bus_index,
            line_index,
            condition: f64::NAN,
        };
        net.check_connected()?;
        let zbus = build_zbus(&build_ybus(&net)?)?;
        net.condition = zbus.condition();
        Ok(net)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.buses.len();
        let mut adjacency = vec![Vec::new(); n];
        for line in &self.lines {
            let (s, r) = self.terminals(line);
            adjacency[s].push(r);
            adjacency[r].push(s);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(k) = queue.pop_front() {
            for &next in &adjacency[k] {
                if !seen[next] {
                    seen[next] = true;
                    queue.push_back(next);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(k) => Err(Error::Disconnected {
                root: self.buses[0].id,
                unreachable: self.buses[k].id,
            }),
            None => Ok(()),
        }
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn bus_count(&self) -> usize {
        self.buses.len()
    }

    /// Internal index of an external bus id.
    pub fn bus_index(&self, id: i64) -> Result<usize> {
        self.bus_index
            .get(&id)
            .copied()
            .ok_or(Error::UnknownBus(id))
    }

    /// External id of the bus at internal index `k`.
    pub fn bus_id(&self, k: usize) -> i64 {
        self.buses[k].id
    }

    pub fn line(&self, id: &str) -> Result<&Line> {
        self.line_index
            .get(id)
            .map(|&k| &self.lines[k])
            .ok_or_else(|| Error::UnknownLine(id.to_owned()))
    }

    /// Internal indices of the (from, to) terminals of a line of this network.
    pub fn terminals(&self, line: &Line) -> (usize, usize) {
        (self.bus_index[&line.from_bus], self.bus_index[&line.to_bus])
    }

    /// 1-norm condition estimate of the bus admittance matrix, computed at load.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }
}

/// The ordered set of monitored lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSet {
    #[serde(rename = "monitored_lines")]
    pub monitored_line_ids: Vec<String>,
}

impl SensorSet {
    pub fn new(ids: impl IntoIterator<Item = impl Into<String>>) -> Self {
        SensorSet {
            monitored_line_ids: ids.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.monitored_line_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monitored_line_ids.is_empty()
    }

    /// Checks the set against a network: non-empty, known ids, no repeats.
    pub fn validate(&self, net: &Network) -> Result<()> {
        if self.is_empty() {
            return Err(Error::invalid(
                "sensor set",
                "at least one monitored line is required",
            ));
        }
        let mut seen = HashSet::new();
        for id in &self.monitored_line_ids {
            net.line(id)?;
            if !seen.insert(id) {
                return Err(Error::invalid(
                    "sensor set",
                    format!("line `{id}` is listed twice"),
                ));
            }
        }
        Ok(())
    }
}

/// Parses a sensor-set document and validates it against `net`.
pub fn load_sensors(document: &str, net: &Network) -> Result<SensorSet> {
    let set: SensorSet = serde_json::from_str(document)?;
    set.validate(net)?;
    Ok(set)
}
