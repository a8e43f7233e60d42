//! Bundled synthetic benchmark networks.
//!
//! `six_bus`: 6 buses, 7 lines, two source buses, 5 monitored lines.
//! `fourteen_bus`: 14 buses, 30 lines (a meshed 14-bus topology with extra
//! ties), five generator buses, 10 monitored lines. `fourteen_bus_dense`
//! monitors all 30 lines of the same network.
//!
//! Line constants are derived from per-km series impedance and shunt
//! susceptance by `data/generate.py`.

use crate::error::{Error, Result};
use crate::netmodel::{
    build_sensing_matrix, build_ybus, build_zbus, load_network, load_sensors, Network,
    SensingMatrix, SensorSet, ZBus,
};

pub const SIX_BUS_NETWORK: &str = include_str!("../data/six_bus.json");
pub const SIX_BUS_SENSORS: &str = include_str!("../data/six_bus_sensors.json");
pub const FOURTEEN_BUS_NETWORK: &str = include_str!("../data/fourteen_bus.json");
pub const FOURTEEN_BUS_SENSORS: &str = include_str!("../data/fourteen_bus_sensors.json");
pub const FOURTEEN_BUS_SENSORS_DENSE: &str =
    include_str!("../data/fourteen_bus_sensors_dense.json");

/// A network with its sensor placement and derived matrices.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub network: Network,
    pub sensors: SensorSet,
    pub zbus: ZBus,
    pub sensing: SensingMatrix,
}

impl Benchmark {
    pub fn assemble(network: Network, sensors: SensorSet) -> Result<Self> {
        let zbus = build_zbus(&build_ybus(&network)?)?;
        let sensing = build_sensing_matrix(&network, &sensors, &zbus)?;
        Ok(Benchmark {
            network,
            sensors,
            zbus,
            sensing,
        })
    }

    /// Loads and assembles from network and sensor documents.
    pub fn from_documents(network: &str, sensors: &str) -> Result<Self> {
        let network = load_network(network)?;
        let sensors = load_sensors(sensors, &network)?;
        Self::assemble(network, sensors)
    }
}

pub fn six_bus() -> Result<Benchmark> {
    Benchmark::from_documents(SIX_BUS_NETWORK, SIX_BUS_SENSORS)
}

pub fn fourteen_bus() -> Result<Benchmark> {
    Benchmark::from_documents(FOURTEEN_BUS_NETWORK, FOURTEEN_BUS_SENSORS)
}

pub fn fourteen_bus_dense() -> Result<Benchmark> {
    Benchmark::from_documents(FOURTEEN_BUS_NETWORK, FOURTEEN_BUS_SENSORS_DENSE)
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 3] = ["six-bus", "fourteen-bus", "fourteen-bus-dense"];

/// Bundled benchmark by name (`six-bus`, `fourteen-bus`, `fourteen-bus-dense`).
pub fn by_name(name: &str) -> Result<Benchmark> {
    match name {
        "six-bus" => six_bus(),
        "fourteen-bus" => fourteen_bus(),
        "fourteen-bus-dense" => fourteen_bus_dense(),
        other => Err(Error::invalid(
            "fixture",
            format!(
                "unknown fixture `{other}` (expected one of {})",
                NAMES.join(", ")
            ),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_networks_load() {
        let six = six_bus().unwrap();
        assert_eq!(six.network.bus_count(), 6);
        assert_eq!(six.network.lines().len(), 7);
        assert_eq!(six.sensors.len(), 5);
        assert!(six.network.condition_estimate() < 1e6);

        let fourteen = fourteen_bus().unwrap();
        assert_eq!(fourteen.network.bus_count(), 14);
        assert_eq!(fourteen.network.lines().len(), 30);
        assert_eq!(fourteen.sensors.len(), 10);

        assert_eq!(fourteen_bus_dense().unwrap().sensors.len(), 30);
    }
}
