//! Positive-sequence network model: distributed-parameter lines, bus
//! admittance / impedance matrices and the branch-bus sensing matrix.
//!
//! Bus ids in documents are arbitrary unique integers. Internally buses are
//! indexed `0..N` in ascending id order and every matrix uses that order;
//! [`Network::bus_id`] and [`Network::bus_index`] translate between the two.

mod admittance;
mod network;
mod sensing;

pub use admittance::{build_ybus, build_zbus, ZBus};
pub use network::{load_network, load_sensors, Bus, Line, Network, SensorSet};
pub use sensing::{
    beta_coefficient, build_sensing_matrix, complexify_vector, realify_matrix, realify_vector,
    SensingMatrix,
};
