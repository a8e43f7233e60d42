use nalgebra::{DMatrix, DVector};

use super::admittance::ZBus;
use super::network::{Line, Network, SensorSet};
use crate::error::{Error, Result};
use crate::C64;

/// Sensitivity of the current leaving `line.from_bus` into `line` to a unit
/// current injection at bus `bus_id`.
pub fn beta_coefficient(net: &Network, zbus: &ZBus, line: &Line, bus_id: i64) -> Result<C64> {
    let k = net.bus_index(bus_id)?;
    if zbus.dim() != net.bus_count() {
        return Err(Error::Dimension(format!(
            "impedance matrix is {0}x{0} but the network has {1} buses",
            zbus.dim(),
            net.bus_count()
        )));
    }
    let (s, r) = net.terminals(line);
    let beta = beta_from_terminals(line, zbus.get(s, k), zbus.get(r, k));
    if !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::NonFinite(format!(
            "beta coefficient of line `{}` at bus {bus_id}",
            line.id
        )));
    }
    Ok(beta)
}

/// β from the two terminal transfer impedances Z_sk and Z_rk.
pub(crate) fn beta_from_terminals(line: &Line, z_sk: C64, z_rk: C64) -> C64 {
    let gd = line.gamma_length();
    let z = line.surge_impedance;
    z_sk / z * (gd * 0.5).tanh() + (z_sk - z_rk) / (z * gd.sinh())
}

/// Complex branch-bus matrix and its real stacking.
#[derive(Debug, Clone)]
pub struct SensingMatrix {
    /// M×N complex matrix, one row per monitored line.
    pub complex: DMatrix<C64>,
    /// 2M×2N real matrix `[[Re, -Im], [Im, Re]]`.
    pub real: DMatrix<f64>,
    /// Monitored line id of each row.
    pub row_line_ids: Vec<String>,
    /// External bus id of each complex column.
    pub column_bus_ids: Vec<i64>,
}

impl SensingMatrix {
    pub fn from_complex(
        complex: DMatrix<C64>,
        row_line_ids: Vec<String>,
        column_bus_ids: Vec<i64>,
    ) -> Result<Self> {
        if row_line_ids.len() != complex.nrows() || column_bus_ids.len() != complex.ncols() {
            return Err(Error::Dimension(format!(
                "index maps ({} rows, {} columns) do not match a {}x{} matrix",
                row_line_ids.len(),
                column_bus_ids.len(),
                complex.nrows(),
                complex.ncols()
            )));
        }
        let real = realify_matrix(&complex);
        Ok(SensingMatrix {
            complex,
            real,
            row_line_ids,
            column_bus_ids,
        })
    }

    /// Number of monitored lines M.
    pub fn sensor_count(&self) -> usize {
        self.complex.nrows()
    }

    /// Number of buses N.
    pub fn bus_count(&self) -> usize {
        self.complex.ncols()
    }
}

pub fn build_sensing_matrix(
    net: &Network,
    sensors: &SensorSet,
    zbus: &ZBus,
) -> Result<SensingMatrix> {
    sensors.validate(net)?;
    let n = net.bus_count();
    let m = sensors.len();
    let mut complex = DMatrix::<C64>::zeros(m, n);
    for (row, id) in sensors.monitored_line_ids.iter().enumerate() {
        let line = net.line(id)?;
        for (col, bus) in net.buses().iter().enumerate() {
            complex[(row, col)] = beta_coefficient(net, zbus, line, bus.id)?;
        }
    }
    SensingMatrix::from_complex(
        complex,
        sensors.monitored_line_ids.clone(),
        net.buses().iter().map(|b| b.id).collect(),
    )
}

/// Block real form `[[Re, -Im], [Im, Re]]` of a complex matrix.
pub fn realify_matrix(c: &DMatrix<C64>) -> DMatrix<f64> {
    let (m, n) = c.shape();
    let mut out = DMatrix::<f64>::zeros(2 * m, 2 * n);
    for i in 0..m {
        for k in 0..n {
            let v = c[(i, k)];
            out[(i, k)] = v.re;
            out[(i, n + k)] = -v.im;
            out[(m + i, k)] = v.im;
            out[(m + i, n + k)] = v.re;
        }
    }
    out
}

/// Real parts followed by imaginary parts.
pub fn realify_vector(v: &[C64]) -> DVector<f64> {
    DVector::from_iterator(
        2 * v.len(),
        v.iter().map(|c| c.re).chain(v.iter().map(|c| c.im)),
    )
}

/// Inverse of [`realify_vector`].
pub fn complexify_vector(v: &[f64]) -> Result<Vec<C64>> {
    if v.len() % 2 != 0 {
        return Err(Error::Dimension(format!(
            "cannot complexify a vector of odd length {}",
            v.len()
        )));
    }
    let (re, im) = v.split_at(v.len() / 2);
    Ok(re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect())
}
