use nalgebra::DMatrix;

use super::network::Network;
use crate::error::{Error, Result};
use crate::C64;

const MAX_CONDITION: f64 = 1e12;

/// Bus admittance matrix from exact equivalent-π branch models plus bus shunts.
/// Rows and columns follow the network's internal bus order.
pub fn build_ybus(net: &Network) -> Result<DMatrix<C64>> {
    let n = net.bus_count();
    let mut y = DMatrix::<C64>::zeros(n, n);
    for (k, bus) in net.buses().iter().enumerate() {
        y[(k, k)] += bus.shunt_admittance;
    }
    for line in net.lines() {
        let series = line.series_admittance();
        let shunt = line.terminal_shunt_admittance();
        if !all_finite(&[series, shunt]) {
            return Err(Error::NonFinite(format!(
                "equivalent-pi admittances of line `{}` (gamma*d = {})",
                line.id,
                line.gamma_length()
            )));
        }
        let (s, r) = net.terminals(line);
        y[(s, s)] += series + shunt;
        y[(r, r)] += series + shunt;
        y[(s, r)] -= series;
        y[(r, s)] -= series;
    }
    Ok(y)
}

/// Bus impedance matrix, the inverse of the bus admittance matrix.
#[derive(Debug, Clone)]
pub struct ZBus {
    matrix: DMatrix<C64>,
    condition: f64,
}

impl ZBus {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Element by internal bus indices.
    pub fn get(&self, p: usize, k: usize) -> C64 {
        self.matrix[(p, k)]
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// 1-norm condition number ‖Y‖₁·‖Z‖₁ of the inverted matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Wraps an externally computed impedance matrix (used by test oracles).
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension(format!(
                "impedance matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(ZBus {
            matrix,
            condition: f64::NAN,
        })
    }
}

fn norm1(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn all_finite(values: &[C64]) -> bool {
    values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Inverts the bus admittance matrix by LU with partial pivoting.
pub fn build_zbus(ybus: &DMatrix<C64>) -> Result<ZBus> {
    if ybus.nrows() != ybus.ncols() || ybus.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "admittance matrix must be square and non-empty, got {}x{}",
            ybus.nrows(),
            ybus.ncols()
        )));
    }
    if !all_finite(ybus.as_slice()) {
        return Err(Error::NonFinite("admittance matrix".into()));
    }
    let z = ybus.clone().lu().try_inverse().ok_or(Error::Singular {
        condition: f64::INFINITY,
    })?;
    let condition = norm1(ybus) * norm1(&z);
    if !condition.is_finite() || condition >= MAX_CONDITION || !all_finite(z.as_slice()) {
        return Err(Error::Singular { condition });
    }
    Ok(ZBus {
        matrix: z,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{Bus, Line, Network};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_inverts_elementwise() {
        let d = [c(2.0, 1.0), c(0.5, -3.0), c(-1.0, 0.25)];
        let y = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&d));
        let z = build_zbus(&y).unwrap();
        for (p, dp) in d.iter().enumerate() {
            for k in 0..3 {
                let expect = if p == k { dp.inv() } else { C64::new(0.0, 0.0) };
                assert!((z.get(p, k) - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn identity_inverts_to_identity() {
        let z = build_zbus(&DMatrix::<C64>::identity(4, 4)).unwrap();
        assert_eq!(z.matrix(), &DMatrix::<C64>::identity(4, 4));
        assert!((z.condition() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_matches_adjugate() {
        let (a, b, cc, d) = (c(3.0, -1.0), c(-1.0, 0.5), c(-1.0, 0.5), c(2.0, -4.0));
        let y = DMatrix::from_row_slice(2, 2, &[a, b, cc, d]);
        let det = a * d - b * cc;
        let expect = [d / det, -b / det, -cc / det, a / det];
        let z = build_zbus(&y).unwrap();
        for (k, e) in expect.iter().enumerate() {
            assert!((z.get(k / 2, k % 2) - e).norm() < 1e-14 * e.norm().max(1.0));
        }
    }

    #[test]
    fn singular_is_rejected() {
        let y = DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)],
        );
        assert!(matches!(build_zbus(&y), Err(Error::Singular { .. })));
        let y = DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1e-14, 0.0)],
        );
        assert!(matches!(build_zbus(&y), Err(Error::Singular { .. })));
    }

    #[test]
    fn short_line_matches_lumped_pi() {
        let line = Line {
            id: "s".into(),
            from_bus: 1,
            to_bus: 2,
            surge_impedance: c(300.0, -12.0),
            propagation_constant: c(3e-7, 9e-6),
            length_km: 10.0,
        };
        let gd = line.gamma_length();
        assert!(gd.norm() <= 1e-4);
        let z = line.surge_impedance;
        let series = (z * gd).inv();
        let shunt = gd / (z * 2.0);
        assert!((line.series_admittance() - series).norm() <= 1e-6 * series.norm());
        assert!((line.terminal_shunt_admittance() - shunt).norm() <= 1e-6 * shunt.norm());
    }

    #[test]
    fn shunts_only_give_diagonal_ybus() {
        // Several isolated buses fail the connectivity check, so use one.
        let bus = Bus {
            id: 1,
            shunt_admittance: c(0.01, -0.1),
        };
        let net = Network::new(vec![bus.clone()], vec![]).unwrap();
        let y = build_ybus(&net).unwrap();
        assert_eq!(y, DMatrix::from_element(1, 1, bus.shunt_admittance));
    }
}
