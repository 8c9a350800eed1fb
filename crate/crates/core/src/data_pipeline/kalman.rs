//! Constant-velocity Kalman filter on `(x, y, vx, vy)`.

use nalgebra::{Matrix2, Matrix2x4, Matrix4, SymmetricEigen, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanState {
    pub mean: Vector4<f64>,
    pub covariance: Matrix4<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KalmanNoise {
    /// White-noise acceleration spectral density, m²/s³.
    pub accel_var: f64,
    /// Position measurement variance, m².
    pub meas_var: f64,
}

impl Default for KalmanNoise {
    fn default() -> Self {
        KalmanNoise {
            accel_var: 1.0,
            meas_var: 0.25,
        }
    }
}

impl KalmanState {
    pub fn new(x: f64, y: f64, vx: f64, vy: f64, covariance: Matrix4<f64>) -> Self {
        KalmanState {
            mean: Vector4::new(x, y, vx, vy),
            covariance,
        }
    }

    /// A fresh track at a measured position with unknown velocity.
    pub fn from_position(x: f64, y: f64, pos_var: f64, vel_var: f64) -> Self {
        KalmanState::new(
            x,
            y,
            0.0,
            0.0,
            Matrix4::from_diagonal(&Vector4::new(pos_var, pos_var, vel_var, vel_var)),
        )
    }

    pub fn position(&self) -> (f64, f64) {
        (self.mean[0], self.mean[1])
    }

    pub fn velocity(&self) -> (f64, f64) {
        (self.mean[2], self.mean[3])
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let sym = (self.covariance + self.covariance.transpose()) * 0.5;
        SymmetricEigen::new(sym).eigenvalues.min()
    }

    fn check_psd(&self) -> Result<()> {
        let asym = (self.covariance - self.covariance.transpose()).abs().max();
        let scale = self.covariance.abs().max().max(1.0);
        let min_eig = self.min_eigenvalue();
        if asym > PSD_TOL * scale || min_eig < -PSD_TOL * scale || !min_eig.is_finite() {
            return Err(Error::NotPsd {
                min_eigenvalue: min_eig,
            });
        }
        Ok(())
    }
}

/// One predict step over `dt`, followed by a position update when a
/// measurement `(x, y)` is given. Uses the Joseph form so the covariance
/// stays symmetric positive semi-definite.
pub fn kalman_predict_update(
    state: &KalmanState,
    dt: f64,
    measurement: Option<(f64, f64)>,
    noise: &KalmanNoise,
) -> Result<KalmanState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    state.check_psd()?;
    let f = Matrix4::new(
        1.0, 0.0, dt, 0.0, //
        0.0, 1.0, 0.0, dt, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    );
    let q = if noise.accel_var == 0.0 {
        Matrix4::zeros()
    } else {
        let (dt2, dt3) = (dt * dt, dt * dt * dt);
        let a = dt3 / 3.0;
        let b = dt2 / 2.0;
        Matrix4::new(
            a, 0.0, b, 0.0, //
            0.0, a, 0.0, b, //
            b, 0.0, dt, 0.0, //
            0.0, b, 0.0, dt,
        ) * noise.accel_var
    };
    let mean = f * state.mean;
    let mut cov = f * state.covariance * f.transpose() + q;
    cov = (cov + cov.transpose()) * 0.5;
    let mut out = KalmanState {
        mean,
        covariance: cov,
    };
    if let Some((zx, zy)) = measurement {
        let h = Matrix2x4::new(
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0,
        );
        let r = Matrix2::identity() * noise.meas_var;
        let s = h * cov * h.transpose() + r;
        let s_inv = s
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("singular innovation covariance".into()))?;
        let k = cov * h.transpose() * s_inv;
        let innovation = Vector2::new(zx, zy) - h * mean;
        out.mean = mean + k * innovation;
        let i_kh = Matrix4::identity() - k * h;
        let joseph = i_kh * cov * i_kh.transpose() + k * r * k.transpose();
        out.covariance = (joseph + joseph.transpose()) * 0.5;
    }
    Ok(out)
}
