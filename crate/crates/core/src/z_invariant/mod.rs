//! Elliptic eight-vertex weights on lozenge graphs, the checkerboard
//! Yang-Baxter equations, local inverse Kasteleyn operators and their
//! asymptotics.

pub mod asymptotics;
pub mod lattice;
pub mod local_inverse;
pub mod oracle;
pub mod ybe;

use crate::elliptic::{am, jacobi_real, theta_scale};
use crate::error::{Error, Result};
use crate::weights::{Angles, FaceWeights, WeightField};
use std::f64::consts::PI;

pub use asymptotics::{
    asymptotic_prediction, cardinal_check, chi, chi_second_derivative, critical_exponent_scan, decay_fit, u0,
    DecayFit, ExponentScan,
};
pub use lattice::{RhombicLattice, RhombusPath, Site};
pub use local_inverse::{
    edge_probabilities_planar, f_bw, f_bw_critical, kinv6v_entry, kinv8v_entries, massive_exp, ContourSpec,
    LocalInverse,
};
pub use oracle::bloch_inverse;
pub use ybe::{ybe_residuals, YbeResiduals};

/// Pair of elliptic parameters `(k^2, l^2)`, each below 1 and possibly negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZInvWeights {
    pub k2: f64,
    pub l2: f64,
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < PI / 2.0) {
        return Err(Error::Argument(format!("rhombus half-angle {theta} outside (0, pi/2)")));
    }
    Ok(())
}

impl ZInvWeights {
    pub fn new(k2: f64, l2: f64) -> Result<Self> {
        for m in [k2, l2] {
            if !(m < 1.0) || !m.is_finite() {
                return Err(Error::Argument(format!("elliptic parameter {m} must be < 1")));
            }
        }
        Ok(ZInvWeights { k2, l2 })
    }

    /// Real moduli `0 <= k, l < 1`.
    pub fn from_moduli(k: f64, l: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) || !(0.0..1.0).contains(&l) {
            return Err(Error::Argument(format!("moduli ({k}, {l}) outside [0, 1)")));
        }
        Self::new(k * k, l * l)
    }

    /// Moduli as real numbers, when both parameters are nonnegative.
    pub fn moduli(&self) -> Option<(f64, f64)> {
        (self.k2 >= 0.0 && self.l2 >= 0.0).then(|| (self.k2.sqrt(), self.l2.sqrt()))
    }

    /// `0 <= k < l < 1`, the regime of the infinite-volume measure.
    pub fn is_probabilistic(&self) -> bool {
        self.k2 >= 0.0 && self.k2 < self.l2
    }

    /// Angle pair `(am(theta_k | k), am(theta_l | l))` with `theta_k = 2 K theta / pi`.
    pub fn angles(&self, theta: f64) -> Result<Angles> {
        check_theta(theta)?;
        Ok(Angles::new(
            am(theta_scale(theta, self.k2)?, self.k2)?,
            am(theta_scale(theta, self.l2)?, self.l2)?,
        ))
    }

    /// Weights of a rhombus with half-angle `theta` at its black corners.
    pub fn face(&self, theta: f64) -> Result<FaceWeights> {
        check_theta(theta)?;
        let (sk, ck, _) = jacobi_real(theta_scale(theta, self.k2)?, self.k2)?;
        let (sl, cl, _) = jacobi_real(theta_scale(theta, self.l2)?, self.l2)?;
        Ok(FaceWeights::new(sk + sl, ck + cl, 1.0 + sk * sl + ck * cl, ck * sl - sk * cl))
    }

    pub fn field(&self, thetas: &[f64]) -> Result<WeightField> {
        thetas.iter().map(|&t| self.face(t)).collect()
    }

    /// Same moduli with `l` replaced by `k`.
    pub fn diagonal_k(&self) -> Self {
        ZInvWeights { k2: self.k2, l2: self.k2 }
    }

    pub fn diagonal_l(&self) -> Self {
        ZInvWeights { k2: self.l2, l2: self.l2 }
    }
}

/// Elliptic weights of one rhombus for parameters `k2 = k^2`, `l2 = l^2`.
pub fn zinv_weights(theta: f64, k2: f64, l2: f64) -> Result<FaceWeights> {
    ZInvWeights::new(k2, l2)?.face(theta)
}
