use crate::error::{GaugeLabError, Result};

/// Physical constants; natural units (everything 1) by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    /// Particle charge `e`. May be negative, never zero.
    pub charge: f64,
    pub mass: f64,
    /// `1/(4 pi eps0)`.
    pub coulomb_k: f64,
    /// `mu0/(4 pi)`.
    pub biot_k: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            charge: 1.0,
            mass: 1.0,
            coulomb_k: 1.0,
            biot_k: 1.0,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("coulomb_k", self.coulomb_k),
            ("biot_k", self.biot_k),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(GaugeLabError::InvalidInput(format!(
                    "{name} must be finite and strictly positive, got {v}"
                )));
            }
        }
        if !(self.charge.is_finite() && self.charge != 0.0) {
            return Err(GaugeLabError::InvalidInput(format!(
                "charge must be finite and nonzero, got {}",
                self.charge
            )));
        }
        Ok(())
    }

    /// `e/hbar`, the coupling in the wavefunction phase `exp(i e chi / hbar)`.
    pub fn phase_coupling(&self) -> f64 {
        self.charge / self.hbar
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_natural_units() {
        let c = PhysicalConstants::default();
        assert!(c.validate().is_ok());
        assert_eq!(c.phase_coupling(), 1.0);
    }

    #[test]
    fn rejects_zero_charge_and_negative_mass() {
        let c = PhysicalConstants {
            charge: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = PhysicalConstants {
            mass: -1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = PhysicalConstants {
            charge: -1.0,
            ..Default::default()
        };
        assert!(c.validate().is_ok());
    }
}
