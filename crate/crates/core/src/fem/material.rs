use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use super::FemError;

/// Isotropic linear-elastic material with an admissible stress.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    /// Pa
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// kg/m³
    pub density: f64,
    /// Pa
    pub allowed_stress: f64,
}

impl Default for Material {
    fn default() -> Self {
        Material::cast_steel()
    }
}

impl Material {
    /// Cast steel: E = 2e11 Pa, ν = 0.25, ρ = 7850 kg/m³, allowed 150 MPa.
    pub const fn cast_steel() -> Material {
        Material {
            youngs_modulus: 2e11,
            poisson_ratio: 0.25,
            density: 7850.0,
            allowed_stress: 150e6,
        }
    }

    /// Unit-modulus pseudo-material for velocity smoothing.
    pub const fn smoothing(poisson_ratio: f64) -> Material {
        Material {
            youngs_modulus: 1.0,
            poisson_ratio,
            density: 1.0,
            allowed_stress: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), FemError> {
        let ok = self.youngs_modulus > 0.0
            && (0.0..0.5).contains(&self.poisson_ratio)
            && self.density > 0.0
            && self.allowed_stress > 0.0
            && [self.youngs_modulus, self.density, self.allowed_stress]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(FemError::Material(format!("{self:?}")))
        }
    }

    pub fn shear_modulus(&self) -> f64 {
        self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))
    }

    /// Lamé's first parameter for the given model (plane stress uses the
    /// reduced λ* = Eν/(1−ν²)).
    pub(crate) fn lambda(&self, dim: usize) -> f64 {
        let (e, nu) = (self.youngs_modulus, self.poisson_ratio);
        if dim == 2 {
            e * nu / (1.0 - nu * nu)
        } else {
            e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
        }
    }

    /// σ = C : ε. In 2D only the in-plane block is used (plane stress).
    pub fn stress(&self, dim: usize, strain: &Matrix3<f64>) -> Matrix3<f64> {
        let lambda = self.lambda(dim);
        let mu = self.shear_modulus();
        let mut s = 2.0 * mu * strain;
        let tr: f64 = (0..dim).map(|i| strain[(i, i)]).sum();
        for i in 0..dim {
            s[(i, i)] += lambda * tr;
        }
        if dim == 2 {
            for i in 0..3 {
                s[(2, i)] = 0.0;
                s[(i, 2)] = 0.0;
            }
        }
        s
    }

    /// Voigt constitutive matrix with engineering shear strains:
    /// 2D `[xx, yy, xy]`, 3D `[xx, yy, zz, yz, xz, xy]`.
    pub fn voigt_matrix(&self, dim: usize) -> DMatrix<f64> {
        let lambda = self.lambda(dim);
        let mu = self.shear_modulus();
        let n = if dim == 2 { 3 } else { 6 };
        let mut d = DMatrix::zeros(n, n);
        for i in 0..dim {
            for j in 0..dim {
                d[(i, j)] = lambda;
            }
            d[(i, i)] += 2.0 * mu;
        }
        for i in dim..n {
            d[(i, i)] = mu;
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_cast_steel() {
        let m = Material::default();
        assert_eq!(m.youngs_modulus, 2e11);
        assert_eq!(m.poisson_ratio, 0.25);
        assert_eq!(m.density, 7850.0);
        assert_eq!(m.allowed_stress, 150e6);
        m.validate().unwrap();
    }

    #[test]
    fn rejects_incompressible_and_negative() {
        let m = Material { poisson_ratio: 0.5, ..Material::default() };
        assert!(m.validate().is_err());
        let m = Material { youngs_modulus: -1.0, ..Material::default() };
        assert!(m.validate().is_err());
    }

    #[test]
    fn plane_stress_uniaxial_strain_response() {
        let m = Material::default();
        let (e, nu) = (m.youngs_modulus, m.poisson_ratio);
        let mut eps = Matrix3::zeros();
        eps[(0, 0)] = 1e-3;
        eps[(1, 1)] = -nu * 1e-3;
        let s = m.stress(2, &eps);
        assert!((s[(0, 0)] - e * 1e-3).abs() < 1e-6 * e * 1e-3);
        assert!(s[(1, 1)].abs() < 1e-9 * e * 1e-3);
    }
}
