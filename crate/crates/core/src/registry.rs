//! Rank-one Riemannian symmetric spaces of compact type and the parameters
//! of their invariant Ricci-flat Kähler families.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `Sⁿ = SO(n+1)/SO(n)`
    Sphere,
    /// `ℝPⁿ = SO(n+1)/O(n)`, carried on the sphere model.
    #[serde(rename = "rpn")]
    RealProj,
    /// `ℂPⁿ = SU(n+1)/S(U(1)×U(n))`
    #[serde(rename = "cpn")]
    ComplexProj,
    /// `ℍPⁿ = Sp(n+1)/Sp(1)×Sp(n)`
    #[serde(rename = "hpn")]
    QuatProj,
    /// `ℂaP² = F₄/Spin(9)`
    Cayley,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Sphere,
        Family::RealProj,
        Family::ComplexProj,
        Family::QuatProj,
        Family::Cayley,
    ];

    /// Name used on the command line and in config files.
    pub fn cli_name(self) -> &'static str {
        match self {
            Family::Sphere => "sphere",
            Family::RealProj => "rpn",
            Family::ComplexProj => "cpn",
            Family::QuatProj => "hpn",
            Family::Cayley => "cayley",
        }
    }

    fn valid_range(self) -> &'static str {
        match self {
            Family::Sphere | Family::RealProj => "n >= 2",
            Family::ComplexProj | Family::QuatProj => "n >= 1",
            Family::Cayley => "n = 2",
        }
    }

    fn accepts(self, n: u32) -> bool {
        match self {
            Family::Sphere | Family::RealProj => n >= 2,
            Family::ComplexProj | Family::QuatProj => n >= 1,
            Family::Cayley => n == 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sphere" => Ok(Family::Sphere),
            "rpn" => Ok(Family::RealProj),
            "cpn" => Ok(Family::ComplexProj),
            "hpn" => Ok(Family::QuatProj),
            "cayley" => Ok(Family::Cayley),
            other => Err(Error::Domain(format!(
                "unknown space '{other}' (expected one of sphere, rpn, cpn, hpn, cayley)"
            ))),
        }
    }
}

/// One row of the rank-one classification table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub family: Family,
    pub n: u32,
    /// Real dimension of `G/K`, equal to `dim 𝔪`.
    pub dim: usize,
    /// Multiplicity of the restricted root `ε`.
    pub m_eps: usize,
    /// Multiplicity of the restricted root `ε/2`.
    pub m_half: usize,
    /// `m_eps + m_half + 1`.
    pub m_total: usize,
    /// `Σ_H = {±ε}`: the algebra `𝔤_H` is larger than `𝔞`.
    pub sigma_h_nonempty: bool,
    pub h_label: String,
    /// Dimension of the centralizer `𝔥` of `𝔞` in `𝔨`.
    pub h_dim: usize,
    pub has_matrix_model: bool,
}

impl SpaceDescriptor {
    /// Whether `a(x) = f'(x) X` with `f'` given by the multiplicity integral.
    /// Only `ℂPⁿ` carries the extra `c_Z` directions.
    pub fn uses_integral_profile(&self) -> bool {
        self.family != Family::ComplexProj
    }

    pub fn label(&self) -> String {
        match self.family {
            Family::Cayley => "cayley".to_string(),
            f => format!("{}({})", f.cli_name(), self.n),
        }
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Look up the descriptor of `(family, n)`.
pub fn lookup_space(family: Family, n: u32) -> Result<SpaceDescriptor> {
    if !family.accepts(n) {
        return Err(Error::Domain(format!(
            "{family} is defined for {}, got n = {n}",
            family.valid_range()
        )));
    }
    let nu = n as usize;
    let (m_eps, m_half, h_label, h_dim) = match family {
        Family::Sphere | Family::RealProj => (
            nu - 1,
            0,
            format!("so({})", nu - 1),
            (nu - 1) * (nu.saturating_sub(2)) / 2,
        ),
        Family::ComplexProj => (
            1,
            2 * nu - 2,
            format!("R+su({})", nu - 1),
            (nu - 1) * (nu - 1),
        ),
        Family::QuatProj => (
            3,
            4 * nu - 4,
            format!("sp(1)+sp({})", nu - 1),
            3 + (nu - 1) * (2 * nu - 1),
        ),
        Family::Cayley => (7, 8, "so(7)".to_string(), 21),
    };
    let sigma_h_nonempty = match family {
        Family::ComplexProj => true,
        Family::RealProj => n == 2,
        _ => false,
    };
    let dim = 1 + m_eps + m_half;
    Ok(SpaceDescriptor {
        family,
        n,
        dim,
        m_eps,
        m_half,
        m_total: dim,
        sigma_h_nonempty,
        h_label,
        h_dim,
        has_matrix_model: family != Family::Cayley,
    })
}

/// Parameters `(C, C₁, c_Z)` of the Ricci-flat family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialParams {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "cZ", default)]
    pub c_z: f64,
}

impl RadialParams {
    pub fn new(c: f64, c1: f64, c_z: f64) -> Self {
        Self { c, c1, c_z }
    }
}

impl Default for RadialParams {
    fn default() -> Self {
        Self { c: 1.0, c1: 0.0, c_z: 0.0 }
    }
}

/// Enforce `C > 0`, `C₁ ≥ 0`, and `c_Z = 0` outside `ℂPⁿ`.
pub fn validate_params(desc: &SpaceDescriptor, p: RadialParams) -> Result<RadialParams> {
    if !(p.c.is_finite() && p.c > 0.0) {
        return Err(Error::Parameter(format!("C must be a positive real, got {}", p.c)));
    }
    if !(p.c1.is_finite() && p.c1 >= 0.0) {
        return Err(Error::Parameter(format!("C1 must be nonnegative, got {}", p.c1)));
    }
    if !p.c_z.is_finite() {
        return Err(Error::Parameter(format!("cZ must be finite, got {}", p.c_z)));
    }
    if p.c_z != 0.0 && desc.family != Family::ComplexProj {
        return Err(Error::Parameter(format!(
            "cZ = {} is only admissible for cpn; {} requires cZ = 0",
            p.c_z,
            desc.label()
        )));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let s5 = lookup_space(Family::Sphere, 5).unwrap();
        assert_eq!((s5.dim, s5.m_eps, s5.m_half), (5, 4, 0));
        let cp3 = lookup_space(Family::ComplexProj, 3).unwrap();
        assert_eq!((cp3.dim, cp3.m_eps, cp3.m_half), (6, 1, 4));
        let ca = lookup_space(Family::Cayley, 2).unwrap();
        assert_eq!((ca.dim, ca.m_eps, ca.m_half), (16, 7, 8));
        assert!(!ca.has_matrix_model);
        let hp2 = lookup_space(Family::QuatProj, 2).unwrap();
        assert_eq!((hp2.dim, hp2.m_eps, hp2.m_half), (8, 3, 4));
    }

    #[test]
    fn dimension_identity_over_registry() {
        for family in Family::ALL {
            for n in 0..12 {
                if let Ok(d) = lookup_space(family, n) {
                    assert_eq!(d.dim, 1 + d.m_eps + d.m_half);
                    assert_eq!(d.m_total, d.dim);
                }
            }
        }
    }

    #[test]
    fn sigma_h_flag() {
        for n in 1..6 {
            assert!(lookup_space(Family::ComplexProj, n).unwrap().sigma_h_nonempty);
            assert!(!lookup_space(Family::QuatProj, n).unwrap().sigma_h_nonempty);
        }
        assert!(lookup_space(Family::RealProj, 2).unwrap().sigma_h_nonempty);
        assert!(!lookup_space(Family::RealProj, 3).unwrap().sigma_h_nonempty);
        assert!(!lookup_space(Family::Sphere, 3).unwrap().sigma_h_nonempty);
    }

    #[test]
    fn out_of_range_names_valid_range() {
        let err = lookup_space(Family::Sphere, 1).unwrap_err();
        assert!(err.to_string().contains("n >= 2"));
        assert!(lookup_space(Family::ComplexProj, 0).is_err());
        assert!(lookup_space(Family::Cayley, 3).unwrap_err().to_string().contains("n = 2"));
    }

    #[test]
    fn parameter_validation() {
        let s3 = lookup_space(Family::Sphere, 3).unwrap();
        assert!(validate_params(&s3, RadialParams::new(1.0, 0.0, 0.0)).is_ok());
        assert!(matches!(
            validate_params(&s3, RadialParams::new(1.0, 0.0, 0.5)),
            Err(Error::Parameter(_))
        ));
        let cp2 = lookup_space(Family::ComplexProj, 2).unwrap();
        assert!(validate_params(&cp2, RadialParams::new(2.0, 1.0, -0.7)).is_ok());
        assert!(validate_params(&cp2, RadialParams::new(0.0, 1.0, 0.0)).is_err());
        assert!(validate_params(&cp2, RadialParams::new(1.0, -1e-3, 0.0)).is_err());
        let rp2 = lookup_space(Family::RealProj, 2).unwrap();
        assert!(validate_params(&rp2, RadialParams::new(1.0, 0.0, 0.3)).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.cli_name().parse::<Family>().unwrap(), f);
        }
        assert!("torus".parse::<Family>().is_err());
    }
}
