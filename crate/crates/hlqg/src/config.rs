//! Structured run configuration: deformation, truncation, quadrature,
//! tolerances, and the convention toggles. Every report embeds the resolved
//! config so results are reproducible from the report alone.

use crate::quad::QuadSpec;
use crate::slpoly::FieldConventions;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct SymbolicSection {
    /// exact deformation value used where the engine is symbolic, as a
    /// rational num/den pair
    pub s_num: i64,
    pub s_den: i64,
}

impl Default for SymbolicSection {
    fn default() -> Self {
        SymbolicSection { s_num: 1, s_den: 1 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct NumericSection {
    pub s: f64,
    /// per-leg Fock truncation
    pub truncation: usize,
    /// probe block size (low-lying indices per leg)
    pub probe: usize,
    pub fd_step: f64,
}

impl Default for NumericSection {
    fn default() -> Self {
        NumericSection { s: 1.0, truncation: 24, probe: 12, fd_step: 1e-3 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct ToleranceSection {
    /// residuals that must vanish to roundoff
    pub exact: f64,
    /// residuals limited by ladder truncation
    pub truncation: f64,
    /// quadrature-limited residuals
    pub quadrature: f64,
    /// finite-difference checks
    pub fd: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        ToleranceSection { exact: 1e-10, truncation: 1e-3, quadrature: 1e-3, fd: 1e-5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct ConventionSection {
    pub left_inverse_orientation: bool,
    pub sig_l_star: i8,
    pub sig_r_star: i8,
    pub lr_swap: bool,
    /// sign of the central phase in the displacement group law
    pub group_law_sign: i8,
}

impl Default for ConventionSection {
    fn default() -> Self {
        let f = FieldConventions::default();
        ConventionSection {
            left_inverse_orientation: f.left_inverse_orientation,
            sig_l_star: f.sig_l_star,
            sig_r_star: f.sig_r_star,
            lr_swap: f.lr_swap,
            group_law_sign: -1,
        }
    }
}

impl ConventionSection {
    pub fn field_conventions(&self) -> FieldConventions {
        FieldConventions {
            left_inverse_orientation: self.left_inverse_orientation,
            sig_l_star: self.sig_l_star,
            sig_r_star: self.sig_r_star,
            lr_swap: self.lr_swap,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(default)]
pub struct RunConfig {
    pub symbolic: SymbolicSection,
    pub numeric: NumericSection,
    pub quadrature: QuadSpec,
    pub tolerances: ToleranceSection,
    pub conventions: ConventionSection,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_toml_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let text = c.to_toml();
        let back = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn partial_file_fills_defaults() {
        let c = RunConfig::from_toml_str("[numeric]\ns = 2.0\n").unwrap();
        assert_eq!(c.numeric.s, 2.0);
        assert_eq!(c.numeric.truncation, 24);
        assert_eq!(c.tolerances.exact, 1e-10);
    }
}
