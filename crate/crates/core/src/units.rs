use serde::{Deserialize, Serialize};

/// Speed of light and gravitational constant used by every formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub c: f64,
    #[serde(rename = "G")]
    pub g: f64,
}

impl Constants {
    /// c = G = 1.
    pub const GEOMETRIZED: Constants = Constants { c: 1.0, g: 1.0 };
    /// SI values (CODATA 2018).
    pub const SI: Constants = Constants {
        c: 299_792_458.0,
        g: 6.674_30e-11,
    };

    pub fn c2(&self) -> f64 {
        self.c * self.c
    }
}

impl Default for Constants {
    fn default() -> Self {
        Constants::GEOMETRIZED
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    #[default]
    Geom,
    Si,
}

impl UnitSystem {
    pub fn constants(self) -> Constants {
        match self {
            UnitSystem::Geom => Constants::GEOMETRIZED,
            UnitSystem::Si => Constants::SI,
        }
    }

    /// One-line description written at the top of every exported file.
    pub fn header_line(self) -> &'static str {
        match self {
            UnitSystem::Geom => "# units: geometrized (c = G = 1)",
            UnitSystem::Si => "# units: SI (m, kg, s; rho in kg/m^3, P in Pa, u in m^2/s^2)",
        }
    }
}

impl std::str::FromStr for UnitSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "geom" => Ok(UnitSystem::Geom),
            "si" => Ok(UnitSystem::Si),
            other => Err(format!("unknown unit system '{other}' (expected geom|si)")),
        }
    }
}
