//! Schematic mockup geometry: `box:<x>,<y>,<z>,<dx>,<dy>,<dz>`.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxGeometry {
    pub origin: [f64; 3],
    pub size: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid box geometry `{0}`")]
pub struct BadGeometry(pub String);

impl FromStr for BoxGeometry {
    type Err = BadGeometry;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BadGeometry(s.to_string());
        let body = s.strip_prefix("box:").ok_or_else(bad)?;
        let nums: Vec<f64> =
            body.split(',').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
        if nums.len() != 6 || nums.iter().any(|n| !n.is_finite()) || nums[3..].iter().any(|d| *d < 0.0) {
            return Err(bad());
        }
        Ok(BoxGeometry { origin: [nums[0], nums[1], nums[2]], size: [nums[3], nums[4], nums[5]] })
    }
}

impl fmt::Display for BoxGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.origin;
        let [dx, dy, dz] = self.size;
        write!(f, "box:{x},{y},{z},{dx},{dy},{dz}")
    }
}
