use serde::{Deserialize, Serialize};

/// Ambient norm on `R^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormSpec {
    #[serde(rename = "l2")]
    Euclidean,
    #[serde(rename = "l1")]
    L1,
    #[serde(rename = "linf")]
    Linf,
}

impl NormSpec {
    pub const ALL: [NormSpec; 3] = [NormSpec::Euclidean, NormSpec::L1, NormSpec::Linf];

    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            NormSpec::Euclidean => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormSpec::L1 => v.iter().map(|x| x.abs()).sum(),
            NormSpec::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            NormSpec::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            NormSpec::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            NormSpec::Linf => a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs())),
        }
    }

    /// Only the Euclidean norm is strictly convex.
    pub fn is_strictly_convex(self) -> bool {
        matches!(self, NormSpec::Euclidean)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NormSpec::Euclidean => "l2",
            NormSpec::L1 => "l1",
            NormSpec::Linf => "linf",
        }
    }
}

impl std::str::FromStr for NormSpec {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "l2" | "euclidean" => Ok(NormSpec::Euclidean),
            "l1" => Ok(NormSpec::L1),
            "linf" => Ok(NormSpec::Linf),
            other => Err(crate::Error::OutOfRange(format!("unknown norm `{other}`"))),
        }
    }
}

impl std::fmt::Display for NormSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_of_simple_vector() {
        let v = [3.0, -4.0];
        assert_eq!(NormSpec::Euclidean.norm(&v), 5.0);
        assert_eq!(NormSpec::L1.norm(&v), 7.0);
        assert_eq!(NormSpec::Linf.norm(&v), 4.0);
    }

    #[test]
    fn serde_names() {
        let s = serde_json::to_string(&NormSpec::ALL).unwrap();
        assert_eq!(s, r#"["l2","l1","linf"]"#);
        assert_eq!("linf".parse::<NormSpec>().unwrap(), NormSpec::Linf);
        assert!("l3".parse::<NormSpec>().is_err());
    }
}
