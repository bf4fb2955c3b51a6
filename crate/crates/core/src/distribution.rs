//! Univariate distributions with exactly known moments, and their JSON form.

use serde::{Deserialize, Serialize};

use crate::cumulants::{CumulantKind, CumulantTable, MomentSequence};
use crate::error::{Error, Result};
use crate::scalar::{binomial, catalan, format_scalar, int, one, parse_scalar, zero, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Distribution {
    /// `m_{2k} = Catalan(k) v^k`; free cumulants `(0, v, 0, …)`.
    Semicircle {
        variance: Scalar,
    },
    /// Law of `σ(u + u⁻¹)` for a Haar unitary `u`: `m_{2k} = C(2k, k) σ^{2k}`,
    /// parametrized by `variance = 2σ²`.
    Arcsine {
        variance: Scalar,
    },
    /// Symmetric `±1`.
    Bernoulli,
    /// `m_{2k} = (2k-1)!! v^k`.
    Gaussian {
        variance: Scalar,
    },
    PointMass {
        value: Scalar,
    },
    /// Explicit `m_1 … m_N`.
    Moments(Vec<Scalar>),
}

impl Distribution {
    pub fn standard_semicircle() -> Self {
        Distribution::Semicircle { variance: one() }
    }

    /// `u + u⁻¹`, even moments `C(2k, k)`.
    pub fn standard_arcsine() -> Self {
        Distribution::Arcsine { variance: int(2) }
    }

    /// Moments up to `order`; explicit data errors beyond its length.
    pub fn moments(&self, order: usize) -> Result<MomentSequence> {
        let even = |f: &dyn Fn(usize) -> Scalar| -> Vec<Scalar> {
            (1..=order)
                .map(|n| if n % 2 == 1 { zero() } else { f(n / 2) })
                .collect()
        };
        let pow = |x: &Scalar, k: usize| -> Scalar { num_traits::pow(x.clone(), k) };
        let m = match self {
            Distribution::Semicircle { variance } => {
                even(&|k| Scalar::from_integer(catalan(k as u64)) * pow(variance, k))
            }
            Distribution::Arcsine { variance } => {
                let half = variance / int(2);
                even(&|k| Scalar::from_integer(binomial(2 * k as u64, k as u64)) * pow(&half, k))
            }
            Distribution::Bernoulli => even(&|_| one()),
            Distribution::Gaussian { variance } => even(&|k| {
                let double_fact: Scalar = (1..=k).map(|j| int(2 * j as i64 - 1)).product();
                double_fact * pow(variance, k)
            }),
            Distribution::PointMass { value } => (1..=order).map(|n| pow(value, n)).collect(),
            Distribution::Moments(m) => {
                if order > m.len() {
                    return Err(Error::OrderOverflow {
                        label: usize::MAX,
                        order,
                        max: m.len(),
                    });
                }
                m[..order].to_vec()
            }
        };
        Ok(MomentSequence::new(m))
    }

    /// Largest order available, `None` when unbounded.
    pub fn max_order(&self) -> Option<usize> {
        match self {
            Distribution::Moments(m) => Some(m.len()),
            _ => None,
        }
    }

    pub fn table(&self, label: usize, kind: CumulantKind, order: usize) -> Result<CumulantTable> {
        let moments = self.moments(order).map_err(|e| relabel(e, label))?;
        if moments.max_order() == 0 {
            return Ok(CumulantTable::from_cumulants(label, kind, Vec::new()));
        }
        CumulantTable::from_moments(label, kind, &moments)
    }
}

fn relabel(e: Error, label: usize) -> Error {
    match e {
        Error::OrderOverflow { order, max, .. } => Error::OrderOverflow { label, order, max },
        other => other,
    }
}

/// JSON distribution entry.
///
/// Either explicit moments
/// `{"label": "x", "kind": "free", "moments": ["0", "1/2"]}`
/// or a named law `{"label": "x", "named": "semicircle", "variance": "1"}`.
/// Without `label` the entry is the default for every label; without `kind`
/// the kind follows the label's diagonal entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<CumulantKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub named: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

impl DistributionSpec {
    pub fn distribution(&self) -> Result<Distribution> {
        let scalar = |s: &Option<String>, default: i64| match s {
            Some(s) => parse_scalar(s),
            None => Ok(int(default)),
        };
        match (&self.moments, &self.named) {
            (Some(_), Some(_)) => Err(Error::Parse(
                "give either \"moments\" or \"named\", not both".into(),
            )),
            (None, None) => Err(Error::Parse(
                "distribution needs \"moments\" or \"named\"".into(),
            )),
            (Some(m), None) => Ok(Distribution::Moments(
                m.iter().map(|s| parse_scalar(s)).collect::<Result<_>>()?,
            )),
            (None, Some(name)) => match name.as_str() {
                "semicircle" => Ok(Distribution::Semicircle {
                    variance: scalar(&self.variance, 1)?,
                }),
                "arcsine" | "haar-sum" => Ok(Distribution::Arcsine {
                    variance: scalar(&self.variance, 2)?,
                }),
                "bernoulli" => Ok(Distribution::Bernoulli),
                "gaussian" => Ok(Distribution::Gaussian {
                    variance: scalar(&self.variance, 1)?,
                }),
                "point-mass" | "point_mass" => Ok(Distribution::PointMass {
                    value: scalar(&self.value, 1)?,
                }),
                other => Err(Error::Parse(format!(
                    "unknown named distribution {other:?}"
                ))),
            },
        }
    }

    pub fn from_moments(label: &str, kind: CumulantKind, moments: &[Scalar]) -> Self {
        DistributionSpec {
            label: Some(label.to_string()),
            kind: Some(kind),
            moments: Some(moments.iter().map(format_scalar).collect()),
            named: None,
            variance: None,
            value: None,
        }
    }
}

/// A JSON document holding one spec or an array of them.
pub fn parse_distribution_specs(text: &str) -> Result<Vec<DistributionSpec>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(DistributionSpec),
        Many(Vec<DistributionSpec>),
    }
    let parsed: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match serde_json::from_value::<OneOrMany>(parsed.clone()) {
        Ok(OneOrMany::One(s)) => Ok(vec![s]),
        Ok(OneOrMany::Many(v)) => Ok(v),
        Err(_) => {
            // re-run the strict parser for a useful message
            let err = if parsed.is_array() {
                serde_json::from_value::<Vec<DistributionSpec>>(parsed).err()
            } else {
                serde_json::from_value::<DistributionSpec>(parsed).err()
            };
            Err(Error::Parse(err.map_or_else(
                || "invalid distribution spec".into(),
                |e| e.to_string(),
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::moments_to_free_cumulants;
    use crate::scalar::ratio;

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn named_moments() {
        let semi = Distribution::Semicircle { variance: int(2) }
            .moments(6)
            .unwrap();
        assert_eq!(semi.as_slice(), &ints(&[0, 2, 0, 8, 0, 40])[..]);
        let arc = Distribution::standard_arcsine().moments(8).unwrap();
        assert_eq!(arc.as_slice(), &ints(&[0, 2, 0, 6, 0, 20, 0, 70])[..]);
        let g = Distribution::Gaussian { variance: one() }
            .moments(6)
            .unwrap();
        assert_eq!(g.as_slice(), &ints(&[0, 1, 0, 3, 0, 15])[..]);
        let pm = Distribution::PointMass { value: ratio(1, 2) }
            .moments(3)
            .unwrap();
        assert_eq!(pm.as_slice(), &[ratio(1, 2), ratio(1, 4), ratio(1, 8)]);
        assert_eq!(
            Distribution::Bernoulli.moments(4).unwrap().as_slice(),
            &ints(&[0, 1, 0, 1])[..]
        );
    }

    #[test]
    fn semicircle_has_only_second_cumulant() {
        let m = Distribution::Semicircle {
            variance: ratio(3, 2),
        }
        .moments(8)
        .unwrap();
        let k = moments_to_free_cumulants(m.as_slice()).unwrap();
        let mut expect = vec![zero(); 8];
        expect[1] = ratio(3, 2);
        assert_eq!(k, expect);
    }

    #[test]
    fn explicit_moments_are_bounded() {
        let d = Distribution::Moments(ints(&[0, 1]));
        assert_eq!(d.max_order(), Some(2));
        assert!(d.moments(2).is_ok());
        assert_eq!(
            d.table(4, CumulantKind::Free, 3),
            Err(Error::OrderOverflow {
                label: 4,
                order: 3,
                max: 2
            })
        );
    }

    #[test]
    fn spec_parsing() {
        let specs = parse_distribution_specs(
            r#"[{"label":"x","kind":"free","moments":["0","1/2"]},{"named":"semicircle","variance":"2"}]"#,
        )
        .unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(
            specs[0].distribution().unwrap(),
            Distribution::Moments(vec![zero(), ratio(1, 2)])
        );
        assert_eq!(
            specs[1].distribution().unwrap(),
            Distribution::Semicircle { variance: int(2) }
        );
        let one_spec = parse_distribution_specs(r#"{"named":"arcsine"}"#).unwrap();
        assert_eq!(
            one_spec[0].distribution().unwrap(),
            Distribution::standard_arcsine()
        );

        assert!(
            parse_distribution_specs(r#"{"named":"cauchy"}"#).unwrap()[0]
                .distribution()
                .is_err()
        );
        assert!(parse_distribution_specs(r#"{"label":"x"}"#).unwrap()[0]
            .distribution()
            .is_err());
        assert!(parse_distribution_specs(r#"{"named":"bernoulli","bogus":1}"#).is_err());
        assert!(parse_distribution_specs("[{").is_err());
        let round = DistributionSpec::from_moments("y", CumulantKind::Classical, &[ratio(-1, 3)]);
        let text = serde_json::to_string(&round).unwrap();
        assert_eq!(
            text,
            r#"{"label":"y","kind":"classical","moments":["-1/3"]}"#
        );
    }
}
