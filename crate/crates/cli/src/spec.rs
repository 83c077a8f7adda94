//! Distribution specs accepted on the command line.
//!
//! ```text
//! semicircle[:v]              variance v (default 1)
//! point:c                     Dirac mass at c
//! free-poisson:λ[:x@w,...]    compound free Poisson, jump atoms x with weight w (default δ_1)
//! moments:m1,m2,...           explicit moments
//! cumulants:k1,k2,...         explicit free cumulants
//! path/to/moments.json        result of an earlier `convolve`
//! ```
//!
//! Numbers are integers, fractions `p/q` or decimals, all read exactly.

use std::path::Path;
use std::str::FromStr;

use freeconv::analytic::{Atom, RationalR};
use freeconv::cumulants::moments_from_cumulants;
use freeconv::scalar::to_f64;
use freeconv::transforms::{compound_free_poisson, families};
use freeconv::{CumulantSequence, MomentSequence, Rational, Scalar};
use num_traits::{One, Zero};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Semicircle { variance: Rational },
    Point { c: Rational },
    /// Jumps as `(location, weight)`; empty means `δ_1`.
    FreePoisson { rate: Rational, jumps: Vec<(Rational, Rational)> },
    Moments(Vec<Rational>),
    Cumulants(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistSpec {
    pub text: String,
    pub dist: Distribution,
}

pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let s = s.trim();
    let bad = || CliError::usage(format!("not a number: `{s}`"));
    if s.contains('/') || !(s.contains('.') || s.contains(['e', 'E'])) {
        return Rational::from_str(s).map_err(|_| bad());
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = Rational::from_str(&format!("{int}{frac}").trim_start_matches('0').to_string())
        .unwrap_or_else(|_| Rational::zero());
    let ten = Rational::from_i64(10);
    let scale = exponent - frac.len() as i32;
    let mut value = if scale >= 0 {
        digits * ten.powi(scale as usize)
    } else {
        digits / ten.powi(scale.unsigned_abs() as usize)
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

fn parse_list(s: &str) -> Result<Vec<Rational>, CliError> {
    let values: Vec<Rational> = s.split(',').map(parse_rational).collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(CliError::usage("empty number list"));
    }
    Ok(values)
}

fn parse_jump(s: &str) -> Result<(Rational, Rational), CliError> {
    let (x, w) = s
        .split_once('@')
        .ok_or_else(|| CliError::usage(format!("jump atom `{s}` must read location@weight")))?;
    Ok((parse_rational(x)?, parse_rational(w)?))
}

impl DistSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let dist = if text.ends_with(".json") {
            Distribution::Moments(read_result_moments(Path::new(text))?)
        } else {
            let (head, rest) = text.split_once(':').unwrap_or((text, ""));
            match head {
                "semicircle" => Distribution::Semicircle {
                    variance: if rest.is_empty() { Rational::one() } else { parse_rational(rest)? },
                },
                "point" => Distribution::Point { c: parse_rational(rest)? },
                "free-poisson" => {
                    let (rate, jumps) = rest.split_once(':').unwrap_or((rest, ""));
                    let jumps = if jumps.is_empty() {
                        Vec::new()
                    } else {
                        jumps.split(',').map(parse_jump).collect::<Result<_, _>>()?
                    };
                    Distribution::FreePoisson { rate: parse_rational(rate)?, jumps }
                }
                "moments" => Distribution::Moments(parse_list(rest)?),
                "cumulants" => Distribution::Cumulants(parse_list(rest)?),
                _ => return Err(CliError::usage(format!("unknown distribution spec `{text}`"))),
            }
        };
        let spec = Self { text: text.to_string(), dist };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), CliError> {
        match &self.dist {
            Distribution::Semicircle { variance } if *variance < Rational::zero() => {
                Err(CliError::usage("semicircle variance must be nonnegative"))
            }
            Distribution::FreePoisson { rate, .. } if *rate <= Rational::zero() => {
                Err(CliError::usage("free-poisson rate must be positive"))
            }
            Distribution::FreePoisson { jumps, .. } if !jumps.is_empty() => {
                let total = jumps.iter().fold(Rational::zero(), |acc, (_, w)| acc + w.clone());
                if jumps.iter().any(|(_, w)| *w < Rational::zero()) || !total.is_one() {
                    Err(CliError::usage("jump weights must be nonnegative and sum to 1"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Moments `m_1 … m_K`.
    pub fn moments(&self, order: usize) -> Result<MomentSequence<Rational>, CliError> {
        let short = |have: usize| {
            CliError::usage(format!("`{}` provides {have} terms but order {order} was requested", self.text))
        };
        Ok(match &self.dist {
            Distribution::Semicircle { variance } => families::semicircle_moments(variance.clone(), order),
            Distribution::Point { c } => families::point_moments(c.clone(), order),
            Distribution::FreePoisson { rate, jumps } => {
                let atoms: Vec<(Rational, Rational)> = if jumps.is_empty() {
                    vec![(Rational::one(), Rational::one())]
                } else {
                    jumps.iter().map(|(x, w)| (w.clone(), x.clone())).collect()
                };
                let jump = families::atomic_moments(&atoms, order);
                moments_from_cumulants(&compound_free_poisson(rate.clone(), &jump)?)
            }
            Distribution::Moments(m) => {
                if m.len() < order {
                    return Err(short(m.len()));
                }
                MomentSequence::new(m[..order].to_vec()).map_err(|e| CliError::usage(e.to_string()))?
            }
            Distribution::Cumulants(k) => {
                if k.len() < order {
                    return Err(short(k.len()));
                }
                moments_from_cumulants(&CumulantSequence::new(k[..order].to_vec()).map_err(|e| CliError::usage(e.to_string()))?)
            }
        })
    }

    /// Closed-form R-transform, when the spec names one.
    pub fn analytic(&self) -> Option<RationalR> {
        match &self.dist {
            Distribution::Semicircle { variance } => RationalR::semicircle(to_f64(variance)).ok(),
            Distribution::Point { c } => RationalR::point(to_f64(c)).ok(),
            Distribution::FreePoisson { rate, jumps } if jumps.is_empty() => RationalR::free_poisson(to_f64(rate)).ok(),
            Distribution::FreePoisson { rate, jumps } => {
                let atoms = jumps.iter().map(|(x, w)| Atom::new(to_f64(w), to_f64(x))).collect();
                RationalR::compound_free_poisson(to_f64(rate), atoms).ok()
            }
            Distribution::Moments(_) | Distribution::Cumulants(_) => None,
        }
    }

    /// Rate of a plain free Poisson law.
    pub fn plain_free_poisson_rate(&self) -> Option<f64> {
        match &self.dist {
            Distribution::FreePoisson { rate, jumps } if jumps.is_empty() => Some(to_f64(rate)),
            _ => None,
        }
    }
}

fn read_result_moments(path: &Path) -> Result<Vec<Rational>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let doc: serde_json::Value = serde_json::from_str(&text)?;
    let moments = doc["result"]["moments"]
        .as_array()
        .ok_or_else(|| CliError::usage(format!("{} has no result.moments array", path.display())))?;
    moments
        .iter()
        .map(|v| {
            v.as_str()
                .ok_or_else(|| CliError::usage("moments must be stored as exact strings"))
                .and_then(parse_rational)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use freeconv::scalar::ratio;

    #[test]
    fn numbers() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("-7").unwrap(), ratio(-7, 1));
        assert_eq!(parse_rational("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("-1.5e2").unwrap(), ratio(-150, 1));
        assert_eq!(parse_rational("2.5E-1").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        for bad in ["", "x", "1..2", "1e", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grammar() {
        let sc = DistSpec::parse("semicircle").unwrap();
        assert_eq!(sc.dist, Distribution::Semicircle { variance: ratio(1, 1) });
        let fp = DistSpec::parse("free-poisson:1/2:1@1/4,3@3/4").unwrap();
        assert_eq!(
            fp.dist,
            Distribution::FreePoisson { rate: ratio(1, 2), jumps: vec![(ratio(1, 1), ratio(1, 4)), (ratio(3, 1), ratio(3, 4))] }
        );
        // κ_n = λ m_n(ν)
        let m = fp.moments(2).unwrap();
        let k1 = ratio(1, 2) * (ratio(1, 4) + ratio(9, 4));
        assert_eq!(m.moment(1), k1);
        assert_eq!(
            DistSpec::parse("moments:1,2,3").unwrap().moments(2).unwrap().as_slice(),
            &[ratio(1, 1), ratio(2, 1)]
        );
        assert!(DistSpec::parse("moments:1,2").unwrap().moments(3).is_err());
        assert!(DistSpec::parse("free-poisson:1:1@1/2").is_err());
        assert!(DistSpec::parse("free-poisson:0").is_err());
        assert!(DistSpec::parse("gaussian").is_err());
    }

    #[test]
    fn analytic_forms() {
        assert!(DistSpec::parse("cumulants:0,1").unwrap().analytic().is_none());
        let r = DistSpec::parse("semicircle:2").unwrap().analytic().unwrap();
        assert_eq!(r.variance(), 2.0);
        assert_eq!(DistSpec::parse("free-poisson:5").unwrap().plain_free_poisson_rate(), Some(5.0));
    }
}
