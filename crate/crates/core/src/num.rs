use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Exact rational used for every cost, worth, probability and utility.
pub type Q = Ratio<i64>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

pub fn half() -> Q {
    Q::new(1, 2)
}

pub fn abs(x: Q) -> Q {
    x.abs()
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not an exact rational: {:?}", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

/// Accepts "7", "-3", "7/8" and mixed numbers written "2 4/7".
pub fn parse_q(text: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let t = text.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((whole, frac)) = t.split_once(' ') {
        let w = i64::from_str(whole.trim()).map_err(|_| err())?;
        let f = parse_q(frac.trim())?;
        if w < 0 || f.is_negative() {
            return Err(err());
        }
        return Ok(q(w) + f);
    }
    match t.split_once('/') {
        Some((n, d)) => {
            let n = i64::from_str(n.trim()).map_err(|_| err())?;
            let d = i64::from_str(d.trim()).map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            Ok(Q::new(n, d))
        }
        None => i64::from_str(t).map(q).map_err(|_| err()),
    }
}

pub fn min_q(a: Q, b: Q) -> Q {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_q(a: Q, b: Q) -> Q {
    if a >= b {
        a
    } else {
        b
    }
}

/// Serde adapter writing a rational as a string.
pub mod as_string {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        fmt_q(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let raw = RawRational::deserialize(d)?;
        raw.into_q().map_err(serde::de::Error::custom)
    }
}

pub mod opt_string {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        x.as_ref().map(fmt_q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        let raw = Option::<RawRational>::deserialize(d)?;
        raw.map(|r| r.into_q()).transpose().map_err(serde::de::Error::custom)
    }
}

pub mod vec_opt_string {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Option<Q>], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Option<String>> = xs.iter().map(|x| x.as_ref().map(fmt_q)).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Option<Q>>, D::Error> {
        let raw = Vec::<Option<RawRational>>::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.map(|r| r.into_q()).transpose())
            .collect::<Result<_, _>>()
            .map_err(serde::de::Error::custom)
    }
}

pub mod vec_opt_string_opt {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &Option<Vec<Option<Q>>>, s: S) -> Result<S::Ok, S::Error> {
        let v: Option<Vec<Option<String>>> = xs.as_ref().map(|xs| xs.iter().map(|x| x.as_ref().map(fmt_q)).collect());
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Option<Q>>>, D::Error> {
        let raw = Option::<Vec<Option<RawRational>>>::deserialize(d)?;
        raw.map(|v| {
            v.into_iter()
                .map(|r| r.map(|r| r.into_q()).transpose())
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()
        .map_err(serde::de::Error::custom)
    }
}

pub mod pair_string {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Q; 2], s: S) -> Result<S::Ok, S::Error> {
        [fmt_q(&x[0]), fmt_q(&x[1])].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Q; 2], D::Error> {
        let [a, b] = <[RawRational; 2]>::deserialize(d)?;
        Ok([
            a.into_q().map_err(serde::de::Error::custom)?,
            b.into_q().map_err(serde::de::Error::custom)?,
        ])
    }
}

pub mod opt_pair {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<[Q; 2]>, s: S) -> Result<S::Ok, S::Error> {
        x.map(|[a, b]| [fmt_q(&a), fmt_q(&b)]).serialize(s)
    }
}

pub mod vec_string {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        xs.iter().map(fmt_q).collect::<Vec<_>>().serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRational {
    Int(i64),
    Text(String),
}

impl RawRational {
    fn into_q(self) -> Result<Q, ParseRationalError> {
        match self {
            RawRational::Int(n) => Ok(q(n)),
            RawRational::Text(t) => parse_q(&t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("7/8").unwrap(), qr(7, 8));
        assert_eq!(parse_q("3").unwrap(), q(3));
        assert_eq!(parse_q("2 4/7").unwrap(), qr(18, 7));
        assert_eq!(parse_q("-1/2").unwrap(), qr(-1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn format_round_trip() {
        for x in [qr(7, 8), q(0), q(-4), qr(18, 7)] {
            assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
        }
        assert_eq!(fmt_q(&qr(4, 2)), "2");
    }
}
