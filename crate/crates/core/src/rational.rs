//! Exact rational scalars and their textual form (`"p/q"` or an integer).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"-p/q"` or a plain integer. Whitespace around the
/// numbers is tolerated; decimals and symbolic values are rejected.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

pub fn format(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn floor_int(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

pub fn ceil_int(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

/// Floor of a rational, as `i64`. Panics only if the value is astronomically
/// large, which cannot happen for multidegree bounds on capped graphs.
pub fn floor_i64(q: &Rational) -> i64 {
    i64::try_from(floor_int(q)).expect("floor fits in i64")
}

pub fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Scales a rational vector to the primitive integer vector pointing the same
/// way. Returns `None` for the zero vector.
pub fn primitive_direction(v: &[Rational]) -> Option<Vec<BigInt>> {
    if v.iter().all(Zero::is_zero) {
        return None;
    }
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    Some(ints.into_iter().map(|x| x / &gcd).collect())
}

/// Primitive direction with the first nonzero entry made positive, together
/// with the signed multiple `c` such that `v = c * dir`.
pub fn canonical_direction(v: &[Rational]) -> Option<(Vec<BigInt>, Rational)> {
    let mut dir = primitive_direction(v)?;
    let lead = dir.iter().position(|x| !x.is_zero())?;
    if dir[lead].is_negative() {
        for x in dir.iter_mut() {
            *x = -x.clone();
        }
    }
    let c = &v[lead] / Rational::from_integer(dir[lead].clone());
    Some((dir, c))
}

pub mod serde_str {
    //! Serializes a rational as its `"p/q"` string; accepts strings or JSON integers.
    use super::Rational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_value(&v).ok_or_else(|| de::Error::custom(format!("not an exact rational: {v}")))
    }

    pub(crate) fn from_value(v: &serde_json::Value) -> Option<Rational> {
        match v {
            serde_json::Value::String(s) => super::parse(s),
            serde_json::Value::Number(n) => n.as_i64().map(super::int),
            _ => None,
        }
    }
}

pub mod serde_vec {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(super::format).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<serde_json::Value>::deserialize(d)?;
        raw.iter()
            .map(|v| {
                super::serde_str::from_value(v)
                    .ok_or_else(|| serde::de::Error::custom(format!("not an exact rational: {v}")))
            })
            .collect()
    }
}

pub mod serde_mat {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|row| row.iter().map(super::format).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let raw = Vec::<Vec<serde_json::Value>>::deserialize(d)?;
        raw.iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        super::serde_str::from_value(v)
                            .ok_or_else(|| serde::de::Error::custom(format!("not an exact rational: {v}")))
                    })
                    .collect()
            })
            .collect()
    }
}
