//! JSON encodings shared by every file format: integers beyond 2⁵³ are written as
//! decimal strings, rationals as `{"num": int, "den": int}` with `den > 0`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::arith::Rat;

const SAFE: i64 = 1 << 53;

/// Integer that serialises losslessly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(x) if x.abs() <= SAFE => s.serialize_i64(x),
            _ => s.serialize_str(&self.0.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawInt {
    Num(i64),
    Str(String),
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match RawInt::deserialize(d)? {
            RawInt::Num(x) => Ok(JsonInt(BigInt::from(x))),
            RawInt::Str(s) => s
                .trim()
                .parse::<BigInt>()
                .map(JsonInt)
                .map_err(|_| de::Error::custom(format!("invalid integer string {s:?}"))),
        }
    }
}

impl JsonInt {
    pub fn from_i64(x: i64) -> Self {
        JsonInt(BigInt::from(x))
    }

    pub fn to_i64<E: de::Error>(&self) -> Result<i64, E> {
        self.0
            .to_i64()
            .ok_or_else(|| E::custom(format!("integer {} out of range", self.0)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonRat {
    pub num: JsonInt,
    pub den: JsonInt,
}

impl JsonRat {
    pub fn from_rat(r: &Rat) -> Self {
        JsonRat {
            num: JsonInt(r.numer().clone()),
            den: JsonInt(r.denom().clone()),
        }
    }

    pub fn to_rat<E: de::Error>(&self) -> Result<Rat, E> {
        if !self.den.0.is_positive() {
            return Err(E::custom("rational denominator must be positive"));
        }
        let r = Rat::new(self.num.0.clone(), self.den.0.clone());
        if r.denom() != &self.den.0 && !(self.den.0.is_one()) {
            // accept non-reduced input; stored value is reduced
        }
        Ok(r)
    }
}

pub mod rat_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        JsonRat::from_rat(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        JsonRat::deserialize(d)?.to_rat()
    }
}

pub mod rat_vec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        r.iter().map(JsonRat::from_rat).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        Vec::<JsonRat>::deserialize(d)?
            .iter()
            .map(|r| r.to_rat())
            .collect()
    }
}

pub fn int_rows(rows: &[Vec<i64>]) -> Vec<Vec<JsonInt>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| JsonInt::from_i64(x)).collect())
        .collect()
}

pub fn rows_from_json<E: de::Error>(rows: &[Vec<JsonInt>]) -> Result<Vec<Vec<i64>>, E> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_i64()).collect())
        .collect()
}
