// SPDX-License-Identifier: Apache-2.0

//! JSON encodings for wide integers: values that fit in an `i64` are plain
//! numbers, anything wider is a decimal string. Rationals are `[num, den]`.

use num_rational::Ratio;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Wide {
    Small(i64),
    Text(String),
}

impl Wide {
    fn from_i128(v: i128) -> Self {
        i64::try_from(v).map(Wide::Small).unwrap_or_else(|_| Wide::Text(v.to_string()))
    }

    fn to_i128<E: de::Error>(&self) -> Result<i128, E> {
        match self {
            Wide::Small(v) => Ok(*v as i128),
            Wide::Text(s) => s.parse().map_err(|_| E::custom(format!("bad integer {s:?}"))),
        }
    }
}

/// A rational that serializes as `[num, den]` with wide entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WideRatio(pub Ratio<i128>);

impl Serialize for WideRatio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ratio::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for WideRatio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        ratio::deserialize(d).map(WideRatio)
    }
}

pub mod wide {
    use super::*;

    pub fn serialize<S: Serializer>(v: &i128, s: S) -> Result<S::Ok, S::Error> {
        Wide::from_i128(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<i128, D::Error> {
        Wide::deserialize(d)?.to_i128()
    }
}

pub mod wide_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[i128], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&Wide::from_i128(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<i128>, D::Error> {
        Vec::<Wide>::deserialize(d)?.iter().map(Wide::to_i128).collect()
    }
}

pub mod ratio {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Ratio<i128>, s: S) -> Result<S::Ok, S::Error> {
        [Wide::from_i128(*r.numer()), Wide::from_i128(*r.denom())].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<i128>, D::Error> {
        let [n, m] = <[Wide; 2]>::deserialize(d)?;
        let m = m.to_i128()?;
        if m == 0 {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(Ratio::new(n.to_i128()?, m))
    }
}
