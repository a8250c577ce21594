//! JSON encoding for exact integers: a plain number when it fits in `i64`,
//! a decimal string otherwise. Both forms are accepted on input.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Wire {
    Small(i64),
    Text(String),
}

fn to_wire(x: &BigInt) -> Wire {
    match x.to_i64() {
        Some(v) => Wire::Small(v),
        None => Wire::Text(x.to_string()),
    }
}

fn from_wire<E: serde::de::Error>(w: Wire) -> Result<BigInt, E> {
    match w {
        Wire::Small(v) => Ok(BigInt::from(v)),
        Wire::Text(s) => s
            .parse()
            .map_err(|_| E::custom(format!("not an integer: {s:?}"))),
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_wire).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Wire>::deserialize(d)?
            .into_iter()
            .map(from_wire::<D::Error>)
            .collect()
    }
}

pub mod grid {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|row| row.iter().map(to_wire).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        Vec::<Vec<Wire>>::deserialize(d)?
            .into_iter()
            .map(|row| row.into_iter().map(from_wire::<D::Error>).collect())
            .collect()
    }
}

/// A matrix travels as `{rows, cols, entries}` so that empty shapes survive.
pub mod matrix {
    use super::*;
    use crate::abelian::IntMatrix;

    #[derive(Serialize, Deserialize)]
    struct Wired {
        rows: usize,
        cols: usize,
        #[serde(with = "super::grid")]
        entries: Vec<Vec<BigInt>>,
    }

    pub fn serialize<S: Serializer>(m: &IntMatrix, s: S) -> Result<S::Ok, S::Error> {
        Wired {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.to_rows(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<IntMatrix, D::Error> {
        let w = Wired::deserialize(d)?;
        if w.entries.len() != w.rows {
            return Err(D::Error::custom("row count mismatch"));
        }
        IntMatrix::from_rows(&w.entries, w.cols).map_err(D::Error::custom)
    }
}
