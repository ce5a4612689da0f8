//! Serialization of arbitrary-precision integers as decimal strings.

use num_bigint::BigInt;
use serde::ser::{SerializeSeq, Serializer};

pub fn ser_big<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn ser_vec<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

pub fn ser_table<S: Serializer>(t: &[Vec<Vec<BigInt>>], s: S) -> Result<S::Ok, S::Error> {
    let strings: Vec<Vec<Vec<String>>> = t
        .iter()
        .map(|r| r.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect())
        .collect();
    serde::Serialize::serialize(&strings, s)
}

pub fn ser_opt_big<S: Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}
