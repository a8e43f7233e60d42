//! `{ "re": .., "im": .. }` encoding for complex numbers in JSON documents.

use crate::C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReIm {
    re: f64,
    im: f64,
}

pub fn serialize<S: Serializer>(value: &C64, serializer: S) -> Result<S::Ok, S::Error> {
    ReIm {
        re: value.re,
        im: value.im,
    }
    .serialize(serializer)
}

pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<C64, D::Error> {
    let ReIm { re, im } = ReIm::deserialize(deserializer)?;
    Ok(C64::new(re, im))
}

pub mod option {
    use super::ReIm;
    use crate::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(value: &Option<C64>, serializer: S) -> Result<S::Ok, S::Error> {
        value
            .map(|v| ReIm { re: v.re, im: v.im })
            .serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Option<C64>, D::Error> {
        Ok(Option::<ReIm>::deserialize(deserializer)?.map(|ReIm { re, im }| C64::new(re, im)))
    }
}
