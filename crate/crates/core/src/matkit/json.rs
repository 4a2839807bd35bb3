//! JSON matrices: row-major arrays of `[re, im]` pairs; plain reals accepted on input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{CMat, CVec, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Pair([re, im]) => C64::new(re, im),
            Entry::Real(re) => C64::new(re, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatJson(pub Vec<Vec<Entry>>);

impl From<&CMat> for MatJson {
    fn from(m: &CMat) -> Self {
        MatJson((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| Entry::Pair([m[(i, j)].re, m[(i, j)].im])).collect()).collect())
    }
}

impl MatJson {
    pub fn to_mat(&self) -> Result<CMat> {
        let rows = self.0.len();
        let cols = self.0.first().map(|r| r.len()).unwrap_or(0);
        if self.0.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(CMat::from_fn(rows, cols, |i, j| self.0[i][j].value()))
    }
}

/// Column vector as a flat array of entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VecJson(pub Vec<Entry>);

impl From<&CVec> for VecJson {
    fn from(v: &CVec) -> Self {
        VecJson(v.iter().map(|z| Entry::Pair([z.re, z.im])).collect())
    }
}

impl VecJson {
    pub fn to_vec(&self) -> CVec {
        CVec::from_iterator(self.0.len(), self.0.iter().map(|e| e.value()))
    }
}

/// Scalar as `[re, im]`.
pub fn scalar_json(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// `#[serde(with = "mat")]` for `CMat` fields.
pub mod mat {
    use super::MatJson;
    use crate::CMat;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        MatJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        MatJson::deserialize(d)?.to_mat().map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "mats")]` for `Vec<CMat>` fields.
pub mod mats {
    use super::MatJson;
    use crate::CMat;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[CMat], s: S) -> Result<S::Ok, S::Error> {
        m.iter().map(MatJson::from).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMat>, D::Error> {
        Vec::<MatJson>::deserialize(d)?.iter().map(|m| m.to_mat().map_err(serde::de::Error::custom)).collect()
    }
}

/// `#[serde(with = "tuple")]` for `HermTuple` fields (no Hermiticity check on input).
pub mod tuple {
    use crate::ncalg::{HermTuple, TupleFile};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(t: &HermTuple, s: S) -> Result<S::Ok, S::Error> {
        t.to_file().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<HermTuple, D::Error> {
        TupleFile::deserialize(d)?.to_general_tuple().map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "cscalar")]` for complex scalars as `[re, im]`.
pub mod cscalar {
    use crate::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}
