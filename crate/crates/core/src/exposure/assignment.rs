use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits;
use crate::error::{Error, Result};

/// Binary treatment vector over the population, bit-packed. Bit `i` set means
/// unit `i` is treated.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    len: usize,
    words: Vec<u64>,
}

impl Assignment {
    pub fn zeros(len: usize) -> Self {
        Assignment { len, words: vec![0; bits::words_for(len)] }
    }

    pub fn from_treated(len: usize, treated: &[usize]) -> Result<Self> {
        let mut z = Self::zeros(len);
        for &i in treated {
            if i >= len {
                return Err(Error::UnitOutOfRange { index: i, n_units: len });
            }
            z.set(i, true);
        }
        Ok(z)
    }

    /// From a 0/1 slice.
    pub fn from_bits(values: &[u8]) -> Result<Self> {
        let mut z = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            match v {
                0 => {}
                1 => z.set(i, true),
                other => {
                    return Err(Error::Format(format!("assignment entry {i} is {other}, expected 0 or 1")))
                }
            }
        }
        Ok(z)
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), bits::words_for(len));
        Assignment { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        bits::get(&self.words, i)
    }

    pub fn set(&mut self, i: usize, treated: bool) {
        if treated {
            bits::set(&mut self.words, i);
        } else {
            bits::clear(&mut self.words, i);
        }
    }

    pub fn n_treated(&self) -> usize {
        bits::count(&self.words)
    }

    /// Treated unit ids in ascending order.
    pub fn treated(&self) -> impl Iterator<Item = usize> + '_ {
        bits::ones(&self.words)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.len != n {
            return Err(Error::LengthMismatch { expected: n, found: self.len });
        }
        Ok(())
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Assignment(")?;
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, ")")
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_bits().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u8>::deserialize(d)?;
        Assignment::from_bits(&v).map_err(serde::de::Error::custom)
    }
}
