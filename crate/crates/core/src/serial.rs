//! Number formatting shared by every serialised record: decimal strings
//! with 17 significant digits, and `-inf` / `+inf` tags for unbounded
//! values.

use num_rational::Rational64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::{Extended, Scalar};

/// Formats a value with 17 significant digits (enough to round-trip an
/// `f64`). Non-finite values become `nan`, `-inf` or `+inf`.
pub fn format17(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "+inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn format_extended<T: Scalar>(v: &Extended<T>) -> String {
    match v {
        Extended::NegInfinity => "-inf".to_string(),
        Extended::PosInfinity => "+inf".to_string(),
        Extended::Finite(x) => format17(x.as_f64()),
    }
}

pub fn num<T: Scalar, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format17(v.as_f64()))
}

pub fn opt_num<T: Scalar, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&format17(x.as_f64())),
        None => s.serialize_none(),
    }
}

pub fn num_vec<T: Scalar, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&format17(x.as_f64()))?;
    }
    seq.end()
}

pub fn opt_ratio<S: Serializer>(v: &Option<Rational64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.serialize_str(&format!("{}/{}", q.numer(), q.denom())),
        None => s.serialize_none(),
    }
}

impl<T: Scalar> Serialize for Extended<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_extended(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [1.25, 0.1, -1.0 / 3.0, 625.0, 1e-300] {
            let s = format17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
        assert_eq!(format17(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_extended::<f64>(&Extended::PosInfinity), "+inf");
    }
}
