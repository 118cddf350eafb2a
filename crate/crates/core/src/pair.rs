//! Symmetric-pair data: the integers `n`, `d_i` and the exact constants
//! `kappa_i` of a Cartan pair `(g, k)` with `k = k_1 + ... + k_{r+s}`.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, rat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealSpec {
    pub d: u32,
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub kappa: BigRational,
    #[serde(default)]
    pub center: bool,
}

impl IdealSpec {
    pub fn simple(d: u32, kappa: BigRational) -> Self {
        IdealSpec {
            d,
            kappa,
            center: false,
        }
    }

    pub fn center() -> Self {
        IdealSpec {
            d: 1,
            kappa: BigRational::zero(),
            center: true,
        }
    }

    /// `d (1 - kappa)`, the trace of the corresponding `A`-form.
    pub fn weight(&self) -> BigRational {
        BigRational::from_integer(self.d.into()) * (BigRational::one() - &self.kappa)
    }
}

fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

fn de_rational<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
    // Only string rationals are accepted; a JSON float fails here.
    let s = String::deserialize(d)?;
    parse_rational(&s).map_err(serde::de::Error::custom)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricPairSpec {
    pub name: String,
    pub n: u32,
    pub r: u32,
    pub s: u32,
    pub ideals: Vec<IdealSpec>,
}

impl SymmetricPairSpec {
    pub fn ideal_count(&self) -> usize {
        self.ideals.len()
    }

    /// Total dimension of `k`.
    pub fn dim_k(&self) -> u32 {
        self.ideals.iter().map(|i| i.d).sum()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: SymmetricPairSpec = serde_json::from_str(s)?;
        validate_pair(spec)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Copy with ideals `i` and `j` exchanged. No claim is made that the
    /// null-trace classification is invariant under this relabelling; the
    /// result is not re-validated against the center-last convention.
    pub fn swap_ideals(&self, i: usize, j: usize) -> Self {
        let mut out = self.clone();
        out.ideals.swap(i, j);
        out
    }
}

impl fmt::Display for SymmetricPairSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.ideals.iter().map(|i| i.d.to_string()).collect();
        let kappas: Vec<String> = self
            .ideals
            .iter()
            .map(|i| format_rational(&i.kappa))
            .collect();
        write!(
            f,
            "{}: n={}, r={}, s={}, d=({}), kappa=({})",
            self.name,
            self.n,
            self.r,
            self.s,
            dims.join(", "),
            kappas.join(", ")
        )
    }
}

/// Checks every structural invariant of a pair in exact arithmetic and
/// returns it unchanged.
pub fn validate_pair(spec: SymmetricPairSpec) -> Result<SymmetricPairSpec> {
    if spec.n < 2 {
        return Err(Error::InvalidPair(format!("n = {} < 2", spec.n)));
    }
    if spec.s > 1 {
        return Err(Error::InvalidPair(format!(
            "s = {} not in {{0, 1}}",
            spec.s
        )));
    }
    let count = (spec.r + spec.s) as usize;
    if count == 0 {
        return Err(Error::InvalidPair("r + s must be at least 1".into()));
    }
    if spec.ideals.len() != count {
        return Err(Error::InvalidPair(format!(
            "{} ideals listed but r + s = {count}",
            spec.ideals.len()
        )));
    }
    for (index, ideal) in spec.ideals.iter().enumerate() {
        if ideal.d == 0 {
            return Err(Error::InvalidPair(format!("ideal {index} has d = 0")));
        }
        if ideal.kappa.is_negative() || ideal.kappa >= BigRational::one() {
            return Err(Error::KappaOutOfRange {
                index,
                kappa: format_rational(&ideal.kappa),
            });
        }
        let is_last = index + 1 == count;
        if ideal.center && !(spec.s == 1 && is_last) {
            return Err(Error::CenterShapeError(format!(
                "ideal {index} is flagged as center but only the last ideal may be, and only when s = 1"
            )));
        }
        if !ideal.center && ideal.kappa.is_zero() {
            return Err(Error::KappaOutOfRange {
                index,
                kappa: "0 (only the center may have kappa = 0)".into(),
            });
        }
    }
    if spec.s == 1 {
        let last = spec.ideals.last().expect("count >= 1");
        if !(last.center && last.d == 1 && last.kappa.is_zero()) {
            return Err(Error::CenterShapeError(
                "s = 1 requires the last ideal to be the center with d = 1, kappa = 0".into(),
            ));
        }
    }
    let lhs: BigRational = BigRational::from_integer(2.into())
        * spec
            .ideals
            .iter()
            .map(IdealSpec::weight)
            .sum::<BigRational>();
    if lhs != BigRational::from_integer(spec.n.into()) {
        return Err(Error::TraceIdentityViolation {
            lhs: format_rational(&lhs),
            n: spec.n,
        });
    }
    Ok(spec)
}

/// `kappa_1 = 1 - n / (2 d_1)` for a pair with a single ideal.
pub fn kappa_from_trace_identity(n: u32, d1: u32) -> Result<BigRational> {
    if d1 == 0 {
        return Err(Error::Infeasible("d1 = 0".into()));
    }
    let kappa =
        BigRational::one() - BigRational::new(BigInt::from(n), BigInt::from(2 * u64::from(d1)));
    if kappa.is_negative() || kappa >= BigRational::one() {
        return Err(Error::Infeasible(format!(
            "kappa = {} outside [0, 1) for n = {n}, d1 = {d1}",
            format_rational(&kappa)
        )));
    }
    Ok(kappa)
}

/// Matrix-model families the oracle can realise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassicalFamily {
    Su,
    So,
}

impl fmt::Display for ClassicalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassicalFamily::Su => f.write_str("su"),
            ClassicalFamily::So => f.write_str("so"),
        }
    }
}

/// Built-in families with known constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinFamily {
    /// `G2^C / G2`.
    G2COverG2,
    /// `SO+(2, q) / SO(2) x SO(q)`, `q >= 5`.
    So2q { q: u32 },
    /// `SU(p, q) / S(U(p) x U(q))`, `2 <= p <= q`.
    Supq { p: u32, q: u32 },
    /// `SL(2, R) / SO(2)`.
    Sl2r,
}

impl BuiltinFamily {
    pub fn name(&self) -> String {
        match *self {
            BuiltinFamily::G2COverG2 => "G2C_over_G2".into(),
            BuiltinFamily::So2q { q } => format!("SO2q_{q}"),
            BuiltinFamily::Supq { p, q } => format!("SUpq_{p}_{q}"),
            BuiltinFamily::Sl2r => "SL2R".into(),
        }
    }

    /// Parses names such as `G2C_over_G2`, `SO2q_10`, `SUpq_2_3`, `SL2R`.
    pub fn from_name(name: &str) -> Option<Self> {
        let parse = |s: &str| s.parse::<u32>().ok();
        match name {
            "G2C_over_G2" => Some(BuiltinFamily::G2COverG2),
            "SL2R" => Some(BuiltinFamily::Sl2r),
            _ => {
                if let Some(rest) = name.strip_prefix("SO2q_") {
                    Some(BuiltinFamily::So2q { q: parse(rest)? })
                } else if let Some(rest) = name.strip_prefix("SUpq_") {
                    let (p, q) = rest.split_once('_')?;
                    Some(BuiltinFamily::Supq {
                        p: parse(p)?,
                        q: parse(q)?,
                    })
                } else {
                    None
                }
            }
        }
    }

    /// The matrix algebra realising this pair, when one exists.
    pub fn matrix_model(&self) -> Option<(ClassicalFamily, u32, u32)> {
        match *self {
            BuiltinFamily::G2COverG2 => None,
            BuiltinFamily::So2q { q } => Some((ClassicalFamily::So, 2, q)),
            BuiltinFamily::Supq { p, q } => Some((ClassicalFamily::Su, p, q)),
            BuiltinFamily::Sl2r => Some((ClassicalFamily::So, 1, 2)),
        }
    }
}

pub fn builtin_pair(family: BuiltinFamily) -> Result<SymmetricPairSpec> {
    let name = family.name();
    let spec = match family {
        BuiltinFamily::G2COverG2 => SymmetricPairSpec {
            name,
            n: 14,
            r: 1,
            s: 0,
            ideals: vec![IdealSpec::simple(14, rat(1, 2))],
        },
        BuiltinFamily::So2q { q } => {
            if q < 5 {
                return Err(Error::ParamOutOfRange(format!(
                    "SO2q needs q >= 5, got {q}"
                )));
            }
            SymmetricPairSpec {
                name,
                n: 2 * q,
                r: 1,
                s: 1,
                ideals: vec![
                    IdealSpec::simple(q * (q - 1) / 2, rat(i64::from(q) - 2, i64::from(q))),
                    IdealSpec::center(),
                ],
            }
        }
        BuiltinFamily::Supq { p, q } => {
            if p < 2 || q < p {
                return Err(Error::ParamOutOfRange(format!(
                    "SUpq needs 2 <= p <= q, got p = {p}, q = {q}"
                )));
            }
            let total = i64::from(p + q);
            SymmetricPairSpec {
                name,
                n: 2 * p * q,
                r: 2,
                s: 1,
                ideals: vec![
                    IdealSpec::simple(p * p - 1, rat(i64::from(p), total)),
                    IdealSpec::simple(q * q - 1, rat(i64::from(q), total)),
                    IdealSpec::center(),
                ],
            }
        }
        BuiltinFamily::Sl2r => SymmetricPairSpec {
            name,
            n: 2,
            r: 0,
            s: 1,
            ideals: vec![IdealSpec::center()],
        },
    };
    validate_pair(spec)
}

/// Representative catalog entries.
pub fn catalog() -> Vec<BuiltinFamily> {
    vec![
        BuiltinFamily::G2COverG2,
        BuiltinFamily::Sl2r,
        BuiltinFamily::So2q { q: 5 },
        BuiltinFamily::So2q { q: 6 },
        BuiltinFamily::So2q { q: 10 },
        BuiltinFamily::Supq { p: 2, q: 2 },
        BuiltinFamily::Supq { p: 2, q: 3 },
        BuiltinFamily::Supq { p: 3, q: 4 },
        BuiltinFamily::Supq { p: 2, q: 12 },
    ]
}

pub fn lookup(name: &str) -> Result<SymmetricPairSpec> {
    let family = BuiltinFamily::from_name(name).ok_or_else(|| Error::UnknownPair(name.into()))?;
    builtin_pair(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(n: u32, d: u32, kappa: BigRational) -> SymmetricPairSpec {
        SymmetricPairSpec {
            name: "t".into(),
            n,
            r: 1,
            s: 0,
            ideals: vec![IdealSpec::simple(d, kappa)],
        }
    }

    #[test]
    fn g2c_is_valid() {
        assert!(validate_pair(single(14, 14, rat(1, 2))).is_ok());
    }

    #[test]
    fn minimal_abelian_center_is_valid() {
        let spec = SymmetricPairSpec {
            name: "c".into(),
            n: 2,
            r: 0,
            s: 1,
            ideals: vec![IdealSpec::center()],
        };
        assert!(validate_pair(spec).is_ok());
    }

    #[test]
    fn wrong_kappa_breaks_trace_identity() {
        let err = validate_pair(single(14, 14, rat(1, 3))).unwrap_err();
        assert!(matches!(err, Error::TraceIdentityViolation { .. }), "{err}");
    }

    #[test]
    fn kappa_range_and_center_shape() {
        assert!(matches!(
            validate_pair(single(14, 14, rat(1, 1))).unwrap_err(),
            Error::KappaOutOfRange { .. }
        ));
        assert!(matches!(
            validate_pair(single(14, 14, rat(-1, 2))).unwrap_err(),
            Error::KappaOutOfRange { .. }
        ));
        let mut bad_center = builtin_pair(BuiltinFamily::So2q { q: 5 }).unwrap();
        bad_center.ideals[1].d = 2;
        assert!(matches!(
            validate_pair(bad_center).unwrap_err(),
            Error::CenterShapeError(_)
        ));
        let mut misplaced = builtin_pair(BuiltinFamily::So2q { q: 5 }).unwrap();
        misplaced.ideals.swap(0, 1);
        assert!(matches!(
            validate_pair(misplaced).unwrap_err(),
            Error::CenterShapeError(_)
        ));
    }

    #[test]
    fn builtin_values() {
        let su = builtin_pair(BuiltinFamily::Supq { p: 2, q: 3 }).unwrap();
        assert_eq!(su.n, 12);
        let dims: Vec<u32> = su.ideals.iter().map(|i| i.d).collect();
        assert_eq!(dims, vec![3, 8, 1]);
        let kappas: Vec<BigRational> = su.ideals.iter().map(|i| i.kappa.clone()).collect();
        assert_eq!(kappas, vec![rat(2, 5), rat(3, 5), rat(0, 1)]);

        let so = builtin_pair(BuiltinFamily::So2q { q: 5 }).unwrap();
        assert_eq!(so.n, 10);
        assert_eq!(so.ideals[0].d, 10);
        assert_eq!(so.ideals[0].kappa, rat(3, 5));
        assert_eq!(so.ideals[1], IdealSpec::center());

        let g2 = builtin_pair(BuiltinFamily::G2COverG2).unwrap();
        assert_eq!((g2.n, g2.ideals[0].d), (14, 14));
        assert_eq!(g2.ideals[0].kappa, rat(1, 2));
    }

    #[test]
    fn builtin_param_errors() {
        assert!(matches!(
            builtin_pair(BuiltinFamily::So2q { q: 4 }).unwrap_err(),
            Error::ParamOutOfRange(_)
        ));
        assert!(matches!(
            builtin_pair(BuiltinFamily::Supq { p: 1, q: 3 }).unwrap_err(),
            Error::ParamOutOfRange(_)
        ));
        assert!(matches!(
            builtin_pair(BuiltinFamily::Supq { p: 3, q: 2 }).unwrap_err(),
            Error::ParamOutOfRange(_)
        ));
    }

    #[test]
    fn every_catalog_entry_validates_and_round_trips_by_name() {
        for family in catalog() {
            let spec = builtin_pair(family).unwrap();
            assert_eq!(validate_pair(spec.clone()).unwrap(), spec);
            assert_eq!(BuiltinFamily::from_name(&spec.name), Some(family));
        }
        for q in 5..30 {
            builtin_pair(BuiltinFamily::So2q { q }).unwrap();
        }
        for p in 2..8 {
            for q in p..12 {
                builtin_pair(BuiltinFamily::Supq { p, q }).unwrap();
            }
        }
    }

    #[test]
    fn trace_identity_kappa() {
        assert_eq!(kappa_from_trace_identity(14, 14).unwrap(), rat(1, 2));
        assert_eq!(kappa_from_trace_identity(2, 1).unwrap(), rat(0, 1));
        assert_eq!(kappa_from_trace_identity(14, 21).unwrap(), rat(2, 3));
        assert!(matches!(
            kappa_from_trace_identity(14, 6).unwrap_err(),
            Error::Infeasible(_)
        ));
    }

    #[test]
    fn json_config_round_trip_and_float_rejection() {
        let text = r#"{"name": "su23", "n": 12, "r": 2, "s": 1, "ideals": [
            {"d": 3, "kappa": "2/5", "center": false},
            {"d": 8, "kappa": "3/5", "center": false},
            {"d": 1, "kappa": "0", "center": true}]}"#;
        let spec = SymmetricPairSpec::from_json_str(text).unwrap();
        assert_eq!(spec.ideals[1].kappa, rat(3, 5));
        let again = SymmetricPairSpec::from_json_str(&spec.to_json().unwrap()).unwrap();
        assert_eq!(again, spec);

        let float = r#"{"name": "g", "n": 14, "r": 1, "s": 0,
            "ideals": [{"d": 14, "kappa": 0.5, "center": false}]}"#;
        assert!(matches!(
            SymmetricPairSpec::from_json_str(float).unwrap_err(),
            Error::Json(_)
        ));
        let broken = r#"{"name": "g", "n": 14, "r": 1, "s": 0,
            "ideals": [{"d": 14, "kappa": "1/3", "center": false}]}"#;
        assert!(matches!(
            SymmetricPairSpec::from_json_str(broken).unwrap_err(),
            Error::TraceIdentityViolation { .. }
        ));
    }
}
