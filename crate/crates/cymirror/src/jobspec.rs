//! Job specification files: a single TOML document describing the
//! operator, the geometry, and an optional open-string section.  All
//! numbers are exact; rationals are written as "p/q" strings.

use crate::constants::{rat_parse, Rat};
use crate::picard_fuchs::PFOperator;
use num_traits::Zero;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("field {field}: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: &str, message: impl Into<String>) -> SpecError {
    SpecError::Field { field: field.into(), message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Machine,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, SpecError> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "machine" => Ok(OutputFormat::Machine),
            other => Err(field_err("format", format!("unknown format {other:?}"))),
        }
    }
}

/// One brane in the open section: monodromy charges (lambda, s), the
/// constant term c, and the coefficient of the quantum part Psi_h in
/// its superpotential.
#[derive(Clone, Debug)]
pub struct BraneSpec {
    pub lambda: i64,
    pub s: i64,
    pub c: Rat,
    pub psi_coeff: Rat,
}

/// Source of the open-string inhomogeneity: either the closed-form
/// real-quintic double-factorial series or an explicit right-hand side
/// for the inhomogeneous Picard-Fuchs equation.
#[derive(Clone, Debug)]
pub enum TauSpec {
    RealQuintic,
    Inhomogeneity { cover: i64, terms: Vec<(i64, Rat)> },
}

#[derive(Clone, Debug)]
pub struct OpenSpec {
    pub r: i64,
    pub branes: Vec<BraneSpec>,
    pub tau: TauSpec,
}

/// Validated job specification.
#[derive(Debug)]
pub struct JobSpec {
    pub operator: PFOperator,
    pub kappa: i64,
    pub a: i64,
    pub b: i64,
    pub open: Option<OpenSpec>,
    pub order: Option<i64>,
    pub format: Option<OutputFormat>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    operator: RawOperator,
    geometry: RawGeometry,
    open: Option<RawOpen>,
    order: Option<i64>,
    format: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    hypergeometric: Option<RawHypergeometric>,
    /// theta_coeffs[i] lists the z-coefficients of p_i(z) in ascending
    /// degree, for the operator sum_i p_i(z) theta^i.
    theta_coeffs: Option<Vec<Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHypergeometric {
    weight: i64,
    shifts: Vec<i64>,
    scale: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    kappa: i64,
    a: i64,
    b: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOpen {
    r: i64,
    branes: Vec<RawBrane>,
    tau: Option<String>,
    inhomogeneity: Option<RawInhomogeneity>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBrane {
    lambda: i64,
    s: i64,
    c: Option<String>,
    psi_coeff: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInhomogeneity {
    cover: i64,
    /// Terms as [exponent numerator over the cover, coefficient].
    terms: Vec<(i64, String)>,
}

fn parse_rat_field(field: &str, s: &str) -> Result<Rat, SpecError> {
    rat_parse(s).map_err(|e| field_err(field, e))
}

impl JobSpec {
    pub fn from_toml(text: &str) -> Result<JobSpec, SpecError> {
        let raw: RawSpec =
            toml::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))?;
        let operator = match (&raw.operator.hypergeometric, &raw.operator.theta_coeffs) {
            (Some(_), Some(_)) => {
                return Err(field_err(
                    "operator",
                    "give either hypergeometric or theta_coeffs, not both",
                ))
            }
            (Some(h), None) => {
                let scale = parse_rat_field("operator.hypergeometric.scale", &h.scale)?;
                PFOperator::hypergeometric(h.weight, &h.shifts, &scale)
                    .map_err(|e| field_err("operator.hypergeometric", e.to_string()))?
            }
            (None, Some(table)) => {
                let mut polys = Vec::new();
                for (i, row) in table.iter().enumerate() {
                    let mut poly = Vec::new();
                    for (m, s) in row.iter().enumerate() {
                        poly.push(parse_rat_field(
                            &format!("operator.theta_coeffs[{i}][{m}]"),
                            s,
                        )?);
                    }
                    polys.push(poly);
                }
                PFOperator::new(polys)
                    .map_err(|e| field_err("operator.theta_coeffs", e.to_string()))?
            }
            (None, None) => {
                return Err(field_err(
                    "operator",
                    "missing hypergeometric or theta_coeffs",
                ))
            }
        };
        if let Some(order) = raw.order {
            if order < 2 {
                return Err(field_err("order", "truncation order must be at least 2"));
            }
        }
        let format = match &raw.format {
            Some(f) => Some(OutputFormat::parse(f)?),
            None => None,
        };
        let open = match raw.open {
            None => None,
            Some(o) => {
                if o.r < 1 {
                    return Err(field_err("open.r", "cover order must be positive"));
                }
                let mut branes = Vec::new();
                for (k, b) in o.branes.iter().enumerate() {
                    let c = match &b.c {
                        Some(s) => parse_rat_field(&format!("open.branes[{k}].c"), s)?,
                        None => Rat::zero(),
                    };
                    let psi_coeff = match &b.psi_coeff {
                        Some(s) => {
                            parse_rat_field(&format!("open.branes[{k}].psi_coeff"), s)?
                        }
                        None => Rat::from_integer(1.into()),
                    };
                    branes.push(BraneSpec { lambda: b.lambda, s: b.s, c, psi_coeff });
                }
                let tau = match (&o.tau, &o.inhomogeneity) {
                    (Some(_), Some(_)) => {
                        return Err(field_err(
                            "open",
                            "give either tau or inhomogeneity, not both",
                        ))
                    }
                    (Some(name), None) => match name.as_str() {
                        "real-quintic" => TauSpec::RealQuintic,
                        other => {
                            return Err(field_err(
                                "open.tau",
                                format!("unknown selector {other:?}"),
                            ))
                        }
                    },
                    (None, Some(inh)) => {
                        if inh.cover < 1 {
                            return Err(field_err(
                                "open.inhomogeneity.cover",
                                "cover must be positive",
                            ));
                        }
                        let mut terms = Vec::new();
                        for (i, (e, s)) in inh.terms.iter().enumerate() {
                            terms.push((
                                *e,
                                parse_rat_field(
                                    &format!("open.inhomogeneity.terms[{i}]"),
                                    s,
                                )?,
                            ));
                        }
                        TauSpec::Inhomogeneity { cover: inh.cover, terms }
                    }
                    (None, None) => {
                        return Err(field_err(
                            "open",
                            "missing tau selector or inhomogeneity",
                        ))
                    }
                };
                Some(OpenSpec { r: o.r, branes, tau })
            }
        };
        Ok(JobSpec {
            operator,
            kappa: raw.geometry.kappa,
            a: raw.geometry.a,
            b: raw.geometry.b,
            open,
            order: raw.order,
            format,
        })
    }
}

/// A ready-made specification of the quintic with the two real-brane
/// vacua, matching the worked example data.
pub fn quintic_spec_toml() -> &'static str {
    r#"
order = 12
format = "table"

[operator.hypergeometric]
weight = 5
shifts = [1, 2, 3, 4]
scale = "5"

[geometry]
kappa = 5
a = 50
b = -200

[open]
r = 2
tau = "real-quintic"

[[open.branes]]
lambda = 1
s = 0
c = "0"
psi_coeff = "1"

[[open.branes]]
lambda = 1
s = -1
c = "1/4"
psi_coeff = "-1"
"#
}
