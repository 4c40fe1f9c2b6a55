//! Line-oriented text formats.
//!
//! Point files hold one `x y` pair per line; each coordinate is an integer, a
//! decimal or `num/den`, and `#` starts a comment line. Structured files are
//! `key: value` lines whose values are JSON.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value;
use thiserror::Error;

use crate::compat::CompatResult;
use crate::exactgeom::{scalar_to_f64, Point, Scalar};
use crate::pointsets::{
    gen_generalized_double_circle_with_epsilon, GdcPointSet, GdcSpec, PointSet,
};
use crate::tri::{Correspondence, EdgeSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing field `{0}`")]
    Missing(String),
    #[error("field `{key}`: {msg}")]
    Field { key: String, msg: String },
    #[error("{0}")]
    Invalid(String),
}

fn field_err(key: &str, msg: impl Into<String>) -> FormatError {
    FormatError::Field {
        key: key.to_string(),
        msg: msg.into(),
    }
}

pub fn parse_scalar(s: &str) -> Option<Scalar> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Scalar::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits: BigInt = format!("{whole}{frac}").parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let v = Scalar::new(digits, den);
    Some(if neg { -v } else { v })
}

/// Exact `num/den` (plain integer when the denominator is one), or a lossy
/// decimal.
pub fn format_scalar(v: &Scalar, decimal: bool) -> String {
    if decimal {
        let s = format!("{:.9}", scalar_to_f64(v));
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.to_string()
        }
    } else if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn parse_points(text: &str) -> Result<Vec<Point>, FormatError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(FormatError::Parse {
                line: k + 1,
                msg: format!("expected 2 fields, got {}", fields.len()),
            });
        }
        let coord = |s: &str| {
            parse_scalar(s).ok_or_else(|| FormatError::Parse {
                line: k + 1,
                msg: format!("bad coordinate `{s}`"),
            })
        };
        out.push(Point::new(coord(fields[0])?, coord(fields[1])?));
    }
    Ok(out)
}

pub fn write_points(points: &[Point], decimal: bool) -> String {
    let mut s = String::new();
    for p in points {
        s.push_str(&format_scalar(&p.x, decimal));
        s.push(' ');
        s.push_str(&format_scalar(&p.y, decimal));
        s.push('\n');
    }
    s
}

pub fn parse_point_set(text: &str) -> Result<PointSet, FormatError> {
    PointSet::new(parse_points(text)?).map_err(|e| FormatError::Invalid(e.to_string()))
}

/// Ordered `key: value` fields.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record {
    pub fields: BTreeMap<String, Value>,
}

impl Record {
    pub fn parse(text: &str) -> Result<Record, FormatError> {
        let mut fields = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| FormatError::Parse {
                line: k + 1,
                msg: "expected `key: value`".into(),
            })?;
            let value: Value =
                serde_json::from_str(value.trim()).map_err(|e| FormatError::Parse {
                    line: k + 1,
                    msg: e.to_string(),
                })?;
            if fields.insert(key.trim().to_string(), value).is_some() {
                return Err(FormatError::Parse {
                    line: k + 1,
                    msg: format!("duplicate key `{}`", key.trim()),
                });
            }
        }
        Ok(Record { fields })
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Result<&Value, FormatError> {
        self.fields
            .get(key)
            .ok_or_else(|| FormatError::Missing(key.to_string()))
    }

    pub fn usize(&self, key: &str) -> Result<usize, FormatError> {
        self.get(key)?
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| field_err(key, "expected a nonnegative integer"))
    }

    pub fn bool(&self, key: &str) -> Result<bool, FormatError> {
        self.get(key)?
            .as_bool()
            .ok_or_else(|| field_err(key, "expected a boolean"))
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, FormatError> {
        as_usize_list(self.get(key)?).ok_or_else(|| field_err(key, "expected an array of integers"))
    }

    pub fn nested_list(&self, key: &str) -> Result<Vec<Vec<usize>>, FormatError> {
        let arr = self
            .get(key)?
            .as_array()
            .ok_or_else(|| field_err(key, "expected an array"))?;
        arr.iter()
            .map(|v| as_usize_list(v).ok_or_else(|| field_err(key, "expected arrays of integers")))
            .collect()
    }

    pub fn edges(&self, key: &str, n: usize) -> Result<EdgeSet, FormatError> {
        let pairs = self.nested_list(key)?;
        let mut out = EdgeSet::new(n);
        for p in pairs {
            if p.len() != 2 {
                return Err(field_err(key, "edges must be pairs"));
            }
            out.insert(p[0], p[1])
                .map_err(|e| field_err(key, e.to_string()))?;
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.fields {
            s.push_str(k);
            s.push_str(": ");
            s.push_str(&v.to_string());
            s.push('\n');
        }
        s
    }
}

fn as_usize_list(v: &Value) -> Option<Vec<usize>> {
    v.as_array()?
        .iter()
        .map(|x| x.as_u64().map(|u| u as usize))
        .collect()
}

pub fn edges_value(e: &EdgeSet) -> Value {
    Value::from(
        e.iter()
            .map(|(a, b)| Value::from(vec![a, b]))
            .collect::<Vec<_>>(),
    )
}

fn nested_value(v: &[Vec<usize>]) -> Value {
    Value::from(v.iter().map(|c| Value::from(c.clone())).collect::<Vec<_>>())
}

pub fn write_triangulation(t: &EdgeSet) -> String {
    let mut r = Record::default();
    r.set("n", t.n.into());
    r.set("edges", edges_value(t));
    r.to_text()
}

pub fn parse_triangulation(text: &str) -> Result<EdgeSet, FormatError> {
    let r = Record::parse(text)?;
    let n = r.usize("n")?;
    r.edges("edges", n)
}

pub fn write_correspondence(f: &Correspondence) -> String {
    let mut r = Record::default();
    r.set("map", f.map.clone().into());
    r.to_text()
}

pub fn parse_correspondence(text: &str) -> Result<Correspondence, FormatError> {
    let r = Record::parse(text)?;
    Correspondence::new(r.usize_list("map")?).map_err(|e| field_err("map", e.to_string()))
}

pub fn write_compat_result(res: &CompatResult) -> String {
    let mut r = Record::default();
    r.set("n", res.f.len().into());
    r.set("map", res.f.map.clone().into());
    r.set("edges_p", edges_value(&res.tp));
    r.set("edges_q", edges_value(&res.tq));
    r.set("hull_q", res.hull_q.clone().into());
    r.set("chains", nested_value(&res.chains));
    r.set("initial_chains", nested_value(&res.initial_chains));
    r.set("mirrored", res.mirrored.into());
    r.set("fan_triangles", res.fan_triangles.into());
    r.to_text()
}

pub fn parse_compat_result(text: &str) -> Result<CompatResult, FormatError> {
    let r = Record::parse(text)?;
    let n = r.usize("n")?;
    let f =
        Correspondence::new(r.usize_list("map")?).map_err(|e| field_err("map", e.to_string()))?;
    if f.len() != n {
        return Err(field_err("map", format!("expected {n} entries")));
    }
    Ok(CompatResult {
        f,
        tp: r.edges("edges_p", n)?,
        tq: r.edges("edges_q", n)?,
        hull_q: r.usize_list("hull_q")?,
        chains: r.nested_list("chains")?,
        initial_chains: r.nested_list("initial_chains")?,
        mirrored: r.bool("mirrored")?,
        fan_triangles: r.usize("fan_triangles")?,
    })
}

/// Point list preceded by `# gdc ...` comment lines carrying the counts and
/// offset, so plain point readers accept the file too.
pub fn write_gdc(g: &GdcPointSet, decimal: bool) -> String {
    let mut s = format!(
        "# gdc counts: {}\n# gdc epsilon: {}\n",
        Value::from(g.spec.counts.clone()),
        Value::from(format_scalar(&g.epsilon, false))
    );
    s.push_str(&write_points(&g.base.points, decimal));
    s
}

/// Rebuilds the labelled set from the header and checks the points match.
pub fn parse_gdc(text: &str) -> Result<GdcPointSet, FormatError> {
    let header: String = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix("# gdc "))
        .map(|l| format!("{l}\n"))
        .collect();
    let r = Record::parse(&header)?;
    let counts = r.usize_list("counts")?;
    let eps = r
        .get("epsilon")?
        .as_str()
        .and_then(parse_scalar)
        .ok_or_else(|| field_err("epsilon", "expected a rational string"))?;
    let spec = GdcSpec::new(counts).map_err(|e| field_err("counts", e.to_string()))?;
    let g = gen_generalized_double_circle_with_epsilon(&spec, &eps);
    if parse_points(text)? != g.base.points {
        return Err(FormatError::Invalid(
            "points do not match the gdc header".into(),
        ));
    }
    Ok(g)
}

/// Subdivision summary: region count and member indices per region.
pub fn write_assignment(members: &[Vec<usize>], empty: &[bool]) -> String {
    let mut r = Record::default();
    r.set("regions", members.len().into());
    r.set("members", nested_value(members));
    r.set("empty", Value::from(empty.to_vec()));
    r.to_text()
}

pub fn parse_counts(s: &str) -> Result<Vec<usize>, FormatError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| FormatError::Invalid(format!("bad count `{t}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::ratio;

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("3/4"), Some(ratio(3, 4)));
        assert_eq!(parse_scalar("-1.25"), Some(ratio(-5, 4)));
        assert_eq!(parse_scalar(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_scalar("7"), Some(ratio(7, 1)));
        assert_eq!(parse_scalar("1/0"), None);
        assert_eq!(parse_scalar("abc"), None);
        assert_eq!(parse_scalar("-"), None);
        assert_eq!(format_scalar(&ratio(-6, 4), false), "-3/2");
        assert_eq!(format_scalar(&ratio(8, 2), false), "4");
        assert_eq!(format_scalar(&ratio(1, 4), true), "0.25");
    }

    #[test]
    fn points_with_comments() {
        let pts = parse_points("# header\n0 0\n\n1/2 3.5\n-2 7/3\n").unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(parse_points(&write_points(&pts, false)).unwrap(), pts);
        assert!(matches!(
            parse_points("1 2 3"),
            Err(FormatError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn record_rejects_duplicates_and_junk() {
        assert!(Record::parse("n: 3\nn: 4").is_err());
        assert!(Record::parse("edges [[0,1]]").is_err());
        assert!(parse_triangulation("n: 3\nedges: [[0,7]]").is_err());
    }

    #[test]
    fn triangulation_round_trip() {
        let t = EdgeSet::from_pairs(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        assert_eq!(parse_triangulation(&write_triangulation(&t)).unwrap(), t);
        let f = Correspondence::new(vec![2, 0, 1]).unwrap();
        assert_eq!(parse_correspondence(&write_correspondence(&f)).unwrap(), f);
    }

    #[test]
    fn gdc_round_trip() {
        let g =
            crate::pointsets::gen_generalized_double_circle(&GdcSpec::new(vec![1, 2, 3]).unwrap())
                .unwrap();
        let text = write_gdc(&g, false);
        let back = parse_gdc(&text).unwrap();
        assert_eq!(back.base.points, g.base.points);
        assert_eq!((back.outer, back.inner), (g.outer.clone(), g.inner.clone()));
        assert_eq!(parse_points(&text).unwrap().len(), 9);
    }
}
