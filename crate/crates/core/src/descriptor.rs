//! Group descriptors: built-in names and JSON objects.
//!
//! Names: `S3`, `S4`, `A4`, `D4`, `Q8`, `Z2`, `Z4`, `T<k>`, `SU<N>` (or
//! `SU(N)`) and `O2`, the circle extended by an inverting involution.
//!
//! JSON forms:
//! - finite: `{"degree": d, "generators": [[images…] | "cycles", …]}`
//! - FC quotient: `{"torus_dim": k, "delta": <finite>, "N": [{"torus": ["p/q", …], "delta_elt": "cycles"}]}`
//!   with torus coordinates in full turns, or as `p/q pi` strings
//! - semidirect: `{"torus_dim": k, "phi": <finite>, "action": {"cycles": [[int, …], …]}}`
//! - `{"kind": "torus", "k": k}`, `{"kind": "su", "n": N}`,
//!   `{"kind": "product", "factors": [<descriptor>, …]}`

use std::path::Path;
use std::sync::Arc;

use serde_json::Value;

use crate::angle::{self, Angle};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::fc::build_fc_group;
use crate::finite::{builtin_generators, enumerate_group, FiniteGroup};
use crate::group::GroupSpec;
use crate::linalg::IntMatrix;
use crate::openfc::build_semidirect;
use crate::perm::Perm;

/// Resolves a command-line group argument: a readable file holding JSON,
/// inline JSON, or a built-in name.
pub fn load_group(arg: &str, caps: &Caps) -> Result<GroupSpec> {
    let trimmed = arg.trim();
    if trimmed.starts_with('{') {
        return parse_json(trimmed, caps);
    }
    if Path::new(trimmed).is_file() {
        let text = std::fs::read_to_string(trimmed).map_err(|e| Error::Parse(format!("reading {trimmed}: {e}")))?;
        return parse_json(&text, caps);
    }
    from_name(trimmed, caps)
}

pub fn parse_json(text: &str, caps: &Caps) -> Result<GroupSpec> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("group descriptor: {e}")))?;
    from_value(&v, caps)
}

pub fn from_name(name: &str, caps: &Caps) -> Result<GroupSpec> {
    let upper = name.trim().to_ascii_uppercase();
    if let Some(gens) = builtin_generators(&upper) {
        return Ok(GroupSpec::Finite(Arc::new(enumerate_group(&gens, caps)?)));
    }
    if upper == "O2" || upper == "O(2)" {
        return o2_type(caps);
    }
    let size = |rest: &str| {
        rest.trim_start_matches(['(', '^'])
            .trim_end_matches(')')
            .parse::<usize>()
            .ok()
    };
    if let Some(n) = upper.strip_prefix("SU").and_then(size) {
        if n == 0 {
            return Err(Error::UnsupportedSpec("SU(0)".into()));
        }
        return Ok(GroupSpec::SpecialUnitary(n));
    }
    if let Some(k) = upper.strip_prefix('T').and_then(size) {
        return Ok(GroupSpec::Torus(k));
    }
    Err(Error::Parse(format!("unknown group {name:?}")))
}

/// `T¹ ⋊ Z2` with the generator acting by `−1`.
pub fn o2_type(caps: &Caps) -> Result<GroupSpec> {
    let z2 = Arc::new(enumerate_group(&builtin_generators("Z2").expect("built in"), caps)?);
    let s = z2.generators()[0].clone();
    let minus = IntMatrix::from_rows(&[vec![-1]]).expect("square");
    Ok(GroupSpec::Semidirect(Arc::new(build_semidirect(1, z2, &[(s, minus)])?)))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("descriptor is missing {key:?}")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("{what} must be a non-negative integer")))
}

pub fn from_value(v: &Value, caps: &Caps) -> Result<GroupSpec> {
    if let Some(name) = v.as_str() {
        return from_name(name, caps);
    }
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("group descriptor must be a name or an object".into()))?;
    let kind = obj.get("kind").and_then(Value::as_str).map(str::to_ascii_lowercase);
    match kind.as_deref() {
        Some("torus") => return Ok(GroupSpec::Torus(as_usize(field(v, "k")?, "k")?)),
        Some("su") => {
            let n = as_usize(field(v, "n")?, "n")?;
            return from_name(&format!("SU{n}"), caps);
        }
        Some("product") => {
            let factors = field(v, "factors")?
                .as_array()
                .ok_or_else(|| Error::Parse("factors must be an array".into()))?;
            return Ok(GroupSpec::Product(
                factors.iter().map(|f| from_value(f, caps)).collect::<Result<_>>()?,
            ));
        }
        Some("finite") | Some("fc") | Some("semidirect") | None => {}
        Some(other) => return Err(Error::Parse(format!("unknown group kind {other:?}"))),
    }
    if obj.contains_key("action") || obj.contains_key("phi") {
        return semidirect_from_value(v, caps);
    }
    if obj.contains_key("delta") || obj.contains_key("N") {
        return fc_from_value(v, caps);
    }
    Ok(GroupSpec::Finite(finite_from_value(v, caps)?))
}

/// A finite group: a built-in name or `{"degree", "generators"}`.
pub fn finite_from_value(v: &Value, caps: &Caps) -> Result<Arc<FiniteGroup>> {
    if let Some(name) = v.as_str() {
        return match from_name(name, caps)? {
            GroupSpec::Finite(g) => Ok(g),
            _ => Err(Error::Parse(format!("{name} is not a finite group"))),
        };
    }
    let degree = as_usize(field(v, "degree")?, "degree")?;
    let gens = field(v, "generators")?
        .as_array()
        .ok_or_else(|| Error::Parse("generators must be an array".into()))?;
    let gens = gens
        .iter()
        .map(|g| match g {
            Value::String(s) => Perm::parse_cycles(s, degree),
            Value::Array(images) => {
                let images = images
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .map(|x| x as u32)
                            .ok_or_else(|| Error::Parse("images must be non-negative integers".into()))
                    })
                    .collect::<Result<Vec<u32>>>()?;
                if images.len() != degree {
                    return Err(Error::BadGenerator(format!(
                        "{images:?} has {} images, expected {degree}",
                        images.len()
                    )));
                }
                Perm::from_images(images)
            }
            _ => Err(Error::Parse("a generator is an image array or a cycle string".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Arc::new(enumerate_group(&gens, caps)?))
}

/// A torus coordinate of an element of `N`: `p/q` full turns or `p/q pi`.
fn n_coordinate(v: &Value) -> Result<Angle> {
    match v {
        Value::String(s) => {
            let lower = s.to_ascii_lowercase();
            if lower.contains("pi") || lower.contains('π') {
                s.parse()
            } else {
                Ok(Angle::turns(angle::parse_rational(s)?))
            }
        }
        Value::Number(n) if n.is_i64() => Ok(Angle::from_turns(n.as_i64().unwrap_or(0), 1)),
        _ => Err(Error::NotASubgroup(format!(
            "torus coordinate {v} must be an exact fraction of a turn"
        ))),
    }
}

fn fc_from_value(v: &Value, caps: &Caps) -> Result<GroupSpec> {
    let k = as_usize(field(v, "torus_dim")?, "torus_dim")?;
    let delta = finite_from_value(field(v, "delta")?, caps)?;
    let mut n = Vec::new();
    if let Some(items) = v.get("N") {
        let items = items
            .as_array()
            .ok_or_else(|| Error::Parse("N must be an array".into()))?;
        for item in items {
            let torus = field(item, "torus")?
                .as_array()
                .ok_or_else(|| Error::Parse("torus must be an array".into()))?
                .iter()
                .map(n_coordinate)
                .collect::<Result<Vec<_>>>()?;
            let elt = field(item, "delta_elt")?
                .as_str()
                .ok_or_else(|| Error::Parse("delta_elt must be a cycle string".into()))?;
            let d = delta
                .parse_element(elt)
                .map_err(|_| Error::NotASubgroup(format!("{elt} is not an element of Δ")))?;
            n.push((torus, d));
        }
    }
    Ok(GroupSpec::FcQuotient(Arc::new(build_fc_group(k, delta, n)?)))
}

fn semidirect_from_value(v: &Value, caps: &Caps) -> Result<GroupSpec> {
    let k = as_usize(field(v, "torus_dim")?, "torus_dim")?;
    let phi = finite_from_value(field(v, "phi")?, caps)?;
    let action = field(v, "action")?
        .as_object()
        .ok_or_else(|| Error::Parse("action must map generator cycles to matrices".into()))?;
    let mut pairs = Vec::with_capacity(action.len());
    for (cycle, matrix) in action {
        let p = Perm::parse_cycles(cycle, phi.degree())?;
        let rows = matrix
            .as_array()
            .ok_or_else(|| Error::Parse(format!("action of {cycle} must be a matrix")))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Parse("matrix rows must be arrays".into()))?
                    .iter()
                    .map(|x| x.as_i64().ok_or_else(|| Error::Parse("matrix entries must be integers".into())))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let m = IntMatrix::from_rows(&rows)
            .ok_or_else(|| Error::Parse(format!("action of {cycle} is not a square matrix")))?;
        pairs.push((p, m));
    }
    Ok(GroupSpec::Semidirect(Arc::new(build_semidirect(k, phi, &pairs)?)))
}
