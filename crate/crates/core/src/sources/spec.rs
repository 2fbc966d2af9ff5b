//! JSON geometry documents.
//!
//! ```json
//! {"kind": "surface_product", "c1": 1, "c2": -1, "volume": 157.9}
//! {"kind": "lie_group", "c": [[1, 2, 2, 2.0], [1, 3, 3, -1.0]]}
//! {"kind": "raw_curvature", "components": [[1, 2, 1, 2, 4.0]], "symmetry_closure": true}
//! {"kind": "gallery", "name": "example4", "a": 1, "b": 0}
//! ```
//!
//! Indices are 1-based.

use serde_json::{json, Map, Value};

use super::gallery::{gallery, GalleryMeta};
use super::lie::{lie_group_curvature, LieAlgebra4};
use super::{constant_curvature, space_form_product, surface_product, SourceError};
use crate::scalar::Real;
use crate::tensor::{make_curvature, orbit_fill, zero_raw, Curvature4};

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// `(i, j, k, c_ijk)`, 0-based.
    LieGroup { brackets: Vec<(usize, usize, usize, f64)> },
    SurfaceProduct { c1: f64, c2: f64 },
    SpaceFormProduct { c: f64 },
    ConstantCurvature { c: f64 },
    /// 0-based indices.
    RawCurvature { components: Vec<([usize; 4], f64)>, symmetry_closure: bool },
    Gallery { name: String, params: Vec<(String, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySpec {
    pub geometry: Geometry,
    pub volume: Option<f64>,
}

/// A geometry turned into a tensor.
#[derive(Debug, Clone)]
pub struct Realized<T> {
    pub tensor: Curvature4<T>,
    pub meta: Option<GalleryMeta>,
    /// Explicit volume, else the gallery's.
    pub volume: Option<f64>,
}

fn invalid(field: &str, constraint: impl Into<String>) -> SourceError {
    SourceError::Validation { field: field.to_string(), constraint: constraint.into() }
}

fn number(obj: &Map<String, Value>, field: &str) -> Result<f64, SourceError> {
    let v = obj.get(field).ok_or_else(|| invalid(field, "required"))?;
    let x = v.as_f64().ok_or_else(|| invalid(field, "must be a number"))?;
    if !x.is_finite() {
        return Err(invalid(field, "must be finite"));
    }
    Ok(x)
}

fn index(v: &Value, field: &str) -> Result<usize, SourceError> {
    match v.as_u64() {
        Some(i @ 1..=4) => Ok(i as usize - 1),
        _ => Err(invalid(field, "indices must be integers in 1..=4")),
    }
}

fn rows<'a>(obj: &'a Map<String, Value>, field: &str, width: usize) -> Result<Vec<&'a Vec<Value>>, SourceError> {
    let list = obj
        .get(field)
        .ok_or_else(|| invalid(field, "required"))?
        .as_array()
        .ok_or_else(|| invalid(field, "must be an array"))?;
    list.iter()
        .map(|row| match row.as_array() {
            Some(r) if r.len() == width => Ok(r),
            _ => Err(invalid(field, format!("each entry must be an array of {width} numbers"))),
        })
        .collect()
}

fn only_fields(obj: &Map<String, Value>, allowed: &[&str]) -> Result<(), SourceError> {
    for key in obj.keys() {
        if key != "kind" && key != "volume" && !allowed.contains(&key.as_str()) {
            return Err(invalid(key, "unknown field"));
        }
    }
    Ok(())
}

/// Parses and validates a geometry document.
pub fn load_spec(text: &str) -> Result<GeometrySpec, SourceError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| SourceError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = doc.as_object().ok_or_else(|| invalid("$", "document must be a JSON object"))?;
    let kind = obj
        .get("kind")
        .ok_or_else(|| invalid("kind", "required"))?
        .as_str()
        .ok_or_else(|| invalid("kind", "must be a string"))?;

    let volume = match obj.get("volume") {
        None | Some(Value::Null) => None,
        Some(_) => {
            let v = number(obj, "volume")?;
            if v <= 0.0 {
                return Err(invalid("volume", "must be positive"));
            }
            Some(v)
        }
    };

    let geometry = match kind {
        "lie_group" => {
            only_fields(obj, &["c"])?;
            let mut brackets = Vec::new();
            for r in rows(obj, "c", 4)? {
                let (i, j, k) = (index(&r[0], "c")?, index(&r[1], "c")?, index(&r[2], "c")?);
                let v = r[3].as_f64().filter(|v| v.is_finite()).ok_or_else(|| invalid("c", "value must be a finite number"))?;
                if i == j {
                    return Err(invalid("c", "bracket [e_i, e_i] must vanish"));
                }
                brackets.push((i, j, k, v));
            }
            Geometry::LieGroup { brackets }
        }
        "surface_product" => {
            only_fields(obj, &["c1", "c2"])?;
            Geometry::SurfaceProduct { c1: number(obj, "c1")?, c2: number(obj, "c2")? }
        }
        "space_form_product" => {
            only_fields(obj, &["c"])?;
            Geometry::SpaceFormProduct { c: number(obj, "c")? }
        }
        "constant_curvature" => {
            only_fields(obj, &["c"])?;
            Geometry::ConstantCurvature { c: number(obj, "c")? }
        }
        "raw_curvature" => {
            only_fields(obj, &["components", "symmetry_closure"])?;
            let mut components = Vec::new();
            for r in rows(obj, "components", 5)? {
                let ix = [
                    index(&r[0], "components")?,
                    index(&r[1], "components")?,
                    index(&r[2], "components")?,
                    index(&r[3], "components")?,
                ];
                let v = r[4]
                    .as_f64()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| invalid("components", "value must be a finite number"))?;
                components.push((ix, v));
            }
            let symmetry_closure = match obj.get("symmetry_closure") {
                None => false,
                Some(v) => v.as_bool().ok_or_else(|| invalid("symmetry_closure", "must be a boolean"))?,
            };
            Geometry::RawCurvature { components, symmetry_closure }
        }
        "gallery" => {
            let name = obj
                .get("name")
                .ok_or_else(|| invalid("name", "required"))?
                .as_str()
                .ok_or_else(|| invalid("name", "must be a string"))?
                .to_string();
            let mut params = Vec::new();
            for key in obj.keys() {
                if matches!(key.as_str(), "kind" | "name" | "volume") {
                    continue;
                }
                params.push((key.clone(), number(obj, key)?));
            }
            Geometry::Gallery { name, params }
        }
        other => return Err(invalid("kind", format!("unknown kind `{other}`"))),
    };
    Ok(GeometrySpec { geometry, volume })
}

impl GeometrySpec {
    pub fn kind(&self) -> &'static str {
        match self.geometry {
            Geometry::LieGroup { .. } => "lie_group",
            Geometry::SurfaceProduct { .. } => "surface_product",
            Geometry::SpaceFormProduct { .. } => "space_form_product",
            Geometry::ConstantCurvature { .. } => "constant_curvature",
            Geometry::RawCurvature { .. } => "raw_curvature",
            Geometry::Gallery { .. } => "gallery",
        }
    }

    /// The document this spec was read from, in canonical form.
    pub fn to_json(&self) -> Value {
        let mut v = match &self.geometry {
            Geometry::LieGroup { brackets } => json!({
                "kind": "lie_group",
                "c": brackets.iter().map(|&(i, j, k, c)| json!([i + 1, j + 1, k + 1, c])).collect::<Vec<_>>(),
            }),
            Geometry::SurfaceProduct { c1, c2 } => json!({"kind": "surface_product", "c1": c1, "c2": c2}),
            Geometry::SpaceFormProduct { c } => json!({"kind": "space_form_product", "c": c}),
            Geometry::ConstantCurvature { c } => json!({"kind": "constant_curvature", "c": c}),
            Geometry::RawCurvature { components, symmetry_closure } => json!({
                "kind": "raw_curvature",
                "components": components
                    .iter()
                    .map(|&([i, j, k, l], c)| json!([i + 1, j + 1, k + 1, l + 1, c]))
                    .collect::<Vec<_>>(),
                "symmetry_closure": symmetry_closure,
            }),
            Geometry::Gallery { name, params } => {
                let mut m = Map::new();
                m.insert("kind".into(), json!("gallery"));
                m.insert("name".into(), json!(name));
                for (k, x) in params {
                    m.insert(k.clone(), json!(x));
                }
                Value::Object(m)
            }
        };
        if let (Some(vol), Some(obj)) = (self.volume, v.as_object_mut()) {
            obj.insert("volume".into(), json!(vol));
        }
        v
    }

    pub fn realize<T: Real>(&self) -> Result<Realized<T>, SourceError> {
        let mut meta = None;
        let tensor = match &self.geometry {
            Geometry::LieGroup { brackets } => {
                let entries: Vec<_> = brackets.iter().map(|&(i, j, k, v)| (i, j, k, T::lit(v))).collect();
                lie_group_curvature(&LieAlgebra4::from_brackets(&entries)?)?.1
            }
            Geometry::SurfaceProduct { c1, c2 } => surface_product(T::lit(*c1), T::lit(*c2)),
            Geometry::SpaceFormProduct { c } => space_form_product(T::lit(*c)),
            Geometry::ConstantCurvature { c } => constant_curvature(T::lit(*c)),
            Geometry::RawCurvature { components, symmetry_closure } => {
                let raw = if *symmetry_closure {
                    orbit_fill(&components.iter().map(|&(ix, v)| (ix, T::lit(v))).collect::<Vec<_>>())
                } else {
                    let mut raw = zero_raw::<T>();
                    for &([i, j, k, l], v) in components {
                        raw[i][j][k][l] = T::lit(v);
                    }
                    raw
                };
                make_curvature(&raw)?
            }
            Geometry::Gallery { name, params } => {
                let p: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
                let entry = gallery::<T>(name, &p)?;
                meta = Some(entry.meta);
                entry.tensor
            }
        };
        let volume = self.volume.or_else(|| meta.as_ref().and_then(|m| m.volume));
        Ok(Realized { tensor, meta, volume })
    }
}
