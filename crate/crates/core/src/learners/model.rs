use serde::Deserialize;
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::geometry::{Hyperplane, Label};
use crate::learners::{Classifier, PolyThreshold, Polynomial};
use crate::synthdata::fmt_f64;

/// A trained classifier in serializable form.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Halfspace(Hyperplane),
    PolyThreshold(PolyThreshold),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Wire {
    Halfspace {
        d: usize,
        w: Vec<f64>,
    },
    PolyThreshold {
        d: usize,
        degree: usize,
        coeffs: Vec<f64>,
        theta: f64,
    },
}

fn fmt_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| fmt_f64(x)).collect();
    format!("[{}]", items.join(","))
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Halfspace(_) => "halfspace",
            Model::PolyThreshold(_) => "poly_threshold",
        }
    }

    pub fn as_hyperplane(&self) -> Option<&Hyperplane> {
        match self {
            Model::Halfspace(w) => Some(w),
            Model::PolyThreshold(_) => None,
        }
    }

    /// JSON with every float written to 17 significant digits.
    pub fn to_json(&self) -> String {
        match self {
            Model::Halfspace(w) => format!(
                "{{\"kind\":\"halfspace\",\"d\":{},\"w\":{}}}",
                w.dim(),
                fmt_list(w)
            ),
            Model::PolyThreshold(f) => format!(
                "{{\"kind\":\"poly_threshold\",\"d\":{},\"degree\":{},\"coeffs\":{},\"theta\":{}}}",
                f.p.dim(),
                f.p.degree(),
                fmt_list(f.p.coefficients()),
                fmt_f64(f.theta)
            ),
        }
    }

    pub fn to_raw_json(&self) -> Box<RawValue> {
        RawValue::from_string(self.to_json()).expect("model JSON is well formed")
    }

    pub fn from_json(s: &str) -> Result<Model> {
        let wire: Wire = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        match wire {
            Wire::Halfspace { d, w } => {
                if w.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: w.len() });
                }
                Ok(Model::Halfspace(Hyperplane::new(w)?))
            }
            Wire::PolyThreshold {
                d,
                degree,
                coeffs,
                theta,
            } => {
                let p = Polynomial::new(d, degree, coeffs)?;
                Ok(Model::PolyThreshold(PolyThreshold::new(p, theta)?))
            }
        }
    }
}

impl Classifier for Model {
    fn dim(&self) -> usize {
        match self {
            Model::Halfspace(w) => w.dim(),
            Model::PolyThreshold(f) => f.dim(),
        }
    }

    fn predict(&self, x: &[f64]) -> Label {
        match self {
            Model::Halfspace(w) => w.predict(x),
            Model::PolyThreshold(f) => f.predict(x),
        }
    }
}

impl From<Hyperplane> for Model {
    fn from(w: Hyperplane) -> Self {
        Model::Halfspace(w)
    }
}

impl From<PolyThreshold> for Model {
    fn from(f: PolyThreshold) -> Self {
        Model::PolyThreshold(f)
    }
}
