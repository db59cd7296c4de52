use serde::{Deserialize, Serialize};

use super::{AnyElement, Element, ExactElement, FloatElement, Mode};
use crate::error::{Error, Result};
use crate::group::GroupDescriptor;
use crate::numeric::parse_rational;

/// Wire format of an element:
/// `{ "group": "F2", "mode": "exact", "terms": [ { "word": "ab", "coeff": "1/2" } ] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub group: GroupDescriptor,
    pub mode: Mode,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub word: String,
    /// `"p/q"` string in exact mode, a JSON number in float mode.
    pub coeff: serde_json::Value,
}

impl From<&ExactElement> for ElementJson {
    fn from(a: &ExactElement) -> Self {
        ElementJson {
            group: a.group().clone(),
            mode: Mode::Exact,
            terms: a
                .terms()
                .iter()
                .map(|(w, c)| TermJson { word: w.to_string(), coeff: serde_json::Value::String(c.to_string()) })
                .collect(),
        }
    }
}

impl From<&FloatElement> for ElementJson {
    fn from(a: &FloatElement) -> Self {
        ElementJson {
            group: a.group().clone(),
            mode: Mode::Float,
            terms: a.terms().iter().map(|(w, c)| TermJson { word: w.to_string(), coeff: serde_json::json!(c) }).collect(),
        }
    }
}

impl From<&AnyElement> for ElementJson {
    fn from(a: &AnyElement) -> Self {
        match a {
            AnyElement::Exact(x) => x.into(),
            AnyElement::Float(x) => x.into(),
        }
    }
}

impl TryFrom<&ElementJson> for AnyElement {
    type Error = Error;

    fn try_from(j: &ElementJson) -> Result<Self> {
        let words = j
            .terms
            .iter()
            .map(|t| j.group.parse_word(&t.word))
            .collect::<Result<Vec<_>>>()?;
        match j.mode {
            Mode::Exact => {
                let coeffs = j
                    .terms
                    .iter()
                    .map(|t| match &t.coeff {
                        serde_json::Value::String(s) => {
                            parse_rational(s).ok_or_else(|| Error::parse(0, format!("bad rational `{s}`")))
                        }
                        other => Err(Error::parse(0, format!("exact coefficient must be a \"p/q\" string, got {other}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnyElement::Exact(Element::from_terms(j.group.clone(), words.into_iter().zip(coeffs))?))
            }
            Mode::Float => {
                let coeffs = j
                    .terms
                    .iter()
                    .map(|t| t.coeff.as_f64().ok_or_else(|| Error::parse(0, "float coefficient must be a number")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnyElement::Float(Element::from_terms(j.group.clone(), words.into_iter().zip(coeffs))?))
            }
        }
    }
}

impl AnyElement {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ElementJson::from(self)).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: ElementJson = serde_json::from_str(s)?;
        AnyElement::try_from(&j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_element;

    #[test]
    fn exact_round_trip_is_bit_exact() {
        let g: GroupDescriptor = "F2xZ".parse().unwrap();
        let a = AnyElement::Exact(parse_element(&g, "(1/3)(a|(2)) - 5(e|(0)) + (7/9)(bA | (-1))").unwrap());
        let text = a.to_json_string();
        let back = AnyElement::from_json_str(&text).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.to_json_string(), text);
    }

    #[test]
    fn float_mode_and_schema_errors() {
        let s = r#"{"group":"F2","mode":"float","terms":[{"word":"a","coeff":0.25},{"word":"B","coeff":-1.5}]}"#;
        let a = AnyElement::from_json_str(s).unwrap();
        assert_eq!(a.mode(), Mode::Float);
        let bad = r#"{"group":"F2","mode":"exact","terms":[{"word":"a","coeff":0.25}]}"#;
        assert!(AnyElement::from_json_str(bad).is_err());
        let bad_word = r#"{"group":"F2","mode":"exact","terms":[{"word":"c","coeff":"1"}]}"#;
        assert!(AnyElement::from_json_str(bad_word).is_err());
    }
}
