//! JSON documents consumed and produced by the CLI.
//!
//! Two input schemas: unit-cell templates and weighted quotient graphs. A
//! WQG converts losslessly to a template (vertex cells plus edge cells), so
//! every command that needs a template accepts either.

use crate::periodic::{BoundaryEntry, PeriodicTemplate, TemplateCell, TemplateError};
use crate::wqg::{WeightedQuotientGraph, WqgError};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("input is neither a template (`cells`) nor a WQG (`vertices`/`edges`) document")]
    UnknownKind,
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Wqg(#[from] WqgError),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryDocument {
    pub face: String,
    pub coeff: i64,
    pub shift: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellDocument {
    pub id: String,
    pub dim: usize,
    #[serde(default)]
    pub boundary: Vec<BoundaryDocument>,
}

/// `{"d": int, "cells": [{"id", "dim", "boundary": [{"face", "coeff", "shift"}]}]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TemplateDocument {
    pub d: usize,
    pub cells: Vec<CellDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub weight: Vec<i64>,
}

/// `{"d": int, "vertices": [string], "edges": [{"id", "tail", "head", "weight"}]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WqgDocument {
    pub d: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDocument>,
}

pub enum InputDocument {
    Template(TemplateDocument),
    Wqg(WqgDocument),
}

/// Parses either input schema, deciding by the top-level keys.
pub fn parse_input(text: &str) -> Result<InputDocument, FormatError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))?;
    let obj = value.as_object().ok_or(FormatError::UnknownKind)?;
    if obj.contains_key("cells") {
        let doc: TemplateDocument =
            serde_json::from_value(value).map_err(|e| FormatError::Parse(e.to_string()))?;
        Ok(InputDocument::Template(doc))
    } else if obj.contains_key("vertices") || obj.contains_key("edges") {
        let doc: WqgDocument =
            serde_json::from_value(value).map_err(|e| FormatError::Parse(e.to_string()))?;
        Ok(InputDocument::Wqg(doc))
    } else {
        Err(FormatError::UnknownKind)
    }
}

impl TemplateDocument {
    pub fn to_template(&self) -> Result<PeriodicTemplate, TemplateError> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, c) in self.cells.iter().enumerate() {
            if index.insert(c.id.as_str(), i).is_some() {
                return Err(TemplateError::DuplicateId(c.id.clone()));
            }
        }
        let cells = self
            .cells
            .iter()
            .map(|c| {
                let boundary = c
                    .boundary
                    .iter()
                    .map(|b| {
                        let face = *index.get(b.face.as_str()).ok_or_else(|| {
                            TemplateError::DanglingFace { cell: c.id.clone(), face: b.face.clone() }
                        })?;
                        Ok(BoundaryEntry { face, coeff: b.coeff, shift: b.shift.clone() })
                    })
                    .collect::<Result<Vec<_>, TemplateError>>()?;
                Ok(TemplateCell { id: c.id.clone(), dim: c.dim, boundary })
            })
            .collect::<Result<Vec<_>, TemplateError>>()?;
        PeriodicTemplate::new(self.d, cells)
    }
}

impl WqgDocument {
    pub fn to_graph(&self) -> Result<WeightedQuotientGraph, WqgError> {
        WeightedQuotientGraph::new(
            self.d,
            self.vertices.clone(),
            self.edges
                .iter()
                .map(|e| (e.id.clone(), e.tail.clone(), e.head.clone(), e.weight.clone()))
                .collect(),
        )
    }
}

/// The template equivalent of a WQG document, for round-trip checks.
pub fn wqg_to_template_document(doc: &WqgDocument) -> Result<TemplateDocument, WqgError> {
    let graph = doc.to_graph()?;
    let (template, _, _) = graph.to_template();
    Ok(template_to_document(&template))
}

pub fn template_to_document(t: &PeriodicTemplate) -> TemplateDocument {
    TemplateDocument {
        d: t.d,
        cells: t
            .cells
            .iter()
            .map(|c| CellDocument {
                id: c.id.clone(),
                dim: c.dim,
                boundary: c
                    .boundary
                    .iter()
                    .map(|b| BoundaryDocument {
                        face: t.cells[b.face].id.clone(),
                        coeff: b.coeff,
                        shift: b.shift.clone(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_wqg_document() {
        let text = r#"{
            "d": 2,
            "vertices": ["v1", "v2"],
            "edges": [{"id": "e", "tail": "v1", "head": "v2", "weight": [0, 1]}]
        }"#;
        let InputDocument::Wqg(doc) = parse_input(text).unwrap() else {
            panic!("expected WQG");
        };
        let g = doc.to_graph().unwrap();
        assert_eq!(g.d, 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn parse_template_document() {
        let text = r#"{
            "d": 1,
            "cells": [
                {"id": "v", "dim": 0, "boundary": []},
                {"id": "e", "dim": 1, "boundary": [
                    {"face": "v", "coeff": 1, "shift": [1]},
                    {"face": "v", "coeff": -1, "shift": [0]}
                ]}
            ]
        }"#;
        let InputDocument::Template(doc) = parse_input(text).unwrap() else {
            panic!("expected template");
        };
        let t = doc.to_template().unwrap();
        assert!(t.validate().is_ok());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_input("not json"), Err(FormatError::Parse(_))));
        assert!(matches!(parse_input(r#"{"x": 1}"#), Err(FormatError::UnknownKind)));
        let dangling = r#"{
            "d": 1,
            "cells": [{"id": "e", "dim": 1, "boundary": [{"face": "w", "coeff": 1, "shift": [0]}]}]
        }"#;
        let InputDocument::Template(doc) = parse_input(dangling).unwrap() else {
            panic!();
        };
        assert!(matches!(doc.to_template(), Err(TemplateError::DanglingFace { .. })));
    }

    #[test]
    fn wqg_template_document_roundtrip_shape() {
        let text = r#"{
            "d": 1,
            "vertices": ["v"],
            "edges": [{"id": "l", "tail": "v", "head": "v", "weight": [1]}]
        }"#;
        let InputDocument::Wqg(doc) = parse_input(text).unwrap() else {
            panic!();
        };
        let tdoc = wqg_to_template_document(&doc).unwrap();
        assert_eq!(tdoc.cells.len(), 2);
        let t = tdoc.to_template().unwrap();
        assert!(t.validate().is_ok());
    }
}
