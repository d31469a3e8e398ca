//! JSON structure documents.
//!
//! Elements carry explicit labels in files and become indices `0..n` at
//! parse time, following the order of `labels`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::multiposets::{validate_multiposet, Multiposet, Template};
use crate::structures::{lattice_from_poset, FiniteLattice, FinitePoset, LinearlyOrderedPoset, Structure};

/// An element label: a string, an integer, or a set written as a sorted
/// integer array (the elements of `Π_n`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Str(String),
    Set(Vec<i64>),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Str(s) => f.write_str(s),
            Label::Set(v) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Label>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leq: Option<Vec<Vec<bool>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meet: Option<Vec<Vec<Label>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub join: Option<Vec<Vec<Label>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<Label>>,
    /// One leq matrix per template element.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<Vec<Vec<Vec<bool>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<Box<StructureDoc>>,
}

/// A parsed document: the structure, its labels and, for multiposets, the
/// template it was checked against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub structure: Structure,
    pub labels: Vec<Label>,
    pub template: Option<Template>,
}

/// Labels for `Π_n`: element `i` is the subset with mask `i`.
pub fn pi_labels(n: usize) -> Vec<Label> {
    (0..1u64 << n)
        .map(|m| {
            Label::Set(
                crate::powerset_pi::elements_of(m)
                    .into_iter()
                    .map(|e| e as i64)
                    .collect(),
            )
        })
        .collect()
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn default_labels(n: usize) -> Vec<Label> {
    (0..n as i64).map(Label::Int).collect()
}

fn index_labels(labels: &[Label]) -> Result<HashMap<&Label, usize>> {
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l, i).is_some() {
            return Err(format_err(format!("duplicate label {l}")));
        }
    }
    Ok(index)
}

fn lookup(index: &HashMap<&Label, usize>, l: &Label) -> Result<usize> {
    index
        .get(l)
        .copied()
        .ok_or_else(|| format_err(format!("unknown label {l}")))
}

fn square(m: &[Vec<bool>], n: usize, what: &str) -> Result<()> {
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid(Violation::Shape {
            detail: format!("{what} must be a {n}x{n} matrix"),
        }));
    }
    Ok(())
}

impl StructureDoc {
    fn size(&self) -> Result<usize> {
        if let Some(l) = &self.labels {
            return Ok(l.len());
        }
        let n = self
            .leq
            .as_ref()
            .map(Vec::len)
            .or_else(|| self.meet.as_ref().map(Vec::len))
            .or_else(|| self.relations.as_ref().and_then(|r| r.first()).map(Vec::len))
            .or_else(|| self.order.as_ref().map(Vec::len));
        n.ok_or_else(|| format_err("cannot determine the number of elements"))
    }

    fn order_indices(&self, index: &HashMap<&Label, usize>) -> Result<Option<Vec<usize>>> {
        self.order
            .as_ref()
            .map(|o| o.iter().map(|l| lookup(index, l)).collect())
            .transpose()
    }

    fn poset(&self, n: usize) -> Result<FinitePoset> {
        let leq = self
            .leq
            .as_ref()
            .ok_or_else(|| format_err(format!("{} needs \"leq\"", self.kind)))?;
        square(leq, n, "leq")?;
        Ok(FinitePoset::from_matrix(leq)?)
    }

    /// Builds and validates the structure.
    pub fn to_document(&self) -> Result<Document> {
        self.to_document_with(None)
    }

    /// As [`Self::to_document`]; a multiposet without an inline template is
    /// checked against `template`.
    pub fn to_document_with(&self, template: Option<&Template>) -> Result<Document> {
        let n = self.size()?;
        let labels = self.labels.clone().unwrap_or_else(|| default_labels(n));
        let index = index_labels(&labels)?;
        let order = self.order_indices(&index)?;
        let (structure, template) = match self.kind.as_str() {
            "poset" => (Structure::Poset(self.poset(n)?), None),
            "ordered_poset" => {
                let p = self.poset(n)?;
                let order = order.ok_or_else(|| format_err("ordered_poset needs \"order\""))?;
                (Structure::OrderedPoset(LinearlyOrderedPoset::new(p, order)?), None)
            }
            "lattice" => {
                let l = match (&self.meet, &self.join) {
                    (Some(meet), Some(join)) => {
                        let table = |t: &Vec<Vec<Label>>, what: &str| -> Result<Vec<Vec<usize>>> {
                            if t.len() != n || t.iter().any(|r| r.len() != n) {
                                return Err(Error::Invalid(Violation::Shape {
                                    detail: format!("{what} must be a {n}x{n} table"),
                                }));
                            }
                            t.iter()
                                .map(|r| r.iter().map(|l| lookup(&index, l)).collect())
                                .collect()
                        };
                        FiniteLattice::new(table(meet, "meet")?, table(join, "join")?)?
                    }
                    (None, None) => lattice_from_poset(&self.poset(n)?)?,
                    _ => return Err(format_err("lattice needs both \"meet\" and \"join\", or \"leq\"")),
                };
                (Structure::Lattice(l), None)
            }
            "multiposet" => {
                let rels = self
                    .relations
                    .as_ref()
                    .ok_or_else(|| format_err("multiposet needs \"relations\""))?;
                let mut relations = Vec::with_capacity(rels.len());
                for (i, m) in rels.iter().enumerate() {
                    square(m, n, &format!("relation {}", i + 1))?;
                    relations.push(FinitePoset::from_matrix(m)?);
                }
                let m = Multiposet::new(relations, order)?;
                let template = match (&self.template, template) {
                    (Some(t), _) => parse_template_doc(t)?,
                    (None, Some(t)) => t.clone(),
                    (None, None) if m.relation_count() == 1 => Template::trivial(),
                    (None, None) => return Err(format_err("multiposet with several relations needs \"template\"")),
                };
                validate_multiposet(&m, &template)?;
                (Structure::Multiposet(m), Some(template))
            }
            other => return Err(format_err(format!("unknown kind {other:?}"))),
        };
        Ok(Document {
            structure,
            labels,
            template,
        })
    }
}

fn parse_template_doc(doc: &StructureDoc) -> Result<Template> {
    match doc.to_document()?.structure {
        Structure::Poset(p) => Template::new(p),
        other => Err(format_err(format!(
            "a template must be a poset, found {}",
            other.kind()
        ))),
    }
}

pub fn parse_doc(text: &str) -> Result<StructureDoc> {
    serde_json::from_str(text).map_err(|e| format_err(format!("malformed structure JSON: {e}")))
}

pub fn parse_structure(text: &str) -> Result<Document> {
    parse_doc(text)?.to_document()
}

/// A template file: a poset document.
pub fn parse_template(text: &str) -> Result<Template> {
    parse_template_doc(&parse_doc(text)?)
}

fn labels_or_default(labels: Option<&[Label]>, n: usize) -> Vec<Label> {
    match labels {
        Some(l) if l.len() == n => l.to_vec(),
        _ => default_labels(n),
    }
}

/// Serializes `s`; `labels` are used when they have the right length.
pub fn structure_doc(s: &Structure, labels: Option<&[Label]>, template: Option<&Template>) -> StructureDoc {
    let labels = labels_or_default(labels, s.len());
    let order_labels = |o: &[usize]| o.iter().map(|&i| labels[i].clone()).collect::<Vec<_>>();
    let mut doc = StructureDoc {
        kind: s.kind().to_string(),
        labels: Some(labels.clone()),
        ..Default::default()
    };
    match s {
        Structure::Poset(p) => doc.leq = Some(p.to_matrix()),
        Structure::OrderedPoset(p) => {
            doc.leq = Some(p.poset().to_matrix());
            doc.order = Some(order_labels(p.order()));
        }
        Structure::Lattice(l) => {
            let table = |t: Vec<Vec<usize>>| {
                t.into_iter()
                    .map(|r| r.into_iter().map(|i| labels[i].clone()).collect())
                    .collect()
            };
            doc.meet = Some(table(l.meet_table()));
            doc.join = Some(table(l.join_table()));
        }
        Structure::Multiposet(m) => {
            doc.relations = Some(m.relations().iter().map(FinitePoset::to_matrix).collect());
            doc.order = m.order().map(order_labels);
            doc.template = template.map(|t| Box::new(structure_doc(&Structure::Poset(t.poset().clone()), None, None)));
        }
    }
    doc
}

pub fn to_json(s: &Structure, labels: Option<&[Label]>) -> String {
    serde_json::to_string_pretty(&structure_doc(s, labels, None)).expect("serializable")
}
