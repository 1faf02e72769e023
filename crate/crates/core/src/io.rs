//! JSON file formats for instances (with an optional point), combs and
//! certificates. Vertices are referred to by label, edges as `"a-e"`, and
//! rationals as `"p/q"` or integer strings.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::certificate::{Builder, Certificate, CertificateMember, Member};
use crate::comb::{Comb, Orientation};
use crate::error::{Error, Result};
use crate::graph::{format_rational, parse_rational, BipartiteInstance, Edge, FractionalPoint, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub class1: Vec<String>,
    pub class2: Vec<String>,
    /// Omitted means the complete bipartite graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<String>>,
    #[serde(default)]
    pub weights: BTreeMap<String, String>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn build(&self) -> Result<(BipartiteInstance, FractionalPoint)> {
        let edges = match &self.edges {
            None => None,
            Some(list) => {
                let bare = BipartiteInstance::with_labels(self.class1.clone(), self.class2.clone(), None)?;
                let mut out = Vec::with_capacity(list.len());
                for (k, s) in list.iter().enumerate() {
                    let e = bare.parse_edge(s).map_err(|e| Error::field(format!("edges[{k}]"), e.to_string()))?;
                    out.push(e);
                }
                Some(out)
            }
        };
        let instance = BipartiteInstance::with_labels(self.class1.clone(), self.class2.clone(), edges)?;
        let mut seen = BTreeSet::new();
        let mut weights = Vec::with_capacity(self.weights.len());
        for (key, value) in &self.weights {
            let field = format!("weights[\"{key}\"]");
            let e = instance.parse_edge(key).map_err(|e| Error::field(&field, e.to_string()))?;
            if !seen.insert(e) {
                return Err(Error::field(field, "edge listed twice"));
            }
            let w = parse_rational(value)
                .ok_or_else(|| Error::field(&field, format!("invalid rational \"{value}\"")))?;
            weights.push((e, w));
        }
        let point = FractionalPoint::from_weights(&instance, weights)?;
        Ok((instance, point))
    }

    pub fn from_parts(instance: &BipartiteInstance, point: &FractionalPoint) -> Self {
        use crate::graph::Class;
        InstanceFile {
            class1: instance.labels(Class::Class1).to_vec(),
            class2: instance.labels(Class::Class2).to_vec(),
            edges: (!instance.is_complete())
                .then(|| instance.edges().iter().map(|e| instance.edge_label(*e)).collect()),
            weights: point.iter().map(|(e, w)| (instance.edge_label(*e), format_rational(w))).collect(),
        }
    }
}

pub fn load_instance(text: &str) -> Result<(BipartiteInstance, FractionalPoint)> {
    InstanceFile::parse(text)?.build()
}

fn labels_to_set(instance: &BipartiteInstance, labels: &[String], field: &str) -> Result<VertexSet> {
    let mut set = VertexSet::new();
    for (k, l) in labels.iter().enumerate() {
        let v = instance.vertex(l).map_err(|e| Error::field(format!("{field}[{k}]"), e.to_string()))?;
        if !set.insert(v) {
            return Err(Error::field(format!("{field}[{k}]"), format!("vertex `{l}` listed twice")));
        }
    }
    Ok(set)
}

fn set_to_labels(instance: &BipartiteInstance, set: &VertexSet) -> Vec<String> {
    set.iter().map(|v| instance.label(*v).to_string()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombFile {
    pub hand: Vec<String>,
    pub teeth: Vec<Vec<String>>,
}

impl CombFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Resolves labels; structural validity is checked separately.
    pub fn build(&self, instance: &BipartiteInstance) -> Result<Comb> {
        let hand = labels_to_set(instance, &self.hand, "hand")?;
        let teeth = self
            .teeth
            .iter()
            .enumerate()
            .map(|(i, t)| labels_to_set(instance, t, &format!("teeth[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Comb::new(hand, teeth))
    }

    pub fn from_comb(instance: &BipartiteInstance, comb: &Comb) -> Self {
        CombFile {
            hand: set_to_labels(instance, &comb.hand),
            teeth: comb.teeth.iter().map(|t| set_to_labels(instance, t)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MemberFile {
    Degree {
        vertex: String,
        support: Vec<String>,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        note: String,
    },
    Sec {
        set: Vec<String>,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        note: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub builder: Builder,
    #[serde(default = "as_given")]
    pub orientation: Orientation,
    pub members: Vec<MemberFile>,
    pub target_comb: CombFile,
}

fn as_given() -> Orientation {
    Orientation::AsGiven
}

impl CertificateFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_certificate(instance: &BipartiteInstance, cert: &Certificate) -> Self {
        let members = cert
            .members
            .iter()
            .map(|m| match &m.member {
                Member::Degree { vertex, support } => MemberFile::Degree {
                    vertex: instance.label(*vertex).to_string(),
                    support: support.iter().map(|e| instance.edge_label(*e)).collect(),
                    note: m.note.clone(),
                },
                Member::Sec { set } => {
                    MemberFile::Sec { set: set_to_labels(instance, set), note: m.note.clone() }
                }
            })
            .collect();
        CertificateFile {
            builder: cert.builder,
            orientation: cert.orientation,
            members,
            target_comb: CombFile::from_comb(instance, &cert.comb),
        }
    }

    pub fn build(&self, instance: &BipartiteInstance) -> Result<Certificate> {
        let comb = self.target_comb.build(instance)?;
        let mut members = Vec::with_capacity(self.members.len());
        for (k, m) in self.members.iter().enumerate() {
            let field = format!("members[{k}]");
            let (member, note) = match m {
                MemberFile::Degree { vertex, support, note } => {
                    let v = instance
                        .vertex(vertex)
                        .map_err(|e| Error::field(format!("{field}.vertex"), e.to_string()))?;
                    let support = support
                        .iter()
                        .enumerate()
                        .map(|(j, s)| {
                            instance
                                .parse_edge(s)
                                .map_err(|e| Error::field(format!("{field}.support[{j}]"), e.to_string()))
                        })
                        .collect::<Result<Vec<Edge>>>()?;
                    (Member::Degree { vertex: v, support }, note.clone())
                }
                MemberFile::Sec { set, note } => {
                    (Member::Sec { set: labels_to_set(instance, set, &format!("{field}.set"))? }, note.clone())
                }
            };
            members.push(CertificateMember { member, note });
        }
        Ok(Certificate { builder: self.builder, orientation: self.orientation, comb, members })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn malformed_weight_names_the_field() {
        let text = r#"{"class1":["a"],"class2":["b"],"weights":{"a-b":"x"}}"#;
        let err = load_instance(text).unwrap_err().to_string();
        assert!(err.contains("weights[\"a-b\"]"), "{err}");

        let text = r#"{"class1":["a"],"class2":["b"],"weights":{"a-z":"1"}}"#;
        let err = load_instance(text).unwrap_err().to_string();
        assert!(err.contains("weights[\"a-z\"]"), "{err}");

        let text = r#"{"class1":["a"],"class2":["b"],"weights":{"a-b":"1","b-a":"1"}}"#;
        assert!(load_instance(text).unwrap_err().to_string().contains("twice"));

        let text = r#"{"class1":["a"],"klass2":["b"]}"#;
        assert!(load_instance(text).is_err());
    }

    #[test]
    fn explicit_edge_list() {
        let text = r#"{"class1":["a","b"],"class2":["c","d"],"edges":["a-c","d-b"],"weights":{"b-d":"1/3"}}"#;
        let (inst, p) = load_instance(text).unwrap();
        assert!(!inst.is_complete());
        assert_eq!(inst.edges().len(), 2);
        assert_eq!(p.support_len(), 1);
        let again = InstanceFile::from_parts(&inst, &p);
        assert_eq!(again.edges.as_deref(), Some(&["a-c".to_string(), "b-d".to_string()][..]));
        let err = load_instance(r#"{"class1":["a","b"],"class2":["c"],"edges":["a-c"],"weights":{"b-c":"1"}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("weights[\"b-c\"]"), "{err}");
    }

    #[test]
    fn comb_errors_name_the_field() {
        let (inst, _) = load_instance(r#"{"class1":["a","b"],"class2":["c","d"]}"#).unwrap();
        let err = CombFile { hand: vec!["a".into()], teeth: vec![vec!["a".into(), "q".into()]] }
            .build(&inst)
            .unwrap_err()
            .to_string();
        assert!(err.contains("teeth[0][1]"), "{err}");
    }
}
