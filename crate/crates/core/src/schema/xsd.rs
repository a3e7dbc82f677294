//! Writes the grammar as a W3C XML Schema 1.0 document.
//!
//! Only the root tag is declared globally. Every other tag is declared
//! exactly once: inline when it is a member of an `xs:all` group (those tags
//! belong to a single parent), otherwise inside a named `xs:group` that the
//! content models reference. Each tag's type carries the tag's own name.

use std::collections::BTreeSet;
use std::io::{self, Write};

use super::{ContentModel, Occurs, Particle, Schema, TagRule, Term};

fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn occurs_attrs(occurs: Occurs) -> &'static str {
    match occurs {
        Occurs::Required => "",
        Occurs::Optional => r#" minOccurs="0""#,
        Occurs::ZeroOrMore => r#" minOccurs="0" maxOccurs="unbounded""#,
    }
}

/// Type reference for an element declaration of `rule`.
fn type_ref(rule: &TagRule) -> String {
    match &rule.content {
        ContentModel::TextOnly(None) => "xs:string".to_string(),
        _ => rule.tag_name.clone(),
    }
}

struct XsdWriter<'a, W> {
    out: &'a mut W,
    schema: &'a Schema,
    inline: BTreeSet<String>,
}

impl<W: Write> XsdWriter<'_, W> {
    fn line(&mut self, depth: usize, text: &str) -> io::Result<()> {
        writeln!(self.out, "{}{}", "  ".repeat(depth), text)
    }

    fn rule(&self, tag: &str) -> &TagRule {
        self.schema.rule(tag).expect("referenced tag has a rule")
    }

    fn particle(&mut self, depth: usize, p: &Particle) -> io::Result<()> {
        match &p.term {
            Term::Element(name) => {
                self.line(depth, &format!(r#"<xs:group ref="{name}"{}/>"#, occurs_attrs(p.occurs)))
            }
            Term::Choice(names) => {
                self.line(depth, &format!("<xs:choice{}>", occurs_attrs(p.occurs)))?;
                for name in names {
                    self.line(depth + 1, &format!(r#"<xs:group ref="{name}"/>"#))?;
                }
                self.line(depth, "</xs:choice>")
            }
        }
    }

    fn sequence(&mut self, depth: usize, particles: &[Particle]) -> io::Result<()> {
        self.line(depth, "<xs:sequence>")?;
        for p in particles {
            self.particle(depth + 1, p)?;
        }
        self.line(depth, "</xs:sequence>")
    }

    fn type_definition(&mut self, rule: &TagRule) -> io::Result<()> {
        let name = &rule.tag_name;
        match &rule.content {
            ContentModel::TextOnly(None) => Ok(()),
            ContentModel::TextOnly(Some(pattern)) => {
                self.line(1, &format!(r#"<xs:simpleType name="{name}">"#))?;
                self.line(2, r#"<xs:restriction base="xs:string">"#)?;
                self.line(3, &format!(r#"<xs:pattern value="{}"/>"#, escape_attr(pattern.as_str())))?;
                self.line(2, "</xs:restriction>")?;
                self.line(1, "</xs:simpleType>")
            }
            ContentModel::Sequence(ps) => {
                self.line(1, &format!(r#"<xs:complexType name="{name}">"#))?;
                self.sequence(2, ps)?;
                self.line(1, "</xs:complexType>")
            }
            ContentModel::Mixed(ps) => {
                self.line(1, &format!(r#"<xs:complexType name="{name}" mixed="true">"#))?;
                self.sequence(2, ps)?;
                self.line(1, "</xs:complexType>")
            }
            ContentModel::Choice(names) => {
                self.line(1, &format!(r#"<xs:complexType name="{name}">"#))?;
                self.line(2, r#"<xs:choice minOccurs="0" maxOccurs="unbounded">"#)?;
                for child in names {
                    self.line(3, &format!(r#"<xs:group ref="{child}"/>"#))?;
                }
                self.line(2, "</xs:choice>")?;
                self.line(1, "</xs:complexType>")
            }
            ContentModel::All(members) => {
                self.line(1, &format!(r#"<xs:complexType name="{name}">"#))?;
                self.line(2, "<xs:all>")?;
                for m in members {
                    let ty = type_ref(self.rule(&m.name));
                    let min = if m.required { "" } else { r#" minOccurs="0""# };
                    self.line(3, &format!(r#"<xs:element name="{}" type="{ty}"{min}/>"#, m.name))?;
                }
                self.line(2, "</xs:all>")?;
                self.line(1, "</xs:complexType>")
            }
        }
    }

    fn write(&mut self) -> io::Result<()> {
        let schema = self.schema;
        self.line(0, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
        self.line(0, r#"<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">"#)?;
        let root = self.rule(schema.root_tag());
        self.line(
            1,
            &format!(r#"<xs:element name="{}" type="{}"/>"#, root.tag_name, type_ref(root)),
        )?;
        for rule in schema.rules() {
            let name = &rule.tag_name;
            if name != schema.root_tag() && !self.inline.contains(name) {
                self.line(1, &format!(r#"<xs:group name="{name}">"#))?;
                self.line(2, "<xs:sequence>")?;
                self.line(3, &format!(r#"<xs:element name="{name}" type="{}"/>"#, type_ref(rule)))?;
                self.line(2, "</xs:sequence>")?;
                self.line(1, "</xs:group>")?;
            }
            self.type_definition(rule)?;
        }
        self.line(0, "</xs:schema>")
    }
}

/// Writes `schema` as an XSD document accepting the same attribute-free
/// documents the built-in validator accepts.
pub fn export_xsd<W: Write>(schema: &Schema, sink: &mut W) -> io::Result<()> {
    let inline = schema
        .rules()
        .iter()
        .filter_map(|r| match &r.content {
            ContentModel::All(ms) => Some(ms.iter().map(|m| m.name.clone()).collect::<Vec<_>>()),
            _ => None,
        })
        .flatten()
        .collect::<BTreeSet<_>>();
    for name in &inline {
        let parents = &schema.rule(name).expect("member rule").allowed_parents;
        assert_eq!(parents.len(), 1, "<{name}> is in an xs:all and must have a single parent");
    }
    let mut w = XsdWriter {
        out: sink,
        schema,
        inline,
    };
    w.write()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::builtin_schema;

    fn exported() -> String {
        let mut buf = Vec::new();
        export_xsd(&builtin_schema(), &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn out_type_is_an_unbounded_choice_of_write_and_writev() {
        let xsd = exported();
        let start = xsd.find(r#"<xs:complexType name="out">"#).expect("out type");
        let body = &xsd[start..start + xsd[start..].find("</xs:complexType>").unwrap()];
        assert!(body.contains(r#"<xs:choice minOccurs="0" maxOccurs="unbounded">"#));
        assert!(body.contains(r#"<xs:group ref="write"/>"#));
        assert!(body.contains(r#"<xs:group ref="writev"/>"#));
        assert!(xsd.contains(r#"<xs:element name="write" type="xs:string"/>"#));
        let wv = xsd.find(r#"<xs:simpleType name="writev">"#).unwrap();
        assert!(xsd[wv..].contains(r#"<xs:pattern value="\s*_*[A-Za-z][\w_]*\s*"/>"#));
    }

    #[test]
    fn one_element_declaration_per_rule() {
        let xsd = exported();
        let schema = builtin_schema();
        let declared: Vec<&str> = xsd
            .match_indices(r#"<xs:element name=""#)
            .map(|(i, m)| {
                let rest = &xsd[i + m.len()..];
                &rest[..rest.find('"').unwrap()]
            })
            .collect();
        assert_eq!(declared.len(), schema.rules().len());
        for rule in schema.rules() {
            assert_eq!(declared.iter().filter(|d| **d == rule.tag_name).count(), 1, "{}", rule.tag_name);
        }
    }

    #[test]
    fn patterns_are_attribute_escaped() {
        let xsd = exported();
        assert!(xsd.contains(r#"=\s*(&quot;[^&quot;]*&quot;"#));
        assert!(!xsd.contains(r#"value="\s*_*[A-Za-z][\w_]*\s*=\s*(""#));
    }
}
