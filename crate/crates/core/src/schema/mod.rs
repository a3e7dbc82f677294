//! The tag grammar: which tags exist, where they may appear, in which order
//! and how often, and what their text must look like.

mod pattern;
mod validate;
mod xsd;

use std::collections::{BTreeSet, HashMap};

pub use pattern::{check_content_pattern, Pattern, PatternError};
pub use validate::{validate_stream, ValidationCode, ValidationDiagnostic, Validator};
pub use xsd::export_xsd;

/// The identifier facet applied to every variable position.
pub const IDENTIFIER_PATTERN: &str = r"\s*_*[A-Za-z][\w_]*\s*";

const VAR_PATTERN: &str =
    r#"\s*_*[A-Za-z][\w_]*\s*=\s*("[^"]*"|[+\-]?[0-9]+(\.[0-9]+)?)\s*"#;
const ARRAY_PATTERN: &str = r"\s*(integer|real|string)\s+_*[A-Za-z][\w_]*\s*\[\s*[0-9]+\s*\]\s*";
const TOKEN_PATTERN: &str = r"\s*\S+\s*";
const QUERY_PATTERN: &str = r#"\s*_*[A-Za-z][\w_]*\s*=\s*"[^"]*"\s*"#;
const SET_PATTERN: &str =
    r"\s*[A-Za-z]+\s*\(\s*[0-9]+\s*,.+\)\s*|\s*_*[A-Za-z][\w_]*\s*=.*";
const GET_PATTERN: &str = r"\s*_*[A-Za-z][\w_]*\s*=\s*[A-Za-z]+\s*\(\s*[0-9]+\s*\)\s*";
const ASSIGN_PATTERN: &str = r"\s*_*[A-Za-z][\w_]*\s*=.*";
const OBJECT_PATTERN: &str =
    r"\s*([Rr][Ee][Qq][Uu][Ee][Ss][Tt]|[Ss][Ee][Ss][Ss][Ii][Oo][Nn])\s*";
const SOURCE_KIND_PATTERN: &str =
    r"\s*([Pp][Aa][Rr][Aa][Mm][Ee][Tt][Ee][Rr]|[Aa][Tt][Tt][Rr][Ii][Bb][Uu][Tt][Ee])\s*";

/// Tags allowed directly in the document body.
pub const BODY_TAGS: &[&str] = &[
    "var", "array", "read", "out", "write", "writev", "dB", "ps", "s", "function", "redirect",
    "class", "include", "forward", "session",
];

/// Tags allowed in a function body: the body tags minus nested functions,
/// the JSP actions, and the tags that need the page's implicit request,
/// response or session objects, none of which a declared method can see.
pub const FUNCTION_BODY_TAGS: &[&str] = &[
    "var", "array", "out", "write", "writev", "dB", "ps", "s", "class",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Occurs {
    Required,
    Optional,
    ZeroOrMore,
}

impl Occurs {
    pub fn min(self) -> usize {
        usize::from(self == Occurs::Required)
    }

    pub fn allows_more(self, count: usize) -> bool {
        self == Occurs::ZeroOrMore || count == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Element(String),
    Choice(Vec<String>),
}

impl Term {
    pub fn matches(&self, name: &str) -> bool {
        match self {
            Term::Element(n) => n == name,
            Term::Choice(ns) => ns.iter().any(|n| n == name),
        }
    }

    pub fn names(&self) -> Vec<&str> {
        match self {
            Term::Element(n) => vec![n.as_str()],
            Term::Choice(ns) => ns.iter().map(String::as_str).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub term: Term,
    pub occurs: Occurs,
}

impl Particle {
    fn one(name: &str) -> Self {
        Self {
            term: Term::Element(name.into()),
            occurs: Occurs::Required,
        }
    }

    fn opt(name: &str) -> Self {
        Self {
            term: Term::Element(name.into()),
            occurs: Occurs::Optional,
        }
    }

    fn many(name: &str) -> Self {
        Self {
            term: Term::Element(name.into()),
            occurs: Occurs::ZeroOrMore,
        }
    }

    fn any_of(names: &[&str]) -> Self {
        Self {
            term: Term::Choice(names.iter().map(|s| s.to_string()).collect()),
            occurs: Occurs::ZeroOrMore,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllMember {
    pub name: String,
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContentModel {
    /// Text only; `None` accepts any string.
    TextOnly(Option<Pattern>),
    /// Ordered particles, whitespace-only text between them.
    Sequence(Vec<Particle>),
    /// Any number of the listed children, in any order.
    Choice(Vec<String>),
    /// Each member at most once, in any order.
    All(Vec<AllMember>),
    /// Ordered particles with unconstrained text anywhere between them.
    Mixed(Vec<Particle>),
}

impl ContentModel {
    /// Every child tag name mentioned by the model.
    pub fn child_names(&self) -> Vec<&str> {
        match self {
            ContentModel::TextOnly(_) => vec![],
            ContentModel::Sequence(ps) | ContentModel::Mixed(ps) => {
                ps.iter().flat_map(|p| p.term.names()).collect()
            }
            ContentModel::Choice(ns) => ns.iter().map(String::as_str).collect(),
            ContentModel::All(ms) => ms.iter().map(|m| m.name.as_str()).collect(),
        }
    }

    pub fn allows_text(&self) -> bool {
        matches!(self, ContentModel::TextOnly(_) | ContentModel::Mixed(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TagRule {
    pub tag_name: String,
    pub allowed_parents: BTreeSet<String>,
    pub content: ContentModel,
}

#[derive(Debug, Clone)]
pub struct Schema {
    rules: Vec<TagRule>,
    index: HashMap<String, usize>,
    root_tag: String,
    identifier_pattern: Pattern,
}

impl Schema {
    /// Builds a schema from `(tag, content)` pairs; parent sets are derived
    /// from the content models. Panics if a referenced child has no rule or
    /// a tag is defined twice, since both indicate a broken grammar table.
    pub fn from_rules(root_tag: &str, rules: Vec<(&str, ContentModel)>) -> Self {
        let mut out: Vec<TagRule> = Vec::with_capacity(rules.len());
        let mut index = HashMap::new();
        for (name, content) in rules {
            let previous = index.insert(name.to_string(), out.len());
            assert!(previous.is_none(), "tag <{name}> defined twice");
            out.push(TagRule {
                tag_name: name.to_string(),
                allowed_parents: BTreeSet::new(),
                content,
            });
        }
        let edges: Vec<(String, String)> = out
            .iter()
            .flat_map(|r| {
                r.content
                    .child_names()
                    .into_iter()
                    .map(|c| (c.to_string(), r.tag_name.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        for (child, parent) in edges {
            let i = *index
                .get(&child)
                .unwrap_or_else(|| panic!("<{parent}> refers to undefined tag <{child}>"));
            out[i].allowed_parents.insert(parent);
        }
        assert!(index.contains_key(root_tag), "root tag has no rule");
        Self {
            rules: out,
            index,
            root_tag: root_tag.to_string(),
            identifier_pattern: Pattern::new(IDENTIFIER_PATTERN).expect("identifier pattern"),
        }
    }

    pub fn rule(&self, tag: &str) -> Option<&TagRule> {
        self.index.get(tag).map(|&i| &self.rules[i])
    }

    /// Rules in definition order.
    pub fn rules(&self) -> &[TagRule] {
        &self.rules
    }

    pub fn root_tag(&self) -> &str {
        &self.root_tag
    }

    pub fn identifier_pattern(&self) -> &Pattern {
        &self.identifier_pattern
    }
}

fn text(pattern: &str) -> ContentModel {
    ContentModel::TextOnly(Some(Pattern::new(pattern).expect("built-in pattern")))
}

fn any_text() -> ContentModel {
    ContentModel::TextOnly(None)
}

/// The compiled-in grammar of the tag dialect.
pub fn builtin_schema() -> Schema {
    use ContentModel::*;
    let rules = vec![
        (
            "root",
            Sequence(vec![Particle::opt("declare"), Particle::any_of(BODY_TAGS)]),
        ),
        ("declare", Choice(vec!["var".into(), "array".into()])),
        ("var", text(VAR_PATTERN)),
        ("array", text(ARRAY_PATTERN)),
        (
            "read",
            Mixed(vec![
                Particle::one("object"),
                Particle::one("type"),
                Particle::one("name"),
            ]),
        ),
        ("object", text(OBJECT_PATTERN)),
        ("type", text(SOURCE_KIND_PATTERN)),
        ("name", text(TOKEN_PATTERN)),
        ("out", Choice(vec!["write".into(), "writev".into()])),
        ("write", any_text()),
        ("writev", text(IDENTIFIER_PATTERN)),
        (
            "dB",
            All(["driver", "url", "uid", "pwd", "conn_name", "excep_msg"]
                .iter()
                .map(|n| AllMember {
                    name: n.to_string(),
                    required: *n != "excep_msg",
                })
                .collect()),
        ),
        ("driver", any_text()),
        ("url", any_text()),
        ("uid", any_text()),
        ("pwd", any_text()),
        ("conn_name", text(IDENTIFIER_PATTERN)),
        ("excep_msg", any_text()),
        (
            "ps",
            Sequence(vec![
                Particle::many("var"),
                Particle::one("query"),
                Particle::any_of(&["read", "set"]),
                Particle::opt("result"),
                Particle::many("get"),
            ]),
        ),
        ("query", text(QUERY_PATTERN)),
        ("set", text(SET_PATTERN)),
        ("result", text(IDENTIFIER_PATTERN)),
        ("get", text(GET_PATTERN)),
        ("s", any_text()),
        (
            "function",
            Sequence(vec![Particle::one("header"), Particle::any_of(FUNCTION_BODY_TAGS)]),
        ),
        ("header", any_text()),
        ("redirect", text(TOKEN_PATTERN)),
        ("class", Mixed(vec![Particle::many("pname")])),
        ("pname", text(ASSIGN_PATTERN)),
        ("include", text(TOKEN_PATTERN)),
        ("forward", Mixed(vec![Particle::many("pname")])),
        ("session", Sequence(vec![Particle::many("set")])),
    ];
    Schema::from_rules("root", rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_is_unbounded_choice_of_write_and_writev() {
        let s = builtin_schema();
        assert_eq!(
            s.rule("out").unwrap().content,
            ContentModel::Choice(vec!["write".into(), "writev".into()])
        );
    }

    #[test]
    fn writev_uses_identifier_facet() {
        let s = builtin_schema();
        match &s.rule("writev").unwrap().content {
            ContentModel::TextOnly(Some(p)) => assert_eq!(p.as_str(), r"\s*_*[A-Za-z][\w_]*\s*"),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(s.identifier_pattern().as_str(), IDENTIFIER_PATTERN);
    }

    #[test]
    fn unknown_tag_has_no_rule() {
        assert!(builtin_schema().rule("bogus").is_none());
    }

    #[test]
    fn every_child_has_a_rule_listing_its_parent() {
        let s = builtin_schema();
        for rule in s.rules() {
            for child in rule.content.child_names() {
                let child_rule = s.rule(child).expect("child rule");
                assert!(child_rule.allowed_parents.contains(&rule.tag_name));
            }
        }
        assert!(s.rule("root").unwrap().allowed_parents.is_empty());
        assert!(s.rule("write").unwrap().allowed_parents.contains("out"));
        assert!(s.rule("write").unwrap().allowed_parents.contains("root"));
        assert!(s.rule("var").unwrap().allowed_parents.contains("ps"));
    }

    #[test]
    fn every_rule_is_reachable_from_root() {
        let s = builtin_schema();
        let mut seen = BTreeSet::from(["root".to_string()]);
        let mut stack = vec!["root"];
        while let Some(t) = stack.pop() {
            for c in s.rule(t).unwrap().content.child_names() {
                if seen.insert(c.to_string()) {
                    stack.push(c);
                }
            }
        }
        assert_eq!(seen.len(), s.rules().len());
    }

    #[test]
    fn builtin_patterns_accept_worked_examples() {
        let s = builtin_schema();
        let accepts = |tag: &str, t: &str| match &s.rule(tag).unwrap().content {
            ContentModel::TextOnly(Some(p)) => p.is_match(t),
            ContentModel::TextOnly(None) => true,
            _ => panic!("{tag} is not text-only"),
        };
        assert!(accepts("var", r#" a="this is how!" "#));
        assert!(accepts("var", " b= 0"));
        assert!(accepts("var", " x = -3.25 "));
        assert!(!accepts("var", " x = abc "));
        assert!(accepts("array", "integer v[5]"));
        assert!(!accepts("array", "long v[5]"));
        assert!(accepts("query", r#" query="Update emp set phone=? and sal=? where eid=1011""#));
        assert!(accepts("set", " int(1,b)"));
        assert!(accepts("set", " double(2,20000) "));
        assert!(accepts("set", "user=a"));
        assert!(!accepts("set", "(1,b)"));
        assert!(accepts("get", "v=int(2)"));
        assert!(accepts("object", "request"));
        assert!(accepts("object", "Session"));
        assert!(!accepts("object", "cookie"));
        assert!(accepts("type", "Parameter"));
        assert!(accepts("conn_name", " conn "));
        assert!(accepts("result", " r "));
    }
}
