//! Two XSD validators, independent of the translator: the Python
//! `xmlschema` package driven as a subprocess, and a small interpreter for
//! the XSD subset the exporter produces (elements, named groups, sequence,
//! choice, all, occurrence bounds, string patterns, mixed content).

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io;
use std::process::Command;

use regex::Regex;
use roxmltree::{Document, Node};

const XS: &str = "http://www.w3.org/2001/XMLSchema";

const PY_VALIDATE: &str = r#"
import sys, xmlschema
schema = xmlschema.XMLSchema10(sys.argv[1])
for path in sys.argv[2:]:
    try:
        ok = schema.is_valid(path)
    except Exception:
        ok = False
    print("1" if ok else "0")
"#;

pub fn python_xmlschema_available() -> bool {
    Command::new("python3")
        .args(["-c", "import xmlschema"])
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

/// Verdicts of Python's `xmlschema` for each document, in order.
pub fn validate_with_xmlschema(xsd: &str, docs: &[String]) -> io::Result<Vec<bool>> {
    let dir = tempfile::tempdir()?;
    let schema_path = dir.path().join("schema.xsd");
    fs::write(&schema_path, xsd)?;
    let mut paths = Vec::with_capacity(docs.len());
    for (i, doc) in docs.iter().enumerate() {
        let p = dir.path().join(format!("doc{i}.xml"));
        fs::write(&p, doc)?;
        paths.push(p);
    }
    let out = Command::new("python3")
        .arg("-c")
        .arg(PY_VALIDATE)
        .arg(&schema_path)
        .args(&paths)
        .output()?;
    if !out.status.success() {
        return Err(io::Error::other(String::from_utf8_lossy(&out.stderr).into_owned()));
    }
    let verdicts: Vec<bool> = String::from_utf8_lossy(&out.stdout).lines().map(|l| l.trim() == "1").collect();
    if verdicts.len() != docs.len() {
        return Err(io::Error::other("xmlschema returned the wrong number of verdicts"));
    }
    Ok(verdicts)
}

/// Translates an XSD regular expression into an anchored Rust regex.
pub fn xsd_regex(pattern: &str) -> Result<Regex, String> {
    let mut out = String::from("^(?:");
    let mut chars = pattern.chars().peekable();
    let mut in_class = false;
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                let e = chars.next().ok_or("dangling backslash")?;
                let piece = match (e, in_class) {
                    ('s', false) => r"[\t\n\r ]",
                    ('s', true) => r"\t\n\r ",
                    ('S', false) => r"[^\t\n\r ]",
                    ('w', _) => r"[^\p{P}\p{Z}\p{C}]",
                    ('W', _) => r"[\p{P}\p{Z}\p{C}]",
                    ('d', _) => r"\p{Nd}",
                    ('i' | 'c' | 'I' | 'C', _) => return Err(format!("\\{e} is not supported")),
                    _ => {
                        out.push('\\');
                        out.push(e);
                        continue;
                    }
                };
                out.push_str(piece);
            }
            '[' if !in_class => {
                in_class = true;
                out.push('[');
                if chars.peek() == Some(&'^') {
                    out.push(chars.next().unwrap());
                }
            }
            '-' if in_class && chars.peek() == Some(&'[') => return Err("class subtraction is not supported".into()),
            ']' if in_class => {
                in_class = false;
                out.push(']');
            }
            '[' if in_class => out.push_str(r"\["),
            '.' if !in_class => out.push_str(r"[^\n\r]"),
            '^' | '$' if !in_class => {
                out.push('\\');
                out.push(c);
            }
            _ => out.push(c),
        }
    }
    out.push_str(")$");
    Regex::new(&out).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy)]
struct Occurs {
    min: usize,
    max: Option<usize>,
}

#[derive(Debug, Clone)]
enum Particle {
    Element { name: String, ty: String },
    Group(String),
    Sequence(Vec<(Particle, Occurs)>),
    Choice(Vec<(Particle, Occurs)>),
    All(Vec<(Particle, Occurs)>),
}

#[derive(Debug, Clone)]
enum TypeDef {
    Simple(Vec<Regex>),
    Complex { mixed: bool, content: Option<(Particle, Occurs)> },
}

/// Validator for schemas built from the supported subset.
#[derive(Debug, Clone)]
pub struct XsdInterpreter {
    roots: HashMap<String, String>,
    groups: HashMap<String, (Particle, Occurs)>,
    types: HashMap<String, TypeDef>,
}

fn xs_children<'a, 'i>(n: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    n.children().filter(|c| c.is_element() && c.tag_name().namespace() == Some(XS))
}

fn occurs(n: Node) -> Result<Occurs, String> {
    let min = n.attribute("minOccurs").map_or(Ok(1), str::parse).map_err(|e| format!("minOccurs: {e}"))?;
    let max = match n.attribute("maxOccurs") {
        None => Some(1),
        Some("unbounded") => None,
        Some(v) => Some(v.parse().map_err(|e| format!("maxOccurs: {e}"))?),
    };
    Ok(Occurs { min, max })
}

fn type_name(n: Node) -> Result<String, String> {
    n.attribute("type")
        .map(|t| t.to_string())
        .ok_or_else(|| "element without a type attribute".to_string())
}

fn particle(n: Node) -> Result<(Particle, Occurs), String> {
    let occ = occurs(n)?;
    let kids = || xs_children(n).map(particle).collect::<Result<Vec<_>, _>>();
    let p = match n.tag_name().name() {
        "element" => Particle::Element {
            name: n.attribute("name").ok_or("local element without a name")?.to_string(),
            ty: type_name(n)?,
        },
        "group" => Particle::Group(n.attribute("ref").ok_or("group without ref")?.to_string()),
        "sequence" => Particle::Sequence(kids()?),
        "choice" => Particle::Choice(kids()?),
        "all" => Particle::All(kids()?),
        other => return Err(format!("unsupported particle xs:{other}")),
    };
    Ok((p, occ))
}

impl XsdInterpreter {
    pub fn parse(xsd: &str) -> Result<Self, String> {
        let doc = Document::parse(xsd).map_err(|e| e.to_string())?;
        let schema = doc.root_element();
        let mut s = Self {
            roots: HashMap::new(),
            groups: HashMap::new(),
            types: HashMap::new(),
        };
        for item in xs_children(schema) {
            let name = item.attribute("name").ok_or("top-level component without a name")?.to_string();
            match item.tag_name().name() {
                "element" => {
                    s.roots.insert(name, type_name(item)?);
                }
                "group" => {
                    let body = xs_children(item).next().ok_or("empty group")?;
                    s.groups.insert(name, particle(body)?);
                }
                "simpleType" => {
                    let restriction = xs_children(item).next().ok_or("simpleType without restriction")?;
                    if restriction.attribute("base") != Some("xs:string") {
                        return Err("only xs:string restrictions are supported".into());
                    }
                    let patterns = xs_children(restriction)
                        .map(|f| match f.tag_name().name() {
                            "pattern" => xsd_regex(f.attribute("value").unwrap_or_default()),
                            other => Err(format!("unsupported facet xs:{other}")),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    s.types.insert(name, TypeDef::Simple(patterns));
                }
                "complexType" => {
                    let mixed = item.attribute("mixed") == Some("true");
                    let content = xs_children(item).next().map(particle).transpose()?;
                    s.types.insert(name, TypeDef::Complex { mixed, content });
                }
                other => return Err(format!("unsupported top-level xs:{other}")),
            }
        }
        Ok(s)
    }

    /// Whether `xml` is well-formed and valid.
    pub fn validate(&self, xml: &str) -> bool {
        let Ok(doc) = Document::parse(xml) else {
            return false;
        };
        let root = doc.root_element();
        match self.roots.get(root.tag_name().name()) {
            Some(ty) if root.tag_name().namespace().is_none() => self.element_ok(root, ty),
            _ => false,
        }
    }

    fn element_ok(&self, n: Node, ty: &str) -> bool {
        if n.attributes().len() > 0 {
            return false;
        }
        let kids: Vec<Node> = n.children().filter(|c| c.is_element()).collect();
        let text: String = n.children().filter(|c| c.is_text()).filter_map(|c| c.text()).collect();
        if ty == "xs:string" {
            return kids.is_empty();
        }
        match self.types.get(ty) {
            Some(TypeDef::Simple(patterns)) => kids.is_empty() && patterns.iter().all(|p| p.is_match(&text)),
            Some(TypeDef::Complex { mixed, content }) => {
                if !mixed && !text.chars().all(|c| matches!(c, ' ' | '\t' | '\n' | '\r')) {
                    return false;
                }
                match content {
                    None => kids.is_empty(),
                    Some((p, occ)) => self.ends(p, *occ, &kids, 0).contains(&kids.len()),
                }
            }
            None => false,
        }
    }

    /// Every position reachable after matching `p` with `occ` from `i`.
    fn ends(&self, p: &Particle, occ: Occurs, kids: &[Node], i: usize) -> BTreeSet<usize> {
        let mut result = BTreeSet::new();
        if occ.min == 0 {
            result.insert(i);
        }
        let mut frontier = BTreeSet::from([i]);
        let limit = occ.max.unwrap_or(kids.len() + 1);
        for k in 1..=limit {
            let next: BTreeSet<usize> = frontier.iter().flat_map(|&s| self.once(p, kids, s)).collect();
            if next.is_empty() {
                break;
            }
            if k >= occ.min {
                result.extend(next.iter().copied());
            }
            if next == frontier && k >= occ.min {
                break;
            }
            frontier = next;
        }
        result
    }

    fn once(&self, p: &Particle, kids: &[Node], i: usize) -> BTreeSet<usize> {
        match p {
            Particle::Element { name, ty } => match kids.get(i) {
                Some(k) if k.tag_name().name() == name && k.tag_name().namespace().is_none() && self.element_ok(*k, ty) => {
                    BTreeSet::from([i + 1])
                }
                _ => BTreeSet::new(),
            },
            Particle::Group(name) => match self.groups.get(name) {
                Some((g, occ)) => self.ends(g, *occ, kids, i),
                None => BTreeSet::new(),
            },
            Particle::Sequence(items) => items.iter().fold(BTreeSet::from([i]), |acc, (q, occ)| {
                acc.iter().flat_map(|&s| self.ends(q, *occ, kids, s)).collect()
            }),
            Particle::Choice(items) => items.iter().flat_map(|(q, occ)| self.ends(q, *occ, kids, i)).collect(),
            Particle::All(items) => {
                let mut out = BTreeSet::new();
                self.all(items, 0, kids, i, &mut out);
                out
            }
        }
    }

    fn all(&self, items: &[(Particle, Occurs)], used: u64, kids: &[Node], i: usize, out: &mut BTreeSet<usize>) {
        let complete = items
            .iter()
            .enumerate()
            .all(|(k, (_, occ))| used & (1 << k) != 0 || occ.min == 0);
        if complete {
            out.insert(i);
        }
        for (k, (q, _)) in items.iter().enumerate() {
            if used & (1 << k) == 0 {
                for next in self.once(q, kids, i) {
                    if next > i {
                        self.all(items, used | (1 << k), kids, next, out);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: &str = r#"<?xml version="1.0"?>
<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">
  <xs:element name="root" type="root"/>
  <xs:complexType name="root">
    <xs:sequence>
      <xs:group ref="a" minOccurs="0"/>
      <xs:choice minOccurs="0" maxOccurs="unbounded">
        <xs:group ref="b"/>
        <xs:group ref="box"/>
      </xs:choice>
    </xs:sequence>
  </xs:complexType>
  <xs:group name="a"><xs:sequence><xs:element name="a" type="xs:string"/></xs:sequence></xs:group>
  <xs:group name="b"><xs:sequence><xs:element name="b" type="ident"/></xs:sequence></xs:group>
  <xs:simpleType name="ident">
    <xs:restriction base="xs:string"><xs:pattern value="\s*[A-Za-z][\w_]*\s*"/></xs:restriction>
  </xs:simpleType>
  <xs:group name="box"><xs:sequence><xs:element name="box" type="box"/></xs:sequence></xs:group>
  <xs:complexType name="box">
    <xs:all>
      <xs:element name="x" type="xs:string"/>
      <xs:element name="y" type="xs:string" minOccurs="0"/>
    </xs:all>
  </xs:complexType>
</xs:schema>"#;

    #[test]
    fn interpreter_accepts_and_rejects() {
        let s = XsdInterpreter::parse(SCHEMA).unwrap();
        assert!(s.validate("<root/>"));
        assert!(s.validate("<root><a>t</a><b> ok </b><box><y/><x/></box><b>z9</b></root>"));
        assert!(!s.validate("<root><b>9z</b></root>"));
        assert!(!s.validate("<root><b>a</b><a/></root>"));
        assert!(!s.validate("<root><box><y/></box></root>"));
        assert!(!s.validate("<root><box><x/><x/></box></root>"));
        assert!(!s.validate("<root>text</root>"));
        assert!(!s.validate("<root><a k='v'/></root>"));
        assert!(!s.validate("<root><a></root>"));
        assert!(!s.validate("<other/>"));
    }

    #[test]
    fn regex_translation() {
        let r = xsd_regex(r"\s*_*[A-Za-z][\w_]*\s*").unwrap();
        assert!(r.is_match(" _ab_9 "));
        assert!(r.is_match("a+b"), "\\w admits math symbols");
        assert!(!r.is_match("9abc"));
        assert!(!r.is_match("a b"));
        assert!(xsd_regex("a.c").unwrap().is_match("abc"));
        assert!(!xsd_regex("a.c").unwrap().is_match("a\nc"));
        assert!(xsd_regex("^a$").unwrap().is_match("^a$"));
        assert!(xsd_regex(r"[a-z-[aeiou]]").is_err());
    }
}
