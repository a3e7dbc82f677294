use std::borrow::Borrow;
use std::fmt;

use super::{check_content_pattern, ContentModel, Particle, Schema, TagRule};
use crate::event_reader::{EventKind, SourcePosition, XmlEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValidationCode {
    UnknownTag,
    IllegalChild,
    MissingChild,
    OutOfOrderChild,
    PatternMismatch,
    TextWhereForbidden,
    AttributePresent,
}

impl ValidationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::UnknownTag => "UnknownTag",
            Self::IllegalChild => "IllegalChild",
            Self::MissingChild => "MissingChild",
            Self::OutOfOrderChild => "OutOfOrderChild",
            Self::PatternMismatch => "PatternMismatch",
            Self::TextWhereForbidden => "TextWhereForbidden",
            Self::AttributePresent => "AttributePresent",
        }
    }
}

impl fmt::Display for ValidationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationDiagnostic {
    pub code: ValidationCode,
    pub position: SourcePosition,
    pub tag: String,
    pub message: String,
    /// Offending text and expected pattern, for `PatternMismatch`.
    pub mismatch: Option<(String, String)>,
}

#[derive(Debug)]
enum MatchState {
    Sequence { index: usize, count: usize },
    All(Vec<bool>),
    Text(String),
    Unconstrained,
}

#[derive(Debug)]
struct Frame<'s> {
    rule: Option<&'s TagRule>,
    start: SourcePosition,
    state: MatchState,
}

/// Single-pass validator. Feed it a well-formed event stream; it keeps one
/// small frame per open element.
#[derive(Debug)]
pub struct Validator<'s> {
    schema: &'s Schema,
    stack: Vec<Frame<'s>>,
    diagnostics: Vec<ValidationDiagnostic>,
}

fn is_xml_whitespace(text: &str) -> bool {
    text.bytes().all(|b| matches!(b, b' ' | b'\t' | b'\n' | b'\r'))
}

fn initial_state(rule: &TagRule) -> MatchState {
    match &rule.content {
        ContentModel::TextOnly(_) => MatchState::Text(String::new()),
        ContentModel::Sequence(_) | ContentModel::Mixed(_) => {
            MatchState::Sequence { index: 0, count: 0 }
        }
        ContentModel::All(members) => MatchState::All(vec![false; members.len()]),
        ContentModel::Choice(_) => MatchState::Unconstrained,
    }
}

enum Offer {
    Accepted,
    /// Accepted after skipping a required particle that never appeared.
    SkippedRequired(String),
    TooMany,
    OutOfOrder,
    NotAllowed,
}

fn offer_sequence(particles: &[Particle], index: &mut usize, count: &mut usize, child: &str) -> Offer {
    let mut skipped: Option<String> = None;
    let (mut i, mut c) = (*index, *count);
    while i < particles.len() {
        let p = &particles[i];
        if p.term.matches(child) && p.occurs.allows_more(c) {
            *index = i;
            *count = c + 1;
            return match skipped {
                Some(name) => Offer::SkippedRequired(name),
                None => Offer::Accepted,
            };
        }
        if c < p.occurs.min() && skipped.is_none() {
            skipped = Some(p.term.names().join("|"));
        }
        i += 1;
        c = 0;
    }
    let current_exhausted = particles
        .get(*index)
        .is_some_and(|p| *count > 0 && p.term.matches(child));
    if current_exhausted {
        Offer::TooMany
    } else if particles[..*index].iter().any(|p| p.term.matches(child)) {
        Offer::OutOfOrder
    } else {
        Offer::NotAllowed
    }
}

impl<'s> Validator<'s> {
    pub fn new(schema: &'s Schema) -> Self {
        Self {
            schema,
            stack: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn report(&mut self, code: ValidationCode, position: SourcePosition, tag: &str, message: String) {
        self.diagnostics.push(ValidationDiagnostic {
            code,
            position,
            tag: tag.to_string(),
            message,
            mismatch: None,
        });
    }

    pub fn feed(&mut self, event: &XmlEvent) {
        match &event.kind {
            EventKind::StartDocument | EventKind::EndDocument => {}
            EventKind::StartElement { name, attributes } => {
                for attr in attributes {
                    self.report(
                        ValidationCode::AttributePresent,
                        attr.position,
                        name,
                        format!("<{name}> does not take attributes (found '{}')", attr.name),
                    );
                }
                self.start_element(name, event.position);
            }
            EventKind::EndElement { name } => self.end_element(name, event.position),
            EventKind::Characters(text) => self.characters(text, event.position),
        }
    }

    fn start_element(&mut self, name: &str, position: SourcePosition) {
        let rule = self.schema.rule(name);
        let Some(parent) = self.stack.last() else {
            if rule.is_none() {
                self.report(ValidationCode::UnknownTag, position, name, format!("unknown tag <{name}>"));
            } else if name != self.schema.root_tag() {
                self.report(
                    ValidationCode::IllegalChild,
                    position,
                    name,
                    format!("the document element must be <{}>, not <{name}>", self.schema.root_tag()),
                );
            }
            self.push(rule, position);
            return;
        };
        let Some(parent_rule) = parent.rule else {
            // inside an unknown element: already reported
            self.push(None, position);
            return;
        };
        if rule.is_none() {
            self.report(ValidationCode::UnknownTag, position, name, format!("unknown tag <{name}>"));
            self.push(None, position);
            return;
        }
        let parent_name = parent_rule.tag_name.as_str();
        let parent = self.stack.last_mut().expect("parent frame");
        let outcome = match (&parent_rule.content, &mut parent.state) {
            (ContentModel::Sequence(ps) | ContentModel::Mixed(ps), MatchState::Sequence { index, count }) => {
                offer_sequence(ps, index, count, name)
            }
            (ContentModel::Choice(names), _) => {
                if names.iter().any(|n| n == name) {
                    Offer::Accepted
                } else {
                    Offer::NotAllowed
                }
            }
            (ContentModel::All(members), MatchState::All(seen)) => {
                match members.iter().position(|m| m.name == name) {
                    Some(i) if seen[i] => Offer::TooMany,
                    Some(i) => {
                        seen[i] = true;
                        Offer::Accepted
                    }
                    None => Offer::NotAllowed,
                }
            }
            _ => Offer::NotAllowed,
        };
        let parent_name = parent_name.to_string();
        match outcome {
            Offer::Accepted => {}
            Offer::SkippedRequired(missing) => self.report(
                ValidationCode::MissingChild,
                position,
                &parent_name,
                format!("<{parent_name}> is missing <{missing}> before <{name}>"),
            ),
            Offer::TooMany => self.report(
                ValidationCode::IllegalChild,
                position,
                name,
                format!("<{name}> occurs too many times in <{parent_name}>"),
            ),
            Offer::OutOfOrder => self.report(
                ValidationCode::OutOfOrderChild,
                position,
                name,
                format!("<{name}> is out of order in <{parent_name}>"),
            ),
            Offer::NotAllowed => self.report(
                ValidationCode::IllegalChild,
                position,
                name,
                format!("<{name}> is not allowed inside <{parent_name}>"),
            ),
        }
        self.push(rule, position);
    }

    fn push(&mut self, rule: Option<&'s TagRule>, start: SourcePosition) {
        let state = rule.map_or(MatchState::Unconstrained, initial_state);
        self.stack.push(Frame { rule, start, state });
    }

    fn characters(&mut self, text: &str, position: SourcePosition) {
        let Some(frame) = self.stack.last_mut() else { return };
        let Some(rule) = frame.rule else { return };
        match &mut frame.state {
            MatchState::Text(buf) => buf.push_str(text),
            _ if rule.content.allows_text() => {}
            _ if is_xml_whitespace(text) => {}
            _ => {
                let tag = rule.tag_name.clone();
                self.report(
                    ValidationCode::TextWhereForbidden,
                    position,
                    &tag,
                    format!("<{tag}> may only contain elements"),
                );
            }
        }
    }

    fn end_element(&mut self, name: &str, position: SourcePosition) {
        let Some(frame) = self.stack.pop() else { return };
        let Some(rule) = frame.rule else { return };
        match (&rule.content, frame.state) {
            (ContentModel::TextOnly(Some(pattern)), MatchState::Text(text)) => {
                if !check_content_pattern(&text, pattern) {
                    self.diagnostics.push(ValidationDiagnostic {
                        code: ValidationCode::PatternMismatch,
                        position: frame.start,
                        tag: name.to_string(),
                        message: format!(
                            "text {text:?} of <{name}> does not match pattern {}",
                            pattern.as_str()
                        ),
                        mismatch: Some((text, pattern.as_str().to_string())),
                    });
                }
            }
            (ContentModel::Sequence(ps) | ContentModel::Mixed(ps), MatchState::Sequence { index, count }) => {
                let mut c = count;
                for p in &ps[index..] {
                    if c < p.occurs.min() {
                        self.report(
                            ValidationCode::MissingChild,
                            position,
                            name,
                            format!("<{name}> is missing <{}>", p.term.names().join("|")),
                        );
                    }
                    c = 0;
                }
            }
            (ContentModel::All(members), MatchState::All(seen)) => {
                for (m, present) in members.iter().zip(seen) {
                    if m.required && !present {
                        self.report(
                            ValidationCode::MissingChild,
                            position,
                            name,
                            format!("<{name}> is missing <{}>", m.name),
                        );
                    }
                }
            }
            _ => {}
        }
    }

    /// Diagnostics in document order.
    pub fn finish(mut self) -> Vec<ValidationDiagnostic> {
        self.diagnostics.sort_by_key(|d| d.position.byte_offset);
        self.diagnostics
    }

    /// Number of frames currently held; equals the open-element depth.
    pub fn state_depth(&self) -> usize {
        self.stack.len()
    }
}

/// Validates a complete, well-formed event stream.
pub fn validate_stream<I>(events: I, schema: &Schema) -> Vec<ValidationDiagnostic>
where
    I: IntoIterator,
    I::Item: Borrow<XmlEvent>,
{
    let mut v = Validator::new(schema);
    for ev in events {
        v.feed(ev.borrow());
    }
    v.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_reader::read_all;
    use crate::schema::builtin_schema;

    fn codes(doc: &str) -> Vec<ValidationCode> {
        let events = read_all(doc.as_bytes()).expect("well-formed");
        validate_stream(&events, &builtin_schema())
            .into_iter()
            .map(|d| d.code)
            .collect()
    }

    const READ_SAMPLE: &str = r#"<root><var> a ="" </var>
<read> a
<object>request</object>
<type>Parameter</type>
<name>t1</name>
</read>
<writev> a </writev></root>"#;

    #[test]
    fn read_sample_is_valid() {
        assert!(codes(READ_SAMPLE).is_empty());
    }

    #[test]
    fn illegal_child_in_out() {
        assert_eq!(
            codes("<root><out><name>x</name></out></root>"),
            vec![ValidationCode::IllegalChild]
        );
    }

    #[test]
    fn writev_pattern_mismatch_carries_text_and_pattern() {
        let events = read_all(b"<root><writev> 9abc </writev></root>").unwrap();
        let d = validate_stream(&events, &builtin_schema());
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, ValidationCode::PatternMismatch);
        let (text, pattern) = d[0].mismatch.clone().unwrap();
        assert_eq!(text, " 9abc ");
        assert_eq!(pattern, r"\s*_*[A-Za-z][\w_]*\s*");
        assert_eq!(d[0].position.byte_offset, 6);
    }

    #[test]
    fn unknown_tag_and_root_checks() {
        assert_eq!(codes("<root><bogus><x/></bogus></root>"), vec![ValidationCode::UnknownTag]);
        assert_eq!(codes("<var>a=1</var>"), vec![ValidationCode::IllegalChild]);
        assert_eq!(codes("<other/>"), vec![ValidationCode::UnknownTag]);
    }

    #[test]
    fn db_children_in_any_order() {
        let doc = "<root><dB><driver>d</driver><url>u</url><conn_name> conn </conn_name>\
                   <uid>root</uid><pwd> p </pwd><excep_msg>oops</excep_msg></dB></root>";
        assert!(codes(doc).is_empty());
        let doc = "<root><dB><pwd>p</pwd><uid>u</uid><conn_name>c</conn_name><url>u</url>\
                   <driver>d</driver></dB></root>";
        assert!(codes(doc).is_empty());
    }

    #[test]
    fn db_missing_and_repeated_children() {
        let doc = "<root><dB><driver>d</driver><url>u</url><uid>u</uid><pwd>p</pwd></dB></root>";
        assert_eq!(codes(doc), vec![ValidationCode::MissingChild]);
        let doc = "<root><dB><driver>d</driver><driver>d</driver><url>u</url><uid>u</uid>\
                   <pwd>p</pwd><conn_name>c</conn_name></dB></root>";
        assert_eq!(codes(doc), vec![ValidationCode::IllegalChild]);
    }

    #[test]
    fn sequence_ordering() {
        // declare must lead
        assert_eq!(
            codes("<root><write>x</write><declare/></root>"),
            vec![ValidationCode::OutOfOrderChild]
        );
        // ps without query
        assert_eq!(
            codes("<root><ps><set>int(1,2)</set></ps></root>"),
            vec![ValidationCode::MissingChild]
        );
        // query after set
        assert_eq!(
            codes(r#"<root><ps><query>q="x"</query><set>int(1,2)</set><query>q="y"</query></ps></root>"#),
            vec![ValidationCode::OutOfOrderChild]
        );
        // two results
        assert_eq!(
            codes(r#"<root><ps><query>q="x"</query><result>r</result><result>s</result></ps></root>"#),
            vec![ValidationCode::IllegalChild]
        );
        // result then get is fine structurally
        assert!(codes(r#"<root><ps><var>b=0</var><query>q="x"</query><read>b<object>request</object><type>parameter</type><name>t</name></read><set>int(1,b)</set><get>b=int(1)</get></ps></root>"#).is_empty());
    }

    #[test]
    fn text_rules() {
        assert_eq!(codes("<root>hello</root>"), vec![ValidationCode::TextWhereForbidden]);
        assert!(codes("<root>\n\t <write>x</write>\r\n</root>").is_empty());
        assert_eq!(codes("<root>\u{a0}</root>"), vec![ValidationCode::TextWhereForbidden]);
        assert_eq!(codes("<root><write>x<b/></write></root>"), vec![ValidationCode::UnknownTag]);
        assert_eq!(
            codes("<root><write>x<out/></write></root>"),
            vec![ValidationCode::IllegalChild]
        );
        // empty text still has to satisfy the facet
        assert_eq!(codes("<root><writev/></root>"), vec![ValidationCode::PatternMismatch]);
        // mixed content accepts text anywhere
        assert!(codes("<root><class>Date<pname>a=1</pname> d</class></root>").is_empty());
    }

    #[test]
    fn read_requires_all_three_children_in_order() {
        assert_eq!(
            codes("<root><read>a<type>parameter</type><object>request</object><name>t</name></read></root>"),
            vec![ValidationCode::MissingChild, ValidationCode::OutOfOrderChild]
        );
    }

    #[test]
    fn attributes_are_rejected() {
        assert_eq!(codes(r#"<root id="1"/>"#), vec![ValidationCode::AttributePresent]);
    }

    #[test]
    fn function_body_excludes_actions() {
        assert!(codes("<root><function><header>void f()</header><write>x</write></function></root>").is_empty());
        assert_eq!(
            codes("<root><function><header>void f()</header><include>a.jsp</include></function></root>"),
            vec![ValidationCode::IllegalChild]
        );
        assert_eq!(
            codes("<root><function><write>x</write></function></root>"),
            vec![ValidationCode::MissingChild]
        );
    }

    #[test]
    fn state_is_bounded_by_depth() {
        let schema = builtin_schema();
        let mut v = Validator::new(&schema);
        let doc = format!("<root>{}</root>", "<write>x</write>".repeat(1000));
        let mut max = 0;
        for ev in read_all(doc.as_bytes()).unwrap() {
            v.feed(&ev);
            max = max.max(v.state_depth());
        }
        assert_eq!(max, 2);
        assert!(v.finish().is_empty());
    }
}
