//! Groups the flat event stream into per-statement subtrees.
//!
//! `root`, `declare` and `function` are containers and are reported as
//! enter/exit items; every other element is assembled into an owned
//! [`ElementNode`] covering just that element, so memory stays bounded by
//! the largest single statement rather than by the document.

use crate::event_reader::{EventKind, ReaderError, SourcePosition, XmlEvent};

pub const CONTAINERS: &[&str] = &["root", "declare", "function"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementNode {
    pub name: String,
    pub position: SourcePosition,
    pub end_position: SourcePosition,
    /// Concatenation of the element's direct text children.
    pub text: String,
    pub children: Vec<ElementNode>,
}

impl ElementNode {
    pub fn trimmed_text(&self) -> &str {
        self.text.trim()
    }

    pub fn child(&self, name: &str) -> Option<&ElementNode> {
        self.children.iter().find(|c| c.name == name)
    }

    pub fn children_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a ElementNode> + 'a {
        self.children.iter().filter(move |c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Enter { tag: String, position: SourcePosition },
    Leaf(ElementNode),
    Exit { tag: String, position: SourcePosition },
}

pub struct Items<I> {
    events: I,
    done: bool,
}

impl<I> Items<I>
where
    I: Iterator<Item = Result<XmlEvent, ReaderError>>,
{
    pub fn new(events: I) -> Self {
        Self { events, done: false }
    }

    fn build_leaf(&mut self, name: String, position: SourcePosition) -> Result<ElementNode, ReaderError> {
        let mut stack = vec![ElementNode {
            name,
            position,
            end_position: position,
            text: String::new(),
            children: Vec::new(),
        }];
        loop {
            let Some(ev) = self.events.next() else {
                // the reader reports truncation itself; a bare end here means
                // the caller handed us a cut-off event list
                let top = stack.pop().expect("open node");
                return Err(ReaderError {
                    code: crate::event_reader::ReaderErrorCode::UnexpectedEof,
                    position: top.position,
                    detail: format!("event stream ended inside <{}>", top.name),
                });
            };
            let ev = ev?;
            match ev.kind {
                EventKind::StartElement { name, .. } => stack.push(ElementNode {
                    name,
                    position: ev.position,
                    end_position: ev.position,
                    text: String::new(),
                    children: Vec::new(),
                }),
                EventKind::Characters(t) => stack.last_mut().expect("open node").text.push_str(&t),
                EventKind::EndElement { .. } => {
                    let mut node = stack.pop().expect("open node");
                    node.end_position = ev.position;
                    match stack.last_mut() {
                        Some(parent) => parent.children.push(node),
                        None => return Ok(node),
                    }
                }
                EventKind::StartDocument | EventKind::EndDocument => {}
            }
        }
    }
}

impl<I> Iterator for Items<I>
where
    I: Iterator<Item = Result<XmlEvent, ReaderError>>,
{
    type Item = Result<Item, ReaderError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            let ev = match self.events.next()? {
                Ok(ev) => ev,
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            };
            let item = match ev.kind {
                EventKind::StartElement { name, .. } if CONTAINERS.contains(&name.as_str()) => Item::Enter {
                    tag: name,
                    position: ev.position,
                },
                EventKind::StartElement { name, .. } => match self.build_leaf(name, ev.position) {
                    Ok(node) => Item::Leaf(node),
                    Err(e) => {
                        self.done = true;
                        return Some(Err(e));
                    }
                },
                EventKind::EndElement { name } => Item::Exit {
                    tag: name,
                    position: ev.position,
                },
                _ => continue,
            };
            return Some(Ok(item));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_reader::open_document;

    #[test]
    fn containers_and_leaves() {
        let doc = "<root><declare><var>a=1</var></declare><out><write> x </write><writev>a</writev></out>\
                   <function><header>void f()</header></function></root>";
        let items: Vec<Item> = Items::new(open_document(doc.as_bytes()).unwrap())
            .collect::<Result<_, _>>()
            .unwrap();
        let shape: Vec<String> = items
            .iter()
            .map(|i| match i {
                Item::Enter { tag, .. } => format!("+{tag}"),
                Item::Exit { tag, .. } => format!("-{tag}"),
                Item::Leaf(n) => n.name.clone(),
            })
            .collect();
        assert_eq!(
            shape,
            ["+root", "+declare", "var", "-declare", "out", "+function", "header", "-function", "-root"]
        );
        let Item::Leaf(out) = &items[4] else { panic!() };
        assert_eq!(out.children.len(), 2);
        assert_eq!(out.children[0].text, " x ");
        assert_eq!(out.child("writev").unwrap().trimmed_text(), "a");
    }

    #[test]
    fn reader_errors_propagate() {
        let doc = "<root><out><write>x</out></root>";
        let res: Result<Vec<Item>, _> = Items::new(open_document(doc.as_bytes()).unwrap()).collect();
        assert!(res.is_err());
    }
}
