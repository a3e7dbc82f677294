//! Single-fault variants of a document, each recording the byte span of
//! the element that carries the fault.

use std::ops::Range;

#[derive(Debug, Clone)]
pub struct Mutant {
    pub name: &'static str,
    pub text: String,
    /// Byte range of the faulty element in `text`.
    pub span: Range<usize>,
}

/// Replaces the first `old` with `new`; the span covers `focus`, which must
/// occur inside `new`.
fn mutate(name: &'static str, base: &str, old: &str, new: &str, focus: &str) -> Mutant {
    let at = base.find(old).unwrap_or_else(|| panic!("{name}: {old:?} not in document"));
    let text = format!("{}{}{}", &base[..at], new, &base[at + old.len()..]);
    let inner = new.find(focus).unwrap_or_else(|| panic!("{name}: focus not in replacement"));
    let start = at + inner;
    Mutant {
        name,
        text,
        span: start..start + focus.len(),
    }
}

/// Ten faults applied to the database-update sample document.
pub fn sample_mutants(sample: &str) -> Vec<Mutant> {
    let write = "<write> the value is :</write>";
    let writev = "<writev> xx </writev>";
    let endloop = "<s> endloop </s>";
    let loop_head = "<s> loop from xx = 2 to 10 step 2</s>";
    let out = format!("<out>\n{write}\n{writev}\n</out>");
    vec![
        mutate("unknown tag", sample, write, "<wrote> the value is :</wrote>", "<wrote> the value is :</wrote>"),
        mutate("illegal child", sample, write, &format!("<var>q=1</var>{write}"), "<var>q=1</var>"),
        mutate("bad identifier", sample, writev, "<writev> 9abc </writev>", "<writev> 9abc </writev>"),
        {
            let unclosed = out.replace("</writev>", "");
            mutate("unclosed tag", sample, &out, &unclosed, &unclosed)
        },
        {
            let removed = sample.replacen(&format!("{endloop}\n"), "", 1);
            mutate("missing endloop", &removed, loop_head, loop_head, loop_head)
        },
        mutate(
            "repeated declaration",
            sample,
            "<var> b= 0</var>",
            "<var> b= 0</var>\n<var> b= 1</var>",
            "<var> b= 1</var>",
        ),
        mutate("undeclared writev", sample, writev, "<writev> yy </writev>", "<writev> yy </writev>"),
        mutate(
            "ps outside dB",
            sample,
            "<dB>",
            "<ps><query> q=\"select 1\"</query></ps>\n<dB>",
            "<ps><query> q=\"select 1\"</query></ps>",
        ),
        mutate(
            "zero-size array",
            sample,
            "</declare>",
            "<array>integer v[0]</array>\n</declare>",
            "<array>integer v[0]</array>",
        ),
        mutate("missing parenthesis in if", sample, "<s> if( r!=0) </s>", "<s> if r!=0 </s>", "<s> if r!=0 </s>"),
    ]
}
