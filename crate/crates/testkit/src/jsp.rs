//! Lexical checks on generated JSP text: a tokenizer for whitespace-
//! insensitive comparison and a delimiter balance checker.

/// Splits JSP/Java text into tokens: scripting delimiters, string and
/// character literals (kept whole), identifiers/numbers, and operators.
pub fn tokenize(text: &str) -> Vec<String> {
    const MULTI: &[&str] = &[
        "<%@", "<%!", "<%", "%>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "/>", "</",
    ];
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    'outer: while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '"' || c == '\'' {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i] != c {
                if chars[i] == '\\' {
                    i += 1;
                }
                i += 1;
            }
            i = (i + 1).min(chars.len());
            tokens.push(chars[start..i].iter().collect());
            continue;
        }
        if c.is_alphanumeric() || c == '_' || c == '$' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$' || chars[i] == '.')
            {
                // a dot continues a number but separates member access
                if chars[i] == '.' && !chars[start].is_ascii_digit() {
                    break;
                }
                i += 1;
            }
            tokens.push(chars[start..i].iter().collect());
            continue;
        }
        for m in MULTI {
            let m: Vec<char> = m.chars().collect();
            if chars[i..].starts_with(&m) {
                tokens.push(m.iter().collect());
                i += m.len();
                continue 'outer;
            }
        }
        tokens.push(c.to_string());
        i += 1;
    }
    tokens
}

/// Checks that scripting elements open and close alternately and that
/// braces and parentheses in the Java text balance, ignoring string and
/// character literals.
pub fn check_balance(text: &str) -> Result<(), String> {
    let chars: Vec<char> = text.chars().collect();
    let mut in_script = false;
    let mut braces: i64 = 0;
    let mut parens: i64 = 0;
    let mut line = 1;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
        }
        if !in_script {
            if chars[i..].starts_with(&['<', '%']) {
                in_script = true;
                i += 2;
                continue;
            }
            if chars[i..].starts_with(&['%', '>']) {
                return Err(format!("line {line}: '%>' outside a scripting element"));
            }
            i += 1;
            continue;
        }
        match c {
            '"' | '\'' => {
                i += 1;
                while i < chars.len() && chars[i] != c {
                    if chars[i] == '\n' {
                        return Err(format!("line {line}: unterminated literal"));
                    }
                    if chars[i..].starts_with(&['%', '>']) {
                        return Err(format!("line {line}: '%>' inside a literal ends the scripting element"));
                    }
                    if chars[i] == '\\' {
                        i += 1;
                    }
                    i += 1;
                }
                if i >= chars.len() {
                    return Err(format!("line {line}: unterminated literal"));
                }
            }
            '%' if chars.get(i + 1) == Some(&'>') => {
                in_script = false;
                i += 1;
            }
            '<' if chars.get(i + 1) == Some(&'%') => {
                return Err(format!("line {line}: '<%' inside a scripting element"));
            }
            '{' => braces += 1,
            '}' => {
                braces -= 1;
                if braces < 0 {
                    return Err(format!("line {line}: '}}' without an opener"));
                }
            }
            '(' => parens += 1,
            ')' => {
                parens -= 1;
                if parens < 0 {
                    return Err(format!("line {line}: ')' without an opener"));
                }
            }
            _ => {}
        }
        i += 1;
    }
    if in_script {
        return Err("scripting element left open at end of file".into());
    }
    if braces != 0 || parens != 0 {
        return Err(format!("unbalanced at end of file: braces {braces}, parens {parens}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens() {
        assert_eq!(
            tokenize(r#"for(int xx=2;xx<=10;xx=xx+2){ System.out.println( "a b" +xx+""); }"#),
            [
                "for", "(", "int", "xx", "=", "2", ";", "xx", "<=", "10", ";", "xx", "=", "xx", "+", "2", ")", "{",
                "System", ".", "out", ".", "println", "(", "\"a b\"", "+", "xx", "+", "\"\"", ")", ";", "}"
            ]
        );
        assert_eq!(tokenize("<%! x %>"), ["<%!", "x", "%>"]);
        assert_eq!(tokenize("3.14 a.b"), ["3.14", "a", ".", "b"]);
        assert_eq!(tokenize(r#""esc \" q""#), [r#""esc \" q""#]);
    }

    #[test]
    fn balance() {
        assert!(check_balance("<%\nif(a){\n%>\n<jsp:include page=\"x\" />\n<%\n}\n%>\n").is_ok());
        assert!(check_balance("<%\nSystem.out.println(\"{ %\\> (\");\n%>\n").is_ok());
        assert!(check_balance("<%\nSystem.out.println(\"%>\");\n%>\n").is_err());
        assert!(check_balance("<%\n{\n%>\n").is_err());
        assert!(check_balance("<%\n}\n{\n%>\n").is_err());
        assert!(check_balance("<%\nx\n").is_err());
        assert!(check_balance("%>").is_err());
        assert!(check_balance("<% <% %>").is_err());
    }
}
