//! Parsers for the small text forms that appear inside individual tags:
//! `name = value` bindings, array declarations, function headers, class
//! declarations and the `set`/`get`/`query` forms of prepared statements.

use crate::symbols::DslType;

/// `_*[A-Za-z]` followed by letters, digits or underscores.
pub fn is_identifier(s: &str) -> bool {
    let rest = s.trim_start_matches('_');
    let mut chars = rest.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

pub fn is_integer_literal(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

pub fn is_decimal_literal(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    match body.split_once('.') {
        Some((int, frac)) => {
            !int.is_empty()
                && !frac.is_empty()
                && int.bytes().all(|b| b.is_ascii_digit())
                && frac.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

pub fn is_string_literal(s: &str) -> bool {
    s.len() >= 2 && s.starts_with('"') && s.ends_with('"') && !s[1..s.len() - 1].contains('"')
}

/// Maps a DSL type keyword to its type.
pub fn type_keyword(word: &str) -> Option<DslType> {
    match word {
        "integer" | "int" => Some(DslType::Int),
        "real" | "double" => Some(DslType::Real),
        "string" => Some(DslType::Str),
        _ => None,
    }
}

/// Splits `lhs = rhs` at the first `=`, trimming both sides.
pub fn split_assignment(text: &str) -> Option<(&str, &str)> {
    let (lhs, rhs) = text.split_once('=')?;
    Some((lhs.trim(), rhs.trim()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayDecl {
    pub element: DslType,
    pub name: String,
    pub size: u64,
}

impl ArrayDecl {
    /// Parses `data_type var_name[x]`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        let (kw, rest) = text
            .split_once(char::is_whitespace)
            .ok_or_else(|| format!("expected 'type name[size]', found {text:?}"))?;
        let element = match kw {
            "integer" | "real" | "string" => type_keyword(kw).expect("keyword"),
            _ => return Err(format!("unknown array element type '{kw}'")),
        };
        let rest = rest.trim();
        let open = rest.find('[').ok_or("missing '[' in array declaration")?;
        let inner = rest[open + 1..]
            .strip_suffix(']')
            .ok_or("array declaration must end with ']'")?;
        let name = rest[..open].trim();
        if !is_identifier(name) {
            return Err(format!("'{name}' is not a valid identifier"));
        }
        let size_text = inner.trim();
        if size_text.is_empty() || !size_text.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("array size '{size_text}' is not a non-negative integer"));
        }
        let size = size_text
            .parse()
            .map_err(|_| format!("array size '{size_text}' is too large"))?;
        Ok(Self {
            element,
            name: name.to_string(),
            size,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: DslType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionHeader {
    /// `None` for `void`.
    pub returns: Option<DslType>,
    pub name: String,
    pub params: Vec<Param>,
}

impl FunctionHeader {
    /// Parses `return_type name(type a, type b[], ...)`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        let open = text.find('(').ok_or("function header is missing '('")?;
        let inner = text[open + 1..]
            .trim_end()
            .strip_suffix(')')
            .ok_or("function header must end with ')'")?;
        let mut head = text[..open].split_whitespace();
        let (Some(ret), Some(name), None) = (head.next(), head.next(), head.next()) else {
            return Err("expected 'return_type name(...)'".into());
        };
        let returns = match ret {
            "void" => None,
            kw => Some(type_keyword(kw).ok_or_else(|| format!("unknown return type '{kw}'"))?),
        };
        if !is_identifier(name) {
            return Err(format!("'{name}' is not a valid function name"));
        }
        let mut params = Vec::new();
        if !inner.trim().is_empty() {
            for raw in inner.split(',') {
                let mut parts = raw.split_whitespace();
                let (Some(kw), Some(pname), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(format!("malformed parameter {:?}", raw.trim()));
                };
                let base = type_keyword(kw).ok_or_else(|| format!("unknown parameter type '{kw}'"))?;
                let (pname, ty) = match pname.strip_suffix("[]") {
                    Some(n) => (n, DslType::ArrayOf(Box::new(base))),
                    None => (pname, base),
                };
                if !is_identifier(pname) {
                    return Err(format!("'{pname}' is not a valid parameter name"));
                }
                if params.iter().any(|p: &Param| p.name == pname) {
                    return Err(format!("parameter '{pname}' is repeated"));
                }
                params.push(Param {
                    name: pname.to_string(),
                    ty,
                });
            }
        }
        Ok(Self {
            returns,
            name: name.to_string(),
            params,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub class_name: String,
    pub object_name: String,
}

impl ClassDecl {
    /// Parses `ClassName object_name`; the class name may be qualified.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut parts = text.split_whitespace();
        let (Some(class), Some(obj), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format!("expected 'ClassName object', found {:?}", text.trim()));
        };
        if !class.split('.').all(is_identifier) {
            return Err(format!("'{class}' is not a valid class name"));
        }
        if !is_identifier(obj) {
            return Err(format!("'{obj}' is not a valid object name"));
        }
        Ok(Self {
            class_name: class.to_string(),
            object_name: obj.to_string(),
        })
    }
}

/// `keyword(index, argument)` inside a prepared-statement `set`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCall {
    pub keyword: String,
    pub index: u32,
    pub argument: String,
}

impl SetCall {
    pub fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        let open = text.find('(').ok_or("expected 'type(index,value)'")?;
        let inner = text[open + 1..]
            .strip_suffix(')')
            .ok_or("expected ')' at the end of set")?;
        let keyword = text[..open].trim();
        if keyword.is_empty() || !keyword.bytes().all(|b| b.is_ascii_alphabetic()) {
            return Err(format!("'{keyword}' is not a type keyword"));
        }
        let (index, argument) = inner.split_once(',').ok_or("expected 'index,value'")?;
        let index: u32 = index
            .trim()
            .parse()
            .map_err(|_| format!("'{}' is not a parameter index", index.trim()))?;
        if index == 0 {
            return Err("parameter indexes start at 1".into());
        }
        let argument = argument.trim();
        if argument.is_empty() {
            return Err("missing value in set".into());
        }
        Ok(Self {
            keyword: keyword.to_string(),
            index,
            argument: argument.to_string(),
        })
    }
}

/// `target=keyword(column)` inside a prepared-statement `get`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GetCall {
    pub target: String,
    pub keyword: String,
    pub column: u32,
}

impl GetCall {
    pub fn parse(text: &str) -> Result<Self, String> {
        let (target, call) = split_assignment(text).ok_or("expected 'name=type(column)'")?;
        if !is_identifier(target) {
            return Err(format!("'{target}' is not a valid identifier"));
        }
        let open = call.find('(').ok_or("expected 'type(column)'")?;
        let inner = call[open + 1..].strip_suffix(')').ok_or("expected ')'")?;
        let column: u32 = inner
            .trim()
            .parse()
            .map_err(|_| format!("'{}' is not a column number", inner.trim()))?;
        if column == 0 {
            return Err("column numbers start at 1".into());
        }
        Ok(Self {
            target: target.to_string(),
            keyword: call[..open].trim().to_string(),
            column,
        })
    }
}

/// `statement_name="sql"` inside `query`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryDecl {
    pub label: String,
    pub sql: String,
}

impl QueryDecl {
    pub fn parse(text: &str) -> Result<Self, String> {
        let (label, sql) = split_assignment(text).ok_or("expected 'name=\"sql\"'")?;
        if !is_identifier(label) {
            return Err(format!("'{label}' is not a valid statement name"));
        }
        if !is_string_literal(sql) {
            return Err("the query must be a double-quoted string".into());
        }
        Ok(Self {
            label: label.to_string(),
            sql: sql[1..sql.len() - 1].to_string(),
        })
    }
}
