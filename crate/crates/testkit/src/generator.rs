//! Random documents in the tag dialect that are both schema-valid and
//! semantically clean: every name is declared before use in a Java-visible
//! scope, blocks are balanced, prepared statements sit inside a database
//! block, and nothing needing the page's implicit objects is put inside a
//! function.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Ty {
    Int,
    Real,
    Str,
}

#[derive(Clone, Debug)]
struct Var {
    name: String,
    ty: Ty,
    /// Loop indexes and result counts never receive a read.
    fixed: bool,
}

struct Frame {
    vars: Vec<Var>,
    /// This block opened the active database block.
    owns_db: bool,
}

pub struct DocGenerator {
    rng: ChaCha8Rng,
    counter: usize,
    globals: Vec<Var>,
    frames: Vec<Frame>,
    db_open: bool,
    in_function: bool,
    budget: usize,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const PRINTABLE: &[&str] = &[
    "hello", "the value is :", "Update successfull", "a \"quoted\" word", "back\\slash", "50% > 20%",
    "x %> y", "<tag>", "a & b", "tab\there", "naïve café", "1 + 1 = 2", "{brace}", "semi;colon", "$dollar",
];

impl DocGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            counter: 0,
            globals: Vec::new(),
            frames: Vec::new(),
            db_open: false,
            in_function: false,
            budget: 0,
        }
    }

    fn fresh(&mut self, stem: &str) -> String {
        self.counter += 1;
        let underscores = if self.rng.gen_ratio(1, 6) { "_" } else { "" };
        let stem = if self.rng.gen_ratio(1, 4) { stem.to_uppercase() } else { stem.to_string() };
        format!("{underscores}{stem}{}", self.counter)
    }

    fn ws(&mut self) -> &'static str {
        [" ", "", "", "  ", "\n", "\t"].choose(&mut self.rng).unwrap()
    }

    fn visible(&self) -> Vec<Var> {
        let mut all = self.globals.clone();
        for f in &self.frames {
            all.extend(f.vars.iter().cloned());
        }
        all
    }

    fn visible_of(&self, ty: Ty) -> Vec<Var> {
        self.visible().into_iter().filter(|v| v.ty == ty).collect()
    }

    fn declare_local(&mut self, v: Var) {
        self.frames.last_mut().expect("open frame").vars.push(v);
    }

    fn literal(&mut self, ty: Ty) -> String {
        match ty {
            Ty::Int => {
                let v: i32 = self.rng.gen_range(-1000..100_000);
                if v >= 0 && self.rng.gen_ratio(1, 5) {
                    format!("+{v}")
                } else {
                    v.to_string()
                }
            }
            Ty::Real => format!("{}.{}", self.rng.gen_range(0..1000), self.rng.gen_range(0..100)),
            Ty::Str => {
                let words = ["", "abc", "with space", "back\\slash", "tag <b>", "a&b", "50%>"];
                format!("\"{}\"", words.choose(&mut self.rng).unwrap())
            }
        }
    }

    fn any_ty(&mut self) -> Ty {
        *[Ty::Int, Ty::Real, Ty::Str].choose(&mut self.rng).unwrap()
    }

    fn var_element(&mut self, global: bool) -> String {
        let ty = self.any_ty();
        let name = self.fresh("v");
        let value = self.literal(ty);
        let v = Var { name: name.clone(), ty, fixed: false };
        if global {
            self.globals.push(v);
        } else {
            self.declare_local(v);
        }
        let (a, b, c) = (self.ws(), self.ws(), self.ws());
        format!("<var>{a}{name}{b}={c}{}</var>", escape(&value))
    }

    fn array_element(&mut self, global: bool) -> String {
        let kw = *["integer", "real", "string"].choose(&mut self.rng).unwrap();
        let name = self.fresh("arr");
        let size = self.rng.gen_range(1..50);
        // arrays are never used as scalars
        let _ = global;
        let ws = self.ws();
        format!("<array>{kw} {name}{ws}[{size}]</array>")
    }

    fn write(&mut self) -> String {
        let text = PRINTABLE.choose(&mut self.rng).unwrap();
        let (a, b) = (self.ws(), self.ws());
        format!("<write>{a}{}{b}</write>", escape(text))
    }

    fn writev(&mut self) -> Option<String> {
        let vars = self.visible();
        let v = vars.choose(&mut self.rng)?;
        Some(format!("<writev> {} </writev>", v.name))
    }

    fn out(&mut self) -> String {
        let n = self.rng.gen_range(0..4);
        let mut s = String::from("<out>");
        for _ in 0..n {
            let piece = if self.rng.gen_bool(0.5) { self.writev() } else { None };
            s.push_str(&piece.unwrap_or_else(|| self.write()));
        }
        s.push_str("</out>");
        s
    }

    fn read(&mut self) -> Option<String> {
        let vars: Vec<Var> = self.visible().into_iter().filter(|v| !v.fixed).collect();
        let target = vars.choose(&mut self.rng)?.clone();
        let (obj, kind) = *[("request", "parameter"), ("request", "attribute"), ("session", "attribute")]
            .choose(&mut self.rng)
            .unwrap();
        let case = |rng: &mut ChaCha8Rng, s: &str| {
            if rng.gen_bool(0.3) {
                let mut c = s.chars();
                c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
            } else {
                s.to_string()
            }
        };
        let obj = case(&mut self.rng, obj);
        let kind = case(&mut self.rng, kind);
        let field = self.fresh("field");
        // reads retype their target as a string
        for v in self.globals.iter_mut().chain(self.frames.iter_mut().flat_map(|f| f.vars.iter_mut())) {
            if v.name == target.name {
                v.ty = Ty::Str;
            }
        }
        Some(format!(
            "<read> {}\n<object>{obj}</object><type> {kind} </type><name>{field}</name></read>",
            target.name
        ))
    }

    fn condition(&mut self) -> String {
        let ints = self.visible_of(Ty::Int);
        match (ints.choose(&mut self.rng), self.rng.gen_range(0..3)) {
            (Some(v), 0) => format!("{} != 0", v.name),
            (Some(v), 1) => format!("{} > 3 && {} < 100", v.name, v.name),
            _ => "true".to_string(),
        }
    }

    fn block(&mut self, depth: usize) -> String {
        self.frames.push(Frame {
            vars: Vec::new(),
            owns_db: false,
        });
        let mut s = String::new();
        let n = self.rng.gen_range(0..4);
        for _ in 0..n {
            s.push_str(&self.statement(depth + 1));
        }
        let frame = self.frames.pop().expect("frame");
        if frame.owns_db {
            self.db_open = false;
        }
        s
    }

    fn if_block(&mut self, depth: usize) -> String {
        let cond = self.condition();
        let then = if self.rng.gen_bool(0.5) { " then" } else { "" };
        let mut s = format!("<s> if ({}){then} </s>", escape(&cond));
        s.push_str(&self.block(depth));
        if self.rng.gen_bool(0.4) {
            s.push_str("<s>else</s>");
            s.push_str(&self.block(depth));
        }
        s.push_str("<s> endif </s>");
        s
    }

    fn loop_block(&mut self, depth: usize) -> String {
        let ints = self.visible_of(Ty::Int);
        // a fresh index is declared implicitly and lives in the for statement
        let index = match ints.choose(&mut self.rng) {
            Some(v) if self.rng.gen_bool(0.3) => v.name.clone(),
            _ => self.fresh("i"),
        };
        let start = self.rng.gen_range(0..5);
        let step = self.rng.gen_range(1..4);
        let bound = if self.rng.gen_bool(0.7) {
            self.rng.gen_range(0..20).to_string()
        } else {
            format!("({index} < {})", self.rng.gen_range(1..20))
        };
        let mut s = format!(
            "<s>loop from {index} = {start} to {} step {step}</s>",
            escape(&bound)
        );
        self.frames.push(Frame {
            vars: vec![Var {
                name: index,
                ty: Ty::Int,
                fixed: true,
            }],
            owns_db: false,
        });
        s.push_str(&self.block(depth));
        self.frames.pop();
        s.push_str("<s>endloop</s>");
        s
    }

    fn db(&mut self) -> Option<String> {
        let owns_here = self.frames.last().is_some_and(|f| f.owns_db);
        if self.db_open && !owns_here {
            return None;
        }
        if owns_here {
            // the open block ends here; its names go out of scope
            let frame = self.frames.last_mut().expect("frame");
            frame.vars.clear();
        }
        let conn = self.fresh("conn");
        let mut parts = vec![
            format!("<driver>com.example.Driver{}</driver>", self.rng.gen_range(0..9)),
            "<url>jdbc:mysql://localhost/db?a=1&amp;b=2</url>".to_string(),
            "<uid> root </uid>".to_string(),
            "<pwd>p\"w\\d</pwd>".to_string(),
            format!("<conn_name> {conn} </conn_name>"),
        ];
        if self.rng.gen_bool(0.5) {
            parts.push("<excep_msg> oops...error !!!</excep_msg>".to_string());
        }
        parts.shuffle(&mut self.rng);
        self.db_open = true;
        self.frames.last_mut().expect("frame").owns_db = true;
        Some(format!("<dB>{}</dB>", parts.concat()))
    }

    fn set_element(&mut self) -> String {
        let kw = *["int", "double", "string", "integer", "real"].choose(&mut self.rng).unwrap();
        let n = self.rng.gen_range(1..6);
        let vars = self.visible();
        let arg = match vars.choose(&mut self.rng) {
            Some(v) if self.rng.gen_bool(0.5) => v.name.clone(),
            _ => {
                let ty = self.any_ty();
                self.literal(ty)
            }
        };
        format!("<set> {kw}({n},{}) </set>", escape(&arg))
    }

    fn ps(&mut self) -> Option<String> {
        if !self.db_open {
            return None;
        }
        let mut s = String::from("<ps>");
        for _ in 0..self.rng.gen_range(0..2) {
            s.push_str(&self.var_element(false));
        }
        let label = if self.rng.gen_bool(0.6) { "query".to_string() } else { self.fresh("stmt") };
        s.push_str(&format!(
            "<query> {label}=\"update t set a=? where b &lt; {}\"</query>",
            self.rng.gen_range(0..99)
        ));
        for _ in 0..self.rng.gen_range(0..3) {
            let read = if self.in_function || self.rng.gen_bool(0.6) { None } else { self.read() };
            s.push_str(&read.unwrap_or_else(|| self.set_element()));
        }
        let targets = self.visible();
        if self.rng.gen_bool(0.5) {
            let r = self.fresh("r");
            s.push_str(&format!("<result> {r} </result>"));
            self.declare_local(Var { name: r, ty: Ty::Int, fixed: true });
        } else if !targets.is_empty() {
            for _ in 0..self.rng.gen_range(0..3) {
                let t = targets.choose(&mut self.rng).unwrap();
                let kw = match t.ty {
                    Ty::Int => "int",
                    Ty::Real => "double",
                    Ty::Str => "string",
                };
                s.push_str(&format!("<get>{}={kw}({})</get>", t.name, self.rng.gen_range(1..5)));
            }
        }
        s.push_str("</ps>");
        Some(s)
    }

    fn class(&mut self) -> String {
        let class = *["Date", "java.util.ArrayList", "Foo"].choose(&mut self.rng).unwrap();
        let obj = self.fresh("obj");
        let mut s = format!("<class>{class} {obj}");
        if class == "Foo" {
            for _ in 0..self.rng.gen_range(0..3) {
                let prop = self.fresh("prop");
                s.push_str(&format!("<pname>{prop}={}</pname>", self.rng.gen_range(0..9)));
            }
        }
        s.push_str("</class>");
        s
    }

    fn page(&mut self) -> String {
        format!("page{}.jsp", self.rng.gen_range(0..20))
    }

    fn forward(&mut self) -> String {
        let page = self.page();
        let mut s = format!("<forward> {page} ");
        for _ in 0..self.rng.gen_range(0..3) {
            let p = self.fresh("p");
            s.push_str(&format!("<pname>{p}={}</pname>", self.rng.gen_range(0..9)));
        }
        s.push_str("</forward>");
        s
    }

    fn session(&mut self) -> String {
        let mut s = String::from("<session>");
        for _ in 0..self.rng.gen_range(0..3) {
            let key = self.fresh("key");
            let vars = self.visible();
            let value = match (vars.choose(&mut self.rng), self.rng.gen_range(0..3)) {
                (Some(v), 0) => v.name.clone(),
                (_, 1) => "\"text\"".to_string(),
                _ => "bareword".to_string(),
            };
            s.push_str(&format!("<set>{key} = {}</set>", escape(&value)));
        }
        s.push_str("</session>");
        s
    }

    fn statement(&mut self, depth: usize) -> String {
        if self.budget == 0 {
            return self.write();
        }
        self.budget -= 1;
        loop {
            let pick = self.rng.gen_range(0..16);
            let body_only = matches!(pick, 3 | 11 | 12 | 13 | 14);
            if body_only && self.in_function {
                continue;
            }
            let nested = matches!(pick, 8 | 9);
            if nested && depth >= 3 {
                continue;
            }
            let s = match pick {
                0 => Some(self.var_element(false)),
                1 => Some(self.array_element(false)),
                2 => Some(self.write()),
                3 => self.read(),
                4 => Some(self.out()),
                5 => self.writev(),
                6 => self.db(),
                7 => self.ps(),
                8 => Some(self.if_block(depth)),
                9 => Some(self.loop_block(depth)),
                10 => Some(self.class()),
                11 => Some(format!("<redirect> {} </redirect>", self.page())),
                12 => Some(format!("<include>{}</include>", self.page())),
                13 => Some(self.forward()),
                14 => Some(self.session()),
                _ => Some("<!-- comment -->".to_string()),
            };
            if let Some(s) = s {
                return s;
            }
        }
    }

    fn function(&mut self) -> String {
        let ret = *["void", "integer", "real", "string"].choose(&mut self.rng).unwrap();
        let name = self.fresh("fn");
        let mut params = Vec::new();
        let mut vars = Vec::new();
        for _ in 0..self.rng.gen_range(0..3) {
            let ty = self.any_ty();
            let kw = match ty {
                Ty::Int => "integer",
                Ty::Real => "real",
                Ty::Str => "string",
            };
            let p = self.fresh("arg");
            if self.rng.gen_bool(0.3) {
                params.push(format!("{kw} {p}[]"));
            } else {
                params.push(format!("{kw} {p}"));
                vars.push(Var { name: p, ty, fixed: false });
            }
        }
        let header = format!("<header>{ret} {name}({})</header>", params.join(", "));
        // function bodies see page declarations and their own names only
        let saved_frames = std::mem::take(&mut self.frames);
        let saved_db = std::mem::replace(&mut self.db_open, false);
        self.in_function = true;
        self.frames.push(Frame { vars, owns_db: false });
        let mut body = String::new();
        for _ in 0..self.rng.gen_range(0..4) {
            body.push_str(&self.statement(1));
        }
        self.frames = saved_frames;
        self.db_open = saved_db;
        self.in_function = false;
        format!("<function>{header}{body}</function>")
    }

    /// One complete document.
    pub fn document(&mut self) -> String {
        self.counter = 0;
        self.globals.clear();
        self.frames.clear();
        self.db_open = false;
        self.budget = self.rng.gen_range(0..40);
        let mut s = String::new();
        if self.rng.gen_bool(0.5) {
            s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        }
        s.push_str("<root>\n");
        if self.rng.gen_bool(0.6) {
            s.push_str("<declare>");
            for _ in 0..self.rng.gen_range(0..4) {
                let decl = if self.rng.gen_bool(0.8) { self.var_element(true) } else { self.array_element(true) };
                s.push_str(&decl);
            }
            s.push_str("</declare>\n");
        }
        self.frames.push(Frame {
            vars: Vec::new(),
            owns_db: false,
        });
        for _ in 0..self.rng.gen_range(0..12) {
            let item = if self.rng.gen_ratio(1, 8) { self.function() } else { self.statement(0) };
            s.push_str(&item);
            s.push('\n');
        }
        self.frames.clear();
        s.push_str("</root>\n");
        s
    }
}

/// `count` documents from a fixed seed.
pub fn documents(seed: u64, count: usize) -> Vec<String> {
    let mut g = DocGenerator::new(seed);
    (0..count).map(|_| g.document()).collect()
}
