//! CPLEX-style LP text writer and reader.
//!
//! The writer emits one row per line with explicit coefficients; the
//! reader is token-based, so it also accepts wrapped lines and the
//! usual section spellings (`st`, `subject to`, `general`, ...).
//! Minimisation only, matching the model container.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{LinearModel, ModelError, Sense, VarId, VarKind};

pub fn write_lp(model: &LinearModel) -> String {
    let mut out = String::new();
    if !model.name.is_empty() {
        let _ = writeln!(out, "\\ Problem: {}", model.name);
    }
    out.push_str("Minimize\n OBJ:");
    write_terms(&mut out, model, &model.objective);
    out.push('\n');

    out.push_str("Subject To\n");
    for row in &model.rows {
        let _ = write!(out, " {}:", row.name);
        if row.coeffs.is_empty() {
            out.push_str(" 0");
        } else {
            write_terms(&mut out, model, &row.coeffs);
        }
        let _ = writeln!(out, " {} {}", row.sense, row.rhs);
    }

    let mut bounds = String::new();
    for var in &model.vars {
        let name = &var.name;
        let (l, u) = (var.lower, var.upper);
        if var.kind == VarKind::Binary && l == 0.0 && u == 1.0 {
            continue; // implied by the Binaries section
        }
        if l == 0.0 && u == f64::INFINITY {
            continue;
        }
        if l == u {
            let _ = writeln!(bounds, " {name} = {l}");
        } else if l == f64::NEG_INFINITY && u == f64::INFINITY {
            let _ = writeln!(bounds, " {name} free");
        } else if u == f64::INFINITY {
            let _ = writeln!(bounds, " {name} >= {l}");
        } else if l == f64::NEG_INFINITY {
            let _ = writeln!(bounds, " -inf <= {name} <= {u}");
        } else {
            let _ = writeln!(bounds, " {l} <= {name} <= {u}");
        }
    }
    if !bounds.is_empty() {
        out.push_str("Bounds\n");
        out.push_str(&bounds);
    }

    let generals: Vec<&str> = model
        .vars
        .iter()
        .filter(|v| v.kind == VarKind::Integer)
        .map(|v| v.name.as_str())
        .collect();
    if !generals.is_empty() {
        out.push_str("Generals\n");
        for name in generals {
            let _ = writeln!(out, " {name}");
        }
    }
    let binaries: Vec<&str> = model
        .vars
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for name in binaries {
            let _ = writeln!(out, " {name}");
        }
    }
    out.push_str("End\n");
    out
}

fn write_terms(out: &mut String, model: &LinearModel, coeffs: &[(VarId, f64)]) {
    for (i, &(v, c)) in coeffs.iter().enumerate() {
        let name = &model.vars[v.idx()].name;
        if i == 0 {
            let _ = write!(out, " {c} {name}");
        } else if c < 0.0 {
            let _ = write!(out, " - {} {name}", -c);
        } else {
            let _ = write!(out, " + {c} {name}");
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Atom(String),
    Num(f64),
    Plus,
    Minus,
    Colon,
    Rel(Sense),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ModelError> {
    let mut toks = Vec::new();
    for (lno, raw) in text.lines().enumerate() {
        let lno = lno + 1;
        let line = match raw.find('\\') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let bytes: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            match c {
                '+' => {
                    toks.push((Tok::Plus, lno));
                    i += 1;
                }
                '-' => {
                    toks.push((Tok::Minus, lno));
                    i += 1;
                }
                ':' => {
                    toks.push((Tok::Colon, lno));
                    i += 1;
                }
                '<' | '>' | '=' => {
                    let mut j = i + 1;
                    if j < bytes.len() && bytes[j] == '=' {
                        j += 1;
                    }
                    let sense = match c {
                        '<' => Sense::Le,
                        '>' => Sense::Ge,
                        _ => Sense::Eq,
                    };
                    toks.push((Tok::Rel(sense), lno));
                    i = j;
                }
                _ if c.is_ascii_digit() || c == '.' => {
                    let start = i;
                    let mut seen_e = false;
                    while i < bytes.len() {
                        let d = bytes[i];
                        if d.is_ascii_digit() || d == '.' {
                            i += 1;
                        } else if (d == 'e' || d == 'E') && !seen_e {
                            seen_e = true;
                            i += 1;
                            if i < bytes.len() && (bytes[i] == '+' || bytes[i] == '-') {
                                i += 1;
                            }
                        } else {
                            break;
                        }
                    }
                    let s: String = bytes[start..i].iter().collect();
                    let v = s.parse::<f64>().map_err(|_| ModelError::Parse {
                        line: lno,
                        msg: format!("bad number `{s}`"),
                    })?;
                    toks.push((Tok::Num(v), lno));
                }
                _ if c.is_alphabetic() || c == '_' => {
                    let start = i;
                    while i < bytes.len()
                        && (bytes[i].is_alphanumeric()
                            || matches!(bytes[i], '_' | '.' | '#' | '(' | ')' | '[' | ']' | ','))
                    {
                        i += 1;
                    }
                    let s: String = bytes[start..i].iter().collect();
                    toks.push((Tok::Atom(s), lno));
                }
                other => {
                    return Err(ModelError::Parse {
                        line: lno,
                        msg: format!("unexpected character `{other}`"),
                    });
                }
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    model: LinearModel,
    var_ids: HashMap<String, VarId>,
    explicit_bounds: Vec<bool>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map(|&(_, l)| l)
            .unwrap_or(0)
    }

    fn err(&self, msg: impl Into<String>) -> ModelError {
        ModelError::Parse {
            line: self.line(),
            msg: msg.into(),
        }
    }

    fn keyword(&self) -> Option<String> {
        if let Some(Tok::Atom(a)) = self.peek() {
            let low = a.to_ascii_lowercase();
            let is_kw = matches!(
                low.as_str(),
                "minimize" | "min" | "maximize" | "max" | "subject" | "st" | "s.t." | "such"
                    | "bounds" | "bound" | "generals" | "general" | "integers" | "integer"
                    | "binaries" | "binary" | "bin" | "end"
            );
            // A keyword followed by ':' is a label, not a section header.
            if is_kw && !matches!(self.toks.get(self.pos + 1).map(|(t, _)| t), Some(Tok::Colon)) {
                return Some(low);
            }
        }
        None
    }

    fn var(&mut self, name: &str) -> VarId {
        if let Some(&v) = self.var_ids.get(name) {
            return v;
        }
        let v = VarId(self.model.vars.len());
        self.model.vars.push(super::Variable {
            name: name.to_string(),
            lower: 0.0,
            upper: f64::INFINITY,
            kind: VarKind::Continuous,
        });
        self.var_ids.insert(name.to_string(), v);
        self.explicit_bounds.push(false);
        v
    }

    /// Parses `[name :] term*` and stops before a relation or keyword.
    /// Returns (label, coeffs, constant).
    #[allow(clippy::type_complexity)]
    fn terms(&mut self) -> Result<(Option<String>, Vec<(VarId, f64)>, f64), ModelError> {
        let mut label = None;
        if let (Some(Tok::Atom(a)), Some((Tok::Colon, _))) =
            (self.peek().cloned().as_ref(), self.toks.get(self.pos + 1))
        {
            label = Some(a.clone());
            self.pos += 2;
        }
        let mut coeffs = Vec::new();
        let mut constant = 0.0;
        loop {
            if self.keyword().is_some() {
                break;
            }
            let mut sign = 1.0;
            let mut saw_sign = false;
            loop {
                match self.peek() {
                    Some(Tok::Plus) => {
                        self.pos += 1;
                        saw_sign = true;
                    }
                    Some(Tok::Minus) => {
                        sign = -sign;
                        self.pos += 1;
                        saw_sign = true;
                    }
                    _ => break,
                }
            }
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Atom(name)) if self.keyword().is_none() => {
                            self.pos += 1;
                            let v = self.var(&name);
                            coeffs.push((v, sign * n));
                        }
                        _ => constant += sign * n,
                    }
                }
                Some(Tok::Atom(name)) => {
                    if self.keyword().is_some() {
                        if saw_sign {
                            return Err(self.err("dangling sign before section keyword"));
                        }
                        break;
                    }
                    self.pos += 1;
                    let v = self.var(&name);
                    coeffs.push((v, sign));
                }
                _ => {
                    if saw_sign {
                        return Err(self.err("dangling sign"));
                    }
                    break;
                }
            }
        }
        Ok((label, coeffs, constant))
    }

    fn number(&mut self) -> Result<f64, ModelError> {
        let mut sign = 1.0;
        loop {
            match self.peek() {
                Some(Tok::Plus) => self.pos += 1,
                Some(Tok::Minus) => {
                    sign = -sign;
                    self.pos += 1;
                }
                _ => break,
            }
        }
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(sign * n)
            }
            Some(Tok::Atom(a)) if is_inf(&a) => {
                self.pos += 1;
                Ok(sign * f64::INFINITY)
            }
            _ => Err(self.err("expected a number")),
        }
    }
}

fn is_inf(a: &str) -> bool {
    matches!(
        a.to_ascii_lowercase().as_str(),
        "inf" | "infinity" | "1e30" | "1e+30"
    )
}

pub fn parse_lp(text: &str) -> Result<LinearModel, ModelError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        model: LinearModel::default(),
        var_ids: HashMap::new(),
        explicit_bounds: Vec::new(),
    };

    match p.keyword().as_deref() {
        Some("minimize") | Some("min") => p.pos += 1,
        Some("maximize") | Some("max") => {
            return Err(p.err("maximisation not supported; model sense is min"));
        }
        _ => return Err(p.err("expected `Minimize`")),
    }
    let (_, obj, _) = p.terms()?;
    let obj = p.model.merge_coeffs(obj, "objective")?;
    p.model.objective = obj;

    match p.keyword().as_deref() {
        Some("subject") | Some("such") => {
            p.pos += 1;
            match p.peek() {
                Some(Tok::Atom(a)) if a.eq_ignore_ascii_case("to") => p.pos += 1,
                _ => return Err(p.err("expected `to` after `subject`")),
            }
        }
        Some("st") | Some("s.t.") => p.pos += 1,
        _ => return Err(p.err("expected `Subject To`")),
    }

    loop {
        match p.keyword().as_deref() {
            Some("bounds") | Some("bound") | Some("generals") | Some("general")
            | Some("integers") | Some("integer") | Some("binaries") | Some("binary")
            | Some("bin") | Some("end") => break,
            None if p.peek().is_none() => return Err(p.err("missing `End`")),
            _ => {}
        }
        let (label, coeffs, constant) = p.terms()?;
        let sense = match p.peek().cloned() {
            Some(Tok::Rel(s)) => {
                p.pos += 1;
                s
            }
            _ => return Err(p.err("expected a relation in constraint")),
        };
        let rhs = p.number()? - constant;
        let name = label.unwrap_or_default();
        p.model
            .add_constraint(name, coeffs, sense, rhs)
            .map_err(|e| match e {
                ModelError::NonFinite { context } => ModelError::Parse {
                    line: p.line(),
                    msg: format!("non-finite value in {context}"),
                },
                other => other,
            })?;
    }

    if matches!(p.keyword().as_deref(), Some("bounds") | Some("bound")) {
        p.pos += 1;
        loop {
            if p.keyword().is_some() || p.peek().is_none() {
                break;
            }
            match p.peek().cloned() {
                // `l <= x <= u` (or `-inf <= x ...`)
                Some(Tok::Num(_)) | Some(Tok::Plus) | Some(Tok::Minus) => {
                    let l = p.number()?;
                    if !matches!(p.peek(), Some(Tok::Rel(Sense::Le))) {
                        return Err(p.err("expected `<=` in bound"));
                    }
                    p.pos += 1;
                    let name = match p.peek().cloned() {
                        Some(Tok::Atom(a)) => {
                            p.pos += 1;
                            a
                        }
                        _ => return Err(p.err("expected variable name in bound")),
                    };
                    let v = p.var(&name);
                    p.model.vars[v.idx()].lower = l;
                    p.explicit_bounds[v.idx()] = true;
                    if matches!(p.peek(), Some(Tok::Rel(Sense::Le))) {
                        p.pos += 1;
                        let u = p.number()?;
                        p.model.vars[v.idx()].upper = u;
                    }
                }
                Some(Tok::Atom(a)) if is_inf(&a) => {
                    return Err(p.err("bare infinity at start of bound"));
                }
                Some(Tok::Atom(name)) => {
                    p.pos += 1;
                    let v = p.var(&name);
                    p.explicit_bounds[v.idx()] = true;
                    match p.peek().cloned() {
                        Some(Tok::Atom(a)) if a.eq_ignore_ascii_case("free") => {
                            p.pos += 1;
                            p.model.vars[v.idx()].lower = f64::NEG_INFINITY;
                            p.model.vars[v.idx()].upper = f64::INFINITY;
                        }
                        Some(Tok::Rel(s)) => {
                            p.pos += 1;
                            let val = p.number()?;
                            match s {
                                Sense::Le => p.model.vars[v.idx()].upper = val,
                                Sense::Ge => p.model.vars[v.idx()].lower = val,
                                Sense::Eq => {
                                    p.model.vars[v.idx()].lower = val;
                                    p.model.vars[v.idx()].upper = val;
                                }
                            }
                        }
                        _ => return Err(p.err("malformed bound line")),
                    }
                }
                _ => return Err(p.err("malformed bound line")),
            }
        }
    }

    loop {
        match p.keyword().as_deref() {
            Some("generals") | Some("general") | Some("integers") | Some("integer") => {
                p.pos += 1;
                while let Some(Tok::Atom(name)) = p.peek().cloned() {
                    if p.keyword().is_some() {
                        break;
                    }
                    p.pos += 1;
                    let v = p.var(&name);
                    p.model.vars[v.idx()].kind = VarKind::Integer;
                }
            }
            Some("binaries") | Some("binary") | Some("bin") => {
                p.pos += 1;
                while let Some(Tok::Atom(name)) = p.peek().cloned() {
                    if p.keyword().is_some() {
                        break;
                    }
                    p.pos += 1;
                    let v = p.var(&name);
                    p.model.vars[v.idx()].kind = VarKind::Binary;
                    if !p.explicit_bounds[v.idx()] {
                        p.model.vars[v.idx()].lower = 0.0;
                        p.model.vars[v.idx()].upper = 1.0;
                    }
                }
            }
            Some("end") => {
                p.pos += 1;
                break;
            }
            _ => return Err(p.err("expected `Generals`, `Binaries` or `End`")),
        }
    }

    for var in &p.model.vars {
        if var.lower > var.upper {
            return Err(ModelError::BadBounds {
                name: var.name.clone(),
                lower: var.lower,
                upper: var.upper,
            });
        }
    }
    Ok(p.model)
}
