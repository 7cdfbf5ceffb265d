//! Structure files: a line-oriented text format for 2-structures.
//!
//! ```text
//! # comment
//! signature:
//!   ot1 : 2 infix
//!   I : 0
//! generators: A, B
//! theory: assoc-unit ot1 I
//! rules:
//!   alpha(x, y, z) : (x ot1 (y ot1 z)) -> ((x ot1 y) ot1 z)
//! axioms:
//!   name : m1 = m2
//!   unit : eta(1_a, 1_b, 1_I, 1_I) = 1_(a ot2 b) [identity]
//! ```

use thiserror::Error;

use crate::rewriting::{validate_structure, Axiom, Rule, TwoStructure, ValidationIssue};
use crate::syntax::{Cursor, Tok};
use crate::terms::{ObjectTheory, Signature};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid structure:\n{}", .0.iter().map(|i| format!("  - {}", i)).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<ValidationIssue>),
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Signature,
    Rules,
    Axioms,
}

fn err(line: usize, msg: impl ToString) -> FormatError {
    FormatError::Parse { line, msg: msg.to_string() }
}

/// Parses a structure file without validating it.
pub fn parse_structure_unchecked(text: &str) -> Result<TwoStructure, FormatError> {
    let mut s = TwoStructure::default();
    let mut section = Section::None;
    let mut rule_lines = Vec::new();
    let mut axiom_lines = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((head, rest)) = line.split_once(':') {
            let rest = rest.trim();
            match head.trim() {
                "signature" => {
                    section = Section::Signature;
                    continue;
                }
                "rules" => {
                    section = Section::Rules;
                    continue;
                }
                "axioms" => {
                    section = Section::Axioms;
                    continue;
                }
                "theory" => {
                    s.theory = parse_theory(rest).map_err(|m| err(line_no, m))?;
                    section = Section::None;
                    continue;
                }
                "generators" => {
                    for g in rest.split(',').map(str::trim).filter(|g| !g.is_empty()) {
                        s.sig.generators.insert(g.to_string());
                    }
                    section = Section::None;
                    continue;
                }
                _ => {}
            }
        }
        match section {
            Section::Signature => parse_symbol(&mut s.sig, line).map_err(|m| err(line_no, m))?,
            Section::Rules => rule_lines.push((line_no, line.to_string())),
            Section::Axioms => axiom_lines.push((line_no, line.to_string())),
            Section::None => return Err(err(line_no, format!("unexpected line outside a section: `{}`", line))),
        }
    }
    // Rules and axioms are parsed once the whole signature is known.
    for (line_no, line) in rule_lines {
        s.rules.push(parse_rule(&s.sig, &line).map_err(|m| err(line_no, m))?);
    }
    for (line_no, line) in axiom_lines {
        let ax = parse_axiom(&s, &line).map_err(|m| err(line_no, m))?;
        s.axioms.push(ax);
    }
    Ok(s)
}

/// Parses and validates a structure file.
pub fn parse_structure(text: &str) -> Result<TwoStructure, FormatError> {
    let s = parse_structure_unchecked(text)?;
    let issues = validate_structure(&s);
    if issues.is_empty() {
        Ok(s)
    } else {
        Err(FormatError::Invalid(issues))
    }
}

fn parse_theory(rest: &str) -> Result<ObjectTheory, String> {
    let rest = rest.trim();
    if rest == "empty" {
        return Ok(ObjectTheory::Empty);
    }
    let Some(decls) = rest.strip_prefix("assoc-unit") else {
        return Err(format!("unknown object theory `{}` (expected `empty` or `assoc-unit`)", rest));
    };
    let mut pairs = Vec::new();
    for d in decls.split(',').map(str::trim).filter(|d| !d.is_empty()) {
        let parts: Vec<&str> = d.split_whitespace().collect();
        let [sym, unit] = parts.as_slice() else {
            return Err(format!("expected `symbol unit`, found `{}`", d));
        };
        pairs.push((sym.to_string(), unit.to_string()));
    }
    Ok(ObjectTheory::AssocUnit(pairs))
}

fn parse_symbol(sig: &mut Signature, line: &str) -> Result<(), String> {
    let mut cur = Cursor::new(line).map_err(|e| e.to_string())?;
    let name = cur.ident().map_err(|e| e.to_string())?;
    cur.expect(&Tok::Colon).map_err(|e| e.to_string())?;
    let arity = match cur.next() {
        Tok::Number(n) => n,
        other => return Err(format!("expected arity, found {}", other)),
    };
    let infix = match cur.next() {
        Tok::Eof => false,
        Tok::Ident(w) if w == "infix" => true,
        other => return Err(format!("expected `infix` or end of line, found {}", other)),
    };
    if infix && arity != 2 {
        return Err(format!("infix symbol `{}` must be binary", name));
    }
    sig.add_symbol(&name, arity, infix);
    Ok(())
}

fn parse_rule(sig: &Signature, line: &str) -> Result<Rule, String> {
    let mut cur = Cursor::new(line).map_err(|e| e.to_string())?;
    let label = cur.ident().map_err(|e| e.to_string())?;
    let mut vars = None;
    if *cur.peek() == Tok::LParen {
        cur.next();
        let mut vs = vec![cur.ident().map_err(|e| e.to_string())?];
        while *cur.peek() == Tok::Comma {
            cur.next();
            vs.push(cur.ident().map_err(|e| e.to_string())?);
        }
        cur.expect(&Tok::RParen).map_err(|e| e.to_string())?;
        vars = Some(vs);
    }
    cur.expect(&Tok::Colon).map_err(|e| e.to_string())?;
    let lhs = sig.parse_from(&mut cur).map_err(|e| e.to_string())?;
    cur.expect(&Tok::Arrow).map_err(|e| e.to_string())?;
    let rhs = sig.parse_from(&mut cur).map_err(|e| e.to_string())?;
    if !cur.at_eof() {
        return Err(format!("unexpected {} after rule", cur.peek()));
    }
    Ok(match vars {
        Some(vs) => Rule { label, vars: vs, lhs, rhs },
        None => Rule::new(&label, lhs, rhs),
    })
}

fn parse_axiom(s: &TwoStructure, line: &str) -> Result<Axiom, String> {
    let mut cur = Cursor::new(line).map_err(|e| e.to_string())?;
    let name = cur.ident().map_err(|e| e.to_string())?;
    cur.expect(&Tok::Colon).map_err(|e| e.to_string())?;
    let lhs = s.parse_morphism_from(&mut cur).map_err(|e| e.to_string())?;
    cur.expect(&Tok::Eq).map_err(|e| e.to_string())?;
    let rhs = s.parse_morphism_from(&mut cur).map_err(|e| e.to_string())?;
    let mut identity_instance = false;
    if *cur.peek() == Tok::LBracket {
        cur.next();
        match cur.next() {
            Tok::Ident(w) if w == "identity" => identity_instance = true,
            other => return Err(format!("unknown axiom flag {}", other)),
        }
        cur.expect(&Tok::RBracket).map_err(|e| e.to_string())?;
    }
    if !cur.at_eof() {
        return Err(format!("unexpected {} after axiom", cur.peek()));
    }
    Ok(Axiom { name, lhs, rhs, identity_instance })
}

/// Renders a structure in the file format; parsing the result gives back an
/// equal structure.
pub fn print_structure(s: &TwoStructure) -> String {
    let mut out = String::from("signature:\n");
    for (name, d) in &s.sig.symbols {
        out.push_str(&format!("  {} : {}{}\n", name, d.arity, if d.infix { " infix" } else { "" }));
    }
    if !s.sig.generators.is_empty() {
        out.push_str(&format!("generators: {}\n", s.sig.generators.iter().cloned().collect::<Vec<_>>().join(", ")));
    }
    match &s.theory {
        ObjectTheory::Empty => out.push_str("theory: empty\n"),
        ObjectTheory::AssocUnit(v) => {
            let decls: Vec<String> = v.iter().map(|(f, u)| format!("{} {}", f, u)).collect();
            out.push_str(&format!("theory: assoc-unit {}\n", decls.join(", ")));
        }
    }
    out.push_str("rules:\n");
    for r in &s.rules {
        out.push_str(&format!("  {}({}) : {} -> {}\n", r.label, r.vars.join(", "), s.print(&r.lhs), s.print(&r.rhs)));
    }
    if !s.axioms.is_empty() {
        out.push_str("axioms:\n");
        for a in &s.axioms {
            out.push_str(&format!(
                "  {} : {} = {}{}\n",
                a.name,
                s.print_morphism(&a.lhs),
                s.print_morphism(&a.rhs),
                if a.identity_instance { " [identity]" } else { "" }
            ));
        }
    }
    out
}
