//! PDDL text: the domain file and one-action-per-line plan files.
//!
//! Plan grammar: a plan file is a sequence of `(name arg ...)` forms, one per
//! line when emitted. Parsers accept any whitespace between tokens and `;`
//! line comments.

use std::fmt::Write;

use thiserror::Error;

use super::domain::{ActionName, PlanAction};

struct Schema {
    name: ActionName,
    params: &'static [&'static str],
    pre: &'static [&'static str],
    eff: &'static [&'static str],
}

const PREDICATES: &[&str] = &[
    "(pending ?o - order)",
    "(grouped ?o - order ?d - delivery)",
    "(loaded ?o - order ?v - vehicle)",
    "(delivered ?o - order)",
    "(destination ?o - order ?l - location)",
    "(open ?d - delivery)",
    "(has-orders ?d - delivery)",
    "(assigned ?d - delivery ?v - vehicle)",
    "(dispatched ?d - delivery ?v - vehicle)",
    "(completed ?d - delivery)",
    "(at ?v - vehicle ?l - location)",
    "(available ?v - vehicle)",
];

const SCHEMAS: &[Schema] = &[
    Schema {
        name: ActionName::AssignOrder,
        params: &["?o", "?d"],
        pre: &[
            "(pending ?o)",
            "(not (completed ?d))",
            "(forall (?v - vehicle) (not (dispatched ?d ?v)))",
        ],
        eff: &["(not (pending ?o))", "(grouped ?o ?d)", "(has-orders ?d)"],
    },
    Schema {
        name: ActionName::AssignDelivery,
        params: &["?d", "?v"],
        pre: &["(open ?d)", "(available ?v)", "(at ?v depot)"],
        eff: &["(not (open ?d))", "(assigned ?d ?v)"],
    },
    Schema {
        name: ActionName::DispatchDelivery,
        params: &["?d", "?v"],
        pre: &["(assigned ?d ?v)", "(has-orders ?d)", "(available ?v)", "(at ?v depot)"],
        eff: &[
            "(not (assigned ?d ?v))",
            "(dispatched ?d ?v)",
            "(not (available ?v))",
            "(forall (?o - order) (when (grouped ?o ?d) (loaded ?o ?v)))",
        ],
    },
    Schema {
        name: ActionName::Drive,
        params: &["?v", "?from", "?to"],
        pre: &["(at ?v ?from)", "(not (available ?v))"],
        eff: &["(not (at ?v ?from))", "(at ?v ?to)"],
    },
    Schema {
        name: ActionName::DeliverOrder,
        params: &["?o", "?v", "?l"],
        pre: &["(at ?v ?l)", "(loaded ?o ?v)", "(destination ?o ?l)"],
        eff: &["(not (loaded ?o ?v))", "(delivered ?o)"],
    },
    Schema {
        name: ActionName::FinishDelivery,
        params: &["?d", "?v"],
        pre: &[
            "(dispatched ?d ?v)",
            "(at ?v depot)",
            "(forall (?o - order) (not (loaded ?o ?v)))",
        ],
        eff: &["(not (dispatched ?d ?v))", "(completed ?d)", "(available ?v)"],
    },
];

/// The fixed delivery domain as PDDL text.
pub fn emit_pddl() -> String {
    let mut out = String::new();
    out.push_str("(define (domain food-delivery)\n");
    out.push_str("  (:requirements :typing :negative-preconditions :universal-preconditions :conditional-effects)\n");
    out.push_str("  (:types order delivery vehicle location)\n");
    out.push_str("  (:constants depot - location)\n");
    out.push_str("  (:predicates\n");
    for p in PREDICATES {
        let _ = writeln!(out, "    {p}");
    }
    out.push_str("  )\n");
    for s in SCHEMAS {
        let params: Vec<String> = s
            .params
            .iter()
            .zip(s.name.signature())
            .map(|(p, t)| format!("{p} - {}", t.as_str()))
            .collect();
        let _ = writeln!(out, "\n  (:action {}", s.name);
        let _ = writeln!(out, "    :parameters ({})", params.join(" "));
        let _ = writeln!(out, "    :precondition (and\n      {})", s.pre.join("\n      "));
        let _ = writeln!(out, "    :effect (and\n      {}))", s.eff.join("\n      "));
    }
    out.push_str(")\n");
    out
}

/// One grounded action per line; an empty plan yields an empty file.
pub fn emit_plan_text(actions: &[PlanAction]) -> String {
    let mut out = String::new();
    for a in actions {
        let _ = writeln!(out, "{a}");
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanParseError {
    #[error("line {line}: unexpected `{token}`")]
    Unexpected { line: usize, token: String },
    #[error("line {line}: unterminated action")]
    Unterminated { line: usize },
    #[error("line {line}: {message}")]
    BadAction { line: usize, message: String },
}

pub fn parse_plan_text(text: &str) -> Result<Vec<PlanAction>, PlanParseError> {
    // tokenize into (line, token)
    let mut tokens = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split(';').next().unwrap_or("");
        let spaced = line.replace('(', " ( ").replace(')', " ) ");
        for tok in spaced.split_whitespace() {
            tokens.push((ln + 1, tok.to_string()));
        }
    }
    let mut actions = Vec::new();
    let mut it = tokens.into_iter();
    while let Some((line, tok)) = it.next() {
        if tok != "(" {
            return Err(PlanParseError::Unexpected { line, token: tok });
        }
        let mut words = Vec::new();
        loop {
            match it.next() {
                None => return Err(PlanParseError::Unterminated { line }),
                Some((_, t)) if t == ")" => break,
                Some((l, t)) if t == "(" => return Err(PlanParseError::Unexpected { line: l, token: t }),
                Some((_, t)) => words.push(t.to_ascii_lowercase()),
            }
        }
        let Some((name, args)) = words.split_first() else {
            return Err(PlanParseError::BadAction { line, message: "empty action".into() });
        };
        let name: ActionName = name.parse().map_err(|message| PlanParseError::BadAction { line, message })?;
        if args.len() != name.arity() {
            return Err(PlanParseError::BadAction {
                line,
                message: format!("{name} takes {} arguments, got {}", name.arity(), args.len()),
            });
        }
        actions.push(PlanAction {
            name,
            args: args.to_vec(),
        });
    }
    Ok(actions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_plan_is_empty_text() {
        assert_eq!(emit_plan_text(&[]), "");
        assert_eq!(parse_plan_text("").unwrap(), vec![]);
    }

    #[test]
    fn parser_tolerates_whitespace_and_comments() {
        let text = "  ( drive   v1\tdepot\n loc-o1 ) ; first leg\n(deliver-order o1 v1 loc-o1)";
        let actions = parse_plan_text(text).unwrap();
        assert_eq!(actions.len(), 2);
        assert_eq!(actions[0], PlanAction::new(ActionName::Drive, &["v1", "depot", "loc-o1"]));
    }

    #[test]
    fn parser_rejects_bad_input() {
        assert!(matches!(parse_plan_text("(drive v1 depot)"), Err(PlanParseError::BadAction { .. })));
        assert!(matches!(parse_plan_text("(fly v1)"), Err(PlanParseError::BadAction { .. })));
        assert!(matches!(parse_plan_text("(drive v1"), Err(PlanParseError::Unterminated { .. })));
        assert!(matches!(parse_plan_text("drive"), Err(PlanParseError::Unexpected { .. })));
    }

    #[test]
    fn domain_has_six_actions() {
        let d = emit_pddl();
        assert_eq!(d.matches("(:action ").count(), 6);
        for a in ActionName::ALL {
            assert!(d.contains(&format!("(:action {a}\n")));
        }
        let open = d.matches('(').count();
        assert_eq!(open, d.matches(')').count());
    }
}
