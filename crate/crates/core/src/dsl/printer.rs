use std::fmt::Write;

use crate::dsl::ast::{Expr, FrameDecl, Program, PulseAxis, Statement};

/// Canonical text of a program; parsing it gives back the same program.
pub fn print_program(program: &Program) -> String {
    let mut out = String::new();
    for s in &program.statements {
        out.push_str(&print_statement(s));
        out.push('\n');
    }
    out
}

pub fn print_statement(s: &Statement) -> String {
    match s {
        Statement::System(path) => format!("system {path}"),
        Statement::Pulse(targets) => {
            let shared = targets.windows(2).all(|w| w[0].axis == w[1].axis && w[0].degrees == w[1].degrees);
            match targets.first() {
                Some(first) if shared => {
                    let spins: Vec<&str> = targets.iter().map(|t| t.spin.as_str()).collect();
                    format!("pulse {} {}", spins.join(","), angle(first.axis, first.degrees))
                }
                _ => {
                    let items: Vec<String> =
                        targets.iter().map(|t| format!("{}:{}", t.spin, angle(t.axis, t.degrees))).collect();
                    format!("pulse {}", items.join(","))
                }
            }
        }
        Statement::Delay(e) => format!("delay {}", print_expr(e)),
        Statement::Frame(FrameDecl::Resonant) => "frame resonant".into(),
        Statement::Frame(FrameDecl::Uncouple(l)) => format!("frame uncouple {l}"),
        Statement::Frame(FrameDecl::Offsets(list)) => {
            let items: Vec<String> = list.iter().map(|(s, hz)| format!("{s}={hz}")).collect();
            format!("frame offsets {}", items.join(","))
        }
        Statement::Acquire { spins, duration, dt } => {
            format!("acquire {} {} {}", spins.join(","), print_expr(duration), print_expr(dt))
        }
    }
}

fn angle(axis: PulseAxis, degrees: f64) -> String {
    let a = match axis {
        PulseAxis::X => 'x',
        PulseAxis::Y => 'y',
    };
    format!("{a}{degrees}")
}

/// Minimal parentheses; binary operators associate to the left, so a right
/// operand of equal precedence keeps its parentheses.
pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Num(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Coupling(a, b) => {
            let _ = write!(out, "J[{a},{b}]");
        }
        Expr::Neg(inner) => {
            out.push('-');
            wrap(out, inner, inner.precedence() < 3);
        }
        Expr::Binary(op, l, r) => {
            let p = op.precedence();
            wrap(out, l, l.precedence() < p);
            out.push(op.symbol());
            wrap(out, r, r.precedence() <= p);
        }
    }
}

fn wrap(out: &mut String, e: &Expr, parens: bool) {
    if parens {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}
