//! A line-oriented text format for pulse programs.
//!
//! ```text
//! system data/bromotrifluoroethylene.cfg
//! frame uncouple A          # or: frame resonant / frame offsets B=61.05,C=-37.5
//! pulse B,C y90             # degrees; y-90 (or -y90) turns about −y
//! pulse B:x90,C:x-90        # different rotations, applied together
//! delay 1/(2*J[B,C])        # seconds; + - * / ( ) and J[i,j] in Hz
//! acquire B,C 4 0.001       # spins, duration, dt
//! ```
//!
//! A frame statement before the first pulse or delay sets the initial frame;
//! later ones switch frames.

mod ast;
mod error;
mod parser;
mod printer;

pub use ast::{BinOp, Expr, FrameDecl, Program, PulseAxis, PulseTarget, Statement};
pub use error::{ParseError, ParseErrorKind};
pub use parser::{evaluate, parse};
pub use printer::{print_expr, print_program, print_statement};

use crate::error::{Error, Result};
use crate::pulse::{uncoupling_offsets, Frame};
use crate::readout::Acquisition;
use crate::sequence::{PulseSequence, PulseSpec, SequenceEvent};
use crate::spin::{Axis, SpinSystem};

/// An acquisition requested by the program.
#[derive(Debug, Clone, PartialEq)]
pub struct AcquireStep {
    /// Number of sequence events executed before acquiring.
    pub after_event: usize,
    pub spins: Vec<usize>,
    pub acquisition: Acquisition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledProgram {
    pub system_path: Option<String>,
    pub sequence: PulseSequence,
    pub acquisitions: Vec<AcquireStep>,
}

/// Parses `text` and resolves it against `sys`.
pub fn parse_program(text: &str, sys: &SpinSystem) -> Result<CompiledProgram> {
    let program = parser::parse_checked(text, Some(sys))?;
    compile(&program, sys)
}

/// Reads the `system` path of a program without resolving anything else.
pub fn system_path(text: &str) -> std::result::Result<Option<String>, ParseError> {
    Ok(parse(text)?.statements.into_iter().find_map(|s| match s {
        Statement::System(p) => Some(p),
        _ => None,
    }))
}

/// Lowers a parsed program to a pulse sequence.
pub fn compile(program: &Program, sys: &SpinSystem) -> Result<CompiledProgram> {
    let mut seq = PulseSequence::new("program", Frame::resonant(sys.n()));
    let mut system_path = None;
    let mut acquisitions = Vec::new();
    let expr = |e: &Expr| evaluate(e, sys).map_err(Error::InvalidSequence);
    for s in &program.statements {
        match s {
            Statement::System(p) => system_path = Some(p.clone()),
            Statement::Pulse(targets) => {
                let specs = targets
                    .iter()
                    .map(|t| {
                        let axis = match t.axis {
                            PulseAxis::X => Axis::X,
                            PulseAxis::Y => Axis::Y,
                        };
                        Ok(PulseSpec::new(sys.index_of(&t.spin)?, axis, t.degrees.to_radians()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                seq.simultaneous(specs);
            }
            Statement::Delay(e) => {
                let t = expr(e)?;
                if t < 0.0 {
                    return Err(Error::NegativeDuration(t));
                }
                seq.delay(t);
            }
            Statement::Frame(decl) => {
                let frame = match decl {
                    FrameDecl::Resonant => Frame::resonant(sys.n()),
                    FrameDecl::Uncouple(l) => uncoupling_offsets(sys, sys.index_of(l)?)?,
                    FrameDecl::Offsets(list) => {
                        let mut d = vec![0.0; sys.n()];
                        for (spin, hz) in list {
                            d[sys.index_of(spin)?] = *hz;
                        }
                        Frame::new(d)?
                    }
                };
                if seq.is_empty() {
                    seq.initial_frame = frame;
                } else {
                    seq.frame_shift(frame);
                }
            }
            Statement::Acquire { spins, duration, dt } => {
                let spins = spins.iter().map(|s| sys.index_of(s)).collect::<Result<Vec<_>>>()?;
                let acquisition = Acquisition::new(expr(duration)?, expr(dt)?)?;
                acquisitions.push(AcquireStep { after_event: seq.len(), spins, acquisition });
            }
        }
    }
    seq.validate(sys)?;
    Ok(CompiledProgram { system_path, sequence: seq, acquisitions })
}

/// Program text for a sequence. Delays are written in seconds and frames as
/// explicit offsets.
pub fn sequence_to_program(seq: &PulseSequence, sys: &SpinSystem, system_path: Option<&str>) -> Program {
    let frame_stmt = |f: &Frame| {
        if f.offsets_hz().iter().all(|&d| d == 0.0) {
            Statement::Frame(FrameDecl::Resonant)
        } else {
            Statement::Frame(FrameDecl::Offsets(
                f.offsets_hz()
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| **d != 0.0)
                    .map(|(i, d)| (sys.label(i).to_string(), *d))
                    .collect(),
            ))
        }
    };
    let mut statements = Vec::new();
    if let Some(p) = system_path {
        statements.push(Statement::System(p.to_string()));
    }
    statements.push(frame_stmt(&seq.initial_frame));
    for e in &seq.events {
        statements.push(match e {
            SequenceEvent::Pulse(specs) => Statement::Pulse(
                specs
                    .iter()
                    .map(|p| {
                        let (axis, sign) = match p.axis {
                            Axis::X => (PulseAxis::X, 1.0),
                            Axis::Y => (PulseAxis::Y, 1.0),
                            Axis::MinusX => (PulseAxis::X, -1.0),
                            Axis::MinusY => (PulseAxis::Y, -1.0),
                        };
                        PulseTarget { spin: sys.label(p.spin).to_string(), axis, degrees: sign * p.angle.to_degrees() }
                    })
                    .collect(),
            ),
            SequenceEvent::Delay(t) => Statement::Delay(Expr::Num(*t)),
            SequenceEvent::FrameShift(f) => frame_stmt(f),
        });
    }
    Program { statements }
}
