/// A parsed pulse program. Comments and layout are not kept.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub statements: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    /// `system <path>`
    System(String),
    /// `pulse B,C y90` or, with a rotation per spin, `pulse B:x90,C:x-90`.
    /// All targets are pulsed simultaneously.
    Pulse(Vec<PulseTarget>),
    /// `delay <expr>`, seconds.
    Delay(Expr),
    Frame(FrameDecl),
    /// `acquire <spins> <duration> <dt>`
    Acquire { spins: Vec<String>, duration: Expr, dt: Expr },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseTarget {
    pub spin: String,
    pub axis: PulseAxis,
    /// Signed rotation angle in degrees; negative turns about −axis.
    pub degrees: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseAxis {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrameDecl {
    /// `frame resonant`
    Resonant,
    /// `frame uncouple A`
    Uncouple(String),
    /// `frame offsets B=61.05,C=-37.5` (Hz; unlisted spins stay at 0)
    Offsets(Vec<(String, f64)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Delay arithmetic over numbers and couplings (Hz).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// `J[B,C]`
    Coupling(String, String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub(crate) fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Num(_) | Expr::Coupling(..) => 4,
        }
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }
}
