use crate::error::{CgpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    Boolean,
    Real,
}

impl FunctionKind {
    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Boolean => "boolean",
            FunctionKind::Real => "real",
        }
    }
}

/// Boolean primitives operating bitwise on packed truth-table words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolFn {
    And,
    Or,
    Xor,
    Nor,
    /// AND with the second input inverted: `a & !b`.
    AndNot,
}

impl BoolFn {
    pub fn name(self) -> &'static str {
        match self {
            BoolFn::And => "AND",
            BoolFn::Or => "OR",
            BoolFn::Xor => "XOR",
            BoolFn::Nor => "NOR",
            BoolFn::AndNot => "AND*",
        }
    }

    pub fn apply(self, a: u64, b: u64) -> u64 {
        match self {
            BoolFn::And => a & b,
            BoolFn::Or => a | b,
            BoolFn::Xor => a ^ b,
            BoolFn::Nor => !(a | b),
            BoolFn::AndNot => a & !b,
        }
    }
}

/// Real-valued primitives with protected semantics: division by zero yields
/// 1.0 and the log of zero yields 0.0. Exponentials are unprotected; the
/// fitness layer maps non-finite results to worst fitness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealFn {
    Add,
    Sub,
    Mul,
    Div,
    Sin,
    Cos,
    Ln,
    Exp,
}

impl RealFn {
    pub fn name(self) -> &'static str {
        match self {
            RealFn::Add => "+",
            RealFn::Sub => "-",
            RealFn::Mul => "*",
            RealFn::Div => "/",
            RealFn::Sin => "sin",
            RealFn::Cos => "cos",
            RealFn::Ln => "ln",
            RealFn::Exp => "exp",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            RealFn::Add | RealFn::Sub | RealFn::Mul | RealFn::Div => 2,
            RealFn::Sin | RealFn::Cos | RealFn::Ln | RealFn::Exp => 1,
        }
    }

    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            RealFn::Add => a + b,
            RealFn::Sub => a - b,
            RealFn::Mul => a * b,
            RealFn::Div => {
                if b == 0.0 {
                    1.0
                } else {
                    a / b
                }
            }
            RealFn::Sin => a.sin(),
            RealFn::Cos => a.cos(),
            RealFn::Ln => {
                if a == 0.0 {
                    0.0
                } else {
                    a.abs().ln()
                }
            }
            RealFn::Exp => a.exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    Bool(BoolFn),
    Real(RealFn),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionEntry {
    pub name: &'static str,
    pub arity: usize,
    pub primitive: Primitive,
}

/// An ordered set of primitives; function genes index into it.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSet {
    kind: FunctionKind,
    entries: Vec<FunctionEntry>,
}

impl FunctionSet {
    pub fn boolean(ops: &[BoolFn]) -> Self {
        FunctionSet {
            kind: FunctionKind::Boolean,
            entries: ops
                .iter()
                .map(|&op| FunctionEntry {
                    name: op.name(),
                    arity: 2,
                    primitive: Primitive::Bool(op),
                })
                .collect(),
        }
    }

    pub fn real(ops: &[RealFn]) -> Self {
        FunctionSet {
            kind: FunctionKind::Real,
            entries: ops
                .iter()
                .map(|&op| FunctionEntry {
                    name: op.name(),
                    arity: op.arity(),
                    primitive: Primitive::Real(op),
                })
                .collect(),
        }
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FunctionEntry] {
        &self.entries
    }

    pub fn arity(&self, function: usize) -> usize {
        self.entries[function].arity
    }

    pub fn primitive(&self, function: usize) -> Primitive {
        self.entries[function].primitive
    }

    pub fn max_arity(&self) -> usize {
        self.entries.iter().map(|e| e.arity).max().unwrap_or(0)
    }

    pub fn expect_kind(&self, kind: FunctionKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(CgpError::KindMismatch {
                expected: kind.name(),
                actual: self.kind.name(),
            })
        }
    }
}
