//! Filter predicates: an expression tree over column references, literals,
//! comparisons, text operators, null tests, and boolean connectives.
//!
//! Null semantics are deliberately two-valued: every comparison with a Null
//! operand evaluates to false, and only `is null` matches Null. A Null
//! produced where a boolean is consumed counts as false.

use regex::Regex;

use crate::error::{Error, Result};
use crate::relation::{BaseType, Record, Schema, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Contains,
    Matches,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Contains => "contains",
            CmpOp::Matches => "matches",
        }
    }

    fn is_ordering(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Le | CmpOp::Gt | CmpOp::Ge)
    }
}

/// Predicate expression tree. Validation against a concrete schema happens
/// when the predicate is compiled by `filter`.
#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    Column(String),
    Literal(Value),
    Compare {
        op: CmpOp,
        lhs: Box<Predicate>,
        rhs: Box<Predicate>,
    },
    IsNull(Box<Predicate>),
    Not(Box<Predicate>),
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
}

impl Predicate {
    pub fn column(name: impl Into<String>) -> Self {
        Predicate::Column(name.into())
    }

    pub fn literal(value: Value) -> Self {
        Predicate::Literal(value)
    }

    pub fn cmp(op: CmpOp, lhs: Predicate, rhs: Predicate) -> Self {
        Predicate::Compare {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn eq(lhs: Predicate, rhs: Predicate) -> Self {
        Predicate::cmp(CmpOp::Eq, lhs, rhs)
    }

    pub fn is_null(operand: Predicate) -> Self {
        Predicate::IsNull(Box::new(operand))
    }

    pub fn not(inner: Predicate) -> Self {
        Predicate::Not(Box::new(inner))
    }

    pub fn and(lhs: Predicate, rhs: Predicate) -> Self {
        Predicate::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Predicate, rhs: Predicate) -> Self {
        Predicate::Or(Box::new(lhs), Box::new(rhs))
    }

    /// Resolves columns, checks operand types, and compiles regexes, yielding
    /// an evaluator bound to `schema`. The compiled form must be boolean at
    /// the top level.
    pub fn compile(&self, schema: &Schema) -> Result<CompiledPredicate> {
        let node = compile_node(self, schema)?;
        if node_type(&node) != ExprType::Bool {
            return Err(Error::Predicate(
                "predicate does not evaluate to a boolean".to_string(),
            ));
        }
        Ok(CompiledPredicate { node })
    }
}

/// Static type of a compiled expression node. Null literals do not exist in
/// predicates, so every node has a definite type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExprType {
    Bool,
    Int,
    Float,
    Text,
    Timestamp,
}

impl From<BaseType> for ExprType {
    fn from(base: BaseType) -> Self {
        match base {
            BaseType::Bool => ExprType::Bool,
            BaseType::Int => ExprType::Int,
            BaseType::Float => ExprType::Float,
            BaseType::Text => ExprType::Text,
            BaseType::Timestamp => ExprType::Timestamp,
        }
    }
}

#[derive(Debug)]
enum Node {
    Column { index: usize, ty: ExprType },
    Literal(Value),
    Compare { op: CmpOp, lhs: Box<Node>, rhs: Box<Node> },
    Regex { operand: Box<Node>, regex: Regex },
    IsNull(Box<Node>),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
}

fn node_type(node: &Node) -> ExprType {
    match node {
        Node::Column { ty, .. } => *ty,
        Node::Literal(v) => match v {
            Value::Bool(_) => ExprType::Bool,
            Value::Int(_) => ExprType::Int,
            Value::Float(_) => ExprType::Float,
            Value::Text(_) => ExprType::Text,
            Value::Timestamp(_) => ExprType::Timestamp,
            Value::Null => unreachable!("null literal rejected during compilation"),
        },
        Node::Compare { .. }
        | Node::Regex { .. }
        | Node::IsNull(_)
        | Node::Not(_)
        | Node::And(_, _)
        | Node::Or(_, _) => ExprType::Bool,
    }
}

fn compile_node(pred: &Predicate, schema: &Schema) -> Result<Node> {
    match pred {
        Predicate::Column(name) => {
            let index = schema
                .index_of(name)
                .ok_or_else(|| Error::Predicate(format!("unresolved column {name:?}")))?;
            Ok(Node::Column {
                index,
                ty: schema.columns()[index].ty.base.into(),
            })
        }
        Predicate::Literal(value) => {
            if value.is_null() {
                return Err(Error::Predicate(
                    "null literal is not allowed; use `is null`".to_string(),
                ));
            }
            if let Value::Float(f) = value {
                if f.is_nan() {
                    return Err(Error::Predicate("NaN literal".to_string()));
                }
            }
            Ok(Node::Literal(value.clone()))
        }
        Predicate::Compare { op, lhs, rhs } => {
            let lhs_node = compile_node(lhs, schema)?;
            if *op == CmpOp::Matches {
                if node_type(&lhs_node) != ExprType::Text {
                    return Err(Error::Predicate(format!(
                        "matches requires a text operand, got {:?}",
                        node_type(&lhs_node)
                    )));
                }
                let pattern = match rhs.as_ref() {
                    Predicate::Literal(Value::Text(p)) => p,
                    _ => {
                        return Err(Error::Predicate(
                            "matches requires a string literal pattern".to_string(),
                        ))
                    }
                };
                let regex = Regex::new(pattern)
                    .map_err(|e| Error::Predicate(format!("invalid regex {pattern:?}: {e}")))?;
                return Ok(Node::Regex {
                    operand: Box::new(lhs_node),
                    regex,
                });
            }
            let rhs_node = compile_node(rhs, schema)?;
            let (lt, rt) = (node_type(&lhs_node), node_type(&rhs_node));
            if lt != rt {
                return Err(Error::Predicate(format!(
                    "type-incomparable operands for {}: {lt:?} vs {rt:?}",
                    op.symbol()
                )));
            }
            if *op == CmpOp::Contains && lt != ExprType::Text {
                return Err(Error::Predicate(format!(
                    "contains requires text operands, got {lt:?}"
                )));
            }
            if op.is_ordering() && lt == ExprType::Bool {
                return Err(Error::Predicate(format!(
                    "ordering comparison {} is not defined for bool",
                    op.symbol()
                )));
            }
            Ok(Node::Compare {
                op: *op,
                lhs: Box::new(lhs_node),
                rhs: Box::new(rhs_node),
            })
        }
        Predicate::IsNull(inner) => Ok(Node::IsNull(Box::new(compile_node(inner, schema)?))),
        Predicate::Not(inner) => {
            let node = compile_node(inner, schema)?;
            if node_type(&node) != ExprType::Bool {
                return Err(Error::Predicate("! applied to a non-boolean".to_string()));
            }
            Ok(Node::Not(Box::new(node)))
        }
        Predicate::And(l, r) | Predicate::Or(l, r) => {
            let ln = compile_node(l, schema)?;
            let rn = compile_node(r, schema)?;
            for n in [&ln, &rn] {
                if node_type(n) != ExprType::Bool {
                    return Err(Error::Predicate(
                        "boolean connective applied to a non-boolean".to_string(),
                    ));
                }
            }
            Ok(match pred {
                Predicate::And(_, _) => Node::And(Box::new(ln), Box::new(rn)),
                _ => Node::Or(Box::new(ln), Box::new(rn)),
            })
        }
    }
}

/// A predicate resolved and type-checked against one schema.
#[derive(Debug)]
pub struct CompiledPredicate {
    node: Node,
}

impl CompiledPredicate {
    pub fn matches(&self, record: &Record) -> bool {
        truthy(eval(&self.node, record))
    }
}

/// Null in boolean position is false.
fn truthy(value: Value) -> bool {
    matches!(value, Value::Bool(true))
}

fn eval(node: &Node, record: &Record) -> Value {
    match node {
        Node::Column { index, .. } => record.values[*index].clone(),
        Node::Literal(v) => v.clone(),
        Node::Compare { op, lhs, rhs } => {
            let l = eval(lhs, record);
            let r = eval(rhs, record);
            if l.is_null() || r.is_null() {
                return Value::Bool(false);
            }
            let result = match op {
                CmpOp::Eq => l == r,
                CmpOp::Ne => l != r,
                CmpOp::Lt => l.sort_cmp(&r).is_lt(),
                CmpOp::Le => l.sort_cmp(&r).is_le(),
                CmpOp::Gt => l.sort_cmp(&r).is_gt(),
                CmpOp::Ge => l.sort_cmp(&r).is_ge(),
                CmpOp::Contains => match (&l, &r) {
                    (Value::Text(hay), Value::Text(needle)) => hay.contains(needle.as_str()),
                    _ => false,
                },
                CmpOp::Matches => unreachable!("matches compiles to Node::Regex"),
            };
            Value::Bool(result)
        }
        Node::Regex { operand, regex } => {
            let v = eval(operand, record);
            match v {
                Value::Text(s) => Value::Bool(regex.is_match(&s)),
                _ => Value::Bool(false),
            }
        }
        Node::IsNull(inner) => Value::Bool(eval(inner, record).is_null()),
        Node::Not(inner) => Value::Bool(!truthy(eval(inner, record))),
        Node::And(l, r) => Value::Bool(truthy(eval(l, record)) && truthy(eval(r, record))),
        Node::Or(l, r) => Value::Bool(truthy(eval(l, record)) || truthy(eval(r, record))),
    }
}
