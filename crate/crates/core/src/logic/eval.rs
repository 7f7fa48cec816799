//! Brute-force evaluation over the whole universe.
//!
//! Formulas are compiled to slot-indexed nodes first. A chain of existential
//! quantifiers over a conjunction is evaluated as a nested loop that checks
//! each conjunct as soon as its variables are bound; universal chains over
//! disjunctions are handled dually. This changes only the order of work, not
//! the semantics.

use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::formula::{Formula, Var};
use crate::error::{Error, Result};
use crate::gaifman::GaifmanGraph;
use crate::structure::FiniteStructure;
use crate::Element;

pub type Assignment = BTreeMap<Var, Element>;

pub fn evaluate(s: &FiniteStructure, f: &Formula, assignment: &Assignment) -> Result<bool> {
    Evaluator::new(s).evaluate(f, assignment)
}

/// Convenience for a single free variable.
pub fn evaluate_at(s: &FiniteStructure, f: &Formula, var: &Var, element: Element) -> Result<bool> {
    evaluate(s, f, &Assignment::from([(var.clone(), element)]))
}

enum Table {
    Unary(Vec<bool>),
    Binary(Vec<bool>),
    General(HashSet<Vec<Element>>),
}

const UNREACHABLE: u32 = u32::MAX;

pub struct Evaluator<'a> {
    structure: &'a FiniteStructure,
    tables: Vec<Table>,
    distances: OnceCell<Vec<Vec<u32>>>,
}

/// A formula compiled against a structure's signature, with its free
/// variables bound to the first slots in the given order.
#[derive(Debug, Clone)]
pub struct Compiled {
    root: Node,
    slots: usize,
    free: Vec<Var>,
}

impl Compiled {
    pub fn free_vars(&self) -> &[Var] {
        &self.free
    }
}

#[derive(Debug, Clone)]
enum Node {
    Const(bool),
    Eq(usize, usize),
    Atom(usize, Vec<usize>),
    DistLe(usize, usize, usize),
    DistGt(usize, usize, usize),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    /// `levels[i]` is checked once the first `i` block slots are bound.
    Exists {
        slots: Vec<usize>,
        levels: Vec<Vec<Node>>,
    },
}

impl<'a> Evaluator<'a> {
    pub fn new(structure: &'a FiniteStructure) -> Self {
        let n = structure.size();
        let tables = structure
            .tables()
            .iter()
            .enumerate()
            .map(|(i, table)| match structure.signature().arity(i) {
                1 => {
                    let mut bits = vec![false; n];
                    table.iter().for_each(|t| bits[t[0]] = true);
                    Table::Unary(bits)
                }
                2 => {
                    let mut bits = vec![false; n * n];
                    table.iter().for_each(|t| bits[t[0] * n + t[1]] = true);
                    Table::Binary(bits)
                }
                _ => Table::General(table.iter().cloned().collect()),
            })
            .collect();
        Evaluator {
            structure,
            tables,
            distances: OnceCell::new(),
        }
    }

    pub fn structure(&self) -> &FiniteStructure {
        self.structure
    }

    pub fn evaluate(&self, f: &Formula, assignment: &Assignment) -> Result<bool> {
        let free: Vec<Var> = f.free_vars().into_iter().collect();
        let compiled = self.compile(f, &free)?;
        let values = free
            .iter()
            .map(|v| {
                assignment
                    .get(v)
                    .copied()
                    .ok_or_else(|| Error::UnboundVariable(v.name().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        self.holds(&compiled, &values)
    }

    /// Compiles `f` with `free` occupying the leading slots. Every free
    /// variable of `f` must be listed.
    pub fn compile(&self, f: &Formula, free: &[Var]) -> Result<Compiled> {
        let mut c = Compiler {
            eval: self,
            scope: Vec::new(),
            next: 0,
        };
        for v in free {
            let slot = c.next;
            c.next += 1;
            c.scope.push((v.clone(), slot));
        }
        let (root, _) = c.compile(f)?;
        Ok(Compiled {
            root,
            slots: c.next,
            free: free.to_vec(),
        })
    }

    pub fn holds(&self, compiled: &Compiled, values: &[Element]) -> Result<bool> {
        if values.len() != compiled.free.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                compiled.free.len(),
                values.len()
            )));
        }
        for &v in values {
            self.structure.check_element(v)?;
        }
        let mut env = vec![0; compiled.slots];
        env[..values.len()].copy_from_slice(values);
        Ok(self.run(&compiled.root, &mut env))
    }

    fn distance_table(&self) -> &Vec<Vec<u32>> {
        self.distances.get_or_init(|| {
            let g = GaifmanGraph::of(self.structure);
            (0..self.structure.size())
                .map(|a| {
                    g.distances_from(a)
                        .into_iter()
                        .map(|d| d.map_or(UNREACHABLE, |d| d as u32))
                        .collect()
                })
                .collect()
        })
    }

    fn run(&self, node: &Node, env: &mut Vec<Element>) -> bool {
        match node {
            Node::Const(b) => *b,
            Node::Eq(a, b) => env[*a] == env[*b],
            Node::Atom(rel, args) => match &self.tables[*rel] {
                Table::Unary(bits) => bits[env[args[0]]],
                Table::Binary(bits) => bits[env[args[0]] * self.structure.size() + env[args[1]]],
                Table::General(set) => {
                    let t: Vec<Element> = args.iter().map(|&s| env[s]).collect();
                    set.contains(&t)
                }
            },
            Node::DistLe(k, a, b) => {
                let d = self.distance_table()[env[*a]][env[*b]];
                d != UNREACHABLE && d as usize <= *k
            }
            Node::DistGt(k, a, b) => {
                let d = self.distance_table()[env[*a]][env[*b]];
                d == UNREACHABLE || d as usize > *k
            }
            Node::Not(f) => !self.run(f, env),
            Node::And(fs) => fs.iter().all(|f| self.run(f, env)),
            Node::Or(fs) => fs.iter().any(|f| self.run(f, env)),
            Node::Exists { slots, levels } => self.block(slots, levels, 0, env),
        }
    }

    fn block(&self, slots: &[usize], levels: &[Vec<Node>], depth: usize, env: &mut Vec<Element>) -> bool {
        if !levels[depth].iter().all(|f| self.run(f, env)) {
            return false;
        }
        if depth == slots.len() {
            return true;
        }
        for e in 0..self.structure.size() {
            env[slots[depth]] = e;
            if self.block(slots, levels, depth + 1, env) {
                return true;
            }
        }
        false
    }
}

struct Compiler<'e, 'a> {
    eval: &'e Evaluator<'a>,
    scope: Vec<(Var, usize)>,
    next: usize,
}

impl Compiler<'_, '_> {
    fn slot(&self, v: &Var) -> Result<usize> {
        self.scope
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|&(_, s)| s)
            .ok_or_else(|| Error::UnboundVariable(v.name().to_string()))
    }

    fn compile(&mut self, f: &Formula) -> Result<(Node, BTreeSet<usize>)> {
        Ok(match f {
            Formula::True => (Node::Const(true), BTreeSet::new()),
            Formula::False => (Node::Const(false), BTreeSet::new()),
            Formula::Eq(a, b) => {
                let (a, b) = (self.slot(a)?, self.slot(b)?);
                (Node::Eq(a, b), BTreeSet::from([a, b]))
            }
            Formula::Atom { relation, args } => {
                let sig = self.eval.structure.signature();
                let rel = sig
                    .index_of(relation)
                    .ok_or_else(|| Error::UnknownRelation(relation.clone()))?;
                if sig.arity(rel) != args.len() {
                    return Err(Error::ArityMismatch {
                        relation: relation.clone(),
                        expected: sig.arity(rel),
                        found: args.len(),
                    });
                }
                let slots = args.iter().map(|v| self.slot(v)).collect::<Result<Vec<_>>>()?;
                let used = slots.iter().copied().collect();
                (Node::Atom(rel, slots), used)
            }
            Formula::DistLe { bound, left, right } | Formula::DistGt { bound, left, right } => {
                let (a, b) = (self.slot(left)?, self.slot(right)?);
                let node = if matches!(f, Formula::DistLe { .. }) {
                    Node::DistLe(*bound, a, b)
                } else {
                    Node::DistGt(*bound, a, b)
                };
                (node, BTreeSet::from([a, b]))
            }
            Formula::Not(g) => {
                let (n, used) = self.compile(g)?;
                (Node::Not(Box::new(n)), used)
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let mut nodes = Vec::with_capacity(gs.len());
                let mut used = BTreeSet::new();
                for g in gs {
                    let (n, u) = self.compile(g)?;
                    nodes.push(n);
                    used.extend(u);
                }
                let node = if matches!(f, Formula::And(_)) {
                    Node::And(nodes)
                } else {
                    Node::Or(nodes)
                };
                (node, used)
            }
            Formula::Implies(a, b) => {
                let (na, ua) = self.compile(a)?;
                let (nb, ub) = self.compile(b)?;
                (
                    Node::Or(vec![Node::Not(Box::new(na)), nb]),
                    ua.union(&ub).copied().collect(),
                )
            }
            Formula::Exists(..) => {
                let mut vars = Vec::new();
                let mut body = f;
                while let Formula::Exists(v, g) = body {
                    vars.push(v.clone());
                    body = g;
                }
                let mut conjuncts = Vec::new();
                flatten_and(body, &mut conjuncts);
                let conjuncts: Vec<Formula> = conjuncts.into_iter().cloned().collect();
                self.block(&vars, &conjuncts, false)?
            }
            Formula::Forall(..) => {
                let mut vars = Vec::new();
                let mut body = f;
                while let Formula::Forall(v, g) = body {
                    vars.push(v.clone());
                    body = g;
                }
                let mut disjuncts = Vec::new();
                flatten_or(body, &mut disjuncts);
                let negated: Vec<Formula> = disjuncts.into_iter().map(Formula::not).collect();
                self.block(&vars, &negated, true)?
            }
        })
    }

    fn block(&mut self, vars: &[Var], conjuncts: &[Formula], negate: bool) -> Result<(Node, BTreeSet<usize>)> {
        let depth = self.scope.len();
        let mut slots = Vec::with_capacity(vars.len());
        for v in vars {
            let s = self.next;
            self.next += 1;
            self.scope.push((v.clone(), s));
            slots.push(s);
        }
        let mut levels = vec![Vec::new(); vars.len() + 1];
        let mut used_outside = BTreeSet::new();
        for c in conjuncts {
            let compiled = self.compile(c);
            let (node, used) = match compiled {
                Ok(x) => x,
                Err(e) => {
                    self.scope.truncate(depth);
                    return Err(e);
                }
            };
            let level = slots.iter().rposition(|s| used.contains(s)).map_or(0, |i| i + 1);
            used_outside.extend(used.into_iter().filter(|s| !slots.contains(s)));
            levels[level].push(node);
        }
        self.scope.truncate(depth);
        let node = Node::Exists { slots, levels };
        Ok((if negate { Node::Not(Box::new(node)) } else { node }, used_outside))
    }
}

fn flatten_and<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
    match f {
        Formula::And(gs) => gs.iter().for_each(|g| flatten_and(g, out)),
        other => out.push(other),
    }
}

/// Disjuncts of `f`, expanding `a → b` into `¬a, b`.
fn flatten_or(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Or(gs) => gs.iter().for_each(|g| flatten_or(g, out)),
        Formula::Implies(a, b) => {
            out.push(Formula::not((**a).clone()));
            flatten_or(b, out);
        }
        other => out.push(other.clone()),
    }
}
