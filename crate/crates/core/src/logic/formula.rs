use std::collections::BTreeSet;
use std::fmt;

/// A first-order variable name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var(s.to_string())
    }
}

impl From<String> for Var {
    fn from(s: String) -> Self {
        Var(s)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// First-order formulas over a relational signature, with distance atoms
/// evaluated natively in the Gaifman graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Eq(Var, Var),
    Atom {
        relation: String,
        args: Vec<Var>,
    },
    /// Gaifman distance at most `bound`.
    DistLe {
        bound: usize,
        left: Var,
        right: Var,
    },
    /// Gaifman distance greater than `bound` (possibly infinite).
    DistGt {
        bound: usize,
        left: Var,
        right: Var,
    },
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    pub fn eq(a: impl Into<Var>, b: impl Into<Var>) -> Self {
        Formula::Eq(a.into(), b.into())
    }

    pub fn atom<V: Into<Var>>(relation: &str, args: impl IntoIterator<Item = V>) -> Self {
        Formula::Atom {
            relation: relation.to_string(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    pub fn dist_le(bound: usize, a: impl Into<Var>, b: impl Into<Var>) -> Self {
        Formula::DistLe {
            bound,
            left: a.into(),
            right: b.into(),
        }
    }

    pub fn dist_gt(bound: usize, a: impl Into<Var>, b: impl Into<Var>) -> Self {
        Formula::DistGt {
            bound,
            left: a.into(),
            right: b.into(),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Self {
        Formula::And(parts.into_iter().collect())
    }

    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Self {
        Formula::Or(parts.into_iter().collect())
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<Var>, body: Formula) -> Self {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: impl Into<Var>, body: Formula) -> Self {
        Formula::Forall(v.into(), Box::new(body))
    }

    /// `∃v1 … ∃vk body`.
    pub fn exists_all(vars: impl IntoIterator<Item = Var>, body: Formula) -> Self {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter().rev().fold(body, |acc, v| Formula::exists(v, acc))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a Var>, out: &mut BTreeSet<Var>) {
        let mut note = |v: &Var, bound: &Vec<&Var>| {
            if !bound.contains(&v) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b)
            | Formula::DistLe { left: a, right: b, .. }
            | Formula::DistGt { left: a, right: b, .. } => {
                note(a, bound);
                note(b, bound);
            }
            Formula::Atom { args, .. } => args.iter().for_each(|v| note(v, bound)),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v);
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    fn visit_vars(&self, f: &mut impl FnMut(&Var)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b)
            | Formula::DistLe { left: a, right: b, .. }
            | Formula::DistGt { left: a, right: b, .. } => {
                f(a);
                f(b);
            }
            Formula::Atom { args, .. } => args.iter().for_each(&mut *f),
            Formula::Not(g) => g.visit_vars(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_vars(f)),
            Formula::Implies(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                f(v);
                g.visit_vars(f);
            }
        }
    }

    /// Maximal quantifier nesting depth. Distance atoms count as atoms.
    pub fn quantifier_rank(&self) -> usize {
        match self {
            Formula::True
            | Formula::False
            | Formula::Eq(..)
            | Formula::Atom { .. }
            | Formula::DistLe { .. }
            | Formula::DistGt { .. } => 0,
            Formula::Not(f) => f.quantifier_rank(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::quantifier_rank).max().unwrap_or(0),
            Formula::Implies(a, b) => a.quantifier_rank().max(b.quantifier_rank()),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_rank(),
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        1 + match self {
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.size(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::size).sum(),
            Formula::Implies(a, b) => a.size() + b.size(),
            _ => 0,
        }
    }

    /// Capture-avoiding substitution of free occurrences of `from` by `to`.
    pub fn rename_free(&self, from: &Var, to: &Var) -> Formula {
        let mut fresh = FreshVars::avoiding(self.all_vars().into_iter().chain([from.clone(), to.clone()]));
        self.rename_inner(from, to, &mut fresh)
    }

    fn rename_inner(&self, from: &Var, to: &Var, fresh: &mut FreshVars) -> Formula {
        let r = |v: &Var| if v == from { to.clone() } else { v.clone() };
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Eq(a, b) => Formula::Eq(r(a), r(b)),
            Formula::Atom { relation, args } => Formula::Atom {
                relation: relation.clone(),
                args: args.iter().map(r).collect(),
            },
            Formula::DistLe { bound, left, right } => Formula::DistLe {
                bound: *bound,
                left: r(left),
                right: r(right),
            },
            Formula::DistGt { bound, left, right } => Formula::DistGt {
                bound: *bound,
                left: r(left),
                right: r(right),
            },
            Formula::Not(f) => Formula::not(f.rename_inner(from, to, fresh)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.rename_inner(from, to, fresh)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.rename_inner(from, to, fresh)).collect()),
            Formula::Implies(a, b) => {
                Formula::implies(a.rename_inner(from, to, fresh), b.rename_inner(from, to, fresh))
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let rebuilt = |v: Var, body: Formula| match self {
                    Formula::Exists(..) => Formula::exists(v, body),
                    _ => Formula::forall(v, body),
                };
                if v == from {
                    // `from` is shadowed below this binder.
                    return self.clone();
                }
                if v == to {
                    let renamed = fresh.next("v");
                    let body = f.rename_inner(v, &renamed, fresh);
                    return rebuilt(renamed, body.rename_inner(from, to, fresh));
                }
                rebuilt(v.clone(), f.rename_inner(from, to, fresh))
            }
        }
    }
}

/// Generates variable names not occurring in a given set.
#[derive(Debug, Clone)]
pub struct FreshVars {
    used: BTreeSet<Var>,
    counter: usize,
}

impl FreshVars {
    pub fn avoiding(vars: impl IntoIterator<Item = Var>) -> Self {
        FreshVars {
            used: vars.into_iter().collect(),
            counter: 0,
        }
    }

    pub fn next(&mut self, stem: &str) -> Var {
        loop {
            self.counter += 1;
            let v = Var(format!("{stem}{}", self.counter));
            if self.used.insert(v.clone()) {
                return v;
            }
        }
    }

    pub fn reserve(&mut self, v: &Var) {
        self.used.insert(v.clone());
    }
}

pub fn quantifier_rank(f: &Formula) -> usize {
    f.quantifier_rank()
}

/// S-expression rendering, accepted back by [`super::parse_formula`].
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, head: &str, parts: &[Formula]) -> fmt::Result {
            write!(f, "({head}")?;
            for p in parts {
                write!(f, " {p}")?;
            }
            f.write_str(")")
        }
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Atom { relation, args } => {
                write!(f, "({relation}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Formula::DistLe { bound, left, right } => write!(f, "(dist<= {bound} {left} {right})"),
            Formula::DistGt { bound, left, right } => write!(f, "(dist> {bound} {left} {right})"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(gs) => list(f, "and", gs),
            Formula::Or(gs) => list(f, "or", gs),
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Exists(v, g) => write!(f, "(exists {v} {g})"),
            Formula::Forall(v, g) => write!(f, "(forall {v} {g})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        let e = |a: &str, b: &str| Formula::atom("E", [a, b]);
        assert_eq!(e("x", "y").quantifier_rank(), 0);
        assert_eq!(Formula::dist_gt(5, "x", "y").quantifier_rank(), 0);
        let two = Formula::exists("x", Formula::exists("y", e("x", "y")));
        assert_eq!(two.quantifier_rank(), 2);
        let parallel = Formula::exists(
            "x",
            Formula::and([Formula::exists("y", e("y", "x")), Formula::exists("y", e("x", "y"))]),
        );
        assert_eq!(parallel.quantifier_rank(), 2);
    }

    #[test]
    fn free_variables() {
        let f = Formula::exists(
            "x",
            Formula::and([Formula::atom("E", ["x", "y"]), Formula::dist_gt(2, "x", "z")]),
        );
        let free: Vec<String> = f.free_vars().into_iter().map(|v| v.0).collect();
        assert_eq!(free, vec!["y", "z"]);
        assert!(!f.is_sentence());
    }

    #[test]
    fn renaming_avoids_capture() {
        // (exists y (E x y)) with x := y must not capture.
        let f = Formula::exists("y", Formula::atom("E", ["x", "y"]));
        let g = f.rename_free(&Var::from("x"), &Var::from("y"));
        let Formula::Exists(bound, body) = &g else { panic!() };
        assert_ne!(bound, &Var::from("y"));
        assert_eq!(**body, Formula::atom("E", ["y", bound.name()]));
        // Shadowed occurrences stay.
        let h = Formula::exists("x", Formula::atom("E", ["x", "x"]));
        assert_eq!(h.rename_free(&Var::from("x"), &Var::from("z")), h);
    }
}
