//! Formula constructions: relativization to balls, ball axioms and basic
//! local sentences.

use std::collections::BTreeMap;

use super::formula::{Formula, FreshVars, Var};
use crate::error::{Error, Result};
use crate::gaifman::GaifmanGraph;
use crate::structure::{PointedStructure, Signature};

fn require_single_free(f: &Formula, var: &Var) -> Result<()> {
    let free = f.free_vars();
    if free.iter().any(|v| v != var) {
        return Err(Error::FreeVariables {
            expected: vec![var.name().to_string()],
            found: free.iter().map(|v| v.name().to_string()).collect(),
        });
    }
    Ok(())
}

/// Rewrites `f` so that, evaluated at `center ↦ a`, it holds exactly when `f`
/// holds in the induced `l`-ball around `a`.
///
/// Every quantifier is guarded by `dist<= l` to the centre. Distance atoms
/// inside `f` speak about distances in the ball, which may exceed distances
/// in the whole structure, so they are expanded into guarded path formulas
/// over the Gaifman adjacency of `signature`.
pub fn relativize_to_ball(f: &Formula, center: &Var, l: usize, signature: &Signature) -> Result<Formula> {
    require_single_free(f, center)?;
    let mut r = Relativizer {
        center: center.clone(),
        l,
        signature,
        fresh: FreshVars::avoiding(f.all_vars().into_iter().chain([center.clone()])),
    };
    let mut env = BTreeMap::from([(center.clone(), center.clone())]);
    r.go(f, &mut env)
}

struct Relativizer<'s> {
    center: Var,
    l: usize,
    signature: &'s Signature,
    fresh: FreshVars,
}

impl Relativizer<'_> {
    fn guard(&self, v: &Var) -> Formula {
        Formula::dist_le(self.l, self.center.clone(), v.clone())
    }

    fn go(&mut self, f: &Formula, env: &mut BTreeMap<Var, Var>) -> Result<Formula> {
        let look = |v: &Var, env: &BTreeMap<Var, Var>| {
            env.get(v)
                .cloned()
                .ok_or_else(|| Error::UnboundVariable(v.name().to_string()))
        };
        Ok(match f {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Eq(a, b) => Formula::Eq(look(a, env)?, look(b, env)?),
            Formula::Atom { relation, args } => Formula::Atom {
                relation: relation.clone(),
                args: args.iter().map(|v| look(v, env)).collect::<Result<_>>()?,
            },
            Formula::DistLe { bound, left, right } => self.within(*bound, &look(left, env)?, &look(right, env)?),
            Formula::DistGt { bound, left, right } => {
                Formula::not(self.within(*bound, &look(left, env)?, &look(right, env)?))
            }
            Formula::Not(g) => Formula::not(self.go(g, env)?),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| self.go(g, env)).collect::<Result<_>>()?),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| self.go(g, env)).collect::<Result<_>>()?),
            Formula::Implies(a, b) => Formula::implies(self.go(a, env)?, self.go(b, env)?),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let renamed = self.fresh.next("r");
                let saved = env.insert(v.clone(), renamed.clone());
                let body = self.go(g, env);
                match saved {
                    Some(old) => env.insert(v.clone(), old),
                    None => env.remove(v),
                };
                let body = body?;
                if matches!(f, Formula::Exists(..)) {
                    Formula::exists(renamed.clone(), Formula::and([self.guard(&renamed), body]))
                } else {
                    Formula::forall(renamed.clone(), Formula::implies(self.guard(&renamed), body))
                }
            }
        })
    }

    /// Ball distance between `a` and `b` is at most `k`.
    fn within(&mut self, k: usize, a: &Var, b: &Var) -> Formula {
        // Any two ball elements are joined through the centre.
        if k >= 2 * self.l {
            return Formula::True;
        }
        if k == 0 {
            return Formula::Eq(a.clone(), b.clone());
        }
        let mut parts = vec![Formula::Eq(a.clone(), b.clone()), self.adjacent(a, b)];
        if k >= 2 {
            let w = self.fresh.next("w");
            let step = self.adjacent(a, &w);
            let rest = self.within(k - 1, &w, b);
            parts.push(Formula::exists(w.clone(), Formula::and([self.guard(&w), step, rest])));
        }
        Formula::Or(parts)
    }

    /// Gaifman adjacency inside the ball.
    fn adjacent(&mut self, a: &Var, b: &Var) -> Formula {
        let mut options = Vec::new();
        for symbol in self.signature.relations() {
            let arity = symbol.arity;
            for i in 0..arity {
                for j in 0..arity {
                    if i == j {
                        continue;
                    }
                    let mut args = Vec::with_capacity(arity);
                    let mut others = Vec::new();
                    for p in 0..arity {
                        args.push(if p == i {
                            a.clone()
                        } else if p == j {
                            b.clone()
                        } else {
                            let z = self.fresh.next("z");
                            others.push(z.clone());
                            z
                        });
                    }
                    let atom = Formula::Atom {
                        relation: symbol.name.clone(),
                        args,
                    };
                    let guards: Vec<Formula> = others.iter().map(|z| self.guard(z)).collect();
                    let body = if guards.is_empty() {
                        atom
                    } else {
                        Formula::and(guards.into_iter().chain([atom]))
                    };
                    options.push(Formula::exists_all(others, body));
                }
            }
        }
        Formula::and([Formula::not(Formula::Eq(a.clone(), b.clone())), Formula::Or(options)])
    }
}

/// A formula in the single free variable `var` that holds at `a` exactly when
/// the `l`-ball around `a` is isomorphic to `b` as a pointed structure.
pub fn ball_axiom(b: &PointedStructure, l: usize, var: &Var) -> Result<Formula> {
    if b.points.len() != 1 {
        return Err(Error::PointCountMismatch {
            left: b.points.len(),
            right: 1,
        });
    }
    let s = &b.structure;
    let point = b.points[0];
    let graph = GaifmanGraph::of(s);
    for (element, d) in graph.distances_from(point).into_iter().enumerate() {
        if d.is_none_or(|d| d > l) {
            return Err(Error::RadiusInconsistent {
                element,
                distance: d.map_or_else(|| "inf".to_string(), |d| d.to_string()),
                radius: l,
            });
        }
    }

    let mut fresh = FreshVars::avoiding([var.clone()]);
    let names: Vec<Var> = s
        .universe()
        .map(|e| if e == point { var.clone() } else { fresh.next("y") })
        .collect();
    let witnesses: Vec<Var> = s.universe().filter(|&e| e != point).map(|e| names[e].clone()).collect();

    let mut conjuncts = Vec::new();
    for e in s.universe() {
        for f in e + 1..s.size() {
            conjuncts.push(Formula::not(Formula::Eq(names[e].clone(), names[f].clone())));
        }
    }
    for y in &witnesses {
        conjuncts.push(Formula::dist_le(l, var.clone(), y.clone()));
    }
    for (index, symbol) in s.signature().relations().iter().enumerate() {
        let mut tuple = vec![0; symbol.arity];
        loop {
            let atom = Formula::Atom {
                relation: symbol.name.clone(),
                args: tuple.iter().map(|&e| names[e].clone()).collect(),
            };
            conjuncts.push(if s.contains(index, &tuple) {
                atom
            } else {
                Formula::not(atom)
            });
            if !advance(&mut tuple, s.size()) {
                break;
            }
        }
    }
    let z = fresh.next("z");
    let listed = s.universe().map(|e| Formula::Eq(z.clone(), names[e].clone()));
    conjuncts.push(Formula::forall(
        z.clone(),
        Formula::implies(Formula::dist_le(l, var.clone(), z.clone()), Formula::or(listed)),
    ));
    Ok(Formula::exists_all(witnesses, Formula::And(conjuncts)))
}

/// Odometer over `[0, n)^len`; false once it wraps.
fn advance(tuple: &mut [usize], n: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

/// `∃x1…xn` pairwise more than `2l` apart, each satisfying `psi`.
pub fn basic_local_sentence(psi: &Formula, n: usize, l: usize) -> Result<Formula> {
    if n < 1 {
        return Err(Error::InvalidParameter(
            "a basic local sentence needs at least one witness".into(),
        ));
    }
    let free: Vec<Var> = psi.free_vars().into_iter().collect();
    if free.len() != 1 {
        return Err(Error::FreeVariables {
            expected: vec!["<one variable>".into()],
            found: free.iter().map(|v| v.name().to_string()).collect(),
        });
    }
    let mut fresh = FreshVars::avoiding(psi.all_vars());
    let xs: Vec<Var> = (0..n).map(|_| fresh.next("x")).collect();
    let mut conjuncts = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            conjuncts.push(Formula::dist_gt(2 * l, xs[i].clone(), xs[j].clone()));
        }
    }
    conjuncts.extend(xs.iter().map(|x| psi.rename_free(&free[0], x)));
    let body = if conjuncts.len() == 1 {
        conjuncts.pop().expect("one conjunct")
    } else {
        Formula::And(conjuncts)
    };
    Ok(Formula::exists_all(xs, body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{dipath, graph_signature, k5_subdivision};
    use crate::gaifman::ball;
    use crate::logic::eval::evaluate_at;
    use crate::logic::parse::parse_formula;

    fn x() -> Var {
        Var::from("x")
    }

    #[test]
    fn relativized_neighbour() {
        let p3 = dipath(3).unwrap();
        let f = parse_formula("(exists y (E x y))").unwrap();
        let r = relativize_to_ball(&f, &x(), 1, &graph_signature()).unwrap();
        assert!(evaluate_at(&p3, &r, &x(), 0).unwrap());

        let two = parse_formula("(exists (y z) (and (E x y) (E y z)))").unwrap();
        let r = relativize_to_ball(&two, &x(), 1, &graph_signature()).unwrap();
        assert!(evaluate_at(&p3, &two, &x(), 0).unwrap());
        assert!(!evaluate_at(&p3, &r, &x(), 0).unwrap());
    }

    #[test]
    fn relativization_rejects_extra_free_vars() {
        let f = parse_formula("(E x y)").unwrap();
        assert!(matches!(
            relativize_to_ball(&f, &x(), 1, &graph_signature()),
            Err(Error::FreeVariables { .. })
        ));
    }

    #[test]
    fn shadowed_centre_is_renamed() {
        let p3 = dipath(3).unwrap();
        // The inner x is bound; only elements within distance 1 of 0 count.
        let f = parse_formula("(exists x (= x x))").unwrap();
        let r = relativize_to_ball(&f, &x(), 0, &graph_signature()).unwrap();
        assert!(evaluate_at(&p3, &r, &x(), 2).unwrap());
        let g = parse_formula("(exists x (exists y (and (E y x) (E x y))))").unwrap();
        let r = relativize_to_ball(&g, &x(), 2, &graph_signature()).unwrap();
        assert!(!evaluate_at(&p3, &r, &x(), 0).unwrap());
    }

    #[test]
    fn ball_distance_differs_from_global_distance() {
        // In C_6 the 2-ball around 0 misses 3, so 2 and 4 are four apart inside it.
        let c6 = crate::families::cycle(6).unwrap();
        let f = parse_formula("(forall (y z) (dist<= 3 y z))").unwrap();
        let r = relativize_to_ball(&f, &x(), 2, &graph_signature()).unwrap();
        let inside = ball(&c6, 0, 2).unwrap();
        let direct = evaluate_at(&inside.structure, &f, &x(), inside.points[0]).unwrap();
        assert!(!direct);
        assert!(!evaluate_at(&c6, &r, &x(), 0).unwrap());
        assert!(evaluate_at(&c6, &f, &x(), 0).unwrap());
    }

    #[test]
    fn ball_axioms_on_paths() {
        let p3 = dipath(3).unwrap();
        let p10 = dipath(10).unwrap();
        let b = ball(&p3, 1, 1).unwrap();
        let chi = ball_axiom(&b, 1, &x()).unwrap();
        assert!(evaluate_at(&p10, &chi, &x(), 5).unwrap());
        assert!(!evaluate_at(&p10, &chi, &x(), 0).unwrap());

        let single = crate::structure::FiniteStructure::new(graph_signature(), 1).pointed(vec![0]);
        let chi = ball_axiom(&single, 0, &x()).unwrap();
        assert!(p10.universe().all(|a| evaluate_at(&p10, &chi, &x(), a).unwrap()));
    }

    #[test]
    fn ball_axiom_radius_check() {
        let p3 = dipath(3).unwrap().pointed(vec![0]);
        assert!(matches!(
            ball_axiom(&p3, 1, &x()),
            Err(Error::RadiusInconsistent { element: 2, .. })
        ));
    }

    fn degree_at_least_four() -> Formula {
        parse_formula(
            "(exists y1 (and (E x y1) (exists y2 (and (E x y2) (not (= y1 y2)) \
             (exists y3 (and (E x y3) (not (= y1 y3)) (not (= y2 y3)) \
             (exists y4 (and (E x y4) (not (= y1 y4)) (not (= y2 y4)) (not (= y3 y4))))))))))",
        )
        .unwrap()
    }

    #[test]
    fn scattered_branch_vertices() {
        let psi = degree_at_least_four();
        let sentence = basic_local_sentence(&psi, 5, 1).unwrap();
        assert!(sentence.is_sentence());
        assert_eq!(sentence.quantifier_rank(), 5 + psi.quantifier_rank());
        let empty = BTreeMap::new();
        assert!(!crate::logic::evaluate(&k5_subdivision(1), &sentence, &empty).unwrap());
        assert!(crate::logic::evaluate(&k5_subdivision(2), &sentence, &empty).unwrap());
    }

    #[test]
    fn single_witness_has_no_distance_conjuncts() {
        let psi = parse_formula("(exists y (E x y))").unwrap();
        let s = basic_local_sentence(&psi, 1, 3).unwrap();
        assert_eq!(s, Formula::exists("x1", parse_formula("(exists y (E x1 y))").unwrap()));
        assert!(basic_local_sentence(&psi, 0, 1).is_err());
    }
}
