//! Independent reference implementations and generators shared by the
//! integration tests. Nothing here calls the library's evaluator, Gaifman
//! graph, canonizer or isomorphism search.
#![allow(dead_code)]

use std::collections::HashMap;

use locality::logic::{Formula, Var};
use locality::structure::{FiniteStructure, PointedStructure, Signature};
use locality::Element;
use proptest::prelude::*;

pub const INF: usize = usize::MAX;

/// All-pairs Gaifman distances by Floyd–Warshall over co-occurrence edges.
pub fn distances(s: &FiniteStructure) -> Vec<Vec<usize>> {
    let n = s.size();
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (_, t) in s.tuples() {
        for &a in t {
            for &b in t {
                if a != b {
                    d[a][b] = 1;
                }
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] != INF && d[k][j] != INF && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Direct recursive semantics.
pub fn reference_eval(s: &FiniteStructure, f: &Formula, env: &mut HashMap<Var, Element>) -> bool {
    let d = distances(s);
    eval_with(s, &d, f, env)
}

fn eval_with(s: &FiniteStructure, d: &[Vec<usize>], f: &Formula, env: &mut HashMap<Var, Element>) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Eq(a, b) => env[a] == env[b],
        Formula::Atom { relation, args } => {
            let index = s.signature().index_of(relation).expect("relation in signature");
            let t: Vec<Element> = args.iter().map(|v| env[v]).collect();
            s.table(index).contains(&t)
        }
        Formula::DistLe { bound, left, right } => d[env[left]][env[right]] <= *bound,
        Formula::DistGt { bound, left, right } => d[env[left]][env[right]] > *bound,
        Formula::Not(g) => !eval_with(s, d, g, env),
        Formula::And(gs) => gs.iter().all(|g| eval_with(s, d, g, env)),
        Formula::Or(gs) => gs.iter().any(|g| eval_with(s, d, g, env)),
        Formula::Implies(a, b) => !eval_with(s, d, a, env) || eval_with(s, d, b, env),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let saved = env.get(v).copied();
            let want = matches!(f, Formula::Exists(..));
            let mut result = !want;
            for e in 0..s.size() {
                env.insert(v.clone(), e);
                if eval_with(s, d, g, env) == want {
                    result = want;
                    break;
                }
            }
            match saved {
                Some(e) => env.insert(v.clone(), e),
                None => env.remove(v),
            };
            result
        }
    }
}

/// Pointed isomorphism by trying every permutation; for tiny inputs only.
pub fn brute_iso(a: &PointedStructure, b: &PointedStructure) -> bool {
    let (sa, sb) = (&a.structure, &b.structure);
    if sa.signature() != sb.signature() || sa.size() != sb.size() || a.points.len() != b.points.len() {
        return false;
    }
    if (0..sa.signature().len()).any(|i| sa.table(i).len() != sb.table(i).len()) {
        return false;
    }
    let n = sa.size();
    let mut perm: Vec<Element> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        a.points.iter().zip(&b.points).all(|(&x, &y)| p[x] == y)
            && (0..sa.signature().len()).all(|i| {
                sa.table(i).iter().all(|t| {
                    let image: Vec<Element> = t.iter().map(|&e| p[e]).collect();
                    sb.contains(i, &image)
                })
            })
    })
}

fn permutations(p: &mut Vec<Element>, k: usize, check: &mut impl FnMut(&[Element]) -> bool) -> bool {
    if k == p.len() {
        return check(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permutations(p, k + 1, check) {
            p.swap(k, i);
            return true;
        }
        p.swap(k, i);
    }
    false
}

/// Induced ball by brute-force distances, with the centre's new index.
pub fn reference_ball(s: &FiniteStructure, a: Element, l: usize) -> PointedStructure {
    let d = distances(s);
    let members: Vec<Element> = (0..s.size()).filter(|&b| d[a][b] <= l).collect();
    let index = |e: Element| members.iter().position(|&m| m == e);
    let tables = (0..s.signature().len())
        .map(|i| {
            s.table(i)
                .iter()
                .filter_map(|t| t.iter().map(|&e| index(e)).collect::<Option<Vec<_>>>())
                .collect()
        })
        .collect();
    let structure = FiniteStructure::from_tables(s.signature().clone(), members.len(), tables).unwrap();
    PointedStructure {
        structure,
        points: vec![index(a).unwrap()],
    }
}

pub fn small_signature() -> Signature {
    Signature::new([("E", 2), ("P", 1)]).unwrap()
}

pub fn graph_sig() -> Signature {
    Signature::new([("E", 2)]).unwrap()
}

/// Random structures over `E/2, P/1` with `min..=max` elements.
pub fn structures(min: usize, max: usize, density: f64) -> impl Strategy<Value = FiniteStructure> {
    (min..=max).prop_flat_map(move |n| {
        (
            proptest::collection::vec(proptest::bool::weighted(density), n * n),
            proptest::collection::vec(proptest::bool::weighted(0.3), n),
        )
            .prop_map(move |(edges, marks)| {
                let mut s = FiniteStructure::new(small_signature(), n);
                for (i, &on) in edges.iter().enumerate() {
                    if on {
                        s.insert("E", vec![i / n, i % n]).unwrap();
                    }
                }
                for (v, &on) in marks.iter().enumerate() {
                    if on {
                        s.insert("P", vec![v]).unwrap();
                    }
                }
                s
            })
    })
}

/// Random undirected loop-free graphs over `E/2`.
pub fn graphs(min: usize, max: usize, density: f64) -> impl Strategy<Value = FiniteStructure> {
    (min..=max).prop_flat_map(move |n| {
        proptest::collection::vec(proptest::bool::weighted(density), n * n).prop_map(move |bits| {
            let mut s = FiniteStructure::new(graph_sig(), n);
            for a in 0..n {
                for b in a + 1..n {
                    if bits[a * n + b] {
                        s.insert("E", vec![a, b]).unwrap();
                        s.insert("E", vec![b, a]).unwrap();
                    }
                }
            }
            s
        })
    })
}

const POOL: [&str; 3] = ["x", "y", "z"];

fn var() -> impl Strategy<Value = Var> {
    (0..POOL.len()).prop_map(|i| Var::from(POOL[i]))
}

fn atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        (var(), var()).prop_map(|(a, b)| Formula::Eq(a, b)),
        (var(), var()).prop_map(|(a, b)| Formula::Atom {
            relation: "E".into(),
            args: vec![a, b]
        }),
        var().prop_map(|a| Formula::Atom {
            relation: "P".into(),
            args: vec![a]
        }),
        (0..4usize, var(), var()).prop_map(|(k, a, b)| Formula::DistLe {
            bound: k,
            left: a,
            right: b
        }),
        (0..4usize, var(), var()).prop_map(|(k, a, b)| Formula::DistGt {
            bound: k,
            left: a,
            right: b
        }),
    ]
}

/// Formulas over `E/2, P/1` with variables from `x, y, z` and quantifier
/// rank at most `rank`.
pub fn formulas(rank: usize) -> BoxedStrategy<Formula> {
    let leaf = atom().boxed();
    if rank == 0 {
        return prop_oneof![
            3 => leaf,
            1 => atom().prop_map(Formula::not),
            1 => proptest::collection::vec(atom(), 0..3).prop_map(Formula::And),
            1 => proptest::collection::vec(atom(), 0..3).prop_map(Formula::Or),
        ]
        .boxed();
    }
    let inner = formulas(rank - 1);
    let same = formulas(rank - 1);
    prop_oneof![
        2 => (var(), inner.clone()).prop_map(|(v, f)| Formula::exists(v, f)),
        2 => (var(), inner.clone()).prop_map(|(v, f)| Formula::forall(v, f)),
        1 => (inner.clone(), same.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
        1 => proptest::collection::vec(inner.clone(), 1..3).prop_map(Formula::And),
        1 => proptest::collection::vec(inner, 1..3).prop_map(|fs| Formula::not(Formula::Or(fs))),
        1 => same,
    ]
    .boxed()
}

/// Identifies every free variable with `keep`, leaving the rank unchanged.
pub fn only_free(f: Formula, keep: &Var) -> Formula {
    let others: Vec<Var> = f.free_vars().into_iter().filter(|v| v != keep).collect();
    others.iter().fold(f, |g, v| g.rename_free(v, keep))
}

/// Existentially closes every free variable.
pub fn close(f: Formula) -> Formula {
    let free: Vec<Var> = f.free_vars().into_iter().collect();
    Formula::exists_all(free, f)
}
