//! Corpus-relative locality checks.

use serde::Serialize;

use super::eval::{Assignment, Evaluator};
use super::formula::{Formula, Var};
use crate::error::{Error, Result};
use crate::gaifman::{ball_in, GaifmanGraph};
use crate::structure::FiniteStructure;
use crate::Element;

/// Where a formula's value at an element differs from its value inside the
/// element's ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalityWitness {
    /// Index into the corpus.
    pub structure: usize,
    pub element: Element,
    pub in_structure: bool,
    pub in_ball: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalityVerdict {
    pub is_local: bool,
    pub witness: Option<LocalityWitness>,
}

/// Checks `A, a ⊨ f` against `S_l(a), a ⊨ f` for every element of every
/// structure in the corpus. A positive verdict is evidence, not proof.
pub fn is_local(f: &Formula, l: usize, corpus: &[FiniteStructure]) -> Result<LocalityVerdict> {
    let free: Vec<Var> = f.free_vars().into_iter().collect();
    if free.len() != 1 {
        return Err(Error::FreeVariables {
            expected: vec!["<one variable>".into()],
            found: free.iter().map(|v| v.name().to_string()).collect(),
        });
    }
    for (index, s) in corpus.iter().enumerate() {
        let whole = Evaluator::new(s);
        let compiled = whole.compile(f, &free)?;
        let graph = GaifmanGraph::of(s);
        for a in s.universe() {
            let in_structure = whole.holds(&compiled, &[a])?;
            let ball = ball_in(s, &graph, a, l)?;
            let point = Assignment::from([(free[0].clone(), ball.points[0])]);
            let in_ball = Evaluator::new(&ball.structure).evaluate(f, &point)?;
            if in_structure != in_ball {
                let witness = LocalityWitness {
                    structure: index,
                    element: a,
                    in_structure,
                    in_ball,
                };
                return Ok(LocalityVerdict {
                    is_local: false,
                    witness: Some(witness),
                });
            }
        }
    }
    Ok(LocalityVerdict {
        is_local: true,
        witness: None,
    })
}
