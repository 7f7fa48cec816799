//! Ehrenfeucht–Fraïssé games.
//!
//! The game value is computed by minimax over positions `(ā, b̄, k)`, where
//! `ā ↦ b̄` is a partial isomorphism and `k` rounds remain. Spoiler moves onto
//! already pinned elements are skipped, as duplicator can always copy them.
//! Candidate moves on one side are grouped by the canonical code of the
//! extended pointed structure, so symmetric moves are explored once, and
//! duplicator only considers answers with the same atomic extension profile.
//! Positions with two or more rounds left are memoized on the canonical codes
//! of both pointed structures.
//!
//! [`refine_types_oracle`] decides the same relation by computing rank-`k`
//! types of tuples bottom-up and shares no code with the game search.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::canon::{canonical_code, CanonicalCode};
use crate::error::{Error, Result};
use crate::logic::{Formula, Var};
use crate::structure::{FiniteStructure, PointedStructure};
use crate::Element;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GameConfig {
    /// Maximum number of game positions visited before giving up.
    pub budget: u64,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig { budget: 100_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfVerdict {
    pub duplicator_wins: bool,
    pub rounds: usize,
    /// Present when spoiler wins and extraction was requested.
    pub distinguishing_sentence: Option<Formula>,
    pub positions: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RankVerdict {
    /// Least number of rounds in which spoiler wins.
    Rank(usize),
    /// Duplicator wins every game up to one round fewer than this.
    AtLeast(usize),
}

fn same_shape(a: &PointedStructure, b: &PointedStructure) -> Result<()> {
    if a.structure.signature() != b.structure.signature() {
        return Err(Error::SignatureMismatch);
    }
    if a.points.len() != b.points.len() {
        return Err(Error::PointCountMismatch {
            left: a.points.len(),
            right: b.points.len(),
        });
    }
    for &p in a.points.iter() {
        a.structure.check_element(p)?;
    }
    for &p in b.points.iter() {
        b.structure.check_element(p)?;
    }
    Ok(())
}

/// Plays the `m`-round game from the given pins and optionally extracts a
/// distinguishing formula in the free variables `x0, x1, …` (one per pin).
pub fn play(
    a: &PointedStructure,
    b: &PointedStructure,
    m: usize,
    config: &GameConfig,
    extract: bool,
) -> Result<EfVerdict> {
    same_shape(a, b)?;
    let mut game = Game::new(a, b, config.budget);
    let wins = game.wins(0, &a.points, &b.points, m)?;
    let distinguishing_sentence = if !wins && extract {
        Some(game.distinguish(0, &a.points, &b.points, m)?)
    } else {
        None
    };
    Ok(EfVerdict {
        duplicator_wins: wins,
        rounds: m,
        distinguishing_sentence,
        positions: game.visited,
    })
}

pub fn duplicator_wins(a: &PointedStructure, b: &PointedStructure, m: usize) -> Result<bool> {
    duplicator_wins_with(a, b, m, &GameConfig::default())
}

pub fn duplicator_wins_with(a: &PointedStructure, b: &PointedStructure, m: usize, config: &GameConfig) -> Result<bool> {
    Ok(play(a, b, m, config, false)?.duplicator_wins)
}

pub fn m_equiv(a: &FiniteStructure, b: &FiniteStructure, m: usize) -> Result<bool> {
    m_equiv_with(a, b, m, &GameConfig::default())
}

pub fn m_equiv_with(a: &FiniteStructure, b: &FiniteStructure, m: usize, config: &GameConfig) -> Result<bool> {
    let (pa, pb) = unpointed_pair(a, b);
    duplicator_wins_with(&pa, &pb, m, config)
}

fn unpointed_pair(a: &FiniteStructure, b: &FiniteStructure) -> (PointedStructure, PointedStructure) {
    (a.clone().unpointed(), b.clone().unpointed())
}

pub fn distinguishing_rank(a: &FiniteStructure, b: &FiniteStructure, max_m: usize) -> Result<RankVerdict> {
    distinguishing_rank_with(a, b, max_m, &GameConfig::default())
}

pub fn distinguishing_rank_with(
    a: &FiniteStructure,
    b: &FiniteStructure,
    max_m: usize,
    config: &GameConfig,
) -> Result<RankVerdict> {
    for m in 0..=max_m {
        if !m_equiv_with(a, b, m, config)? {
            return Ok(RankVerdict::Rank(m));
        }
    }
    Ok(RankVerdict::AtLeast(max_m + 1))
}

/// A sentence of quantifier rank at most `m` true in `a` and false in `b`,
/// or `None` when the structures are `m`-equivalent.
pub fn distinguishing_sentence(a: &FiniteStructure, b: &FiniteStructure, m: usize) -> Result<Option<Formula>> {
    distinguishing_sentence_with(a, b, m, &GameConfig::default())
}

pub fn distinguishing_sentence_with(
    a: &FiniteStructure,
    b: &FiniteStructure,
    m: usize,
    config: &GameConfig,
) -> Result<Option<Formula>> {
    let (pa, pb) = unpointed_pair(a, b);
    Ok(play(&pa, &pb, m, config, true)?.distinguishing_sentence)
}

/// Name of the variable bound to pin `i` in extracted formulas.
pub fn pin_var(i: usize) -> Var {
    Var::new(format!("x{i}"))
}

struct Side<'a> {
    pointed: PointedStructure,
    structure: &'a FiniteStructure,
    codes: HashMap<Vec<Element>, CanonicalCode>,
}

impl<'a> Side<'a> {
    fn code(&mut self, pins: &[Element]) -> CanonicalCode {
        if let Some(c) = self.codes.get(pins) {
            return c.clone();
        }
        self.pointed.points.clear();
        self.pointed.points.extend_from_slice(pins);
        let c = canonical_code(&self.pointed);
        self.codes.insert(pins.to_vec(), c.clone());
        c
    }
}

/// One candidate move: a representative element and its atomic extension
/// profile.
struct Move {
    element: Element,
    profile: Vec<bool>,
}

struct Game<'a> {
    sides: [Side<'a>; 2],
    memo: HashMap<(CanonicalCode, CanonicalCode, usize), bool>,
    budget: u64,
    visited: u64,
}

impl<'a> Game<'a> {
    fn new(a: &'a PointedStructure, b: &'a PointedStructure, budget: u64) -> Self {
        let side = |p: &'a PointedStructure| Side {
            pointed: PointedStructure {
                structure: p.structure.clone(),
                points: Vec::new(),
            },
            structure: &p.structure,
            codes: HashMap::new(),
        };
        Game {
            sides: [side(a), side(b)],
            memo: HashMap::new(),
            budget,
            visited: 0,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::BudgetExhausted { budget: self.budget });
        }
        Ok(())
    }

    /// Atomic facts about `pins + x` that involve the last position.
    fn profile(&self, side: usize, pins: &[Element], x: Element) -> Vec<bool> {
        let s = self.sides[side].structure;
        let last = pins.len();
        let at = |p: usize| if p == last { x } else { pins[p] };
        let mut out = Vec::new();
        let mut tuple = Vec::new();
        for (index, symbol) in s.signature().relations().iter().enumerate() {
            let mut positions = vec![0; symbol.arity];
            loop {
                if positions.contains(&last) {
                    tuple.clear();
                    tuple.extend(positions.iter().map(|&p| at(p)));
                    out.push(s.contains(index, &tuple));
                }
                if !advance(&mut positions, last + 1) {
                    break;
                }
            }
        }
        out
    }

    /// Non-pinned moves on one side, one per configuration class when codes
    /// are requested, in increasing element order.
    fn moves(&mut self, side: usize, pins: &[Element], with_codes: bool) -> Vec<Move> {
        let size = self.sides[side].structure.size();
        let pinned: HashSet<Element> = pins.iter().copied().collect();
        let mut out: Vec<Move> = Vec::new();
        let mut seen = HashSet::new();
        let mut extended = pins.to_vec();
        for x in (0..size).filter(|x| !pinned.contains(x)) {
            if with_codes {
                extended.push(x);
                let c = self.sides[side].code(&extended);
                extended.pop();
                if !seen.insert(c) {
                    continue;
                }
            }
            out.push(Move {
                element: x,
                profile: self.profile(side, pins, x),
            });
        }
        out
    }

    /// Game value with `left` playing the role of the first structure. The
    /// pins must already form a partial isomorphism unless this is the root.
    fn wins(&mut self, left: usize, pl: &[Element], pr: &[Element], k: usize) -> Result<bool> {
        self.tick()?;
        if !self.atomic_match(left, pl, pr) {
            return Ok(false);
        }
        self.wins_from(left, pl, pr, k)
    }

    fn wins_from(&mut self, left: usize, pl: &[Element], pr: &[Element], k: usize) -> Result<bool> {
        if k == 0 {
            return Ok(true);
        }
        let right = 1 - left;
        if k == 1 {
            let ml: HashSet<Vec<bool>> = self.moves(left, pl, false).into_iter().map(|m| m.profile).collect();
            let mr: HashSet<Vec<bool>> = self.moves(right, pr, false).into_iter().map(|m| m.profile).collect();
            return Ok(ml == mr);
        }
        let cl = self.sides[left].code(pl);
        let cr = self.sides[right].code(pr);
        let key = if cl <= cr { (cl, cr, k) } else { (cr, cl, k) };
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let ml = self.moves(left, pl, true);
        let mr = self.moves(right, pr, true);
        let pl_set: BTreeSet<&Vec<bool>> = ml.iter().map(|m| &m.profile).collect();
        let pr_set: BTreeSet<&Vec<bool>> = mr.iter().map(|m| &m.profile).collect();
        let mut value = pl_set == pr_set;
        if value {
            value = self.forth(left, pl, pr, &ml, &mr, k)? && self.forth(right, pr, pl, &mr, &ml, k)?;
        }
        self.memo.insert(key, value);
        Ok(value)
    }

    /// Every spoiler move on `left` has a good answer on the other side.
    fn forth(
        &mut self,
        left: usize,
        pl: &[Element],
        pr: &[Element],
        ml: &[Move],
        mr: &[Move],
        k: usize,
    ) -> Result<bool> {
        for x in ml {
            if self.spoiler_move_wins(left, pl, pr, x, mr, k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn spoiler_move_wins(
        &mut self,
        left: usize,
        pl: &[Element],
        pr: &[Element],
        x: &Move,
        mr: &[Move],
        k: usize,
    ) -> Result<bool> {
        let mut el = pl.to_vec();
        el.push(x.element);
        let mut er = pr.to_vec();
        for y in mr.iter().filter(|y| y.profile == x.profile) {
            self.tick()?;
            er.push(y.element);
            let answered = self.wins_from(left, &el, &er, k - 1)?;
            er.pop();
            if answered {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn atomic_match(&self, left: usize, pl: &[Element], pr: &[Element]) -> bool {
        self.atomic_mismatch(left, pl, pr).is_none()
    }

    /// A literal over the pin variables true at `pl` on `left` and false at
    /// `pr` on the other side, if their atomic types differ.
    fn atomic_mismatch(&self, left: usize, pl: &[Element], pr: &[Element]) -> Option<Formula> {
        let literal = |holds: bool, f: Formula| if holds { f } else { Formula::not(f) };
        for i in 0..pl.len() {
            for j in i + 1..pl.len() {
                let (l, r) = (pl[i] == pl[j], pr[i] == pr[j]);
                if l != r {
                    return Some(literal(l, Formula::Eq(pin_var(i), pin_var(j))));
                }
            }
        }
        let sl = self.sides[left].structure;
        let sr = self.sides[1 - left].structure;
        for (index, symbol) in sl.signature().relations().iter().enumerate() {
            if pl.is_empty() {
                break;
            }
            let mut positions = vec![0; symbol.arity];
            loop {
                let tl: Vec<Element> = positions.iter().map(|&p| pl[p]).collect();
                let tr: Vec<Element> = positions.iter().map(|&p| pr[p]).collect();
                let (l, r) = (sl.contains(index, &tl), sr.contains(index, &tr));
                if l != r {
                    let atom = Formula::Atom {
                        relation: symbol.name.clone(),
                        args: positions.iter().map(|&p| pin_var(p)).collect(),
                    };
                    return Some(literal(l, atom));
                }
                if !advance(&mut positions, pl.len()) {
                    break;
                }
            }
        }
        None
    }

    /// A formula of rank at most `k` true at `pl` on `left` and false at `pr`
    /// on the other side. Spoiler must win the position.
    fn distinguish(&mut self, left: usize, pl: &[Element], pr: &[Element], k: usize) -> Result<Formula> {
        if let Some(literal) = self.atomic_mismatch(left, pl, pr) {
            return Ok(literal);
        }
        assert!(k > 0, "spoiler cannot win a partial isomorphism with no rounds left");
        let right = 1 - left;
        let ml = self.moves(left, pl, true);
        let mr = self.moves(right, pr, true);
        for x in &ml {
            if self.spoiler_move_wins(left, pl, pr, x, &mr, k)? {
                let body = self.witness_body(left, pl, pr, x.element, &mr, k)?;
                return Ok(Formula::exists(pin_var(pl.len()), body));
            }
        }
        for y in &mr {
            if self.spoiler_move_wins(right, pr, pl, y, &ml, k)? {
                let body = self.witness_body(right, pr, pl, y.element, &ml, k)?;
                return Ok(Formula::not(Formula::exists(pin_var(pr.len()), body)));
            }
        }
        unreachable!("spoiler wins, so some move wins")
    }

    /// Conjunction satisfied by `x` on `left` and refuted by every element on
    /// the other side.
    fn witness_body(
        &mut self,
        left: usize,
        pl: &[Element],
        pr: &[Element],
        x: Element,
        mr: &[Move],
        k: usize,
    ) -> Result<Formula> {
        let v = pin_var(pl.len());
        let mut conjuncts: Vec<Formula> = Vec::new();
        let mut add = |f: Formula| {
            if !conjuncts.contains(&f) {
                conjuncts.push(f);
            }
        };
        // Answers on pinned elements fail on equality.
        let pinned: BTreeSet<Element> = pr.iter().copied().collect();
        for &y in &pinned {
            let i = pr.iter().position(|&p| p == y).expect("pinned");
            add(Formula::not(Formula::Eq(v.clone(), pin_var(i))));
        }
        let mut el = pl.to_vec();
        el.push(x);
        let mut er = pr.to_vec();
        for y in mr {
            er.push(y.element);
            let f = self.distinguish(left, &el, &er, k - 1)?;
            er.pop();
            add(f);
        }
        Ok(match conjuncts.len() {
            1 => conjuncts.pop().expect("one conjunct"),
            _ => Formula::And(conjuncts),
        })
    }
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

/// Decides `a ≡_m b` by computing rank-`m` types of the empty tuple.
///
/// The rank-0 type of a tuple is its full atomic diagram over the tuple's
/// positions; the rank-`k` type adds the set of rank-`(k−1)` types of all
/// one-element extensions. Types are interned in a table shared by both
/// structures so they can be compared by id.
pub fn refine_types_oracle(a: &FiniteStructure, b: &FiniteStructure, m: usize) -> Result<bool> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch);
    }
    let mut table = TypeTable::default();
    let ta = table.type_of(a, &mut Vec::new(), m);
    let tb = table.type_of(b, &mut Vec::new(), m);
    Ok(ta == tb)
}

#[derive(Default)]
struct TypeTable {
    ids: HashMap<(usize, Vec<bool>, Vec<u32>), u32>,
}

impl TypeTable {
    fn type_of(&mut self, s: &FiniteStructure, tuple: &mut Vec<Element>, k: usize) -> u32 {
        let diagram = diagram(s, tuple);
        let mut children = Vec::new();
        if k > 0 {
            let mut set = BTreeSet::new();
            for x in s.universe() {
                tuple.push(x);
                set.insert(self.type_of(s, tuple, k - 1));
                tuple.pop();
            }
            children = set.into_iter().collect();
        }
        let next = self.ids.len() as u32;
        *self.ids.entry((k, diagram, children)).or_insert(next)
    }
}

/// Equalities between positions, then every relation over every position
/// tuple, in a fixed order.
fn diagram(s: &FiniteStructure, tuple: &[Element]) -> Vec<bool> {
    let n = tuple.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            out.push(tuple[i] == tuple[j]);
        }
    }
    for (index, symbol) in s.signature().relations().iter().enumerate() {
        let total = n.pow(symbol.arity as u32);
        for mut code in 0..total {
            let mut args = vec![0; symbol.arity];
            for slot in args.iter_mut().rev() {
                *slot = tuple[code % n];
                code /= n;
            }
            out.push(s.contains(index, &args));
        }
    }
    out
}
