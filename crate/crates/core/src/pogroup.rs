//! Concrete partially ordered groups behind one multiplicative interface.
//!
//! The abelian instances realize the product additively. `affine_rational`
//! is the group of matrices `[[a, b], [0, 1]]` with `a > 0`, stored as the
//! exact rational pair `(a, b)`; its positive cone is `a > 1`, or `a = 1`
//! and `b >= 0`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rdp::{self, RdpClass, RefinementAmbient, RefinementTable};
use crate::tuple::{cartesian, split_top_level};
use crate::Tri;

pub type IntVec = SmallVec<[i64; 4]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// ℤ with its usual order.
    Integers,
    /// ℤ^d ordered componentwise.
    IntVectors(usize),
    /// ℤ × ℤ ordered lexicographically.
    LexInt,
    /// The affine matrix group over ℚ.
    AffineRational,
    /// The one-element group.
    Trivial,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Integers => f.write_str("integers"),
            GroupKind::IntVectors(d) => write!(f, "int_vectors({d})"),
            GroupKind::LexInt => f.write_str("lex_int"),
            GroupKind::AffineRational => f.write_str("affine_rational"),
            GroupKind::Trivial => f.write_str("trivial"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Affine {
    pub a: BigRational,
    pub b: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Int(i64),
    Vector(IntVec),
    Lex(i64, i64),
    Affine(Box<Affine>),
    Unit,
}

impl GroupElement {
    pub fn vector(components: &[i64]) -> GroupElement {
        GroupElement::Vector(components.iter().copied().collect())
    }

    /// Builds an affine element; `a` must be strictly positive.
    pub fn affine(a: BigRational, b: BigRational) -> Result<GroupElement> {
        if !a.is_positive() {
            return Err(Error::Invalid(format!("affine first component {a} is not positive")));
        }
        Ok(GroupElement::Affine(Box::new(Affine { a, b })))
    }

    /// Affine element from integer fractions `an/ad`, `bn/bd`.
    pub fn affine_frac(an: i64, ad: i64, bn: i64, bd: i64) -> GroupElement {
        GroupElement::affine(rat(an, ad), rat(bn, bd)).expect("positive first component")
    }

    fn kind_name(&self) -> &'static str {
        match self {
            GroupElement::Int(_) => "integer",
            GroupElement::Vector(_) => "vector",
            GroupElement::Lex(..) => "lex pair",
            GroupElement::Affine(_) => "affine pair",
            GroupElement::Unit => "unit",
        }
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Int(v) => write!(f, "{v}"),
            GroupElement::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            GroupElement::Lex(a, b) => write!(f, "<{a},{b}>"),
            GroupElement::Affine(p) => write!(f, "({},{})", p.a, p.b),
            GroupElement::Unit => f.write_str("e"),
        }
    }
}

/// Fixed structural facts about an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupFlags {
    pub subdirectly_irreducible: Tri,
    pub enumerable_intervals: bool,
    pub lattice_ordered: bool,
}

/// Outcome of the commuting-intervals test `a com b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComOutcome {
    Commute,
    Witness(GroupElement, GroupElement),
    Unknown,
}

impl ComOutcome {
    pub fn tri(&self) -> Tri {
        match self {
            ComOutcome::Commute => Tri::Yes,
            ComOutcome::Witness(..) => Tri::No,
            ComOutcome::Unknown => Tri::Unknown,
        }
    }
}

const COM_SAMPLES: usize = 256;
const COM_SEED: u64 = 0x00c0_ffee;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PoGroup {
    kind: GroupKind,
}

impl PoGroup {
    pub fn new(kind: GroupKind) -> Result<PoGroup> {
        if kind == GroupKind::IntVectors(0) {
            return Err(Error::Invalid("int_vectors needs dimension >= 1".into()));
        }
        Ok(PoGroup { kind })
    }

    pub fn integers() -> PoGroup {
        PoGroup { kind: GroupKind::Integers }
    }

    pub fn int_vectors(d: usize) -> PoGroup {
        PoGroup::new(GroupKind::IntVectors(d)).expect("dimension >= 1")
    }

    pub fn lex_int() -> PoGroup {
        PoGroup { kind: GroupKind::LexInt }
    }

    pub fn affine_rational() -> PoGroup {
        PoGroup { kind: GroupKind::AffineRational }
    }

    pub fn trivial() -> PoGroup {
        PoGroup { kind: GroupKind::Trivial }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// Hard-coded facts. ℤ has only the convex subgroups {0} and ℤ, so it is
    /// subdirectly irreducible; in ℤ^d (d >= 2) the coordinate axes are
    /// o-ideals meeting in {0}, so it is not. The lexicographic ℤ × ℤ has the
    /// least non-trivial o-ideal {0} × ℤ. Nothing is claimed for the affine
    /// group.
    pub fn flags(&self) -> GroupFlags {
        let (sdi, enumerable) = match self.kind {
            GroupKind::Integers => (Tri::Yes, true),
            GroupKind::IntVectors(1) => (Tri::Yes, true),
            GroupKind::IntVectors(_) => (Tri::No, true),
            GroupKind::LexInt => (Tri::Yes, false),
            GroupKind::AffineRational => (Tri::Unknown, false),
            GroupKind::Trivial => (Tri::Yes, true),
        };
        GroupFlags {
            subdirectly_irreducible: sdi,
            enumerable_intervals: enumerable,
            lattice_ordered: true,
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.kind != GroupKind::AffineRational
    }

    /// Linearly ordered instances.
    pub fn is_linear(&self) -> bool {
        matches!(
            self.kind,
            GroupKind::Integers | GroupKind::LexInt | GroupKind::AffineRational | GroupKind::Trivial
        ) || self.kind == GroupKind::IntVectors(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.kind == GroupKind::Trivial
    }

    pub fn identity(&self) -> GroupElement {
        match self.kind {
            GroupKind::Integers => GroupElement::Int(0),
            GroupKind::IntVectors(d) => GroupElement::Vector(SmallVec::from_elem(0, d)),
            GroupKind::LexInt => GroupElement::Lex(0, 0),
            GroupKind::AffineRational => {
                GroupElement::Affine(Box::new(Affine { a: BigRational::one(), b: BigRational::zero() }))
            }
            GroupKind::Trivial => GroupElement::Unit,
        }
    }

    /// Whether `g` carries this instance's payload shape.
    pub fn contains(&self, g: &GroupElement) -> bool {
        match (self.kind, g) {
            (GroupKind::Integers, GroupElement::Int(_)) => true,
            (GroupKind::IntVectors(d), GroupElement::Vector(v)) => v.len() == d,
            (GroupKind::LexInt, GroupElement::Lex(..)) => true,
            (GroupKind::AffineRational, GroupElement::Affine(p)) => p.a.is_positive(),
            (GroupKind::Trivial, GroupElement::Unit) => true,
            _ => false,
        }
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::NotMember { element: g.to_string(), instance: self.kind.to_string() })
        }
    }

    pub fn try_mul(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        if !self.contains(g) || !self.contains(h) {
            return Err(Error::MixedInstance(
                format!("{} {g}", g.kind_name()),
                format!("{} {h}", h.kind_name()),
            ));
        }
        Ok(self.mul(g, h))
    }

    /// Group product. Panics if either argument belongs to another instance;
    /// use [`PoGroup::try_mul`] on unvalidated input.
    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match (g, h) {
            (GroupElement::Int(x), GroupElement::Int(y)) => GroupElement::Int(x + y),
            (GroupElement::Vector(x), GroupElement::Vector(y)) => {
                assert_eq!(x.len(), y.len(), "vector dimensions differ");
                GroupElement::Vector(x.iter().zip(y).map(|(a, b)| a + b).collect())
            }
            (GroupElement::Lex(a, b), GroupElement::Lex(c, d)) => GroupElement::Lex(a + c, b + d),
            (GroupElement::Affine(p), GroupElement::Affine(q)) => GroupElement::Affine(Box::new(Affine {
                a: &p.a * &q.a,
                b: &p.a * &q.b + &p.b,
            })),
            (GroupElement::Unit, GroupElement::Unit) => GroupElement::Unit,
            _ => panic!("mixed group instances: {g} and {h}"),
        }
    }

    pub fn inv(&self, g: &GroupElement) -> GroupElement {
        match g {
            GroupElement::Int(x) => GroupElement::Int(-x),
            GroupElement::Vector(x) => GroupElement::Vector(x.iter().map(|a| -a).collect()),
            GroupElement::Lex(a, b) => GroupElement::Lex(-a, -b),
            GroupElement::Affine(p) => {
                let a = p.a.recip();
                let b = -(&p.b * &a);
                GroupElement::Affine(Box::new(Affine { a, b }))
            }
            GroupElement::Unit => GroupElement::Unit,
        }
    }

    /// `e <= g`.
    pub fn is_positive(&self, g: &GroupElement) -> bool {
        match g {
            GroupElement::Int(x) => *x >= 0,
            GroupElement::Vector(x) => x.iter().all(|a| *a >= 0),
            GroupElement::Lex(a, b) => *a > 0 || (*a == 0 && *b >= 0),
            GroupElement::Affine(p) => {
                let one = BigRational::one();
                p.a > one || (p.a == one && !p.b.is_negative())
            }
            GroupElement::Unit => true,
        }
    }

    /// `g <= e`.
    pub fn is_negative(&self, g: &GroupElement) -> bool {
        self.is_positive(&self.inv(g))
    }

    pub fn leq(&self, g: &GroupElement, h: &GroupElement) -> bool {
        match (g, h) {
            (GroupElement::Int(x), GroupElement::Int(y)) => x <= y,
            (GroupElement::Vector(x), GroupElement::Vector(y)) => x.iter().zip(y).all(|(a, b)| a <= b),
            (GroupElement::Lex(a, b), GroupElement::Lex(c, d)) => (a, b) <= (c, d),
            (GroupElement::Affine(_), GroupElement::Affine(_)) => {
                self.is_positive(&self.mul(&self.inv(g), h))
            }
            (GroupElement::Unit, GroupElement::Unit) => true,
            _ => panic!("mixed group instances: {g} and {h}"),
        }
    }

    pub fn meet(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match (g, h) {
            (GroupElement::Vector(x), GroupElement::Vector(y)) => {
                GroupElement::Vector(x.iter().zip(y).map(|(a, b)| *a.min(b)).collect())
            }
            _ => {
                if self.leq(g, h) {
                    g.clone()
                } else {
                    h.clone()
                }
            }
        }
    }

    pub fn join(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match (g, h) {
            (GroupElement::Vector(x), GroupElement::Vector(y)) => {
                GroupElement::Vector(x.iter().zip(y).map(|(a, b)| *a.max(b)).collect())
            }
            _ => {
                if self.leq(g, h) {
                    h.clone()
                } else {
                    g.clone()
                }
            }
        }
    }

    /// Some `d` below every listed element: the (componentwise) minimum.
    pub fn lower_bound(&self, gs: &[GroupElement]) -> Result<GroupElement> {
        let (first, rest) = gs.split_first().ok_or(Error::EmptyList)?;
        Ok(rest.iter().fold(first.clone(), |acc, g| self.meet(&acc, g)))
    }

    pub fn upper_bound(&self, gs: &[GroupElement]) -> Result<GroupElement> {
        let (first, rest) = gs.split_first().ok_or(Error::EmptyList)?;
        Ok(rest.iter().fold(first.clone(), |acc, g| self.join(&acc, g)))
    }

    /// All `g` with `lo <= g <= hi`, ascending (row-major for vectors).
    pub fn enumerate_interval(&self, lo: &GroupElement, hi: &GroupElement) -> Result<Vec<GroupElement>> {
        match (lo, hi) {
            (GroupElement::Int(a), GroupElement::Int(b)) => Ok((*a..=*b).map(GroupElement::Int).collect()),
            (GroupElement::Vector(a), GroupElement::Vector(b)) => {
                if !self.leq(lo, hi) {
                    return Ok(Vec::new());
                }
                let columns: Vec<Vec<GroupElement>> = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (*x..=*y).map(GroupElement::Int).collect())
                    .collect();
                Ok(cartesian(&columns)
                    .into_iter()
                    .map(|t| {
                        GroupElement::Vector(
                            t.iter()
                                .map(|c| match c {
                                    GroupElement::Int(v) => *v,
                                    _ => unreachable!(),
                                })
                                .collect(),
                        )
                    })
                    .collect())
            }
            (GroupElement::Unit, GroupElement::Unit) => Ok(vec![GroupElement::Unit]),
            _ => Err(Error::NotEnumerable(self.kind.to_string())),
        }
    }

    /// The bound-`B` power of the instance's generator: `B`, `(B,..,B)`, or
    /// the unit. `None` for instances without enumerable intervals.
    pub fn generator_power(&self, bound: u32) -> Option<GroupElement> {
        let b = i64::from(bound);
        match self.kind {
            GroupKind::Integers => Some(GroupElement::Int(b)),
            GroupKind::IntVectors(d) => Some(GroupElement::Vector(SmallVec::from_elem(b, d))),
            GroupKind::Trivial => Some(GroupElement::Unit),
            GroupKind::LexInt | GroupKind::AffineRational => None,
        }
    }

    /// `[e, g_B]`.
    pub fn positive_ball(&self, bound: u32) -> Option<Vec<GroupElement>> {
        let top = self.generator_power(bound)?;
        self.enumerate_interval(&self.identity(), &top).ok()
    }

    /// `[g_B^-1, e]`.
    pub fn negative_ball(&self, bound: u32) -> Option<Vec<GroupElement>> {
        let top = self.generator_power(bound)?;
        self.enumerate_interval(&self.inv(&top), &self.identity()).ok()
    }

    /// `[g_B^-1, g_B]`.
    pub fn ball(&self, bound: u32) -> Option<Vec<GroupElement>> {
        let top = self.generator_power(bound)?;
        self.enumerate_interval(&self.inv(&top), &top).ok()
    }

    /// A random element of moderate size. Deterministic for a seeded `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, bound: u32) -> GroupElement {
        let b = i64::from(bound.max(1));
        match self.kind {
            GroupKind::Integers => GroupElement::Int(rng.gen_range(-b..=b)),
            GroupKind::IntVectors(d) => GroupElement::Vector((0..d).map(|_| rng.gen_range(-b..=b)).collect()),
            GroupKind::LexInt => GroupElement::Lex(rng.gen_range(-b..=b), rng.gen_range(-b..=b)),
            GroupKind::AffineRational => {
                let a = rat(rng.gen_range(1..=4), rng.gen_range(1..=4));
                let b = rat(rng.gen_range(-4 * b..=4 * b), rng.gen_range(1..=4));
                GroupElement::Affine(Box::new(Affine { a, b }))
            }
            GroupKind::Trivial => GroupElement::Unit,
        }
    }

    pub fn sample_positive<R: Rng + ?Sized>(&self, rng: &mut R, bound: u32) -> GroupElement {
        match self.kind {
            GroupKind::IntVectors(d) => {
                GroupElement::Vector((0..d).map(|_| rng.gen_range(0..=i64::from(bound.max(1)))).collect())
            }
            _ => {
                let g = self.sample(rng, bound);
                if self.is_positive(&g) {
                    g
                } else {
                    self.inv(&g)
                }
            }
        }
    }

    pub fn sample_negative<R: Rng + ?Sized>(&self, rng: &mut R, bound: u32) -> GroupElement {
        let g = self.sample_positive(rng, bound);
        self.inv(&g)
    }

    /// Whether every `x` in `[e, a]` commutes with every `y` in `[e, b]`.
    pub fn com(&self, a: &GroupElement, b: &GroupElement) -> Result<ComOutcome> {
        for g in [a, b] {
            self.check(g)?;
            if !self.is_positive(g) {
                return Err(Error::BelowIdentity(g.to_string()));
            }
        }
        if self.is_abelian() {
            return Ok(ComOutcome::Commute);
        }
        let e = self.identity();
        if *a == e || *b == e {
            return Ok(ComOutcome::Commute);
        }
        // Intervals below (1, t) stay inside the abelian subgroup {(1, s)}.
        if affine_is_translation(a) && affine_is_translation(b) {
            return Ok(ComOutcome::Commute);
        }
        let commute = |x: &GroupElement, y: &GroupElement| self.mul(x, y) == self.mul(y, x);
        if !commute(a, b) {
            return Ok(ComOutcome::Witness(a.clone(), b.clone()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(COM_SEED);
        for _ in 0..COM_SAMPLES {
            let x = sample_affine_below(&mut rng, a);
            let y = sample_affine_below(&mut rng, b);
            debug_assert!(self.leq(&e, &x) && self.leq(&x, a));
            debug_assert!(self.leq(&e, &y) && self.leq(&y, b));
            if !commute(&x, &y) {
                return Ok(ComOutcome::Witness(x, y));
            }
        }
        Ok(ComOutcome::Unknown)
    }

    /// A refinement table for `a1 a2 = b1 b2` in the positive cone.
    ///
    /// Enumerable instances search `c11` over `[e, a1]` in canonical order
    /// and return the first table that verifies. Non-enumerable (linearly
    /// ordered) instances use the closed form: `(a1, e, a1^-1 b1, b2)` if
    /// `a1 <= b1`, otherwise `(b1, b1^-1 a1, e, a2)`.
    pub fn refine(
        &self,
        a1: &GroupElement,
        a2: &GroupElement,
        b1: &GroupElement,
        b2: &GroupElement,
        class: RdpClass,
    ) -> Result<Option<RefinementTable<GroupElement>>> {
        for g in [a1, a2, b1, b2] {
            self.check(g)?;
            if !self.is_positive(g) {
                return Err(Error::BelowIdentity(g.to_string()));
            }
        }
        let left = self.mul(a1, a2);
        let right = self.mul(b1, b2);
        if left != right {
            return Err(Error::UnequalProducts(left.to_string(), right.to_string()));
        }
        if self.flags().enumerable_intervals {
            return rdp::brute_refine(self, a1, a2, b1, b2, class);
        }
        let e = self.identity();
        let table = if self.leq(a1, b1) {
            RefinementTable::new(a1.clone(), e, self.mul(&self.inv(a1), b1), b2.clone())
        } else {
            RefinementTable::new(b1.clone(), self.mul(&self.inv(b1), a1), e, a2.clone())
        };
        Ok(Some(table))
    }

    /// Parses the rendering produced by `Display` for this instance.
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        let err = || Error::Parse { what: "group element", input: s.to_string() };
        let inner = |open: char, close: char| -> Option<Vec<&str>> {
            let body = s.strip_prefix(open)?.strip_suffix(close)?;
            Some(split_top_level(body))
        };
        let g = match self.kind {
            GroupKind::Integers => GroupElement::Int(s.parse().map_err(|_| err())?),
            GroupKind::IntVectors(_) => {
                let parts = inner('(', ')').ok_or_else(err)?;
                let v: std::result::Result<IntVec, _> = parts.iter().map(|p| p.parse::<i64>()).collect();
                GroupElement::Vector(v.map_err(|_| err())?)
            }
            GroupKind::LexInt => {
                let parts = inner('<', '>').ok_or_else(err)?;
                if parts.len() != 2 {
                    return Err(err());
                }
                GroupElement::Lex(parts[0].parse().map_err(|_| err())?, parts[1].parse().map_err(|_| err())?)
            }
            GroupKind::AffineRational => {
                let parts = inner('(', ')').ok_or_else(err)?;
                if parts.len() != 2 {
                    return Err(err());
                }
                let a: BigRational = parts[0].parse().map_err(|_| err())?;
                let b: BigRational = parts[1].parse().map_err(|_| err())?;
                GroupElement::affine(a, b)?
            }
            GroupKind::Trivial => {
                if s == "e" {
                    GroupElement::Unit
                } else {
                    return Err(err());
                }
            }
        };
        self.check(&g)?;
        Ok(g)
    }
}

fn affine_is_translation(g: &GroupElement) -> bool {
    matches!(g, GroupElement::Affine(p) if p.a.is_one())
}

/// A random element of `[e, top]` in the affine group, `top >= e`.
fn sample_affine_below<R: Rng + ?Sized>(rng: &mut R, top: &GroupElement) -> GroupElement {
    let GroupElement::Affine(p) = top else { unreachable!("affine only") };
    let one = BigRational::one();
    let t = rat(rng.gen_range(0..=8), 8);
    if p.a == one {
        // [e, (1, s)] = {(1, y) : 0 <= y <= s}
        return GroupElement::Affine(Box::new(Affine { a: one, b: &p.b * t }));
    }
    // Strictly between the end slices the second coordinate is free.
    match rng.gen_range(0..4) {
        0 => GroupElement::Affine(Box::new(Affine { a: one, b: rat(rng.gen_range(0..=8), 2) })),
        1 => GroupElement::Affine(Box::new(Affine {
            a: p.a.clone(),
            b: &p.b - rat(rng.gen_range(0..=8), 2),
        })),
        _ => {
            let s = rat(rng.gen_range(1..=7), 8);
            let a = &one + (&p.a - &one) * s;
            GroupElement::Affine(Box::new(Affine { a, b: rat(rng.gen_range(-16..=16), 4) }))
        }
    }
}

impl RefinementAmbient for PoGroup {
    type Elem = GroupElement;

    fn zero(&self) -> GroupElement {
        self.identity()
    }

    fn compose(&self, a: &GroupElement, b: &GroupElement) -> Option<GroupElement> {
        Some(self.mul(a, b))
    }

    fn is_positive(&self, a: &GroupElement) -> bool {
        PoGroup::is_positive(self, a)
    }

    fn leq(&self, a: &GroupElement, b: &GroupElement) -> bool {
        PoGroup::leq(self, a, b)
    }

    fn residual(&self, c: &GroupElement, a: &GroupElement) -> Option<GroupElement> {
        let x = self.mul(&self.inv(c), a);
        PoGroup::is_positive(self, &x).then_some(x)
    }

    fn com(&self, a: &GroupElement, b: &GroupElement) -> Tri {
        match PoGroup::com(self, a, b) {
            Ok(outcome) => outcome.tri(),
            Err(_) => Tri::No,
        }
    }

    fn meet(&self, a: &GroupElement, b: &GroupElement) -> Option<GroupElement> {
        Some(PoGroup::meet(self, a, b))
    }

    fn interval(&self, lo: &GroupElement, hi: &GroupElement) -> Option<Vec<GroupElement>> {
        self.enumerate_interval(lo, hi).ok()
    }

    fn describe(&self) -> String {
        self.kind.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> GroupElement {
        GroupElement::Int(v)
    }

    /// 2x2 upper-triangular matrices as an independent model of the affine group.
    fn matrix(g: &GroupElement) -> [[BigRational; 2]; 2] {
        let GroupElement::Affine(p) = g else { panic!() };
        [[p.a.clone(), p.b.clone()], [BigRational::zero(), BigRational::one()]]
    }

    fn matmul(x: &[[BigRational; 2]; 2], y: &[[BigRational; 2]; 2]) -> [[BigRational; 2]; 2] {
        let cell = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
        [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]]
    }

    #[test]
    fn integer_product_is_addition() {
        let g = PoGroup::integers();
        assert_eq!(g.mul(&int(2), &int(3)), int(5));
        assert_eq!(g.inv(&int(5)), int(-5));
    }

    #[test]
    fn affine_product_matches_matrices() {
        let g = PoGroup::affine_rational();
        let x = GroupElement::affine_frac(2, 1, 0, 1);
        let y = GroupElement::affine_frac(1, 1, 1, 1);
        assert_eq!(g.mul(&x, &y), GroupElement::affine_frac(2, 1, 2, 1));
        assert_eq!(g.mul(&y, &x), GroupElement::affine_frac(2, 1, 1, 1));
        for (p, q) in [(&x, &y), (&y, &x)] {
            assert_eq!(matrix(&g.mul(p, q)), matmul(&matrix(p), &matrix(q)));
        }
    }

    #[test]
    fn affine_inverse() {
        let g = PoGroup::affine_rational();
        let x = GroupElement::affine_frac(2, 1, 3, 1);
        let inv = g.inv(&x);
        assert_eq!(inv, GroupElement::affine_frac(1, 2, -3, 2));
        assert_eq!(g.mul(&x, &inv), g.identity());
        assert_eq!(g.mul(&inv, &x), g.identity());
    }

    #[test]
    fn identity_law_and_trivial() {
        for g in [PoGroup::integers(), PoGroup::int_vectors(3), PoGroup::lex_int(), PoGroup::affine_rational()] {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let x = g.sample(&mut rng, 3);
            assert_eq!(g.mul(&x, &g.identity()), x);
            assert_eq!(g.mul(&g.identity(), &x), x);
        }
        let t = PoGroup::trivial();
        assert_eq!(t.inv(&GroupElement::Unit), GroupElement::Unit);
    }

    #[test]
    fn mixed_instances_are_rejected() {
        let g = PoGroup::integers();
        assert!(matches!(
            g.try_mul(&int(1), &GroupElement::vector(&[1, 2])),
            Err(Error::MixedInstance(..))
        ));
        let v = PoGroup::int_vectors(2);
        assert!(v.try_mul(&GroupElement::vector(&[1]), &GroupElement::vector(&[1, 2])).is_err());
    }

    #[test]
    fn orders() {
        let v = PoGroup::int_vectors(2);
        assert!(v.leq(&GroupElement::vector(&[1, 2]), &GroupElement::vector(&[1, 3])));
        assert!(!v.leq(&GroupElement::vector(&[1, 2]), &GroupElement::vector(&[2, 1])));
        let a = PoGroup::affine_rational();
        assert!(a.leq(&GroupElement::affine_frac(1, 1, 0, 1), &GroupElement::affine_frac(1, 1, 1, 1)));
        assert!(a.leq(&GroupElement::affine_frac(1, 1, 0, 1), &GroupElement::affine_frac(2, 1, -100, 1)));
        assert!(!a.leq(&GroupElement::affine_frac(2, 1, -100, 1), &GroupElement::affine_frac(1, 1, 0, 1)));
    }

    #[test]
    fn affine_order_is_lexicographic_on_pairs() {
        // a > 0 makes g^-1 h positive exactly when (a, b) <= (c, d) lexicographically.
        let g = PoGroup::affine_rational();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let x = g.sample(&mut rng, 2);
            let y = g.sample(&mut rng, 2);
            let (GroupElement::Affine(p), GroupElement::Affine(q)) = (&x, &y) else { unreachable!() };
            let lex = p.a < q.a || (p.a == q.a && p.b <= q.b);
            assert_eq!(g.leq(&x, &y), lex, "{x} {y}");
        }
    }

    #[test]
    fn lower_bounds() {
        let z = PoGroup::integers();
        assert_eq!(z.lower_bound(&[int(3), int(-1), int(2)]).unwrap(), int(-1));
        assert_eq!(z.lower_bound(&[]), Err(Error::EmptyList));
        let v = PoGroup::int_vectors(2);
        let lb = v.lower_bound(&[GroupElement::vector(&[1, 5]), GroupElement::vector(&[4, 0])]).unwrap();
        assert_eq!(lb, GroupElement::vector(&[1, 0]));
        let a = PoGroup::affine_rational();
        let xs = [GroupElement::affine_frac(2, 1, 0, 1), GroupElement::affine_frac(1, 1, -1, 1)];
        let lb = a.lower_bound(&xs).unwrap();
        assert_eq!(lb, xs[1]);
        assert!(xs.iter().all(|x| a.leq(&lb, x)));
    }

    #[test]
    fn enumerate_intervals() {
        let z = PoGroup::integers();
        assert_eq!(z.enumerate_interval(&int(0), &int(2)).unwrap(), vec![int(0), int(1), int(2)]);
        let v = PoGroup::int_vectors(2);
        let got = v.enumerate_interval(&GroupElement::vector(&[0, 0]), &GroupElement::vector(&[1, 1])).unwrap();
        let want: Vec<GroupElement> =
            [[0, 0], [0, 1], [1, 0], [1, 1]].iter().map(|p| GroupElement::vector(p)).collect();
        assert_eq!(got, want);
        let l = PoGroup::lex_int();
        assert!(matches!(
            l.enumerate_interval(&GroupElement::Lex(0, 0), &GroupElement::Lex(1, 0)),
            Err(Error::NotEnumerable(_))
        ));
    }

    #[test]
    fn com_cases() {
        let z = PoGroup::integers();
        assert_eq!(z.com(&int(3), &int(7)).unwrap(), ComOutcome::Commute);
        assert!(matches!(z.com(&int(-1), &int(7)), Err(Error::BelowIdentity(_))));
        let a = PoGroup::affine_rational();
        let e = a.identity();
        let big = GroupElement::affine_frac(2, 1, 5, 1);
        assert_eq!(a.com(&e, &big).unwrap(), ComOutcome::Commute);
        let t1 = GroupElement::affine_frac(1, 1, 1, 1);
        let t2 = GroupElement::affine_frac(1, 1, 2, 1);
        assert_eq!(a.com(&t1, &t2).unwrap(), ComOutcome::Commute);
        // Translations below (1, t) form an abelian subgroup: check directly.
        for s in 0..=4 {
            let x = GroupElement::affine(BigRational::one(), rat(s, 4)).unwrap();
            assert!(a.leq(&e, &x) && a.leq(&x, &t1));
        }
        match a.com(&big, &big).unwrap() {
            ComOutcome::Witness(x, y) => assert_ne!(a.mul(&x, &y), a.mul(&y, &x)),
            other => panic!("expected a witness, got {other:?}"),
        }
        match a.com(&t1, &big).unwrap() {
            ComOutcome::Witness(x, y) => assert_ne!(a.mul(&x, &y), a.mul(&y, &x)),
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn refine_integers_brute_force() {
        let z = PoGroup::integers();
        let t = z.refine(&int(3), &int(2), &int(1), &int(4), RdpClass::Rdp1).unwrap().unwrap();
        assert_eq!(t, RefinementTable::new(int(0), int(3), int(1), int(1)));
        let t = z.refine(&int(4), &int(0), &int(4), &int(0), RdpClass::Rdp1).unwrap().unwrap();
        assert_eq!(t, RefinementTable::new(int(4), int(0), int(0), int(0)));
        assert!(matches!(
            z.refine(&int(3), &int(2), &int(1), &int(3), RdpClass::Rdp),
            Err(Error::UnequalProducts(..))
        ));
    }

    #[test]
    fn refine_affine_closed_form() {
        let a = PoGroup::affine_rational();
        let a1 = GroupElement::affine_frac(1, 1, 1, 1);
        let a2 = GroupElement::affine_frac(2, 1, 0, 1);
        let b1 = GroupElement::affine_frac(1, 1, 2, 1);
        let b2 = GroupElement::affine_frac(2, 1, -1, 1);
        assert_eq!(a.mul(&a1, &a2), GroupElement::affine_frac(2, 1, 1, 1));
        assert_eq!(a.mul(&b1, &b2), GroupElement::affine_frac(2, 1, 1, 1));
        let t = a.refine(&a1, &a2, &b1, &b2, RdpClass::Rdp1).unwrap().unwrap();
        assert_eq!(t, RefinementTable::new(a1.clone(), a.identity(), a1.clone(), b2.clone()));
        // Entry equations through the matrix model.
        assert_eq!(matmul(&matrix(&t.c11), &matrix(&t.c12)), matrix(&a1));
        assert_eq!(matmul(&matrix(&t.c21), &matrix(&t.c22)), matrix(&a2));
        assert_eq!(matmul(&matrix(&t.c11), &matrix(&t.c21)), matrix(&b1));
        assert_eq!(matmul(&matrix(&t.c12), &matrix(&t.c22)), matrix(&b2));
    }

    #[test]
    fn parse_round_trip() {
        let cases = [
            (PoGroup::integers(), "-3"),
            (PoGroup::int_vectors(2), "(1,-2)"),
            (PoGroup::lex_int(), "<0,5>"),
            (PoGroup::affine_rational(), "(2,-1/2)"),
            (PoGroup::trivial(), "e"),
        ];
        for (g, s) in cases {
            assert_eq!(g.parse_element(s).unwrap().to_string(), s);
        }
        assert!(PoGroup::affine_rational().parse_element("(0,1)").is_err());
        assert!(PoGroup::int_vectors(3).parse_element("(1,2)").is_err());
    }

    #[test]
    fn flags_per_kind() {
        let f = PoGroup::integers().flags();
        assert_eq!((f.subdirectly_irreducible, f.enumerable_intervals, f.lattice_ordered), (Tri::Yes, true, true));
        let f = PoGroup::int_vectors(2).flags();
        assert_eq!((f.subdirectly_irreducible, f.enumerable_intervals), (Tri::No, true));
        let f = PoGroup::lex_int().flags();
        assert_eq!((f.subdirectly_irreducible, f.enumerable_intervals), (Tri::Yes, false));
        let f = PoGroup::affine_rational().flags();
        assert_eq!((f.subdirectly_irreducible, f.enumerable_intervals), (Tri::Unknown, false));
        let f = PoGroup::trivial().flags();
        assert_eq!((f.subdirectly_irreducible, f.enumerable_intervals), (Tri::Yes, true));
    }
}
