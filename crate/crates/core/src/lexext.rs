//! The lexicographic extension `Z ×_φ G^I` and its n-perfect intervals.
//!
//! Elements are pairs `(n, x)` with product
//! `(n, x) * (m, y) = (n + m, x_i y_{φ^n(i)})`, ordered by level first and
//! then componentwise. The interval `[0, u_n]` with `u_n = (n, e^I)` is a
//! pseudo effect algebra whose slices `E_k` are the elements of level `k`.
//! For the two-level case the unit is `(1, e^I)`; a unit at level 0 would
//! be the neutral element and give the trivial interval.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pea::{self, PeaUniverse, Window, WindowSpec};
use crate::pogroup::{GroupElement, PoGroup};
use crate::rdp::RefinementAmbient;
use crate::report::{Check, CheckReport};
use crate::structure::Permutation;
use crate::tuple::{cartesian, render, split_top_level, Tuple};
use crate::Tri;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LexElement {
    pub level: i64,
    pub values: Tuple,
}

impl LexElement {
    pub fn new(level: i64, values: impl IntoIterator<Item = GroupElement>) -> LexElement {
        LexElement { level, values: values.into_iter().collect() }
    }
}

impl fmt::Display for LexElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}){}", self.level, render(&self.values))
    }
}

/// Powers of φ are looked up modulo its order when that is small.
const POWER_TABLE_LIMIT: u64 = 4096;

enum Shift<'a> {
    None,
    Table(&'a [usize]),
    Computed(Permutation),
}

#[derive(Clone, Debug)]
pub struct LexGroup {
    group: PoGroup,
    phi: Permutation,
    order: u64,
    powers: Vec<Vec<usize>>,
}

impl LexGroup {
    pub fn new(group: PoGroup, phi: Permutation) -> LexGroup {
        let order = phi.order();
        let powers = if order <= POWER_TABLE_LIMIT {
            let mut out = Vec::with_capacity(order as usize);
            let mut p = Permutation::identity(phi.len());
            for _ in 0..order {
                out.push(p.images().to_vec());
                p = phi.after(&p);
            }
            out
        } else {
            Vec::new()
        };
        LexGroup { group, phi, order, powers }
    }

    pub fn group(&self) -> &PoGroup {
        &self.group
    }

    pub fn phi(&self) -> &Permutation {
        &self.phi
    }

    pub fn index_size(&self) -> usize {
        self.phi.len()
    }

    pub fn identity_tuple(&self) -> Tuple {
        (0..self.index_size()).map(|_| self.group.identity()).collect()
    }

    pub fn zero(&self) -> LexElement {
        LexElement { level: 0, values: self.identity_tuple() }
    }

    /// `psi(k, t)_i = t_{φ^k(i)}`; `psi(a, psi(b, t)) = psi(a + b, t)`.
    pub fn psi(&self, k: i64, t: &Tuple) -> Tuple {
        match self.shift(k) {
            Shift::None => t.clone(),
            Shift::Table(p) => p.iter().map(|&j| t[j].clone()).collect(),
            Shift::Computed(p) => (0..t.len()).map(|i| t[p.apply(i)].clone()).collect(),
        }
    }

    fn shift(&self, k: i64) -> Shift<'_> {
        if self.order == 1 || k == 0 {
            return Shift::None;
        }
        if self.powers.is_empty() {
            return Shift::Computed(self.phi.pow(k));
        }
        match k.rem_euclid(self.order as i64) as usize {
            0 => Shift::None,
            r => Shift::Table(&self.powers[r]),
        }
    }

    pub fn check(&self, x: &LexElement) -> Result<()> {
        if x.values.len() != self.index_size() {
            return Err(Error::LengthMismatch(x.values.len(), self.index_size()));
        }
        x.values.iter().try_for_each(|g| self.group.check(g))
    }

    pub fn mul(&self, x: &LexElement, y: &LexElement) -> LexElement {
        let g = &self.group;
        let values = match self.shift(x.level) {
            Shift::None => x.values.iter().zip(&y.values).map(|(a, b)| g.mul(a, b)).collect(),
            Shift::Table(p) => x.values.iter().zip(p).map(|(a, &j)| g.mul(a, &y.values[j])).collect(),
            Shift::Computed(p) => x.values.iter().enumerate().map(|(i, a)| g.mul(a, &y.values[p.apply(i)])).collect(),
        };
        LexElement { level: x.level + y.level, values }
    }

    /// `(n, x)^-1 = (-n, x_{φ^-n(i)}^-1)`.
    pub fn inv(&self, x: &LexElement) -> LexElement {
        let shifted = self.psi(-x.level, &x.values);
        LexElement { level: -x.level, values: shifted.iter().map(|g| self.group.inv(g)).collect() }
    }

    pub fn leq(&self, x: &LexElement, y: &LexElement) -> bool {
        x.level < y.level
            || (x.level == y.level && x.values.iter().zip(&y.values).all(|(a, b)| self.group.leq(a, b)))
    }

    pub fn is_positive(&self, x: &LexElement) -> bool {
        x.level > 0 || (x.level == 0 && x.values.iter().all(|g| self.group.is_positive(g)))
    }

    pub fn meet(&self, x: &LexElement, y: &LexElement) -> LexElement {
        match x.level.cmp(&y.level) {
            std::cmp::Ordering::Less => x.clone(),
            std::cmp::Ordering::Greater => y.clone(),
            std::cmp::Ordering::Equal => LexElement {
                level: x.level,
                values: x.values.iter().zip(&y.values).map(|(a, b)| self.group.meet(a, b)).collect(),
            },
        }
    }

    pub fn join(&self, x: &LexElement, y: &LexElement) -> LexElement {
        match x.level.cmp(&y.level) {
            std::cmp::Ordering::Less => y.clone(),
            std::cmp::Ordering::Greater => x.clone(),
            std::cmp::Ordering::Equal => LexElement {
                level: x.level,
                values: x.values.iter().zip(&y.values).map(|(a, b)| self.group.join(a, b)).collect(),
            },
        }
    }

    /// `a com b` for positive `a`, `b`, decided from the level structure.
    ///
    /// A positive element of level at least 1 has every positive level-0
    /// element below it, and some level-1 element. `(1, t)` commutes with
    /// `(0, z)` iff `z_{φ(i)} = z_i`, so against a level-0 `b` this holds
    /// exactly when `b` is supported on fixed points of φ, and two elements
    /// of positive level commute throughout only when φ is the identity.
    pub fn com(&self, a: &LexElement, b: &LexElement) -> Tri {
        let zero = self.zero();
        if *a == zero || *b == zero {
            return Tri::Yes;
        }
        if a.level == 0 && b.level == 0 {
            return a
                .values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| self.group.com(x, y).map(|o| o.tri()).unwrap_or(Tri::No))
                .fold(Tri::Yes, Tri::and);
        }
        if !self.group.is_abelian() {
            return Tri::Unknown;
        }
        if self.phi.is_identity() {
            return Tri::Yes;
        }
        let low = match (a.level, b.level) {
            (0, _) => a,
            (_, 0) => b,
            _ => return Tri::No,
        };
        let e = self.group.identity();
        Tri::from_bool((0..self.index_size()).all(|i| low.values[i] == e || self.phi.apply(i) == i))
    }

    pub fn parse_element(&self, s: &str) -> Result<LexElement> {
        let err = || Error::Parse { what: "lex element", input: s.to_string() };
        let s = s.trim();
        let rest = s.strip_prefix('(').ok_or_else(err)?;
        let close = rest.find(')').ok_or_else(err)?;
        let level: i64 = rest[..close].trim().parse().map_err(|_| err())?;
        let body = rest[close + 1..].trim().strip_prefix('[').and_then(|b| b.strip_suffix(']')).ok_or_else(err)?;
        let values: Tuple =
            split_top_level(body).into_iter().map(|p| self.group.parse_element(p)).collect::<Result<_>>()?;
        let x = LexElement { level, values };
        self.check(&x)?;
        Ok(x)
    }

    pub fn describe(&self) -> String {
        format!("Z x_phi {}^{} with phi = {}", self.group.kind(), self.index_size(), self.phi)
    }
}

impl RefinementAmbient for LexGroup {
    type Elem = LexElement;

    fn zero(&self) -> LexElement {
        LexGroup::zero(self)
    }

    fn compose(&self, a: &LexElement, b: &LexElement) -> Option<LexElement> {
        Some(self.mul(a, b))
    }

    fn is_positive(&self, a: &LexElement) -> bool {
        LexGroup::is_positive(self, a)
    }

    fn leq(&self, a: &LexElement, b: &LexElement) -> bool {
        LexGroup::leq(self, a, b)
    }

    fn residual(&self, c: &LexElement, a: &LexElement) -> Option<LexElement> {
        let x = self.mul(&self.inv(c), a);
        LexGroup::is_positive(self, &x).then_some(x)
    }

    fn com(&self, a: &LexElement, b: &LexElement) -> Tri {
        LexGroup::com(self, a, b)
    }

    fn meet(&self, a: &LexElement, b: &LexElement) -> Option<LexElement> {
        self.group.flags().lattice_ordered.then(|| LexGroup::meet(self, a, b))
    }

    /// Intervals of the extension are infinite once levels differ.
    fn interval(&self, lo: &LexElement, hi: &LexElement) -> Option<Vec<LexElement>> {
        if lo.level != hi.level {
            return None;
        }
        let columns: Option<Vec<Vec<GroupElement>>> = lo
            .values
            .iter()
            .zip(&hi.values)
            .map(|(a, b)| self.group.enumerate_interval(a, b).ok())
            .collect();
        Some(cartesian(&columns?).into_iter().map(|values| LexElement { level: lo.level, values }).collect())
    }

    fn describe(&self) -> String {
        LexGroup::describe(self)
    }
}

/// The restriction of the extension to a finite element list, so that
/// intervals can be enumerated. Used by the brute-force oracles.
pub struct LexWindow<'a> {
    pub lex: &'a LexGroup,
    pub elements: &'a [LexElement],
}

impl RefinementAmbient for LexWindow<'_> {
    type Elem = LexElement;

    fn zero(&self) -> LexElement {
        self.lex.zero()
    }

    fn compose(&self, a: &LexElement, b: &LexElement) -> Option<LexElement> {
        Some(self.lex.mul(a, b))
    }

    fn is_positive(&self, a: &LexElement) -> bool {
        self.lex.is_positive(a)
    }

    fn leq(&self, a: &LexElement, b: &LexElement) -> bool {
        self.lex.leq(a, b)
    }

    fn residual(&self, c: &LexElement, a: &LexElement) -> Option<LexElement> {
        RefinementAmbient::residual(self.lex, c, a)
    }

    fn com(&self, a: &LexElement, b: &LexElement) -> Tri {
        self.lex.com(a, b)
    }

    fn meet(&self, a: &LexElement, b: &LexElement) -> Option<LexElement> {
        RefinementAmbient::meet(self.lex, a, b)
    }

    fn interval(&self, lo: &LexElement, hi: &LexElement) -> Option<Vec<LexElement>> {
        Some(self.elements.iter().filter(|x| self.lex.leq(lo, x) && self.lex.leq(x, hi)).cloned().collect())
    }

    fn describe(&self) -> String {
        format!("{} restricted to {} elements", self.lex.describe(), self.elements.len())
    }
}

/// `Γ(Z ×_φ G^I, u_n)`, the interval `[0, (n, e^I)]`.
#[derive(Clone, Debug)]
pub struct NPerfectAlgebra {
    lex: LexGroup,
    n: u32,
}

impl NPerfectAlgebra {
    pub fn new(lex: LexGroup, n: u32) -> Result<NPerfectAlgebra> {
        if n == 0 {
            return Err(Error::Invalid("slice count n must be at least 1".into()));
        }
        Ok(NPerfectAlgebra { lex, n })
    }

    pub fn lex(&self) -> &LexGroup {
        &self.lex
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn unit(&self) -> LexElement {
        LexElement { level: i64::from(self.n), values: self.lex.identity_tuple() }
    }

    /// Level 0 needs values `>= e`, level `n` values `<= e`, levels in
    /// between are unrestricted.
    pub fn is_member(&self, x: &LexElement) -> bool {
        let g = self.lex.group();
        let n = i64::from(self.n);
        x.values.len() == self.lex.index_size()
            && match x.level {
                0 => x.values.iter().all(|v| g.is_positive(v)),
                k if k == n => x.values.iter().all(|v| g.is_negative(v)),
                k => 0 < k && k < n,
            }
    }

    pub fn add(&self, x: &LexElement, y: &LexElement) -> Option<LexElement> {
        if y.level > i64::from(self.n) - x.level {
            return None;
        }
        let p = self.lex.mul(x, y);
        self.is_member(&p).then_some(p)
    }

    /// `x⁻ = u x⁻¹ = (n - k, x_{φ^{n-k}(i)}⁻¹)` and
    /// `x∼ = x⁻¹ u = (n - k, x_{φ^{-k}(i)}⁻¹)`.
    pub fn negations(&self, x: &LexElement) -> (LexElement, LexElement) {
        let g = self.lex.group();
        let n = i64::from(self.n);
        let k = x.level;
        let inv = |t: Tuple| -> Tuple { t.iter().map(|v| g.inv(v)).collect() };
        let minus = LexElement { level: n - k, values: inv(self.lex.psi(n - k, &x.values)) };
        let tilde = LexElement { level: n - k, values: inv(self.lex.psi(-k, &x.values)) };
        (minus, tilde)
    }

    /// `s(k, x) = k / n`.
    pub fn canonical_state(&self, x: &LexElement) -> BigRational {
        BigRational::new(BigInt::from(x.level), BigInt::from(self.n))
    }

    pub fn parse_element(&self, s: &str) -> Result<LexElement> {
        let x = self.lex.parse_element(s)?;
        if !self.is_member(&x) {
            return Err(Error::NotMember { element: x.to_string(), instance: PeaUniverse::describe(self) });
        }
        Ok(x)
    }

    fn sample_member<R: Rng>(&self, rng: &mut R, bound: u32) -> LexElement {
        let g = self.lex.group();
        let n = i64::from(self.n);
        let level = rng.gen_range(0..=n);
        let values = (0..self.lex.index_size())
            .map(|_| match level {
                0 => g.sample_positive(rng, bound),
                k if k == n => g.sample_negative(rng, bound),
                _ => g.sample(rng, bound),
            })
            .collect();
        LexElement { level, values }
    }
}

impl PeaUniverse for NPerfectAlgebra {
    type Elem = LexElement;

    fn zero(&self) -> LexElement {
        self.lex.zero()
    }

    fn one(&self) -> LexElement {
        self.unit()
    }

    fn add(&self, a: &LexElement, b: &LexElement) -> Option<LexElement> {
        NPerfectAlgebra::add(self, a, b)
    }

    fn leq(&self, a: &LexElement, b: &LexElement) -> bool {
        self.lex.leq(a, b)
    }

    fn negations(&self, a: &LexElement) -> (LexElement, LexElement) {
        NPerfectAlgebra::negations(self, a)
    }

    fn meet(&self, a: &LexElement, b: &LexElement) -> Option<LexElement> {
        RefinementAmbient::meet(&self.lex, a, b)
    }

    fn join(&self, a: &LexElement, b: &LexElement) -> Option<LexElement> {
        self.lex.group().flags().lattice_ordered.then(|| self.lex.join(a, b))
    }

    fn window(&self, spec: &WindowSpec) -> Result<Window<LexElement>> {
        let g = self.lex.group();
        let m = self.lex.index_size();
        let n = i64::from(self.n);
        match (g.positive_ball(spec.bound), g.negative_ball(spec.bound), g.ball(spec.bound)) {
            (Some(pos), Some(neg), Some(all)) => {
                let ends = (pos.len() as u128).saturating_pow(m as u32);
                let middle = (all.len() as u128).saturating_pow(m as u32);
                let estimate = 2 * ends + (n as u128 - 1) * middle;
                if estimate > spec.cap as u128 {
                    return Err(Error::WindowTooLarge { estimate, cap: spec.cap as u128 });
                }
                let mut elements = Vec::with_capacity(estimate as usize);
                for level in 0..=n {
                    let ball = if level == 0 {
                        &pos
                    } else if level == n {
                        &neg
                    } else {
                        &all
                    };
                    let columns = vec![ball.clone(); m];
                    elements.extend(cartesian(&columns).into_iter().map(|values| LexElement { level, values }));
                }
                Ok(Window::exhaustive(elements, format!("bound {}", spec.bound)))
            }
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                let mut elements = vec![self.zero(), self.unit()];
                for _ in 0..spec.samples {
                    let x = self.sample_member(&mut rng, spec.bound);
                    let (minus, tilde) = self.negations(&x);
                    elements.extend([x, minus, tilde]);
                }
                Ok(Window::sampled(elements, spec))
            }
        }
    }

    fn downset_in_window(&self, a: &LexElement, spec: &WindowSpec) -> bool {
        // [0, a] for a level-0 `a` is the box below it, inside the level-0 grid.
        a.level == 0 && self.lex.group().flags().enumerable_intervals && {
            let g = self.lex.group();
            g.generator_power(spec.bound).is_some_and(|top| a.values.iter().all(|v| g.leq(v, &top)))
        }
    }

    fn describe(&self) -> String {
        format!("Gamma({}, u_{})", self.lex.describe(), self.n)
    }
}

/// Slice properties of an n-perfect algebra on a window, from the partition
/// into `E_0 .. E_n` up to the state `k / n`.
pub fn check_slices(a: &NPerfectAlgebra, spec: &WindowSpec) -> Result<CheckReport> {
    let w = a.window(spec)?;
    let mut report = CheckReport::new("slices");
    let n = i64::from(a.n());
    let xs = &w.elements;
    let bound = w.note.clone();

    let mut sizes = vec![0usize; a.n() as usize + 1];
    let mut stray = None;
    for x in xs {
        if a.is_member(x) && (0..=n).contains(&x.level) {
            sizes[x.level as usize] += 1;
        } else {
            stray.get_or_insert_with(|| x.to_string());
        }
    }
    if stray.is_none() && w.exhaustive {
        if let Some(k) = sizes.iter().position(|&c| c == 0) {
            stray = Some(format!("slice E_{k} is empty"));
        }
    }
    report.push(Check::from_witness("(i) slices partition the algebra", stray).with_detail(bound.clone()));

    let mut below = None;
    let mut defined_low = None;
    let mut overflow = None;
    let mut landed = None;
    let mut at_top = 0u64;
    pea::for_each_pair(&w, spec, |x, y| {
        if x.level < y.level && !a.lex().leq(x, y) && below.is_none() {
            below = Some(format!("{x} is not below {y}"));
        }
        let k = x.level + y.level;
        let sum = a.add(x, y);
        match (k.cmp(&n), &sum) {
            (std::cmp::Ordering::Less, None) if defined_low.is_none() => {
                defined_low = Some(format!("{x} + {y} undefined with {k} < {n}"));
            }
            (std::cmp::Ordering::Greater, Some(s)) if overflow.is_none() => {
                overflow = Some(format!("{x} + {y} = {s} with {k} > {n}"));
            }
            (std::cmp::Ordering::Equal, Some(_)) => at_top += 1,
            _ => {}
        }
        if let Some(s) = &sum {
            if s.level != k && landed.is_none() {
                landed = Some(format!("{x} + {y} = {s} not in E_{k}"));
            }
        }
    });
    report.push(Check::from_witness("(ii) E_k below E_j for k < j", below).with_detail(bound.clone()));
    report.push(Check::from_witness("(iii) E_k + E_j defined for k + j < n", defined_low).with_detail(bound.clone()));
    report.push(
        Check::from_witness("(iii) E_k + E_j lands in E_(k+j)", landed)
            .with_detail(format!("{bound}; {at_top} defined sums with k + j = n")),
    );
    report.push(Check::from_witness("(iv) E_k + E_j undefined for k + j > n", overflow).with_detail(bound.clone()));

    let one = a.unit();
    let mut neg = None;
    for x in xs {
        let (minus, tilde) = a.negations(x);
        let ok = a.add(&minus, x).as_ref() == Some(&one)
            && a.add(x, &tilde).as_ref() == Some(&one)
            && minus.level == n - x.level
            && tilde.level == n - x.level;
        if !ok {
            neg = Some(format!("{x}: minus {minus}, tilde {tilde}"));
            break;
        }
    }
    report.push(Check::from_witness("(v) E_k negations lie in E_(n-k)", neg).with_detail(bound.clone()));

    let ideal = pea::check_normal_ideal(a, &w, spec, |x: &LexElement| x.level == 0);
    report.push(summarize("(vi) E_0 is a normal ideal", &ideal));
    let state = pea::check_state(a, &w, spec, |x: &LexElement| a.canonical_state(x));
    report.push(summarize("(vii) k/n is a state", &state));
    let mut exact = None;
    for x in xs {
        let want = BigRational::new(BigInt::from(x.level), BigInt::from(n));
        if a.canonical_state(x) != want || (x.level == 0) != a.canonical_state(x).is_zero() {
            exact = Some(format!("s({x}) = {}", a.canonical_state(x)));
            break;
        }
    }
    if a.canonical_state(&one) != BigRational::one() {
        exact = Some("s(u_n) != 1".into());
    }
    report.push(Check::from_witness("(vii) s(E_i) = i/n exactly", exact));
    Ok(report)
}

/// Collapses a sub-report into one check: its first failure, or pass.
pub(crate) fn summarize(name: &str, r: &CheckReport) -> Check {
    if let Some(f) = r.checks.iter().find(|c| c.is_fail()) {
        return Check::fail(name, format!("{}: {}", f.name, f.counterexample.clone().unwrap_or_default()));
    }
    if let Some(u) = r.checks.iter().find(|c| c.status != crate::Status::Pass) {
        let mut c = u.clone();
        c.name = name.to_string();
        return c;
    }
    Check::pass(name)
}
