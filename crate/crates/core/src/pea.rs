//! Pseudo effect algebras as finite or sampled windows, and the checkers
//! that run over them.
//!
//! A universe supplies the partial addition with its order and negations. A
//! [`Window`] is the finite part a checker sees: every element up to the
//! bound for enumerable groups, or a seeded sample otherwise. Reports say
//! which one they ran on.

use std::fmt;
use std::hash::Hash;

use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::error::Result;
use crate::rdp::RefinementAmbient;
use crate::report::{Check, CheckReport};
use crate::Tri;

pub const DEFAULT_CAP: u64 = 1_000_000;
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    pub bound: u32,
    pub samples: usize,
    pub seed: u64,
    /// Largest window a checker will build.
    pub cap: u64,
}

impl WindowSpec {
    pub fn bounded(bound: u32) -> WindowSpec {
        WindowSpec { bound, ..WindowSpec::default() }
    }
}

impl Default for WindowSpec {
    fn default() -> WindowSpec {
        WindowSpec { bound: 2, samples: DEFAULT_SAMPLES, seed: 0, cap: DEFAULT_CAP }
    }
}

#[derive(Clone, Debug)]
pub struct Window<E> {
    pub elements: Vec<E>,
    /// Every element up to the bound, as opposed to a random sample.
    pub exhaustive: bool,
    pub note: String,
}

impl<E: Clone + Eq + Hash> Window<E> {
    pub fn exhaustive(elements: Vec<E>, note: String) -> Window<E> {
        Window { elements, exhaustive: true, note }
    }

    /// Deduplicates, keeping first occurrences.
    pub fn sampled(elements: Vec<E>, spec: &WindowSpec) -> Window<E> {
        let mut seen = FxHashMap::default();
        let elements: Vec<E> =
            elements.into_iter().filter(|e| seen.insert(e.clone(), ()).is_none()).collect();
        Window {
            elements,
            exhaustive: false,
            note: format!("{} seeded samples, seed {}", spec.samples, spec.seed),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

pub trait PeaUniverse {
    type Elem: Clone + Eq + Hash + fmt::Display + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;
    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    /// `(a⁻, a∼)` with `a⁻ + a = 1 = a + a∼`.
    fn negations(&self, a: &Self::Elem) -> (Self::Elem, Self::Elem);
    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;
    fn window(&self, spec: &WindowSpec) -> Result<Window<Self::Elem>>;
    /// Whether all of `[0, a]` is inside the window for `spec`.
    fn downset_in_window(&self, _a: &Self::Elem, _spec: &WindowSpec) -> bool {
        false
    }
    fn describe(&self) -> String;
}

/// `(b \ a, a / b)` with `(b \ a) + a = b = a + (a / b)`, via
/// `b \ a = (a + b∼)⁻` and `a / b = (b⁻ + a)∼`. `None` unless `a <= b`.
pub fn diffs<U: PeaUniverse>(u: &U, a: &U::Elem, b: &U::Elem) -> Option<(U::Elem, U::Elem)> {
    Some((left_diff(u, a, b)?, right_diff(u, a, b)?))
}

/// `b \ a`: the `d` with `d + a = b`.
pub fn left_diff<U: PeaUniverse>(u: &U, a: &U::Elem, b: &U::Elem) -> Option<U::Elem> {
    let (_, b_tilde) = u.negations(b);
    let (d, _) = u.negations(&u.add(a, &b_tilde)?);
    (u.add(&d, a).as_ref() == Some(b)).then_some(d)
}

/// `a / b`: the `d` with `a + d = b`.
pub fn right_diff<U: PeaUniverse>(u: &U, a: &U::Elem, b: &U::Elem) -> Option<U::Elem> {
    let (b_minus, _) = u.negations(b);
    let (_, d) = u.negations(&u.add(&b_minus, a)?);
    (u.add(a, &d).as_ref() == Some(b)).then_some(d)
}

/// `a ⊕ b = (b⁻ \ (a ∧ b⁻))∼` and `a ⊙ b = (b⁻ ⊕ a⁻)∼`. `None` without
/// meets, or if a difference fails to exist.
pub fn mv_ops<U: PeaUniverse>(u: &U, a: &U::Elem, b: &U::Elem) -> Option<(U::Elem, U::Elem)> {
    let sum = oplus(u, a, b)?;
    let (a_minus, _) = u.negations(a);
    let (b_minus, _) = u.negations(b);
    let (_, prod) = u.negations(&oplus(u, &b_minus, &a_minus)?);
    Some((sum, prod))
}

pub fn oplus<U: PeaUniverse>(u: &U, a: &U::Elem, b: &U::Elem) -> Option<U::Elem> {
    let (b_minus, _) = u.negations(b);
    let m = u.meet(a, &b_minus)?;
    let d = left_diff(u, &m, &b_minus)?;
    Some(u.negations(&d).1)
}

pub fn odot<U: PeaUniverse>(u: &U, a: &U::Elem, b: &U::Elem) -> Option<U::Elem> {
    let (a_minus, _) = u.negations(a);
    let (b_minus, _) = u.negations(b);
    Some(u.negations(&oplus(u, &b_minus, &a_minus)?).1)
}

fn sampler(spec: &WindowSpec, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(spec.seed ^ salt)
}

/// All ordered pairs of an exhaustive window, `4 S` seeded pairs otherwise.
pub fn for_each_pair<E>(w: &Window<E>, spec: &WindowSpec, mut f: impl FnMut(&E, &E)) {
    let xs = &w.elements;
    if xs.is_empty() {
        return;
    }
    if w.exhaustive {
        for x in xs {
            for y in xs {
                f(x, y);
            }
        }
    } else {
        let mut rng = sampler(spec, 0x7061_6972);
        for _ in 0..spec.samples * 4 {
            f(&xs[rng.gen_range(0..xs.len())], &xs[rng.gen_range(0..xs.len())]);
        }
    }
}

/// Above this many triples an exhaustive window is sampled instead.
const TRIPLE_LIMIT: usize = 4_000_000;

/// All triples when the window is exhaustive and small enough, otherwise
/// `S` seeded triples. Returns whether the run was exhaustive.
pub fn for_each_triple<E>(w: &Window<E>, spec: &WindowSpec, mut f: impl FnMut(&E, &E, &E)) -> bool {
    let xs = &w.elements;
    if xs.is_empty() {
        return true;
    }
    let n = xs.len();
    if w.exhaustive && n.saturating_mul(n).saturating_mul(n) <= TRIPLE_LIMIT {
        for x in xs {
            for y in xs {
                for z in xs {
                    f(x, y, z);
                }
            }
        }
        true
    } else {
        let mut rng = sampler(spec, 0x7472_6970);
        for _ in 0..spec.samples {
            f(&xs[rng.gen_range(0..n)], &xs[rng.gen_range(0..n)], &xs[rng.gen_range(0..n)]);
        }
        false
    }
}

const UNDEF: u32 = u32::MAX;

/// Maps elements to dense ids.
struct Interner<E> {
    map: FxHashMap<E, u32>,
    elems: Vec<E>,
}

impl<E: Clone + Eq + Hash> Interner<E> {
    fn new() -> Self {
        Interner { map: FxHashMap::default(), elems: Vec::new() }
    }

    fn id(&mut self, e: E) -> u32 {
        if let Some(&i) = self.map.get(&e) {
            return i;
        }
        let i = self.elems.len() as u32;
        self.elems.push(e.clone());
        self.map.insert(e, i);
        i
    }
}

/// Addition of window elements with every result interned, plus the sums
/// one step further out needed to compare `(a + b) + c` with `a + (b + c)`.
struct AddTable {
    n: usize,
    /// `a + b` for window `a`, `b`.
    pair: Vec<u32>,
    /// Row of each id occurring in `pair`.
    row_of: Vec<u32>,
    rows: usize,
    /// `s + c` for `s` a pair sum, `c` in the window.
    right: Vec<u32>,
    /// `a + s` for `a` in the window, `s` a pair sum.
    left: Vec<u32>,
}

impl AddTable {
    fn build<U: PeaUniverse>(u: &U, xs: &[U::Elem]) -> Self {
        let n = xs.len();
        let mut ids = Interner::new();
        for x in xs {
            ids.id(x.clone());
        }
        let mut pair = vec![UNDEF; n * n];
        for (a, x) in xs.iter().enumerate() {
            for (b, y) in xs.iter().enumerate() {
                if let Some(s) = u.add(x, y) {
                    pair[a * n + b] = ids.id(s);
                }
            }
        }
        let mut row_of = vec![UNDEF; ids.elems.len()];
        let mut sources = Vec::new();
        for &s in &pair {
            if s != UNDEF && row_of[s as usize] == UNDEF {
                row_of[s as usize] = sources.len() as u32;
                sources.push(s);
            }
        }
        let rows = sources.len();
        let mut right = vec![UNDEF; rows * n];
        let mut left = vec![UNDEF; n * rows];
        for (p, &s) in sources.iter().enumerate() {
            let se = ids.elems[s as usize].clone();
            for (c, z) in xs.iter().enumerate() {
                if let Some(r) = u.add(&se, z) {
                    right[p * n + c] = ids.id(r);
                }
                if let Some(l) = u.add(z, &se) {
                    left[c * rows + p] = ids.id(l);
                }
            }
        }
        AddTable { n, pair, row_of, rows, right, left }
    }

    fn sum(&self, a: usize, b: usize) -> u32 {
        self.pair[a * self.n + b]
    }

    /// First `(a, b, c)` where the two bracketings disagree on definedness
    /// or value.
    fn associativity_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for a in 0..n {
            let left_row = &self.left[a * self.rows..(a + 1) * self.rows];
            for b in 0..n {
                let ab = self.sum(a, b);
                let b_row = &self.pair[b * n..(b + 1) * n];
                let right_row = (ab != UNDEF).then(|| {
                    let p = self.row_of[ab as usize] as usize;
                    &self.right[p * n..(p + 1) * n]
                });
                for c in 0..n {
                    let l = right_row.map_or(UNDEF, |r| r[c]);
                    let bc = b_row[c];
                    let r = if bc == UNDEF { UNDEF } else { left_row[self.row_of[bc as usize] as usize] };
                    if l != r {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }
}

fn show<E: fmt::Display>(x: Option<&E>) -> String {
    x.map_or_else(|| "undefined".to_string(), |e| e.to_string())
}

/// Axioms (i) to (iv) of a pseudo effect algebra, the negation identities,
/// and the agreement of the order with addition, on the window.
pub fn check_pea_axioms<U: PeaUniverse>(u: &U, w: &Window<U::Elem>, spec: &WindowSpec) -> CheckReport {
    let mut report = CheckReport::new("pea_axioms");
    let xs = &w.elements;
    let scope = if w.exhaustive { format!("exhaustive within {}", w.note) } else { w.note.clone() };
    let zero = u.zero();
    let one = u.one();

    // (i) associativity
    let assoc = if w.exhaustive {
        let table = AddTable::build(u, xs);
        let witness = table.associativity_witness().map(|(a, b, c)| {
            let (x, y, z) = (&xs[a], &xs[b], &xs[c]);
            let l = u.add(x, y).and_then(|s| u.add(&s, z));
            let r = u.add(y, z).and_then(|s| u.add(x, &s));
            format!("a={x} b={y} c={z}: (a+b)+c = {}, a+(b+c) = {}", show(l.as_ref()), show(r.as_ref()))
        });
        let n = xs.len() as u128;
        Check::from_witness("(i) associativity", witness).with_detail(format!("{} triples, {scope}", n * n * n))
    } else {
        let mut witness = None;
        for_each_triple(w, spec, |x, y, z| {
            if witness.is_some() {
                return;
            }
            let l = u.add(x, y).and_then(|s| u.add(&s, z));
            let r = u.add(y, z).and_then(|s| u.add(x, &s));
            if l != r {
                witness = Some(format!(
                    "a={x} b={y} c={z}: (a+b)+c = {}, a+(b+c) = {}",
                    show(l.as_ref()),
                    show(r.as_ref())
                ));
            }
        });
        Check::from_witness("(i) associativity", witness).with_detail(format!("{} triples, {scope}", spec.samples))
    };
    report.push(assoc);

    // (ii) negations exist and are unique within the window; negating twice returns the element.
    let mut neg_witness = None;
    let mut unique_witness = None;
    for x in xs {
        let (minus, tilde) = u.negations(x);
        if u.add(&minus, x).as_ref() != Some(&one) || u.add(x, &tilde).as_ref() != Some(&one) {
            neg_witness.get_or_insert_with(|| format!("{x}: minus {minus}, tilde {tilde} fail the unit equations"));
        }
        if u.negations(&minus).1 != *x || u.negations(&tilde).0 != *x {
            neg_witness.get_or_insert_with(|| format!("{x}: double negation does not return it"));
        }
        if unique_witness.is_none() {
            let rivals: Vec<&U::Elem> = xs
                .iter()
                .filter(|d| {
                    (**d != tilde && u.add(x, d).as_ref() == Some(&one))
                        || (**d != minus && u.add(d, x).as_ref() == Some(&one))
                })
                .take(1)
                .collect();
            if let Some(d) = rivals.first() {
                unique_witness = Some(format!("{x}: second complement {d}"));
            }
        }
    }
    report.push(Check::from_witness("(ii) unit equations and double negation", neg_witness).with_detail(scope.clone()));
    report.push(Check::from_witness("(ii) complements unique", unique_witness).with_detail(format!("within {}", w.note)));

    // (iii) a + b = d + a = b + e
    let mut conj_witness = None;
    for_each_pair(w, spec, |a, b| {
        if conj_witness.is_some() {
            return;
        }
        let Some(s) = u.add(a, b) else { return };
        // The formulas first; a window search only if they fail.
        let d = left_diff(u, a, &s).or_else(|| xs.iter().find(|d| u.add(d, a).as_ref() == Some(&s)).cloned());
        let e = right_diff(u, b, &s).or_else(|| xs.iter().find(|e| u.add(b, e).as_ref() == Some(&s)).cloned());
        if d.is_none() || e.is_none() {
            conj_witness = Some(format!("a={a} b={b}: a+b = {s} but no d with d+a or e with b+e"));
        }
    });
    report.push(Check::from_witness("(iii) conjugates exist", conj_witness).with_detail(scope.clone()));

    // (iv)
    let mut top_witness = None;
    for x in xs {
        if (u.add(&one, x).is_some() || u.add(x, &one).is_some()) && *x != zero {
            top_witness = Some(format!("1 + {x} or {x} + 1 is defined"));
            break;
        }
    }
    report.push(Check::from_witness("(iv) 1 + a defined only for a = 0", top_witness).with_detail(scope.clone()));

    // order: a partial order with 0 at the bottom and 1 at the top
    let n = xs.len();
    if w.exhaustive {
        let words = n.div_ceil(64);
        let mut up = vec![0u64; n * words];
        for (i, x) in xs.iter().enumerate() {
            for (j, y) in xs.iter().enumerate() {
                if u.leq(x, y) {
                    up[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        let bit = |i: usize, j: usize| up[i * words + j / 64] >> (j % 64) & 1 == 1;
        let mut order_witness = None;
        'outer: for i in 0..n {
            if !bit(i, i) {
                order_witness = Some(format!("{} is not below itself", xs[i]));
                break;
            }
            for j in 0..n {
                if i != j && bit(i, j) && bit(j, i) {
                    order_witness = Some(format!("{} and {} are below each other", xs[i], xs[j]));
                    break 'outer;
                }
                if bit(i, j) {
                    // up(j) must be inside up(i)
                    let covered = (0..words).all(|k| up[j * words + k] & !up[i * words + k] == 0);
                    if !covered {
                        order_witness = Some(format!("transitivity fails through {} <= {}", xs[i], xs[j]));
                        break 'outer;
                    }
                }
            }
        }
        report.push(Check::from_witness("order is a partial order", order_witness).with_detail(scope.clone()));
    }
    let mut bounds_witness = None;
    for x in xs {
        if !u.leq(&zero, x) || !u.leq(x, &one) {
            bounds_witness = Some(format!("{x} is not between 0 and 1"));
            break;
        }
    }
    report.push(Check::from_witness("0 <= a <= 1", bounds_witness).with_detail(scope.clone()));

    // a <= b iff a + c = b for some c
    let mut agree_witness = None;
    for_each_pair(w, spec, |a, b| {
        if agree_witness.is_some() {
            return;
        }
        if u.leq(a, b) {
            if right_diff(u, a, b).is_none() && !xs.iter().any(|c| u.add(a, c).as_ref() == Some(b)) {
                agree_witness = Some(format!("{a} <= {b} but no c with {a} + c = {b}"));
            }
        } else if w.exhaustive {
            // covered below by scanning what each a + c reaches
        } else if let Some(c) = xs.iter().find(|c| u.add(a, c).as_ref() == Some(b)) {
            agree_witness = Some(format!("{a} + {c} = {b} but {a} is not below {b}"));
        }
    });
    if w.exhaustive && agree_witness.is_none() {
        'scan: for a in xs {
            for c in xs {
                if let Some(s) = u.add(a, c) {
                    if !u.leq(a, &s) {
                        agree_witness = Some(format!("{a} + {c} = {s} but {a} is not below it"));
                        break 'scan;
                    }
                }
            }
        }
    }
    report.push(Check::from_witness("a <= b iff a + c = b for some c", agree_witness).with_detail(scope));
    report
}

/// `s(1) = 1`, `0 <= s <= 1`, and `s(a + b) = s(a) + s(b)` on the window.
pub fn check_state<U, S>(u: &U, w: &Window<U::Elem>, spec: &WindowSpec, s: S) -> CheckReport
where
    U: PeaUniverse,
    S: Fn(&U::Elem) -> BigRational,
{
    let mut report = CheckReport::new("state");
    let one = u.one();
    let s1 = s(&one);
    report.push(if s1.is_one() { Check::pass("s(1) = 1") } else { Check::fail("s(1) = 1", format!("s(1) = {s1}")) });
    let mut range = None;
    for x in &w.elements {
        let v = s(x);
        if v.is_negative() || v > BigRational::one() {
            range = Some(format!("s({x}) = {v}"));
            break;
        }
    }
    report.push(Check::from_witness("s maps into [0, 1]", range).with_detail(w.note.clone()));
    let mut additive = None;
    let mut sums = 0u64;
    for_each_pair(w, spec, |a, b| {
        if additive.is_some() {
            return;
        }
        if let Some(c) = u.add(a, b) {
            sums += 1;
            let (sa, sb, sc) = (s(a), s(b), s(&c));
            if sc != &sa + &sb {
                additive = Some(format!("s({a} + {b}) = s({c}) = {sc} but s({a}) + s({b}) = {}", sa + sb));
            }
        }
    });
    report.push(
        Check::from_witness("s(a + b) = s(a) + s(b)", additive)
            .with_detail(format!("{sums} defined sums, {}", w.note)),
    );
    report
}

/// Ideal closure and normality `x + I = I + x` for the subset picked by
/// `member`. Normality is checked exactly: whenever `x + i` is defined,
/// the `j` with `j + x = x + i` must lie in the subset, and dually.
pub fn check_normal_ideal<U, P>(u: &U, w: &Window<U::Elem>, spec: &WindowSpec, member: P) -> CheckReport
where
    U: PeaUniverse,
    P: Fn(&U::Elem) -> bool,
{
    let mut report = CheckReport::new("normal_ideal");
    let zero = u.zero();
    report.push(if member(&zero) {
        Check::pass("contains 0")
    } else {
        Check::fail("contains 0", "0 is not in the subset")
    });
    let mut down = None;
    let mut closed = None;
    let mut normal = None;
    for_each_pair(w, spec, |x, y| {
        if down.is_none() && member(y) && u.leq(x, y) && !member(x) {
            down = Some(format!("{x} <= {y} but {x} is outside"));
        }
        if closed.is_none() && member(x) && member(y) {
            if let Some(s) = u.add(x, y) {
                if !member(&s) {
                    closed = Some(format!("{x} + {y} = {s} leaves the subset"));
                }
            }
        }
        if normal.is_none() && member(y) {
            // x + i = j + x
            if let Some(s) = u.add(x, y) {
                match left_diff(u, x, &s) {
                    Some(j) if member(&j) => {}
                    Some(j) => normal = Some(format!("{x} + {y} = {j} + {x} with {j} outside")),
                    None => normal = Some(format!("{x} + {y} = {s} has no left conjugate")),
                }
            }
            // i + x = x + j
            if normal.is_none() {
                if let Some(s) = u.add(y, x) {
                    match right_diff(u, x, &s) {
                        Some(j) if member(&j) => {}
                        Some(j) => normal = Some(format!("{y} + {x} = {x} + {j} with {j} outside")),
                        None => normal = Some(format!("{y} + {x} = {s} has no right conjugate")),
                    }
                }
            }
        }
    });
    report.push(Check::from_witness("downward closed", down).with_detail(w.note.clone()));
    report.push(Check::from_witness("closed under defined sums", closed).with_detail(w.note.clone()));
    report.push(Check::from_witness("x + I = I + x", normal).with_detail(w.note.clone()));
    report
}

/// Axioms A1 to A8 for `⊕` from the meet formula and for `⊙` defined
/// through `⊕` and the two negations.
pub fn check_mv_axioms<U: PeaUniverse>(u: &U, w: &Window<U::Elem>, spec: &WindowSpec) -> CheckReport {
    let mut report = CheckReport::new("mv");
    let names = ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8"];
    let zero = u.zero();
    let one = u.one();
    if u.meet(&zero, &one).is_none() {
        for n in names {
            report.push(Check::skipped(n, format!("{} is not lattice ordered", u.describe())));
        }
        return report;
    }
    let mut witness: [Option<String>; 8] = Default::default();
    let plus = |a: &U::Elem, b: &U::Elem| oplus(u, a, b);
    let times = |a: &U::Elem, b: &U::Elem| odot(u, a, b);
    let minus = |a: &U::Elem| u.negations(a).0;
    let tilde = |a: &U::Elem| u.negations(a).1;
    let mut note = |slot: usize, msg: String| {
        witness[slot].get_or_insert(msg);
    };

    let (m1, t1) = u.negations(&one);
    if m1 != zero || t1 != zero {
        note(3, format!("1⁻ = {m1}, 1∼ = {t1}"));
    }
    for x in &w.elements {
        if plus(x, &zero).as_ref() != Some(x) || plus(&zero, x).as_ref() != Some(x) {
            note(1, format!("x = {x}: x ⊕ 0 = {}, 0 ⊕ x = {}", show(plus(x, &zero).as_ref()), show(plus(&zero, x).as_ref())));
        }
        if plus(x, &one).as_ref() != Some(&one) || plus(&one, x).as_ref() != Some(&one) {
            note(2, format!("x = {x}: x ⊕ 1 = {}", show(plus(x, &one).as_ref())));
        }
        if tilde(&minus(x)) != *x {
            note(7, format!("x = {x}: (x⁻)∼ = {}", tilde(&minus(x))));
        }
    }
    let mut pairs = 0u64;
    for_each_pair(w, spec, |x, y| {
        pairs += 1;
        // A5
        let l = plus(&minus(x), &minus(y)).map(|s| tilde(&s));
        let r = plus(&tilde(x), &tilde(y)).map(|s| minus(&s));
        if l.is_none() || l != r {
            note(4, format!("x = {x}, y = {y}: {} vs {}", show(l.as_ref()), show(r.as_ref())));
        }
        // A6, with ⊙ binding tighter than ⊕
        let terms = [
            times(&tilde(x), y).and_then(|p| plus(x, &p)),
            times(&tilde(y), x).and_then(|p| plus(y, &p)),
            times(x, &minus(y)).and_then(|p| plus(&p, y)),
            times(y, &minus(x)).and_then(|p| plus(&p, x)),
        ];
        if terms[0].is_none() || terms.iter().any(|t| *t != terms[0]) {
            let shown: Vec<String> = terms.iter().map(|t| show(t.as_ref())).collect();
            note(5, format!("x = {x}, y = {y}: {}", shown.join(" / ")));
        }
        // A7
        let l = plus(&minus(x), y).and_then(|s| times(x, &s));
        let r = plus(x, &tilde(y)).and_then(|s| times(&s, y));
        if l.is_none() || l != r {
            note(6, format!("x = {x}, y = {y}: {} vs {}", show(l.as_ref()), show(r.as_ref())));
        }
    });
    let exhaustive = for_each_triple(w, spec, |x, y, z| {
        let l = plus(y, z).and_then(|s| plus(x, &s));
        let r = plus(x, y).and_then(|s| plus(&s, z));
        if l.is_none() || l != r {
            note(0, format!("x = {x}, y = {y}, z = {z}: {} vs {}", show(l.as_ref()), show(r.as_ref())));
        }
    });
    let scope = if exhaustive && w.exhaustive { format!("exhaustive within {}", w.note) } else { w.note.clone() };
    for (i, name) in names.iter().enumerate() {
        report.push(Check::from_witness(*name, witness[i].take()).with_detail(scope.clone()));
    }
    report
}

/// `a⁻ = a∼` for every window element.
pub fn check_symmetric<U: PeaUniverse>(u: &U, w: &Window<U::Elem>) -> CheckReport {
    let mut report = CheckReport::new("symmetric");
    let witness = w.elements.iter().find_map(|x| {
        let (m, t) = u.negations(x);
        (m != t).then(|| format!("{x}: minus {m}, tilde {t}"))
    });
    report.push(Check::from_witness("a⁻ = a∼", witness).with_detail(w.note.clone()));
    report
}

/// First `x, y` in the window with both sums defined and different.
pub fn find_noncommuting<U: PeaUniverse>(u: &U, w: &Window<U::Elem>) -> Option<(U::Elem, U::Elem, U::Elem, U::Elem)> {
    for x in &w.elements {
        for y in &w.elements {
            if let (Some(s), Some(t)) = (u.add(x, y), u.add(y, x)) {
                if s != t {
                    return Some((x.clone(), y.clone(), s, t));
                }
            }
        }
    }
    None
}

/// A window viewed as a refinement ambient: the operation is the partial
/// addition, residuals are right differences, intervals are read off the
/// window.
pub struct PeaAmbient<'a, U: PeaUniverse> {
    pub universe: &'a U,
    pub window: &'a Window<U::Elem>,
    pub spec: WindowSpec,
}

impl<U: PeaUniverse> RefinementAmbient for PeaAmbient<'_, U> {
    type Elem = U::Elem;

    fn zero(&self) -> U::Elem {
        self.universe.zero()
    }

    fn compose(&self, a: &U::Elem, b: &U::Elem) -> Option<U::Elem> {
        self.universe.add(a, b)
    }

    fn is_positive(&self, _a: &U::Elem) -> bool {
        true
    }

    fn leq(&self, a: &U::Elem, b: &U::Elem) -> bool {
        self.universe.leq(a, b)
    }

    fn residual(&self, c: &U::Elem, a: &U::Elem) -> Option<U::Elem> {
        if !self.universe.leq(c, a) {
            return None;
        }
        right_diff(self.universe, c, a)
    }

    /// A witness inside the window settles `No`. Without one the answer is
    /// `Yes` only if both down-sets lie wholly inside the window.
    fn com(&self, a: &U::Elem, b: &U::Elem) -> Tri {
        let u = self.universe;
        let zero = u.zero();
        if *a == zero || *b == zero {
            return Tri::Yes;
        }
        let below = |t: &U::Elem| -> Vec<&U::Elem> { self.window.elements.iter().filter(|x| u.leq(x, t)).collect() };
        let (xs, ys) = (below(a), below(b));
        for x in &xs {
            for y in &ys {
                if u.add(x, y) != u.add(y, x) {
                    return Tri::No;
                }
            }
        }
        if u.downset_in_window(a, &self.spec) && u.downset_in_window(b, &self.spec) {
            Tri::Yes
        } else {
            Tri::Unknown
        }
    }

    fn meet(&self, a: &U::Elem, b: &U::Elem) -> Option<U::Elem> {
        self.universe.meet(a, b)
    }

    fn interval(&self, lo: &U::Elem, hi: &U::Elem) -> Option<Vec<U::Elem>> {
        let u = self.universe;
        Some(self.window.elements.iter().filter(|x| u.leq(lo, x) && u.leq(x, hi)).cloned().collect())
    }

    fn describe(&self) -> String {
        format!("{} ({})", self.universe.describe(), self.window.note)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kite::{KiteAlgebra, KiteElement};
    use crate::lexext::{LexGroup, NPerfectAlgebra};
    use crate::pogroup::{GroupElement, PoGroup};
    use crate::rdp::{self, RdpClass};
    use crate::structure::Permutation;

    fn kite(lambda: Vec<usize>, rho: Vec<usize>) -> KiteAlgebra {
        KiteAlgebra::new(PoGroup::integers(), Permutation::new(lambda).unwrap(), Permutation::new(rho).unwrap())
            .unwrap()
    }

    fn l(v: &[i64]) -> KiteElement {
        KiteElement::lower(v.iter().map(|x| GroupElement::Int(*x)))
    }

    fn u(v: &[i64]) -> KiteElement {
        KiteElement::upper(v.iter().map(|x| GroupElement::Int(*x)))
    }

    /// Delegates to a kite but returns a wrong value for one sum.
    struct Corrupted {
        inner: KiteAlgebra,
        at: (KiteElement, KiteElement),
        value: KiteElement,
    }

    impl PeaUniverse for Corrupted {
        type Elem = KiteElement;
        fn zero(&self) -> KiteElement {
            self.inner.zero()
        }
        fn one(&self) -> KiteElement {
            self.inner.one()
        }
        fn add(&self, a: &KiteElement, b: &KiteElement) -> Option<KiteElement> {
            if (a, b) == (&self.at.0, &self.at.1) {
                return Some(self.value.clone());
            }
            self.inner.add(a, b)
        }
        fn leq(&self, a: &KiteElement, b: &KiteElement) -> bool {
            self.inner.leq(a, b)
        }
        fn negations(&self, a: &KiteElement) -> (KiteElement, KiteElement) {
            self.inner.negations(a)
        }
        fn meet(&self, a: &KiteElement, b: &KiteElement) -> Option<KiteElement> {
            PeaUniverse::meet(&self.inner, a, b)
        }
        fn join(&self, a: &KiteElement, b: &KiteElement) -> Option<KiteElement> {
            PeaUniverse::join(&self.inner, a, b)
        }
        fn window(&self, spec: &WindowSpec) -> Result<Window<KiteElement>> {
            self.inner.window(spec)
        }
        fn describe(&self) -> String {
            "corrupted".into()
        }
    }

    #[test]
    fn kite_axioms_hold() {
        let spec = WindowSpec::bounded(2);
        let k = kite(vec![0, 1], vec![1, 0]);
        let w = k.window(&spec).unwrap();
        let r = check_pea_axioms(&k, &w, &spec);
        assert!(r.all_pass(), "{r}");
        let t = KiteAlgebra::new(PoGroup::trivial(), Permutation::identity(2), Permutation::identity(2)).unwrap();
        let w = t.window(&spec).unwrap();
        assert_eq!(w.len(), 2);
        assert!(check_pea_axioms(&t, &w, &spec).all_pass());
    }

    #[test]
    fn corrupted_table_fails_associativity() {
        let spec = WindowSpec::bounded(2);
        let c = Corrupted { inner: kite(vec![0], vec![0]), at: (l(&[1]), l(&[1])), value: l(&[3]) };
        let w = c.window(&spec).unwrap();
        let r = check_pea_axioms(&c, &w, &spec);
        let assoc = r.find("(i) associativity").unwrap();
        assert!(assoc.is_fail(), "{r}");
        assert!(assoc.counterexample.is_some());
    }

    #[test]
    fn diffs_examples() {
        let k = kite(vec![0], vec![0]);
        let b = u(&[-1]);
        assert_eq!(diffs(&k, &k.zero(), &b), Some((b.clone(), b.clone())));
        assert_eq!(diffs(&k, &b, &b), Some((k.zero(), k.zero())));
        let a = l(&[1]);
        let (d, e) = diffs(&k, &a, &b).unwrap();
        // Oracle: search the window for the re-add solutions.
        let w = k.window(&WindowSpec::bounded(3)).unwrap();
        let ds: Vec<_> = w.elements.iter().filter(|c| k.add(c, &a).as_ref() == Some(&b)).collect();
        let es: Vec<_> = w.elements.iter().filter(|c| k.add(&a, c).as_ref() == Some(&b)).collect();
        assert_eq!(ds, vec![&d]);
        assert_eq!(es, vec![&e]);
        assert_eq!(diffs(&k, &b, &a), None);
    }

    #[test]
    fn negations_of_bounds() {
        let k = kite(vec![1, 0], vec![0, 1]);
        assert_eq!(k.negations(&k.zero()), (k.one(), k.one()));
        assert_eq!(k.negations(&k.one()), (k.zero(), k.zero()));
    }

    #[test]
    fn oplus_matches_addition_on_lower_sums() {
        let k = kite(vec![0, 1], vec![1, 0]);
        let (a, b) = (l(&[1, 0]), l(&[0, 2]));
        assert_eq!(oplus(&k, &a, &b), k.add(&a, &b));
        let x = u(&[-2, -1]);
        assert_eq!(oplus(&k, &x, &k.zero()), Some(x.clone()));
        assert_eq!(oplus(&k, &x, &k.one()), Some(k.one()));
    }

    #[test]
    fn mv_axioms_on_kite_and_boolean() {
        let spec = WindowSpec::bounded(2);
        let k = kite(vec![0, 1], vec![1, 0]);
        let w = k.window(&spec).unwrap();
        let r = check_mv_axioms(&k, &w, &spec);
        assert!(r.all_pass(), "{r}");
        let t = KiteAlgebra::new(PoGroup::trivial(), Permutation::identity(1), Permutation::identity(1)).unwrap();
        let w = t.window(&spec).unwrap();
        assert!(check_mv_axioms(&t, &w, &spec).all_pass());
    }

    #[test]
    fn states() {
        let spec = WindowSpec::bounded(2);
        let a = NPerfectAlgebra::new(LexGroup::new(PoGroup::integers(), Permutation::new(vec![1, 0]).unwrap()), 2)
            .unwrap();
        let w = a.window(&spec).unwrap();
        assert!(check_state(&a, &w, &spec, |x| a.canonical_state(x)).all_pass());
        let r = check_state(&a, &w, &spec, |_| BigRational::one());
        assert!(r.find("s(a + b) = s(a) + s(b)").unwrap().is_fail());
    }

    #[test]
    fn ideals() {
        let spec = WindowSpec::bounded(2);
        let k = kite(vec![0, 1], vec![1, 0]);
        let w = k.window(&spec).unwrap();
        let zero = k.zero();
        assert!(check_normal_ideal(&k, &w, &spec, |x| *x == zero).all_pass());
        let lower = |x: &KiteElement| x.cone == crate::kite::Cone::Lower;
        assert!(check_normal_ideal(&k, &w, &spec, lower).all_pass());
        let first_axis = |x: &KiteElement| lower(x) && x.values[1] == GroupElement::Int(0);
        let r = check_normal_ideal(&k, &w, &spec, first_axis);
        assert!(r.find("x + I = I + x").unwrap().is_fail(), "{r}");
    }

    #[test]
    fn symmetry() {
        let spec = WindowSpec::bounded(2);
        let k = kite(vec![0, 1], vec![1, 0]);
        let w = k.window(&spec).unwrap();
        let r = check_symmetric(&k, &w);
        assert!(r.checks[0].is_fail());
        assert!(k.negations(&k.zero()).0 == k.negations(&k.zero()).1);
    }

    #[test]
    fn noncommuting_witness_for_swap() {
        let spec = WindowSpec::bounded(2);
        let k = kite(vec![0, 1], vec![1, 0]);
        let w = k.window(&spec).unwrap();
        let (x, y, s, t) = find_noncommuting(&k, &w).unwrap();
        assert_eq!(k.add(&x, &y), Some(s.clone()));
        assert_eq!(k.add(&y, &x), Some(t.clone()));
        assert_ne!(s, t);
        let id = kite(vec![0, 1], vec![0, 1]);
        let w = id.window(&spec).unwrap();
        assert!(find_noncommuting(&id, &w).is_none());
    }

    #[test]
    fn kite_classifies_as_rdp2() {
        let spec = WindowSpec::bounded(2);
        let k = kite(vec![0, 1], vec![1, 0]);
        let w = k.window(&spec).unwrap();
        let amb = PeaAmbient { universe: &k, window: &w, spec };
        let r = rdp::classify_rdp(&amb, &w.elements, &w.note);
        assert_eq!(rdp::strongest_class(&r), Some(RdpClass::Rdp2), "{r}");
    }
}
