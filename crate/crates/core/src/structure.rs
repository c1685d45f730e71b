//! Index bijections and what their orbits decide.
//!
//! `φ` is derived from the kite's `λ` and `ρ`; its orbits split the index
//! set into connected components. Those components, together with the
//! group's own flag, settle subdirect irreducibility, and a single cycle
//! can be renumbered to `i ↦ i - 1 (mod m)`. The map from a kite to the
//! `n = 1` interval of the lexicographic extension also lives here.
//!
//! Convention: tuples are reindexed by `t ↦ t_{p(i)}`, so the extension's
//! shift is `ψ_k(t)_i = t_{φ^k(i)}`. Under it the kite maps onto the
//! extension exactly when `φ(i) = λ(ρ⁻¹(i))`.

use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kite::{Cone, KiteAlgebra, KiteElement};
use crate::lexext::{LexElement, LexGroup, NPerfectAlgebra};
use crate::pea::{for_each_pair, PeaUniverse, Window, WindowSpec};
use crate::pogroup::PoGroup;
use crate::report::{Check, CheckReport};
use crate::tuple::Tuple;
use crate::Tri;

/// A bijection of `{0..m-1}` given by its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Permutation> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &p in &images {
            if p >= m || seen[p] {
                return Err(Error::NotBijection(images));
            }
            seen[p] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(m: usize) -> Permutation {
        Permutation((0..m).collect())
    }

    /// `i ↦ i - 1 (mod m)`.
    pub fn down_cycle(m: usize) -> Permutation {
        Permutation((0..m).map(|i| (i + m - 1) % m).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Permutation(inv)
    }

    /// `self ∘ other`, applying `other` first.
    pub fn after(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "composing permutations of different sizes");
        Permutation(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn pow(&self, k: i64) -> Permutation {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs() % self.order().max(1);
        let mut acc = Permutation::identity(self.len());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = sq.after(&acc);
            }
            sq = sq.after(&sq);
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Orbits, each listed from its least index in the order the cycle
    /// visits it; orbits sorted by least index.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.0[i];
            }
            out.push(cycle);
        }
        out
    }

    /// Least common multiple of the cycle lengths.
    pub fn order(&self) -> u64 {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        self.cycles().iter().fold(1u64, |acc, c| {
            let l = c.len() as u64;
            acc / gcd(acc, l) * l
        })
    }

    /// `σ ∘ self ∘ σ⁻¹`: `self` read through the renumbering `i ↦ σ(i)`.
    pub fn conjugate_by(&self, sigma: &Permutation) -> Permutation {
        sigma.after(self).after(&sigma.inverse())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// `φ(i) = λ(ρ⁻¹(i))`.
pub fn build_phi(lambda: &Permutation, rho: &Permutation) -> Result<Permutation> {
    if lambda.len() != rho.len() {
        return Err(Error::LengthMismatch(lambda.len(), rho.len()));
    }
    Ok(lambda.after(&rho.inverse()))
}

/// Orbits of `φ` and the restriction of `φ` to each, renumbered by the
/// sorted order of the component's indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentPartition {
    pub components: Vec<Vec<usize>>,
    pub restrictions: Vec<Permutation>,
}

impl ComponentPartition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

pub fn components(phi: &Permutation) -> ComponentPartition {
    let mut components: Vec<Vec<usize>> = phi.cycles();
    for c in &mut components {
        c.sort_unstable();
    }
    let restrictions = components.iter().map(|c| restrict(phi, c)).collect();
    ComponentPartition { components, restrictions }
}

/// `φ` on a `φ`-invariant sorted index set, as a permutation of `0..|c|`.
fn restrict(phi: &Permutation, c: &[usize]) -> Permutation {
    let pos: FxHashMap<usize, usize> = c.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    Permutation(c.iter().map(|&i| pos[&phi.apply(i)]).collect())
}

/// For a single `m`-cycle, the renumbering `σ` (as `i ↦ σ(i)`) under which
/// `φ` becomes `i ↦ i - 1 (mod m)`. Walks the cycle from index 0, sending
/// `φ^t(0)` to `-t mod m`.
pub fn canonical_form(phi: &Permutation) -> Option<Permutation> {
    let m = phi.len();
    if m == 0 {
        return Some(Permutation::identity(0));
    }
    let cycles = phi.cycles();
    if cycles.len() != 1 {
        return None;
    }
    let mut sigma = vec![0; m];
    for (t, &i) in cycles[0].iter().enumerate() {
        sigma[i] = (m - t % m) % m;
    }
    Some(Permutation(sigma))
}

/// The data that subdirect irreducibility depends on: the group, `φ`, and
/// the number of slices (`n = 1` for a kite).
#[derive(Clone, Debug)]
pub struct Shape {
    pub group: PoGroup,
    pub phi: Permutation,
    pub n: u32,
}

impl Shape {
    pub fn of_kite(k: &KiteAlgebra) -> Shape {
        Shape {
            group: *k.group(),
            phi: build_phi(k.lambda(), k.rho()).expect("kite permutations have equal length"),
            n: 1,
        }
    }

    pub fn of_nperfect(a: &NPerfectAlgebra) -> Shape {
        Shape { group: *a.lex().group(), phi: a.lex().phi().clone(), n: a.n() }
    }

    pub fn algebra(&self) -> NPerfectAlgebra {
        NPerfectAlgebra::new(LexGroup::new(self.group, self.phi.clone()), self.n.max(1)).expect("n >= 1")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Irreducibility {
    pub verdict: Tri,
    pub rationale: String,
    pub components: usize,
    /// The renumbering to `φ(i) = i - 1 (mod m)`, when the verdict is yes.
    pub canonical: Option<Permutation>,
}

/// Decides from the group's flag and the connectivity of `φ`: irreducible
/// iff the group is and `φ` has one orbit. A trivial group or empty index
/// set gives a finite chain, which is irreducible.
pub fn decide_subdirect_irreducibility(shape: &Shape) -> Irreducibility {
    let m = shape.phi.len();
    let parts = components(&shape.phi);
    let flag = shape.group.flags().subdirectly_irreducible;
    let chain = shape.n + 1;
    let (verdict, rationale) = if m == 0 || shape.group.is_trivial() {
        (
            Tri::Yes,
            if chain == 2 {
                "G^I is trivial: the 2-element Boolean algebra, a chain".to_string()
            } else {
                format!("G^I is trivial: an {chain}-element linear effect algebra (a chain)")
            },
        )
    } else if flag == Tri::No {
        (Tri::No, format!("{} is not subdirectly irreducible, so no kite over it is", shape.group.kind()))
    } else if parts.len() >= 2 {
        (Tri::No, format!("phi = {} has {} connected components", shape.phi, parts.len()))
    } else if flag == Tri::Yes {
        (
            Tri::Yes,
            format!("{} is subdirectly irreducible and phi = {} is a single cycle", shape.group.kind(), shape.phi),
        )
    } else {
        (
            Tri::Unknown,
            format!("phi = {} is connected but irreducibility of {} is not known", shape.phi, shape.group.kind()),
        )
    };
    let canonical = if verdict == Tri::Yes { canonical_form(&shape.phi) } else { None };
    Irreducibility { verdict, rationale, components: parts.len(), canonical }
}

impl Irreducibility {
    /// Text for the classifier, naming the canonical form when there is one.
    pub fn summary(&self, m: usize) -> String {
        let mut s = format!("subdirectly irreducible: {} ({})", self.verdict, self.rationale);
        if let Some(sigma) = &self.canonical {
            if m >= 1 {
                s.push_str(&format!(
                    "; isomorphic to K with phi(i) = i-1 (mod {m}) via renumbering {sigma}"
                ));
            }
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct Factor {
    /// Original indices of the component, sorted.
    pub indices: Vec<usize>,
    pub phi: Permutation,
    pub decision: Irreducibility,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub factors: Vec<Factor>,
    pub report: CheckReport,
}

fn project(x: &LexElement, indices: &[usize]) -> LexElement {
    LexElement { level: x.level, values: indices.iter().map(|&i| x.values[i].clone()).collect() }
}

/// One factor per component of `φ`, with the projections checked on the
/// window: homomorphic, onto the factor's own window, jointly injective.
pub fn decompose(shape: &Shape, spec: &WindowSpec) -> Result<Decomposition> {
    let parts = components(&shape.phi);
    let mut report = CheckReport::new("decompose");
    let whole = shape.algebra();
    if parts.len() <= 1 {
        let decision = decide_subdirect_irreducibility(shape);
        report.push(Check::pass("single component: the factor is the algebra itself"));
        let factors = vec![Factor { indices: (0..shape.phi.len()).collect(), phi: shape.phi.clone(), decision }];
        return Ok(Decomposition { factors, report });
    }
    let w = whole.window(spec)?;
    let mut factors = Vec::new();
    for (indices, phi) in parts.components.iter().zip(&parts.restrictions) {
        let sub = Shape { group: shape.group, phi: phi.clone(), n: shape.n };
        let fa = sub.algebra();
        let name = format!("component {indices:?}");

        let mut hom = None;
        for_each_pair(&w, spec, |x, y| {
            if hom.is_some() {
                return;
            }
            if let Some(s) = whole.add(x, y) {
                let (px, py, ps) = (project(x, indices), project(y, indices), project(&s, indices));
                if fa.add(&px, &py).as_ref() != Some(&ps) {
                    hom = Some(format!("{x} + {y} = {s}, but the projections give {px} + {py} != {ps}"));
                }
            }
        });
        for x in &w.elements {
            if hom.is_some() {
                break;
            }
            let (m, t) = whole.negations(x);
            let (pm, pt) = fa.negations(&project(x, indices));
            if project(&m, indices) != pm || project(&t, indices) != pt {
                hom = Some(format!("negations of {x} do not project"));
            }
        }
        report.push(Check::from_witness(format!("{name}: projection is a homomorphism"), hom).with_detail(w.note.clone()));

        let fw = fa.window(spec)?;
        let image: FxHashSet<LexElement> = w.elements.iter().map(|x| project(x, indices)).collect();
        let missing = fw.elements.iter().find(|y| !image.contains(*y)).map(|y| format!("{y} is not a projection"));
        let onto = if w.exhaustive && fw.exhaustive {
            Check::from_witness(format!("{name}: projection onto the factor window"), missing)
        } else {
            Check::skipped(format!("{name}: projection onto the factor window"), "sampled window")
        };
        report.push(onto);

        let decision = decide_subdirect_irreducibility(&sub);
        report.push(match decision.verdict {
            Tri::Yes => Check::pass(format!("{name}: factor is subdirectly irreducible")),
            Tri::No => Check::fail(format!("{name}: factor is subdirectly irreducible"), decision.rationale.clone()),
            Tri::Unknown => Check::unknown(format!("{name}: factor is subdirectly irreducible"), decision.rationale.clone()),
        });
        factors.push(Factor { indices: indices.clone(), phi: phi.clone(), decision });
    }

    // Distinct elements must differ in some component.
    let mut seen: FxHashMap<Vec<LexElement>, &LexElement> = FxHashMap::default();
    let mut clash = None;
    for x in &w.elements {
        let key: Vec<LexElement> = parts.components.iter().map(|c| project(x, c)).collect();
        if let Some(y) = seen.insert(key, x) {
            clash = Some(format!("{x} and {y} have the same projections"));
            break;
        }
    }
    report.push(Check::from_witness("projections are jointly injective", clash).with_detail(w.note.clone()));
    Ok(Decomposition { factors, report })
}

/// `Φ(U⟨a⁻¹⟩) = (1, ⟨a_i⁻¹⟩)`, `Φ(L⟨f⟩) = (0, ⟨f_{λ⁻¹(i)}⟩)`.
pub fn iso_phi(k: &KiteAlgebra, x: &KiteElement) -> LexElement {
    match x.cone {
        Cone::Upper => LexElement { level: 1, values: x.values.clone() },
        Cone::Lower => {
            let inv = k.lambda().inverse();
            let values: Tuple = (0..x.values.len()).map(|i| x.values[inv.apply(i)].clone()).collect();
            LexElement { level: 0, values }
        }
    }
}

/// Checks `Φ` against `Γ(ℤ ×_φ G^I, u_1)` with `φ` built from the kite.
pub fn check_iso(k: &KiteAlgebra, spec: &WindowSpec) -> Result<CheckReport> {
    let phi = build_phi(k.lambda(), k.rho())?;
    check_iso_with(k, &phi, spec)
}

/// As [`check_iso`] with the target's `φ` supplied; a wrong `φ` should
/// produce a homomorphism witness.
pub fn check_iso_with(k: &KiteAlgebra, phi: &Permutation, spec: &WindowSpec) -> Result<CheckReport> {
    let target = NPerfectAlgebra::new(LexGroup::new(*k.group(), phi.clone()), 1)?;
    let w: Window<KiteElement> = k.window(spec)?;
    let mut report = CheckReport::new("iso");
    let image: Vec<LexElement> = w.elements.iter().map(|x| iso_phi(k, x)).collect();

    let outside = w.elements.iter().zip(&image).find(|(_, y)| !target.is_member(y));
    report.push(Check::from_witness(
        "image lies in the n = 1 interval",
        outside.map(|(x, y)| format!("Phi({x}) = {y} is not in the interval")),
    ));
    let mut first: FxHashMap<&LexElement, &KiteElement> = FxHashMap::default();
    let mut collide = None;
    for (x, y) in w.elements.iter().zip(&image) {
        if let Some(z) = first.insert(y, x) {
            collide = Some(format!("Phi({x}) = Phi({z}) = {y}"));
            break;
        }
    }
    report.push(Check::from_witness("Phi is injective", collide));
    let tw = target.window(spec)?;
    if w.exhaustive && tw.exhaustive {
        let missed = tw.elements.iter().find(|y| !first.contains_key(y)).map(|y| format!("{y} has no preimage"));
        report.push(Check::from_witness("Phi is onto the interval window", missed).with_detail(w.note.clone()));
    } else {
        report.push(Check::skipped("Phi is onto the interval window", "sampled window"));
    }

    let mut hom = None;
    let mut order = None;
    for_each_pair(&w, spec, |x, y| {
        let (fx, fy) = (iso_phi(k, x), iso_phi(k, y));
        if hom.is_none() {
            let left = k.add(x, y).map(|s| iso_phi(k, &s));
            let right = target.add(&fx, &fy);
            if left != right {
                let show = |v: &Option<LexElement>| v.as_ref().map_or("undefined".to_string(), |e| e.to_string());
                hom = Some(format!(
                    "x = {x}, y = {y}: Phi(x + y) = {}, Phi(x) * Phi(y) = {}",
                    show(&left),
                    show(&right)
                ));
            }
        }
        if order.is_none() && k.leq(x, y) != target.leq(&fx, &fy) {
            order = Some(format!("x = {x}, y = {y}: kite order {}, image order {}", k.leq(x, y), target.leq(&fx, &fy)));
        }
    });
    report.push(Check::from_witness("x + y defined iff Phi(x) + Phi(y) is, with equal values", hom).with_detail(w.note.clone()));
    report.push(Check::from_witness("x <= y iff Phi(x) <= Phi(y)", order).with_detail(w.note.clone()));

    let neg = w.elements.iter().find_map(|x| {
        let (m, t) = k.negations(x);
        let (tm, tt) = target.negations(&iso_phi(k, x));
        (iso_phi(k, &m) != tm || iso_phi(k, &t) != tt).then(|| {
            format!("x = {x}: Phi(x-) = {}, Phi(x)- = {tm}; Phi(x~) = {}, Phi(x)~ = {tt}", iso_phi(k, &m), iso_phi(k, &t))
        })
    });
    report.push(Check::from_witness("negations commute with Phi", neg));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pogroup::GroupElement;
    use crate::rdp::{self, RdpClass};

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn ints(v: &[i64]) -> Tuple {
        v.iter().map(|x| GroupElement::Int(*x)).collect()
    }

    #[test]
    fn rejects_non_bijections() {
        assert_eq!(Permutation::new(vec![0, 0]), Err(Error::NotBijection(vec![0, 0])));
        assert!(Permutation::new(vec![2, 0]).is_err());
    }

    #[test]
    fn phi_examples() {
        let swap = perm(&[1, 0]);
        assert!(build_phi(&swap, &swap).unwrap().is_identity());
        assert_eq!(build_phi(&swap, &Permutation::identity(2)).unwrap(), swap);
        assert_eq!(build_phi(&perm(&[1, 2, 0]), &perm(&[2, 0, 1])).unwrap(), perm(&[2, 0, 1]));
        assert!(build_phi(&swap, &Permutation::identity(3)).is_err());
    }

    #[test]
    fn orbits() {
        assert_eq!(components(&Permutation::identity(3)).components, vec![vec![0], vec![1], vec![2]]);
        let p = components(&perm(&[1, 0, 3, 2]));
        assert_eq!(p.components, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(p.restrictions, vec![perm(&[1, 0]), perm(&[1, 0])]);
        assert_eq!(components(&perm(&[2, 0, 1])).components, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(canonical_form(&Permutation::identity(1)), Some(Permutation::identity(1)));
        let phi = perm(&[2, 0, 1]);
        let sigma = canonical_form(&phi).unwrap();
        assert_eq!(phi.conjugate_by(&sigma), Permutation::down_cycle(3));
        assert_eq!(canonical_form(&perm(&[1, 0, 3, 2])), None);
    }

    #[test]
    fn powers_and_order() {
        let p = perm(&[1, 2, 0, 4, 3]);
        assert_eq!(p.order(), 6);
        assert!(p.pow(6).is_identity());
        assert_eq!(p.pow(-1), p.inverse());
        assert_eq!(p.pow(2), p.after(&p));
        assert_eq!(p.to_string(), "[1,2,0,4,3]");
    }

    fn shape(group: PoGroup, phi: &[usize]) -> Shape {
        Shape { group, phi: perm(phi), n: 1 }
    }

    #[test]
    fn irreducibility() {
        let d = decide_subdirect_irreducibility(&shape(PoGroup::integers(), &[2, 0, 1]));
        assert_eq!(d.verdict, Tri::Yes);
        assert!(d.canonical.is_some());
        assert_eq!(decide_subdirect_irreducibility(&shape(PoGroup::integers(), &[1, 0, 3, 2])).verdict, Tri::No);
        assert_eq!(decide_subdirect_irreducibility(&shape(PoGroup::int_vectors(2), &[1, 0])).verdict, Tri::No);
        assert_eq!(decide_subdirect_irreducibility(&shape(PoGroup::affine_rational(), &[0])).verdict, Tri::Unknown);
        let chain = Shape { group: PoGroup::integers(), phi: Permutation::identity(0), n: 3 };
        let d = decide_subdirect_irreducibility(&chain);
        assert_eq!(d.verdict, Tri::Yes);
        assert!(d.rationale.contains("4-element"));
    }

    #[test]
    fn decompositions() {
        let spec = WindowSpec::bounded(1);
        let d = decompose(&shape(PoGroup::integers(), &[1, 0, 3, 2]), &spec).unwrap();
        assert_eq!(d.factors.len(), 2);
        assert!(d.factors.iter().all(|f| f.phi == perm(&[1, 0]) && f.decision.verdict == Tri::Yes));
        assert!(d.report.all_pass(), "{}", d.report);
        let d = decompose(&shape(PoGroup::integers(), &[0, 1]), &spec).unwrap();
        assert_eq!(d.factors.len(), 2);
        assert!(d.report.all_pass(), "{}", d.report);
        let d = decompose(&shape(PoGroup::integers(), &[2, 0, 1]), &spec).unwrap();
        assert_eq!(d.factors.len(), 1);
    }

    fn kite(lambda: &[usize], rho: &[usize]) -> KiteAlgebra {
        KiteAlgebra::new(PoGroup::integers(), perm(lambda), perm(rho)).unwrap()
    }

    #[test]
    fn phi_map_examples() {
        let k = kite(&[1, 0], &[0, 1]);
        assert_eq!(iso_phi(&k, &k.zero()), LexElement { level: 0, values: ints(&[0, 0]) });
        assert_eq!(iso_phi(&k, &k.one()), LexElement { level: 1, values: ints(&[0, 0]) });
        let l = KiteElement { cone: Cone::Lower, values: ints(&[1, 2]) };
        assert_eq!(iso_phi(&k, &l).values, ints(&[2, 1]));
        let u = KiteElement { cone: Cone::Upper, values: ints(&[-2, -5]) };
        assert_eq!(iso_phi(&k, &u), LexElement { level: 1, values: ints(&[-2, -5]) });
        // Spot instance: evaluated in the kite and in the extension separately.
        let sum = k.add(&u, &l).unwrap();
        assert_eq!(sum.values, ints(&[-1, -3]));
        let lex = LexGroup::new(PoGroup::integers(), build_phi(k.lambda(), k.rho()).unwrap());
        assert_eq!(lex.mul(&iso_phi(&k, &u), &iso_phi(&k, &l)), LexElement { level: 1, values: ints(&[-1, -3]) });
        assert_eq!(iso_phi(&k, &sum), LexElement { level: 1, values: ints(&[-1, -3]) });
    }

    #[test]
    fn iso_holds_and_wrong_phi_fails() {
        let spec = WindowSpec::bounded(2);
        for (l, r) in [(vec![0, 1], vec![0, 1]), (vec![0, 1], vec![1, 0]), (vec![1, 0], vec![0, 1])] {
            let rep = check_iso(&kite(&l, &r), &spec).unwrap();
            assert!(rep.all_pass(), "{rep}");
        }
        // λ and ρ that do not commute, so the two composition orders differ.
        let k = kite(&[1, 0, 2], &[1, 2, 0]);
        assert!(check_iso(&k, &spec).unwrap().all_pass());
        let wrong = k.rho().inverse().after(k.lambda());
        assert_ne!(wrong, build_phi(k.lambda(), k.rho()).unwrap());
        let rep = check_iso_with(&k, &wrong, &spec).unwrap();
        let hom = rep.find("x + y defined iff Phi(x) + Phi(y) is, with equal values").unwrap();
        assert!(hom.is_fail() && hom.counterexample.is_some(), "{rep}");
    }

    #[test]
    fn kite_and_interval_are_both_rdp1() {
        let spec = WindowSpec::bounded(1);
        let k = kite(&[0, 1], &[1, 0]);
        let kw = k.window(&spec).unwrap();
        let amb = crate::pea::PeaAmbient { universe: &k, window: &kw, spec };
        let kr = rdp::classify_rdp(&amb, &kw.elements, &kw.note);
        let a = Shape::of_kite(&k).algebra();
        let aw = a.window(&spec).unwrap();
        let amb = crate::pea::PeaAmbient { universe: &a, window: &aw, spec };
        let ar = rdp::classify_rdp(&amb, &aw.elements, &aw.note);
        for r in [kr, ar] {
            assert!(rdp::strongest_class(&r) >= Some(RdpClass::Rdp1), "{r}");
        }
    }
}
