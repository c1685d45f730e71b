//! Kite pseudo effect algebras `K_I^{λ,ρ}(G)` over a finite index set.
//!
//! The universe is `(G⁺)^I ⊎ (G⁻)^I`. Upper elements store the negative
//! values `a_i⁻¹` themselves, so the addition clauses read as written:
//!
//! ```text
//! U<a⁻¹> + U<b⁻¹>   undefined
//! U<a⁻¹> + L<f>     = U<a_i⁻¹ f_{ρ⁻¹(i)}>   if f_{ρ⁻¹(i)} <= a_i
//! L<f> + U<a⁻¹>     = U<f_{λ⁻¹(i)} a_i⁻¹>   if f_{λ⁻¹(i)} <= a_i
//! L<f> + L<g>       = L<f_i g_i>
//! ```
//!
//! `L[e,..]` is 0 and `U[e,..]` is 1; the cone tag keeps them apart.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pea::{PeaUniverse, Window, WindowSpec};
use crate::pogroup::{GroupElement, PoGroup};
use crate::structure::Permutation;
use crate::tuple::{cartesian, render, split_top_level, Tuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cone {
    Lower,
    Upper,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KiteElement {
    pub cone: Cone,
    pub values: Tuple,
}

impl KiteElement {
    pub fn lower(values: impl IntoIterator<Item = GroupElement>) -> KiteElement {
        KiteElement { cone: Cone::Lower, values: values.into_iter().collect() }
    }

    pub fn upper(values: impl IntoIterator<Item = GroupElement>) -> KiteElement {
        KiteElement { cone: Cone::Upper, values: values.into_iter().collect() }
    }
}

impl fmt::Display for KiteElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.cone {
            Cone::Lower => 'L',
            Cone::Upper => 'U',
        };
        write!(f, "{tag}{}", render(&self.values))
    }
}

#[derive(Clone, Debug)]
pub struct KiteAlgebra {
    group: PoGroup,
    lambda: Permutation,
    rho: Permutation,
    lambda_inv: Permutation,
    rho_inv: Permutation,
}

impl KiteAlgebra {
    pub fn new(group: PoGroup, lambda: Permutation, rho: Permutation) -> Result<KiteAlgebra> {
        if lambda.len() != rho.len() {
            return Err(Error::LengthMismatch(lambda.len(), rho.len()));
        }
        let lambda_inv = lambda.inverse();
        let rho_inv = rho.inverse();
        Ok(KiteAlgebra { group, lambda, rho, lambda_inv, rho_inv })
    }

    pub fn group(&self) -> &PoGroup {
        &self.group
    }

    pub fn lambda(&self) -> &Permutation {
        &self.lambda
    }

    pub fn rho(&self) -> &Permutation {
        &self.rho
    }

    pub fn index_size(&self) -> usize {
        self.lambda.len()
    }

    fn constant(&self, cone: Cone) -> KiteElement {
        KiteElement { cone, values: (0..self.index_size()).map(|_| self.group.identity()).collect() }
    }

    pub fn zero(&self) -> KiteElement {
        self.constant(Cone::Lower)
    }

    pub fn one(&self) -> KiteElement {
        self.constant(Cone::Upper)
    }

    pub fn is_member(&self, x: &KiteElement) -> bool {
        x.values.len() == self.index_size()
            && x.values.iter().all(|g| {
                self.group.contains(g)
                    && match x.cone {
                        Cone::Lower => self.group.is_positive(g),
                        Cone::Upper => self.group.is_negative(g),
                    }
            })
    }

    pub fn check(&self, x: &KiteElement) -> Result<()> {
        if self.is_member(x) {
            Ok(())
        } else {
            Err(Error::NotMember { element: x.to_string(), instance: self.describe() })
        }
    }

    /// `t_{p(i)}` for each `i`.
    fn reindex(&self, t: &Tuple, p: &Permutation) -> Tuple {
        (0..t.len()).map(|i| t[p.apply(i)].clone()).collect()
    }

    pub fn add(&self, x: &KiteElement, y: &KiteElement) -> Option<KiteElement> {
        let g = &self.group;
        match (x.cone, y.cone) {
            (Cone::Upper, Cone::Upper) => None,
            (Cone::Upper, Cone::Lower) => {
                let f = self.reindex(&y.values, &self.rho_inv);
                // f_{ρ⁻¹(i)} <= a_i, i.e. (stored a_i⁻¹) f_{ρ⁻¹(i)} <= e
                let values: Tuple = x.values.iter().zip(&f).map(|(a, b)| g.mul(a, b)).collect();
                values.iter().all(|v| g.is_negative(v)).then_some(KiteElement { cone: Cone::Upper, values })
            }
            (Cone::Lower, Cone::Upper) => {
                let f = self.reindex(&x.values, &self.lambda_inv);
                let values: Tuple = f.iter().zip(&y.values).map(|(a, b)| g.mul(a, b)).collect();
                values.iter().all(|v| g.is_negative(v)).then_some(KiteElement { cone: Cone::Upper, values })
            }
            (Cone::Lower, Cone::Lower) => Some(KiteElement {
                cone: Cone::Lower,
                values: x.values.iter().zip(&y.values).map(|(a, b)| g.mul(a, b)).collect(),
            }),
        }
    }

    /// `(x⁻, x∼)`.
    pub fn negations(&self, x: &KiteElement) -> (KiteElement, KiteElement) {
        let g = &self.group;
        let inv = |t: Tuple| -> Tuple { t.iter().map(|v| g.inv(v)).collect() };
        match x.cone {
            // U<a⁻¹>⁻ = L<a_{λ(i)}>, U<a⁻¹>∼ = L<a_{ρ(i)}>
            Cone::Upper => (
                KiteElement { cone: Cone::Lower, values: inv(self.reindex(&x.values, &self.lambda)) },
                KiteElement { cone: Cone::Lower, values: inv(self.reindex(&x.values, &self.rho)) },
            ),
            // L<f>⁻ = U<f_{ρ⁻¹(i)}⁻¹>, L<f>∼ = U<f_{λ⁻¹(i)}⁻¹>
            Cone::Lower => (
                KiteElement { cone: Cone::Upper, values: inv(self.reindex(&x.values, &self.rho_inv)) },
                KiteElement { cone: Cone::Upper, values: inv(self.reindex(&x.values, &self.lambda_inv)) },
            ),
        }
    }

    pub fn leq(&self, x: &KiteElement, y: &KiteElement) -> bool {
        match (x.cone, y.cone) {
            (Cone::Lower, Cone::Upper) => true,
            (Cone::Upper, Cone::Lower) => false,
            _ => x.values.iter().zip(&y.values).all(|(a, b)| self.group.leq(a, b)),
        }
    }

    /// `(x ∧ y, x ∨ y)`, or `None` when the group is not lattice ordered.
    pub fn lattice(&self, x: &KiteElement, y: &KiteElement) -> Option<(KiteElement, KiteElement)> {
        if !self.group.flags().lattice_ordered {
            return None;
        }
        let g = &self.group;
        Some(match (x.cone, y.cone) {
            (Cone::Lower, Cone::Upper) => (x.clone(), y.clone()),
            (Cone::Upper, Cone::Lower) => (y.clone(), x.clone()),
            _ => (
                KiteElement { cone: x.cone, values: x.values.iter().zip(&y.values).map(|(a, b)| g.meet(a, b)).collect() },
                KiteElement { cone: x.cone, values: x.values.iter().zip(&y.values).map(|(a, b)| g.join(a, b)).collect() },
            ),
        })
    }

    pub fn parse_element(&self, s: &str) -> Result<KiteElement> {
        let s = s.trim();
        let err = || Error::Parse { what: "kite element", input: s.to_string() };
        let cone = match s.chars().next() {
            Some('L') => Cone::Lower,
            Some('U') => Cone::Upper,
            _ => return Err(err()),
        };
        let body = s[1..].strip_prefix('[').and_then(|b| b.strip_suffix(']')).ok_or_else(err)?;
        let values: Tuple =
            split_top_level(body).into_iter().map(|p| self.group.parse_element(p)).collect::<Result<_>>()?;
        let x = KiteElement { cone, values };
        self.check(&x)?;
        Ok(x)
    }

    pub fn describe(&self) -> String {
        format!(
            "kite over {} with |I| = {}, lambda = {}, rho = {}",
            self.group.kind(),
            self.index_size(),
            self.lambda,
            self.rho
        )
    }
}

impl PeaUniverse for KiteAlgebra {
    type Elem = KiteElement;

    fn zero(&self) -> KiteElement {
        KiteAlgebra::zero(self)
    }

    fn one(&self) -> KiteElement {
        KiteAlgebra::one(self)
    }

    fn add(&self, a: &KiteElement, b: &KiteElement) -> Option<KiteElement> {
        KiteAlgebra::add(self, a, b)
    }

    fn leq(&self, a: &KiteElement, b: &KiteElement) -> bool {
        KiteAlgebra::leq(self, a, b)
    }

    fn negations(&self, a: &KiteElement) -> (KiteElement, KiteElement) {
        KiteAlgebra::negations(self, a)
    }

    fn meet(&self, a: &KiteElement, b: &KiteElement) -> Option<KiteElement> {
        self.lattice(a, b).map(|(m, _)| m)
    }

    fn join(&self, a: &KiteElement, b: &KiteElement) -> Option<KiteElement> {
        self.lattice(a, b).map(|(_, j)| j)
    }

    /// Lower tuples from `[e, g_B]^I` then Upper tuples from `[g_B⁻¹, e]^I`.
    fn window(&self, spec: &WindowSpec) -> Result<Window<KiteElement>> {
        let m = self.index_size();
        match (self.group.positive_ball(spec.bound), self.group.negative_ball(spec.bound)) {
            (Some(pos), Some(neg)) => {
                let estimate = 2 * (pos.len() as u128).saturating_pow(m as u32);
                if estimate > spec.cap as u128 {
                    return Err(Error::WindowTooLarge { estimate, cap: spec.cap as u128 });
                }
                let mut elements = Vec::with_capacity(estimate as usize);
                for (cone, ball) in [(Cone::Lower, pos), (Cone::Upper, neg)] {
                    let columns = vec![ball; m];
                    elements.extend(cartesian(&columns).into_iter().map(|values| KiteElement { cone, values }));
                }
                Ok(Window::exhaustive(elements, format!("bound {}", spec.bound)))
            }
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                let mut elements = vec![self.zero(), self.one()];
                for _ in 0..spec.samples {
                    let values: Tuple = (0..m).map(|_| self.group.sample_positive(&mut rng, spec.bound)).collect();
                    let x = KiteElement { cone: Cone::Lower, values };
                    let (minus, tilde) = self.negations(&x);
                    elements.extend([x, minus, tilde]);
                }
                Ok(Window::sampled(elements, spec))
            }
        }
    }

    fn downset_in_window(&self, a: &KiteElement, spec: &WindowSpec) -> bool {
        a.cone == Cone::Lower
            && self.group.flags().enumerable_intervals
            && self.group.generator_power(spec.bound).is_some_and(|top| a.values.iter().all(|v| self.group.leq(v, &top)))
    }

    fn describe(&self) -> String {
        KiteAlgebra::describe(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<GroupElement> {
        v.iter().map(|x| GroupElement::Int(*x)).collect()
    }

    fn l(v: &[i64]) -> KiteElement {
        KiteElement::lower(ints(v))
    }

    fn u(v: &[i64]) -> KiteElement {
        KiteElement::upper(ints(v))
    }

    fn kite(lambda: Vec<usize>, rho: Vec<usize>) -> KiteAlgebra {
        KiteAlgebra::new(PoGroup::integers(), Permutation::new(lambda).unwrap(), Permutation::new(rho).unwrap())
            .unwrap()
    }

    #[test]
    fn clause_iv_is_componentwise() {
        let k = kite(vec![0, 1], vec![1, 0]);
        assert_eq!(k.add(&l(&[1, 2]), &l(&[3, 4])), Some(l(&[4, 6])));
    }

    #[test]
    fn clause_ii_with_swap() {
        let k = kite(vec![0, 1], vec![1, 0]);
        assert_eq!(k.add(&u(&[-2, -5]), &l(&[1, 2])), Some(u(&[0, -4])));
        assert_eq!(k.add(&u(&[-1, -5]), &l(&[1, 2])), None);
    }

    #[test]
    fn clause_i_undefined() {
        let k = kite(vec![0, 1], vec![1, 0]);
        assert_eq!(k.add(&u(&[0, 0]), &u(&[-1, 0])), None);
    }

    #[test]
    fn negations_and_unit_equations() {
        let k = kite(vec![1, 0], vec![0, 1]);
        let (_, tilde) = k.negations(&l(&[1, 2]));
        assert_eq!(tilde, u(&[-2, -1]));
        assert_eq!(k.add(&l(&[1, 2]), &tilde), Some(k.one()));
        let k = kite(vec![0, 1], vec![1, 0]);
        let (_, tilde) = k.negations(&u(&[-2, -5]));
        assert_eq!(tilde, l(&[5, 2]));
        assert_eq!(k.add(&u(&[-2, -5]), &tilde), Some(k.one()));
        assert_eq!(k.negations(&k.zero()), (k.one(), k.one()));
        assert_eq!(k.negations(&k.one()), (k.zero(), k.zero()));
    }

    #[test]
    fn order() {
        let k = kite(vec![0, 1], vec![0, 1]);
        assert!(k.leq(&l(&[0, 1]), &u(&[-5, 0])));
        assert!(!k.leq(&u(&[0, 0]), &l(&[9, 9])));
        assert!(k.leq(&u(&[-1, -2]), &u(&[0, -2])));
        assert!(k.leq(&l(&[1, 2]), &u(&[0, 0])));
        assert!(!k.leq(&l(&[2, 0]), &l(&[1, 3])));
        assert_ne!(k.zero(), KiteElement::upper(ints(&[0, 0])));
    }

    #[test]
    fn lattice_ops() {
        let k = kite(vec![0, 1], vec![1, 0]);
        let (m, j) = k.lattice(&l(&[1, 3]), &l(&[2, 2])).unwrap();
        assert_eq!((m, j), (l(&[1, 2]), l(&[2, 3])));
        let (m, j) = k.lattice(&l(&[5, 5]), &u(&[0, 0])).unwrap();
        assert_eq!((m, j), (l(&[5, 5]), u(&[0, 0])));
        let x = u(&[-1, -3]);
        assert_eq!(k.lattice(&x, &k.one()).unwrap().0, x);
        assert_eq!(k.lattice(&x, &k.zero()).unwrap().1, x);
    }

    #[test]
    fn empty_index_set_has_two_elements() {
        let k = KiteAlgebra::new(PoGroup::integers(), Permutation::identity(0), Permutation::identity(0)).unwrap();
        let w = k.window(&WindowSpec::bounded(3)).unwrap();
        assert_eq!(w.elements, vec![k.zero(), k.one()]);
        assert_eq!(k.add(&k.zero(), &k.one()), Some(k.one()));
    }

    #[test]
    fn parse_round_trip() {
        let k = kite(vec![0, 1], vec![1, 0]);
        assert_eq!(k.parse_element("U[-2,-5]").unwrap(), u(&[-2, -5]));
        assert_eq!(k.parse_element("L[1,2]").unwrap().to_string(), "L[1,2]");
        assert!(k.parse_element("L[-1,2]").is_err());
        assert!(k.parse_element("X[1,2]").is_err());
    }
}
