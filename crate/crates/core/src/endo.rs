//! The virtual endomorphism `ψ` on its index-2 domain, evaluated as a
//! two-state transducer.
//!
//! The domain `H` is the kernel of a parity homomorphism `θ: F₂ → Z/2`.
//! With transversal `{1, t}` the Schreier generator attached to state `s`
//! and generator `g` is `r_s⁻¹ · g · r_{s+θ(g)}` (`r₀ = 1`, `r₁ = t`).
//! Reading a word left to right, each letter emits the image of its
//! Schreier generator and moves the state by `θ`.

use thiserror::Error;

use crate::words::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EndoError {
    #[error("parity is not surjective onto Z/2")]
    ParityNotSurjective,
    #[error("parity bits must be 0 or 1")]
    BadParityBit,
    #[error("not in domain (parity {parity})")]
    NotInDomain { parity: u8 },
    #[error("not a Schreier basis: expected left-hand sides {expected:?}")]
    NotSchreierBasis { expected: Vec<Word> },
}

/// `θ` given by one bit per generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParityHom {
    bits: [u8; 2],
    transversal: usize,
}

impl ParityHom {
    pub fn new(bits: [u8; 2]) -> Result<Self, EndoError> {
        if bits.iter().any(|&b| b > 1) {
            return Err(EndoError::BadParityBit);
        }
        let transversal = bits
            .iter()
            .position(|&b| b == 1)
            .ok_or(EndoError::ParityNotSurjective)?;
        Ok(ParityHom { bits, transversal })
    }

    pub fn bits(&self) -> [u8; 2] {
        self.bits
    }

    /// Index of the generator `t` used as the nontrivial coset representative.
    pub fn transversal(&self) -> usize {
        self.transversal
    }

    pub fn transversal_word(&self) -> Word {
        Word::generator(self.transversal)
    }

    pub fn of_letter(&self, l: Letter) -> u8 {
        self.bits[l.generator()]
    }

    pub fn of(&self, w: &Word) -> u8 {
        w.letters().iter().fold(0, |acc, &l| acc ^ self.of_letter(l))
    }

    pub fn in_kernel(&self, w: &Word) -> bool {
        self.of(w) == 0
    }

    fn rep(&self, state: u8) -> Word {
        if state == 0 {
            Word::identity()
        } else {
            self.transversal_word()
        }
    }

    /// `r_s⁻¹ · g · r_{s+θ(g)}`; trivial for exactly one of the four
    /// `(state, generator)` pairs.
    pub fn schreier_generator(&self, state: u8, generator: usize) -> Word {
        let next = state ^ self.bits[generator];
        self.rep(state)
            .inverse()
            .mul(&Word::generator(generator))
            .mul(&self.rep(next))
    }

    /// The three nontrivial Schreier generators, tagged with their
    /// `(state, generator)` slot, in slot order.
    pub fn schreier_basis(&self) -> Vec<((u8, usize), Word)> {
        let mut out = Vec::with_capacity(3);
        for g in 0..2 {
            for s in 0..2u8 {
                let w = self.schreier_generator(s, g);
                if !w.is_identity() {
                    out.push(((s, g), w));
                }
            }
        }
        out
    }
}

/// Two-state transducer for `ψ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualEndo {
    parity: ParityHom,
    /// `emit[g][s]`: output for the positive letter `g` read in state `s`.
    emit: [[Word; 2]; 2],
    images: Vec<(Word, Word)>,
}

impl VirtualEndo {
    /// Builds the transducer from declared `(schreier generator, image)`
    /// pairs. The left-hand sides must be exactly the Schreier basis, in any
    /// order.
    pub fn from_images(parity: ParityHom, images: &[(Word, Word)]) -> Result<Self, EndoError> {
        let basis = parity.schreier_basis();
        let expected: Vec<Word> = basis.iter().map(|(_, w)| w.clone()).collect();
        let mismatch = || EndoError::NotSchreierBasis {
            expected: expected.clone(),
        };
        if images.len() != basis.len() {
            return Err(mismatch());
        }
        let mut emit: [[Word; 2]; 2] = Default::default();
        let mut seen = [false; 3];
        for (lhs, rhs) in images {
            let i = basis
                .iter()
                .position(|(_, w)| w == lhs)
                .ok_or_else(mismatch)?;
            if seen[i] {
                return Err(mismatch());
            }
            seen[i] = true;
            let ((s, g), _) = basis[i];
            emit[g][s as usize] = rhs.clone();
        }
        let mut ordered = Vec::with_capacity(3);
        for (_, w) in &basis {
            let (_, rhs) = images.iter().find(|(l, _)| l == w).expect("checked above");
            ordered.push((w.clone(), rhs.clone()));
        }
        Ok(VirtualEndo {
            parity,
            emit,
            images: ordered,
        })
    }

    pub fn parity(&self) -> &ParityHom {
        &self.parity
    }

    /// Declared images, ordered as [`ParityHom::schreier_basis`].
    pub fn images(&self) -> &[(Word, Word)] {
        &self.images
    }

    /// Output of the transducer on letter `l` read in `state`, and the next
    /// state.
    pub fn step(&self, l: Letter, state: u8) -> (Word, u8) {
        let g = l.generator();
        let next = state ^ self.parity.bits[g];
        if l.is_inverse() {
            // r_s⁻¹ g⁻¹ r_{s'} is the inverse of the generator for (s', g)
            (self.emit[g][next as usize].inverse(), next)
        } else {
            (self.emit[g][state as usize].clone(), next)
        }
    }

    pub fn in_domain(&self, w: &Word) -> bool {
        self.parity.in_kernel(w)
    }

    pub fn apply(&self, w: &Word) -> Result<Word, EndoError> {
        let parity = self.parity.of(w);
        if parity != 0 {
            return Err(EndoError::NotInDomain { parity });
        }
        let mut state = 0u8;
        let mut out: Vec<Letter> = Vec::new();
        for &l in w.letters() {
            let (emitted, next) = self.step(l, state);
            out.extend_from_slice(emitted.letters());
            state = next;
        }
        debug_assert_eq!(state, 0);
        Ok(Word::reduce(out))
    }

    /// `ψⁿ(w)`, failing as soon as an iterate leaves the domain.
    pub fn apply_iter(&self, w: &Word, n: usize) -> Result<Word, EndoError> {
        let mut cur = w.clone();
        for _ in 0..n {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    /// `ψ̂(w) = ψ(w)` on the domain and `ψ(t⁻¹ w)` off it.
    pub fn apply_hat(&self, w: &Word) -> Word {
        let shifted;
        let arg = if self.in_domain(w) {
            w
        } else {
            shifted = self.parity.transversal_word().inverse().mul(w);
            &shifted
        };
        self.apply(arg).expect("argument lies in the domain")
    }

    pub fn hat_orbit(&self, w: &Word, max_steps: usize, nucleus: Option<&Nucleus>) -> HatOrbit {
        let mut trajectory = vec![w.clone()];
        let mut entered_nucleus = nucleus.and_then(|n| n.contains(w).then_some(0));
        let mut stop = HatStop::MaxSteps;
        for k in 1..=max_steps {
            let next = self.apply_hat(trajectory.last().unwrap());
            if let Some(i) = trajectory.iter().position(|u| *u == next) {
                trajectory.push(next);
                stop = HatStop::Repeated { first: i };
                break;
            }
            if entered_nucleus.is_none() && nucleus.is_some_and(|n| n.contains(&next)) {
                entered_nucleus = Some(k);
            }
            trajectory.push(next);
        }
        HatOrbit {
            trajectory,
            entered_nucleus,
            stop,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HatStop {
    /// The last element repeats `trajectory[first]`.
    Repeated { first: usize },
    MaxSteps,
}

/// Iterates of `ψ̂` starting from the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HatOrbit {
    pub trajectory: Vec<Word>,
    /// First index whose value lies in the nucleus, when one was supplied.
    pub entered_nucleus: Option<usize>,
    pub stop: HatStop,
}

impl HatOrbit {
    pub fn last(&self) -> &Word {
        self.trajectory.last().expect("trajectory holds the start")
    }
}

/// A finite set of words absorbing `ψ̂`-iterates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nucleus {
    elements: Vec<Word>,
}

impl Nucleus {
    pub fn new(mut elements: Vec<Word>) -> Self {
        elements.sort();
        elements.dedup();
        Nucleus { elements }
    }

    /// `{1, x, y, x⁻¹, y⁻¹, xy, y⁻¹x⁻¹}` in the rabbit's generators.
    pub fn rabbit() -> Self {
        let x = Word::generator(0);
        let y = Word::generator(1);
        Nucleus::new(vec![
            Word::identity(),
            x.clone(),
            y.clone(),
            x.inverse(),
            y.inverse(),
            x.mul(&y),
            y.inverse().mul(&x.inverse()),
        ])
    }

    pub fn elements(&self) -> &[Word] {
        &self.elements
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.elements.binary_search(w).is_ok()
    }

    pub fn without(&self, w: &Word) -> Self {
        Nucleus::new(self.elements.iter().filter(|u| *u != w).cloned().collect())
    }
}

/// `ψ̂²(ab)` for every ordered pair from `rows × cols`.
pub fn hat2_table(psi: &VirtualEndo, rows: &[Word], cols: &[Word]) -> Vec<Vec<Word>> {
    rows.iter()
        .map(|a| {
            cols.iter()
                .map(|b| psi.apply_hat(&psi.apply_hat(&a.mul(b))))
                .collect()
        })
        .collect()
}

/// True iff `ψ̂²(N·N) ⊆ N`.
pub fn verify_contraction_closure(psi: &VirtualEndo, nucleus: &Nucleus) -> bool {
    let n = nucleus.elements();
    hat2_table(psi, n, n)
        .iter()
        .flatten()
        .all(|w| nucleus.contains(w))
}

/// A homomorphism of the free group given by the images of its generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordHom {
    images: [Word; 2],
}

impl WordHom {
    pub fn new(images: [Word; 2]) -> Self {
        WordHom { images }
    }

    /// The section `σ` of the `z² + i` endomorphism:
    /// `a ↦ b⁻¹a⁻¹b⁻¹a`, `b ↦ a⁻¹ba`.
    pub fn dendrite_section() -> Self {
        let a = Word::generator(0);
        let b = Word::generator(1);
        WordHom::new([
            b.inverse().mul(&a.inverse()).mul(&b.inverse()).mul(&a),
            b.conj(&a),
        ])
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::identity();
        for &l in w.letters() {
            let img = &self.images[l.generator()];
            out = if l.is_inverse() {
                out.mul(&img.inverse())
            } else {
                out.mul(img)
            };
        }
        out
    }
}

/// `w_n = a · σ(a) · … · σⁿ⁻¹(a)`.
pub fn build_wn(sigma: &WordHom, n: usize) -> Word {
    let mut term = Word::generator(0);
    let mut out = Word::identity();
    for _ in 0..n {
        out = out.mul(&term);
        term = sigma.apply(&term);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Word {
        Word::generator(0)
    }
    fn y() -> Word {
        Word::generator(1)
    }

    fn rabbit() -> VirtualEndo {
        let p = ParityHom::new([0, 1]).unwrap();
        VirtualEndo::from_images(
            p,
            &[
                (x(), y()),
                (y().pow(2), y().inverse().mul(&x().inverse())),
                (x().conj(&y()), Word::identity()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rabbit_schreier_basis() {
        let p = ParityHom::new([0, 1]).unwrap();
        let basis: Vec<Word> = p.schreier_basis().into_iter().map(|(_, w)| w).collect();
        assert_eq!(basis, vec![x(), x().conj(&y()), y().pow(2)]);
    }

    #[test]
    fn parity_must_be_surjective() {
        assert_eq!(ParityHom::new([0, 0]), Err(EndoError::ParityNotSurjective));
        assert_eq!(ParityHom::new([2, 0]), Err(EndoError::BadParityBit));
    }

    #[test]
    fn domain_membership() {
        let psi = rabbit();
        assert!(psi.in_domain(&x()));
        assert!(!psi.in_domain(&y()));
        assert!(!psi.in_domain(&y().inverse().mul(&x().inverse())));
    }

    #[test]
    fn not_in_domain_is_an_error() {
        assert_eq!(rabbit().apply(&y()), Err(EndoError::NotInDomain { parity: 1 }));
    }

    #[test]
    fn wrong_left_hand_sides_rejected() {
        let p = ParityHom::new([0, 1]).unwrap();
        let z = y().inverse().mul(&x().inverse());
        let err = VirtualEndo::from_images(
            p,
            &[(x(), y()), (y().pow(2), z.clone()), (z, Word::identity())],
        );
        assert!(matches!(err, Err(EndoError::NotSchreierBasis { .. })));
    }

    #[test]
    fn rabbit_chain() {
        let psi = rabbit();
        let z = y().inverse().mul(&x().inverse());
        assert_eq!(psi.apply(&x().pow(4)).unwrap(), y().pow(4));
        assert_eq!(psi.apply(&y().pow(4)).unwrap(), z.pow(2));
        assert_eq!(psi.apply(&z.pow(2)).unwrap(), x());
    }

    #[test]
    fn hat_examples() {
        let psi = rabbit();
        let z = y().inverse().mul(&x().inverse());
        assert_eq!(psi.apply_hat(&z), x());
        assert_eq!(psi.apply_hat(&x().pow(2)), y().pow(2));
    }

    #[test]
    fn hat_orbit_examples() {
        let psi = rabbit();
        let n = Nucleus::rabbit();
        let z = y().inverse().mul(&x().inverse());

        let o = psi.hat_orbit(&x().pow(2), 2, Some(&n));
        assert_eq!(o.last(), &z);
        assert_eq!(o.entered_nucleus, Some(2));

        let o = psi.hat_orbit(&y().mul(&z), 2, Some(&n));
        assert_eq!(o.last(), &z.inverse());

        let o = psi.hat_orbit(&Word::identity(), 5, Some(&n));
        assert_eq!(o.trajectory, vec![Word::identity(), Word::identity()]);
        assert_eq!(o.stop, HatStop::Repeated { first: 0 });
    }

    #[test]
    fn nucleus_closure_and_mutations() {
        let psi = rabbit();
        let n = Nucleus::rabbit();
        assert!(verify_contraction_closure(&psi, &n));
        assert!(!verify_contraction_closure(&psi, &n.without(&x().mul(&y()))));

        let corrupted = VirtualEndo::from_images(
            *psi.parity(),
            &[
                (x(), y().pow(2)),
                (y().pow(2), y().inverse().mul(&x().inverse())),
                (x().conj(&y()), Word::identity()),
            ],
        )
        .unwrap();
        assert!(!verify_contraction_closure(&corrupted, &n));
    }

    #[test]
    fn section_and_wn() {
        let a = x();
        let b = y();
        let sigma = WordHom::dendrite_section();
        assert_eq!(
            sigma.apply(&a),
            b.inverse().mul(&a.inverse()).mul(&b.inverse()).mul(&a)
        );
        assert_eq!(build_wn(&sigma, 1), a);
        assert_eq!(build_wn(&sigma, 2), a.mul(&sigma.apply(&a)));
    }
}
