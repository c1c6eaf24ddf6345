use std::sync::Arc;

use num_complex::Complex64;

use super::pauli::SpinElement;
use crate::clifford::{same_lattice, AlgebraElement, Phase};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Side};

/// The Majorana lattice `Λ × {1,2,3,4}` carrying a spin lattice, with
/// channels ordered `(j,1) < (j,2) < (j,3) < (j,4)` and the reflection acting
/// on `j` only.
#[derive(Debug, Clone)]
pub struct KitaevLattice {
    spin: Arc<Lattice>,
    majorana: Arc<Lattice>,
}

impl KitaevLattice {
    pub fn new(spin: &Arc<Lattice>) -> Result<Self> {
        let mut pairs = Vec::with_capacity(4 * spin.half());
        for (p, m) in spin.plus_labels().iter().zip(spin.minus_labels()) {
            for a in 1..=4 {
                pairs.push((format!("{p}.{a}"), format!("{m}.{a}")));
            }
        }
        Ok(Self {
            spin: Arc::clone(spin),
            majorana: Arc::new(Lattice::from_pairs(pairs)?),
        })
    }

    pub fn spin(&self) -> &Arc<Lattice> {
        &self.spin
    }

    pub fn majorana(&self) -> &Arc<Lattice> {
        &self.majorana
    }

    /// Majorana bit of channel `a ∈ 1..=4` at the spin site `bit`.
    pub fn channel_bit(&self, bit: u32, a: u8) -> u32 {
        assert!((1..=4).contains(&a), "channel must be 1..=4, got {a}");
        let h = self.spin.half() as u32;
        let (k, side) = match self.spin.side(bit) {
            Side::Plus => (bit - h, Side::Plus),
            Side::Minus => (h - 1 - bit, Side::Minus),
        };
        let p = (4 * k + a as u32 - 1) as usize;
        match side {
            Side::Plus => self.majorana.plus_bit(p),
            Side::Minus => self.majorana.minus_bit(p),
        }
    }

    /// `γ⁵_j = c¹_j c²_j c³_j c⁴_j`
    pub fn gamma5(&self, bit: u32) -> AlgebraElement {
        let bits: Vec<u32> = (1..=4).map(|a| self.channel_bit(bit, a)).collect();
        AlgebraElement::product_of(&self.majorana, &bits)
    }
}

/// `σ^a_j ↦ i c^a_j c^4_j`, extended string by string.
pub fn kitaev_map(x: &SpinElement, target: &KitaevLattice) -> Result<AlgebraElement> {
    if !same_lattice(x.lattice(), target.spin()) {
        return Err(Error::LatticeMismatch);
    }
    let lat = target.majorana();
    let mut out = AlgebraElement::zero(lat);
    for (s, amp) in x.terms() {
        let letters = s.letters();
        let bits: Vec<u32> = letters
            .iter()
            .flat_map(|&(b, a)| [target.channel_bit(b, a), target.channel_bit(b, 4)])
            .collect();
        let img = AlgebraElement::product_of(lat, &bits);
        let phase = Phase::i_pow(letters.len() as i64);
        for (w, z) in img.terms() {
            out.add_term(w, phase.apply(z * amp));
        }
    }
    Ok(out)
}

/// `P⁵ = Π_j ½(I + γ⁵_j)`
pub fn chiral_projection(target: &KitaevLattice) -> AlgebraElement {
    let lat = target.majorana();
    let half = Complex64::new(0.5, 0.0);
    let mut p = AlgebraElement::identity(lat);
    for bit in 0..target.spin().len() as u32 {
        let factor = (&AlgebraElement::identity(lat) + &target.gamma5(bit)) * half;
        p = &p * &factor;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::extract_couplings;
    use crate::matrix_rep::Representation;
    use crate::reflection::{reflect, BasisIndex, TwistChoice};
    use crate::spin::couplings::{build_spin_hamiltonian, spin_basis, SpinCouplings};
    use crate::spin::pauli::{spin_reflect, PauliString};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup(m: usize) -> (Arc<Lattice>, KitaevLattice) {
        let spin = Arc::new(Lattice::with_plus_sites(m).unwrap());
        let k = KitaevLattice::new(&spin).unwrap();
        (spin, k)
    }

    #[test]
    fn channel_layout() {
        let (spin, k) = setup(2);
        let maj = k.majorana();
        assert_eq!(maj.len(), 16);
        for bit in 0..4 {
            for a in 1..=4 {
                let b = k.channel_bit(bit, a);
                assert_eq!(maj.label(b), format!("{}.{a}", spin.label(bit)));
                assert_eq!(maj.mirror_bit(b), k.channel_bit(spin.mirror_bit(bit), a));
            }
        }
    }

    #[test]
    fn single_spin_images() {
        let (spin, k) = setup(1);
        let j = spin.plus_bit(0);
        let i = c(0.0, 1.0);
        for a in 1..=3 {
            let img = kitaev_map(&SpinElement::sigma(&spin, j, a), &k).unwrap();
            let expected = AlgebraElement::product_of(k.majorana(), &[k.channel_bit(j, a), k.channel_bit(j, 4)]) * i;
            assert_eq!(img, expected);
            assert!(img.is_even());
        }
        let id = kitaev_map(&SpinElement::identity(&spin), &k).unwrap();
        assert_eq!(id, AlgebraElement::identity(k.majorana()));

        let p5 = chiral_projection(&k);
        let s1 = kitaev_map(&SpinElement::sigma(&spin, j, 1), &k).unwrap();
        let s2 = kitaev_map(&SpinElement::sigma(&spin, j, 2), &k).unwrap();
        let s3 = kitaev_map(&SpinElement::sigma(&spin, j, 3), &k).unwrap();
        assert_ne!(&s1 * &s2, &s3 * i);
        assert_eq!(&(&s1 * &s2) * &p5, &(&s3 * i) * &p5);
    }

    #[test]
    fn chiral_projection_properties() {
        let (spin, k) = setup(1);
        let p5 = chiral_projection(&k);
        assert_eq!(&p5 * &p5, p5);
        assert_eq!(p5.trace(), c(0.25, 0.0));
        let g = &k.gamma5(spin.plus_bit(0));
        let single = (&AlgebraElement::identity(k.majorana()) + g) * c(0.5, 0.0);
        assert_eq!((&single * &single), single);
        let j = spin.plus_bit(0);
        let local = AlgebraElement::product_of(k.majorana(), &[k.channel_bit(j, 1), k.channel_bit(j, 3)]);
        assert_eq!(&local * &p5, &p5 * &local);
        // even overall but odd on each of two sites
        let split = AlgebraElement::product_of(k.majorana(), &[k.channel_bit(j, 1), k.channel_bit(spin.minus_bit(0), 1)]);
        assert_ne!(&split * &p5, &p5 * &split);
        assert_eq!(reflect(&p5), p5);
    }

    #[test]
    fn coupling_transport() {
        let (spin, k) = setup(1);
        let basis = spin_basis(&spin);
        let mut j = SpinCouplings::new(&spin);
        j.set(basis[3], basis[3], c(0.7, 0.0));
        j.set(basis[1], basis[2], c(0.25, -0.5));
        j.set(basis[0], basis[1], c(0.0, 1.5));
        let h = build_spin_hamiltonian(&j);
        let hm = kitaev_map(&h, &k).unwrap();
        let jm = extract_couplings(&hm, TwistChoice::PlusI);
        let paired = |l: super::super::couplings::SpinLabel| {
            let mut pos = Vec::new();
            for (p, a) in l.letters() {
                pos.push(4 * p + a as usize - 1);
                pos.push(4 * p + 3);
            }
            BasisIndex::from_tuple(&pos)
        };
        let mut expected = 0;
        for (r, col, z) in j.entries() {
            let phase = Phase::i_pow((r.degree() + col.degree()) as i64);
            let got = jm.get(paired(r), paired(col));
            assert!((got - phase.apply(z)).norm() < 1e-15, "{got} vs {z}");
            expected += 1;
        }
        assert_eq!(jm.len(), expected);
    }

    fn raw(n: u32) -> impl Strategy<Value = Vec<(u64, u64, f64, f64)>> {
        prop::collection::vec((0u64..(1 << n), 0u64..(1 << n), -1.0..1.0f64, -1.0..1.0f64), 0..5)
    }

    fn element(l: &Arc<Lattice>, raw: &[(u64, u64, f64, f64)]) -> SpinElement {
        SpinElement::from_terms(l, raw.iter().map(|&(x, z, re, im)| (PauliString { x, z }, c(re, im))))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn trace_consistency(x in raw(2)) {
            let (spin, k) = setup(1);
            let x = element(&spin, &x);
            let p5 = chiral_projection(&k);
            let lhs = x.trace();
            let rhs = (&kitaev_map(&x, &k).unwrap() * &p5).trace() / p5.trace();
            prop_assert!((lhs - rhs).norm() <= 1e-12);
        }

        #[test]
        fn homomorphism_after_projection(x in raw(4), y in raw(4)) {
            let (spin, k) = setup(2);
            let (x, y) = (element(&spin, &x), element(&spin, &y));
            let rep = Representation::new(k.majorana()).unwrap();
            let p5 = chiral_projection(&k);
            let lhs = rep.represent(&(&kitaev_map(&(&x * &y), &k).unwrap() * &p5));
            let rhs = rep.represent(&(&(&kitaev_map(&x, &k).unwrap() * &kitaev_map(&y, &k).unwrap()) * &p5));
            prop_assert!((&lhs - &rhs).max_abs() <= 1e-10);
        }

        #[test]
        fn reflection_commutes_with_the_map(x in raw(4)) {
            let (spin, k) = setup(2);
            let x = element(&spin, &x);
            let lhs = reflect(&kitaev_map(&x, &k).unwrap());
            let rhs = kitaev_map(&spin_reflect(&x), &k).unwrap();
            prop_assert!(lhs.distance(&rhs) <= 1e-14);
        }
    }
}
