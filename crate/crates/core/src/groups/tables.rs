//! Addition and multiplication tables for the tiny fields used by the
//! enumeration oracle: prime fields and `F₄ = F₂[t]/(t² + t + 1)`.

/// Elements are `0..size`. For `F₄` the element `b₀ + 2b₁` stands for `b₀ + b₁t`.
pub(super) struct SmallField {
    pub size: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    /// `x ↦ x^{√size}` when `size` is a square, otherwise the identity.
    conj: Vec<u8>,
}

impl SmallField {
    /// `ℤ/p`; a field when `p` is prime.
    pub fn cyclic(p: usize) -> SmallField {
        assert!(p <= 251);
        let mut add = vec![0; p * p];
        let mut mul = vec![0; p * p];
        for a in 0..p {
            for b in 0..p {
                add[a * p + b] = ((a + b) % p) as u8;
                mul[a * p + b] = ((a * b) % p) as u8;
            }
        }
        SmallField {
            size: p,
            add,
            mul,
            conj: (0..p as u8).collect(),
        }
    }

    pub fn f4() -> SmallField {
        let mut add = vec![0; 16];
        let mut mul = vec![0; 16];
        for a in 0..4usize {
            for b in 0..4usize {
                add[a * 4 + b] = (a ^ b) as u8;
                // carry-less product, then t² = t + 1
                let mut c = 0usize;
                for i in 0..2 {
                    if b >> i & 1 == 1 {
                        c ^= a << i;
                    }
                }
                if c & 4 != 0 {
                    c ^= 0b111;
                }
                mul[a * 4 + b] = c as u8;
            }
        }
        let mut f = SmallField {
            size: 4,
            add,
            mul,
            conj: vec![],
        };
        f.conj = (0..4u8).map(|x| f.mul(x, x)).collect();
        f
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn conj(&self, a: u8) -> u8 {
        self.conj[a as usize]
    }

    pub fn neg(&self, a: u8) -> u8 {
        (0..self.size as u8)
            .find(|&b| self.add(a, b) == 0)
            .expect("additive inverse")
    }

    /// Determinant of a row-major `n × n` matrix by cofactor expansion.
    pub fn det(&self, m: &[u8], n: usize) -> u8 {
        match n {
            1 => m[0],
            2 => self.add(self.mul(m[0], m[3]), self.neg(self.mul(m[1], m[2]))),
            _ => {
                let mut acc = 0u8;
                let mut minor = Vec::with_capacity((n - 1) * (n - 1));
                for c in 0..n {
                    minor.clear();
                    for r in 1..n {
                        for cc in 0..n {
                            if cc != c {
                                minor.push(m[r * n + cc]);
                            }
                        }
                    }
                    let t = self.mul(m[c], self.det(&minor, n - 1));
                    acc = self.add(acc, if c % 2 == 0 { t } else { self.neg(t) });
                }
                acc
            }
        }
    }

    /// Does `A* A = I` hold, with `A*` the conjugate transpose?
    pub fn is_unitary(&self, m: &[u8], n: usize) -> bool {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0u8;
                for k in 0..n {
                    s = self.add(s, self.mul(self.conj(m[k * n + i]), m[k * n + j]));
                }
                if s != (i == j) as u8 {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_is_a_field() {
        let f = SmallField::f4();
        for a in 1..4u8 {
            assert_eq!((1..4u8).filter(|&b| f.mul(a, b) == 1).count(), 1);
            // Frobenius fixes exactly F₂
            assert_eq!(f.conj(a) == a, a == 1);
        }
        // t·t = t + 1
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn determinants() {
        let f = SmallField::cyclic(5);
        assert_eq!(f.det(&[1, 2, 3, 4], 2), 3);
        assert_eq!(f.det(&[2, 0, 0, 0, 3, 0, 0, 0, 4], 3), 4);
    }
}
