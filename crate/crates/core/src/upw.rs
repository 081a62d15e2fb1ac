//! Ultimately periodic boolean words `stem · cycle^ω`, with exact pointwise
//! evaluation of the PLTL connectives.

/// Truth of one formula at every position of a lasso-shaped play.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Upw {
    pub stem: Vec<bool>,
    /// Nonempty.
    pub cycle: Vec<bool>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl Upw {
    pub fn new(stem: Vec<bool>, cycle: Vec<bool>) -> Self {
        assert!(!cycle.is_empty(), "cycle must be nonempty");
        Upw { stem, cycle }
    }

    pub fn constant(b: bool) -> Self {
        Upw { stem: Vec::new(), cycle: vec![b] }
    }

    pub fn at(&self, k: usize) -> bool {
        if k < self.stem.len() {
            self.stem[k]
        } else {
            self.cycle[(k - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Same word, written with the given stem length and cycle length. The
    /// stem length must be at least the current one and the cycle length a
    /// multiple of the current one.
    pub fn reshape(&self, stem_len: usize, cycle_len: usize) -> Upw {
        debug_assert!(stem_len >= self.stem.len() && cycle_len.is_multiple_of(self.cycle.len()));
        Upw {
            stem: (0..stem_len).map(|k| self.at(k)).collect(),
            cycle: (stem_len..stem_len + cycle_len).map(|k| self.at(k)).collect(),
        }
    }

    /// Smallest representation: primitive cycle, shortest stem.
    pub fn canonical(&self) -> Upw {
        let n = self.cycle.len();
        let period = (1..=n)
            .find(|d| n.is_multiple_of(*d) && (0..n).all(|i| self.cycle[i] == self.cycle[i % d]))
            .unwrap_or(n);
        let mut stem = self.stem.clone();
        let mut cycle = self.cycle[..period].to_vec();
        while let Some(&last) = stem.last() {
            if last != *cycle.last().unwrap() {
                break;
            }
            stem.pop();
            cycle.rotate_right(1);
        }
        Upw { stem, cycle }
    }

    fn align2(a: &Upw, b: &Upw) -> (Upw, Upw) {
        let s = a.stem.len().max(b.stem.len());
        let c = lcm(a.cycle.len(), b.cycle.len());
        (a.reshape(s, c), b.reshape(s, c))
    }

    fn zip(a: &Upw, b: &Upw, f: impl Fn(bool, bool) -> bool) -> Upw {
        let (a, b) = Self::align2(a, b);
        Upw {
            stem: a.stem.iter().zip(&b.stem).map(|(x, y)| f(*x, *y)).collect(),
            cycle: a.cycle.iter().zip(&b.cycle).map(|(x, y)| f(*x, *y)).collect(),
        }
    }

    pub fn not(&self) -> Upw {
        Upw {
            stem: self.stem.iter().map(|b| !b).collect(),
            cycle: self.cycle.iter().map(|b| !b).collect(),
        }
    }

    pub fn and(&self, o: &Upw) -> Upw {
        Self::zip(self, o, |x, y| x && y)
    }

    pub fn or(&self, o: &Upw) -> Upw {
        Self::zip(self, o, |x, y| x || y)
    }

    pub fn implies(&self, o: &Upw) -> Upw {
        Self::zip(self, o, |x, y| !x || y)
    }

    pub fn iff(&self, o: &Upw) -> Upw {
        Self::zip(self, o, |x, y| x == y)
    }

    /// Position `k` takes the value at `k + 1`.
    pub fn next(&self) -> Upw {
        if self.stem.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            Upw { stem: Vec::new(), cycle }
        } else {
            Upw { stem: self.stem[1..].to_vec(), cycle: self.cycle.clone() }
        }
    }

    /// Position `k > 0` takes the value at `k - 1`; position 0 is false.
    pub fn yesterday(&self) -> Upw {
        let mut stem = Vec::with_capacity(self.stem.len() + 1);
        stem.push(false);
        stem.extend_from_slice(&self.stem);
        Upw { stem, cycle: self.cycle.clone() }
    }

    /// Least fixpoint of `u = b | (a & X u)`.
    pub fn until(&self, b: &Upw) -> Upw {
        let (a, b) = Self::align2(self, b);
        let n = a.cycle.len();
        let mut cyc = vec![false; n];
        // A satisfying b anywhere on the cycle propagates backwards within
        // one lap; two laps settle every position.
        let mut carry = false;
        for _ in 0..2 {
            for i in (0..n).rev() {
                carry = b.cycle[i] || (a.cycle[i] && carry);
                cyc[i] = carry;
            }
        }
        let mut carry = cyc[0];
        let mut stem = vec![false; a.stem.len()];
        for i in (0..a.stem.len()).rev() {
            carry = b.stem[i] || (a.stem[i] && carry);
            stem[i] = carry;
        }
        Upw { stem, cycle: cyc }
    }

    /// `u(k) = b(k) | (a(k) & k > 0 & u(k-1))`.
    pub fn since(&self, b: &Upw) -> Upw {
        let (a, b) = Self::align2(self, b);
        let s = a.stem.len();
        let n = a.cycle.len();
        let mut out = Vec::with_capacity(s + 2 * n);
        let mut carry = false;
        for k in 0..s + 2 * n {
            carry = b.at(k) || (a.at(k) && carry);
            out.push(carry);
        }
        // The carried bit can only change monotonically from one lap to the
        // next, so the second lap is periodic.
        let cycle = out[s + n..].to_vec();
        out.truncate(s + n);
        Upw { stem: out, cycle }
    }

    pub fn eventually(&self) -> Upw {
        Upw::constant(true).until(self)
    }

    pub fn always(&self) -> Upw {
        self.not().eventually().not()
    }

    pub fn once(&self) -> Upw {
        Upw::constant(true).since(self)
    }

    pub fn historically(&self) -> Upw {
        self.not().once().not()
    }

    /// Expands the word to the first `len` positions.
    pub fn prefix(&self, len: usize) -> Vec<bool> {
        (0..len).map(|k| self.at(k)).collect()
    }
}
