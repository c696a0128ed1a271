//! Linear algebra over F2 on bit-packed vectors (at most 64 coordinates).

/// An echelon basis of a subspace of F2^n, n <= 64.
#[derive(Debug, Clone, Default)]
pub struct EchelonBasis {
    // (pivot bit, reduced vector)
    rows: Vec<(u32, u64)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reduce(&self, mut v: u64) -> u64 {
        for &(piv, row) in &self.rows {
            if v >> piv & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    /// Inserts `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let piv = 63 - r.leading_zeros();
        for (_, row) in self.rows.iter_mut() {
            if *row >> piv & 1 == 1 {
                *row ^= r;
            }
        }
        self.rows.push((piv, r));
        self.rows.sort_by(|a, b| b.0.cmp(&a.0));
        true
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Rank over F2 of a matrix given by bit-packed rows.
pub fn rank(rows: &[u64]) -> usize {
    let mut b = EchelonBasis::new();
    rows.iter().filter(|&&r| b.insert(r)).count()
}

/// An echelon basis that remembers each row as a combination of the
/// independent vectors inserted so far (bit i = i-th accepted vector).
#[derive(Debug, Clone, Default)]
pub struct TrackedBasis {
    rows: Vec<(u32, u64, u64)>,
    accepted: u32,
}

impl TrackedBasis {
    pub fn new() -> Self {
        Self::default()
    }

    fn reduce(&self, mut v: u64) -> (u64, u64) {
        let mut combo = 0u64;
        for &(piv, row, c) in &self.rows {
            if v >> piv & 1 == 1 {
                v ^= row;
                combo ^= c;
            }
        }
        (v, combo)
    }

    /// Inserts `v`; returns its index among accepted vectors, or `None` if
    /// it was dependent.
    pub fn insert(&mut self, v: u64) -> Option<usize> {
        let (r, combo) = self.reduce(v);
        if r == 0 {
            return None;
        }
        assert!(self.accepted < 64, "at most 64 generators");
        let idx = self.accepted;
        self.accepted += 1;
        let piv = 63 - r.leading_zeros();
        let c = combo ^ (1u64 << idx);
        for (_, row, rc) in self.rows.iter_mut() {
            if *row >> piv & 1 == 1 {
                *row ^= r;
                *rc ^= c;
            }
        }
        self.rows.push((piv, r, c));
        self.rows.sort_by(|a, b| b.0.cmp(&a.0));
        Some(idx as usize)
    }

    /// Coordinates of `v` in the accepted vectors, if `v` is in their span.
    pub fn express(&self, v: u64) -> Option<u64> {
        let (r, combo) = self.reduce(v);
        (r == 0).then_some(combo)
    }

    pub fn dim(&self) -> usize {
        self.accepted as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_small() {
        assert_eq!(rank(&[0b011, 0b110, 0b101]), 2);
        assert_eq!(rank(&[0b01, 0b10]), 2);
        assert_eq!(rank(&[0, 0]), 0);
    }

    #[test]
    fn basis_span() {
        let mut b = EchelonBasis::new();
        assert!(b.insert(0b1100));
        assert!(b.insert(0b0110));
        assert!(!b.insert(0b1010));
        assert!(b.contains(0b1010));
        assert!(!b.contains(0b0001));
        assert_eq!(b.dim(), 2);
    }

    #[test]
    fn tracked_coordinates() {
        let gens = [0b1100u64, 0b0110, 0b1010, 0b0001];
        let mut b = TrackedBasis::new();
        let idx: Vec<_> = gens.iter().map(|&g| b.insert(g)).collect();
        assert_eq!(idx, vec![Some(0), Some(1), None, Some(2)]);
        // 0b1011 = 0b1100 ^ 0b0110 ^ 0b0001
        assert_eq!(b.express(0b1011), Some(0b111));
        assert_eq!(b.express(0b1010), Some(0b011));
        assert_eq!(b.express(0b10000), None);
    }
}
