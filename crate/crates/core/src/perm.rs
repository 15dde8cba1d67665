//! Permutations of four points.

use std::fmt;

/// A bijection of {0,1,2,3}, stored as its image list.
///
/// Printed 1-based in one-line notation, `[i1 i2 i3 i4]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm4([u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);
    /// The order-reversing permutation.
    pub const REVERSAL: Perm4 = Perm4([3, 2, 1, 0]);

    /// Builds a permutation from 0-based images; `None` unless bijective.
    pub fn from_images(images: [u8; 4]) -> Option<Self> {
        let mut seen = [false; 4];
        for &i in &images {
            if i > 3 || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm4(images))
    }

    /// The transposition of the adjacent points `i` and `i + 1` (0-based).
    pub fn adjacent(i: usize) -> Self {
        assert!(i < 3);
        let mut p = [0, 1, 2, 3];
        p.swap(i, i + 1);
        Perm4(p)
    }

    /// A transposition of two 1-based points.
    pub fn transposition(i: u8, j: u8) -> Self {
        let mut p = [0, 1, 2, 3];
        p.swap(usize::from(i - 1), usize::from(j - 1));
        Perm4(p)
    }

    pub fn all() -> impl Iterator<Item = Perm4> {
        (0..24usize).map(|mut n| {
            let mut pool = vec![0u8, 1, 2, 3];
            let mut out = [0u8; 4];
            for (slot, radix) in out.iter_mut().zip([6usize, 2, 1, 1]) {
                *slot = pool.remove(n / radix);
                n %= radix;
            }
            Perm4(out)
        })
    }

    pub fn images(self) -> [u8; 4] {
        self.0
    }

    pub fn apply(self, i: u8) -> u8 {
        self.0[i as usize]
    }

    /// Function composition: `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(self, other: Perm4) -> Perm4 {
        Perm4(other.0.map(|i| self.0[i as usize]))
    }

    pub fn inverse(self) -> Perm4 {
        let mut out = [0u8; 4];
        for (i, &j) in self.0.iter().enumerate() {
            out[j as usize] = i as u8;
        }
        Perm4(out)
    }

    /// Number of inversions, the Coxeter length.
    pub fn length(self) -> u32 {
        let mut n = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    n += 1;
                }
            }
        }
        n
    }

    /// Bitmask of `i` with `self(i) > self(i+1)`.
    pub fn right_descents(self) -> u8 {
        (0..3).filter(|&i| self.0[i] > self.0[i + 1]).fold(0, |m, i| m | 1 << i)
    }

    pub fn left_descents(self) -> u8 {
        self.inverse().right_descents()
    }

    pub fn fixed_points(self) -> Vec<u8> {
        (0..4).filter(|&i| self.0[i as usize] == i).collect()
    }

    pub fn order(self) -> u32 {
        let mut p = self;
        let mut k = 1;
        while p != Perm4::IDENTITY {
            p = p.compose(self);
            k += 1;
        }
        k
    }

    /// Cycle lengths, sorted descending, fixed points included.
    pub fn cycle_type(self) -> Vec<usize> {
        cycle_type(&self.0.map(usize::from))
    }

    /// Disjoint-cycle notation, 1-based, e.g. `(1 3 2)`; `()` for identity.
    pub fn cycles_string(self) -> String {
        let mut seen = [false; 4];
        let mut out = String::new();
        for start in 0..4u8 {
            if seen[start as usize] || self.apply(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start as usize] = true;
            let mut j = self.apply(start);
            while j != start {
                seen[j as usize] = true;
                cycle.push(j);
                j = self.apply(j);
            }
            let body: Vec<String> = cycle.iter().map(|c| (c + 1).to_string()).collect();
            out.push_str(&format!("({})", body.join(" ")));
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// Cycle type of an arbitrary permutation given by its image list.
pub fn cycle_type(images: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; images.len()];
    let mut lens = Vec::new();
    for s in 0..images.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut j = s;
        while !seen[j] {
            seen[j] = true;
            j = images[j];
            len += 1;
        }
        lens.push(len);
    }
    lens.sort_unstable_by(|a, b| b.cmp(a));
    lens
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0.map(|i| i + 1);
        write!(f, "[{a} {b} {c} {d}]")
    }
}
