use crate::function_set::BoolFn;

/// A compressed truth-table column: one bit per row, packed into 64-bit
/// lanes. Bits beyond `rows` are kept zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitWord {
    rows: usize,
    lanes: Vec<u64>,
}

impl BitWord {
    pub fn zeros(rows: usize) -> Self {
        let n = rows.div_ceil(64).max(1);
        BitWord {
            rows,
            lanes: vec![0; n],
        }
    }

    pub fn from_fn(rows: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut w = BitWord::zeros(rows);
        for r in 0..rows {
            if f(r) {
                w.lanes[r / 64] |= 1u64 << (r % 64);
            }
        }
        w
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn get(&self, row: usize) -> bool {
        debug_assert!(row < self.rows);
        (self.lanes[row / 64] >> (row % 64)) & 1 == 1
    }

    pub fn apply(op: BoolFn, a: &BitWord, b: &BitWord) -> BitWord {
        debug_assert_eq!(a.rows, b.rows);
        let mut out = BitWord {
            rows: a.rows,
            lanes: a
                .lanes
                .iter()
                .zip(&b.lanes)
                .map(|(&x, &y)| op.apply(x, y))
                .collect(),
        };
        out.mask_tail();
        out
    }

    pub fn xor(&self, other: &BitWord) -> BitWord {
        BitWord::apply(BoolFn::Xor, self, other)
    }

    /// Number of set bits among the valid rows.
    pub fn count_ones(&self) -> u32 {
        self.lanes.iter().map(|l| l.count_ones()).sum()
    }

    fn mask_tail(&mut self) {
        let rem = self.rows % 64;
        if rem != 0 {
            *self.lanes.last_mut().unwrap() &= (1u64 << rem) - 1;
        }
    }
}
