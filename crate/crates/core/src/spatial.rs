//! Uniform-grid hashing for Korányi-ball queries.
//!
//! `d_K(p, q) ≤ ε` forces `|z − z′| ≤ ε` and
//! `|t − t′| ≤ ε² + 2|ω(z, z′)| ≤ ε² + 2Rε` with `R = max |z|`, so bucketing
//! on up to two `z` coordinates (width `ε`) and on `t` (width `ε² + 2Rε`)
//! puts every ε-neighbour in one of the `3ᵈ` adjacent cells. With `ε = 0` the
//! hash degenerates to exact coordinate equality.

use std::collections::HashMap;

/// Points stored as flat rows of `2n + 1` coordinates.
pub struct KoranyiHash<'a> {
    data: &'a [f64],
    stride: usize,
    eps: f64,
    z_dims: usize,
    widths: [f64; 3],
    cells: HashMap<[i64; 3], Vec<usize>>,
    exact: HashMap<Vec<u64>, Vec<usize>>,
}

impl<'a> KoranyiHash<'a> {
    pub fn new(data: &'a [f64], stride: usize, eps: f64) -> Self {
        assert!(stride >= 3 && data.len().is_multiple_of(stride));
        assert!(eps >= 0.0 && eps.is_finite());
        let count = data.len() / stride;
        let z_dims = (stride - 1).min(2);
        let mut h = KoranyiHash {
            data,
            stride,
            eps,
            z_dims,
            widths: [eps; 3],
            cells: HashMap::new(),
            exact: HashMap::new(),
        };
        if eps == 0.0 {
            for i in 0..count {
                h.exact.entry(h.bits(i)).or_default().push(i);
            }
            return h;
        }
        let r = (0..count)
            .map(|i| {
                h.row(i)[..stride - 1]
                    .iter()
                    .map(|c| c * c)
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        h.widths[z_dims] = eps * eps + 2.0 * r * eps;
        for i in 0..count {
            let key = h.key(h.row(i));
            h.cells.entry(key).or_default().push(i);
        }
        h
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.stride
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    fn bits(&self, i: usize) -> Vec<u64> {
        // Normalize -0.0 so that equal coordinates share a bucket.
        self.row(i).iter().map(|c| (c + 0.0).to_bits()).collect()
    }

    fn key(&self, p: &[f64]) -> [i64; 3] {
        let mut k = [0i64; 3];
        for (d, slot) in k.iter_mut().enumerate().take(self.z_dims + 1) {
            let c = if d < self.z_dims { p[d] } else { p[self.stride - 1] };
            *slot = (c / self.widths[d]).floor() as i64;
        }
        k
    }

    /// Indices of stored points that may lie within `eps` of point `i`,
    /// in ascending order. Always includes every true ε-neighbour.
    pub fn candidates(&self, i: usize) -> Vec<usize> {
        if self.eps == 0.0 {
            return self.exact.get(&self.bits(i)).cloned().unwrap_or_default();
        }
        let base = self.key(self.row(i));
        let dims = self.z_dims + 1;
        let mut out = Vec::new();
        for code in 0..3usize.pow(dims as u32) {
            let mut key = base;
            let mut c = code;
            for slot in key.iter_mut().take(dims) {
                *slot += (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(v) = self.cells.get(&key) {
                out.extend_from_slice(v);
            }
        }
        out.sort_unstable();
        out
    }
}
