//! Enumeration of tuples of sections, exhaustively or layer by layer.
//!
//! Writing x = y + t^m z with y of order m-1, one has
//! F(x) = F(y) + t^m (z . grad F(y mod t)) mod t^{m+1}, which is affine in
//! z. The layered routines enumerate y and handle z by linear algebra.

use crate::arith::field::PrimeField;
use crate::arith::linalg;
use crate::geometry::form::{eval_terms_raw, ProductScratch, SymmetricForm};
use crate::sections::{digits, globally_generates_polys};
use rayon::prelude::*;

/// Positions of a tuple in P_{e,m}^{n+1}, flattened section by section.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TupleLayout {
    pub n1: usize,
    pub e: usize,
    pub m: usize,
}

impl TupleLayout {
    pub fn new(n1: usize, e: usize, m: usize) -> Self {
        TupleLayout { n1, e, m }
    }

    pub fn width(&self) -> usize {
        (self.e + 1) * (self.m + 1)
    }

    pub fn len(&self) -> usize {
        self.n1 * self.width()
    }

    pub fn pos(&self, j: usize, layer: usize, a: usize) -> usize {
        j * self.width() + layer * (self.e + 1) + a
    }

    pub fn positions(&self, layers: std::ops::Range<usize>) -> Vec<usize> {
        let mut v = Vec::new();
        for j in 0..self.n1 {
            for l in layers.clone() {
                for a in 0..=self.e {
                    v.push(self.pos(j, l, a));
                }
            }
        }
        v
    }

    pub fn sections<'a>(&self, buf: &'a [u32]) -> Vec<&'a [u32]> {
        (0..self.n1).map(|j| &buf[j * self.width()..(j + 1) * self.width()]).collect()
    }

    pub fn layer0<'a>(&self, buf: &'a [u32]) -> Vec<&'a [u32]> {
        (0..self.n1).map(|j| &buf[j * self.width()..j * self.width() + self.e + 1]).collect()
    }
}

/// Odometer step over the given positions; false once it wraps to zero.
#[inline]
pub(crate) fn advance(buf: &mut [u32], positions: &[usize], p: u32) -> bool {
    for &pos in positions {
        buf[pos] += 1;
        if buf[pos] < p {
            return true;
        }
        buf[pos] = 0;
    }
    false
}

pub(crate) fn upow(p: u32, k: usize) -> u64 {
    (p as u64).pow(k as u32)
}

/// The linear map z -> z . grad F(y0) from P_e^{n+1} to P_{de}, for a
/// point y0 of P_e^{n+1} (the reduction mod t of a tuple).
#[derive(Debug, Clone)]
pub(crate) struct LinearPart {
    /// Images of the basis vectors x^a e_j, in order (j, a).
    pub cols: Vec<Vec<u32>>,
    /// Reduced echelon basis of the image.
    pub image: Vec<Vec<u32>>,
    pub pivots: Vec<usize>,
    pub kernel_dim: usize,
}

impl LinearPart {
    pub fn new(form: &SymmetricForm, y0: &[&[u32]], e: usize) -> Self {
        let f = form.field;
        let r = (form.d - 1) * e;
        let de = form.d * e;
        let mut scratch = ProductScratch::new(form.d, e, 0);
        let grads: Vec<Vec<u32>> = (0..=form.n)
            .map(|j| {
                let mut out = vec![0u32; r + 1];
                eval_terms_raw(&f, form.grad_terms(j), form.d - 1, y0, e, 0, &mut out, &mut scratch);
                out
            })
            .collect();
        let mut cols = Vec::with_capacity(grads.len() * (e + 1));
        for g in &grads {
            for a in 0..=e {
                let mut v = vec![0u32; de + 1];
                v[a..a + r + 1].copy_from_slice(g);
                cols.push(v);
            }
        }
        let mut image = cols.clone();
        let pivots = linalg::rref(&f, &mut image);
        let kernel_dim = cols.len() - pivots.len();
        LinearPart { cols, image, pivots, kernel_dim }
    }

    pub fn contains(&self, f: &PrimeField, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        linalg::reduce_against(f, &self.image, &self.pivots, &mut w);
        w.iter().all(|&c| c == 0)
    }
}

/// Shared per-run state for evaluating F on tuples.
pub(crate) struct Evaluator<'a> {
    pub form: &'a SymmetricForm,
    pub layout: TupleLayout,
    scratch: ProductScratch,
    pub out: Vec<u32>,
}

impl<'a> Evaluator<'a> {
    pub fn new(form: &'a SymmetricForm, layout: TupleLayout) -> Self {
        Evaluator {
            form,
            layout,
            scratch: ProductScratch::new(form.d, layout.e, layout.m),
            out: vec![0; (form.d * layout.e + 1) * (layout.m + 1)],
        }
    }

    /// Writes F(x) into `self.out`.
    pub fn eval(&mut self, buf: &[u32]) {
        let xs = self.layout.sections(buf);
        eval_terms_raw(
            &self.form.field,
            self.form.mono_terms(),
            self.form.d,
            &xs,
            self.layout.e,
            self.layout.m,
            &mut self.out,
            &mut self.scratch,
        );
    }

    pub fn is_gg(&self, buf: &[u32]) -> bool {
        globally_generates_polys(&self.form.field, &self.layout.layer0(buf), self.layout.e)
    }
}

/// Runs `visit` over every globally generating y0 in P_e^{n+1} (in
/// parallel shards), handing it a tuple buffer for P_{e,m}^{n+1} whose
/// layer 0 is y0 and whose other layers are zero. Results are combined with
/// `combine` in shard order, so the outcome is deterministic.
pub(crate) fn over_gg_base<T, V, C>(
    form: &SymmetricForm,
    layout: TupleLayout,
    init: impl Fn() -> T + Sync + Send,
    visit: V,
    combine: C,
) -> T
where
    T: Send,
    V: Fn(&mut T, &mut Vec<u32>) + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    let p = form.field.p();
    let n_base = layout.n1 * (layout.e + 1);
    let total = upow(p, n_base);
    let base_positions = layout.positions(0..1);
    (0..total)
        .into_par_iter()
        .fold(&init, |mut acc, idx| {
            let mut buf = vec![0u32; layout.len()];
            for (pos, d) in base_positions.iter().zip(digits(p, idx, n_base)) {
                buf[*pos] = d;
            }
            if globally_generates_polys(&form.field, &layout.layer0(&buf), layout.e) {
                visit(&mut acc, &mut buf);
            }
            acc
        })
        .reduce(&init, combine)
}

/// Runs `visit` over every tuple in P_{e,m}^{n+1} (sharded on the first
/// section), globally generating or not.
pub(crate) fn over_all_tuples<T, V, C>(
    p: u32,
    layout: TupleLayout,
    init: impl Fn() -> T + Sync + Send,
    visit: V,
    combine: C,
) -> T
where
    T: Send,
    V: Fn(&mut T, &[u32]) + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    let w = layout.width();
    let shards = upow(p, w);
    let inner: Vec<usize> = (w..layout.len()).collect();
    (0..shards)
        .into_par_iter()
        .fold(&init, |mut acc, idx| {
            let mut buf = vec![0u32; layout.len()];
            buf[..w].copy_from_slice(&digits(p, idx, w));
            loop {
                visit(&mut acc, &buf);
                if !advance(&mut buf, &inner, p) {
                    break;
                }
            }
            acc
        })
        .reduce(&init, combine)
}
