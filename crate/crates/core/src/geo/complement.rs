//! Decomposition of the space outside a union of closed boxes into
//! axis-parallel rectangles, by an axis-by-axis sweep.
//!
//! On each axis the box endpoints cut the line into half-open elementary
//! intervals; a slab crossed by no box is emitted whole, otherwise the sweep
//! continues on the next axis with the boxes that span the slab. Emitted
//! cells are pairwise disjoint and there are at most `(2k+1)^d` of them.

use crate::instance::{Bound, Rect};

/// Half-open interval `[lo, hi)`; `None` stands for the infinite end.
type Span = (Option<f64>, Option<f64>);

fn closed(span: Span) -> (Bound, Bound) {
    let lo = span.0.map_or(Bound::NegInf, Bound::Finite);
    let hi = span.1.map_or(Bound::PosInf, |h| Bound::Finite(h.next_down()));
    (lo, hi)
}

fn to_rect(prefix: &[Span], d: usize) -> Rect {
    let mut lo = Vec::with_capacity(d);
    let mut hi = Vec::with_capacity(d);
    for a in 0..d {
        let (l, h) = prefix.get(a).map_or((Bound::NegInf, Bound::PosInf), |&s| closed(s));
        lo.push(l);
        hi.push(h);
    }
    Rect::new(lo, hi)
}

/// Half-open span of a closed finite box on axis `a`.
fn box_span(b: &Rect, a: usize) -> (f64, f64) {
    let (lo, hi) = b.interval(a);
    (lo, hi.next_up())
}

fn sweep(boxes: &[&Rect], active: &[usize], a: usize, d: usize, prefix: &mut Vec<Span>, free: &mut Vec<Rect>, covered: &mut Vec<Rect>) {
    let mut cuts: Vec<f64> = active.iter().flat_map(|&i| {
        let (l, h) = box_span(boxes[i], a);
        [l, h]
    }).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut spans: Vec<Span> = Vec::with_capacity(cuts.len() + 1);
    spans.push((None, Some(cuts[0])));
    for w in cuts.windows(2) {
        spans.push((Some(w[0]), Some(w[1])));
    }
    spans.push((Some(*cuts.last().unwrap()), None));
    for span in spans {
        let inside: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&i| {
                let (l, h) = box_span(boxes[i], a);
                matches!(span, (Some(s), Some(e)) if l <= s && e <= h)
            })
            .collect();
        prefix.push(span);
        if inside.is_empty() {
            free.push(to_rect(prefix, d));
        } else if a + 1 == d {
            covered.push(to_rect(prefix, d));
        } else {
            sweep(boxes, &inside, a + 1, d, prefix, free, covered);
        }
        prefix.pop();
    }
}

/// Splits space into cells outside every box and cells inside some box.
/// Both lists consist of closed rectangles whose discrete contents are
/// pairwise disjoint and together cover every point of `R^d`.
pub fn cube_partition(boxes: &[Rect]) -> (Vec<Rect>, Vec<Rect>) {
    assert!(!boxes.is_empty(), "need at least one box");
    let d = boxes[0].dim();
    let refs: Vec<&Rect> = boxes.iter().collect();
    let all: Vec<usize> = (0..boxes.len()).collect();
    let (mut free, mut covered) = (Vec::new(), Vec::new());
    sweep(&refs, &all, 0, d, &mut Vec::with_capacity(d), &mut free, &mut covered);
    (free, covered)
}

/// Rectangles covering exactly the points outside every box.
pub fn cube_complement(boxes: &[Rect]) -> Vec<Rect> {
    cube_partition(boxes).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_leaves_two_rays() {
        let c = cube_complement(&[Rect::from_f64(&[1.0], &[3.0])]);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].lo[0], Bound::NegInf);
        assert_eq!(c[0].hi[0], Bound::Finite(1.0f64.next_down()));
        assert_eq!(c[1].lo[0], Bound::Finite(3.0f64.next_up()));
        assert_eq!(c[1].hi[0], Bound::PosInf);
    }

    #[test]
    fn square_leaves_four_slabs() {
        let c = cube_complement(&[Rect::cube(&[0.0, 0.0], 1.0)]);
        assert_eq!(c.len(), 4);
        assert!(!c.iter().any(|r| r.contains(&[0.0, 0.0])));
        assert!(c.iter().filter(|r| r.contains(&[5.0, 0.0])).count() == 1);
    }
}
