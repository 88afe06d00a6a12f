//! Level-synchronous branch and prune. Each level is processed in parallel
//! and merged in order, so results do not depend on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::SearchConfig;
use crate::enclose::{Dyadic, IntervalBox};

pub(crate) struct Node {
    pub b: IntervalBox,
    pub depth: u32,
    /// Bisection path from the root, for per-box randomness.
    pub path: u64,
}

impl Node {
    pub fn rng(&self, seed: u64) -> ChaCha8Rng {
        let mix = self.path.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ u64::from(self.depth).rotate_left(48);
        ChaCha8Rng::seed_from_u64(seed ^ mix)
    }

    /// A point near the midpoint, moved by up to 1/16 of the width in
    /// each coordinate.
    pub fn jittered_center(&self, seed: u64) -> Vec<Dyadic> {
        let mut rng = self.rng(seed);
        self.b
            .coords()
            .iter()
            .map(|c| {
                let u: f64 = rng.gen_range(-1.0..1.0);
                let off = Dyadic::from_f64(u / 16.0).unwrap_or_else(Dyadic::zero);
                c.midpoint().add(&c.width().mul(&off)).round(64, crate::enclose::Round::Nearest)
            })
            .collect()
    }
}

pub(crate) enum Step<T> {
    /// No solution in the box.
    Excluded,
    /// The box is settled and yields `T`; keep searching elsewhere.
    Covered(T),
    /// A solution; stop the search.
    Found(T),
    Undecided,
}

pub(crate) struct Exploration<T> {
    pub excluded: Vec<IntervalBox>,
    pub covered: Vec<(IntervalBox, T)>,
    pub found: Option<(IntervalBox, T)>,
    pub unknown: Vec<IntervalBox>,
    pub processed: usize,
}

/// Coordinate of largest width relative to the region, lowest index on
/// ties; `None` when every coordinate is a point.
fn split_coordinate(b: &IntervalBox, region_widths: &[Dyadic]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in 0..b.dim() {
        let w = b.coord(i).width();
        if w.is_zero() {
            continue;
        }
        let r = &region_widths[i];
        best = match best {
            None => Some(i),
            // w_i / r_i > w_b / r_b, with zero-width region coordinates
            // ranked by absolute width
            Some(j) => {
                let wj = b.coord(j).width();
                let rj = &region_widths[j];
                let better = if r.is_zero() || rj.is_zero() { w > wj } else { w.mul(rj) > wj.mul(r) };
                if better {
                    Some(i)
                } else {
                    Some(j)
                }
            }
        };
    }
    best
}

/// Whether every coordinate is narrower than a quarter of the region.
fn is_small(b: &IntervalBox, region_widths: &[Dyadic]) -> bool {
    b.coords()
        .iter()
        .zip(region_widths)
        .all(|(c, r)| c.width().mul_pow2(2) < *r || r.is_zero())
}

pub(crate) fn explore<T, F>(region: &IntervalBox, cfg: &SearchConfig, process: F) -> Exploration<T>
where
    T: Send,
    F: Fn(&Node, bool) -> Step<T> + Sync,
{
    let widths: Vec<Dyadic> = region.coords().iter().map(|c| c.width()).collect();
    let mut out = Exploration {
        excluded: Vec::new(),
        covered: Vec::new(),
        found: None,
        unknown: Vec::new(),
        processed: 0,
    };
    let mut level = vec![Node {
        b: region.clone(),
        depth: 0,
        path: 1,
    }];
    while !level.is_empty() {
        if out.processed + level.len() > cfg.max_boxes {
            out.unknown.extend(level.into_iter().map(|n| n.b));
            break;
        }
        out.processed += level.len();
        let steps: Vec<Step<T>> = level.par_iter().map(|n| process(n, is_small(&n.b, &widths))).collect();
        let mut next = Vec::new();
        for (node, step) in level.into_iter().zip(steps) {
            match step {
                Step::Excluded => out.excluded.push(node.b),
                Step::Covered(t) => out.covered.push((node.b, t)),
                Step::Found(t) if out.found.is_none() => out.found = Some((node.b, t)),
                Step::Found(_) => out.unknown.push(node.b),
                Step::Undecided => match split_coordinate(&node.b, &widths) {
                    Some(i) if node.depth < cfg.max_depth => {
                        let (a, b) = node.b.bisect(i);
                        let path = node.path.wrapping_mul(2);
                        next.push(Node {
                            b: a,
                            depth: node.depth + 1,
                            path,
                        });
                        next.push(Node {
                            b,
                            depth: node.depth + 1,
                            path: path.wrapping_add(1),
                        });
                    }
                    _ => out.unknown.push(node.b),
                },
            }
        }
        if out.found.is_some() {
            out.unknown.extend(next.into_iter().map(|n| n.b));
            break;
        }
        level = next;
    }
    out
}
