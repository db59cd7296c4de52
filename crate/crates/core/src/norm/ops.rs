//! Translation operators on a truncated Cayley ball, shared by the power
//! iteration lower bound and the Frank-Wolfe gradient oracle.

use rayon::prelude::*;

use crate::group::{Ball, GroupDescriptor, Word};

const NONE: u32 = u32::MAX;
const CHUNK: usize = 4096;

/// Gather maps `map[k][j] = index(g_k⁻¹ · w_j)` for a fixed list of words `g_k`,
/// so that `(Σ c_k λ(g_k) ξ)(w_j) = Σ c_k ξ[map[k][j]]` exactly for `w_j` in the ball
/// whenever `ξ` is supported in the ball.
pub struct TranslationMaps {
    ball: Ball,
    maps: Vec<Vec<u32>>,
}

impl TranslationMaps {
    pub fn new(group: &GroupDescriptor, ball: Ball, words: &[Word]) -> Self {
        let maps = words
            .iter()
            .map(|g| {
                let ginv = g.inverse();
                if ginv.len() > 2 * ball.radius() {
                    return vec![NONE; ball.len()];
                }
                ball.words()
                    .par_iter()
                    .map(|w| {
                        if ginv.len() > ball.radius() + w.len() {
                            return NONE;
                        }
                        let y = group.mul_unchecked(&ginv, w);
                        ball.index_of(&y).map_or(NONE, |i| i as u32)
                    })
                    .collect()
            })
            .collect();
        TranslationMaps { ball, maps }
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn dim(&self) -> usize {
        self.ball.len()
    }

    /// `out = P_ball (Σ_k coeffs[k] λ(g_k)) xi`, restricted to the maps in `which`.
    pub fn apply(&self, which: &[usize], coeffs: &[f64], xi: &[f64], out: &mut [f64]) {
        debug_assert_eq!(which.len(), coeffs.len());
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = c * CHUNK;
            for (off, o) in chunk.iter_mut().enumerate() {
                let j = base + off;
                let mut s = 0.0;
                for (&k, &ck) in which.iter().zip(coeffs) {
                    let i = self.maps[k][j];
                    if i != NONE {
                        s += ck * xi[i as usize];
                    }
                }
                *o = s;
            }
        });
    }

    /// `⟨λ(g_k) ξ, η⟩` restricted to the ball.
    pub fn pairing(&self, k: usize, xi: &[f64], eta: &[f64]) -> f64 {
        let map = &self.maps[k];
        let partial: Vec<f64> = (0..map.len())
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|idx| {
                idx.iter()
                    .map(|&j| {
                        let i = map[j];
                        if i == NONE {
                            0.0
                        } else {
                            xi[i as usize] * eta[j]
                        }
                    })
                    .sum::<f64>()
            })
            .collect();
        partial.iter().sum()
    }
}

/// Dot product with a reduction order independent of the thread count.
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    let partial: Vec<f64> = x
        .par_chunks(CHUNK)
        .zip(y.par_chunks(CHUNK))
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

pub fn normalize(x: &mut [f64]) -> f64 {
    let n = dot(x, x).sqrt();
    if n > 0.0 {
        x.par_iter_mut().for_each(|v| *v /= n);
    }
    n
}
