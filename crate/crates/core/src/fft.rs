//! Plan cache and the centered-lattice transforms shared by every module.
//!
//! Position samples live at `x_j = -L/2 + j dx`, frequency samples at
//! `k_m = dk (m - n/2)`. With `q = m - n/2` the continuous-convention
//! transform reduces to
//!
//! ```text
//! fhat_m = dx/sqrt(2pi) (-1)^q DFT[(-1)^j f_j](m)
//! f_j    = dk/sqrt(2pi) (-1)^j IDFT[(-1)^q fhat_m](j)
//! ```
//!
//! where DFT/IDFT are the unnormalized FFTs.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);
type Cache = Mutex<(FftPlanner<f64>, HashMap<usize, Plans>)>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())))
}

pub(crate) fn plans(len: usize) -> Plans {
    let mut guard = cache().lock().expect("fft plan cache poisoned");
    let (planner, map) = &mut *guard;
    if let Some(p) = map.get(&len) {
        return p.clone();
    }
    let p = (planner.plan_fft_forward(len), planner.plan_fft_inverse(len));
    map.insert(len, p.clone());
    p
}

#[inline]
pub(crate) fn sign(i: usize) -> f64 {
    if i.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sign `(-1)^q` for `q = m - n/2`.
#[inline]
pub(crate) fn centered_sign(m: usize, n: usize) -> f64 {
    sign(m) * sign(n / 2)
}

/// Position samples to centered frequency samples.
pub(crate) fn forward(values: &[Complex64], dx: f64) -> Vec<Complex64> {
    let n = values.len();
    let (fwd, _) = plans(n);
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(j, v)| v * sign(j))
        .collect();
    fwd.process(&mut buf);
    let scale = dx / (2.0 * PI).sqrt();
    for (m, v) in buf.iter_mut().enumerate() {
        *v *= scale * centered_sign(m, n);
    }
    buf
}

/// Centered frequency samples to position samples.
pub(crate) fn inverse(values: &[Complex64], dk: f64) -> Vec<Complex64> {
    let n = values.len();
    let (_, inv) = plans(n);
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(m, v)| v * centered_sign(m, n))
        .collect();
    inv.process(&mut buf);
    let scale = dk / (2.0 * PI).sqrt();
    for (j, v) in buf.iter_mut().enumerate() {
        *v *= scale * sign(j);
    }
    buf
}

/// Pairwise (tree) summation; fixed order regardless of thread count.
pub(crate) fn pairwise_sum<T>(items: &[T]) -> T
where
    T: Copy + std::ops::Add<Output = T> + Default,
{
    match items.len() {
        0 => T::default(),
        1 => items[0],
        len => {
            let mid = len / 2;
            pairwise_sum(&items[..mid]) + pairwise_sum(&items[mid..])
        }
    }
}

/// Elementwise pairwise summation of equally sized vectors.
pub(crate) fn pairwise_sum_vecs(items: &[Vec<Complex64>]) -> Vec<Complex64> {
    match items.len() {
        0 => Vec::new(),
        1 => items[0].clone(),
        len => {
            let mid = len / 2;
            let mut a = pairwise_sum_vecs(&items[..mid]);
            let b = pairwise_sum_vecs(&items[mid..]);
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        }
    }
}
