use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized forward transform, `X_m = Σ_j x_j e^{-2πi jm/n}`.
pub(crate) fn forward(buf: &mut [Complex64]) {
    if buf.len() < 2 {
        return;
    }
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    plan.process(buf);
}

/// Unnormalized inverse transform, `x_j = Σ_m X_m e^{2πi jm/n}`.
pub(crate) fn inverse(buf: &mut [Complex64]) {
    if buf.len() < 2 {
        return;
    }
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    plan.process(buf);
}

/// Signed frequency index of FFT bin `m` on `n` points. The Nyquist bin maps to `+n/2`.
pub(crate) fn signed_index(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}
