#pragma once

namespace wpn {

// log I_0(x) for x >= 0, valid for arguments far beyond where I_0 overflows.
double log_bessel_i0(double x);
// log I_0(x) - |x|, free of cancellation for large x.
double log_bessel_i0_scaled(double x);

// log of the Rice density of |R + w|, w ~ CN(0, 2 sigma_w^2), at r > 0.
double log_rice_pdf(double r, double r_in, double sigma_w_sq);

// log of the complex density of y = R e^{j theta} + w with theta uniform and
// w ~ CN(0, 2 sigma_w^2), as a function of |y|:
//   (1 / (2 pi sigma_w^2)) exp(-(|y|^2 + R^2) / (2 sigma_w^2)) I0(|y| R / sigma_w^2)
double log_phase_averaged_emission(double y_abs, double r_in, double sigma_w_sq);

}  // namespace wpn
