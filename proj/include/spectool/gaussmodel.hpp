// Sum-of-Gaussians model and its analytic Jacobian, parameterized as
// [A_0, mu_0, sigma_0, A_1, mu_1, sigma_1, ...].
#pragma once

#include <cmath>
#include <span>

namespace spectool::gaussmodel {

inline double gauss(double amplitude, double center, double sigma, double x) {
    const double t = (x - center) / sigma;
    return amplitude * std::exp(-0.5 * t * t);
}

inline double multi_gauss_value(std::span<const double> params, double x) {
    double sum = 0.0;
    for (std::size_t k = 0; k + 2 < params.size(); k += 3)
        sum += gauss(params[k], params[k + 1], params[k + 2], x);
    return sum;
}

inline void multi_gauss_jacobian_row(std::span<const double> params, double x,
                                     std::span<double> out) {
    for (std::size_t k = 0; k + 2 < params.size(); k += 3) {
        const double a = params[k];
        const double mu = params[k + 1];
        const double s = params[k + 2];
        const double d = x - mu;
        const double e = std::exp(-0.5 * d * d / (s * s));
        out[k] = e;
        out[k + 1] = a * e * d / (s * s);
        out[k + 2] = a * e * d * d / (s * s * s);
    }
}

// FWHM of a Gaussian is 2*sqrt(2 ln 2) * sigma.
inline constexpr double kFwhmToSigma = 2.355;

}  // namespace spectool::gaussmodel
