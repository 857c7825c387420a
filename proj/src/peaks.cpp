#include "spectool/peaks.hpp"

#include "spectool/gaussmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spectool::peaks {

namespace {

// Indices whose value strictly exceeds everything within `window` on both
// sides (truncated at the boundary). Second member: window was truncated.
std::vector<std::pair<int, bool>> local_maxima(const std::vector<double>& v, int window) {
    const int n = static_cast<int>(v.size());
    std::vector<std::pair<int, bool>> out;
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - window);
        const int hi = std::min(n - 1, i + window);
        bool is_max = true;
        for (int j = lo; j <= hi && is_max; ++j)
            if (j != i && !(v[i] > v[j])) is_max = false;
        if (is_max) out.emplace_back(i, i - window < 0 || i + window > n - 1);
    }
    return out;
}

void check_window(const core::Spectrum& s, int window) {
    if (window < 1) throw std::invalid_argument("peak window must be >= 1");
    if (static_cast<std::size_t>(window) >= s.size())
        throw std::invalid_argument("peak window must be smaller than the data length");
}

}  // namespace

std::vector<int> find_minima(const core::Spectrum& spectrum, int window) {
    spectrum.validate();
    check_window(spectrum, window);
    std::vector<double> neg(spectrum.intensities.size());
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -spectrum.intensities[i];
    std::vector<int> out;
    for (auto [idx, edge] : local_maxima(neg, window)) out.push_back(idx);
    return out;
}

std::vector<PeakCandidate> preselect_peaks(const core::Spectrum& spectrum, int window) {
    spectrum.validate();
    if (spectrum.kind != core::IntensityKind::Normalized)
        throw std::invalid_argument("preselect_peaks: spectrum must be normalized");
    check_window(spectrum, window);

    const auto& axis = spectrum.axis;
    const int n = static_cast<int>(spectrum.size());
    const std::vector<int> minima = find_minima(spectrum, window);

    std::vector<PeakCandidate> out;
    for (auto [idx, edge] : local_maxima(spectrum.intensities, window)) {
        PeakCandidate c;
        c.index = idx;
        c.position = axis[idx];
        c.height = spectrum.intensities[idx];
        c.is_edge = edge;

        // nearest minimum on each side; data boundary when there is none
        double left = axis.front(), right = axis.back();
        for (int m : minima) {
            if (m < idx) left = axis[m];
            if (m > idx) { right = axis[m]; break; }
        }
        const int slo = std::max(idx - 1, 0), shi = std::min(idx + 1, n - 1);
        const double local_step = (axis[shi] - axis[slo]) / static_cast<double>(shi - slo);
        c.est_width = std::max(0.5 * (right - left), local_step);
        out.push_back(c);
    }
    return out;
}

PeakCandidate vet_peak(const core::Spectrum& spectrum, const PeakCandidate& candidate,
                       int window, const VetThresholds& thresholds,
                       const lsq::FitOptions& fit_options) {
    spectrum.validate();
    check_window(spectrum, window);
    PeakCandidate out = candidate;
    out.accepted = false;

    // Edge peaks are kept for the multi-Gaussian fit but never vetted in;
    // their position cannot be pinned down with confidence.
    if (candidate.is_edge) return out;

    const int n = static_cast<int>(spectrum.size());
    const int lo = std::max(0, candidate.index - window);
    const int hi = std::min(n - 1, candidate.index + window);

    lsq::FitProblem problem;
    problem.model = [](std::span<const double> p, double x) {
        return gaussmodel::gauss(p[0], p[1], p[2], x);
    };
    problem.jacobian = [](std::span<const double> p, double x, std::span<double> out_row) {
        gaussmodel::multi_gauss_jacobian_row(p, x, out_row);
    };
    problem.x_data.assign(spectrum.axis.begin() + lo, spectrum.axis.begin() + hi + 1);
    problem.y_data.assign(spectrum.intensities.begin() + lo, spectrum.intensities.begin() + hi + 1);
    // The fitted Gaussian must describe the neighborhood itself: center
    // inside the window, sigma at most the window span, amplitude near the
    // local data scale. Otherwise the far flank of a huge out-of-window
    // Gaussian can mimic a flat noise plateau and pass the height criterion.
    const double span = spectrum.axis[hi] - spectrum.axis[lo];
    const double window_max = *std::max_element(problem.y_data.begin(), problem.y_data.end());
    const double sigma0 =
        std::clamp(candidate.est_width / gaussmodel::kFwhmToSigma, 1e-6, std::max(span / 4.0, 1e-6));
    problem.initial_params = {candidate.height, candidate.position, sigma0};
    problem.bounds = {lsq::Bounds{0.0, std::max(1.5 * window_max, 1e-6)},
                      lsq::Bounds{spectrum.axis[lo], spectrum.axis[hi]},
                      lsq::Bounds{1e-6, std::max(span, 1e-6)}};
    problem.max_step = {0.5, span / 4.0, span / 2.0};

    lsq::FitResult fit;
    try {
        fit = lsq::fit(problem, fit_options);
    } catch (const std::exception&) {
        out.vet_residual_max = std::numeric_limits<double>::infinity();
        return out;
    }

    double max_resid = 0.0;
    for (double r : fit.residuals) max_resid = std::max(max_resid, std::abs(r));
    out.vet_residual_max = max_resid;
    out.vet_amplitude = fit.params[0];
    out.accepted = max_resid < thresholds.residual_max && fit.params[0] > thresholds.min_height;
    return out;
}

}  // namespace spectool::peaks
