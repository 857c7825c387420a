#include "spectool/fitting.hpp"

#include "spectool/gaussmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spectool::fitting {

double GaussianComponent::area() const {
    return amplitude * sigma * std::sqrt(2.0 * std::numbers::pi);
}

namespace {

double interp_intensity(const core::Spectrum& s, double x) {
    const auto& a = s.axis;
    if (x <= a.front()) return s.intensities.front();
    if (x >= a.back()) return s.intensities.back();
    auto it = std::upper_bound(a.begin(), a.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - a.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - a[lo]) / (a[hi] - a[lo]);
    return (1.0 - t) * s.intensities[lo] + t * s.intensities[hi];
}

}  // namespace

MultiGaussFit multi_gauss_fit(const core::Spectrum& spectrum,
                              const std::vector<peaks::PeakCandidate>& candidates,
                              const lsq::FitOptions& options) {
    spectrum.validate();
    if (candidates.empty())
        throw std::invalid_argument("multi_gauss_fit: at least one candidate required");

    lsq::FitProblem problem;
    problem.model = gaussmodel::multi_gauss_value;
    problem.jacobian = gaussmodel::multi_gauss_jacobian_row;
    problem.x_data = spectrum.axis;
    problem.y_data = spectrum.intensities;
    // Keep every component physically tied to the data: centers inside the
    // axis range, sigma below the span, amplitude below 1.5x the data
    // maximum, and per-iteration steps bounded. Without the box,
    // low-amplitude components drift into degenerate spike solutions.
    const double span = spectrum.axis.back() - spectrum.axis.front();
    const double amp_cap =
        1.5 * *std::max_element(spectrum.intensities.begin(), spectrum.intensities.end());
    for (const auto& c : candidates) {
        problem.initial_params.push_back(std::max(c.height, 0.0));
        problem.initial_params.push_back(c.position);
        problem.initial_params.push_back(std::max(c.est_width / gaussmodel::kFwhmToSigma, 1e-6));
        problem.bounds.push_back(lsq::Bounds{0.0, amp_cap});
        problem.bounds.push_back(lsq::Bounds{spectrum.axis.front(), spectrum.axis.back()});
        problem.bounds.push_back(lsq::Bounds{1e-6, span});
        problem.max_step.push_back(0.5);
        problem.max_step.push_back(0.02 * span);
        problem.max_step.push_back(0.05 * span);
    }

    const lsq::FitResult res = lsq::fit(problem, options);

    MultiGaussFit out;
    out.converged = res.converged;
    out.residuals = res.residuals;
    for (double r : res.residuals)
        out.max_abs_residual = std::max(out.max_abs_residual, std::abs(r));

    std::vector<std::pair<GaussianComponent, int>> comps;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        comps.push_back({GaussianComponent{res.params[3 * k], res.params[3 * k + 1],
                                           res.params[3 * k + 2]},
                         static_cast<int>(k)});
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.first.center < b.first.center; });
    for (auto& [comp, src] : comps) {
        out.components.push_back(comp);
        out.source_candidates.push_back(src);
    }
    return out;
}

double extract_zpl(const core::Spectrum& pl) {
    const core::Spectrum s = core::to_energy(pl);
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s.intensities[i] > s.intensities[best]) best = i;
    return s.axis[best];
}

PLDecomposition decompose_pl(const core::Spectrum& pl_normalized, double zpl_ev,
                             const lsq::FitOptions& options) {
    const core::Spectrum s = core::to_energy(pl_normalized);
    if (s.kind != core::IntensityKind::Normalized)
        throw std::invalid_argument("decompose_pl: spectrum must be normalized");
    if (zpl_ev < s.axis.front() || zpl_ev > s.axis.back())
        throw std::invalid_argument("decompose_pl: ZPL outside the spectrum range");

    // Parameters per component: amplitude, detuning from the ZPL, sigma.
    // Centers are zpl - detuning, which makes the sideband bounds natural.
    constexpr int kComponents = 5;
    const double init_detuning[kComponents] = {0.0, 0.020, 0.050, 0.165, 0.190};
    const double init_sigma[kComponents] = {0.010, 0.012, 0.025, 0.020, 0.020};

    lsq::FitProblem problem;
    problem.model = [zpl_ev](std::span<const double> p, double x) {
        double sum = 0.0;
        for (int k = 0; k < kComponents; ++k)
            sum += gaussmodel::gauss(p[3 * k], zpl_ev - p[3 * k + 1], p[3 * k + 2], x);
        return sum;
    };
    problem.jacobian = [zpl_ev](std::span<const double> p, double x, std::span<double> out) {
        for (int k = 0; k < kComponents; ++k) {
            const double a = p[3 * k];
            const double c = zpl_ev - p[3 * k + 1];
            const double sg = p[3 * k + 2];
            const double d = x - c;
            const double e = std::exp(-0.5 * d * d / (sg * sg));
            out[3 * k] = e;
            out[3 * k + 1] = -a * e * d / (sg * sg);  // d center / d detuning = -1
            out[3 * k + 2] = a * e * d * d / (sg * sg * sg);
        }
    };
    problem.x_data = s.axis;
    problem.y_data = s.intensities;
    for (int k = 0; k < kComponents; ++k) {
        const double amp0 = std::max(interp_intensity(s, zpl_ev - init_detuning[k]), 0.0);
        problem.initial_params.push_back(amp0);
        problem.initial_params.push_back(init_detuning[k]);
        problem.initial_params.push_back(init_sigma[k]);
        problem.bounds.push_back(lsq::Bounds{0.0, 10.0});
        if (k == 0)
            problem.bounds.push_back(lsq::Bounds{-0.010, 0.010});
        else if (k <= 2)
            problem.bounds.push_back(lsq::Bounds{0.002, 0.120});
        else
            problem.bounds.push_back(lsq::Bounds{init_detuning[k] - 0.025, init_detuning[k] + 0.025});
        problem.bounds.push_back(lsq::Bounds{0.002, 0.150});
    }

    const lsq::FitResult res = lsq::fit(problem, options);

    PLDecomposition out;
    out.converged = res.converged;
    for (double r : res.residuals)
        out.max_abs_residual = std::max(out.max_abs_residual, std::abs(r));
    GaussianComponent comps[kComponents];
    for (int k = 0; k < kComponents; ++k)
        comps[k] = GaussianComponent{res.params[3 * k], zpl_ev - res.params[3 * k + 1],
                                     res.params[3 * k + 2]};
    out.zpl = comps[0];
    out.acoustic[0] = comps[1];
    out.acoustic[1] = comps[2];
    out.optical[0] = comps[3];
    out.optical[1] = comps[4];

    double total = 0.0;
    for (const auto& c : comps) total += c.area();
    out.debye_waller_proxy = total > 0.0 ? out.zpl.area() / total : 0.0;
    return out;
}

TransitionSet extract_transitions(const MultiGaussFit& fit,
                                  const std::vector<peaks::PeakCandidate>& candidates,
                                  int emitter_id, double zpl_energy) {
    TransitionSet out;
    out.emitter_id = emitter_id;
    out.zpl_energy = zpl_energy;
    for (std::size_t k = 0; k < fit.components.size(); ++k) {
        const int src = fit.source_candidates[k];
        if (src < 0 || static_cast<std::size_t>(src) >= candidates.size()) continue;
        const auto& cand = candidates[static_cast<std::size_t>(src)];
        if (cand.accepted && !cand.is_edge) out.transitions.push_back(fit.components[k].center);
    }
    std::sort(out.transitions.begin(), out.transitions.end());
    for (std::size_t i = 0; i < out.transitions.size(); ++i)
        for (std::size_t j = i + 1; j < out.transitions.size(); ++j)
            out.pairwise_diffs.push_back(out.transitions[j] - out.transitions[i]);
    return out;
}

PleAnalysis analyze_ple(const core::Spectrum& ple_raw, const PleParams& params) {
    PleAnalysis out;
    try {
        out.normalized = core::normalize(core::to_energy(ple_raw));
        auto candidates = peaks::preselect_peaks(out.normalized, params.window);
        for (auto& c : candidates)
            c = peaks::vet_peak(out.normalized, c, params.window, params.vet, params.fit_options);
        out.candidates = candidates;
        for (const auto& c : candidates)
            if (c.accepted || c.is_edge) out.fitted.push_back(c);
        if (out.fitted.empty()) {
            out.message = "no peak candidates survived vetting";
            return out;
        }
        out.fit = multi_gauss_fit(out.normalized, out.fitted, params.fit_options);
        out.ok = true;
    } catch (const std::exception& e) {
        out.message = e.what();
    }
    return out;
}

}  // namespace spectool::fitting
