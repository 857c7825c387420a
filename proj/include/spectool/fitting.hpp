// Multi-Gaussian fitting of PLE spectra, PL decomposition into ZPL plus
// phonon sidebands, and extraction of transition energies and their pairwise
// spacings.
#pragma once

#include "spectool/core.hpp"
#include "spectool/lsq.hpp"
#include "spectool/peaks.hpp"

#include <string>
#include <vector>

namespace spectool::fitting {

struct GaussianComponent {
    double amplitude = 0.0;
    double center = 0.0;
    double sigma = 0.0;

    double area() const;  // analytic: A * sigma * sqrt(2*pi)
};

struct MultiGaussFit {
    std::vector<GaussianComponent> components;  // sorted by center ascending
    std::vector<int> source_candidates;         // candidate index per component
    std::vector<double> residuals;              // data - model, over the full spectrum
    double max_abs_residual = 0.0;
    bool converged = false;
};

// Transition energies of one emitter (non-edge accepted fitted centers) and
// all pairwise differences t_j - t_i for i < j.
struct TransitionSet {
    int emitter_id = -1;
    double zpl_energy = 0.0;
    std::vector<double> transitions;     // eV, ascending
    std::vector<double> pairwise_diffs;  // eV, all positive
};

// ZPL plus two acoustic and two optical sideband components fitted to a
// normalized PL spectrum.
struct PLDecomposition {
    GaussianComponent zpl;
    GaussianComponent acoustic[2];  // low-energy shoulder
    GaussianComponent optical[2];   // around 165 and 190 meV below the ZPL
    double debye_waller_proxy = 0.0;  // ZPL area / total area, analytic
    bool converged = false;
    double max_abs_residual = 0.0;
};

// Sum-of-Gaussians fit seeded from the candidates: center = candidate
// position, amplitude = candidate height, sigma = est_width / 2.355.
// Candidates flagged as edge participate like any other component.
MultiGaussFit multi_gauss_fit(const core::Spectrum& spectrum,
                              const std::vector<peaks::PeakCandidate>& candidates,
                              const lsq::FitOptions& options = {});

// Axis value at the global intensity maximum, in eV; the lowest energy wins
// on ties. Accepts nm or eV input.
double extract_zpl(const core::Spectrum& pl);

// Constrained 5-component fit with centers parameterized as detunings from
// the ZPL: initial acoustic detunings 20 and 50 meV, optical 165 and 190 meV;
// the optical detunings are bounded within +-25 meV of their initial values.
PLDecomposition decompose_pl(const core::Spectrum& pl_normalized, double zpl_ev,
                             const lsq::FitOptions& options = {});

// Fitted centers of accepted non-edge components, sorted, plus all pairwise
// differences. Components are matched to candidates through
// fit.source_candidates.
TransitionSet extract_transitions(const MultiGaussFit& fit,
                                  const std::vector<peaks::PeakCandidate>& candidates,
                                  int emitter_id = -1, double zpl_energy = 0.0);

// Parameters of the standard PLE peak-search pipeline.
struct PleParams {
    int window = peaks::kPleWindow;
    peaks::VetThresholds vet = peaks::kPleVet;
    lsq::FitOptions fit_options;
};

// Full per-spectrum pipeline: canonicalize to eV, normalize, preselect, vet,
// multi-Gaussian fit over accepted-or-edge candidates.
struct PleAnalysis {
    core::Spectrum normalized;                      // eV axis, max 1
    std::vector<peaks::PeakCandidate> candidates;   // all vetted candidates
    std::vector<peaks::PeakCandidate> fitted;       // accepted or edge, fed to the fit
    MultiGaussFit fit;
    bool ok = false;      // a fit was run
    std::string message;  // why not, when !ok
};

PleAnalysis analyze_ple(const core::Spectrum& ple_raw, const PleParams& params = {});

}  // namespace spectool::fitting
