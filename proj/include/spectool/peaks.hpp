// Peak preselection by sliding local-maximum window and vetting by a local
// single-Gaussian fit. Windows and thresholds differ between PLE and PL
// spectra; see VetThresholds below for the stock values.
#pragma once

#include "spectool/core.hpp"
#include "spectool/lsq.hpp"

#include <vector>

namespace spectool::peaks {

struct PeakCandidate {
    int index = -1;          // position in the spectrum
    double position = 0.0;   // axis value (eV for canonical spectra)
    double height = 0.0;     // data value at the candidate
    double est_width = 0.0;  // FWHM estimate: half the distance between surrounding minima
    bool is_edge = false;    // window truncated by the data boundary
    double vet_residual_max = 0.0;  // max |residual| of the local Gaussian vet fit
    double vet_amplitude = 0.0;     // fitted amplitude of the vet fit
    bool accepted = false;   // passed vetting; edge candidates are never accepted
};

struct VetThresholds {
    double residual_max;  // vet fit max |residual| must stay below this
    double min_height;    // fitted amplitude must exceed this
};

inline constexpr int kPleWindow = 8;
inline constexpr int kPlWindow = 25;
inline constexpr VetThresholds kPleVet{0.12, 0.10};
inline constexpr VetThresholds kPlVet{0.15, 0.06};

// A point is a candidate iff it strictly exceeds every point within `window`
// indices on both sides; points whose window is truncated by the boundary
// compare against the truncated window and carry is_edge=true. The spectrum
// must be normalized. est_width is derived from the surrounding minima.
std::vector<PeakCandidate> preselect_peaks(const core::Spectrum& spectrum, int window);

// Strict local minima, found by running the peak preselection on the negated
// intensities. Returns indices (boundary minima included).
std::vector<int> find_minima(const core::Spectrum& spectrum, int window);

// Fit a single Gaussian on the candidate's neighborhood (`window` points each
// side, truncated at the boundaries) and accept iff max|residual| <
// thresholds.residual_max and fitted amplitude > thresholds.min_height.
// Edge candidates skip the fit and stay unaccepted; they are still kept for
// the multi-Gaussian fit downstream.
PeakCandidate vet_peak(const core::Spectrum& spectrum, const PeakCandidate& candidate,
                       int window, const VetThresholds& thresholds,
                       const lsq::FitOptions& fit_options = {});

}  // namespace spectool::peaks
