// Emitter detection from confocal scans, bleaching detection and the
// three-criterion selection filter (brightness/stability, single-photon
// purity, PLE fit quality).
#pragma once

#include "spectool/core.hpp"
#include "spectool/fitting.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spectool::qc {

struct ScanImage {
    std::vector<double> pixels;  // row-major counts
    int rows = 0;
    int cols = 0;
    double step_um = 0.1;

    double at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * cols + c]; }
    void validate() const;
};

struct DetectedSpot {
    std::vector<std::pair<int, int>> pixel_indices;  // (row, col), 8-connected
    double centroid_x_um = 0.0;  // brightness-weighted, on the smoothed image
    double centroid_y_um = 0.0;
    double peak_brightness = 0.0;
};

struct DetectParams {
    int neighbor_offset = 6;      // compare against the pixel this many steps away
    double brightness_ratio = 4.0;
};

// Median-smooth (3x3), mark pixels at least `brightness_ratio` times brighter
// than the pixel `neighbor_offset` steps away in each of the four axis
// directions (existing directions only near the border), group marks by
// 8-connectivity. Scans smaller than 13x13 are rejected.
std::vector<DetectedSpot> detect_emitters(const ScanImage& scan, const DetectParams& params = {});

// Bleached iff max < ratio * min over the optimization sweep. A zero minimum
// counts as infinite contrast (not bleached) unless the maximum is zero too.
bool check_bleaching(const core::CountTrace& opt_trace, double ratio = 3.5);

enum class CriterionStatus { Pass, Fail, NotEvaluable, NotEvaluated };

struct StabilityResult {
    std::optional<double> mean_rate_cps;
    std::optional<double> stability_metric;
    CriterionStatus status = CriterionStatus::NotEvaluated;
};

struct G2Result {
    std::optional<double> g2_zero;
    CriterionStatus status = CriterionStatus::NotEvaluated;
};

struct FitQualityResult {
    std::optional<double> max_abs_residual;
    CriterionStatus status = CriterionStatus::NotEvaluated;
};

struct QcThresholds {
    double min_count_rate_cps = 8000.0;  // mean rate must exceed this
    double max_stability = 0.1;          // mean |diff| of the normalized trace must stay below
    double g2_max = 0.5;                 // g2(0) must stay below
    double max_fit_residual = 0.26;      // PLE fit max |residual| must stay below
    double bleach_ratio = 3.5;
    double stability_bin_s = 0.5;
    double rep_period_s = 12.5e-9;       // 80 MHz pulsed excitation
    int g2_side_peaks = 3;
};

// Criterion 1 on a trace already rebinned to the stability window.
StabilityResult criterion_stability(const core::CountTrace& binned,
                                    const QcThresholds& thr = {});

// Criterion 2: pulsed-excitation area ratio. The window one repetition period
// wide around zero delay is compared against the mean of the side-peak
// windows at +-k periods, k = 1..g2_side_peaks.
G2Result criterion_g2(const core::G2Histogram& g2, const QcThresholds& thr = {});

// Criterion 3 on the multi-Gaussian PLE fit.
FitQualityResult criterion_fit_quality(const fitting::MultiGaussFit& fit,
                                       const QcThresholds& thr = {});

struct SelectionReport {
    int emitter_id = -1;
    bool bleached = false;
    StabilityResult stability;
    G2Result g2;
    FitQualityResult fit_quality;
    bool passed = false;
    std::string fail_stage;  // empty when passed
};

struct SelectionParams {
    QcThresholds thresholds;
    fitting::PleParams ple;
};

// Bleaching check, then criteria 1-3 in measurement order with short-circuit
// on the first failure. Reports come back in input order.
std::vector<SelectionReport> select_emitters(const std::vector<core::EmitterRecord>& records,
                                             const SelectionParams& params = {});
SelectionReport select_emitter(const core::EmitterRecord& record,
                               const SelectionParams& params = {});

}  // namespace spectool::qc
