#include "spectool/qc.hpp"

#include "spectool/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectool::qc {

void ScanImage::validate() const {
    if (rows <= 0 || cols <= 0 || pixels.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("ScanImage: bad dimensions");
    if (!(step_um > 0.0)) throw std::invalid_argument("ScanImage: step must be > 0");
    for (double v : pixels)
        if (!(v >= 0.0)) throw std::invalid_argument("ScanImage: counts must be non-negative");
}

std::vector<DetectedSpot> detect_emitters(const ScanImage& scan, const DetectParams& params) {
    scan.validate();
    const int k = params.neighbor_offset;
    if (k < 1) throw std::invalid_argument("detect_emitters: neighbor offset must be >= 1");
    if (scan.rows < 2 * k + 1 || scan.cols < 2 * k + 1)
        throw std::invalid_argument("detect_emitters: scan too small for the neighbor test");

    const std::vector<double> smooth = grid::median_filter(scan.pixels, scan.rows, scan.cols, 3);

    auto val = [&](int r, int c) { return smooth[static_cast<std::size_t>(r) * scan.cols + c]; };
    std::vector<char> mark(smooth.size(), 0);
    for (int r = 0; r < scan.rows; ++r) {
        for (int c = 0; c < scan.cols; ++c) {
            const double v = val(r, c);
            if (!(v > 0.0)) continue;  // a flat zero background marks nothing
            bool ok = true;
            if (r - k >= 0) ok = ok && v >= params.brightness_ratio * val(r - k, c);
            if (r + k < scan.rows) ok = ok && v >= params.brightness_ratio * val(r + k, c);
            if (c - k >= 0) ok = ok && v >= params.brightness_ratio * val(r, c - k);
            if (c + k < scan.cols) ok = ok && v >= params.brightness_ratio * val(r, c + k);
            if (ok) mark[static_cast<std::size_t>(r) * scan.cols + c] = 1;
        }
    }

    std::vector<DetectedSpot> spots;
    for (auto& group : grid::connected_components_8(mark, scan.rows, scan.cols)) {
        DetectedSpot spot;
        double wsum = 0.0, xsum = 0.0, ysum = 0.0;
        for (auto [r, c] : group) {
            const double w = val(r, c);
            wsum += w;
            xsum += w * c;
            ysum += w * r;
            spot.peak_brightness = std::max(spot.peak_brightness, w);
        }
        spot.pixel_indices = std::move(group);
        spot.centroid_x_um = scan.step_um * xsum / wsum;
        spot.centroid_y_um = scan.step_um * ysum / wsum;
        spots.push_back(std::move(spot));
    }
    return spots;
}

bool check_bleaching(const core::CountTrace& opt_trace, double ratio) {
    opt_trace.validate();
    if (opt_trace.counts.empty())
        throw std::invalid_argument("check_bleaching: empty trace");
    const auto [mn_it, mx_it] = std::minmax_element(opt_trace.counts.begin(), opt_trace.counts.end());
    const double mn = static_cast<double>(*mn_it);
    const double mx = static_cast<double>(*mx_it);
    if (mn == 0.0) return mx == 0.0;
    return mx < ratio * mn;
}

StabilityResult criterion_stability(const core::CountTrace& binned, const QcThresholds& thr) {
    StabilityResult out;
    binned.validate();
    if (binned.counts.size() < 2) {
        out.status = CriterionStatus::NotEvaluable;
        return out;
    }
    double mean = 0.0;
    std::int64_t mx = 0;
    for (auto c : binned.counts) {
        mean += static_cast<double>(c);
        mx = std::max(mx, c);
    }
    mean /= static_cast<double>(binned.counts.size());
    out.mean_rate_cps = mean / binned.bin_width_s;

    if (mx > 0) {
        std::vector<double> norm(binned.counts.size());
        for (std::size_t i = 0; i < norm.size(); ++i)
            norm[i] = static_cast<double>(binned.counts[i]) / static_cast<double>(mx);
        out.stability_metric = core::mean_abs_diff(norm);
    } else {
        out.stability_metric = 0.0;  // flat zero; brightness fails regardless
    }
    const bool pass = *out.mean_rate_cps > thr.min_count_rate_cps &&
                      *out.stability_metric < thr.max_stability;
    out.status = pass ? CriterionStatus::Pass : CriterionStatus::Fail;
    return out;
}

G2Result criterion_g2(const core::G2Histogram& g2, const QcThresholds& thr) {
    G2Result out;
    g2.validate();
    const double rp = thr.rep_period_s;
    const int ks = thr.g2_side_peaks;
    if (g2.delays.empty() || g2.delays.front() > -ks * rp || g2.delays.back() < ks * rp) {
        out.status = CriterionStatus::NotEvaluable;
        return out;
    }
    auto window_sum = [&](double center) {
        const double lo = center - rp / 2.0, hi = center + rp / 2.0;
        double sum = 0.0;
        for (std::size_t i = 0; i < g2.delays.size(); ++i)
            if (g2.delays[i] >= lo && g2.delays[i] < hi) sum += g2.coincidences[i];
        return sum;
    };
    const double central = window_sum(0.0);
    double side = 0.0;
    for (int k = 1; k <= ks; ++k) side += window_sum(k * rp) + window_sum(-k * rp);
    side /= 2.0 * ks;
    if (!(side > 0.0)) {
        out.status = CriterionStatus::NotEvaluable;
        return out;
    }
    out.g2_zero = central / side;
    out.status = *out.g2_zero < thr.g2_max ? CriterionStatus::Pass : CriterionStatus::Fail;
    return out;
}

FitQualityResult criterion_fit_quality(const fitting::MultiGaussFit& fit, const QcThresholds& thr) {
    FitQualityResult out;
    out.max_abs_residual = fit.max_abs_residual;
    if (!fit.converged) {
        out.status = CriterionStatus::Fail;
        return out;
    }
    out.status = fit.max_abs_residual < thr.max_fit_residual ? CriterionStatus::Pass
                                                             : CriterionStatus::Fail;
    return out;
}

SelectionReport select_emitter(const core::EmitterRecord& record, const SelectionParams& params) {
    SelectionReport rep;
    rep.emitter_id = record.id;

    // Bleaching on the x and y optimization sweeps (first two traces).
    const std::size_t n_opt = std::min<std::size_t>(record.optimization_traces.size(), 2);
    for (std::size_t i = 0; i < n_opt; ++i) {
        if (record.optimization_traces[i].counts.empty()) continue;
        if (check_bleaching(record.optimization_traces[i], params.thresholds.bleach_ratio))
            rep.bleached = true;
    }
    if (rep.bleached) {
        rep.fail_stage = "bleached";
        return rep;
    }

    // Criterion 1: brightness and stability on the rebinned count trace.
    if (!record.trace) {
        rep.stability.status = CriterionStatus::NotEvaluable;
        rep.fail_stage = "stability";
        return rep;
    }
    core::CountTrace binned = *record.trace;
    if (binned.bin_width_s != params.thresholds.stability_bin_s) {
        try {
            binned = core::rebin_trace(binned, params.thresholds.stability_bin_s);
        } catch (const std::exception&) {
            rep.stability.status = CriterionStatus::NotEvaluable;
            rep.fail_stage = "stability";
            return rep;
        }
    }
    rep.stability = criterion_stability(binned, params.thresholds);
    if (rep.stability.status != CriterionStatus::Pass) {
        rep.fail_stage = "stability";
        return rep;
    }

    // Criterion 2: single-photon purity.
    if (!record.g2) {
        rep.g2.status = CriterionStatus::NotEvaluable;
        rep.fail_stage = "g2";
        return rep;
    }
    rep.g2 = criterion_g2(*record.g2, params.thresholds);
    if (rep.g2.status != CriterionStatus::Pass) {
        rep.fail_stage = "g2";
        return rep;
    }

    // Criterion 3: PLE fit quality.
    if (!record.ple) {
        rep.fit_quality.status = CriterionStatus::NotEvaluable;
        rep.fail_stage = "fit";
        return rep;
    }
    const fitting::PleAnalysis analysis = fitting::analyze_ple(*record.ple, params.ple);
    if (!analysis.ok) {
        rep.fit_quality.status = CriterionStatus::Fail;
        rep.fail_stage = "fit";
        return rep;
    }
    rep.fit_quality = criterion_fit_quality(analysis.fit, params.thresholds);
    if (rep.fit_quality.status != CriterionStatus::Pass) {
        rep.fail_stage = "fit";
        return rep;
    }

    rep.passed = true;
    return rep;
}

std::vector<SelectionReport> select_emitters(const std::vector<core::EmitterRecord>& records,
                                             const SelectionParams& params) {
    std::vector<SelectionReport> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(select_emitter(r, params));
    return out;
}

}  // namespace spectool::qc
