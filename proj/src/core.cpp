#include "spectool/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spectool::core {

double wavelength_to_energy(double lambda_nm) {
    if (!(lambda_nm > 0.0))
        throw std::domain_error("wavelength_to_energy: wavelength must be > 0 nm");
    return kEvNm / lambda_nm;
}

double energy_to_wavelength(double energy_ev) {
    if (!(energy_ev > 0.0))
        throw std::domain_error("energy_to_wavelength: energy must be > 0 eV");
    return kEvNm / energy_ev;
}

Spectrum::Spectrum(std::vector<double> axis_, std::vector<double> intensities_,
                   AxisUnit unit_, IntensityKind kind_)
    : axis(std::move(axis_)), intensities(std::move(intensities_)), unit(unit_), kind(kind_) {
    validate();
}

void Spectrum::validate() const {
    if (axis.size() != intensities.size())
        throw std::invalid_argument("Spectrum: axis and intensities must have equal length");
    if (axis.size() < 3)
        throw std::invalid_argument("Spectrum: need at least 3 samples");
    for (std::size_t i = 1; i < axis.size(); ++i)
        if (!(axis[i] > axis[i - 1]))
            throw std::invalid_argument("Spectrum: axis must be strictly increasing");
    for (double v : intensities)
        if (!std::isfinite(v))
            throw std::invalid_argument("Spectrum: intensities must be finite");
    if (kind == IntensityKind::Normalized) {
        double mx = *std::max_element(intensities.begin(), intensities.end());
        if (mx != 1.0)
            throw std::invalid_argument("Spectrum: normalized intensities must have max exactly 1");
        for (double v : intensities)
            if (v < 0.0 || v > 1.0)
                throw std::invalid_argument("Spectrum: normalized intensities must lie in [0,1]");
    }
}

Spectrum to_energy(const Spectrum& s) {
    s.validate();
    if (s.unit == AxisUnit::ElectronVolt) return s;
    Spectrum out;
    out.unit = AxisUnit::ElectronVolt;
    out.kind = s.kind;
    out.metadata = s.metadata;
    const std::size_t n = s.size();
    out.axis.resize(n);
    out.intensities.resize(n);
    // nm ascending maps to eV descending; reverse to restore ascending order
    for (std::size_t i = 0; i < n; ++i) {
        out.axis[n - 1 - i] = wavelength_to_energy(s.axis[i]);
        out.intensities[n - 1 - i] = s.intensities[i];
    }
    out.validate();
    return out;
}

Spectrum normalize(const Spectrum& s) {
    s.validate();
    double mx = *std::max_element(s.intensities.begin(), s.intensities.end());
    if (!(mx > 0.0))
        throw std::domain_error("normalize: maximum intensity must be > 0");
    Spectrum out = s;
    for (double& v : out.intensities) v /= mx;
    out.kind = IntensityKind::Normalized;
    return out;
}

CountTrace::CountTrace(double bin_width, std::vector<std::int64_t> counts_)
    : bin_width_s(bin_width), counts(std::move(counts_)) {
    validate();
}

void CountTrace::validate() const {
    if (!(bin_width_s > 0.0))
        throw std::invalid_argument("CountTrace: bin width must be > 0");
    for (auto c : counts)
        if (c < 0) throw std::invalid_argument("CountTrace: counts must be non-negative");
}

CountTrace rebin_trace(const CountTrace& trace, double target_bin_s) {
    trace.validate();
    if (!(target_bin_s > 0.0))
        throw std::invalid_argument("rebin_trace: target bin must be > 0");
    const double ratio = target_bin_s / trace.bin_width_s;
    const auto k = static_cast<std::int64_t>(std::llround(ratio));
    if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9 * static_cast<double>(k))
        throw std::invalid_argument("rebin_trace: target bin must be an integer multiple of the source bin");
    if (k == 1) return trace;
    CountTrace out;
    out.bin_width_s = target_bin_s;
    const std::size_t groups = trace.counts.size() / static_cast<std::size_t>(k);
    out.counts.reserve(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        std::int64_t sum = 0;
        for (std::int64_t j = 0; j < k; ++j) sum += trace.counts[g * k + j];
        out.counts.push_back(sum);
    }
    return out;
}

G2Histogram::G2Histogram(double bin_width, std::vector<double> delays_,
                         std::vector<double> coincidences_)
    : bin_width_s(bin_width), delays(std::move(delays_)), coincidences(std::move(coincidences_)) {
    validate();
}

void G2Histogram::validate() const {
    if (!(bin_width_s > 0.0))
        throw std::invalid_argument("G2Histogram: bin width must be > 0");
    if (delays.size() != coincidences.size())
        throw std::invalid_argument("G2Histogram: delays and coincidences must have equal length");
    for (std::size_t i = 1; i < delays.size(); ++i)
        if (!(delays[i] > delays[i - 1]))
            throw std::invalid_argument("G2Histogram: delays must be strictly increasing");
    for (double c : coincidences)
        if (!(c >= 0.0))
            throw std::invalid_argument("G2Histogram: coincidences must be non-negative");
    if (!delays.empty()) {
        // symmetric about zero within one bin
        if (std::abs(delays.front() + delays.back()) > bin_width_s)
            throw std::invalid_argument("G2Histogram: delays must be symmetric about zero");
    }
}

double mean_abs_diff(std::span<const double> values) {
    if (values.size() < 2)
        throw std::invalid_argument("mean_abs_diff: need at least 2 values");
    double sum = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i)
        sum += std::abs(values[i] - values[i - 1]);
    return sum / static_cast<double>(values.size() - 1);
}

}  // namespace spectool::core
