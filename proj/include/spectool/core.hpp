// Core domain types for emitter spectroscopy data: spectra, count traces,
// coincidence histograms and per-emitter measurement bundles, plus the unit
// conversions and normalization every other module builds on.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spectool::core {

// hc in eV*nm (CODATA). Every wavelength/energy conversion goes through this.
inline constexpr double kEvNm = 1239.841984;

enum class AxisUnit { Nanometer, ElectronVolt };
enum class IntensityKind { Counts, Normalized };

// E = hc / lambda. Throws std::domain_error for lambda <= 0.
double wavelength_to_energy(double lambda_nm);
// Inverse of the above (the map is an involution up to units).
double energy_to_wavelength(double energy_ev);

// An ordered spectrum: axis strictly increasing, same length as intensities,
// at least 3 samples, all intensities finite. Normalized spectra additionally
// satisfy 0 <= I <= 1 with max(I) == 1.
struct Spectrum {
    std::vector<double> axis;
    std::vector<double> intensities;
    AxisUnit unit = AxisUnit::ElectronVolt;
    IntensityKind kind = IntensityKind::Counts;
    std::map<std::string, std::string> metadata;

    Spectrum() = default;
    Spectrum(std::vector<double> axis_, std::vector<double> intensities_,
             AxisUnit unit_ = AxisUnit::ElectronVolt,
             IntensityKind kind_ = IntensityKind::Counts);

    std::size_t size() const { return axis.size(); }

    // Throws std::invalid_argument if any invariant is violated.
    void validate() const;
};

// Canonical internal form: energy axis in eV, ascending. Wavelength input is
// converted and re-sorted; eV input is returned unchanged.
Spectrum to_energy(const Spectrum& s);

// Divide by the maximum intensity; output max is exactly 1.
// Throws std::domain_error when max <= 0 (degenerate input).
Spectrum normalize(const Spectrum& s);

// Count rate trace, fixed bin width.
struct CountTrace {
    double bin_width_s = 0.0;
    std::vector<std::int64_t> counts;

    CountTrace() = default;
    CountTrace(double bin_width, std::vector<std::int64_t> counts_);
    void validate() const;
};

// Sum consecutive groups of bins. target_bin must be an integer multiple of
// the source bin width; a trailing partial group is dropped.
CountTrace rebin_trace(const CountTrace& trace, double target_bin_s);

// Coincidence histogram from the two-detector correlation measurement.
// Delays are bin centers, strictly increasing and symmetric about zero
// within one bin.
struct G2Histogram {
    double bin_width_s = 0.0;
    std::vector<double> delays;
    std::vector<double> coincidences;

    G2Histogram() = default;
    G2Histogram(double bin_width, std::vector<double> delays_,
                std::vector<double> coincidences_);
    void validate() const;
};

// Everything measured on one fluorescent spot. Any measurement may be absent
// (the sequence aborts on bleaching); absence is an empty optional, never a
// zero-filled placeholder.
struct EmitterRecord {
    int id = -1;
    std::optional<std::pair<double, double>> scan_position_um;
    std::optional<Spectrum> ple;
    std::optional<Spectrum> pl;
    std::optional<CountTrace> trace;
    std::optional<G2Histogram> g2;
    std::vector<CountTrace> optimization_traces;  // x, y[, z] brightness sweeps
    std::optional<Spectrum> saturation;
};

// Mean of |v[i+1] - v[i]| over consecutive pairs; needs length >= 2.
double mean_abs_diff(std::span<const double> values);

}  // namespace spectool::core
