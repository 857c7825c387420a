// Monte Carlo generator of toy PLE transition sets: a random walk over
// discrete phonon modes with Gaussian jitter and a decaying placement
// probability, reproducing the ladder statistics of the measured data.
#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace spectool::sim {

// Deterministic stream with explicit draw layouts, so a (seed, substream)
// pair reproduces a dataset bit for bit across reruns.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    double uniform();         // [0, 1)
    double uniform_open();    // (0, 1)
    double normal(double sigma);  // Box-Muller, two draws, no cached spare

    // Substream seed for worker `index`, independent of call order.
    static std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

private:
    std::uint64_t state_;
    std::uint64_t next_u64();
};

struct SimConfig {
    // (energy eV, relative weight)
    std::vector<std::pair<double, double>> modes = {{0.165, 25.0}, {0.190, 2.0}, {0.100, 2.0}};
    double jitter_sigma = 0.017;
    double range_lo = 2.34;
    double range_hi = 2.88;
    int duplication = 7;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SimEmitter {
    double zpl = 0.0;
    std::vector<double> transitions;  // strictly increasing, within [lo, hi]
    int generated_count = 0;          // every candidate line, placed or not
};

// Placement probability min(1, 3 / (m + n + 1)); m >= 1 counts consecutive
// skips (reset to 1 on placement), n is twice the number of generated lines.
double placement_probability(int m, int n);

using PlacementFn = std::function<double(int m, int n)>;

// Walk upward from the ZPL: each step draws a mode by weight and a jitter,
// the candidate goes at that distance from the previous line whether or not
// that line was placed. A coin with placement_probability decides placement;
// lines outside [lo, hi] are generated but not recorded. Terminates at the
// first candidate beyond the upper range edge.
SimEmitter generate_emitter(double zpl, const SimConfig& config, Rng& rng,
                            const PlacementFn& placement = placement_probability);

// The ZPL list is replicated `duplication` times; emitter i draws from its
// own counter-derived substream, so output is independent of evaluation
// order.
std::vector<SimEmitter> generate_dataset(const std::vector<double>& zpls,
                                         const SimConfig& config,
                                         const PlacementFn& placement = placement_probability);

// Fallback ZPL source when no measured list is supplied: uniform over the
// 555-585 nm emission window, in eV.
std::vector<double> synthetic_zpls(int count, std::uint64_t seed);

}  // namespace spectool::sim
