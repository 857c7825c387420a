#include "spectool/simulate.hpp"

#include "spectool/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spectool::sim {

namespace {

// splitmix64; used both to seed the walk state and to derive substreams
std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : state_(seed) {
    // scramble so that nearby seeds give unrelated streams
    splitmix64(state_);
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal(double sigma) {
    // Box-Muller without the cached second value: the draw count per call is
    // fixed, which keeps substreams reproducible.
    const double u1 = uniform_open();
    const double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::substream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed ^ 0xA5A5A5A55A5A5A5AULL;
    std::uint64_t mixed = splitmix64(x);
    x = mixed + index;
    return splitmix64(x);
}

void SimConfig::validate() const {
    if (modes.empty()) throw std::invalid_argument("SimConfig: need at least one mode");
    double wsum = 0.0;
    for (auto [e, w] : modes) {
        if (!(e > 0.0)) throw std::invalid_argument("SimConfig: mode energies must be > 0");
        if (!(w >= 0.0)) throw std::invalid_argument("SimConfig: mode weights must be >= 0");
        wsum += w;
    }
    if (!(wsum > 0.0)) throw std::invalid_argument("SimConfig: mode weights must sum > 0");
    if (!(range_lo < range_hi)) throw std::invalid_argument("SimConfig: range_lo must be < range_hi");
    if (!(jitter_sigma >= 0.0)) throw std::invalid_argument("SimConfig: jitter_sigma must be >= 0");
    if (duplication < 1) throw std::invalid_argument("SimConfig: duplication must be >= 1");
}

double placement_probability(int m, int n) {
    if (m < 1) throw std::invalid_argument("placement_probability: m must be >= 1");
    if (n < 0) throw std::invalid_argument("placement_probability: n must be >= 0");
    return std::min(1.0, 3.0 / static_cast<double>(m + n + 1));
}

SimEmitter generate_emitter(double zpl, const SimConfig& config, Rng& rng,
                            const PlacementFn& placement) {
    config.validate();
    SimEmitter em;
    em.zpl = zpl;

    double total_weight = 0.0;
    for (auto [e, w] : config.modes) total_weight += w;

    double position = zpl;  // last generated line, placed or skipped
    int m = 1;
    int n = 0;
    while (true) {
        // (a) mode by weight
        double pick = rng.uniform() * total_weight;
        double mode = config.modes.back().first;
        for (auto [e, w] : config.modes) {
            if (pick < w) { mode = e; break; }
            pick -= w;
        }
        // (b) jitter, (c) candidate from the previous line
        const double candidate = position + mode + rng.normal(config.jitter_sigma);
        em.generated_count += 1;
        if (candidate > config.range_hi) break;

        // (e) placement coin
        if (rng.uniform() < placement(m, n)) {
            if (candidate >= config.range_lo && candidate <= config.range_hi)
                em.transitions.push_back(candidate);
            m = 1;
        } else {
            m += 1;
        }
        n = 2 * em.generated_count;
        position = candidate;
    }
    std::sort(em.transitions.begin(), em.transitions.end());
    return em;
}

std::vector<SimEmitter> generate_dataset(const std::vector<double>& zpls,
                                         const SimConfig& config,
                                         const PlacementFn& placement) {
    if (zpls.empty()) throw std::invalid_argument("generate_dataset: empty ZPL list");
    config.validate();
    std::vector<SimEmitter> out;
    out.reserve(zpls.size() * static_cast<std::size_t>(config.duplication));
    std::uint64_t index = 0;
    for (int d = 0; d < config.duplication; ++d) {
        for (double z : zpls) {
            Rng rng(Rng::substream_seed(config.seed, index++));
            out.push_back(generate_emitter(z, config, rng, placement));
        }
    }
    return out;
}

std::vector<double> synthetic_zpls(int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("synthetic_zpls: count must be >= 1");
    const double lo = core::wavelength_to_energy(585.0);
    const double hi = core::wavelength_to_energy(555.0);
    Rng rng(Rng::substream_seed(seed, 0xFFFF000000000000ULL));
    std::vector<double> out(static_cast<std::size_t>(count));
    for (double& z : out) z = lo + rng.uniform() * (hi - lo);
    return out;
}

}  // namespace spectool::sim
