#include "spectool/config.hpp"

#include <json.hpp>

#include <fstream>

namespace spectool::cli {

lsq::FitOptions PipelineConfig::fit_options() const {
    lsq::FitOptions o;
    o.max_iter = fit_max_iter;
    o.tol_cost = fit_tol_cost;
    o.tol_step = fit_tol_step;
    o.damping_init = fit_damping_init;
    o.damping_cap = fit_damping_cap;
    return o;
}

fitting::PleParams PipelineConfig::ple_params() const {
    fitting::PleParams p;
    p.window = ple_window;
    p.vet = {ple_residual_max, ple_min_height};
    p.fit_options = fit_options();
    return p;
}

qc::SelectionParams PipelineConfig::qc_params() const {
    qc::SelectionParams p;
    p.thresholds.min_count_rate_cps = min_count_rate;
    p.thresholds.max_stability = stability_max;
    p.thresholds.g2_max = g2_max;
    p.thresholds.max_fit_residual = fit_residual_max;
    p.thresholds.bleach_ratio = bleach_ratio;
    p.thresholds.stability_bin_s = stability_bin;
    p.thresholds.rep_period_s = rep_period;
    p.thresholds.g2_side_peaks = g2_side_peaks;
    p.ple = ple_params();
    return p;
}

qc::DetectParams PipelineConfig::detect_params() const {
    return {neighbor_offset, brightness_ratio};
}

correlation::DensityParams PipelineConfig::density_params() const {
    return {density_window, density_step, max_detuning};
}

correlation::HeatmapParams PipelineConfig::heatmap_params() const {
    correlation::HeatmapParams p;
    p.slice_width = slice_width;
    p.slice_step = slice_step;
    p.density_width = density_window;
    p.density_step = density_step;
    p.max_center = max_detuning;
    p.normalize_rows = !raw_density;
    return p;
}

sim::SimConfig PipelineConfig::sim_config() const {
    sim::SimConfig c;
    c.modes = sim_modes;
    c.jitter_sigma = sim_jitter;
    c.range_lo = sim_range_lo;
    c.range_hi = sim_range_hi;
    c.duplication = sim_duplication;
    c.seed = seed;
    return c;
}

void PipelineConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
    if (ple_window < 1 || pl_window < 1) fail("peak windows must be >= 1");
    if (!(ple_residual_max > 0.0) || !(pl_residual_max > 0.0)) fail("vet residual thresholds must be > 0");
    if (!(ple_min_height >= 0.0) || !(pl_min_height >= 0.0)) fail("vet height thresholds must be >= 0");
    if (!(min_count_rate > 0.0)) fail("min_count_rate must be > 0");
    if (!(stability_max > 0.0)) fail("stability_max must be > 0");
    if (!(g2_max > 0.0)) fail("g2_max must be > 0");
    if (!(fit_residual_max > 0.0)) fail("fit_residual_max must be > 0");
    if (!(bleach_ratio > 0.0)) fail("bleach_ratio must be > 0");
    if (!(stability_bin > 0.0)) fail("stability_bin must be > 0");
    if (!(rep_period > 0.0)) fail("rep_period must be > 0");
    if (g2_side_peaks < 1) fail("g2_side_peaks must be >= 1");
    if (!(scan_step > 0.0)) fail("scan_step must be > 0");
    if (neighbor_offset < 1) fail("neighbor_offset must be >= 1");
    if (!(brightness_ratio > 0.0)) fail("brightness_ratio must be > 0");
    if (!(flake_threshold > 0.0)) fail("flake_threshold must be > 0");
    if (!(pixel_size > 0.0)) fail("pixel_size must be > 0");
    if (!(density_window > 0.0) || !(density_step > 0.0)) fail("density window/step must be > 0");
    if (!(slice_width > 0.0) || !(slice_step > 0.0)) fail("slice width/step must be > 0");
    if (!(max_detuning > 0.0)) fail("max_detuning must be > 0");
    if (!(zpl_window_lo < zpl_window_hi)) fail("zpl window must satisfy lo < hi");
    if (fit_max_iter < 1) fail("fit_max_iter must be >= 1");
    if (!(fit_tol_cost > 0.0) || !(fit_tol_step > 0.0)) fail("fit tolerances must be > 0");
    if (!(fit_damping_init > 0.0) || !(fit_damping_cap > fit_damping_init))
        fail("fit damping must satisfy 0 < init < cap");
    if (!(synth_sigma > 0.0)) fail("synth_sigma must be > 0");
    if (!(synth_noise >= 0.0)) fail("synth_noise must be >= 0");
    if (!(synth_decay > 0.0) || !(synth_decay <= 1.0)) fail("synth_decay must be in (0, 1]");
    if (!(grid_lo_nm > 0.0) || !(grid_lo_nm < grid_hi_nm)) fail("spectrum grid must satisfy 0 < lo < hi");
    if (!(grid_step_nm > 0.0)) fail("grid_step_nm must be > 0");
    if (sim_zpl_count < 1) fail("sim_zpl_count must be >= 1");
    if (jobs < 0) fail("jobs must be >= 0");
    try {
        sim_config().validate();
    } catch (const std::exception& e) {
        fail(e.what());
    }
}

std::vector<std::pair<double, double>> parse_modes(const std::string& text) {
    std::vector<std::pair<double, double>> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        const std::string item = text.substr(start, end - start);
        const std::size_t colon = item.find(':');
        if (item.empty() || colon == std::string::npos)
            throw ConfigError("config: modes must be 'energy:weight[,energy:weight...]'");
        try {
            out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
        } catch (const std::exception&) {
            throw ConfigError("config: bad number in modes '" + item + "'");
        }
        start = end + 1;
        if (end == text.size()) break;
    }
    if (out.empty()) throw ConfigError("config: empty mode list");
    return out;
}

void load_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");

    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "ple_window") cfg.ple_window = value.get<int>();
            else if (key == "pl_window") cfg.pl_window = value.get<int>();
            else if (key == "ple_residual_max") cfg.ple_residual_max = value.get<double>();
            else if (key == "ple_min_height") cfg.ple_min_height = value.get<double>();
            else if (key == "pl_residual_max") cfg.pl_residual_max = value.get<double>();
            else if (key == "pl_min_height") cfg.pl_min_height = value.get<double>();
            else if (key == "min_count_rate") cfg.min_count_rate = value.get<double>();
            else if (key == "stability_max") cfg.stability_max = value.get<double>();
            else if (key == "g2_max") cfg.g2_max = value.get<double>();
            else if (key == "fit_residual_max") cfg.fit_residual_max = value.get<double>();
            else if (key == "bleach_ratio") cfg.bleach_ratio = value.get<double>();
            else if (key == "stability_bin") cfg.stability_bin = value.get<double>();
            else if (key == "rep_period") cfg.rep_period = value.get<double>();
            else if (key == "g2_side_peaks") cfg.g2_side_peaks = value.get<int>();
            else if (key == "scan_step") cfg.scan_step = value.get<double>();
            else if (key == "neighbor_offset") cfg.neighbor_offset = value.get<int>();
            else if (key == "brightness_ratio") cfg.brightness_ratio = value.get<double>();
            else if (key == "flake_threshold") cfg.flake_threshold = value.get<double>();
            else if (key == "pixel_size") cfg.pixel_size = value.get<double>();
            else if (key == "density_window") cfg.density_window = value.get<double>();
            else if (key == "density_step") cfg.density_step = value.get<double>();
            else if (key == "slice_width") cfg.slice_width = value.get<double>();
            else if (key == "slice_step") cfg.slice_step = value.get<double>();
            else if (key == "max_detuning") cfg.max_detuning = value.get<double>();
            else if (key == "raw_density") cfg.raw_density = value.get<bool>();
            else if (key == "zpl_window_lo") cfg.zpl_window_lo = value.get<double>();
            else if (key == "zpl_window_hi") cfg.zpl_window_hi = value.get<double>();
            else if (key == "fit_max_iter") cfg.fit_max_iter = value.get<int>();
            else if (key == "fit_tol_cost") cfg.fit_tol_cost = value.get<double>();
            else if (key == "fit_tol_step") cfg.fit_tol_step = value.get<double>();
            else if (key == "fit_damping_init") cfg.fit_damping_init = value.get<double>();
            else if (key == "fit_damping_cap") cfg.fit_damping_cap = value.get<double>();
            else if (key == "sim_modes") {
                std::vector<std::pair<double, double>> modes;
                for (const auto& m : value) {
                    if (!m.is_array() || m.size() != 2)
                        throw ConfigError("config: sim_modes entries must be [energy, weight]");
                    modes.emplace_back(m[0].get<double>(), m[1].get<double>());
                }
                cfg.sim_modes = std::move(modes);
            }
            else if (key == "sim_jitter") cfg.sim_jitter = value.get<double>();
            else if (key == "sim_range_lo") cfg.sim_range_lo = value.get<double>();
            else if (key == "sim_range_hi") cfg.sim_range_hi = value.get<double>();
            else if (key == "sim_duplication") cfg.sim_duplication = value.get<int>();
            else if (key == "sim_zpl_count") cfg.sim_zpl_count = value.get<int>();
            else if (key == "synth_sigma") cfg.synth_sigma = value.get<double>();
            else if (key == "synth_noise") cfg.synth_noise = value.get<double>();
            else if (key == "synth_decay") cfg.synth_decay = value.get<double>();
            else if (key == "grid_lo_nm") cfg.grid_lo_nm = value.get<double>();
            else if (key == "grid_hi_nm") cfg.grid_hi_nm = value.get<double>();
            else if (key == "grid_step_nm") cfg.grid_step_nm = value.get<double>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "jobs") cfg.jobs = value.get<int>();
            else throw ConfigError("config: unknown key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("config: key '" + key + "': " + e.what());
        }
    }
}

}  // namespace spectool::cli
