// spectool: batch analysis of single-photon-emitter spectroscopy data.
// Subcommands: detect, qc, fit, correlate, simulate, afm.
#include "spectool/cli.hpp"
#include "spectool/csv.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

using spectool::cli::PipelineConfig;

// Registers one flag per scalar config field; values supplied on the command
// line win over the config file, which wins over the defaults.
struct ConfigFlags {
    PipelineConfig parsed;  // bound to CLI11
    std::string modes_text;

    void attach(CLI::App& app) {
        auto& c = parsed;
        app.add_option("--ple_window", c.ple_window, "PLE peak preselection window (points)");
        app.add_option("--pl_window", c.pl_window, "PL peak preselection window (points)");
        app.add_option("--ple_residual_max", c.ple_residual_max, "PLE vet residual threshold");
        app.add_option("--ple_min_height", c.ple_min_height, "PLE vet amplitude threshold");
        app.add_option("--pl_residual_max", c.pl_residual_max, "PL vet residual threshold");
        app.add_option("--pl_min_height", c.pl_min_height, "PL vet amplitude threshold");
        app.add_option("--min_count_rate", c.min_count_rate, "criterion 1 brightness (counts/s)");
        app.add_option("--stability_max", c.stability_max, "criterion 1 stability threshold");
        app.add_option("--g2_max", c.g2_max, "criterion 2 g2(0) threshold");
        app.add_option("--fit_residual_max", c.fit_residual_max, "criterion 3 residual threshold");
        app.add_option("--bleach_ratio", c.bleach_ratio, "bleaching contrast threshold");
        app.add_option("--stability_bin", c.stability_bin, "stability binning window (s)");
        app.add_option("--rep_period", c.rep_period, "laser repetition period (s)");
        app.add_option("--g2_side_peaks", c.g2_side_peaks, "side peaks per side for g2(0)");
        app.add_option("--scan_step", c.scan_step, "confocal scan step (um/px)");
        app.add_option("--neighbor_offset", c.neighbor_offset, "detection neighbor distance (px)");
        app.add_option("--brightness_ratio", c.brightness_ratio, "detection brightness ratio");
        app.add_option("--flake_threshold", c.flake_threshold, "AFM flake height threshold (nm)");
        app.add_option("--pixel_size", c.pixel_size, "AFM pixel size (nm/px)");
        app.add_option("--density_window", c.density_window, "density window width (eV)");
        app.add_option("--density_step", c.density_step, "density window step (eV)");
        app.add_option("--slice_width", c.slice_width, "heatmap slicing interval width (eV)");
        app.add_option("--slice_step", c.slice_step, "heatmap slicing interval step (eV)");
        app.add_option("--max_detuning", c.max_detuning, "density range upper edge (eV)");
        app.add_flag("--raw_density", c.raw_density, "emit raw counts instead of per-emitter densities");
        app.add_option("--zpl_window_lo", c.zpl_window_lo, "ZPL window lower edge (eV)");
        app.add_option("--zpl_window_hi", c.zpl_window_hi, "ZPL window upper edge (eV)");
        app.add_option("--fit_max_iter", c.fit_max_iter, "LM iteration cap");
        app.add_option("--fit_tol_cost", c.fit_tol_cost, "LM relative cost tolerance");
        app.add_option("--fit_tol_step", c.fit_tol_step, "LM step norm tolerance");
        app.add_option("--fit_damping_init", c.fit_damping_init, "LM initial damping");
        app.add_option("--fit_damping_cap", c.fit_damping_cap, "LM damping cap");
        app.add_option("--sim_modes", modes_text, "phonon modes as energy:weight[,...] (eV)");
        app.add_option("--sim_jitter", c.sim_jitter, "placement jitter sigma (eV)");
        app.add_option("--sim_range_lo", c.sim_range_lo, "simulation range lower edge (eV)");
        app.add_option("--sim_range_hi", c.sim_range_hi, "simulation range upper edge (eV)");
        app.add_option("--sim_duplication", c.sim_duplication, "ZPL list duplication factor");
        app.add_option("--sim_zpl_count", c.sim_zpl_count, "synthetic ZPL count when no file given");
        app.add_option("--synth_sigma", c.synth_sigma, "synthetic PLE line sigma (eV)");
        app.add_option("--synth_noise", c.synth_noise, "synthetic PLE uniform noise amplitude");
        app.add_option("--synth_decay", c.synth_decay, "synthetic PLE amplitude decay per line");
        app.add_option("--grid_lo_nm", c.grid_lo_nm, "synthetic PLE grid start (nm)");
        app.add_option("--grid_hi_nm", c.grid_hi_nm, "synthetic PLE grid end (nm)");
        app.add_option("--grid_step_nm", c.grid_step_nm, "synthetic PLE grid step (nm)");
        app.add_option("--seed", c.seed, "random seed");
        app.add_option("--jobs", c.jobs, "worker threads (0 = all cores)");
    }

    // flag > config file > default
    void merge_into(PipelineConfig& cfg, const CLI::App& app) const {
        for (const CLI::Option* opt : app.get_options()) {
            if (opt->count() == 0) continue;
            apply_one(cfg, opt->get_name());
        }
    }

private:
    void apply_one(PipelineConfig& cfg, const std::string& name) const {
        const auto& c = parsed;
        if (name == "--ple_window") cfg.ple_window = c.ple_window;
        else if (name == "--pl_window") cfg.pl_window = c.pl_window;
        else if (name == "--ple_residual_max") cfg.ple_residual_max = c.ple_residual_max;
        else if (name == "--ple_min_height") cfg.ple_min_height = c.ple_min_height;
        else if (name == "--pl_residual_max") cfg.pl_residual_max = c.pl_residual_max;
        else if (name == "--pl_min_height") cfg.pl_min_height = c.pl_min_height;
        else if (name == "--min_count_rate") cfg.min_count_rate = c.min_count_rate;
        else if (name == "--stability_max") cfg.stability_max = c.stability_max;
        else if (name == "--g2_max") cfg.g2_max = c.g2_max;
        else if (name == "--fit_residual_max") cfg.fit_residual_max = c.fit_residual_max;
        else if (name == "--bleach_ratio") cfg.bleach_ratio = c.bleach_ratio;
        else if (name == "--stability_bin") cfg.stability_bin = c.stability_bin;
        else if (name == "--rep_period") cfg.rep_period = c.rep_period;
        else if (name == "--g2_side_peaks") cfg.g2_side_peaks = c.g2_side_peaks;
        else if (name == "--scan_step") cfg.scan_step = c.scan_step;
        else if (name == "--neighbor_offset") cfg.neighbor_offset = c.neighbor_offset;
        else if (name == "--brightness_ratio") cfg.brightness_ratio = c.brightness_ratio;
        else if (name == "--flake_threshold") cfg.flake_threshold = c.flake_threshold;
        else if (name == "--pixel_size") cfg.pixel_size = c.pixel_size;
        else if (name == "--density_window") cfg.density_window = c.density_window;
        else if (name == "--density_step") cfg.density_step = c.density_step;
        else if (name == "--slice_width") cfg.slice_width = c.slice_width;
        else if (name == "--slice_step") cfg.slice_step = c.slice_step;
        else if (name == "--max_detuning") cfg.max_detuning = c.max_detuning;
        else if (name == "--raw_density") cfg.raw_density = c.raw_density;
        else if (name == "--zpl_window_lo") cfg.zpl_window_lo = c.zpl_window_lo;
        else if (name == "--zpl_window_hi") cfg.zpl_window_hi = c.zpl_window_hi;
        else if (name == "--fit_max_iter") cfg.fit_max_iter = c.fit_max_iter;
        else if (name == "--fit_tol_cost") cfg.fit_tol_cost = c.fit_tol_cost;
        else if (name == "--fit_tol_step") cfg.fit_tol_step = c.fit_tol_step;
        else if (name == "--fit_damping_init") cfg.fit_damping_init = c.fit_damping_init;
        else if (name == "--fit_damping_cap") cfg.fit_damping_cap = c.fit_damping_cap;
        else if (name == "--sim_modes") cfg.sim_modes = spectool::cli::parse_modes(modes_text);
        else if (name == "--sim_jitter") cfg.sim_jitter = c.sim_jitter;
        else if (name == "--sim_range_lo") cfg.sim_range_lo = c.sim_range_lo;
        else if (name == "--sim_range_hi") cfg.sim_range_hi = c.sim_range_hi;
        else if (name == "--sim_duplication") cfg.sim_duplication = c.sim_duplication;
        else if (name == "--sim_zpl_count") cfg.sim_zpl_count = c.sim_zpl_count;
        else if (name == "--synth_sigma") cfg.synth_sigma = c.synth_sigma;
        else if (name == "--synth_noise") cfg.synth_noise = c.synth_noise;
        else if (name == "--synth_decay") cfg.synth_decay = c.synth_decay;
        else if (name == "--grid_lo_nm") cfg.grid_lo_nm = c.grid_lo_nm;
        else if (name == "--grid_hi_nm") cfg.grid_hi_nm = c.grid_hi_nm;
        else if (name == "--grid_step_nm") cfg.grid_step_nm = c.grid_step_nm;
        else if (name == "--seed") cfg.seed = c.seed;
        else if (name == "--jobs") cfg.jobs = c.jobs;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch spectroscopy analysis for single-photon emitters"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::string out_dir = ".";
    app.add_option("--config", config_path, "JSON config file")->expected(1);
    app.add_option("--out", out_dir, "output directory");

    ConfigFlags flags;
    flags.attach(app);

    std::string scan_file, dataset_dir, transitions_file, heightmap_file, zpl_file, qc_report;
    bool from_zpl = false, spectra = false, zpl_window = false;

    CLI::App* cmd_detect = app.add_subcommand("detect", "find fluorescent spots in a confocal scan");
    cmd_detect->add_option("scan", scan_file, "scan CSV (row-major counts)")->required();

    CLI::App* cmd_qc = app.add_subcommand("qc", "run the three-criterion emitter selection");
    cmd_qc->add_option("dataset", dataset_dir, "dataset directory with manifest.csv")->required();

    CLI::App* cmd_fit = app.add_subcommand("fit", "peak search and multi-Gaussian fit per emitter");
    cmd_fit->add_option("dataset", dataset_dir, "dataset directory with manifest.csv")->required();
    cmd_fit->add_flag("--zpl-window", zpl_window, "keep only emitters with ZPL inside the config window");
    cmd_fit->add_option("--qc-report", qc_report, "restrict to emitters that passed this qc report");

    CLI::App* cmd_corr = app.add_subcommand("correlate", "spacing densities and the conditional heatmap");
    cmd_corr->add_option("transitions", transitions_file, "transitions CSV")->required();
    cmd_corr->add_flag("--from-zpl", from_zpl, "also write the ZPL-distance density");

    CLI::App* cmd_sim = app.add_subcommand("simulate", "Monte Carlo toy transition sets");
    cmd_sim->add_flag("--spectra", spectra, "also synthesize PLE/PL spectra as a dataset");
    cmd_sim->add_option("--zpl-file", zpl_file, "measured ZPL list (eV, one per line)");

    CLI::App* cmd_afm = app.add_subcommand("afm", "flake morphometry on an AFM height map");
    cmd_afm->add_option("heightmap", heightmap_file, "height map CSV (nm)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig cfg;
        if (!config_path.empty()) spectool::cli::load_config_file(cfg, config_path);
        flags.merge_into(cfg, app);

        if (cmd_detect->parsed()) return spectool::cli::run_detect(cfg, scan_file, std::cout);
        if (cmd_qc->parsed()) return spectool::cli::run_qc(cfg, dataset_dir, out_dir);
        if (cmd_fit->parsed()) {
            spectool::cli::FitCommandOptions opts;
            opts.apply_zpl_window = zpl_window;
            opts.qc_report = qc_report;
            return spectool::cli::run_fit(cfg, dataset_dir, out_dir, opts);
        }
        if (cmd_corr->parsed())
            return spectool::cli::run_correlate(cfg, transitions_file, out_dir, from_zpl);
        if (cmd_sim->parsed()) {
            spectool::cli::SimulateCommandOptions opts;
            opts.spectra = spectra;
            opts.zpl_file = zpl_file;
            return spectool::cli::run_simulate(cfg, out_dir, opts);
        }
        if (cmd_afm->parsed()) return spectool::cli::run_afm(cfg, heightmap_file, out_dir);
        std::cerr << "no subcommand given\n";
        return 1;
    } catch (const spectool::cli::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
