#include "spectool/cli.hpp"

#include "spectool/afm.hpp"
#include "spectool/csv.hpp"
#include "spectool/gaussmodel.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <thread>

namespace spectool::cli {

namespace fs = std::filesystem;

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs) : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

int run_detect(const PipelineConfig& cfg, const fs::path& scan_file, std::ostream& out) {
    cfg.validate();
    const io::GridData grid = io::read_grid(scan_file);
    qc::ScanImage scan;
    scan.pixels = grid.values;
    scan.rows = grid.rows;
    scan.cols = grid.cols;
    scan.step_um = cfg.scan_step;

    const auto spots = qc::detect_emitters(scan, cfg.detect_params());
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : spots) {
        j.push_back({{"centroid_um", {s.centroid_x_um, s.centroid_y_um}},
                     {"pixel_count", s.pixel_indices.size()},
                     {"peak_brightness", s.peak_brightness}});
    }
    out << j.dump(2) << '\n';
    std::cerr << "detect: " << spots.size() << " spot(s) in " << scan.rows << "x" << scan.cols
              << " scan\n";
    return 0;
}

namespace {

const char* status_str(qc::CriterionStatus s) {
    switch (s) {
        case qc::CriterionStatus::Pass: return "pass";
        case qc::CriterionStatus::Fail: return "fail";
        case qc::CriterionStatus::NotEvaluable: return "not_evaluable";
        default: return "not_evaluated";
    }
}

std::string opt_str(const std::optional<double>& v) {
    return v ? io::fmt_double(*v) : std::string{};
}

// Per-field lenient record loading: a missing or unreadable file leaves the
// field absent so the selection marks it not-evaluable instead of aborting.
core::EmitterRecord load_record_lenient(const fs::path& base, const io::ManifestEntry& e,
                                        std::vector<std::string>& warnings) {
    core::EmitterRecord rec;
    rec.id = e.id;
    auto attempt = [&](const std::string& rel, auto&& loader, auto&& assign) {
        if (rel.empty()) return;
        try {
            assign(loader(base / rel));
        } catch (const std::exception& ex) {
            warnings.push_back(ex.what());
        }
    };
    attempt(e.ple, io::read_spectrum, [&](core::Spectrum s) { rec.ple = std::move(s); });
    attempt(e.pl, io::read_spectrum, [&](core::Spectrum s) { rec.pl = std::move(s); });
    attempt(e.trace, io::read_trace, [&](core::CountTrace t) { rec.trace = std::move(t); });
    attempt(e.g2, io::read_g2, [&](core::G2Histogram g) { rec.g2 = std::move(g); });
    attempt(e.opt_x, io::read_trace,
            [&](core::CountTrace t) { rec.optimization_traces.push_back(std::move(t)); });
    attempt(e.opt_y, io::read_trace,
            [&](core::CountTrace t) { rec.optimization_traces.push_back(std::move(t)); });
    attempt(e.saturation, io::read_spectrum,
            [&](core::Spectrum s) { rec.saturation = std::move(s); });
    return rec;
}

}  // namespace

int run_qc(const PipelineConfig& cfg, const fs::path& dataset_dir, const fs::path& out_dir) {
    cfg.validate();
    auto entries = io::read_manifest(dataset_dir / "manifest.csv");
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    const auto params = cfg.qc_params();
    std::vector<qc::SelectionReport> reports(entries.size());
    std::vector<std::vector<std::string>> warnings(entries.size());
    parallel_for(entries.size(), cfg.jobs, [&](std::size_t i) {
        const auto rec = load_record_lenient(dataset_dir, entries[i], warnings[i]);
        reports[i] = qc::select_emitter(rec, params);
    });

    std::size_t bleached = 0, passed = 0;
    fs::create_directories(out_dir);
    std::ofstream out(out_dir / "qc_report.csv", std::ios::binary);
    if (!out) throw io::IoError("cannot write " + (out_dir / "qc_report.csv").string());
    out << "id,bleached,mean_rate_cps,stability_metric,g2_zero,fit_max_residual,"
           "stability_status,g2_status,fit_status,passed\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        for (const auto& w : warnings[i]) std::cerr << "qc: emitter " << r.emitter_id << ": " << w << '\n';
        out << r.emitter_id << ',' << (r.bleached ? "true" : "false") << ','
            << opt_str(r.stability.mean_rate_cps) << ',' << opt_str(r.stability.stability_metric)
            << ',' << opt_str(r.g2.g2_zero) << ',' << opt_str(r.fit_quality.max_abs_residual)
            << ',' << status_str(r.stability.status) << ',' << status_str(r.g2.status) << ','
            << status_str(r.fit_quality.status) << ',' << (r.passed ? "true" : "false") << '\n';
        bleached += r.bleached ? 1 : 0;
        passed += r.passed ? 1 : 0;
    }
    std::cerr << "qc: measured=" << reports.size() << " bleached=" << bleached
              << " passed=" << passed << '\n';
    return 0;
}

int run_fit(const PipelineConfig& cfg, const fs::path& dataset_dir, const fs::path& out_dir,
            const FitCommandOptions& opts) {
    cfg.validate();
    auto entries = io::read_manifest(dataset_dir / "manifest.csv");
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    if (!opts.qc_report.empty()) {
        std::set<int> keep;
        std::ifstream in(opts.qc_report);
        if (!in) throw io::IoError("cannot open " + opts.qc_report.string());
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            const auto cells = io::split(line, ',');
            if (cells.size() >= 10 && cells.back() == "true")
                keep.insert(static_cast<int>(std::stol(cells[0])));
        }
        std::erase_if(entries, [&](const auto& e) { return !keep.contains(e.id); });
    }

    const auto ple_params = cfg.ple_params();
    std::vector<std::optional<fitting::TransitionSet>> results(entries.size());
    std::vector<std::string> errors(entries.size());
    parallel_for(entries.size(), cfg.jobs, [&](std::size_t i) {
        const auto& e = entries[i];
        if (e.ple.empty()) {
            errors[i] = "no PLE spectrum";
            return;
        }
        try {
            const core::Spectrum ple = io::read_spectrum(dataset_dir / e.ple);
            const fitting::PleAnalysis analysis = fitting::analyze_ple(ple, ple_params);
            if (!analysis.ok) {
                errors[i] = analysis.message;
                return;
            }
            double zpl = std::numeric_limits<double>::quiet_NaN();
            if (!e.pl.empty())
                zpl = fitting::extract_zpl(io::read_spectrum(dataset_dir / e.pl));
            results[i] = fitting::extract_transitions(analysis.fit, analysis.fitted, e.id, zpl);
        } catch (const std::exception& ex) {
            errors[i] = ex.what();
        }
    });

    std::vector<fitting::TransitionSet> sets;
    std::size_t window_dropped = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i]) {
            std::cerr << "fit: emitter " << entries[i].id << " skipped: " << errors[i] << '\n';
            continue;
        }
        if (opts.apply_zpl_window) {
            const double z = results[i]->zpl_energy;
            if (!(z >= cfg.zpl_window_lo && z <= cfg.zpl_window_hi)) {
                ++window_dropped;
                continue;
            }
        }
        sets.push_back(std::move(*results[i]));
    }
    fs::create_directories(out_dir);
    io::write_transitions(out_dir / "transitions.csv", sets);
    std::cerr << "fit: " << sets.size() << " emitter(s) written";
    if (opts.apply_zpl_window) std::cerr << ", " << window_dropped << " outside the ZPL window";
    std::cerr << '\n';
    return 0;
}

int run_correlate(const PipelineConfig& cfg, const fs::path& transitions_file,
                  const fs::path& out_dir, bool from_zpl) {
    cfg.validate();
    std::size_t skipped = 0;
    const auto sets = io::read_transitions(transitions_file, &skipped);
    if (skipped)
        std::cerr << "correlate: skipped " << skipped << " malformed row(s) in "
                  << transitions_file.string() << '\n';

    correlation::DensityMap density = correlation::spacing_density(sets, cfg.density_params());
    if (!cfg.raw_density && !sets.empty()) {
        const double n = static_cast<double>(sets.size());
        for (double& v : density.values) v /= n;
    }
    const correlation::HeatMap heatmap = correlation::build_heatmap(sets, cfg.heatmap_params());

    fs::create_directories(out_dir);
    io::write_density(out_dir / "density.csv", density);
    io::write_heatmap(out_dir / "heatmap.csv", heatmap);
    if (from_zpl) {
        correlation::DensityMap zd = correlation::zpl_distance_density(sets, cfg.density_params());
        if (!cfg.raw_density && !sets.empty()) {
            const double n = static_cast<double>(sets.size());
            for (double& v : zd.values) v /= n;
        }
        io::write_density(out_dir / "zpl_density.csv", zd);
    }
    std::cerr << "correlate: " << sets.size() << " emitter(s), "
              << heatmap.slice_centers.size() << " heatmap rows\n";
    return 0;
}

namespace {

// Normalized PLE lineshape on the wavelength grid: one Gaussian per placed
// transition with amplitudes decaying by placement order, plus clamped
// uniform noise.
core::Spectrum synth_ple(const sim::SimEmitter& em, const PipelineConfig& cfg, sim::Rng& rng) {
    std::vector<double> axis_nm, inten;
    for (double nm = cfg.grid_lo_nm; nm <= cfg.grid_hi_nm + 1e-9; nm += cfg.grid_step_nm)
        axis_nm.push_back(nm);
    inten.resize(axis_nm.size(), 0.0);
    for (std::size_t i = 0; i < axis_nm.size(); ++i) {
        const double ev = core::wavelength_to_energy(axis_nm[i]);
        double v = 0.0;
        for (std::size_t k = 0; k < em.transitions.size(); ++k)
            v += std::pow(cfg.synth_decay, static_cast<double>(k)) *
                 gaussmodel::gauss(1.0, em.transitions[k], cfg.synth_sigma, ev);
        if (cfg.synth_noise > 0.0) v += cfg.synth_noise * (2.0 * rng.uniform() - 1.0);
        inten[i] = std::max(v, 0.0);
    }
    return core::Spectrum(std::move(axis_nm), std::move(inten), core::AxisUnit::Nanometer);
}

// Narrow emission line at the ZPL so the fit pipeline can recover it.
core::Spectrum synth_pl(double zpl_ev) {
    std::vector<double> axis_nm, inten;
    for (double nm = 550.0; nm <= 600.0 + 1e-9; nm += 0.5) {
        axis_nm.push_back(nm);
        inten.push_back(gaussmodel::gauss(1000.0, zpl_ev, 0.010, core::wavelength_to_energy(nm)));
    }
    return core::Spectrum(std::move(axis_nm), std::move(inten), core::AxisUnit::Nanometer);
}

}  // namespace

int run_simulate(const PipelineConfig& cfg, const fs::path& out_dir,
                 const SimulateCommandOptions& opts) {
    cfg.validate();
    std::vector<double> zpls;
    if (!opts.zpl_file.empty()) {
        std::ifstream in(opts.zpl_file);
        if (!in) throw io::IoError("cannot open " + opts.zpl_file.string());
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            zpls.push_back(io::parse_double(line));
        }
        if (zpls.empty()) throw io::IoError(opts.zpl_file.string() + ": no ZPL values");
    } else {
        zpls = sim::synthetic_zpls(cfg.sim_zpl_count, cfg.seed);
    }

    const auto emitters = sim::generate_dataset(zpls, cfg.sim_config());

    std::vector<fitting::TransitionSet> sets;
    sets.reserve(emitters.size());
    for (std::size_t i = 0; i < emitters.size(); ++i) {
        fitting::TransitionSet ts;
        ts.emitter_id = static_cast<int>(i);
        ts.zpl_energy = emitters[i].zpl;
        ts.transitions = emitters[i].transitions;
        for (std::size_t a = 0; a < ts.transitions.size(); ++a)
            for (std::size_t b = a + 1; b < ts.transitions.size(); ++b)
                ts.pairwise_diffs.push_back(ts.transitions[b] - ts.transitions[a]);
        sets.push_back(std::move(ts));
    }
    fs::create_directories(out_dir);
    io::write_transitions(out_dir / "transitions.csv", sets);

    if (opts.spectra) {
        const fs::path data_dir = out_dir / "dataset";
        fs::create_directories(data_dir);
        std::vector<io::ManifestEntry> manifest(emitters.size());
        parallel_for(emitters.size(), cfg.jobs, [&](std::size_t i) {
            // spectra noise draws come from a substream disjoint from the
            // walk substreams, so --spectra does not change the transitions
            sim::Rng rng(sim::Rng::substream_seed(cfg.seed, 0x100000000ULL + i));
            io::ManifestEntry& e = manifest[i];
            e.id = static_cast<int>(i);
            e.ple = "em_" + std::to_string(i) + "_ple.csv";
            e.pl = "em_" + std::to_string(i) + "_pl.csv";
            io::write_spectrum(data_dir / e.ple, synth_ple(emitters[i], cfg, rng));
            io::write_spectrum(data_dir / e.pl, synth_pl(emitters[i].zpl));
        });
        io::write_manifest(data_dir / "manifest.csv", manifest);

        nlohmann::json prov;
        prov["source"] = "spectool simulate";
        prov["seed"] = cfg.seed;
        prov["emitters"] = emitters.size();
        prov["zpl_source"] = opts.zpl_file.empty() ? "synthetic" : opts.zpl_file.string();
        prov["noise"] = cfg.synth_noise;
        std::ofstream pj(data_dir / "provenance.json", std::ios::binary);
        pj << prov.dump(2) << '\n';
    }
    std::cerr << "simulate: " << emitters.size() << " emitter(s)"
              << (opts.spectra ? " with synthetic spectra" : "") << '\n';
    return 0;
}

int run_afm(const PipelineConfig& cfg, const fs::path& heightmap_file, const fs::path& out_dir) {
    cfg.validate();
    const io::GridData grid = io::read_grid(heightmap_file);
    afm::HeightMap map;
    map.pixels = grid.values;
    map.rows = grid.rows;
    map.cols = grid.cols;
    map.pixel_size_nm = cfg.pixel_size;

    const afm::HeightMap corrected = afm::correct_tilt(map);
    const auto flakes = afm::segment_flakes(corrected, cfg.flake_threshold);
    std::vector<afm::FlakeStats> stats;
    stats.reserve(flakes.size());
    for (const auto& f : flakes) stats.push_back(afm::flake_stats(corrected, f));

    fs::create_directories(out_dir);
    std::ofstream out(out_dir / "flakes.csv", std::ios::binary);
    if (!out) throw io::IoError("cannot write " + (out_dir / "flakes.csv").string());
    out << "flake,pixel_count,mean_height_nm,area_nm2,equiv_diameter_nm,layers\n";
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto& s = stats[i];
        out << i << ',' << s.pixel_count << ',' << io::fmt_double(s.mean_height_nm) << ','
            << io::fmt_double(s.area_nm2) << ',' << io::fmt_double(s.equiv_diameter_nm) << ','
            << io::fmt_double(s.layers) << '\n';
    }

    nlohmann::json j;
    j["flake_count"] = stats.size();
    if (!stats.empty()) {
        const afm::AggregateStats agg = afm::aggregate_stats(stats);
        auto block = [](const afm::AggregateStats::Moments& m) {
            return nlohmann::json{{"mean", m.mean}, {"std", m.std}, {"min", m.min}, {"max", m.max}};
        };
        j["height_nm"] = block(agg.height_nm);
        j["layers"] = block(agg.layers);
        j["diameter_nm"] = block(agg.diameter_nm);
    }
    std::ofstream js(out_dir / "afm_summary.json", std::ios::binary);
    if (!js) throw io::IoError("cannot write " + (out_dir / "afm_summary.json").string());
    js << j.dump(2) << '\n';
    std::cerr << "afm: " << stats.size() << " flake(s)\n";
    return 0;
}

}  // namespace spectool::cli
