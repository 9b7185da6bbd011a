#include "jch/run.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace jch {

namespace {

using nlohmann::json;

std::string utc_now_string() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
        f << text;
        if (!f.good()) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename to '" + path.string() + "' failed: " + ec.message());
}

void write_manifest(Command cmd, const RunConfig& cfg, const std::filesystem::path& out_csv) {
    json m;
    m["artifact"] = kArtifactName;
    m["version"] = kArtifactVersion;
    m["command"] = command_name(cmd);
    m["output"] = out_csv.filename().string();
    m["generated_utc"] = utc_now_string();
    m["seed"] = cfg.noise.seed;
    m["config"] = config_to_json(cfg);
    write_text_atomic(out_csv.string() + ".manifest.json", m.dump(2) + "\n");
}

std::vector<double> spectrum_grid(const RunConfig& cfg) {
    if (!cfg.spectrum_deltas_khz.empty()) return cfg.spectrum_deltas_khz;
    std::vector<double> grid;
    for (double d = -50.0; d <= 50.0 + 1e-9; d += 1.0) grid.push_back(d);
    return grid;
}

void cmd_spectrum(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
    const double g = cfg.g_khz.front();
    const auto grid = spectrum_grid(cfg);
    CsvSchema schema{{"delta_khz", "e_minus_khz", "e_plus_khz"}};
    std::vector<CsvRow> rows;
    rows.reserve(grid.size());
    for (double d : grid) {
        const JcEigen eig = jc_eigen(d, g, 1);
        rows.push_back({d, eig.e_minus, eig.e_plus});
    }
    write_csv(out, schema, rows);
    log << "spectrum: " << rows.size() << " detunings, g = " << g << " kHz\n";
}

CsvSchema evolve_schema(int n_sites, bool with_stderr) {
    CsvSchema schema;
    schema.columns.push_back("time_us");
    for (int s = 1; s <= n_sites; ++s) {
        for (const char* base :
             {"p_e_", "p_ntot_ge1_", "p_ntot_ge2_", "p_nph_ge1_", "n_tot_mean_"}) {
            schema.columns.push_back(base + std::to_string(s));
            if (with_stderr) schema.columns.push_back(base + std::to_string(s) + "_stderr");
        }
    }
    return schema;
}

std::vector<CsvRow> evolve_rows(const TrajectoryRecord& mean,
                                const TrajectoryRecord* stderr_opt) {
    std::vector<CsvRow> rows;
    rows.reserve(mean.n_samples());
    for (std::size_t t = 0; t < mean.n_samples(); ++t) {
        CsvRow row;
        row.push_back(mean.times_us[t]);
        for (std::size_t s = 0; s < mean.sites.size(); ++s) {
            const auto& m = mean.sites[s];
            auto push = [&](const std::vector<double> TrajectoryRecord::SiteSeries::* mem) {
                row.push_back((m.*mem)[t]);
                if (stderr_opt) row.push_back((stderr_opt->sites[s].*mem)[t]);
            };
            push(&TrajectoryRecord::SiteSeries::p_e);
            push(&TrajectoryRecord::SiteSeries::p_ntot_ge1);
            push(&TrajectoryRecord::SiteSeries::p_ntot_ge2);
            push(&TrajectoryRecord::SiteSeries::p_nph_ge1);
            push(&TrajectoryRecord::SiteSeries::n_tot_mean);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void cmd_evolve(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
    const JchParams params = make_params(cfg);
    const CompositeSpace space = make_space(cfg);
    PulseSequence seq;
    seq.dt_out_us = cfg.dt_out_us;
    seq.segments.push_back(PulseSegment::simulation(params, cfg.duration_us));

    if (cfg.noiseless) {
        const TrajectoryRecord traj = run_sequence(seq, cfg.init, params, space);
        write_csv(out, evolve_schema(cfg.n_sites, false), evolve_rows(traj, nullptr));
        log << "evolve: noiseless, " << traj.n_samples() << " samples over "
            << cfg.duration_us << " us\n";
    } else {
        const EnsembleResult ens = ensemble_run(seq, cfg.init, params, space, cfg.noise,
                                                {0.0, cfg.duration_us}, cfg.workers);
        write_csv(out, evolve_schema(cfg.n_sites, true), evolve_rows(ens.mean, &ens.stderr_));
        log << "evolve: " << ens.shots << " shots, seed " << cfg.noise.seed << ", "
            << ens.mean.n_samples() << " samples\n";
    }
}

void cmd_leakage(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
    const JchParams params = make_params(cfg);
    const CompositeSpace space = make_space(cfg);
    const double duration = std::max(cfg.duration_us, cfg.window_us.second);
    PulseSequence seq;
    seq.dt_out_us = cfg.dt_out_us;
    seq.segments.push_back(PulseSegment::simulation(params, duration));

    const char* kind_name = cfg.leakage_kind == CountKind::polariton ? "polariton" : "phonon";
    CsvSchema schema{{"time_us", "leakage", "stderr"}};
    std::vector<CsvRow> rows;
    double mean = 0.0, se = 0.0;
    if (cfg.noiseless) {
        const TrajectoryRecord traj = run_sequence(seq, cfg.init, params, space);
        const auto& series = cfg.leakage_kind == CountKind::polariton
                                 ? traj.sites[cfg.leakage_site - 1].p_ntot_ge1
                                 : traj.sites[cfg.leakage_site - 1].p_nph_ge1;
        for (std::size_t t = 0; t < traj.n_samples(); ++t)
            rows.push_back({traj.times_us[t], series[t], 0.0});
        mean = time_averaged_leakage(traj, cfg.leakage_site, cfg.leakage_kind, cfg.window_us)
                   .mean_leakage;
    } else {
        const EnsembleResult ens =
            ensemble_run(seq, cfg.init, params, space, cfg.noise, cfg.window_us, cfg.workers);
        const auto& series = cfg.leakage_kind == CountKind::polariton
                                 ? ens.mean.sites[cfg.leakage_site - 1].p_ntot_ge1
                                 : ens.mean.sites[cfg.leakage_site - 1].p_nph_ge1;
        const auto& se_series = cfg.leakage_kind == CountKind::polariton
                                    ? ens.stderr_.sites[cfg.leakage_site - 1].p_ntot_ge1
                                    : ens.stderr_.sites[cfg.leakage_site - 1].p_nph_ge1;
        for (std::size_t t = 0; t < ens.mean.n_samples(); ++t)
            rows.push_back({ens.mean.times_us[t], series[t], se_series[t]});
        const LeakageResult leak =
            time_averaged_leakage(ens, cfg.leakage_site, cfg.leakage_kind);
        mean = leak.mean_leakage;
        se = leak.stderr_.value_or(0.0);
    }
    write_csv(out, schema, rows);
    log << "leakage: site " << cfg.leakage_site << " (" << kind_name << ") mean over ["
        << cfg.window_us.first << ", " << cfg.window_us.second << "] us = " << csv_format(mean);
    if (!cfg.noiseless) log << " +/- " << csv_format(se);
    log << "\n";
}

void cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
    const JchParams params = make_params(cfg);
    const CompositeSpace space = make_space(cfg);
    SweepSettings settings;
    settings.window_us = cfg.window_us;
    settings.dt_out_us = cfg.dt_out_us;
    settings.noiseless = cfg.noiseless;
    settings.workers = cfg.workers;
    settings.reference_branch = cfg.reference_branch;

    const auto rows = detuning_sweep(cfg.sweep_deltas_khz, cfg.init, params, space, cfg.noise,
                                     settings);
    CsvSchema schema{{"delta2_khz", "e_minus2_khz", "e_plus2_khz", "gap1_khz", "gap2_khz",
                      "mean_leakage", "stderr"}};
    std::vector<CsvRow> csv_rows;
    csv_rows.reserve(rows.size());
    for (const auto& r : rows)
        csv_rows.push_back(
            {r.delta2, r.e_minus2, r.e_plus2, r.gap_low, r.gap_high, r.mean_leakage, r.stderr_});
    write_csv(out, schema, csv_rows);
    log << "sweep: " << rows.size() << " detunings, "
        << (cfg.noiseless ? "noiseless" : std::to_string(cfg.noise.shots) + " shots/point")
        << "\n";
}

void cmd_compare(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
    const JchParams params = make_params(cfg);
    const CompositeSpace space = make_space(cfg);
    const BlockadeReport rep = blockade_comparison(params, space, cfg.noise, cfg.window_us,
                                                   cfg.dt_out_us, cfg.workers);
    CsvSchema schema{{"case", "delta2_khz", "init", "noiseless_leakage", "noisy_mean",
                      "noisy_stderr"}};
    std::vector<CsvRow> rows;
    rows.push_back({std::string("polariton"), -24.0, std::string("dressed_minus"),
                    rep.polariton_noiseless, rep.polariton_noisy, rep.polariton_noisy_stderr});
    rows.push_back({std::string("phonon"), 0.0, std::string("bare_phonon"),
                    rep.phonon_noiseless, rep.phonon_noisy, rep.phonon_noisy_stderr});
    write_csv(out, schema, rows);
    log << "compare: noiseless polariton " << csv_format(rep.polariton_noiseless)
        << ", noiseless phonon " << csv_format(rep.phonon_noiseless) << ", ratio "
        << csv_format(rep.ratio_noiseless) << "\n"
        << "compare: noisy polariton " << csv_format(rep.polariton_noisy) << " +/- "
        << csv_format(rep.polariton_noisy_stderr) << ", noisy phonon "
        << csv_format(rep.phonon_noisy) << " +/- " << csv_format(rep.phonon_noisy_stderr)
        << "\n";
}

void cmd_hopping_rate(const RunConfig& cfg, const std::filesystem::path& out,
                      std::ostream& log) {
    const ChainGeometry& geom = cfg.geometry;
    geom.validate();
    const double d = std::abs(geom.positions_um.at(1) - geom.positions_um.at(0));
    const double k_formula = hopping_rate(d, geom.radial_freq_khz, geom.ion_mass_amu);
    const JchParams params = make_params(cfg);
    const double k_configured = params.k_khz(0, 1);

    CsvSchema schema{{"d_um", "nu_khz", "mass_amu", "k_formula_khz", "k_configured_khz"}};
    std::vector<CsvRow> rows{
        {d, geom.radial_freq_khz, geom.ion_mass_amu, k_formula, k_configured}};
    write_csv(out, schema, rows);

    const double rel = 100.0 * (k_configured - k_formula) / k_formula;
    log << "hopping-rate: Coulomb formula with d = " << d << " um, nu = "
        << geom.radial_freq_khz << " kHz, m = " << geom.ion_mass_amu
        << " amu gives k12 = " << csv_format(k_formula) << " kHz\n"
        << "hopping-rate: configured value is " << csv_format(k_configured) << " kHz";
    if (std::abs(rel) > 0.5) {
        log << " — note: " << csv_format(rel)
            << "% discrepancy against the formula; the configured value is used for dynamics";
    }
    log << "\n";
}

}  // namespace

Command command_from_name(const std::string& name) {
    if (name == "spectrum") return Command::spectrum;
    if (name == "evolve") return Command::evolve;
    if (name == "leakage") return Command::leakage;
    if (name == "sweep") return Command::sweep;
    if (name == "compare") return Command::compare;
    if (name == "hopping-rate") return Command::hopping_rate;
    throw ConfigError("unknown command '" + name + "'");
}

std::string command_name(Command cmd) {
    switch (cmd) {
        case Command::spectrum: return "spectrum";
        case Command::evolve: return "evolve";
        case Command::leakage: return "leakage";
        case Command::sweep: return "sweep";
        case Command::compare: return "compare";
        case Command::hopping_rate: return "hopping-rate";
    }
    return "?";
}

void run_command(Command cmd, const RunConfig& cfg, const std::filesystem::path& out_csv,
                 std::ostream& log) {
    cfg.validate();
    if (out_csv.empty()) throw ConfigError("output path is empty");
    if (out_csv.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(out_csv.parent_path(), ec);
        if (ec) throw IoError("cannot create output directory: " + ec.message());
    }
    switch (cmd) {
        case Command::spectrum: cmd_spectrum(cfg, out_csv, log); break;
        case Command::evolve: cmd_evolve(cfg, out_csv, log); break;
        case Command::leakage: cmd_leakage(cfg, out_csv, log); break;
        case Command::sweep: cmd_sweep(cfg, out_csv, log); break;
        case Command::compare: cmd_compare(cfg, out_csv, log); break;
        case Command::hopping_rate: cmd_hopping_rate(cfg, out_csv, log); break;
    }
    write_manifest(cmd, cfg, out_csv);
}

int run_command_exit_code(Command cmd, const RunConfig& cfg,
                          const std::filesystem::path& out_csv, std::ostream& log,
                          std::ostream& err) {
    try {
        run_command(cmd, cfg, out_csv, log);
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        err << "i/o failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace jch
