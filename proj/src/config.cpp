#include "jch/config.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

namespace jch {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw ConfigError("config key '" + key + "': " + why);
}

void expect_known(const json& obj, const std::string& scope,
                  const std::set<std::string>& known) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.contains(key))
            throw ConfigError("unknown config key '" + (scope.empty() ? key : scope + "." + key) +
                              "'");
    }
}

double get_number(const json& j, const std::string& key) {
    if (!j.is_number()) bad_key(key, "expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& key) {
    if (!j.is_number_integer()) bad_key(key, "expected an integer");
    return j.get<int>();
}

std::vector<double> get_number_list(const json& j, const std::string& key) {
    if (j.is_number()) return {j.get<double>()};
    if (!j.is_array()) bad_key(key, "expected a number or an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) bad_key(key, "expected numeric entries");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<double> resolve_per_site(std::vector<double> values, int n_sites,
                                     const std::string& key) {
    if (static_cast<int>(values.size()) == 1) return std::vector<double>(n_sites, values[0]);
    if (static_cast<int>(values.size()) != n_sites)
        bad_key(key, "expected 1 or n_sites entries");
    return values;
}

Branch parse_branch(const json& j, const std::string& key) {
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    if (s == "minus") return Branch::minus;
    if (s == "plus") return Branch::plus;
    bad_key(key, "expected \"minus\" or \"plus\"");
}

std::pair<int, int> parse_bare_token(const std::string& tok, const std::string& key) {
    if (tok.size() < 2 || (tok[0] != 'g' && tok[0] != 'e'))
        bad_key(key, "bare entries look like \"g0\", \"e1\", ...");
    const int spin = tok[0] == 'e' ? 1 : 0;
    try {
        return {spin, std::stoi(tok.substr(1))};
    } catch (const std::exception&) {
        bad_key(key, "bare entries look like \"g0\", \"e1\", ...");
    }
}

InitialStateSpec parse_init(const json& j) {
    InitialStateSpec init;
    expect_known(j, "init",
                 {"mode", "variant", "site", "p", "branch", "bare", "carrier_rabi_khz",
                  "rsb_rabi_khz", "hopping_during_prep"});
    if (j.contains("mode")) {
        const std::string m = j["mode"].is_string() ? j["mode"].get<std::string>() : "";
        if (m == "ideal")
            init.mode = InitialStateSpec::Mode::ideal;
        else if (m == "pulsed")
            init.mode = InitialStateSpec::Mode::pulsed;
        else
            bad_key("init.mode", "expected \"ideal\" or \"pulsed\"");
    }
    if (j.contains("variant")) {
        const std::string v = j["variant"].is_string() ? j["variant"].get<std::string>() : "";
        if (v == "ground")
            init.variant = InitialStateSpec::Variant::ground;
        else if (v == "bare")
            init.variant = InitialStateSpec::Variant::bare;
        else if (v == "dressed")
            init.variant = InitialStateSpec::Variant::dressed;
        else if (v == "superposition")
            init.variant = InitialStateSpec::Variant::superposition;
        else
            bad_key("init.variant",
                    "expected \"ground\", \"bare\", \"dressed\" or \"superposition\"");
    }
    if (j.contains("site")) init.site = get_int(j["site"], "init.site");
    if (j.contains("p")) init.p = get_int(j["p"], "init.p");
    if (j.contains("branch")) init.branch = parse_branch(j["branch"], "init.branch");
    if (j.contains("bare")) {
        if (!j["bare"].is_array()) bad_key("init.bare", "expected an array of tokens");
        for (const auto& v : j["bare"]) {
            if (!v.is_string()) bad_key("init.bare", "expected string tokens");
            init.bare_locals.push_back(parse_bare_token(v.get<std::string>(), "init.bare"));
        }
    }
    if (j.contains("carrier_rabi_khz"))
        init.carrier_rabi_khz = get_number(j["carrier_rabi_khz"], "init.carrier_rabi_khz");
    if (j.contains("rsb_rabi_khz"))
        init.rsb_rabi_khz = get_number(j["rsb_rabi_khz"], "init.rsb_rabi_khz");
    if (j.contains("hopping_during_prep")) {
        if (!j["hopping_during_prep"].is_boolean())
            bad_key("init.hopping_during_prep", "expected a boolean");
        init.hopping_during_prep = j["hopping_during_prep"].get<bool>();
    }
    return init;
}

ChainGeometry parse_geometry(const json& j) {
    ChainGeometry g;
    expect_known(j, "geometry", {"ion_mass_amu", "radial_freq_khz", "positions_um"});
    if (j.contains("ion_mass_amu"))
        g.ion_mass_amu = get_number(j["ion_mass_amu"], "geometry.ion_mass_amu");
    if (j.contains("radial_freq_khz"))
        g.radial_freq_khz = get_number(j["radial_freq_khz"], "geometry.radial_freq_khz");
    if (j.contains("positions_um"))
        g.positions_um = get_number_list(j["positions_um"], "geometry.positions_um");
    return g;
}

NoiseModel parse_noise(const json& j, NoiseModel noise) {
    expect_known(j, "noise", {"nbar", "intensity_sigma", "shots", "seed", "correlation"});
    if (j.contains("nbar")) noise.nbar = get_number(j["nbar"], "noise.nbar");
    if (j.contains("intensity_sigma"))
        noise.intensity_sigma = get_number(j["intensity_sigma"], "noise.intensity_sigma");
    if (j.contains("shots")) noise.shots = get_int(j["shots"], "noise.shots");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) bad_key("noise.seed", "expected an integer");
        noise.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("correlation")) {
        const std::string c =
            j["correlation"].is_string() ? j["correlation"].get<std::string>() : "";
        if (c == "common")
            noise.correlation = NoiseModel::Correlation::common;
        else if (c == "independent")
            noise.correlation = NoiseModel::Correlation::independent;
        else
            bad_key("noise.correlation", "expected \"common\" or \"independent\"");
    }
    return noise;
}

}  // namespace

void RunConfig::validate() const {
    if (n_sites < 1) throw ConfigError("config key 'n_sites': must be >= 1");
    if (fock_cutoff < 0) throw ConfigError("config key 'fock_cutoff': must be >= 0");
    if (static_cast<int>(g_khz.size()) != n_sites)
        throw ConfigError("config key 'g_khz': expected one entry per site");
    if (static_cast<int>(delta_khz.size()) != n_sites)
        throw ConfigError("config key 'delta_khz': expected one entry per site");
    for (double g : g_khz)
        if (!std::isfinite(g) || g < 0)
            throw ConfigError("config key 'g_khz': entries must be finite and >= 0");
    if (duration_us < 0) throw ConfigError("config key 'duration_us': must be >= 0");
    if (dt_out_us <= 0) throw ConfigError("config key 'dt_out_us': must be positive");
    if (window_us.second < window_us.first)
        throw ConfigError("config key 'window_us': end before start");
    if (window_us.first < 0) throw ConfigError("config key 'window_us': must start at >= 0");
    noise.validate();
    if (k12_khz < 0) throw ConfigError("config key 'k12_khz': must be >= 0");
    if (k_khz) {
        if (k_khz->rows() != n_sites || k_khz->cols() != n_sites)
            throw ConfigError("config key 'k_khz': expected an n_sites x n_sites matrix");
    }
    if (leakage_site < 1 || leakage_site > n_sites)
        throw ConfigError("config key 'leakage_site': out of range");
    if (workers < 0) throw ConfigError("config key 'workers': must be >= 0");
    const bool excitation_requested =
        init.variant != InitialStateSpec::Variant::ground ||
        init.mode == InitialStateSpec::Mode::pulsed;
    if (excitation_requested && fock_cutoff < 1)
        throw ConfigError("config key 'fock_cutoff': must be >= 1 when an excitation is requested");
    if (init.site < 1 || init.site > n_sites)
        throw ConfigError("config key 'init.site': out of range");
    if (init.variant == InitialStateSpec::Variant::dressed &&
        (init.p < 1 || init.p > fock_cutoff))
        throw ConfigError("config key 'init.p': must be in [1, fock_cutoff]");
    if (init.variant == InitialStateSpec::Variant::bare &&
        static_cast<int>(init.bare_locals.size()) != n_sites)
        throw ConfigError("config key 'init.bare': expected one token per site");
    if (min_grid_step_khz <= 0)
        throw ConfigError("config key 'min_search.grid_step_khz': must be positive");
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config syntax error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config document must be a JSON object");

    expect_known(doc, "",
                 {"n_sites", "fock_cutoff", "g_khz", "delta_khz", "delta1_khz", "delta2_khz",
                  "k12_khz", "k_khz", "hopping_from_geometry", "geometry", "init",
                  "duration_us", "dt_out_us", "window_us", "noise", "noiseless", "workers",
                  "sweep_deltas_khz", "reference_branch", "spectrum_deltas_khz",
                  "leakage_site", "leakage_kind", "min_search"});

    RunConfig cfg;
    if (doc.contains("n_sites")) cfg.n_sites = get_int(doc["n_sites"], "n_sites");
    if (doc.contains("fock_cutoff")) cfg.fock_cutoff = get_int(doc["fock_cutoff"], "fock_cutoff");

    if (cfg.n_sites != 2) {
        // defaults are two-site; other chain lengths need explicit couplings
        cfg.g_khz.assign(cfg.n_sites, 11.754);
        cfg.delta_khz.assign(cfg.n_sites, 0.0);
    }
    if (doc.contains("g_khz"))
        cfg.g_khz = resolve_per_site(get_number_list(doc["g_khz"], "g_khz"), cfg.n_sites, "g_khz");
    if (doc.contains("delta_khz"))
        cfg.delta_khz = resolve_per_site(get_number_list(doc["delta_khz"], "delta_khz"),
                                         cfg.n_sites, "delta_khz");
    if (doc.contains("delta1_khz")) cfg.delta_khz.at(0) = get_number(doc["delta1_khz"], "delta1_khz");
    if (doc.contains("delta2_khz")) {
        if (cfg.n_sites < 2) bad_key("delta2_khz", "needs at least two sites");
        cfg.delta_khz.at(1) = get_number(doc["delta2_khz"], "delta2_khz");
    }
    if (doc.contains("k12_khz")) cfg.k12_khz = get_number(doc["k12_khz"], "k12_khz");
    if (doc.contains("k_khz")) {
        const json& jk = doc["k_khz"];
        if (!jk.is_array()) bad_key("k_khz", "expected a matrix (array of rows)");
        Eigen::MatrixXd k(cfg.n_sites, cfg.n_sites);
        if (static_cast<int>(jk.size()) != cfg.n_sites)
            bad_key("k_khz", "expected n_sites rows");
        for (int i = 0; i < cfg.n_sites; ++i) {
            const auto row = get_number_list(jk[i], "k_khz");
            if (static_cast<int>(row.size()) != cfg.n_sites)
                bad_key("k_khz", "expected n_sites columns");
            for (int j = 0; j < cfg.n_sites; ++j) k(i, j) = row[j];
        }
        cfg.k_khz = k;
    }
    if (doc.contains("hopping_from_geometry")) {
        if (!doc["hopping_from_geometry"].is_boolean())
            bad_key("hopping_from_geometry", "expected a boolean");
        cfg.hopping_from_geometry = doc["hopping_from_geometry"].get<bool>();
    }
    if (doc.contains("geometry")) cfg.geometry = parse_geometry(doc["geometry"]);
    if (doc.contains("init")) cfg.init = parse_init(doc["init"]);
    if (doc.contains("duration_us")) cfg.duration_us = get_number(doc["duration_us"], "duration_us");
    if (doc.contains("dt_out_us")) cfg.dt_out_us = get_number(doc["dt_out_us"], "dt_out_us");
    if (doc.contains("window_us")) {
        const auto w = get_number_list(doc["window_us"], "window_us");
        if (w.size() != 2) bad_key("window_us", "expected [start, end]");
        cfg.window_us = {w[0], w[1]};
    }
    if (doc.contains("noise")) cfg.noise = parse_noise(doc["noise"], cfg.noise);
    if (doc.contains("noiseless")) {
        if (!doc["noiseless"].is_boolean()) bad_key("noiseless", "expected a boolean");
        cfg.noiseless = doc["noiseless"].get<bool>();
    }
    if (doc.contains("workers")) cfg.workers = get_int(doc["workers"], "workers");
    if (doc.contains("sweep_deltas_khz"))
        cfg.sweep_deltas_khz = get_number_list(doc["sweep_deltas_khz"], "sweep_deltas_khz");
    if (doc.contains("reference_branch")) {
        const json& jb = doc["reference_branch"];
        if (jb.is_string() && jb.get<std::string>() == "auto")
            cfg.reference_branch.reset();
        else
            cfg.reference_branch = parse_branch(jb, "reference_branch");
    }
    if (doc.contains("spectrum_deltas_khz"))
        cfg.spectrum_deltas_khz =
            get_number_list(doc["spectrum_deltas_khz"], "spectrum_deltas_khz");
    if (doc.contains("leakage_site")) cfg.leakage_site = get_int(doc["leakage_site"], "leakage_site");
    if (doc.contains("leakage_kind")) {
        const std::string k =
            doc["leakage_kind"].is_string() ? doc["leakage_kind"].get<std::string>() : "";
        if (k == "polariton")
            cfg.leakage_kind = CountKind::polariton;
        else if (k == "phonon")
            cfg.leakage_kind = CountKind::phonon;
        else
            bad_key("leakage_kind", "expected \"polariton\" or \"phonon\"");
    }
    if (doc.contains("min_search")) {
        const json& jm = doc["min_search"];
        expect_known(jm, "min_search", {"from_khz", "to_khz", "grid_step_khz"});
        if (jm.contains("from_khz")) cfg.min_from_khz = get_number(jm["from_khz"], "min_search.from_khz");
        if (jm.contains("to_khz")) cfg.min_to_khz = get_number(jm["to_khz"], "min_search.to_khz");
        if (jm.contains("grid_step_khz"))
            cfg.min_grid_step_khz = get_number(jm["grid_step_khz"], "min_search.grid_step_khz");
    }

    cfg.validate();
    return cfg;
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    json j;
    j["n_sites"] = cfg.n_sites;
    j["fock_cutoff"] = cfg.fock_cutoff;
    j["g_khz"] = cfg.g_khz;
    j["delta_khz"] = cfg.delta_khz;
    j["k12_khz"] = cfg.k12_khz;
    if (cfg.k_khz) {
        json rows = json::array();
        for (int i = 0; i < cfg.k_khz->rows(); ++i) {
            json row = json::array();
            for (int c = 0; c < cfg.k_khz->cols(); ++c) row.push_back((*cfg.k_khz)(i, c));
            rows.push_back(row);
        }
        j["k_khz"] = rows;
    }
    j["hopping_from_geometry"] = cfg.hopping_from_geometry;
    j["geometry"] = {{"ion_mass_amu", cfg.geometry.ion_mass_amu},
                     {"radial_freq_khz", cfg.geometry.radial_freq_khz},
                     {"positions_um", cfg.geometry.positions_um}};
    json init;
    init["mode"] = cfg.init.mode == InitialStateSpec::Mode::ideal ? "ideal" : "pulsed";
    switch (cfg.init.variant) {
        case InitialStateSpec::Variant::ground: init["variant"] = "ground"; break;
        case InitialStateSpec::Variant::bare: init["variant"] = "bare"; break;
        case InitialStateSpec::Variant::dressed: init["variant"] = "dressed"; break;
        case InitialStateSpec::Variant::superposition: init["variant"] = "superposition"; break;
    }
    init["site"] = cfg.init.site;
    init["p"] = cfg.init.p;
    init["branch"] = cfg.init.branch == Branch::minus ? "minus" : "plus";
    if (!cfg.init.bare_locals.empty()) {
        json bare = json::array();
        for (const auto& [s, n] : cfg.init.bare_locals)
            bare.push_back(std::string(s ? "e" : "g") + std::to_string(n));
        init["bare"] = bare;
    }
    init["carrier_rabi_khz"] = cfg.init.carrier_rabi_khz;
    init["rsb_rabi_khz"] = cfg.init.rsb_rabi_khz;
    init["hopping_during_prep"] = cfg.init.hopping_during_prep;
    j["init"] = init;
    j["duration_us"] = cfg.duration_us;
    j["dt_out_us"] = cfg.dt_out_us;
    j["window_us"] = {cfg.window_us.first, cfg.window_us.second};
    j["noise"] = {{"nbar", cfg.noise.nbar},
                  {"intensity_sigma", cfg.noise.intensity_sigma},
                  {"shots", cfg.noise.shots},
                  {"seed", cfg.noise.seed},
                  {"correlation", cfg.noise.correlation == NoiseModel::Correlation::common
                                      ? "common"
                                      : "independent"}};
    j["noiseless"] = cfg.noiseless;
    j["workers"] = cfg.workers;
    j["sweep_deltas_khz"] = cfg.sweep_deltas_khz;
    if (cfg.reference_branch)
        j["reference_branch"] = *cfg.reference_branch == Branch::minus ? "minus" : "plus";
    else
        j["reference_branch"] = "auto";
    if (!cfg.spectrum_deltas_khz.empty()) j["spectrum_deltas_khz"] = cfg.spectrum_deltas_khz;
    j["leakage_site"] = cfg.leakage_site;
    j["leakage_kind"] = cfg.leakage_kind == CountKind::polariton ? "polariton" : "phonon";
    j["min_search"] = {{"from_khz", cfg.min_from_khz},
                       {"to_khz", cfg.min_to_khz},
                       {"grid_step_khz", cfg.min_grid_step_khz}};
    return j;
}

JchParams make_params(const RunConfig& cfg) {
    cfg.validate();
    JchParams p;
    p.n_sites = cfg.n_sites;
    p.g_khz = cfg.g_khz;
    p.delta_khz = cfg.delta_khz;
    if (cfg.hopping_from_geometry) {
        if (cfg.geometry.n_sites() != cfg.n_sites)
            throw ConfigError("config key 'geometry.positions_um': expected one position per site");
        p.k_khz = hopping_matrix(cfg.geometry);
    } else if (cfg.k_khz) {
        p.k_khz = *cfg.k_khz;
    } else {
        if (cfg.n_sites != 2)
            throw ConfigError("config key 'k_khz': full matrix required for n_sites != 2");
        p.k_khz = Eigen::MatrixXd::Zero(2, 2);
        p.k_khz(0, 1) = p.k_khz(1, 0) = cfg.k12_khz;
    }
    p.omega_khz = corrected_site_frequencies(cfg.geometry.radial_freq_khz, p.k_khz);
    p.validate();
    return p;
}

CompositeSpace make_space(const RunConfig& cfg) {
    return CompositeSpace(cfg.n_sites, cfg.fock_cutoff);
}

}  // namespace jch
