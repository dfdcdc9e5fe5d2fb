// SPDX-License-Identifier: Apache-2.0
#include "stt/config.hpp"

#include "stt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace stt {

namespace {

using json = nlohmann::json;

class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return obj_.contains(key) && !obj_.at(key).is_null();
    }

    template <typename T>
    T get(const std::string& key) {
        seen_.insert(key);
        try {
            return obj_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(child(key) + ": wrong value type");
        }
    }

    template <typename T>
    void maybe(const std::string& key, T& out) {
        if (has(key)) out = get<T>(key);
    }

    const json& at(const std::string& key) {
        seen_.insert(key);
        return obj_.at(key);
    }

    std::string child(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }
    std::string where() const { return path_.empty() ? "<root>" : path_; }

    void exclusive(const std::string& a, const std::string& b) {
        if (obj_.contains(a) && obj_.contains(b))
            throw ConfigError(child(a) + ": conflicts with " + child(b));
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(child(it.key()) + ": unknown key");
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

int as_int(Reader& r, const std::string& key) {
    const json& v = r.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ConfigError(r.child(key) + ": expected an integer");
    return v.get<int>();
}

void parse_system(Reader r, SystemConfig& s) {
    r.maybe("carrier_freq_hz", s.carrier_freq);
    r.maybe("bandwidth_hz", s.bandwidth);
    if (r.has("n_bs_antennas")) s.n_bs_antennas = as_int(r, "n_bs_antennas");
    if (r.has("n_ue_antennas")) s.n_ue_antennas = as_int(r, "n_ue_antennas");
    if (r.has("antenna_spacing_bs_m")) s.antenna_spacing_bs = r.get<double>("antenna_spacing_bs_m");
    if (r.has("antenna_spacing_ue_m")) s.antenna_spacing_ue = r.get<double>("antenna_spacing_ue_m");
    r.maybe("link_distance_m", s.link_distance);
    if (r.has("n_streams")) s.n_streams = as_int(r, "n_streams");
    if (r.has("n_nlos_paths")) s.n_nlos_paths = as_int(r, "n_nlos_paths");

    auto linear_or_db = [&](const std::string& lin, const std::string& db, double& out) {
        r.exclusive(lin, db);
        if (r.has(lin)) out = r.get<double>(lin);
        if (r.has(db)) out = db_to_linear(r.get<double>(db));
    };
    linear_or_db("scattering_loss", "scattering_loss_db", s.scattering_loss);
    linear_or_db("tx_gain", "tx_gain_db", s.tx_gain);
    linear_or_db("rx_gain", "rx_gain_db", s.rx_gain);

    auto watts_or_dbm = [&](const std::string& w, const std::string& dbm, double& out) {
        r.exclusive(w, dbm);
        if (r.has(w)) out = r.get<double>(w);
        if (r.has(dbm)) out = dbm_to_watts(r.get<double>(dbm));
    };
    if (r.has("tx_power_dbm")) {
        for (const char* k : {"tx_power_bs_w", "tx_power_bs_dbm", "tx_power_ue_w", "tx_power_ue_dbm"})
            r.exclusive("tx_power_dbm", k);
        s.tx_power_bs = s.tx_power_ue = dbm_to_watts(r.get<double>("tx_power_dbm"));
    }
    watts_or_dbm("tx_power_bs_w", "tx_power_bs_dbm", s.tx_power_bs);
    watts_or_dbm("tx_power_ue_w", "tx_power_ue_dbm", s.tx_power_ue);
    r.exclusive("noise_density_w_hz", "noise_density_dbm_hz");
    if (r.has("noise_density_w_hz")) s.noise_density = r.get<double>("noise_density_w_hz");
    if (r.has("noise_density_dbm_hz")) s.noise_density = dbm_to_watts(r.get<double>("noise_density_dbm_hz"));
    r.maybe("absorption_coeff_per_m", s.absorption_coeff);
    r.maybe("speed_of_light_m_s", s.speed_of_light);
    r.maybe("enforce_near_field", s.enforce_near_field);
    r.maybe("scatterer_padding_m", s.scatterer_padding);
    r.finish();
}

void parse_sensing(Reader r, SensingConfig& s) {
    if (r.has("rounds")) s.rounds = as_int(r, "rounds");
    if (r.has("threshold_fraction")) {
        r.exclusive("threshold_fraction", "threshold_fraction_dl");
        r.exclusive("threshold_fraction", "threshold_fraction_ul");
        s.threshold_fraction_dl = s.threshold_fraction_ul = r.get<double>("threshold_fraction");
    }
    r.maybe("threshold_fraction_dl", s.threshold_fraction_dl);
    r.maybe("threshold_fraction_ul", s.threshold_fraction_ul);
    auto vec = [&](const std::string& key, std::optional<RVec>& out) {
        if (!r.has(key)) return;
        const auto v = r.get<std::vector<double>>(key);
        out = Eigen::Map<const RVec>(v.data(), static_cast<long>(v.size()));
    };
    vec("pilot_dl", s.pilot_dl);
    vec("pilot_ul", s.pilot_ul);
    r.finish();
}

void parse_training(Reader r, TrainingConfig& t) {
    if (r.has("rounds")) t.rounds = as_int(r, "rounds");
    r.maybe("tolerance", t.tolerance);
    r.maybe("decay", t.decay);
    if (r.has("min_rounds_per_beam")) t.min_rounds_per_beam = as_int(r, "min_rounds_per_beam");
    r.maybe("reinit_per_beam", t.reinit_per_beam);
    r.maybe("learning_rate", t.learning_rate);
    r.maybe("learning_rate_floor", t.learning_rate_floor);
    if (r.has("hidden")) t.hidden = r.get<std::vector<int>>("hidden");
    r.finish();
}

void parse_map(Reader r, MapGrid& m) {
    r.maybe("x_half_width_m", m.x_half_width);
    r.maybe("z_min_m", m.z_min);
    r.maybe("z_max_m", m.z_max);
    if (r.has("nx")) m.nx = as_int(r, "nx");
    if (r.has("nz")) m.nz = as_int(r, "nz");
    r.finish();
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

ExperimentSpec ExperimentSpec::at_sweep(double value) const {
    ExperimentSpec s = *this;
    if (sweep_variable == "link_distance_m") {
        s.system.link_distance = value;
    } else if (sweep_variable == "tx_power_dbm") {
        s.system.tx_power_bs = s.system.tx_power_ue = dbm_to_watts(value);
    } else if (sweep_variable == "n_streams") {
        s.system.n_streams = static_cast<int>(std::lround(value));
    } else if (sweep_variable == "training_rounds") {
        s.training.rounds = static_cast<int>(std::lround(value));
    } else if (sweep_variable == "tolerance") {
        s.training.tolerance = value;
    }
    return s;
}

void ExperimentSpec::validate() const {
    if (!contains(experiment_ids(), experiment)) throw ConfigError("experiment: unknown id '" + experiment + "'");
    if (!contains(sweep_variables(), sweep_variable))
        throw ConfigError("sweep.variable: unknown variable '" + sweep_variable + "'");
    if (sweep_values.empty()) throw ConfigError("sweep.values: must be nonempty");
    if (n_trials < 1) throw ConfigError("trials: must be >= 1");
    if (threads < 0) throw ConfigError("threads: must be >= 0");
    if (methods.empty()) throw ConfigError("methods: must be nonempty");
    std::set<std::string> uniq;
    for (const auto& m : methods) {
        if (!contains(method_ids(), m)) throw ConfigError("methods: unknown method '" + m + "'");
        if (!uniq.insert(m).second) throw ConfigError("methods: duplicate method '" + m + "'");
    }
    if (pm_rounds && *pm_rounds < 1) throw ConfigError("baselines.pm_rounds: must be >= 1");
    if (codebook_depth && *codebook_depth < 1) throw ConfigError("baselines.codebook_depth: must be >= 1");
    if (map.nx < 1 || map.nz < 1 || !(map.z_max > map.z_min) || !(map.x_half_width > 0))
        throw ConfigError("map: invalid grid");
    for (size_t i = 0; i < sweep_values.size(); ++i) {
        const double v = sweep_values[i];
        const std::string at = "sweep.values[" + std::to_string(i) + "]";
        if ((sweep_variable == "n_streams" || sweep_variable == "training_rounds") && v != std::round(v))
            throw ConfigError(at + ": expected an integer");
        const ExperimentSpec s = at_sweep(v);
        try {
            s.system.validate();
        } catch (const DomainError& e) {
            throw ConfigError("system (" + at + "): " + e.what());
        }
        try {
            s.sensing.validate();
        } catch (const DomainError& e) {
            throw ConfigError("sensing: " + std::string(e.what()));
        }
        try {
            s.training.validate();
        } catch (const DomainError& e) {
            throw ConfigError("training (" + at + "): " + e.what());
        }
    }
}

ExperimentSpec parse_config(const std::string& text) {
    json root;
    try {
        if (text.find_first_not_of(" \t\r\n") != std::string::npos) root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("<root>: parse error: ") + e.what());
    }
    if (root.is_null()) root = json::object();
    ExperimentSpec spec;
    Reader r(root, "");
    r.maybe("experiment", spec.experiment);
    if (r.has("sweep")) {
        Reader sw(r.at("sweep"), "sweep");
        sw.maybe("variable", spec.sweep_variable);
        if (sw.has("values")) spec.sweep_values = sw.get<std::vector<double>>("values");
        sw.finish();
    }
    if (r.has("trials")) spec.n_trials = as_int(r, "trials");
    if (r.has("seed")) spec.seed = r.get<std::uint64_t>("seed");
    if (r.has("threads")) spec.threads = as_int(r, "threads");
    if (r.has("methods")) spec.methods = r.get<std::vector<std::string>>("methods");
    r.maybe("output_dir", spec.output_dir);
    if (r.has("system")) parse_system(Reader(r.at("system"), "system"), spec.system);
    if (r.has("sensing")) parse_sensing(Reader(r.at("sensing"), "sensing"), spec.sensing);
    if (r.has("training")) parse_training(Reader(r.at("training"), "training"), spec.training);
    if (r.has("map")) parse_map(Reader(r.at("map"), "map"), spec.map);
    if (r.has("baselines")) {
        Reader b(r.at("baselines"), "baselines");
        if (b.has("pm_rounds")) spec.pm_rounds = as_int(b, "pm_rounds");
        if (b.has("codebook_depth")) spec.codebook_depth = as_int(b, "codebook_depth");
        b.finish();
    }
    r.finish();
    spec.validate();
    return spec;
}

ExperimentSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string spec_to_json(const ExperimentSpec& spec, int indent) {
    const SystemConfig& s = spec.system;
    json j;
    j["experiment"] = spec.experiment;
    j["sweep"] = {{"variable", spec.sweep_variable}, {"values", spec.sweep_values}};
    j["trials"] = spec.n_trials;
    j["seed"] = spec.seed;
    j["threads"] = spec.threads;
    j["methods"] = spec.methods;
    j["output_dir"] = spec.output_dir;
    j["system"] = {{"carrier_freq_hz", s.carrier_freq},
                   {"bandwidth_hz", s.bandwidth},
                   {"n_bs_antennas", s.n_bs_antennas},
                   {"n_ue_antennas", s.n_ue_antennas},
                   {"antenna_spacing_bs_m", s.spacing_bs()},
                   {"antenna_spacing_ue_m", s.spacing_ue()},
                   {"link_distance_m", s.link_distance},
                   {"n_streams", s.n_streams},
                   {"n_nlos_paths", s.n_nlos_paths},
                   {"scattering_loss", s.scattering_loss},
                   {"tx_gain", s.tx_gain},
                   {"rx_gain", s.rx_gain},
                   {"tx_power_bs_w", s.tx_power_bs},
                   {"tx_power_ue_w", s.tx_power_ue},
                   {"noise_density_w_hz", s.noise_density},
                   {"absorption_coeff_per_m", s.absorption_coeff},
                   {"speed_of_light_m_s", s.speed_of_light},
                   {"enforce_near_field", s.enforce_near_field},
                   {"scatterer_padding_m", s.scatterer_padding}};
    j["sensing"] = {{"rounds", spec.sensing.rounds},
                    {"threshold_fraction_dl", spec.sensing.threshold_fraction_dl},
                    {"threshold_fraction_ul", spec.sensing.threshold_fraction_ul}};
    if (spec.sensing.pilot_dl)
        j["sensing"]["pilot_dl"] = std::vector<double>(spec.sensing.pilot_dl->data(),
                                                       spec.sensing.pilot_dl->data() + spec.sensing.pilot_dl->size());
    if (spec.sensing.pilot_ul)
        j["sensing"]["pilot_ul"] = std::vector<double>(spec.sensing.pilot_ul->data(),
                                                       spec.sensing.pilot_ul->data() + spec.sensing.pilot_ul->size());
    const TrainingConfig& t = spec.training;
    j["training"] = {{"rounds", t.rounds},
                     {"tolerance", t.tolerance},
                     {"decay", t.decay},
                     {"min_rounds_per_beam", t.min_rounds_per_beam},
                     {"reinit_per_beam", t.reinit_per_beam},
                     {"learning_rate", t.learning_rate},
                     {"learning_rate_floor", t.learning_rate_floor},
                     {"hidden", t.hidden}};
    j["baselines"] = {{"pm_rounds", spec.effective_pm_rounds()},
                      {"codebook_depth", spec.codebook_depth.value_or(default_codebook_depth(std::max(spec.system.n_bs_antennas, spec.system.n_ue_antennas)))}};
    j["map"] = {{"x_half_width_m", spec.map.x_half_width}, {"z_min_m", spec.map.z_min},
                {"z_max_m", spec.map.z_max}, {"nx", spec.map.nx}, {"nz", spec.map.nz}};
    return j.dump(indent);
}

}  // namespace stt
