// SPDX-License-Identifier: Apache-2.0
#include "stt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "stt/csv.hpp"
#include "stt/linalg.hpp"
#include "stt/metrics.hpp"

#ifndef STT_VERSION_STRING
#define STT_VERSION_STRING "unknown"
#endif

namespace stt {

namespace fs = std::filesystem;
using json = nlohmann::json;

const char* version_string() { return STT_VERSION_STRING; }

std::uint64_t trial_seed(std::uint64_t master, int sweep_index, int trial) {
    return derive_seed(derive_seed(master, static_cast<std::uint64_t>(sweep_index)),
                       static_cast<std::uint64_t>(trial));
}

std::uint64_t method_seed(std::uint64_t tseed, const std::string& method) {
    const auto& ids = method_ids();
    const auto it = std::find(ids.begin(), ids.end(), method);
    return derive_seed(tseed, 1 + static_cast<std::uint64_t>(it - ids.begin()));
}

ChannelMatrix trial_channel(const SystemConfig& cfg, std::uint64_t tseed) {
    Rng rng(derive_seed(tseed, 0));
    return random_channel(cfg, rng);
}

namespace {

double ee_for(const std::string& method, const SystemConfig& cfg, int beams, double se) {
    const bool fd = method.rfind("fd_", 0) == 0;
    const PowerModel pm = fd ? PowerModel::fully_digital(cfg.n_bs_antennas, cfg.n_ue_antennas)
                             : PowerModel::hybrid(cfg.n_bs_antennas, cfg.n_ue_antennas, beams);
    return energy_efficiency(se, pm, cfg.tx_power_bs, cfg.tx_power_ue);
}

}  // namespace

MethodOutcome run_method(const std::string& method, const ChannelMatrix& channel,
                         const MethodInputs& in, std::uint64_t seed) {
    const SystemConfig& cfg = in.system;
    const double sigma2 = noise_power(cfg);
    const int ns = cfg.n_streams;
    MethodOutcome out;
    out.method = method;
    if (method == "hybrid_stt" || method == "fd_stt") {
        PingPongSim sim(channel, cfg, seed);
        const Wtm fu = build_wtm(ue_array(cfg), cfg.wavelength());
        const Wtm fb = build_wtm(bs_array(cfg), cfg.wavelength());
        SensingResult sres = run_sensing(sim, fu, fb, in.sensing);
        TrainingConfig t = in.training;
        t.fully_digital = method == "fd_stt";
        Rng lrng(derive_seed(seed, 1));
        Learners learners = make_learners(sres, t, lrng);
        MultiBeamResult r = run_multi_beam(sim, ns, t, learners, &lrng);
        out.s = r.beams.s;
        out.p = r.beams.p;
        out.se = evaluate_se(channel.h, out.s, out.p, cfg.tx_power_bs, sigma2);
        out.pilot_rounds = static_cast<int>(sim.rounds());
        if (in.record_rounds)
            for (const auto& rec : r.trace.records) out.se_per_round.push_back(rec.se);
        out.trace = std::move(r.trace);
        out.sensing = std::move(sres);
    } else if (method == "fd_opt") {
        const BeamformerSet b = svd_oracle(channel.h, ns, cfg.tx_power_bs, sigma2);
        out.s = b.s;
        out.p = b.p;
        out.se = optimal_se(channel.h, ns, cfg.tx_power_bs, sigma2);
        out.pilot_rounds = 0;
    } else if (method == "fd_pm") {
        PingPongSim sim(channel, cfg, seed);
        Rng prng(derive_seed(seed, 2));
        RoundCallback cb;
        if (in.record_rounds)
            cb = [&](int, const CMat& s, const CMat& p) {
                out.se_per_round.push_back(evaluate_se(channel.h, s, p, cfg.tx_power_bs, sigma2));
            };
        const BeamformerSet b = power_method(sim, ns, in.pm_rounds, prng, std::nullopt, cb);
        out.s = b.s;
        out.p = b.p;
        out.se = evaluate_se(channel.h, out.s, out.p, cfg.tx_power_bs, sigma2);
        out.pilot_rounds = static_cast<int>(sim.rounds());
    } else if (method == "ffc") {
        if (ns != 1) throw DomainError("ffc supports a single beam only");
        if (!in.codebooks) throw DomainError("ffc needs codebooks");
        PingPongSim sim(channel, cfg, seed);
        const SearchResult r = hierarchical_search(sim, in.codebooks->bs, in.codebooks->ue);
        out.s = r.s;
        out.p = r.p;
        out.se = evaluate_se(channel.h, out.s, out.p, cfg.tx_power_bs, sigma2);
        out.pilot_rounds = r.pilots_used;
    } else {
        throw DomainError("unknown method '" + method + "'");
    }
    const int beams = method == "ffc" ? 1 : ns;
    out.ee = ee_for(method, cfg, beams, out.se);
    return out;
}

std::string metrics_header() {
    return "experiment,sweep_variable,sweep_value,trial,seed,method,round,se,ee,pilot_rounds,status";
}

std::string format_metric_row(const MetricRow& r) {
    return join_csv({r.experiment, r.sweep_variable, format_double(r.sweep_value), std::to_string(r.trial),
                     std::to_string(r.seed), r.method, r.round ? std::to_string(*r.round) : std::string(),
                     format_double(r.se), format_double(r.ee), std::to_string(r.pilot_rounds),
                     csv_safe(r.status)});
}

std::string RunManifest::to_json() const {
    json j;
    j["version"] = version;
    j["config"] = json::parse(config_json);
    j["trial_seeds"] = trial_seeds;
    j["wall_clock_s"] = wall_clock_s;
    j["outputs"] = outputs;
    j["failed_methods"] = failed_methods;
    return j.dump(2);
}

namespace {

struct TrialOutput {
    std::vector<MetricRow> rows;
    std::map<std::string, std::vector<std::string>> extra;  // file -> lines
};

const std::map<std::string, std::string>& extra_headers() {
    static const std::map<std::string, std::string> h = {
        {"wavenumber_map.csv", "sweep_value,i,j,magnitude"},
        {"sensing.csv", "sweep_value,trial,fraction,ue_min,ue_max,bs_min,bs_max,ue_size,bs_size,kept_energy"},
        {"singular_spectrum.csv", "sweep_value,trial,index,sv_channel,sv_wavenumber,edof"},
        {"beam_maps.csv", "sweep_value,side,beam,x,z,gain"},
        {"beam_focus.csv", "sweep_value,trial,side,beam,centroid_x,centroid_z,distance_to_target"},
    };
    return h;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? 0.5 * (a + b) : a + (b - a) * i / (n - 1);
    return v;
}

void wavenumber_trial(const ExperimentSpec& s, double sv, int trial, std::uint64_t ts,
                      const ChannelMatrix& ch, TrialOutput& out) {
    const SystemConfig& cfg = s.system;
    const Wtm fu = build_wtm(ue_array(cfg), cfg.wavelength());
    const Wtm fb = build_wtm(bs_array(cfg), cfg.wavelength());
    const CMat ha = to_wavenumber(ch.h, fu, fb);
    if (trial == 0) {
        const double mx = ha.cwiseAbs().maxCoeff();
        auto& lines = out.extra["wavenumber_map.csv"];
        for (int r = 0; r < ha.rows(); ++r)
            for (int c = 0; c < ha.cols(); ++c)
                lines.push_back(join_csv({format_double(sv), std::to_string(fu.grid.indices[r]),
                                          std::to_string(fb.grid.indices[c]),
                                          format_double(std::abs(ha(r, c)) / mx)}));
    }
    PingPongSim sim(ch, cfg, method_seed(ts, "hybrid_stt"));
    const SensingResult sres = run_sensing(sim, fu, fb, s.sensing);
    const double total = ha.squaredNorm();
    for (double f : {0.1, 0.5, 0.9}) {
        const auto ue = detect_boundaries(sres.avg_gain_dl, fu.grid.indices, f);
        const auto bs = detect_boundaries(sres.avg_gain_ul, fb.grid.indices, f);
        const CMat he = ha.block(fu.grid.position(ue.first), fb.grid.position(bs.first),
                                 ue.second - ue.first + 1, bs.second - bs.first + 1);
        out.extra["sensing.csv"].push_back(join_csv(
            {format_double(sv), std::to_string(trial), format_double(f), std::to_string(ue.first),
             std::to_string(ue.second), std::to_string(bs.first), std::to_string(bs.second),
             std::to_string(ue.second - ue.first + 1), std::to_string(bs.second - bs.first + 1),
             format_double(he.squaredNorm() / total)}));
    }
}

void spectrum_trial(const ExperimentSpec& s, double sv, int trial, const ChannelMatrix& ch,
                    TrialOutput& out) {
    const SystemConfig& cfg = s.system;
    const Wtm fu = build_wtm(ue_array(cfg), cfg.wavelength());
    const Wtm fb = build_wtm(bs_array(cfg), cfg.wavelength());
    const RVec a = Eigen::BDCSVD<CMat>(ch.h).singularValues();
    const RVec b = Eigen::BDCSVD<CMat>(to_wavenumber(ch.h, fu, fb)).singularValues();
    const double e = edof(ch.h);
    const int k = static_cast<int>(std::min<long>(20, std::min(a.size(), b.size())));
    for (int i = 0; i < k; ++i)
        out.extra["singular_spectrum.csv"].push_back(
            join_csv({format_double(sv), std::to_string(trial), std::to_string(i + 1),
                      format_double(a(i) / a(0)), format_double(b(i) / b(0)), format_double(e)}));
}

void beam_map_trial(const ExperimentSpec& s, double sv, int trial, const MethodOutcome& mo,
                    TrialOutput& out) {
    const SystemConfig& cfg = s.system;
    const UlaGeometry bs = bs_array(cfg);
    const UlaGeometry ue = ue_array(cfg);
    const double d = cfg.link_distance;
    const std::vector<double> xs = linspace(-s.map.x_half_width, s.map.x_half_width, s.map.nx);
    const std::vector<double> zs_bs = linspace(s.map.z_min, s.map.z_max, s.map.nz);
    std::vector<double> zs_ue = linspace(d - s.map.z_max, d - s.map.z_min, s.map.nz);
    for (int b = 0; b < mo.p.cols(); ++b) {
        if (mo.p.col(b).norm() == 0.0) continue;
        for (int side = 0; side < 2; ++side) {
            // BS transmit gain toward v is |p^T a(v)|; UE receive gain is |s^H a(v)|
            const bool is_bs = side == 0;
            const CVec beam = is_bs ? CVec(mo.p.col(b).conjugate()) : CVec(mo.s.col(b));
            const auto& zs = is_bs ? zs_bs : zs_ue;
            const RMat map = beam_gain_map(beam, is_bs ? bs : ue, xs, zs, cfg.k0());
            const Eigen::Vector2d c = top_quantile_centroid(map, xs, zs, 0.9);
            const Vec3 target = is_bs ? ue.center : bs.center;
            const double dist = std::hypot(c.x() - target.x(), c.y() - target.z());
            const std::string name = is_bs ? "bs" : "ue";
            out.extra["beam_focus.csv"].push_back(
                join_csv({format_double(sv), std::to_string(trial), name, std::to_string(b + 1),
                          format_double(c.x()), format_double(c.y()), format_double(dist)}));
            if (trial != 0) continue;
            auto& lines = out.extra["beam_maps.csv"];
            for (int iz = 0; iz < map.rows(); ++iz)
                for (int ix = 0; ix < map.cols(); ++ix)
                    lines.push_back(join_csv({format_double(sv), name, std::to_string(b + 1),
                                              format_double(xs[ix]), format_double(zs[iz]),
                                              format_double(map(iz, ix))}));
        }
    }
}

TrialOutput run_trial(const ExperimentSpec& s, int sweep_index, double sv, int trial,
                      const Codebooks* cb) {
    TrialOutput out;
    const std::uint64_t ts = trial_seed(s.seed, sweep_index, trial);
    const ChannelMatrix ch = trial_channel(s.system, ts);

    if (s.experiment == "wavenumber_map") {
        wavenumber_trial(s, sv, trial, ts, ch, out);
        return out;
    }
    if (s.experiment == "singular_spectrum") {
        spectrum_trial(s, sv, trial, ch, out);
        return out;
    }

    MethodInputs in;
    in.system = s.system;
    in.sensing = s.sensing;
    in.training = s.training;
    in.pm_rounds = s.effective_pm_rounds();
    in.codebooks = cb;
    in.record_rounds = s.experiment == "se_vs_rounds";

    std::vector<std::string> methods = s.methods;
    if (s.experiment == "beam_maps") methods = {"hybrid_stt"};

    for (const auto& m : methods) {
        MetricRow base;
        base.experiment = s.experiment;
        base.sweep_variable = s.sweep_variable;
        base.sweep_value = sv;
        base.trial = trial;
        base.seed = ts;
        base.method = m;
        if (m == "ffc" && s.system.n_streams != 1) {
            base.se = base.ee = std::numeric_limits<double>::quiet_NaN();
            base.status = "skipped_single_beam_only";
            out.rows.push_back(base);
            continue;
        }
        try {
            const MethodOutcome mo = run_method(m, ch, in, method_seed(ts, m));
            base.pilot_rounds = mo.pilot_rounds;
            if (in.record_rounds) {
                const bool pm = m == "fd_pm";
                for (size_t k = 0; k < mo.se_per_round.size(); ++k) {
                    MetricRow r = base;
                    r.round = static_cast<int>(pm ? k + 1 : k);
                    r.se = mo.se_per_round[k];
                    r.ee = ee_for(m, s.system, s.system.n_streams, r.se);
                    out.rows.push_back(r);
                }
            }
            base.se = mo.se;
            base.ee = mo.ee;
            out.rows.push_back(base);
            if (s.experiment == "beam_maps") beam_map_trial(s, sv, trial, mo, out);
        } catch (const std::exception& e) {
            base.se = base.ee = std::numeric_limits<double>::quiet_NaN();
            base.status = std::string("error: ") + e.what();
            out.rows.push_back(base);
        }
    }
    return out;
}

}  // namespace

RunManifest run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(spec.output_dir);

    std::optional<Codebooks> cb;
    const bool needs_ffc = std::find(spec.methods.begin(), spec.methods.end(), "ffc") != spec.methods.end() &&
                           spec.experiment != "wavenumber_map" && spec.experiment != "singular_spectrum" &&
                           spec.experiment != "beam_maps";
    if (needs_ffc) {
        const int depth = spec.codebook_depth.value_or(
            default_codebook_depth(std::max(spec.system.n_bs_antennas, spec.system.n_ue_antennas)));
        cb = Codebooks{build_hierarchical_codebook(spec.system.n_bs_antennas, depth),
                       build_hierarchical_codebook(spec.system.n_ue_antennas, depth)};
    }

    const int nsweep = static_cast<int>(spec.sweep_values.size());
    const int ntasks = nsweep * spec.n_trials;
    std::vector<ExperimentSpec> at;
    for (double v : spec.sweep_values) at.push_back(spec.at_sweep(v));

    std::vector<TrialOutput> results(ntasks);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int k = next++; k < ntasks; k = next++) {
            const int si = k / spec.n_trials;
            const int tr = k % spec.n_trials;
            results[k] = run_trial(at[si], si, spec.sweep_values[si], tr, cb ? &*cb : nullptr);
        }
    };
    int nthreads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::clamp(nthreads, 1, std::max(1, ntasks));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    RunManifest man;
    man.version = version_string();
    man.config_json = spec_to_json(spec);
    for (int si = 0; si < nsweep; ++si)
        for (int tr = 0; tr < spec.n_trials; ++tr) man.trial_seeds.push_back(trial_seed(spec.seed, si, tr));

    const fs::path dir(spec.output_dir);
    {
        std::ofstream os(dir / "metrics.csv");
        os << metrics_header() << '\n';
        for (const auto& r : results)
            for (const auto& row : r.rows) os << format_metric_row(row) << '\n';
    }
    man.outputs.push_back("metrics.csv");
    std::set<std::string> extra_files;
    for (const auto& r : results)
        for (const auto& [f, lines] : r.extra) extra_files.insert(f);
    for (const auto& f : extra_files) {
        std::ofstream os(dir / f);
        os << extra_headers().at(f) << '\n';
        for (const auto& r : results) {
            const auto it = r.extra.find(f);
            if (it == r.extra.end()) continue;
            for (const auto& line : it->second) os << line << '\n';
        }
        man.outputs.push_back(f);
    }

    std::map<std::string, std::pair<int, int>> counts;  // method -> (errors, rows)
    for (const auto& r : results)
        for (const auto& row : r.rows) {
            if (row.round) continue;
            auto& c = counts[row.method];
            c.second++;
            if (row.status.rfind("error", 0) == 0) c.first++;
        }
    for (const auto& [m, c] : counts)
        if (c.second > 0 && c.first == c.second) man.failed_methods.push_back(m);

    for (const auto& f : summarize_dir(spec.output_dir)) man.outputs.push_back(fs::path(f).filename().string());
    man.outputs.push_back("manifest.json");
    man.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream(dir / "manifest.json") << man.to_json() << '\n';
    return man;
}

std::vector<SummaryRow> summarize(const std::vector<std::string>& csv_paths) {
    using Key = std::tuple<std::string, std::string, double, std::string, int>;
    struct Acc {
        std::vector<double> se;
        std::vector<double> ee;
    };
    std::map<Key, Acc> groups;
    std::vector<Key> order;
    std::vector<std::string> header;
    for (const auto& path : csv_paths) {
        const CsvTable t = read_csv(path);
        if (header.empty()) {
            header = t.header;
        } else if (t.header != header) {
            throw std::runtime_error("schema mismatch in '" + path + "'");
        }
        if (join_csv(t.header) != metrics_header())
            throw std::runtime_error("'" + path + "' is not a metrics table");
        const int ce = t.column("experiment"), cv = t.column("sweep_variable"), cs = t.column("sweep_value"),
                  cm = t.column("method"), cr = t.column("round"), cse = t.column("se"), cee = t.column("ee"),
                  cst = t.column("status");
        for (const auto& row : t.rows) {
            if (row[cst] != "ok") continue;
            const Key k{row[ce], row[cv], std::stod(row[cs]), row[cm],
                        row[cr].empty() ? std::numeric_limits<int>::min() : std::stoi(row[cr])};
            auto it = groups.find(k);
            if (it == groups.end()) {
                order.push_back(k);
                it = groups.emplace(k, Acc{}).first;
            }
            it->second.se.push_back(std::stod(row[cse]));
            it->second.ee.push_back(std::stod(row[cee]));
        }
    }
    auto stats = [](const std::vector<double>& v) {
        const double n = static_cast<double>(v.size());
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        if (v.size() < 2) return std::make_pair(mean, 0.0);
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::make_pair(mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n));
    };
    std::sort(order.begin(), order.end());
    std::vector<SummaryRow> out;
    for (const auto& k : order) {
        const Acc& a = groups.at(k);
        SummaryRow r;
        std::tie(r.experiment, r.sweep_variable, r.sweep_value, r.method, std::ignore) = k;
        if (std::get<4>(k) != std::numeric_limits<int>::min()) r.round = std::get<4>(k);
        r.n = static_cast<int>(a.se.size());
        std::tie(r.se_mean, r.se_stderr) = stats(a.se);
        std::tie(r.ee_mean, r.ee_stderr) = stats(a.ee);
        out.push_back(r);
    }
    return out;
}

std::vector<std::string> summarize_dir(const std::string& dir) {
    const fs::path d(dir);
    const fs::path metrics = d / "metrics.csv";
    const auto rows = summarize({metrics.string()});
    std::vector<std::string> written;
    {
        const fs::path p = d / "summary.csv";
        std::ofstream os(p);
        os << "experiment,sweep_variable,sweep_value,method,round,n,se_mean,se_stderr,ee_mean,ee_stderr\n";
        for (const auto& r : rows)
            os << join_csv({r.experiment, r.sweep_variable, format_double(r.sweep_value), r.method,
                            r.round ? std::to_string(*r.round) : std::string(), std::to_string(r.n),
                            format_double(r.se_mean), format_double(r.se_stderr), format_double(r.ee_mean),
                            format_double(r.ee_stderr)})
               << '\n';
        written.push_back(p.string());
    }
    // figure data: one line per (experiment, sweep value, round), one column pair per method
    std::map<std::string, std::vector<const SummaryRow*>> by_exp;
    for (const auto& r : rows) by_exp[r.experiment].push_back(&r);
    for (const auto& [exp, list] : by_exp) {
        std::vector<std::string> methods;
        for (const auto& m : method_ids())
            for (const auto* r : list)
                if (r->method == m) {
                    methods.push_back(m);
                    break;
                }
        using Pt = std::pair<double, int>;
        std::map<Pt, std::map<std::string, const SummaryRow*>> table;
        for (const auto* r : list) table[{r->sweep_value, r->round.value_or(-1)}][r->method] = r;
        const fs::path p = d / ("figure_" + exp + ".csv");
        std::ofstream os(p);
        std::vector<std::string> head = {"sweep_value", "round"};
        for (const auto& m : methods) {
            head.push_back(m + "_se_mean");
            head.push_back(m + "_se_stderr");
            head.push_back(m + "_ee_mean");
            head.push_back(m + "_ee_stderr");
        }
        os << join_csv(head) << '\n';
        for (const auto& [pt, cols] : table) {
            std::vector<std::string> f = {format_double(pt.first), pt.second < 0 ? std::string() : std::to_string(pt.second)};
            for (const auto& m : methods) {
                const auto it = cols.find(m);
                if (it == cols.end()) {
                    f.insert(f.end(), {"", "", "", ""});
                } else {
                    f.push_back(format_double(it->second->se_mean));
                    f.push_back(format_double(it->second->se_stderr));
                    f.push_back(format_double(it->second->ee_mean));
                    f.push_back(format_double(it->second->ee_stderr));
                }
            }
            os << join_csv(f) << '\n';
        }
        written.push_back(p.string());
    }
    return written;
}

}  // namespace stt
