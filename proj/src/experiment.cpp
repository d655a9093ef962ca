#include "kickrotor/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "kickrotor/classical.hpp"
#include "kickrotor/csv.hpp"
#include "kickrotor/errors.hpp"
#include "kickrotor/lineshape.hpp"
#include "kickrotor/propagator.hpp"

#ifndef KICKROTOR_VERSION
#define KICKROTOR_VERSION "0.0.0"
#endif

namespace kr {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string period_text(std::int64_t M) { return M == kNoFlip ? std::string("inf") : std::to_string(M); }

CsvMeta run_meta(const ExperimentConfig& c, const RotorParams& p) {
    CsvMeta meta = params_meta(p);
    meta.emplace_back("mode", std::string(to_string(c.mode)));
    return meta;
}

std::filesystem::path output_path(const ExperimentConfig& c, const std::string& name) {
    return c.out / (c.prefix + name);
}

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

struct FitRow {
    RotorParams params;
    std::int64_t kicks = 0;
    std::optional<NonexponentialResult> result;
};

NonexponentialOptions fit_options(const ExperimentConfig& c) {
    NonexponentialOptions o;
    o.fit.floor = c.floor;
    o.fit.central_exclusion = c.central_exclusion;
    o.bin_width = c.bin_width;
    return o;
}

const std::vector<std::string> kFitColumns = {"k",        "tau",      "M",        "kicks",           "l",
                                              "l_inner",  "l_outer",  "residual", "is_nonexponential"};

void write_fit_row(CsvWriter& w, const FitRow& row) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    w.cell(row.params.k).cell(row.params.tau).cell(period_text(row.params.M)).cell(row.kicks);
    if (row.result) {
        const auto& f = row.result->fit;
        w.cell(f.l);
        w.cell(f.two_scale ? f.two_scale->l_inner : nan);
        w.cell(f.two_scale ? f.two_scale->l_outer : nan);
        w.cell(f.residual);
        w.cell(std::string(row.result->is_nonexponential ? "true" : "false"));
    } else {
        w.cell(nan).cell(nan).cell(nan).cell(nan).cell(std::string("false"));
    }
    w.end_row();
}

std::optional<NonexponentialResult> try_fit(const DistributionRecord& dist, const ExperimentConfig& c,
                                            std::vector<std::string>& warnings) {
    try {
        return detect_nonexponential(dist, fit_options(c));
    } catch (const FitError& e) {
        warnings.push_back(std::string("lineshape fit skipped: ") + e.what());
        return std::nullopt;
    }
}

FitRow run_evolve(const ExperimentConfig& c, RunReport& report) {
    const RotorParams params = validate(c.params);
    PropagationSchedule schedule;
    schedule.n_kicks = c.kicks;
    schedule.record_kicks = c.record_kicks;
    schedule.record_kicks.push_back(c.kicks);
    std::sort(schedule.record_kicks.begin(), schedule.record_kicks.end());
    schedule.record_kicks.erase(std::unique(schedule.record_kicks.begin(), schedule.record_kicks.end()),
                                schedule.record_kicks.end());
    schedule.energy_every = c.energy_cadence();

    EvolveOptions options;
    options.edge_threshold = c.edge_threshold;
    auto result = evolve(QuantumState(c.m_max), params, schedule, options);

    const double norm = result.state.norm_squared();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-8)
        throw NumericalError("norm drifted to " + format_double(norm) + " after " + std::to_string(c.kicks) +
                             " kicks");
    if (result.first_edge_overflow)
        report.warnings.push_back("basis overflow: edge probability exceeded " + format_double(c.edge_threshold) +
                                  " first at kick " + std::to_string(*result.first_edge_overflow) +
                                  " (max " + format_double(result.max_edge_probability) + ")");

    CsvMeta meta = run_meta(c, params);
    meta.emplace_back("m_max", std::to_string(c.m_max));
    meta.emplace_back("kicks", std::to_string(c.kicks));
    const auto energy_path = output_path(c, "energy.csv");
    write_energy_csv(energy_path, result.energies, meta);
    report.files.push_back(energy_path);

    for (const auto& dist : result.distributions) {
        const auto name = dist.kick_index == c.kicks ? std::string("pm_final.csv")
                                                     : "pm_kick" + std::to_string(dist.kick_index) + ".csv";
        const auto path = output_path(c, name);
        write_distribution_csv(path, dist, {{"mode", std::string(to_string(c.mode))}});
        report.files.push_back(path);
    }

    FitRow row{params, c.kicks, try_fit(result.distributions.back(), c, report.warnings)};
    const auto fit_path = output_path(c, "fit.csv");
    CsvWriter w(fit_path, meta, kFitColumns);
    write_fit_row(w, row);
    w.close();
    report.files.push_back(fit_path);
    return row;
}

void run_spectrum(const ExperimentConfig& c, RunReport& report) {
    RotorParams base = c.params;
    base.variant = Variant::MkrDOperator;
    SpectrumOptions options;
    options.ambient_dim = c.ambient_dim;
    options.d = c.d;
    options.alpha = c.alpha;
    options.cutoffs = c.cutoffs;
    options.aggregate = c.aggregate;

    std::vector<SpectrumPoint> points(c.M_list.size());
    std::vector<std::exception_ptr> errors(c.M_list.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < c.M_list.size(); i = next++) {
            try {
                RotorParams p = base;
                p.M = c.M_list[i];
                points[i] = mkr_spectrum_point(validate(p), c.M_list[i], options);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const unsigned n = std::max(1u, std::min<unsigned>(c.workers, static_cast<unsigned>(c.M_list.size())));
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    CsvMeta meta = params_meta(base);
    meta.erase(std::remove_if(meta.begin(), meta.end(), [](const auto& kv) { return kv.first == "M"; }), meta.end());
    meta.emplace_back("mode", "spectrum");
    meta.emplace_back("ambient_dim", std::to_string(c.ambient_dim));
    meta.emplace_back("d", std::to_string(c.d));
    meta.emplace_back("alpha", format_double(c.alpha));

    const auto entropy_path = output_path(c, "entropy.csv");
    CsvWriter we(entropy_path, meta, {"M", "S_MKR"});
    for (const auto& p : points) {
        we.cell(p.M).cell(p.entropy);
        we.end_row();
    }
    we.close();
    report.files.push_back(entropy_path);

    CsvMeta bmeta = meta;
    bmeta.emplace_back("cutoff", format_double(c.cutoffs.front()));
    bmeta.emplace_back("aggregate", c.aggregate == BandAggregate::Mean ? "mean" : "max");
    std::vector<std::string> columns{"M", "b_MKR"};
    for (std::size_t i = 1; i < c.cutoffs.size(); ++i) columns.push_back("b_MKR@" + format_double(c.cutoffs[i]));
    const auto band_path = output_path(c, "bandwidth.csv");
    CsvWriter wb(band_path, bmeta, columns);
    for (const auto& p : points) {
        wb.cell(p.M);
        for (double b : p.band_widths) wb.cell(b);
        wb.end_row();
    }
    wb.close();
    report.files.push_back(band_path);
}

void run_classical(const ExperimentConfig& c, RunReport& report) {
    const RotorParams params = validate(c.params);
    const double kappa = params.kappa();
    const std::int64_t M = params.M;
    constexpr double two_pi = 2.0 * std::numbers::pi;

    std::vector<PhasePoint> seeds;
    const int n = c.section_seeds;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) seeds.push_back({two_pi * (i + 0.5) / n, two_pi * (j + 0.5) / n});
    const auto section = poincare_section(kappa, M, seeds, c.section_kicks);

    CsvMeta meta = run_meta(c, params);
    meta.emplace_back("section_seeds", std::to_string(n * n));
    meta.emplace_back("section_kicks", std::to_string(c.section_kicks));
    const auto section_path = output_path(c, "section.csv");
    CsvWriter ws(section_path, meta, {"theta", "L_folded"});
    for (const auto& p : section) {
        ws.cell(p.theta).cell(p.L);
        ws.end_row();
    }
    ws.close();
    report.files.push_back(section_path);

    std::vector<std::int64_t> samples;
    const auto cadence = c.energy_cadence();
    for (std::int64_t k = cadence; k <= c.kicks; k += cadence) samples.push_back(k);
    if (samples.empty() || samples.back() != c.kicks) samples.push_back(c.kicks);
    auto ensemble = ClassicalEnsemble::uniform_theta(c.ensemble, c.seed, c.L0);
    const auto curve = energy_curve(std::move(ensemble), kappa, M, samples, c.workers);

    CsvMeta emeta = run_meta(c, params);
    emeta.emplace_back("ensemble", std::to_string(c.ensemble));
    emeta.emplace_back("seed", std::to_string(c.seed));
    emeta.emplace_back("L0", format_double(c.L0));
    const auto energy_path = output_path(c, "classical_energy.csv");
    CsvWriter we(energy_path, emeta, {"kick", "mean_energy"});
    for (const auto& s : curve) {
        we.cell(s.kick).cell(s.mean_energy);
        we.end_row();
    }
    we.close();
    report.files.push_back(energy_path);
}

void run_fit(const ExperimentConfig& c, RunReport& report) {
    DistributionRecord dist;
    try {
        dist = read_distribution_csv(c.input);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("cannot read distribution: ") + e.what());
    }
    FitRow row{dist.params, dist.kick_index, try_fit(dist, c, report.warnings)};
    CsvMeta meta = params_meta(dist.params);
    meta.emplace_back("mode", "fit");
    meta.emplace_back("input", c.input);
    meta.emplace_back("floor", format_double(c.floor));
    const auto path = output_path(c, "fit.csv");
    CsvWriter w(path, meta, kFitColumns);
    write_fit_row(w, row);
    w.close();
    report.files.push_back(path);
    if (!row.result) throw NumericalError("no usable lineshape in " + c.input);
}

std::string sweep_prefix(const RotorParams& p) {
    return "k" + format_double(p.k) + "_tau" + format_double(p.tau) + "_M" + period_text(p.M) + "_";
}

void run_sweep(const ExperimentConfig& c, RunReport& report) {
    const std::vector<double> ks = c.k_list.empty() ? std::vector<double>{c.params.k} : c.k_list;
    const std::vector<double> taus = c.tau_list.empty() ? std::vector<double>{c.params.tau} : c.tau_list;
    const std::vector<std::int64_t> Ms = c.M_list.empty() ? std::vector<std::int64_t>{c.params.M} : c.M_list;

    std::vector<ExperimentConfig> runs;
    for (double k : ks)
        for (double tau : taus)
            for (auto M : Ms) {
                ExperimentConfig r = c;
                r.mode = Mode::Evolve;
                r.params.k = k;
                r.params.tau = tau;
                r.params.M = M;
                if (M == kNoFlip) r.params.variant = Variant::PlainKR;
                else if (r.params.variant == Variant::PlainKR) r.params.variant = Variant::MkrSignFlip;
                r.params = validate(r.params);
                r.prefix = c.prefix + sweep_prefix(r.params);
                runs.push_back(std::move(r));
            }

    std::vector<FitRow> rows(runs.size());
    std::vector<RunReport> reports(runs.size());
    std::vector<std::exception_ptr> errors(runs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < runs.size(); i = next++) {
            try {
                rows[i] = run_evolve(runs[i], reports[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const unsigned n = std::max(1u, std::min<unsigned>(c.workers, static_cast<unsigned>(runs.size())));
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    for (std::size_t i = 0; i < runs.size(); ++i) {
        report.files.insert(report.files.end(), reports[i].files.begin(), reports[i].files.end());
        for (const auto& w : reports[i].warnings) report.warnings.push_back(runs[i].prefix + ": " + w);
    }

    CsvMeta meta{{"mode", "sweep"}, {"variant", std::string(to_string(c.params.variant))},
                 {"m_max", std::to_string(c.m_max)}, {"kicks", std::to_string(c.kicks)}};
    const auto path = output_path(c, "sweep.csv");
    CsvWriter w(path, meta, kFitColumns);
    for (const auto& row : rows) write_fit_row(w, row);
    w.close();
    report.files.push_back(path);
}

void write_manifest(const ExperimentConfig& c, RunReport& report) {
    nlohmann::json j;
    j["library"] = library_version();
    j["mode"] = std::string(to_string(c.mode));
    j["config"] = c;
    auto files = nlohmann::json::array();
    for (const auto& f : report.files) files.push_back(f.lexically_relative(c.out).generic_string());
    j["outputs"] = files;
    j["warnings"] = report.warnings;
    const auto path = output_path(c, "manifest.json");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + path.string());
    report.files.push_back(path);
}

}  // namespace

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::Evolve: return "evolve";
        case Mode::Spectrum: return "spectrum";
        case Mode::Classical: return "classical";
        case Mode::Fit: return "fit";
        case Mode::Sweep: return "sweep";
    }
    return "evolve";
}

Mode mode_from_string(std::string_view s) {
    const auto v = lower(s);
    if (v == "evolve") return Mode::Evolve;
    if (v == "spectrum") return Mode::Spectrum;
    if (v == "classical") return Mode::Classical;
    if (v == "fit") return Mode::Fit;
    if (v == "sweep") return Mode::Sweep;
    throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

std::int64_t ExperimentConfig::energy_cadence() const {
    return record_every > 0 ? record_every : std::max<std::int64_t>(1, kicks / 1000);
}

void ExperimentConfig::validate() const {
    if (mode != Mode::Sweep) (void)kr::validate(params);
    require(record_every >= 0, "record_every must be non-negative");
    require(!out.empty(), "output directory must not be empty");
    require(prefix.find('/') == std::string::npos, "prefix must not contain '/'");
    switch (mode) {
        case Mode::Evolve:
        case Mode::Sweep:
            require(m_max >= 4, "mmax must be at least 4");
            require(kicks >= 1, "kicks must be at least 1");
            require(edge_threshold > 0.0, "edge_threshold must be positive");
            for (auto k : record_kicks)
                require(k >= 0 && k <= kicks, "record kick " + std::to_string(k) + " outside [0, kicks]");
            require(central_exclusion >= 0 && bin_width >= 1, "invalid fit options");
            if (mode == Mode::Sweep) {
                require(!(k_list.empty() && tau_list.empty() && M_list.empty()),
                        "sweep needs at least one of k_list, tau_list, M_list");
                for (double k : k_list) require(k >= 0.0, "k must be non-negative");
                for (double t : tau_list) require(t > 0.0, "tau must be positive");
                for (auto M : M_list) require(M >= 1, "M must be at least 1");
                if (k_list.empty()) (void)kr::validate(params);
            }
            break;
        case Mode::Spectrum:
            require(!M_list.empty(), "spectrum needs a nonempty M_list");
            for (auto M : M_list) require(M >= 1 && M != kNoFlip, "spectrum M values must be finite and >= 1");
            require(ambient_dim >= 2, "ambient_dim must be at least 2");
            require(d >= 1 && d <= ambient_dim, "d must lie in [1, ambient_dim]");
            require(alpha > 0.0, "alpha must be positive");
            require(!cutoffs.empty(), "at least one cutoff is needed");
            for (double x : cutoffs) require(x > 0.0, "cutoffs must be positive");
            break;
        case Mode::Classical:
            require(kicks >= 1, "kicks must be at least 1");
            require(ensemble >= 1, "ensemble must be at least 1");
            require(section_seeds >= 1, "section_seeds must be at least 1");
            require(section_kicks >= 1, "section_kicks must be at least 1");
            break;
        case Mode::Fit:
            require(!input.empty(), "fit needs --input");
            require(central_exclusion >= 0 && bin_width >= 1, "invalid fit options");
            break;
    }
    require(workers >= 1, "workers must be at least 1");
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j = nlohmann::json::object();
    j["mode"] = std::string(to_string(c.mode));
    nlohmann::json p = c.params;
    p.erase("kappa");  // derived; reading it back would reset tau to 1
    for (auto& [key, value] : p.items()) j[key] = value;
    j["mmax"] = c.m_max;
    j["kicks"] = c.kicks;
    j["record_every"] = c.record_every;
    j["record_kicks"] = c.record_kicks;
    j["edge_threshold"] = c.edge_threshold;
    j["M_list"] = nlohmann::json::array();
    for (auto M : c.M_list) j["M_list"].push_back(M == kNoFlip ? nlohmann::json("inf") : nlohmann::json(M));
    j["ambient_dim"] = c.ambient_dim;
    j["d"] = c.d;
    j["alpha"] = c.alpha;
    j["cutoffs"] = c.cutoffs;
    j["aggregate"] = c.aggregate == BandAggregate::Mean ? "mean" : "max";
    j["ensemble"] = c.ensemble;
    j["L0"] = c.L0;
    j["section_seeds"] = c.section_seeds;
    j["section_kicks"] = c.section_kicks;
    j["input"] = c.input;
    j["floor"] = c.floor;
    j["central_exclusion"] = c.central_exclusion;
    j["bin_width"] = c.bin_width;
    j["k_list"] = c.k_list;
    j["tau_list"] = c.tau_list;
    j["workers"] = c.workers;
    j["seed"] = c.seed;
    j["out"] = c.out.generic_string();
    j["prefix"] = c.prefix;
}

void update_from_json(const nlohmann::json& j, ExperimentConfig& c) {
    if (!j.is_object()) throw std::invalid_argument("configuration must be a JSON object");
    static const std::vector<std::string> known = {
        "mode",  "k",           "tau",       "M",        "variant",       "kappa",         "mmax",
        "kicks", "record_every", "record_kicks", "edge_threshold", "M_list", "ambient_dim", "d",
        "alpha", "cutoffs",     "aggregate", "ensemble", "L0",            "section_seeds", "section_kicks",
        "input", "floor",       "central_exclusion", "bin_width", "k_list", "tau_list", "workers",
        "seed",  "out",         "prefix"};
    for (const auto& item : j.items())
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw std::invalid_argument("unknown configuration key '" + item.key() + "'");
    try {
        if (j.contains("mode")) c.mode = mode_from_string(j["mode"].get<std::string>());
        if (j.contains("k")) c.params.k = j["k"].get<double>();
        if (j.contains("tau")) c.params.tau = j["tau"].get<double>();
        if (j.contains("M") || j.contains("variant")) {
            nlohmann::json p = c.params;
            if (j.contains("M")) p["M"] = j["M"];
            if (j.contains("variant")) p["variant"] = j["variant"];
            c.params = p.get<RotorParams>();
        }
        if (j.contains("kappa")) {
            c.params.k = j["kappa"].get<double>();
            c.params.tau = 1.0;
        }
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) field = j[key].get<std::remove_reference_t<decltype(field)>>();
        };
        get("mmax", c.m_max);
        get("kicks", c.kicks);
        get("record_every", c.record_every);
        get("record_kicks", c.record_kicks);
        get("edge_threshold", c.edge_threshold);
        if (j.contains("M_list")) {
            c.M_list.clear();
            for (const auto& m : j["M_list"])
                c.M_list.push_back(m.is_string() && m.get<std::string>() == "inf" ? kNoFlip : m.get<std::int64_t>());
        }
        get("ambient_dim", c.ambient_dim);
        get("d", c.d);
        get("alpha", c.alpha);
        get("cutoffs", c.cutoffs);
        if (j.contains("aggregate")) {
            const auto a = lower(j["aggregate"].get<std::string>());
            if (a == "mean") c.aggregate = BandAggregate::Mean;
            else if (a == "max") c.aggregate = BandAggregate::Max;
            else throw std::invalid_argument("aggregate must be 'mean' or 'max'");
        }
        get("ensemble", c.ensemble);
        get("L0", c.L0);
        get("section_seeds", c.section_seeds);
        get("section_kicks", c.section_kicks);
        get("input", c.input);
        get("floor", c.floor);
        get("central_exclusion", c.central_exclusion);
        get("bin_width", c.bin_width);
        get("k_list", c.k_list);
        get("tau_list", c.tau_list);
        get("workers", c.workers);
        get("seed", c.seed);
        if (j.contains("out")) c.out = j["out"].get<std::string>();
        get("prefix", c.prefix);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad configuration value: ") + e.what());
    }
}

RunReport run(const ExperimentConfig& config) {
    config.validate();
    std::error_code ec;
    std::filesystem::create_directories(config.out, ec);
    if (ec || !std::filesystem::is_directory(config.out))
        throw std::invalid_argument("cannot create output directory " + config.out.string());

    RunReport report;
    switch (config.mode) {
        case Mode::Evolve: run_evolve(config, report); break;
        case Mode::Spectrum: run_spectrum(config, report); break;
        case Mode::Classical: run_classical(config, report); break;
        case Mode::Fit: run_fit(config, report); break;
        case Mode::Sweep: run_sweep(config, report); break;
    }
    write_manifest(config, report);
    return report;
}

RunReport run_checked(const ExperimentConfig& config) {
    RunReport report;
    try {
        report = run(config);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        report.exit_code = kExitNumerical;
        return report;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        report.exit_code = kExitConfig;
        return report;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        report.exit_code = kExitConfig;
        return report;
    }
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    return report;
}

Scale scale_from_string(std::string_view s) {
    const auto v = lower(s);
    if (v == "ci") return Scale::Ci;
    if (v == "paper") return Scale::Paper;
    throw std::invalid_argument("scale must be 'ci' or 'paper', got '" + std::string(s) + "'");
}

std::vector<std::string> recipe_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"}; }

std::vector<ExperimentConfig> recipe(std::string_view name, Scale scale, const std::filesystem::path& out) {
    const bool paper = scale == Scale::Paper;
    const auto n = lower(name);
    std::vector<ExperimentConfig> runs;
    auto make = [&](Mode mode, double k, double tau, std::int64_t M, const std::string& prefix) {
        ExperimentConfig c;
        c.mode = mode;
        c.params.k = k;
        c.params.tau = tau;
        c.params.M = M;
        c.params.variant = M == kNoFlip ? Variant::PlainKR : Variant::MkrSignFlip;
        c.out = out;
        c.prefix = prefix;
        return c;
    };

    if (n == "fig1") {
        // Lineshapes after 4e5 kicks and the energy curves, k = 4, tau = 2.
        auto kr = make(Mode::Evolve, 4.0, 2.0, kNoFlip, "kr_");
        auto mkr = make(Mode::Evolve, 4.0, 2.0, 50, "mkr_M50_");
        kr.kicks = mkr.kicks = paper ? 400000 : 20000;
        kr.m_max = paper ? 2048 : 1024;
        mkr.m_max = paper ? 8192 : 4096;
        kr.record_every = mkr.record_every = 100;
        kr.record_kicks = mkr.record_kicks = {10000};
        runs = {kr, mkr};
    } else if (n == "fig2") {
        auto c = make(Mode::Spectrum, 4.0, 2.0, 50, "");
        c.params.variant = Variant::MkrDOperator;
        if (paper) {
            c.M_list = {2, 3, 4, 5, 7, 10, 15, 20, 30, 40, 50, 70, 100, 150, 200, 300, 400};
            c.ambient_dim = 16384;
            c.d = 2700;
        } else {
            c.M_list = {2, 5, 10, 20, 50, 100, 200};
            c.ambient_dim = 4096;
            c.d = 1024;
        }
        runs = {c};
    } else if (n == "fig3" || n == "fig4") {
        const double kappa = n == "fig3" ? 5.0 : 10.0;
        for (std::int64_t M : {kNoFlip, std::int64_t{2}}) {
            auto c = make(Mode::Classical, kappa, 1.0, M, M == kNoFlip ? "kr_" : "mkr_M2_");
            c.section_seeds = paper ? 24 : 8;
            c.section_kicks = paper ? 5000 : 500;
            c.ensemble = paper ? 100000 : 2000;
            c.kicks = paper ? 10000 : 1000;
            c.record_every = 10;
            runs.push_back(c);
        }
    } else if (n == "fig5" || n == "fig6") {
        const double k = n == "fig5" ? 5.0 : 10.0;
        for (std::int64_t M : {kNoFlip, std::int64_t{2}, std::int64_t{3}}) {
            auto c = make(Mode::Evolve, k, 1.0, M, M == kNoFlip ? "kr_" : "mkr_M" + std::to_string(M) + "_");
            c.kicks = 1500;
            c.m_max = paper ? 8192 : 4096;
            c.record_every = 10;
            runs.push_back(c);
        }
    } else if (n == "fig7") {
        struct Case {
            double tau, k;
        };
        const Case cases[] = {{1.0, 5.0}, {2.0, 5.0}, {1.0, 5.7}, {2.0, 6.0}, {2.0 + 1e-5, 5.0}};
        for (const auto& cs : cases)
            for (std::int64_t M : {kNoFlip, std::int64_t{2}}) {
                const std::string tag = "tau" + format_double(cs.tau) + "_k" + format_double(cs.k) + "_";
                auto c = make(Mode::Evolve, cs.k, cs.tau, M, tag + (M == kNoFlip ? "kr_" : "mkr_M2_"));
                c.kicks = 8000;
                c.m_max = paper ? 4096 : 2048;
                c.record_every = 10;
                runs.push_back(c);
            }
    } else {
        throw std::invalid_argument("unknown recipe '" + std::string(name) + "' (expected fig1 ... fig7)");
    }
    return runs;
}

std::string library_version() { return std::string("kickrotor ") + KICKROTOR_VERSION; }

}  // namespace kr
