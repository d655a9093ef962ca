// Command-line front end: one subcommand per mode plus named figure recipes.
//
//   kickrotor evolve --k 4 --tau 2 --M 50 --kicks 400000 --out runs/fig1
//   kickrotor recipe fig2 --scale ci --out runs/fig2
//   kickrotor --config run.json

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kickrotor/experiment.hpp"

namespace {

struct Overrides {
    std::optional<double> k, tau, kappa;
    std::optional<std::string> M, variant;
    std::optional<int> mmax;
    std::optional<std::int64_t> kicks, record_every;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out, prefix;
    std::optional<unsigned> workers;

    std::optional<std::vector<std::int64_t>> record_kicks;
    std::optional<std::vector<std::string>> M_list;
    std::optional<std::vector<double>> k_list, tau_list, cutoffs;
    std::optional<int> ambient_dim, d, section_seeds, central_exclusion, bin_width;
    std::optional<double> alpha, floor, L0, edge_threshold;
    std::optional<std::string> aggregate, input;
    std::optional<std::size_t> ensemble;
    std::optional<std::int64_t> section_kicks;
};

void add_common(CLI::App* app, Overrides& o) {
    app->add_option("--k", o.k, "kick strength k");
    app->add_option("--tau", o.tau, "effective Planck constant tau");
    app->add_option("--kappa", o.kappa, "classical parameter; sets k = kappa and tau = 1");
    app->add_option("--M", o.M, "sign-flip period in kicks ('inf' for the plain rotor)");
    app->add_option("--variant", o.variant, "kr | sign_flip | d_operator | time_delay");
    app->add_option("--mmax", o.mmax, "momentum grid half-width");
    app->add_option("--kicks", o.kicks, "number of kicks");
    app->add_option("--record-every", o.record_every, "energy sampling cadence in kicks");
    app->add_option("--seed", o.seed, "seed of the classical ensemble");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--prefix", o.prefix, "file name prefix");
    app->add_option("--workers", o.workers, "worker threads for sweeps and spectra");
}

nlohmann::json period(const std::string& text) {
    if (text == "inf" || text == "infinity") return "inf";
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("M expects an integer or 'inf', got '" + text + "'");
}

void apply(const Overrides& o, kr::ExperimentConfig& c) {
    nlohmann::json j = nlohmann::json::object();
    if (o.k) j["k"] = *o.k;
    if (o.tau) j["tau"] = *o.tau;
    if (o.kappa) j["kappa"] = *o.kappa;
    if (o.M) j["M"] = period(*o.M);
    if (o.variant) j["variant"] = *o.variant;
    if (o.mmax) j["mmax"] = *o.mmax;
    if (o.kicks) j["kicks"] = *o.kicks;
    if (o.record_every) j["record_every"] = *o.record_every;
    if (o.seed) j["seed"] = *o.seed;
    if (o.out) j["out"] = *o.out;
    if (o.prefix) j["prefix"] = *o.prefix;
    if (o.workers) j["workers"] = *o.workers;
    if (o.record_kicks) j["record_kicks"] = *o.record_kicks;
    if (o.M_list) {
        j["M_list"] = nlohmann::json::array();
        for (const auto& m : *o.M_list) j["M_list"].push_back(period(m));
    }
    if (o.k_list) j["k_list"] = *o.k_list;
    if (o.tau_list) j["tau_list"] = *o.tau_list;
    if (o.cutoffs) j["cutoffs"] = *o.cutoffs;
    if (o.ambient_dim) j["ambient_dim"] = *o.ambient_dim;
    if (o.d) j["d"] = *o.d;
    if (o.section_seeds) j["section_seeds"] = *o.section_seeds;
    if (o.central_exclusion) j["central_exclusion"] = *o.central_exclusion;
    if (o.bin_width) j["bin_width"] = *o.bin_width;
    if (o.alpha) j["alpha"] = *o.alpha;
    if (o.floor) j["floor"] = *o.floor;
    if (o.L0) j["L0"] = *o.L0;
    if (o.edge_threshold) j["edge_threshold"] = *o.edge_threshold;
    if (o.aggregate) j["aggregate"] = *o.aggregate;
    if (o.input) j["input"] = *o.input;
    if (o.ensemble) j["ensemble"] = *o.ensemble;
    if (o.section_kicks) j["section_kicks"] = *o.section_kicks;
    kr::update_from_json(j, c);
}

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config file " + path + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum and classical kicked rotor with sign-modulated kicks"};
    app.set_version_flag("--version", kr::library_version());
    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration; flags override its fields");
    app.require_subcommand(0, 1);

    Overrides o;
    auto* evolve = app.add_subcommand("evolve", "propagate |0> and write P(m), energies and a lineshape fit");
    auto* spectrum = app.add_subcommand("spectrum", "Shannon entropy and band width of D F^M against M");
    auto* classical = app.add_subcommand("classical", "Poincare section and ensemble energy of the classical map");
    auto* fit = app.add_subcommand("fit", "fit the lineshape of a P(m) CSV file");
    auto* sweep = app.add_subcommand("sweep", "evolve over a grid of (k, tau, M) with a worker pool");
    for (auto* sub : {evolve, spectrum, classical, fit, sweep}) add_common(sub, o);

    for (auto* sub : {evolve, sweep}) {
        sub->add_option("--record-kicks", o.record_kicks, "extra kicks at which P(m) is written")->delimiter(',');
        sub->add_option("--edge-threshold", o.edge_threshold, "edge probability that triggers a warning");
    }
    for (auto* sub : {evolve, fit, sweep}) {
        sub->add_option("--floor", o.floor, "lowest P(m) used by the fits");
        sub->add_option("--central-exclusion", o.central_exclusion, "central states left out of the fits");
        sub->add_option("--bin-width", o.bin_width, "|m| block size for the broken-line fit");
    }
    for (auto* sub : {spectrum, sweep}) sub->add_option("--M-list", o.M_list, "sign-flip periods")->delimiter(',');
    sweep->add_option("--k-list", o.k_list, "kick strengths")->delimiter(',');
    sweep->add_option("--tau-list", o.tau_list, "Planck constants")->delimiter(',');
    spectrum->add_option("--ambient-dim", o.ambient_dim, "basis size of the untruncated propagator");
    spectrum->add_option("--d", o.d, "truncation dimension");
    spectrum->add_option("--alpha", o.alpha, "entropy normalization constant");
    spectrum->add_option("--cutoffs", o.cutoffs, "matrix element cutoffs for the band width")->delimiter(',');
    spectrum->add_option("--aggregate", o.aggregate, "mean | max over rows");
    classical->add_option("--ensemble", o.ensemble, "trajectories in the energy ensemble");
    classical->add_option("--L0", o.L0, "initial momentum of the ensemble");
    classical->add_option("--section-seeds", o.section_seeds, "section seeds per axis");
    classical->add_option("--section-kicks", o.section_kicks, "kicks per section seed");
    fit->add_option("--input", o.input, "P(m) CSV written by evolve")->check(CLI::ExistingFile);

    auto* rec = app.add_subcommand("recipe", "run a named figure recipe");
    std::string recipe_name, scale = "ci", recipe_out = "out";
    rec->add_option("name", recipe_name, "fig1 ... fig7")->required();
    rec->add_option("--scale", scale, "ci | paper")->check(CLI::IsMember({"ci", "paper"}));
    rec->add_option("--out", recipe_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kr::kExitOk : kr::kExitConfig;
    }

    try {
        if (rec->parsed()) {
            const auto runs = kr::recipe(recipe_name, kr::scale_from_string(scale), recipe_out);
            for (const auto& c : runs) {
                std::cerr << "recipe " << recipe_name << ": " << kr::to_string(c.mode) << " "
                          << (c.prefix.empty() ? std::string("(no prefix)") : c.prefix) << '\n';
                const auto r = kr::run_checked(c);
                if (r.exit_code != kr::kExitOk) return r.exit_code;
            }
            return kr::kExitOk;
        }

        kr::ExperimentConfig config;
        if (!config_path.empty()) kr::update_from_json(load_config(config_path), config);
        const std::pair<CLI::App*, kr::Mode> modes[] = {{evolve, kr::Mode::Evolve},
                                                        {spectrum, kr::Mode::Spectrum},
                                                        {classical, kr::Mode::Classical},
                                                        {fit, kr::Mode::Fit},
                                                        {sweep, kr::Mode::Sweep}};
        bool chosen = !config_path.empty();
        for (const auto& [sub, mode] : modes)
            if (sub->parsed()) {
                config.mode = mode;
                chosen = true;
            }
        if (!chosen) {
            std::cerr << app.help();
            return kr::kExitConfig;
        }
        apply(o, config);
        const auto report = kr::run_checked(config);
        if (report.exit_code == kr::kExitOk)
            for (const auto& f : report.files) std::cout << f.generic_string() << '\n';
        return report.exit_code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kr::kExitConfig;
    }
}
