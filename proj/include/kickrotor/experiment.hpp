#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kickrotor/floquet.hpp"
#include "kickrotor/params.hpp"

namespace kr {

enum class Mode { Evolve, Spectrum, Classical, Fit, Sweep };

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);

/// Everything one run needs. The flat JSON form uses the same names as the
/// command-line flags, with underscores.
struct ExperimentConfig {
    Mode mode = Mode::Evolve;
    RotorParams params;

    // quantum propagation
    int m_max = 2048;
    std::int64_t kicks = 1000;
    /// Energy sampling cadence in kicks; 0 picks about 1000 samples per run.
    std::int64_t record_every = 0;
    /// Extra kicks at which P(m) is written (the final state always is).
    std::vector<std::int64_t> record_kicks;
    double edge_threshold = 1e-16;

    // spectrum
    std::vector<std::int64_t> M_list;
    int ambient_dim = 4096;
    int d = 1024;
    double alpha = 0.96;
    std::vector<double> cutoffs{1e-20};
    BandAggregate aggregate = BandAggregate::Mean;

    // classical
    std::size_t ensemble = 1000;
    double L0 = 0.0;
    /// Section seeds form a grid of section_seeds x section_seeds points in the cell.
    int section_seeds = 12;
    std::int64_t section_kicks = 2000;

    // fit
    std::string input;
    double floor = 1e-15;
    int central_exclusion = 5;
    int bin_width = 1;

    // sweep
    std::vector<double> k_list;
    std::vector<double> tau_list;
    unsigned workers = 1;

    std::uint64_t seed = 1;
    std::filesystem::path out = "out";
    std::string prefix;

    /// Throws std::invalid_argument on the first inconsistent field.
    void validate() const;
    std::int64_t energy_cadence() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
/// Fields missing from j keep the values already in c.
void update_from_json(const nlohmann::json& j, ExperimentConfig& c);

struct RunReport {
    int exit_code = 0;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

/// Executes one configured run, writing CSV files and <prefix>manifest.json
/// into config.out. Configuration errors throw std::invalid_argument;
/// numerical failures throw NumericalError. Basis-overflow warnings are
/// reported but do not fail the run.
RunReport run(const ExperimentConfig& config);

/// Same as run() but maps exceptions to exit codes and writes messages to stderr.
RunReport run_checked(const ExperimentConfig& config);

enum class Scale { Ci, Paper };
Scale scale_from_string(std::string_view s);

/// Named reproduction recipes fig1 ... fig7. Each expands into one or more
/// runs sharing the output directory and distinguished by prefix.
std::vector<ExperimentConfig> recipe(std::string_view name, Scale scale, const std::filesystem::path& out);
std::vector<std::string> recipe_names();

std::string library_version();

}  // namespace kr
