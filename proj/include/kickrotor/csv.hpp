#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "kickrotor/params.hpp"
#include "kickrotor/state.hpp"

namespace kr {

/// Ordered run metadata written as the "# key=value,key=value" first line of
/// every CSV file, so a file can be traced back to its run without the manifest.
using CsvMeta = std::vector<std::pair<std::string, std::string>>;

CsvMeta params_meta(const RotorParams& p);

/// Comma-separated output with LF line endings. Doubles use the shortest
/// representation that parses back to the same value.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const CsvMeta& meta, const std::vector<std::string>& columns);

    CsvWriter& cell(double x);
    CsvWriter& cell(std::int64_t x);
    CsvWriter& cell(int x) { return cell(static_cast<std::int64_t>(x)); }
    CsvWriter& cell(const std::string& s);
    void end_row();

    /// Flushes and throws std::runtime_error if any write failed.
    void close();

private:
    void separator();

    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
    std::size_t filled_ = 0;
};

/// Parsed CSV: metadata line (if present), column names and raw cells.
struct CsvTable {
    std::map<std::string, std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Columns (m, P). The metadata carries the parameters and kick index.
void write_distribution_csv(const std::filesystem::path& path, const DistributionRecord& dist,
                            const CsvMeta& extra = {});
/// Inverse of write_distribution_csv. The m column must be a contiguous range
/// [-m_max, m_max); parameters come from the metadata line when present.
DistributionRecord read_distribution_csv(const std::filesystem::path& path);

/// Columns (kick, e_tilde).
void write_energy_csv(const std::filesystem::path& path, const std::vector<EnergyRecord>& energies,
                      const CsvMeta& meta);

}  // namespace kr
