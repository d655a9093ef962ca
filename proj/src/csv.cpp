#include "kickrotor/csv.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace kr {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

CsvMeta params_meta(const RotorParams& p) {
    return {
        {"k", format_double(p.k)},
        {"tau", format_double(p.tau)},
        {"M", p.M == kNoFlip ? std::string("inf") : std::to_string(p.M)},
        {"variant", std::string(to_string(p.variant))},
        {"kappa", format_double(p.kappa())},
    };
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const CsvMeta& meta, const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    if (!meta.empty()) {
        out_ << '#';
        for (std::size_t i = 0; i < meta.size(); ++i) out_ << (i ? "," : " ") << meta[i].first << '=' << meta[i].second;
        out_ << '\n';
    }
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void CsvWriter::separator() {
    if (filled_ == columns_) throw std::logic_error("too many cells in CSV row of " + path_.string());
    if (filled_ > 0) out_ << ',';
    ++filled_;
}

CsvWriter& CsvWriter::cell(double x) {
    separator();
    out_ << format_double(x);
    return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t x) {
    separator();
    out_ << x;
    return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
    separator();
    out_ << s;
    return *this;
}

void CsvWriter::end_row() {
    if (filled_ != columns_) throw std::logic_error("incomplete CSV row in " + path_.string());
    out_ << '\n';
    filled_ = 0;
}

void CsvWriter::close() {
    out_.flush();
    if (!out_) throw std::runtime_error("write to " + path_.string() + " failed");
    out_.close();
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::invalid_argument("CSV has no column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    CsvTable t;
    std::string line;
    bool have_columns = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            for (const auto& item : split(line.substr(1), ',')) {
                const auto eq = item.find('=');
                if (eq != std::string::npos) t.meta[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
            }
            continue;
        }
        auto cells = split(line, ',');
        if (!have_columns) {
            t.columns = std::move(cells);
            have_columns = true;
        } else {
            if (cells.size() != t.columns.size())
                throw std::invalid_argument(path.string() + ": row with " + std::to_string(cells.size()) +
                                            " cells, expected " + std::to_string(t.columns.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    if (!have_columns) throw std::invalid_argument(path.string() + " has no header line");
    return t;
}

void write_distribution_csv(const std::filesystem::path& path, const DistributionRecord& dist, const CsvMeta& extra) {
    CsvMeta meta = params_meta(dist.params);
    meta.emplace_back("kick", std::to_string(dist.kick_index));
    meta.emplace_back("m_max", std::to_string(dist.grid.m_max));
    meta.insert(meta.end(), extra.begin(), extra.end());
    CsvWriter w(path, meta, {"m", "P"});
    for (std::size_t i = 0; i < dist.p.size(); ++i) {
        w.cell(dist.grid.m_at(i)).cell(dist.p[i]);
        w.end_row();
    }
    w.close();
}

DistributionRecord read_distribution_csv(const std::filesystem::path& path) {
    const auto t = read_csv(path);
    const auto cm = t.column("m"), cp = t.column("P");
    if (t.rows.empty()) throw std::invalid_argument(path.string() + " has no rows");
    const int first = static_cast<int>(parse_double(t.rows.front()[cm]));
    const int m_max = -first;
    if (m_max <= 0 || t.rows.size() != 2 * static_cast<std::size_t>(m_max))
        throw std::invalid_argument(path.string() + ": m must run over [-m_max, m_max)");
    DistributionRecord d;
    d.grid = MGrid{m_max};
    d.p.resize(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (static_cast<int>(parse_double(t.rows[i][cm])) != d.grid.m_at(i))
            throw std::invalid_argument(path.string() + ": m column is not contiguous at row " + std::to_string(i));
        d.p[i] = parse_double(t.rows[i][cp]);
    }
    std::string kv;
    for (const char* key : {"k", "tau", "M", "variant"}) {
        auto it = t.meta.find(key);
        if (it != t.meta.end()) kv += std::string(key) + "=" + it->second + "\n";
    }
    if (!kv.empty()) d.params = params_from_key_value(kv);
    if (auto it = t.meta.find("kick"); it != t.meta.end()) d.kick_index = std::stoll(it->second);
    return d;
}

void write_energy_csv(const std::filesystem::path& path, const std::vector<EnergyRecord>& energies,
                      const CsvMeta& meta) {
    CsvWriter w(path, meta, {"kick", "e_tilde"});
    for (const auto& e : energies) {
        w.cell(e.kick_index).cell(e.e_tilde);
        w.end_row();
    }
    w.close();
}

}  // namespace kr
