#include "kickrotor/params.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <nlohmann/json.hpp>

namespace kr {

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 4> kVariantNames{{
    {Variant::PlainKR, "plain_kr"},
    {Variant::MkrSignFlip, "mkr_sign_flip"},
    {Variant::MkrDOperator, "mkr_d_operator"},
    {Variant::MkrTimeDelay, "mkr_time_delay"},
}};

std::string format_period(std::int64_t M) {
    return M == kNoFlip ? std::string("inf") : std::to_string(M);
}

std::int64_t parse_period(std::string_view s) {
    if (s == "inf" || s == "infinity") return kNoFlip;
    std::int64_t M = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), M);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("M must be a positive integer or 'inf', got '" + std::string(s) + "'");
    return M;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string_view to_string(Variant v) {
    for (const auto& [value, name] : kVariantNames)
        if (value == v) return name;
    return "unknown";
}

Variant variant_from_string(std::string_view s) {
    for (const auto& [value, name] : kVariantNames)
        if (name == s) return value;
    // Short aliases accepted on the command line.
    if (s == "kr" || s == "plain") return Variant::PlainKR;
    if (s == "mkr" || s == "sign_flip") return Variant::MkrSignFlip;
    if (s == "d_operator") return Variant::MkrDOperator;
    if (s == "time_delay") return Variant::MkrTimeDelay;
    throw std::invalid_argument("unknown variant '" + std::string(s) + "'");
}

RotorParams RotorParams::from_kappa(double kappa, std::int64_t M, Variant variant) {
    return RotorParams{kappa, 1.0, M, M == kNoFlip ? Variant::PlainKR : variant};
}

RotorParams validate(RotorParams p) {
    if (!std::isfinite(p.tau) || p.tau <= 0.0) throw std::invalid_argument("tau must be positive");
    if (!std::isfinite(p.k) || p.k < 0.0) throw std::invalid_argument("k must be non-negative");
    if (p.M < 1) throw std::invalid_argument("M must be at least 1");
    if (p.variant == Variant::PlainKR) p.M = kNoFlip;
    return p;
}

std::string format_double(double x) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), ptr);
}

double parse_double(std::string_view s) {
    s = trim(s);
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    return x;
}

std::string to_key_value(const RotorParams& p) {
    std::ostringstream out;
    out << "k=" << format_double(p.k) << '\n'
        << "tau=" << format_double(p.tau) << '\n'
        << "M=" << format_period(p.M) << '\n'
        << "variant=" << to_string(p.variant) << '\n'
        << "kappa=" << format_double(p.kappa()) << '\n';
    return out.str();
}

RotorParams params_from_key_value(std::string_view text) {
    RotorParams p;
    while (!text.empty()) {
        auto eol = text.find('\n');
        auto line = trim(text.substr(0, eol));
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("expected key=value, got '" + std::string(line) + "'");
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key == "k") p.k = parse_double(value);
        else if (key == "tau") p.tau = parse_double(value);
        else if (key == "M") p.M = parse_period(value);
        else if (key == "variant") p.variant = variant_from_string(value);
        else if (key == "kappa") continue;  // derived
        else throw std::invalid_argument("unknown parameter '" + std::string(key) + "'");
    }
    return p;
}

void to_json(nlohmann::json& j, const RotorParams& p) {
    j = nlohmann::json{{"k", p.k}, {"tau", p.tau}, {"variant", std::string(to_string(p.variant))},
                       {"kappa", p.kappa()}};
    if (p.M == kNoFlip) j["M"] = "inf";
    else j["M"] = p.M;
}

void from_json(const nlohmann::json& j, RotorParams& p) {
    p = RotorParams{};
    if (j.contains("k")) p.k = j.at("k").get<double>();
    if (j.contains("tau")) p.tau = j.at("tau").get<double>();
    if (j.contains("M")) {
        const auto& m = j.at("M");
        p.M = m.is_string() ? parse_period(m.get<std::string>()) : m.get<std::int64_t>();
    }
    if (j.contains("variant")) p.variant = variant_from_string(j.at("variant").get<std::string>());
}

}  // namespace kr
