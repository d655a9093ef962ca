#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace kr {

/// How the kick sign modulation is realized. All three MKR variants generate
/// the same dynamics; they differ only in where the pi phase enters.
enum class Variant {
    PlainKR,
    MkrSignFlip,
    MkrDOperator,
    MkrTimeDelay,
};

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view s);

/// Sign-flip period used for the plain rotor (no flips ever happen).
inline constexpr std::int64_t kNoFlip = std::numeric_limits<std::int64_t>::max();

/// Dimensionless rotor parameters. kappa is never stored, it is always k*tau.
struct RotorParams {
    double k = 0.0;
    double tau = 1.0;
    std::int64_t M = kNoFlip;
    Variant variant = Variant::PlainKR;

    double kappa() const { return k * tau; }
    bool is_modified() const { return variant != Variant::PlainKR && M != kNoFlip; }

    /// Classical-only parameterization: the standard map depends on kappa alone.
    static RotorParams from_kappa(double kappa, std::int64_t M = kNoFlip,
                                  Variant variant = Variant::MkrSignFlip);

    friend bool operator==(const RotorParams&, const RotorParams&) = default;
};

/// Throws std::invalid_argument describing the first violated constraint.
/// Plain KR is normalized to M = kNoFlip so that validation is idempotent.
RotorParams validate(RotorParams p);

/// Flat "key=value" lines: k, tau, M, variant, then a read-only kappa line.
std::string to_key_value(const RotorParams& p);
RotorParams params_from_key_value(std::string_view text);

void to_json(nlohmann::json& j, const RotorParams& p);
void from_json(const nlohmann::json& j, RotorParams& p);

/// Shortest decimal that parses back to the identical double.
std::string format_double(double x);
double parse_double(std::string_view s);

}  // namespace kr
