#pragma once

// Sample budgets. Every budget is max(1, ceil(scale * formula)) with natural
// logarithms. Where the vote budget depends on the district budget, the final
// integer district budget is substituted.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ballot/errors.hpp"

namespace ballot {

enum class Algorithm {
    Alg1,
    Generic,
    Alg3,
    Alg4,
    SinglePlurality,
    MedianKnown,
    MedianUnknown,
    NoisySingle,
    NoisyDistricts,
    MovAdditive,
    MovMultiplicative,
};

inline std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Alg1: return "alg1";
        case Algorithm::Generic: return "generic";
        case Algorithm::Alg3: return "alg3";
        case Algorithm::Alg4: return "alg4";
        case Algorithm::SinglePlurality: return "single-plurality";
        case Algorithm::MedianKnown: return "median-known";
        case Algorithm::MedianUnknown: return "median-unknown";
        case Algorithm::NoisySingle: return "noisy-single";
        case Algorithm::NoisyDistricts: return "noisy-districts";
        case Algorithm::MovAdditive: return "mov-add";
        case Algorithm::MovMultiplicative: return "mov-mult";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
    for (auto a : {Algorithm::Alg1, Algorithm::Generic, Algorithm::Alg3, Algorithm::Alg4, Algorithm::SinglePlurality,
                   Algorithm::MedianKnown, Algorithm::MedianUnknown, Algorithm::NoisySingle,
                   Algorithm::NoisyDistricts, Algorithm::MovAdditive, Algorithm::MovMultiplicative})
        if (algorithm_name(a) == s) return a;
    throw ParameterError("unknown algorithm '" + std::string(s) + "'");
}

struct PlanParams {
    double epsilon = 0;
    double delta = 0;
    std::optional<double> kappa;
    /// Iteration value for the unknown-margin algorithms; TV bound for the noisy ones.
    std::optional<double> gamma;
    double scale = 1;
};

/// l1 districts, l2 votes per district. Single-district plans have l1 = 1 and
/// draw no district.
struct SamplePlan {
    Algorithm algorithm = Algorithm::Alg1;
    std::uint64_t l1 = 1;
    std::uint64_t l2 = 0;
    double scale = 1;

    bool operator==(const SamplePlan&) const = default;
};

inline std::uint64_t budget(double scale, double value) {
    const double x = std::ceil(scale * value);
    if (!std::isfinite(x) || x > 9.0e15) throw ParameterError("sample budget is not finite");
    return x < 1 ? 1 : static_cast<std::uint64_t>(x);
}

/// 3/theta^2 * ln(2/delta): single-district plurality at deviation theta.
inline double plurality_votes_formula(double theta, double delta) { return 3.0 / (theta * theta) * std::log(2.0 / delta); }

/// 1/(2 eps^2) * ln(4/delta): median with or without a known order.
inline double median_votes_formula(double epsilon, double delta) {
    return 1.0 / (2.0 * epsilon * epsilon) * std::log(4.0 / delta);
}

/// 1024/(3 eps^2) * ln(4/delta), written so that it coincides with the noisy
/// district formula at zero bias.
inline double districts_formula(double epsilon, double delta) {
    return 1024.0 / (3.0 * (epsilon * epsilon)) * std::log(4.0 / delta);
}

namespace detail {

inline void require(bool ok, const char* what) {
    if (!ok) throw ParameterError(what);
}

inline void require_eps_delta(const PlanParams& p) {
    require(p.epsilon > 0 && p.epsilon < 1, "epsilon must satisfy 0 < epsilon < 1");
    require(p.delta > 0 && p.delta < 1, "delta must satisfy 0 < delta < 1");
}

inline double gamma_or_zero(const PlanParams& p) { return p.gamma.value_or(0.0); }

}  // namespace detail

inline SamplePlan plan(Algorithm a, const PlanParams& p) {
    using detail::require;
    require(p.scale > 0 && std::isfinite(p.scale), "scale must be positive");
    SamplePlan s{a, 1, 0, p.scale};
    switch (a) {
        case Algorithm::Alg1:
        case Algorithm::Generic:
            detail::require_eps_delta(p);
            s.l1 = budget(p.scale, districts_formula(p.epsilon, p.delta));
            s.l2 = budget(p.scale, plurality_votes_formula(p.epsilon / 8.0, p.epsilon / 32.0));
            break;
        case Algorithm::Alg3: {
            require(p.delta > 0 && p.delta < 1, "delta must satisfy 0 < delta < 1");
            require(p.kappa.has_value(), "kappa is required");
            require(*p.kappa >= 4, "kappa >= 4 is required");
            require(p.gamma.has_value() && *p.gamma > 0 && *p.gamma < 1, "gamma must satisfy 0 < gamma < 1");
            const double k2 = *p.kappa * *p.kappa;
            const double g = *p.gamma;
            s.l1 = budget(p.scale, 5.0 * k2 / (18.0 * g * g) * std::log(4.0 / (g * p.delta)));
            s.l2 = budget(p.scale, 5.0 * k2 / (2.0 * g * g) * std::log(2.0 * static_cast<double>(s.l1) / (g * p.delta)));
            break;
        }
        case Algorithm::Alg4: {
            require(p.delta > 0 && p.delta < 1, "delta must satisfy 0 < delta < 1");
            require(p.gamma.has_value() && *p.gamma > 0 && *p.gamma < 1, "gamma must satisfy 0 < gamma < 1");
            const double g = *p.gamma;
            s.l1 = budget(p.scale, 175.0 / (2.0 * g * g) * std::log(4.0 / (g * p.delta)));
            s.l2 = budget(p.scale, 57344.0 / (9.0 * g * g * g * g) * std::log(2.0 * static_cast<double>(s.l1) / (g * p.delta)));
            break;
        }
        case Algorithm::SinglePlurality:
            detail::require_eps_delta(p);
            s.l2 = budget(p.scale, plurality_votes_formula(p.epsilon, p.delta));
            break;
        case Algorithm::MedianKnown:
            detail::require_eps_delta(p);
            s.l2 = budget(p.scale, median_votes_formula(p.epsilon, p.delta));
            break;
        case Algorithm::MedianUnknown:
            detail::require_eps_delta(p);
            s.l2 = budget(p.scale, median_votes_formula(p.epsilon, p.delta));
            if (s.l2 % 2 == 0) ++s.l2;
            break;
        case Algorithm::NoisySingle: {
            detail::require_eps_delta(p);
            const double g = detail::gamma_or_zero(p);
            require(g >= 0 && g < p.epsilon, "gamma must satisfy 0 <= gamma < epsilon");
            s.l2 = budget(p.scale, plurality_votes_formula(p.epsilon - g, p.delta));
            break;
        }
        case Algorithm::NoisyDistricts: {
            detail::require_eps_delta(p);
            const double g = detail::gamma_or_zero(p);
            require(g >= 0 && 32.0 * g < 3.0 * p.epsilon, "gamma must satisfy 0 <= 32 gamma < 3 epsilon");
            s.l1 = budget(p.scale, districts_formula(p.epsilon - 32.0 * g / 3.0, p.delta));
            s.l2 = budget(p.scale, plurality_votes_formula((p.epsilon - g) / 8.0, p.epsilon / 32.0));
            break;
        }
        case Algorithm::MovAdditive: {
            detail::require_eps_delta(p);
            require(p.kappa.has_value(), "kappa is required");
            require(*p.kappa >= 2, "kappa >= 2 is required");
            const double k2 = *p.kappa * *p.kappa;
            const double e2 = p.epsilon * p.epsilon;
            s.l1 = budget(p.scale, 27.0 * k2 / (e2 * e2) * std::log(16.0 / p.delta));
            s.l2 = budget(p.scale, 27.0 * k2 / e2 * std::log(8.0 * static_cast<double>(s.l1) / p.delta));
            break;
        }
        case Algorithm::MovMultiplicative:
            throw ParameterError("mov-mult has no closed-form budget; it calls mov-add per round");
    }
    return s;
}

}  // namespace ballot
