#pragma once

#include <filesystem>
#include <string>

#include "ratmin/minimax.hpp"
#include "ratmin/rational.hpp"
#include <nlohmann/json.hpp>

namespace ratmin {

// Approximant JSON:
//   {"domain":[a,b], "num":[...], "den":[...],
//    "basis":"chebyshev-T", "convention":"plain-sum",
//    "bounds":{"lower":l, "upper":u, "positive":bool}}   (bounds optional)
// Doubles are written in shortest round-trip form, so load(save(r)) == r.
nlohmann::json to_json(const RationalApproximant& r);
RationalApproximant approximant_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BoundSpec& b);
BoundSpec bounds_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FitReport& rep);

std::string dump_approximant(const RationalApproximant& r);
RationalApproximant parse_approximant(const std::string& text);

void save_approximant(const std::filesystem::path& p,
                      const RationalApproximant& r);
RationalApproximant load_approximant(const std::filesystem::path& p);

}  // namespace ratmin
