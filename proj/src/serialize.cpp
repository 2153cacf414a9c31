#include "ratmin/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ratmin/errors.hpp"

namespace ratmin {

using nlohmann::json;

namespace {

constexpr const char* kBasis = "chebyshev-T";
constexpr const char* kConvention = "plain-sum";

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidArgument(std::string("approximant JSON lacks '") + key + "'");
  }
  return j.at(key);
}

std::vector<double> number_array(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const json& v : j) {
    if (!v.is_number()) {
      throw InvalidArgument(std::string(what) + " must hold numbers only");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

json to_json(const BoundSpec& b) {
  return {{"lower", b.lower}, {"upper", b.upper}, {"positive", b.positive}};
}

BoundSpec bounds_from_json(const json& j) {
  BoundSpec b;
  b.lower = require(j, "lower").get<double>();
  b.upper = require(j, "upper").get<double>();
  if (j.contains("positive")) b.positive = j.at("positive").get<bool>();
  b.validate();
  return b;
}

json to_json(const RationalApproximant& r) {
  json j;
  j["domain"] = {r.domain().a(), r.domain().b()};
  j["num"] = r.num().vec();
  j["den"] = r.den().vec();
  j["basis"] = kBasis;
  j["convention"] = kConvention;
  if (r.bounds()) j["bounds"] = to_json(*r.bounds());
  return j;
}

RationalApproximant approximant_from_json(const json& j) {
  try {
    if (require(j, "basis") != kBasis) {
      throw InvalidArgument("unsupported basis " + j.at("basis").dump());
    }
    if (require(j, "convention") != kConvention) {
      throw InvalidArgument("unsupported coefficient convention " +
                            j.at("convention").dump());
    }
    const std::vector<double> dom = number_array(require(j, "domain"), "domain");
    if (dom.size() != 2) throw InvalidArgument("domain must have two entries");
    std::optional<BoundSpec> bounds;
    if (j.contains("bounds") && !j.at("bounds").is_null()) {
      bounds = bounds_from_json(j.at("bounds"));
    }
    return RationalApproximant(Domain(dom[0], dom[1]),
                               ChebCoeffs(number_array(require(j, "num"), "num")),
                               ChebCoeffs(number_array(require(j, "den"), "den")),
                               bounds);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed approximant JSON: ") + e.what());
  }
}

json to_json(const FitReport& rep) {
  json trace = json::array();
  for (const LevelCheck& c : rep.level_trace) {
    trace.push_back({{"z", c.z}, {"feasible", c.feasible}, {"theta", c.theta}});
  }
  return {{"approximant", to_json(rep.approximant)},
          {"z_lower", rep.z_lower},
          {"z_upper", rep.z_upper},
          {"z_initial", rep.z_initial},
          {"iterations", rep.iterations},
          {"doublings", rep.doublings},
          {"lp_iterations", rep.lp_iterations},
          {"level_trace", std::move(trace)}};
}

std::string dump_approximant(const RationalApproximant& r) {
  return to_json(r).dump(2);
}

RationalApproximant parse_approximant(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("cannot parse approximant JSON: ") + e.what());
  }
  return approximant_from_json(j);
}

void save_approximant(const std::filesystem::path& p,
                      const RationalApproximant& r) {
  std::ofstream out(p);
  if (!out) throw InvalidArgument("cannot write " + p.string());
  out << dump_approximant(r) << '\n';
}

RationalApproximant load_approximant(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw InvalidArgument("cannot open approximant file " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_approximant(ss.str());
}

}  // namespace ratmin
