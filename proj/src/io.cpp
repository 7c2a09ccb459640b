#include "teachdim/io.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "teachdim/error.hpp"

namespace teachdim::io {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const char* what) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) {
      throw Error(errc::parse_error, std::string("unknown field '") + key + "' in " + what);
    }
  }
}

}  // namespace

Json to_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number_or_null(v[i]));
  return arr;
}

Json to_json(const TeachingSet& set) {
  Json items = Json::array();
  for (const auto& e : set.items) items.push_back(Json{{"x", to_json(e.x)}, {"y", e.y}});
  return Json{{"items", std::move(items)},
              {"size", set.items.size()},
              {"provenance", set.provenance},
              {"scale_factor", set.scale_factor}};
}

Json to_json(const BoundReport& report) {
  Json td = nullptr;
  if (report.td) {
    td = report.td->exact() ? Json(report.td->lo) : Json{{"lo", report.td->lo}, {"hi", report.td->hi}};
  }
  return Json{{"lb1", report.lb1},
              {"lb2", report.lb2},
              {"lb3", report.lb3 ? Json(*report.lb3) : Json(nullptr)},
              {"combined", report.combined},
              {"td", std::move(td)}};
}

Json to_json(const VerifyReport& report) {
  Json details = Json::array();
  for (const auto& c : report.details) {
    Json d{{"name", c.name},
           {"value", number_or_null(c.value)},
           {"tolerance", c.tolerance},
           {"evaluated", c.evaluated},
           {"passed", c.passed}};
    if (!c.note.empty()) d["note"] = c.note;
    details.push_back(std::move(d));
  }
  Json j{{"passed", report.passed},
         {"kkt_residual", number_or_null(report.kkt_residual)},
         {"recovery_distance", number_or_null(report.recovery_distance)},
         {"objective_gap", number_or_null(report.objective_gap)},
         {"uniqueness_spread", number_or_null(report.uniqueness_spread)},
         {"details", std::move(details)}};
  if (report.trained_theta.size() > 0) j["trained_theta"] = to_json(report.trained_theta);
  if (report.boundary_agreement) j["boundary_agreement"] = *report.boundary_agreement;
  return j;
}

Json to_json(const FalsificationReport& report) {
  return Json{{"trials", report.trials},
              {"size_tested", report.size_tested},
              {"successes", report.successes},
              {"box_radius", report.box_radius},
              {"seed", report.seed},
              {"sampled_region", report.sampled_region}};
}

Json to_json(const SolveResult& result) {
  return Json{{"theta", to_json(result.theta)},
              {"objective_value", number_or_null(result.objective_value)},
              {"iterations", result.iterations},
              {"converged", result.converged},
              {"unique", result.unique}};
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(errc::parse_error, std::string(what) + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(errc::parse_error, std::string(what) + " must contain only numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

TeachingSet teaching_set_from_json(const Json& j) {
  if (!j.is_object()) throw Error(errc::parse_error, "teaching set must be a JSON object");
  reject_unknown(j, {"items", "size", "provenance", "scale_factor"}, "teaching set");
  if (!j.contains("items") || !j["items"].is_array()) {
    throw Error(errc::parse_error, "teaching set needs an 'items' array");
  }
  TeachingSet set;
  for (const auto& item : j["items"]) {
    if (!item.is_object()) throw Error(errc::parse_error, "each item must be an object");
    reject_unknown(item, {"x", "y"}, "item");
    if (!item.contains("x") || !item.contains("y") || !item["y"].is_number()) {
      throw Error(errc::parse_error, "each item needs numeric 'x' array and 'y'");
    }
    set.items.push_back({vector_from_json(item["x"], "item x"), item["y"].get<double>()});
  }
  if (j.contains("size")) {
    if (!j["size"].is_number_integer() || j["size"].get<long>() != static_cast<long>(set.items.size())) {
      throw Error(errc::parse_error, "'size' does not match the number of items");
    }
  }
  if (j.contains("provenance")) {
    if (!j["provenance"].is_string()) throw Error(errc::parse_error, "'provenance' must be a string");
    set.provenance = j["provenance"].get<std::string>();
  }
  if (j.contains("scale_factor")) {
    if (!j["scale_factor"].is_number()) throw Error(errc::parse_error, "'scale_factor' must be a number");
    set.scale_factor = j["scale_factor"].get<double>();
  }
  return set;
}

TeachingSet read_teaching_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(errc::parse_error, std::string("invalid JSON in '") + path + "': " + e.what());
  }
  return teaching_set_from_json(j);
}

}  // namespace teachdim::io
