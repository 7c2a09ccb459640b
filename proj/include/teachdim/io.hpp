#pragma once

// JSON forms of the public reports. Doubles are written with 17 significant
// digits, so a parsed set reproduces the written values exactly.

#include <json.hpp>

#include <string>

#include "teachdim/bounds.hpp"
#include "teachdim/model.hpp"
#include "teachdim/oracle.hpp"
#include "teachdim/solvers.hpp"
#include "teachdim/verify.hpp"

namespace teachdim::io {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const TeachingSet& set);
Json to_json(const BoundReport& report);
Json to_json(const VerifyReport& report);
Json to_json(const FalsificationReport& report);
Json to_json(const SolveResult& result);

/// Strict parse: unknown keys, wrong types and size/item-count mismatches
/// raise Error(parse_error).
TeachingSet teaching_set_from_json(const Json& j);
TeachingSet read_teaching_set(const std::string& path);

Vector vector_from_json(const Json& j, const char* what);

}  // namespace teachdim::io
