#pragma once

// JSON views of library results, and a deterministic writer: object keys
// sorted, floats printed with 17 significant digits.

#include "khom/af_tower.hpp"
#include "khom/fredholm.hpp"
#include "khom/zlattice.hpp"

#include <json.hpp>

#include <string>

namespace khom {

using Json = nlohmann::json;

std::string dump_json(const Json& j, int indent = 2);

Json to_json(const CFExpansion& cf);
Json to_json(const ConvergentTable& table);
Json to_json(const IntMatrix& m);
Json to_json(const CyclicSequence& seq);
Json to_json(const std::vector<CyclicSequence::NodeReport>& nodes);
Json to_json(const Tolerances& tol);
Json to_json(const PairingResult& r);
Json to_json(const CommutatorReport& r);
Json to_json(const ModuleInvariants& inv);
Json to_json(const BratteliTower& tower);
Json to_json(const CoefficientComparison& c);

/// Row-major [[re, im], ...] rows.
Json matrix_json(const CMatrix& m);

}  // namespace khom
