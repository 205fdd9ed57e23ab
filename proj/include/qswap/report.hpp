#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qswap/analysis.hpp"
#include "qswap/protocol.hpp"

namespace qswap {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double value);

/// RFC-4180 field quoting.
std::string csv_escape(const std::string& field);

json to_json(const cplx& z);
json to_json(const QState& state);
json to_json(const CorrectionOp& op);
json to_json(const ProtocolRunRecord& record);
json to_json(const BranchRecord& branch);
json to_json(const SuccessBreakdown& breakdown);
json to_json(const MonteCarloResult& result);
json to_json(const SweepResult& result);

} // namespace qswap
