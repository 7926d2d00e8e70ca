#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sfw/diagnostics.hpp"
#include "sfw/frank_wolfe.hpp"
#include "sfw/geometry.hpp"
#include "sfw/objectives.hpp"
#include "sfw/stochastic_oracle.hpp"
#include "sfw/trace.hpp"

namespace sfw {

using Json = nlohmann::json;

// Parsers throw Error(ConfigError) with a field path such as
// "problem.polytope.A[2]" in the message.

/// {"A": [[...]], "b": [...]} or {"preset": "simplex"|"box", "dim": d, "scale": s}.
Polytope polytope_from_json(const Json& j, const std::string& path = "polytope");
Json to_json(const Polytope& P);

/// {"eigenvalues": [...], "rotation_seed": int|null, "z": [...]}.
QuadraticObjective objective_from_json(const Json& j, const std::string& path = "objective");
Json to_json(const QuadraticObjective& obj);

/// {"kind": "gaussian"|"student_t"|"rademacher", "sigma"|"scale": real, "dof": int}.
NoiseModel noise_from_json(const Json& j, const std::string& path = "noise");
Json to_json(const NoiseModel& noise);

/// {"mode": ..., "params": {...}}; fixed mode takes "n" at top level or in params.
SamplePlan plan_from_json(const Json& j, const std::string& path = "sampling");
Json to_json(const SamplePlan& plan);

Json to_json(const AnalysisConstants& c);
AnalysisConstants constants_from_json(const Json& j, const std::string& path = "constants");

Json to_json(const IterationRecord& r);
/// Trace file: {"algorithm", "epsilon", "T_eps", "total_samples", "final_gap",
/// "n_per_iteration", "constants", "records": [...]}.
Json trace_to_json(const RunTrace& trace, const AnalysisConstants& c);
RunTrace trace_from_json(const Json& j, AnalysisConstants* constants_out = nullptr);

Json to_json(const CheckTally& t);
Json to_json(const VerifyReport& r);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace sfw
