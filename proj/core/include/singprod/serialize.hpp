// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <optional>

#include <nlohmann/json.hpp>

#include "singprod/clt.hpp"
#include "singprod/distributions.hpp"
#include "singprod/estimators.hpp"
#include "singprod/hill.hpp"
#include "singprod/quadrature.hpp"

namespace singprod {

// Distribution schema:
//   {"kind": "binary",      "a": real, "b": real, "p": real}
//   {"kind": "uniform",     "lo": real, "hi": real}
//   {"kind": "exponential", "rate": real, "sign": +1|-1 (optional, default +1)}
//   {"kind": "laplace",     "scale": real}
//   {"kind": "atoms",       "atoms": [real...], "weights": [real...]}
// Parsing throws Error{ConfigError} on malformed input and validates the
// result (Error{ZeroAtom | CancellingAtoms | BadWeights | BadSupport}).
EntryDistribution distribution_from_json(const nlohmann::json& j);
nlohmann::json distribution_to_json(const EntryDistribution& dist);

// Optional numbers map to null.
nlohmann::json optional_number(const std::optional<double>& v);

nlohmann::json to_json(const LambdaEstimate& e);
nlohmann::json to_json(const BlockMomentEstimate& e);
nlohmann::json to_json(const QuadratureResult& r);
nlohmann::json to_json(const DegeneracyVerdict& v);
nlohmann::json to_json(const KsResult& k);
// Summary fields plus, when include_samples, the full sample list.
nlohmann::json to_json(const CltReport& r, bool include_samples = true);
nlohmann::json to_json(const CancellationReport& r);
nlohmann::json to_json(const GrowthCheck& g);

// One row per replication, 17 significant digits.
void write_csv(std::ostream& out, const CltReport& r);
void write_csv(std::ostream& out, const CancellationReport& r);

}  // namespace singprod
