#pragma once

#include <json.hpp>

#include <string>

#include "hardy/collections.hpp"
#include "hardy/factorization.hpp"

namespace hardy {

using json = nlohmann::json; // object keys serialize in sorted order

json element_to_json(const HardyElement& f);
HardyElement element_from_json(const json& j);

json family_to_json(const CollectionFamily& fam);
CollectionFamily family_from_json(const json& j);

json sign_assignment_to_json(const SignAssignment& s);
SignAssignment sign_assignment_from_json(const json& j);

json operator_to_json(const OperatorMatrix& T);
OperatorMatrix operator_from_json(const json& j);

json condition_report_to_json(const ConditionReport& rep);
json moment_report_to_json(const MomentReport& rep);
json search_report_to_json(const SignSearchReport& rep);
json diagram_report_to_json(const DiagramReport& rep);

json artifacts_to_json(const FactorizationArtifacts& art, const OperatorMatrix& T);

/// Shortest round-trip decimal formatting (used by all CSV output).
std::string format_double(double v);

} // namespace hardy
