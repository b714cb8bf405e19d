#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fairpath/bootstrap.hpp"
#include "fairpath/cfur.hpp"
#include "fairpath/fairness.hpp"
#include "fairpath/metrics.hpp"
#include "fairpath/pipeline.hpp"
#include "fairpath/sfm.hpp"

namespace fairpath {

nlohmann::json to_json(const Summary& s);
nlohmann::json to_json(const StructScore& s);
nlohmann::json to_json(const BootstrapStructScore& s, bool dump_replicates = false);
nlohmann::json to_json(const SfmAssignment& sfm, const std::vector<std::string>& names);
nlohmann::json to_json(const DecompResult& r, bool dump_replicates = false);
nlohmann::json to_json(const CfurResult& r, bool dump_replicates = false);

/// Full report. Contains no timestamps, so equal inputs give equal bytes.
nlohmann::json to_json(const PipelineReport& rep, bool dump_replicates = false);

/// Fixed-width text tables (structure metrics, SFM roles, decomposition,
/// contributions, CFUR) rendered from a report JSON document.
std::string render_tables(const nlohmann::json& report);

}  // namespace fairpath
