#pragma once

#include <nlohmann/json.hpp>

#include "breakcoag/diagnostics.hpp"
#include "breakcoag/dlvp.hpp"
#include "breakcoag/hypotheses.hpp"
#include "breakcoag/solver.hpp"

namespace breakcoag {

// JSON views of the reports. Non-finite numbers serialize as null.
nlohmann::json to_json(const GrowthCheck& check);
nlohmann::json to_json(const GrowthClass& growth);
nlohmann::json to_json(const TrialSet& set);
nlohmann::json to_json(const UniformIntegrabilityReport& report);
nlohmann::json to_json(const HypothesisCheck& check);
nlohmann::json to_json(const HypothesisReport& report);
nlohmann::json to_json(const StepStats& stats);
nlohmann::json to_json(const MassCheck& check);
nlohmann::json to_json(const BoundCheck& check);
nlohmann::json to_json(const AprioriReport& report);
nlohmann::json to_json(const ContractionResult& result);
nlohmann::json to_json(const EquicontinuityResult& result);
nlohmann::json to_json(const SweepRow& row);
nlohmann::json to_json(const WeakFormResidual& residual);
nlohmann::json to_json(const PhiConstruction& pc);
nlohmann::json to_json(const DlvpReport& report);

}  // namespace breakcoag
