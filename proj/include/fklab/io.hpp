#pragma once

#include <json.hpp>

#include "fklab/birkhoff.hpp"
#include "fklab/bump.hpp"
#include "fklab/minimize.hpp"
#include "fklab/numtheory.hpp"
#include "fklab/pipeline.hpp"
#include "fklab/potentials.hpp"

namespace fk {

// Ordered maps keep artifact field order stable so identical runs are
// byte-identical.
using json = nlohmann::ordered_json;

json to_json(const Rat& v);
Rat rat_from_json(const json& j);

json to_json(const PowSum& v);
PowSum powsum_from_json(const json& j);

json to_json(const PeriodicConfig& x);
PeriodicConfig config_from_json(const json& j);

json to_json(const GapInterval& g);
json to_json(const BumpSpec& b);
BumpSpec bump_from_json(const json& j);

json to_json(const MinimizeResult& m);
json to_json(const MinimizerSet& s);
json to_json(const ConditionReport& r);
json to_json(const NearPeriodicityResult& r);
json to_json(const ConfinementResult& r);
json to_json(const DestroyPeriodicResult& r);

json to_json(const CheckResult& c);
CheckResult check_from_json(const json& j);
json to_json(const ParamSelection& s);
ParamSelection selection_from_json(const json& j);
json to_json(const SelectionOutcome& s);

json to_json(const Stage1Result& s);
json to_json(const Stage2Result& s);
json to_json(const OmegaProbeReport& r);
json to_json(const DestructionCertificate& c);
DestructionCertificate certificate_from_json(const json& j);
json to_json(const PipelineResult& r);

}  // namespace fk
