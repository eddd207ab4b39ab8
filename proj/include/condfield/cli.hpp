#pragma once

#include <ostream>
#include <string>

#include "condfield/model.hpp"

namespace condfield {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitParseError = 2;
inline constexpr int kExitBudgetError = 3;

/// Derives the requested system(s) from the model's field and runs every
/// applicable consistency checker; optional dump_path receives the derived
/// tables in the fixture format.
int cmd_validate(const ModelFile& model, const std::string& system, const RunConfig& cfg,
                 std::ostream& os, const std::string& dump_path = "");

/// Field -> system -> field round trip; reports the worst joint deviation.
int cmd_reconstruct(const ModelFile& model, const std::string& via, const RunConfig& cfg,
                    std::ostream& os);

/// Lifts the one-point or Palm system to a full f-system, re-checks its
/// consistency, and compares it against the field-derived ground truth.
int cmd_lift(const ModelFile& model, const std::string& route, const RunConfig& cfg,
             std::ostream& os);

/// Markov, mixing, Dobrushin, or Sullivan diagnostics under the model's
/// neighborhood system.
int cmd_analyze(const ModelFile& model, const std::string& what, const RunConfig& cfg,
                std::ostream& os);

}  // namespace condfield
