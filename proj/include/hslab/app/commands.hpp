#pragma once

#include "hslab/app/config.hpp"
#include "hslab/app/report.hpp"
#include "hslab/fre.hpp"
#include "hslab/sharpness.hpp"

#include <iosfwd>

namespace hslab::app {

enum ExitCode : int { Ok = 0, Failure = 1, ConfigFailure = 2, NumericalFailure = 3, AcceptanceFailure = 4 };

// Runs one finalized config, writes its artifacts under cfg.output_dir and returns
// the exit code. Module errors are mapped to exit codes here; nothing escapes.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// argv front end: `hslab <command> [--config FILE] [--a X] ... [--set key=value]`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

Json ladder_json(const LadderReport& r);
Json scan_json(const FreSpec& spec, std::string_view form, double a, double k, double s, const ScanReport& r);

} // namespace hslab::app
