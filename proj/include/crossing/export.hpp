#pragma once

#include <string>
#include <vector>

#include "crossing/sim.hpp"

namespace crossing {

/// Serializes a trace as one wide CSV row per tick. Byte-stable given the
/// same trace.
std::string trace_to_csv(const std::vector<TraceRow>& trace);

/// Writes per-figure CSV panels (trajectory, speeds, shield internals,
/// reward components) plus the training curve into out_dir.
void export_plotdata(const std::vector<TraceRow>& trace, const std::string& metrics_csv,
                     const std::string& out_dir);

}  // namespace crossing
