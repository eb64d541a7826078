#pragma once

#include <string>

#include "farcheck/verdict.hpp"
#include "farcheck/system.hpp"

namespace far {

// Trace file: `model NAME`, `procs N`, then one `tau(i0,...,ik)` line per
// step.
std::string format_trace(const std::string& model, const Trace& t,
                         const CoreSystem& sys);

struct TraceFile {
  std::string model;
  Trace trace;
};

// Inverse of format_trace; throws ParseError on malformed input or unknown
// transition names.
TraceFile parse_trace(const std::string& text, const CoreSystem& sys);

}  // namespace far
