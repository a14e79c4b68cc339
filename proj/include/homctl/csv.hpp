#pragma once

#include <string>

#include "homctl/simulation.hpp"

namespace homctl {

/// Columns: t, x1..xn, u1..um, phi1..phip, homnorm. One row per sample,
/// decimal-point formatting independent of the process locale, values at
/// 17 significant digits.
void write_trace_csv(const Trace& trace, const std::string& path);

/// Companion matplotlib script that reads the CSV path given on its command
/// line and renders states, inputs, and barrier values.
void write_plot_script(const std::string& path);

}  // namespace homctl
