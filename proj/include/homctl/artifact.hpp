#pragma once

#include <string>

#include "homctl/controller.hpp"

namespace homctl {

/// Writes the controller as a self-describing JSON text document; every
/// matrix is listed with row-major values printed at 17 significant digits
/// so the artifact round-trips bit-exactly.
void save_controller(const HomogeneousController& c, const std::string& path);

/// Parses an artifact written by save_controller; throws
/// std::invalid_argument on missing fields or dimension mismatches.
HomogeneousController load_controller(const std::string& path);

}  // namespace homctl
