#pragma once

#include <cstddef>
#include <functional>

namespace homctl {

enum class ExecPolicy { serial, parallel };

struct ScanMin {
  double value = 0.0;
  std::ptrdiff_t index = -1;  // -1 when the range is empty
};

/// Minimum of eval(i) over i in [0, count). The parallel path splits the
/// index range across OpenMP threads and merges per-thread minima; ties break
/// toward the smaller index, so both policies return identical results for
/// the same per-index values. Falls back to the serial path when built
/// without OpenMP.
ScanMin scan_min(std::size_t count, const std::function<double(std::size_t)>& eval,
                 ExecPolicy policy = ExecPolicy::parallel);

}  // namespace homctl
