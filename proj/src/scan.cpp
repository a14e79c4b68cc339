#include "homctl/scan.hpp"

#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace homctl {

namespace {

inline void take_min(ScanMin& acc, double value, std::ptrdiff_t index) {
  if (acc.index < 0 || value < acc.value || (value == acc.value && index < acc.index)) {
    acc.value = value;
    acc.index = index;
  }
}

}  // namespace

ScanMin scan_min(std::size_t count, const std::function<double(std::size_t)>& eval,
                 ExecPolicy policy) {
  ScanMin result{std::numeric_limits<double>::infinity(), -1};
  if (count == 0) return result;

#ifdef _OPENMP
  if (policy == ExecPolicy::parallel) {
    std::vector<ScanMin> partial;
#pragma omp parallel
    {
#pragma omp single
      partial.assign(static_cast<std::size_t>(omp_get_num_threads()),
                     ScanMin{std::numeric_limits<double>::infinity(), -1});
      ScanMin local{std::numeric_limits<double>::infinity(), -1};
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        take_min(local, eval(static_cast<std::size_t>(i)), i);
      }
      partial[static_cast<std::size_t>(omp_get_thread_num())] = local;
    }
    for (const auto& part : partial) {
      if (part.index >= 0) take_min(result, part.value, part.index);
    }
    return result;
  }
#else
  (void)policy;
#endif

  for (std::size_t i = 0; i < count; ++i) {
    take_min(result, eval(i), static_cast<std::ptrdiff_t>(i));
  }
  return result;
}

}  // namespace homctl
