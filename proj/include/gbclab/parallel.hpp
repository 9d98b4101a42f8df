#pragma once

// Data-parallel node evaluation with a fixed reduction tree.
//
// Every kernel has two implementations: an OpenMP one and a plain serial
// loop kept as the reference. Both write per-index results into a buffer and
// reduce it with the same pairwise tree, so results are bit-identical for any
// thread count.

#include <omp.h>

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

namespace gbclab {

enum class Execution { Parallel, Serial };

namespace parallel {

/// Worker count: OpenMP's default capped by the GBC_LAB_THREADS environment variable.
int max_threads();

/// Pairwise (cascade) summation with a fixed split, independent of threads.
double pairwise_sum(std::span<const double> values);

/// out[i * width + w] = result w of f(i, span_of_width). Exceptions raised by
/// f are captured and the one from the lowest index is rethrown after the loop.
template <class F>
std::vector<double> evaluate_rows(std::size_t count, std::size_t width, F&& f, Execution exec) {
  std::vector<double> out(count * width, 0.0);
  if (exec == Execution::Serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) f(i, std::span<double>(out.data() + i * width, width));
    return out;
  }
  std::size_t first_error = count;
  std::exception_ptr error;
  const long long total = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 16) num_threads(max_threads())
  for (long long ii = 0; ii < total; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      f(i, std::span<double>(out.data() + i * width, width));
    } catch (...) {
#pragma omp critical(gbclab_parallel_error)
      {
        if (i < first_error) {
          first_error = i;
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

/// out[i] = f(i).
template <class F>
std::vector<double> evaluate(std::size_t count, F&& f, Execution exec) {
  return evaluate_rows(
      count, 1, [&](std::size_t i, std::span<double> o) { o[0] = f(i); }, exec);
}

/// Column w of a row-major buffer produced by evaluate_rows().
std::vector<double> column(std::span<const double> rows, std::size_t width, std::size_t w);

}  // namespace parallel
}  // namespace gbclab
