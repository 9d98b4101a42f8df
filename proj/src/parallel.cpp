#include "gbclab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace gbclab::parallel {

int max_threads() {
  int threads = omp_get_max_threads();
  if (const char* cap = std::getenv("GBC_LAB_THREADS")) {
    try {
      const int c = std::stoi(cap);
      if (c >= 1) threads = std::min(threads, c);
    } catch (...) {
      // unparsable cap: keep the OpenMP default
    }
  }
  return std::max(1, threads);
}

double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t kBlock = 32;
  if (v.size() <= kBlock) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

std::vector<double> column(std::span<const double> rows, std::size_t width, std::size_t w) {
  std::vector<double> out(rows.size() / width);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rows[i * width + w];
  return out;
}

}  // namespace gbclab::parallel
