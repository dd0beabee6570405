#include "fidtrust/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace fidtrust {

int thread_count() { return omp_get_max_threads(); }

void set_thread_count(int n) {
  if (n >= 1) omp_set_num_threads(n);
}

int configure_threads(std::optional<int> requested) {
  if (requested && *requested >= 1) {
    set_thread_count(*requested);
  } else if (const char* env = std::getenv("FIDTRUST_THREADS")) {
    try {
      set_thread_count(std::stoi(env));
    } catch (const std::exception&) {
      // malformed value: keep the OpenMP default
    }
  }
  return thread_count();
}

}  // namespace fidtrust
