#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ringmpc {

/// One measured protocol configuration. Wall time is reported as zero unless
/// timing was explicitly requested, so reports stay byte-identical across
/// runs with the same seed.
struct BenchRow {
  std::string protocol;
  std::string ring_spec;
  std::string parameters;
  uint64_t trials = 0;
  uint64_t elements_transmitted = 0;
  uint64_t oracle_calls = 0;
  uint64_t ot_invocations = 0;
  uint64_t rounds = 0;
  uint64_t wall_time_ms = 0;
  double correctness_pass_rate = 1.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  static const char* csv_header();
  void write_csv(std::ostream& os) const;
  std::string to_json() const;
};

}  // namespace ringmpc
