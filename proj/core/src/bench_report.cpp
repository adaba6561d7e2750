#include "ringmpc/bench_report.hpp"

#include <ostream>
#include <sstream>

namespace ringmpc {

const char* BenchReport::csv_header() {
  return "protocol,ring,parameters,trials,elements_transmitted,oracle_calls,ot_invocations,rounds,"
         "wall_time_ms,correctness_pass_rate";
}

namespace {
std::string rate_str(double r) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << r;
  return os.str();
}
}  // namespace

void BenchReport::write_csv(std::ostream& os) const {
  os << csv_header() << "\n";
  for (const auto& r : rows) {
    os << r.protocol << "," << r.ring_spec << "," << r.parameters << "," << r.trials << ","
       << r.elements_transmitted << "," << r.oracle_calls << "," << r.ot_invocations << "," << r.rounds << ","
       << r.wall_time_ms << "," << rate_str(r.correctness_pass_rate) << "\n";
  }
}

std::string BenchReport::to_json() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << (i ? "," : "") << "{\"protocol\":\"" << r.protocol << "\",\"ring\":\"" << r.ring_spec
       << "\",\"parameters\":\"" << r.parameters << "\",\"trials\":" << r.trials
       << ",\"elements_transmitted\":" << r.elements_transmitted << ",\"oracle_calls\":" << r.oracle_calls
       << ",\"ot_invocations\":" << r.ot_invocations << ",\"rounds\":" << r.rounds
       << ",\"wall_time_ms\":" << r.wall_time_ms << ",\"correctness_pass_rate\":" << rate_str(r.correctness_pass_rate)
       << "}";
  }
  os << "]";
  return os.str();
}

}  // namespace ringmpc
