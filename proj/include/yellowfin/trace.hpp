#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace yellowfin {

/// One optimizer step. sq_dist, loss and the measurements describe the
/// iterate produced by this step; mu and lr are the values applied.
struct TraceRow {
  std::size_t step = 0;
  std::optional<double> loss;
  double sq_dist = 0.0;
  double mu = 0.0;
  double lr = 0.0;
  std::optional<double> h_min;
  std::optional<double> h_max;
  std::optional<double> var_C;
  std::optional<double> dist_D;
  std::optional<double> mu_hat_T;
  bool clipped = false;

  bool operator==(const TraceRow&) const = default;
};

inline constexpr const char* kTraceHeader =
    "step,loss,sq_dist,mu,lr,h_min,h_max,var_C,dist_D,mu_hat_T,clipped";

/// Shortest-exact-enough decimal form: 17 significant digits.
std::string format_real(double value);

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows);
void write_trace_csv(const std::string& path, std::span<const TraceRow> rows);

/// Parses a trace written by write_trace_csv. Throws std::runtime_error on a
/// header mismatch or malformed field.
std::vector<TraceRow> read_trace_csv(std::istream& in);
std::vector<TraceRow> read_trace_csv(const std::string& path);

/// Step-wise arithmetic mean over equally long traces. Optional columns are
/// averaged over the traces that have a value; clipped is true if any trace
/// clipped at that step.
std::vector<TraceRow> aggregate_traces(std::span<const std::vector<TraceRow>> traces);

}  // namespace yellowfin
