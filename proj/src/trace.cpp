#include "yellowfin/trace.hpp"

#include <charconv>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace yellowfin {

namespace {

std::string optional_field(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string{};
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

double parse_real(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw std::runtime_error("malformed number in trace: '" + text + "'");
  }
  return v;
}

std::optional<double> parse_optional(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_real(text);
}

void accumulate(std::optional<double>& sum, std::size_t& count, const std::optional<double>& v) {
  if (!v) return;
  sum = sum.value_or(0.0) + *v;
  ++count;
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows) {
  out << kTraceHeader << '\n';
  for (const TraceRow& r : rows) {
    out << r.step << ',' << optional_field(r.loss) << ',' << format_real(r.sq_dist) << ','
        << format_real(r.mu) << ',' << format_real(r.lr) << ',' << optional_field(r.h_min) << ','
        << optional_field(r.h_max) << ',' << optional_field(r.var_C) << ','
        << optional_field(r.dist_D) << ',' << optional_field(r.mu_hat_T) << ','
        << (r.clipped ? 1 : 0) << '\n';
  }
}

void write_trace_csv(const std::string& path, std::span<const TraceRow> rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_trace_csv(out, rows);
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw std::runtime_error("unexpected trace header: " + line);

  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 11) {
      throw std::runtime_error("trace row has " + std::to_string(f.size()) + " fields");
    }
    TraceRow r;
    std::size_t step = 0;
    const auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), step);
    if (ec != std::errc{} || ptr != f[0].data() + f[0].size()) {
      throw std::runtime_error("malformed step field: '" + f[0] + "'");
    }
    r.step = step;
    r.loss = parse_optional(f[1]);
    r.sq_dist = parse_real(f[2]);
    r.mu = parse_real(f[3]);
    r.lr = parse_real(f[4]);
    r.h_min = parse_optional(f[5]);
    r.h_max = parse_optional(f[6]);
    r.var_C = parse_optional(f[7]);
    r.dist_D = parse_optional(f[8]);
    r.mu_hat_T = parse_optional(f[9]);
    if (f[10] != "0" && f[10] != "1") throw std::runtime_error("malformed clipped field");
    r.clipped = f[10] == "1";
    rows.push_back(r);
  }
  return rows;
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_trace_csv(in);
}

std::vector<TraceRow> aggregate_traces(std::span<const std::vector<TraceRow>> traces) {
  if (traces.empty()) return {};
  const std::size_t len = traces.front().size();
  for (const auto& t : traces) {
    if (t.size() != len) throw std::runtime_error("cannot aggregate traces of unequal length");
  }
  const auto n = static_cast<double>(traces.size());
  std::vector<TraceRow> out(len);
  for (std::size_t s = 0; s < len; ++s) {
    TraceRow& agg = out[s];
    agg.step = traces.front()[s].step;
    std::optional<double> loss, h_min, h_max, var_c, dist_d, mu_hat;
    std::size_t n_loss = 0, n_hmin = 0, n_hmax = 0, n_var = 0, n_dist = 0, n_mu_hat = 0;
    for (const auto& t : traces) {
      const TraceRow& r = t[s];
      agg.sq_dist += r.sq_dist;
      agg.mu += r.mu;
      agg.lr += r.lr;
      agg.clipped = agg.clipped || r.clipped;
      accumulate(loss, n_loss, r.loss);
      accumulate(h_min, n_hmin, r.h_min);
      accumulate(h_max, n_hmax, r.h_max);
      accumulate(var_c, n_var, r.var_C);
      accumulate(dist_d, n_dist, r.dist_D);
      accumulate(mu_hat, n_mu_hat, r.mu_hat_T);
    }
    agg.sq_dist /= n;
    agg.mu /= n;
    agg.lr /= n;
    const auto mean = [](const std::optional<double>& sum, std::size_t count) {
      return sum ? std::optional<double>(*sum / static_cast<double>(count)) : std::nullopt;
    };
    agg.loss = mean(loss, n_loss);
    agg.h_min = mean(h_min, n_hmin);
    agg.h_max = mean(h_max, n_hmax);
    agg.var_C = mean(var_c, n_var);
    agg.dist_D = mean(dist_d, n_dist);
    agg.mu_hat_T = mean(mu_hat, n_mu_hat);
  }
  return out;
}

}  // namespace yellowfin
