#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ampaodv/metrics.hpp"
#include "ampaodv/scenario.hpp"
#include "ampaodv/selection.hpp"

namespace ampaodv {

enum class SweepAxis : std::uint8_t { kSpeed, kFlows, kNodes };

[[nodiscard]] inline std::string_view axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::kSpeed: return "speed";
    case SweepAxis::kFlows: return "flows";
    case SweepAxis::kNodes: return "nodes";
  }
  return "?";
}

[[nodiscard]] inline std::optional<SweepAxis> parse_axis(std::string_view s) {
  for (auto a : {SweepAxis::kSpeed, SweepAxis::kFlows, SweepAxis::kNodes})
    if (axis_name(a) == s) return a;
  return std::nullopt;
}

/// Scenario for one sweep point. Speed sets a constant node speed; flows and
/// nodes keep the base speed range.
[[nodiscard]] inline ScenarioConfig apply_axis(ScenarioConfig cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::kSpeed:
      cfg.mobility.v_min = cfg.mobility.v_max = value;
      break;
    case SweepAxis::kFlows:
      if (value < 0 || value != std::floor(value)) throw std::invalid_argument("flow count must be a whole number");
      cfg.flows.clear();
      cfg.traffic.flow_count = static_cast<std::uint32_t>(value);
      break;
    case SweepAxis::kNodes:
      if (value < 1 || value != std::floor(value)) throw std::invalid_argument("node count must be a positive whole number");
      cfg.placed_nodes.clear();
      cfg.node_count = static_cast<std::uint32_t>(value);
      break;
  }
  return cfg;
}

struct SweepRow {
  double axis_value = 0.0;
  ProtocolVariant variant = ProtocolVariant::kAodvBaseline;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricsReport report;
};

struct SweepTable {
  SweepAxis axis = SweepAxis::kSpeed;
  std::vector<SweepRow> rows;  // ordered by (value, variant, seed) as requested
};

/// Mean and sample standard deviation over the runs where the metric is defined.
struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

[[nodiscard]] inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / xs.size();
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / (xs.size() - 1));
  }
  return s;
}

struct AggregateRow {
  double axis_value = 0.0;
  ProtocolVariant variant = ProtocolVariant::kAodvBaseline;
  std::size_t runs = 0;
  Summary pdr, nrl, delay, rreq, rrep, rerr, hello, generated, delivered;
};

[[nodiscard]] inline std::vector<AggregateRow> aggregate(const SweepTable& table) {
  std::vector<AggregateRow> out;
  std::map<std::pair<double, int>, std::size_t> index;
  std::map<std::size_t, std::vector<const SweepRow*>> groups;
  for (const auto& row : table.rows) {
    if (!row.ok) continue;
    auto key = std::make_pair(row.axis_value, static_cast<int>(row.variant));
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) {
      AggregateRow a;
      a.axis_value = row.axis_value;
      a.variant = row.variant;
      out.push_back(a);
    }
    groups[it->second].push_back(&row);
  }
  for (auto& [i, rows] : groups) {
    auto collect = [&](auto get) {
      std::vector<double> xs;
      for (const auto* r : rows)
        if (auto v = get(r->report)) xs.push_back(*v);
      return summarize(xs);
    };
    auto& a = out[i];
    a.runs = rows.size();
    a.pdr = collect([](const MetricsReport& m) { return m.pdr; });
    a.nrl = collect([](const MetricsReport& m) { return m.normalized_routing_load; });
    a.delay = collect([](const MetricsReport& m) { return m.avg_end_to_end_delay; });
    a.rreq = collect([](const MetricsReport& m) { return std::optional<double>(m.raw.rreq); });
    a.rrep = collect([](const MetricsReport& m) { return std::optional<double>(m.raw.rrep); });
    a.rerr = collect([](const MetricsReport& m) { return std::optional<double>(m.raw.rerr); });
    a.hello = collect([](const MetricsReport& m) { return std::optional<double>(m.raw.hello); });
    a.generated = collect([](const MetricsReport& m) { return std::optional<double>(m.raw.generated); });
    a.delivered = collect([](const MetricsReport& m) { return std::optional<double>(m.raw.delivered); });
  }
  return out;
}

/// Runs every (value, variant, seed) combination on `workers` threads. Row order
/// is fixed by the inputs, so the worker count never changes the result.
[[nodiscard]] inline SweepTable run_sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values,
                                          const std::vector<ProtocolVariant>& variants,
                                          const std::vector<std::uint64_t>& seeds, unsigned workers = 1) {
  if (values.empty() || variants.empty() || seeds.empty())
    throw std::invalid_argument("sweep needs at least one value, variant and seed");
  SweepTable table;
  table.axis = axis;
  for (double v : values)
    for (auto var : variants)
      for (auto seed : seeds) {
        SweepRow row;
        row.axis_value = v;
        row.variant = var;
        row.seed = seed;
        table.rows.push_back(std::move(row));
      }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < table.rows.size(); i = next++) {
      auto& row = table.rows[i];
      try {
        ScenarioConfig cfg = apply_axis(base, axis, row.axis_value);
        cfg.protocol.variant = row.variant;
        cfg.seed = row.seed;
        row.report = run_scenario(cfg);
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return table;
}

inline void write_results_csv(std::ostream& os, const SweepTable& table) {
  os << "axis_value,variant,seed,generated,delivered,pdr,nrl,avg_delay_s,rreq,rrep,rerr,hello\n";
  for (const auto& r : table.rows) {
    if (!r.ok) continue;
    const auto& m = r.report;
    os << format_double(r.axis_value) << ',' << variant_name(r.variant) << ',' << r.seed << ',' << m.raw.generated
       << ',' << m.raw.delivered << ',' << format_optional(m.pdr) << ',' << format_optional(m.normalized_routing_load)
       << ',' << format_optional(m.avg_end_to_end_delay) << ',' << m.raw.rreq << ',' << m.raw.rrep << ','
       << m.raw.rerr << ',' << m.raw.hello << '\n';
  }
}

inline void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
  os << "axis_value,variant,runs";
  for (const char* m : {"pdr", "nrl", "avg_delay_s", "rreq", "rrep", "rerr", "hello", "generated", "delivered"})
    os << ',' << m << "_mean," << m << "_std";
  os << '\n';
  for (const auto& a : rows) {
    os << format_double(a.axis_value) << ',' << variant_name(a.variant) << ',' << a.runs;
    for (const Summary* s : {&a.pdr, &a.nrl, &a.delay, &a.rreq, &a.rrep, &a.rerr, &a.hello, &a.generated, &a.delivered}) {
      if (s->n == 0) os << ",NA,NA";
      else os << ',' << format_double(s->mean) << ',' << format_double(s->stddev);
    }
    os << '\n';
  }
}

/// Writes results.csv and aggregate.csv into `dir`, creating it if needed.
inline void emit_results(const SweepTable& table, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream rows(dir / "results.csv", std::ios::binary);
  std::ofstream agg(dir / "aggregate.csv", std::ios::binary);
  if (!rows || !agg) throw std::runtime_error("cannot write results into " + dir.string());
  write_results_csv(rows, table);
  write_aggregate_csv(agg, aggregate(table));
  if (!rows || !agg) throw std::runtime_error("write failed in " + dir.string());
}

}  // namespace ampaodv
