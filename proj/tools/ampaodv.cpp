// Command-line front end: run, sweep, census, fixture.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ampaodv/ampaodv.hpp"

using namespace ampaodv;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::string variant;
  std::optional<std::uint64_t> seed;
};

ScenarioConfig load_scenario(const Common& c) {
  ScenarioConfig cfg = ScenarioConfig::desk_scale();
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) throw ConfigError("cannot open config file " + c.config);
    cfg = parse_config(in, cfg);
  }
  if (!c.variant.empty()) apply_setting(cfg, "variant", c.variant);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

int cmd_run(const Common& common, bool trace, const std::string& out, bool legs) {
  const auto cfg = load_scenario(common);
  std::ofstream trace_file;
  std::ostream* trace_os = nullptr;
  if (trace) {
    if (out.empty()) {
      trace_os = &std::cout;
    } else {
      fs::create_directories(out);
      trace_file = open_out(fs::path(out) / "trace.csv");
      trace_os = &trace_file;
    }
    *trace_os << "time,kind,node,peer,message\n";
  }
  if (legs) {
    if (!cfg.placed_nodes.empty()) throw ConfigError("--legs needs random-waypoint nodes");
    if (out.empty()) throw ConfigError("--legs needs --out");
    fs::create_directories(out);
    auto f = open_out(fs::path(out) / "legs.csv");
    MobilityConfig mob = cfg.mobility;
    mob.rng_seed = cfg.seed;
    write_leg_header(f);
    for (std::uint32_t i = 0; i < cfg.node_count; ++i)
      for (const auto& leg : generate_legs(mob, i, cfg.sim_time)) write_leg(f, i, leg);
  }
  const auto report = run_scenario(cfg, trace_os);
  if (out.empty()) {
    std::cout << report.serialize();
  } else {
    fs::create_directories(out);
    open_out(fs::path(out) / "report.txt") << report.serialize();
    std::cout << "pdr=" << format_optional(report.pdr) << " nrl=" << format_optional(report.normalized_routing_load)
              << " delay=" << format_optional(report.avg_end_to_end_delay) << '\n';
  }
  if (!report.conserves_packets()) {
    std::cerr << "packet conservation violated\n";
    return 1;
  }
  return 0;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw ConfigError("bad sweep value: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--values needs at least one value");
  return out;
}

int cmd_sweep(const Common& common, const std::string& axis_text, const std::string& values_text,
              std::uint64_t seeds, const std::string& out, unsigned workers) {
  Common base_only = common;
  base_only.variant.clear();
  const auto base = load_scenario(base_only);
  const auto axis = parse_axis(axis_text);
  if (!axis) throw ConfigError("unknown axis: " + axis_text);
  std::vector<ProtocolVariant> variants(std::begin(kAllVariants), std::end(kAllVariants));
  if (!common.variant.empty()) {
    const auto v = parse_variant(common.variant);
    if (!v) throw ConfigError("unknown variant: " + common.variant);
    variants = {*v};
  }
  std::vector<std::uint64_t> seed_list;
  const std::uint64_t first = common.seed.value_or(1);
  for (std::uint64_t s = 0; s < seeds; ++s) seed_list.push_back(first + s);

  const auto table = run_sweep(base, *axis, parse_values(values_text), variants, seed_list, workers);
  for (const auto& r : table.rows)
    if (!r.ok)
      std::cerr << "row failed: " << axis_name(*axis) << "=" << format_double(r.axis_value) << " "
                << variant_name(r.variant) << " seed " << r.seed << ": " << r.error << '\n';
  if (out.empty()) {
    write_aggregate_csv(std::cout, aggregate(table));
  } else {
    emit_results(table, out);
    std::cout << "wrote " << (fs::path(out) / "results.csv").string() << " and aggregate.csv\n";
  }
  return 0;
}

int cmd_census(const Common& common, double range, std::uint32_t nodes, double horizon, double v_min, double v_max,
               std::size_t bins, const std::string& out) {
  MobilityConfig mob;
  if (!common.config.empty()) {
    const auto cfg = load_scenario(common);
    mob = cfg.mobility;
  }
  mob.v_min = v_min;
  mob.v_max = v_max;
  mob.rng_seed = common.seed.value_or(1);
  const auto res = link_duration_census(mob, nodes, range, horizon, bins);
  std::cout << "links=" << res.intervals.size() << " uncensored=" << res.uncensored << " mean=" << format_double(res.mean)
            << " median=" << format_double(res.median) << " below_mean=" << format_double(res.fraction_below_mean) << '\n';
  if (!out.empty()) {
    fs::create_directories(out);
    auto h = open_out(fs::path(out) / "histogram.csv");
    h << "bin_start,bin_end,count,density\n";
    for (std::size_t k = 0; k < res.histogram.counts.size(); ++k)
      h << format_double(k * res.histogram.bin_width) << ',' << format_double((k + 1) * res.histogram.bin_width) << ','
        << res.histogram.counts[k] << ',' << format_double(res.histogram.density[k]) << '\n';
    auto iv = open_out(fs::path(out) / "intervals.csv");
    iv << "a,b,start,end,duration,censored\n";
    for (const auto& i : res.intervals)
      iv << i.a.value << ',' << i.b.value << ',' << format_double(i.start) << ',' << format_double(i.end) << ','
         << format_double(i.duration()) << ',' << (i.censored ? 1 : 0) << '\n';
  }
  return 0;
}

int cmd_fixture() {
  int failed = 0;
  for (const auto& c : fixture::run_example_checks()) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    failed += !c.passed;
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Route-expiration-aware AODV simulator"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "key = value scenario file");
    sub->add_option("--variant", common.variant, "aodv, amp1, amp2 or amp3")
        ->check(CLI::IsMember({"aodv", "amp1", "amp2", "amp3"}));
    sub->add_option("--seed", common.seed, "scenario seed (first seed for sweeps)");
  };

  std::string out;
  unsigned workers = 1;

  auto* run = app.add_subcommand("run", "simulate one scenario and print its metrics");
  add_common(run);
  bool trace = false, legs = false;
  run->add_flag("--trace", trace, "dump every event as CSV");
  run->add_flag("--legs", legs, "write legs.csv with every waypoint leg");
  run->add_option("--out", out, "directory for report.txt, trace.csv, legs.csv");

  auto* sweep = app.add_subcommand("sweep", "sweep one axis over variants and seeds");
  add_common(sweep);
  std::string axis = "speed", values;
  std::uint64_t seeds = 20;
  sweep->add_option("--axis", axis, "speed, flows or nodes")->check(CLI::IsMember({"speed", "flows", "nodes"}));
  sweep->add_option("--values", values, "comma-separated axis values")->required();
  sweep->add_option("--seeds", seeds, "number of seeds")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out, "directory for results.csv and aggregate.csv");
  sweep->add_option("--workers", workers, "parallel runs")->check(CLI::PositiveNumber);

  auto* census = app.add_subcommand("census", "link-duration census of random-waypoint motion");
  add_common(census);
  double range = 300, horizon = 900, v_min = 4, v_max = 24;
  std::uint32_t nodes = 30;
  std::size_t bins = 50;
  census->add_option("--range", range, "radio range in meters");
  census->add_option("--nodes", nodes, "node count");
  census->add_option("--horizon", horizon, "observation time in seconds");
  census->add_option("--v-min", v_min, "minimum speed");
  census->add_option("--v-max", v_max, "maximum speed");
  census->add_option("--bins", bins, "histogram bins");
  census->add_option("--out", out, "directory for histogram.csv and intervals.csv");

  auto* fixture_cmd = app.add_subcommand("fixture", "check the worked route-selection example");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(common, trace, out, legs);
    if (sweep->parsed()) return cmd_sweep(common, axis, values, seeds, out, workers);
    if (census->parsed()) return cmd_census(common, range, nodes, horizon, v_min, v_max, bins, out);
    if (fixture_cmd->parsed()) return cmd_fixture();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
