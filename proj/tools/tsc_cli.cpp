// Command-line front end: compile, check, simulate, monitor, report, render.

#include "tsc/error.hpp"
#include "tsc/formula.hpp"
#include "tsc/monitor.hpp"
#include "tsc/report.hpp"
#include "tsc/scenario.hpp"
#include "tsc/spec_parser.hpp"
#include "tsc/trace_io.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

namespace {

bool colour_enabled() {
  const char* env = std::getenv("TSC_COLOR");
  if (env && std::string(env) == "never") return false;
  return isatty(STDOUT_FILENO) != 0;
}

std::string paint(const std::string& text, bool ok) {
  if (!colour_enabled()) return text;
  return (ok ? "\033[32m" : "\033[31m") + text + "\033[0m";
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw tsc::Error("cannot write " + out_path);
  out << text;
}

tsc::SpecBundle load(const std::string& path) {
  try {
    return tsc::load_spec(path);
  } catch (const tsc::ParseError& e) {
    throw tsc::Error(path + ":" + e.what());
  } catch (const tsc::SpecTypeError& e) {
    throw tsc::Error(path + ": " + e.what());
  }
}

tsc::Trace load_trace(const std::string& path) {
  try {
    return tsc::read_trace(path);
  } catch (const tsc::TraceFormatError& e) {
    throw tsc::Error(path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traffic sequence chart compiler and runtime monitor"};
  app.require_subcommand(1);

  std::string spec_path, trace_path, events_path, out_path, format = "text", explanation_id, fixture = "overtaking",
                                                              bounds_path, latency_path;
  std::vector<std::string> charts, params;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  double window_s = 10.0;

  auto* compile = app.add_subcommand("compile", "print canonical formulas of every chart");
  compile->add_option("spec", spec_path, "specification (.tsc)")->required()->check(CLI::ExistingFile);
  compile->add_option("--chart", charts, "restrict to these charts");
  compile->add_option("--out", out_path, "output file");

  auto* check = app.add_subcommand("check", "type-check and sample contexts for overlaps");
  check->add_option("spec", spec_path, "specification (.tsc)")->required()->check(CLI::ExistingFile);
  check->add_option("--samples", samples, "number of sampled situations")->check(CLI::PositiveNumber);
  check->add_option("--bounds", bounds_path, "attribute bounds (JSON)")->check(CLI::ExistingFile);
  check->add_option("--seed", seed, "sampling seed");

  auto* simulate = app.add_subcommand("simulate", "generate a scenario trace (NDJSON)");
  simulate->add_option("--params", params, "scenario overrides key=value");
  simulate->add_option("--fixture", fixture, "scenario variant")
      ->check(CLI::IsMember(tsc::fixture_names()));
  simulate->add_option("--out", out_path, "output file");

  auto* monitor = app.add_subcommand("monitor", "run a monitoring session over a trace");
  monitor->add_option("spec", spec_path, "specification (.tsc)")->required()->check(CLI::ExistingFile);
  monitor->add_option("trace", trace_path, "trace (NDJSON)")->required()->check(CLI::ExistingFile);
  monitor->add_option("--window-s", window_s, "classification window in seconds")->check(CLI::PositiveNumber);
  monitor->add_option("--out", out_path, "event output file");
  monitor->add_option("--latency", latency_path, "latency summary file (default: stderr)");

  auto* report = app.add_subcommand("report", "render a session timeline");
  report->add_option("events", events_path, "session events (NDJSON)")->required()->check(CLI::ExistingFile);
  report->add_option("--trace", trace_path, "trace for attribute curves")->check(CLI::ExistingFile);
  report->add_option("--spec", spec_path, "specification naming the contexts")->check(CLI::ExistingFile);
  report->add_option("--format", format, "text, json or svg")->check(CLI::IsMember({"text", "json", "svg"}));
  report->add_option("--out", out_path, "output file");

  auto* render = app.add_subcommand("render", "render an explanation card");
  render->add_option("spec", spec_path, "specification (.tsc)")->required()->check(CLI::ExistingFile);
  render->add_option("explanation", explanation_id, "explanation id")->required();
  render->add_option("--format", format, "text, json or svg")->check(CLI::IsMember({"text", "json", "svg"}));
  render->add_option("--out", out_path, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (compile->parsed()) {
      const auto bundle = tsc::compile_bundle(load(spec_path));
      std::ostringstream out;
      for (const auto& [name, seq] : bundle.charts) {
        if (!charts.empty() && std::find(charts.begin(), charts.end(), name) == charts.end()) continue;
        tsc::NodeFormulaSequence normalized;
        for (const auto& node : seq.nodes) normalized.nodes.push_back(tsc::normalize(node));
        out << "# " << name << "\n" << tsc::to_text(normalized) << "\n";
      }
      for (const auto& c : charts)
        if (!bundle.charts.contains(c)) throw tsc::Error("unknown chart " + c);
      emit(out.str(), out_path);
    } else if (check->parsed()) {
      const auto spec = load(spec_path);
      const auto bundle = tsc::compile_bundle(spec);
      const tsc::Bounds bounds = bounds_path.empty() ? tsc::default_bounds() : tsc::load_bounds(bounds_path);
      const auto result = tsc::check_well_formed(bundle.explanations, bundle.object_model, bounds, samples, seed);
      std::cout << "well-typed (" << spec.charts.size() << " charts, " << spec.explanations.size()
                << " explanations)\n";
      if (result.disjoint()) {
        std::cout << paint("disjoint (" + std::to_string(samples) + " samples)", true) << "\n";
        return 0;
      }
      for (const auto& o : result.overlaps) {
        std::cout << paint("overlap " + o.first + " " + o.second + ": " + std::to_string(o.witnesses.size()) +
                               " witnesses",
                           false)
                  << "\n  witness " << tsc::situation_to_json(o.witnesses.front()) << "\n";
      }
      return 1;
    } else if (simulate->parsed()) {
      const auto trace = tsc::simulate_fixture(fixture, tsc::parse_params(params));
      std::ostringstream out;
      tsc::write_trace(out, trace);
      emit(out.str(), out_path);
    } else if (monitor->parsed()) {
      const auto bundle = tsc::compile_bundle(load(spec_path));
      const auto trace = load_trace(trace_path);
      tsc::SessionOptions options;
      options.window_s = window_s;
      const auto timeline = tsc::run_session(trace, bundle, options);
      std::ostringstream out;
      for (const auto& ev : timeline.events) out << tsc::event_to_json(ev) << "\n";
      emit(out.str(), out_path);
      const std::string latency = tsc::latency_to_json(timeline.latency) + "\n";
      if (latency_path.empty()) std::cerr << latency;
      else emit(latency, latency_path);
    } else if (report->parsed()) {
      std::ifstream in(events_path, std::ios::binary);
      std::vector<tsc::SessionEvent> events;
      try {
        events = tsc::read_events(in);
      } catch (const tsc::TraceFormatError& e) {
        throw tsc::Error(events_path + ": " + e.what());
      }
      const tsc::Trace trace = trace_path.empty() ? tsc::Trace{} : load_trace(trace_path);
      std::vector<std::string> contexts;
      if (!spec_path.empty()) {
        const auto spec = load(spec_path);
        contexts.assign(spec.contexts.begin(), spec.contexts.end());
      } else {
        for (const auto& ev : events)
          if (!ev.context.empty() && std::find(contexts.begin(), contexts.end(), ev.context) == contexts.end())
            contexts.push_back(ev.context);
        std::sort(contexts.begin(), contexts.end());
      }
      emit(tsc::render_timeline(events, trace, contexts, tsc::parse_report_format(format)), out_path);
    } else if (render->parsed()) {
      const auto bundle = tsc::compile_bundle(load(spec_path));
      const auto* expl = bundle.explanation(explanation_id);
      if (!expl) throw tsc::Error("unknown explanation " + explanation_id);
      tsc::ReportConfig config;
      config.format = tsc::parse_report_format(format);
      emit(tsc::render_explanation(*expl, bundle, config), out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "tsc: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
