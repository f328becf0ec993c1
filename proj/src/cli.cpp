#include "cabletrace/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cabletrace/emfield.hpp"
#include "cabletrace/errors.hpp"
#include "cabletrace/oscillator.hpp"
#include "cabletrace/server.hpp"
#include "cabletrace/simulation.hpp"
#include "cabletrace/sweep.hpp"
#include "cabletrace/world.hpp"

namespace cabletrace {

namespace {

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ParseError(std::string("cannot open ") + what + " '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  file << text;
  if (!file) throw std::runtime_error("write to '" + path + "' failed");
}

struct Flags {
  std::optional<std::uint64_t> seed;
  std::string scenario;
  std::string out;
  std::string keymap;
  std::string script;
  double step = 0.5;
  bool full = false;
  double duration = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::string bind = "127.0.0.1";
  unsigned short tcp_port = kDefaultTcpPort;
  unsigned short http_port = kDefaultHttpPort;
  OscillatorParams osc{};
};

WorldScenario scenario_from(const Flags& f) {
  WorldScenario sc = load_scenario_file(f.scenario);
  if (f.seed) sc.noise_seed = *f.seed;
  return sc;
}

KeyMap keymap_from(const Flags& f) {
  return f.keymap.empty() ? KeyMap{} : KeyMap::load_file(f.keymap);
}

int cmd_oscillator(const Flags& f, std::ostream& out, std::ostream& err) {
  const double t = period(f.osc);
  char buf[128];
  std::snprintf(buf, sizeof buf, "period_s=%.12g\nfrequency_hz=%.12g\n", t, 1.0 / t);
  out << buf;
  const auto warnings = validity_report(f.osc);
  for (const auto& w : warnings) err << "warning: " << w.message << '\n';
  return kExitOk;
}

int cmd_field(const Flags& f, std::ostream& out) {
  const FieldSample s = field_at(scenario_from(f), {f.x, f.y});
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.9e,%.9e,%.6f\n", s.b_rms, s.induced_voltage, s.frequency);
  out << buf;
  return kExitOk;
}

int cmd_sweep(const Flags& f, std::ostream& out, std::ostream& err) {
  const WorldScenario sc = scenario_from(f);
  SweepOptions opts;
  opts.full = f.full;
  const auto records = run_sweep(sc, f.step, opts);
  write_output(f.out, format_sweep_csv(records), out);
  err << format_fault_report(localize(records)) << '\n';
  return kExitOk;
}

int cmd_simulate(const Flags& f, std::ostream& out) {
  const WorldScenario sc = scenario_from(f);
  const KeyMap keymap = keymap_from(f);
  const auto script = parse_command_script(read_file(f.script, "command script"), keymap);
  write_output(f.out, simulate(sc, script, keymap, RobotParams{}, f.duration), out);
  return kExitOk;
}

int cmd_serve(const Flags& f, std::ostream& err) {
  ServerOptions opts;
  opts.bind_address = f.bind;
  opts.tcp_port = f.tcp_port;
  opts.http_port = f.http_port;
  opts.keymap = keymap_from(f);
  opts.stop_on_signal = true;
  Server server(scenario_from(f), opts);
  server.start();
  err << "serving: tcp " << f.bind << ':' << server.tcp_port() << ", websocket ws://" << f.bind
      << ':' << server.http_port() << kWebSocketPath << '\n';
  server.run();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Underground cable fault-detection robot simulator", "cabletrace"};
  app.fallthrough();
  app.add_option("--seed", f.seed, "Override the scenario noise seed");

  auto* sweep = app.add_subcommand("sweep", "Sweep the cable route and localize a fault");
  sweep->add_option("--scenario", f.scenario, "Scenario file")->required();
  sweep->add_option("--step", f.step, "Sample spacing along the route (m)");
  sweep->add_flag("--full", f.full, "Continue past the first fault to the route end");
  sweep->add_option("--out", f.out, "CSV output file (default: stdout)");

  auto* field = app.add_subcommand("field", "Field sample at one surface point");
  field->add_option("--scenario", f.scenario, "Scenario file")->required();
  field->add_option("--x", f.x, "Probe x (m)")->required();
  field->add_option("--y", f.y, "Probe y (m)")->required();

  auto* osc = app.add_subcommand("oscillator", "Astable detector period, frequency and checks");
  osc->add_option("--r", f.osc.r, "Timing resistor (ohm)");
  osc->add_option("--rs", f.osc.rs, "Series resistor (ohm)");
  osc->add_option("--c", f.osc.c, "Timing capacitor (F)");
  osc->add_option("--vdd", f.osc.v_dd, "Supply voltage (V)");
  osc->add_option("--vd", f.osc.v_d, "Protection diode forward voltage (V)");
  osc->add_option("--vt", f.osc.v_t, "Inverter threshold voltage (V)");

  auto* sim = app.add_subcommand("simulate", "Replay a command script headlessly");
  sim->add_option("--scenario", f.scenario, "Scenario file")->required();
  sim->add_option("--script", f.script, "Command script: '<t_seconds> <char>' lines")->required();
  sim->add_option("--duration", f.duration, "Simulated seconds (default: last command + 1 s)");
  sim->add_option("--keymap", f.keymap, "Keymap file");
  sim->add_option("--out", f.out, "Telemetry log file (default: stdout)");

  auto* serve = app.add_subcommand("serve", "Run the teleoperation server");
  serve->add_option("--scenario", f.scenario, "Scenario file")->required();
  serve->add_option("--tcp-port", f.tcp_port, "Line-protocol TCP port");
  serve->add_option("--http-port", f.http_port, "HTTP port for the WebSocket mirror");
  serve->add_option("--keymap", f.keymap, "Keymap file");
  serve->add_option("--bind", f.bind, "Listen address");

  app.require_subcommand(0, 1);

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("cabletrace");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (*sweep) return cmd_sweep(f, out, err);
    if (*field) return cmd_field(f, out);
    if (*osc) return cmd_oscillator(f, out, err);
    if (*sim) return cmd_simulate(f, out);
    if (*serve) return cmd_serve(f, err);
    err << app.help();
    return kExitValidation;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace cabletrace
