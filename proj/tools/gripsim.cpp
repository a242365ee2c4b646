// gripsim: batch runner, EMG tools and live gateway for the gear-motor grip simulator.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <signal.h>

#include "gripsim/emg.hpp"
#include "gripsim/errors.hpp"
#include "gripsim/gateway/server.hpp"
#include "gripsim/harness.hpp"
#include "gripsim/kernels.hpp"
#include "gripsim/scenario.hpp"
#include "gripsim/signal_csv.hpp"
#include "gripsim/version.hpp"

namespace fs = std::filesystem;
using namespace gripsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

int cmd_run(const fs::path& scenario_path, const fs::path& out) {
  const harness::Scenario s = harness::load_scenario(scenario_path);
  const auto records = harness::run_scenario(s);
  harness::write_trace(records, out);
  return kExitOk;
}

int cmd_synth(const fs::path& profile_path, const fs::path& out_dir) {
  const sensors::EmgProfile profile = harness::load_emg_profile(profile_path);
  for (sensors::Condition c : {sensors::Condition::Relaxed, sensors::Condition::Stressed}) {
    const fs::path dir = out_dir / std::string(sensors::to_string(c));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoFailure(dir.string(), ec.message(), IoFailure::Op::Write);
    for (sensors::Position p : sensors::kPositions) {
      io::write_emg_csv(dir / (std::string(sensors::to_string(p)) + ".csv"),
                        sensors::synthesize_emg(profile, p, c));
    }
  }
  std::cout << fmt::format("wrote {} samples per trace to {}\n", profile.sample_count(),
                           out_dir.string());
  return kExitOk;
}

sensors::FeatureSet load_features(const fs::path& dir, std::size_t start, std::size_t len) {
  sensors::FeatureSet set;
  for (sensors::Position p : sensors::kPositions) {
    const sensors::EmgTrace t =
        io::read_emg_csv(dir / (std::string(sensors::to_string(p)) + ".csv"));
    const std::size_t n = len == 0 ? t.samples.size() - std::min(start, t.samples.size()) : len;
    set[static_cast<std::size_t>(p)] = sensors::window_features(t, start, n);
  }
  return set;
}

int cmd_classify(const fs::path& traces, const fs::path& baseline, std::size_t start,
                 std::size_t len, const sensors::ClassifierConfig& cfg) {
  const sensors::FeatureSet f = load_features(traces, start, len);
  const sensors::FeatureSet b = load_features(baseline, start, len);
  std::cout << "position,rms_uv,baseline_rms_uv,ratio,mav_uv,mean_uv,variance_uv2\n";
  for (sensors::Position p : sensors::kPositions) {
    const auto i = static_cast<std::size_t>(p);
    const double ratio = b[i].rms_uv > 0.0 ? f[i].rms_uv / b[i].rms_uv : 0.0;
    std::cout << fmt::format("{},{:.6g},{:.6g},{:.4f},{:.6g},{:.6g},{:.6g}\n",
                             sensors::to_string(p), f[i].rms_uv, b[i].rms_uv, ratio, f[i].mav_uv,
                             f[i].mean_uv, f[i].variance_uv2);
  }
  std::cout << "decision," << sensors::to_string(sensors::classify_stress(f, b, cfg)) << '\n';
  return kExitOk;
}

int cmd_serve(gateway::ServerOptions opts, const fs::path& base) {
  if (!base.empty()) opts.base = gateway::live_config(harness::load_scenario(base), {});
  const std::string address = opts.address;

  // Block the stop signals before any worker starts so only sigwait() sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  gateway::Server server(std::move(opts));
  const std::uint16_t port = server.start();
  std::cout << "gripsim gateway listening on ws://" << address << ":" << port << "/session"
            << std::endl;
  int sig = 0;
  sigwait(&stop_signals, &sig);
  server.stop();
  return kExitOk;
}

std::uint16_t default_port() {
  if (const char* env = std::getenv("GRIPSIM_PORT")) {
    try {
      const int p = std::stoi(env);
      if (p > 0 && p < 65536) return static_cast<std::uint16_t>(p);
    } catch (const std::exception&) {
    }
    std::cerr << "gripsim: ignoring invalid GRIPSIM_PORT='" << env << "'\n";
  }
  return gateway::kDefaultPort;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Firmware-in-the-loop simulator of a switch-controlled gear-motor prosthetic grip"};
  app.set_version_flag("--version", std::string("gripsim ") + kVersion);
  app.require_subcommand(0, 1);

  fs::path scenario, out;
  auto* run = app.add_subcommand("run", "Run a scenario and write its per-tick trace CSV");
  run->add_option("--scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--out", out, "Trace CSV output path")->required();

  auto* emg = app.add_subcommand("emg", "Synthetic EMG generation and stress classification");
  emg->require_subcommand(1);
  fs::path profile, out_dir;
  auto* synth = emg->add_subcommand("synth", "Write relaxed/ and stressed/ S1..S4 traces");
  synth->add_option("--profile", profile, "Profile JSON (or scenario with emg_profile)")->required();
  synth->add_option("--out-dir", out_dir, "Output directory")->required();

  fs::path traces, baseline;
  std::size_t start = 0, len = 0;
  sensors::ClassifierConfig ccfg;
  auto* classify = emg->add_subcommand("classify", "Classify traces against a relaxed baseline");
  classify->add_option("--traces", traces, "Directory with S1..S4 .csv")->required();
  classify->add_option("--baseline", baseline, "Directory with baseline S1..S4 .csv")->required();
  classify->add_option("--start", start, "First sample of the analysis window");
  classify->add_option("--len", len, "Window length in samples (0: to the end)");
  classify->add_option("--drop-ratio", ccfg.drop_ratio, "S1/S3 rms ratio at or below which a drop counts")
      ->capture_default_str();
  classify->add_option("--tolerance-ratio", ccfg.tolerance_ratio, "Allowed S4 rms deviation")
      ->capture_default_str();

  gateway::ServerOptions sopts;
  sopts.port = default_port();
  fs::path base;
  std::string event_log;
  auto* serve = app.add_subcommand("serve", "Run the live WebSocket gateway");
  serve->add_option("--port", sopts.port, "TCP port (env GRIPSIM_PORT)")->capture_default_str();
  serve->add_option("--address", sopts.address, "Bind address")->capture_default_str();
  serve->add_option("--base", base, "Scenario file providing the session parameters");
  serve->add_option("--event-log", event_log, "Directory for replayable session logs");
  serve->add_option("--threads", sopts.threads, "Worker threads")->capture_default_str();

  bool isa_info = false;
  app.add_flag("--isa-info", isa_info, "Print the selected SIMD kernel set and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (isa_info) {
    std::cout << "active kernels: " << kernels::to_string(kernels::active_isa()) << '\n';
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitValidation;
  }

  try {
    if (run->parsed()) return cmd_run(scenario, out);
    if (synth->parsed()) return cmd_synth(profile, out_dir);
    if (classify->parsed()) return cmd_classify(traces, baseline, start, len, ccfg);
    if (serve->parsed()) {
      if (!event_log.empty()) sopts.event_log_dir = event_log;
      return cmd_serve(std::move(sopts), base);
    }
  } catch (const MalformedScenario& e) {
    std::cerr << "gripsim: " << e.what() << '\n';
    return kExitValidation;
  } catch (const MalformedCsv& e) {
    std::cerr << "gripsim: " << e.what() << '\n';
    return kExitValidation;
  } catch (const WindowOutOfBounds& e) {
    std::cerr << "gripsim: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DegenerateBaseline& e) {
    std::cerr << "gripsim: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoFailure& e) {
    // Unreadable inputs are a validation problem; failed writes happen mid-run.
    std::cerr << "gripsim: " << e.what() << '\n';
    return e.op() == IoFailure::Op::Read ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "gripsim: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
