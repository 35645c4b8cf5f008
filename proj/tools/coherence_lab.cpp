// coherence_lab: command-line front end for the coherence library.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "coherence/io.hpp"

namespace io = coherence::io;
using coherence::CoherenceError;
using coherence::ValidationError;

namespace {

void emit(const io::Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << io::dump(j);
  } else {
    io::write_text(out_path, io::dump(j));
  }
}

int run_measure(const std::string& state_path, const std::string& which, bool json) {
  const auto rho = io::density_from_json(io::load_json(state_path));
  std::vector<coherence::MeasureId> ids;
  if (which == "all") {
    ids.assign(coherence::kAllMeasures.begin(), coherence::kAllMeasures.end());
  } else {
    const auto id = coherence::parse_measure(which);
    if (!id) throw CoherenceError(coherence::ErrorCode::InvalidArgument, "unknown measure " + which);
    ids.push_back(*id);
  }
  io::Json reports = io::Json::array();
  for (auto id : ids) {
    const auto report = coherence::measure(id, rho);
    if (json) {
      reports.push_back(io::to_json(report));
    } else {
      std::cout << coherence::to_string(id) << ' ' << io::Json(report.value).dump();
      if (report.optimizer_residual) std::cout << " (gap " << io::Json(*report.optimizer_residual).dump() << ')';
      if (report.not_a_monotone) std::cout << " [not a monotone]";
      std::cout << '\n';
    }
  }
  if (json) std::cout << io::dump(ids.size() == 1 ? reports[0] : reports);
  return 0;
}

int run_validate_channel(const std::string& path) {
  const auto file = io::channel_from_json(io::load_json(path));
  io::Json verdict = {{"mode", file.mode == coherence::InstrumentMode::NonSelective ? "A" : "B"},
                      {"operators", file.kraus.size()}};
  io::Json violations = io::Json::array();
  try {
    verdict["check"] = io::to_json(coherence::check_instrument(file.kraus));
    coherence::validate_instrument(file.kraus, file.mode);
  } catch (const ValidationError& e) {
    for (const auto& v : e.violations()) {
      violations.push_back({{"code", coherence::to_string(v.code)},
                            {"residual", v.residual},
                            {"detail", v.detail}});
    }
  } catch (const CoherenceError& e) {
    violations.push_back({{"code", coherence::to_string(e.code())}, {"residual", 0.0}, {"detail", e.what()}});
  }
  const bool valid = violations.empty();
  verdict["valid"] = valid;
  verdict["violations"] = std::move(violations);
  std::cout << io::dump(verdict);
  return valid ? 0 : 1;
}

int run_distill(const std::string& target_path, std::size_t dim, const std::string& out_path) {
  const auto spec = io::distillation_spec_from_json(io::load_json(target_path));
  if (spec.dim() != dim) {
    throw CoherenceError(coherence::ErrorCode::DimensionMismatch,
                         "target has dimension " + std::to_string(spec.dim()) + ", --dim is " +
                             std::to_string(dim));
  }
  const auto instrument = coherence::distillation_instrument(spec);
  const auto output = coherence::apply_channel(instrument, coherence::max_coherent_state(dim).density());
  emit(io::to_json(instrument), out_path);
  if (!out_path.empty()) {
    std::cout << io::dump({{"dim", dim},
                           {"operators", instrument.size()},
                           {"trace_distance_to_target", coherence::trace_distance(output, spec.target())},
                           {"out", out_path}});
  }
  return 0;
}

int run_gate(const std::string& path) {
  const auto u = io::operator_from_json(io::load_json(path));
  std::cout << io::dump(io::to_json(coherence::gate_instrument(u)));
  return 0;
}

int run_convert(const std::string& source_path, const std::string& target_path) {
  const auto source = io::state_vector_from_json(io::load_json(source_path));
  const auto target = io::state_vector_from_json(io::load_json(target_path));
  std::cout << io::dump(io::to_json(coherence::conversion_instrument(source, target)));
  return 0;
}

int run_counterexample(double beta2) {
  const auto params = coherence::CounterexampleParams::from_beta2(beta2);
  std::cout << io::dump(io::to_json(params, coherence::l2_counterexample(params)));
  return 0;
}

int run_fuzz(const std::string& config_path, std::size_t workers, std::optional<std::uint64_t> seed,
             const std::string& out_path, const std::string& csv_path) {
  auto config = io::config_from_json(io::load_json(config_path));
  if (seed) config.seed = *seed;
  const auto report = coherence::fuzz_campaign(config, workers);
  emit(io::to_json(report), out_path);
  if (!csv_path.empty()) io::write_text(csv_path, io::totals_csv(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum coherence measures, incoherent operations and monotonicity lab"};
  app.require_subcommand(1);

  std::string state_path, which = "all";
  bool json = false;
  auto* measure = app.add_subcommand("measure", "Evaluate coherence measures on a state");
  measure->add_option("--state", state_path, "State JSON file")->required();
  measure->add_option("--measure", which, "REL_ENT, L1, L2, FIDELITY, TRACE_NORM or all");
  measure->add_flag("--json", json, "Emit JSON");

  std::string channel_path;
  auto* validate = app.add_subcommand("validate-channel", "Check completeness and incoherence");
  validate->add_option("--channel", channel_path, "Channel JSON file")->required();

  std::string target_path, out_path;
  std::size_t dim = 0;
  auto* distill = app.add_subcommand("distill", "Instrument preparing a target from the maximally coherent state");
  distill->add_option("--target", target_path, "Target state or ensemble JSON file")->required();
  distill->add_option("--dim", dim, "Dimension")->required()->check(CLI::PositiveNumber);
  distill->add_option("--out", out_path, "Output instrument JSON file")->required();

  std::string unitary_path;
  auto* gate = app.add_subcommand("gate", "Instrument realizing a qubit unitary");
  gate->add_option("--unitary", unitary_path, "2x2 unitary JSON file")->required();

  std::string source_path, convert_target;
  auto* convert = app.add_subcommand("convert", "Probabilistic pure-state conversion");
  convert->add_option("--source", source_path, "Source state vector JSON")->required();
  convert->add_option("--target", convert_target, "Target state vector JSON")->required();

  double beta2 = 0.5;
  auto* counter = app.add_subcommand("counterexample", "l2 monotonicity counterexample");
  counter->add_option("--beta2", beta2, "|beta|^2 in [0, 1]");

  std::string config_path, report_path, csv_path;
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;
  auto* fuzz = app.add_subcommand("fuzz", "Randomized monotonicity campaign");
  fuzz->add_option("--config", config_path, "Campaign config JSON file")->required();
  fuzz->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  fuzz->add_option("--seed", seed, "Override the config seed");
  fuzz->add_option("--out", report_path, "Write the report here instead of stdout");
  fuzz->add_option("--csv", csv_path, "Write per-(measure, condition) totals as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*measure) return run_measure(state_path, which, json);
    if (*validate) return run_validate_channel(channel_path);
    if (*distill) return run_distill(target_path, dim, out_path);
    if (*gate) return run_gate(unitary_path);
    if (*convert) return run_convert(source_path, convert_target);
    if (*counter) return run_counterexample(beta2);
    if (*fuzz) return run_fuzz(config_path, workers, seed, report_path, csv_path);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    for (const auto& v : e.violations()) std::cerr << "  " << coherence::to_string(v.code) << ": " << v.detail << '\n';
    return 2;
  } catch (const CoherenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
