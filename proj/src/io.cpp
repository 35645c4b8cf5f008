#include "coherence/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace coherence::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) {
  throw CoherenceError(ErrorCode::ParseError, what);
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) parse_error(std::string(what) + " must be a number");
  return j.get<double>();
}

std::uint64_t unsigned_integer(const Json& j, const char* what) {
  if (!j.is_number_unsigned()) parse_error(std::string(what) + " must be a non-negative integer");
  return j.get<std::uint64_t>();
}

std::size_t dim_field(const Json& j) { return static_cast<std::size_t>(unsigned_integer(require(j, "dim"), "dim")); }

std::string_view mode_name(InstrumentMode mode) {
  return mode == InstrumentMode::NonSelective ? "A" : "B";
}

}  // namespace

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CoherenceError(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const DensityMatrix& rho) {
  return {{"dim", rho.dim()}, {"matrix", to_json(rho.matrix())}};
}

Json to_json(const StateVector& psi) {
  Json v = Json::array();
  for (Complex a : psi.amplitudes()) v.push_back(to_json(a));
  return {{"dim", psi.dim()}, {"vector", std::move(v)}};
}

Json to_json(const IncoherentState& delta) { return delta.weights(); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) parse_error("complex entries are [re, im] pairs");
  return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) parse_error("matrix must be a nonempty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) parse_error("matrix rows must be nonempty arrays");
  const std::size_t cols = j[0].size();
  std::vector<Complex> entries;
  entries.reserve(rows * cols);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) parse_error("matrix rows have unequal lengths");
    for (const auto& z : row) entries.push_back(complex_from_json(z));
  }
  try {
    return ComplexMatrix(rows, cols, std::move(entries));
  } catch (const CoherenceError& e) {
    parse_error(e.what());
  }
}

std::vector<Complex> vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) parse_error("vector must be a nonempty array");
  std::vector<Complex> v;
  v.reserve(j.size());
  for (const auto& z : j) v.push_back(complex_from_json(z));
  return v;
}

DensityMatrix density_from_json(const Json& j) {
  const std::size_t dim = dim_field(j);
  if (j.contains("matrix")) {
    const ComplexMatrix m = matrix_from_json(j.at("matrix"));
    if (m.rows() != dim || m.cols() != dim) parse_error("matrix does not match \"dim\"");
    return DensityMatrix::validate(m);
  }
  return state_vector_from_json(j).density();
}

StateVector state_vector_from_json(const Json& j) {
  const std::size_t dim = dim_field(j);
  std::vector<Complex> v = vector_from_json(require(j, "vector"));
  if (v.size() != dim) parse_error("vector does not match \"dim\"");
  return StateVector(std::move(v));
}

ComplexMatrix operator_from_json(const Json& j) {
  if (j.is_array()) return matrix_from_json(j);
  ComplexMatrix m = matrix_from_json(require(j, "matrix"));
  if (j.contains("rows") && unsigned_integer(j.at("rows"), "rows") != m.rows()) {
    parse_error("matrix does not match \"rows\"");
  }
  if (j.contains("cols") && unsigned_integer(j.at("cols"), "cols") != m.cols()) {
    parse_error("matrix does not match \"cols\"");
  }
  return m;
}

ChannelFile channel_from_json(const Json& j) {
  const Json& kraus = require(j, "kraus");
  if (!kraus.is_array() || kraus.empty()) parse_error("\"kraus\" must be a nonempty array");
  ChannelFile file;
  for (const auto& k : kraus) file.kraus.push_back(operator_from_json(k));
  if (j.contains("mode")) {
    const Json& mode = j.at("mode");
    if (mode == "A") {
      file.mode = InstrumentMode::NonSelective;
    } else if (mode == "B") {
      file.mode = InstrumentMode::Selective;
    } else {
      parse_error("\"mode\" must be \"A\" or \"B\"");
    }
  }
  return file;
}

Json channel_to_json(std::span<const ComplexMatrix> kraus, InstrumentMode mode) {
  Json ops = Json::array();
  for (const auto& k : kraus) {
    ops.push_back({{"rows", k.rows()}, {"cols", k.cols()}, {"matrix", to_json(k)}});
  }
  return {{"kraus", std::move(ops)}, {"mode", mode_name(mode)}};
}

Json to_json(const IncoherentInstrument& channel) {
  return channel_to_json(channel.kraus(), channel.mode());
}

Json to_json(const InstrumentCheck& check) {
  Json witnesses = Json::array();
  for (const auto& w : check.coherence_witnesses) {
    witnesses.push_back({{"operator", w.operator_index},
                         {"column", w.column},
                         {"rows", Json::array({w.row_a, w.row_b})}});
  }
  return {{"complete", check.complete()},
          {"completeness_residual", check.completeness_max},
          {"incoherent", check.incoherent()},
          {"coherence_witnesses", std::move(witnesses)},
          {"direct_check_incoherent", check.direct_check_incoherent}};
}

DistillationSpec distillation_spec_from_json(const Json& j) {
  if (!j.contains("ensemble")) {
    if (j.contains("vector")) return DistillationSpec(dim_field(j), {{1.0, state_vector_from_json(j)}});
    return DistillationSpec::from_density(density_from_json(j));
  }
  const std::size_t dim = dim_field(j);
  const Json& ensemble = j.at("ensemble");
  if (!ensemble.is_array()) parse_error("\"ensemble\" must be an array");
  std::vector<EnsembleMember> members;
  for (const auto& m : ensemble) {
    const double weight = number(require(m, "weight"), "weight");
    members.push_back({weight, StateVector(vector_from_json(require(m, "vector")))});
  }
  return DistillationSpec(dim, std::move(members));
}

Json to_json(const MeasureReport& report) {
  Json j = {{"measure", to_string(report.measure)}, {"value", report.value}};
  if (report.minimizer) j["minimizer"] = to_json(*report.minimizer);
  if (report.optimizer_residual) j["optimizer_residual"] = *report.optimizer_residual;
  if (report.iterations) j["iterations"] = *report.iterations;
  if (report.dephased_value) j["dephased_value"] = *report.dephased_value;
  if (report.not_a_monotone) j["not_a_monotone"] = true;
  return j;
}

Json to_json(const ConversionPlan& plan) {
  return {{"source", to_json(plan.source)},
          {"target", to_json(plan.target)},
          {"p1", plan.p1},
          {"success_index", plan.success_index},
          {"source_support", plan.source_support},
          {"target_support", plan.target_support},
          {"source_permutation", plan.source_permutation},
          {"target_permutation", plan.target_permutation},
          {"instrument", to_json(plan.instrument)}};
}

Json to_json(const CounterexampleParams& params, const CounterexampleResult& result) {
  return {{"alpha", to_json(params.alpha)},
          {"beta", to_json(params.beta)},
          {"c_l2_state", result.c_l2_state},
          {"probabilities", result.probabilities},
          {"average_after", result.average_after},
          {"average_closed_form", result.average_closed_form},
          {"residual", result.residual},
          {"verdict", result.violated ? "VIOLATED" : "HOLDS"}};
}

CampaignConfig config_from_json(const Json& j) {
  if (!j.is_object()) parse_error("campaign config must be an object");
  CampaignConfig config;
  if (j.contains("dims")) {
    if (!j.at("dims").is_array()) parse_error("\"dims\" must be an array");
    config.dims.clear();
    for (const auto& d : j.at("dims")) config.dims.push_back(unsigned_integer(d, "dims entry"));
  }
  if (j.contains("trials")) config.trials = unsigned_integer(j.at("trials"), "trials");
  if (j.contains("seed")) config.seed = unsigned_integer(j.at("seed"), "seed");
  if (j.contains("max_kraus")) config.max_kraus = unsigned_integer(j.at("max_kraus"), "max_kraus");
  if (j.contains("violation_threshold")) {
    config.violation_threshold = number(j.at("violation_threshold"), "violation_threshold");
  }
  if (j.contains("measures")) {
    if (!j.at("measures").is_array()) parse_error("\"measures\" must be an array");
    config.measures.clear();
    for (const auto& m : j.at("measures")) {
      const auto id = m.is_string() ? parse_measure(m.get<std::string>()) : std::nullopt;
      if (!id) parse_error("unknown measure " + m.dump());
      config.measures.push_back(*id);
    }
  }
  if (j.contains("conditions")) {
    if (!j.at("conditions").is_array()) parse_error("\"conditions\" must be an array");
    config.conditions.clear();
    for (const auto& c : j.at("conditions")) {
      const auto id = c.is_string() ? parse_condition(c.get<std::string>()) : std::nullopt;
      if (!id) parse_error("unknown condition " + c.dump());
      config.conditions.push_back(*id);
    }
  }
  try {
    config.validate();
  } catch (const CoherenceError& e) {
    parse_error(e.what());
  }
  return config;
}

Json to_json(const CampaignConfig& config) {
  Json measures = Json::array();
  for (MeasureId m : config.measures) measures.push_back(to_string(m));
  Json conditions = Json::array();
  for (Condition c : config.conditions) conditions.push_back(to_string(c));
  return {{"dims", config.dims},
          {"trials", config.trials},
          {"seed", config.seed},
          {"measures", std::move(measures)},
          {"conditions", std::move(conditions)},
          {"violation_threshold", config.violation_threshold},
          {"max_kraus", config.max_kraus}};
}

Json to_json(const ConditionReport& report) {
  Json j = {{"trial", report.trial},
            {"measure", to_string(report.measure)},
            {"condition", to_string(report.condition)},
            {"lhs", report.lhs},
            {"rhs", report.rhs},
            {"residual", report.residual},
            {"uncertainty", report.uncertainty},
            {"verdict", to_string(report.verdict)}};
  if (!report.note.empty()) j["note"] = report.note;
  if (report.witness) {
    j["witness"] = {{"state", to_json(report.witness->state)},
                    {"instrument", channel_to_json(report.witness->kraus, InstrumentMode::Selective)},
                    {"mixture_seed", report.witness->mixture_seed}};
  }
  return j;
}

namespace {

// Pairs with no monotonicity theorem behind them; counts are observations only.
bool empirical(MeasureId m, Condition c) {
  return c == Condition::C2b && (m == MeasureId::Fidelity || m == MeasureId::TraceNorm);
}

}  // namespace

Json to_json(const CampaignReport& report) {
  Json totals = Json::array();
  for (const auto& t : report.totals) {
    Json row = {{"measure", to_string(t.measure)},
                {"condition", to_string(t.condition)},
                {"holds", t.holds},
                {"violated", t.violated},
                {"inconclusive", t.inconclusive}};
    if (empirical(t.measure, t.condition)) row["empirical"] = true;
    totals.push_back(std::move(row));
  }
  Json violations = Json::array();
  for (const auto& r : report.violations) violations.push_back(to_json(r));
  Json inconclusive = Json::array();
  for (const auto& r : report.inconclusive) inconclusive.push_back(to_json(r));

  Json j = {{"config", to_json(report.config)},
            {"totals", std::move(totals)},
            {"violations", std::move(violations)},
            {"inconclusive", std::move(inconclusive)}};
  if (report.trace_gap) {
    const auto& g = *report.trace_gap;
    Json obs = {{"states_checked", g.states_checked},
                {"strict_gap_count", g.strict_gap_count},
                {"max_gap", g.max_gap}};
    if (g.max_gap_state) obs["max_gap_state"] = to_json(*g.max_gap_state);
    j["observations"] = {{"trace_norm_below_dephased", std::move(obs)}};
  }
  return j;
}

std::string totals_csv(const CampaignReport& report) {
  std::ostringstream out;
  out << "measure,condition,holds,violated,inconclusive\n";
  for (const auto& t : report.totals) {
    out << to_string(t.measure) << ',' << to_string(t.condition) << ',' << t.holds << ','
        << t.violated << ',' << t.inconclusive << '\n';
  }
  return out.str();
}

}  // namespace coherence::io
