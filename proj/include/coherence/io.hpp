#pragma once

// JSON and CSV surfaces. Complex entries are [re, im] pairs; matrices are
// row-major arrays of rows. Doubles are written in shortest round-trip form,
// so every file written here reads back bit-identically.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coherence/channels.hpp"
#include "coherence/lab.hpp"
#include "coherence/measures.hpp"
#include "coherence/protocols.hpp"
#include "coherence/states.hpp"

namespace coherence::io {

using Json = nlohmann::json;

/// Throws ParseError on unreadable files or malformed JSON.
Json load_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
/// Two-space indented, trailing newline.
std::string dump(const Json& j);

Json to_json(Complex z);
Json to_json(const ComplexMatrix& m);
Json to_json(const DensityMatrix& rho);     // {"dim", "matrix"}
Json to_json(const StateVector& psi);       // {"dim", "vector"}
Json to_json(const IncoherentState& delta);  // list of weights

Complex complex_from_json(const Json& j);
ComplexMatrix matrix_from_json(const Json& j);
std::vector<Complex> vector_from_json(const Json& j);

/// {"dim", "matrix"} or {"dim", "vector"}; a vector is turned into its
/// projector. Validation failures propagate as ValidationError.
DensityMatrix density_from_json(const Json& j);
/// {"dim", "vector"} only.
StateVector state_vector_from_json(const Json& j);
/// A bare matrix array, or an object with a "matrix" key.
ComplexMatrix operator_from_json(const Json& j);

struct ChannelFile {
  std::vector<ComplexMatrix> kraus;
  InstrumentMode mode = InstrumentMode::NonSelective;
};

/// {"kraus": [{"rows", "cols", "matrix"}, ...], "mode": "A" | "B"}; mode
/// defaults to "A".
ChannelFile channel_from_json(const Json& j);
Json channel_to_json(std::span<const ComplexMatrix> kraus, InstrumentMode mode);
Json to_json(const IncoherentInstrument& channel);
Json to_json(const InstrumentCheck& check);

/// Target of the preparation protocol: a state file, or
/// {"dim", "ensemble": [{"weight", "vector"}, ...]}.
DistillationSpec distillation_spec_from_json(const Json& j);

Json to_json(const MeasureReport& report);
Json to_json(const ConversionPlan& plan);
Json to_json(const CounterexampleParams& params, const CounterexampleResult& result);

/// Missing fields take their defaults; unknown measure or condition names
/// and out-of-range values throw ParseError.
CampaignConfig config_from_json(const Json& j);
Json to_json(const CampaignConfig& config);
Json to_json(const ConditionReport& report);
Json to_json(const CampaignReport& report);
/// measure,condition,holds,violated,inconclusive
std::string totals_csv(const CampaignReport& report);

}  // namespace coherence::io
