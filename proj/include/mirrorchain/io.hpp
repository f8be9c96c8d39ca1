#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "mirrorchain/chain.hpp"
#include "mirrorchain/decomposition.hpp"
#include "mirrorchain/grape.hpp"
#include "mirrorchain/mirror.hpp"
#include "mirrorchain/pauli.hpp"

namespace mirrorchain::io {

using Json = nlohmann::ordered_json;

/// Reads and parses a JSON file; ParseError on I/O or syntax failure.
Json read_json_file(const std::filesystem::path& path);

/// Writes JSON with two-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& value);

/// ParseError naming the first key of `obj` not in `allowed`, or when
/// `obj` is not an object.
void require_known_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                        std::string_view what);

// Complex numbers are [re, im]; matrices are row-major lists of rows.
Json complex_to_json(complex z);
complex complex_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// {"phase": "+1"|"-1"|"+i"|"-i", "word": "XZZY"}
Json phased_pauli_to_json(const PhasedPauli& p);
PhasedPauli phased_pauli_from_json(const Json& j);

/// {"n", "couplings", "fields", "engineered"}. With "engineered": true the
/// couplings and fields may be omitted and are generated.
Json chain_spec_to_json(const ChainSpec& spec);
ChainSpec chain_spec_from_json(const Json& j);

/// {"n", "global_phase": [re, im], "factors": [{"word", "angle"}]}
Json decomposition_to_json(const ProductDecomposition& d);
ProductDecomposition decomposition_from_json(const Json& j);

/// {"n", "levels": [[words...], ...]}. Each level is the closure of its
/// listed words; a trailing {I} level is appended when missing. Writing
/// lists every element of each level.
Json subgroup_chain_to_json(const SubgroupChain& chain);
SubgroupChain subgroup_chain_from_json(const Json& j);

/// {"n", "matrix"}
Json unitary_to_json(const Matrix& u);
Matrix unitary_from_json(const Json& j);

/// {"n", "shifts_hz", "couplings_hz", "channels", "weights"}; channels hold
/// 1-based spin indices.
Json nmr_spec_to_json(const NmrSystemSpec& spec);
NmrSystemSpec nmr_spec_from_json(const Json& j);

Json spectral_report_to_json(const SpectralReport& r);
Json transfer_report_to_json(const TransferReport& r);
Json peel_trace_to_json(const PeelTrace& t);
/// Result summary; the pulse itself goes to CSV.
Json grape_result_to_json(const GrapeResult& r);

/// Header "step,channel,amp_x_hz,amp_y_hz" then one row per step and
/// channel. Step and channel numbers are 1-based.
std::string pulse_to_csv(const PulseSequence& pulse);
/// Inverse of pulse_to_csv; dt is not stored in the CSV and is passed in.
PulseSequence pulse_from_csv(std::string_view text, double dt);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace mirrorchain::io
