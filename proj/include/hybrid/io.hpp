#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hybrid/channel.hpp"
#include "hybrid/schnewton.hpp"

namespace hybrid {

using nlohmann::json;

/// Matrix <-> JSON, row-major, complex entries as [re, im].
json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j);

/// Channel file: {"in_dims": [...], "out_dims": [...], "kraus": [matrix, ...]}.
json channel_to_json(const Channel& c);
Channel channel_from_json(const json& j, bool allow_unphysical = false);

Channel load_channel(const std::string& path, bool allow_unphysical = false);
void save_channel(const Channel& c, const std::string& path);

/// Generators file: {"generators": [matrix, ...]} (same matrix encoding).
std::vector<Mat> generators_from_json(const json& j);
std::vector<Mat> load_generators(const std::string& path);
void save_generators(const std::vector<Mat>& generators, const std::string& path);

json load_json(const std::string& path);
void save_json(const json& j, const std::string& path);

/// Amplitude dump: 16-byte header (magic "SNW1", u32 n_points, f64 dx) then
/// interleaved little-endian float64 re/im pairs.
void save_amplitudes(const WaveFunctionGrid& psi, const std::string& path);
WaveFunctionGrid load_amplitudes(const std::string& path);

}  // namespace hybrid
