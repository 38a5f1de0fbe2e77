#include "hybrid/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace hybrid {

namespace {

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw StructureError("complex entry must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<int> dims_from_json(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array() || j[field].empty())
    throw StructureError(std::string("missing or invalid field: ") + field);
  std::vector<int> dims;
  for (const auto& e : j[field]) {
    if (!e.is_number_integer() || e.get<int>() < 1)
      throw StructureError(std::string(field) + " entries must be positive integers");
    dims.push_back(e.get<int>());
  }
  return dims;
}

}  // namespace

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
    throw StructureError("matrix must be a nonempty array of nonempty rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols)
      throw StructureError("matrix rows have inconsistent lengths");
    for (int c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

json channel_to_json(const Channel& c) {
  json j;
  j["in_dims"] = c.in_dims();
  j["out_dims"] = c.out_dims();
  json kraus = json::array();
  for (const Mat& k : c.kraus()) kraus.push_back(matrix_to_json(k));
  j["kraus"] = std::move(kraus);
  return j;
}

Channel channel_from_json(const json& j, bool allow_unphysical) {
  std::vector<int> in_dims = dims_from_json(j, "in_dims");
  std::vector<int> out_dims = dims_from_json(j, "out_dims");
  if (!j.contains("kraus") || !j["kraus"].is_array() || j["kraus"].empty())
    throw StructureError("missing or invalid field: kraus");
  std::vector<Mat> kraus;
  for (const auto& k : j["kraus"]) kraus.push_back(matrix_from_json(k));
  if (allow_unphysical)
    return Channel::unchecked(std::move(in_dims), std::move(out_dims), std::move(kraus));
  return Channel(std::move(in_dims), std::move(out_dims), std::move(kraus));
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructureError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw StructureError("JSON parse error in " + path + ": " + e.what());
  }
  return j;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw StructureError("cannot open file for writing: " + path);
  out << j.dump(2) << '\n';
}

Channel load_channel(const std::string& path, bool allow_unphysical) {
  return channel_from_json(load_json(path), allow_unphysical);
}

void save_channel(const Channel& c, const std::string& path) {
  save_json(channel_to_json(c), path);
}

std::vector<Mat> generators_from_json(const json& j) {
  if (!j.contains("generators") || !j["generators"].is_array() || j["generators"].empty())
    throw StructureError("missing or invalid field: generators");
  std::vector<Mat> gens;
  for (const auto& g : j["generators"]) gens.push_back(matrix_from_json(g));
  return gens;
}

std::vector<Mat> load_generators(const std::string& path) {
  return generators_from_json(load_json(path));
}

void save_generators(const std::vector<Mat>& generators, const std::string& path) {
  json j;
  json arr = json::array();
  for (const Mat& g : generators) arr.push_back(matrix_to_json(g));
  j["generators"] = std::move(arr);
  save_json(j, path);
}

void save_amplitudes(const WaveFunctionGrid& psi, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructureError("cannot open file for writing: " + path);
  char header[16] = {};
  std::memcpy(header, "SNW1", 4);
  std::uint32_t n = static_cast<std::uint32_t>(psi.n_points);
  std::memcpy(header + 4, &n, 4);
  std::memcpy(header + 8, &psi.dx, 8);
  out.write(header, 16);
  for (int i = 0; i < psi.n_points; ++i) {
    double re = psi.amplitudes(i).real(), im = psi.amplitudes(i).imag();
    out.write(reinterpret_cast<const char*>(&re), 8);
    out.write(reinterpret_cast<const char*>(&im), 8);
  }
}

WaveFunctionGrid load_amplitudes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructureError("cannot open file: " + path);
  char header[16];
  in.read(header, 16);
  if (!in || std::memcmp(header, "SNW1", 4) != 0)
    throw StructureError("bad amplitude dump header in " + path);
  std::uint32_t n;
  double dx;
  std::memcpy(&n, header + 4, 4);
  std::memcpy(&dx, header + 8, 8);
  Vec amp(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    double re, im;
    in.read(reinterpret_cast<char*>(&re), 8);
    in.read(reinterpret_cast<char*>(&im), 8);
    if (!in) throw StructureError("truncated amplitude dump: " + path);
    amp(i) = cplx(re, im);
  }
  return WaveFunctionGrid(static_cast<int>(n), dx, std::move(amp));
}

}  // namespace hybrid
