#ifndef COMPKAT_IO_JSON_IO_HPP
#define COMPKAT_IO_JSON_IO_HPP

#include "compkat/problems/mean_variance.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace compkat::io {

using nlohmann::json;

constexpr int kInstanceVersion = 1;

inline json instance_to_json(const MeanVarInstance& inst) {
  json j;
  j["version"] = kInstanceVersion;
  j["kind"] = "meanvar";
  j["dim"] = inst.dim();
  j["samples"] = inst.samples();
  j["noise_v"] = inst.noise_v;
  j["lambda1"] = inst.lambda1;
  j["lambda2"] = inst.lambda2;
  j["seed"] = inst.seed;
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(inst.data.size()));
  for (Eigen::Index r = 0; r < inst.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < inst.data.cols(); ++c) data.push_back(inst.data(r, c));
  }
  j["data"] = std::move(data);
  j["mean_col"] = std::vector<double>(inst.mean_col.data(), inst.mean_col.data() + inst.mean_col.size());
  return j;
}

/// Parses and checks an instance document; derived fields are recomputed
/// and a stored mean_col must agree with them to 1e-12.
inline MeanVarInstance instance_from_json(const json& j) {
  if (j.at("version").get<int>() != kInstanceVersion) {
    throw std::runtime_error("instance: unsupported version");
  }
  if (j.at("kind").get<std::string>() != "meanvar") {
    throw std::runtime_error("instance: unsupported kind");
  }
  const auto dim = j.at("dim").get<std::size_t>();
  const auto samples = j.at("samples").get<std::size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (dim == 0 || samples == 0) throw std::runtime_error("instance: sizes must be positive");
  if (data.size() != dim * samples) throw std::runtime_error("instance: data has the wrong length");
  MeanVarInstance inst;
  inst.noise_v = j.at("noise_v").get<double>();
  inst.lambda1 = j.at("lambda1").get<double>();
  inst.lambda2 = j.at("lambda2").get<double>();
  inst.seed = j.at("seed").get<std::uint64_t>();
  if (!(inst.lambda1 > 0.0) || inst.lambda2 < 0.0 || inst.noise_v < 0.0) {
    throw std::runtime_error("instance: invalid weights");
  }
  inst.data.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(samples));
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < inst.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < inst.data.cols(); ++c) inst.data(r, c) = data[k++];
  }
  if (!inst.data.allFinite()) throw std::runtime_error("instance: non-finite data");
  inst.refresh_derived();
  if (j.contains("mean_col")) {
    const auto stored = j.at("mean_col").get<std::vector<double>>();
    if (stored.size() != dim) throw std::runtime_error("instance: mean_col has the wrong length");
    for (std::size_t i = 0; i < dim; ++i) {
      const double ref = inst.mean_col[static_cast<Eigen::Index>(i)];
      if (std::abs(stored[i] - ref) > 1e-12 * std::max(1.0, std::abs(ref))) {
        throw std::runtime_error("instance: mean_col inconsistent with data");
      }
    }
  }
  return inst;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void save_instance(const MeanVarInstance& inst, const std::string& path) {
  write_text_file(path, instance_to_json(inst).dump() + "\n");
}

inline MeanVarInstance load_instance(const std::string& path) {
  try {
    return instance_from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

inline json reference_to_json(const ReferenceSolution& ref) {
  json j;
  j["x_star"] = std::vector<double>(ref.x_star.data(), ref.x_star.data() + ref.x_star.size());
  j["h_star"] = ref.h_star;
  j["residual"] = ref.residual;
  j["tol"] = ref.tol;
  return j;
}

inline ReferenceSolution reference_from_json(const json& j) {
  ReferenceSolution ref;
  const auto x = j.at("x_star").get<std::vector<double>>();
  ref.x_star = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
  ref.h_star = j.at("h_star").get<double>();
  ref.residual = j.at("residual").get<double>();
  ref.tol = j.at("tol").get<double>();
  return ref;
}

inline void save_reference(const ReferenceSolution& ref, const std::string& path) {
  write_text_file(path, reference_to_json(ref).dump() + "\n");
}

inline ReferenceSolution load_reference(const std::string& path) {
  try {
    return reference_from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace compkat::io

#endif  // COMPKAT_IO_JSON_IO_HPP
