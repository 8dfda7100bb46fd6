// SPDX-License-Identifier: Apache-2.0

#include "zfpa/instance_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace zfpa {

using nlohmann::json;

std::string instance_to_json(const ProblemInstance& inst, int indent) {
  json beta = json::array();
  for (std::size_t n = 0; n < inst.num_subcarriers; ++n) {
    const auto row = inst.gains.row(n);
    beta.push_back(std::vector<double>(row.begin(), row.end()));
  }
  json doc = {
      {"K", inst.num_users},   {"N", inst.num_subcarriers}, {"M", inst.num_antennas},
      {"P", inst.power_budget}, {"c", inst.weights},         {"beta", std::move(beta)},
      {"d", inst.rate_floors},  {"rt", inst.rt_users},
  };
  return doc.dump(indent);
}

ProblemInstance instance_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }

  ProblemInstance inst;
  try {
    inst.num_users = doc.at("K").get<std::size_t>();
    inst.num_subcarriers = doc.at("N").get<std::size_t>();
    inst.num_antennas = doc.at("M").get<std::size_t>();
    inst.power_budget = doc.at("P").get<double>();
    inst.weights = doc.at("c").get<std::vector<double>>();
    inst.rate_floors = doc.at("d").get<std::vector<double>>();
    inst.rt_users = doc.value("rt", std::vector<std::size_t>{});

    const std::size_t N = inst.num_subcarriers;
    const std::size_t K = inst.num_users;
    inst.gains = Grid(N, K);
    const json& beta = doc.at("beta");
    if (!beta.is_array()) throw ParseError("instance: beta must be an array");
    if (beta.size() == N && (N == 0 || beta.front().is_array())) {
      for (std::size_t n = 0; n < N; ++n) {
        const auto row = beta[n].get<std::vector<double>>();
        if (row.size() != K) throw ParseError("instance: beta row " + std::to_string(n) + " has wrong length");
        for (std::size_t k = 0; k < K; ++k) inst.gains(n, k) = row[k];
      }
    } else {
      const auto flat = beta.get<std::vector<double>>();
      if (flat.size() != N * K) throw ParseError("instance: beta must hold N*K values");
      std::copy(flat.begin(), flat.end(), inst.gains.data().begin());
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }
  if (inst.weights.size() != inst.num_users || inst.rate_floors.size() != inst.num_users)
    throw ParseError("instance: c and d must have length K");
  return inst;
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

void save_instance(const std::filesystem::path& path, const ProblemInstance& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << instance_to_json(inst) << '\n';
}

}  // namespace zfpa
