#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "dkp/torus_lattice.hpp"

namespace dkp {

inline constexpr int kStateFileVersion = 1;

namespace detail {

inline nlohmann::json grid_to_json(const TorusGrid& grid) {
  auto rows = nlohmann::json::array();
  for (int m = 0; m < grid.M(); ++m) {
    auto row = nlohmann::json::array();
    for (int n = 0; n < grid.N(); ++n) {
      row.push_back({grid(n, m).real(), grid(n, m).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline TorusGrid grid_from_json(const nlohmann::json& rows, int N, int M, const char* name) {
  auto fail = [name](const std::string& what) {
    return ParseError(std::string("field \"") + name + "\": " + what);
  };
  if (!rows.is_array() || static_cast<int>(rows.size()) != M) {
    throw fail("expected an array of M=" + std::to_string(M) + " rows");
  }
  TorusGrid grid(N, M);
  for (int m = 0; m < M; ++m) {
    const auto& row = rows[m];
    if (!row.is_array() || static_cast<int>(row.size()) != N) {
      throw fail("row " + std::to_string(m) + " must hold N=" + std::to_string(N) + " entries");
    }
    for (int n = 0; n < N; ++n) {
      const auto& pair = row[n];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
        throw fail("entry (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ") must be [re, im]");
      }
      grid(n, m) = {pair[0].get<double>(), pair[1].get<double>()};
    }
  }
  return grid;
}

}  // namespace detail

inline nlohmann::json state_to_json(const LatticeState& state) {
  return {{"version", kStateFileVersion},
          {"N", state.N()},
          {"M", state.M()},
          {"A", detail::grid_to_json(state.A())},
          {"B", detail::grid_to_json(state.B())}};
}

/// Throws ParseError on schema problems, ConstraintError / InvariantError when
/// the decoded fields are not a valid LatticeState.
inline LatticeState state_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("state document must be a JSON object");
  for (const char* key : {"version", "N", "M", "A", "B"}) {
    if (!doc.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  }
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != kStateFileVersion) {
    throw ParseError("unsupported state file version");
  }
  if (!doc["N"].is_number_integer() || !doc["M"].is_number_integer()) {
    throw ParseError("N and M must be integers");
  }
  const int N = doc["N"].get<int>();
  const int M = doc["M"].get<int>();
  require_valid_dimensions(N, M);
  return {detail::grid_from_json(doc["A"], N, M, "A"), detail::grid_from_json(doc["B"], N, M, "B")};
}

inline std::string dump_state(const LatticeState& state) { return state_to_json(state).dump(1) + "\n"; }

inline void save_state(const LatticeState& state, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << dump_state(state);
  if (!out) throw ParseError("failed writing " + path.string());
}

inline LatticeState load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return state_from_json(doc);
}

}  // namespace dkp
