// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "kacgap/gap_engine.hpp"
#include "kacgap/k_spectra.hpp"
#include "kacgap/walk_simulator.hpp"

namespace kacgap {

using json = nlohmann::ordered_json;

namespace detail {
inline void write_json(const json& j, std::string& out, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent) * (depth + 1), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent) * depth, ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + json(it.key()).dump() + (indent > 0 ? ": " : ":");
        write_json(it.value(), out, indent, depth + 1);
      }
      out += nl + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) {
          out += ",";
          out += nl;
        }
        out += pad;
        write_json(j[k], out, indent, depth + 1);
      }
      out += nl + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default: out += j.dump();
  }
}
}  // namespace detail

/// @brief Serializes with every double at 17 significant digits.
inline std::string dump17(const json& j, int indent = 2) {
  std::string out;
  detail::write_json(j, out, indent, 0);
  return out;
}

inline json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json(const SpectrumTable& t) {
  json j;
  j["model"] = t.model;
  j["N"] = t.N;
  j["entries"] = json::array();
  for (const auto& e : t.entries)
    j["entries"].push_back({{"n", e.n}, {"l", e.l}, {"value", e.value}, {"multiplicity", e.multiplicity}});
  j["scan_bounds"] = json::object();
  for (const auto& [k, v] : t.scan_bounds) j["scan_bounds"][k] = v;
  return j;
}

inline json to_json(const GapReport& r) {
  json j;
  j["N"] = r.N;
  j["lambda2"] = r.lambda2;
  j["delta2"] = r.delta2;
  j["kappa"] = r.kappa;
  j["beta"] = r.beta;
  j["mu"] = r.mu;
  j["delta_lower"] = r.delta_lower;
  j["delta_upper"] = opt_json(r.delta_upper);
  j["delta_exact"] = opt_json(r.delta_exact);
  j["multiplicity"] = r.multiplicity ? json(*r.multiplicity) : json(nullptr);
  j["sharp"] = r.sharp;
  j["sector"] = sector_name(r.sector);
  j["notes"] = r.notes;
  return j;
}

inline json to_json(const KExtremes& e) {
  return {{"kappa", e.kappa},         {"beta", e.beta},
          {"kappa_index", {e.kappa_n, e.kappa_l}},
          {"n_max", e.n_max},         {"tail_bound", e.tail_bound},
          {"tail_dominated", e.tail_dominated},
          {"l0_regime_flag", e.l0_regime_flag}};
}

inline json to_json(const GapEstimate& g) {
  return {{"rate", g.rate},
          {"stderr", g.stderr_},
          {"window", g.window},
          {"window_end", g.window_end},
          {"n_events", g.n_events}};
}

inline json to_json(const MomentReport& r) {
  json j{{"model", r.model}, {"burn_in", r.burn_in}, {"trajectories", r.trajectories}, {"pass", r.pass}};
  j["entries"] = json::array();
  for (const auto& e : r.entries)
    j["entries"].push_back({{"order", e.order},
                            {"empirical", e.empirical},
                            {"stderr", e.stderr_},
                            {"exact", e.exact},
                            {"z", e.z},
                            {"pass", e.pass}});
  return j;
}

inline json to_json(const Theorem71Result& t) {
  return {{"gamma_2_cap", t.gamma_2_cap},
          {"delta2_sym", t.delta2_sym},
          {"holds", t.holds},
          {"L", t.L},
          {"product_literal", t.product_literal},
          {"product_closed", t.product_closed},
          {"product_match", t.product_match},
          {"product_check_N", t.product_check_N},
          {"activation_N", t.activation_N ? json(*t.activation_N) : json(nullptr)}};
}

}  // namespace kacgap
