#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mot/dual_hedge.hpp"
#include "mot/errors.hpp"
#include "mot/market_data.hpp"
#include "mot/measure.hpp"
#include "mot/monotone_plan.hpp"
#include "mot/payoff.hpp"
#include "mot/rational.hpp"
#include "mot/transport_plan.hpp"

namespace mot::io {

using nlohmann::json;

/// Exact numbers travel as strings ("1/3", "0.25"); JSON integers are
/// accepted too, JSON floats are not.
inline Rational rational_from_json(const json& value, const std::string& where) {
  if (value.is_string()) {
    try {
      return parse_rational(value.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  if (value.is_number_integer()) return Rational(value.dump());
  throw ParseError(where + ": expected a number written as a string");
}

inline json rational_to_json(const Rational& r) { return to_string(r); }

inline const json& member(const json& object, const char* key, const std::string& where) {
  if (!object.is_object() || !object.contains(key)) {
    throw ParseError(where + ": missing \"" + key + "\"");
  }
  return object.at(key);
}

inline const json& array_member(const json& object, const char* key, const std::string& where) {
  const json& value = member(object, key, where);
  if (!value.is_array()) throw ParseError(where + ": \"" + key + "\" must be an array");
  return value;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

/// Whether the listed atoms are already strictly increasing with positive
/// weights, i.e. canonicalization would not reorder or drop anything.
inline bool is_canonical(const std::vector<std::pair<Rational, Rational>>& pairs) {
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (sgn(pairs[k].second) <= 0) return false;
    if (k > 0 && !(pairs[k - 1].first < pairs[k].first)) return false;
  }
  return true;
}

inline std::vector<std::pair<Rational, Rational>> atoms_from_json(const json& list,
                                                                  const char* position_key,
                                                                  const std::string& where) {
  if (!list.is_array()) throw ParseError(where + " must be an array");
  std::vector<std::pair<Rational, Rational>> pairs;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string at = where + "[" + std::to_string(k) + "]";
    pairs.emplace_back(rational_from_json(member(list[k], position_key, at), at + "." + position_key),
                       rational_from_json(member(list[k], "w", at), at + ".w"));
  }
  return pairs;
}

inline json measure_to_json(const DiscreteMeasure& m, const char* position_key) {
  json out = json::array();
  for (std::size_t k = 0; k < m.size(); ++k) {
    out.push_back({{position_key, to_string(m.atom(k))}, {"w", to_string(m.weight(k))}});
  }
  return out;
}

struct Instance {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  PayoffGrid grid;
  std::string payoff_label;
};

/// Parses {"mu": [{x, w}], "nu": [{y, w}], "payoff": {...}}. Measures are
/// canonicalized here; an explicit grid is only accepted when both atom
/// lists are already canonical, so rows and columns cannot be permuted
/// behind the caller's back.
inline Instance parse_instance(const json& doc) {
  if (!doc.is_object()) throw ParseError("instance must be a JSON object");
  const auto mu_pairs = atoms_from_json(member(doc, "mu", "instance"), "x", "mu");
  const auto nu_pairs = atoms_from_json(member(doc, "nu", "instance"), "y", "nu");

  Instance inst;
  try {
    inst.mu = make_measure(mu_pairs);
    inst.nu = make_measure(nu_pairs);
  } catch (const EmptyMeasure& e) {
    throw ParseError(std::string("instance: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }

  const json& payoff = member(doc, "payoff", "instance");
  const json& kind = member(payoff, "kind", "payoff");
  if (kind == "grid") {
    if (!is_canonical(mu_pairs) || !is_canonical(nu_pairs)) {
      throw ParseError("payoff grid given for atoms that are not strictly increasing with positive "
                       "weights; list the atoms in canonical order");
    }
    const json& rows = array_member(payoff, "values", "payoff");
    if (rows.size() != inst.mu.size()) {
      throw ParseError("payoff grid has " + std::to_string(rows.size()) + " rows for " +
                       std::to_string(inst.mu.size()) + " atoms of mu");
    }
    Matrix<Rational> values(inst.mu.size(), inst.nu.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (!rows[j].is_array() || rows[j].size() != inst.nu.size()) {
        throw ParseError("payoff grid row " + std::to_string(j) + " must have " +
                         std::to_string(inst.nu.size()) + " entries");
      }
      for (std::size_t i = 0; i < rows[j].size(); ++i) {
        values(j, i) = rational_from_json(
            rows[j][i], "payoff.values[" + std::to_string(j) + "][" + std::to_string(i) + "]");
      }
    }
    inst.grid = PayoffGrid({inst.mu.atoms().begin(), inst.mu.atoms().end()},
                           {inst.nu.atoms().begin(), inst.nu.atoms().end()}, std::move(values));
    inst.payoff_label = "grid";
  } else if (kind == "builtin") {
    const json& name = member(payoff, "name", "payoff");
    if (!name.is_string()) throw ParseError("payoff.name must be a string");
    std::vector<Rational> params;
    if (payoff.contains("params")) {
      const json& list = array_member(payoff, "params", "payoff");
      for (std::size_t k = 0; k < list.size(); ++k) {
        params.push_back(rational_from_json(list[k], "payoff.params[" + std::to_string(k) + "]"));
      }
    }
    try {
      inst.grid = grid_from_builtin(name.get<std::string>(), params, inst.mu.atoms(), inst.nu.atoms());
    } catch (const UnknownPayoff& e) {
      throw ParseError(e.what());
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what());
    }
    inst.payoff_label = name.get<std::string>();
  } else {
    throw ParseError("payoff.kind must be \"grid\" or \"builtin\"");
  }
  return inst;
}

inline json instance_to_json(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const PayoffGrid& grid) {
  json values = json::array();
  for (std::size_t j = 0; j < grid.rows(); ++j) {
    json row = json::array();
    for (std::size_t i = 0; i < grid.cols(); ++i) row.push_back(to_string(grid(j, i)));
    values.push_back(std::move(row));
  }
  return {{"mu", measure_to_json(mu, "x")},
          {"nu", measure_to_json(nu, "y")},
          {"payoff", {{"kind", "grid"}, {"values", std::move(values)}}}};
}

/// Nonzero cells as [{x, y, q}], row-major.
inline json plan_to_json(const TransportPlan& plan) {
  json out = json::array();
  for (std::size_t j = 0; j < plan.q.rows(); ++j)
    for (std::size_t i = 0; i < plan.q.cols(); ++i)
      if (sgn(plan.q(j, i)) != 0) {
        out.push_back({{"x", to_string(plan.mu.atom(j))},
                       {"y", to_string(plan.nu.atom(i))},
                       {"q", to_string(plan.q(j, i))}});
      }
  return out;
}

/// Reads [{x, y, q}] (or an object with a "plan" member) onto the supports
/// of mu and nu.
inline TransportPlan plan_from_json(const json& doc, const DiscreteMeasure& mu,
                                    const DiscreteMeasure& nu) {
  const json& cells = doc.is_object() ? array_member(doc, "plan", "plan file") : doc;
  if (!cells.is_array()) throw ParseError("plan must be an array of {x, y, q}");
  TransportPlan plan{Matrix<Rational>(mu.size(), nu.size()), mu, nu};
  Matrix<char> seen(mu.size(), nu.size(), 0);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::string at = "plan[" + std::to_string(k) + "]";
    const Rational x = rational_from_json(member(cells[k], "x", at), at + ".x");
    const Rational y = rational_from_json(member(cells[k], "y", at), at + ".y");
    const auto j = mu.index_of(x);
    const auto i = nu.index_of(y);
    if (!j) throw ParseError(at + ": x = " + to_string(x) + " is not an atom of mu");
    if (!i) throw ParseError(at + ": y = " + to_string(y) + " is not an atom of nu");
    if (seen(*j, *i)) throw ParseError(at + ": cell listed twice");
    seen(*j, *i) = 1;
    plan.q(*j, *i) = rational_from_json(member(cells[k], "q", at), at + ".q");
  }
  return plan;
}

inline json portfolio_to_json(const HedgePortfolio& p) {
  auto list = [](const std::vector<Rational>& v) {
    json out = json::array();
    for (const auto& r : v) out.push_back(to_string(r));
    return out;
  };
  return {{"phi", list(p.phi)}, {"psi", list(p.psi)}, {"h", list(p.h)}};
}

/// Reads {phi, psi, h} (or an object with a "portfolio" member).
inline HedgePortfolio portfolio_from_json(const json& doc) {
  const json& body = doc.is_object() && doc.contains("portfolio") ? doc.at("portfolio") : doc;
  auto list = [&](const char* key) {
    const json& arr = array_member(body, key, "hedge");
    std::vector<Rational> out;
    for (std::size_t k = 0; k < arr.size(); ++k) {
      out.push_back(rational_from_json(arr[k], std::string(key) + "[" + std::to_string(k) + "]"));
    }
    return out;
  };
  return HedgePortfolio{list("phi"), list("psi"), list("h")};
}

/// {"maturities": [{label, forward, quotes: [{strike, price}]}]}
inline std::vector<std::pair<std::string, CallQuoteSet>> parse_quote_file(const json& doc) {
  const json& list = array_member(doc, "maturities", "quote file");
  std::vector<std::pair<std::string, CallQuoteSet>> out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string at = "maturities[" + std::to_string(k) + "]";
    const json& label = member(list[k], "label", at);
    if (!label.is_string()) throw ParseError(at + ".label must be a string");
    CallQuoteSet set;
    set.forward = rational_from_json(member(list[k], "forward", at), at + ".forward");
    const json& quotes = array_member(list[k], "quotes", at);
    for (std::size_t r = 0; r < quotes.size(); ++r) {
      const std::string qat = at + ".quotes[" + std::to_string(r) + "]";
      set.quotes.push_back({rational_from_json(member(quotes[r], "strike", qat), qat + ".strike"),
                            rational_from_json(member(quotes[r], "price", qat), qat + ".price")});
    }
    out.emplace_back(label.get<std::string>(), std::move(set));
  }
  return out;
}

inline json quotes_to_json(const std::string& label, const CallQuoteSet& set) {
  json quotes = json::array();
  for (const auto& q : set.quotes) {
    quotes.push_back({{"strike", to_string(q.strike)}, {"price", to_string(q.price)}});
  }
  return {{"label", label}, {"forward", to_string(set.forward)}, {"quotes", std::move(quotes)}};
}

}  // namespace mot::io
