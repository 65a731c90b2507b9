#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tropkm/assignment.hpp"
#include "tropkm/errors.hpp"
#include "tropkm/invariants.hpp"
#include "tropkm/witness.hpp"

// Text formats.
//
// Lattice file: a header line `n=<int> field=<Fp:PRIME|Q>` followed by n lines
// of n whitespace-separated Laurent polynomials (no inner spaces). Columns are
// the generators. Lines starting with '#' are ignored.
//
// Configuration file: a line `group=SL|PGL`, then lattice blocks separated by
// blank lines. Bases files for the positivity check use the same layout, with
// each block's columns read as an ordered basis.

namespace tropkm {

namespace io {

struct Line {
  std::size_t number = 0;
  std::string text;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

/// Non-comment lines with their 1-based numbers; blank lines are kept as empty text.
inline std::vector<Line> lines_of(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++number;
    auto t = trim(raw);
    if (t.empty() || t[0] != '#') out.push_back({number, t});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

inline std::vector<std::vector<Line>> blocks_of(const std::vector<Line>& lines) {
  std::vector<std::vector<Line>> out;
  std::vector<Line> cur;
  for (const auto& l : lines) {
    if (l.text.empty()) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(l);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

struct Header {
  std::size_t n = 0;
  FieldConfig field;
};

inline Header parse_header(const Line& line) {
  Header h;
  bool have_n = false;
  bool have_field = false;
  for (const auto& word : split_ws(line.text)) {
    const auto eq = word.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value in header, got \"" + word + "\"", line.number, 0);
    const auto key = word.substr(0, eq);
    const auto value = word.substr(eq + 1);
    if (key == "n") {
      if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos || value.size() > 6) {
        throw ParseError("bad dimension \"" + value + "\"", line.number, 0);
      }
      h.n = static_cast<std::size_t>(std::stoul(value));
      if (h.n == 0) throw ParseError("dimension must be positive", line.number, 0);
      have_n = true;
    } else if (key == "field") {
      try {
        h.field = FieldConfig::parse(value);
      } catch (const DomainError& e) {
        throw ParseError(e.what(), line.number, 0);
      }
      have_field = true;
    } else {
      throw ParseError("unknown header key \"" + key + "\"", line.number, 0);
    }
  }
  if (!have_n || !have_field) throw ParseError("header needs n=<int> and field=<Fp:PRIME|Q>", line.number, 0);
  return h;
}

template <ExactField F>
bool field_matches(const FieldConfig& fc, const F& f) {
  if constexpr (std::is_same_v<F, PrimeField>) {
    return fc.kind == FieldConfig::Kind::kPrime && fc.prime == f.modulus();
  } else {
    return fc.kind == FieldConfig::Kind::kRationals;
  }
}

template <ExactField F>
SeriesMatrix<F> parse_matrix_block(const std::vector<Line>& block, const Context<F>& ctx) {
  if (block.empty()) throw ParseError("empty block", 0, 0);
  const auto h = parse_header(block.front());
  if (!field_matches(h.field, ctx.field)) {
    throw ParseError("file field " + h.field.name() + " differs from the working field " + ctx.field.name(), block.front().number, 0);
  }
  if (block.size() != h.n + 1) {
    const std::size_t at = block.size() > h.n + 1 ? block[h.n + 1].number : block.back().number;
    throw ParseError("expected " + std::to_string(h.n) + " matrix rows, got " + std::to_string(block.size() - 1), at, 0);
  }
  SeriesMatrix<F> m(ctx, h.n, h.n);
  for (std::size_t i = 0; i < h.n; ++i) {
    const auto& line = block[i + 1];
    const auto words = split_ws(line.text);
    if (words.size() != h.n) {
      throw ParseError("row has " + std::to_string(words.size()) + " entries, expected " + std::to_string(h.n), line.number, 0);
    }
    for (std::size_t j = 0; j < h.n; ++j) {
      try {
        m(i, j) = parse_series(words[j], ctx);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line.number, 0);
      } catch (const DomainError& e) {
        throw ParseError(e.what(), line.number, 0);
      }
    }
  }
  return m;
}

template <ExactField F>
Lattice<F> lattice_from_block(const std::vector<Line>& block, const Context<F>& ctx) {
  auto m = parse_matrix_block(block, ctx);
  try {
    return Lattice<F>(m);
  } catch (const SingularMatrix& e) {
    throw ParseError(std::string("generators are not of full rank: ") + e.what(), block.front().number, 0);
  }
}

}  // namespace io

/// Field named in the first header line of a lattice or configuration file.
inline FieldConfig peek_field(std::string_view text) {
  for (const auto& l : io::lines_of(text)) {
    if (l.text.empty() || l.text.rfind("group=", 0) == 0) continue;
    return io::parse_header(l).field;
  }
  throw ParseError("no lattice header found", 0, 0);
}

template <ExactField F>
Lattice<F> parse_lattice(std::string_view text, const Context<F>& ctx) {
  const auto blocks = io::blocks_of(io::lines_of(text));
  if (blocks.size() != 1) throw ParseError("expected exactly one lattice block, found " + std::to_string(blocks.size()), 0, 0);
  return io::lattice_from_block(blocks.front(), ctx);
}

namespace io {

inline Group parse_group(const Line& l) {
  if (l.text == "group=SL") return Group::kSL;
  if (l.text == "group=PGL") return Group::kPGL;
  throw ParseError("expected group=SL or group=PGL", l.number, 0);
}

}  // namespace io

template <ExactField F>
Configuration<F> parse_configuration(std::string_view text, const Context<F>& ctx) {
  auto blocks = io::blocks_of(io::lines_of(text));
  if (blocks.empty() || blocks.front().empty()) throw ParseError("empty configuration", 0, 0);
  Configuration<F> conf;
  conf.group = io::parse_group(blocks.front().front());
  blocks.front().erase(blocks.front().begin());
  std::size_t n = 0;
  for (const auto& b : blocks) {
    if (b.empty()) continue;
    auto l = io::lattice_from_block(b, ctx);
    if (n != 0 && l.n() != n) throw DimensionMismatch("lattice at line " + std::to_string(b.front().number) + " has dimension " + std::to_string(l.n()));
    n = l.n();
    conf.points.push_back(std::move(l));
  }
  if (conf.points.empty()) throw ParseError("configuration without lattices", 0, 0);
  validate(conf);
  return conf;
}

/// Ordered bases, one block per point, in the configuration layout (the group line is optional).
template <ExactField F>
std::vector<std::vector<SeriesVector<F>>> parse_bases(std::string_view text, const Context<F>& ctx) {
  auto blocks = io::blocks_of(io::lines_of(text));
  if (!blocks.empty() && !blocks.front().empty() && blocks.front().front().text.rfind("group=", 0) == 0) {
    blocks.front().erase(blocks.front().begin());
  }
  std::vector<std::vector<SeriesVector<F>>> out;
  for (const auto& b : blocks) {
    if (b.empty()) continue;
    const auto m = io::parse_matrix_block(b, ctx);
    std::vector<SeriesVector<F>> cols;
    for (std::size_t j = 0; j < m.cols(); ++j) cols.push_back(m.column(j));
    out.push_back(std::move(cols));
  }
  return out;
}

/// Square integer matrix, one comma-separated row per line.
inline CostMatrix parse_cost_csv(std::string_view text) {
  CostMatrix out;
  std::vector<std::size_t> numbers;
  for (const auto& l : io::lines_of(text)) {
    if (l.text.empty()) continue;
    std::vector<std::int64_t> row;
    std::size_t pos = 0;
    while (true) {
      const auto comma = l.text.find(',', pos);
      const auto cell = io::trim(std::string_view(l.text).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      std::size_t used = 0;
      std::int64_t v = 0;
      try {
        v = std::stoll(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (cell.empty() || used != cell.size()) throw ParseError("bad integer \"" + cell + "\"", l.number, pos + 1);
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    out.push_back(std::move(row));
    numbers.push_back(l.number);
  }
  if (out.empty()) throw ParseError("empty cost matrix", 0, 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].size() != out.size()) {
      throw ParseError("cost matrix is not square: row has " + std::to_string(out[i].size()) + " entries for " +
                           std::to_string(out.size()) + " rows",
                       numbers[i], 0);
    }
  }
  return out;
}

/// One triple of 0-based point indices per line.
inline std::vector<std::array<std::size_t, 3>> parse_triangulation(std::string_view text) {
  std::vector<std::array<std::size_t, 3>> out;
  for (const auto& l : io::lines_of(text)) {
    if (l.text.empty()) continue;
    auto words = io::split_ws(l.text);
    if (words.size() != 3) throw ParseError("expected three point indices", l.number, 0);
    std::array<std::size_t, 3> t{};
    for (std::size_t k = 0; k < 3; ++k) {
      if (words[k].empty() || words[k].find_first_not_of("0123456789") != std::string::npos || words[k].size() > 9) {
        throw ParseError("bad point index \"" + words[k] + "\"", l.number, 0);
      }
      t[k] = static_cast<std::size_t>(std::stoul(words[k]));
    }
    out.push_back(t);
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path, 0, 0);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

template <ExactField F>
std::string format_lattice(const Lattice<F>& l) {
  std::string out = "n=" + std::to_string(l.n()) + " field=" + l.field().name() + "\n";
  for (std::size_t i = 0; i < l.n(); ++i) {
    for (std::size_t j = 0; j < l.n(); ++j) out += (j ? " " : "") + l.basis()(i, j).to_string(true);
    out += "\n";
  }
  return out;
}

// Certificates as JSON. Series are strings in the polynomial grammar; a
// truncated series carries a trailing "+O(t^h)".

namespace io {

template <ExactField F>
Series<F> series_from_text(const std::string& text, const Context<F>& ctx) {
  const auto at = text.find("+O(t^");
  if (at == std::string::npos) return parse_series(text, ctx);
  const auto close = text.find(')', at);
  if (close == std::string::npos || close + 1 != text.size()) throw ParseError("malformed order term in \"" + text + "\"", 0, 0);
  const auto hs = text.substr(at + 5, close - at - 5);
  std::size_t used = 0;
  std::int64_t h = 0;
  try {
    h = std::stoll(hs, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (hs.empty() || used != hs.size()) throw ParseError("bad horizon in \"" + text + "\"", 0, 0);
  const auto head = text.substr(0, at);
  if (head == "0") return Series<F>::unknown_zero(ctx, h);
  const auto poly = parse_series(head, ctx);
  std::vector<typename F::Element> c = poly.coeffs();
  return Series<F>::with_horizon(ctx, poly.lead(), std::move(c), h, false);
}

template <ExactField F>
nlohmann::json vector_json(const SeriesVector<F>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& x : v) out.push_back(x.to_string(true));
  return out;
}

template <ExactField F>
nlohmann::json matrix_json(const SeriesMatrix<F>& m) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).to_string(true));
    out.push_back(row);
  }
  return out;
}

template <ExactField F>
SeriesMatrix<F> matrix_from_json(const nlohmann::json& j, const Context<F>& ctx) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix must be a nonempty array of rows", 0, 0);
  const std::size_t n = j.size();
  SeriesMatrix<F> m(ctx, n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n) throw ParseError("matrix row " + std::to_string(i) + " has the wrong length", 0, 0);
    for (std::size_t k = 0; k < n; ++k) m(i, k) = series_from_text(j[i][k].template get<std::string>(), ctx);
  }
  return m;
}

}  // namespace io

/// Certificate together with the inputs it certifies.
template <ExactField F>
nlohmann::json certificate_json(const WitnessCertificate<F>& cert, const std::vector<Lattice<F>>& inputs) {
  nlohmann::json j;
  j["field"] = cert.L.field().name();
  j["n"] = cert.L.n();
  j["A"] = cert.A;
  j["L"] = io::matrix_json(cert.L.basis());
  j["c_values"] = cert.c_values;
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : cert.tight_gens) gens.push_back(io::vector_json(g));
  j["tight_generators"] = gens;
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : cert.trace) {
    trace.push_back({{"potential", t.potential}, {"slir_size", t.slir_size}, {"deficiency", t.deficiency}, {"w_dim", t.w_dim}});
  }
  j["trace"] = trace;
  nlohmann::json in = nlohmann::json::array();
  for (const auto& l : inputs) in.push_back(io::matrix_json(l.basis()));
  j["inputs"] = in;
  return j;
}

template <ExactField F>
struct ParsedCertificate {
  WitnessCertificate<F> certificate;
  std::vector<Lattice<F>> inputs;
};

/// Field named in a certificate document.
inline FieldConfig certificate_field(const nlohmann::json& j) {
  if (!j.contains("field") || !j["field"].is_string()) throw ParseError("certificate without a field", 0, 0);
  return FieldConfig::parse(j["field"].get<std::string>());
}

template <ExactField F>
ParsedCertificate<F> certificate_from_json(const nlohmann::json& j, const Context<F>& ctx) {
  try {
    if (!io::field_matches(certificate_field(j), ctx.field)) throw ParseError("certificate field differs from the working field", 0, 0);
    const auto n = j.at("n").get<std::size_t>();
    auto l = Lattice<F>(io::matrix_from_json(j.at("L"), ctx));
    if (l.n() != n) throw DimensionMismatch("certificate lattice has the wrong dimension");
    WitnessCertificate<F> cert{l, j.at("c_values").get<std::vector<std::int64_t>>(), {}, j.at("A").get<std::int64_t>(), {}};
    for (const auto& g : j.at("tight_generators")) {
      SeriesVector<F> v;
      for (const auto& x : g) v.push_back(io::series_from_text(x.get<std::string>(), ctx));
      cert.tight_gens.push_back(std::move(v));
    }
    for (const auto& t : j.at("trace")) {
      cert.trace.push_back(TraceRecord{t.at("potential").get<std::int64_t>(), t.at("slir_size").get<std::size_t>(),
                                       t.at("deficiency").get<std::vector<std::size_t>>(), t.at("w_dim").get<std::size_t>()});
    }
    std::vector<Lattice<F>> inputs;
    for (const auto& m : j.at("inputs")) inputs.push_back(Lattice<F>(io::matrix_from_json(m, ctx)));
    return {std::move(cert), std::move(inputs)};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed certificate: ") + e.what(), 0, 0);
  }
}

}  // namespace tropkm
