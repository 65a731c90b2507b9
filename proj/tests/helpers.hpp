#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tropkm/lattice.hpp"
#include "tropkm/random.hpp"
#include "tropkm/series.hpp"

namespace testing_support {

using tropkm::random_lattice;
using tropkm::random_matrix;
using tropkm::random_poly;
using tropkm::random_unimodular;

using Fp = tropkm::PrimeField;
using Q = tropkm::RationalField;
using SFp = tropkm::Series<Fp>;
using SQ = tropkm::Series<Q>;
using MFp = tropkm::SeriesMatrix<Fp>;
using LFp = tropkm::Lattice<Fp>;

inline tropkm::Context<Fp> big() { return tropkm::Context<Fp>{Fp(), 64}; }
inline tropkm::Context<Fp> small(std::uint64_t p) { return tropkm::Context<Fp>{Fp(p), 64}; }
inline tropkm::Context<Q> rationals() { return tropkm::Context<Q>{Q(), 64}; }

template <class F>
tropkm::Series<F> s(const std::string& text, const tropkm::Context<F>& ctx) {
  return tropkm::parse_series(text, ctx);
}

/// Square matrix from row-major polynomial strings.
template <class F>
tropkm::SeriesMatrix<F> mat(const std::vector<std::vector<std::string>>& rows, const tropkm::Context<F>& ctx) {
  tropkm::SeriesMatrix<F> m(ctx, rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = tropkm::parse_series(rows[i][j], ctx);
  }
  return m;
}

template <class F>
tropkm::SeriesVector<F> vec(const std::vector<std::string>& entries, const tropkm::Context<F>& ctx) {
  tropkm::SeriesVector<F> v;
  for (const auto& e : entries) v.push_back(tropkm::parse_series(e, ctx));
  return v;
}

}  // namespace testing_support
