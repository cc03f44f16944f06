#include "sideinfo/strategy.hpp"

#include <stdexcept>

namespace sideinfo {

StrategySpace::StrategySpace(std::vector<Alphabet> domain_axes, Alphabet codomain,
                             std::vector<std::vector<int>> tables)
    : domain_(std::move(domain_axes)),
      codomain_(std::move(codomain)),
      cells_(static_cast<int>(cell_count(domain_))),
      tables_(std::move(tables)) {
  for (const auto& t : tables_) {
    if (static_cast<int>(t.size()) != cells_) {
      throw std::invalid_argument("StrategySpace: table size mismatch");
    }
    for (int v : t) {
      if (v < 0 || v >= codomain_.size) {
        throw std::invalid_argument("StrategySpace: value outside codomain");
      }
    }
  }
}

StrategySpace enumerate_strategies(std::vector<Alphabet> domain_axes,
                                   Alphabet codomain, std::size_t cap) {
  const auto cells = static_cast<int>(cell_count(domain_axes));
  std::size_t count = 1;
  for (int i = 0; i < cells; ++i) {
    count *= static_cast<std::size_t>(codomain.size);
    if (count > cap) {
      throw CapacityError("strategy space " + std::to_string(codomain.size) +
                          "^" + std::to_string(cells) + " exceeds cap of " +
                          std::to_string(cap));
    }
  }
  std::vector<std::vector<int>> tables;
  tables.reserve(count);
  std::vector<int> table(cells, 0);
  for (std::size_t n = 0; n < count; ++n) {
    tables.push_back(table);
    for (int c = cells - 1; c >= 0; --c) {
      if (++table[c] < codomain.size) break;
      table[c] = 0;
    }
  }
  return StrategySpace(std::move(domain_axes), std::move(codomain),
                       std::move(tables));
}

CondKernel lift_channel(const ChannelInstance& ch, const StrategySpace& strategies,
                        const Alphabet& v2) {
  const auto& dom = strategies.domain_axes();
  if (dom.size() != 2 || dom[0].size != ch.s1.size || dom[1].size != v2.size ||
      strategies.codomain().size != ch.x.size) {
    throw std::invalid_argument(
        "lift_channel: strategies must map S1 x V2 -> X of the channel");
  }
  const int nt = strategies.size();
  const Alphabet T = strategies.alphabet();
  RowMajorMatrix m(static_cast<Eigen::Index>(nt) * ch.s1.size * ch.s2.size *
                       v2.size,
                   ch.y.size);
  Eigen::Index row = 0;
  for (int t = 0; t < nt; ++t) {
    for (int s1 = 0; s1 < ch.s1.size; ++s1) {
      for (int s2 = 0; s2 < ch.s2.size; ++s2) {
        for (int v = 0; v < v2.size; ++v) {
          const int x = strategies(t, s1 * v2.size + v);
          const Eigen::Index src = (static_cast<Eigen::Index>(x) * ch.s1.size + s1) *
                                       ch.s2.size +
                                   s2;
          m.row(row++) = ch.kernel.matrix().row(src);
        }
      }
    }
  }
  return CondKernel({T, ch.s1, ch.s2, v2}, {ch.y}, std::move(m));
}

LiftedDistortion lift_source(const Eigen::MatrixXd& distortion,
                             const StrategySpace& strategies) {
  if (strategies.codomain().size != distortion.cols()) {
    throw std::invalid_argument(
        "lift_source: strategy codomain must be the reconstruction alphabet");
  }
  const int nx = static_cast<int>(distortion.rows());
  const int ns = strategies.domain_cells();
  LiftedDistortion d(nx, strategies.size(), ns);
  for (int x = 0; x < nx; ++x) {
    for (int t = 0; t < strategies.size(); ++t) {
      for (int s = 0; s < ns; ++s) d(x, t, s) = distortion(x, strategies(t, s));
    }
  }
  return d;
}

LiftedDistortion lift_source(const SourceInstance& src,
                             const StrategySpace& strategies) {
  if (strategies.domain_cells() != src.s2.size) {
    throw std::invalid_argument(
        "lift_source: strategy domain must be the decoder side information");
  }
  return lift_source(src.distortion, strategies);
}

CodingCase parse_coding_case(const std::string& id) {
  if (id == "CC-1" || id == "cc1") return CodingCase::CC1;
  if (id == "CC-2" || id == "cc2") return CodingCase::CC2;
  if (id == "CC-2C" || id == "cc2c") return CodingCase::CC2C;
  if (id == "SC-1" || id == "sc1") return CodingCase::SC1;
  if (id == "SC-1C" || id == "sc1c") return CodingCase::SC1C;
  if (id == "SC-2" || id == "sc2") return CodingCase::SC2;
  throw std::invalid_argument("unknown coding case '" + id + "'");
}

std::string to_string(CodingCase c) {
  switch (c) {
    case CodingCase::CC1: return "CC-1";
    case CodingCase::CC2: return "CC-2";
    case CodingCase::CC2C: return "CC-2C";
    case CodingCase::SC1: return "SC-1";
    case CodingCase::SC1C: return "SC-1C";
    case CodingCase::SC2: return "SC-2";
  }
  return "?";
}

CardinalityBound cardinality_bounds(CodingCase c, const AlphabetSizes& a) {
  const long long x = a.x, s1 = a.s1, s2 = a.s2;
  const long long full = x * s1 * s2;
  switch (c) {
    case CodingCase::CC1:
    case CodingCase::SC2:
      return {full + 1, full * (full + 1)};
    case CodingCase::CC2:
    case CodingCase::SC1:
      return {s1 * s2 + 1, full * (s1 * s2 + 1)};
    case CodingCase::CC2C:
      return {s2 + 1, x * s2 * (s2 + 1)};
    case CodingCase::SC1C:
      return {s1 + 1, x * s1 * (s1 + 1)};
  }
  throw std::invalid_argument("cardinality_bounds: unknown case");
}

}  // namespace sideinfo
