#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pillowkit::knots {

/// Signed 1-based generator indices; -k is the inverse of generator k.
using Word = std::vector<int>;

Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);
Word power(const Word& w, long n);
/// Free reduction (cancels adjacent k, -k).
Word reduce(const Word& w);

struct Presentation {
  int generators = 0;
  std::vector<Word> relators;
  std::vector<std::string> names;  // optional, one per generator

  std::size_t total_length() const;
  /// Throws std::invalid_argument on an index outside 1..generators.
  void validate() const;
};

/// Exponent sum of each generator in `w`.
std::vector<long> exponent_sums(const Word& w, int generators);

/// Nonzero diagonal of the Smith normal form of the relation matrix
/// (relators x generators), plus the free rank.
struct Abelianization {
  std::vector<std::int64_t> torsion;  // invariant factors > 1
  int free_rank = 0;
  bool trivial() const { return torsion.empty() && free_rank == 0; }
};
Abelianization abelianize(const Presentation& p);

struct KnotGroup {
  Presentation presentation;
  Word meridian;
  Word longitude;
};

struct KnotSpec {
  enum class Kind { Unknot, TorusKnot, Custom };
  Kind kind = Kind::Unknot;
  int p = 0;
  int q = 0;
  std::optional<KnotGroup> custom;
  std::string name;  // for ids and output

  static KnotSpec unknot();
  static KnotSpec torus(int p, int q);
  std::string id() const;
};

/// r, s with r p - s q = 1, minimal |s| (ties to s >= 0).
std::pair<long, long> meridian_exponents(int p, int q);

/// Standard presentations with peripheral words. Throws InvalidPeripheral if
/// the meridian does not abelianize to a generator of Z or the longitude is
/// not null-homologous; std::invalid_argument on bad torus parameters.
KnotGroup knot_group(const KnotSpec& spec);

/// Disjoint union plus m_K = l_K' and l_K = m_K'. Throws
/// AbelianizationNontrivial unless the result is a homology sphere group.
Presentation splice_presentation(const KnotGroup& k, const KnotGroup& k2);
Presentation splice_presentation(const KnotSpec& k, const KnotSpec& k2);

}  // namespace pillowkit::knots
