#include "pillowkit/knots/presentation.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pillowkit/errors.hpp"

namespace pillowkit::knots {

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& k : out) k = -k;
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Word power(const Word& w, long n) {
  const Word base = n < 0 ? inverse(w) : w;
  Word out;
  for (long i = 0; i < std::labs(n); ++i) out.insert(out.end(), base.begin(), base.end());
  return out;
}

Word reduce(const Word& w) {
  Word out;
  for (int k : w) {
    if (!out.empty() && out.back() == -k) {
      out.pop_back();
    } else {
      out.push_back(k);
    }
  }
  return out;
}

std::size_t Presentation::total_length() const {
  std::size_t n = 0;
  for (const auto& r : relators) n += r.size();
  return n;
}

void Presentation::validate() const {
  if (generators < 0) throw std::invalid_argument("negative generator count");
  if (!names.empty() && names.size() != static_cast<std::size_t>(generators)) {
    throw std::invalid_argument("generator names do not match the generator count");
  }
  for (std::size_t i = 0; i < relators.size(); ++i) {
    for (int k : relators[i]) {
      if (k == 0 || std::abs(k) > generators) {
        std::ostringstream msg;
        msg << "relator " << i << " uses generator index " << k << " outside 1.." << generators;
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

std::vector<long> exponent_sums(const Word& w, int generators) {
  std::vector<long> out(static_cast<std::size_t>(generators), 0);
  for (int k : w) {
    if (k == 0 || std::abs(k) > generators) throw std::invalid_argument("generator index out of range");
    out[static_cast<std::size_t>(std::abs(k) - 1)] += k > 0 ? 1 : -1;
  }
  return out;
}

Abelianization abelianize(const Presentation& p) {
  p.validate();
  const int cols = p.generators;
  std::vector<std::vector<std::int64_t>> m;
  for (const auto& r : p.relators) {
    const auto e = exponent_sums(r, cols);
    m.emplace_back(e.begin(), e.end());
  }
  const int rows = static_cast<int>(m.size());

  // Smith normal form by repeated pivoting on the smallest nonzero entry.
  std::vector<std::int64_t> diag;
  for (int t = 0; t < std::min(rows, cols); ++t) {
    while (true) {
      int pr = -1, pc = -1;
      std::int64_t best = 0;
      for (int i = t; i < rows; ++i) {
        for (int j = t; j < cols; ++j) {
          const std::int64_t v = std::llabs(m[i][j]);
          if (v != 0 && (best == 0 || v < best)) {
            best = v;
            pr = i;
            pc = j;
          }
        }
      }
      if (pr < 0) break;
      std::swap(m[t], m[pr]);
      for (auto& row : m) std::swap(row[t], row[pc]);
      bool clean = true;
      for (int i = t + 1; i < rows; ++i) {
        const std::int64_t f = m[i][t] / m[t][t];
        for (int j = t; j < cols; ++j) m[i][j] -= f * m[t][j];
        clean = clean && m[i][t] == 0;
      }
      for (int j = t + 1; j < cols; ++j) {
        const std::int64_t f = m[t][j] / m[t][t];
        for (int i = t; i < rows; ++i) m[i][j] -= f * m[i][t];
        clean = clean && m[t][j] == 0;
      }
      if (!clean) continue;
      // Divisibility: fold a bad row into row t and retry.
      int bad = -1;
      for (int i = t + 1; i < rows && bad < 0; ++i) {
        for (int j = t + 1; j < cols; ++j) {
          if (m[i][j] % m[t][t] != 0) {
            bad = i;
            break;
          }
        }
      }
      if (bad < 0) break;
      for (int j = t; j < cols; ++j) m[t][j] += m[bad][j];
    }
    if (t < rows && m[t][t] != 0) {
      diag.push_back(std::llabs(m[t][t]));
    } else {
      break;
    }
  }
  Abelianization out;
  for (auto d : diag) {
    if (d > 1) out.torsion.push_back(d);
  }
  out.free_rank = cols - static_cast<int>(diag.size());
  return out;
}

KnotSpec KnotSpec::unknot() {
  KnotSpec s;
  s.kind = Kind::Unknot;
  s.name = "unknot";
  return s;
}

KnotSpec KnotSpec::torus(int p, int q) {
  KnotSpec s;
  s.kind = Kind::TorusKnot;
  s.p = p;
  s.q = q;
  return s;
}

std::string KnotSpec::id() const {
  if (!name.empty()) return name;
  switch (kind) {
    case Kind::Unknot:
      return "unknot";
    case Kind::TorusKnot:
      return "T(" + std::to_string(p) + "," + std::to_string(q) + ")";
    case Kind::Custom:
      break;
  }
  return "custom";
}

namespace {

long ext_gcd(long a, long b, long& x, long& y) {
  if (b == 0) {
    x = a >= 0 ? 1 : -1;
    y = 0;
    return std::labs(a);
  }
  long x1 = 0, y1 = 0;
  const long g = ext_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

void check_peripheral(const KnotGroup& g) {
  const auto base = abelianize(g.presentation);
  if (base.free_rank != 1 || !base.torsion.empty()) {
    throw InvalidPeripheral("knot group does not abelianize to Z");
  }
  Presentation with_m = g.presentation;
  with_m.relators.push_back(g.meridian);
  if (!abelianize(with_m).trivial()) throw InvalidPeripheral("meridian does not map to a generator of H1");
  Presentation with_l = g.presentation;
  with_l.relators.push_back(g.longitude);
  const auto al = abelianize(with_l);
  if (al.free_rank != 1 || !al.torsion.empty()) throw InvalidPeripheral("longitude is not null-homologous");
}

}  // namespace

std::pair<long, long> meridian_exponents(int p, int q) {
  long x = 0, y = 0;
  if (ext_gcd(p, q, x, y) != 1) throw std::invalid_argument("torus knot parameters must be coprime");
  // r = x + q t, s = -y + p t.
  std::pair<long, long> best{0, 0};
  bool have = false;
  const long centre = p != 0 ? y / p : 0;
  for (long t = centre - 3; t <= centre + 3; ++t) {
    const long r = x + q * t, s = -y + p * t;
    const auto key = std::make_pair(std::labs(s), s < 0);
    if (!have || key < std::make_pair(std::labs(best.second), best.second < 0)) {
      best = {r, s};
      have = true;
    }
  }
  return best;
}

KnotGroup knot_group(const KnotSpec& spec) {
  KnotGroup g;
  switch (spec.kind) {
    case KnotSpec::Kind::Unknot:
      g.presentation.generators = 1;
      g.presentation.names = {"x"};
      g.meridian = {1};
      return g;
    case KnotSpec::Kind::TorusKnot: {
      const int p = spec.p, q = spec.q;
      if (std::abs(p) < 2 || std::abs(q) < 2) throw std::invalid_argument("torus knot needs |p|, |q| >= 2");
      const auto [r, s] = meridian_exponents(p, q);
      g.presentation.generators = 2;
      g.presentation.names = {"u", "v"};
      g.presentation.relators.push_back(concat(power({1}, p), power({2}, -q)));
      g.meridian = concat(power({1}, -s), power({2}, r));
      g.longitude = concat(power({1}, p), power(g.meridian, -static_cast<long>(p) * q));
      break;
    }
    case KnotSpec::Kind::Custom:
      if (!spec.custom) throw std::invalid_argument("custom knot spec without a presentation");
      g = *spec.custom;
      g.presentation.validate();
      break;
  }
  check_peripheral(g);
  return g;
}

Presentation splice_presentation(const KnotGroup& k, const KnotGroup& k2) {
  const int shift = k.presentation.generators;
  auto shifted = [shift](Word w) {
    for (int& i : w) i += i > 0 ? shift : -shift;
    return w;
  };
  Presentation out;
  out.generators = shift + k2.presentation.generators;
  const auto& n1 = k.presentation.names;
  const auto& n2 = k2.presentation.names;
  if (!n1.empty() && !n2.empty()) {
    for (const auto& n : n1) out.names.push_back(n + "1");
    for (const auto& n : n2) out.names.push_back(n + "2");
  }
  out.relators = k.presentation.relators;
  for (const auto& r : k2.presentation.relators) out.relators.push_back(shifted(r));
  out.relators.push_back(concat(k.meridian, inverse(shifted(k2.longitude))));
  out.relators.push_back(concat(k.longitude, inverse(shifted(k2.meridian))));
  const auto ab = abelianize(out);
  if (!ab.trivial()) {
    std::ostringstream msg;
    msg << "spliced group has free rank " << ab.free_rank << " and " << ab.torsion.size() << " torsion factors";
    throw AbelianizationNontrivial(msg.str());
  }
  return out;
}

Presentation splice_presentation(const KnotSpec& k, const KnotSpec& k2) {
  return splice_presentation(knot_group(k), knot_group(k2));
}

}  // namespace pillowkit::knots
