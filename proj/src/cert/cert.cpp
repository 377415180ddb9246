#include "pillowkit/cert/cert.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pillowkit/errors.hpp"

namespace pillowkit::cert {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s && composite; ++r) {
      x = mulmod(x, x, n);
      composite = x != n - 1;
    }
    if (composite) return false;
  }
  return true;
}

namespace {

std::uint64_t addmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return a >= m - b ? a - (m - b) : a + b;
}
std::uint64_t submod(std::uint64_t a, std::uint64_t b, std::uint64_t m) { return a >= b ? a - b : a + (m - b); }
std::uint64_t negmod(std::uint64_t a, std::uint64_t m) { return a == 0 ? 0 : m - a; }
std::uint64_t invmod(std::uint64_t a, std::uint64_t p) { return powmod(a, p - 2, p); }

std::uint64_t reduce(std::int64_t v, std::uint64_t p) {
  if (v >= 0) return static_cast<std::uint64_t>(v) % p;
  // -(v + 1) cannot overflow.
  return p - 1 - static_cast<std::uint64_t>(-(v + 1)) % p;
}

}  // namespace

ModMatrix ModMatrix::identity(std::uint64_t p) { return {1 % p, 0, 0, 1 % p, p}; }

ModMatrix ModMatrix::make(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, std::uint64_t p) {
  if (p < 2) throw std::invalid_argument("modulus must be at least 2");
  return {reduce(a, p), reduce(b, p), reduce(c, p), reduce(d, p), p};
}

std::uint64_t ModMatrix::det() const { return submod(mulmod(a, d, p), mulmod(b, c, p), p); }
std::uint64_t ModMatrix::trace() const { return addmod(a, d, p); }
ModMatrix ModMatrix::adjugate() const { return {d, negmod(b, p), negmod(c, p), a, p}; }

ModMatrix operator*(const ModMatrix& x, const ModMatrix& y) {
  const std::uint64_t p = x.p;
  return {addmod(mulmod(x.a, y.a, p), mulmod(x.b, y.c, p), p), addmod(mulmod(x.a, y.b, p), mulmod(x.b, y.d, p), p),
          addmod(mulmod(x.c, y.a, p), mulmod(x.d, y.c, p), p), addmod(mulmod(x.c, y.b, p), mulmod(x.d, y.d, p), p),
          p};
}

ModMatrix eval_word(const std::vector<ModMatrix>& images, const Word& w) {
  if (images.empty()) {
    if (!w.empty()) throw IndexOutOfRange("word uses a generator but there are no images");
    throw std::invalid_argument("no images to fix the modulus");
  }
  const std::uint64_t p = images.front().p;
  for (const auto& m : images) {
    if (m.p != p) throw std::invalid_argument("images have different moduli");
  }
  ModMatrix acc = ModMatrix::identity(p);
  for (int k : w) {
    const auto i = static_cast<std::size_t>(std::abs(k));
    if (k == 0 || i > images.size()) {
      throw IndexOutOfRange("generator index " + std::to_string(k) + " outside 1.." + std::to_string(images.size()));
    }
    acc = acc * (k > 0 ? images[i - 1] : images[i - 1].adjugate());
  }
  return acc;
}

namespace {

bool relators_hold(const Presentation& pres, const std::vector<ModMatrix>& images) {
  const ModMatrix id = ModMatrix::identity(images.front().p);
  for (const auto& r : pres.relators) {
    if (!(eval_word(images, r) == id)) return false;
  }
  return true;
}

bool non_abelian(const std::vector<ModMatrix>& images) {
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      if (!(images[i] * images[j] == images[j] * images[i])) return true;
    }
  }
  return false;
}

Verdict reject(const char* why) { return {false, why}; }

}  // namespace

Verdict verify_certificate(const Presentation& pres, const Certificate& cert) {
  if (!is_prime(cert.p)) return reject(kNotPrime);
  if (pres.generators < 0 || cert.images.size() != static_cast<std::size_t>(pres.generators)) return reject(kShape);
  for (const auto& m : cert.images) {
    if (m.p != cert.p || !m.in_range()) return reject(kEntryRange);
  }
  for (const auto& m : cert.images) {
    if (m.det() != 1) return reject(kDetNotOne);
  }
  for (const auto& r : pres.relators) {
    for (int k : r) {
      if (k == 0 || std::abs(k) > pres.generators) return reject(kRelationFails);
    }
  }
  if (!cert.images.empty() && !relators_hold(pres, cert.images)) return reject(kRelationFails);
  if (!non_abelian(cert.images)) return reject(kAbelian);
  return {true, ""};
}

std::uint64_t sl2_order(std::uint64_t p) { return p * (p - 1) * (p + 1); }

ModMatrix sl2_element(std::uint64_t p, std::uint64_t i) {
  if (i >= sl2_order(p)) throw IndexOutOfRange("SL(2) element index out of range");
  const std::uint64_t block = (p - 1) * p * p;
  if (i < block) {
    // a != 0: d = (1 + bc) / a.
    const std::uint64_t a = 1 + i / (p * p), b = (i / p) % p, c = i % p;
    const std::uint64_t d = mulmod(addmod(1 % p, mulmod(b, c, p), p), invmod(a, p), p);
    return {a, b, c, d, p};
  }
  i -= block;
  // a = 0: bc = -1.
  const std::uint64_t b = 1 + i / p, d = i % p;
  return {0, b, negmod(invmod(b, p), p), d, p};
}

std::vector<ModMatrix> class_representatives(std::uint64_t p) {
  std::uint64_t nu = 0;
  if (p > 2) {
    for (std::uint64_t x = 2; x < p && nu == 0; ++x) {
      if (powmod(x, (p - 1) / 2, p) == p - 1) nu = x;
    }
  }
  std::vector<ModMatrix> out;
  for (std::uint64_t t = 0; t < p; ++t) {
    const bool plus = t == 2 % p, minus = t == (p - 2) % p;
    if (plus || minus) {
      const std::uint64_t s = plus ? 1 % p : p - 1;
      out.push_back({s, 1, 0, s, p});
      if (nu) out.push_back({s, nu, 0, s, p});
    } else {
      out.push_back({0, p - 1, 1, t, p});
    }
  }
  return out;
}

namespace {

constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

// Splits [0, total) into chunks for a worker pool; `scan(start, end)` returns
// the first hit in its chunk or kNone. Returns the lowest hit (reproducible)
// or any hit.
template <class Scan>
std::uint64_t parallel_first(std::uint64_t total, std::uint64_t chunk, unsigned threads, bool reproducible,
                             Scan scan) {
  std::atomic<std::uint64_t> next{0}, best{kNone};
  auto worker = [&] {
    while (true) {
      const std::uint64_t start = next.fetch_add(chunk);
      if (start >= total) return;
      const std::uint64_t b = best.load();
      if (reproducible ? start > b : b != kNone) return;
      const std::uint64_t i = scan(start, std::min(total, start + chunk));
      std::uint64_t cur = best.load();
      while (i < cur && !best.compare_exchange_weak(cur, i)) {
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return best.load();
}

// Uniform SL(2, p): a uniform nonzero first row, then the second row is a
// particular solution plus a uniform multiple of the first.
ModMatrix random_sl2(std::uint64_t p, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> u(0, p - 1);
  std::uint64_t a = 0, b = 0;
  while (a == 0 && b == 0) {
    a = u(rng);
    b = u(rng);
  }
  std::uint64_t c0 = 0, d0 = 0;
  if (a != 0) {
    d0 = invmod(a, p);
  } else {
    c0 = negmod(invmod(b, p), p);
  }
  const std::uint64_t k = u(rng);
  return {a, b, addmod(c0, mulmod(k, a, p), p), addmod(d0, mulmod(k, b, p), p), p};
}

std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t p, std::uint64_t chunk_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32),
                    static_cast<std::uint32_t>(chunk_id), static_cast<std::uint32_t>(chunk_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

std::optional<Certificate> search_certificate(const Presentation& pres, const std::vector<std::uint64_t>& primes,
                                              const SearchOptions& opt, SearchStats* stats,
                                              const std::string& presentation_id) {
  pres.validate();
  const int g = pres.generators;
  const bool exhaustive = opt.mode == SearchOptions::Mode::Exhaustive;
  if (exhaustive && g > 2) {
    throw SearchSpaceTooLarge("exhaustive search handles at most two generators, got " + std::to_string(g));
  }
  const unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  if (stats) *stats = {};

  for (std::uint64_t p : primes) {
    if (!is_prime(p)) throw std::invalid_argument("search prime " + std::to_string(p) + " is not prime");
    if (p > (1ull << 20)) throw SearchSpaceTooLarge("prime " + std::to_string(p) + " is too large to search");
    if (stats) stats->primes_tried.push_back(p);
    // A single generator always has abelian image.
    if (g < 2) continue;

    std::vector<ModMatrix> found;
    if (exhaustive) {
      const auto reps = class_representatives(p);
      const std::uint64_t order = sl2_order(p);
      const std::uint64_t total = reps.size() * order;
      if (total > opt.exhaustive_cap) {
        std::ostringstream msg;
        msg << "exhaustive search at p = " << p << " needs " << total << " assignments, cap " << opt.exhaustive_cap;
        throw SearchSpaceTooLarge(msg.str());
      }
      auto images_at = [&](std::uint64_t i) {
        return std::vector<ModMatrix>{reps[i / order], sl2_element(p, i % order)};
      };
      const std::uint64_t hit =
          parallel_first(total, 4096, threads, opt.reproducible, [&](std::uint64_t start, std::uint64_t end) {
            for (std::uint64_t i = start; i < end; ++i) {
              const auto im = images_at(i);
              if (relators_hold(pres, im) && non_abelian(im)) return i;
            }
            return kNone;
          });
      if (stats) stats->assignments += hit == kNone ? total : hit + 1;
      if (hit != kNone) found = images_at(hit);
    } else {
      constexpr std::uint64_t chunk = 1024;
      // Images for trial i are drawn from the stream of chunk i / chunk.
      auto images_at = [&](std::uint64_t i) {
        auto rng = chunk_rng(opt.seed, p, i / chunk);
        std::vector<ModMatrix> im(static_cast<std::size_t>(g));
        for (std::uint64_t skip = 0; skip <= i % chunk; ++skip) {
          for (auto& m : im) m = random_sl2(p, rng);
        }
        return im;
      };
      const std::uint64_t hit = parallel_first(
          opt.max_trials, chunk, threads, opt.reproducible, [&](std::uint64_t start, std::uint64_t end) {
            auto rng = chunk_rng(opt.seed, p, start / chunk);
            std::vector<ModMatrix> im(static_cast<std::size_t>(g));
            for (std::uint64_t i = start; i < end; ++i) {
              for (auto& m : im) m = random_sl2(p, rng);
              if (relators_hold(pres, im) && non_abelian(im)) return i;
            }
            return kNone;
          });
      if (stats) stats->assignments += hit == kNone ? opt.max_trials : hit + 1;
      if (hit != kNone) found = images_at(hit);
    }
    if (!found.empty()) {
      Certificate c{presentation_id, p, std::move(found)};
      if (!verify_certificate(pres, c)) throw std::logic_error("search produced a rejected certificate");
      return c;
    }
  }
  return std::nullopt;
}

}  // namespace pillowkit::cert
