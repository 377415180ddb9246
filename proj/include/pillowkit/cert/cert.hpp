#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pillowkit/knots/presentation.hpp"

namespace pillowkit::cert {

using knots::Presentation;
using knots::Word;

/// 2x2 matrix over Z/p, stored row-major as [[a, b], [c, d]].
struct ModMatrix {
  std::uint64_t a = 1, b = 0, c = 0, d = 1;
  std::uint64_t p = 2;

  static ModMatrix identity(std::uint64_t p);
  /// Reduces the entries (which may be negative) mod p.
  static ModMatrix make(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, std::uint64_t p);

  std::uint64_t det() const;
  std::uint64_t trace() const;
  bool in_range() const { return a < p && b < p && c < p && d < p; }
  /// Adjugate; the inverse whenever det = 1.
  ModMatrix adjugate() const;

  friend bool operator==(const ModMatrix&, const ModMatrix&) = default;
};

ModMatrix operator*(const ModMatrix& x, const ModMatrix& y);

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m);
/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(std::uint64_t n);

/// Left-to-right product; generator -k uses the adjugate. Throws
/// IndexOutOfRange or std::invalid_argument on mixed moduli.
ModMatrix eval_word(const std::vector<ModMatrix>& images, const Word& w);

struct Certificate {
  std::string presentation_id;
  std::uint64_t p = 0;
  std::vector<ModMatrix> images;
};

struct Verdict {
  bool accepted = false;
  std::string reason;  // empty on Accept
  explicit operator bool() const { return accepted; }
};

inline const char* kRelationFails = "relation fails";
inline const char* kDetNotOne = "det ≠ 1";
inline const char* kAbelian = "no non-commuting pair";
inline const char* kNotPrime = "p is not prime";
inline const char* kShape = "image count does not match generators";
inline const char* kEntryRange = "entry out of range";

Verdict verify_certificate(const Presentation& pres, const Certificate& cert);

/// Number of elements of SL(2, Z/p).
std::uint64_t sl2_order(std::uint64_t p);
/// The i-th element of SL(2, Z/p) in a fixed enumeration, 0 <= i < sl2_order(p).
ModMatrix sl2_element(std::uint64_t p, std::uint64_t i);
/// One representative per non-central conjugacy class: the companion matrix
/// of each trace, plus the second unipotent class for trace +-2 when p is odd.
std::vector<ModMatrix> class_representatives(std::uint64_t p);

struct SearchOptions {
  enum class Mode { Exhaustive, Randomized };
  Mode mode = Mode::Exhaustive;
  std::uint64_t max_trials = 10'000'000;  // randomized, per prime
  std::uint64_t exhaustive_cap = 2'000'000'000;  // assignments per prime
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency
  bool reproducible = true;
};

struct SearchStats {
  std::uint64_t assignments = 0;  // candidate assignments examined
  std::vector<std::uint64_t> primes_tried;
};

/// Tries the primes in order. Exhaustive mode needs at most two generators
/// and throws SearchSpaceTooLarge past the cap. In reproducible mode the
/// result is the lowest-index hit, independent of scheduling.
std::optional<Certificate> search_certificate(const Presentation& pres, const std::vector<std::uint64_t>& primes,
                                              const SearchOptions& opt = {}, SearchStats* stats = nullptr,
                                              const std::string& presentation_id = "");

}  // namespace pillowkit::cert
