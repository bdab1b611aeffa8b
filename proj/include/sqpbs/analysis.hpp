#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sqpbs/protocol.hpp"

namespace sqpbs {

/// Reduced fraction with positive denominator.
class Rational {
 public:
  Rational(std::int64_t num = 0, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

struct EfficiencyReport {
  std::string protocol;
  std::uint64_t n = 0;
  std::uint64_t l = 0;
  std::uint64_t q_s = 0;  // signature qubits
  std::uint64_t q_t = 0;  // qubits consumed
  std::uint64_t q_c = 0;  // classical bits
  Rational eta;

  Json to_json() const;
};

/// eta = 2n / (34n + l): q_s = 2n, q_t = 30n, q_c = l + 4n.
/// Throws std::invalid_argument unless n, l >= 1.
EfficiencyReport qubit_efficiency(std::uint64_t n, std::uint64_t l);

/// Qubits charged per established key bit.
struct AccountingRules {
  std::uint64_t bb84_qubits_per_key_bit = 4;
  std::uint64_t sqkd_qubits_per_key_bit = 8;
};

/// Counts from a finished run: prepared χ, ξ_m and G' qubits plus key
/// material charged per `rules`; classical bits are the Signature-category
/// messages of the transcript. Decoys and detection traffic are excluded.
EfficiencyReport instrumented_efficiency(const ProtocolState& state, const AccountingRules& rules = {});

struct ComparisonRow {
  std::string protocol;
  std::string efficiency;  // as cited
  std::string quantum_resource;
  std::string semiquantum_parties;
  std::string proxy_signers;
  std::string eavesdropping_check;
  std::string measurements;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  Rational ref21;
  Rational ref23;
  std::uint64_t n = 0;
  std::uint64_t l = 0;
  Rational ours;
  bool ours_exceeds_ref23 = false;  // holds iff l < 24n

  Json to_json() const;
  std::string to_text() const;
};

ComparisonReport comparison_table(std::uint64_t n, std::uint64_t l);

/// Proportion with its 3-sigma normal-approximation interval.
struct ExperimentResult {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double estimate = 0.0;
  double sigma = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  Json config;

  /// |estimate - expected| <= 3 sqrt(expected (1 - expected) / trials).
  bool within_3sigma(double expected) const;

  Json to_json() const;
};

ExperimentResult make_result(std::string name, std::uint64_t trials, std::uint64_t successes, Json config);

/// Worker count used when `threads` is 0.
unsigned default_threads();

/// Fraction of runs of `base` (seed replaced per trial) aborted for eavesdropping.
ExperimentResult experiment_detection(const RunConfig& base, std::uint64_t trials, std::uint64_t seed,
                                      unsigned threads = 0);

/// Fraction of forged runs that reach Valid.
ExperimentResult experiment_forgery(ForgeryModel model, std::size_t n, std::uint64_t trials, std::uint64_t seed,
                                    unsigned threads = 0);

/// Counts trials whose paired transcripts differ. With `delta` unset each
/// trial draws its own.
ExperimentResult experiment_blindness(std::size_t n, std::uint64_t trials, std::uint64_t seed,
                                      std::optional<BitString> delta = std::nullopt, unsigned threads = 0);

}  // namespace sqpbs
