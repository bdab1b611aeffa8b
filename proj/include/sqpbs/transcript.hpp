#pragma once

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sqpbs/bit_string.hpp"
#include "sqpbs/party.hpp"

namespace sqpbs {

using Json = nlohmann::ordered_json;

enum class Phase { Init, Blind, SignAuth, Verify, Done, Aborted };

const char* to_string(Phase phase);

/// What a classical message is for. Only Signature traffic counts toward
/// qubit-efficiency accounting.
enum class MessageCategory { Signature, Detection, Control };

const char* to_string(MessageCategory category);

/// Append-only ordered record of one protocol run.
///
/// Serialized layout (field order is fixed):
///   {"format", "tool_version", "config", "events": [...], "verdict"}
/// Every event starts with "seq", "phase", "kind". Private inputs (g_A, K_A,
/// keys, hash secret) never appear.
class Transcript {
 public:
  static constexpr const char* kFormat = "sqpbs-transcript/1";

  void set_config(Json config) { config_ = std::move(config); }
  const Json& config() const { return config_; }

  void set_phase(Phase phase) { phase_ = phase; }
  Phase phase() const { return phase_; }

  /// Stamps seq/phase/kind ahead of `fields` and appends. Returns seq.
  std::size_t append(const std::string& kind, const Json& fields);

  std::size_t add_classical(Party from, Party to, const std::string& label, const BitString& payload,
                            MessageCategory category);
  std::size_t add_measurement(Party party, const std::string& operation, const std::string& label,
                              const std::string& record);

  const std::vector<Json>& events() const { return events_; }

  /// Events of `kind` (and, if given, with "label" == label).
  std::vector<const Json*> find(const std::string& kind, const std::string& label = {}) const;

  void set_verdict(Json verdict) { verdict_ = std::move(verdict); }
  const Json& verdict() const { return verdict_; }

  Json to_json() const;
  std::string dump() const { return to_json().dump(); }
  static Transcript from_json(const Json& j);

 private:
  Json config_ = Json::object();
  Phase phase_ = Phase::Init;
  std::vector<Json> events_;
  Json verdict_ = nullptr;
};

}  // namespace sqpbs
