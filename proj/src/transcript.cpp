#include "sqpbs/transcript.hpp"

#include <stdexcept>

namespace sqpbs {

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Init: return "init";
    case Phase::Blind: return "blind";
    case Phase::SignAuth: return "sign";
    case Phase::Verify: return "verify";
    case Phase::Done: return "done";
    case Phase::Aborted: return "aborted";
  }
  return "?";
}

const char* to_string(MessageCategory category) {
  switch (category) {
    case MessageCategory::Signature: return "signature";
    case MessageCategory::Detection: return "detection";
    case MessageCategory::Control: return "control";
  }
  return "?";
}

std::size_t Transcript::append(const std::string& kind, const Json& fields) {
  const std::size_t seq = events_.size();
  Json event;
  event["seq"] = seq;
  event["phase"] = to_string(phase_);
  event["kind"] = kind;
  for (const auto& [key, value] : fields.items()) event[key] = value;
  events_.push_back(std::move(event));
  return seq;
}

std::size_t Transcript::add_classical(Party from, Party to, const std::string& label, const BitString& payload,
                                      MessageCategory category) {
  Json fields;
  fields["from"] = to_string(from);
  fields["to"] = to_string(to);
  fields["label"] = label;
  fields["category"] = to_string(category);
  fields["bits"] = payload.to_string();
  return append("classical", fields);
}

std::size_t Transcript::add_measurement(Party party, const std::string& operation, const std::string& label,
                                        const std::string& record) {
  Json fields;
  fields["party"] = to_string(party);
  fields["operation"] = operation;
  fields["label"] = label;
  fields["record"] = record;
  return append("measurement", fields);
}

std::vector<const Json*> Transcript::find(const std::string& kind, const std::string& label) const {
  std::vector<const Json*> out;
  for (const auto& e : events_) {
    if (e.at("kind") != kind) continue;
    if (!label.empty() && (!e.contains("label") || e.at("label") != label)) continue;
    out.push_back(&e);
  }
  return out;
}

Json Transcript::to_json() const {
  Json j;
  j["format"] = kFormat;
  j["tool_version"] = SQPBS_VERSION;
  j["config"] = config_;
  j["events"] = events_;
  j["verdict"] = verdict_;
  return j;
}

Transcript Transcript::from_json(const Json& j) {
  if (!j.contains("format") || j.at("format") != kFormat) throw std::invalid_argument("not an sqpbs transcript");
  Transcript t;
  t.config_ = j.at("config");
  for (const auto& e : j.at("events")) t.events_.push_back(e);
  t.verdict_ = j.at("verdict");
  return t;
}

}  // namespace sqpbs
