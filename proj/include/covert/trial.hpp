#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace covert {

enum class TrialStatus { Ok, MissedDetection, FalseAlarm, WrongMessage, Ambiguous };

inline std::string to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::Ok:
      return "ok";
    case TrialStatus::MissedDetection:
      return "missed_detection";
    case TrialStatus::FalseAlarm:
      return "false_alarm";
    case TrialStatus::WrongMessage:
      return "wrong_message";
    case TrialStatus::Ambiguous:
      return "ambiguous";
  }
  return "?";
}

// What the decoder reports for one received block.
struct DecodeResult {
  bool detected = false;   // T-hat
  bool ambiguous = false;  // two or more codewords above threshold
  uint64_t message = 0;    // valid when detected and not ambiguous
  double best_score = 0.0; // max codeword score (nats)
};

// One simulated transmission, as recorded in transcripts.
struct TrialOutcome {
  uint64_t trial_id = 0;
  bool t_true = false;
  bool t_hat = false;
  std::optional<uint64_t> w_true;
  std::optional<uint64_t> w_hat;
  TrialStatus status = TrialStatus::Ok;
  double score_margin = 0.0;  // best score minus decoding threshold
  // spread-spectrum extras
  std::optional<uint64_t> support_size;
  std::optional<uint64_t> n_prime;

  bool is_error() const { return status != TrialStatus::Ok; }
};

// Maps a decoder fragment and the ground truth onto the outcome taxonomy.
// An ambiguous decode under T=0 is a false alarm; under T=1 it is an error
// in its own right.
inline TrialOutcome classify_trial(uint64_t trial_id, bool t_true,
                                   std::optional<uint64_t> w_true, const DecodeResult& d,
                                   double threshold) {
  TrialOutcome o;
  o.trial_id = trial_id;
  o.t_true = t_true;
  o.w_true = w_true;
  o.t_hat = d.detected || d.ambiguous;
  if (d.detected && !d.ambiguous) o.w_hat = d.message;
  o.score_margin = d.best_score - threshold;
  if (!t_true) {
    o.status = o.t_hat ? TrialStatus::FalseAlarm : TrialStatus::Ok;
  } else if (d.ambiguous) {
    o.status = TrialStatus::Ambiguous;
  } else if (!d.detected) {
    o.status = TrialStatus::MissedDetection;
  } else if (w_true && d.message != *w_true) {
    o.status = TrialStatus::WrongMessage;
  } else {
    o.status = TrialStatus::Ok;
  }
  return o;
}

}  // namespace covert
