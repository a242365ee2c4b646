#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace gripsim::sensors {

enum class Position { S1, S2, S3, S4 };
enum class Condition { Relaxed, Stressed, Unknown };

inline constexpr std::array<Position, 4> kPositions{Position::S1, Position::S2, Position::S3,
                                                    Position::S4};

std::string_view to_string(Position p);
std::string_view to_string(Condition c);
std::optional<Position> parse_position(std::string_view s);
std::optional<Condition> parse_condition(std::string_view s);

/// Sampled surface EMG for one electrode site, in microvolts.
struct EmgTrace {
  Position position = Position::S1;
  Condition condition = Condition::Unknown;
  double sample_rate_hz = 1000.0;
  std::vector<double> samples;
};

struct EmgFeatures {
  double rms_uv = 0.0;
  double mav_uv = 0.0;
  double variance_uv2 = 0.0;
  double mean_uv = 0.0;
};

struct Envelope {
  double relaxed_uv = 0.0;
  double stressed_uv = 0.0;
};

/// Generator settings: per-site noise amplitude for each arm condition.
struct EmgProfile {
  std::array<Envelope, 4> envelopes{};
  std::uint64_t seed = 1;
  double duration_s = 30.029;
  double sample_rate_hz = 1000.0;

  /// Stressed signal drops at S1/S3, barely moves at S2, unchanged at S4.
  static EmgProfile reference();

  std::size_t sample_count() const;
  double amplitude(Position p, Condition c) const;
  /// Throws std::invalid_argument.
  void validate() const;
};

/// Zero-mean Gaussian noise with standard deviation equal to the profile
/// amplitude for (position, condition). Deterministic in the profile seed.
EmgTrace synthesize_emg(const EmgProfile& profile, Position position, Condition condition);

/// Throws WindowOutOfBounds when [start, start+len) is not inside the trace or len == 0.
EmgFeatures window_features(const EmgTrace& trace, std::size_t start, std::size_t len);
EmgFeatures features(const EmgTrace& trace);

struct ClassifierConfig {
  double drop_ratio = 0.6;
  double tolerance_ratio = 0.15;
};

using FeatureSet = std::array<EmgFeatures, 4>;  // indexed by Position

/// Stressed iff the S1 and S3 rms both fall to at most drop_ratio of their
/// baseline and S4 stays within tolerance_ratio of its baseline. S2 is not
/// consulted. Throws DegenerateBaseline when an S1..S3 baseline rms is 0.
Condition classify_stress(const FeatureSet& features, const FeatureSet& baseline,
                          const ClassifierConfig& cfg = {});

/// Trailing-window rms of the trace (window shortens at the start).
std::vector<double> rms_envelope(const EmgTrace& trace, std::size_t window);

}  // namespace gripsim::sensors
