#pragma once

#include <cstdint>

#include "sparseloc/geometry.hpp"

namespace sparseloc {

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Link-budget parameters for a transmitter/receiver pair at equal antenna height.
///
/// The received-power model is the Friis path loss with a log-distance exponent,
/// offset by the transmitter's extra gain and the receiver's sensitivity so that
/// the output reads as a margin above the sensitivity floor. Antenna gains are 0 dBi.
struct RadioLinkParams {
  double frequency_hz = 2.4e9;
  double tx_power_dbm = 0.0;
  double tx_extra_gain_db = 13.0;
  double sensitivity_offset_db = 71.0;
  double path_loss_exponent = 2.7;
  double antenna_height_m = 0.6;
  /// Distances below this are clamped before evaluating the log-distance model.
  double near_field_clamp_m = 0.1;

  double wavelength() const { return kSpeedOfLight / frequency_hz; }

  /// Throws ConfigError on non-physical values.
  void validate() const;
};

/// Log-normal shadowing: zero-mean Gaussian noise in dB.
struct NoiseModel {
  double shadowing_sigma_db = 3.0;
  std::uint64_t seed = 0;
};

/// Counter-based standard-normal stream. Draw k depends only on (seed, k), so a
/// stream can be replayed or forked without carrying engine state around.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed, std::uint64_t first_index = 0)
      : seed_(seed), index_(first_index) {}

  double next_gaussian() { return gaussian_at(seed_, index_++); }
  std::uint64_t index() const { return index_; }
  std::uint64_t seed() const { return seed_; }

  static double gaussian_at(std::uint64_t seed, std::uint64_t index);

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
};

/// Free-space loss between isotropic antennas, -10 log10(lambda^2 / (4 pi d)^2).
double free_space_path_loss(double distance_m, double wavelength_m);

/// Received level in dBm for a receiver `distance_m` from the transmitter.
double received_power(double distance_m, const RadioLinkParams& params);

/// Radius of Fresnel zone `zone` (1..3) at distances d1, d2 from the two ends.
double fresnel_radius(int zone, double d1_m, double d2_m, double wavelength_m);

/// Same formula without the 1..3 cap; `zone` must be >= 1.
double fresnel_radius_any_zone(int zone, double d1_m, double d2_m, double wavelength_m);

/// Fresnel radius at the midpoint of a link of length `link_m`.
double fresnel_radius_midpoint(int zone, double link_m, double frequency_hz);

/// Percentage of the zone radius that clears the ground at the link midpoint.
double obstruction_free_pct(int zone, double link_m, const RadioLinkParams& params);

/// Link length at which the midpoint radius of `zone` first reaches the antenna height.
double obstruction_onset_distance(int zone, const RadioLinkParams& params);

struct RssiSample {
  double rssi_dbm = 0.0;
  double distance_m = 0.0;  // after clamping
  bool clamped = false;
};

/// One noisy RSSI measurement. Consumes exactly one draw from `stream`.
RssiSample sample_rssi(Vec2 source, Vec2 receiver, const RadioLinkParams& params,
                       const NoiseModel& noise, NoiseStream& stream);

}  // namespace sparseloc
