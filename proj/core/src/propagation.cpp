#include "sparseloc/propagation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sparseloc/errors.hpp"

namespace sparseloc {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

void require_zone(int zone) {
  if (zone < 1 || zone > 3) throw DomainError("Fresnel zone must be 1, 2 or 3, got " + std::to_string(zone));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_open(std::uint64_t bits) {
  // 53 random bits mapped into (0, 1).
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

void RadioLinkParams::validate() const {
  if (!(frequency_hz > 0.0)) throw ConfigError("radio.frequency_hz must be > 0");
  if (!(antenna_height_m > 0.0)) throw ConfigError("radio.antenna_height_m must be > 0");
  if (!(path_loss_exponent >= 1.0)) throw ConfigError("radio.path_loss_exponent must be >= 1");
  if (!(near_field_clamp_m > 0.0)) throw ConfigError("radio.near_field_clamp_m must be > 0");
  if (!std::isfinite(tx_power_dbm) || !std::isfinite(tx_extra_gain_db) || !std::isfinite(sensitivity_offset_db))
    throw ConfigError("radio power offsets must be finite");
}

double NoiseStream::gaussian_at(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(index));
  const double u1 = unit_open(splitmix64(key));
  const double u2 = unit_open(splitmix64(key + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double free_space_path_loss(double distance_m, double wavelength_m) {
  require_positive(distance_m, "distance");
  require_positive(wavelength_m, "wavelength");
  const double ratio = wavelength_m / (4.0 * std::numbers::pi * distance_m);
  return -10.0 * std::log10(ratio * ratio);
}

double received_power(double distance_m, const RadioLinkParams& params) {
  require_positive(distance_m, "distance");
  const double lambda = params.wavelength();
  return params.tx_power_dbm + params.tx_extra_gain_db + 20.0 * std::log10(lambda / (4.0 * std::numbers::pi)) -
         10.0 * params.path_loss_exponent * std::log10(distance_m) + params.sensitivity_offset_db;
}

double fresnel_radius_any_zone(int zone, double d1_m, double d2_m, double wavelength_m) {
  if (zone < 1) throw DomainError("Fresnel zone must be >= 1");
  if (!(d1_m >= 0.0) || !(d2_m >= 0.0) || !(d1_m + d2_m > 0.0))
    throw DomainError("Fresnel distances must be non-negative with a positive sum");
  require_positive(wavelength_m, "wavelength");
  return std::sqrt(zone * d1_m * d2_m * wavelength_m / (d1_m + d2_m));
}

double fresnel_radius(int zone, double d1_m, double d2_m, double wavelength_m) {
  require_zone(zone);
  return fresnel_radius_any_zone(zone, d1_m, d2_m, wavelength_m);
}

double fresnel_radius_midpoint(int zone, double link_m, double frequency_hz) {
  require_zone(zone);
  require_positive(link_m, "link length");
  require_positive(frequency_hz, "frequency");
  return std::sqrt(zone * link_m * kSpeedOfLight / (4.0 * frequency_hz));
}

double obstruction_free_pct(int zone, double link_m, const RadioLinkParams& params) {
  const double r = fresnel_radius_midpoint(zone, link_m, params.frequency_hz);
  require_positive(params.antenna_height_m, "antenna height");
  // Relative slack so a link computed from obstruction_onset_distance reads as fully clear.
  if (r <= params.antenna_height_m * (1.0 + 1e-12)) return 100.0;
  return 100.0 * params.antenna_height_m / r;
}

double obstruction_onset_distance(int zone, const RadioLinkParams& params) {
  require_zone(zone);
  require_positive(params.antenna_height_m, "antenna height");
  require_positive(params.frequency_hz, "frequency");
  const double h = params.antenna_height_m;
  return 4.0 * params.frequency_hz * h * h / (zone * kSpeedOfLight);
}

RssiSample sample_rssi(Vec2 source, Vec2 receiver, const RadioLinkParams& params, const NoiseModel& noise,
                       NoiseStream& stream) {
  RssiSample out;
  double d = distance(source, receiver);
  if (d < params.near_field_clamp_m) {
    d = params.near_field_clamp_m;
    out.clamped = true;
  }
  out.distance_m = d;
  const double z = stream.next_gaussian();
  out.rssi_dbm = received_power(d, params) + noise.shadowing_sigma_db * z;
  return out;
}

}  // namespace sparseloc
