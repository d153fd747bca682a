#pragma once

#include "vlcsim/types.hpp"

#include <span>

namespace vlcsim {

/// Physical-layer parameters of an LED/PD downlink. Defaults follow the
/// reference indoor setup (20 MHz OOK-style baseband, ceiling LEDs 2.3 m
/// above the receiver plane).
struct PhyParams {
  double half_intensity_angle_deg = 30.0;  // LED half-intensity semi-angle
  double pd_area_m2 = 1e-4;                // photo-diode physical area
  double fov_semi_angle_deg = 90.0;        // receiver field-of-view semi-angle
  double refractive_index = 1.5;           // concentrator refractive index
  double optical_filter_gain = 1.0;
  double tx_optical_power_w = 10.0;
  double oe_efficiency = 0.53;             // optical-to-electrical conversion
  double dc_bias_ratio = 3.0;              // DC-bias factor; 3 makes clipping noise negligible
  double noise_psd_w_per_hz = 1e-19;
  double bandwidth_hz = 20e6;
  double vertical_distance_m = 2.3;        // AP ceiling plane to PD plane

  void validate() const;
};

enum class InterferencePolicy { FrequencyReuse, FullInterference };

struct ApLayout {
  std::vector<Vec2> positions;  // floor-plane coordinates (m)
  InterferencePolicy interference_policy = InterferencePolicy::FrequencyReuse;
  PhyParams phy;

  int count() const { return static_cast<int>(positions.size()); }
  void validate() const;
};

/// Lambertian emission order m = -1 / log2(cos(half_angle)).
double lambertian_order(double half_intensity_angle_deg);

/// Optical concentrator gain: n^2 / sin^2(fov) inside the field of view, else 0.
double concentrator_gain(double incidence_angle_deg, double refractive_index,
                         double fov_semi_angle_deg);

/// LoS channel gain between a floor position and a ceiling AP (receiver PD
/// pointing straight up, so the irradiance and incidence angles coincide).
/// Returns 0 when the incidence angle exceeds the FoV semi-angle.
double path_loss(const Vec2& user_pos, const Vec2& ap_pos, const PhyParams& phy);

/// Electrical-domain SINR for a serving gain against a set of interferer gains.
double sinr(double h_serving, std::span<const double> h_interferers, const PhyParams& phy);

/// Shannon capacity B * log2(1 + SINR), bit/s.
double capacity(double sinr_value, double bandwidth_hz);

/// Handover efficiency as an affine function of the previous (possibly
/// relaxed) assignment variable: eta = (1 - eta0) x_prev + eta0.
double handover_efficiency(double x_prev, double eta0);

/// LoS gains from one user position to every AP in the layout.
std::vector<double> channel_gains(const Vec2& user_pos, const ApLayout& layout);

/// Achievable rate from AP `ap` at `user_pos`; interferers per layout policy.
double achievable_rate(const Vec2& user_pos, int ap, const ApLayout& layout);

/// Rate tensor over a prediction horizon: R[t](user, ap) for t = 1..horizon,
/// where predicted[t-1] holds every user's position t service times ahead.
RateTensor rate_tensor(const std::vector<PositionFrame>& predicted,
                       const ApLayout& layout, int horizon);

}  // namespace vlcsim
