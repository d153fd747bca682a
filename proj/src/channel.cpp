#include "vlcsim/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vlcsim {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}  // namespace

void PhyParams::validate() const {
  if (!(half_intensity_angle_deg > 0.0 && half_intensity_angle_deg < 90.0))
    throw std::invalid_argument("phy: half-intensity angle must be in (0, 90) deg");
  if (!(fov_semi_angle_deg > 0.0 && fov_semi_angle_deg <= 90.0))
    throw std::invalid_argument("phy: FoV semi-angle must be in (0, 90] deg");
  if (!(pd_area_m2 > 0.0) || !(refractive_index > 0.0) || !(optical_filter_gain > 0.0) ||
      !(tx_optical_power_w > 0.0) || !(oe_efficiency > 0.0) || !(dc_bias_ratio > 0.0) ||
      !(noise_psd_w_per_hz > 0.0) || !(bandwidth_hz > 0.0) || !(vertical_distance_m > 0.0))
    throw std::invalid_argument("phy: all parameters must be strictly positive");
}

void ApLayout::validate() const {
  if (positions.empty()) throw std::invalid_argument("layout: need at least one AP");
  phy.validate();
}

double lambertian_order(double half_intensity_angle_deg) {
  if (!(half_intensity_angle_deg > 0.0 && half_intensity_angle_deg < 90.0))
    throw std::invalid_argument("lambertian_order: angle must be in (0, 90) deg");
  return -1.0 / std::log2(std::cos(half_intensity_angle_deg * kDegToRad));
}

double concentrator_gain(double incidence_angle_deg, double refractive_index,
                         double fov_semi_angle_deg) {
  if (incidence_angle_deg < 0.0)
    throw std::invalid_argument("concentrator_gain: negative incidence angle");
  if (!(refractive_index > 0.0))
    throw std::invalid_argument("concentrator_gain: refractive index must be > 0");
  if (!(fov_semi_angle_deg > 0.0 && fov_semi_angle_deg <= 90.0))
    throw std::invalid_argument("concentrator_gain: FoV semi-angle must be in (0, 90] deg");
  if (incidence_angle_deg > fov_semi_angle_deg) return 0.0;
  const double s = std::sin(fov_semi_angle_deg * kDegToRad);
  return refractive_index * refractive_index / (s * s);
}

double path_loss(const Vec2& user_pos, const Vec2& ap_pos, const PhyParams& phy) {
  const double m = lambertian_order(phy.half_intensity_angle_deg);
  const double h = phy.vertical_distance_m;
  const double r2 = (user_pos - ap_pos).squaredNorm();
  const double d2 = r2 + h * h;

  // PD faces straight up, so cos(phi) = cos(psi) = h / D_d.
  const double psi_deg = std::acos(h / std::sqrt(d2)) * kRadToDeg;
  if (psi_deg > phy.fov_semi_angle_deg) return 0.0;

  const double s = std::sin(phy.fov_semi_angle_deg * kDegToRad);
  const double n2 = phy.refractive_index * phy.refractive_index;
  const double prefactor = (m + 1.0) * phy.pd_area_m2 * phy.optical_filter_gain * n2 *
                           std::pow(h, m + 1.0) /
                           (2.0 * std::numbers::pi * s * s);
  return prefactor * std::pow(d2, -(m + 3.0) / 2.0);
}

double sinr(double h_serving, std::span<const double> h_interferers, const PhyParams& phy) {
  if (h_serving < 0.0) throw std::invalid_argument("sinr: negative serving gain");
  const double k2 = phy.oe_efficiency * phy.oe_efficiency;
  const double p = phy.tx_optical_power_w;
  double interference = 0.0;
  for (double h : h_interferers) {
    if (h < 0.0) throw std::invalid_argument("sinr: negative interferer gain");
    interference += (p * h) * (p * h);
  }
  const double signal = k2 * (p * h_serving) * (p * h_serving);
  const double noise = phy.dc_bias_ratio * phy.dc_bias_ratio * phy.noise_psd_w_per_hz *
                       phy.bandwidth_hz;
  return signal / (noise + k2 * interference);
}

double capacity(double sinr_value, double bandwidth_hz) {
  if (sinr_value < 0.0) throw std::invalid_argument("capacity: negative SINR");
  return bandwidth_hz * std::log2(1.0 + sinr_value);
}

double handover_efficiency(double x_prev, double eta0) {
  if (!(x_prev >= 0.0 && x_prev <= 1.0))
    throw std::invalid_argument("handover_efficiency: x_prev must be in [0, 1]");
  if (!(eta0 > 0.0 && eta0 <= 1.0))
    throw std::invalid_argument("handover_efficiency: eta0 must be in (0, 1]");
  return (1.0 - eta0) * x_prev + eta0;
}

std::vector<double> channel_gains(const Vec2& user_pos, const ApLayout& layout) {
  std::vector<double> gains(static_cast<std::size_t>(layout.count()));
  for (int a = 0; a < layout.count(); ++a)
    gains[static_cast<std::size_t>(a)] =
        path_loss(user_pos, layout.positions[static_cast<std::size_t>(a)], layout.phy);
  return gains;
}

double achievable_rate(const Vec2& user_pos, int ap, const ApLayout& layout) {
  const auto gains = channel_gains(user_pos, layout);
  std::vector<double> interferers;
  if (layout.interference_policy == InterferencePolicy::FullInterference) {
    for (int a = 0; a < layout.count(); ++a)
      if (a != ap) interferers.push_back(gains[static_cast<std::size_t>(a)]);
  }
  const double s = sinr(gains[static_cast<std::size_t>(ap)], interferers, layout.phy);
  return capacity(s, layout.phy.bandwidth_hz);
}

RateTensor rate_tensor(const std::vector<PositionFrame>& predicted,
                       const ApLayout& layout, int horizon) {
  if (horizon < 1) throw std::invalid_argument("rate_tensor: horizon must be >= 1");
  if (static_cast<int>(predicted.size()) != horizon)
    throw std::invalid_argument("rate_tensor: need one position frame per step");
  layout.validate();
  const std::size_t users = predicted.front().size();
  if (users == 0) throw std::invalid_argument("rate_tensor: no users");
  for (const auto& frame : predicted)
    if (frame.size() != users)
      throw std::invalid_argument("rate_tensor: frames disagree on user count");

  const int aps = layout.count();
  const bool full = layout.interference_policy == InterferencePolicy::FullInterference;
  RateTensor tensor;
  tensor.slices.assign(static_cast<std::size_t>(horizon),
                       ArrayXXd::Zero(static_cast<Eigen::Index>(users), aps));
  std::vector<double> interferers;
  for (int t = 1; t <= horizon; ++t) {
    auto& slice = tensor.at(t);
    for (std::size_t u = 0; u < users; ++u) {
      const auto gains = channel_gains(predicted[static_cast<std::size_t>(t - 1)][u], layout);
      for (int a = 0; a < aps; ++a) {
        interferers.clear();
        if (full)
          for (int a2 = 0; a2 < aps; ++a2)
            if (a2 != a) interferers.push_back(gains[static_cast<std::size_t>(a2)]);
        const double s = sinr(gains[static_cast<std::size_t>(a)], interferers, layout.phy);
        slice(static_cast<Eigen::Index>(u), a) = capacity(s, layout.phy.bandwidth_hz);
      }
    }
  }
  return tensor;
}

}  // namespace vlcsim
