#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vlcsim/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace vlcsim;

namespace {

constexpr double kPi = std::numbers::pi;

PhyParams reference_phy() { return PhyParams{}; }  // defaults are the reference setup

// Literal product form of the LoS gain: (m+1)A/(2 pi Dd^2) cos^m(phi) Ts g(psi) cos(psi)
// with cos(phi) = cos(psi) = h / Dd. Written independently of path_loss.
double path_loss_product_form(double r, const PhyParams& phy) {
  const double m = -1.0 / std::log2(std::cos(phy.half_intensity_angle_deg * kPi / 180.0));
  const double h = phy.vertical_distance_m;
  const double dd = std::sqrt(r * r + h * h);
  const double cos_psi = h / dd;
  const double psi_deg = std::acos(cos_psi) * 180.0 / kPi;
  if (psi_deg > phy.fov_semi_angle_deg) return 0.0;
  const double g = concentrator_gain(psi_deg, phy.refractive_index, phy.fov_semi_angle_deg);
  return (m + 1.0) * phy.pd_area_m2 / (2.0 * kPi * dd * dd) * std::pow(cos_psi, m) *
         phy.optical_filter_gain * g * cos_psi;
}

}  // namespace

TEST_CASE("lambertian order") {
  CHECK(lambertian_order(60.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lambertian_order(30.0) == doctest::Approx(4.8188).epsilon(1e-4));
  // inverting the definition: cos(angle) = 2^(-1/m)
  const double m = lambertian_order(30.0);
  CHECK(std::cos(30.0 * kPi / 180.0) ==
        doctest::Approx(std::pow(2.0, -1.0 / m)).epsilon(1e-12));
  CHECK_THROWS_AS(lambertian_order(90.0), std::invalid_argument);
  CHECK_THROWS_AS(lambertian_order(0.0), std::invalid_argument);
  CHECK_THROWS_AS(lambertian_order(-10.0), std::invalid_argument);
}

TEST_CASE("concentrator gain") {
  CHECK(concentrator_gain(0.0, 1.5, 90.0) == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(concentrator_gain(45.0, 1.5, 30.0) == 0.0);
  CHECK(concentrator_gain(20.0, 1.5, 60.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(concentrator_gain(-1.0, 1.5, 60.0), std::invalid_argument);
}

TEST_CASE("path loss closed form") {
  PhyParams phy = reference_phy();

  SUBCASE("directly under the AP with m = 1") {
    phy.half_intensity_angle_deg = 60.0;  // m = 1
    const double h = phy.vertical_distance_m;
    const double expected =
        phy.pd_area_m2 * phy.refractive_index * phy.refractive_index / (kPi * h * h);
    CHECK(path_loss({3.0, 2.0}, {3.0, 2.0}, phy) ==
          doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("reference parameters at r = 1 m match the literal product form") {
    const double closed = path_loss({1.0, 0.0}, {0.0, 0.0}, phy);
    const double product = path_loss_product_form(1.0, phy);
    CHECK(closed == doctest::Approx(product).epsilon(1e-12));
    CHECK(closed > 0.0);
  }

  SUBCASE("FoV cutoff") {
    phy.fov_semi_angle_deg = 30.0;
    // incidence angle at r = 4 h exceeds 30 degrees
    CHECK(path_loss({4.0 * phy.vertical_distance_m, 0.0}, {0.0, 0.0}, phy) == 0.0);
    CHECK(path_loss({0.0, 0.0}, {0.0, 0.0}, phy) > 0.0);
  }

  SUBCASE("equivalence over random geometries and monotonicity in r") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coord(0.0, 12.0);
    double previous = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100000; ++i) {
      const Vec2 user{coord(rng), coord(rng)};
      const Vec2 ap{coord(rng), coord(rng)};
      const double closed = path_loss(user, ap, phy);
      const double product = path_loss_product_form((user - ap).norm(), phy);
      CHECK(closed == doctest::Approx(product).epsilon(1e-12));
    }
    for (double r = 0.0; r <= 10.0; r += 0.05) {
      const double h = path_loss({r, 0.0}, {0.0, 0.0}, phy);
      CHECK(h <= previous);
      CHECK(h >= 0.0);
      previous = h;
    }
  }
}

TEST_CASE("sinr") {
  const PhyParams phy = reference_phy();
  const double h = path_loss({1.0, 0.0}, {0.0, 0.0}, phy);

  SUBCASE("no interference closed form") {
    const double k2 = phy.oe_efficiency * phy.oe_efficiency;
    const double expected = k2 * std::pow(phy.tx_optical_power_w * h, 2) /
                            (phy.dc_bias_ratio * phy.dc_bias_ratio *
                             phy.noise_psd_w_per_hz * phy.bandwidth_hz);
    CHECK(sinr(h, {}, phy) == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("term-by-term recomputation in extended precision") {
    const std::vector<double> interferers{h / 2.0, h / 3.0};
    const long double k2 = static_cast<long double>(phy.oe_efficiency) * phy.oe_efficiency;
    const long double p = phy.tx_optical_power_w;
    long double interference = 0.0L;
    for (double hi : interferers) interference += (p * hi) * (p * hi);
    const long double noise = static_cast<long double>(phy.dc_bias_ratio) *
                              phy.dc_bias_ratio * phy.noise_psd_w_per_hz * phy.bandwidth_hz;
    const long double expected = k2 * (p * h) * (p * h) / (noise + k2 * interference);
    CHECK(sinr(h, interferers, phy) ==
          doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
  }

  SUBCASE("symmetric interferer bounds SINR below 1") {
    const std::vector<double> one{h};
    CHECK(sinr(h, one, phy) < 1.0);
    CHECK(sinr(h, one, phy) > 0.0);
  }
}

TEST_CASE("capacity") {
  CHECK(capacity(0.0, 20e6) == 0.0);
  CHECK(capacity(1.0, 20e6) == 20e6);  // log2(2) is exact
  CHECK(capacity(3.0, 20e6) == 40e6);  // log2(4) is exact
  CHECK_THROWS_AS(capacity(-0.1, 20e6), std::invalid_argument);
}

TEST_CASE("handover efficiency") {
  CHECK(handover_efficiency(1.0, 0.75) == 1.0);
  CHECK(handover_efficiency(0.0, 0.75) == 0.75);
  CHECK(handover_efficiency(0.5, 0.75) == doctest::Approx(0.875).epsilon(1e-15));
  // affine between the two cases of the piecewise definition
  for (double eta0 : {0.3, 0.75, 1.0}) {
    CHECK(handover_efficiency(0.0, eta0) == eta0);
    CHECK(handover_efficiency(1.0, eta0) == 1.0);
  }
  CHECK_THROWS_AS(handover_efficiency(1.5, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(handover_efficiency(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("rate tensor") {
  ApLayout layout;
  layout.phy = reference_phy();

  SUBCASE("single AP, single user, T = 1 equals the scalar pipeline") {
    layout.positions = {{2.0, 2.0}};
    const Vec2 user{1.0, 1.0};
    const RateTensor tensor = rate_tensor({{user}}, layout, 1);
    const double expected =
        capacity(sinr(path_loss(user, layout.positions[0], layout.phy), {}, layout.phy),
                 layout.phy.bandwidth_hz);
    CHECK(tensor.at(1)(0, 0) == expected);
  }

  SUBCASE("full interference with co-located APs is symmetric") {
    layout.positions = {{2.0, 2.0}, {2.0, 2.0}};
    layout.interference_policy = InterferencePolicy::FullInterference;
    const RateTensor tensor = rate_tensor({{Vec2{1.0, 1.0}}}, layout, 1);
    CHECK(tensor.at(1)(0, 0) == tensor.at(1)(0, 1));
  }

  SUBCASE("room centre of the two-AP room gets equal rates") {
    layout.positions = {{2.0, 2.0}, {6.0, 2.0}};
    const Vec2 centre{4.0, 2.0};
    const RateTensor tensor = rate_tensor({{centre}}, layout, 1);
    CHECK(tensor.at(1)(0, 0) == doctest::Approx(tensor.at(1)(0, 1)).epsilon(1e-12));
    // manual per-AP computation
    for (int a = 0; a < 2; ++a) {
      const double manual = capacity(
          sinr(path_loss(centre, layout.positions[static_cast<std::size_t>(a)], layout.phy),
               {}, layout.phy),
          layout.phy.bandwidth_hz);
      CHECK(tensor.at(1)(0, a) == manual);
    }
  }

  SUBCASE("frequency reuse equals full interference with cross-gains zeroed") {
    layout.positions = {{2.0, 2.0}, {6.0, 2.0}};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coord(0.0, 8.0);
    for (int i = 0; i < 200; ++i) {
      const Vec2 user{coord(rng), coord(rng) / 2.0};
      layout.interference_policy = InterferencePolicy::FrequencyReuse;
      const RateTensor reuse = rate_tensor({{user}}, layout, 1);
      for (int a = 0; a < 2; ++a) {
        const double gain = path_loss(user, layout.positions[static_cast<std::size_t>(a)],
                                      layout.phy);
        const double zeroed_cross =
            capacity(sinr(gain, {}, layout.phy), layout.phy.bandwidth_hz);
        CHECK(reuse.at(1)(0, a) == zeroed_cross);
      }
      layout.interference_policy = InterferencePolicy::FullInterference;
      const RateTensor full = rate_tensor({{user}}, layout, 1);
      for (int a = 0; a < 2; ++a) CHECK(full.at(1)(0, a) <= reuse.at(1)(0, a));
    }
  }

  SUBCASE("dimension mismatch is rejected") {
    layout.positions = {{2.0, 2.0}};
    std::vector<PositionFrame> frames{{Vec2{1.0, 1.0}}, {Vec2{1.0, 1.0}, Vec2{2.0, 2.0}}};
    CHECK_THROWS_AS(rate_tensor(frames, layout, 2), std::invalid_argument);
  }
}
