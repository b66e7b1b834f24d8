#include <cmath>
#include <fstream>
#include <random>

#include "common/error.hpp"
#include "doctest.h"
#include "engine/color.hpp"
#include "engine/image.hpp"
#include "engine/render.hpp"
#include "json.hpp"

using namespace photoart;

namespace {

Image solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      auto* p = img.pixel(x, y);
      p[0] = r;
      p[1] = g;
      p[2] = b;
    }
  return img;
}

Image random_image(std::mt19937_64& rng, int w, int h) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
  std::uniform_int_distribution<int> d(0, 255);
  for (auto& v : px) v = static_cast<std::uint8_t>(d(rng));
  return Image(w, h, std::move(px));
}

std::array<int, 3> render_one(std::array<int, 3> px, const RetouchParams& p) {
  const auto out = render(solid(1, 1, px[0], px[1], px[2]), p).image;
  return {out.pixel(0, 0)[0], out.pixel(0, 0)[1], out.pixel(0, 0)[2]};
}

RetouchParams coastal_iteration1() {
  RetouchParams p;
  p.basic = {0.5, 20, -20, 20, 10, -10, 5800, 5, 25, 15};
  p.mixer[HslChannel::kOrange] = {0, 10, 10};
  p.mixer[HslChannel::kYellow] = {0, 10, 15};
  p.mixer[HslChannel::kCyan] = {0, -10, 5};
  p.mixer[HslChannel::kBlue] = {0, -10, -10};
  return p;
}

}  // namespace

TEST_CASE("white balance gains match the oracle") {
  struct Row {
    double temp, tint, r, g, b;
  };
  // tests/oracles/wb_gains.py
  const Row rows[] = {
      {6500, 0, 1, 1, 1},
      {5800, 5, 0.955396784123, 0.983333333333, 1.033324136252},
      {7000, 0, 1.001538379424, 1, 0.934356372568},
      {6500, 150, 1, 0.5, 1},
      {6500, -150, 1, 1.5, 1},
      {2000, 0, 0.538618237143, 1, 9.686165920314},
      {50000, 0, 1.245885792350, 1, 0.702113738192},
      {5500, 0, 0.934607066263, 1, 1.051499254798},
      {5000, 0, 0.897298117578, 1, 1.089504569854},
  };
  for (const auto& row : rows) {
    const auto g = white_balance_gains(row.temp, row.tint);
    CHECK(g[0] == doctest::Approx(row.r).epsilon(1e-10));
    CHECK(g[1] == doctest::Approx(row.g).epsilon(1e-10));
    CHECK(g[2] == doctest::Approx(row.b).epsilon(1e-10));
  }
  CHECK_THROWS_AS(white_balance_gains(1000, 0), Error);
  CHECK_THROWS_AS(white_balance_gains(6500, 151), Error);
}

TEST_CASE("tone curve spot values") {
  // tests/oracles/pixel_pipeline.py
  CHECK(tone_curve(0.1, {.shadows = 50}) == doctest::Approx(0.1224).epsilon(1e-12));
  CHECK(tone_curve(0.9, {.highlights = -50}) == doctest::Approx(0.8776).epsilon(1e-12));
  CHECK(tone_curve(0.0, {.blacks = 40}) == doctest::Approx(0.1 / 1.1).epsilon(1e-12));
  CHECK(tone_curve(0.5, {.whites = 40}) == doctest::Approx(0.5 / 0.9).epsilon(1e-12));
  CHECK(tone_curve(0.5, {.contrast = 100}) == 0.5);
  CHECK(tone_curve(0.7, {.contrast = 50}) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(tone_curve(0.37, {}) == 0.37);
}

TEST_CASE("mixer memberships") {
  const auto blue = mixer_weights(240);
  CHECK(blue[static_cast<int>(HslChannel::kBlue)] == 1.0);
  const auto w90 = mixer_weights(90);
  CHECK(w90[static_cast<int>(HslChannel::kYellow)] == doctest::Approx(0.5));
  CHECK(w90[static_cast<int>(HslChannel::kGreen)] == doctest::Approx(0.5));
  const auto w15 = mixer_weights(15);
  CHECK(w15[static_cast<int>(HslChannel::kRed)] == doctest::Approx(0.5));
  CHECK(w15[static_cast<int>(HslChannel::kOrange)] == doctest::Approx(0.5));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> hue(0, 360);
  for (int i = 0; i < 1000; ++i) {
    double sum = 0;
    for (double v : mixer_weights(hue(rng))) {
      CHECK(v >= 0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0));
  }
}

TEST_CASE("pixel renders match the oracle") {
  RetouchParams blue;
  blue.mixer[HslChannel::kBlue] = {0, -10, -10};
  CHECK(render_one({0, 0, 255}, blue) == std::array<int, 3>{11, 11, 218});

  RetouchParams ev1;
  ev1.basic.exposure = 1.0;
  CHECK(render_one({128, 128, 128}, ev1) == std::array<int, 3>{176, 176, 176});

  RetouchParams mono;
  mono.basic.saturation = -100;
  CHECK(render_one({200, 40, 40}, mono) == std::array<int, 3>{120, 120, 120});
  CHECK(render_one({30, 160, 90}, mono) == std::array<int, 3>{95, 95, 95});
  CHECK(render_one({90, 120, 230}, mono) == std::array<int, 3>{160, 160, 160});
  CHECK(render_one({250, 250, 10}, mono) == std::array<int, 3>{130, 130, 130});

  const auto p = coastal_iteration1();
  CHECK(render_one({128, 128, 128}, p) == std::array<int, 3>{150, 153, 157});
  CHECK(render_one({200, 150, 100}, p) == std::array<int, 3>{255, 203, 151});
  CHECK(render_one({60, 90, 160}, p) == std::array<int, 3>{54, 92, 183});
  CHECK(render_one({20, 20, 20}, p) == std::array<int, 3>{0, 0, 0});
  CHECK(render_one({240, 235, 220}, p) == std::array<int, 3>{255, 255, 255});
}

TEST_CASE("frozen random cases agree with the oracle within one code value") {
  std::ifstream in(PHOTOART_TEST_DATA_DIR "/fixtures/pixel_oracle.json");
  REQUIRE(in.good());
  const auto cases = nlohmann::json::parse(in);
  REQUIRE(cases.size() == 400);
  int exact = 0;
  for (const auto& c : cases) {
    RetouchParams p;
    const auto& j = c["params"];
    p.basic = {j["exposure"], j["contrast"], j["highlights"], j["shadows"], j["whites"],
               j["blacks"],   j["temp"],     j["tint"],       j["vibrance"], j["saturation"]};
    for (const auto& [name, v] : j["mixer"].items()) {
      p.mixer[*channel_from_name(name)] = {v[0], v[1], v[2]};
    }
    const auto got = render_one({c["pixel"][0], c["pixel"][1], c["pixel"][2]}, p);
    bool same = true;
    for (int k = 0; k < 3; ++k) {
      const int want = c["expected"][k];
      CHECK(std::abs(got[k] - want) <= 1);
      same = same && got[k] == want;
    }
    exact += same;
  }
  // float working buffers: rare off-by-one at rounding boundaries only
  CHECK(exact >= 390);
}

TEST_CASE("identity render is bit-exact") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5; ++i) {
    const auto img = random_image(rng, 37 + i, 23);
    const auto out = render(img, RetouchParams::identity());
    CHECK(out.image == img);
    REQUIRE(out.trace.stages.size() == kRenderStageNames.size());
    for (std::size_t s = 0; s < kRenderStageNames.size(); ++s) {
      CHECK(out.trace.stages[s].name == kRenderStageNames[s]);
    }
    CHECK(out.trace.stages[3].summary == "skipped");
  }
  // every 8-bit code value survives the float round trip
  std::vector<std::uint8_t> ramp(256 * 3);
  for (int v = 0; v < 256; ++v) ramp[3 * v] = ramp[3 * v + 1] = ramp[3 * v + 2] = v;
  const Image ramp_img(256, 1, ramp);
  CHECK(render(ramp_img, {}).image == ramp_img);
}

TEST_CASE("exposure doubles linear values") {
  FloatImage img{2, 1, Transfer::kLinear, {0.25f, 0.1f, 0.0f, 0.5f, 1.0f, 2.0f}};
  const auto before = img.rgb;
  apply_exposure(img, 1.0);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(img.rgb[i] == before[i] * 2.0f);
}

TEST_CASE("gray stays gray through presence and mixer") {
  RetouchParams p;
  p.basic.vibrance = 80;
  p.basic.saturation = 60;
  for (auto& c : p.mixer.channels) c = {50, 70, -90};
  for (int v = 0; v < 256; v += 5) {
    const auto out = render_one({v, v, v}, p);
    CHECK(out[0] == out[1]);
    CHECK(out[1] == out[2]);
  }
}

TEST_CASE("render rejects bad input") {
  RetouchParams p;
  p.basic.exposure = 9;
  CHECK_THROWS_AS(render(solid(2, 2, 1, 2, 3), p), Error);
  CHECK_THROWS_AS(render(Image{}, {}), Error);
}

TEST_CASE("codecs round trip") {
  std::mt19937_64 rng(5);
  const auto img = random_image(rng, 31, 17);
  CHECK(decode_image(encode_png(img)) == img);
  const auto jpeg = decode_image(encode_jpeg(img));
  CHECK(jpeg.width() == 31);
  CHECK(jpeg.height() == 17);
  auto png = encode_png(img);
  png.resize(png.size() / 2);
  CHECK_THROWS_AS(decode_image(png), Error);
  auto jpg = encode_jpeg(img);
  jpg.resize(jpg.size() / 2);
  CHECK_THROWS_AS(decode_image(jpg), Error);
  const std::vector<std::uint8_t> junk = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK_THROWS_AS(decode_image(junk), Error);
}
