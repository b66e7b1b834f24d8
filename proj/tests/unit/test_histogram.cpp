#include <fstream>
#include <random>

#include "doctest.h"
#include "engine/image.hpp"
#include "histogram/histogram.hpp"

using namespace photoart;

namespace {

Image solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  std::vector<std::uint8_t> px;
  px.reserve(static_cast<std::size_t>(w) * h * 3);
  for (int i = 0; i < w * h; ++i) px.insert(px.end(), {r, g, b});
  return Image(w, h, std::move(px));
}

}  // namespace

TEST_CASE("uniform gray report") {
  const auto r = compute_histogram(solid(512, 512, 128, 128, 128));
  for (int c = 0; c < 3; ++c) {
    CHECK(r.channels[c][128] == 262144);
    std::uint64_t sum = 0;
    for (auto v : r.channels[c]) sum += v;
    CHECK(sum == 262144);
    CHECK(r.shadow_clip_fraction[c] == 0.0);
    CHECK(r.highlight_clip_fraction[c] == 0.0);
    CHECK(r.black_point[c] == 128);
    CHECK(r.white_point[c] == 128);
  }
  CHECK(r.midtone_fraction == 1.0);
  CHECK(r.dominant_channel == "none");
  CHECK(to_json_value(r)["midtone_fraction"] == 1.0);
  CHECK(summarize_tone(r).names() == std::vector<std::string>{"low_contrast", "balanced"});
}

TEST_CASE("clip fraction counts bin 255") {
  std::vector<std::uint8_t> px(10000 * 3, 100);
  for (int i = 0; i < 1000; ++i) px[3 * i] = 255;
  const auto r = compute_histogram(Image(100, 100, px));
  CHECK(r.highlight_clip_fraction[0] == 0.10);
  CHECK(r.highlight_clip_fraction[1] == 0.0);
  const auto f = summarize_tone(r);
  CHECK(f.has(ToneFinding::kHighlightClipping));
  CHECK(!f.has(ToneFinding::kBalanced));
}

TEST_CASE("noise image matches the committed recount") {
  const auto img = load_image(PHOTOART_TEST_DATA_DIR "/fixtures/noise_96x64.png");
  std::ifstream in(PHOTOART_TEST_DATA_DIR "/fixtures/noise_96x64.report.json");
  const auto want = nlohmann::json::parse(in);
  const auto r = compute_histogram(img);
  const auto got = to_json_value(r);
  CHECK(got["pixel_count"] == want["pixel_count"]);
  for (const char* name : {"red", "green", "blue"}) {
    const auto& g = got["channels"][name];
    const auto& w = want["channels"][name];
    CHECK(g["bins"] == w["bins"]);
    CHECK(g["black_point"] == w["black_point"]);
    CHECK(g["white_point"] == w["white_point"]);
    CHECK(g["shadow_clip_fraction"].get<double>() ==
          doctest::Approx(w["shadow_clip_fraction"].get<double>()).epsilon(1e-12));
    CHECK(g["highlight_clip_fraction"].get<double>() ==
          doctest::Approx(w["highlight_clip_fraction"].get<double>()).epsilon(1e-12));
    CHECK(std::abs(g["mean"].get<double>() - w["mean"].get<double>()) < 1e-9);
  }
  CHECK(std::abs(r.midtone_fraction - want["midtone_fraction"].get<double>()) < 1e-9);
  CHECK(std::abs(r.warm_cool_bias - want["warm_cool_bias"].get<double>()) < 1e-9);
  CHECK(r.dominant_channel == want["dominant_channel"]);
  CHECK(summarize_tone(r).has(ToneFinding::kCoolBias));
}

TEST_CASE("plot geometry") {
  HistogramReport r;
  r.pixel_count = 10;
  r.channels[1][100] = 10;
  const auto plot = render_histogram_image(r);
  CHECK(plot.width() == kPlotWidth);
  CHECK(plot.height() == kPlotHeight);
  for (int x = 0; x < kPlotWidth; ++x) {
    const bool in_bar = x >= 300 && x < 303;
    CHECK(plot.pixel(x, 0)[1] == (in_bar ? 255 : 0));
    CHECK(plot.pixel(x, kPlotHeight - 1)[1] == (in_bar ? 255 : 0));
    CHECK(plot.pixel(x, 128)[0] == 0);
  }
  CHECK(encode_png(render_histogram_image(r)) == encode_png(plot));
}

TEST_CASE("plot edge columns stay dark without clipping") {
  std::mt19937 rng(2);
  std::uniform_int_distribution<int> d(30, 220);
  std::vector<std::uint8_t> px(64 * 64 * 3);
  for (auto& v : px) v = static_cast<std::uint8_t>(d(rng));
  const auto plot = render_histogram_image(compute_histogram(Image(64, 64, px)));
  for (int y = 0; y < kPlotHeight; ++y) {
    for (int x : {0, 1, 2, kPlotWidth - 3, kPlotWidth - 2, kPlotWidth - 1}) {
      CHECK(plot.pixel(x, y)[0] == 0);
      CHECK(plot.pixel(x, y)[1] == 0);
      CHECK(plot.pixel(x, y)[2] == 0);
    }
  }
}

TEST_CASE("summaries of synthetic scenes") {
  CHECK(summarize_tone(compute_histogram(solid(8, 8, 20, 20, 30))).has(ToneFinding::kUnderexposed));
  CHECK(summarize_tone(compute_histogram(solid(8, 8, 230, 230, 220))).has(ToneFinding::kOverexposed));
  const auto cool = summarize_tone(compute_histogram(solid(8, 8, 60, 110, 200)));
  CHECK(cool.has(ToneFinding::kCoolBias));
  for (const auto& e : cool.entries) {
    if (e.finding == ToneFinding::kCoolBias) CHECK(e.threshold == -0.06);
  }
  CHECK(summarize_tone(compute_histogram(solid(8, 8, 100, 170, 100))).has(ToneFinding::kGreenBias));

  // half black, half white: wide and no midtones
  std::vector<std::uint8_t> px(100 * 3, 0);
  std::fill(px.begin() + 150, px.end(), 255);
  const auto split = summarize_tone(compute_histogram(Image(10, 10, px)));
  CHECK(split.has(ToneFinding::kHighContrast));
  CHECK(split.has(ToneFinding::kShadowClipping));
  CHECK(!split.has(ToneFinding::kLowContrast));
}

TEST_CASE("zero-sized image is rejected") {
  CHECK_THROWS(compute_histogram(Image{}));
}
