#include <cmath>
#include <random>

#include "common/error.hpp"
#include "doctest.h"
#include "params/params.hpp"

using namespace photoart;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

}  // namespace

TEST_CASE("identity params serialize to the canonical layout") {
  const auto text = to_json(RetouchParams::identity());
  CHECK(text.rfind(R"({"basic":{"exposure":0,"contrast":0,"highlights":0,"shadows":0,)", 0) == 0);
  CHECK(text.find(R"("temp":6500)") != std::string::npos);
  CHECK(text.find(R"("magenta":{"hue":0,"saturation":0,"luminance":0}}})") != std::string::npos);
  CHECK(param_fields().size() == kParamFieldCount);
  CHECK(param_fields()[0].path == "basic.exposure");
  CHECK(param_fields()[kParamFieldCount - 1].path == "mixer.magenta.luminance");
}

TEST_CASE("absent fields default to identity and are reported") {
  const auto parsed = from_json(R"({"basic":{"exposure":0.5},"mixer":{"blue":{"saturation":-10}}})");
  CHECK(parsed.params.basic.exposure == 0.5);
  CHECK(parsed.params.basic.temp == 6500.0);
  CHECK(parsed.params.mixer[HslChannel::kBlue].saturation == -10.0);
  CHECK(parsed.defaulted.size() == kParamFieldCount - 2);
}

TEST_CASE("exposure bounds") {
  RetouchParams p;
  p.basic.exposure = 5.0;
  CHECK(validate(p).ok());
  p.basic.exposure = 5.01;
  const auto v = validate(p);
  REQUIRE(v.violations.size() == 1);
  CHECK(v.violations[0].field == "basic.exposure");
  CHECK(v.message().find("basic.exposure") != std::string::npos);
  CHECK(code_of([] { from_json(R"({"basic":{"exposure":5.01}})"); }) == ErrorCode::kValidation);
}

TEST_CASE("range edges") {
  RetouchParams p;
  p.basic.temp = 2000;
  p.basic.tint = -150;
  p.mixer[HslChannel::kRed].hue = 100;
  CHECK(validate(p).ok());
  p.basic.temp = 1999;
  CHECK(!validate(p).ok());
  p.basic.temp = 50000;
  p.mixer[HslChannel::kRed].hue = -100.5;
  CHECK(!validate(p).ok());
  p.mixer[HslChannel::kRed].hue = std::nan("");
  CHECK(!validate(p).ok());
}

TEST_CASE("parse errors name the problem") {
  auto message = [](std::string_view text) {
    try {
      from_json(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"basic":{"exposur":1}})").find("basic.exposur") != std::string::npos);
  CHECK(message(R"({"mixer":{"teal":{}}})").find("teal") != std::string::npos);
  CHECK(message(R"({"basic":{"contrast":"high"}})").find("basic.contrast") != std::string::npos);
  CHECK(message("{\n\"basic\": {,}}").find("line 2") != std::string::npos);
  CHECK(message("[1,2]") != "no error");
}

TEST_CASE("round trip is byte-stable for random valid sets") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    RetouchParams p;
    for (std::size_t f = 0; f < kParamFieldCount; ++f) {
      const auto& info = param_fields()[f];
      std::uniform_real_distribution<double> d(info.min, info.max);
      double v = d(rng);
      if (i % 2) v = std::round(v);
      field_ref(p, f) = v;
    }
    const auto text = to_json(p);
    const auto back = from_json(text).params;
    CHECK(back == p);
    CHECK(to_json(back) == text);
  }
}

TEST_CASE("diff lists changed fields in canonical order and applies back") {
  RetouchParams a, b;
  b.basic.contrast = 25;
  b.mixer[HslChannel::kBlue].saturation = -15;
  const auto d = diff(a, b);
  REQUIRE(d.changes.size() == 2);
  CHECK(d.changes[0] == ParamChange{"basic.contrast", 0, 25});
  CHECK(d.changes[1] == ParamChange{"mixer.blue.saturation", 0, -15});
  CHECK(apply(a, d) == b);
  CHECK(diff(b, b).empty());
  CHECK(diff_to_json(d).dump() ==
        R"([{"field":"basic.contrast","new":25,"old":0},{"field":"mixer.blue.saturation","new":-15,"old":0}])");
}

TEST_CASE("channel names") {
  CHECK(channel_name(HslChannel::kPurple) == "purple");
  CHECK(channel_from_name("cyan") == HslChannel::kCyan);
  CHECK(!channel_from_name("aqua").has_value());
}
