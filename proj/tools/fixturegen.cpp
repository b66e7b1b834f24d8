// Regenerates the replay fixtures: a synthetic source image per scene and the
// transcript recorded by running its scripted replies through the agent.
//
//   fixturegen SCRIPT_DIR OUT_DIR
//
// Scene drawing uses integer arithmetic only so the PNGs are identical on
// every platform.
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "photoart/photoart.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kWidth = 192;
constexpr int kHeight = 128;

struct Rgb {
  int r, g, b;
};

class Canvas {
 public:
  explicit Canvas(std::uint32_t seed) : px_(kWidth * kHeight * 3), rng_(seed) {}

  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= kWidth || y >= kHeight) return;
    auto* p = &px_[3 * (static_cast<std::size_t>(y) * kWidth + x)];
    p[0] = clamp(c.r);
    p[1] = clamp(c.g);
    p[2] = clamp(c.b);
  }
  void fill(const std::function<Rgb(int, int)>& f) {
    for (int y = 0; y < kHeight; ++y)
      for (int x = 0; x < kWidth; ++x) set(x, y, f(x, y));
  }
  void rect(int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) set(x, y, c);
  }
  // Axis-aligned ellipse with radii rx, ry.
  void ellipse(int cx, int cy, int rx, int ry, Rgb c) {
    for (int y = cy - ry; y <= cy + ry; ++y)
      for (int x = cx - rx; x <= cx + rx; ++x) {
        const long dx = x - cx, dy = y - cy;
        if (dx * dx * ry * ry + dy * dy * rx * rx <= static_cast<long>(rx) * rx * ry * ry) set(x, y, c);
      }
  }
  // Uniform integer noise in [-amp, amp] on every channel.
  void noise(int amp) {
    for (auto& v : px_) {
      const int n = static_cast<int>(rng_() % (2u * amp + 1)) - amp;
      v = clamp(v + n);
    }
  }
  int rand(int n) { return static_cast<int>(rng_() % static_cast<std::uint32_t>(n)); }
  const std::vector<std::uint8_t>& pixels() const { return px_; }

 private:
  static std::uint8_t clamp(int v) { return static_cast<std::uint8_t>(v < 0 ? 0 : v > 255 ? 255 : v); }

  std::vector<std::uint8_t> px_;
  std::mt19937 rng_;
};

Rgb mix(Rgb a, Rgb b, int t, int n) {
  return {a.r + (b.r - a.r) * t / n, a.g + (b.g - a.g) * t / n, a.b + (b.b - a.b) * t / n};
}

Canvas coastal_cliffs() {
  Canvas c(101);
  c.fill([](int x, int y) {
    const int ridge = 42 + (x * 13 % 17) - (x / 24) * 2;
    if (y < ridge) return mix({118, 162, 212}, {176, 200, 224}, y, 48);
    const int band = (y + (x * 7 / 23) % 5) / 6;
    const Rgb beige{198, 170, 128}, brown{148, 110, 76};
    const Rgb base = band % 2 ? beige : brown;
    return Rgb{base.r - band, base.g - band, base.b - band};
  });
  c.ellipse(40, 14, 22, 5, {226, 229, 233});
  c.ellipse(130, 22, 30, 4, {220, 224, 230});
  c.noise(6);
  return c;
}

Canvas dusk_tree() {
  Canvas c(202);
  c.fill([](int, int y) {
    if (y < 88) return mix({64, 56, 92}, {128, 88, 100}, y, 88);
    return Rgb{24, 28, 22};
  });
  c.rect(140, 52, 148, 96, {12, 10, 12});
  c.ellipse(144, 44, 32, 26, {15, 14, 18});
  for (int i = 0; i < 40; ++i) c.set(116 + c.rand(56), 22 + c.rand(44), {52, 44, 70});
  c.noise(4);
  return c;
}

Canvas wading_figure() {
  Canvas c(303);
  c.fill([](int x, int y) {
    if (y < 20) return Rgb{38 + (x * 5 % 11), 70 + (x * 3 % 13), 34};
    const bool ripple = ((y + x / 16) % 7) == 0;
    return ripple ? Rgb{84, 140, 128} : Rgb{58, 116, 106};
  });
  c.rect(86, 40, 106, 70, {224, 224, 218});
  c.rect(80, 44, 86, 66, {198, 158, 128});
  c.rect(106, 44, 112, 66, {198, 158, 128});
  c.ellipse(96, 32, 7, 8, {92, 62, 44});
  c.rect(86, 70, 106, 88, {70, 90, 140});
  c.rect(88, 88, 94, 104, {190, 150, 120});
  c.rect(98, 88, 104, 104, {190, 150, 120});
  c.noise(5);
  return c;
}

Canvas yellow_house() {
  Canvas c(404);
  c.fill([](int, int y) {
    if (y < 30) return mix({146, 188, 230}, {190, 212, 232}, y, 30);
    if (y >= 100) return Rgb{80, 130, 60};
    return Rgb{170, 200, 150};
  });
  c.rect(36, 24, 154, 34, {168, 90, 70});
  c.rect(40, 34, 150, 100, {230, 214, 150});
  for (int i = 0; i < 4; ++i) {
    const int x = 50 + i * 26;
    c.rect(x, 46, x + 6, 72, {108, 148, 190});
    c.rect(x + 6, 46, x + 16, 72, {60, 70, 80});
    c.rect(x + 16, 46, x + 22, 72, {108, 148, 190});
  }
  c.ellipse(172, 64, 8, 44, {40, 80, 45});
  const Rgb petals[] = {{200, 40, 60}, {220, 120, 170}, {130, 70, 170}, {240, 200, 60}};
  for (int i = 0; i < 120; ++i) c.set(c.rand(kWidth), 102 + c.rand(26), petals[c.rand(4)]);
  c.noise(4);
  return c;
}

Canvas desert_spire() {
  Canvas c(505);
  c.fill([](int x, int y) {
    if (y < 52) return mix({64, 88, 124}, {92, 104, 120}, y, 52);
    return Rgb{88 + (x * 3 % 7), 50, 30};
  });
  c.ellipse(50, 16, 26, 5, {120, 124, 130});
  for (int y = 10; y < 96; ++y) {
    const int half = 5 + (y - 10) / 8;
    c.rect(150 - half, y, 150 + half, y + 1, {108, 58, 38});
  }
  for (int i = 0; i < 60; ++i) c.ellipse(c.rand(kWidth), 70 + c.rand(56), 2, 1, {48, 54, 28});
  c.noise(5);
  return c;
}

Canvas forest_reference() {
  Canvas c(606);
  c.fill([](int x, int y) {
    if (x % 22 < 4) return Rgb{26, 30, 28};
    const int haze = 40 - (y > 64 ? y - 64 : 64 - y) * 40 / 64;
    return Rgb{30 + haze, 56 + haze, 38 + haze + haze / 3};
  });
  c.noise(6);
  return c;
}

struct Fail {
  std::string message;
};

void check(pa_status s, const std::string& what) {
  if (s != PA_OK) throw Fail{what + ": " + pa_last_error()};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  pa_string_free(s);
  return out;
}

pa_image* save_source(const Canvas& canvas, const fs::path& path) {
  pa_image* img = nullptr;
  check(pa_image_from_rgb(kWidth, kHeight, canvas.pixels().data(), &img), "image");
  check(pa_image_save(img, path.string().c_str()), path.string());
  return img;
}

pa_config* script_config(const fs::path& script) {
  pa_config* config = nullptr;
  check(pa_config_load(nullptr, &config), "config");
  const json patch = {{"backend", {{"kind", "script"}, {"script", script.string()}}}};
  check(pa_config_patch(config, patch.dump().c_str()), "config");
  return config;
}

void record_scene(const std::string& name, const Canvas& canvas, const fs::path& scripts, const fs::path& out) {
  const auto script_path = scripts / (name + ".script.json");
  std::ifstream in(script_path);
  if (!in) throw Fail{"missing " + script_path.string()};
  const auto script = json::parse(in);

  pa_image* source = save_source(canvas, out / (name + ".png"));
  pa_config* config = script_config(script_path);
  const auto transcript = out / (name + ".transcript.jsonl");
  fs::remove(transcript);
  const json options = {{"instruction", script.value("instruction", "")},
                        {"direction", {{"approach_index", 1}}},
                        {"max_iterations", 5},
                        {"record", transcript.string()}};
  pa_agent* agent = nullptr;
  const auto status = pa_agent_run(config, source, options.dump().c_str(), nullptr, nullptr, &agent);
  const std::string error = status == PA_OK ? "" : pa_last_error();
  const int iterations = pa_agent_iteration_count(agent);
  pa_agent_free(agent);
  pa_config_free(config);
  pa_image_free(source);
  if (status != PA_OK) throw Fail{name + ": " + error};
  std::printf("%s: %d iteration(s)\n", name.c_str(), iterations);
}

void record_style(const std::string& name, const Canvas& canvas, const fs::path& scripts, const fs::path& out) {
  pa_image* reference = save_source(canvas, out / (name + ".png"));
  pa_config* config = script_config(scripts / (name + ".script.json"));
  const auto transcript = out / (name + ".transcript.jsonl");
  fs::remove(transcript);
  char* directive = nullptr;
  const auto status = pa_style_parse(config, reference, nullptr, transcript.string().c_str(), &directive);
  const std::string error = status == PA_OK ? "" : pa_last_error();
  pa_config_free(config);
  pa_image_free(reference);
  if (status != PA_OK) throw Fail{name + ": " + error};
  std::ofstream(out / (name + ".directive.json")) << json::parse(take(directive)).dump(1) << '\n';
  std::printf("%s: style directive recorded\n", name.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: fixturegen SCRIPT_DIR OUT_DIR\n");
    return 2;
  }
  const fs::path scripts = argv[1], out = argv[2];
  try {
    fs::create_directories(out);
    record_scene("coastal_cliffs", coastal_cliffs(), scripts, out);
    record_scene("dusk_tree", dusk_tree(), scripts, out);
    record_scene("wading_figure", wading_figure(), scripts, out);
    record_scene("yellow_house", yellow_house(), scripts, out);
    record_scene("desert_spire", desert_spire(), scripts, out);
    record_style("forest_reference", forest_reference(), scripts, out);
  } catch (const Fail& f) {
    std::fprintf(stderr, "fixturegen: %s\n", f.message.c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fixturegen: %s\n", e.what());
    return 1;
  }
  return 0;
}
