/* Plain C client of the public header. */
#include <photoart/photoart.h>

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond,  \
              pa_last_error() ? pa_last_error() : "");                \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static int events_seen = 0;
static void count_event(const char* event_json, void* user) {
  (void)user;
  if (event_json && event_json[0] == '{') ++events_seen;
}

int main(void) {
  enum { W = 16, H = 12 };
  uint8_t rgb[W * H * 3];
  for (int i = 0; i < W * H; ++i) {
    rgb[3 * i] = (uint8_t)(i * 7);
    rgb[3 * i + 1] = (uint8_t)(255 - i);
    rgb[3 * i + 2] = (uint8_t)(i * 3 + 40);
  }
  pa_image* src = NULL;
  EXPECT(pa_image_from_rgb(W, H, rgb, &src) == PA_OK);
  EXPECT(pa_image_width(src) == W && pa_image_height(src) == H);

  /* identity render reproduces the pixels */
  pa_params* id = NULL;
  pa_image* out = NULL;
  EXPECT(pa_params_identity(&id) == PA_OK);
  EXPECT(pa_render(src, id, &out, NULL) == PA_OK);
  EXPECT(out && memcmp(pa_image_pixels(out), rgb, sizeof rgb) == 0);
  pa_image_free(out);
  out = NULL;

  /* bad inputs report codes, never crash */
  pa_params* bad = NULL;
  EXPECT(pa_params_from_json("{\"basic\":{\"exposure\":9}}", &bad, NULL) == PA_ERR_VALIDATION);
  EXPECT(bad == NULL);
  EXPECT(pa_params_from_json("{nope", &bad, NULL) == PA_ERR_PARSE);
  EXPECT(pa_image_from_rgb(0, 4, rgb, &out) != PA_OK);
  EXPECT(pa_render(NULL, id, &out, NULL) == PA_ERR_INVALID_ARGUMENT);
  EXPECT(pa_image_load("/nonexistent/x.png", &out) == PA_ERR_IO);
  EXPECT(strcmp(pa_status_name(PA_ERR_DIVERGENCE), "") != 0);

  /* partial params: defaulted fields are reported */
  pa_params* warm = NULL;
  char* defaulted = NULL;
  EXPECT(pa_params_from_json("{\"basic\":{\"temp\":7000}}", &warm, &defaulted) == PA_OK);
  EXPECT(defaulted && strstr(defaulted, "exposure") != NULL);
  pa_string_free(defaulted);
  char* diff = NULL;
  EXPECT(pa_params_diff_json(id, warm, &diff) == PA_OK);
  EXPECT(diff && strstr(diff, "temp") != NULL);
  pa_string_free(diff);

  char* hist = NULL;
  EXPECT(pa_histogram_json(src, &hist) == PA_OK);
  EXPECT(hist && strstr(hist, "findings") != NULL);
  pa_string_free(hist);

  /* heuristic agent run end to end */
  pa_config* cfg = NULL;
  EXPECT(pa_config_load(NULL, &cfg) == PA_OK);
  EXPECT(pa_config_patch(cfg, "{\"backend\":{\"kind\":\"heuristic\"}}") == PA_OK);
  pa_agent* agent = NULL;
  EXPECT(pa_agent_run(cfg, src, "{\"max_iterations\":3}", count_event, NULL, &agent) == PA_OK);
  EXPECT(agent && pa_agent_iteration_count(agent) >= 1 && pa_agent_iteration_count(agent) <= 3);
  EXPECT(events_seen > 0);
  pa_agent_free(agent);
  EXPECT(pa_agent_run(cfg, src, "{\"unknown_option\":1}", NULL, NULL, &agent) != PA_OK);
  EXPECT(agent == NULL);

  /* replay of a recorded fixture verifies */
  pa_image* dusk = NULL;
  EXPECT(pa_image_load(PHOTOART_TEST_DATA_DIR "/fixtures/replay/dusk_tree.png", &dusk) == PA_OK);
  pa_agent* replayed = NULL;
  char* divergences = NULL;
  EXPECT(pa_agent_replay(PHOTOART_TEST_DATA_DIR "/fixtures/replay/dusk_tree.transcript.jsonl", dusk, 1, NULL,
                         NULL, &replayed, &divergences) == PA_OK);
  EXPECT(replayed && pa_agent_iteration_count(replayed) == 3);
  pa_string_free(divergences);
  pa_agent_free(replayed);
  replayed = NULL;
  /* wrong source diverges */
  EXPECT(pa_agent_replay(PHOTOART_TEST_DATA_DIR "/fixtures/replay/dusk_tree.transcript.jsonl", src, 1, NULL,
                         NULL, &replayed, NULL) == PA_ERR_DIVERGENCE);
  pa_agent_free(replayed);

  pa_image_free(dusk);
  pa_config_free(cfg);
  pa_params_free(warm);
  pa_params_free(id);
  pa_image_free(src);
  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  else printf("capi: ok\n");
  return failures ? 1 : 0;
}
