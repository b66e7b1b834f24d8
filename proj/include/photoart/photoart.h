/* photoart: parameter-space photo retouching driven by a multimodal agent.
 *
 * Plain C interface over the C++ core. Every function that can fail returns a
 * pa_status; on failure pa_last_error() holds a message for the calling
 * thread. Strings returned through char** are heap-allocated and released
 * with pa_string_free(). Handles are released with their *_free function;
 * passing NULL to a free function is a no-op.
 */
#ifndef PHOTOART_PHOTOART_H
#define PHOTOART_PHOTOART_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PHOTOART_BUILDING)
#    define PA_API __declspec(dllexport)
#  else
#    define PA_API __declspec(dllimport)
#  endif
#else
#  define PA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pa_status {
  PA_OK = 0,
  PA_ERR_INVALID_ARGUMENT = 1,
  PA_ERR_VALIDATION = 2,
  PA_ERR_IO = 3,
  PA_ERR_BACKEND = 4,
  PA_ERR_DIVERGENCE = 5,
  PA_ERR_PARSE = 6,
  PA_ERR_WRONG_STAGE = 7,
  PA_ERR_NOT_FOUND = 8,
  PA_ERR_MALFORMED_OUTPUT = 9,
  PA_ERR_INTERNAL = 10
} pa_status;

/* Output handles and strings are set to NULL on entry, so after a failed call
 * there is nothing to free. */
PA_API const char* pa_version(void);
PA_API const char* pa_status_name(pa_status status);
/* Message of the last failure on this thread; empty string if none. */
PA_API const char* pa_last_error(void);
PA_API void pa_string_free(char* s);

/* ---- images (8-bit sRGB, RGB interleaved) ---- */

typedef struct pa_image pa_image;

PA_API pa_status pa_image_load(const char* path, pa_image** out);
PA_API pa_status pa_image_decode(const uint8_t* data, size_t size, pa_image** out);
PA_API pa_status pa_image_from_rgb(int width, int height, const uint8_t* rgb, pa_image** out);
/* Format from the extension: .png, .jpg/.jpeg (quality 95). */
PA_API pa_status pa_image_save(const pa_image* image, const char* path);
PA_API int pa_image_width(const pa_image* image);
PA_API int pa_image_height(const pa_image* image);
PA_API const uint8_t* pa_image_pixels(const pa_image* image);
/* sha256 hex over the decoded pixels. */
PA_API pa_status pa_image_digest(const pa_image* image, char** out);
PA_API void pa_image_free(pa_image* image);

/* ---- retouching parameters ---- */

typedef struct pa_params pa_params;

PA_API pa_status pa_params_identity(pa_params** out);
/* Absent fields take identity values; their paths are listed in
 * *defaulted_json (a JSON array) when that pointer is non-NULL. */
PA_API pa_status pa_params_from_json(const char* json, pa_params** out, char** defaulted_json);
PA_API pa_status pa_params_to_json(const pa_params* params, char** out);
/* JSON array of {field, old, new} for every differing field. */
PA_API pa_status pa_params_diff_json(const pa_params* from, const pa_params* to, char** out);
PA_API void pa_params_free(pa_params* params);

/* ---- engine ---- */

/* trace (optional) receives the per-stage render log as a JSON array. */
PA_API pa_status pa_render(const pa_image* source, const pa_params* params, pa_image** out, char** trace);
/* {"report": {...}, "findings": [...]} */
PA_API pa_status pa_histogram_json(const pa_image* image, char** out);
PA_API pa_status pa_histogram_plot(const pa_image* image, pa_image** out);

/* ---- configuration ---- */

typedef struct pa_config pa_config;

/* path may be NULL for defaults. Environment overrides (PHOTOART_BASE_URL,
 * PHOTOART_MODEL, PHOTOART_API_KEY) apply when the config is used. */
PA_API pa_status pa_config_load(const char* path, pa_config** out);
/* JSON merge patch over the current settings, validated immediately. */
PA_API pa_status pa_config_patch(pa_config* config, const char* patch_json);
PA_API pa_status pa_config_to_json(const pa_config* config, char** out);
PA_API void pa_config_free(pa_config* config);

/* ---- agent sessions ---- */

typedef struct pa_agent pa_agent;

/* Called synchronously for every event, as one JSON object. */
typedef void (*pa_event_fn)(const char* event_json, void* user);

/* options_json (may be NULL):
 *   {"instruction": str, "direction": {"approach_index": n} | {"text": str},
 *    "max_iterations": n, "temperature": t, "style": [str], "record": path}
 * Unset values come from the config. */
PA_API pa_status pa_agent_run(const pa_config* config, const pa_image* source, const char* options_json,
                              pa_event_fn on_event, void* user, pa_agent** out);
/* Re-executes a recorded transcript at temperature 0. With verify != 0 the
 * run must match the recording exactly; mismatches give PA_ERR_DIVERGENCE
 * and are listed in *divergences_json (a JSON array) when non-NULL. */
PA_API pa_status pa_agent_replay(const char* transcript_path, const pa_image* source, int verify,
                                 pa_event_fn on_event, void* user, pa_agent** out, char** divergences_json);
PA_API pa_status pa_agent_state_json(const pa_agent* agent, char** out);
PA_API pa_status pa_agent_events_jsonl(const pa_agent* agent, char** out);
PA_API pa_status pa_agent_transcript_jsonl(const pa_agent* agent, char** out);
PA_API int pa_agent_iteration_count(const pa_agent* agent);
/* n = 0 is the source; kind 0 = image, 1 = histogram plot. */
PA_API pa_status pa_agent_iteration_image(const pa_agent* agent, int n, int kind, pa_image** out);
PA_API void pa_agent_free(pa_agent* agent);

/* ---- style references ---- */

/* Turns a reference into a style directive for pa_agent_run's "style" list:
 *   {"source": "reference_image" | "reference_params", "text": str}
 * With params the directive is built locally from the parameter table and the
 * reference's tone; without, one style_parse call goes to the configured
 * backend, recorded to record_path when that is non-NULL. */
PA_API pa_status pa_style_parse(const pa_config* config, const pa_image* reference, const pa_params* params,
                                const char* record_path, char** directive_json);

/* ---- HTTP service ---- */

typedef struct pa_service pa_service;

PA_API pa_status pa_service_create(const pa_config* config, pa_service** out);
/* Binds and serves on a background thread; *port receives the bound port. */
PA_API pa_status pa_service_start(pa_service* service, int* port);
/* Binds and serves on the calling thread until pa_service_stop. */
PA_API pa_status pa_service_listen(pa_service* service);
PA_API void pa_service_stop(pa_service* service);
PA_API void pa_service_free(pa_service* service);

#ifdef __cplusplus
}
#endif

#endif /* PHOTOART_PHOTOART_H */
